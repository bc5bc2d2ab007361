//! The shipped `.pc` programs, each with a small default instance.

pub const QUICKSORT: &str = include_str!("../../corpus/quicksort.pc");
pub const GAUSS: &str = include_str!("../../corpus/gauss.pc");
pub const FFT: &str = include_str!("../../corpus/fft.pc");
pub const FFT_AS_PRINTED: &str = include_str!("../../corpus/fft_as_printed.pc");
pub const BROADCAST: &str = include_str!("../../corpus/broadcast.pc");
pub const SPLIT_NOSKIP: &str = include_str!("../../corpus/split_noskip.pc");

pub const QUICKSORT_STATE: &str = include_str!("../../corpus/quicksort.state");
pub const GAUSS_STATE: &str = include_str!("../../corpus/gauss.state");
pub const FFT_STATE: &str = include_str!("../../corpus/fft.state");
pub const BROADCAST_STATE: &str = include_str!("../../corpus/broadcast.state");

/// `(file name, source)` for every shipped program.
pub const ALL: [(&str, &str); 6] = [
    ("quicksort.pc", QUICKSORT),
    ("gauss.pc", GAUSS),
    ("fft.pc", FFT),
    ("fft_as_printed.pc", FFT_AS_PRINTED),
    ("broadcast.pc", BROADCAST),
    ("split_noskip.pc", SPLIT_NOSKIP),
];

/// `(file name, contents)` for every shipped state file.
pub const STATES: [(&str, &str); 4] = [
    ("quicksort.state", QUICKSORT_STATE),
    ("gauss.state", GAUSS_STATE),
    ("fft.state", FFT_STATE),
    ("broadcast.state", BROADCAST_STATE),
];
