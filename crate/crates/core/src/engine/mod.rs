//! Simulators for choreographies and projected networks, and the schedulers
//! that drive them.

mod chor;
mod net;

pub use chor::{run_choreography, ChorConfig};
pub use net::{run_network, NetConfig};

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::lang::{Name, StateMap};

pub const DEFAULT_FUEL: u64 = 1_000_000;
/// Exhaustive exploration refuses programs with more initial processes.
pub const EXHAUSTIVE_MAX_PROCESSES: usize = 10;
const EXHAUSTIVE_MAX_CONFIGS: usize = 2_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StepKind {
    Com,
    Sel,
    Start,
    Intro,
    Cond,
    Unfold,
}

impl fmt::Display for StepKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StepKind::Com => "com",
            StepKind::Sel => "sel",
            StepKind::Start => "start",
            StepKind::Intro => "intro",
            StepKind::Cond => "cond",
            StepKind::Unfold => "call-unfold",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepLabel {
    pub kind: StepKind,
    pub participants: Vec<Name>,
    pub payload: String,
}

impl StepLabel {
    pub fn new(kind: StepKind, participants: Vec<Name>, payload: impl Into<String>) -> Self {
        StepLabel {
            kind,
            participants,
            payload: payload.into(),
        }
    }
}

/// One line per step: `k | kind | participants | payload`, counting from 1.
pub fn render_trace(trace: &[StepLabel]) -> String {
    let mut out = String::new();
    for (k, s) in trace.iter().enumerate() {
        let ps: Vec<&str> = s.participants.iter().map(|n| n.as_str()).collect();
        out.push_str(&format!(
            "{} | {} | {} | {}\n",
            k + 1,
            s.kind,
            ps.join(", "),
            s.payload
        ));
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    /// Always the first enabled step.
    Sequential,
    /// Uniform choice among enabled steps, seeded.
    Random(u64),
    /// Every interleaving, up to the given number of steps per run.
    Exhaustive(u64),
}

#[derive(Clone, Debug, PartialEq)]
pub enum Outcome {
    Terminated {
        state: StateMap,
        trace: Vec<StepLabel>,
    },
    FuelExhausted {
        trace: Vec<StepLabel>,
    },
    /// No step is enabled but something remains to run.
    Stuck {
        report: String,
        trace: Vec<StepLabel>,
    },
    /// A runtime error, such as a failed expression evaluation.
    Error {
        message: String,
        trace: Vec<StepLabel>,
    },
    Explored(Exploration),
}

impl Outcome {
    pub fn trace(&self) -> &[StepLabel] {
        match self {
            Outcome::Terminated { trace, .. }
            | Outcome::FuelExhausted { trace }
            | Outcome::Stuck { trace, .. }
            | Outcome::Error { trace, .. } => trace,
            Outcome::Explored(_) => &[],
        }
    }

    pub fn final_state(&self) -> Option<&StateMap> {
        match self {
            Outcome::Terminated { state, .. } => Some(state),
            _ => None,
        }
    }
}

/// Everything reachable from one configuration. Final states are restricted
/// to the initial processes.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Exploration {
    pub finals: Vec<StateMap>,
    pub stuck: Vec<String>,
    pub errors: Vec<String>,
    pub configs: usize,
    /// Some run was cut at the step bound or the configuration cap.
    pub truncated: bool,
}

/// Final state without the processes created at runtime.
pub fn initial_part(state: &StateMap) -> StateMap {
    state
        .iter()
        .filter(|(n, _)| !n.is_fresh())
        .map(|(n, v)| (n.clone(), v.clone()))
        .collect()
}

/// A transition system the schedulers can drive.
pub(crate) trait System: Clone {
    type Step: Clone;
    fn steps(&self) -> Vec<Self::Step>;
    fn apply(&self, step: &Self::Step) -> Result<(StepLabel, Self), String>;
    fn is_done(&self) -> bool;
    fn state(&self) -> StateMap;
    fn stuck_report(&self) -> String;
    /// Equal for configurations that differ only in runtime names.
    fn key(&self) -> String;
    fn initial_process_count(&self) -> usize;
    /// A step that touches no other enabled step's processes and leaves
    /// the initial cells alone. Exploration follows one such step alone.
    fn is_local(&self, _step: &Self::Step) -> bool {
        false
    }
}

pub(crate) fn drive<S: System>(mut sys: S, strategy: Strategy, fuel: u64) -> Outcome {
    let mut rng = match strategy {
        Strategy::Random(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
        Strategy::Exhaustive(bound) => return Outcome::Explored(explore(sys, bound)),
        Strategy::Sequential => None,
    };
    let mut trace = Vec::new();
    loop {
        if sys.is_done() {
            return Outcome::Terminated {
                state: sys.state(),
                trace,
            };
        }
        let steps = sys.steps();
        if steps.is_empty() {
            return Outcome::Stuck {
                report: sys.stuck_report(),
                trace,
            };
        }
        if trace.len() as u64 >= fuel {
            return Outcome::FuelExhausted { trace };
        }
        let i = rng.as_mut().map_or(0, |r| r.gen_range(0..steps.len()));
        match sys.apply(&steps[i]) {
            Ok((label, next)) => {
                trace.push(label);
                sys = next;
            }
            Err(message) => return Outcome::Error { message, trace },
        }
    }
}

fn explore<S: System>(start: S, bound: u64) -> Exploration {
    let mut out = Exploration::default();
    if start.initial_process_count() > EXHAUSTIVE_MAX_PROCESSES {
        out.errors.push(format!(
            "exhaustive mode is limited to {EXHAUSTIVE_MAX_PROCESSES} initial processes, this program has {}",
            start.initial_process_count()
        ));
        return out;
    }
    let mut seen: HashSet<String> = HashSet::new();
    let mut finals: BTreeSet<String> = BTreeSet::new();
    let mut stack = vec![(start, 0u64)];
    while let Some((sys, depth)) = stack.pop() {
        if !seen.insert(sys.key()) {
            continue;
        }
        out.configs += 1;
        if seen.len() > EXHAUSTIVE_MAX_CONFIGS {
            out.truncated = true;
            break;
        }
        if sys.is_done() {
            let state = initial_part(&sys.state());
            if finals.insert(crate::syntax::print_state(&state)) {
                out.finals.push(state);
            }
            continue;
        }
        let steps = sys.steps();
        if steps.is_empty() {
            let r = sys.stuck_report();
            if !out.stuck.contains(&r) {
                out.stuck.push(r);
            }
            continue;
        }
        let steps = match steps.iter().find(|s| sys.is_local(s)) {
            Some(s) => vec![s.clone()],
            None => steps,
        };
        if depth >= bound {
            out.truncated = true;
            continue;
        }
        for s in steps.iter().rev() {
            match sys.apply(s) {
                Ok((_, next)) => stack.push((next, depth + 1)),
                Err(e) => {
                    if !out.errors.contains(&e) {
                        out.errors.push(e);
                    }
                }
            }
        }
    }
    out
}

/// Renames runtime names (`#k`, `~k`) in order of first appearance in
/// `text`, so that configurations equal up to those names print alike.
pub(crate) fn canonical_names(text: &str) -> String {
    let mut map: Vec<(String, String)> = Vec::new();
    let mut out = String::with_capacity(text.len());
    let bytes: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c == '#' || c == '~' {
            let mut j = i + 1;
            while j < bytes.len() && bytes[j].is_ascii_digit() {
                j += 1;
            }
            let tok: String = bytes[i..j].iter().collect();
            let idx = match map.iter().position(|(t, _)| *t == tok) {
                Some(k) => k,
                None => {
                    map.push((tok.clone(), String::new()));
                    map.len() - 1
                }
            };
            out.push_str(&format!("{c}{idx}"));
            i = j;
        } else {
            out.push(c);
            i += 1;
        }
    }
    out
}
