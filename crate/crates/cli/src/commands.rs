use std::path::Path;

use chorus_core::check::check_program;
use chorus_core::corpus::{
    decode_result, default_instance, encode_instance, oracle, random_broadcast, random_fft,
    random_gauss, random_quicksort, sources, Example, Instance,
};
use chorus_core::diag::has_errors;
use chorus_core::engine::{
    initial_part, render_trace, run_choreography, run_network, Exploration, Outcome, Strategy,
    DEFAULT_FUEL,
};
use chorus_core::epp::{epp_program, prune};
use chorus_core::lang::{ProjectedProgram, SourceProgram, StateMap};
use chorus_core::syntax::{
    parse_program, parse_projected, parse_state, print_projected, print_state,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::status::{DIAGNOSTICS, FUEL_OR_MISMATCH, OK, STUCK};
use crate::{Io, RunOpts, StrategyArg};

/// Tolerance for comparing numeric cells across the two levels.
const STATE_TOL: f64 = 1e-12;
/// Tolerance for comparing decoded results with an oracle.
const ORACLE_TOL: f64 = 1e-9;

fn read(io: &mut Io, file: &Path) -> Option<String> {
    match std::fs::read_to_string(file) {
        Ok(t) => Some(t),
        Err(e) => {
            io.error(format!("{}: {e}", file.display()));
            None
        }
    }
}

fn load_program(io: &mut Io, file: &Path) -> Option<SourceProgram> {
    let text = read(io, file)?;
    match parse_program(&text) {
        Ok(p) => Some(p),
        Err(diags) => {
            diags.iter().for_each(|d| io.diagnostic(file, d));
            None
        }
    }
}

/// Parses and checks; diagnostics go to the error stream.
fn load_checked(io: &mut Io, file: &Path) -> Option<SourceProgram> {
    let prog = load_program(io, file)?;
    let diags = check_program(&prog);
    diags.iter().for_each(|d| io.diagnostic(file, d));
    (!has_errors(&diags)).then_some(prog)
}

fn load_state(io: &mut Io, file: Option<&Path>) -> Option<StateMap> {
    let Some(file) = file else {
        return Some(StateMap::new());
    };
    let text = read(io, file)?;
    match parse_state(&text) {
        Ok(s) => Some(s),
        Err(d) => {
            io.diagnostic(file, &d);
            None
        }
    }
}

fn project_program(
    io: &mut Io,
    file: &Path,
    prog: &SourceProgram,
    init: &StateMap,
    pruned: bool,
) -> Option<ProjectedProgram> {
    match epp_program(prog, init) {
        Ok(mut pp) => {
            if pruned {
                prune(&mut pp);
            }
            Some(pp)
        }
        Err(diags) => {
            diags.iter().for_each(|d| io.diagnostic(file, d));
            None
        }
    }
}

fn strategy(opts: &RunOpts) -> Strategy {
    match opts.strategy {
        StrategyArg::Seq => Strategy::Sequential,
        StrategyArg::Random => Strategy::Random(opts.seed),
        StrategyArg::Exhaustive => Strategy::Exhaustive(opts.max_steps),
    }
}

pub fn check(io: &mut Io, file: &Path) -> u8 {
    match load_checked(io, file) {
        Some(_) => {
            io.out.push_str("ok\n");
            OK
        }
        None => DIAGNOSTICS,
    }
}

pub fn project(
    io: &mut Io,
    file: &Path,
    state: Option<&Path>,
    pruned: bool,
    out: Option<&Path>,
) -> u8 {
    let Some(prog) = load_checked(io, file) else {
        return DIAGNOSTICS;
    };
    let Some(init) = load_state(io, state) else {
        return DIAGNOSTICS;
    };
    let Some(pp) = project_program(io, file, &prog, &init, pruned) else {
        return DIAGNOSTICS;
    };
    let text = print_projected(&pp);
    match out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, text) {
                io.error(format!("{}: {e}", path.display()));
                return DIAGNOSTICS;
            }
        }
        None => io.out.push_str(&text),
    }
    OK
}

fn report_exploration(io: &mut Io, x: &Exploration) -> u8 {
    io.out.push_str(&format!(
        "configurations: {}\nfinal states: {}\n",
        x.configs,
        x.finals.len()
    ));
    for s in &x.finals {
        io.out.push_str("--\n");
        io.out.push_str(&print_state(s));
    }
    for r in &x.stuck {
        io.err.push_str(&format!("stuck:\n{r}\n"));
    }
    for e in &x.errors {
        io.error(e);
    }
    if !x.errors.is_empty() {
        DIAGNOSTICS
    } else if !x.stuck.is_empty() {
        STUCK
    } else if x.truncated {
        io.err.push_str("exploration cut at the step bound\n");
        FUEL_OR_MISMATCH
    } else {
        OK
    }
}

fn report(io: &mut Io, out: &Outcome, trace: bool, stuck_word: &str) -> u8 {
    if trace {
        io.out.push_str(&render_trace(out.trace()));
    }
    match out {
        Outcome::Terminated { state, .. } => {
            io.out.push_str(&print_state(&initial_part(state)));
            OK
        }
        Outcome::FuelExhausted { trace } => {
            io.err
                .push_str(&format!("fuel exhausted after {} steps\n", trace.len()));
            FUEL_OR_MISMATCH
        }
        Outcome::Stuck { report, .. } => {
            io.err.push_str(&format!("{stuck_word}:\n{report}\n"));
            STUCK
        }
        Outcome::Error { message, .. } => {
            io.error(message);
            DIAGNOSTICS
        }
        Outcome::Explored(x) => report_exploration(io, x),
    }
}

pub fn run(io: &mut Io, file: &Path, opts: &RunOpts) -> u8 {
    let Some(prog) = load_checked(io, file) else {
        return DIAGNOSTICS;
    };
    let Some(init) = load_state(io, opts.state.as_deref()) else {
        return DIAGNOSTICS;
    };
    let out = run_choreography(&prog, &init, strategy(opts), opts.max_steps);
    report(io, &out, opts.trace, "stuck")
}

pub fn simulate(io: &mut Io, file: &Path, opts: &RunOpts) -> u8 {
    let Some(text) = read(io, file) else {
        return DIAGNOSTICS;
    };
    let mut pp = match parse_projected(&text) {
        Ok(pp) => pp,
        Err(d) => {
            io.diagnostic(file, &d);
            return DIAGNOSTICS;
        }
    };
    let Some(init) = load_state(io, opts.state.as_deref()) else {
        return DIAGNOSTICS;
    };
    for (n, v) in init {
        match pp.network.processes.get_mut(&n) {
            Some(p) => p.cell = v,
            None => {
                io.error(format!("state names `{n}`, which is not in the network"));
                return DIAGNOSTICS;
            }
        }
    }
    let out = run_network(&pp, strategy(opts), opts.max_steps);
    report(io, &out, opts.trace, "deadlock")
}

fn states_equal(a: &StateMap, b: &StateMap) -> bool {
    a.len() == b.len()
        && a.iter()
            .zip(b)
            .all(|((n, x), (m, y))| n == m && x.approx_eq(y, STATE_TOL))
}

fn finals(out: &Outcome) -> Result<Vec<StateMap>, &'static str> {
    match out {
        Outcome::Terminated { state, .. } => Ok(vec![initial_part(state)]),
        Outcome::Explored(x) if x.stuck.is_empty() && x.errors.is_empty() && !x.truncated => {
            Ok(x.finals.clone())
        }
        Outcome::Explored(_) => Err("exploration incomplete"),
        Outcome::FuelExhausted { .. } => Err("fuel exhausted"),
        Outcome::Stuck { .. } => Err("stuck"),
        Outcome::Error { .. } => Err("error"),
    }
}

fn diff(io: &mut Io, a: &StateMap, b: &StateMap) {
    let keys: std::collections::BTreeSet<_> = a.keys().chain(b.keys()).collect();
    for k in keys {
        let (x, y) = (a.get(k), b.get(k));
        let same = matches!((x, y), (Some(x), Some(y)) if x.approx_eq(y, STATE_TOL));
        if !same {
            let show = |v: Option<&chorus_core::lang::Value>| {
                v.map_or("absent".to_string(), |v| v.to_string())
            };
            io.out.push_str(&format!(
                "  {k}: choreography {} | network {}\n",
                show(x),
                show(y)
            ));
        }
    }
}

pub fn compare(io: &mut Io, file: &Path, opts: &RunOpts, pruned: bool) -> u8 {
    let Some(prog) = load_checked(io, file) else {
        return DIAGNOSTICS;
    };
    let Some(init) = load_state(io, opts.state.as_deref()) else {
        return DIAGNOSTICS;
    };
    let Some(pp) = project_program(io, file, &prog, &init, pruned) else {
        return DIAGNOSTICS;
    };
    let chor = run_choreography(&prog, &init, strategy(opts), opts.max_steps);
    let net = run_network(&pp, strategy(opts), opts.max_steps);
    let (c, n) = match (finals(&chor), finals(&net)) {
        (Ok(c), Ok(n)) => (c, n),
        (c, n) => {
            let code = match (&chor, &net) {
                (Outcome::Stuck { .. }, _) | (_, Outcome::Stuck { .. }) => STUCK,
                _ => FUEL_OR_MISMATCH,
            };
            if let Err(e) = c {
                io.err.push_str(&format!("choreography: {e}\n"));
            }
            if let Err(e) = n {
                io.err.push_str(&format!("network: {e}\n"));
            }
            report(io, &chor, false, "choreography stuck");
            report(io, &net, false, "network deadlock");
            return code;
        }
    };
    let equal = c.len() == n.len() && c.iter().all(|s| n.iter().any(|t| states_equal(s, t)));
    if equal {
        io.out.push_str("states equal\n");
        OK
    } else {
        io.out.push_str("states differ\n");
        if let (Some(a), Some(b)) = (c.first(), n.first()) {
            diff(io, a, b);
        }
        FUEL_OR_MISMATCH
    }
}

fn random_instance(e: Example, rng: &mut ChaCha8Rng) -> Instance {
    match e {
        Example::Quicksort => random_quicksort(rng, 8),
        Example::Gauss => {
            let n = rng.gen_range(1..=3);
            random_gauss(rng, n)
        }
        Example::Fft => {
            let n = 1 << rng.gen_range(0..=3);
            random_fft(rng, n)
        }
        Example::Broadcast => random_broadcast(rng, 6),
    }
}

/// Runs `inst` at both levels; `Err` says what went wrong.
fn check_instance(inst: &Instance, seed: u64) -> Result<(), String> {
    let (prog, init) = encode_instance(inst)?;
    let expected = oracle(inst);
    let mut pp = epp_program(&prog, &init).map_err(|d| d[0].message.clone())?;
    prune(&mut pp);
    let runs = [
        (
            "choreography",
            run_choreography(&prog, &init, Strategy::Random(seed), DEFAULT_FUEL),
        ),
        (
            "network",
            run_network(&pp, Strategy::Random(seed), DEFAULT_FUEL),
        ),
    ];
    for (level, out) in runs {
        let state = out
            .final_state()
            .ok_or_else(|| format!("{level} did not terminate"))?;
        let got = decode_result(inst, state)?;
        if !got.matches(&expected, ORACLE_TOL) {
            return Err(format!("{level} gave {got}, expected {expected}"));
        }
    }
    Ok(())
}

pub fn corpus(io: &mut Io, seed: u64, count: usize, out: Option<&Path>) -> u8 {
    if let Some(dir) = out {
        if let Err(e) = write_corpus(dir) {
            io.error(format!("{}: {e}", dir.display()));
            return DIAGNOSTICS;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut code = OK;
    for e in Example::ALL {
        let mut instances = vec![default_instance(e)];
        instances.extend((0..count).map(|_| random_instance(e, &mut rng)));
        let mut passed = 0;
        for (k, inst) in instances.iter().enumerate() {
            match check_instance(inst, seed.wrapping_add(k as u64)) {
                Ok(()) => passed += 1,
                Err(msg) => {
                    io.err
                        .push_str(&format!("{} instance {k}: {msg}\n", e.name()));
                    code = FUEL_OR_MISMATCH;
                }
            }
        }
        io.out.push_str(&format!(
            "{}: {passed}/{} instances match the oracle\n",
            e.name(),
            instances.len()
        ));
    }
    code
}

fn write_corpus(dir: &Path) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    for (name, text) in sources::ALL {
        std::fs::write(dir.join(name), text)?;
    }
    for (name, text) in sources::STATES {
        std::fs::write(dir.join(name), text)?;
    }
    Ok(())
}
