//! Browser bindings: check, project and run a choreography from text.

use chorus_core::check::check_program;
use chorus_core::diag::{has_errors, Diagnostic};
use chorus_core::engine::{
    initial_part, render_trace, run_choreography, run_network, Outcome, Strategy, DEFAULT_FUEL,
};
use chorus_core::epp::{epp_program, prune};
use chorus_core::lang::{SourceProgram, StateMap};
use chorus_core::syntax::{parse_program, parse_state, print_projected, print_state};
use wasm_bindgen::prelude::*;

fn render(diags: &[Diagnostic]) -> String {
    diags.iter().map(|d| d.render("input") + "\n").collect()
}

fn load(source: &str) -> Result<SourceProgram, String> {
    let prog = parse_program(source).map_err(|d| render(&d))?;
    let diags = check_program(&prog);
    if has_errors(&diags) {
        return Err(render(&diags));
    }
    Ok(prog)
}

fn load_state(state: &str) -> Result<StateMap, String> {
    parse_state(state).map_err(|d| render(&[d]))
}

fn describe(out: &Outcome) -> String {
    let mut s = render_trace(out.trace());
    match out {
        Outcome::Terminated { state, .. } => {
            s.push_str("-- final state\n");
            s.push_str(&print_state(&initial_part(state)));
        }
        Outcome::FuelExhausted { trace } => {
            s.push_str(&format!("fuel exhausted after {} steps\n", trace.len()))
        }
        Outcome::Stuck { report, .. } => s.push_str(&format!("stuck:\n{report}\n")),
        Outcome::Error { message, .. } => s.push_str(&format!("error: {message}\n")),
        Outcome::Explored(x) => s.push_str(&format!("configurations: {}\n", x.configs)),
    }
    s
}

/// Parses and checks a program. Returns `ok` or the diagnostics.
#[wasm_bindgen]
pub fn check(source: &str) -> String {
    match load(source) {
        Ok(_) => "ok\n".to_string(),
        Err(e) => e,
    }
}

/// Projects a checked program into a pruned network.
#[wasm_bindgen]
pub fn project(source: &str, state: &str) -> String {
    let result = load(source).and_then(|prog| {
        let init = load_state(state)?;
        let mut pp = epp_program(&prog, &init).map_err(|d| render(&d))?;
        prune(&mut pp);
        Ok(print_projected(&pp))
    });
    result.unwrap_or_else(|e| e)
}

/// Runs a program with a seeded random schedule, on the choreography or on
/// its projection.
#[wasm_bindgen]
pub fn run(source: &str, state: &str, seed: u32, network: bool) -> String {
    let result = load(source).and_then(|prog| {
        let init = load_state(state)?;
        let sched = Strategy::Random(seed as u64);
        let out = if network {
            let mut pp = epp_program(&prog, &init).map_err(|d| render(&d))?;
            prune(&mut pp);
            run_network(&pp, sched, DEFAULT_FUEL)
        } else {
            run_choreography(&prog, &init, sched, DEFAULT_FUEL)
        };
        Ok(describe(&out))
    });
    result.unwrap_or_else(|e| e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use chorus_core::corpus::{sources, Example};

    const QS_STATE: &str = "p = [3, 1, 2]\n";

    #[test]
    fn checks_corpus() {
        assert_eq!(check(Example::Quicksort.source()), "ok\n");
        assert!(check("main {").starts_with("error: input:"));
    }

    #[test]
    fn projects() {
        let pp = project(Example::Quicksort.source(), QS_STATE);
        assert!(pp.contains("network"), "{pp}");
    }

    #[test]
    fn both_levels_sort() {
        for network in [false, true] {
            let out = run(Example::Quicksort.source(), QS_STATE, 3, network);
            assert!(out.ends_with("-- final state\np = [1, 2, 3]\n"), "{out}");
        }
    }

    #[test]
    fn page_default_program_sorts() {
        let page = include_str!("../www/index.html");
        let text = |id: &str| {
            let open = format!("<textarea id=\"{id}\" spellcheck=\"false\">");
            let start = page.find(&open).unwrap() + open.len();
            let len = page[start..].find("</textarea>").unwrap();
            page[start..start + len].to_string()
        };
        let out = run(&text("source"), &text("state"), 1, true);
        assert!(out.ends_with("p = [1, 2, 3, 5, 7, 8, 9]\n"), "{out}");
    }

    #[test]
    fn bad_state() {
        assert!(run(sources::QUICKSORT, "p = ", 0, false).contains("error"));
    }
}
