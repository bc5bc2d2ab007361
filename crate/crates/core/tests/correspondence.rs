use chorus_core::corpus::{decode_result, default_instance, encode_instance, oracle, Example};
use chorus_core::engine::{
    initial_part, run_choreography, run_network, Outcome, Strategy, DEFAULT_FUEL,
};
use chorus_core::epp::{epp_program, prune};
use chorus_core::lang::{ProjectedProgram, SourceProgram, StateMap};

fn project(prog: &SourceProgram, init: &StateMap) -> ProjectedProgram {
    let mut pp = epp_program(prog, init).unwrap_or_else(|e| panic!("{e:?}"));
    prune(&mut pp);
    pp
}

fn finished(out: &Outcome) -> StateMap {
    initial_part(out.final_state().unwrap_or_else(|| panic!("{out:?}")))
}

#[test]
fn network_runs_match_choreography_runs() {
    for e in Example::ALL {
        let inst = default_instance(e);
        let (prog, init) = encode_instance(&inst).unwrap();
        let chor = finished(&run_choreography(
            &prog,
            &init,
            Strategy::Sequential,
            DEFAULT_FUEL,
        ));
        let pp = project(&prog, &init);
        for strategy in [
            Strategy::Sequential,
            Strategy::Random(3),
            Strategy::Random(11),
        ] {
            let net = finished(&run_network(&pp, strategy, DEFAULT_FUEL));
            let (a, b) = (
                decode_result(&inst, &chor).unwrap(),
                decode_result(&inst, &net).unwrap(),
            );
            assert!(a.matches(&b, 1e-12), "{}: {a} vs {b}", e.name());
            assert!(a.matches(&oracle(&inst), 1e-9), "{}", e.name());
        }
    }
}

#[test]
fn unpruned_projection_behaves_the_same() {
    for e in Example::ALL {
        let inst = default_instance(e);
        let (prog, init) = encode_instance(&inst).unwrap();
        let pp = epp_program(&prog, &init).unwrap();
        let net = finished(&run_network(&pp, Strategy::Random(5), DEFAULT_FUEL));
        assert!(
            decode_result(&inst, &net)
                .unwrap()
                .matches(&oracle(&inst), 1e-9),
            "{}",
            e.name()
        );
    }
}

#[test]
fn exhaustive_quicksort_network_has_one_outcome() {
    let inst = chorus_core::corpus::Instance::Quicksort(vec![2, 1, 3]);
    let (prog, init) = encode_instance(&inst).unwrap();
    let Outcome::Explored(x) = run_network(&project(&prog, &init), Strategy::Exhaustive(10_000), 0)
    else {
        panic!()
    };
    assert!(
        x.stuck.is_empty() && x.errors.is_empty() && !x.truncated,
        "{x:?}"
    );
    assert_eq!(x.finals.len(), 1);
    assert_eq!(decode_result(&inst, &x.finals[0]).unwrap(), oracle(&inst));
}

#[test]
fn unchecked_missing_connection_gets_stuck() {
    use chorus_core::corpus::sources;
    use chorus_core::syntax::{parse_program, parse_state};
    let prog = parse_program(sources::FFT_AS_PRINTED).unwrap();
    let init = parse_state(sources::FFT_STATE).unwrap();
    let out = run_choreography(&prog, &init, Strategy::Sequential, DEFAULT_FUEL);
    let Outcome::Stuck { report, .. } = out else {
        panic!("{out:?}")
    };
    assert!(report.contains("are not connected"), "{report}");
}
