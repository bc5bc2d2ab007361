//! Endpoint projection from choreographies to process networks.

mod merge;
mod project;
mod prune;
mod resolve;

pub use merge::{merge, MergeError};
pub use project::{
    declared_processes, epp_program, main_with_lists_inlined, project_behaviour, ProjectError,
};
pub use prune::prune;
pub use resolve::{check_deferred, instantiate};

use std::collections::BTreeMap;

use crate::lang::behaviour::rename_behaviour;
use crate::lang::{Name, ProjectedProc};

/// Equality of projected procedures up to the names of their parameters.
pub fn alpha_eq(a: &ProjectedProc, b: &ProjectedProc) -> bool {
    if a.base != b.base || a.params.len() != b.params.len() || a.role_index() != b.role_index() {
        return false;
    }
    let map: BTreeMap<Name, Name> = b
        .params
        .iter()
        .map(|p| p.name.clone())
        .zip(a.params.iter().map(|p| p.name.clone()))
        .collect();
    let body = rename_behaviour(&b.body, &|n| map.get(n).cloned());
    body == a.body
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::sources;
    use crate::lang::{Param, StateMap};
    use crate::syntax::{parse_behaviour, parse_program, print_projected_proc};

    fn listing_proc(base: &str, role: &str, params: &[&str], body: &str) -> ProjectedProc {
        ProjectedProc {
            base: base.into(),
            role: role.into(),
            params: params
                .iter()
                .map(|p| Param::from_name((*p).into()))
                .collect(),
            body: parse_behaviour(body).unwrap(),
        }
    }

    fn projected(text: &str) -> crate::lang::ProjectedProgram {
        let mut pp = epp_program(&parse_program(text).unwrap(), &StateMap::new()).unwrap();
        prune(&mut pp);
        pp
    }

    fn assert_alpha(ours: &ProjectedProc, theirs: &ProjectedProc) {
        assert!(
            alpha_eq(ours, theirs),
            "ours:   {}\nexpected: {}",
            print_projected_proc(ours),
            print_projected_proc(theirs)
        );
    }

    #[test]
    fn split_receivers_match_listing() {
        let pp = projected(sources::QUICKSORT);
        for (role, stop) in [("q<", "0"), ("q=", "p?add"), ("q>", "0")] {
            let name = format!("split_{role}");
            let body = format!("p&{{stop: {stop}, get: p?add; {name}(p, q), skip: {name}(p, q)}}");
            assert_alpha(
                &pp.procedures[&name],
                &listing_proc("split", "q", &["p", "q"], &body),
            );
        }
    }

    #[test]
    fn split_sender_matches_listing() {
        let pp = projected(sources::QUICKSORT);
        let body = "(if short then q<(+)stop; q=(+)stop; q>(+)stop; q=!fst
                     else (if fst>snd then q<(+)get; q<!snd; q=(+)skip; q>(+)skip
                           else if fst<snd then q>(+)get; q>!snd; q<(+)skip; q=(+)skip
                           else q=(+)get; q=!snd; q<(+)skip; q>(+)skip);
                          pop2_p(p); split_p(p, q<, q=, q>))";
        assert_alpha(
            &pp.procedures["split_p"],
            &listing_proc("split", "p", &["p", "q<", "q=", "q>"], body),
        );
    }

    #[test]
    fn quicksort_root_matches_listing() {
        let pp = projected(sources::QUICKSORT);
        let body = "if short then 0
                    else (start q< |> split_q<(p, q<); QS_p(q<); p!c);
                         (start q= |> split_q=(p, q=); p!c);
                         (start q> |> split_q>(p, q>); QS_p(q>); p!c);
                         split_p(p, q<, q=, q>);
                         q<?id; q=?append; q>?append";
        assert_alpha(
            &pp.procedures["QS_p"],
            &listing_proc("QS", "p", &["p"], body),
        );
    }

    #[test]
    fn gsel_projections_match_listing() {
        let pp = projected(sources::FFT);
        assert_alpha(
            &pp.procedures["gsel1_then_p"],
            &listing_proc("gsel1_then", "p", &["p", "q"], "q(+)then"),
        );
        assert_alpha(
            &pp.procedures["gsel1_then_q"],
            &listing_proc("gsel1_then", "q", &["p", "q"], "p&{then: 0}"),
        );
        assert_alpha(
            &pp.procedures["gsel_then_p"],
            &listing_proc(
                "gsel_then",
                "p",
                &["p", "Q"],
                "gsel1_then_p(p, hd(Q)); gsel_then_p(p, tl(Q))",
            ),
        );
        assert_alpha(
            &pp.procedures["gsel_then_Q"],
            &listing_proc(
                "gsel_then",
                "Q",
                &["p", "Q"],
                "gsel1_then_q(p, hd(Q)); gsel_then_Q(p, tl(Q))",
            ),
        );
    }

    #[test]
    fn fft_list_roles_defer_the_gsel_merge() {
        let pp = projected(sources::FFT);
        let text = print_projected_proc(&pp.procedures["fft_Y"]);
        assert!(text.contains("merge {gsel_then_Q(n, join(X, Y))"), "{text}");
        assert!(check_deferred(&pp).is_empty());
    }

    #[test]
    fn split_without_skips_is_not_projectable() {
        let errs = epp_program(
            &parse_program(sources::SPLIT_NOSKIP).unwrap(),
            &StateMap::new(),
        )
        .unwrap_err();
        assert!(
            errs.iter().any(|d| d.message.contains("role q=")),
            "{errs:?}"
        );
    }

    #[test]
    fn call_at_non_parameter_role_is_empty() {
        for (_, text) in sources::ALL {
            let prog = parse_program(text).unwrap();
            for def in &prog.procedures {
                let b = project_behaviour(&def.body, &"nobody".into(), &prog);
                assert_eq!(b, Ok(vec![]));
            }
        }
    }
}
