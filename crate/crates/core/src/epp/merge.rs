use std::collections::BTreeMap;
use std::fmt;

use crate::lang::{Action, Behaviour};
use crate::syntax::print_behaviour;

#[derive(Clone, Debug, PartialEq)]
pub struct MergeError {
    pub left: String,
    pub right: String,
}

impl fmt::Display for MergeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "`{}` does not merge with `{}`", self.left, self.right)
    }
}

fn mismatch(l: &[Action], r: &[Action]) -> MergeError {
    MergeError {
        left: print_behaviour(l),
        right: print_behaviour(r),
    }
}

fn is_call_like(a: Option<&Action>) -> bool {
    matches!(a, Some(Action::Call { .. } | Action::Merge(..)))
}

fn union(
    l: &BTreeMap<String, Behaviour>,
    r: &BTreeMap<String, Behaviour>,
    l_rest: &[Action],
    r_rest: &[Action],
) -> Result<BTreeMap<String, Behaviour>, MergeError> {
    let with =
        |b: &Behaviour, rest: &[Action]| -> Behaviour { b.iter().chain(rest).cloned().collect() };
    let mut out: BTreeMap<String, Behaviour> = l
        .iter()
        .map(|(k, b)| (k.clone(), with(b, l_rest)))
        .collect();
    for (k, b) in r {
        let b = with(b, r_rest);
        let merged = match out.get(k) {
            Some(a) => merge(a, &b)?,
            None => b,
        };
        out.insert(k.clone(), merged);
    }
    Ok(out)
}

/// The merge `l ⊔ r`: equal actions are kept, branchings from the same
/// process are united (merging the bodies of shared labels), anything else
/// fails. When either side begins with a call the two behaviours are kept
/// side by side as a `Merge` and resolved after the calls are unfolded.
///
/// Branchings followed by different continuations have the continuations
/// moved into their branches.
pub fn merge(l: &[Action], r: &[Action]) -> Result<Behaviour, MergeError> {
    if l == r {
        return Ok(l.to_vec());
    }
    let (Some(a), Some(b)) = (l.first(), r.first()) else {
        if is_call_like(l.first()) || is_call_like(r.first()) {
            return Ok(vec![Action::Merge(l.to_vec(), r.to_vec())]);
        }
        return Err(mismatch(l, r));
    };
    let (lr, rr) = (&l[1..], &r[1..]);
    let head = match (a, b) {
        (
            Action::Branch {
                from: p,
                branches: bl,
            },
            Action::Branch {
                from: q,
                branches: br,
            },
        ) if p == q => {
            if lr == rr {
                let mut out = vec![Action::Branch {
                    from: p.clone(),
                    branches: union(bl, br, &[], &[])?,
                }];
                out.extend_from_slice(lr);
                return Ok(out);
            }
            return Ok(vec![Action::Branch {
                from: p.clone(),
                branches: union(bl, br, lr, rr)?,
            }]);
        }
        (Action::Start { child: c, body: bl }, Action::Start { child: d, body: br }) if c == d => {
            Action::Start {
                child: c.clone(),
                body: merge(bl, br)?,
            }
        }
        (
            Action::Cond {
                guard: g,
                then_b: t1,
                else_b: e1,
            },
            Action::Cond {
                guard: h,
                then_b: t2,
                else_b: e2,
            },
        ) if g == h => Action::Cond {
            guard: g.clone(),
            then_b: merge(t1, t2)?,
            else_b: merge(e1, e2)?,
        },
        _ if a == b && !matches!(a, Action::Branch { .. }) => a.clone(),
        _ if is_call_like(Some(a)) || is_call_like(Some(b)) => {
            return Ok(vec![Action::Merge(l.to_vec(), r.to_vec())]);
        }
        _ => return Err(mismatch(l, r)),
    };
    let mut out = vec![head];
    out.extend(merge(lr, rr)?);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_behaviour;

    fn b(text: &str) -> Behaviour {
        parse_behaviour(text).unwrap()
    }

    #[test]
    fn branch_union() {
        let m = merge(&b("p&{stop: 0}"), &b("p&{get: p?add; K_q(p, q)}")).unwrap();
        assert_eq!(m, b("p&{stop: 0, get: p?add; K_q(p, q)}"));
    }

    #[test]
    fn mismatched_heads_fail() {
        assert!(merge(&b("q!c"), &b("p?id")).is_err());
        assert!(merge(&b("q!c"), &b("0")).is_err());
    }

    #[test]
    fn different_continuations_move_into_branches() {
        let m = merge(&b("p&{stop: 0}"), &b("p&{get: p?add, skip: 0}; X_q(p, q)")).unwrap();
        assert_eq!(m, b("p&{stop: 0, get: p?add; X_q(p, q), skip: X_q(p, q)}"));
    }

    #[test]
    fn shared_labels_merge_their_bodies() {
        let m = merge(&b("p&{a: r&{x: 0}}"), &b("p&{a: r&{y: 0}, b: 0}")).unwrap();
        assert_eq!(m, b("p&{a: r&{x: 0, y: 0}, b: 0}"));
        assert!(merge(&b("p&{a: q!c}"), &b("p&{a: q?id}")).is_err());
    }

    #[test]
    fn calls_defer() {
        let m = merge(&b("X_q(p, q); p?id"), &b("Y_q(p, q); p?id")).unwrap();
        assert_eq!(m, b("merge {X_q(p, q); p?id} {Y_q(p, q); p?id}"));
        assert_eq!(
            merge(&b("X_q(p, q)"), &b("0")).unwrap(),
            b("merge {X_q(p, q)} {0}")
        );
    }

    #[test]
    fn common_prefix_is_kept() {
        let m = merge(&b("p?id; q!c; X_q(p, q)"), &b("p?id; q!c; Y_q(p, q)")).unwrap();
        assert_eq!(m, b("p?id; q!c; merge {X_q(p, q)} {Y_q(p, q)}"));
    }
}
