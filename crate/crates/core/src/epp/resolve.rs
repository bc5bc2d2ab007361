use std::collections::{BTreeMap, BTreeSet};

use super::merge::{merge, MergeError};
use crate::diag::Diagnostic;
use crate::lang::behaviour::subst_behaviour;
use crate::lang::{
    Action, ArgExpr, Behaviour, Name, ProcedureSet, ProjectedProc, ProjectedProgram, Span,
};
use crate::syntax::print_behaviour;

/// The body of `p` with its parameters replaced by `args`.
pub fn instantiate(p: &ProjectedProc, args: &[ArgExpr]) -> Behaviour {
    let map: BTreeMap<Name, ArgExpr> = p
        .params
        .iter()
        .map(|x| x.name.clone())
        .zip(args.iter().cloned())
        .collect();
    subst_behaviour(&p.body, &|n| map.get(n).cloned())
}

fn unresolved(l: &[Action], r: &[Action]) -> MergeError {
    MergeError {
        left: print_behaviour(l),
        right: print_behaviour(r),
    }
}

/// Unfolds leading calls and merges until the head is neither.
fn unfold_head(
    b: &[Action],
    procs: &ProcedureSet,
    budget: &mut usize,
) -> Result<Behaviour, MergeError> {
    let mut cur = b.to_vec();
    loop {
        let next = match cur.first() {
            Some(Action::Call { proc, args }) => {
                let p = procs
                    .get(proc)
                    .filter(|_| *budget > 0)
                    .ok_or_else(|| unresolved(&cur, &[]))?;
                *budget -= 1;
                instantiate(p, args)
            }
            Some(Action::Merge(l, r)) => {
                let l = unfold_head(l, procs, budget)?;
                let r = unfold_head(r, procs, budget)?;
                merge(&l, &r)?
            }
            _ => return Ok(cur),
        };
        cur = next.into_iter().chain(cur.drain(..).skip(1)).collect();
    }
}

/// Text of a behaviour with call arguments erased.
fn shape(b: &[Action]) -> String {
    fn erase(b: &[Action]) -> Behaviour {
        b.iter()
            .map(|a| match a {
                Action::Call { proc, .. } => Action::Call {
                    proc: proc.clone(),
                    args: vec![],
                },
                Action::Branch { from, branches } => Action::Branch {
                    from: from.clone(),
                    branches: branches
                        .iter()
                        .map(|(l, b)| (l.clone(), erase(b)))
                        .collect(),
                },
                Action::Start { child, body } => Action::Start {
                    child: child.clone(),
                    body: erase(body),
                },
                Action::Cond {
                    guard,
                    then_b,
                    else_b,
                } => Action::Cond {
                    guard: guard.clone(),
                    then_b: erase(then_b),
                    else_b: erase(else_b),
                },
                Action::Merge(l, r) => Action::Merge(erase(l), erase(r)),
                other => other.clone(),
            })
            .collect()
    }
    print_behaviour(&erase(b))
}

fn merges_in(b: &[Action], out: &mut Vec<(Behaviour, Behaviour)>) {
    for a in b {
        match a {
            Action::Merge(l, r) => out.push((l.clone(), r.clone())),
            Action::Branch { branches, .. } => branches.values().for_each(|b| merges_in(b, out)),
            Action::Start { body, .. } => merges_in(body, out),
            Action::Cond { then_b, else_b, .. } => {
                merges_in(then_b, out);
                merges_in(else_b, out);
            }
            _ => {}
        }
    }
}

fn check_pair(
    l: &[Action],
    r: &[Action],
    procs: &ProcedureSet,
    depth: usize,
    memo: &mut BTreeSet<(String, String)>,
) -> Result<(), MergeError> {
    if !memo.insert((shape(l), shape(r))) {
        return Ok(());
    }
    if depth == 0 {
        return Err(unresolved(l, r));
    }
    let mut budget = procs.len() + 1;
    let l2 = unfold_head(l, procs, &mut budget)?;
    let r2 = unfold_head(r, procs, &mut budget)?;
    let m = merge(&l2, &r2)?;
    let mut nested = Vec::new();
    merges_in(&m, &mut nested);
    for (a, b) in nested {
        check_pair(&a, &b, procs, depth - 1, memo)?;
    }
    Ok(())
}

/// Checks every deferred merge by unfolding calls symbolically, bounded by
/// the number of procedures. Pairs already seen, up to call arguments, are
/// taken to merge.
pub fn check_deferred(prog: &ProjectedProgram) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let bodies = prog
        .procedures
        .iter()
        .map(|(k, p)| (k.clone(), &p.body))
        .chain(
            prog.network
                .processes
                .iter()
                .map(|(n, s)| (n.to_string(), &s.behaviour)),
        );
    for (owner, body) in bodies {
        let mut pairs = Vec::new();
        merges_in(body, &mut pairs);
        for (l, r) in pairs {
            let mut memo = BTreeSet::new();
            if let Err(e) = check_pair(
                &l,
                &r,
                &prog.procedures,
                prog.procedures.len() + 1,
                &mut memo,
            ) {
                out.push(Diagnostic::error(
                    format!("cannot merge branches in {owner}: {e}"),
                    Span::default(),
                ));
            }
        }
    }
    out
}
