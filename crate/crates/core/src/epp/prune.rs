use std::collections::{BTreeMap, BTreeSet};

use crate::lang::{Action, Behaviour, Name, ParamKind, ProjectedProgram};

fn direct_uses(b: &[Action], out: &mut BTreeSet<Name>) {
    for a in b {
        match a {
            Action::Send { to: n, .. }
            | Action::Recv { from: n, .. }
            | Action::Select { to: n, .. } => {
                out.insert(n.clone());
            }
            Action::IntroSend { left, right } => {
                out.insert(left.clone());
                out.insert(right.clone());
            }
            Action::IntroRecv { from, binder } => {
                out.insert(from.clone());
                out.insert(binder.clone());
            }
            Action::Branch { from, branches } => {
                out.insert(from.clone());
                branches.values().for_each(|b| direct_uses(b, out));
            }
            Action::Start { body, .. } => direct_uses(body, out),
            Action::Cond { then_b, else_b, .. } => {
                direct_uses(then_b, out);
                direct_uses(else_b, out);
            }
            Action::Call { .. } => {}
            Action::Merge(l, r) => {
                direct_uses(l, out);
                direct_uses(r, out);
            }
        }
    }
}

fn calls(b: &[Action], f: &mut dyn FnMut(&str, &[crate::lang::ArgExpr])) {
    for a in b {
        match a {
            Action::Call { proc, args } => f(proc, args),
            Action::Branch { branches, .. } => branches.values().for_each(|b| calls(b, f)),
            Action::Start { body, .. } => calls(body, f),
            Action::Cond { then_b, else_b, .. } => {
                calls(then_b, f);
                calls(else_b, f);
            }
            Action::Merge(l, r) => {
                calls(l, f);
                calls(r, f);
            }
            _ => {}
        }
    }
}

fn rewrite(b: &[Action], keep: &BTreeMap<String, Vec<bool>>) -> Behaviour {
    b.iter()
        .map(|a| match a {
            Action::Call { proc, args } => {
                let args = match keep.get(proc) {
                    Some(k) => args
                        .iter()
                        .zip(k)
                        .filter(|(_, k)| **k)
                        .map(|(a, _)| a.clone())
                        .collect(),
                    None => args.clone(),
                };
                Action::Call {
                    proc: proc.clone(),
                    args,
                }
            }
            Action::Branch { from, branches } => Action::Branch {
                from: from.clone(),
                branches: branches
                    .iter()
                    .map(|(l, b)| (l.clone(), rewrite(b, keep)))
                    .collect(),
            },
            Action::Start { child, body } => Action::Start {
                child: child.clone(),
                body: rewrite(body, keep),
            },
            Action::Cond {
                guard,
                then_b,
                else_b,
            } => Action::Cond {
                guard: guard.clone(),
                then_b: rewrite(then_b, keep),
                else_b: rewrite(else_b, keep),
            },
            Action::Merge(l, r) => Action::Merge(rewrite(l, keep), rewrite(r, keep)),
            other => other.clone(),
        })
        .collect()
}

/// Drops single-process parameters that a projected procedure never uses,
/// together with the matching arguments at every call. The role and list
/// parameters are always kept.
pub fn prune(prog: &mut ProjectedProgram) {
    let mut keep: BTreeMap<String, Vec<bool>> = BTreeMap::new();
    for (k, p) in &prog.procedures {
        let mut used = BTreeSet::new();
        direct_uses(&p.body, &mut used);
        let flags = p
            .params
            .iter()
            .map(|x| x.name == p.role || x.kind == ParamKind::List || used.contains(&x.name))
            .collect();
        keep.insert(k.clone(), flags);
    }
    loop {
        let mut changed = false;
        for (k, p) in &prog.procedures {
            let mut used = BTreeSet::new();
            calls(&p.body, &mut |proc, args| {
                if let Some(flags) = keep.get(proc) {
                    for (a, f) in args.iter().zip(flags) {
                        if *f {
                            a.free_names(&mut used);
                        }
                    }
                }
            });
            let flags = keep.get_mut(k).unwrap();
            for (x, f) in p.params.iter().zip(flags.iter_mut()) {
                if !*f && used.contains(&x.name) {
                    *f = true;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    for (k, p) in prog.procedures.iter_mut() {
        let flags = &keep[k];
        p.params = p
            .params
            .iter()
            .zip(flags)
            .filter(|(_, f)| **f)
            .map(|(x, _)| x.clone())
            .collect();
        p.body = rewrite(&p.body, &keep);
    }
    for s in prog.network.processes.values_mut() {
        s.behaviour = rewrite(&s.behaviour, &keep);
    }
}
