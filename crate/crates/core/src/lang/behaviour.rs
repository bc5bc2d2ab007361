use std::collections::{BTreeMap, BTreeSet};

use super::expr::{Expr, RecvFunction};
use super::list::{Adjacency, ArgExpr};
use super::name::{Name, Param};
use super::value::Value;

/// One action of a process behaviour.
#[derive(Clone, Debug, PartialEq)]
pub enum Action {
    /// `q!e`
    Send { to: Name, expr: Expr },
    /// `p?f`
    Recv { from: Name, recv: RecvFunction },
    /// `q<->r`: tell `q` about `r` and `r` about `q`.
    IntroSend { left: Name, right: Name },
    /// `p?<r>`: receive a process name into the binder `r`.
    IntroRecv { from: Name, binder: Name },
    /// `q(+)l`
    Select { to: Name, label: String },
    /// `p&{l1: B1, ...}`
    Branch {
        from: Name,
        branches: BTreeMap<String, Behaviour>,
    },
    /// `start q |> B`
    Start { child: Name, body: Behaviour },
    Cond {
        guard: Expr,
        then_b: Behaviour,
        else_b: Behaviour,
    },
    /// Call of a projected procedure such as `split_q<`.
    Call { proc: String, args: Vec<ArgExpr> },
    /// Two behaviours whose merge is resolved once their leading calls are
    /// unfolded.
    Merge(Behaviour, Behaviour),
}

/// A sequence of actions; the empty sequence is `0`.
pub type Behaviour = Vec<Action>;

/// A projected procedure `X_r(params) = B`, the behaviour of role `r` in `X`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjectedProc {
    pub base: String,
    pub role: Name,
    pub params: Vec<Param>,
    pub body: Behaviour,
}

impl ProjectedProc {
    pub fn full_name(&self) -> String {
        proc_name(&self.base, &self.role)
    }

    pub fn role_index(&self) -> Option<usize> {
        self.params.iter().position(|p| p.name == self.role)
    }
}

pub fn proc_name(base: &str, role: &Name) -> String {
    format!("{base}_{role}")
}

/// Projected procedures keyed by full name.
pub type ProcedureSet = BTreeMap<String, ProjectedProc>;

#[derive(Clone, Debug, PartialEq)]
pub struct ProcessState {
    pub cell: Value,
    pub behaviour: Behaviour,
}

/// A network `p[v] |> B | q[w] |> B'`.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Network {
    pub processes: BTreeMap<Name, ProcessState>,
}

/// Procedures plus network: the output of endpoint projection and the input
/// of the network simulator.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct ProjectedProgram {
    pub procedures: ProcedureSet,
    pub network: Network,
    pub adjacency: Adjacency,
}

fn map_names(b: &[Action], f: &dyn Fn(&Name) -> Name) -> Behaviour {
    b.iter()
        .map(|a| match a {
            Action::Send { to, expr } => Action::Send {
                to: f(to),
                expr: expr.clone(),
            },
            Action::Recv { from, recv } => Action::Recv {
                from: f(from),
                recv: recv.clone(),
            },
            Action::IntroSend { left, right } => Action::IntroSend {
                left: f(left),
                right: f(right),
            },
            Action::IntroRecv { from, binder } => Action::IntroRecv {
                from: f(from),
                binder: f(binder),
            },
            Action::Select { to, label } => Action::Select {
                to: f(to),
                label: label.clone(),
            },
            Action::Branch { from, branches } => Action::Branch {
                from: f(from),
                branches: branches
                    .iter()
                    .map(|(l, b)| (l.clone(), map_names(b, f)))
                    .collect(),
            },
            Action::Start { child, body } => Action::Start {
                child: f(child),
                body: map_names(body, f),
            },
            Action::Cond {
                guard,
                then_b,
                else_b,
            } => Action::Cond {
                guard: guard.clone(),
                then_b: map_names(then_b, f),
                else_b: map_names(else_b, f),
            },
            Action::Call { proc, args } => Action::Call {
                proc: proc.clone(),
                args: args.iter().map(|x| x.rename(&|n| Some(f(n)))).collect(),
            },
            Action::Merge(l, r) => Action::Merge(map_names(l, f), map_names(r, f)),
        })
        .collect()
}

/// Renames every occurrence of a name, binders included.
pub fn rename_behaviour(b: &[Action], f: &dyn Fn(&Name) -> Option<Name>) -> Behaviour {
    map_names(b, &|n| f(n).unwrap_or_else(|| n.clone()))
}

/// Substitutes names in `b`; list parameters in call arguments may map to
/// whole argument expressions.
pub fn subst_behaviour(b: &[Action], f: &dyn Fn(&Name) -> Option<ArgExpr>) -> Behaviour {
    let single = |n: &Name| match f(n) {
        Some(ArgExpr::Name(m)) => m,
        _ => n.clone(),
    };
    b.iter()
        .map(|a| match a {
            Action::Call { proc, args } => Action::Call {
                proc: proc.clone(),
                args: args.iter().map(|x| x.subst(f)).collect(),
            },
            Action::Branch { from, branches } => Action::Branch {
                from: single(from),
                branches: branches
                    .iter()
                    .map(|(l, b)| (l.clone(), subst_behaviour(b, f)))
                    .collect(),
            },
            Action::Start { child, body } => Action::Start {
                child: single(child),
                body: subst_behaviour(body, f),
            },
            Action::Cond {
                guard,
                then_b,
                else_b,
            } => Action::Cond {
                guard: guard.clone(),
                then_b: subst_behaviour(then_b, f),
                else_b: subst_behaviour(else_b, f),
            },
            Action::Merge(l, r) => Action::Merge(subst_behaviour(l, f), subst_behaviour(r, f)),
            other => map_names(std::slice::from_ref(other), &single)
                .pop()
                .unwrap(),
        })
        .collect()
}

/// All names occurring in `b`.
pub fn behaviour_names(b: &[Action], out: &mut BTreeSet<Name>) {
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
                branches.values().for_each(|b| behaviour_names(b, out));
            }
            Action::Start { child, body } => {
                out.insert(child.clone());
                behaviour_names(body, out);
            }
            Action::Cond { then_b, else_b, .. } => {
                behaviour_names(then_b, out);
                behaviour_names(else_b, out);
            }
            Action::Call { args, .. } => args.iter().for_each(|x| x.free_names(out)),
            Action::Merge(l, r) => {
                behaviour_names(l, out);
                behaviour_names(r, out);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn substitution_reaches_nested_bodies() {
        let b = vec![Action::Start {
            child: "q".into(),
            body: vec![Action::Send {
                to: "p".into(),
                expr: Expr::Cell,
            }],
        }];
        let out = rename_behaviour(&b, &|n| (n.as_str() == "p").then(|| Name::from("r")));
        let mut names = BTreeSet::new();
        behaviour_names(&out, &mut names);
        assert_eq!(names, ["q".into(), "r".into()].into());
    }
}
