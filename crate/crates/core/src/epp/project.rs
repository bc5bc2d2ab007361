use std::collections::BTreeSet;

use super::merge::{merge, MergeError};
use crate::diag::Diagnostic;
use crate::lang::behaviour::proc_name;
use crate::lang::chor::subst_chor;
use crate::lang::{
    Action, ArgExpr, Behaviour, Name, Network, ProcessState, ProjectedProc, ProjectedProgram,
    SourceProgram, Span, StateMap, Stmt, StmtKind, Value,
};

#[derive(Clone, Debug, PartialEq)]
pub struct ProjectError {
    pub role: Name,
    pub span: Span,
    pub error: MergeError,
}

impl ProjectError {
    pub fn to_diagnostic(&self) -> Diagnostic {
        Diagnostic::error(
            format!(
                "cannot merge branches for role {}: {}",
                self.role, self.error
            ),
            self.span,
        )
    }
}

fn mentions(a: &ArgExpr, r: &Name) -> bool {
    let mut s = BTreeSet::new();
    a.support(&mut s);
    s.contains(r)
}

/// The behaviour of role `r` in choreography `c`. A call is projected to
/// one call per argument position that may hold `r`.
pub fn project_behaviour(
    c: &[Stmt],
    r: &Name,
    prog: &SourceProgram,
) -> Result<Behaviour, ProjectError> {
    let mut out = Vec::new();
    for (i, s) in c.iter().enumerate() {
        let rest = &c[i + 1..];
        match &s.kind {
            StmtKind::Com {
                from,
                expr,
                to,
                recv,
            } => {
                if r == from {
                    out.push(Action::Send {
                        to: to.clone(),
                        expr: expr.clone(),
                    });
                } else if r == to {
                    out.push(Action::Recv {
                        from: from.clone(),
                        recv: recv.clone(),
                    });
                }
            }
            StmtKind::Sel { from, to, label } => {
                if r == from {
                    out.push(Action::Select {
                        to: to.clone(),
                        label: label.clone(),
                    });
                } else if r == to {
                    let body = project_behaviour(rest, r, prog)?;
                    out.push(Action::Branch {
                        from: from.clone(),
                        branches: [(label.clone(), body)].into(),
                    });
                    return Ok(out);
                }
            }
            StmtKind::Start { parent, child } => {
                if r == parent {
                    let body = project_behaviour(rest, child, prog)?;
                    out.push(Action::Start {
                        child: child.clone(),
                        body,
                    });
                }
            }
            StmtKind::Intro { by, left, right } => {
                if r == by {
                    out.push(Action::IntroSend {
                        left: left.clone(),
                        right: right.clone(),
                    });
                } else if r == left {
                    out.push(Action::IntroRecv {
                        from: by.clone(),
                        binder: right.clone(),
                    });
                } else if r == right {
                    out.push(Action::IntroRecv {
                        from: by.clone(),
                        binder: left.clone(),
                    });
                }
            }
            StmtKind::Cond {
                decider,
                guard,
                then_branch,
                else_branch,
            } => {
                let t = project_behaviour(then_branch, r, prog)?;
                let e = project_behaviour(else_branch, r, prog)?;
                if r == decider {
                    out.push(Action::Cond {
                        guard: guard.clone(),
                        then_b: t,
                        else_b: e,
                    });
                } else {
                    let m = merge(&t, &e).map_err(|error| ProjectError {
                        role: r.clone(),
                        span: s.span,
                        error,
                    })?;
                    out.extend(m);
                }
            }
            StmtKind::Call { proc, args } => {
                let Some(def) = prog.procedure(proc) else {
                    continue;
                };
                for (p, a) in def.params.iter().zip(args) {
                    if mentions(a, r) {
                        out.push(Action::Call {
                            proc: proc_name(proc, &p.name),
                            args: args.clone(),
                        });
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Processes of the initial network: the declared ones, then list members.
pub fn declared_processes(prog: &SourceProgram) -> Vec<Name> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for n in prog
        .processes
        .iter()
        .chain(prog.lists.iter().flat_map(|(_, l)| l))
    {
        if seen.insert(n.clone()) {
            out.push(n.clone());
        }
    }
    out
}

/// `main` with every list name replaced by the literal list of its members.
pub fn main_with_lists_inlined(prog: &SourceProgram) -> Vec<Stmt> {
    subst_chor(&prog.main, &|n| prog.list(n).map(ArgExpr::names))
}

/// Projects every procedure for every parameter and `main` for every
/// declared process. Cells start from `init`, `undef` where absent.
pub fn epp_program(
    prog: &SourceProgram,
    init: &StateMap,
) -> Result<ProjectedProgram, Vec<Diagnostic>> {
    let mut out = ProjectedProgram {
        adjacency: prog.adjacency(),
        ..Default::default()
    };
    let mut errors = Vec::new();
    for def in &prog.procedures {
        for p in &def.params {
            match project_behaviour(&def.body, &p.name, prog) {
                Ok(body) => {
                    let pp = ProjectedProc {
                        base: def.name.clone(),
                        role: p.name.clone(),
                        params: def.params.clone(),
                        body,
                    };
                    out.procedures.insert(pp.full_name(), pp);
                }
                Err(e) => errors.push(e.to_diagnostic()),
            }
        }
    }
    let main = main_with_lists_inlined(prog);
    let mut network = Network::default();
    for n in declared_processes(prog) {
        match project_behaviour(&main, &n, prog) {
            Ok(behaviour) => {
                let cell = init.get(&n).cloned().unwrap_or(Value::Undef);
                network
                    .processes
                    .insert(n, ProcessState { cell, behaviour });
            }
            Err(e) => errors.push(e.to_diagnostic()),
        }
    }
    out.network = network;
    if errors.is_empty() {
        errors.extend(super::resolve::check_deferred(&out));
    }
    if errors.is_empty() {
        Ok(out)
    } else {
        Err(errors)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_behaviour, parse_choreography, parse_program};

    fn proj(text: &str, r: &str) -> Result<Behaviour, ProjectError> {
        let c = parse_choreography(text).unwrap();
        project_behaviour(&c, &r.into(), &SourceProgram::default())
    }

    #[test]
    fn uninvolved_role_projects_to_nothing() {
        assert_eq!(proj("p.c -> q.id", "s").unwrap(), vec![]);
    }

    #[test]
    fn selection_takes_the_continuation_into_the_branch() {
        assert_eq!(
            proj("p -> q[l]; p.c -> q.id; q.c -> r.id", "q").unwrap(),
            parse_behaviour("p&{l: p?id; r!c}").unwrap()
        );
    }

    #[test]
    fn start_inlines_the_child() {
        let b = proj("p start q; p.c -> q.id; q.c -> p.add", "p").unwrap();
        assert_eq!(
            b,
            parse_behaviour("(start q |> p?id; p!c); q!c; q?add").unwrap()
        );
    }

    #[test]
    fn introduction_roles() {
        assert_eq!(
            proj("p: q <-> r", "p").unwrap(),
            parse_behaviour("q <-> r").unwrap()
        );
        assert_eq!(
            proj("p: q <-> r", "q").unwrap(),
            parse_behaviour("p?<r>").unwrap()
        );
        assert_eq!(
            proj("p: q <-> r", "r").unwrap(),
            parse_behaviour("p?<q>").unwrap()
        );
    }

    #[test]
    fn unmergeable_conditional() {
        let e = proj("if p.c then q.c -> r.id else 0", "q").unwrap_err();
        assert_eq!(e.role.as_str(), "q");
        assert!(e
            .to_diagnostic()
            .message
            .starts_with("cannot merge branches for role q"));
    }

    #[test]
    fn call_roles_follow_argument_positions() {
        let prog = parse_program(
            "processes a, b;\nX(p, Q) = Y(p, hd(Q))\nY(p, q) = p.c -> q.id\nmain { X(a, [b]) }",
        )
        .unwrap();
        let def = prog.procedure("X").unwrap();
        let b = project_behaviour(&def.body, &"Q".into(), &prog).unwrap();
        assert_eq!(b, parse_behaviour("Y_q(p, hd(Q))").unwrap());
        assert_eq!(
            project_behaviour(&def.body, &"z".into(), &prog).unwrap(),
            vec![]
        );
    }

    #[test]
    fn empty_program() {
        let prog = parse_program("processes p, q;\nmain { 0 }").unwrap();
        let pp = epp_program(&prog, &StateMap::new()).unwrap();
        assert!(pp.procedures.is_empty());
        assert_eq!(pp.network.processes.len(), 2);
        assert!(pp
            .network
            .processes
            .values()
            .all(|s| s.behaviour.is_empty() && s.cell == Value::Undef));
    }
}
