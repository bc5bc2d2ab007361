use std::collections::{BTreeMap, BTreeSet};

use super::{canonical_names, drive, Outcome, StepKind, StepLabel, Strategy, System};
use crate::epp::merge;
use crate::lang::behaviour::{rename_behaviour, subst_behaviour};
use crate::lang::expr::apply_recv;
use crate::lang::{
    Action, Adjacency, ArgExpr, ArgValue, Behaviour, Name, ParamKind, ProcedureSet, ProcessState,
    ProjectedProgram, StateMap, Value,
};
use crate::syntax::print_behaviour;

/// Unfolds a merge may perform before giving up.
const MERGE_BUDGET: usize = 100_000;

/// A network configuration. Connections are recorded but not enforced.
#[derive(Clone, Debug)]
pub struct NetConfig<'a> {
    procs: &'a ProcedureSet,
    adj: &'a Adjacency,
    pub processes: BTreeMap<Name, ProcessState>,
    pub graph: BTreeSet<(Name, Name)>,
    counter: u64,
    initial: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NetStep {
    Local(Name),
    Com(Name, Name),
    Sel(Name, Name),
    Intro(Name),
}

fn binders_of(b: &[Action], out: &mut BTreeSet<Name>) {
    for a in b {
        match a {
            Action::Start { child, body } => {
                out.insert(child.clone());
                binders_of(body, out);
            }
            Action::IntroRecv { binder, .. } => {
                out.insert(binder.clone());
            }
            Action::Branch { branches, .. } => branches.values().for_each(|b| binders_of(b, out)),
            Action::Cond { then_b, else_b, .. } => {
                binders_of(then_b, out);
                binders_of(else_b, out);
            }
            Action::Merge(l, r) => {
                binders_of(l, out);
                binders_of(r, out);
            }
            _ => {}
        }
    }
}

fn edge(a: &Name, b: &Name) -> (Name, Name) {
    if a <= b {
        (a.clone(), b.clone())
    } else {
        (b.clone(), a.clone())
    }
}

fn waiting(p: &Name, a: &Action) -> String {
    match a {
        Action::Send { to, .. } => format!("{p} waiting to send to {to}"),
        Action::Recv { from, .. } => format!("{p} waiting to receive from {from}"),
        Action::Select { to, label } => format!("{p} waiting to select {label} at {to}"),
        Action::Branch { from, branches } => {
            let ls: Vec<&str> = branches.keys().map(|s| s.as_str()).collect();
            format!(
                "{p} waiting for a selection from {from} ({})",
                ls.join(", ")
            )
        }
        Action::IntroSend { left, right } => format!("{p} waiting to introduce {left} and {right}"),
        Action::IntroRecv { from, .. } => format!("{p} waiting for a name from {from}"),
        _ => format!("{p} ready"),
    }
}

/// `b` with the first action replaced by `with`.
fn splice(with: Behaviour, b: &[Action]) -> Behaviour {
    with.into_iter().chain(b[1..].iter().cloned()).collect()
}

impl<'a> NetConfig<'a> {
    pub fn new(prog: &'a ProjectedProgram) -> Self {
        NetConfig {
            procs: &prog.procedures,
            adj: &prog.adjacency,
            processes: prog.network.processes.clone(),
            graph: BTreeSet::new(),
            counter: 0,
            initial: prog.network.processes.len(),
        }
    }

    fn head(&self, p: &Name) -> Option<&Action> {
        self.processes.get(p).and_then(|s| s.behaviour.first())
    }

    fn cell(&self, p: &Name) -> Value {
        self.processes
            .get(p)
            .map(|s| s.cell.clone())
            .unwrap_or(Value::Undef)
    }

    pub fn enabled(&self) -> Vec<NetStep> {
        let mut out = Vec::new();
        for (p, st) in &self.processes {
            let Some(a) = st.behaviour.first() else {
                continue;
            };
            match a {
                Action::Start { .. }
                | Action::Cond { .. }
                | Action::Call { .. }
                | Action::Merge(..) => out.push(NetStep::Local(p.clone())),
                Action::Send { to, .. } => {
                    if matches!(self.head(to), Some(Action::Recv { from, .. }) if from == p) {
                        out.push(NetStep::Com(p.clone(), to.clone()));
                    }
                }
                Action::Select { to, label } => {
                    if matches!(self.head(to), Some(Action::Branch { from, branches }) if from == p && branches.contains_key(label))
                    {
                        out.push(NetStep::Sel(p.clone(), to.clone()));
                    }
                }
                Action::IntroSend { left, right } => {
                    let ready = |q: &Name| matches!(self.head(q), Some(Action::IntroRecv { from, .. }) if from == p);
                    if ready(left) && ready(right) {
                        out.push(NetStep::Intro(p.clone()));
                    }
                }
                _ => {}
            }
        }
        out
    }

    /// Unfolds a call at process `p`: `0` when `p` is not in the argument
    /// at the role's position or a list argument is empty.
    fn unfold(
        &self,
        p: &Name,
        proc: &str,
        args: &[ArgExpr],
        counter: &mut u64,
    ) -> Result<Behaviour, String> {
        let pp = self
            .procs
            .get(proc)
            .ok_or_else(|| format!("{p}: call to undefined procedure `{proc}`"))?;
        if pp.params.len() != args.len() {
            return Err(format!(
                "{p}: `{proc}` called with {} argument(s)",
                args.len()
            ));
        }
        let mut vals = Vec::with_capacity(args.len());
        for (x, a) in pp.params.iter().zip(args) {
            let v = a
                .eval(&|_| None, self.adj)
                .map_err(|e| format!("{p}: {proc}: {e}"))?;
            vals.push(match (v, x.kind) {
                (ArgValue::One(n), ParamKind::List) => ArgValue::Many(vec![n]),
                (v, _) => v,
            });
        }
        let role = pp
            .role_index()
            .ok_or_else(|| format!("`{proc}` has no parameter `{}`", pp.role))?;
        let empty = vals
            .iter()
            .any(|v| matches!(v, ArgValue::Many(l) if l.is_empty()));
        if empty || !vals[role].contains(p) {
            return Ok(Vec::new());
        }
        let params: BTreeSet<&Name> = pp.params.iter().map(|x| &x.name).collect();
        let mut bs = BTreeSet::new();
        binders_of(&pp.body, &mut bs);
        let k = *counter;
        *counter += 1;
        let renamed: BTreeMap<Name, Name> = bs
            .into_iter()
            .filter(|b| !params.contains(b))
            .map(|b| (b.clone(), b.renamed(k)))
            .collect();
        let body = rename_behaviour(&pp.body, &|n| renamed.get(n).cloned());
        let env: BTreeMap<Name, ArgExpr> = pp
            .params
            .iter()
            .map(|x| x.name.clone())
            .zip(vals.iter().map(|v| v.to_arg()))
            .collect();
        Ok(subst_behaviour(&body, &|n| env.get(n).cloned()))
    }

    /// Unfolds leading calls and merges until the head is neither.
    fn resolve(
        &self,
        p: &Name,
        b: &[Action],
        counter: &mut u64,
        budget: &mut usize,
    ) -> Result<Behaviour, String> {
        let mut cur = b.to_vec();
        loop {
            let with = match cur.first() {
                Some(Action::Call { proc, args }) => self.unfold(p, proc, args, counter)?,
                Some(Action::Merge(l, r)) => {
                    let l = self.resolve(p, l, counter, budget)?;
                    let r = self.resolve(p, r, counter, budget)?;
                    merge(&l, &r).map_err(|e| format!("{p}: {e}"))?
                }
                _ => return Ok(cur),
            };
            if *budget == 0 {
                return Err(format!("{p}: merge did not resolve"));
            }
            *budget -= 1;
            cur = splice(with, &cur);
        }
    }

    fn set_behaviour(&mut self, p: &Name, b: Behaviour) {
        if let Some(s) = self.processes.get_mut(p) {
            s.behaviour = b;
        }
    }

    pub fn step(&self, step: &NetStep) -> Result<(StepLabel, Self), String> {
        let mut next = self.clone();
        let label = match step {
            NetStep::Com(p, q) => {
                let (Some(Action::Send { expr, .. }), Some(Action::Recv { recv, .. })) =
                    (self.head(p), self.head(q))
                else {
                    return Err(format!("{p}: no matching send and receive"));
                };
                let v = expr.eval(&self.cell(p)).map_err(|e| format!("{p}: {e}"))?;
                let w = apply_recv(recv, &self.cell(q), &v).map_err(|e| format!("{q}: {e}"))?;
                let qs = next.processes.get_mut(q).unwrap();
                qs.cell = w;
                qs.behaviour.remove(0);
                next.processes.get_mut(p).unwrap().behaviour.remove(0);
                StepLabel::new(StepKind::Com, vec![p.clone(), q.clone()], v.to_string())
            }
            NetStep::Sel(p, q) => {
                let (Some(Action::Select { label, .. }), Some(Action::Branch { branches, .. })) =
                    (self.head(p), self.head(q))
                else {
                    return Err(format!("{p}: no matching selection"));
                };
                let body = branches[label].clone();
                let qb = splice(body, &self.processes[q].behaviour);
                next.set_behaviour(q, qb);
                next.processes.get_mut(p).unwrap().behaviour.remove(0);
                StepLabel::new(StepKind::Sel, vec![p.clone(), q.clone()], label.clone())
            }
            NetStep::Intro(p) => {
                let Some(Action::IntroSend { left, right }) = self.head(p) else {
                    return Err(format!("{p}: no introduction"));
                };
                for (me, other) in [(left, right), (right, left)] {
                    let b = &self.processes[me].behaviour;
                    let Some(Action::IntroRecv { binder, .. }) = b.first() else {
                        unreachable!()
                    };
                    let rest = rename_behaviour(&b[1..], &|n| (n == binder).then(|| other.clone()));
                    next.set_behaviour(me, rest);
                }
                next.processes.get_mut(p).unwrap().behaviour.remove(0);
                next.graph.insert(edge(left, right));
                StepLabel::new(
                    StepKind::Intro,
                    vec![p.clone(), left.clone(), right.clone()],
                    "",
                )
            }
            NetStep::Local(p) => {
                let b = &self.processes[p].behaviour;
                match &b[0] {
                    Action::Start { child, body } => {
                        let fresh = child.fresh(next.counter);
                        next.counter += 1;
                        let rn = |n: &Name| (n == child).then(|| fresh.clone());
                        let child_b = rename_behaviour(body, &rn);
                        next.set_behaviour(p, rename_behaviour(&b[1..], &rn));
                        next.processes.insert(
                            fresh.clone(),
                            ProcessState {
                                cell: Value::Undef,
                                behaviour: child_b,
                            },
                        );
                        next.graph.insert(edge(p, &fresh));
                        StepLabel::new(StepKind::Start, vec![p.clone(), fresh], "")
                    }
                    Action::Cond {
                        guard,
                        then_b,
                        else_b,
                    } => {
                        let taken =
                            match guard.eval(&self.cell(p)).map_err(|e| format!("{p}: {e}"))? {
                                Value::Bool(t) => t,
                                v => {
                                    return Err(format!(
                                        "{p}: condition `{guard}` gave `{v}`, not a boolean"
                                    ))
                                }
                            };
                        next.set_behaviour(
                            p,
                            splice(if taken { then_b } else { else_b }.clone(), b),
                        );
                        StepLabel::new(
                            StepKind::Cond,
                            vec![p.clone()],
                            if taken { "then" } else { "else" },
                        )
                    }
                    Action::Call { proc, args } => {
                        let mut counter = next.counter;
                        let body = self.unfold(p, proc, args, &mut counter)?;
                        let mut nb = splice(body, b);
                        while let Some(Action::Call { proc, args }) = nb.first() {
                            if !self.unfold(p, proc, args, &mut counter)?.is_empty() {
                                break;
                            }
                            nb.remove(0);
                        }
                        next.counter = counter;
                        next.set_behaviour(p, nb);
                        let shown: Vec<String> = args.iter().map(|a| a.to_string()).collect();
                        StepLabel::new(
                            StepKind::Unfold,
                            vec![p.clone()],
                            format!("{proc}({})", shown.join(", ")),
                        )
                    }
                    Action::Merge(..) => {
                        let mut counter = next.counter;
                        let mut budget = MERGE_BUDGET;
                        let r = self.resolve(p, &b[..1], &mut counter, &mut budget)?;
                        next.counter = counter;
                        next.set_behaviour(p, splice(r, b));
                        StepLabel::new(StepKind::Unfold, vec![p.clone()], "merge")
                    }
                    _ => return Err(format!("{p}: no local step")),
                }
            }
        };
        Ok((label, next))
    }
}

impl System for NetConfig<'_> {
    type Step = NetStep;

    fn steps(&self) -> Vec<NetStep> {
        self.enabled()
    }

    fn is_local(&self, step: &NetStep) -> bool {
        matches!(step, NetStep::Local(_))
    }

    fn apply(&self, step: &NetStep) -> Result<(StepLabel, Self), String> {
        self.step(step)
    }

    fn is_done(&self) -> bool {
        self.processes.values().all(|s| s.behaviour.is_empty())
    }

    fn state(&self) -> StateMap {
        self.processes
            .iter()
            .map(|(n, s)| (n.clone(), s.cell.clone()))
            .collect()
    }

    fn stuck_report(&self) -> String {
        let lines: Vec<String> = self
            .processes
            .iter()
            .filter_map(|(p, s)| s.behaviour.first().map(|a| waiting(p, a)))
            .collect();
        lines.join("\n")
    }

    fn key(&self) -> String {
        let mut text = String::new();
        for (n, s) in &self.processes {
            text.push_str(&format!(
                "{n}[{}] |> {}\n",
                s.cell,
                print_behaviour(&s.behaviour)
            ));
        }
        canonical_names(&text)
    }

    fn initial_process_count(&self) -> usize {
        self.initial
    }
}

/// Runs a projected network.
pub fn run_network(prog: &ProjectedProgram, strategy: Strategy, fuel: u64) -> Outcome {
    drive(NetConfig::new(prog), strategy, fuel)
}
