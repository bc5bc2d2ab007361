use std::collections::{BTreeMap, BTreeSet};

use super::{canonical_names, drive, Outcome, StepKind, StepLabel, Strategy, System};
use crate::epp::{declared_processes, main_with_lists_inlined};
use crate::lang::chor::{binders, free_process_names, rename_chor, subst_chor};
use crate::lang::expr::apply_recv;
use crate::lang::{
    Adjacency, ArgExpr, ArgValue, Name, ParamKind, SourceProgram, StateMap, Stmt, StmtKind, Value,
};
use crate::syntax::{print_choreography, print_state};

type Edge = (Name, Name);

fn edge(a: &Name, b: &Name) -> Edge {
    if a <= b {
        (a.clone(), b.clone())
    } else {
        (b.clone(), a.clone())
    }
}

/// A choreography configuration: remaining body, cells and connections.
#[derive(Clone, Debug)]
pub struct ChorConfig<'a> {
    prog: &'a SourceProgram,
    adj: &'a Adjacency,
    pub body: Vec<Stmt>,
    pub state: StateMap,
    pub graph: BTreeSet<Edge>,
    counter: u64,
    initial: usize,
}

fn participants(s: &Stmt) -> BTreeSet<Name> {
    match &s.kind {
        StmtKind::Com { from, to, .. } | StmtKind::Sel { from, to, .. } => {
            [from.clone(), to.clone()].into()
        }
        StmtKind::Start { parent, child } => [parent.clone(), child.clone()].into(),
        StmtKind::Intro { by, left, right } => [by.clone(), left.clone(), right.clone()].into(),
        StmtKind::Cond {
            decider,
            then_branch,
            else_branch,
            ..
        } => {
            let mut out = free_process_names(then_branch);
            out.extend(free_process_names(else_branch));
            out.insert(decider.clone());
            out
        }
        StmtKind::Call { args, .. } => {
            let mut out = BTreeSet::new();
            args.iter().for_each(|a| a.free_names(&mut out));
            out
        }
    }
}

fn shown(s: &Stmt) -> String {
    print_choreography(std::slice::from_ref(s), 0).replace('\n', " ")
}

impl<'a> ChorConfig<'a> {
    /// The initial configuration of `prog`: `main` with list names inlined,
    /// cells from `init` (`undef` elsewhere), the initial connection graph.
    pub fn new(prog: &'a SourceProgram, adj: &'a Adjacency, init: &StateMap) -> Self {
        let declared = declared_processes(prog);
        let mut state: StateMap = declared.iter().map(|n| (n.clone(), Value::Undef)).collect();
        for (n, v) in init {
            state.insert(n.clone(), v.clone());
        }
        ChorConfig {
            prog,
            adj,
            body: main_with_lists_inlined(prog),
            state,
            graph: prog
                .initial_edges()
                .iter()
                .map(|(a, b)| edge(a, b))
                .collect(),
            counter: 0,
            initial: declared.len(),
        }
    }

    fn connected(&self, a: &Name, b: &Name) -> bool {
        self.graph.contains(&edge(a, b))
    }

    fn missing_edge(&self, s: &Stmt) -> Option<(Name, Name)> {
        match &s.kind {
            StmtKind::Com { from, to, .. } | StmtKind::Sel { from, to, .. } => {
                (!self.connected(from, to)).then(|| (from.clone(), to.clone()))
            }
            StmtKind::Intro { by, left, right } => [left, right]
                .into_iter()
                .find(|x| !self.connected(by, x))
                .map(|x| (by.clone(), x.clone())),
            _ => None,
        }
    }

    fn cell(&self, n: &Name) -> Value {
        self.state.get(n).cloned().unwrap_or(Value::Undef)
    }

    /// Positions of the statements that may reduce now.
    pub fn enabled(&self) -> Vec<usize> {
        let mut out = Vec::new();
        let mut earlier = BTreeSet::new();
        let mut earlier_calls = BTreeSet::new();
        for (i, s) in self.body.iter().enumerate() {
            let ps = participants(s);
            if let StmtKind::Call { .. } = s.kind {
                if ps.is_disjoint(&earlier_calls) {
                    out.push(i);
                }
                earlier_calls.extend(ps.iter().cloned());
            } else if ps.is_disjoint(&earlier) && self.missing_edge(s).is_none() {
                out.push(i);
            }
            earlier.extend(ps);
        }
        out
    }

    fn splice(&self, i: usize, with: Vec<Stmt>) -> Vec<Stmt> {
        let mut body = Vec::with_capacity(self.body.len() + with.len());
        body.extend_from_slice(&self.body[..i]);
        body.extend(with);
        body.extend_from_slice(&self.body[i + 1..]);
        body
    }

    /// Reduces the statement at position `i`.
    pub fn step(&self, i: usize) -> Result<(StepLabel, Self), String> {
        let s = &self.body[i];
        let mut next = self.clone();
        let label = match &s.kind {
            StmtKind::Com {
                from,
                expr,
                to,
                recv,
            } => {
                let v = expr
                    .eval(&self.cell(from))
                    .map_err(|e| format!("{from}: {e}"))?;
                let w = apply_recv(recv, &self.cell(to), &v).map_err(|e| format!("{to}: {e}"))?;
                next.state.insert(to.clone(), w);
                next.body.remove(i);
                StepLabel::new(StepKind::Com, vec![from.clone(), to.clone()], v.to_string())
            }
            StmtKind::Sel { from, to, label } => {
                next.body.remove(i);
                StepLabel::new(StepKind::Sel, vec![from.clone(), to.clone()], label.clone())
            }
            StmtKind::Start { parent, child } => {
                let fresh = child.fresh(next.counter);
                next.counter += 1;
                let rest = rename_chor(&self.body[i + 1..], &|n| {
                    (n == child).then(|| fresh.clone())
                });
                next.body.truncate(i);
                next.body.extend(rest);
                next.state.insert(fresh.clone(), Value::Undef);
                next.graph.insert(edge(parent, &fresh));
                StepLabel::new(StepKind::Start, vec![parent.clone(), fresh], "")
            }
            StmtKind::Intro { by, left, right } => {
                next.graph.insert(edge(left, right));
                next.body.remove(i);
                StepLabel::new(
                    StepKind::Intro,
                    vec![by.clone(), left.clone(), right.clone()],
                    "",
                )
            }
            StmtKind::Cond {
                decider,
                guard,
                then_branch,
                else_branch,
            } => {
                let taken = match guard
                    .eval(&self.cell(decider))
                    .map_err(|e| format!("{decider}: {e}"))?
                {
                    Value::Bool(b) => b,
                    v => {
                        return Err(format!(
                            "{decider}: condition `{guard}` gave `{v}`, not a boolean"
                        ))
                    }
                };
                let branch = if taken { then_branch } else { else_branch };
                next.body = self.splice(i, branch.clone());
                StepLabel::new(
                    StepKind::Cond,
                    vec![decider.clone()],
                    if taken { "then" } else { "else" },
                )
            }
            StmtKind::Call { proc, args } => {
                let (payload, body) = self.unfold(proc, args)?;
                next.counter += 1;
                next.body = self.splice(i, body);
                let mut ps = BTreeSet::new();
                args.iter().for_each(|a| a.free_names(&mut ps));
                StepLabel::new(StepKind::Unfold, ps.into_iter().collect(), payload)
            }
        };
        Ok((label, next))
    }

    fn unfold(&self, proc: &str, args: &[ArgExpr]) -> Result<(String, Vec<Stmt>), String> {
        let def = self
            .prog
            .procedure(proc)
            .ok_or_else(|| format!("call to undefined procedure `{proc}`"))?;
        if def.params.len() != args.len() {
            return Err(format!("`{proc}` called with {} argument(s)", args.len()));
        }
        let mut vals = Vec::with_capacity(args.len());
        for (p, a) in def.params.iter().zip(args) {
            let v = a
                .eval(&|_| None, self.adj)
                .map_err(|e| format!("{proc}: {e}"))?;
            match (&v, p.kind) {
                (ArgValue::Many(_), ParamKind::Single) => {
                    return Err(format!(
                        "{proc}: `{a}` is a list, parameter `{}` is single",
                        p.name
                    ))
                }
                (ArgValue::One(n), ParamKind::List) => vals.push(ArgValue::Many(vec![n.clone()])),
                _ => vals.push(v),
            }
        }
        let shown_args: Vec<String> = vals.iter().map(|v| v.to_string()).collect();
        let payload = format!("{proc}({})", shown_args.join(", "));
        if vals
            .iter()
            .any(|v| matches!(v, ArgValue::Many(l) if l.is_empty()))
        {
            return Ok((payload, Vec::new()));
        }
        let mut bs = Vec::new();
        binders(&def.body, &mut bs);
        let k = self.counter;
        let renamed: BTreeMap<Name, Name> = bs
            .into_iter()
            .map(|(b, _)| (b.clone(), b.renamed(k)))
            .collect();
        let body = rename_chor(&def.body, &|n| renamed.get(n).cloned());
        let env: BTreeMap<Name, ArgExpr> = def
            .params
            .iter()
            .map(|p| p.name.clone())
            .zip(vals.iter().map(|v| v.to_arg()))
            .collect();
        Ok((payload, subst_chor(&body, &|n| env.get(n).cloned())))
    }
}

impl System for ChorConfig<'_> {
    type Step = usize;

    fn steps(&self) -> Vec<usize> {
        self.enabled()
    }

    fn is_local(&self, step: &usize) -> bool {
        matches!(
            self.body[*step].kind,
            StmtKind::Call { .. } | StmtKind::Start { .. } | StmtKind::Cond { .. }
        )
    }

    fn apply(&self, step: &usize) -> Result<(StepLabel, Self), String> {
        self.step(*step)
    }

    fn is_done(&self) -> bool {
        self.body.is_empty()
    }

    fn state(&self) -> StateMap {
        self.state.clone()
    }

    fn stuck_report(&self) -> String {
        let mut lines = Vec::new();
        for s in &self.body {
            if let Some((a, b)) = self.missing_edge(s) {
                lines.push(format!("`{}`: `{a}` and `{b}` are not connected", shown(s)));
            }
        }
        if lines.is_empty() {
            lines.push("no statement can reduce".to_string());
        }
        lines.join("\n")
    }

    fn key(&self) -> String {
        let edges: Vec<String> = self.graph.iter().map(|(a, b)| format!("{a}-{b}")).collect();
        canonical_names(&format!(
            "{}\n{}\n{}",
            print_choreography(&self.body, 0),
            print_state(&self.state),
            edges.join(" ")
        ))
    }

    fn initial_process_count(&self) -> usize {
        self.initial
    }
}

/// Runs `main` of `prog` from the cells in `init`.
pub fn run_choreography(
    prog: &SourceProgram,
    init: &StateMap,
    strategy: Strategy,
    fuel: u64,
) -> Outcome {
    let adj = prog.adjacency();
    drive(ChorConfig::new(prog, &adj, init), strategy, fuel)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::sources;
    use crate::engine::DEFAULT_FUEL;
    use crate::syntax::{parse_program, parse_state};

    fn config_of(text: &str) -> (SourceProgram, Adjacency) {
        let prog = parse_program(text).unwrap();
        let adj = prog.adjacency();
        (prog, adj)
    }

    #[test]
    fn disjoint_statements_are_both_enabled() {
        let (prog, adj) = config_of("processes p, q, r, s;\nmain { p.1 -> q.id; r.2 -> s.id }");
        assert_eq!(
            ChorConfig::new(&prog, &adj, &StateMap::new()).enabled(),
            vec![0, 1]
        );
    }

    #[test]
    fn shared_process_blocks() {
        let (prog, adj) = config_of("processes p, q, r;\nmain { p.c -> q.add; q.c -> r.id }");
        assert_eq!(
            ChorConfig::new(&prog, &adj, &StateMap::new()).enabled(),
            vec![0]
        );
    }

    #[test]
    fn quicksort_sorts() {
        let prog = parse_program(sources::QUICKSORT).unwrap();
        let init = parse_state("p = [3, 1, 2]").unwrap();
        let out = run_choreography(&prog, &init, Strategy::Sequential, DEFAULT_FUEL);
        assert_eq!(
            out.final_state().unwrap()[&Name::from("p")],
            Value::ints([1, 2, 3]),
            "{out:?}"
        );
    }

    #[test]
    fn gauss_one_by_one() {
        let text = "list A = [a11, b1];\n".to_string()
            + &sources::GAUSS[sources::GAUSS.find("\ngauss").unwrap()..];
        let prog = parse_program(&text).unwrap();
        let init = parse_state("a11 = 2.0\nb1 = 4.0").unwrap();
        let out = run_choreography(&prog, &init, Strategy::Sequential, DEFAULT_FUEL);
        let st = out.final_state().unwrap_or_else(|| panic!("{out:?}"));
        assert!(st[&Name::from("a11")].approx_eq(&Value::Float(1.0), 1e-12));
        assert!(st[&Name::from("b1")].approx_eq(&Value::Float(2.0), 1e-12));
    }

    #[test]
    fn missing_edge_is_stuck() {
        let prog = parse_program("processes p, q;\ngraph { }\nmain { p.c -> q.id }").unwrap();
        let out = run_choreography(&prog, &StateMap::new(), Strategy::Sequential, 10);
        let Outcome::Stuck { report, .. } = out else {
            panic!("{out:?}")
        };
        assert!(report.contains("`p` and `q` are not connected"));
    }

    #[test]
    fn fuel_is_reported() {
        let prog = parse_program("processes p;\nX(p) = p start q; X(p)\nmain { X(p) }").unwrap();
        let out = run_choreography(&prog, &StateMap::new(), Strategy::Sequential, 50);
        assert!(matches!(out, Outcome::FuelExhausted { ref trace } if trace.len() == 50));
    }

    #[test]
    fn random_runs_agree_with_sequential() {
        let prog = parse_program(sources::QUICKSORT).unwrap();
        let init = parse_state("p = [5, 3, 9, 1, 3]").unwrap();
        let seq = run_choreography(&prog, &init, Strategy::Sequential, DEFAULT_FUEL);
        for seed in 0..5 {
            let r = run_choreography(&prog, &init, Strategy::Random(seed), DEFAULT_FUEL);
            assert_eq!(
                super::super::initial_part(r.final_state().unwrap()),
                super::super::initial_part(seq.final_state().unwrap())
            );
        }
    }
}
