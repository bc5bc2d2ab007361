use std::collections::{BTreeMap, BTreeSet};

use crate::diag::Diagnostic;
use crate::lang::list::eval_list_expr;
use crate::lang::{ArgValue, Name, ParamKind, ProcedureDef, SourceProgram, Span, Stmt, StmtKind};

/// An undirected edge, smaller name first. `(L, L)` for a list `L` means
/// every two elements of `L` are connected.
pub type Edge = (Name, Name);

fn edge(a: &Name, b: &Name) -> Edge {
    if a <= b {
        (a.clone(), b.clone())
    } else {
        (b.clone(), a.clone())
    }
}

/// Edges among a procedure's parameters that it needs at entry and that
/// hold when it returns. An edge to a list parameter stands for edges to
/// all of its elements.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ConnectionContract {
    pub requires: BTreeSet<Edge>,
    pub ensures: BTreeSet<Edge>,
}

#[derive(Clone, Debug, Default)]
pub struct ConnectionReport {
    pub diagnostics: Vec<Diagnostic>,
    pub contracts: BTreeMap<String, ConnectionContract>,
}

/// Pairs of caller-side names that a callee edge `(u, v)` stands for.
fn instantiate(
    def: &ProcedureDef,
    edges: &BTreeSet<Edge>,
    targets: &[BTreeSet<Name>],
    is_list: &dyn Fn(&Name) -> bool,
) -> Vec<(Name, Name, Edge)> {
    let pos = |n: &Name| def.params.iter().position(|p| &p.name == n);
    let mut out = Vec::new();
    for (u, v) in edges {
        let (Some(i), Some(j)) = (pos(u), pos(v)) else {
            continue;
        };
        for s in &targets[i] {
            for t in &targets[j] {
                if s != t || is_list(s) {
                    out.push((s.clone(), t.clone(), (u.clone(), v.clone())));
                }
            }
        }
    }
    out
}

struct Walk<'a> {
    prog: &'a SourceProgram,
    contracts: &'a BTreeMap<String, ConnectionContract>,
    params: BTreeMap<Name, ParamKind>,
    requires: BTreeSet<Edge>,
    diags: Vec<Diagnostic>,
}

impl Walk<'_> {
    fn is_list(&self, n: &Name) -> bool {
        self.params.get(n) == Some(&ParamKind::List)
    }

    fn need(
        &mut self,
        a: &Name,
        b: &Name,
        g: &mut BTreeSet<Edge>,
        what: &dyn Fn() -> String,
        span: Span,
    ) {
        if a == b && !self.is_list(a) {
            return;
        }
        let e = edge(a, b);
        if g.contains(&e) {
            return;
        }
        if self.params.contains_key(a) && self.params.contains_key(b) {
            self.requires.insert(e.clone());
        } else {
            self.diags.push(Diagnostic::error(
                format!("{}: `{a}` and `{b}` are not connected", what()),
                span,
            ));
        }
        g.insert(e);
    }

    fn walk(&mut self, body: &[Stmt], g: &mut BTreeSet<Edge>) {
        for s in body {
            let sp = s.span;
            let shown = || crate::syntax::print_choreography(std::slice::from_ref(s), 0);
            match &s.kind {
                StmtKind::Com { from, to, .. } | StmtKind::Sel { from, to, .. } => {
                    self.need(from, to, g, &|| format!("`{}`", shown()), sp)
                }
                StmtKind::Start { parent, child } => {
                    g.insert(edge(parent, child));
                }
                StmtKind::Intro { by, left, right } => {
                    self.need(by, left, g, &|| format!("`{}`", shown()), sp);
                    self.need(by, right, g, &|| format!("`{}`", shown()), sp);
                    g.insert(edge(left, right));
                }
                StmtKind::Cond {
                    then_branch,
                    else_branch,
                    ..
                } => {
                    let mut gt = g.clone();
                    let mut ge = g.clone();
                    self.walk(then_branch, &mut gt);
                    self.walk(else_branch, &mut ge);
                    *g = gt.intersection(&ge).cloned().collect();
                }
                StmtKind::Call { proc, args } => {
                    let (Some(def), Some(c)) =
                        (self.prog.procedure(proc), self.contracts.get(proc))
                    else {
                        continue;
                    };
                    if def.params.len() != args.len() {
                        continue;
                    }
                    let targets: Vec<BTreeSet<Name>> = args
                        .iter()
                        .map(|a| {
                            let mut s = BTreeSet::new();
                            a.support(&mut s);
                            s
                        })
                        .collect();
                    let is_list = |n: &Name| self.is_list(n);
                    let needs = instantiate(def, &c.requires, &targets, &is_list);
                    let gives = instantiate(def, &c.ensures, &targets, &is_list);
                    for (a, b, (u, v)) in needs {
                        let what = || format!("`{}` (needs `{u}` connected to `{v}`)", shown());
                        self.need(&a, &b, g, &what, sp);
                    }
                    for (a, b, _) in gives {
                        g.insert(edge(&a, &b));
                    }
                }
            }
        }
    }
}

fn param_map(def: &ProcedureDef) -> BTreeMap<Name, ParamKind> {
    def.params
        .iter()
        .map(|p| (p.name.clone(), p.kind))
        .collect()
}

fn walk_procedure(
    prog: &SourceProgram,
    def: &ProcedureDef,
    contracts: &BTreeMap<String, ConnectionContract>,
) -> (ConnectionContract, Vec<Diagnostic>) {
    let start = contracts
        .get(&def.name)
        .map(|c| c.requires.clone())
        .unwrap_or_default();
    let mut w = Walk {
        prog,
        contracts,
        params: param_map(def),
        requires: start.clone(),
        diags: Vec::new(),
    };
    let mut g = start;
    w.walk(&def.body, &mut g);
    let ensures = g
        .into_iter()
        .filter(|(a, b)| w.params.contains_key(a) && w.params.contains_key(b))
        .collect();
    (
        ConnectionContract {
            requires: w.requires,
            ensures,
        },
        w.diags,
    )
}

/// Infers a contract for every procedure, as the least fixpoint of the
/// body walk. List edges are uniform: an edge to any element of a list
/// parameter counts as an edge to the whole list.
pub fn infer_contracts(
    prog: &SourceProgram,
) -> (BTreeMap<String, ConnectionContract>, Vec<Diagnostic>) {
    let mut contracts: BTreeMap<String, ConnectionContract> = prog
        .procedures
        .iter()
        .map(|d| (d.name.clone(), ConnectionContract::default()))
        .collect();
    // each round that changes something adds at least one edge
    let bound: usize = prog
        .procedures
        .iter()
        .map(|d| 2 * d.params.len() * d.params.len() + 1)
        .sum::<usize>()
        + 1;
    let mut diags = Vec::new();
    for round in 0..=bound {
        let mut changed = false;
        for d in &prog.procedures {
            let (c, _) = walk_procedure(prog, d, &contracts);
            if contracts[&d.name] != c {
                contracts.insert(d.name.clone(), c);
                changed = true;
            }
        }
        if !changed {
            break;
        }
        if round == bound {
            diags.push(Diagnostic::error(
                "connection contracts did not converge",
                Span::default(),
            ));
        }
    }
    (contracts, diags)
}

/// Checks that every interaction happens over an edge, starting from the
/// graph `g0` over the declared processes.
pub fn check_connections(prog: &SourceProgram, g0: &[(Name, Name)]) -> ConnectionReport {
    let (contracts, mut diagnostics) = infer_contracts(prog);
    for d in &prog.procedures {
        diagnostics.extend(walk_procedure(prog, d, &contracts).1);
    }
    let mut main = MainWalk {
        prog,
        contracts: &contracts,
        env: prog
            .lists
            .iter()
            .map(|(n, l)| (n.clone(), ArgValue::Many(l.clone())))
            .collect(),
        diags: Vec::new(),
    };
    let mut g: BTreeSet<Edge> = g0.iter().map(|(a, b)| edge(a, b)).collect();
    main.walk(&prog.main, &mut g);
    diagnostics.extend(main.diags);
    ConnectionReport {
        diagnostics,
        contracts,
    }
}

/// `main` works on concrete names, so list arguments are evaluated.
struct MainWalk<'a> {
    prog: &'a SourceProgram,
    contracts: &'a BTreeMap<String, ConnectionContract>,
    env: BTreeMap<Name, ArgValue>,
    diags: Vec<Diagnostic>,
}

impl MainWalk<'_> {
    fn need(
        &mut self,
        a: &Name,
        b: &Name,
        g: &mut BTreeSet<Edge>,
        what: &dyn Fn() -> String,
        span: Span,
    ) {
        if a == b || g.contains(&edge(a, b)) {
            return;
        }
        self.diags.push(Diagnostic::error(
            format!("{}: `{a}` and `{b}` are not connected", what()),
            span,
        ));
        g.insert(edge(a, b));
    }

    fn walk(&mut self, body: &[Stmt], g: &mut BTreeSet<Edge>) {
        let adj = self.prog.adjacency();
        for s in body {
            let sp = s.span;
            let shown = || crate::syntax::print_choreography(std::slice::from_ref(s), 0);
            match &s.kind {
                StmtKind::Com { from, to, .. } | StmtKind::Sel { from, to, .. } => {
                    self.need(from, to, g, &|| format!("`{}`", shown()), sp)
                }
                StmtKind::Start { parent, child } => {
                    g.insert(edge(parent, child));
                }
                StmtKind::Intro { by, left, right } => {
                    self.need(by, left, g, &|| format!("`{}`", shown()), sp);
                    self.need(by, right, g, &|| format!("`{}`", shown()), sp);
                    g.insert(edge(left, right));
                }
                StmtKind::Cond {
                    then_branch,
                    else_branch,
                    ..
                } => {
                    let mut gt = g.clone();
                    let mut ge = g.clone();
                    self.walk(then_branch, &mut gt);
                    self.walk(else_branch, &mut ge);
                    *g = gt.intersection(&ge).cloned().collect();
                }
                StmtKind::Call { proc, args } => {
                    let (Some(def), Some(c)) =
                        (self.prog.procedure(proc), self.contracts.get(proc))
                    else {
                        continue;
                    };
                    if def.params.len() != args.len() {
                        continue;
                    }
                    let mut targets = Vec::new();
                    for a in args {
                        match eval_list_expr(a, &self.env, &adj) {
                            Ok(v) => {
                                targets.push(v.names().iter().cloned().collect::<BTreeSet<Name>>())
                            }
                            Err(e) => {
                                self.diags
                                    .push(Diagnostic::error(format!("`{}`: {e}", shown()), sp));
                                break;
                            }
                        }
                    }
                    if targets.len() != args.len() {
                        continue;
                    }
                    let never = |_: &Name| false;
                    for (a, b, (u, v)) in instantiate(def, &c.requires, &targets, &never) {
                        let what = || format!("`{}` (needs `{u}` connected to `{v}`)", shown());
                        self.need(&a, &b, g, &what, sp);
                    }
                    for (a, b, _) in instantiate(def, &c.ensures, &targets, &never) {
                        g.insert(edge(&a, &b));
                    }
                }
            }
        }
    }
}
