use std::collections::BTreeSet;

use super::expr::{Expr, RecvFunction};
use super::list::{Adjacency, ArgExpr};
use super::name::{Name, Param, ParamKind};

/// Source location. Spans never take part in AST equality.
#[derive(Clone, Copy, Debug, Default, Eq, Hash)]
pub struct Span {
    pub line: u32,
    pub col: u32,
    pub len: u32,
}

impl PartialEq for Span {
    fn eq(&self, _: &Span) -> bool {
        true
    }
}

impl Span {
    pub fn new(line: u32, col: u32, len: u32) -> Self {
        Span { line, col, len }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum StmtKind {
    /// `p.e -> q.f`
    Com {
        from: Name,
        expr: Expr,
        to: Name,
        recv: RecvFunction,
    },
    /// `p -> q[l]`
    Sel { from: Name, to: Name, label: String },
    /// `p start q`, binding `q` in the rest of the sequence.
    Start { parent: Name, child: Name },
    /// `p: q <-> r`
    Intro { by: Name, left: Name, right: Name },
    /// `if p.e then C1 else C2`
    Cond {
        decider: Name,
        guard: Expr,
        then_branch: Vec<Stmt>,
        else_branch: Vec<Stmt>,
    },
    /// `X(args)`
    Call { proc: String, args: Vec<ArgExpr> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Stmt {
    pub kind: StmtKind,
    pub span: Span,
}

impl Stmt {
    pub fn new(kind: StmtKind) -> Self {
        Stmt {
            kind,
            span: Span::default(),
        }
    }

    pub fn at(kind: StmtKind, span: Span) -> Self {
        Stmt { kind, span }
    }
}

impl From<StmtKind> for Stmt {
    fn from(kind: StmtKind) -> Self {
        Stmt::new(kind)
    }
}

/// A choreography: statements in sequence, terminated by `0`.
pub type Choreography = Vec<Stmt>;

#[derive(Clone, Debug, PartialEq)]
pub struct ProcedureDef {
    pub name: String,
    pub params: Vec<Param>,
    pub body: Choreography,
    pub span: Span,
}

impl ProcedureDef {
    pub fn param_kind(&self, n: &Name) -> Option<ParamKind> {
        self.params.iter().find(|p| &p.name == n).map(|p| p.kind)
    }
}

/// A parsed `.pc` file: declarations, procedure definitions and `main`.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct SourceProgram {
    pub processes: Vec<Name>,
    pub lists: Vec<(Name, Vec<Name>)>,
    /// When present, the initial connection graph is exactly these edges.
    pub graph: Option<Vec<(Name, Name)>>,
    pub adjacency: Option<Vec<(Name, Name)>>,
    pub procedures: Vec<ProcedureDef>,
    pub main: Choreography,
}

impl SourceProgram {
    pub fn procedure(&self, name: &str) -> Option<&ProcedureDef> {
        self.procedures.iter().find(|p| p.name == name)
    }

    pub fn list(&self, name: &Name) -> Option<&[Name]> {
        self.lists
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, l)| l.as_slice())
    }

    pub fn adjacency(&self) -> Adjacency {
        self.adjacency
            .as_ref()
            .map(Adjacency::from_edges)
            .unwrap_or_default()
    }

    /// Edges of the initial connection graph: complete over the declared
    /// processes and list members unless a `graph` block is given.
    pub fn initial_edges(&self) -> Vec<(Name, Name)> {
        match &self.graph {
            Some(edges) => edges.clone(),
            None => {
                let mut all: Vec<&Name> = Vec::new();
                for n in self
                    .processes
                    .iter()
                    .chain(self.lists.iter().flat_map(|(_, l)| l))
                {
                    if !all.contains(&n) {
                        all.push(n);
                    }
                }
                let mut out = Vec::new();
                for (i, a) in all.iter().enumerate() {
                    for b in &all[i + 1..] {
                        out.push(((*a).clone(), (*b).clone()));
                    }
                }
                out
            }
        }
    }
}

fn collect_free(c: &[Stmt], bound: &BTreeSet<Name>, out: &mut BTreeSet<Name>) {
    let mut bound = bound.clone();
    let mut add = |n: &Name, bound: &BTreeSet<Name>| {
        if !bound.contains(n) {
            out.insert(n.clone());
        }
    };
    for s in c {
        match &s.kind {
            StmtKind::Com { from, to, .. } | StmtKind::Sel { from, to, .. } => {
                add(from, &bound);
                add(to, &bound);
            }
            StmtKind::Start { parent, child } => {
                add(parent, &bound);
                bound.insert(child.clone());
            }
            StmtKind::Intro { by, left, right } => {
                add(by, &bound);
                add(left, &bound);
                add(right, &bound);
            }
            StmtKind::Cond {
                decider,
                then_branch,
                else_branch,
                ..
            } => {
                add(decider, &bound);
                let mut inner = BTreeSet::new();
                collect_free(then_branch, &bound, &mut inner);
                collect_free(else_branch, &bound, &mut inner);
                for n in &inner {
                    add(n, &bound);
                }
            }
            StmtKind::Call { args, .. } => {
                let mut names = BTreeSet::new();
                args.iter().for_each(|a| a.free_names(&mut names));
                for n in &names {
                    add(n, &bound);
                }
            }
        }
    }
}

/// Free process names; `start` binders are excluded from their scope.
pub fn free_process_names(c: &[Stmt]) -> BTreeSet<Name> {
    let mut out = BTreeSet::new();
    collect_free(c, &BTreeSet::new(), &mut out);
    out
}

/// Every process name occurring in `c`, bound or free.
pub fn all_names(c: &[Stmt], out: &mut BTreeSet<Name>) {
    for s in c {
        match &s.kind {
            StmtKind::Com { from, to, .. } | StmtKind::Sel { from, to, .. } => {
                out.insert(from.clone());
                out.insert(to.clone());
            }
            StmtKind::Start { parent, child } => {
                out.insert(parent.clone());
                out.insert(child.clone());
            }
            StmtKind::Intro { by, left, right } => {
                out.extend([by.clone(), left.clone(), right.clone()]);
            }
            StmtKind::Cond {
                decider,
                then_branch,
                else_branch,
                ..
            } => {
                out.insert(decider.clone());
                all_names(then_branch, out);
                all_names(else_branch, out);
            }
            StmtKind::Call { args, .. } => args.iter().for_each(|a| a.free_names(out)),
        }
    }
}

/// `start` binders in `c`, including those nested in conditionals.
pub fn binders(c: &[Stmt], out: &mut Vec<(Name, Span)>) {
    for s in c {
        match &s.kind {
            StmtKind::Start { child, .. } => out.push((child.clone(), s.span)),
            StmtKind::Cond {
                then_branch,
                else_branch,
                ..
            } => {
                binders(then_branch, out);
                binders(else_branch, out);
            }
            _ => {}
        }
    }
}

/// Substitutes names throughout `c`. Single names map to names; list
/// parameters may map to arbitrary argument expressions.
///
/// Binders are renamed like any other name; callers keep binders distinct
/// from the substituted names.
pub fn subst_chor(c: &[Stmt], f: &dyn Fn(&Name) -> Option<ArgExpr>) -> Choreography {
    let name = |n: &Name| match f(n) {
        Some(ArgExpr::Name(m)) => m,
        _ => n.clone(),
    };
    c.iter()
        .map(|s| {
            let kind = match &s.kind {
                StmtKind::Com {
                    from,
                    expr,
                    to,
                    recv,
                } => StmtKind::Com {
                    from: name(from),
                    expr: expr.clone(),
                    to: name(to),
                    recv: recv.clone(),
                },
                StmtKind::Sel { from, to, label } => StmtKind::Sel {
                    from: name(from),
                    to: name(to),
                    label: label.clone(),
                },
                StmtKind::Start { parent, child } => StmtKind::Start {
                    parent: name(parent),
                    child: name(child),
                },
                StmtKind::Intro { by, left, right } => StmtKind::Intro {
                    by: name(by),
                    left: name(left),
                    right: name(right),
                },
                StmtKind::Cond {
                    decider,
                    guard,
                    then_branch,
                    else_branch,
                } => StmtKind::Cond {
                    decider: name(decider),
                    guard: guard.clone(),
                    then_branch: subst_chor(then_branch, f),
                    else_branch: subst_chor(else_branch, f),
                },
                StmtKind::Call { proc, args } => StmtKind::Call {
                    proc: proc.clone(),
                    args: args.iter().map(|a| a.subst(f)).collect(),
                },
            };
            Stmt { kind, span: s.span }
        })
        .collect()
}

pub fn rename_chor(c: &[Stmt], f: &dyn Fn(&Name) -> Option<Name>) -> Choreography {
    subst_chor(c, &|n| f(n).map(ArgExpr::Name))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::expr::RecvFunction;

    fn com(p: &str, q: &str) -> Stmt {
        StmtKind::Com {
            from: p.into(),
            expr: Expr::Cell,
            to: q.into(),
            recv: RecvFunction::ID,
        }
        .into()
    }

    #[test]
    fn free_names_of_communication() {
        let c = vec![com("p", "q")];
        assert_eq!(free_process_names(&c), ["p".into(), "q".into()].into());
    }

    #[test]
    fn start_binds_child() {
        let c = vec![
            StmtKind::Start {
                parent: "p".into(),
                child: "q".into(),
            }
            .into(),
            com("p", "q"),
        ];
        assert_eq!(free_process_names(&c), ["p".into()].into());
    }

    #[test]
    fn renaming_a_binder_keeps_free_names() {
        let c = vec![
            StmtKind::Start {
                parent: "p".into(),
                child: "q".into(),
            }
            .into(),
            com("p", "q"),
        ];
        let renamed = rename_chor(&c, &|n| (n.as_str() == "q").then(|| Name::from("fresh")));
        assert_eq!(free_process_names(&renamed), free_process_names(&c));
    }
}
