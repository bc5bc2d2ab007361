use std::collections::BTreeSet;

use crate::diag::Diagnostic;
use crate::lang::chor::binders;
use crate::lang::{ArgExpr, ListFn, Name, ParamKind, SourceProgram, Span, Stmt, StmtKind, Width};

struct Scope<'a> {
    prog: &'a SourceProgram,
    lists: BTreeSet<Name>,
    what: String,
}

impl Scope<'_> {
    fn kind(&self, n: &Name) -> ParamKind {
        if self.lists.contains(n) {
            ParamKind::List
        } else {
            ParamKind::Single
        }
    }
}

/// Arity, argument kinds, distinct names in actions, binder hygiene and
/// list parameters used as processes.
pub fn check_structure(prog: &SourceProgram) -> Vec<Diagnostic> {
    let mut diags = Vec::new();
    for d in &prog.procedures {
        let scope = Scope {
            prog,
            lists: d
                .params
                .iter()
                .filter(|p| p.kind == ParamKind::List)
                .map(|p| p.name.clone())
                .collect(),
            what: format!("procedure `{}`", d.name),
        };
        let params: BTreeSet<Name> = d.params.iter().map(|p| p.name.clone()).collect();
        check_binders(&d.body, &params, &scope.what, &mut diags);
        check_body(&d.body, &scope, &mut diags);
    }
    let scope = Scope {
        prog,
        lists: prog.lists.iter().map(|(n, _)| n.clone()).collect(),
        what: "main".to_string(),
    };
    let declared: BTreeSet<Name> = prog.processes.iter().cloned().collect();
    check_binders(&prog.main, &declared, "main", &mut diags);
    check_body(&prog.main, &scope, &mut diags);
    diags
}

fn check_binders(body: &[Stmt], taken: &BTreeSet<Name>, what: &str, diags: &mut Vec<Diagnostic>) {
    let mut found = Vec::new();
    binders(body, &mut found);
    let mut seen = BTreeSet::new();
    for (b, span) in found {
        if taken.contains(&b) {
            diags.push(Diagnostic::error(
                format!("`start` in {what} rebinds `{b}`"),
                span,
            ));
        } else if !seen.insert(b.clone()) {
            diags.push(Diagnostic::error(
                format!("`{b}` is started twice in {what}"),
                span,
            ));
        }
        if b.is_list_like() {
            diags.push(Diagnostic::error(
                format!("started process `{b}` has a list name"),
                span,
            ));
        }
    }
}

fn single(n: &Name, span: Span, scope: &Scope, diags: &mut Vec<Diagnostic>) {
    if scope.kind(n) == ParamKind::List {
        diags.push(Diagnostic::error(
            format!("list `{n}` used as a process in {}", scope.what),
            span,
        ));
    }
}

fn check_body(body: &[Stmt], scope: &Scope, diags: &mut Vec<Diagnostic>) {
    for s in body {
        let sp = s.span;
        match &s.kind {
            StmtKind::Com { from, to, .. } | StmtKind::Sel { from, to, .. } => {
                single(from, sp, scope, diags);
                single(to, sp, scope, diags);
                if from == to {
                    diags.push(Diagnostic::error(
                        format!("`{from}` interacts with itself"),
                        sp,
                    ));
                }
            }
            StmtKind::Start { parent, child } => {
                single(parent, sp, scope, diags);
                if parent == child {
                    diags.push(Diagnostic::error(format!("`{parent}` starts itself"), sp));
                }
            }
            StmtKind::Intro { by, left, right } => {
                for n in [by, left, right] {
                    single(n, sp, scope, diags);
                }
                if by == left || by == right || left == right {
                    diags.push(Diagnostic::error(
                        format!("introduction `{by}: {left} <-> {right}` needs three distinct processes"),
                        sp,
                    ));
                }
            }
            StmtKind::Cond {
                decider,
                then_branch,
                else_branch,
                ..
            } => {
                single(decider, sp, scope, diags);
                check_body(then_branch, scope, diags);
                check_body(else_branch, scope, diags);
            }
            StmtKind::Call { proc, args } => check_call(proc, args, sp, scope, diags),
        }
    }
}

fn check_call(proc: &str, args: &[ArgExpr], sp: Span, scope: &Scope, diags: &mut Vec<Diagnostic>) {
    for a in args {
        check_arg(a, sp, scope, diags);
    }
    let Some(def) = scope.prog.procedure(proc) else {
        diags.push(Diagnostic::error(
            format!("call to undefined procedure `{proc}`"),
            sp,
        ));
        return;
    };
    if def.params.len() != args.len() {
        diags.push(Diagnostic::error(
            format!(
                "`{proc}` takes {} argument(s), given {}",
                def.params.len(),
                args.len()
            ),
            sp,
        ));
        return;
    }
    let lookup = |n: &Name| Some(scope.kind(n));
    for (p, a) in def.params.iter().zip(args) {
        let k = a.kind(&lookup);
        if k != p.kind {
            let want = if p.kind == ParamKind::List {
                "a list"
            } else {
                "a single process"
            };
            diags.push(Diagnostic::error(
                format!(
                    "argument `{a}` of `{proc}` should be {want} (parameter `{}`)",
                    p.name
                ),
                sp,
            ));
        }
    }
}

fn expect_kind(a: &ArgExpr, want: ParamKind, sp: Span, scope: &Scope, diags: &mut Vec<Diagnostic>) {
    let lookup = |n: &Name| Some(scope.kind(n));
    if a.kind(&lookup) != want {
        let w = if want == ParamKind::List {
            "a list"
        } else {
            "a single process"
        };
        diags.push(Diagnostic::error(format!("`{a}` should be {w}"), sp));
    }
}

fn check_arg(a: &ArgExpr, sp: Span, scope: &Scope, diags: &mut Vec<Diagnostic>) {
    match a {
        ArgExpr::Name(_) => {}
        ArgExpr::List(items) => {
            for it in items {
                if let ArgExpr::Name(n) = it {
                    single(n, sp, scope, diags);
                }
            }
        }
        ArgExpr::Apply { func, args, width } => {
            for x in args {
                check_arg(x, sp, scope, diags);
            }
            match func {
                ListFn::Neighb => {
                    expect_kind(&args[0], ParamKind::Single, sp, scope, diags);
                    expect_kind(&args[1], ParamKind::List, sp, scope, diags);
                }
                _ => args
                    .iter()
                    .for_each(|x| expect_kind(x, ParamKind::List, sp, scope, diags)),
            }
            if let Some(Width::Len(w)) = width {
                check_arg(w, sp, scope, diags);
                expect_kind(w, ParamKind::List, sp, scope, diags);
            }
        }
        ArgExpr::Concat(l, r) | ArgExpr::Diff(l, r) => {
            for x in [l, r] {
                check_arg(x, sp, scope, diags);
                expect_kind(x, ParamKind::List, sp, scope, diags);
            }
        }
    }
}
