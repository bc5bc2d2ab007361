use std::collections::{BTreeMap, BTreeSet};

use super::cursor::{Cursor, PResult};
use super::terms::{call_args, expr, recv_function};
use crate::diag::Diagnostic;
use crate::lang::chor::{all_names, free_process_names};
use crate::lang::{Name, Param, ProcedureDef, RecvFunction, SourceProgram, Span, Stmt, StmtKind};

/// Parses a `.pc` program and checks its scoping: duplicate definitions,
/// parameters against free names, and undeclared names in `main`.
pub fn parse_program(text: &str) -> Result<SourceProgram, Vec<Diagnostic>> {
    let mut c = Cursor::new(text);
    let prog = program(&mut c).map_err(|d| vec![d])?;
    let diags = scope_diagnostics(&prog);
    if diags.is_empty() {
        Ok(prog)
    } else {
        Err(diags)
    }
}

/// Parses a bare choreography such as `p.c -> q.id; q.c -> r.id`.
pub fn parse_choreography(text: &str) -> Result<Vec<Stmt>, Diagnostic> {
    let mut c = Cursor::new(text);
    let out = chor(&mut c)?;
    if !c.at_end() {
        return c.error("unexpected input after choreography");
    }
    Ok(out)
}

fn edge_block(c: &mut Cursor) -> PResult<Vec<(Name, Name)>> {
    c.expect("{")?;
    c.raw_dashes = true;
    let mut edges = Vec::new();
    let res = (|| {
        while !c.eat("}") {
            let a = c.process_name(false)?;
            c.expect("--")?;
            let b = c.process_name(false)?;
            c.expect(";")?;
            edges.push((a, b));
        }
        Ok(())
    })();
    c.raw_dashes = false;
    res.map(|_| edges)
}

fn declare(prog: &mut SourceProgram, n: Name) {
    if !prog.processes.contains(&n) {
        prog.processes.push(n);
    }
}

fn program(c: &mut Cursor) -> PResult<SourceProgram> {
    let mut prog = SourceProgram::default();
    loop {
        if c.eat_keyword("processes") {
            loop {
                let n = c.process_name(false)?;
                declare(&mut prog, n);
                if !c.eat(",") {
                    break;
                }
            }
            c.expect(";")?;
        } else if c.eat_keyword("list") {
            let start = c.save();
            let name = Name::new(c.expect_ident("a list name")?);
            if !name.is_list_like() {
                return Err(Diagnostic::error(
                    "list names start with an uppercase letter",
                    c.span_from(start),
                ));
            }
            c.expect("=")?;
            c.expect("[")?;
            let mut items = Vec::new();
            if !c.eat("]") {
                loop {
                    items.push(c.process_name(false)?);
                    if c.eat("]") {
                        break;
                    }
                    c.expect(",")?;
                }
            }
            c.expect(";")?;
            for n in &items {
                declare(&mut prog, n.clone());
            }
            prog.lists.push((name, items));
        } else if c.eat_keyword("graph") {
            let edges = edge_block(c)?;
            prog.graph.get_or_insert_with(Vec::new).extend(edges);
        } else if c.eat_keyword("adjacency") {
            let edges = edge_block(c)?;
            prog.adjacency.get_or_insert_with(Vec::new).extend(edges);
        } else {
            break;
        }
    }
    loop {
        if c.at_end() {
            return c.error("missing main choreography");
        }
        if c.eat_keyword("main") {
            c.expect("{")?;
            prog.main = chor(c)?;
            c.expect("}")?;
            if !c.at_end() {
                return c.error("unexpected input after main");
            }
            return Ok(prog);
        }
        prog.procedures.push(definition(c)?);
    }
}

fn definition(c: &mut Cursor) -> PResult<ProcedureDef> {
    c.skip_ws();
    let start = c.save();
    let name = c.expect_ident("a procedure definition or `main`")?;
    let span = c.span_from(start);
    c.expect("(")?;
    let mut params = Vec::new();
    if !c.eat(")") {
        loop {
            params.push(Param::from_name(c.process_name(false)?));
            if c.eat(")") {
                break;
            }
            c.expect(",")?;
        }
    }
    c.expect("=")?;
    let body = chor(c)?;
    Ok(ProcedureDef {
        name,
        params,
        body,
        span,
    })
}

/// Whether the cursor is at `X(...) =`, the start of the next definition.
fn at_definition(c: &mut Cursor) -> bool {
    let start = c.save();
    let found = (|| {
        c.ident()?;
        if c.peek() != Some('(') {
            return None;
        }
        let mut depth = 0;
        while let Some(ch) = c.bump() {
            match ch {
                '(' => depth += 1,
                ')' => {
                    depth -= 1;
                    if depth == 0 {
                        break;
                    }
                }
                _ => {}
            }
        }
        c.at("=").then_some(())
    })()
    .is_some();
    c.restore(start);
    found
}

fn at_statement_end(c: &mut Cursor) -> bool {
    c.at_end()
        || c.at("}")
        || c.at(")")
        || c.at_keyword("else")
        || c.at_keyword("main")
        || at_definition(c)
}

/// A `;`-separated sequence; `0` items are dropped.
fn chor(c: &mut Cursor) -> PResult<Vec<Stmt>> {
    let mut out = Vec::new();
    if at_statement_end(c) {
        return Ok(out);
    }
    loop {
        statement(c, &mut out)?;
        if !c.eat(";") || at_statement_end(c) {
            return Ok(out);
        }
    }
}

fn statement(c: &mut Cursor, out: &mut Vec<Stmt>) -> PResult<()> {
    c.skip_ws();
    let start = c.save();
    if c.peek() == Some('0') && !c.peek_at(1).is_some_and(|ch| ch.is_ascii_digit()) {
        c.pos += 1;
        return Ok(());
    }
    if c.eat("(") {
        out.extend(chor(c)?);
        return c.expect(")");
    }
    if c.eat_keyword("if") {
        let decider = c.process_name(false)?;
        c.expect(".")?;
        let guard = expr(c)?;
        c.expect_keyword("then")?;
        let then_branch = chor(c)?;
        c.expect_keyword("else")?;
        let else_branch = chor(c)?;
        out.push(Stmt::at(
            StmtKind::Cond {
                decider,
                guard,
                then_branch,
                else_branch,
            },
            c.span_from(start),
        ));
        return Ok(());
    }
    if let Some(proc) = c.proc_name() {
        if c.at_call_open() {
            let args = call_args(c)?;
            out.push(Stmt::at(StmtKind::Call { proc, args }, c.span_from(start)));
            return Ok(());
        }
    }
    c.restore(start);
    let p = c.process_name(false)?;
    let span = |c: &Cursor| c.span_from(start);
    if c.eat(".") {
        if c.eat_keyword("start") {
            return starts(c, p, start, out);
        }
        let e = expr(c)?;
        c.expect("->")?;
        let q = c.process_name(false)?;
        let recv = if c.peek() == Some('.') {
            c.pos += 1;
            recv_function(c)?
        } else {
            RecvFunction::ID
        };
        if p == q {
            return Err(Diagnostic::error(
                format!("process `{p}` communicates with itself"),
                span(c),
            ));
        }
        out.push(Stmt::at(
            StmtKind::Com {
                from: p,
                expr: e,
                to: q,
                recv,
            },
            span(c),
        ));
    } else if c.eat("->") {
        let mut targets = vec![c.process_name(false)?];
        while c.eat(",") {
            targets.push(c.process_name(false)?);
        }
        c.expect("[")?;
        let label = c.expect_ident("a label")?;
        c.expect("]")?;
        let sp = span(c);
        for q in targets {
            if q == p {
                return Err(Diagnostic::error(
                    format!("process `{p}` selects at itself"),
                    sp,
                ));
            }
            out.push(Stmt::at(
                StmtKind::Sel {
                    from: p.clone(),
                    to: q,
                    label: label.clone(),
                },
                sp,
            ));
        }
    } else if c.eat_keyword("start") {
        return starts(c, p, start, out);
    } else if c.eat(":") {
        let left = c.process_name(false)?;
        c.expect("<->")?;
        let right = c.process_name(false)?;
        out.push(Stmt::at(StmtKind::Intro { by: p, left, right }, span(c)));
    } else {
        return c.error(format!("expected `.`, `->`, `start` or `:` after `{p}`"));
    }
    Ok(())
}

fn starts(c: &mut Cursor, parent: Name, start: usize, out: &mut Vec<Stmt>) -> PResult<()> {
    let mut children = vec![c.process_name(false)?];
    while c.eat(",") {
        children.push(c.process_name(false)?);
    }
    let sp = c.span_from(start);
    for child in children {
        out.push(Stmt::at(
            StmtKind::Start {
                parent: parent.clone(),
                child,
            },
            sp,
        ));
    }
    Ok(())
}

fn first_span_of(c: &[Stmt], n: &Name) -> Option<Span> {
    for s in c {
        let mut names = BTreeSet::new();
        all_names(std::slice::from_ref(s), &mut names);
        if names.contains(n) {
            if let StmtKind::Cond {
                then_branch,
                else_branch,
                ..
            } = &s.kind
            {
                if let Some(sp) =
                    first_span_of(then_branch, n).or_else(|| first_span_of(else_branch, n))
                {
                    return Some(sp);
                }
            }
            return Some(s.span);
        }
    }
    None
}

/// Scoping rules checked at parse time.
pub fn scope_diagnostics(prog: &SourceProgram) -> Vec<Diagnostic> {
    let mut diags = Vec::new();
    let mut seen: BTreeMap<&str, Span> = BTreeMap::new();
    for d in &prog.procedures {
        if seen.insert(&d.name, d.span).is_some() {
            diags.push(Diagnostic::error(
                format!("procedure `{}` is defined more than once", d.name),
                d.span,
            ));
        }
        let mut params = BTreeSet::new();
        for p in &d.params {
            if !params.insert(p.name.clone()) {
                diags.push(Diagnostic::error(
                    format!("parameter `{}` of `{}` is repeated", p.name, d.name),
                    d.span,
                ));
            }
        }
        let free = free_process_names(&d.body);
        for n in free.difference(&params) {
            let sp = first_span_of(&d.body, n).unwrap_or(d.span);
            diags.push(Diagnostic::error(
                format!(
                    "`{n}` is free in the body of `{}` but is not a parameter",
                    d.name
                ),
                sp,
            ));
        }
        for n in params.difference(&free) {
            diags.push(Diagnostic::error(
                format!("parameter `{n}` of `{}` is never used", d.name),
                d.span,
            ));
        }
    }
    let declared: BTreeSet<Name> = prog
        .processes
        .iter()
        .cloned()
        .chain(prog.lists.iter().map(|(n, _)| n.clone()))
        .collect();
    for n in free_process_names(&prog.main).difference(&declared) {
        let sp = first_span_of(&prog.main, n).unwrap_or_default();
        diags.push(Diagnostic::error(
            format!("`{n}` is not a declared process or list"),
            sp,
        ));
    }
    let mut called = Vec::new();
    collect_calls(&prog.main, &mut called);
    for d in &prog.procedures {
        collect_calls(&d.body, &mut called);
    }
    for (name, sp) in called {
        if prog.procedure(&name).is_none() {
            diags.push(Diagnostic::error(
                format!("call to undefined procedure `{name}`"),
                sp,
            ));
        }
    }
    let mut edges = Vec::new();
    edges.extend(prog.graph.iter().flatten());
    edges.extend(prog.adjacency.iter().flatten());
    for (a, b) in edges {
        for n in [a, b] {
            if !prog.processes.contains(n) {
                diags.push(Diagnostic::error(
                    format!("edge mentions undeclared process `{n}`"),
                    Span::default(),
                ));
            }
        }
    }
    diags
}

fn collect_calls(c: &[Stmt], out: &mut Vec<(String, Span)>) {
    for s in c {
        match &s.kind {
            StmtKind::Call { proc, .. } => out.push((proc.clone(), s.span)),
            StmtKind::Cond {
                then_branch,
                else_branch,
                ..
            } => {
                collect_calls(then_branch, out);
                collect_calls(else_branch, out);
            }
            _ => {}
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::{ArgExpr, Expr};

    fn start(p: &str, q: &str) -> Stmt {
        StmtKind::Start {
            parent: p.into(),
            child: q.into(),
        }
        .into()
    }

    #[test]
    fn quicksort_header_desugars_starts() {
        let text = "processes p;\nQS(p) = if p.short then 0 else p.start q<,q=,q>; p.c -> q<.id; q=.c -> p.id; q>.c -> p.id\nmain { QS<p> }";
        let prog = parse_program(text).unwrap();
        let StmtKind::Cond {
            then_branch,
            else_branch,
            ..
        } = &prog.procedures[0].body[0].kind
        else {
            panic!("expected a conditional")
        };
        assert!(then_branch.is_empty());
        assert_eq!(
            else_branch[..3],
            [start("p", "q<"), start("p", "q="), start("p", "q>")]
        );
        assert_eq!(
            prog.main[0].kind,
            StmtKind::Call {
                proc: "QS".into(),
                args: vec![ArgExpr::name("p")]
            }
        );
    }

    #[test]
    fn free_name_not_parameter() {
        let errs = parse_program("processes p, q;\nX(p) = p.c -> q.id\nmain { X(p) }").unwrap_err();
        assert!(errs[0].message.contains("`q` is free"), "{errs:?}");
        assert_eq!(errs[0].span.line, 2);
    }

    #[test]
    fn empty_input() {
        let errs = parse_program("").unwrap_err();
        assert!(errs[0].message.contains("missing main"));
    }

    #[test]
    fn multi_selection() {
        let c = parse_choreography("p -> q1,q2[l]").unwrap();
        assert_eq!(c, parse_choreography("p -> q1[l]; p -> q2[l]").unwrap());
    }

    #[test]
    fn default_receive_and_intro() {
        let c = parse_choreography("x.c -> y; n: n' <-> w").unwrap();
        assert_eq!(
            c[0].kind,
            StmtKind::Com {
                from: "x".into(),
                expr: Expr::Cell,
                to: "y".into(),
                recv: RecvFunction::ID
            }
        );
        assert_eq!(
            c[1].kind,
            StmtKind::Intro {
                by: "n".into(),
                left: "n'".into(),
                right: "w".into()
            }
        );
    }

    #[test]
    fn definitions_end_at_next_header() {
        let text = "processes a, b;\nf(a,b) = a.c -> b.id;\ng(a,b) = f(a,b)\nmain { g<a,b> }";
        let prog = parse_program(text).unwrap();
        assert_eq!(prog.procedures.len(), 2);
        assert_eq!(prog.procedures[0].body.len(), 1);
    }

    #[test]
    fn else_is_greedy_and_parentheses_group() {
        let c =
            parse_choreography("if p.c then p.c -> q.id else p.c -> r.id; p.c -> s.id").unwrap();
        assert_eq!(c.len(), 1);
        let c =
            parse_choreography("(if p.c then p.c -> q.id else p.c -> r.id); p.c -> s.id").unwrap();
        assert_eq!(c.len(), 2);
    }

    #[test]
    fn errors_carry_positions() {
        let errs = parse_program("processes p;\nmain { p.c -> }").unwrap_err();
        assert_eq!(errs[0].span.line, 2);
        let errs = parse_program("processes p;\nX(p) = p start q\nX(p) = p start q\nmain { X(p) }")
            .unwrap_err();
        assert!(errs.iter().any(|d| d.message.contains("more than once")));
        let errs = parse_program("processes p;\nmain { p.c -> z.id }").unwrap_err();
        assert!(errs[0].message.contains("`z` is not a declared"));
    }
}
