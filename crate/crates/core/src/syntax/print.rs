use std::fmt::Write;

use crate::lang::{
    Action, Adjacency, ArgExpr, ProjectedProc, ProjectedProgram, SourceProgram, Stmt, StmtKind,
};

fn args(a: &[ArgExpr]) -> String {
    a.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

fn pad(n: usize) -> String {
    " ".repeat(n)
}

/// Prints a choreography, one statement per line at the given indent.
pub fn print_choreography(c: &[Stmt], indent: usize) -> String {
    if c.is_empty() {
        return "0".to_string();
    }
    let mut parts = Vec::new();
    for (i, s) in c.iter().enumerate() {
        let last = i + 1 == c.len();
        parts.push(print_stmt(s, indent, last));
    }
    parts.join(&format!(";\n{}", pad(indent)))
}

fn print_stmt(s: &Stmt, indent: usize, last: bool) -> String {
    match &s.kind {
        StmtKind::Com {
            from,
            expr,
            to,
            recv,
        } => format!("{from}.{expr} -> {to}.{recv}"),
        StmtKind::Sel { from, to, label } => format!("{from} -> {to}[{label}]"),
        StmtKind::Start { parent, child } => format!("{parent} start {child}"),
        StmtKind::Intro { by, left, right } => format!("{by}: {left} <-> {right}"),
        StmtKind::Call { proc, args: a } => format!("{proc}({})", args(a)),
        StmtKind::Cond {
            decider,
            guard,
            then_branch,
            else_branch,
        } => {
            let (open, inner) = if last {
                ("", indent)
            } else {
                ("(", indent + 1)
            };
            let body = inner + 5;
            let text = format!(
                "{open}if {decider}.{guard}\n{p}then {}\n{p}else {}",
                print_choreography(then_branch, body),
                print_choreography(else_branch, body),
                p = pad(inner),
            );
            if last {
                text
            } else {
                format!("{text})")
            }
        }
    }
}

fn edge_block(keyword: &str, edges: &[(crate::lang::Name, crate::lang::Name)], out: &mut String) {
    let _ = writeln!(out, "{keyword} {{");
    for (a, b) in edges {
        let _ = writeln!(out, "  {a} -- {b};");
    }
    out.push_str("}\n");
}

/// Canonical text of a program; parsing it gives back an equal AST.
pub fn pretty_print(prog: &SourceProgram) -> String {
    let mut out = String::new();
    if !prog.processes.is_empty() {
        let names: Vec<String> = prog.processes.iter().map(|p| p.to_string()).collect();
        let _ = writeln!(out, "processes {};", names.join(", "));
    }
    for (name, items) in &prog.lists {
        let items: Vec<String> = items.iter().map(|n| n.to_string()).collect();
        let _ = writeln!(out, "list {name} = [{}];", items.join(", "));
    }
    if let Some(g) = &prog.graph {
        edge_block("graph", g, &mut out);
    }
    if let Some(a) = &prog.adjacency {
        edge_block("adjacency", a, &mut out);
    }
    for d in &prog.procedures {
        let params: Vec<String> = d.params.iter().map(|p| p.name.to_string()).collect();
        let _ = writeln!(
            out,
            "\n{}({}) =\n  {}",
            d.name,
            params.join(", "),
            print_choreography(&d.body, 2)
        );
    }
    let _ = writeln!(
        out,
        "\nmain {{\n  {}\n}}",
        print_choreography(&prog.main, 2)
    );
    out
}

/// Prints a behaviour on one line.
pub fn print_behaviour(b: &[Action]) -> String {
    if b.is_empty() {
        return "0".to_string();
    }
    let mut parts = Vec::new();
    for (i, a) in b.iter().enumerate() {
        parts.push(print_action(a, i + 1 == b.len()));
    }
    parts.join("; ")
}

fn print_action(a: &Action, last: bool) -> String {
    let group = |s: String| if last { s } else { format!("({s})") };
    match a {
        Action::Send { to, expr } => format!("{to}!{expr}"),
        Action::Recv { from, recv } => format!("{from}?{recv}"),
        Action::IntroSend { left, right } => format!("{left} <-> {right}"),
        Action::IntroRecv { from, binder } => format!("{from}?<{binder}>"),
        Action::Select { to, label } => format!("{to}(+){label}"),
        Action::Branch { from, branches } => {
            let items: Vec<String> = branches
                .iter()
                .map(|(l, b)| format!("{l}: {}", print_behaviour(b)))
                .collect();
            format!("{from}&{{{}}}", items.join(", "))
        }
        Action::Start { child, body } => {
            group(format!("start {child} |> {}", print_behaviour(body)))
        }
        Action::Cond {
            guard,
            then_b,
            else_b,
        } => group(format!(
            "if {guard} then {} else {}",
            print_behaviour(then_b),
            print_behaviour(else_b)
        )),
        Action::Call { proc, args: a } => format!("{proc}({})", args(a)),
        Action::Merge(l, r) => format!(
            "merge {{{}}} {{{}}}",
            print_behaviour(l),
            print_behaviour(r)
        ),
    }
}

pub fn print_projected_proc(p: &ProjectedProc) -> String {
    let params: Vec<String> = p.params.iter().map(|p| p.name.to_string()).collect();
    format!(
        "{}({}) = {}",
        p.full_name(),
        params.join(", "),
        print_behaviour(&p.body)
    )
}

/// The `.pp` text of a projected program.
pub fn print_projected(prog: &ProjectedProgram) -> String {
    let mut out = String::new();
    if !prog.adjacency.is_empty() {
        edge_block("adjacency", &prog.adjacency.edges(), &mut out);
        out.push('\n');
    }
    for p in prog.procedures.values() {
        out.push_str(&print_projected_proc(p));
        out.push_str("\n\n");
    }
    out.push_str("network {\n");
    for (i, (name, st)) in prog.network.processes.iter().enumerate() {
        let sep = if i == 0 { "  " } else { "| " };
        let _ = writeln!(
            out,
            "{sep}{name}[{}] |> {}",
            st.cell,
            print_behaviour(&st.behaviour)
        );
    }
    out.push_str("}\n");
    out
}

pub fn print_adjacency(adj: &Adjacency) -> String {
    let mut out = String::new();
    edge_block("adjacency", &adj.edges(), &mut out);
    out
}
