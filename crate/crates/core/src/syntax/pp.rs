use std::collections::BTreeMap;

use super::cursor::{Cursor, PResult};
use super::terms::{call_args, expr, recv_function, value};
use crate::diag::Diagnostic;
use crate::lang::{
    Action, Adjacency, Behaviour, Name, Param, ProcessState, ProjectedProc, ProjectedProgram,
};

/// Parses a `.pp` file: an optional `adjacency` block, projected procedure
/// definitions `X_r(params) = B`, and a `network { p[v] |> B | ... }` block.
pub fn parse_projected(text: &str) -> Result<ProjectedProgram, Diagnostic> {
    let mut c = Cursor::new(text);
    let mut out = ProjectedProgram::default();
    if c.eat_keyword("adjacency") {
        c.expect("{")?;
        c.raw_dashes = true;
        let mut edges = Vec::new();
        while !c.eat("}") {
            let a = c.process_name(false)?;
            c.expect("--")?;
            let b = c.process_name(false)?;
            c.expect(";")?;
            edges.push((a, b));
        }
        c.raw_dashes = false;
        out.adjacency = Adjacency::from_edges(&edges);
    }
    loop {
        if c.eat_keyword("network") {
            c.expect("{")?;
            if !c.eat("}") {
                loop {
                    let start = c.save();
                    let name = c.process_name(false)?;
                    c.expect("[")?;
                    let cell = value(&mut c)?;
                    c.expect("]")?;
                    c.expect("|>")?;
                    let behaviour = behaviour(&mut c)?;
                    if out
                        .network
                        .processes
                        .insert(name.clone(), ProcessState { cell, behaviour })
                        .is_some()
                    {
                        return Err(Diagnostic::error(
                            format!("process `{name}` appears twice"),
                            c.span_from(start),
                        ));
                    }
                    if c.eat("}") {
                        break;
                    }
                    c.expect("|")?;
                }
            }
            if !c.at_end() {
                return c.error("unexpected input after network");
            }
            return Ok(out);
        }
        if c.at_end() {
            return c.error("missing network");
        }
        let start = c.save();
        let def = definition(&mut c)?;
        let key = def.full_name();
        if out.procedures.insert(key.clone(), def).is_some() {
            return Err(Diagnostic::error(
                format!("procedure `{key}` is defined more than once"),
                c.span_from(start),
            ));
        }
    }
}

/// Splits `X_r` at the last `_` whose suffix is one of the parameters.
pub fn split_proc_name(full: &str, params: &[Param]) -> Option<(String, Name)> {
    full.char_indices()
        .rev()
        .filter(|(_, ch)| *ch == '_')
        .find_map(|(i, _)| {
            let role = &full[i + 1..];
            params
                .iter()
                .any(|p| p.name.as_str() == role)
                .then(|| (full[..i].to_string(), Name::from(role)))
        })
}

fn definition(c: &mut Cursor) -> PResult<ProjectedProc> {
    c.skip_ws();
    let start = c.save();
    let Some(full) = c.proc_name() else {
        return c.error("expected a procedure definition or `network`");
    };
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
    let Some((base, role)) = split_proc_name(&full, &params) else {
        return Err(Diagnostic::error(
            format!("`{full}` does not end in `_r` for one of its parameters `r`"),
            c.span_from(start),
        ));
    };
    c.expect("=")?;
    let body = behaviour(c)?;
    Ok(ProjectedProc {
        base,
        role,
        params,
        body,
    })
}

fn at_behaviour_end(c: &mut Cursor) -> bool {
    if c.at_end()
        || c.at("}")
        || c.at(")")
        || c.at(",")
        || c.at_keyword("else")
        || c.at_keyword("network")
    {
        return true;
    }
    if c.at("|") && !c.starts_with("|>") {
        return true;
    }
    // the next definition `X_r(...) =`
    let start = c.save();
    let found = c.proc_name().is_some() && c.peek() == Some('(') && {
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
        c.at("=")
    };
    c.restore(start);
    found
}

/// Parses a behaviour; `0` stands for the empty sequence.
pub fn parse_behaviour(text: &str) -> Result<Behaviour, Diagnostic> {
    let mut c = Cursor::new(text);
    let b = behaviour(&mut c)?;
    if !c.at_end() {
        return c.error("unexpected input after behaviour");
    }
    Ok(b)
}

fn behaviour(c: &mut Cursor) -> PResult<Behaviour> {
    let mut out = Vec::new();
    if at_behaviour_end(c) {
        return Ok(out);
    }
    loop {
        action(c, &mut out)?;
        if !c.eat(";") || at_behaviour_end(c) {
            return Ok(out);
        }
    }
}

fn action(c: &mut Cursor, out: &mut Behaviour) -> PResult<()> {
    c.skip_ws();
    let start = c.save();
    if c.peek() == Some('0') && !c.peek_at(1).is_some_and(|ch| ch.is_ascii_digit()) {
        c.pos += 1;
        return Ok(());
    }
    if c.eat("(") {
        out.extend(behaviour(c)?);
        return c.expect(")");
    }
    if c.eat_keyword("if") {
        let guard = expr(c)?;
        c.expect_keyword("then")?;
        let then_b = behaviour(c)?;
        c.expect_keyword("else")?;
        let else_b = behaviour(c)?;
        out.push(Action::Cond {
            guard,
            then_b,
            else_b,
        });
        return Ok(());
    }
    if c.eat_keyword("start") {
        let child = c.process_name(false)?;
        c.expect("|>")?;
        let body = behaviour(c)?;
        out.push(Action::Start { child, body });
        return Ok(());
    }
    if c.eat_keyword("merge") {
        c.expect("{")?;
        let l = behaviour(c)?;
        c.expect("}")?;
        c.expect("{")?;
        let r = behaviour(c)?;
        c.expect("}")?;
        out.push(Action::Merge(l, r));
        return Ok(());
    }
    if let Some(proc) = c.proc_name() {
        if c.at_call_open() {
            let args = call_args(c)?;
            out.push(Action::Call { proc, args });
            return Ok(());
        }
    }
    c.restore(start);
    let p = c.process_name(false)?;
    if c.eat("!") {
        out.push(Action::Send {
            to: p,
            expr: expr(c)?,
        });
    } else if c.eat("?") {
        if c.eat("<") {
            let binder = c.process_name(true)?;
            c.expect(">")?;
            out.push(Action::IntroRecv { from: p, binder });
        } else {
            out.push(Action::Recv {
                from: p,
                recv: recv_function(c)?,
            });
        }
    } else if c.eat("<->") {
        let right = c.process_name(false)?;
        out.push(Action::IntroSend { left: p, right });
    } else if c.eat("(+)") {
        let label = c.expect_ident("a label")?;
        out.push(Action::Select { to: p, label });
    } else if c.eat("&") {
        c.expect("{")?;
        let mut branches = BTreeMap::new();
        loop {
            let label = c.expect_ident("a label")?;
            c.expect(":")?;
            let b = behaviour(c)?;
            if branches.insert(label.clone(), b).is_some() {
                return Err(Diagnostic::error(
                    format!("label `{label}` offered twice"),
                    c.span_from(start),
                ));
            }
            if c.eat("}") {
                break;
            }
            c.expect(",")?;
        }
        out.push(Action::Branch { from: p, branches });
    } else {
        return c.error(format!(
            "expected `!`, `?`, `<->`, `(+)` or `&` after `{p}`"
        ));
    }
    Ok(())
}
