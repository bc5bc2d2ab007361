use num_complex::Complex64;

use super::cursor::{Cursor, PResult};
use crate::lang::{ArgExpr, BinOp, Builtin, Expr, ListFn, RecvBuiltin, RecvFunction, Value, Width};

fn number_value(text: &str) -> Value {
    if text.contains(['.', 'e', 'E']) {
        Value::Float(text.parse().unwrap_or(f64::NAN))
    } else {
        text.parse()
            .map(Value::Int)
            .unwrap_or_else(|_| Value::Float(text.parse().unwrap_or(f64::NAN)))
    }
}

fn negate(v: Value) -> Value {
    match v {
        Value::Int(i) => Value::Int(-i),
        Value::Float(x) => Value::Float(-x),
        other => other,
    }
}

/// `e2pii/n`, the principal `n`-th root of unity.
fn root_literal(c: &mut Cursor) -> PResult<Option<Value>> {
    if !c.at("e2pii/") {
        return Ok(None);
    }
    c.pos += "e2pii/".len();
    let n = c.unsigned()?;
    if n == 0 {
        return c.error("root of unity of order 0");
    }
    Ok(Some(Value::root_of_unity(1, n as i64)))
}

/// Tries `re+imi` / `re-imi` with optional leading sign; restores the cursor
/// on failure.
fn complex_literal(c: &mut Cursor) -> Option<Value> {
    let start = c.save();
    let try_parse = |c: &mut Cursor| -> Option<Value> {
        let neg = c.eat("-");
        let re = c.number_text()?;
        let sign = if c.starts_with("+") {
            1.0
        } else if c.starts_with("-") {
            -1.0
        } else {
            return None;
        };
        c.pos += 1;
        let im = c.number_text()?;
        if c.peek() != Some('i') || c.peek_at(1).is_some_and(super::cursor::is_ident_char) {
            return None;
        }
        c.pos += 1;
        let re: f64 = re.parse().ok()?;
        let im: f64 = im.parse().ok()?;
        Some(Value::Complex(Complex64::new(
            if neg { -re } else { re },
            sign * im,
        )))
    };
    let v = try_parse(c);
    if v.is_none() {
        c.restore(start);
    }
    v
}

/// A value as written in state files and network cells.
pub(crate) fn value(c: &mut Cursor) -> PResult<Value> {
    c.skip_ws();
    if let Some(v) = root_literal(c)? {
        return Ok(v);
    }
    if let Some(v) = complex_literal(c) {
        return Ok(v);
    }
    if c.eat("[") {
        let mut items = Vec::new();
        if !c.eat("]") {
            loop {
                items.push(value(c)?);
                if c.eat("]") {
                    break;
                }
                c.expect(",")?;
            }
        }
        return Ok(Value::List(items));
    }
    let neg = c.eat("-");
    if let Some(t) = c.number_text() {
        let v = number_value(&t);
        return Ok(if neg { negate(v) } else { v });
    }
    if neg {
        return c.error("expected a number after `-`");
    }
    match c.ident().as_deref() {
        Some("undef") => Ok(Value::Undef),
        Some("true") => Ok(Value::Bool(true)),
        Some("false") => Ok(Value::Bool(false)),
        Some(other) => c.error(format!("unknown value `{other}`")),
        None => c.error("expected a value"),
    }
}

fn bin_op(c: &mut Cursor, level: u8) -> Option<BinOp> {
    c.skip_ws();
    let op = match (c.peek()?, c.peek_at(1)) {
        ('<', Some('-')) => return None,
        ('<', _) => BinOp::Lt,
        ('>', _) => BinOp::Gt,
        ('=', _) => BinOp::Eq,
        ('+', Some(')')) => return None,
        ('+', _) => BinOp::Add,
        ('-', Some('>')) => return None,
        ('-', _) => BinOp::Sub,
        ('*', _) => BinOp::Mul,
        ('/', _) => BinOp::Div,
        _ => return None,
    };
    if op.precedence() == level {
        c.pos += 1;
        Some(op)
    } else {
        None
    }
}

/// Expressions: comparisons over sums over products over prefix negation.
pub(crate) fn expr(c: &mut Cursor) -> PResult<Expr> {
    expr_level(c, 1)
}

fn expr_level(c: &mut Cursor, level: u8) -> PResult<Expr> {
    if level > 3 {
        return unary(c);
    }
    let mut lhs = expr_level(c, level + 1)?;
    while let Some(op) = bin_op(c, level) {
        let rhs = expr_level(c, level + 1)?;
        lhs = Expr::bin(op, lhs, rhs);
        if level == 1 {
            break;
        }
    }
    Ok(lhs)
}

fn unary(c: &mut Cursor) -> PResult<Expr> {
    c.skip_ws();
    if c.peek() == Some('-') && c.peek_at(1) != Some('>') {
        c.pos += 1;
        if c.peek().is_some_and(|ch| ch.is_ascii_digit()) {
            let t = c.number_text().unwrap_or_default();
            return Ok(Expr::Lit(negate(number_value(&t))));
        }
        return Ok(Expr::Neg(Box::new(unary(c)?)));
    }
    atom(c)
}

fn atom(c: &mut Cursor) -> PResult<Expr> {
    c.skip_ws();
    if let Some(v) = root_literal(c)? {
        return Ok(Expr::Lit(v));
    }
    if c.eat("(") {
        if let Some(v) = complex_literal(c) {
            if c.eat(")") {
                return Ok(Expr::Lit(v));
            }
            return c.error("expected `)` after complex literal");
        }
        let e = expr(c)?;
        c.expect(")")?;
        return Ok(e);
    }
    if c.eat("[") {
        let mut items = Vec::new();
        if !c.eat("]") {
            loop {
                items.push(expr(c)?);
                if c.eat("]") {
                    break;
                }
                c.expect(",")?;
            }
        }
        return Ok(Expr::ListLit(items));
    }
    if let Some(t) = c.number_text() {
        return Ok(Expr::Lit(number_value(&t)));
    }
    let start = c.save();
    let Some(id) = c.ident() else {
        return c.error("expected an expression");
    };
    match id.as_str() {
        "c" => return Ok(Expr::Cell),
        "x" => return Ok(Expr::Received),
        "true" => return Ok(Expr::Lit(Value::Bool(true))),
        "false" => return Ok(Expr::Lit(Value::Bool(false))),
        "undef" => return Ok(Expr::Lit(Value::Undef)),
        _ => {}
    }
    let Some(b) = Builtin::from_name(&id) else {
        c.restore(start);
        return c.error(format!("unknown function `{id}`"));
    };
    if c.peek() == Some('(') {
        c.pos += 1;
        let mut args = Vec::new();
        loop {
            args.push(expr(c)?);
            if c.eat(")") {
                break;
            }
            c.expect(",")?;
        }
        if args.len() != b.arity() {
            c.restore(start);
            return c.error(format!(
                "`{id}` takes {} argument(s), given {}",
                b.arity(),
                args.len()
            ));
        }
        return Ok(Expr::Apply(b, args));
    }
    if b.arity() != 1 {
        c.restore(start);
        return c.error(format!("`{id}` needs explicit arguments"));
    }
    Ok(Expr::on_cell(b))
}

/// A receive function: a named one, or an explicit body `(e)` over `c`
/// and `x`.
pub(crate) fn recv_function(c: &mut Cursor) -> PResult<RecvFunction> {
    c.skip_ws();
    if c.peek() == Some('(') {
        c.pos += 1;
        let e = expr(c)?;
        c.expect(")")?;
        return Ok(RecvFunction::Lambda(e));
    }
    let start = c.save();
    match c.ident() {
        Some(id) => match RecvBuiltin::from_name(&id) {
            Some(b) => Ok(RecvFunction::Named(b)),
            None => {
                c.restore(start);
                c.error(format!("unknown receive function `{id}`"))
            }
        },
        None => c.error("expected a receive function"),
    }
}

/// Arguments of a call, with the opening bracket already at the cursor.
pub(crate) fn call_args(c: &mut Cursor) -> PResult<Vec<ArgExpr>> {
    c.skip_ws();
    let (angle, close) = match c.bump() {
        Some('(') => (false, ")"),
        Some('<') => (true, ">"),
        _ => return c.error("expected an argument list"),
    };
    let mut args = Vec::new();
    if c.eat(close) {
        return Ok(args);
    }
    loop {
        args.push(arg_expr(c, angle)?);
        if c.eat(close) {
            return Ok(args);
        }
        c.expect(",")?;
    }
}

pub(crate) fn arg_expr(c: &mut Cursor, angle: bool) -> PResult<ArgExpr> {
    let mut lhs = arg_term(c, angle)?;
    loop {
        if c.eat("++") {
            let rhs = arg_term(c, angle)?;
            lhs = ArgExpr::Concat(Box::new(lhs), Box::new(rhs));
        } else if c.eat("\\") {
            let rhs = arg_term(c, angle)?;
            lhs = ArgExpr::Diff(Box::new(lhs), Box::new(rhs));
        } else {
            return Ok(lhs);
        }
    }
}

fn arg_term(c: &mut Cursor, angle: bool) -> PResult<ArgExpr> {
    c.skip_ws();
    if c.eat("(") {
        let a = arg_expr(c, false)?;
        c.expect(")")?;
        return Ok(a);
    }
    if c.eat("[") {
        let mut items = Vec::new();
        if !c.eat("]") {
            loop {
                items.push(ArgExpr::Name(c.process_name(false)?));
                if c.eat("]") {
                    break;
                }
                c.expect(",")?;
            }
        }
        return Ok(ArgExpr::List(items));
    }
    let start = c.save();
    if let Some(id) = c.ident() {
        if let Some(func) = ListFn::from_name(&id) {
            if c.peek() == Some('(') {
                c.pos += 1;
                let mut args = Vec::new();
                for i in 0..func.arity() {
                    if i > 0 {
                        c.expect(",")?;
                    }
                    args.push(arg_expr(c, false)?);
                }
                let mut width = None;
                if func.takes_width() && c.eat(",") {
                    width = Some(if c.eat_keyword("len") {
                        c.expect("(")?;
                        let a = arg_expr(c, false)?;
                        c.expect(")")?;
                        Width::Len(Box::new(a))
                    } else {
                        Width::Lit(c.unsigned()? as usize)
                    });
                }
                c.expect(")")?;
                return Ok(ArgExpr::Apply { func, args, width });
            }
        }
    }
    c.restore(start);
    Ok(ArgExpr::Name(c.process_name(angle)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(s: &str) -> Expr {
        let mut c = Cursor::new(s);
        let out = expr(&mut c).unwrap();
        assert!(c.at_end(), "trailing input in {s}");
        out
    }

    #[test]
    fn listing_expressions() {
        assert_eq!(
            e("fst<snd"),
            Expr::bin(
                BinOp::Lt,
                Expr::on_cell(Builtin::Fst),
                Expr::on_cell(Builtin::Snd)
            )
        );
        assert_eq!(e("short"), Expr::on_cell(Builtin::Short));
        assert_eq!(e("1"), Expr::Lit(Value::Int(1)));
        assert_eq!(e("c*x+1").to_string(), "c*x+1");
        assert_eq!(
            e("add(c, x)"),
            Expr::Apply(Builtin::Add, vec![Expr::Cell, Expr::Received])
        );
    }

    #[test]
    fn literals_round_trip() {
        for s in [
            "(-3)",
            "(-1.5)",
            "(0.5-2.0i)",
            "-(3)",
            "-c",
            "(1.0+0.0i)*c",
            "c-(1-2)",
        ] {
            let parsed = e(s);
            assert_eq!(e(&parsed.to_string()), parsed, "{s}");
        }
    }

    #[test]
    fn values() {
        let v = |s: &str| value(&mut Cursor::new(s)).unwrap();
        assert_eq!(
            v("[1, -2, 3.5]"),
            Value::list([Value::Int(1), Value::Int(-2), Value::Float(3.5)])
        );
        assert_eq!(v("0.5-2.0i"), Value::Complex(Complex64::new(0.5, -2.0)));
        assert!(v("e2pii/4").approx_eq(&Value::Complex(Complex64::new(0.0, 1.0)), 1e-12));
        assert_eq!(v("undef"), Value::Undef);
        for x in [
            Value::Float(0.1),
            Value::Complex(Complex64::new(-1e-20, 3.0)),
            Value::ints([1, 2]),
        ] {
            assert_eq!(v(&x.to_string()), x);
        }
    }

    #[test]
    fn arguments() {
        let mut c = Cursor::new("<p,q<,q=,q>>");
        let args = call_args(&mut c).unwrap();
        let shown: Vec<String> = args.iter().map(|a| a.to_string()).collect();
        assert_eq!(shown, ["p", "q<", "q=", "q>"]);
        let mut c = Cursor::new("(tl(P)++neighb(hd(P),V),V\\neighb(hd(P),V))");
        let args = call_args(&mut c).unwrap();
        assert_eq!(args[0].to_string(), "tl(P) ++ neighb(hd(P), V)");
        assert_eq!(args[1].to_string(), "V \\ neighb(hd(P), V)");
        let mut c = Cursor::new("(A, fst(B, len(A)))");
        let args = call_args(&mut c).unwrap();
        assert_eq!(args[1].to_string(), "fst(B, len(A))");
    }
}
