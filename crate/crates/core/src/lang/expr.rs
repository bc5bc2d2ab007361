use std::fmt;

use num_complex::Complex64;
use thiserror::Error;

use super::value::Value;

#[derive(Debug, Clone, PartialEq, Error)]
#[error("{message} in `{expr}`")]
pub struct EvalError {
    pub message: String,
    /// Rendering of the offending sub-expression.
    pub expr: String,
}

impl EvalError {
    fn new(message: impl Into<String>, expr: &Expr) -> Self {
        EvalError {
            message: message.into(),
            expr: expr.to_string(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Lt,
    Gt,
    Eq,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Lt => "<",
            BinOp::Gt => ">",
            BinOp::Eq => "=",
        }
    }

    pub fn precedence(self) -> u8 {
        match self {
            BinOp::Lt | BinOp::Gt | BinOp::Eq => 1,
            BinOp::Add | BinOp::Sub => 2,
            BinOp::Mul | BinOp::Div => 3,
        }
    }
}

/// The closed set of functions available to expressions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Builtin {
    Fst,
    Snd,
    Short,
    IsOne,
    Half,
    Square,
    Id,
    Length,
    RemoveSecond,
    Add,
    Append,
    Pow,
}

impl Builtin {
    pub const ALL: [Builtin; 12] = [
        Builtin::Fst,
        Builtin::Snd,
        Builtin::Short,
        Builtin::IsOne,
        Builtin::Half,
        Builtin::Square,
        Builtin::Id,
        Builtin::Length,
        Builtin::RemoveSecond,
        Builtin::Add,
        Builtin::Append,
        Builtin::Pow,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Builtin::Fst => "fst",
            Builtin::Snd => "snd",
            Builtin::Short => "short",
            Builtin::IsOne => "is_one",
            Builtin::Half => "half",
            Builtin::Square => "square",
            Builtin::Id => "id",
            Builtin::Length => "length",
            Builtin::RemoveSecond => "removeSecond",
            Builtin::Add => "add",
            Builtin::Append => "append",
            Builtin::Pow => "pow",
        }
    }

    pub fn from_name(s: &str) -> Option<Builtin> {
        Builtin::ALL.into_iter().find(|b| b.name() == s)
    }

    pub fn arity(self) -> usize {
        match self {
            Builtin::Add | Builtin::Append | Builtin::Pow => 2,
            _ => 1,
        }
    }
}

/// Expressions over the cell placeholder `c` and, inside receive
/// functions, the received value `x`.
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Cell,
    Received,
    Lit(Value),
    ListLit(Vec<Expr>),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Apply(Builtin, Vec<Expr>),
}

impl Expr {
    pub fn bin(op: BinOp, l: Expr, r: Expr) -> Expr {
        Expr::Bin(op, Box::new(l), Box::new(r))
    }

    /// A unary builtin applied to the cell, written bare as in `p.fst`.
    pub fn on_cell(b: Builtin) -> Expr {
        Expr::Apply(b, vec![Expr::Cell])
    }

    pub fn eval(&self, cell: &Value) -> Result<Value, EvalError> {
        self.eval_with(cell, None)
    }

    pub fn eval_with(&self, cell: &Value, received: Option<&Value>) -> Result<Value, EvalError> {
        match self {
            Expr::Cell => Ok(cell.clone()),
            Expr::Received => received
                .cloned()
                .ok_or_else(|| EvalError::new("`x` used outside a receive function", self)),
            Expr::Lit(v) => Ok(v.clone()),
            Expr::ListLit(items) => items
                .iter()
                .map(|e| e.eval_with(cell, received))
                .collect::<Result<_, _>>()
                .map(Value::List),
            Expr::Neg(e) => match e.eval_with(cell, received)? {
                Value::Int(i) => Ok(Value::Int(-i)),
                Value::Float(x) => Ok(Value::Float(-x)),
                Value::Complex(z) => Ok(Value::Complex(-z)),
                v => Err(EvalError::new(format!("cannot negate {v}"), self)),
            },
            Expr::Bin(op, l, r) => {
                let a = l.eval_with(cell, received)?;
                let b = r.eval_with(cell, received)?;
                binary(*op, &a, &b).map_err(|m| EvalError::new(m, self))
            }
            Expr::Apply(f, args) => {
                let vals = args
                    .iter()
                    .map(|e| e.eval_with(cell, received))
                    .collect::<Result<Vec<_>, _>>()?;
                apply_builtin(*f, &vals).map_err(|m| EvalError::new(m, self))
            }
        }
    }

    fn is_atomic(&self) -> bool {
        !matches!(self, Expr::Bin(..) | Expr::Neg(_))
    }
}

fn numeric_kind(v: &Value) -> Option<u8> {
    match v {
        Value::Int(_) => Some(0),
        Value::Float(_) => Some(1),
        Value::Complex(_) => Some(2),
        _ => None,
    }
}

fn binary(op: BinOp, a: &Value, b: &Value) -> Result<Value, String> {
    if matches!(a, Value::Undef) || matches!(b, Value::Undef) {
        return Err(format!("`{}` applied to undef", op.symbol()));
    }
    if op == BinOp::Eq {
        return Ok(Value::Bool(match (a.as_complex(), b.as_complex()) {
            (Some(x), Some(y)) => x == y,
            _ => a == b,
        }));
    }
    let (ka, kb) = match (numeric_kind(a), numeric_kind(b)) {
        (Some(x), Some(y)) => (x, y),
        _ => {
            return Err(format!(
                "`{}` expects numbers, got {a} and {b}",
                op.symbol()
            ))
        }
    };
    match op {
        BinOp::Lt | BinOp::Gt => {
            if ka == 2 || kb == 2 {
                return Err("complex numbers are not ordered".into());
            }
            let (x, y) = (a.as_f64().unwrap(), b.as_f64().unwrap());
            Ok(Value::Bool(if op == BinOp::Lt { x < y } else { x > y }))
        }
        _ if ka == 0 && kb == 0 => {
            let (Value::Int(x), Value::Int(y)) = (a, b) else {
                unreachable!()
            };
            match op {
                BinOp::Add => Ok(Value::Int(x.wrapping_add(*y))),
                BinOp::Sub => Ok(Value::Int(x.wrapping_sub(*y))),
                BinOp::Mul => Ok(Value::Int(x.wrapping_mul(*y))),
                // Integer division is true division.
                BinOp::Div if *y == 0 => Err("division by zero".into()),
                BinOp::Div => Ok(Value::Float(*x as f64 / *y as f64)),
                _ => unreachable!(),
            }
        }
        _ if ka < 2 && kb < 2 => {
            let (x, y) = (a.as_f64().unwrap(), b.as_f64().unwrap());
            match op {
                BinOp::Add => Ok(Value::Float(x + y)),
                BinOp::Sub => Ok(Value::Float(x - y)),
                BinOp::Mul => Ok(Value::Float(x * y)),
                BinOp::Div if y == 0.0 => Err("division by zero".into()),
                BinOp::Div => Ok(Value::Float(x / y)),
                _ => unreachable!(),
            }
        }
        _ => {
            let (x, y) = (a.as_complex().unwrap(), b.as_complex().unwrap());
            match op {
                BinOp::Add => Ok(Value::Complex(x + y)),
                BinOp::Sub => Ok(Value::Complex(x - y)),
                BinOp::Mul => Ok(Value::Complex(x * y)),
                BinOp::Div if y == Complex64::new(0.0, 0.0) => Err("division by zero".into()),
                BinOp::Div => Ok(Value::Complex(x / y)),
                _ => unreachable!(),
            }
        }
    }
}

/// List builtins read an undefined cell as the empty list.
fn as_list<'a>(f: Builtin, v: &'a Value) -> Result<&'a [Value], String> {
    match v {
        Value::List(items) => Ok(items),
        Value::Undef => Ok(&[]),
        other => Err(format!("`{}` expects a list, got {other}", f.name())),
    }
}

fn pow(base: &Value, exp: &Value) -> Result<Value, String> {
    let Value::Int(e) = exp else {
        return Err(format!("`pow` expects an integer exponent, got {exp}"));
    };
    let e = i32::try_from(*e).map_err(|_| "exponent out of range".to_string())?;
    match base {
        Value::Int(b) if e >= 0 => Ok(Value::Int(b.wrapping_pow(e as u32))),
        Value::Int(b) => Ok(Value::Float((*b as f64).powi(e))),
        Value::Float(b) => Ok(Value::Float(b.powi(e))),
        Value::Complex(z) => Ok(Value::Complex(z.powi(e))),
        v => Err(format!("`pow` expects a number, got {v}")),
    }
}

fn apply_builtin(f: Builtin, args: &[Value]) -> Result<Value, String> {
    if args.len() != f.arity() {
        return Err(format!(
            "`{}` takes {} argument(s), got {}",
            f.name(),
            f.arity(),
            args.len()
        ));
    }
    let a = &args[0];
    match f {
        Builtin::Fst | Builtin::Snd => {
            let idx = if f == Builtin::Fst { 0 } else { 1 };
            as_list(f, a)?.get(idx).cloned().ok_or_else(|| {
                format!(
                    "`{}` of a list with fewer than {} element(s)",
                    f.name(),
                    idx + 1
                )
            })
        }
        Builtin::Short => Ok(Value::Bool(as_list(f, a)?.len() <= 1)),
        Builtin::Length => Ok(Value::Int(as_list(f, a)?.len() as i64)),
        Builtin::RemoveSecond => {
            let items = as_list(f, a)?;
            if items.len() < 2 {
                return Err("`removeSecond` of a list with fewer than 2 elements".into());
            }
            let mut out = items.to_vec();
            out.remove(1);
            Ok(Value::List(out))
        }
        Builtin::IsOne => match a {
            Value::Int(i) => Ok(Value::Bool(*i == 1)),
            Value::Float(x) => Ok(Value::Bool(*x == 1.0)),
            v => Err(format!("`is_one` expects a number, got {v}")),
        },
        Builtin::Half => match a {
            Value::Int(i) => Ok(Value::Int(i / 2)),
            Value::Float(x) => Ok(Value::Float(x / 2.0)),
            v => Err(format!("`half` expects a number, got {v}")),
        },
        Builtin::Square => binary(BinOp::Mul, a, a),
        Builtin::Id => Ok(a.clone()),
        Builtin::Add if numeric_kind(a).is_some() && numeric_kind(&args[1]).is_some() => {
            binary(BinOp::Add, a, &args[1])
        }
        Builtin::Add => {
            let mut out = as_list(f, a)?.to_vec();
            out.push(args[1].clone());
            Ok(Value::List(out))
        }
        Builtin::Append => {
            let mut out = as_list(f, a)?.to_vec();
            out.extend_from_slice(as_list(f, &args[1])?);
            Ok(Value::List(out))
        }
        Builtin::Pow => pow(a, &args[1]),
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Cell => f.write_str("c"),
            Expr::Received => f.write_str("x"),
            Expr::Lit(Value::Complex(z)) => write!(f, "({})", Value::Complex(*z)),
            Expr::Lit(Value::Int(i)) if *i < 0 => write!(f, "({i})"),
            Expr::Lit(Value::Float(x)) if *x < 0.0 => write!(f, "({x:?})"),
            Expr::Lit(v) => write!(f, "{v}"),
            Expr::ListLit(items) => {
                f.write_str("[")?;
                for (i, e) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{e}")?;
                }
                f.write_str("]")
            }
            Expr::Neg(e) if e.is_atomic() && !matches!(**e, Expr::Lit(_)) => write!(f, "-{e}"),
            Expr::Neg(e) => write!(f, "-({e})"),
            Expr::Bin(op, l, r) => {
                let wrap = |e: &Expr, strict: bool| match e {
                    Expr::Bin(o, ..) if o.precedence() < op.precedence() => true,
                    Expr::Bin(o, ..) => strict && o.precedence() == op.precedence(),
                    _ => false,
                };
                if wrap(l, false) {
                    write!(f, "({l})")?;
                } else {
                    write!(f, "{l}")?;
                }
                write!(f, "{}", op.symbol())?;
                if wrap(r, true) {
                    write!(f, "({r})")
                } else {
                    write!(f, "{r}")
                }
            }
            Expr::Apply(b, args) if b.arity() == 1 && args.len() == 1 && args[0] == Expr::Cell => {
                f.write_str(b.name())
            }
            Expr::Apply(b, args) => {
                write!(f, "{}(", b.name())?;
                for (i, e) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{e}")?;
                }
                f.write_str(")")
            }
        }
    }
}

/// Named receive functions used in the listings.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RecvBuiltin {
    Id,
    Add,
    Append,
    Mult,
    Div,
    Minus,
    Pow,
    RemoveSecond,
}

impl RecvBuiltin {
    pub const ALL: [RecvBuiltin; 8] = [
        RecvBuiltin::Id,
        RecvBuiltin::Add,
        RecvBuiltin::Append,
        RecvBuiltin::Mult,
        RecvBuiltin::Div,
        RecvBuiltin::Minus,
        RecvBuiltin::Pow,
        RecvBuiltin::RemoveSecond,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RecvBuiltin::Id => "id",
            RecvBuiltin::Add => "add",
            RecvBuiltin::Append => "append",
            RecvBuiltin::Mult => "mult",
            RecvBuiltin::Div => "div",
            RecvBuiltin::Minus => "minus",
            RecvBuiltin::Pow => "pow",
            RecvBuiltin::RemoveSecond => "removeSecond",
        }
    }

    pub fn from_name(s: &str) -> Option<RecvBuiltin> {
        RecvBuiltin::ALL.into_iter().find(|b| b.name() == s)
    }

    /// The body `e'` of the function `\x.e'`.
    pub fn body(self) -> Expr {
        let (c, x) = (Expr::Cell, Expr::Received);
        match self {
            RecvBuiltin::Id => x,
            RecvBuiltin::Add => Expr::Apply(Builtin::Add, vec![c, x]),
            RecvBuiltin::Append => Expr::Apply(Builtin::Append, vec![c, x]),
            RecvBuiltin::Mult => Expr::bin(BinOp::Mul, c, x),
            RecvBuiltin::Div => Expr::bin(BinOp::Div, c, x),
            RecvBuiltin::Minus => Expr::bin(BinOp::Sub, c, x),
            RecvBuiltin::Pow => Expr::Apply(Builtin::Pow, vec![c, x]),
            RecvBuiltin::RemoveSecond => Expr::Apply(Builtin::RemoveSecond, vec![x]),
        }
    }
}

/// A receive function `\x.e'`, either one of the named ones or an explicit
/// body written `(e')`.
#[derive(Clone, Debug, PartialEq)]
pub enum RecvFunction {
    Named(RecvBuiltin),
    Lambda(Expr),
}

impl RecvFunction {
    pub const ID: RecvFunction = RecvFunction::Named(RecvBuiltin::Id);

    pub fn apply(&self, cell: &Value, received: &Value) -> Result<Value, EvalError> {
        match self {
            RecvFunction::Named(b) => b.body().eval_with(cell, Some(received)),
            RecvFunction::Lambda(e) => e.eval_with(cell, Some(received)),
        }
    }
}

impl fmt::Display for RecvFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RecvFunction::Named(b) => f.write_str(b.name()),
            RecvFunction::Lambda(e) => write!(f, "({e})"),
        }
    }
}

/// Evaluates `e` against a cell value.
pub fn eval_expr(e: &Expr, cell: &Value) -> Result<Value, EvalError> {
    e.eval(cell)
}

/// The receiver's new cell after getting `received`.
pub fn apply_recv(f: &RecvFunction, cell: &Value, received: &Value) -> Result<Value, EvalError> {
    f.apply(cell, received)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn placeholder() {
        assert_eq!(
            eval_expr(&Expr::Cell, &Value::Int(5)).unwrap(),
            Value::Int(5)
        );
    }

    #[test]
    fn short_singleton() {
        assert_eq!(
            eval_expr(&Expr::on_cell(Builtin::Short), &Value::ints([3])).unwrap(),
            Value::Bool(true)
        );
        assert_eq!(
            eval_expr(&Expr::on_cell(Builtin::Short), &Value::ints([3, 4])).unwrap(),
            Value::Bool(false)
        );
    }

    #[test]
    fn fst_lt_snd() {
        let e = Expr::bin(
            BinOp::Lt,
            Expr::on_cell(Builtin::Fst),
            Expr::on_cell(Builtin::Snd),
        );
        assert_eq!(
            eval_expr(&e, &Value::ints([4, 9])).unwrap(),
            Value::Bool(true)
        );
        assert_eq!(e.to_string(), "fst<snd");
    }

    #[test]
    fn receive_functions() {
        let id = RecvFunction::ID;
        assert_eq!(
            apply_recv(&id, &Value::Int(7), &Value::ints([1, 2])).unwrap(),
            Value::ints([1, 2])
        );
        let add = RecvFunction::Named(RecvBuiltin::Add);
        assert_eq!(
            apply_recv(&add, &Value::ints([1]), &Value::Int(2)).unwrap(),
            Value::ints([1, 2])
        );
        let div = RecvFunction::Named(RecvBuiltin::Div);
        assert_eq!(
            apply_recv(&div, &Value::Float(6.0), &Value::Float(2.0)).unwrap(),
            Value::Float(3.0)
        );
        let rs = RecvFunction::Named(RecvBuiltin::RemoveSecond);
        assert_eq!(
            apply_recv(&rs, &Value::Undef, &Value::ints([1, 2, 3])).unwrap(),
            Value::ints([1, 3])
        );
    }

    #[test]
    fn errors_name_the_subexpression() {
        let e = Expr::on_cell(Builtin::Fst);
        let err = eval_expr(&e, &Value::List(vec![])).unwrap_err();
        assert_eq!(err.expr, "fst");
        let err = eval_expr(
            &Expr::bin(BinOp::Add, Expr::Cell, Expr::Lit(Value::Int(1))),
            &Value::Undef,
        )
        .unwrap_err();
        assert!(err.message.contains("undef"));
        let err = eval_expr(
            &Expr::bin(BinOp::Div, Expr::Cell, Expr::Lit(Value::Float(0.0))),
            &Value::Float(1.0),
        )
        .unwrap_err();
        assert!(err.message.contains("division by zero"));
    }

    #[test]
    fn undefined_cells_are_empty_lists() {
        let add = RecvFunction::Named(RecvBuiltin::Add);
        assert_eq!(
            apply_recv(&add, &Value::Undef, &Value::Int(2)).unwrap(),
            Value::ints([2])
        );
        assert_eq!(
            eval_expr(&Expr::on_cell(Builtin::Short), &Value::Undef).unwrap(),
            Value::Bool(true)
        );
    }

    #[test]
    fn add_on_numbers_is_addition() {
        let add = RecvFunction::Named(RecvBuiltin::Add);
        assert_eq!(
            apply_recv(&add, &Value::Int(1), &Value::Int(2)).unwrap(),
            Value::Int(3)
        );
    }

    #[test]
    fn complex_power() {
        let w = Value::root_of_unity(1, 4);
        let v = apply_recv(&RecvFunction::Named(RecvBuiltin::Pow), &w, &Value::Int(2)).unwrap();
        assert!(v.approx_eq(&Value::Float(-1.0), 1e-12));
    }

    #[test]
    fn deterministic() {
        let e = Expr::on_cell(Builtin::Square);
        let v = Value::root_of_unity(1, 8);
        assert_eq!(eval_expr(&e, &v).unwrap(), eval_expr(&e, &v).unwrap());
    }
}
