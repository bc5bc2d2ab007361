use std::fmt;

use num_complex::Complex64;

/// Contents of a process memory cell.
#[derive(Clone, Debug, PartialEq, Default)]
pub enum Value {
    #[default]
    Undef,
    Bool(bool),
    Int(i64),
    Float(f64),
    Complex(Complex64),
    /// Only produced for trace rendering, never stored in a cell.
    Label(String),
    List(Vec<Value>),
}

impl Value {
    pub fn list<I: IntoIterator<Item = Value>>(items: I) -> Value {
        Value::List(items.into_iter().collect())
    }

    pub fn ints<I: IntoIterator<Item = i64>>(items: I) -> Value {
        Value::List(items.into_iter().map(Value::Int).collect())
    }

    /// `e^(2*pi*i*k/n)`.
    pub fn root_of_unity(k: i64, n: i64) -> Value {
        let theta = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
        Value::Complex(Complex64::from_polar(1.0, theta))
    }

    pub fn as_complex(&self) -> Option<Complex64> {
        match self {
            Value::Int(i) => Some(Complex64::new(*i as f64, 0.0)),
            Value::Float(x) => Some(Complex64::new(*x, 0.0)),
            Value::Complex(z) => Some(*z),
            _ => None,
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Value::Int(i) => Some(*i as f64),
            Value::Float(x) => Some(*x),
            _ => None,
        }
    }

    /// Structural equality with numeric leaves compared within `tol`.
    pub fn approx_eq(&self, other: &Value, tol: f64) -> bool {
        match (self, other) {
            (Value::List(a), Value::List(b)) => {
                a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.approx_eq(y, tol))
            }
            (Value::Int(a), Value::Int(b)) => a == b,
            (a, b) => match (a.as_complex(), b.as_complex()) {
                (Some(x), Some(y)) => (x - y).norm() <= tol,
                _ => a == b,
            },
        }
    }
}

fn write_float(f: &mut fmt::Formatter<'_>, x: f64) -> fmt::Result {
    // Debug gives the shortest round-trip text and always keeps a `.0`.
    write!(f, "{x:?}")
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Undef => f.write_str("undef"),
            Value::Bool(b) => write!(f, "{b}"),
            Value::Int(i) => write!(f, "{i}"),
            Value::Float(x) => write_float(f, *x),
            Value::Complex(z) => {
                write_float(f, z.re)?;
                if z.im.is_sign_negative() {
                    f.write_str("-")?;
                    write_float(f, -z.im)?;
                } else {
                    f.write_str("+")?;
                    write_float(f, z.im)?;
                }
                f.write_str("i")
            }
            Value::Label(l) => f.write_str(l),
            Value::List(items) => {
                f.write_str("[")?;
                for (i, v) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{v}")?;
                }
                f.write_str("]")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rendering() {
        assert_eq!(Value::Float(1.0).to_string(), "1.0");
        assert_eq!(
            Value::Complex(Complex64::new(0.5, -2.0)).to_string(),
            "0.5-2.0i"
        );
        assert_eq!(Value::ints([1, 2]).to_string(), "[1, 2]");
        assert_eq!(Value::Undef.to_string(), "undef");
    }

    #[test]
    fn tolerance() {
        let a = Value::Complex(Complex64::new(1.0, 1e-12));
        assert!(a.approx_eq(&Value::Float(1.0), 1e-9));
        assert!(!Value::Int(1).approx_eq(&Value::Int(2), 1.0));
    }
}
