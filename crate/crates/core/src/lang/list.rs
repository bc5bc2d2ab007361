use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use super::name::{Name, ParamKind};

#[derive(Debug, Clone, PartialEq, Error)]
#[error("{message} in `{expr}`")]
pub struct ListError {
    pub message: String,
    pub expr: String,
}

/// Functions over process lists usable in call arguments.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ListFn {
    Hd,
    Tl,
    /// First row of a row-major matrix.
    Fst,
    /// Matrix without its first row.
    Rest,
    /// Matrix without its first row and first column.
    Minor,
    Even,
    Odd,
    Half1,
    Half2,
    Join,
    Neighb,
}

impl ListFn {
    pub const ALL: [ListFn; 11] = [
        ListFn::Hd,
        ListFn::Tl,
        ListFn::Fst,
        ListFn::Rest,
        ListFn::Minor,
        ListFn::Even,
        ListFn::Odd,
        ListFn::Half1,
        ListFn::Half2,
        ListFn::Join,
        ListFn::Neighb,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ListFn::Hd => "hd",
            ListFn::Tl => "tl",
            ListFn::Fst => "fst",
            ListFn::Rest => "rest",
            ListFn::Minor => "minor",
            ListFn::Even => "even",
            ListFn::Odd => "odd",
            ListFn::Half1 => "half1",
            ListFn::Half2 => "half2",
            ListFn::Join => "join",
            ListFn::Neighb => "neighb",
        }
    }

    pub fn from_name(s: &str) -> Option<ListFn> {
        ListFn::ALL.into_iter().find(|f| f.name() == s)
    }

    pub fn arity(self) -> usize {
        match self {
            ListFn::Join | ListFn::Neighb => 2,
            _ => 1,
        }
    }

    pub fn takes_width(self) -> bool {
        matches!(self, ListFn::Fst | ListFn::Rest | ListFn::Minor)
    }
}

/// Row width argument of the matrix functions.
#[derive(Clone, Debug, PartialEq)]
pub enum Width {
    Lit(usize),
    Len(Box<ArgExpr>),
}

/// A procedure-call argument.
#[derive(Clone, Debug, PartialEq)]
pub enum ArgExpr {
    Name(Name),
    List(Vec<ArgExpr>),
    Apply {
        func: ListFn,
        args: Vec<ArgExpr>,
        width: Option<Width>,
    },
    Concat(Box<ArgExpr>, Box<ArgExpr>),
    Diff(Box<ArgExpr>, Box<ArgExpr>),
}

/// An evaluated argument.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ArgValue {
    One(Name),
    Many(Vec<Name>),
}

impl ArgValue {
    pub fn names(&self) -> &[Name] {
        match self {
            ArgValue::One(n) => std::slice::from_ref(n),
            ArgValue::Many(ns) => ns,
        }
    }

    pub fn contains(&self, n: &Name) -> bool {
        self.names().contains(n)
    }

    pub fn to_arg(&self) -> ArgExpr {
        match self {
            ArgValue::One(n) => ArgExpr::Name(n.clone()),
            ArgValue::Many(ns) => ArgExpr::List(ns.iter().cloned().map(ArgExpr::Name).collect()),
        }
    }
}

impl fmt::Display for ArgValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_arg())
    }
}

/// The static graph consulted by `neighb`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Adjacency {
    edges: BTreeMap<Name, BTreeSet<Name>>,
}

impl Adjacency {
    pub fn from_edges<'a, I: IntoIterator<Item = &'a (Name, Name)>>(edges: I) -> Self {
        let mut adj = Adjacency::default();
        for (a, b) in edges {
            adj.add(a.clone(), b.clone());
        }
        adj
    }

    pub fn add(&mut self, a: Name, b: Name) {
        self.edges.entry(a.clone()).or_default().insert(b.clone());
        self.edges.entry(b).or_default().insert(a);
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn adjacent(&self, a: &Name, b: &Name) -> bool {
        self.edges.get(a).is_some_and(|s| s.contains(b))
    }

    /// Each undirected edge once, smaller endpoint first.
    pub fn edges(&self) -> Vec<(Name, Name)> {
        let mut out = Vec::new();
        for (a, bs) in &self.edges {
            for b in bs {
                if a < b {
                    out.push((a.clone(), b.clone()));
                }
            }
        }
        out
    }
}

impl ArgExpr {
    pub fn name(s: &str) -> ArgExpr {
        ArgExpr::Name(Name::from(s))
    }

    pub fn apply(func: ListFn, args: Vec<ArgExpr>) -> ArgExpr {
        ArgExpr::Apply {
            func,
            args,
            width: None,
        }
    }

    pub fn names(ns: &[Name]) -> ArgExpr {
        ArgExpr::List(ns.iter().cloned().map(ArgExpr::Name).collect())
    }

    /// Static kind, given the kinds of the names in scope (unknown names are
    /// single processes).
    pub fn kind(&self, lookup: &dyn Fn(&Name) -> Option<ParamKind>) -> ParamKind {
        match self {
            ArgExpr::Name(n) => lookup(n).unwrap_or(ParamKind::Single),
            ArgExpr::Apply {
                func: ListFn::Hd, ..
            } => ParamKind::Single,
            _ => ParamKind::List,
        }
    }

    pub fn free_names(&self, out: &mut BTreeSet<Name>) {
        match self {
            ArgExpr::Name(n) => {
                out.insert(n.clone());
            }
            ArgExpr::List(items) => items.iter().for_each(|a| a.free_names(out)),
            ArgExpr::Apply { args, width, .. } => {
                args.iter().for_each(|a| a.free_names(out));
                if let Some(Width::Len(a)) = width {
                    a.free_names(out);
                }
            }
            ArgExpr::Concat(a, b) | ArgExpr::Diff(a, b) => {
                a.free_names(out);
                b.free_names(out);
            }
        }
    }

    /// Names whose elements the argument may denote: `hd(A)` and `tl(A)`
    /// draw from `A`, `neighb(p, V)` from `V`, `L \ M` from `L`.
    pub fn support(&self, out: &mut BTreeSet<Name>) {
        match self {
            ArgExpr::Name(n) => {
                out.insert(n.clone());
            }
            ArgExpr::List(items) => items.iter().for_each(|x| x.support(out)),
            ArgExpr::Apply {
                func: ListFn::Neighb,
                args,
                ..
            } => args[1].support(out),
            ArgExpr::Apply {
                func: ListFn::Join,
                args,
                ..
            } => args.iter().for_each(|x| x.support(out)),
            ArgExpr::Apply { args, .. } => args[0].support(out),
            ArgExpr::Concat(l, r) => {
                l.support(out);
                r.support(out);
            }
            ArgExpr::Diff(l, _) => l.support(out),
        }
    }

    pub fn mentions(&self, n: &Name) -> bool {
        let mut s = BTreeSet::new();
        self.free_names(&mut s);
        s.contains(n)
    }

    pub fn subst(&self, f: &dyn Fn(&Name) -> Option<ArgExpr>) -> ArgExpr {
        match self {
            ArgExpr::Name(n) => f(n).unwrap_or_else(|| self.clone()),
            ArgExpr::List(items) => ArgExpr::List(items.iter().map(|a| a.subst(f)).collect()),
            ArgExpr::Apply { func, args, width } => ArgExpr::Apply {
                func: *func,
                args: args.iter().map(|a| a.subst(f)).collect(),
                width: width.as_ref().map(|w| match w {
                    Width::Lit(k) => Width::Lit(*k),
                    Width::Len(a) => Width::Len(Box::new(a.subst(f))),
                }),
            },
            ArgExpr::Concat(a, b) => ArgExpr::Concat(Box::new(a.subst(f)), Box::new(b.subst(f))),
            ArgExpr::Diff(a, b) => ArgExpr::Diff(Box::new(a.subst(f)), Box::new(b.subst(f))),
        }
    }

    pub fn rename(&self, f: &dyn Fn(&Name) -> Option<Name>) -> ArgExpr {
        self.subst(&|n| f(n).map(ArgExpr::Name))
    }

    fn err(&self, message: impl Into<String>) -> ListError {
        ListError {
            message: message.into(),
            expr: self.to_string(),
        }
    }

    /// Evaluates the argument. Names bound by `env` take their bound value;
    /// any other name denotes the process of that name.
    pub fn eval(
        &self,
        env: &dyn Fn(&Name) -> Option<ArgValue>,
        adj: &Adjacency,
    ) -> Result<ArgValue, ListError> {
        match self {
            ArgExpr::Name(n) => Ok(env(n).unwrap_or_else(|| ArgValue::One(n.clone()))),
            ArgExpr::List(items) => {
                let mut out = Vec::with_capacity(items.len());
                for it in items {
                    match it.eval(env, adj)? {
                        ArgValue::One(n) => out.push(n),
                        ArgValue::Many(_) => {
                            return Err(self.err("list literal elements must be single processes"))
                        }
                    }
                }
                Ok(ArgValue::Many(out))
            }
            ArgExpr::Concat(a, b) => {
                let mut l = self.list_of(a, env, adj)?;
                l.extend(self.list_of(b, env, adj)?);
                Ok(ArgValue::Many(l))
            }
            ArgExpr::Diff(a, b) => {
                let l = self.list_of(a, env, adj)?;
                let r = self.list_of(b, env, adj)?;
                Ok(ArgValue::Many(
                    l.into_iter().filter(|n| !r.contains(n)).collect(),
                ))
            }
            ArgExpr::Apply { func, args, width } => {
                if args.len() != func.arity() {
                    return Err(self.err(format!(
                        "`{}` takes {} argument(s)",
                        func.name(),
                        func.arity()
                    )));
                }
                if *func == ListFn::Neighb {
                    let p = match args[0].eval(env, adj)? {
                        ArgValue::One(p) => p,
                        ArgValue::Many(_) => {
                            return Err(self.err("`neighb` expects a single process first"))
                        }
                    };
                    let vs = self.list_of(&args[1], env, adj)?;
                    return Ok(ArgValue::Many(
                        vs.into_iter().filter(|v| adj.adjacent(&p, v)).collect(),
                    ));
                }
                let l = self.list_of(&args[0], env, adj)?;
                let w = match width {
                    None => None,
                    Some(Width::Lit(k)) => Some(*k),
                    Some(Width::Len(a)) => Some(self.list_of(a, env, adj)?.len()),
                };
                self.apply_fn(*func, l, args, w, env, adj)
            }
        }
    }

    fn list_of(
        &self,
        a: &ArgExpr,
        env: &dyn Fn(&Name) -> Option<ArgValue>,
        adj: &Adjacency,
    ) -> Result<Vec<Name>, ListError> {
        match a.eval(env, adj)? {
            ArgValue::Many(l) => Ok(l),
            ArgValue::One(n) => {
                Err(self.err(format!("expected a process list, got the process {n}")))
            }
        }
    }

    fn apply_fn(
        &self,
        func: ListFn,
        l: Vec<Name>,
        args: &[ArgExpr],
        width: Option<usize>,
        env: &dyn Fn(&Name) -> Option<ArgValue>,
        adj: &Adjacency,
    ) -> Result<ArgValue, ListError> {
        let many = |v: Vec<Name>| Ok(ArgValue::Many(v));
        match func {
            ListFn::Hd => l
                .into_iter()
                .next()
                .map(ArgValue::One)
                .ok_or_else(|| self.err("`hd` of an empty list")),
            ListFn::Tl => {
                if l.is_empty() {
                    return Err(self.err("`tl` of an empty list"));
                }
                many(l[1..].to_vec())
            }
            ListFn::Even => many(l.into_iter().step_by(2).collect()),
            ListFn::Odd => many(l.into_iter().skip(1).step_by(2).collect()),
            ListFn::Half1 | ListFn::Half2 => {
                if l.len() % 2 != 0 {
                    return Err(self.err("cannot halve a list of odd length"));
                }
                let mid = l.len() / 2;
                many(if func == ListFn::Half1 {
                    l[..mid].to_vec()
                } else {
                    l[mid..].to_vec()
                })
            }
            ListFn::Join => {
                let mut out = l;
                out.extend(self.list_of(&args[1], env, adj)?);
                many(out)
            }
            ListFn::Fst | ListFn::Rest | ListFn::Minor => {
                let w = match width {
                    Some(w) => w,
                    None => augmented_width(l.len()).ok_or_else(|| {
                        self.err(format!(
                            "cannot infer the row width of a {}-element matrix",
                            l.len()
                        ))
                    })?,
                };
                if w == 0 || l.len() % w != 0 {
                    return Err(self.err(format!(
                        "row width {w} does not divide list length {}",
                        l.len()
                    )));
                }
                match func {
                    ListFn::Fst => many(l[..w.min(l.len())].to_vec()),
                    ListFn::Rest => many(l[w.min(l.len())..].to_vec()),
                    _ => many(
                        l.chunks(w)
                            .skip(1)
                            .flat_map(|row| row[1..].iter().cloned())
                            .collect(),
                    ),
                }
            }
            ListFn::Neighb => unreachable!(),
        }
    }
}

/// Row width `n+1` of an `n x (n+1)` matrix with `len` entries.
fn augmented_width(len: usize) -> Option<usize> {
    if len == 0 {
        return Some(1);
    }
    (1..=len)
        .take_while(|n| n * (n + 1) <= len)
        .find(|n| n * (n + 1) == len)
        .map(|n| n + 1)
}

/// Evaluates a call argument under a parameter environment.
pub fn eval_list_expr(
    a: &ArgExpr,
    env: &BTreeMap<Name, ArgValue>,
    adj: &Adjacency,
) -> Result<ArgValue, ListError> {
    a.eval(&|n| env.get(n).cloned(), adj)
}

impl fmt::Display for Width {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Width::Lit(k) => write!(f, "{k}"),
            Width::Len(a) => write!(f, "len({a})"),
        }
    }
}

impl fmt::Display for ArgExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ArgExpr::Name(n) => write!(f, "{n}"),
            ArgExpr::List(items) => {
                f.write_str("[")?;
                for (i, a) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str("]")
            }
            ArgExpr::Apply { func, args, width } => {
                write!(f, "{}(", func.name())?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                if let Some(w) = width {
                    write!(f, ", {w}")?;
                }
                f.write_str(")")
            }
            ArgExpr::Concat(a, b) | ArgExpr::Diff(a, b) => {
                let op = if matches!(self, ArgExpr::Concat(..)) {
                    "++"
                } else {
                    "\\"
                };
                write!(f, "{a} {op} ")?;
                if matches!(**b, ArgExpr::Concat(..) | ArgExpr::Diff(..)) {
                    write!(f, "({b})")
                } else {
                    write!(f, "{b}")
                }
            }
        }
    }
}
