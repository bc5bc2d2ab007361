//! The four algorithms as choreographies, with instance encoders, result
//! decoders and independent oracles.

pub mod sources;

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use num_complex::Complex64;
use rand::Rng;

use crate::lang::{ArgExpr, Name, SourceProgram, StateMap, Stmt, StmtKind, Value};
use crate::syntax::parse_program;

/// Largest Gaussian system: entry names like `a12` need single digits.
pub const GAUSS_MAX_N: usize = 9;
/// Cell value carried by the broadcast token.
pub const TOKEN: i64 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Example {
    Quicksort,
    Gauss,
    Fft,
    Broadcast,
}

impl Example {
    pub const ALL: [Example; 4] = [
        Example::Quicksort,
        Example::Gauss,
        Example::Fft,
        Example::Broadcast,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Example::Quicksort => "quicksort",
            Example::Gauss => "gauss",
            Example::Fft => "fft",
            Example::Broadcast => "broadcast",
        }
    }

    pub fn source(self) -> &'static str {
        match self {
            Example::Quicksort => sources::QUICKSORT,
            Example::Gauss => sources::GAUSS,
            Example::Fft => sources::FFT,
            Example::Broadcast => sources::BROADCAST,
        }
    }

    pub fn from_name(s: &str) -> Option<Example> {
        Example::ALL.into_iter().find(|e| e.name() == s)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Instance {
    Quicksort(Vec<i64>),
    /// Augmented matrix, `n` rows of `n + 1` entries.
    Gauss(Vec<Vec<f64>>),
    Fft(Vec<Complex64>),
    /// Vertices `v0..`, undirected edges, start vertex.
    Broadcast {
        vertices: usize,
        edges: Vec<(usize, usize)>,
        start: usize,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub enum Output {
    Sorted(Vec<i64>),
    Matrix(Vec<Vec<f64>>),
    Spectrum(Vec<Complex64>),
    Reached(BTreeSet<usize>),
}

impl fmt::Display for Output {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Output::Sorted(l) => write!(f, "{}", Value::ints(l.iter().copied())),
            Output::Matrix(m) => {
                let rows: Vec<String> = m
                    .iter()
                    .map(|r| Value::list(r.iter().map(|x| Value::Float(*x))).to_string())
                    .collect();
                write!(f, "[{}]", rows.join(", "))
            }
            Output::Spectrum(y) => {
                write!(f, "{}", Value::list(y.iter().map(|z| Value::Complex(*z))))
            }
            Output::Reached(s) => {
                let vs: Vec<String> = s.iter().map(|v| format!("v{v}")).collect();
                write!(f, "{{{}}}", vs.join(", "))
            }
        }
    }
}

impl Output {
    /// Exact on integers and vertex sets, within `tol` on numbers.
    pub fn matches(&self, other: &Output, tol: f64) -> bool {
        match (self, other) {
            (Output::Matrix(a), Output::Matrix(b)) => {
                a.len() == b.len()
                    && a.iter().zip(b).all(|(r, s)| {
                        r.len() == s.len() && r.iter().zip(s).all(|(x, y)| (x - y).abs() <= tol)
                    })
            }
            (Output::Spectrum(a), Output::Spectrum(b)) => {
                a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).norm() <= tol)
            }
            (a, b) => a == b,
        }
    }
}

impl Instance {
    pub fn example(&self) -> Example {
        match self {
            Instance::Quicksort(_) => Example::Quicksort,
            Instance::Gauss(_) => Example::Gauss,
            Instance::Fft(_) => Example::Fft,
            Instance::Broadcast { .. } => Example::Broadcast,
        }
    }

    /// Rejects ill-shaped payloads.
    pub fn validate(&self) -> Result<(), String> {
        match self {
            Instance::Quicksort(_) => Ok(()),
            Instance::Gauss(m) => {
                let n = m.len();
                if n == 0 || n > GAUSS_MAX_N {
                    return Err(format!("gauss needs 1 to {GAUSS_MAX_N} rows, got {n}"));
                }
                if let Some(r) = m.iter().position(|r| r.len() != n + 1) {
                    return Err(format!(
                        "gauss row {} has {} entries, expected {}",
                        r + 1,
                        m[r].len(),
                        n + 1
                    ));
                }
                Ok(())
            }
            Instance::Fft(x) => {
                if x.is_empty() || !x.len().is_power_of_two() {
                    return Err(format!("fft length must be a power of 2, got {}", x.len()));
                }
                Ok(())
            }
            Instance::Broadcast {
                vertices,
                edges,
                start,
            } => {
                if *start >= *vertices {
                    return Err(format!(
                        "start vertex v{start} is not among {vertices} vertices"
                    ));
                }
                if let Some((a, b)) = edges
                    .iter()
                    .find(|(a, b)| a >= vertices || b >= vertices || a == b)
                {
                    return Err(format!("bad edge v{a} -- v{b}"));
                }
                Ok(())
            }
        }
    }
}

fn gauss_name(i: usize, j: usize, n: usize) -> Name {
    if j == n {
        format!("b{}", i + 1).into()
    } else {
        format!("a{}{}", i + 1, j + 1).into()
    }
}

fn numbered(prefix: &str, k: usize) -> Vec<Name> {
    (0..k).map(|i| format!("{prefix}{i}").into()).collect()
}

fn set_list(prog: &mut SourceProgram, list: &str, members: Vec<Name>) {
    let l: Name = list.into();
    match prog.lists.iter_mut().find(|(n, _)| *n == l) {
        Some(entry) => entry.1 = members,
        None => prog.lists.push((l, members)),
    }
}

/// The shipped program specialised to `inst`, with its initial cells.
pub fn encode_instance(inst: &Instance) -> Result<(SourceProgram, StateMap), String> {
    inst.validate()?;
    let mut prog = parse_program(inst.example().source()).map_err(|d| d[0].message.clone())?;
    let mut state = StateMap::new();
    match inst {
        Instance::Quicksort(l) => {
            state.insert("p".into(), Value::ints(l.iter().copied()));
        }
        Instance::Gauss(m) => {
            let n = m.len();
            let mut names = Vec::new();
            for (i, row) in m.iter().enumerate() {
                for (j, x) in row.iter().enumerate() {
                    let a = gauss_name(i, j, n);
                    state.insert(a.clone(), Value::Float(*x));
                    names.push(a);
                }
            }
            set_list(&mut prog, "A", names);
        }
        Instance::Fft(x) => {
            let n = x.len();
            set_list(&mut prog, "X", numbered("x", n));
            set_list(&mut prog, "Y", numbered("y", n));
            for (i, z) in x.iter().enumerate() {
                state.insert(format!("x{i}").into(), Value::Complex(*z));
            }
            state.insert("n".into(), Value::Int(n as i64));
            state.insert("w".into(), Value::root_of_unity(1, n as i64));
        }
        Instance::Broadcast {
            vertices,
            edges,
            start,
        } => {
            let vs = numbered("v", *vertices);
            set_list(&mut prog, "G", vs.clone());
            prog.adjacency = Some(
                edges
                    .iter()
                    .map(|(a, b)| (vs[*a].clone(), vs[*b].clone()))
                    .collect(),
            );
            for (i, v) in vs.iter().enumerate() {
                state.insert(v.clone(), Value::Int(if i == *start { TOKEN } else { 0 }));
            }
            prog.main = vec![Stmt::new(StmtKind::Call {
                proc: "broadcast".into(),
                args: vec![ArgExpr::names(&vs[*start..=*start]), ArgExpr::name("G")],
            })];
        }
    }
    Ok((prog, state))
}

/// Textual form of an encoded instance: the `.pc` source and the state file.
pub fn encode_instance_text(inst: &Instance) -> Result<(String, String), String> {
    let (prog, state) = encode_instance(inst)?;
    Ok((
        crate::syntax::pretty_print(&prog),
        crate::syntax::print_state(&state),
    ))
}

/// Independent reference result.
pub fn oracle(inst: &Instance) -> Output {
    match inst {
        Instance::Quicksort(l) => {
            let mut s = l.clone();
            s.sort();
            Output::Sorted(s)
        }
        Instance::Gauss(m) => Output::Matrix(eliminate(m)),
        Instance::Fft(x) => Output::Spectrum(dft(x)),
        Instance::Broadcast {
            vertices,
            edges,
            start,
        } => Output::Reached(bfs(*vertices, edges, *start)),
    }
}

/// Row reduction without pivoting to a unit upper-triangular matrix.
pub fn eliminate(m: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut a = m.to_vec();
    let n = a.len();
    for k in 0..n {
        let pivot = a[k][k];
        for j in k..=n {
            a[k][j] /= pivot;
        }
        for i in k + 1..n {
            let f = a[i][k];
            for j in k..=n {
                a[i][j] -= f * a[k][j];
            }
        }
    }
    a
}

/// Solution of a unit upper-triangular augmented system.
pub fn back_substitute(u: &[Vec<f64>]) -> Vec<f64> {
    let n = u.len();
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        x[i] = u[i][n] - (i + 1..n).map(|j| u[i][j] * x[j]).sum::<f64>();
    }
    x
}

/// `y_j = sum_k x_k w^(kj)` with `w = e^(2 pi i / n)`.
pub fn dft(x: &[Complex64]) -> Vec<Complex64> {
    let n = x.len();
    (0..n)
        .map(|j| {
            x.iter()
                .enumerate()
                .map(|(k, xk)| {
                    xk * Complex64::from_polar(
                        1.0,
                        2.0 * std::f64::consts::PI * ((k * j) % n) as f64 / n as f64,
                    )
                })
                .sum()
        })
        .collect()
}

pub fn bfs(vertices: usize, edges: &[(usize, usize)], start: usize) -> BTreeSet<usize> {
    let mut adj: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &(a, b) in edges {
        adj.entry(a).or_default().push(b);
        adj.entry(b).or_default().push(a);
    }
    let mut seen = BTreeSet::from([start]);
    let mut queue = VecDeque::from([start]);
    while let Some(v) = queue.pop_front() {
        for &u in adj.get(&v).into_iter().flatten() {
            if u < vertices && seen.insert(u) {
                queue.push_back(u);
            }
        }
    }
    seen
}

fn cell<'s>(state: &'s StateMap, n: &str) -> Result<&'s Value, String> {
    state
        .get(&Name::from(n))
        .ok_or_else(|| format!("no cell for `{n}`"))
}

/// Reads the result of `inst` off a final state.
pub fn decode_result(inst: &Instance, state: &StateMap) -> Result<Output, String> {
    match inst {
        Instance::Quicksort(_) => match cell(state, "p")? {
            Value::List(l) => l
                .iter()
                .map(|v| match v {
                    Value::Int(i) => Ok(*i),
                    v => Err(format!("`p` holds `{v}`, not an integer")),
                })
                .collect::<Result<_, _>>()
                .map(Output::Sorted),
            v => Err(format!("`p` holds `{v}`, not a list")),
        },
        Instance::Gauss(m) => {
            let n = m.len();
            let mut out = Vec::new();
            for i in 0..n {
                let mut row = Vec::new();
                for j in 0..=n {
                    let a = gauss_name(i, j, n);
                    let v = cell(state, a.as_str())?;
                    row.push(
                        v.as_f64()
                            .ok_or_else(|| format!("`{a}` holds `{v}`, not a number"))?,
                    );
                }
                out.push(row);
            }
            Ok(Output::Matrix(out))
        }
        Instance::Fft(x) => (0..x.len())
            .map(|j| {
                let y = format!("y{j}");
                let v = cell(state, &y)?;
                v.as_complex()
                    .ok_or_else(|| format!("`{y}` holds `{v}`, not a number"))
            })
            .collect::<Result<_, _>>()
            .map(Output::Spectrum),
        Instance::Broadcast { vertices, .. } => {
            let mut reached = BTreeSet::new();
            for v in 0..*vertices {
                if *cell(state, &format!("v{v}"))? == Value::Int(TOKEN) {
                    reached.insert(v);
                }
            }
            Ok(Output::Reached(reached))
        }
    }
}

/// Random integer list with duplicates.
pub fn random_quicksort<R: Rng>(rng: &mut R, max_len: usize) -> Instance {
    let len = rng.gen_range(0..=max_len);
    Instance::Quicksort((0..len).map(|_| rng.gen_range(-5..=5)).collect())
}

/// Random strictly diagonally dominant `n x (n+1)` system.
pub fn random_gauss<R: Rng>(rng: &mut R, n: usize) -> Instance {
    let mut m = vec![vec![0.0f64; n + 1]; n];
    for (i, row) in m.iter_mut().enumerate() {
        for (j, x) in row.iter_mut().enumerate() {
            if j != i {
                *x = rng.gen_range(-1.0..1.0);
            }
        }
        let off: f64 = row[..n].iter().map(|x| x.abs()).sum();
        row[i] = (off + rng.gen_range(1.0..2.0)) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
    }
    Instance::Gauss(m)
}

pub fn random_fft<R: Rng>(rng: &mut R, n: usize) -> Instance {
    Instance::Fft(
        (0..n)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect(),
    )
}

/// Random graph on `2..=max_vertices` vertices, often disconnected.
pub fn random_broadcast<R: Rng>(rng: &mut R, max_vertices: usize) -> Instance {
    let vertices = rng.gen_range(2..=max_vertices.max(2));
    let mut edges = Vec::new();
    for a in 0..vertices {
        for b in a + 1..vertices {
            if rng.gen_bool(0.3) {
                edges.push((a, b));
            }
        }
    }
    Instance::Broadcast {
        vertices,
        edges,
        start: rng.gen_range(0..vertices),
    }
}

/// The small instance each shipped state file describes.
pub fn default_instance(e: Example) -> Instance {
    match e {
        Example::Quicksort => Instance::Quicksort(vec![3, 1, 2]),
        Example::Gauss => Instance::Gauss(vec![vec![2.0, 1.0, 5.0], vec![1.0, 3.0, 10.0]]),
        Example::Fft => Instance::Fft(vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(2.0, 0.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(-1.0, 0.0),
        ]),
        Example::Broadcast => Instance::Broadcast {
            vertices: 5,
            edges: vec![(0, 1), (1, 2), (0, 2), (3, 4)],
            start: 0,
        },
    }
}
