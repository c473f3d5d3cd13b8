//! Combinatorial problems as Z-basis observables, with brute-force oracles.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::pauli::{Observable, Pauli, PauliString};
use super::VqaError;

/// Largest qubit count the TSP encoder accepts.
pub const MAX_TSP_QUBITS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub w: f64,
}

/// Simple undirected graph with non-negative edge weights.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    n: usize,
    edges: Vec<Edge>,
}

impl Graph {
    pub fn new(n: usize, edges: Vec<Edge>) -> Result<Self, VqaError> {
        let mut seen = std::collections::BTreeSet::new();
        for e in &edges {
            if e.u >= n || e.v >= n {
                return Err(VqaError::InvalidGraph(format!("edge ({}, {}) out of range for {n} vertices", e.u, e.v)));
            }
            if e.u == e.v {
                return Err(VqaError::InvalidGraph(format!("self loop at {}", e.u)));
            }
            if !e.w.is_finite() || e.w < 0.0 {
                return Err(VqaError::InvalidGraph(format!("edge ({}, {}) has weight {}", e.u, e.v, e.w)));
            }
            if !seen.insert((e.u.min(e.v), e.u.max(e.v))) {
                return Err(VqaError::InvalidGraph(format!("duplicate edge ({}, {})", e.u, e.v)));
            }
        }
        Ok(Self { n, edges })
    }

    pub fn unweighted(n: usize, pairs: &[(usize, usize)]) -> Result<Self, VqaError> {
        Self::new(n, pairs.iter().map(|&(u, v)| Edge { u, v, w: 1.0 }).collect())
    }

    pub fn n_vertices(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// `n m` header, then `u v w` per edge. Weight defaults to 1.
    pub fn parse(text: &str) -> Result<Self, VqaError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let bad = |line: usize, reason: &str| VqaError::Parse { line, reason: reason.into() };
        let (hl, header) = lines.next().ok_or_else(|| bad(0, "missing `n m` header"))?;
        let head: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| bad(hl, "header must be two integers")))
            .collect::<Result<_, _>>()?;
        let [n, m] = head[..] else { return Err(bad(hl, "header must be two integers")) };
        let mut edges = Vec::with_capacity(m);
        for (ln, line) in lines {
            let f: Vec<&str> = line.split_whitespace().collect();
            if !(2..=3).contains(&f.len()) {
                return Err(bad(ln, "edge line must be `u v [w]`"));
            }
            let u = f[0].parse().map_err(|_| bad(ln, "bad vertex index"))?;
            let v = f[1].parse().map_err(|_| bad(ln, "bad vertex index"))?;
            let w = match f.get(2) {
                Some(t) => t.parse().map_err(|_| bad(ln, "bad weight"))?,
                None => 1.0,
            };
            edges.push(Edge { u, v, w });
        }
        if edges.len() != m {
            return Err(bad(0, &format!("header promises {m} edges, found {}", edges.len())));
        }
        Graph::new(n, edges)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, VqaError> {
        let path = path.as_ref();
        Self::parse(&std::fs::read_to_string(path).map_err(|e| VqaError::Io(format!("{}: {e}", path.display())))?)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.n, self.edges.len());
        for e in &self.edges {
            let _ = writeln!(out, "{} {} {}", e.u, e.v, e.w);
        }
        out
    }

    /// Erdős–Rényi graph with unit weights; resampled until it has an edge.
    pub fn seeded(n: usize, edge_prob: f64, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        loop {
            let mut pairs = vec![];
            for u in 0..n {
                for v in u + 1..n {
                    if rng.gen_bool(edge_prob) {
                        pairs.push((u, v));
                    }
                }
            }
            if !pairs.is_empty() || n < 2 {
                return Self::unweighted(n, &pairs).expect("generated graph is simple");
            }
        }
    }
}

/// Square distance matrix; the diagonal is ignored.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    d: Vec<Vec<f64>>,
}

impl DistanceMatrix {
    pub fn new(d: Vec<Vec<f64>>) -> Result<Self, VqaError> {
        let n = d.len();
        if n < 2 {
            return Err(VqaError::InvalidDistances("need at least 2 cities".into()));
        }
        if d.iter().any(|r| r.len() != n) {
            return Err(VqaError::InvalidDistances("matrix is not square".into()));
        }
        if d.iter().flatten().any(|x| !x.is_finite() || *x < 0.0) {
            return Err(VqaError::InvalidDistances("distances must be finite and non-negative".into()));
        }
        Ok(Self { d })
    }

    pub fn n_cities(&self) -> usize {
        self.d.len()
    }

    pub fn get(&self, u: usize, v: usize) -> f64 {
        self.d[u][v]
    }

    pub fn max_distance(&self) -> f64 {
        let n = self.n_cities();
        (0..n).flat_map(|u| (0..n).filter(move |&v| v != u).map(move |v| (u, v))).map(|(u, v)| self.d[u][v]).fold(0.0, f64::max)
    }

    pub fn parse_csv(text: &str) -> Result<Self, VqaError> {
        let mut reader = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).comment(Some(b'#')).from_reader(text.as_bytes());
        let mut rows = vec![];
        for (i, rec) in reader.records().enumerate() {
            let rec = rec.map_err(|e| VqaError::Parse { line: i + 1, reason: e.to_string() })?;
            let line = rec.position().map_or(i + 1, |p| p.line() as usize);
            let row = rec
                .iter()
                .map(|f| f.parse::<f64>().map_err(|_| VqaError::Parse { line, reason: format!("bad distance '{f}'") }))
                .collect::<Result<Vec<_>, _>>()?;
            rows.push(row);
        }
        Self::new(rows)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, VqaError> {
        let path = path.as_ref();
        Self::parse_csv(&std::fs::read_to_string(path).map_err(|e| VqaError::Io(format!("{}: {e}", path.display())))?)
    }

    pub fn to_csv(&self) -> String {
        self.d.iter().map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",") + "\n").collect()
    }

    /// Symmetric integer distances in `1..=max`.
    pub fn seeded(n_cities: usize, max: u32, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut d = vec![vec![0.0; n_cities]; n_cities];
        let pairs: Vec<(usize, usize)> = (0..n_cities).flat_map(|u| (u + 1..n_cities).map(move |v| (u, v))).collect();
        for (u, v) in pairs {
            let x = rng.gen_range(1..=max) as f64;
            (d[u][v], d[v][u]) = (x, x);
        }
        Self { d }
    }
}

/// Binary quadratic objective `Σ a_i x_i + Σ_{i<j} b_ij x_i x_j + c`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Qubo {
    pub n: usize,
    pub linear: Vec<f64>,
    pub quadratic: BTreeMap<(usize, usize), f64>,
    pub constant: f64,
}

impl Qubo {
    pub fn new(n: usize) -> Self {
        Self { n, linear: vec![0.0; n], ..Default::default() }
    }

    pub fn add_linear(&mut self, i: usize, a: f64) {
        self.linear[i] += a;
    }

    pub fn add_quadratic(&mut self, i: usize, j: usize, b: f64) {
        if i == j {
            self.linear[i] += b;
        } else {
            *self.quadratic.entry((i.min(j), i.max(j))).or_default() += b;
        }
    }

    /// `scale·(1 − Σ_{i∈vars} x_i)²`.
    pub fn add_one_hot_penalty(&mut self, vars: &[usize], scale: f64) {
        self.constant += scale;
        for (k, &i) in vars.iter().enumerate() {
            self.add_linear(i, -scale);
            for &j in &vars[k + 1..] {
                self.add_quadratic(i, j, 2.0 * scale);
            }
        }
    }

    /// Bit `i` of `x` is variable `i`.
    pub fn value(&self, x: usize) -> f64 {
        let bit = |i: usize| (x >> i) & 1 == 1;
        let mut v = self.constant;
        for (i, a) in self.linear.iter().enumerate() {
            if bit(i) {
                v += a;
            }
        }
        for (&(i, j), b) in &self.quadratic {
            if bit(i) && bit(j) {
                v += b;
            }
        }
        v
    }

    /// Substitutes `x_i = (1 − Z_i)/2`, so basis label `x` has energy `value(x)`.
    pub fn to_observable(&self) -> Observable {
        let mut offset = self.constant;
        let mut z1 = vec![0.0; self.n];
        let mut zz: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for (i, &a) in self.linear.iter().enumerate() {
            offset += a / 2.0;
            z1[i] -= a / 2.0;
        }
        for (&(i, j), &b) in &self.quadratic {
            offset += b / 4.0;
            z1[i] -= b / 4.0;
            z1[j] -= b / 4.0;
            *zz.entry((i, j)).or_default() += b / 4.0;
        }
        let mut terms = vec![];
        for (i, c) in z1.into_iter().enumerate() {
            if c != 0.0 {
                terms.push((c, PauliString::on(self.n, &[(i, Pauli::Z)])));
            }
        }
        for ((i, j), c) in zz {
            if c != 0.0 {
                terms.push((c, PauliString::on(self.n, &[(i, Pauli::Z), (j, Pauli::Z)])));
            }
        }
        Observable::new(self.n, terms, offset).expect("finite QUBO coefficients")
    }
}

/// How an observable's energy maps back to the problem's own cost.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Interpretation {
    /// The energy is the cost.
    Minimize,
    /// The energy is the negated objective of a maximization problem.
    NegatedMaximum,
}

impl Interpretation {
    pub fn report(self, energy: f64) -> f64 {
        match self {
            Interpretation::Minimize => energy,
            Interpretation::NegatedMaximum => -energy,
        }
    }
}

/// `Σ_{(u,v)} (w/2)·Z_u Z_v − Σ w/2`; minimum is minus the max cut.
pub fn encode_maxcut(g: &Graph) -> Result<(Observable, Interpretation), VqaError> {
    if g.edges.is_empty() {
        return Err(VqaError::EmptyGraph);
    }
    let n = g.n;
    let terms = g.edges.iter().map(|e| (e.w / 2.0, PauliString::on(n, &[(e.u, Pauli::Z), (e.v, Pauli::Z)]))).collect();
    let offset = -g.edges.iter().map(|e| e.w / 2.0).sum::<f64>();
    Ok((Observable::new(n, terms, offset)?, Interpretation::NegatedMaximum))
}

pub const DEFAULT_COVER_PENALTY: f64 = 2.0;

/// `A·Σ_E (1 − x_u)(1 − x_v) + Σ_v x_v` with unit vertex weights.
pub fn encode_vertex_cover(g: &Graph, penalty: f64) -> Result<Observable, VqaError> {
    if g.n == 0 {
        return Err(VqaError::EmptyGraph);
    }
    if penalty.is_nan() || penalty <= 1.0 {
        return Err(VqaError::PenaltyTooSmall { penalty, min: 1.0 });
    }
    let mut q = Qubo::new(g.n);
    for v in 0..g.n {
        q.add_linear(v, 1.0);
    }
    for e in &g.edges {
        q.constant += penalty;
        q.add_linear(e.u, -penalty);
        q.add_linear(e.v, -penalty);
        q.add_quadratic(e.u, e.v, penalty);
    }
    Ok(q.to_observable())
}

pub fn default_tsp_penalty(d: &DistanceMatrix) -> f64 {
    2.0 * d.n_cities() as f64 * d.max_distance()
}

/// Qubit of "city `v` at tour position `p`".
pub fn tsp_qubit(n_cities: usize, v: usize, p: usize) -> usize {
    v * n_cities + p
}

pub fn tsp_qubo(d: &DistanceMatrix, penalty: f64) -> Result<Qubo, VqaError> {
    let nc = d.n_cities();
    let qubits = nc * nc;
    if qubits > MAX_TSP_QUBITS {
        return Err(VqaError::TooManyQubits { qubits, max: MAX_TSP_QUBITS });
    }
    let min = nc as f64 * d.max_distance();
    if penalty.is_nan() || penalty <= min {
        return Err(VqaError::PenaltyTooSmall { penalty, min });
    }
    let x = |v, p| tsp_qubit(nc, v, p);
    let mut q = Qubo::new(qubits);
    for p in 0..nc {
        for u in 0..nc {
            for v in 0..nc {
                if u != v {
                    q.add_quadratic(x(u, p), x(v, (p + 1) % nc), d.get(u, v));
                }
            }
        }
    }
    for v in 0..nc {
        q.add_one_hot_penalty(&(0..nc).map(|p| x(v, p)).collect::<Vec<_>>(), penalty);
    }
    for p in 0..nc {
        q.add_one_hot_penalty(&(0..nc).map(|v| x(v, p)).collect::<Vec<_>>(), penalty);
    }
    Ok(q)
}

/// One-hot TSP objective; minimum is the shortest closed tour.
pub fn encode_tsp(d: &DistanceMatrix, penalty: f64) -> Result<Observable, VqaError> {
    Ok(tsp_qubo(d, penalty)?.to_observable())
}

/// Exhaustive maximum cut.
pub fn max_cut_brute(g: &Graph) -> f64 {
    (0..1usize << g.n)
        .map(|s| g.edges.iter().filter(|e| (s >> e.u) & 1 != (s >> e.v) & 1).map(|e| e.w).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Exhaustive minimum vertex cover size.
pub fn min_vertex_cover_brute(g: &Graph) -> usize {
    (0..1usize << g.n)
        .filter(|s| g.edges.iter().all(|e| (s >> e.u) & 1 == 1 || (s >> e.v) & 1 == 1))
        .map(|s| s.count_ones() as usize)
        .min()
        .unwrap_or(0)
}

fn permutations(items: &mut Vec<usize>, k: usize, visit: &mut dyn FnMut(&[usize])) {
    if k == items.len() {
        visit(items);
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permutations(items, k + 1, visit);
        items.swap(k, i);
    }
}

/// Shortest closed tour over every city ordering.
pub fn tsp_brute(d: &DistanceMatrix) -> f64 {
    let n = d.n_cities();
    let mut best = f64::INFINITY;
    permutations(&mut (0..n).collect(), 0, &mut |order| {
        let len: f64 = (0..n).map(|p| d.get(order[p], order[(p + 1) % n])).sum();
        best = best.min(len);
    });
    best
}

/// Open-chain transverse-field Ising model `−J Σ Z_i Z_{i+1} − h Σ X_i`.
pub fn tfim_chain(n: usize, j: f64, h: f64) -> Observable {
    let mut terms = vec![];
    for i in 0..n - 1 {
        terms.push((-j, PauliString::on(n, &[(i, Pauli::Z), (i + 1, Pauli::Z)])));
    }
    for i in 0..n {
        terms.push((-h, PauliString::on(n, &[(i, Pauli::X)])));
    }
    Observable::new(n, terms, 0.0).expect("finite couplings")
}

/// Open-chain XXZ model `Σ X_i X_{i+1} + Y_i Y_{i+1} + Δ·Z_i Z_{i+1}`.
pub fn xxz_chain(n: usize, delta: f64) -> Observable {
    let mut terms = vec![];
    for i in 0..n - 1 {
        for (p, c) in [(Pauli::X, 1.0), (Pauli::Y, 1.0), (Pauli::Z, delta)] {
            terms.push((c, PauliString::on(n, &[(i, p), (i + 1, p)])));
        }
    }
    Observable::new(n, terms, 0.0).expect("finite couplings")
}

/// Problem description for the CLI and the benchmark harness.
#[derive(Debug, Clone, PartialEq)]
pub enum Problem {
    MaxCut(Graph),
    VertexCover { graph: Graph, penalty: f64 },
    Tsp { distances: DistanceMatrix, penalty: f64 },
    Hamiltonian(Observable),
}

impl Problem {
    pub fn kind(&self) -> &'static str {
        match self {
            Problem::MaxCut(_) => "maxcut",
            Problem::VertexCover { .. } => "vertex-cover",
            Problem::Tsp { .. } => "tsp",
            Problem::Hamiltonian(_) => "hamiltonian-file",
        }
    }

    pub fn encode(&self) -> Result<(Observable, Interpretation), VqaError> {
        match self {
            Problem::MaxCut(g) => encode_maxcut(g),
            Problem::VertexCover { graph, penalty } => Ok((encode_vertex_cover(graph, *penalty)?, Interpretation::Minimize)),
            Problem::Tsp { distances, penalty } => Ok((encode_tsp(distances, *penalty)?, Interpretation::Minimize)),
            Problem::Hamiltonian(o) => Ok((o.clone(), Interpretation::Minimize)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vqa::pauli::exact_minimum;

    fn diag_min(o: &Observable) -> f64 {
        o.diagonal().unwrap().into_iter().fold(f64::INFINITY, f64::min)
    }

    #[test]
    fn maxcut_examples() {
        let edge = Graph::unweighted(2, &[(0, 1)]).unwrap();
        let (o, interp) = encode_maxcut(&edge).unwrap();
        assert_eq!(exact_minimum(&o).unwrap().energy, -1.0);
        assert_eq!(interp.report(-1.0), 1.0);
        let c4 = Graph::unweighted(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        assert_eq!(max_cut_brute(&c4), 4.0);
        assert_eq!(diag_min(&encode_maxcut(&c4).unwrap().0), -4.0);
        let tri = Graph::unweighted(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(max_cut_brute(&tri), 2.0);
        assert_eq!(exact_minimum(&encode_maxcut(&tri).unwrap().0).unwrap().energy, -2.0);
        assert_eq!(encode_maxcut(&Graph::unweighted(3, &[]).unwrap()).unwrap_err(), VqaError::EmptyGraph);
    }

    #[test]
    fn vertex_cover_examples() {
        let edge = Graph::unweighted(2, &[(0, 1)]).unwrap();
        assert_eq!(diag_min(&encode_vertex_cover(&edge, 2.0).unwrap()), 1.0);
        let star = Graph::unweighted(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        assert_eq!(min_vertex_cover_brute(&star), 1);
        assert_eq!(diag_min(&encode_vertex_cover(&star, 2.0).unwrap()), 1.0);
        assert!(matches!(encode_vertex_cover(&star, 1.0), Err(VqaError::PenaltyTooSmall { .. })));
    }

    #[test]
    fn tsp_examples() {
        let d = DistanceMatrix::new(vec![vec![0., 1., 3.], vec![1., 0., 2.], vec![3., 2., 0.]]).unwrap();
        assert_eq!(tsp_brute(&d), 6.0);
        let o = encode_tsp(&d, default_tsp_penalty(&d)).unwrap();
        assert_eq!(o.n_qubits(), 9);
        assert_eq!(diag_min(&o), 6.0);
        let eq = DistanceMatrix::new(vec![vec![0., 5., 5.], vec![5., 0., 5.], vec![5., 5., 0.]]).unwrap();
        let q = tsp_qubo(&eq, default_tsp_penalty(&eq)).unwrap();
        // Every permutation matrix is a valid tour of length 3d.
        let mut tours = 0;
        permutations(&mut vec![0, 1, 2], 0, &mut |pos| {
            let x: usize = (0..3).map(|v| 1usize << tsp_qubit(3, v, pos[v])).sum();
            assert_eq!(q.value(x), 15.0);
            tours += 1;
        });
        assert_eq!(tours, 6);
        assert!(matches!(encode_tsp(&d, 9.0), Err(VqaError::PenaltyTooSmall { .. })));
        let four = DistanceMatrix::seeded(4, 5, 1);
        assert!(matches!(encode_tsp(&four, 100.0), Err(VqaError::TooManyQubits { qubits: 16, .. })));
    }

    #[test]
    fn qubo_observable_matches_direct_value() {
        let mut q = Qubo::new(3);
        q.add_linear(0, 1.5);
        q.add_quadratic(0, 2, -2.0);
        q.add_quadratic(1, 2, 0.5);
        q.add_one_hot_penalty(&[0, 1], 3.0);
        let d = q.to_observable().diagonal().unwrap();
        for (x, e) in d.iter().enumerate() {
            assert!((e - q.value(x)).abs() < 1e-12);
        }
    }

    #[test]
    fn graph_text_round_trip_and_errors() {
        let g = Graph::parse("# demo\n3 2\n0 1\n1 2 2.5\n").unwrap();
        assert_eq!(g.edges()[0].w, 1.0);
        assert_eq!(Graph::parse(&g.to_text()).unwrap(), g);
        assert!(matches!(Graph::parse("3 2\n0 1\n"), Err(VqaError::Parse { .. })));
        assert!(matches!(Graph::parse("2 1\n0 0\n"), Err(VqaError::InvalidGraph(_))));
        assert!(matches!(Graph::parse("2 1\n0 5\n"), Err(VqaError::InvalidGraph(_))));
        assert!(matches!(Graph::parse("3 2\n0 1\n1 0\n"), Err(VqaError::InvalidGraph(_))));
        assert!(matches!(Graph::parse("2 1\n0 1 -1\n"), Err(VqaError::InvalidGraph(_))));
    }

    #[test]
    fn csv_round_trip_and_errors() {
        let d = DistanceMatrix::seeded(3, 9, 7);
        assert_eq!(DistanceMatrix::parse_csv(&d.to_csv()).unwrap(), d);
        assert!(matches!(DistanceMatrix::parse_csv("0,1\n1,x\n"), Err(VqaError::Parse { line: 2, .. })));
        assert!(DistanceMatrix::parse_csv("0,1,2\n1,0,2\n").is_err());
    }

    #[test]
    fn model_hamiltonians_known_ground_energies() {
        // Two-site XXZ: singlet energy −2 − Δ.
        let e = exact_minimum(&xxz_chain(2, 0.5)).unwrap().energy;
        assert!((e + 2.5).abs() < 1e-12);
        // Two-site TFIM at J = h = 1: −√5.
        let e = exact_minimum(&tfim_chain(2, 1.0, 1.0)).unwrap().energy;
        assert!((e + 5f64.sqrt()).abs() < 1e-12);
    }
}
