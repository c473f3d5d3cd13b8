//! CX-only layers as invertible bit matrices over GF(2).
//!
//! A CX circuit maps basis state `|x⟩` to `|Mx⟩`; `CX(c→t)` adds bit `c`
//! into bit `t`. Column indices in [`synthesize_column_move`] are 1-based
//! like the matrix columns of a unitary; everything else uses 0-based
//! basis labels.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::qsim::{apply_bound, BoundGate, C64};

pub const DEFAULT_ORDER_CAP: u64 = 1 << 20;
/// Largest register handled as explicit basis permutations.
pub const MAX_PERMUTATION_QUBITS: usize = 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EntangleError {
    #[error("qubit index {qubit} out of range for {n} qubits")]
    IndexOutOfRange { qubit: usize, n: usize },
    #[error("CX control and target coincide (qubit {0})")]
    SameQubit(usize),
    #[error("matrix is not invertible over GF(2)")]
    NotInvertible,
    #[error("order exceeds the cap of {0}")]
    CapExceeded(u64),
    #[error("column {column} is not movable on {n} qubits (columns are 1-based, the first column is fixed)")]
    InvalidColumn { column: u64, n: usize },
    #[error("{0} qubits is outside the supported range")]
    TooManyQubits(usize),
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
}

/// `n×n` bit matrix; bit `c` of `rows[r]` is entry `(r, c)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GF2Matrix {
    n: usize,
    rows: Vec<u64>,
}

impl GF2Matrix {
    pub fn identity(n: usize) -> Self {
        assert!(n <= 64);
        Self { n, rows: (0..n).map(|r| 1u64 << r).collect() }
    }

    pub fn from_rows(n: usize, rows: Vec<u64>) -> Result<Self, EntangleError> {
        if n > 64 {
            return Err(EntangleError::TooManyQubits(n));
        }
        if rows.len() != n || rows.iter().any(|&r| n < 64 && r >> n != 0) {
            return Err(EntangleError::InvalidPermutation(format!("expected {n} rows of width {n}")));
        }
        Ok(Self { n, rows })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> &[u64] {
        &self.rows
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.rows[r] >> c & 1 == 1
    }

    pub fn is_identity(&self) -> bool {
        self.rows.iter().enumerate().all(|(r, &row)| row == 1u64 << r)
    }

    /// `Mx` for a basis label `x`.
    pub fn apply(&self, x: u64) -> u64 {
        self.rows.iter().enumerate().fold(0, |acc, (r, &row)| acc | (((row & x).count_ones() as u64) & 1) << r)
    }

    /// `self · other`.
    pub fn mul(&self, other: &GF2Matrix) -> GF2Matrix {
        assert_eq!(self.n, other.n);
        let rows = self
            .rows
            .iter()
            .map(|&row| (0..self.n).filter(|&c| row >> c & 1 == 1).fold(0, |acc, c| acc ^ other.rows[c]))
            .collect();
        GF2Matrix { n: self.n, rows }
    }

    pub fn inverse(&self) -> Result<GF2Matrix, EntangleError> {
        let mut a = self.rows.clone();
        let mut inv = GF2Matrix::identity(self.n).rows;
        for k in 0..self.n {
            let p = (k..self.n).find(|&r| a[r] >> k & 1 == 1).ok_or(EntangleError::NotInvertible)?;
            a.swap(k, p);
            inv.swap(k, p);
            for r in 0..self.n {
                if r != k && a[r] >> k & 1 == 1 {
                    a[r] ^= a[k];
                    inv[r] ^= inv[k];
                }
            }
        }
        Ok(GF2Matrix { n: self.n, rows: inv })
    }

    pub fn is_invertible(&self) -> bool {
        self.inverse().is_ok()
    }
}

impl fmt::Display for GF2Matrix {
    /// One row per line, entry `(r, c)` at character `c`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (r, &row) in self.rows.iter().enumerate() {
            let s: String = (0..self.n).map(|c| if row >> c & 1 == 1 { '1' } else { '0' }).collect();
            if r > 0 {
                writeln!(f)?;
            }
            f.write_str(&s)?;
        }
        Ok(())
    }
}

impl FromStr for GF2Matrix {
    type Err = EntangleError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lines: Vec<(usize, &str)> =
            s.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty()).collect();
        let n = lines.len();
        let mut rows = Vec::with_capacity(n);
        for (line, text) in lines {
            if text.len() != n {
                return Err(EntangleError::Parse { line, reason: format!("expected {n} bits, got {}", text.len()) });
            }
            let mut row = 0u64;
            for (c, ch) in text.chars().enumerate() {
                match ch {
                    '0' => {}
                    '1' => row |= 1 << c,
                    _ => return Err(EntangleError::Parse { line, reason: format!("unexpected character {ch:?}") }),
                }
            }
            rows.push(row);
        }
        GF2Matrix::from_rows(n, rows)
    }
}

/// Time-ordered list of (control, target) pairs.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct CxLayer {
    pub pairs: Vec<(usize, usize)>,
}

impl CxLayer {
    pub fn new(pairs: Vec<(usize, usize)>) -> Self {
        Self { pairs }
    }

    /// The chain CX(1→0), CX(2→1), …, CX(n−1→n−2).
    pub fn linear_chain(n: usize) -> Self {
        Self { pairs: (0..n.saturating_sub(1)).map(|i| (i + 1, i)).collect() }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn validate(&self, n: usize) -> Result<(), EntangleError> {
        for &(c, t) in &self.pairs {
            if let Some(q) = [c, t].into_iter().find(|&q| q >= n) {
                return Err(EntangleError::IndexOutOfRange { qubit: q, n });
            }
            if c == t {
                return Err(EntangleError::SameQubit(c));
            }
        }
        Ok(())
    }

    pub fn gates(&self) -> Vec<BoundGate> {
        self.pairs.iter().map(|&(control, target)| BoundGate::Cx { control, target }).collect()
    }

    pub fn then(&self, other: &CxLayer) -> CxLayer {
        CxLayer { pairs: self.pairs.iter().chain(&other.pairs).copied().collect() }
    }
}

impl fmt::Display for CxLayer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (c, t)) in self.pairs.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{c} {t}")?;
        }
        Ok(())
    }
}

impl FromStr for CxLayer {
    type Err = EntangleError;

    /// One `c t` pair per line; blank lines and `#` comments are skipped.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut pairs = Vec::new();
        for (i, raw) in s.lines().enumerate() {
            let text = raw.split('#').next().unwrap_or("").trim();
            if text.is_empty() {
                continue;
            }
            let nums: Vec<&str> = text.split_whitespace().collect();
            let parsed = match nums.as_slice() {
                [c, t] => c.parse().ok().zip(t.parse().ok()),
                _ => None,
            };
            let pair = parsed.ok_or_else(|| EntangleError::Parse { line: i + 1, reason: format!("expected `c t`, got {text:?}") })?;
            pairs.push(pair);
        }
        Ok(Self { pairs })
    }
}

/// Bijection on basis labels: `|x⟩ ↦ |images[x]⟩`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasisPermutation {
    n: usize,
    images: Vec<u64>,
}

impl BasisPermutation {
    pub fn new(n: usize, images: Vec<u64>) -> Result<Self, EntangleError> {
        if n > MAX_PERMUTATION_QUBITS {
            return Err(EntangleError::TooManyQubits(n));
        }
        let dim = 1usize << n;
        if images.len() != dim {
            return Err(EntangleError::InvalidPermutation(format!("expected {dim} images, got {}", images.len())));
        }
        let mut seen = vec![false; dim];
        for &y in &images {
            if y as usize >= dim || std::mem::replace(&mut seen[y as usize], true) {
                return Err(EntangleError::InvalidPermutation(format!("{y} is out of range or repeated")));
            }
        }
        Ok(Self { n, images })
    }

    pub fn identity(n: usize) -> Result<Self, EntangleError> {
        Self::new(n, (0..1u64 << n.min(63)).collect())
    }

    /// Swaps the basis labels `a` and `b`.
    pub fn transposition(n: usize, a: u64, b: u64) -> Result<Self, EntangleError> {
        let mut p = Self::identity(n)?;
        if a >= p.images.len() as u64 || b >= p.images.len() as u64 {
            return Err(EntangleError::InvalidPermutation(format!("labels {a}, {b} out of range")));
        }
        p.images.swap(a as usize, b as usize);
        Ok(p)
    }

    pub fn from_matrix(m: &GF2Matrix) -> Result<Self, EntangleError> {
        if m.n() > MAX_PERMUTATION_QUBITS {
            return Err(EntangleError::TooManyQubits(m.n()));
        }
        Self::new(m.n(), (0..1u64 << m.n()).map(|x| m.apply(x)).collect())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn images(&self) -> &[u64] {
        &self.images
    }

    pub fn apply(&self, x: u64) -> u64 {
        self.images[x as usize]
    }
}

/// Pair with `perm(x⊕y) ≠ perm(x)⊕perm(y)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NonLinearWitness {
    pub x: u64,
    pub y: u64,
    pub image_of_xor: u64,
    pub xor_of_images: u64,
}

impl fmt::Display for NonLinearWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "x={}, y={}: perm(x^y)={} but perm(x)^perm(y)={}",
            self.x, self.y, self.image_of_xor, self.xor_of_images
        )
    }
}

pub fn layer_to_gf2(layer: &CxLayer, n: usize) -> Result<GF2Matrix, EntangleError> {
    if n > 64 {
        return Err(EntangleError::TooManyQubits(n));
    }
    layer.validate(n)?;
    let mut m = GF2Matrix::identity(n);
    for &(c, t) in &layer.pairs {
        m.rows[t] ^= m.rows[c];
    }
    Ok(m)
}

/// Smallest `k ≥ 1` with `M^k = I`.
pub fn order(m: &GF2Matrix, cap: u64) -> Result<u64, EntangleError> {
    if !m.is_invertible() {
        return Err(EntangleError::NotInvertible);
    }
    let mut p = m.clone();
    let mut k = 1;
    while !p.is_identity() {
        if k >= cap {
            return Err(EntangleError::CapExceeded(cap));
        }
        p = p.mul(m);
        k += 1;
    }
    Ok(k)
}

pub fn is_linear(perm: &BasisPermutation) -> Result<GF2Matrix, NonLinearWitness> {
    let n = perm.n;
    let p0 = perm.apply(0);
    if p0 != 0 {
        return Err(NonLinearWitness { x: 0, y: 0, image_of_xor: p0, xor_of_images: 0 });
    }
    // Linearity on each generator e_k for every x implies linearity everywhere.
    for x in 0..1u64 << n {
        for k in 0..n {
            let e = 1u64 << k;
            let lhs = perm.apply(x ^ e);
            let rhs = perm.apply(x) ^ perm.apply(e);
            if lhs != rhs {
                return Err(NonLinearWitness { x, y: e, image_of_xor: lhs, xor_of_images: rhs });
            }
        }
    }
    let mut rows = vec![0u64; n];
    for k in 0..n {
        let col = perm.apply(1 << k);
        for (r, row) in rows.iter_mut().enumerate() {
            *row |= (col >> r & 1) << k;
        }
    }
    Ok(GF2Matrix { n, rows })
}

/// CX sequence realizing `M` by Gauss–Jordan elimination, at most `n²` gates.
pub fn gauss_decompose(m: &GF2Matrix) -> Result<CxLayer, EntangleError> {
    let n = m.n;
    let mut w = m.rows.clone();
    let mut ops = Vec::new();
    for k in 0..n {
        if w[k] >> k & 1 == 0 {
            let r = (k + 1..n).find(|&r| w[r] >> k & 1 == 1).ok_or(EntangleError::NotInvertible)?;
            w[k] ^= w[r];
            ops.push((r, k));
        }
        for r in 0..n {
            if r != k && w[r] >> k & 1 == 1 {
                w[r] ^= w[k];
                ops.push((k, r));
            }
        }
    }
    // The row operations reduce M to I; M is their product in reverse.
    ops.reverse();
    Ok(CxLayer { pairs: ops })
}

/// Matrix `A` with `A·e_p = v` for `p` the lowest set bit of `v`; other columns are unit vectors.
fn completion(n: usize, v: u64) -> (GF2Matrix, usize) {
    let p = v.trailing_zeros() as usize;
    let mut a = GF2Matrix::identity(n);
    for (r, row) in a.rows.iter_mut().enumerate() {
        *row = (*row & !(1 << p)) | (v >> r & 1) << p;
    }
    (a, p)
}

/// CX layer `E` such that column `j` of `U·E` is column `i` of `U` (1-based).
pub fn synthesize_column_move(n: usize, i: u64, j: u64) -> Result<CxLayer, EntangleError> {
    if !(2..=63).contains(&n) {
        return Err(EntangleError::TooManyQubits(n));
    }
    let dim = 1u64 << n;
    for col in [i, j] {
        if col < 2 || col > dim {
            return Err(EntangleError::InvalidColumn { column: col, n });
        }
    }
    if i == j {
        return Ok(CxLayer::default());
    }
    let (u, v) = (i - 1, j - 1);
    let (au, pu) = completion(n, u);
    let (av, pv) = completion(n, v);
    let mut swap = GF2Matrix::identity(n);
    swap.rows.swap(pu, pv);
    let m = au.mul(&swap).mul(&av.inverse()?);
    let layer = gauss_decompose(&m)?;
    let check = layer_to_gf2(&layer, n)?;
    assert_eq!(check.apply(v), u, "column move synthesis failed verification");
    Ok(layer)
}

/// Applies the layer `k` times to every basis state and checks the result is the
/// identity exactly, amplitude by amplitude.
pub fn layer_power_is_identity(layer: &CxLayer, n: usize, k: u64) -> Result<bool, EntangleError> {
    layer.validate(n)?;
    if n > MAX_PERMUTATION_QUBITS {
        return Err(EntangleError::TooManyQubits(n));
    }
    let gates = layer.gates();
    let dim = 1usize << n;
    let mut amps = vec![C64::new(0.0, 0.0); dim];
    for x in 0..dim {
        amps.iter_mut().for_each(|a| *a = C64::new(0.0, 0.0));
        amps[x] = C64::new(1.0, 0.0);
        for _ in 0..k {
            for g in &gates {
                apply_bound(&mut amps, g);
            }
        }
        if amps.iter().enumerate().any(|(y, a)| *a != C64::new(if y == x { 1.0 } else { 0.0 }, 0.0)) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsim::Statevector;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn gcd(a: u64, b: u64) -> u64 {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }

    /// Order as the lcm of cycle lengths of the basis permutation.
    fn cycle_lcm(p: &BasisPermutation) -> u64 {
        let mut seen = vec![false; p.images().len()];
        let mut l = 1;
        for s in 0..seen.len() {
            let mut len = 0;
            let mut x = s;
            while !seen[x] {
                seen[x] = true;
                x = p.apply(x as u64) as usize;
                len += 1;
            }
            if len > 0 {
                l = l / gcd(l, len) * len;
            }
        }
        l
    }

    fn random_invertible(n: usize, rng: &mut impl Rng) -> GF2Matrix {
        loop {
            let rows = (0..n).map(|_| rng.gen::<u64>() & ((1u64 << n) - 1)).collect();
            let m = GF2Matrix::from_rows(n, rows).unwrap();
            if m.is_invertible() {
                return m;
            }
        }
    }

    #[test]
    fn layer_examples() {
        assert!(layer_to_gf2(&CxLayer::default(), 3).unwrap().is_identity());
        let m = layer_to_gf2(&CxLayer::new(vec![(0, 1)]), 2).unwrap();
        assert_eq!(m.to_string(), "10\n11");
        assert_eq!(layer_to_gf2(&CxLayer::new(vec![(0, 4)]), 3), Err(EntangleError::IndexOutOfRange { qubit: 4, n: 3 }));
        assert_eq!(layer_to_gf2(&CxLayer::new(vec![(1, 1)]), 3), Err(EntangleError::SameQubit(1)));
    }

    #[test]
    fn chain_matches_statevector_on_basis_states() {
        let layer = CxLayer::linear_chain(4);
        let m = layer_to_gf2(&layer, 4).unwrap();
        for x in 0..16 {
            let mut s = Statevector::basis(4, x);
            s.apply_all(&layer.gates()).unwrap();
            let y = s.amps().iter().position(|a| a.norm() > 0.5).unwrap();
            assert_eq!(m.apply(x as u64), y as u64);
        }
    }

    #[test]
    fn order_examples() {
        assert_eq!(order(&GF2Matrix::identity(3), DEFAULT_ORDER_CAP), Ok(1));
        assert_eq!(order(&layer_to_gf2(&CxLayer::new(vec![(2, 0)]), 3).unwrap(), DEFAULT_ORDER_CAP), Ok(2));
        let singular = GF2Matrix::from_rows(2, vec![0b11, 0b11]).unwrap();
        assert_eq!(order(&singular, 10), Err(EntangleError::NotInvertible));
        let chain = layer_to_gf2(&CxLayer::linear_chain(6), 6).unwrap();
        assert_eq!(order(&chain, 3), Err(EntangleError::CapExceeded(3)));
    }

    #[test]
    fn chain_orders_match_cycle_oracle() {
        for n in 2..=6 {
            let m = layer_to_gf2(&CxLayer::linear_chain(n), n).unwrap();
            let k = order(&m, DEFAULT_ORDER_CAP).unwrap();
            assert_eq!(k, cycle_lcm(&BasisPermutation::from_matrix(&m).unwrap()), "n={n}");
            let mut p = GF2Matrix::identity(n);
            for j in 1..k {
                p = p.mul(&m);
                assert!(!p.is_identity(), "M^{j} = I before k={k}");
            }
            assert!(p.mul(&m).is_identity());
        }
    }

    #[test]
    fn chain_power_identity_at_statevector_level() {
        for n in 2..=5 {
            let layer = CxLayer::linear_chain(n);
            let k = order(&layer_to_gf2(&layer, n).unwrap(), DEFAULT_ORDER_CAP).unwrap();
            assert!(layer_power_is_identity(&layer, n, k).unwrap());
            for j in 1..k {
                assert!(!layer_power_is_identity(&layer, n, j).unwrap());
            }
        }
    }

    #[test]
    fn middle_transposition_is_not_linear() {
        let p = BasisPermutation::transposition(3, 4, 5).unwrap();
        let w = is_linear(&p).unwrap_err();
        assert_ne!(p.apply(w.x ^ w.y), p.apply(w.x) ^ p.apply(w.y));
        assert!(is_linear(&BasisPermutation::identity(3).unwrap()).unwrap().is_identity());
        let shifted = BasisPermutation::new(1, vec![1, 0]).unwrap();
        assert_eq!(is_linear(&shifted).unwrap_err().x, 0);
    }

    #[test]
    fn exactly_168_linear_permutations_on_three_qubits() {
        let mut perm: Vec<u64> = (0..8).collect();
        let mut linear = 0;
        loop {
            let p = BasisPermutation::new(3, perm.clone()).unwrap();
            if let Ok(m) = is_linear(&p) {
                linear += 1;
                let layer = gauss_decompose(&m).unwrap();
                assert_eq!(BasisPermutation::from_matrix(&layer_to_gf2(&layer, 3).unwrap()).unwrap(), p);
            }
            // next lexicographic permutation
            let Some(i) = (0..7).rev().find(|&i| perm[i] < perm[i + 1]) else { break };
            let j = (i + 1..8).rev().find(|&j| perm[j] > perm[i]).unwrap();
            perm.swap(i, j);
            perm[i + 1..].reverse();
        }
        assert_eq!(linear, 168);
    }

    #[test]
    fn gauss_examples() {
        assert!(gauss_decompose(&GF2Matrix::identity(4)).unwrap().is_empty());
        let t = layer_to_gf2(&CxLayer::new(vec![(3, 1)]), 4).unwrap();
        assert_eq!(gauss_decompose(&t).unwrap(), CxLayer::new(vec![(3, 1)]));
        let singular = GF2Matrix::from_rows(2, vec![0b01, 0b01]).unwrap();
        assert_eq!(gauss_decompose(&singular), Err(EntangleError::NotInvertible));
    }

    #[test]
    fn random_gauss_round_trips() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let n = rng.gen_range(1..=8);
            let m = random_invertible(n, &mut rng);
            let layer = gauss_decompose(&m).unwrap();
            assert!(layer.len() <= n * n);
            assert_eq!(layer_to_gf2(&layer, n).unwrap(), m);
        }
    }

    #[test]
    fn column_move_examples() {
        let e = synthesize_column_move(2, 2, 3).unwrap();
        assert_eq!(layer_to_gf2(&e, 2).unwrap().apply(0b10), 0b01);
        assert!(synthesize_column_move(3, 5, 5).unwrap().is_empty());
        assert_eq!(synthesize_column_move(3, 1, 4), Err(EntangleError::InvalidColumn { column: 1, n: 3 }));
        assert_eq!(synthesize_column_move(2, 2, 5), Err(EntangleError::InvalidColumn { column: 5, n: 2 }));
        let swap_like = CxLayer::new(vec![(1, 0), (0, 1)]);
        assert_eq!(layer_to_gf2(&swap_like, 2).unwrap().apply(0b10), 0b01);
    }

    #[test]
    fn text_formats_round_trip() {
        let layer = CxLayer::new(vec![(1, 0), (2, 1), (0, 2)]);
        assert_eq!(layer.to_string().parse::<CxLayer>().unwrap(), layer);
        assert_eq!("# chain\n1 0\n\n2 1 # tail\n".parse::<CxLayer>().unwrap(), CxLayer::new(vec![(1, 0), (2, 1)]));
        assert!("1 0 3".parse::<CxLayer>().is_err());
        let m = layer_to_gf2(&layer, 3).unwrap();
        assert_eq!(m.to_string().parse::<GF2Matrix>().unwrap(), m);
        assert!("10\n1x".parse::<GF2Matrix>().is_err());
    }

    fn arb_layer() -> impl Strategy<Value = (usize, CxLayer)> {
        (2usize..7).prop_flat_map(|n| {
            let pair = (0..n, 1..n).prop_map(move |(c, d)| (c, (c + d) % n));
            (Just(n), prop::collection::vec(pair, 0..15).prop_map(CxLayer::new))
        })
    }

    proptest! {
        #[test]
        fn prop_concatenation_is_product((n, a) in arb_layer(), b in prop::collection::vec((0usize..2, 0usize..2), 0..4)) {
            let b = CxLayer::new(b.into_iter().filter(|(c, t)| c != t).collect());
            let ma = layer_to_gf2(&a, n).unwrap();
            let mb = layer_to_gf2(&b, n).unwrap();
            prop_assert_eq!(layer_to_gf2(&a.then(&b), n).unwrap(), mb.mul(&ma));
        }

        #[test]
        fn prop_layer_permutations_are_linear((n, layer) in arb_layer()) {
            let m = layer_to_gf2(&layer, n).unwrap();
            let p = BasisPermutation::from_matrix(&m).unwrap();
            prop_assert_eq!(is_linear(&p).unwrap(), m);
        }

        #[test]
        fn prop_powers_cycle_with_period_order((n, layer) in arb_layer()) {
            let m = layer_to_gf2(&layer, n).unwrap();
            let k = order(&m, DEFAULT_ORDER_CAP).unwrap();
            let mut p = GF2Matrix::identity(n);
            let mut seen = Vec::new();
            for _ in 0..2 * k {
                p = p.mul(&m);
                seen.push(p.clone());
            }
            for j in 0..k as usize {
                prop_assert_eq!(&seen[j], &seen[j + k as usize]);
            }
        }
    }
}
