//! Pauli strings and real-weighted Pauli sums.
//!
//! Character `k` of a Pauli string acts on qubit `k`, matching the
//! little-endian basis labels of [`crate::qsim`].

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use nalgebra::DMatrix;

use super::VqaError;
use crate::qsim::{eigensolve, HermitianMatrix, Statevector, C64};

/// Widest Pauli string accepted by the parser.
pub const MAX_PAULI_QUBITS: usize = 30;
/// Largest arity for the dense eigensolver path of [`exact_minimum`].
pub const MAX_DENSE_QUBITS: usize = 10;
/// Largest arity for the diagonal bitstring scan.
pub const MAX_DIAGONAL_QUBITS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn from_char(c: char) -> Option<Self> {
        Some(match c {
            'I' => Pauli::I,
            'X' => Pauli::X,
            'Y' => Pauli::Y,
            'Z' => Pauli::Z,
            _ => return None,
        })
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// Tensor product of single-qubit Paulis.
///
/// Acting on a basis state, `P|x⟩ = i^{#Y} · (−1)^{|x ∧ z|} · |x ⊕ m⟩` where
/// `m` marks X/Y positions and `z` marks Z/Y positions.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    letters: Vec<Pauli>,
}

impl PauliString {
    pub fn new(letters: Vec<Pauli>) -> Self {
        assert!(letters.len() <= MAX_PAULI_QUBITS, "Pauli string too long");
        Self { letters }
    }

    pub fn identity(n: usize) -> Self {
        Self::new(vec![Pauli::I; n])
    }

    /// `letter` on each listed qubit, identity elsewhere.
    pub fn on(n: usize, sites: &[(usize, Pauli)]) -> Self {
        let mut letters = vec![Pauli::I; n];
        for &(q, p) in sites {
            letters[q] = p;
        }
        Self::new(letters)
    }

    pub fn n_qubits(&self) -> usize {
        self.letters.len()
    }

    pub fn letters(&self) -> &[Pauli] {
        &self.letters
    }

    pub fn flip_mask(&self) -> usize {
        self.mask(|p| matches!(p, Pauli::X | Pauli::Y))
    }

    pub fn phase_mask(&self) -> usize {
        self.mask(|p| matches!(p, Pauli::Z | Pauli::Y))
    }

    pub fn y_count(&self) -> usize {
        self.letters.iter().filter(|&&p| p == Pauli::Y).count()
    }

    /// Only I and Z letters.
    pub fn is_diagonal(&self) -> bool {
        self.flip_mask() == 0
    }

    fn mask(&self, pick: impl Fn(Pauli) -> bool) -> usize {
        self.letters.iter().enumerate().filter(|(_, &p)| pick(p)).map(|(q, _)| 1usize << q).sum()
    }

    /// `i^{#Y}`.
    fn y_phase(&self) -> C64 {
        match self.y_count() % 4 {
            0 => C64::new(1.0, 0.0),
            1 => C64::new(0.0, 1.0),
            2 => C64::new(-1.0, 0.0),
            _ => C64::new(0.0, -1.0),
        }
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.letters.iter().try_for_each(|p| write!(f, "{}", p.as_char()))
    }
}

impl FromStr for PauliString {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.is_empty() {
            return Err("empty Pauli string".into());
        }
        if s.chars().count() > MAX_PAULI_QUBITS {
            return Err(format!("Pauli string longer than {MAX_PAULI_QUBITS}"));
        }
        let letters = s
            .chars()
            .map(|c| Pauli::from_char(c).ok_or_else(|| format!("bad Pauli letter '{c}'")))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::new(letters))
    }
}

/// `Σ_t c_t·P_t + offset` with real coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct Observable {
    n_qubits: usize,
    terms: Vec<(f64, PauliString)>,
    offset: f64,
}

impl Observable {
    pub fn new(n_qubits: usize, terms: Vec<(f64, PauliString)>, offset: f64) -> Result<Self, VqaError> {
        if n_qubits > MAX_PAULI_QUBITS {
            return Err(VqaError::TooManyQubits { qubits: n_qubits, max: MAX_PAULI_QUBITS });
        }
        if !offset.is_finite() || terms.iter().any(|(c, _)| !c.is_finite()) {
            return Err(VqaError::NonFinite);
        }
        if let Some((_, p)) = terms.iter().find(|(_, p)| p.n_qubits() != n_qubits) {
            return Err(VqaError::InconsistentArity { line: 0, expected: n_qubits, got: p.n_qubits() });
        }
        Ok(Self { n_qubits, terms, offset })
    }

    pub fn constant(n_qubits: usize, value: f64) -> Self {
        Self { n_qubits, terms: vec![], offset: value }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn terms(&self) -> &[(f64, PauliString)] {
        &self.terms
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn is_diagonal(&self) -> bool {
        self.terms.iter().all(|(_, p)| p.is_diagonal())
    }

    /// `Σ|c_t| + |offset|`, an upper bound on the spectral radius.
    pub fn weight(&self) -> f64 {
        self.terms.iter().map(|(c, _)| c.abs()).sum::<f64>() + self.offset.abs()
    }

    pub fn scaled(&self, a: f64) -> Self {
        Self {
            n_qubits: self.n_qubits,
            terms: self.terms.iter().map(|(c, p)| (a * c, p.clone())).collect(),
            offset: a * self.offset,
        }
    }

    /// Concatenates the term lists; like terms are not merged.
    pub fn plus(&self, other: &Observable) -> Result<Self, VqaError> {
        if self.n_qubits != other.n_qubits {
            return Err(VqaError::ArityMismatch { observable: other.n_qubits, state: self.n_qubits });
        }
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Ok(Self { n_qubits: self.n_qubits, terms, offset: self.offset + other.offset })
    }

    /// Merges like terms and drops zero coefficients. Terms come out sorted.
    pub fn simplified(&self) -> Self {
        let mut acc: BTreeMap<PauliString, f64> = BTreeMap::new();
        let mut offset = self.offset;
        for (c, p) in &self.terms {
            if p.letters().iter().all(|&l| l == Pauli::I) {
                offset += c;
            } else {
                *acc.entry(p.clone()).or_default() += c;
            }
        }
        let terms = acc.into_iter().filter(|(_, c)| *c != 0.0).map(|(p, c)| (c, p)).collect();
        Self { n_qubits: self.n_qubits, terms, offset }
    }

    /// Diagonal of a Z-only observable, indexed by basis label.
    pub fn diagonal(&self) -> Option<Vec<f64>> {
        if !self.is_diagonal() {
            return None;
        }
        let masks: Vec<(f64, usize)> = self.terms.iter().map(|(c, p)| (*c, p.phase_mask())).collect();
        Some(
            (0..1usize << self.n_qubits)
                .map(|x| {
                    let mut e = self.offset;
                    for &(c, z) in &masks {
                        e += if (x & z).count_ones() % 2 == 0 { c } else { -c };
                    }
                    e
                })
                .collect(),
        )
    }

    /// Dense `2^n × 2^n` matrix.
    pub fn dense(&self) -> Result<HermitianMatrix, VqaError> {
        if self.n_qubits > MAX_DENSE_QUBITS + 2 {
            return Err(VqaError::DimensionTooLarge { qubits: self.n_qubits, max: MAX_DENSE_QUBITS + 2 });
        }
        let dim = 1usize << self.n_qubits;
        let mut m = DMatrix::<C64>::from_diagonal_element(dim, dim, C64::new(self.offset, 0.0));
        for (c, p) in &self.terms {
            let (flip, z, ph) = (p.flip_mask(), p.phase_mask(), p.y_phase() * *c);
            for x in 0..dim {
                let sign = if (x & z).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
                m[(x ^ flip, x)] += ph * sign;
            }
        }
        Ok(HermitianMatrix::new(m))
    }

    /// Text form accepted by [`Observable::from_str`]; round-trips exactly.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        if self.offset != 0.0 || self.terms.is_empty() {
            out.push_str(&format!("offset {}\n", self.offset));
        }
        for (c, p) in &self.terms {
            out.push_str(&format!("{c} {p}\n"));
        }
        out
    }

    /// Parses the Pauli-sum text format. `n_hint` fixes the arity for files
    /// holding only an offset.
    pub fn parse_with_arity(text: &str, n_hint: Option<usize>) -> Result<Self, VqaError> {
        let mut terms = vec![];
        let mut offset: Option<f64> = None;
        let mut arity = n_hint;
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |reason: String| VqaError::Parse { line: line_no, reason };
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 2 {
                return Err(bad(format!("expected 2 fields, found {}", fields.len())));
            }
            if fields[0] == "offset" {
                if offset.is_some() {
                    return Err(bad("duplicate offset line".into()));
                }
                let v: f64 = fields[1].parse().map_err(|_| bad(format!("bad offset '{}'", fields[1])))?;
                if !v.is_finite() {
                    return Err(bad("offset is not finite".into()));
                }
                offset = Some(v);
                continue;
            }
            let c: f64 = fields[0].parse().map_err(|_| bad(format!("bad coefficient '{}'", fields[0])))?;
            if !c.is_finite() {
                return Err(bad("coefficient is not finite".into()));
            }
            let p: PauliString = fields[1].parse().map_err(bad)?;
            match arity {
                Some(n) if n != p.n_qubits() => {
                    return Err(VqaError::InconsistentArity { line: line_no, expected: n, got: p.n_qubits() })
                }
                _ => arity = Some(p.n_qubits()),
            }
            terms.push((c, p));
        }
        let n = arity.ok_or_else(|| VqaError::Parse { line: 0, reason: "no Pauli terms".into() })?;
        Observable::new(n, terms, offset.unwrap_or(0.0))
    }
}

impl FromStr for Observable {
    type Err = VqaError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Observable::parse_with_arity(s, None)
    }
}

pub fn load_hamiltonian(path: impl AsRef<Path>) -> Result<Observable, VqaError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| VqaError::Io(format!("{}: {e}", path.display())))?;
    text.parse()
}

pub fn save_hamiltonian(o: &Observable, path: impl AsRef<Path>) -> Result<(), VqaError> {
    let path = path.as_ref();
    std::fs::write(path, o.to_text()).map_err(|e| VqaError::Io(format!("{}: {e}", path.display())))
}

/// `⟨ψ|P|ψ⟩` for one Pauli string, before dropping the imaginary part.
fn pauli_expectation(amps: &[C64], p: &PauliString) -> C64 {
    let (flip, z) = (p.flip_mask(), p.phase_mask());
    let mut acc = C64::new(0.0, 0.0);
    for (x, &a) in amps.iter().enumerate() {
        let v = amps[x ^ flip].conj() * a;
        if (x & z).count_ones() % 2 == 0 {
            acc += v;
        } else {
            acc -= v;
        }
    }
    acc * p.y_phase()
}

/// Imaginary part tolerated before [`expectation`] reports an error.
const IMAG_TOL: f64 = 1e-10;

pub(crate) fn expectation_amps(amps: &[C64], o: &Observable) -> Result<f64, VqaError> {
    let mut total = C64::new(o.offset, 0.0);
    for (c, p) in &o.terms {
        total += pauli_expectation(amps, p) * *c;
    }
    if total.im.abs() > IMAG_TOL * o.weight().max(1.0) {
        return Err(VqaError::ImaginaryResidue(total.im));
    }
    Ok(total.re)
}

/// `⟨ψ|O|ψ⟩`.
pub fn expectation(state: &Statevector, o: &Observable) -> Result<f64, VqaError> {
    if state.n_qubits() != o.n_qubits {
        return Err(VqaError::ArityMismatch { observable: o.n_qubits, state: state.n_qubits() });
    }
    expectation_amps(state.amps(), o)
}

#[derive(Debug, Clone, PartialEq)]
pub enum Witness {
    Bitstring(usize),
    Eigenvector(Vec<C64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExactMinimum {
    pub energy: f64,
    pub witness: Witness,
}

/// Minimum eigenvalue; diagonal observables take the bitstring scan.
pub fn exact_minimum(o: &Observable) -> Result<ExactMinimum, VqaError> {
    if o.is_diagonal() && o.n_qubits <= MAX_DIAGONAL_QUBITS {
        exact_minimum_diagonal(o)
    } else {
        exact_minimum_dense(o)
    }
}

pub fn exact_minimum_diagonal(o: &Observable) -> Result<ExactMinimum, VqaError> {
    if o.n_qubits > MAX_DIAGONAL_QUBITS {
        return Err(VqaError::DimensionTooLarge { qubits: o.n_qubits, max: MAX_DIAGONAL_QUBITS });
    }
    let d = o.diagonal().ok_or(VqaError::NotDiagonal)?;
    let (x, &e) = d.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)).expect("nonempty diagonal");
    Ok(ExactMinimum { energy: e, witness: Witness::Bitstring(x) })
}

pub fn exact_minimum_dense(o: &Observable) -> Result<ExactMinimum, VqaError> {
    if o.n_qubits > MAX_DENSE_QUBITS {
        return Err(VqaError::DimensionTooLarge { qubits: o.n_qubits, max: MAX_DENSE_QUBITS });
    }
    let eig = eigensolve(&o.dense()?)?;
    let v = eig.vectors.matrix().column(0).iter().copied().collect();
    Ok(ExactMinimum { energy: eig.values[0], witness: Witness::Eigenvector(v) })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn obs(text: &str) -> Observable {
        text.parse().unwrap()
    }

    #[test]
    fn z_on_basis_states() {
        let z = obs("1 Z");
        assert_eq!(expectation(&Statevector::basis(1, 0), &z).unwrap(), 1.0);
        assert_eq!(expectation(&Statevector::basis(1, 1), &z).unwrap(), -1.0);
    }

    #[test]
    fn y_acts_with_correct_phase() {
        let y = PauliString::from_str("Y").unwrap();
        let plus_i = Statevector::from_amps(vec![C64::new(1.0, 0.0), C64::new(0.0, 1.0)]);
        assert!((pauli_expectation(plus_i.amps(), &y) - C64::new(1.0, 0.0)).norm() < 1e-15);
        let m = obs("1 Y").dense().unwrap();
        assert_eq!(m.matrix()[(1, 0)], C64::new(0.0, 1.0));
        assert_eq!(m.matrix()[(0, 1)], C64::new(0.0, -1.0));
    }

    #[test]
    fn qubit_zero_is_first_character() {
        // Z on qubit 0 only: |x=1⟩ has qubit 0 set.
        let o = obs("1 ZI");
        assert_eq!(expectation(&Statevector::basis(2, 1), &o).unwrap(), -1.0);
        assert_eq!(expectation(&Statevector::basis(2, 2), &o).unwrap(), 1.0);
    }

    #[test]
    fn parse_examples() {
        let o = obs("1.0 ZZ\n0.5 XI");
        assert_eq!((o.terms().len(), o.n_qubits()), (2, 2));
        let y = obs("# comment\n\n-0.25 IZXY\noffset 1.5\n");
        assert_eq!(y.terms()[0].1.to_string(), "IZXY");
        assert_eq!(y.offset(), 1.5);
    }

    #[test]
    fn parse_errors() {
        assert!(matches!("1 ZZ\n2 Z".parse::<Observable>(), Err(VqaError::InconsistentArity { line: 2, .. })));
        assert!(matches!("1 ZQ".parse::<Observable>(), Err(VqaError::Parse { line: 1, .. })));
        assert!(matches!("x ZZ".parse::<Observable>(), Err(VqaError::Parse { line: 1, .. })));
        assert!(matches!("1 ZZ 3".parse::<Observable>(), Err(VqaError::Parse { line: 1, .. })));
        assert!(matches!("offset 1\noffset 2\n1 Z".parse::<Observable>(), Err(VqaError::Parse { line: 2, .. })));
        assert!(matches!("".parse::<Observable>(), Err(VqaError::Parse { .. })));
        assert!(matches!("inf Z".parse::<Observable>(), Err(VqaError::Parse { .. })));
    }

    #[test]
    fn offset_only_needs_arity_hint() {
        let o = Observable::parse_with_arity("offset -1", Some(3)).unwrap();
        assert_eq!(o.n_qubits(), 3);
        assert_eq!(exact_minimum(&o).unwrap().energy, -1.0);
    }

    #[test]
    fn exact_minimum_examples() {
        let m = exact_minimum(&obs("1 Z")).unwrap();
        assert_eq!(m.energy, -1.0);
        assert_eq!(m.witness, Witness::Bitstring(1));
        let d = exact_minimum_dense(&obs("1 X")).unwrap();
        assert!((d.energy + 1.0).abs() < 1e-14);
        let big = Observable::new(11, vec![(1.0, PauliString::on(11, &[(0, Pauli::X)]))], 0.0).unwrap();
        assert!(matches!(exact_minimum(&big), Err(VqaError::DimensionTooLarge { .. })));
    }

    #[test]
    fn simplify_merges_terms() {
        let o = obs("1 ZZ\n2 ZZ\n0.5 II\n1 XI\n-1 XI").simplified();
        assert_eq!(o.terms().len(), 1);
        assert_eq!(o.terms()[0].0, 3.0);
        assert_eq!(o.offset(), 0.5);
    }
}
