//! Dense statevector simulation.
//!
//! Bit convention: little-endian. Qubit `i` contributes `2^i` to a basis
//! index, so `|x⟩` with `x = 0b10` has qubit 1 set and qubit 0 clear.
//! Rotations follow `R_P(θ) = cos(θ/2)·I − i·sin(θ/2)·P`.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use thiserror::Error;

use crate::circuit::Circuit;

pub type C64 = Complex64;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Largest matrix dimension accepted by [`eigensolve`].
pub const MAX_EIGEN_DIM: usize = 1 << 12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QsimError {
    #[error("qubit index {qubit} out of range for {n} qubits")]
    IndexOutOfRange { qubit: usize, n: usize },
    #[error("{kind:?} needs {expected} qubit(s), got {got}")]
    WrongQubitCount { kind: GateKind, expected: usize, got: usize },
    #[error("CX control and target coincide (qubit {0})")]
    DuplicateQubit(usize),
    #[error("rotation {0:?} needs an angle")]
    MissingAngle(GateKind),
    #[error("{0:?} takes no angle")]
    UnexpectedAngle(GateKind),
    #[error("expected {expected} parameters, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("matrix is not unitary (deviation {0:.3e})")]
    NotUnitary(f64),
    #[error("dimension {0} exceeds the eigensolver limit")]
    DimensionTooLarge(usize),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
pub enum GateKind {
    RX,
    RY,
    RZ,
    X,
    CX,
}

impl GateKind {
    pub fn is_rotation(self) -> bool {
        matches!(self, GateKind::RX | GateKind::RY | GateKind::RZ)
    }

    pub fn arity(self) -> usize {
        if self == GateKind::CX {
            2
        } else {
            1
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GateKind::RX => "RX",
            GateKind::RY => "RY",
            GateKind::RZ => "RZ",
            GateKind::X => "X",
            GateKind::CX => "CX",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Some(match s {
            "RX" => GateKind::RX,
            "RY" => GateKind::RY,
            "RZ" => GateKind::RZ,
            "X" => GateKind::X,
            "CX" => GateKind::CX,
            _ => return None,
        })
    }
}

/// A gate with every angle resolved to a number.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundGate {
    Rx(usize, f64),
    Ry(usize, f64),
    Rz(usize, f64),
    X(usize),
    Cx { control: usize, target: usize },
}

impl BoundGate {
    /// Validating constructor mirroring the `(kind, qubits, angle)` triple.
    pub fn new(kind: GateKind, qubits: &[usize], angle: Option<f64>, n: usize) -> Result<Self, QsimError> {
        if qubits.len() != kind.arity() {
            return Err(QsimError::WrongQubitCount { kind, expected: kind.arity(), got: qubits.len() });
        }
        if let Some(&q) = qubits.iter().find(|&&q| q >= n) {
            return Err(QsimError::IndexOutOfRange { qubit: q, n });
        }
        match (kind.is_rotation(), angle) {
            (true, None) => return Err(QsimError::MissingAngle(kind)),
            (false, Some(_)) => return Err(QsimError::UnexpectedAngle(kind)),
            _ => {}
        }
        let q = qubits[0];
        Ok(match kind {
            GateKind::RX => BoundGate::Rx(q, angle.unwrap_or_default()),
            GateKind::RY => BoundGate::Ry(q, angle.unwrap_or_default()),
            GateKind::RZ => BoundGate::Rz(q, angle.unwrap_or_default()),
            GateKind::X => BoundGate::X(q),
            GateKind::CX => {
                if qubits[1] == q {
                    return Err(QsimError::DuplicateQubit(q));
                }
                BoundGate::Cx { control: q, target: qubits[1] }
            }
        })
    }

    pub fn max_qubit(&self) -> usize {
        match *self {
            BoundGate::Rx(q, _) | BoundGate::Ry(q, _) | BoundGate::Rz(q, _) | BoundGate::X(q) => q,
            BoundGate::Cx { control, target } => control.max(target),
        }
    }
}

/// 2×2 matrix of a rotation gate, row-major.
pub fn rotation_matrix(kind: GateKind, theta: f64) -> [[C64; 2]; 2] {
    let (s, c) = (theta / 2.0).sin_cos();
    match kind {
        GateKind::RX => [[C64::new(c, 0.0), C64::new(0.0, -s)], [C64::new(0.0, -s), C64::new(c, 0.0)]],
        GateKind::RY => [[C64::new(c, 0.0), C64::new(-s, 0.0)], [C64::new(s, 0.0), C64::new(c, 0.0)]],
        GateKind::RZ => [[C64::new(c, -s), ZERO], [ZERO, C64::new(c, s)]],
        GateKind::X => [[ZERO, ONE], [ONE, ZERO]],
        GateKind::CX => panic!("CX is not a single-qubit gate"),
    }
}

#[inline]
fn apply_1q(amps: &mut [C64], q: usize, m: &[[C64; 2]; 2]) {
    let bit = 1usize << q;
    let len = amps.len();
    let mut base = 0;
    while base < len {
        for x in base..base + bit {
            let a = amps[x];
            let b = amps[x | bit];
            amps[x] = m[0][0] * a + m[0][1] * b;
            amps[x | bit] = m[1][0] * a + m[1][1] * b;
        }
        base += bit << 1;
    }
}

/// Applies a bound gate in place to an amplitude slice of length `2^n`.
pub fn apply_bound(amps: &mut [C64], gate: &BoundGate) {
    match *gate {
        BoundGate::Rx(q, t) => apply_1q(amps, q, &rotation_matrix(GateKind::RX, t)),
        BoundGate::Ry(q, t) => apply_1q(amps, q, &rotation_matrix(GateKind::RY, t)),
        BoundGate::Rz(q, t) => {
            let (s, c) = (t / 2.0).sin_cos();
            let (lo, hi) = (C64::new(c, -s), C64::new(c, s));
            let bit = 1usize << q;
            for (x, a) in amps.iter_mut().enumerate() {
                *a *= if x & bit == 0 { lo } else { hi };
            }
        }
        BoundGate::X(q) => {
            let bit = 1usize << q;
            for x in 0..amps.len() {
                if x & bit == 0 {
                    amps.swap(x, x | bit);
                }
            }
        }
        BoundGate::Cx { control, target } => {
            let (cb, tb) = (1usize << control, 1usize << target);
            for x in 0..amps.len() {
                if x & cb != 0 && x & tb == 0 {
                    amps.swap(x, x | tb);
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Statevector {
    n_qubits: usize,
    amps: Vec<C64>,
}

impl Statevector {
    /// `|0…0⟩` on `n` qubits.
    pub fn zero(n: usize) -> Self {
        Self::basis(n, 0)
    }

    pub fn basis(n: usize, x: usize) -> Self {
        let mut amps = vec![ZERO; 1 << n];
        amps[x] = ONE;
        Self { n_qubits: n, amps }
    }

    /// Wraps raw amplitudes, normalizing them. Panics unless the length is a power of two.
    pub fn from_amps(amps: Vec<C64>) -> Self {
        assert!(amps.len().is_power_of_two(), "amplitude count must be a power of two");
        let n = amps.len().trailing_zeros() as usize;
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        assert!(norm > 0.0, "zero vector");
        Self { n_qubits: n, amps: amps.into_iter().map(|a| a / norm).collect() }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amps(&self) -> &[C64] {
        &self.amps
    }

    pub fn into_amps(self) -> Vec<C64> {
        self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &Statevector) -> C64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn apply_gate(&mut self, kind: GateKind, qubits: &[usize], angle: Option<f64>) -> Result<(), QsimError> {
        let g = BoundGate::new(kind, qubits, angle, self.n_qubits)?;
        apply_bound(&mut self.amps, &g);
        Ok(())
    }

    pub fn apply(&mut self, gate: &BoundGate) -> Result<(), QsimError> {
        let q = gate.max_qubit();
        if q >= self.n_qubits {
            return Err(QsimError::IndexOutOfRange { qubit: q, n: self.n_qubits });
        }
        apply_bound(&mut self.amps, gate);
        Ok(())
    }

    pub fn apply_all(&mut self, gates: &[BoundGate]) -> Result<(), QsimError> {
        gates.iter().try_for_each(|g| self.apply(g))
    }
}

/// Square complex matrix of dimension `2^n` (column `x` is the image of `|x⟩`).
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryMatrix(pub DMatrix<C64>);

impl UnitaryMatrix {
    pub fn identity(dim: usize) -> Self {
        Self(DMatrix::identity(dim, dim))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.0[(row, col)]
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.0
    }

    /// Frobenius norm of `U†U − I`.
    pub fn unitarity_defect(&self) -> f64 {
        let d = self.dim();
        (self.0.adjoint() * &self.0 - DMatrix::<C64>::identity(d, d)).norm()
    }

    pub fn frobenius_distance(&self, other: &UnitaryMatrix) -> f64 {
        (&self.0 - &other.0).norm()
    }
}

/// Unitary of a bound gate list on `n` qubits, built column by column.
pub fn gates_unitary(n: usize, gates: &[BoundGate]) -> UnitaryMatrix {
    let dim = 1usize << n;
    let mut m = DMatrix::<C64>::identity(dim, dim);
    for mut col in m.column_iter_mut() {
        let slice = col.as_mut_slice();
        for g in gates {
            apply_bound(slice, g);
        }
    }
    UnitaryMatrix(m)
}

/// Unitary of `circuit` at parameters `theta`.
pub fn circuit_unitary(circuit: &Circuit, theta: &[f64]) -> Result<UnitaryMatrix, QsimError> {
    let gates = circuit.bind(theta)?;
    Ok(gates_unitary(circuit.n_qubits(), &gates))
}

/// Output state of `circuit` on `|0…0⟩`.
pub fn circuit_state(circuit: &Circuit, theta: &[f64]) -> Result<Statevector, QsimError> {
    let gates = circuit.bind(theta)?;
    let mut s = Statevector::zero(circuit.n_qubits());
    for g in &gates {
        apply_bound(&mut s.amps, g);
    }
    Ok(s)
}

/// `min_φ ‖U − e^{iφ}V‖_F`, attained at `φ = −arg tr(U†V)`.
pub fn phase_distance(u: &UnitaryMatrix, v: &UnitaryMatrix) -> Result<f64, QsimError> {
    if u.dim() != v.dim() {
        return Err(QsimError::DimensionMismatch(u.dim(), v.dim()));
    }
    let tr: C64 = u.0.iter().zip(v.0.iter()).map(|(a, b)| a.conj() * b).sum();
    // Summing the residual directly avoids the cancellation in the closed form.
    let p = if tr.norm() > 0.0 { tr.conj() / tr.norm() } else { ONE };
    Ok(u.0.iter().zip(v.0.iter()).map(|(a, b)| (a - p * b).norm_sqr()).sum::<f64>().sqrt())
}

/// Euler angles with `e^{iφ}·RZ(γ)·RX(β)·RZ(α) = U` and `β ∈ [0, π]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EulerZxz {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub phase: f64,
}

impl EulerZxz {
    pub fn matrix(&self) -> [[C64; 2]; 2] {
        let a = rotation_matrix(GateKind::RZ, self.alpha);
        let b = rotation_matrix(GateKind::RX, self.beta);
        let g = rotation_matrix(GateKind::RZ, self.gamma);
        let p = C64::from_polar(1.0, self.phase);
        let m = mul2(&g, &mul2(&b, &a));
        [[p * m[0][0], p * m[0][1]], [p * m[1][0], p * m[1][1]]]
    }
}

pub fn mul2(a: &[[C64; 2]; 2], b: &[[C64; 2]; 2]) -> [[C64; 2]; 2] {
    let mut out = [[ZERO; 2]; 2];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

pub fn dist2(a: &[[C64; 2]; 2], b: &[[C64; 2]; 2]) -> f64 {
    a.iter().flatten().zip(b.iter().flatten()).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
}

pub fn euler_zxz(u: &[[C64; 2]; 2]) -> Result<EulerZxz, QsimError> {
    let adj = [[u[0][0].conj(), u[1][0].conj()], [u[0][1].conj(), u[1][1].conj()]];
    let defect = dist2(&mul2(&adj, u), &[[ONE, ZERO], [ZERO, ONE]]);
    if defect > 1e-9 {
        return Err(QsimError::NotUnitary(defect));
    }
    let det = u[0][0] * u[1][1] - u[0][1] * u[1][0];
    let phase = det.arg() / 2.0;
    let rot = C64::from_polar(1.0, -phase);
    let (w00, w01) = (u[0][0] * rot, u[0][1] * rot);
    let beta = 2.0 * w01.norm().atan2(w00.norm());
    let iw01 = C64::i() * w01;
    let (alpha, gamma) = if w01.norm() < 1e-14 {
        (-2.0 * w00.arg(), 0.0)
    } else if w00.norm() < 1e-14 {
        (2.0 * iw01.arg(), 0.0)
    } else {
        let sum = -2.0 * w00.arg();
        let diff = 2.0 * iw01.arg();
        ((sum + diff) / 2.0, (sum - diff) / 2.0)
    };
    Ok(EulerZxz { alpha, beta, gamma, phase })
}

/// Hermitian matrix; the constructor symmetrizes its input as `(H + H†)/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix(DMatrix<C64>);

impl HermitianMatrix {
    pub fn new(m: DMatrix<C64>) -> Self {
        assert!(m.is_square(), "Hermitian matrix must be square");
        let sym = (&m + m.adjoint()) * C64::new(0.5, 0.0);
        Self(sym)
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let d = diag.len();
        Self(DMatrix::from_fn(d, d, |i, j| if i == j { C64::new(diag[i], 0.0) } else { ZERO }))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.0
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.0.norm()
    }
}

#[derive(Debug, Clone)]
pub struct Eigen {
    /// Ascending.
    pub values: Vec<f64>,
    /// Column `i` is the eigenvector of `values[i]`.
    pub vectors: UnitaryMatrix,
}

pub fn eigensolve(h: &HermitianMatrix) -> Result<Eigen, QsimError> {
    let d = h.dim();
    if d > MAX_EIGEN_DIM {
        return Err(QsimError::DimensionTooLarge(d));
    }
    if d == 0 {
        return Ok(Eigen { values: vec![], vectors: UnitaryMatrix(DMatrix::zeros(0, 0)) });
    }
    let eig = SymmetricEigen::new(h.0.clone());
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(d, d, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok(Eigen { values, vectors: UnitaryMatrix(vectors) })
}
