//! Numerical expressive power: the Jacobian of the circuit unitary (or output
//! state) with respect to the raw parameters, and its numerical rank.
//!
//! Derivatives are exact. Each basis column is propagated through the
//! circuit together with one tangent vector per parameter; a rotation
//! `R_P(φ)` with `φ = Σ c_k θ_k + const` adds `c_k·(−i/2)·P·R_P(φ)ψ` to the
//! tangent of `θ_k`.

use std::f64::consts::TAU;

use nalgebra::DMatrix;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::circuit::Circuit;
use crate::qsim::{apply_bound, BoundGate, GateKind, QsimError, C64};

pub const DEFAULT_REL_TOL: f64 = 1e-8;
/// Singular values at or below this are zero regardless of `σ_max`, so a
/// matrix of pure rounding noise has rank 0.
pub const ABS_FLOOR: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RankError {
    #[error("empty matrix")]
    EmptyMatrix,
    #[error("relative tolerance {0} outside (0, 1e-2]")]
    BadTolerance(f64),
    #[error(transparent)]
    Qsim(#[from] QsimError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Unitary,
    State,
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "unitary" => Ok(Mode::Unitary),
            "state" => Ok(Mode::State),
            _ => Err(format!("unknown mode {s:?} (expected unitary or state)")),
        }
    }
}

/// Real Jacobian: real parts stacked over imaginary parts, one column per raw parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobianMatrix(pub DMatrix<f64>);

impl JacobianMatrix {
    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }
}

fn pauli_into(src: &[C64], axis: GateKind, q: usize, coeff: C64, dst: &mut [C64]) {
    let bit = 1usize << q;
    for (x, d) in dst.iter_mut().enumerate() {
        let flipped = src[x ^ bit];
        let v = match axis {
            GateKind::RX => flipped,
            GateKind::RY => {
                // Y|0⟩ = i|1⟩, Y|1⟩ = −i|0⟩
                if x & bit == 0 {
                    C64::new(flipped.im, -flipped.re)
                } else {
                    C64::new(-flipped.im, flipped.re)
                }
            }
            GateKind::RZ => {
                if x & bit == 0 {
                    src[x]
                } else {
                    -src[x]
                }
            }
            _ => unreachable!("only rotations have generators"),
        };
        *d += coeff * v;
    }
}

/// Output column `U|x⟩` and its derivative with respect to every raw parameter.
fn column_with_tangents(c: &Circuit, gates: &[BoundGate], x: usize) -> (Vec<C64>, Vec<Vec<C64>>) {
    let dim = 1usize << c.n_qubits();
    let p = c.param_count();
    let mut psi = vec![C64::new(0.0, 0.0); dim];
    psi[x] = C64::new(1.0, 0.0);
    let mut tangents = vec![Vec::new(); p];
    for (g, bound) in c.gates().iter().zip(gates) {
        apply_bound(&mut psi, bound);
        for t in tangents.iter_mut().filter(|t| !t.is_empty()) {
            apply_bound(t, bound);
        }
        if let Some(e) = &g.expr {
            for (&k, &coeff) in e.terms() {
                let t = &mut tangents[k as usize];
                if t.is_empty() {
                    *t = vec![C64::new(0.0, 0.0); dim];
                }
                pauli_into(&psi, g.kind, g.qubits[0], C64::new(0.0, -0.5 * coeff as f64), t);
            }
        }
    }
    for t in tangents.iter_mut().filter(|t| t.is_empty()) {
        *t = vec![C64::new(0.0, 0.0); dim];
    }
    (psi, tangents)
}

/// Full unitary-mode Jacobian: `2·4^n` rows; row `x·2^n + y` holds `Re ∂U[y,x]`,
/// and the same offset plus `4^n` holds the imaginary part.
pub fn unitary_jacobian(c: &Circuit, theta: &[f64]) -> Result<JacobianMatrix, QsimError> {
    jacobian_rows(c, theta, None)
}

/// Unitary-mode Jacobian restricted to the given row indices (in the full layout).
pub fn unitary_jacobian_rows(c: &Circuit, theta: &[f64], rows: &[usize]) -> Result<JacobianMatrix, QsimError> {
    jacobian_rows(c, theta, Some(rows))
}

fn jacobian_rows(c: &Circuit, theta: &[f64], rows: Option<&[usize]>) -> Result<JacobianMatrix, QsimError> {
    let gates = c.bind(theta)?;
    let dim = 1usize << c.n_qubits();
    let p = c.param_count();
    let block = dim * dim;
    let columns: Vec<Vec<Vec<C64>>> = (0..dim).into_par_iter().map(|x| column_with_tangents(c, &gates, x).1).collect();
    let entry = |r: usize, k: usize| {
        let (re, flat) = if r < block { (true, r) } else { (false, r - block) };
        let v = columns[flat / dim][k][flat % dim];
        if re {
            v.re
        } else {
            v.im
        }
    };
    let m = match rows {
        None => DMatrix::from_fn(2 * block, p, entry),
        Some(sel) => DMatrix::from_fn(sel.len(), p, |i, k| entry(sel[i], k)),
    };
    Ok(JacobianMatrix(m))
}

/// State-mode Jacobian of `U|0…0⟩` with the global-phase direction `i|ψ⟩`
/// projected out of every column: `2·2^n` rows.
pub fn state_jacobian(c: &Circuit, theta: &[f64]) -> Result<JacobianMatrix, QsimError> {
    let gates = c.bind(theta)?;
    let dim = 1usize << c.n_qubits();
    let (psi, mut tangents) = column_with_tangents(c, &gates, 0);
    for t in &mut tangents {
        let overlap: C64 = psi.iter().zip(t.iter()).map(|(a, b)| a.conj() * b).sum();
        // Only the imaginary part of ⟨ψ|∂ψ⟩ can be nonzero for a unit vector.
        let phase = C64::new(0.0, overlap.im);
        for (ti, pi) in t.iter_mut().zip(&psi) {
            *ti -= phase * pi;
        }
    }
    let m = DMatrix::from_fn(2 * dim, c.param_count(), |r, k| {
        if r < dim {
            tangents[k][r].re
        } else {
            tangents[k][r - dim].im
        }
    });
    Ok(JacobianMatrix(m))
}

pub fn singular_values(j: &JacobianMatrix) -> Vec<f64> {
    if j.rows() == 0 || j.cols() == 0 {
        return vec![];
    }
    let mut s: Vec<f64> = j.0.singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Count of singular values above both `rel_tol·σ_max` and [`ABS_FLOOR`].
pub fn numerical_rank(j: &JacobianMatrix, rel_tol: f64) -> Result<usize, RankError> {
    if !(rel_tol > 0.0 && rel_tol <= 1e-2) {
        return Err(RankError::BadTolerance(rel_tol));
    }
    if j.rows() == 0 || j.cols() == 0 {
        return Err(RankError::EmptyMatrix);
    }
    Ok(rank_of(&singular_values(j), rel_tol))
}

fn rank_of(s: &[f64], rel_tol: f64) -> usize {
    let max = s.first().copied().unwrap_or(0.0);
    s.iter().filter(|&&v| v > rel_tol * max && v > ABS_FLOOR).count()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankReport {
    pub mode: Mode,
    pub seeds: Vec<u64>,
    pub ranks: Vec<usize>,
    /// Maximum over seeds.
    pub rank: usize,
    pub rel_tol: f64,
    /// Leading singular values (at most 2·P) at the seed attaining the maximum.
    pub singular_values: Vec<f64>,
    pub rows_subsampled: bool,
    /// Set when seeds disagree (a measure-zero point was hit).
    pub seeds_disagree: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankOptions {
    pub mode: Mode,
    pub seeds: usize,
    pub base_seed: u64,
    pub rel_tol: f64,
}

impl Default for RankOptions {
    fn default() -> Self {
        Self { mode: Mode::Unitary, seeds: 3, base_seed: 0, rel_tol: DEFAULT_REL_TOL }
    }
}

/// Random point in `[0, 2π)^P` for seed `s`.
pub fn random_theta(p: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..p).map(|_| rng.gen_range(0.0..TAU)).collect()
}

pub fn expressive_rank(c: &Circuit, opts: &RankOptions) -> Result<RankReport, RankError> {
    if !(opts.rel_tol > 0.0 && opts.rel_tol <= 1e-2) {
        return Err(RankError::BadTolerance(opts.rel_tol));
    }
    let p = c.param_count();
    let seeds: Vec<u64> = (0..opts.seeds.max(1) as u64).map(|i| opts.base_seed.wrapping_add(i)).collect();
    let n = c.n_qubits();
    let subsample = opts.mode == Mode::Unitary && (p > 200 || n > 8);
    if p == 0 {
        return Ok(RankReport {
            mode: opts.mode,
            ranks: vec![0; seeds.len()],
            seeds,
            rank: 0,
            rel_tol: opts.rel_tol,
            singular_values: vec![],
            rows_subsampled: false,
            seeds_disagree: false,
        });
    }
    let mut spectra = Vec::with_capacity(seeds.len());
    for &s in &seeds {
        let theta = random_theta(p, s);
        let j = match opts.mode {
            Mode::State => state_jacobian(c, &theta)?,
            Mode::Unitary if subsample => {
                let total = 2usize << (2 * n);
                let mut rng = ChaCha8Rng::seed_from_u64(s ^ 0x5EED);
                let mut rows = sample(&mut rng, total, (4 * p).min(total)).into_vec();
                rows.sort_unstable();
                unitary_jacobian_rows(c, &theta, &rows)?
            }
            Mode::Unitary => unitary_jacobian(c, &theta)?,
        };
        spectra.push(singular_values(&j));
    }
    let ranks: Vec<usize> = spectra.iter().map(|s| rank_of(s, opts.rel_tol)).collect();
    let best = (0..ranks.len()).max_by_key(|&i| (ranks[i], std::cmp::Reverse(i))).unwrap_or(0);
    let mut sv = spectra.swap_remove(best);
    sv.truncate(2 * p);
    Ok(RankReport {
        mode: opts.mode,
        rank: ranks[best],
        seeds_disagree: ranks.iter().any(|&r| r != ranks[best]),
        ranks,
        seeds,
        rel_tol: opts.rel_tol,
        singular_values: sv,
        rows_subsampled: subsample,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{build_ansatz, AnsatzSpec, Family, Gate, ParamExpr};
    use crate::qsim::circuit_unitary;

    /// Central differences of vec(U), same row layout as [`unitary_jacobian`].
    fn fd_jacobian(c: &Circuit, theta: &[f64], h: f64) -> DMatrix<f64> {
        let dim = 1usize << c.n_qubits();
        let block = dim * dim;
        let mut m = DMatrix::zeros(2 * block, c.param_count());
        for k in 0..c.param_count() {
            let mut tp = theta.to_vec();
            let mut tm = theta.to_vec();
            tp[k] += h;
            tm[k] -= h;
            let up = circuit_unitary(c, &tp).unwrap();
            let um = circuit_unitary(c, &tm).unwrap();
            for x in 0..dim {
                for y in 0..dim {
                    let d = (up.get(y, x) - um.get(y, x)) / (2.0 * h);
                    m[(x * dim + y, k)] = d.re;
                    m[(block + x * dim + y, k)] = d.im;
                }
            }
        }
        m
    }

    #[test]
    fn single_rx_column_is_generator_insertion() {
        let c = Circuit::new(1, 1, vec![Gate::rx(0, ParamExpr::param(0))]).unwrap();
        let j = unitary_jacobian(&c, &[0.83]).unwrap();
        let fd = fd_jacobian(&c, &[0.83], 1e-5);
        assert!((&j.0 - &fd).amax() < 1e-8);
        // −(i/2)·X·RX(θ): entry (0,0) is −(i/2)·(−i sin θ/2) = −sin(θ/2)/2
        assert!((j.0[(0, 0)] + (0.83f64 / 2.0).sin() / 2.0).abs() < 1e-15);
    }

    #[test]
    fn analytic_matches_finite_differences_every_family() {
        for f in Family::all(3) {
            let c = build_ansatz(&AnsatzSpec::new(f, 3, 2)).unwrap();
            let theta = random_theta(c.param_count(), 11);
            let j = unitary_jacobian(&c, &theta).unwrap();
            let fd = fd_jacobian(&c, &theta, 1e-5);
            for (a, b) in j.0.iter().zip(fd.iter()) {
                assert!((a - b).abs() < 1e-7 * (1.0 + a.abs()));
            }
        }
    }

    #[test]
    fn affine_coefficients_scale_columns() {
        let c = Circuit::new(2, 2, vec![Gate::rx(0, ParamExpr::from_parts([(0, 2), (1, -1)], 1)), Gate::cx(0, 1)]).unwrap();
        let theta = [0.4, -1.2];
        let j = unitary_jacobian(&c, &theta).unwrap();
        let fd = fd_jacobian(&c, &theta, 1e-5);
        assert!((&j.0 - &fd).amax() < 1e-8);
        let col0 = j.0.column(0).into_owned();
        let col1 = j.0.column(1).into_owned();
        assert!((col0 + col1 * 2.0).amax() < 1e-14);
    }

    #[test]
    fn unused_parameter_has_zero_column() {
        let c = Circuit::new(1, 2, vec![Gate::rx(0, ParamExpr::param(1))]).unwrap();
        let j = unitary_jacobian(&c, &[0.1, 0.2]).unwrap();
        assert_eq!(j.0.column(0).amax(), 0.0);
    }

    #[test]
    fn same_axis_chain_has_rank_one() {
        let c = Circuit::new(1, 2, vec![Gate::rx(0, ParamExpr::param(0)), Gate::rx(0, ParamExpr::param(1))]).unwrap();
        let j = unitary_jacobian(&c, &[0.3, 1.4]).unwrap();
        assert!((j.0.column(0) - j.0.column(1)).amax() < 1e-15);
        assert_eq!(numerical_rank(&j, DEFAULT_REL_TOL).unwrap(), 1);
    }

    #[test]
    fn rank_examples() {
        assert_eq!(numerical_rank(&JacobianMatrix(DMatrix::zeros(4, 3)), 1e-8).unwrap(), 0);
        assert_eq!(numerical_rank(&JacobianMatrix(DMatrix::identity(5, 5)), 1e-8).unwrap(), 5);
        assert_eq!(numerical_rank(&JacobianMatrix(DMatrix::zeros(0, 3)), 1e-8), Err(RankError::EmptyMatrix));
        assert!(numerical_rank(&JacobianMatrix(DMatrix::identity(2, 2)), 0.5).is_err());
    }

    #[test]
    fn deep_two_qubit_linear_rank_bounded() {
        let c = build_ansatz(&AnsatzSpec::new(Family::RxCxL, 2, 6)).unwrap();
        let r = expressive_rank(&c, &RankOptions::default()).unwrap();
        assert!(r.rank <= 3);
        assert_eq!(r.rank, 3);
        assert!(!r.seeds_disagree);
    }

    #[test]
    fn zero_parameter_rank() {
        let r = expressive_rank(&Circuit::empty(2), &RankOptions::default()).unwrap();
        assert_eq!(r.rank, 0);
    }

    #[test]
    fn state_mode_drops_global_phase() {
        // RZ on |0⟩ only changes the global phase.
        let c = Circuit::new(1, 1, vec![Gate::rotation(GateKind::RZ, 0, ParamExpr::param(0))]).unwrap();
        let opts = RankOptions { mode: Mode::State, ..Default::default() };
        assert_eq!(expressive_rank(&c, &opts).unwrap().rank, 0);
        let ry = Circuit::new(1, 2, vec![Gate::rotation(GateKind::RY, 0, ParamExpr::param(0)), Gate::rotation(GateKind::RZ, 0, ParamExpr::param(1))]).unwrap();
        assert_eq!(expressive_rank(&ry, &opts).unwrap().rank, 2);
    }

    #[test]
    fn sampled_rows_match_full_layout() {
        let c = build_ansatz(&AnsatzSpec::new(Family::RxRzCxA, 2, 1)).unwrap();
        let theta = random_theta(c.param_count(), 2);
        let full = unitary_jacobian(&c, &theta).unwrap();
        let rows = [0, 5, 17, 31];
        let part = unitary_jacobian_rows(&c, &theta, &rows).unwrap();
        for (i, &r) in rows.iter().enumerate() {
            assert_eq!(part.0.row(i), full.0.row(r));
        }
    }
}
