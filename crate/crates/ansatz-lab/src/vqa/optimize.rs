//! Multistart derivative-free minimization of `⟨ψ(θ)|O|ψ(θ)⟩`.

use std::f64::consts::TAU;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::pauli::{self, exact_minimum, expectation_amps, Observable};
use super::VqaError;
use crate::circuit::Circuit;
use crate::qsim::{apply_bound, C64};

/// Outcome of one local minimization.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalMin {
    pub x: Vec<f64>,
    pub f: f64,
    pub evaluations: usize,
    pub iterations: usize,
}

/// A local derivative-free minimizer.
pub trait Minimizer: Sync {
    fn minimize(&self, f: &mut dyn FnMut(&[f64]) -> f64, x0: Vec<f64>, budget: usize) -> LocalMin;
}

/// Nelder–Mead with dimension-dependent coefficients.
///
/// Stops when the spread of function values over the simplex falls below
/// `tol`. The simplex is then rebuilt around the best vertex; the run ends once
/// a rebuild fails to improve the best value by more than `tol`, or the budget
/// runs out.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NelderMead {
    pub tol: f64,
    pub initial_step: f64,
    /// Rebuild the simplex after this many iterations without improving the
    /// best vertex by more than `tol`; 0 disables.
    pub stall_iterations: usize,
}

impl Default for NelderMead {
    fn default() -> Self {
        Self { tol: 1e-9, initial_step: 0.5, stall_iterations: 0 }
    }
}

impl NelderMead {
    fn coefficients(d: usize) -> (f64, f64, f64, f64) {
        let d = d.max(2) as f64;
        (1.0, 1.0 + 2.0 / d, 0.75 - 1.0 / (2.0 * d), 1.0 - 1.0 / d)
    }

    fn run_simplex(
        &self,
        f: &mut dyn FnMut(&[f64]) -> f64,
        x0: &[f64],
        f0: f64,
        evals: &mut usize,
        iters: &mut usize,
        budget: usize,
    ) -> (Vec<f64>, f64) {
        let d = x0.len();
        let (alpha, beta, gamma, delta) = Self::coefficients(d);
        let mut pts: Vec<Vec<f64>> = vec![x0.to_vec()];
        let mut vals = vec![f0];
        for i in 0..d {
            if *evals >= budget {
                break;
            }
            let mut p = x0.to_vec();
            p[i] += self.initial_step;
            vals.push(f(&p));
            *evals += 1;
            pts.push(p);
        }
        if pts.len() < d + 1 {
            let best = (0..vals.len()).min_by(|&a, &b| vals[a].total_cmp(&vals[b])).unwrap_or(0);
            return (pts[best].clone(), vals[best]);
        }
        let mut order: Vec<usize> = (0..=d).collect();
        let mut centroid = vec![0.0; d];
        let mut trial = vec![0.0; d];
        let (mut record, mut since) = (f64::INFINITY, 0);
        loop {
            order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
            let (best, worst, second) = (order[0], order[d], order[d - 1]);
            if vals[best] < record - self.tol {
                (record, since) = (vals[best], 0);
            } else {
                since += 1;
            }
            let stalled = self.stall_iterations > 0 && since >= self.stall_iterations;
            if vals[worst] - vals[best] <= self.tol || *evals >= budget || stalled {
                return (pts[best].clone(), vals[best]);
            }
            *iters += 1;
            centroid.iter_mut().for_each(|c| *c = 0.0);
            for &k in &order[..d] {
                for (c, x) in centroid.iter_mut().zip(&pts[k]) {
                    *c += x;
                }
            }
            centroid.iter_mut().for_each(|c| *c /= d as f64);

            let point = |t: f64, out: &mut Vec<f64>, pts: &[Vec<f64>]| {
                for ((o, c), w) in out.iter_mut().zip(&centroid).zip(&pts[worst]) {
                    *o = c + t * (c - w);
                }
            };
            point(alpha, &mut trial, &pts);
            let fr = f(&trial);
            *evals += 1;
            if fr < vals[best] {
                let reflected = trial.clone();
                point(alpha * beta, &mut trial, &pts);
                let fe = f(&trial);
                *evals += 1;
                if fe < fr {
                    pts[worst].copy_from_slice(&trial);
                    vals[worst] = fe;
                } else {
                    pts[worst] = reflected;
                    vals[worst] = fr;
                }
                continue;
            }
            if fr < vals[second] {
                pts[worst].copy_from_slice(&trial);
                vals[worst] = fr;
                continue;
            }
            let (t, bound) = if fr < vals[worst] { (alpha * gamma, fr) } else { (-gamma, vals[worst]) };
            point(t, &mut trial, &pts);
            let fc = f(&trial);
            *evals += 1;
            if fc < bound || (t > 0.0 && fc <= bound) {
                pts[worst].copy_from_slice(&trial);
                vals[worst] = fc;
                continue;
            }
            let anchor = pts[best].clone();
            for &k in &order[1..] {
                if *evals >= budget {
                    break;
                }
                for (x, a) in pts[k].iter_mut().zip(&anchor) {
                    *x = a + delta * (*x - a);
                }
                vals[k] = f(&pts[k]);
                *evals += 1;
            }
        }
    }
}

impl Minimizer for NelderMead {
    fn minimize(&self, f: &mut dyn FnMut(&[f64]) -> f64, x0: Vec<f64>, budget: usize) -> LocalMin {
        let mut evals = 1;
        let mut iterations = 0;
        let mut best = (x0.clone(), f(&x0));
        if x0.is_empty() {
            return LocalMin { x: best.0, f: best.1, evaluations: evals, iterations };
        }
        while evals < budget {
            let (x, fx) = self.run_simplex(f, &best.0, best.1, &mut evals, &mut iterations, budget);
            let gain = best.1 - fx;
            if fx < best.1 {
                best = (x, fx);
            }
            if gain <= self.tol {
                break;
            }
        }
        LocalMin { x: best.0, f: best.1, evaluations: evals, iterations }
    }
}

/// `θ ↦ ⟨0|U(θ)† O U(θ)|0⟩` with a reusable workspace.
pub struct EnergyFn<'a> {
    circuit: &'a Circuit,
    observable: &'a Observable,
    diagonal: Option<Vec<f64>>,
    amps: Vec<C64>,
}

impl<'a> EnergyFn<'a> {
    pub fn new(circuit: &'a Circuit, observable: &'a Observable) -> Result<Self, VqaError> {
        if circuit.n_qubits() != observable.n_qubits() {
            return Err(VqaError::ArityMismatch { observable: observable.n_qubits(), state: circuit.n_qubits() });
        }
        let diagonal = if observable.n_qubits() <= pauli::MAX_DIAGONAL_QUBITS { observable.diagonal() } else { None };
        Ok(Self { circuit, observable, diagonal, amps: vec![C64::new(0.0, 0.0); 1 << circuit.n_qubits()] })
    }

    pub fn energy(&mut self, theta: &[f64]) -> Result<f64, VqaError> {
        let gates = self.circuit.bind(theta)?;
        self.amps.iter_mut().for_each(|a| *a = C64::new(0.0, 0.0));
        self.amps[0] = C64::new(1.0, 0.0);
        for g in &gates {
            apply_bound(&mut self.amps, g);
        }
        match &self.diagonal {
            Some(d) => Ok(self.amps.iter().zip(d).map(|(a, e)| a.norm_sqr() * e).sum()),
            None => expectation_amps(&self.amps, self.observable),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizeConfig {
    pub restarts: usize,
    pub seed: u64,
    /// Function evaluations per restart; `None` means `500·P`.
    pub max_evals: Option<usize>,
    pub minimizer: NelderMead,
    /// Stop launching restarts once one reaches this ε.
    pub target_epsilon: Option<f64>,
}

impl Default for OptimizeConfig {
    fn default() -> Self {
        Self { restarts: 10, seed: 0, max_evals: None, minimizer: NelderMead::default(), target_epsilon: None }
    }
}

impl OptimizeConfig {
    pub fn budget(&self, params: usize) -> usize {
        self.max_evals.unwrap_or(500 * params.max(1))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunResult {
    #[serde(rename = "E_a")]
    pub e_a: f64,
    #[serde(rename = "E")]
    pub e: f64,
    pub epsilon: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub restarts: usize,
    pub best_restart: usize,
    pub seed: u64,
    pub wall_time_s: f64,
    pub best_theta: Vec<f64>,
    pub restart_energies: Vec<f64>,
}

impl RunResult {
    /// Equality ignoring wall time.
    pub fn same_outcome(&self, other: &RunResult) -> bool {
        RunResult { wall_time_s: 0.0, ..self.clone() } == RunResult { wall_time_s: 0.0, ..other.clone() }
    }
}

/// Start point of restart `r`: uniform in `[0, 2π)^P` from stream `r` of `seed`.
pub fn restart_start(seed: u64, r: usize, params: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(r as u64);
    (0..params).map(|_| rng.gen_range(0.0..TAU)).collect()
}

fn run_restart(c: &Circuit, o: &Observable, cfg: &OptimizeConfig, r: usize) -> Result<LocalMin, VqaError> {
    let mut energy = EnergyFn::new(c, o)?;
    let x0 = restart_start(cfg.seed, r, c.param_count());
    let mut f = |t: &[f64]| energy.energy(t).expect("arity checked");
    Ok(cfg.minimizer.minimize(&mut f, x0, cfg.budget(c.param_count())))
}

/// Like [`optimize`], with the exact minimum supplied by the caller.
pub fn optimize_against(c: &Circuit, o: &Observable, exact: f64, cfg: &OptimizeConfig) -> Result<RunResult, VqaError> {
    if c.n_qubits() != o.n_qubits() {
        return Err(VqaError::ArityMismatch { observable: o.n_qubits(), state: c.n_qubits() });
    }
    if cfg.restarts == 0 {
        return Err(VqaError::BadConfig("restarts must be positive".into()));
    }
    let start = Instant::now();
    let batch = match cfg.target_epsilon {
        Some(_) => rayon::current_num_threads().max(1),
        None => cfg.restarts,
    };
    let mut runs: Vec<LocalMin> = vec![];
    let mut used = cfg.restarts;
    while runs.len() < cfg.restarts {
        let lo = runs.len();
        let hi = (lo + batch).min(cfg.restarts);
        let chunk = (lo..hi).into_par_iter().map(|r| run_restart(c, o, cfg, r)).collect::<Result<Vec<_>, _>>()?;
        runs.extend(chunk);
        if let Some(target) = cfg.target_epsilon {
            if let Some(hit) = runs.iter().position(|m| (m.f - exact).abs() < target) {
                used = hit + 1;
                break;
            }
        }
    }
    runs.truncate(used);
    let best = (0..runs.len()).fold(0, |b, r| if runs[r].f < runs[b].f { r } else { b });
    let e_a = runs[best].f;
    Ok(RunResult {
        e_a,
        e: exact,
        epsilon: (e_a - exact).abs(),
        iterations: runs.iter().map(|m| m.iterations).sum(),
        evaluations: runs.iter().map(|m| m.evaluations).sum(),
        restarts: runs.len(),
        best_restart: best,
        seed: cfg.seed,
        wall_time_s: start.elapsed().as_secs_f64(),
        best_theta: runs[best].x.clone(),
        restart_energies: runs.iter().map(|m| m.f).collect(),
    })
}

/// Multistart minimization of `⟨ψ(θ)|O|ψ(θ)⟩`, with ε against [`exact_minimum`].
pub fn optimize(c: &Circuit, o: &Observable, cfg: &OptimizeConfig) -> Result<RunResult, VqaError> {
    if c.n_qubits() != o.n_qubits() {
        return Err(VqaError::ArityMismatch { observable: o.n_qubits(), state: c.n_qubits() });
    }
    let exact = exact_minimum(o)?.energy;
    optimize_against(c, o, exact, cfg)
}
