//! Variational benchmarks: Pauli-sum observables, problem encoders, exact
//! minima, and a multistart Nelder–Mead driver reporting `ε = |E_a − E|`.

pub mod bundled;
pub mod encode;
pub mod optimize;
pub mod pauli;

use thiserror::Error;

use crate::qsim::QsimError;

pub use encode::{
    default_tsp_penalty, encode_maxcut, encode_tsp, encode_vertex_cover, max_cut_brute, min_vertex_cover_brute,
    tsp_brute, DistanceMatrix, Edge, Graph, Interpretation, Problem, Qubo, DEFAULT_COVER_PENALTY,
};
pub use optimize::{optimize, optimize_against, EnergyFn, Minimizer, NelderMead, OptimizeConfig, RunResult};
pub use pauli::{
    exact_minimum, expectation, load_hamiltonian, save_hamiltonian, ExactMinimum, Observable, Pauli, PauliString,
    Witness,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VqaError {
    #[error("observable acts on {observable} qubits but the state has {state}")]
    ArityMismatch { observable: usize, state: usize },
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("line {line}: Pauli string has {got} qubits, expected {expected}")]
    InconsistentArity { line: usize, expected: usize, got: usize },
    #[error("coefficients must be finite")]
    NonFinite,
    #[error("graph has no edges")]
    EmptyGraph,
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("invalid distance matrix: {0}")]
    InvalidDistances(String),
    #[error("penalty {penalty} must exceed {min}")]
    PenaltyTooSmall { penalty: f64, min: f64 },
    #[error("{qubits} qubits exceeds the limit of {max}")]
    TooManyQubits { qubits: usize, max: usize },
    #[error("{qubits} qubits exceeds the exact-solver limit of {max}")]
    DimensionTooLarge { qubits: usize, max: usize },
    #[error("observable is not diagonal")]
    NotDiagonal,
    #[error("expectation has imaginary part {0:.3e}")]
    ImaginaryResidue(f64),
    #[error("invalid configuration: {0}")]
    BadConfig(String),
    #[error("{0}")]
    Io(String),
    #[error(transparent)]
    Qsim(#[from] QsimError),
}
