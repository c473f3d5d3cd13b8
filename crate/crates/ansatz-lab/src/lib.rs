//! Hardware-efficient ansatz laboratory: build layered RX/RY/RZ + CX
//! circuits, count their effective parameters with exact rewrite rules,
//! certify the counts numerically, analyze CX layers over GF(2), and run
//! variational benchmarks against exact minima.

pub mod circuit;
pub mod cli;
pub mod entangle;
pub mod qsim;
pub mod rank;
pub mod reduce;
pub mod repro;
pub mod vqa;
