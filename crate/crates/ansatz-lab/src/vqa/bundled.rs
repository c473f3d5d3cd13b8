//! Benchmark instances shipped with the crate.
//!
//! The graphs and the distance matrix come from the seeded generators in
//! [`super::encode`]; the Hamiltonians are Pauli-sum files with ground
//! energies from the dense eigensolver.

use super::encode::{DistanceMatrix, Graph};
use super::pauli::Observable;

pub const MAXCUT_N4: &str = include_str!("../../data/maxcut_n4.graph");
pub const VERTEX_COVER_N6: &str = include_str!("../../data/vertex_cover_n6.graph");
pub const TSP_3: &str = include_str!("../../data/tsp_3.csv");

pub const MAXCUT_SEED: u64 = 3;
pub const VERTEX_COVER_SEED: u64 = 11;
pub const TSP_SEED: u64 = 5;
pub const MAXCUT_EDGE_PROB: f64 = 0.6;
pub const VERTEX_COVER_EDGE_PROB: f64 = 0.5;
pub const TSP_MAX_DISTANCE: u32 = 9;

pub fn maxcut_n4() -> Graph {
    Graph::parse(MAXCUT_N4).expect("bundled graph parses")
}

pub fn vertex_cover_n6() -> Graph {
    Graph::parse(VERTEX_COVER_N6).expect("bundled graph parses")
}

pub fn tsp_3() -> DistanceMatrix {
    DistanceMatrix::parse_csv(TSP_3).expect("bundled distances parse")
}

#[derive(Debug, Clone, Copy)]
pub struct BundledHamiltonian {
    pub name: &'static str,
    pub text: &'static str,
    /// Minimum eigenvalue, offset included.
    pub ground_energy: f64,
}

impl BundledHamiltonian {
    pub fn observable(&self) -> Observable {
        self.text.parse().expect("bundled Hamiltonian parses")
    }
}

/// H2 in a minimal basis, 4 qubits, Jordan–Wigner; offset is the nuclear repulsion.
pub const H2_N4: BundledHamiltonian =
    BundledHamiltonian { name: "h2_n4", text: include_str!("../../data/h2_n4.pauli"), ground_energy: -1.1373060358023794 };

/// Open transverse-field Ising chain, `J = h = 1`.
pub const TFIM_N6: BundledHamiltonian =
    BundledHamiltonian { name: "tfim_n6", text: include_str!("../../data/tfim_n6.pauli"), ground_energy: -7.296229810558749 };

/// Open XXZ chain, `Δ = 0.5`.
pub const XXZ_N6: BundledHamiltonian =
    BundledHamiltonian { name: "xxz_n6", text: include_str!("../../data/xxz_n6.pauli"), ground_energy: -8.391550553031406 };

pub fn hamiltonians() -> [BundledHamiltonian; 3] {
    [H2_N4, TFIM_N6, XXZ_N6]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vqa::encode::{tfim_chain, xxz_chain};
    use crate::vqa::pauli::exact_minimum;

    #[test]
    fn instances_match_their_generators() {
        assert_eq!(maxcut_n4(), Graph::seeded(4, MAXCUT_EDGE_PROB, MAXCUT_SEED));
        assert_eq!(vertex_cover_n6(), Graph::seeded(6, VERTEX_COVER_EDGE_PROB, VERTEX_COVER_SEED));
        assert_eq!(tsp_3(), DistanceMatrix::seeded(3, TSP_MAX_DISTANCE, TSP_SEED));
        assert_eq!(TFIM_N6.observable(), tfim_chain(6, 1.0, 1.0));
        assert_eq!(XXZ_N6.observable(), xxz_chain(6, 0.5));
    }

    #[test]
    fn recorded_ground_energies() {
        for h in hamiltonians() {
            let e = exact_minimum(&h.observable()).unwrap().energy;
            assert!((e - h.ground_energy).abs() < 1e-10, "{}: {e}", h.name);
        }
    }

    /// Rewrites the generated data files: `cargo test -- --ignored write_bundled_data`.
    #[test]
    #[ignore]
    fn write_bundled_data() {
        let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/data");
        let g = Graph::seeded(4, MAXCUT_EDGE_PROB, MAXCUT_SEED);
        std::fs::write(format!("{dir}/maxcut_n4.graph"), g.to_text()).unwrap();
        let g = Graph::seeded(6, VERTEX_COVER_EDGE_PROB, VERTEX_COVER_SEED);
        std::fs::write(format!("{dir}/vertex_cover_n6.graph"), g.to_text()).unwrap();
        let d = DistanceMatrix::seeded(3, TSP_MAX_DISTANCE, TSP_SEED);
        std::fs::write(format!("{dir}/tsp_3.csv"), d.to_csv()).unwrap();
        std::fs::write(format!("{dir}/tfim_n6.pauli"), tfim_chain(6, 1.0, 1.0).to_text()).unwrap();
        std::fs::write(format!("{dir}/xxz_n6.pauli"), xxz_chain(6, 0.5).to_text()).unwrap();
    }
}
