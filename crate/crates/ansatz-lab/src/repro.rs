//! The acceptance matrix: one function per criterion, each returning an
//! [`Outcome`] with the measured numbers. Shared by `ansatz-lab repro` and the
//! `acceptance` test target. Tolerances and time limits are fixed here.

use std::f64::consts::{PI, TAU};
use std::time::Instant;

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::circuit::{build_ansatz, AnsatzSpec, Circuit, Family, Gate, ParamExpr};
use crate::entangle::{
    is_linear, layer_power_is_identity, layer_to_gf2, order, synthesize_column_move, BasisPermutation, CxLayer,
    DEFAULT_ORDER_CAP,
};
use crate::qsim::{circuit_unitary, eigensolve, gates_unitary, BoundGate, HermitianMatrix, UnitaryMatrix, C64};
use crate::rank::{expressive_rank, random_theta, unitary_jacobian, Mode, RankOptions};
use crate::reduce::{
    apply_param_map, combine_parameters, effective_count_formula, effective_upper_bound_rxcx, euler_certificate,
    period, reduce_alternating_to_linear, shift_certificate,
};
use crate::vqa::{
    bundled, default_tsp_penalty, encode_maxcut, encode_tsp, encode_vertex_cover, exact_minimum, max_cut_brute,
    min_vertex_cover_brute, optimize_against, tsp_brute, NelderMead, Observable, OptimizeConfig,
    DEFAULT_COVER_PENALTY,
};

pub const IDENTITY_TOL: f64 = 1e-12;
pub const CERTIFICATE_TOL: f64 = 1e-9;
pub const REDUCTION_TOL: f64 = 1e-10;
pub const QAOA_EPSILON: f64 = 1e-4;
pub const QAOA_RESTARTS: usize = 20;
pub const VQE_SEEDS: u64 = 5;
pub const VQE_RESTARTS: usize = 3;
pub const JACOBIAN_REL_TOL: f64 = 1e-7;
pub const FD_STEP: f64 = 1e-5;
pub const EIGEN_RESIDUAL_TOL: f64 = 1e-8;

/// Result of one criterion.
#[derive(Debug, Clone, Serialize)]
pub struct Outcome {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    /// Whether the numeric condition held, before the time limit is applied.
    pub criterion_met: bool,
    pub detail: String,
    pub elapsed_s: f64,
    pub time_limit_s: f64,
    pub data: Value,
}

impl Outcome {
    pub fn line(&self) -> String {
        format!(
            "{} AC{} {}: {} ({:.1}s / {:.0}s)",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.detail,
            self.elapsed_s,
            self.time_limit_s
        )
    }
}

pub const CRITERIA: [(u8, &str, f64); 11] = [
    (1, "ansatz resource counts", 1.0),
    (2, "X-rule identities", 1.0),
    (3, "RX-CX-L bound and periods", 120.0),
    (4, "CX order invariance", 60.0),
    (5, "alternating to linear reduction", 300.0),
    (6, "two-axis and RY-CX-A counts", 300.0),
    (7, "entanglement layer order", 10.0),
    (8, "column moves and non-linearity", 30.0),
    (9, "QAOA tolerance", 900.0),
    (10, "VQE ordering", 1800.0),
    (11, "numerical hygiene", 120.0),
];

fn finish(id: u8, start: Instant, ok: bool, detail: String, data: Value) -> Outcome {
    let (_, title, limit) = CRITERIA[id as usize - 1];
    let elapsed = start.elapsed().as_secs_f64();
    Outcome { id, title, passed: ok && elapsed < limit, criterion_met: ok, detail, elapsed_s: elapsed, time_limit_s: limit, data }
}

pub fn run(id: u8) -> Option<Outcome> {
    Some(match id {
        1 => resource_counts(),
        2 => x_rule(),
        3 => rxcx_bound(),
        4 => order_invariance(),
        5 => alternating_reduction(),
        6 => two_axis_counts(),
        7 => layer_order(),
        8 => column_moves(),
        9 => qaoa_tolerance(),
        10 => vqe_ordering(),
        11 => hygiene(),
        _ => return None,
    })
}

pub fn run_all() -> Vec<Outcome> {
    (1..=11).filter_map(run).collect()
}

pub fn summary_json(outcomes: &[Outcome]) -> Value {
    json!({
        "version": env!("CARGO_PKG_VERSION"),
        "passed": outcomes.iter().filter(|o| o.passed).count(),
        "total": outcomes.len(),
        "criteria": outcomes,
    })
}

fn build(f: Family, n: usize, layers: usize) -> Circuit {
    build_ansatz(&AnsatzSpec::new(f, n, layers)).expect("valid ansatz spec")
}

/// One benchmark table entry. `params`/`cx` are `None` where the listed
/// figure disagrees with the layer structure the other rows follow.
struct TableRow {
    task: &'static str,
    family: Family,
    n: usize,
    layers: usize,
    params: u32,
    cx: u32,
    params_flagged: bool,
    cx_flagged: bool,
}

fn table_rows() -> Vec<TableRow> {
    use Family::*;
    let row = |task, family, n, layers, params, cx| TableRow {
        task,
        family,
        n,
        layers,
        params,
        cx,
        params_flagged: false,
        cx_flagged: false,
    };
    let mut rows = vec![];
    for (task, n, l, lp, lc, ap, ac, dp, dc, zp, zc) in [
        ("VQE-H2", 4, 4, 20, 12, 20, 6, 40, 12, 40, 6),
        ("VQE-LiH", 6, 5, 36, 25, 36, 13, 72, 25, 72, 13),
        ("VQE-BeH2", 8, 5, 48, 35, 48, 18, 96, 35, 96, 18),
        ("VQE-HF", 10, 5, 60, 45, 60, 23, 120, 45, 120, 23),
        ("QAOA-MC", 4, 4, 20, 12, 20, 6, 40, 12, 20, 6),
        ("QAOA-VC", 6, 5, 36, 25, 36, 13, 72, 25, 72, 25),
        ("QAOA-TSP", 9, 5, 54, 40, 54, 20, 108, 40, 108, 20),
    ] {
        rows.push(row(task, RxCxL, n, l, lp, lc));
        rows.push(row(task, RxCxA, n, l, ap, ac));
        // Doubled-layer rows list parameter counts the rotation layers cannot give.
        rows.push(TableRow { params_flagged: true, ..row(task, RxCxA, n, 2 * l, dp, dc) });
        let mut z = row(task, RxRzCxA, n, l, zp, zc);
        z.params_flagged = task == "QAOA-MC";
        z.cx_flagged = task == "QAOA-VC";
        rows.push(z);
    }
    rows
}

/// Every published (params, CX) entry against the builder.
pub fn resource_counts() -> Outcome {
    let start = Instant::now();
    let mut ok = true;
    let (mut checked, mut flagged) = (0, vec![]);
    let mut rows = vec![];
    for r in table_rows() {
        let res = build(r.family.clone(), r.n, r.layers).resources();
        let pm = res.params == r.params as usize;
        let cm = res.cx == r.cx as usize;
        if r.params_flagged {
            flagged.push(format!("{} {} L={} params {} vs {}", r.task, r.family, r.layers, r.params, res.params));
        } else {
            ok &= pm;
            checked += 1;
        }
        if r.cx_flagged {
            flagged.push(format!("{} {} L={} cx {} vs {}", r.task, r.family, r.layers, r.cx, res.cx));
        } else {
            ok &= cm;
            checked += 1;
        }
        rows.push(json!({
            "task": r.task, "family": r.family.to_string(), "n": r.n, "layers": r.layers,
            "published": [r.params, r.cx], "built": [res.params, res.cx],
            "params_flagged": r.params_flagged, "cx_flagged": r.cx_flagged,
        }));
    }
    let detail = format!("{checked} entries checked, {} flagged and excluded", flagged.len());
    finish(1, start, ok, detail, json!({"rows": rows, "flagged": flagged}))
}

fn bound1(g: BoundGate) -> UnitaryMatrix {
    gates_unitary(2, &[g])
}

fn product(gates: &[BoundGate]) -> UnitaryMatrix {
    gates_unitary(2, gates)
}

/// X propagation across CX and the two-RX combination.
pub fn x_rule() -> Outcome {
    let start = Instant::now();
    let cx = BoundGate::Cx { control: 0, target: 1 };
    let (x0, x1) = (BoundGate::X(0), BoundGate::X(1));
    let t = 0.731;
    let scale = |u: UnitaryMatrix, z: C64| UnitaryMatrix(u.0.map(|v| v * z));
    let identities: Vec<(&str, UnitaryMatrix, UnitaryMatrix)> = vec![
        ("X(c)·CX = CX·X(c)·X(t)", product(&[x0, cx]), product(&[cx, x0, x1])),
        ("X(t)·CX = CX·X(t)", product(&[x1, cx]), product(&[cx, x1])),
        ("X(c)·CX = X(t)·CX·X(c)", product(&[x0, cx]), product(&[x1, cx, x0])),
        ("RX(t) commutes with CX", product(&[BoundGate::Rx(1, t), cx]), product(&[cx, BoundGate::Rx(1, t)])),
        ("X·RY(θ)·X = RY(−θ)", product(&[x0, BoundGate::Ry(0, t), x0]), bound1(BoundGate::Ry(0, -t))),
        ("X·RZ(θ)·X = RZ(−θ)", product(&[x0, BoundGate::Rz(0, t), x0]), bound1(BoundGate::Rz(0, -t))),
        ("X = i·RX(π)", bound1(x0), scale(bound1(BoundGate::Rx(0, PI)), C64::i())),
    ];
    let mut ok = true;
    let mut dists = vec![];
    for (name, a, b) in &identities {
        let d = a.frobenius_distance(b);
        ok &= d < IDENTITY_TOL;
        dists.push(json!({"identity": name, "distance": d}));
    }

    let c = Circuit::new(2, 2, vec![Gate::rx(1, ParamExpr::param(0)), Gate::cx(0, 1), Gate::rx(1, ParamExpr::param(1))])
        .expect("valid circuit");
    let report = combine_parameters(&c).expect("reducible");
    let merged = report.effective_count == 1 && report.map.classes[0].members.len() == 2;
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let th = [rng.gen_range(0.0..TAU), rng.gen_range(0.0..TAU)];
        let delta = rng.gen_range(-PI..PI);
        let u = circuit_unitary(&c, &th).expect("arity");
        let v = circuit_unitary(&c, &[th[0] + delta, th[1] - delta]).expect("arity");
        worst = worst.max(u.frobenius_distance(&v));
    }
    ok &= merged && worst < IDENTITY_TOL;
    let detail = format!(
        "{} identities, worst {:.1e}; two-RX class merged: {merged}, shift worst {worst:.1e}",
        identities.len(),
        dists.iter().map(|d| d["distance"].as_f64().unwrap_or(f64::NAN)).fold(0.0, f64::max)
    );
    finish(2, start, ok, detail, json!({"identities": dists, "two_rx_merged": merged, "shift_worst": worst}))
}

/// Effective counts of RX-CX-L within the bound, chain periods, certificates.
pub fn rxcx_bound() -> Outcome {
    let start = Instant::now();
    let mut ok = true;
    let mut cases = vec![];
    let mut worst_cert = 0.0f64;
    let mut periods_ok = true;
    for n in 2..=6 {
        for l in 1..=12 {
            let c = build(Family::RxCxL, n, l);
            let rep = combine_parameters(&c).expect("builder output is reducible");
            let bound = effective_upper_bound_rxcx(n);
            let cert = shift_certificate(&c, &rep.map, 8, (n * 100 + l) as u64);
            let euler = euler_certificate(&rep, 4, 1);
            worst_cert = worst_cert.max(cert.worst).max(euler.worst);
            let within = rep.effective_count <= bound;
            ok &= within && cert.worst < CERTIFICATE_TOL && euler.worst < CERTIFICATE_TOL;
            if n == 4 {
                let want: Vec<usize> = (0..4).map(|i| period(i).min(l + 1)).collect();
                periods_ok &= rep.per_qubit_counts() == want;
            }
            cases.push(json!({"n": n, "layers": l, "effective": rep.effective_count, "bound": bound,
                "per_qubit": rep.per_qubit_counts(), "certificate_worst": cert.worst.max(euler.worst)}));
        }
    }
    let n4 = combine_parameters(&build(Family::RxCxL, 4, 12)).expect("reducible").per_qubit_counts();
    ok &= periods_ok;
    let detail = format!("60 circuits within bound: {ok}; n=4 per-qubit classes {n4:?}; certificate worst {worst_cert:.1e}");
    finish(3, start, ok, detail, json!({"cases": cases, "n4_periods": n4}))
}

/// Random within-layer CX orders, one per circuit, give the same count.
pub fn order_invariance() -> Outcome {
    let start = Instant::now();
    let mut ok = true;
    let mut rows = vec![];
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for n in [3, 4, 5] {
        let layers = 6;
        let base = combine_parameters(&build(Family::RxCxL, n, layers)).expect("reducible").effective_count;
        let mut counts = vec![];
        for _ in 0..20 {
            let mut order: Vec<usize> = (0..n - 1).collect();
            order.shuffle(&mut rng);
            let c = build(Family::RxCxLModified(order), n, layers);
            counts.push(combine_parameters(&c).expect("reducible").effective_count);
        }
        ok &= counts.iter().all(|&k| k == base);
        rows.push(json!({"n": n, "canonical": base, "orders": counts}));
    }
    let detail = format!("canonical counts {:?}; all 60 orderings equal: {ok}", rows.iter().map(|r| r["canonical"].as_u64().unwrap_or(0)).collect::<Vec<_>>());
    finish(4, start, ok, detail, json!({"cases": rows}))
}

/// Alternating `2L` layers rewritten as `L` linear layers.
pub fn alternating_reduction() -> Outcome {
    let start = Instant::now();
    let mut ok = true;
    let mut rows = vec![];
    for (n, layers) in [(3, 4), (4, 8), (5, 6)] {
        let alt = build(Family::RxCxA, n, layers);
        let (lin, map) = reduce_alternating_to_linear(&alt).expect("alternating RX-CX");
        let mut worst = 0.0f64;
        for s in 0..50 {
            let th = random_theta(alt.param_count(), 500 + s);
            let u = circuit_unitary(&alt, &th).expect("arity");
            let v = circuit_unitary(&lin, &apply_param_map(&map, &th)).expect("arity");
            worst = worst.max(u.frobenius_distance(&v));
        }
        let opts = RankOptions { mode: Mode::Unitary, ..Default::default() };
        let ra = expressive_rank(&alt, &opts).expect("rank").rank;
        let rl = expressive_rank(&lin, &opts).expect("rank").rank;
        ok &= worst < REDUCTION_TOL && ra == rl;
        rows.push(json!({"n": n, "alternating_layers": layers, "linear_layers": layers / 2,
            "worst_distance": worst, "rank_alternating": ra, "rank_linear": rl}));
    }
    let detail = rows
        .iter()
        .map(|r| format!("(n={}, {}→{}) dist {:.1e} rank {}/{}", r["n"], r["alternating_layers"], r["linear_layers"],
            r["worst_distance"].as_f64().unwrap_or(f64::NAN), r["rank_alternating"], r["rank_linear"]))
        .collect::<Vec<_>>()
        .join("; ");
    finish(5, start, ok, detail, json!({"cases": rows}))
}

/// Closed-form counts for the alternating two-axis families and RY-CX-A.
pub fn two_axis_counts() -> Outcome {
    let start = Instant::now();
    let mut ok = true;
    let mut rows = vec![];
    let mut mismatches = vec![];
    for family in [Family::RxRzCxA, Family::RxRyCxA, Family::RyRzCxA, Family::RyCxA] {
        for n in [2, 4, 6] {
            for half in 1..=3 {
                let c = build(family.clone(), n, 2 * half);
                let count = combine_parameters(&c).expect("reducible").effective_count;
                let formula = effective_count_formula(&family, n, half).expect("supported family");
                let rank = expressive_rank(&c, &RankOptions { seeds: 2, ..Default::default() }).expect("rank").rank;
                let good = count == formula && rank <= formula;
                ok &= good;
                if !good {
                    mismatches.push(format!("{family} n={n} 2L={}: count {count}, rank {rank}, formula {formula}", 2 * half));
                }
                rows.push(json!({"family": family.to_string(), "n": n, "layers": 2 * half,
                    "rule_count": count, "rank": rank, "formula": formula}));
            }
        }
    }
    let detail = if ok {
        "all 36 cases match".to_string()
    } else {
        format!("{}/36 cases differ, e.g. {}", mismatches.len(), mismatches.iter().take(3).cloned().collect::<Vec<_>>().join("; "))
    };
    finish(6, start, ok, detail, json!({"cases": rows, "mismatches": mismatches}))
}

/// Order of the linear-chain layer over GF(2), checked on statevectors.
pub fn layer_order() -> Outcome {
    let start = Instant::now();
    let mut ok = true;
    let mut rows = vec![];
    for n in 2..=5 {
        let layer = CxLayer::linear_chain(n);
        let k = order(&layer_to_gf2(&layer, n).expect("valid layer"), DEFAULT_ORDER_CAP).expect("finite order");
        let exact = layer_power_is_identity(&layer, n, k).expect("valid layer");
        let minimal = (1..k).all(|j| !layer_power_is_identity(&layer, n, j).expect("valid layer"));
        ok &= exact && minimal;
        rows.push(json!({"n": n, "k": k, "power_is_identity": exact, "minimal": minimal}));
    }
    let ks: Vec<u64> = rows.iter().map(|r| r["k"].as_u64().unwrap_or(0)).collect();
    finish(7, start, ok, format!("orders for n=2..5: {ks:?}; E^k = I exactly and minimal: {ok}"), json!({"cases": rows}))
}

fn random_unitary(dim: usize, rng: &mut ChaCha8Rng) -> DMatrix<C64> {
    let m = DMatrix::from_fn(dim, dim, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    m.qr().q()
}

/// Column moves synthesized and verified; a transposition that no CX circuit realizes.
pub fn column_moves() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let n = rng.gen_range(2..=5usize);
        let dim = 1u64 << n;
        let (i, j) = (rng.gen_range(2..=dim), rng.gen_range(2..=dim));
        let layer = synthesize_column_move(n, i, j).expect("columns in range");
        let u = random_unitary(dim as usize, &mut rng);
        let e = gates_unitary(n, &layer.gates());
        let moved = &u * &e.0;
        let d = (0..dim as usize).map(|r| (moved[(r, j as usize - 1)] - u[(r, i as usize - 1)]).norm()).fold(0.0, f64::max);
        worst = worst.max(d);
    }
    let moves_ok = worst < IDENTITY_TOL;

    let swap = BasisPermutation::transposition(3, 4, 5).expect("labels in range");
    let witness = is_linear(&swap).err();
    let witness_ok = witness.is_some_and(|w| {
        swap.apply(w.x ^ w.y) == w.image_of_xor
            && swap.apply(w.x) ^ swap.apply(w.y) == w.xor_of_images
            && w.image_of_xor != w.xor_of_images
    });

    let mut labels: Vec<u64> = (0..8).collect();
    let mut linear = 0;
    permute(&mut labels, 0, &mut |images| {
        if is_linear(&BasisPermutation::new(3, images.to_vec()).expect("permutation")).is_ok() {
            linear += 1;
        }
    });
    let ok = moves_ok && witness_ok && linear == 168;
    let detail = format!(
        "200 moves, worst {worst:.1e}; swap(4,5) witness: {}; linear permutations of 3 bits: {linear}",
        witness.map_or("none".to_string(), |w| w.to_string())
    );
    finish(8, start, ok, detail, json!({"move_worst": worst, "witness_valid": witness_ok, "linear_count": linear}))
}

fn permute(items: &mut Vec<u64>, k: usize, visit: &mut dyn FnMut(&[u64])) {
    if k == items.len() {
        visit(items);
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permute(items, k + 1, visit);
        items.swap(k, i);
    }
}

/// Evaluations per parameter per restart in the benchmark criteria.
pub const BENCH_EVALS_PER_PARAM: usize = 2000;

/// Optimizer settings shared by the benchmark criteria: a quarter-turn
/// initial simplex.
pub fn benchmark_minimizer() -> NelderMead {
    NelderMead { initial_step: std::f64::consts::FRAC_PI_2, ..NelderMead::default() }
}

/// Bundled QAOA instances with their brute-force optima (as energies).
pub fn qaoa_instances() -> Vec<(&'static str, Observable, f64, usize, usize)> {
    let mc = bundled::maxcut_n4();
    let vc = bundled::vertex_cover_n6();
    let d = bundled::tsp_3();
    vec![
        ("maxcut-n4", encode_maxcut(&mc).expect("nonempty graph").0, -max_cut_brute(&mc), 4, 4),
        (
            "vertex-cover-n6",
            encode_vertex_cover(&vc, DEFAULT_COVER_PENALTY).expect("valid penalty"),
            min_vertex_cover_brute(&vc) as f64,
            6,
            5,
        ),
        ("tsp-3", encode_tsp(&d, default_tsp_penalty(&d)).expect("3 cities"), tsp_brute(&d), 9, 5),
    ]
}

pub fn qaoa_tolerance() -> Outcome {
    let start = Instant::now();
    let mut ok = true;
    let mut rows = vec![];
    let mut parts = vec![];
    for (name, o, optimum, n, layers) in qaoa_instances() {
        let scan = exact_minimum(&o).expect("diagonal").energy;
        ok &= (scan - optimum).abs() < 1e-9;
        for family in [Family::RxCxL, Family::RxCxA, Family::RxRzCxA] {
            let c = build(family.clone(), n, layers);
            let cfg = OptimizeConfig {
                restarts: QAOA_RESTARTS,
                seed: 9,
                minimizer: benchmark_minimizer(),
                max_evals: Some(BENCH_EVALS_PER_PARAM * c.param_count().max(1)),
                target_epsilon: Some(QAOA_EPSILON),
            };
            let r = optimize_against(&c, &o, optimum, &cfg).expect("arity");
            ok &= r.epsilon < QAOA_EPSILON;
            parts.push(format!("{name}/{family} ε={:.1e} ({} restarts)", r.epsilon, r.restarts));
            rows.push(json!({"instance": name, "family": family.to_string(), "params": c.param_count(),
                "optimum": optimum, "E_a": r.e_a, "epsilon": r.epsilon, "restarts": r.restarts}));
        }
    }
    finish(9, start, ok, parts.join("; "), json!({"runs": rows}))
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        (v[m - 1] + v[m]) / 2.0
    }
}

pub fn vqe_ordering() -> Outcome {
    let start = Instant::now();
    let mut ok = true;
    let mut rows = vec![];
    let mut parts = vec![];
    for h in bundled::hamiltonians() {
        let o = h.observable();
        let n = o.n_qubits();
        let layers = if n == 4 { 4 } else { 5 };
        let mut medians = vec![];
        for family in [Family::RxCxL, Family::RxRzCxA] {
            let c = build(family.clone(), n, layers);
            let eps: Vec<f64> = (0..VQE_SEEDS)
                .map(|seed| {
                    let cfg = OptimizeConfig {
                        restarts: VQE_RESTARTS,
                        seed,
                        minimizer: benchmark_minimizer(),
                        max_evals: Some(BENCH_EVALS_PER_PARAM * c.param_count().max(1)),
                        ..Default::default()
                    };
                    optimize_against(&c, &o, h.ground_energy, &cfg).expect("arity").epsilon
                })
                .collect();
            medians.push(median(eps.clone()));
            rows.push(json!({"hamiltonian": h.name, "family": family.to_string(), "layers": layers, "epsilons": eps}));
        }
        ok &= medians[1] < medians[0];
        parts.push(format!("{}: RX-CX-L {:.3e} vs RX-RZ-CX-A {:.3e}", h.name, medians[0], medians[1]));
    }
    finish(10, start, ok, parts.join("; "), json!({"runs": rows}))
}

fn random_hermitian(dim: usize, rng: &mut ChaCha8Rng) -> HermitianMatrix {
    HermitianMatrix::new(DMatrix::from_fn(dim, dim, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))))
}

/// Analytic Jacobians against central differences; eigensolver residuals.
pub fn hygiene() -> Outcome {
    let start = Instant::now();
    let mut worst_rel = 0.0f64;
    for (k, family) in Family::all(3).into_iter().enumerate() {
        let c = build(family, 3, 2);
        let th = random_theta(c.param_count(), 1100 + k as u64);
        let j = unitary_jacobian(&c, &th).expect("arity").0;
        let scale = j.amax().max(f64::MIN_POSITIVE);
        for p in 0..c.param_count() {
            let (mut plus, mut minus) = (th.clone(), th.clone());
            plus[p] += FD_STEP;
            minus[p] -= FD_STEP;
            let up = circuit_unitary(&c, &plus).expect("arity").0;
            let um = circuit_unitary(&c, &minus).expect("arity").0;
            let fd = (up - um) / C64::new(2.0 * FD_STEP, 0.0);
            let dim = fd.nrows();
            for x in 0..dim {
                for y in 0..dim {
                    let z = fd[(y, x)];
                    let (re, im) = (j[(x * dim + y, p)], j[(dim * dim + x * dim + y, p)]);
                    worst_rel = worst_rel.max(((re - z.re).abs().max((im - z.im).abs())) / scale);
                }
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst_res = 0.0f64;
    for t in 0..20 {
        let dim = [2, 3, 4, 7, 8, 16, 31, 32, 64, 100, 128, 200, 256][t % 13];
        let h = random_hermitian(dim, &mut rng);
        let eig = eigensolve(&h).expect("small matrix");
        let v = eig.vectors.matrix();
        for (i, &lam) in eig.values.iter().enumerate() {
            let col = v.column(i);
            let r = (h.matrix() * col - col * C64::new(lam, 0.0)).norm();
            worst_res = worst_res.max(r / h.norm());
        }
    }
    let ok = worst_rel < JACOBIAN_REL_TOL && worst_res < EIGEN_RESIDUAL_TOL;
    let detail = format!("Jacobian vs central differences {worst_rel:.1e} relative; eigen residual {worst_res:.1e}·‖H‖");
    finish(11, start, ok, detail, json!({"jacobian_rel": worst_rel, "eigen_residual_rel": worst_res}))
}
