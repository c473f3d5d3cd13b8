//! Parameter-combination engine.
//!
//! Four exact rewrite rules are applied to a fixpoint, in priority order:
//!
//! * **R1** merges two same-axis rotations on a wire when only X gates (or
//!   gates on other wires) separate them. Moving RY/RZ across an X negates
//!   its angle.
//! * **R2** (the X-rule) additionally lets an RX pass a CX whose target is
//!   on its wire, since RX on the target commutes with CX.
//! * **R3** applies to pure RX/CX circuits whose CX skeleton is one
//!   permutation `S` of the nearest-neighbour chain repeated `K` times. With
//!   every RX moved to a block boundary, the angle on qubit `i` at boundary
//!   `j` only enters through the sum over boundaries `j mod 2^⌈log₂(i+1)⌉`,
//!   where qubit 0 is the end of the chain that is never a control.
//! * **R4** counts a run of four or more parameterized rotations on a wire,
//!   not interrupted by a two-qubit gate, as three parameters (ZXZ Euler).
//!
//! Each surviving rotation gate carries the signed sum of the raw
//! parameters merged into it: one class of the [`CombinationMap`].

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::TAU;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::circuit::{build_ansatz, count_resources, AnsatzSpec, Circuit, Family, Gate, ParamExpr, ParamId, Resources};
use crate::qsim::{circuit_unitary, euler_zxz, mul2, rotation_matrix, BoundGate, GateKind, C64};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ReduceError {
    #[error("parameter {0} is referenced by more than one rotation")]
    SharedParameter(ParamId),
    #[error("parameter {param} has coefficient {coeff}; only ±1 is supported")]
    NonUnitCoefficient { param: ParamId, coeff: i64 },
    #[error("not an alternating RX-CX circuit: {0}")]
    NotAlternatingRxCx(String),
    #[error("no closed-form count for family {0}")]
    UnsupportedFamily(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Rule {
    R1,
    R2,
    R3,
    R4,
}

impl Rule {
    pub fn description(self) -> &'static str {
        match self {
            Rule::R1 => "adjacent same-axis merge",
            Rule::R2 => "X-rule merge across CX target",
            Rule::R3 => "periodic combination",
            Rule::R4 => "Euler merge",
        }
    }
}

/// One application of a rule. Gate indices refer to the input circuit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RuleEvent {
    pub rule: Rule,
    pub qubit: usize,
    pub kept: usize,
    pub absorbed: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ClassMember {
    pub param: ParamId,
    pub sign: i8,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ParamClass {
    pub members: Vec<ClassMember>,
    /// Constant part of the merged angle, in units of π/2.
    pub offset_half_pi: i64,
    pub qubit: usize,
    pub axis: GateKind,
    /// Index of the carrying gate in the reduced circuit.
    pub gate: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct CombinationMap {
    pub classes: Vec<ParamClass>,
    /// Raw parameters no gate depends on.
    pub unused: Vec<ParamId>,
}

impl CombinationMap {
    /// Class index of every raw parameter.
    pub fn class_of(&self) -> BTreeMap<ParamId, usize> {
        self.classes
            .iter()
            .enumerate()
            .flat_map(|(k, c)| c.members.iter().map(move |m| (m.param, k)))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EulerMerge {
    pub qubit: usize,
    /// Gate indices in the reduced circuit, in time order (fixed X gates included).
    pub gates: Vec<usize>,
    /// Classes whose parameters collapse into the three Euler angles.
    pub classes: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReductionReport {
    pub resources: Resources,
    pub effective_count: usize,
    pub reduced: Circuit,
    pub map: CombinationMap,
    pub euler_merges: Vec<EulerMerge>,
    pub rules_fired: Vec<RuleEvent>,
    /// Whether the periodic rule's structure was recognized.
    pub periodic: bool,
}

impl ReductionReport {
    pub fn to_json(&self) -> Value {
        let classes: Vec<Value> = self
            .map
            .classes
            .iter()
            .map(|c| {
                json!({
                    "members": c.members.iter().map(|m| json!({"param": m.param, "sign": m.sign})).collect::<Vec<_>>(),
                    "offset_half_pi": c.offset_half_pi,
                    "qubit": c.qubit,
                    "axis": c.axis.name(),
                })
            })
            .collect();
        let rules: Vec<Value> = self
            .rules_fired
            .iter()
            .map(|e| {
                json!({
                    "rule": e.rule,
                    "description": e.rule.description(),
                    "qubit": e.qubit,
                    "kept_gate": e.kept,
                    "absorbed_gates": e.absorbed,
                })
            })
            .collect();
        json!({
            "resources": self.resources,
            "effective_count": self.effective_count,
            "classes": classes,
            "unused_params": self.map.unused,
            "euler_merges": self.euler_merges,
            "periodic_rule_recognized": self.periodic,
            "rules_fired": rules,
            "reduced": serde_json::from_str::<Value>(&self.reduced.to_json()).expect("circuit JSON is valid"),
        })
    }

    /// Surviving classes per qubit.
    pub fn per_qubit_counts(&self) -> Vec<usize> {
        let mut v = vec![0; self.reduced.n_qubits()];
        for c in &self.map.classes {
            v[c.qubit] += 1;
        }
        for m in &self.euler_merges {
            v[m.qubit] -= m.classes.len() - 3;
        }
        v
    }
}

/// `⌊(3n²+1)/4⌋`.
pub fn effective_upper_bound_rxcx(n: usize) -> usize {
    (3 * n * n + 1) / 4
}

/// Period of the periodic rule on chain position `i`: `2^⌈log₂(i+1)⌉`.
pub fn period(i: usize) -> usize {
    (i + 1).next_power_of_two()
}

/// Count produced by the periodic rule for an RX-CX chain ansatz with
/// `rotation_layers` full rotation layers.
pub fn periodic_count_rxcx(n: usize, rotation_layers: usize) -> usize {
    (0..n).map(|i| period(i).min(rotation_layers)).sum()
}

/// Closed-form counts for the alternating two-axis families and RY-CX-A with
/// `2·half_layers` entanglement layers.
pub fn effective_count_formula(family: &Family, n: usize, half_layers: usize) -> Result<usize, ReduceError> {
    match family {
        Family::RxRzCxA | Family::RxRyCxA | Family::RyRzCxA => Ok((4 * n).saturating_sub(3) * half_layers),
        Family::RyCxA => Ok(n.saturating_sub(1) * 2 * half_layers),
        f => Err(ReduceError::UnsupportedFamily(f.to_string())),
    }
}

#[derive(Debug, Clone)]
struct Slot {
    gate: Gate,
    origin: usize,
}

struct Engine {
    n: usize,
    work: Vec<Option<Slot>>,
    events: Vec<RuleEvent>,
}

impl Engine {
    fn live(&self) -> impl Iterator<Item = (usize, &Slot)> {
        self.work.iter().enumerate().filter_map(|(i, s)| s.as_ref().map(|s| (i, s)))
    }

    /// Next same-axis rotation `g` can merge with, scanning forward along its
    /// wire. Returns (index, sign applied to the partner, CXs crossed).
    fn partner(&self, g: usize, allow_cx: bool) -> Option<(usize, i64, usize)> {
        let slot = self.work[g].as_ref()?;
        let axis = slot.gate.kind;
        if !axis.is_rotation() {
            return None;
        }
        let q = slot.gate.qubits[0];
        let mut sign = 1;
        let mut crossed = 0;
        for (h, s) in self.live().skip_while(|&(h, _)| h <= g) {
            if !s.gate.touches(q) {
                continue;
            }
            match s.gate.kind {
                GateKind::X => {
                    if axis != GateKind::RX {
                        sign = -sign;
                    }
                }
                GateKind::CX => {
                    if allow_cx && axis == GateKind::RX && s.gate.qubits[1] == q {
                        crossed += 1;
                    } else {
                        return None;
                    }
                }
                k if k == axis => return Some((h, sign, crossed)),
                _ => return None,
            }
        }
        None
    }

    fn absorb(&mut self, keep: usize, other: usize, sign: i64, rule: Rule) {
        let gone = self.work[other].take().expect("absorbed gate is live");
        let kept = self.work[keep].as_mut().expect("kept gate is live");
        kept.gate.expr.as_mut().unwrap().add_scaled(gone.gate.expr.as_ref().unwrap(), sign);
        let qubit = kept.gate.qubits[0];
        let (kept_origin, gone_origin) = (kept.origin, gone.origin);
        match self.events.last_mut() {
            Some(e) if e.rule == rule && e.kept == kept_origin && rule == Rule::R3 => e.absorbed.push(gone_origin),
            _ => self.events.push(RuleEvent { rule, qubit, kept: kept_origin, absorbed: vec![gone_origin] }),
        }
    }

    fn step_r1(&mut self) -> bool {
        for g in 0..self.work.len() {
            if let Some((h, sign, _)) = self.partner(g, false) {
                self.absorb(g, h, sign, Rule::R1);
                return true;
            }
        }
        false
    }

    fn step_r2(&mut self) -> bool {
        for g in 0..self.work.len() {
            if let Some((h, sign, crossed)) = self.partner(g, true) {
                debug_assert!(crossed > 0);
                self.absorb(g, h, sign, Rule::R2);
                return true;
            }
        }
        false
    }

    /// Boundary assignment for the periodic rule, or None when the circuit
    /// does not have the required shape. Entries: (work index, canonical chain
    /// position of its wire, boundary).
    fn periodic_layout(&self) -> Option<Vec<(usize, usize, usize)>> {
        let n = self.n;
        if n < 2 {
            return None;
        }
        let mut skeleton = Vec::new();
        for (_, s) in self.live() {
            match s.gate.kind {
                GateKind::RX => {}
                GateKind::CX => skeleton.push((s.gate.qubits[0], s.gate.qubits[1])),
                _ => return None,
            }
        }
        let block = n - 1;
        if skeleton.is_empty() || skeleton.len() % block != 0 {
            return None;
        }
        let down = skeleton.iter().all(|&(c, t)| c == t + 1);
        let up = skeleton.iter().all(|&(c, t)| t == c + 1);
        if !down && !up {
            return None;
        }
        let first: BTreeSet<_> = skeleton[..block].iter().copied().collect();
        if first.len() != block || skeleton.chunks(block).any(|b| b != &skeleton[..block]) {
            return None;
        }
        let canon = |q: usize| if down { q } else { n - 1 - q };
        let mut layout = Vec::new();
        let mut p = 0;
        for (idx, s) in self.live() {
            if s.gate.kind == GateKind::CX {
                p += 1;
                continue;
            }
            let q = s.gate.qubits[0];
            let blocked = |i: usize| skeleton[i].0 == q;
            let mut lo = p;
            while lo > 0 && !blocked(lo - 1) {
                lo -= 1;
            }
            let mut hi = p;
            while hi < skeleton.len() && !blocked(hi) {
                hi += 1;
            }
            let b = lo.div_ceil(block);
            if b * block > hi {
                return None;
            }
            layout.push((idx, canon(q), b));
        }
        Some(layout)
    }

    fn step_r3(&mut self) -> bool {
        let Some(layout) = self.periodic_layout() else { return false };
        let mut groups: BTreeMap<(usize, usize), Vec<(usize, usize)>> = BTreeMap::new();
        for &(idx, i, b) in &layout {
            groups.entry((i, b % period(i))).or_default().push((b, idx));
        }
        let mut fired = false;
        for mut members in groups.into_values() {
            members.sort_unstable();
            let keep = members[0].1;
            for &(_, idx) in &members[1..] {
                self.absorb(keep, idx, 1, Rule::R3);
                fired = true;
            }
        }
        fired
    }
}

fn check_preconditions(c: &Circuit) -> Result<Vec<ParamId>, ReduceError> {
    let mut seen = BTreeSet::new();
    for g in c.gates() {
        if let Some(e) = &g.expr {
            for (&p, &k) in e.terms() {
                if k.abs() != 1 {
                    return Err(ReduceError::NonUnitCoefficient { param: p, coeff: k });
                }
                if !seen.insert(p) {
                    return Err(ReduceError::SharedParameter(p));
                }
            }
        }
    }
    Ok((0..c.param_count() as ParamId).filter(|p| !seen.contains(p)).collect())
}

pub fn combine_parameters(c: &Circuit) -> Result<ReductionReport, ReduceError> {
    let unused = check_preconditions(c)?;
    let mut eng = Engine {
        n: c.n_qubits(),
        work: c.gates().iter().cloned().enumerate().map(|(origin, gate)| Some(Slot { gate, origin })).collect(),
        events: Vec::new(),
    };
    let mut periodic = false;
    loop {
        if eng.step_r1() || eng.step_r2() {
            continue;
        }
        if !periodic && eng.periodic_layout().is_some() {
            periodic = true;
            if eng.step_r3() {
                continue;
            }
        }
        break;
    }

    let gates: Vec<Gate> = eng.work.iter().flatten().map(|s| s.gate.clone()).collect();
    let origins: Vec<usize> = eng.work.iter().flatten().map(|s| s.origin).collect();
    let reduced = Circuit::new(c.n_qubits(), c.param_count(), gates).expect("rewrites preserve validity");

    let mut classes = Vec::new();
    let mut class_at = BTreeMap::new();
    for (gi, g) in reduced.gates().iter().enumerate() {
        let Some(e) = &g.expr else { continue };
        if e.is_constant() {
            continue;
        }
        class_at.insert(gi, classes.len());
        classes.push(ParamClass {
            members: e.terms().iter().map(|(&param, &k)| ClassMember { param, sign: k.signum() as i8 }).collect(),
            offset_half_pi: e.const_half_pi(),
            qubit: g.qubits[0],
            axis: g.kind,
            gate: gi,
        });
    }

    let mut euler_merges = Vec::new();
    for q in 0..reduced.n_qubits() {
        let mut run: Vec<usize> = Vec::new();
        let mut flush = |run: &mut Vec<usize>| {
            let cls: Vec<usize> = run.iter().filter_map(|g| class_at.get(g).copied()).collect();
            if cls.len() >= 4 {
                euler_merges.push(EulerMerge { qubit: q, gates: run.clone(), classes: cls });
            }
            run.clear();
        };
        for (gi, g) in reduced.gates().iter().enumerate() {
            if !g.touches(q) {
                continue;
            }
            if g.is_two_qubit() {
                flush(&mut run);
            } else {
                run.push(gi);
            }
        }
        flush(&mut run);
    }
    for m in &euler_merges {
        let origin_of = |gi: usize| origins[gi];
        eng.events.push(RuleEvent {
            rule: Rule::R4,
            qubit: m.qubit,
            kept: origin_of(m.gates[0]),
            absorbed: m.gates[1..].iter().map(|&g| origin_of(g)).collect(),
        });
    }

    let effective_count = classes.len() - euler_merges.iter().map(|m| m.classes.len() - 3).sum::<usize>();
    Ok(ReductionReport {
        resources: count_resources(c),
        effective_count,
        reduced,
        map: CombinationMap { classes, unused },
        euler_merges,
        rules_fired: eng.events,
        periodic,
    })
}

/// Affine map from input parameters to output parameters: output `k` is `map[k]`.
pub type ParamMap = Vec<ParamExpr>;

pub fn apply_param_map(map: &ParamMap, theta: &[f64]) -> Vec<f64> {
    map.iter().map(|e| e.eval(theta)).collect()
}

/// Rewrites an RX-CX circuit with `2L` alternating layers as an `L`-layer
/// linear-chain circuit (even pairs, then odd pairs, in every layer) by
/// pushing each RX between `E_{2m}` and `E_{2m+1}` through the CX it targets
/// into a neighbouring rotation layer.
pub fn reduce_alternating_to_linear(c: &Circuit) -> Result<(Circuit, ParamMap), ReduceError> {
    let n = c.n_qubits();
    let bad = |why: String| ReduceError::NotAlternatingRxCx(why);
    if n < 2 {
        return Err(bad(format!("{n} qubits")));
    }
    let pairs = |j: usize| -> BTreeSet<(usize, usize)> { (j % 2..n - 1).step_by(2).map(|i| (i + 1, i)).collect() };
    let gates = c.gates();
    let mut rot_layers: Vec<Vec<ParamExpr>> = Vec::new();
    let mut pos = 0;
    loop {
        let mut layer: Vec<Option<ParamExpr>> = vec![None; n];
        for _ in 0..n {
            let g = gates.get(pos).ok_or_else(|| bad(format!("rotation layer {} is incomplete", rot_layers.len())))?;
            if g.kind != GateKind::RX || layer[g.qubits[0]].is_some() {
                return Err(bad(format!("gate {pos} breaks rotation layer {}", rot_layers.len())));
            }
            layer[g.qubits[0]] = g.expr.clone();
            pos += 1;
        }
        rot_layers.push(layer.into_iter().map(Option::unwrap).collect());
        if pos == gates.len() {
            break;
        }
        let j = rot_layers.len() - 1;
        let want = pairs(j);
        let got: BTreeSet<(usize, usize)> = gates
            .get(pos..pos + want.len())
            .ok_or_else(|| bad(format!("entanglement layer {j} is truncated")))?
            .iter()
            .filter(|g| g.kind == GateKind::CX)
            .map(|g| (g.qubits[0], g.qubits[1]))
            .collect();
        if got != want {
            return Err(bad(format!("entanglement layer {j} is not the alternating pattern")));
        }
        pos += want.len();
    }
    let layers = rot_layers.len() - 1;
    if layers % 2 != 0 {
        return Err(bad(format!("{layers} entanglement layers (need an even count)")));
    }
    let half = layers / 2;
    let mut order: Vec<usize> = (0..n - 1).step_by(2).collect();
    order.extend((1..n - 1).step_by(2));
    let out = build_ansatz(&AnsatzSpec::new(Family::RxCxLModified(order), n, half))
        .map_err(|e| bad(format!("cannot build linear form: {e}")))?;

    let controls = |j: usize| -> BTreeSet<usize> { pairs(j).into_iter().map(|(c, _)| c).collect() };
    let mut map: ParamMap = vec![ParamExpr::default(); out.param_count()];
    for (j, layer) in rot_layers.iter().enumerate() {
        for (q, e) in layer.iter().enumerate() {
            // RX on a control of E_{j-1} commutes back; otherwise it passes
            // forward through the CX it targets in E_j.
            let boundary = if j % 2 == 0 || !controls(j - 1).contains(&q) {
                j / 2
            } else {
                debug_assert!(!controls(j).contains(&q));
                j / 2 + 1
            };
            map[boundary * n + q].add_scaled(e, 1);
        }
    }
    Ok((out, map))
}

/// Outcome of a randomized certificate run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Certificate {
    pub checks: usize,
    pub worst: f64,
    pub tolerance: f64,
}

impl Certificate {
    pub fn passed(&self) -> bool {
        self.worst < self.tolerance
    }
}

fn rng_for(seed: u64, k: usize) -> rand_chacha::ChaCha8Rng {
    use rand::SeedableRng;
    rand_chacha::ChaCha8Rng::seed_from_u64(seed ^ (k as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Checks that shifting one class member by `+s_a·δ` and another by
/// `−s_b·δ` leaves the unitary unchanged, `draws` times per class.
pub fn shift_certificate(c: &Circuit, map: &CombinationMap, draws: usize, seed: u64) -> Certificate {
    let p = c.param_count();
    let worst = map
        .classes
        .par_iter()
        .enumerate()
        .filter(|(_, cls)| cls.members.len() >= 2)
        .map(|(k, cls)| {
            let mut rng = rng_for(seed, k);
            let mut worst = 0.0f64;
            for _ in 0..draws {
                let theta: Vec<f64> = (0..p).map(|_| rng.gen_range(0.0..TAU)).collect();
                let a = rng.gen_range(0..cls.members.len());
                let b = (a + rng.gen_range(1..cls.members.len())) % cls.members.len();
                let delta = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
                let (ma, mb) = (cls.members[a], cls.members[b]);
                let mut shifted = theta.clone();
                shifted[ma.param as usize] += ma.sign as f64 * delta;
                shifted[mb.param as usize] -= mb.sign as f64 * delta;
                let u = circuit_unitary(c, &theta).expect("arity");
                let v = circuit_unitary(c, &shifted).expect("arity");
                worst = worst.max(u.frobenius_distance(&v));
            }
            worst
        })
        .reduce(|| 0.0, f64::max);
    let checks = map.classes.iter().filter(|c| c.members.len() >= 2).count() * draws;
    Certificate { checks, worst, tolerance: 1e-9 }
}

/// Checks every Euler merge: the bound run's 2×2 product is reproduced by
/// its ZXZ angles.
pub fn euler_certificate(report: &ReductionReport, draws: usize, seed: u64) -> Certificate {
    let c = &report.reduced;
    let mut rng = rng_for(seed, usize::MAX);
    let mut worst = 0.0f64;
    let mut checks = 0;
    for m in &report.euler_merges {
        for _ in 0..draws {
            let theta: Vec<f64> = (0..c.param_count()).map(|_| rng.gen_range(0.0..TAU)).collect();
            let bound = c.bind(&theta).expect("arity");
            let mut u = [[C64::new(1.0, 0.0), C64::new(0.0, 0.0)], [C64::new(0.0, 0.0), C64::new(1.0, 0.0)]];
            for &gi in &m.gates {
                let g = match bound[gi] {
                    BoundGate::Rx(_, t) => rotation_matrix(GateKind::RX, t),
                    BoundGate::Ry(_, t) => rotation_matrix(GateKind::RY, t),
                    BoundGate::Rz(_, t) => rotation_matrix(GateKind::RZ, t),
                    BoundGate::X(_) => rotation_matrix(GateKind::X, 0.0),
                    BoundGate::Cx { .. } => unreachable!("runs contain no two-qubit gates"),
                };
                u = mul2(&g, &u);
            }
            let e = euler_zxz(&u).expect("product of unitaries");
            worst = worst.max(crate::qsim::dist2(&e.matrix(), &u));
            checks += 1;
        }
    }
    Certificate { checks, worst, tolerance: 1e-9 }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsim::circuit_unitary;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn build(f: Family, n: usize, l: usize) -> Circuit {
        build_ansatz(&AnsatzSpec::new(f, n, l)).unwrap()
    }

    fn x_rule_circuit() -> Circuit {
        Circuit::new(2, 2, vec![Gate::rx(0, ParamExpr::param(0)), Gate::cx(1, 0), Gate::rx(0, ParamExpr::param(1))]).unwrap()
    }

    #[test]
    fn x_rule_merges_to_one_class() {
        let r = combine_parameters(&x_rule_circuit()).unwrap();
        assert_eq!(r.effective_count, 1);
        let m = &r.map.classes[0].members;
        assert_eq!(m, &vec![ClassMember { param: 0, sign: 1 }, ClassMember { param: 1, sign: 1 }]);
        assert_eq!(r.rules_fired[0].rule, Rule::R2);
        assert!(shift_certificate(&x_rule_circuit(), &r.map, 20, 1).passed());
    }

    #[test]
    fn control_side_blocks_x_rule() {
        let c = Circuit::new(2, 2, vec![Gate::rx(1, ParamExpr::param(0)), Gate::cx(1, 0), Gate::rx(1, ParamExpr::param(1))]).unwrap();
        assert_eq!(combine_parameters(&c).unwrap().effective_count, 2);
    }

    #[test]
    fn x_gate_flips_rz_sign() {
        let c = Circuit::new(
            1,
            2,
            vec![
                Gate::rotation(GateKind::RZ, 0, ParamExpr::param(0)),
                Gate::x(0),
                Gate::rotation(GateKind::RZ, 0, ParamExpr::param(1)),
            ],
        )
        .unwrap();
        let r = combine_parameters(&c).unwrap();
        assert_eq!(r.effective_count, 1);
        assert_eq!(r.map.classes[0].members[1], ClassMember { param: 1, sign: -1 });
        assert!(shift_certificate(&c, &r.map, 20, 3).passed());
        for t in [[0.4, 1.1], [2.0, -0.3]] {
            let d = circuit_unitary(&c, &t).unwrap().frobenius_distance(&circuit_unitary(&r.reduced, &t).unwrap());
            assert!(d < 1e-12);
        }
    }

    #[test]
    fn linear_n4_l8_matches_periodic_pattern() {
        let c = build(Family::RxCxL, 4, 8);
        let r = combine_parameters(&c).unwrap();
        assert!(r.periodic);
        assert_eq!(r.effective_count, 11);
        assert_eq!(r.per_qubit_counts(), vec![1, 2, 4, 4]);
        for cls in &r.map.classes {
            let p = period(cls.qubit);
            let layers: BTreeSet<usize> = cls.members.iter().map(|m| m.param as usize / 4 % p).collect();
            assert_eq!(layers.len(), 1, "class mixes residues: {cls:?}");
            assert!(cls.members.iter().all(|m| m.param as usize % 4 == cls.qubit));
        }
        assert!(shift_certificate(&c, &r.map, 5, 9).passed());
    }

    #[test]
    fn closed_forms() {
        assert_eq!(effective_upper_bound_rxcx(1), 1);
        assert_eq!(effective_upper_bound_rxcx(2), 3);
        assert_eq!(effective_upper_bound_rxcx(4), 12);
        assert_eq!(effective_count_formula(&Family::RxRzCxA, 6, 3), Ok(63));
        assert_eq!(effective_count_formula(&Family::RyCxA, 2, 1), Ok(2));
        assert_eq!(effective_count_formula(&Family::RxRyCxA, 4, 2), Ok(26));
        assert!(effective_count_formula(&Family::RxCxL, 4, 2).is_err());
        assert_eq!(periodic_count_rxcx(4, 9), 11);
        assert_eq!((0..6).map(period).collect::<Vec<_>>(), vec![1, 2, 4, 4, 8, 8]);
    }

    #[test]
    fn degenerate_inputs() {
        let r = combine_parameters(&Circuit::empty(3)).unwrap();
        assert_eq!(r.effective_count, 0);
        assert!(r.map.classes.is_empty());
        let one = Circuit::new(1, 3, vec![Gate::rx(0, ParamExpr::param(0)), Gate::rx(0, ParamExpr::param(2))]).unwrap();
        let r = combine_parameters(&one).unwrap();
        assert_eq!(r.effective_count, 1);
        assert_eq!(r.map.unused, vec![1]);
        let fixed = Circuit::new(2, 0, vec![Gate::cx(0, 1), Gate::x(1), Gate::rx(0, ParamExpr::constant(1))]).unwrap();
        assert_eq!(combine_parameters(&fixed).unwrap().effective_count, 0);
    }

    #[test]
    fn precondition_errors() {
        let shared = Circuit::new(1, 1, vec![Gate::rx(0, ParamExpr::param(0)), Gate::x(0), Gate::rx(0, ParamExpr::param(0))]).unwrap();
        assert_eq!(combine_parameters(&shared), Err(ReduceError::SharedParameter(0)));
        let scaled = Circuit::new(1, 1, vec![Gate::rx(0, ParamExpr::term(0, 2))]).unwrap();
        assert!(matches!(combine_parameters(&scaled), Err(ReduceError::NonUnitCoefficient { .. })));
    }

    #[test]
    fn euler_merge_on_idle_wire() {
        let axes = [GateKind::RZ, GateKind::RX, GateKind::RZ, GateKind::RX, GateKind::RY];
        let gates = axes.iter().enumerate().map(|(k, &a)| Gate::rotation(a, 0, ParamExpr::param(k as u32))).collect();
        let c = Circuit::new(1, 5, gates).unwrap();
        let r = combine_parameters(&c).unwrap();
        assert_eq!(r.effective_count, 3);
        assert_eq!(r.euler_merges.len(), 1);
        let cert = euler_certificate(&r, 10, 4);
        assert_eq!(cert.checks, 10);
        assert!(cert.passed());
    }

    #[test]
    fn periodic_rule_needs_uniform_order() {
        let mut gates = Vec::new();
        let orders = [[(1, 0), (2, 1), (3, 2)], [(3, 2), (1, 0), (2, 1)]];
        let mut id = 0;
        for j in 0..5 {
            for q in 0..4 {
                gates.push(Gate::rx(q, ParamExpr::param(id)));
                id += 1;
            }
            if j < 4 {
                gates.extend(orders[j % 2].iter().map(|&(c, t)| Gate::cx(c, t)));
            }
        }
        let r = combine_parameters(&Circuit::new(4, 20, gates).unwrap()).unwrap();
        assert!(!r.periodic);
        assert!(r.rules_fired.iter().all(|e| e.rule != Rule::R3));
    }

    #[test]
    fn alternating_to_linear_small() {
        let c = build(Family::RxCxA, 2, 2);
        let (lin, map) = reduce_alternating_to_linear(&c).unwrap();
        assert_eq!(lin.resources(), Resources { params: 4, cx: 1, layers: 1 });
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let theta: Vec<f64> = (0..c.param_count()).map(|_| rng.gen_range(0.0..TAU)).collect();
            let u = circuit_unitary(&c, &theta).unwrap();
            let v = circuit_unitary(&lin, &apply_param_map(&map, &theta)).unwrap();
            assert!(u.frobenius_distance(&v) < 1e-12);
        }
        let (flat, m0) = reduce_alternating_to_linear(&build(Family::RxCxA, 3, 0)).unwrap();
        assert_eq!(flat.resources(), Resources { params: 3, cx: 0, layers: 0 });
        assert_eq!(m0, (0..3).map(ParamExpr::param).collect::<Vec<_>>());
    }

    #[test]
    fn alternating_to_linear_rejects_other_shapes() {
        for c in [build(Family::RxCxA, 4, 3), build(Family::RxCxL, 4, 2), build(Family::RxRzCxA, 4, 2), x_rule_circuit()] {
            assert!(matches!(reduce_alternating_to_linear(&c), Err(ReduceError::NotAlternatingRxCx(_))));
        }
    }

    #[test]
    fn report_json_shape() {
        let r = combine_parameters(&x_rule_circuit()).unwrap();
        let v = r.to_json();
        assert_eq!(v["effective_count"], 1);
        assert_eq!(v["classes"][0]["members"][1]["param"], 1);
        assert_eq!(v["classes"][0]["members"][1]["sign"], 1);
        assert_eq!(v["rules_fired"][0]["rule"], "R2");
        assert_eq!(v["resources"]["params"], 2);
    }
}
