//! Parameterized circuits with affine parameter expressions, the ansatz
//! builders, and the circuit JSON format.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::str::FromStr;

use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::qsim::{BoundGate, GateKind, QsimError};

pub type ParamId = u32;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CircuitError {
    #[error("invalid ansatz spec: {0}")]
    InvalidSpec(String),
    #[error("gate {index}: {source}")]
    InvalidGate { index: usize, source: QsimError },
    #[error("gate {index}: {reason}")]
    BadExpr { index: usize, reason: String },
    #[error("gate {index} references parameter {param} but the circuit has {count}")]
    ParamOutOfRange { index: usize, param: ParamId, count: usize },
    #[error("parse error at `{field}`{}: {reason}", location(*.line, *.column))]
    Parse { field: String, line: usize, column: usize, reason: String },
}

fn location(line: usize, column: usize) -> String {
    if line == 0 {
        String::new()
    } else {
        format!(" (line {line}, column {column})")
    }
}

fn parse_err(field: impl Into<String>, reason: impl Into<String>) -> CircuitError {
    CircuitError::Parse { field: field.into(), line: 0, column: 0, reason: reason.into() }
}

/// `Σ c_k·θ_k + k·π/2` with integer coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct ParamExpr {
    terms: BTreeMap<ParamId, i64>,
    const_half_pi: i64,
}

impl ParamExpr {
    pub fn param(id: ParamId) -> Self {
        Self::term(id, 1)
    }

    pub fn term(id: ParamId, coeff: i64) -> Self {
        let mut e = Self::default();
        e.add_term(id, coeff);
        e
    }

    /// The constant `k·π/2`.
    pub fn constant(k: i64) -> Self {
        Self { terms: BTreeMap::new(), const_half_pi: k }
    }

    pub fn from_parts(terms: impl IntoIterator<Item = (ParamId, i64)>, const_half_pi: i64) -> Self {
        let mut e = Self::constant(const_half_pi);
        for (id, c) in terms {
            e.add_term(id, c);
        }
        e
    }

    pub fn add_term(&mut self, id: ParamId, coeff: i64) {
        let c = self.terms.entry(id).or_insert(0);
        *c += coeff;
        if *c == 0 {
            self.terms.remove(&id);
        }
    }

    pub fn terms(&self) -> &BTreeMap<ParamId, i64> {
        &self.terms
    }

    pub fn const_half_pi(&self) -> i64 {
        self.const_half_pi
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty()
    }

    /// `self + sign·other`.
    pub fn add_scaled(&mut self, other: &ParamExpr, sign: i64) {
        for (&id, &c) in &other.terms {
            self.add_term(id, sign * c);
        }
        self.const_half_pi += sign * other.const_half_pi;
    }

    pub fn negated(&self) -> ParamExpr {
        let mut e = ParamExpr::default();
        e.add_scaled(self, -1);
        e
    }

    pub fn max_param(&self) -> Option<ParamId> {
        self.terms.keys().next_back().copied()
    }

    /// Evaluates at `theta`; every referenced id must be in range.
    pub fn eval(&self, theta: &[f64]) -> f64 {
        let lin: f64 = self.terms.iter().map(|(&id, &c)| c as f64 * theta[id as usize]).sum();
        lin + self.const_half_pi as f64 * FRAC_PI_2
    }

    fn to_json(&self) -> Value {
        let terms: Map<String, Value> = self.terms.iter().map(|(id, c)| (id.to_string(), json!(c))).collect();
        json!({"terms": terms, "const_half_pi": self.const_half_pi})
    }
}

impl fmt::Display for ParamExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (&id, &c) in &self.terms {
            let sign = if c < 0 { "-" } else if first { "" } else { "+" };
            let mag = c.unsigned_abs();
            if mag == 1 {
                write!(f, "{sign}θ{id}")?;
            } else {
                write!(f, "{sign}{mag}θ{id}")?;
            }
            first = false;
        }
        if self.const_half_pi != 0 || first {
            let k = self.const_half_pi;
            let sign = if k < 0 { "-" } else if first { "" } else { "+" };
            write!(f, "{sign}{}π/2", k.unsigned_abs())?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Gate {
    pub kind: GateKind,
    pub qubits: Vec<usize>,
    /// Present exactly for rotations.
    pub expr: Option<ParamExpr>,
}

impl Gate {
    pub fn rotation(kind: GateKind, qubit: usize, expr: ParamExpr) -> Self {
        assert!(kind.is_rotation());
        Self { kind, qubits: vec![qubit], expr: Some(expr) }
    }

    pub fn rx(qubit: usize, expr: ParamExpr) -> Self {
        Self::rotation(GateKind::RX, qubit, expr)
    }

    pub fn x(qubit: usize) -> Self {
        Self { kind: GateKind::X, qubits: vec![qubit], expr: None }
    }

    pub fn cx(control: usize, target: usize) -> Self {
        Self { kind: GateKind::CX, qubits: vec![control, target], expr: None }
    }

    pub fn is_two_qubit(&self) -> bool {
        self.kind == GateKind::CX
    }

    pub fn touches(&self, q: usize) -> bool {
        self.qubits.contains(&q)
    }

    fn to_json(&self) -> Value {
        let mut m = Map::new();
        m.insert("kind".into(), json!(self.kind.name()));
        m.insert("qubits".into(), json!(self.qubits));
        if let Some(e) = &self.expr {
            m.insert("expr".into(), e.to_json());
        }
        Value::Object(m)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Circuit {
    n_qubits: usize,
    params: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n_qubits: usize, params: usize, gates: Vec<Gate>) -> Result<Self, CircuitError> {
        for (index, g) in gates.iter().enumerate() {
            let angle = g.kind.is_rotation().then_some(0.0);
            if g.kind.is_rotation() != g.expr.is_some() {
                let reason = if g.kind.is_rotation() { "rotation without expr" } else { "expr on a fixed gate" };
                return Err(CircuitError::BadExpr { index, reason: reason.into() });
            }
            BoundGate::new(g.kind, &g.qubits, angle, n_qubits).map_err(|source| CircuitError::InvalidGate { index, source })?;
            if let Some(p) = g.expr.as_ref().and_then(ParamExpr::max_param) {
                if p as usize >= params {
                    return Err(CircuitError::ParamOutOfRange { index, param: p, count: params });
                }
            }
        }
        Ok(Self { n_qubits, params, gates })
    }

    pub fn empty(n_qubits: usize) -> Self {
        Self { n_qubits, params: 0, gates: vec![] }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// Raw parameter count.
    pub fn param_count(&self) -> usize {
        self.params
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn bind(&self, theta: &[f64]) -> Result<Vec<BoundGate>, QsimError> {
        if theta.len() != self.params {
            return Err(QsimError::ArityMismatch { expected: self.params, got: theta.len() });
        }
        Ok(self
            .gates
            .iter()
            .map(|g| match g.kind {
                GateKind::RX => BoundGate::Rx(g.qubits[0], g.expr.as_ref().unwrap().eval(theta)),
                GateKind::RY => BoundGate::Ry(g.qubits[0], g.expr.as_ref().unwrap().eval(theta)),
                GateKind::RZ => BoundGate::Rz(g.qubits[0], g.expr.as_ref().unwrap().eval(theta)),
                GateKind::X => BoundGate::X(g.qubits[0]),
                GateKind::CX => BoundGate::Cx { control: g.qubits[0], target: g.qubits[1] },
            })
            .collect())
    }

    pub fn resources(&self) -> Resources {
        count_resources(self)
    }

    /// Canonical JSON: compact, keys sorted.
    pub fn to_json(&self) -> String {
        let gates: Vec<Value> = self.gates.iter().map(Gate::to_json).collect();
        json!({"n_qubits": self.n_qubits, "params": self.params, "gates": gates}).to_string()
    }

    pub fn from_json(text: &str) -> Result<Self, CircuitError> {
        let v: Value = serde_json::from_str(text).map_err(|e| CircuitError::Parse {
            field: "<document>".into(),
            line: e.line(),
            column: e.column(),
            reason: e.to_string(),
        })?;
        let obj = v.as_object().ok_or_else(|| parse_err("<document>", "expected an object"))?;
        let n_qubits = get_uint(obj, "n_qubits", "n_qubits")?;
        let params = get_uint(obj, "params", "params")?;
        let raw_gates = obj
            .get("gates")
            .ok_or_else(|| parse_err("gates", "missing field"))?
            .as_array()
            .ok_or_else(|| parse_err("gates", "expected an array"))?;
        let mut gates = Vec::with_capacity(raw_gates.len());
        for (i, g) in raw_gates.iter().enumerate() {
            let path = format!("gates[{i}]");
            let go = g.as_object().ok_or_else(|| parse_err(&path, "expected an object"))?;
            let kind_s = go
                .get("kind")
                .and_then(Value::as_str)
                .ok_or_else(|| parse_err(format!("{path}.kind"), "missing or not a string"))?;
            let kind = GateKind::from_name(kind_s)
                .ok_or_else(|| parse_err(format!("{path}.kind"), format!("unknown gate kind {kind_s:?}")))?;
            let qubits = go
                .get("qubits")
                .and_then(Value::as_array)
                .ok_or_else(|| parse_err(format!("{path}.qubits"), "missing or not an array"))?
                .iter()
                .map(|q| q.as_u64().map(|q| q as usize))
                .collect::<Option<Vec<_>>>()
                .ok_or_else(|| parse_err(format!("{path}.qubits"), "expected non-negative integers"))?;
            let expr = match (kind.is_rotation(), go.get("expr")) {
                (true, None) => return Err(parse_err(format!("{path}.expr"), "missing field (required for rotations)")),
                (false, Some(_)) => return Err(parse_err(format!("{path}.expr"), format!("not allowed on {kind_s}"))),
                (false, None) => None,
                (true, Some(e)) => Some(parse_expr(e, &format!("{path}.expr"))?),
            };
            gates.push(Gate { kind, qubits, expr });
        }
        Circuit::new(n_qubits, params, gates)
    }
}

fn get_uint(obj: &Map<String, Value>, key: &str, path: &str) -> Result<usize, CircuitError> {
    obj.get(key)
        .ok_or_else(|| parse_err(path, "missing field"))?
        .as_u64()
        .map(|v| v as usize)
        .ok_or_else(|| parse_err(path, "expected a non-negative integer"))
}

fn parse_expr(v: &Value, path: &str) -> Result<ParamExpr, CircuitError> {
    let o = v.as_object().ok_or_else(|| parse_err(path, "expected an object"))?;
    let terms = o
        .get("terms")
        .ok_or_else(|| parse_err(format!("{path}.terms"), "missing field"))?
        .as_object()
        .ok_or_else(|| parse_err(format!("{path}.terms"), "expected an object"))?;
    let k = o
        .get("const_half_pi")
        .ok_or_else(|| parse_err(format!("{path}.const_half_pi"), "missing field"))?
        .as_i64()
        .ok_or_else(|| parse_err(format!("{path}.const_half_pi"), "expected an integer"))?;
    let mut e = ParamExpr::constant(k);
    for (id, c) in terms {
        let field = format!("{path}.terms.{id}");
        let pid: ParamId = id.parse().map_err(|_| parse_err(&field, "parameter id must be an integer"))?;
        let c = c.as_i64().ok_or_else(|| parse_err(&field, "coefficient must be an integer"))?;
        if c == 0 {
            return Err(parse_err(&field, "zero coefficients are not stored"));
        }
        e.add_term(pid, c);
    }
    Ok(e)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct Resources {
    pub params: usize,
    pub cx: usize,
    pub layers: usize,
}

/// Raw parameters, two-qubit gates, and entanglement layers (maximal runs of
/// consecutive two-qubit gates).
pub fn count_resources(c: &Circuit) -> Resources {
    let mut cx = 0;
    let mut layers = 0;
    let mut in_run = false;
    for g in &c.gates {
        if g.is_two_qubit() {
            cx += 1;
            if !in_run {
                layers += 1;
            }
            in_run = true;
        } else {
            in_run = false;
        }
    }
    Resources { params: c.params, cx, layers }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Family {
    RxCxL,
    /// Linear chain in a custom order; entry `i` of the order stands for CX(i+1→i).
    RxCxLModified(Vec<usize>),
    RxCxA,
    RxRzCxA,
    RyCxA,
    RxRyCxA,
    RyRzCxA,
}

impl Family {
    /// Every family, with the modified-linear one in canonical order.
    pub fn all(n: usize) -> Vec<Family> {
        vec![
            Family::RxCxL,
            Family::RxCxLModified((0..n.saturating_sub(1)).rev().collect()),
            Family::RxCxA,
            Family::RxRzCxA,
            Family::RyCxA,
            Family::RxRyCxA,
            Family::RyRzCxA,
        ]
    }

    /// Rotation axes applied on each wire within a rotation layer, in order.
    pub fn axes(&self) -> &'static [GateKind] {
        match self {
            Family::RxCxL | Family::RxCxLModified(_) | Family::RxCxA => &[GateKind::RX],
            Family::RyCxA => &[GateKind::RY],
            Family::RxRzCxA => &[GateKind::RX, GateKind::RZ],
            Family::RxRyCxA => &[GateKind::RX, GateKind::RY],
            Family::RyRzCxA => &[GateKind::RY, GateKind::RZ],
        }
    }

    pub fn is_alternating(&self) -> bool {
        !matches!(self, Family::RxCxL | Family::RxCxLModified(_))
    }

    pub fn slug(&self) -> &'static str {
        match self {
            Family::RxCxL => "rx-cx-l",
            Family::RxCxLModified(_) => "rx-cx-l-modified",
            Family::RxCxA => "rx-cx-a",
            Family::RxRzCxA => "rx-rz-cx-a",
            Family::RyCxA => "ry-cx-a",
            Family::RxRyCxA => "rx-ry-cx-a",
            Family::RyRzCxA => "ry-rz-cx-a",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::RxCxLModified(order) => {
                let o: Vec<String> = order.iter().map(usize::to_string).collect();
                write!(f, "{}[{}]", self.slug(), o.join(","))
            }
            _ => f.write_str(self.slug()),
        }
    }
}

impl FromStr for Family {
    type Err = CircuitError;

    /// Accepts the slugs above; the modified family takes its order as
    /// `rx-cx-l-modified[2,0,1]` or `rx-cx-l-modified:2,0,1`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.trim().to_ascii_lowercase();
        if let Some(rest) = lower.strip_prefix("rx-cx-l-modified") {
            let inner = rest.trim_start_matches([':', '[']).trim_end_matches(']');
            let order = if inner.is_empty() {
                vec![]
            } else {
                inner
                    .split(',')
                    .map(|t| t.trim().parse::<usize>())
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|_| CircuitError::InvalidSpec(format!("bad CX order in {s:?}")))?
            };
            return Ok(Family::RxCxLModified(order));
        }
        Ok(match lower.as_str() {
            "rx-cx-l" => Family::RxCxL,
            "rx-cx-a" => Family::RxCxA,
            "rx-rz-cx-a" => Family::RxRzCxA,
            "ry-cx-a" => Family::RyCxA,
            "rx-ry-cx-a" => Family::RxRyCxA,
            "ry-rz-cx-a" => Family::RyRzCxA,
            _ => return Err(CircuitError::InvalidSpec(format!("unknown family {s:?}"))),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AnsatzSpec {
    pub family: Family,
    pub n_qubits: usize,
    /// Entanglement layers; the circuit has one more rotation layer.
    pub layers: usize,
}

impl AnsatzSpec {
    pub fn new(family: Family, n_qubits: usize, layers: usize) -> Self {
        Self { family, n_qubits, layers }
    }

    pub fn validate(&self) -> Result<(), CircuitError> {
        if self.n_qubits < 2 {
            return Err(CircuitError::InvalidSpec(format!("need at least 2 qubits, got {}", self.n_qubits)));
        }
        if self.n_qubits > 24 {
            return Err(CircuitError::InvalidSpec(format!("{} qubits is beyond dense simulation", self.n_qubits)));
        }
        if let Family::RxCxLModified(order) = &self.family {
            let mut seen = order.clone();
            seen.sort_unstable();
            if seen != (0..self.n_qubits - 1).collect::<Vec<_>>() {
                return Err(CircuitError::InvalidSpec(format!(
                    "CX order {order:?} is not a permutation of 0..{}",
                    self.n_qubits - 1
                )));
            }
        }
        Ok(())
    }
}

/// Chain pairs of entanglement layer `j` as (control, target).
pub fn entanglement_layer(family: &Family, n: usize, j: usize) -> Vec<(usize, usize)> {
    match family {
        Family::RxCxL => (0..n - 1).map(|i| (i + 1, i)).collect(),
        Family::RxCxLModified(order) => order.iter().map(|&i| (i + 1, i)).collect(),
        _ => (j % 2..n.saturating_sub(1)).step_by(2).map(|i| (i + 1, i)).collect(),
    }
}

pub fn build_ansatz(spec: &AnsatzSpec) -> Result<Circuit, CircuitError> {
    spec.validate()?;
    let n = spec.n_qubits;
    let axes = spec.family.axes();
    let per_layer = n * axes.len();
    let mut gates = Vec::new();
    for j in 0..=spec.layers {
        for q in 0..n {
            for (a, &axis) in axes.iter().enumerate() {
                let id = (j * per_layer + q * axes.len() + a) as ParamId;
                gates.push(Gate::rotation(axis, q, ParamExpr::param(id)));
            }
        }
        if j < spec.layers {
            gates.extend(entanglement_layer(&spec.family, n, j).into_iter().map(|(c, t)| Gate::cx(c, t)));
        }
    }
    Circuit::new(n, per_layer * (spec.layers + 1), gates)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsim::{circuit_unitary, gates_unitary};
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn build(f: Family, n: usize, l: usize) -> Circuit {
        build_ansatz(&AnsatzSpec::new(f, n, l)).unwrap()
    }

    #[test]
    fn builder_examples() {
        assert_eq!(build(Family::RxCxL, 4, 4).resources(), Resources { params: 20, cx: 12, layers: 4 });
        assert_eq!(build(Family::RxCxA, 4, 4).resources(), Resources { params: 20, cx: 6, layers: 4 });
        assert_eq!(build(Family::RxRzCxA, 6, 5).resources(), Resources { params: 72, cx: 13, layers: 5 });
        assert_eq!(build(Family::RxCxL, 10, 5).resources(), Resources { params: 60, cx: 45, layers: 5 });
        assert_eq!(build(Family::RxCxA, 9, 5).resources(), Resources { params: 54, cx: 20, layers: 5 });
        assert_eq!(count_resources(&Circuit::empty(3)), Resources { params: 0, cx: 0, layers: 0 });
    }

    #[test]
    fn layout_and_parameter_ids() {
        let c = build(Family::RxRzCxA, 3, 1);
        let got: Vec<String> = c
            .gates()
            .iter()
            .map(|g| match &g.expr {
                Some(e) => format!("{}{}:{e}", g.kind.name(), g.qubits[0]),
                None => format!("{}{:?}", g.kind.name(), g.qubits),
            })
            .collect();
        let want = [
            "RX0:θ0", "RZ0:θ1", "RX1:θ2", "RZ1:θ3", "RX2:θ4", "RZ2:θ5", "CX[1, 0]", "RX0:θ6", "RZ0:θ7", "RX1:θ8",
            "RZ1:θ9", "RX2:θ10", "RZ2:θ11",
        ];
        assert_eq!(got, want);
        let a = build(Family::RxCxA, 5, 2);
        let cxs: Vec<&[usize]> = a.gates().iter().filter(|g| g.is_two_qubit()).map(|g| &g.qubits[..]).collect();
        assert_eq!(cxs, vec![&[1, 0][..], &[3, 2], &[2, 1], &[4, 3]]);
    }

    #[test]
    fn modified_order_same_multiset() {
        let lin = build(Family::RxCxL, 5, 2);
        let modi = build(Family::RxCxLModified(vec![2, 0, 3, 1]), 5, 2);
        let mut a: Vec<_> = lin.gates().to_vec();
        let mut b: Vec<_> = modi.gates().to_vec();
        assert_ne!(a, b);
        let key = |g: &Gate| format!("{g:?}");
        a.sort_by_key(key);
        b.sort_by_key(key);
        assert_eq!(a, b);
        assert!(build_ansatz(&AnsatzSpec::new(Family::RxCxLModified(vec![0, 0, 1, 2]), 5, 1)).is_err());
    }

    #[test]
    fn invalid_specs() {
        assert!(matches!(build_ansatz(&AnsatzSpec::new(Family::RxCxL, 1, 2)), Err(CircuitError::InvalidSpec(_))));
    }

    #[test]
    fn bind_evaluates_affine_expression() {
        let c = Circuit::new(1, 1, vec![Gate::rx(0, ParamExpr::from_parts([(0, 1)], 2))]).unwrap();
        assert_eq!(c.bind(&[0.5]).unwrap(), vec![BoundGate::Rx(0, 0.5 + PI)]);
        assert!(c.bind(&[]).is_err());
    }

    #[test]
    fn x_rule_reduced_circuit_matches() {
        let orig = Circuit::new(
            2,
            2,
            vec![Gate::rx(0, ParamExpr::param(0)), Gate::cx(1, 0), Gate::rx(0, ParamExpr::param(1))],
        )
        .unwrap();
        let reduced = Circuit::new(2, 2, vec![Gate::cx(1, 0), Gate::rx(0, ParamExpr::from_parts([(0, 1), (1, 1)], 0))]).unwrap();
        for &(a, b) in &[(0.3, 1.9), (-2.0, 0.1), (4.0, 5.5)] {
            let d = circuit_unitary(&orig, &[a, b]).unwrap().frobenius_distance(&circuit_unitary(&reduced, &[a, b]).unwrap());
            assert!(d < 1e-10);
        }
    }

    #[test]
    fn constructor_validation() {
        assert!(matches!(
            Circuit::new(2, 1, vec![Gate::rx(0, ParamExpr::param(3))]),
            Err(CircuitError::ParamOutOfRange { param: 3, .. })
        ));
        assert!(matches!(Circuit::new(2, 0, vec![Gate::cx(0, 2)]), Err(CircuitError::InvalidGate { .. })));
        let bad = Gate { kind: GateKind::RX, qubits: vec![0], expr: None };
        assert!(matches!(Circuit::new(2, 0, vec![bad]), Err(CircuitError::BadExpr { .. })));
    }

    #[test]
    fn json_round_trip_every_family() {
        for f in Family::all(4) {
            let c = build(f, 4, 4);
            let s = c.to_json();
            let back = Circuit::from_json(&s).unwrap();
            assert_eq!(back, c);
            assert_eq!(back.to_json(), s);
        }
    }

    #[test]
    fn json_keys_are_sorted() {
        let c = Circuit::new(2, 11, vec![Gate::rx(0, ParamExpr::from_parts([(10, 1), (2, -1)], 1)), Gate::cx(1, 0)]).unwrap();
        assert_eq!(
            c.to_json(),
            r#"{"gates":[{"expr":{"const_half_pi":1,"terms":{"10":1,"2":-1}},"kind":"RX","qubits":[0]},{"kind":"CX","qubits":[1,0]}],"n_qubits":2,"params":11}"#
        );
    }

    #[test]
    fn json_errors_name_the_field() {
        let e = Circuit::from_json(r#"{"params": 0, "gates": []}"#).unwrap_err();
        assert!(e.to_string().contains("n_qubits"), "{e}");
        let e = Circuit::from_json(r#"{"n_qubits": 1, "params": 0, "gates": [{"kind": "RX", "qubits": [0]}]}"#).unwrap_err();
        assert!(e.to_string().contains("gates[0].expr"), "{e}");
        let e = Circuit::from_json(
            r#"{"n_qubits": 2, "params": 0, "gates": [{"kind": "CX", "qubits": [0, 1], "expr": {"terms": {}, "const_half_pi": 0}}]}"#,
        )
        .unwrap_err();
        assert!(e.to_string().contains("gates[0].expr"), "{e}");
        let e = Circuit::from_json("{\n  \"n_qubits\": 2,\n  oops\n}").unwrap_err();
        assert!(matches!(e, CircuitError::Parse { line: 3, .. }), "{e}");
    }

    #[test]
    fn family_parsing() {
        for f in Family::all(4) {
            assert_eq!(f.to_string().parse::<Family>().unwrap(), f);
        }
        assert_eq!("rx-cx-l-modified:1,0".parse::<Family>().unwrap(), Family::RxCxLModified(vec![1, 0]));
        assert!("rz-cx".parse::<Family>().is_err());
    }

    fn arb_circuit() -> impl Strategy<Value = (Circuit, Vec<f64>)> {
        (1usize..4, 0usize..5).prop_flat_map(|(n, p)| {
            let gate = (0usize..5, 0..n, 0..n, prop::collection::vec((0..p.max(1) as u32, -2i64..3), 0..3), -4i64..5)
                .prop_filter_map("distinct CX qubits", move |(k, a, b, terms, c)| {
                    let kind = [GateKind::RX, GateKind::RY, GateKind::RZ, GateKind::X, GateKind::CX][k];
                    match kind {
                        GateKind::CX if a == b => None,
                        GateKind::CX => Some(Gate::cx(a, b)),
                        GateKind::X => Some(Gate::x(a)),
                        _ => {
                            let terms = if p == 0 { vec![] } else { terms };
                            Some(Gate::rotation(kind, a, ParamExpr::from_parts(terms, c)))
                        }
                    }
                });
            (prop::collection::vec(gate, 0..12), prop::collection::vec(-PI..PI, p))
                .prop_map(move |(gates, theta)| (Circuit::new(n, p, gates).unwrap(), theta))
        })
    }

    proptest! {
        #[test]
        fn prop_json_round_trip_preserves_unitary((c, theta) in arb_circuit()) {
            let back = Circuit::from_json(&c.to_json()).unwrap();
            prop_assert_eq!(&back, &c);
            let d = circuit_unitary(&c, &theta).unwrap().frobenius_distance(&circuit_unitary(&back, &theta).unwrap());
            prop_assert!(d < 1e-12);
        }

        #[test]
        fn prop_bound_circuits_are_unitary((c, theta) in arb_circuit()) {
            let u = gates_unitary(c.n_qubits(), &c.bind(&theta).unwrap());
            prop_assert!(u.unitarity_defect() < 1e-9);
        }

        #[test]
        fn prop_builder_counts(n in 2usize..9, l in 0usize..7, f in 0usize..7) {
            let fam = Family::all(n).swap_remove(f);
            let k = fam.axes().len();
            let alternating = fam.is_alternating();
            let c = build(fam, n, l);
            let r = c.resources();
            prop_assert_eq!(r.params, k * (l + 1) * n);
            let cx = if alternating { l.div_ceil(2) * (n / 2) + (l / 2) * ((n - 1) / 2) } else { l * (n - 1) };
            prop_assert_eq!(r.cx, cx);
            prop_assert_eq!(&c, &build_ansatz(&AnsatzSpec::new(Family::all(n).swap_remove(f), n, l)).unwrap());
        }
    }
}
