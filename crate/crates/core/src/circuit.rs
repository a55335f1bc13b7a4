//! Gate-level IR for grid-local circuits, greedy layering and resource metrics.
//!
//! Qubits are addressed by `(row, column)` cells. A circuit may be wider than
//! it is tall (`cols >= rows`); the extra columns act as an ancilla strip and
//! are serialized as `extra_ancilla_columns`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Cell = (usize, usize);

/// Hardware gate alphabet. Angles are radians.
///
/// `Rz(t) = diag(e^{-it/2}, e^{it/2})`, `Phase(t) = diag(1, e^{it})`, and
/// `Givens(t)` rotates `|10>` into `cos t |10> + sin t |01>` where the first
/// bit is the gate's `a` qubit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GateKind {
    Cnot,
    Cz,
    Swap,
    Fswap,
    Givens(f64),
    Z,
    X,
    Y,
    H,
    S,
    Sdg,
    Rz(f64),
    Ry(f64),
    Phase(f64),
}

impl GateKind {
    pub fn arity(&self) -> usize {
        match self {
            GateKind::Cnot
            | GateKind::Cz
            | GateKind::Swap
            | GateKind::Fswap
            | GateKind::Givens(_) => 2,
            _ => 1,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            GateKind::Cnot => "CNOT",
            GateKind::Cz => "CZ",
            GateKind::Swap => "SWAP",
            GateKind::Fswap => "FSWAP",
            GateKind::Givens(_) => "GIVENS",
            GateKind::Z => "Z",
            GateKind::X => "X",
            GateKind::Y => "Y",
            GateKind::H => "H",
            GateKind::S => "S",
            GateKind::Sdg => "SDG",
            GateKind::Rz(_) => "RZ",
            GateKind::Ry(_) => "RY",
            GateKind::Phase(_) => "PHASE",
        }
    }

    pub fn angle(&self) -> Option<f64> {
        match *self {
            GateKind::Givens(t) | GateKind::Rz(t) | GateKind::Ry(t) | GateKind::Phase(t) => Some(t),
            _ => None,
        }
    }

    fn from_name(name: &str, angle: Option<f64>) -> Result<Self> {
        let need = |a: Option<f64>| {
            a.filter(|t| t.is_finite())
                .ok_or_else(|| Error::Parse(format!("gate {name} needs a finite theta")))
        };
        Ok(match name {
            "CNOT" => GateKind::Cnot,
            "CZ" => GateKind::Cz,
            "SWAP" => GateKind::Swap,
            "FSWAP" => GateKind::Fswap,
            "GIVENS" => GateKind::Givens(need(angle)?),
            "Z" => GateKind::Z,
            "X" => GateKind::X,
            "Y" => GateKind::Y,
            "H" => GateKind::H,
            "S" => GateKind::S,
            "SDG" => GateKind::Sdg,
            "RZ" => GateKind::Rz(need(angle)?),
            "RY" => GateKind::Ry(need(angle)?),
            "PHASE" => GateKind::Phase(need(angle)?),
            other => return Err(Error::UnsupportedGate(other.to_string())),
        })
    }

    pub fn inverse(&self) -> GateKind {
        match *self {
            GateKind::S => GateKind::Sdg,
            GateKind::Sdg => GateKind::S,
            GateKind::Givens(t) => GateKind::Givens(-t),
            GateKind::Rz(t) => GateKind::Rz(-t),
            GateKind::Ry(t) => GateKind::Ry(-t),
            GateKind::Phase(t) => GateKind::Phase(-t),
            k => k,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Gate {
    pub kind: GateKind,
    pub a: Cell,
    /// Present exactly when `kind.arity() == 2`. For CNOT `a` is the control.
    pub b: Option<Cell>,
}

impl Gate {
    pub fn one(kind: GateKind, a: Cell) -> Self {
        debug_assert_eq!(kind.arity(), 1);
        Self { kind, a, b: None }
    }

    pub fn two(kind: GateKind, a: Cell, b: Cell) -> Self {
        debug_assert_eq!(kind.arity(), 2);
        Self {
            kind,
            a,
            b: Some(b),
        }
    }

    pub fn cnot(control: Cell, target: Cell) -> Self {
        Self::two(GateKind::Cnot, control, target)
    }

    pub fn cz(a: Cell, b: Cell) -> Self {
        Self::two(GateKind::Cz, a, b)
    }

    pub fn fswap(a: Cell, b: Cell) -> Self {
        Self::two(GateKind::Fswap, a, b)
    }

    pub fn swap(a: Cell, b: Cell) -> Self {
        Self::two(GateKind::Swap, a, b)
    }

    pub fn is_two_qubit(&self) -> bool {
        self.b.is_some()
    }

    pub fn cells(&self) -> impl Iterator<Item = Cell> {
        std::iter::once(self.a).chain(self.b)
    }

    pub fn inverse(&self) -> Gate {
        Gate {
            kind: self.kind.inverse(),
            ..*self
        }
    }

    fn check(&self, rows: usize, cols: usize) -> Result<()> {
        for (r, c) in self.cells() {
            if r >= rows || c >= cols {
                return Err(Error::OutOfRange(format!(
                    "{} on ({r}, {c}) in a {rows}x{cols} grid",
                    self.kind.name()
                )));
            }
        }
        if self.kind.arity() != 1 + usize::from(self.b.is_some()) {
            return Err(Error::Parse(format!(
                "{} with wrong qubit count",
                self.kind.name()
            )));
        }
        if let Some(b) = self.b {
            let a = self.a;
            if a.0.abs_diff(b.0) + a.1.abs_diff(b.1) != 1 {
                return Err(Error::NotAdjacent {
                    gate: self.kind.name(),
                    a,
                    b,
                });
            }
        }
        if let Some(t) = self.kind.angle() {
            if !t.is_finite() {
                return Err(Error::Parse(format!("{} with angle {t}", self.kind.name())));
            }
        }
        Ok(())
    }
}

/// Layered circuit on a `rows x cols` grid; layers act on disjoint qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    rows: usize,
    cols: usize,
    layers: Vec<Vec<Gate>>,
    pub tags: BTreeMap<String, String>,
}

impl Circuit {
    pub fn empty(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            layers: Vec::new(),
            tags: BTreeMap::new(),
        }
    }

    /// Validates range, adjacency and per-layer disjointness.
    pub fn from_layers(rows: usize, cols: usize, layers: Vec<Vec<Gate>>) -> Result<Self> {
        let mut used = vec![usize::MAX; rows * cols];
        for (li, layer) in layers.iter().enumerate() {
            for g in layer {
                g.check(rows, cols)?;
                for (r, c) in g.cells() {
                    let q = r * cols + c;
                    if used[q] == li {
                        return Err(Error::LayerConflict((r, c)));
                    }
                    used[q] = li;
                }
            }
        }
        let layers = layers.into_iter().filter(|l| !l.is_empty()).collect();
        Ok(Self {
            rows,
            cols,
            layers,
            tags: BTreeMap::new(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn qubits(&self) -> usize {
        self.rows * self.cols
    }

    #[inline]
    pub fn qubit_index(&self, cell: Cell) -> usize {
        cell.0 * self.cols + cell.1
    }

    pub fn layers(&self) -> &[Vec<Gate>] {
        &self.layers
    }

    pub fn gates(&self) -> impl Iterator<Item = &Gate> {
        self.layers.iter().flatten()
    }

    pub fn gate_list(&self) -> Vec<Gate> {
        self.gates().copied().collect()
    }

    pub fn is_empty(&self) -> bool {
        self.layers.is_empty()
    }

    pub fn two_qubit_count(&self) -> usize {
        self.gates().filter(|g| g.is_two_qubit()).count()
    }

    /// Layers holding at least one two-qubit gate, before any compilation.
    pub fn entangling_depth(&self) -> usize {
        self.layers
            .iter()
            .filter(|l| l.iter().any(Gate::is_two_qubit))
            .count()
    }

    pub fn with_tag(mut self, key: &str, value: impl ToString) -> Self {
        self.tags.insert(key.to_string(), value.to_string());
        self
    }

    /// Runs `self` then `next`, keeping both layerings as they are.
    pub fn then(&self, next: &Circuit) -> Result<Circuit> {
        if (self.rows, self.cols) != (next.rows, next.cols) {
            return Err(Error::LengthMismatch {
                expected: self.qubits(),
                got: next.qubits(),
            });
        }
        let mut out = self.clone();
        out.layers.extend(next.layers.iter().cloned());
        Ok(out)
    }

    /// Reverse order, each gate inverted.
    pub fn inverse(&self) -> Circuit {
        let layers = self
            .layers
            .iter()
            .rev()
            .map(|l| l.iter().map(Gate::inverse).collect())
            .collect();
        Circuit {
            rows: self.rows,
            cols: self.cols,
            layers,
            tags: self.tags.clone(),
        }
    }

    /// Flattens and re-layers with [`schedule_greedy`].
    pub fn rescheduled(&self) -> Result<Circuit> {
        let mut c = schedule_greedy(self.rows, self.cols, &self.gate_list())?;
        c.tags = self.tags.clone();
        Ok(c)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&CircuitJson::from(self))
            .expect("circuit JSON is always serializable")
    }

    pub fn from_json(text: &str) -> Result<Circuit> {
        let parsed: CircuitJson =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        parsed.try_into()
    }
}

/// ASAP layering in program order.
///
/// Two-qubit gates go to the earliest entangling layer after every earlier
/// gate on their qubits. Single-qubit gates sit in the slot just before the
/// next entangling layer of their qubit, so they never add entangling depth.
/// Output order: for each slot, its single-qubit sublayers, then the
/// entangling layer; trailing single-qubit gates come last.
pub fn schedule_greedy(rows: usize, cols: usize, gates: &[Gate]) -> Result<Circuit> {
    let n = rows * cols;
    // avail[q]: first entangling layer q may join.
    let mut avail = vec![0usize; n];
    // depth[q]: next free sublayer inside slot avail[q].
    let mut depth = vec![0usize; n];
    let mut ent: Vec<Vec<Gate>> = Vec::new();
    let mut slots: Vec<Vec<Vec<Gate>>> = vec![Vec::new()];
    for g in gates {
        g.check(rows, cols)?;
        let qa = g.a.0 * cols + g.a.1;
        match g.b {
            None => {
                let s = avail[qa];
                let d = depth[qa];
                let slot = &mut slots[s];
                if slot.len() <= d {
                    slot.resize_with(d + 1, Vec::new);
                }
                slot[d].push(*g);
                depth[qa] = d + 1;
            }
            Some(b) => {
                let qb = b.0 * cols + b.1;
                if qa == qb {
                    return Err(Error::LayerConflict(g.a));
                }
                let e = avail[qa].max(avail[qb]);
                if ent.len() <= e {
                    ent.resize_with(e + 1, Vec::new);
                    slots.resize_with(e + 2, Vec::new);
                }
                ent[e].push(*g);
                avail[qa] = e + 1;
                avail[qb] = e + 1;
                depth[qa] = 0;
                depth[qb] = 0;
            }
        }
    }
    let mut layers = Vec::with_capacity(ent.len() * 2);
    for (s, sub) in slots.into_iter().enumerate() {
        layers.extend(sub.into_iter().filter(|l| !l.is_empty()));
        if s < ent.len() {
            layers.push(std::mem::take(&mut ent[s]));
        }
    }
    let layers = layers.into_iter().filter(|l| !l.is_empty()).collect();
    Ok(Circuit {
        rows,
        cols,
        layers,
        tags: BTreeMap::new(),
    })
}

/// Expands one gate into CNOTs and single-qubit gates, in time order.
pub fn decompose_gate(g: &Gate) -> Vec<Gate> {
    use GateKind::*;
    let Some(b) = g.b else {
        return vec![*g];
    };
    let a = g.a;
    match g.kind {
        Cnot => vec![*g],
        Cz => vec![Gate::one(H, b), Gate::cnot(a, b), Gate::one(H, b)],
        Swap => vec![Gate::cnot(a, b), Gate::cnot(b, a), Gate::cnot(a, b)],
        Fswap => vec![
            Gate::one(Sdg, a),
            Gate::one(Sdg, b),
            Gate::one(H, b),
            Gate::cnot(b, a),
            Gate::cnot(a, b),
            Gate::one(H, a),
            Gate::one(S, a),
            Gate::one(S, b),
        ],
        Givens(t) => vec![
            Gate::one(H, a),
            Gate::cnot(a, b),
            Gate::one(Ry(t), a),
            Gate::one(Ry(t), b),
            Gate::cnot(a, b),
            Gate::one(H, a),
        ],
        _ => unreachable!("single-qubit kinds have no second cell"),
    }
}

/// Rewrites every two-qubit gate into CNOTs and re-layers.
pub fn decompose_to_cnot(circuit: &Circuit) -> Result<Circuit> {
    let gates: Vec<Gate> = circuit.gates().flat_map(decompose_gate).collect();
    let mut out = schedule_greedy(circuit.rows, circuit.cols, &gates)?;
    out.tags = circuit.tags.clone();
    Ok(out)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Metrics {
    pub cnot_depth: usize,
    pub gates: usize,
    pub idle: usize,
    pub qubits: usize,
    pub spacetime: usize,
}

/// Counts over the CNOT-compiled form of `circuit`.
pub fn metrics(circuit: &Circuit) -> Result<Metrics> {
    let compiled = decompose_to_cnot(circuit)?;
    Ok(metrics_of_compiled(&compiled))
}

/// Same as [`metrics`] for a circuit already over CNOT and single-qubit gates.
pub fn metrics_of_compiled(compiled: &Circuit) -> Metrics {
    let q = compiled.qubits();
    let mut depth = 0;
    let mut gates = 0;
    let mut idle = 0;
    for layer in compiled.layers() {
        let two: Vec<&Gate> = layer.iter().filter(|g| g.is_two_qubit()).collect();
        if two.is_empty() {
            continue;
        }
        depth += 1;
        gates += two.len();
        idle += q - 2 * two.len();
    }
    Metrics {
        cnot_depth: depth,
        gates,
        idle,
        qubits: q,
        spacetime: q * depth,
    }
}

#[derive(Serialize, Deserialize)]
struct CircuitJson {
    version: u32,
    #[serde(rename = "L")]
    side: usize,
    extra_ancilla_columns: usize,
    layers: Vec<Vec<GateJson>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    tags: BTreeMap<String, String>,
}

#[derive(Serialize, Deserialize)]
struct GateJson {
    g: String,
    q: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    theta: Option<f64>,
}

impl From<&Circuit> for CircuitJson {
    fn from(c: &Circuit) -> Self {
        let layers = c
            .layers
            .iter()
            .map(|l| {
                l.iter()
                    .map(|g| GateJson {
                        g: g.kind.name().to_string(),
                        q: g.cells().map(|(r, c)| [r, c]).collect(),
                        theta: g.kind.angle(),
                    })
                    .collect()
            })
            .collect();
        CircuitJson {
            version: 1,
            side: c.rows,
            extra_ancilla_columns: c.cols - c.rows,
            layers,
            tags: c.tags.clone(),
        }
    }
}

impl TryFrom<CircuitJson> for Circuit {
    type Error = Error;

    fn try_from(j: CircuitJson) -> Result<Circuit> {
        if j.version != 1 {
            return Err(Error::Parse(format!(
                "unsupported circuit version {}",
                j.version
            )));
        }
        let cols = j.side + j.extra_ancilla_columns;
        let mut layers = Vec::with_capacity(j.layers.len());
        for l in j.layers {
            let mut layer = Vec::with_capacity(l.len());
            for g in l {
                let kind = GateKind::from_name(&g.g, g.theta)?;
                let cells: Vec<Cell> = g.q.iter().map(|&[r, c]| (r, c)).collect();
                if cells.len() != kind.arity() {
                    return Err(Error::Parse(format!("{} with {} qubits", g.g, cells.len())));
                }
                layer.push(Gate {
                    kind,
                    a: cells[0],
                    b: cells.get(1).copied(),
                });
            }
            layers.push(layer);
        }
        let mut c = Circuit::from_layers(j.side, cols, layers)?;
        c.tags = j.tags;
        Ok(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verify::{statevector_simulate, Amplitudes};
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn empty_circuit_metrics() {
        let c = Circuit::empty(3, 3);
        assert_eq!(
            metrics(&c).unwrap(),
            Metrics {
                cnot_depth: 0,
                gates: 0,
                idle: 0,
                qubits: 9,
                spacetime: 0
            }
        );
        assert_eq!(decompose_to_cnot(&c).unwrap().entangling_depth(), 0);
    }

    #[test]
    fn single_cnot_on_two_by_two() {
        let c = schedule_greedy(2, 2, &[Gate::cnot((0, 0), (0, 1))]).unwrap();
        let m = metrics(&c).unwrap();
        assert_eq!(
            (m.cnot_depth, m.gates, m.idle, m.qubits, m.spacetime),
            (1, 1, 2, 4, 4)
        );
    }

    #[test]
    fn decomposed_depths() {
        let one = |g: Gate| {
            metrics(&schedule_greedy(1, 2, &[g]).unwrap())
                .unwrap()
                .cnot_depth
        };
        assert_eq!(one(Gate::fswap((0, 0), (0, 1))), 2);
        assert_eq!(one(Gate::cz((0, 0), (0, 1))), 1);
        assert_eq!(one(Gate::swap((0, 0), (0, 1))), 3);
        assert_eq!(one(Gate::two(GateKind::Givens(0.3), (0, 0), (0, 1))), 2);
    }

    #[test]
    fn scheduling_basics() {
        let disjoint = [Gate::cnot((0, 0), (0, 1)), Gate::cnot((1, 0), (1, 1))];
        assert_eq!(schedule_greedy(2, 2, &disjoint).unwrap().layers().len(), 1);
        let shared = [Gate::cnot((0, 0), (0, 1)), Gate::cnot((0, 1), (1, 1))];
        assert_eq!(schedule_greedy(2, 2, &shared).unwrap().layers().len(), 2);
        let err = schedule_greedy(2, 2, &[Gate::cnot((0, 0), (1, 1))]);
        assert!(matches!(err, Err(Error::NotAdjacent { .. })));
        assert!(schedule_greedy(2, 2, &[Gate::one(GateKind::X, (2, 0))]).is_err());
    }

    #[test]
    fn single_qubit_gates_do_not_add_depth() {
        let gates = [
            Gate::cnot((0, 0), (0, 1)),
            Gate::one(GateKind::H, (0, 2)),
            Gate::one(GateKind::S, (0, 2)),
            Gate::cnot((0, 1), (0, 2)),
        ];
        let c = schedule_greedy(1, 3, &gates).unwrap();
        assert_eq!(c.entangling_depth(), 2);
        // Program order on (0, 2) is kept: H then S then the CNOT.
        let on_q2: Vec<&str> = c
            .gates()
            .filter(|g| g.cells().any(|x| x == (0, 2)))
            .map(|g| g.kind.name())
            .collect();
        assert_eq!(on_q2, ["H", "S", "CNOT"]);
    }

    #[test]
    fn from_layers_rejects_overlap() {
        let bad = vec![vec![
            Gate::cnot((0, 0), (0, 1)),
            Gate::one(GateKind::Z, (0, 1)),
        ]];
        assert_eq!(
            Circuit::from_layers(1, 2, bad),
            Err(Error::LayerConflict((0, 1)))
        );
    }

    fn random_gate(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Gate {
        let r = rng.random_range(0..rows);
        let c = rng.random_range(0..cols - 1);
        let t = rng.random_range(-3.0..3.0);
        let kinds = [
            GateKind::Cnot,
            GateKind::Cz,
            GateKind::Swap,
            GateKind::Fswap,
            GateKind::Givens(t),
            GateKind::H,
            GateKind::S,
            GateKind::Rz(t),
            GateKind::Phase(t),
            GateKind::Ry(t),
        ];
        let k = kinds[rng.random_range(0..kinds.len())];
        if k.arity() == 2 {
            if rng.random_bool(0.5) {
                Gate::two(k, (r, c), (r, c + 1))
            } else {
                Gate::two(k, (r, c + 1), (r, c))
            }
        } else {
            Gate::one(k, (r, c))
        }
    }

    #[test]
    fn depth_is_subadditive() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let a: Vec<Gate> = (0..30).map(|_| random_gate(&mut rng, 3, 4)).collect();
            let b: Vec<Gate> = (0..30).map(|_| random_gate(&mut rng, 3, 4)).collect();
            let ab: Vec<Gate> = a.iter().chain(&b).copied().collect();
            let d = |g: &[Gate]| {
                metrics(&schedule_greedy(3, 4, g).unwrap())
                    .unwrap()
                    .cnot_depth
            };
            assert!(d(&ab) <= d(&a) + d(&b));
        }
    }

    fn random_state(rng: &mut ChaCha8Rng, n: usize) -> Amplitudes {
        let mut v: Vec<Complex64> = (0..1 << n)
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        v.iter_mut().for_each(|z| *z /= norm);
        v
    }

    /// Compares decomposed and direct action on random states; the
    /// statevector engine applies every kind natively.
    #[test]
    fn decomposition_preserves_unitaries() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for kind in [
            GateKind::Cnot,
            GateKind::Cz,
            GateKind::Swap,
            GateKind::Fswap,
            GateKind::Givens(0.37),
            GateKind::Givens(-2.1),
        ] {
            for (a, b) in [((0, 0), (0, 1)), ((0, 1), (0, 0))] {
                let direct = schedule_greedy(1, 2, &[Gate::two(kind, a, b)]).unwrap();
                let compiled = decompose_to_cnot(&direct).unwrap();
                for _ in 0..4 {
                    let psi = random_state(&mut rng, 2);
                    let x = statevector_simulate(&direct, &psi).unwrap();
                    let y = statevector_simulate(&compiled, &psi).unwrap();
                    for (u, v) in x.iter().zip(&y) {
                        assert!((u - v).norm() < 1e-12, "{kind:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn inverse_undoes_circuit() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let gates: Vec<Gate> = (0..40).map(|_| random_gate(&mut rng, 2, 3)).collect();
        let c = schedule_greedy(2, 3, &gates).unwrap();
        let round = c.then(&c.inverse()).unwrap();
        let psi = random_state(&mut rng, 6);
        let out = statevector_simulate(&round, &psi).unwrap();
        for (u, v) in psi.iter().zip(&out) {
            assert!((u - v).norm() < 1e-10);
        }
    }

    #[test]
    fn json_roundtrip_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let gates: Vec<Gate> = (0..60).map(|_| random_gate(&mut rng, 3, 5)).collect();
        let c = schedule_greedy(3, 5, &gates)
            .unwrap()
            .with_tag("method", "ours");
        let text = c.to_json();
        let back = Circuit::from_json(&text).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.to_json(), text);
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["L"], 3);
        assert_eq!(v["extra_ancilla_columns"], 2);
    }

    #[test]
    fn json_rejects_bad_input() {
        let bad = r#"{"version":1,"L":2,"extra_ancilla_columns":0,"layers":[[{"g":"CNOT","q":[[0,0],[1,1]]}]]}"#;
        assert!(Circuit::from_json(bad).is_err());
        let unknown =
            r#"{"version":1,"L":2,"extra_ancilla_columns":0,"layers":[[{"g":"T","q":[[0,0]]}]]}"#;
        assert!(matches!(
            Circuit::from_json(unknown),
            Err(Error::UnsupportedGate(_))
        ));
        let no_theta =
            r#"{"version":1,"L":2,"extra_ancilla_columns":0,"layers":[[{"g":"RZ","q":[[0,0]]}]]}"#;
        assert!(Circuit::from_json(no_theta).is_err());
    }
}
