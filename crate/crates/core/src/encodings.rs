//! Ternary-tree fermion encodings and conversions between them on a
//! Hilbert-ordered grid.
//!
//! Qubits carry inorder labels. Qubit `i` sits on Hilbert cell `H(i)`; with
//! `N = 2^k - 1` qubits the last cell of the curve stays empty. A tree
//! rotation between a parent and its child is one CNOT; a round is a set of
//! rotations whose inorder intervals do not overlap, so each can be routed
//! inside its own container region in parallel.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::circuit::{metrics, schedule_greedy, Cell, Circuit, Gate};
use crate::error::{Error, Result};
use crate::fperm::fperm_gates;
use crate::geometry::{snake_cell, HilbertCurve, Permutation};
use crate::planner::{column_stage_gates, plan_cells, row_stage_gates, SwapKind};
use crate::verify::{conjugate_pauli, PauliString};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Encoding {
    #[serde(rename = "jw")]
    JordanWigner,
    #[serde(rename = "bk")]
    BravyiKitaev,
    #[serde(rename = "parity")]
    Parity,
}

impl Encoding {
    pub fn label(&self) -> &'static str {
        match self {
            Encoding::JordanWigner => "jw",
            Encoding::BravyiKitaev => "bk",
            Encoding::Parity => "parity",
        }
    }

    /// Tree of this encoding on `n` qubits.
    pub fn tree(&self, n: usize) -> Result<TernaryTree> {
        match self {
            Encoding::JordanWigner => TernaryTree::right_spine(n),
            Encoding::BravyiKitaev => TernaryTree::balanced(n),
            Encoding::Parity => TernaryTree::left_spine(n),
        }
    }
}

impl std::str::FromStr for Encoding {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "jw" | "jordan-wigner" => Ok(Encoding::JordanWigner),
            "bk" | "bravyi-kitaev" => Ok(Encoding::BravyiKitaev),
            "parity" => Ok(Encoding::Parity),
            other => Err(Error::Parse(format!("unknown encoding {other:?}"))),
        }
    }
}

/// Binary-shaped ternary tree. Node `q` is qubit `q`; `children[q]` holds
/// (left, middle, right), where `None` is a leaf and the middle child is
/// always a leaf. Node labels follow inorder traversal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TernaryTree {
    root: usize,
    children: Vec<[Option<usize>; 3]>,
}

impl TernaryTree {
    /// Validates shape and inorder labeling.
    pub fn new(root: usize, children: Vec<[Option<usize>; 3]>) -> Result<Self> {
        let n = children.len();
        if n == 0 || root >= n {
            return Err(Error::InvalidSize(format!(
                "tree with {n} nodes and root {root}"
            )));
        }
        if children.iter().any(|ch| ch[1].is_some()) {
            return Err(Error::Parse("middle child must be a leaf".into()));
        }
        let tree = Self { root, children };
        let order = tree.inorder()?;
        if order.len() != n || order.iter().enumerate().any(|(i, &q)| i != q) {
            return Err(Error::Parse("node labels are not inorder".into()));
        }
        Ok(tree)
    }

    fn inorder(&self) -> Result<Vec<usize>> {
        let n = self.children.len();
        let mut out = Vec::with_capacity(n);
        let mut seen = vec![false; n];
        let mut stack = Vec::new();
        let mut cur = Some(self.root);
        while cur.is_some() || !stack.is_empty() {
            while let Some(q) = cur {
                if q >= n || seen[q] {
                    return Err(Error::Parse(format!("node {q} repeated or out of range")));
                }
                seen[q] = true;
                stack.push(q);
                cur = self.children[q][0];
            }
            let q = stack.pop().expect("loop guard");
            out.push(q);
            cur = self.children[q][2];
        }
        Ok(out)
    }

    pub fn len(&self) -> usize {
        self.children.len()
    }

    pub fn is_empty(&self) -> bool {
        self.children.is_empty()
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn children(&self, q: usize) -> [Option<usize>; 3] {
        self.children[q]
    }

    /// Jordan-Wigner: every node hangs off its predecessor's right branch.
    pub fn right_spine(n: usize) -> Result<Self> {
        check_nodes(n)?;
        let children = (0..n)
            .map(|q| [None, None, (q + 1 < n).then_some(q + 1)])
            .collect();
        Self::new(0, children)
    }

    /// Parity: every node hangs off its successor's left branch.
    pub fn left_spine(n: usize) -> Result<Self> {
        check_nodes(n)?;
        let children = (0..n).map(|q| [q.checked_sub(1), None, None]).collect();
        Self::new(n - 1, children)
    }

    /// Median-split binary tree; the Bravyi-Kitaev tree when `n = 2^k - 1`.
    pub fn balanced(n: usize) -> Result<Self> {
        check_nodes(n)?;
        fn build(lo: usize, hi: usize, ch: &mut [[Option<usize>; 3]]) -> Option<usize> {
            if lo >= hi {
                return None;
            }
            let mid = lo + (hi - lo) / 2;
            ch[mid][0] = build(lo, mid, ch);
            ch[mid][2] = build(mid + 1, hi, ch);
            Some(mid)
        }
        let mut children = vec![[None; 3]; n];
        let root = build(0, n, &mut children).expect("n >= 1");
        Self::new(root, children)
    }
}

fn check_nodes(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidSize("tree needs at least one node".into()));
    }
    Ok(())
}

/// Root-to-leaf strings of the first `2n` leaves, left to right. Left,
/// middle and right branches at qubit `q` contribute `X_q`, `Y_q`, `Z_q`.
/// Qubit indices are inorder labels.
pub fn majorana_strings(tree: &TernaryTree) -> Vec<PauliString> {
    let n = tree.len();
    let mut out = Vec::with_capacity(2 * n + 1);
    // Explicit stack of (node, branch to visit next, path so far).
    let mut stack: Vec<(usize, usize, PauliString)> =
        vec![(tree.root, 0, PauliString::identity(n))];
    while let Some((q, branch, path)) = stack.pop() {
        if branch == 3 {
            continue;
        }
        stack.push((q, branch + 1, path.clone()));
        let mut next = path;
        next.set(q, ['X', 'Y', 'Z'][branch]).expect("valid factor");
        match tree.children[q][branch] {
            Some(child) => stack.push((child, 0, next)),
            None => out.push(next),
        }
    }
    out.truncate(2 * n);
    out
}

/// Encoding-independent grid embedding: inorder qubit `i` on cell `H(i)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HilbertLayout {
    curve: HilbertCurve,
}

impl HilbertLayout {
    pub fn new(order: u32) -> Result<Self> {
        if order < 2 {
            return Err(Error::InvalidSize(format!("need k >= 2, got {order}")));
        }
        Ok(Self {
            curve: HilbertCurve::new(order)?,
        })
    }

    pub fn order(&self) -> u32 {
        self.curve.order()
    }

    /// Qubits carrying modes: `2^k - 1`.
    pub fn modes(&self) -> usize {
        self.curve.len() - 1
    }

    pub fn rows(&self) -> usize {
        self.curve.rows()
    }

    pub fn cols(&self) -> usize {
        self.curve.cols()
    }

    pub fn cell(&self, i: usize) -> Cell {
        self.curve.index_to_cell(i).expect("index inside the curve")
    }

    pub fn grid_qubit(&self, i: usize) -> usize {
        let (r, c) = self.cell(i);
        r * self.cols() + c
    }

    /// Re-indexes an inorder-labeled string onto grid qubits.
    pub fn place(&self, p: &PauliString) -> PauliString {
        let mut out = PauliString::identity(self.rows() * self.cols()).with_phase(p.phase());
        for q in p.support() {
            out.set(self.grid_qubit(q), p.get(q)).expect("valid factor");
        }
        out
    }

    /// Majorana strings of `enc` on the grid.
    pub fn majoranas(&self, enc: Encoding) -> Result<Vec<PauliString>> {
        let tree = enc.tree(self.modes())?;
        Ok(majorana_strings(&tree)
            .iter()
            .map(|p| self.place(p))
            .collect())
    }
}

/// Inclusive inorder interval.
pub type Interval = (usize, usize);

/// One rotation: CNOT from `control` to `target`, both inorder labels.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundGate {
    pub control: usize,
    pub target: usize,
    pub interval: Interval,
    pub container: Option<Interval>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PlanKind {
    BkToJw,
    ParityToBk,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundPlan {
    pub kind: PlanKind,
    pub order: u32,
    pub rounds: Vec<Vec<RoundGate>>,
}

impl RoundPlan {
    pub fn modes(&self) -> usize {
        (1usize << self.order) - 1
    }

    pub fn max_interval_len(&self, round: usize) -> usize {
        self.rounds[round]
            .iter()
            .map(|g| g.interval.1 - g.interval.0 + 1)
            .max()
            .unwrap_or(0)
    }
}

fn check_order(k: u32) -> Result<()> {
    if !(2..=30).contains(&k) {
        return Err(Error::InvalidSize(format!("need 2 <= k <= 30, got {k}")));
    }
    Ok(())
}

/// Intervals fired in sub-round `r` (1-based) of a depth-`d` local
/// subproblem: a balanced subtree on `[0, 2^d - 2]` below an external parent
/// at `2^d - 1`.
pub fn local_intervals(d: u32, r: u32) -> Vec<Interval> {
    if r == 0 || r > d {
        return Vec::new();
    }
    if r == 1 {
        return vec![((1 << (d - 1)) - 1, (1 << d) - 1)];
    }
    let half = 1usize << (d - 1);
    let sub = local_intervals(d - 1, r - 1);
    let shifted: Vec<Interval> = sub.iter().map(|&(a, b)| (a + half, b + half)).collect();
    let mut out = sub;
    out.extend(shifted);
    out
}

/// Offset of spine block `i`: `2^k - 2^(k-i)`.
pub fn block_offset(k: u32, i: u32) -> usize {
    (1usize << k) - (1usize << (k - i))
}

/// BK to JW: right rotations peeling the BK right spine. Each interval's
/// left end is the child (control), its right end the parent (target).
pub fn bk_to_jw_rounds(k: u32) -> Result<RoundPlan> {
    check_order(k)?;
    let rounds = (1..k)
        .map(|r| {
            (0..=k - 1 - r)
                .flat_map(|i| {
                    let beta = block_offset(k, i);
                    local_intervals(k - 1 - i, r)
                        .into_iter()
                        .map(move |(a, b)| RoundGate {
                            control: beta + a,
                            target: beta + b,
                            interval: (beta + a, beta + b),
                            container: None,
                        })
                })
                .collect()
        })
        .collect();
    Ok(RoundPlan {
        kind: PlanKind::BkToJw,
        order: k,
        rounds,
    })
}

/// Parity to BK: the mirror image of BK to JW (BK to Parity through left
/// rotations), run backwards. The parent now sits at the left end and stays
/// the control.
pub fn parity_to_bk_rounds(k: u32) -> Result<RoundPlan> {
    let bk = bk_to_jw_rounds(k)?;
    let last = bk.modes() - 1;
    let rounds = bk
        .rounds
        .iter()
        .rev()
        .map(|round| {
            round
                .iter()
                .map(|g| {
                    let (a, b) = (last - g.interval.1, last - g.interval.0);
                    RoundGate {
                        control: a,
                        target: b,
                        interval: (a, b),
                        container: None,
                    }
                })
                .collect()
        })
        .collect();
    Ok(RoundPlan {
        kind: PlanKind::ParityToBk,
        order: k,
        rounds,
    })
}

/// Smallest dyadic interval of `[0, 2^k - 1]` holding `j`.
pub fn dyadic_hull(j: Interval) -> Interval {
    let (a, b) = j;
    let mut q = 0;
    while a >> q != b >> q {
        q += 1;
    }
    ((a >> q) << q, (((a >> q) + 1) << q) - 1)
}

pub fn is_dyadic(d: Interval) -> bool {
    let len = d.1 + 1 - d.0;
    len.is_power_of_two() && d.0.is_multiple_of(len)
}

/// Fills containers. BK to JW gets the dyadic hull of each interval;
/// Parity to BK gets the mirror of the hull of the mirrored interval,
/// clipped to the occupied cells.
pub fn dyadic_containers(plan: &RoundPlan) -> RoundPlan {
    let last = plan.modes() - 1;
    let mut out = plan.clone();
    for g in out.rounds.iter_mut().flatten() {
        g.container = Some(match plan.kind {
            PlanKind::BkToJw => dyadic_hull(g.interval),
            PlanKind::ParityToBk => {
                let (lo, hi) = dyadic_hull((last - g.interval.1, last - g.interval.0));
                (last.saturating_sub(hi), last - lo)
            }
        });
    }
    out
}

/// Checks pairwise disjointness of a round's qubits, intervals and
/// containers, and `|J| <= |D| <= 2|J|`. Returns the first violation.
pub fn check_round(round: &[RoundGate]) -> std::result::Result<(), String> {
    let mut used = std::collections::HashSet::new();
    for g in round {
        if !used.insert(g.control) || !used.insert(g.target) {
            return Err(format!("qubit reused by {g:?}"));
        }
    }
    let mut spans: Vec<(Interval, Interval)> = round
        .iter()
        .map(|g| (g.interval, g.container.unwrap_or(g.interval)))
        .collect();
    spans.sort();
    for w in spans.windows(2) {
        if w[0].0 .1 >= w[1].0 .0 {
            return Err(format!("intervals {:?} and {:?} overlap", w[0].0, w[1].0));
        }
    }
    let mut boxes: Vec<Interval> = spans.iter().map(|s| s.1).collect();
    boxes.sort();
    for w in boxes.windows(2) {
        if w[0].1 >= w[1].0 {
            return Err(format!("containers {:?} and {:?} overlap", w[0], w[1]));
        }
    }
    for (j, d) in spans {
        let (jl, dl) = (j.1 + 1 - j.0, d.1 + 1 - d.0);
        if d.0 > j.0 || d.1 < j.1 || dl > 2 * jl {
            return Err(format!("container {d:?} does not fit interval {j:?}"));
        }
    }
    Ok(())
}

/// Cells of `container` as a walkable region, plus whether it is a full
/// rectangle.
fn region(layout: &HilbertLayout, container: Interval) -> (Vec<bool>, bool) {
    let mut inside = vec![false; layout.rows() * layout.cols()];
    let (mut r0, mut r1, mut c0, mut c1) = (usize::MAX, 0, usize::MAX, 0);
    for i in container.0..=container.1 {
        let (r, c) = layout.cell(i);
        inside[r * layout.cols() + c] = true;
        (r0, r1, c0, c1) = (r0.min(r), r1.max(r), c0.min(c), c1.max(c));
    }
    let area = (r1 + 1 - r0) * (c1 + 1 - c0);
    (inside, area == container.1 + 1 - container.0)
}

fn l_path(from: Cell, to: Cell) -> Vec<Cell> {
    let mut path = vec![from];
    let (mut r, mut c) = from;
    while c != to.1 {
        c = if c < to.1 { c + 1 } else { c - 1 };
        path.push((r, c));
    }
    while r != to.0 {
        r = if r < to.0 { r + 1 } else { r - 1 };
        path.push((r, c));
    }
    path
}

fn bfs_path(from: Cell, to: Cell, inside: &[bool], rows: usize, cols: usize) -> Option<Vec<Cell>> {
    let mut prev = vec![usize::MAX; rows * cols];
    let start = from.0 * cols + from.1;
    prev[start] = start;
    let mut queue = VecDeque::from([from]);
    while let Some((r, c)) = queue.pop_front() {
        if (r, c) == to {
            let mut path = vec![to];
            let mut q = r * cols + c;
            while q != start {
                q = prev[q];
                path.push((q / cols, q % cols));
            }
            path.reverse();
            return Some(path);
        }
        let steps = [
            (r.wrapping_sub(1), c),
            (r + 1, c),
            (r, c.wrapping_sub(1)),
            (r, c + 1),
        ];
        for (nr, nc) in steps {
            if nr < rows
                && nc < cols
                && inside[nr * cols + nc]
                && prev[nr * cols + nc] == usize::MAX
            {
                prev[nr * cols + nc] = r * cols + c;
                queue.push_back((nr, nc));
            }
        }
    }
    None
}

/// SWAPs bring the endpoints together from both ends of the path, the CNOT
/// fires, and the SWAPs unwind.
fn routed_cnot(path: &[Cell], control_first: bool) -> Vec<Gate> {
    let m = path.len() - 1;
    let lead = (m - 1) / 2;
    let mut moves = Vec::new();
    for s in 0..lead {
        moves.push(Gate::swap(path[s], path[s + 1]));
    }
    for s in (lead + 2..=m).rev() {
        moves.push(Gate::swap(path[s], path[s - 1]));
    }
    let (a, b) = (path[lead], path[lead + 1]);
    let cnot = if control_first {
        Gate::cnot(a, b)
    } else {
        Gate::cnot(b, a)
    };
    let mut gates = moves.clone();
    gates.push(cnot);
    gates.extend(moves.iter().rev());
    gates
}

/// Gates of one round; every gate stays inside its container region.
pub fn route_round_gates(round: &[RoundGate], layout: &HilbertLayout) -> Result<Vec<Gate>> {
    let (rows, cols) = (layout.rows(), layout.cols());
    let mut gates = Vec::new();
    for g in round {
        let container = g.container.unwrap_or(dyadic_hull(g.interval));
        let (inside, rect) = region(layout, container);
        let (from, to) = (layout.cell(g.control), layout.cell(g.target));
        let path = if rect {
            l_path(from, to)
        } else {
            bfs_path(from, to, &inside, rows, cols)
                .ok_or_else(|| Error::Routing(format!("no path for {g:?}")))?
        };
        if let Some(&(r, c)) = path.iter().find(|&&(r, c)| !inside[r * cols + c]) {
            return Err(Error::Routing(format!(
                "cell ({r}, {c}) outside {container:?}"
            )));
        }
        gates.extend(routed_cnot(&path, true));
    }
    Ok(gates)
}

pub fn route_round_on_hilbert(round: &[RoundGate], k: u32) -> Result<Circuit> {
    let layout = HilbertLayout::new(k)?;
    schedule_greedy(
        layout.rows(),
        layout.cols(),
        &route_round_gates(round, &layout)?,
    )
}

fn plan_gates(plan: &RoundPlan, layout: &HilbertLayout) -> Result<Vec<Gate>> {
    let plan = dyadic_containers(plan);
    let mut gates = Vec::new();
    for round in &plan.rounds {
        gates.extend(route_round_gates(round, layout)?);
    }
    Ok(gates)
}

/// Circuit `U` on the Hilbert grid with `U g_src U^dagger = g_dst` for every
/// Majorana string.
pub fn convert_encoding_circuit(src: Encoding, dst: Encoding, k: u32) -> Result<Circuit> {
    check_order(k)?;
    let layout = HilbertLayout::new(k)?;
    let gates = conversion_gates(src, dst, k, &layout)?;
    Ok(schedule_greedy(layout.rows(), layout.cols(), &gates)?
        .with_tag("kind", "encoding")
        .with_tag("from", src.label())
        .with_tag("to", dst.label()))
}

fn conversion_gates(
    src: Encoding,
    dst: Encoding,
    k: u32,
    layout: &HilbertLayout,
) -> Result<Vec<Gate>> {
    use Encoding::*;
    let toward_jw = |e: Encoding| -> Result<Vec<Gate>> {
        Ok(match e {
            JordanWigner => Vec::new(),
            BravyiKitaev => plan_gates(&bk_to_jw_rounds(k)?, layout)?,
            Parity => {
                let mut g = plan_gates(&parity_to_bk_rounds(k)?, layout)?;
                g.extend(plan_gates(&bk_to_jw_rounds(k)?, layout)?);
                g
            }
        })
    };
    if src == dst {
        return Ok(Vec::new());
    }
    Ok(match (src, dst) {
        (Parity, BravyiKitaev) => plan_gates(&parity_to_bk_rounds(k)?, layout)?,
        (BravyiKitaev, Parity) => reversed(plan_gates(&parity_to_bk_rounds(k)?, layout)?),
        (s, JordanWigner) => toward_jw(s)?,
        (JordanWigner, d) => reversed(toward_jw(d)?),
        _ => unreachable!("all pairs covered"),
    })
}

fn reversed(gates: Vec<Gate>) -> Vec<Gate> {
    gates.iter().rev().map(Gate::inverse).collect()
}

/// Indices of the Majoranas whose conjugated `src` string differs from the
/// `dst` string; empty when the conversion circuit is exact.
pub fn conversion_mismatches(
    circuit: &Circuit,
    src: Encoding,
    dst: Encoding,
    k: u32,
) -> Result<Vec<usize>> {
    let layout = HilbertLayout::new(k)?;
    let from = layout.majoranas(src)?;
    let to = layout.majoranas(dst)?;
    let mut bad = Vec::new();
    for (m, (a, b)) in from.iter().zip(&to).enumerate() {
        if &conjugate_pauli(circuit, a)? != b {
            bad.push(m);
        }
    }
    Ok(bad)
}

/// Measured depth of one routed round against its largest interval.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoundDepth {
    pub order: u32,
    pub round: usize,
    pub max_interval: usize,
    pub cnot_depth: usize,
}

impl RoundDepth {
    pub fn ratio(&self) -> f64 {
        self.cnot_depth as f64 / (self.max_interval as f64).sqrt()
    }
}

pub fn round_depths(plan: &RoundPlan) -> Result<Vec<RoundDepth>> {
    let plan = dyadic_containers(plan);
    (0..plan.rounds.len())
        .map(|r| {
            let c = route_round_on_hilbert(&plan.rounds[r], plan.order)?;
            Ok(RoundDepth {
                order: plan.order,
                round: r + 1,
                max_interval: plan.max_interval_len(r),
                cnot_depth: metrics(&c)?.cnot_depth,
            })
        })
        .collect()
}

/// Smallest `c` with `depth <= c * sqrt(max |J|)` over the given rounds.
pub fn fit_round_constant(depths: &[RoundDepth]) -> f64 {
    depths.iter().map(RoundDepth::ratio).fold(0.0, f64::max)
}

/// Plain SWAP relayout taking the qubit on `H(i)` to snake position `i` on
/// the square grid of even order `k`.
pub fn hilbert_to_snake_gates(k: u32) -> Result<Vec<Gate>> {
    if !k.is_multiple_of(2) {
        return Err(Error::InvalidSize(format!(
            "relayout needs even k, got {k}"
        )));
    }
    let layout = HilbertLayout::new(k)?;
    let side = layout.rows();
    let mut dest = vec![(0, 0); side * side];
    for i in 0..side * side {
        let (r, c) = layout.cell(i);
        dest[r * side + c] = snake_cell(i, side)?;
    }
    let plan = plan_cells(&dest, side)?;
    let mut gates = row_stage_gates(&plan.row_a, side, SwapKind::Plain)?;
    gates.extend(column_stage_gates(&plan.col, side, SwapKind::Plain)?);
    gates.extend(row_stage_gates(&plan.row_b, side, SwapKind::Plain)?);
    Ok(gates)
}

/// Fermionic permutation of the `2^k - 1` modes of `enc` (even `k`): convert
/// to JW, relayout to the snake, permute, undo both. The empty Hilbert cell
/// lands on the last snake position and is held fixed.
pub fn fperm_under_encoding(perm: &Permutation, enc: Encoding, k: u32) -> Result<Circuit> {
    check_order(k)?;
    if !k.is_multiple_of(2) {
        return Err(Error::InvalidSize(format!(
            "the four-step pipeline needs even k, got {k}"
        )));
    }
    let layout = HilbertLayout::new(k)?;
    let n = layout.modes();
    if perm.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: perm.len(),
        });
    }
    let side = layout.rows();
    let mut full = perm.as_slice().to_vec();
    full.push(n);
    let full = Permutation::new(full)?;

    let convert = conversion_gates(enc, Encoding::JordanWigner, k, &layout)?;
    let relayout = hilbert_to_snake_gates(k)?;
    let mut gates = convert.clone();
    gates.extend_from_slice(&relayout);
    gates.extend(fperm_gates(&full, side)?);
    gates.extend(reversed(relayout));
    gates.extend(reversed(convert));
    Ok(schedule_greedy(side, side, &gates)?
        .with_tag("kind", "fperm_encoded")
        .with_tag("encoding", enc.label()))
}
