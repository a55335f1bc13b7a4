//! The diagonal sandwich operator that promotes bare vertical FSWAPs to
//! fermionic swaps, as a GF(2) phase polynomial and as an ancilla-free
//! CNOT/CZ/Z circuit.
//!
//! The operator acts as `|s> -> (-1)^{f(s)} |s>` with
//! `f(s) = f_skip(s~) xor f_pair(s)`, where `s~` holds column-suffix
//! parities. Both pieces are sums of the triangular form
//! `T(x, y) = xor_{p < q} x_p y_q` over rows.
//!
//! The circuit has four phases: a vertical CNOT cascade into the parity
//! basis, pipelined row sweeps for `f_skip`, the inverse cascade, and
//! pipelined row sweeps for `f_pair`.

use rayon::prelude::*;

use crate::circuit::{schedule_greedy, Cell, Circuit, Gate, GateKind};
use crate::error::{Error, Result};
use crate::geometry::snake_index_unchecked;

/// `xor_{p < q} x_p y_q`.
pub fn triangular_cross(x: &[bool], y: &[bool]) -> Result<bool> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            expected: x.len(),
            got: y.len(),
        });
    }
    let mut prefix = false;
    let mut acc = false;
    for (xp, yq) in x.iter().zip(y) {
        acc ^= prefix & yq;
        prefix ^= xp;
    }
    Ok(acc)
}

/// `side x side` bits; reads outside the grid are zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitGrid {
    side: usize,
    bits: Vec<bool>,
}

impl BitGrid {
    pub fn new(side: usize, bits: Vec<bool>) -> Result<Self> {
        if bits.len() != side * side {
            return Err(Error::LengthMismatch {
                expected: side * side,
                got: bits.len(),
            });
        }
        Ok(Self { side, bits })
    }

    pub fn zeros(side: usize) -> Self {
        Self {
            side,
            bits: vec![false; side * side],
        }
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn get(&self, r: i64, c: i64) -> bool {
        let l = self.side as i64;
        (0..l).contains(&r) && (0..l).contains(&c) && self.bits[(r * l + c) as usize]
    }

    pub fn set(&mut self, r: usize, c: usize, v: bool) {
        self.bits[r * self.side + c] = v;
    }

    /// Row `r`, or all zeros when `r` is off the grid.
    pub fn row(&self, r: usize) -> Vec<bool> {
        if r >= self.side {
            return vec![false; self.side];
        }
        self.bits[r * self.side..(r + 1) * self.side].to_vec()
    }

    /// `out[r][c] = xor_{r' >= r} s[r'][c]`.
    pub fn suffix_parity(&self) -> BitGrid {
        let l = self.side;
        let mut out = self.clone();
        for r in (0..l.saturating_sub(1)).rev() {
            for c in 0..l {
                out.bits[r * l + c] ^= out.bits[(r + 1) * l + c];
            }
        }
        out
    }
}

fn tri(x: &[bool], y: &[bool]) -> bool {
    triangular_cross(x, y).expect("rows share the grid width")
}

/// `xor_{r even} T(s_r, s_r) xor T(s_r, s_{r+1})`.
pub fn f_pair(s: &BitGrid) -> bool {
    (0..s.side()).step_by(2).fold(false, |acc, r| {
        acc ^ tri(&s.row(r), &s.row(r)) ^ tri(&s.row(r), &s.row(r + 1))
    })
}

/// `xor_{r even, r+2 < L} T(t_r, t_{r+2}) xor xor_{r even, r >= 2} T(t_r, t_r)`
/// over the parity view `t`.
pub fn f_skip(parity: &BitGrid) -> bool {
    let l = parity.side();
    let mut acc = false;
    for r in (0..l).step_by(2) {
        if r + 2 < l {
            acc ^= tri(&parity.row(r), &parity.row(r + 2));
        }
        if r >= 2 {
            acc ^= tri(&parity.row(r), &parity.row(r));
        }
    }
    acc
}

/// Reference value of the phase exponent on basis state `s`.
pub fn gamma_phase_oracle(s: &BitGrid) -> bool {
    f_skip(&s.suffix_parity()) ^ f_pair(s)
}

/// Degree-2 polynomial over GF(2) on `vars` variables, stored as a
/// symmetric adjacency bitset (`quad[i]` bit `j` set iff `x_i x_j` present).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhasePolynomial {
    vars: usize,
    quad: Vec<Vec<u64>>,
    lin: Vec<u64>,
    constant: bool,
}

fn words(n: usize) -> usize {
    n.div_ceil(64)
}

fn flip_bit(v: &mut [u64], i: usize) {
    v[i / 64] ^= 1 << (i % 64);
}

fn test_bit(v: &[u64], i: usize) -> bool {
    v[i / 64] >> (i % 64) & 1 == 1
}

impl PhasePolynomial {
    pub fn zero(vars: usize) -> Self {
        Self {
            vars,
            quad: vec![vec![0; words(vars)]; vars],
            lin: vec![0; words(vars)],
            constant: false,
        }
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    /// Adds `x_i x_j`; a square collapses to the linear term `x_i`.
    pub fn toggle_product(&mut self, i: usize, j: usize) {
        if i == j {
            flip_bit(&mut self.lin, i);
        } else {
            flip_bit(&mut self.quad[i], j);
            flip_bit(&mut self.quad[j], i);
        }
    }

    pub fn toggle_linear(&mut self, i: usize) {
        flip_bit(&mut self.lin, i);
    }

    pub fn toggle_constant(&mut self) {
        self.constant ^= true;
    }

    pub fn has_product(&self, i: usize, j: usize) -> bool {
        if i == j {
            test_bit(&self.lin, i)
        } else {
            test_bit(&self.quad[i], j)
        }
    }

    pub fn has_linear(&self, i: usize) -> bool {
        test_bit(&self.lin, i)
    }

    pub fn constant(&self) -> bool {
        self.constant
    }

    pub fn quadratic_terms(&self) -> usize {
        self.quad
            .iter()
            .map(|r| r.iter().map(|w| w.count_ones() as usize).sum::<usize>())
            .sum::<usize>()
            / 2
    }

    pub fn linear_terms(&self) -> usize {
        self.lin.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn evaluate(&self, x: &[bool]) -> Result<bool> {
        if x.len() != self.vars {
            return Err(Error::LengthMismatch {
                expected: self.vars,
                got: x.len(),
            });
        }
        let mut acc = self.constant;
        for i in 0..self.vars {
            if !x[i] {
                continue;
            }
            acc ^= test_bit(&self.lin, i);
            for (j, &xj) in x.iter().enumerate().skip(i + 1) {
                if xj && test_bit(&self.quad[i], j) {
                    acc ^= true;
                }
            }
        }
        Ok(acc)
    }

    /// `f(x) xor f(x xor e_i xor e_j)` as an affine form in `x`.
    pub fn joint_flip_difference(&self, i: usize, j: usize) -> AffineForm {
        let mut coeffs = self.quad[i].clone();
        for (w, v) in coeffs.iter_mut().zip(&self.quad[j]) {
            *w ^= v;
        }
        let constant = test_bit(&self.quad[i], j) ^ test_bit(&self.lin, i) ^ test_bit(&self.lin, j);
        AffineForm {
            vars: self.vars,
            coeffs,
            constant,
        }
    }
}

/// `c xor xor_i a_i x_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineForm {
    vars: usize,
    coeffs: Vec<u64>,
    constant: bool,
}

impl AffineForm {
    pub fn from_support(
        vars: usize,
        support: impl IntoIterator<Item = usize>,
        constant: bool,
    ) -> Self {
        let mut coeffs = vec![0; words(vars)];
        for i in support {
            flip_bit(&mut coeffs, i);
        }
        Self {
            vars,
            coeffs,
            constant,
        }
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.vars)
            .filter(|&i| test_bit(&self.coeffs, i))
            .collect()
    }

    pub fn constant(&self) -> bool {
        self.constant
    }
}

/// Cell `(r, c)` is variable `r * L + c`.
fn var(side: usize, r: usize, c: usize) -> usize {
    r * side + c
}

/// Adds `T(a, b)` where row `a` (resp. `b`) is the column-suffix parity of
/// row `ra` (resp. `rb`) when `suffix` is set, or the plain row otherwise.
fn add_triangular(poly: &mut PhasePolynomial, side: usize, ra: usize, rb: usize, suffix: bool) {
    let rows_a: Vec<usize> = if suffix {
        (ra..side).collect()
    } else {
        vec![ra]
    };
    let rows_b: Vec<usize> = if suffix {
        (rb..side).collect()
    } else {
        vec![rb]
    };
    for p in 0..side {
        for q in p + 1..side {
            for &a in &rows_a {
                for &b in &rows_b {
                    poly.toggle_product(var(side, a, p), var(side, b, q));
                }
            }
        }
    }
}

/// The phase exponent of the sandwich operator as an explicit polynomial in
/// the original occupation bits.
pub fn gamma_polynomial(side: usize) -> PhasePolynomial {
    let mut poly = PhasePolynomial::zero(side * side);
    for r in (0..side).step_by(2) {
        add_triangular(&mut poly, side, r, r, false);
        if r + 1 < side {
            add_triangular(&mut poly, side, r, r + 1, false);
        }
        if r + 2 < side {
            add_triangular(&mut poly, side, r, r + 2, true);
        }
        if r >= 2 {
            add_triangular(&mut poly, side, r, r, true);
        }
    }
    poly
}

/// Result of the symbolic check for one vertical pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairCheck {
    pub top: Cell,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParityReport {
    pub side: usize,
    pub pairs: Vec<PairCheck>,
}

impl ParityReport {
    pub fn passed(&self) -> bool {
        self.pairs.iter().all(|p| p.passed)
    }

    pub fn failures(&self) -> Vec<Cell> {
        self.pairs
            .iter()
            .filter(|p| !p.passed)
            .map(|p| p.top)
            .collect()
    }
}

/// For every vertical pair with snake indices `j < k`, compares the joint
/// flip difference of `f` with the parity of the sites strictly between
/// `j` and `k`. Both sides are affine forms; the comparison is exact.
pub fn check_parity_encoding(side: usize) -> Result<ParityReport> {
    if side < 2 {
        return Err(Error::InvalidSize(format!("side {side} < 2")));
    }
    let poly = gamma_polynomial(side);
    let n = side * side;
    let tops: Vec<Cell> = (0..side - 1)
        .flat_map(|r| (0..side).map(move |c| (r, c)))
        .collect();
    let pairs = tops
        .par_iter()
        .map(|&(r, c)| {
            let (va, vb) = (var(side, r, c), var(side, r + 1, c));
            let diff = poly.joint_flip_difference(va, vb);
            let j = snake_index_unchecked(r, c, side);
            let k = snake_index_unchecked(r + 1, c, side);
            let (lo, hi) = (j.min(k), j.max(k));
            let between = (lo + 1..hi).map(|m| {
                let (mr, mc) = crate::geometry::snake_cell_unchecked(m, side);
                var(side, mr, mc)
            });
            let want = AffineForm::from_support(n, between, false);
            PairCheck {
                top: (r, c),
                passed: diff == want,
            }
        })
        .collect();
    Ok(ParityReport { side, pairs })
}

/// Trailing gadget families of a pipelined sweep.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GadgetKind {
    /// CZ between horizontal neighbours on the sweep row.
    Same,
    /// CZ between the sweep row and the row below.
    Cross,
    /// Skip-row CZ trailing a left-to-right cascade.
    SkipMinus,
    /// Skip-row CZ trailing a right-to-left cascade.
    SkipPlus,
    /// Z on columns with `L - 1 - c` odd; cancels the linear residual of `Same`.
    ZFix,
}

/// A gadget anchored `offset` columns away from the cascade front.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GadgetSpec {
    pub kind: GadgetKind,
    pub offset: i64,
}

impl GadgetSpec {
    pub fn new(kind: GadgetKind, offset: i64) -> Self {
        Self { kind, offset }
    }
}

/// In-range gates of `kind` anchored at column `c` of sweep row `r`.
fn gadget_gates(kind: GadgetKind, r: usize, c: i64, side: usize, out: &mut Vec<Gate>) {
    let l = side as i64;
    let r = r as i64;
    let cell = |rr: i64, cc: i64| -> Option<Cell> {
        ((0..l).contains(&rr) && (0..l).contains(&cc)).then_some((rr as usize, cc as usize))
    };
    let cz = |a: Option<Cell>, b: Option<Cell>, out: &mut Vec<Gate>| {
        if let (Some(a), Some(b)) = (a, b) {
            out.push(Gate::cz(a, b));
        }
    };
    match kind {
        GadgetKind::Same => cz(cell(r, c - 1), cell(r, c), out),
        GadgetKind::Cross => cz(cell(r, c), cell(r + 1, c), out),
        GadgetKind::SkipMinus | GadgetKind::SkipPlus => {
            let d = if kind == GadgetKind::SkipMinus { -1 } else { 1 };
            cz(cell(r + 1, c), cell(r + 2, c), out);
            if let (Some(a), Some(b)) = (cell(r, c + d), cell(r + 1, c + d)) {
                out.push(Gate::cnot(a, b));
            }
            cz(cell(r + 1, c + 2 * d), cell(r + 2, c + 2 * d), out);
            if let (Some(a), Some(b)) = (cell(r, c + 3 * d), cell(r + 1, c + 3 * d)) {
                out.push(Gate::cnot(a, b));
            }
        }
        GadgetKind::ZFix => {
            if let Some(a) = cell(r, c) {
                if (l - 1 - c) % 2 == 1 {
                    out.push(Gate::one(GateKind::Z, a));
                }
            }
        }
    }
}

/// Widest reach of any gadget relative to the cascade front.
const SWEEP_MARGIN: i64 = 12;

fn check_step(step: &[Gate]) -> Result<()> {
    let mut seen: Vec<Cell> = Vec::with_capacity(step.len() * 2);
    for g in step {
        for c in g.cells() {
            if seen.contains(&c) {
                return Err(Error::LayerConflict(c));
            }
            seen.push(c);
        }
    }
    Ok(())
}

/// Time steps of one pipelined sweep along row `r`: a forward cascade with
/// `fwd` gadgets, then the inverse cascade with `undo` gadgets. Steps with
/// no in-range gate are dropped. Fails if a step reuses a qubit.
pub fn pipe_sweep(
    r: usize,
    fwd: &[GadgetSpec],
    undo: &[GadgetSpec],
    side: usize,
) -> Result<Vec<Vec<Gate>>> {
    if side < 2 || r >= side {
        return Err(Error::OutOfRange(format!("sweep row {r} on side {side}")));
    }
    let l = side as i64;
    let mut steps = Vec::new();
    let emit = |t: i64, gadgets: &[GadgetSpec], steps: &mut Vec<Vec<Gate>>| -> Result<()> {
        let mut step = Vec::new();
        if (0..=l - 2).contains(&t) {
            step.push(Gate::cnot((r, t as usize), (r, t as usize + 1)));
        }
        for g in gadgets {
            gadget_gates(g.kind, r, t + g.offset, side, &mut step);
        }
        if !step.is_empty() {
            check_step(&step)?;
            steps.push(step);
        }
        Ok(())
    };
    for t in 0..=l + SWEEP_MARGIN {
        emit(t, fwd, &mut steps)?;
    }
    for t in (-SWEEP_MARGIN..=l - 2).rev() {
        emit(t, undo, &mut steps)?;
    }
    Ok(steps)
}

/// Merges sweeps that run side by side; step `i` of the result is the union
/// of step `i` of every sweep. Fails if two sweeps share a qubit in a step.
fn merge_parallel(sweeps: Vec<Vec<Vec<Gate>>>) -> Result<Vec<Vec<Gate>>> {
    let depth = sweeps.iter().map(Vec::len).max().unwrap_or(0);
    let mut out = vec![Vec::new(); depth];
    for sweep in sweeps {
        for (i, step) in sweep.into_iter().enumerate() {
            out[i].extend(step);
        }
    }
    for step in &out {
        check_step(step)?;
    }
    Ok(out)
}

fn sweep_a_gadgets(r: usize, side: usize) -> (Vec<GadgetSpec>, Vec<GadgetSpec>) {
    let (mut fwd, mut undo) = (Vec::new(), Vec::new());
    if r + 2 < side {
        fwd.push(GadgetSpec::new(GadgetKind::SkipMinus, -1));
        undo.push(GadgetSpec::new(GadgetKind::SkipPlus, 1));
    }
    if r >= 2 {
        fwd.push(GadgetSpec::new(GadgetKind::Same, -5));
        undo.push(GadgetSpec::new(GadgetKind::ZFix, 5));
    }
    (fwd, undo)
}

fn sweep_b_gadgets() -> (Vec<GadgetSpec>, Vec<GadgetSpec>) {
    (
        vec![
            GadgetSpec::new(GadgetKind::Cross, -2),
            GadgetSpec::new(GadgetKind::Same, -3),
        ],
        vec![
            GadgetSpec::new(GadgetKind::Cross, 2),
            GadgetSpec::new(GadgetKind::ZFix, 3),
        ],
    )
}

/// The four phases as time steps, before any cross-phase compression.
pub fn gamma_steps(side: usize) -> Result<Vec<Vec<Gate>>> {
    if side < 2 {
        return Err(Error::InvalidSize(format!("side {side} < 2")));
    }
    let mut steps: Vec<Vec<Gate>> = Vec::new();
    let cascade =
        |r: usize| -> Vec<Gate> { (0..side).map(|c| Gate::cnot((r + 1, c), (r, c))).collect() };

    for r in (0..side - 1).rev() {
        steps.push(cascade(r));
    }
    for residue in [0, 2] {
        let mut batch = Vec::new();
        for r in (residue..side).step_by(4) {
            let (fwd, undo) = sweep_a_gadgets(r, side);
            if fwd.is_empty() && undo.is_empty() {
                continue;
            }
            batch.push(pipe_sweep(r, &fwd, &undo, side)?);
        }
        steps.extend(merge_parallel(batch)?);
    }
    for r in 0..side - 1 {
        steps.push(cascade(r));
    }
    let mut batch = Vec::new();
    let (fwd, undo) = sweep_b_gadgets();
    for r in (0..side - 1).step_by(2) {
        batch.push(pipe_sweep(r, &fwd, &undo, side)?);
    }
    if side % 2 == 1 {
        let last = side - 1;
        batch.push(pipe_sweep(
            last,
            &[GadgetSpec::new(GadgetKind::Same, -3)],
            &[GadgetSpec::new(GadgetKind::ZFix, 3)],
            side,
        )?);
    }
    steps.extend(merge_parallel(batch)?);
    Ok(steps)
}

/// Ancilla-free circuit for the sandwich operator on an `side x side` grid.
pub fn build_gamma(side: usize) -> Result<Circuit> {
    let gates: Vec<Gate> = gamma_steps(side)?.into_iter().flatten().collect();
    Ok(schedule_greedy(side, side, &gates)?.with_tag("kind", "gamma"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::metrics;
    use crate::verify::simulate_phase_circuit;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn bits(side: usize, k: u64) -> BitGrid {
        BitGrid::new(side, (0..side * side).map(|i| k >> i & 1 == 1).collect()).unwrap()
    }

    fn circuit_phase(c: &Circuit, s: &BitGrid) -> (bool, bool) {
        let out = simulate_phase_circuit(c, s.bits()).unwrap();
        (out.bits == s.bits(), out.phase == 2)
    }

    #[test]
    fn triangular_examples() {
        let y = [false, true, true, true];
        assert!(!triangular_cross(&[false; 4], &y).unwrap());
        assert!(
            !triangular_cross(&[true, false, true, false], &[false, true, true, true]).unwrap()
        );
        assert!(triangular_cross(&[true], &[true, false]).is_err());
    }

    #[test]
    fn flip_rule_for_first_argument() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let x: Vec<bool> = (0..7).map(|_| rng.random()).collect();
            let y: Vec<bool> = (0..7).map(|_| rng.random()).collect();
            let c0 = rng.random_range(0..7);
            let mut x2 = x.clone();
            x2[c0] ^= true;
            let delta = triangular_cross(&x, &y).unwrap() ^ triangular_cross(&x2, &y).unwrap();
            let want = y[c0 + 1..].iter().fold(false, |a, &b| a ^ b);
            assert_eq!(delta, want);
        }
    }

    #[test]
    fn oracle_examples() {
        assert!(!gamma_phase_oracle(&BitGrid::zeros(5)));
        let s = BitGrid::new(2, vec![true, true, false, false]).unwrap();
        assert!(!f_skip(&s.suffix_parity()));
        assert!(f_pair(&s));
        assert!(gamma_phase_oracle(&s));
        for side in 2..8 {
            for i in 0..side * side {
                assert!(!gamma_phase_oracle(&bits(side, 1 << i)));
            }
        }
    }

    #[test]
    fn polynomial_matches_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for side in 2..9 {
            let poly = gamma_polynomial(side);
            assert_eq!(poly.linear_terms(), 0);
            assert!(!poly.constant());
            for _ in 0..200 {
                let s =
                    BitGrid::new(side, (0..side * side).map(|_| rng.random()).collect()).unwrap();
                assert_eq!(poly.evaluate(s.bits()).unwrap(), gamma_phase_oracle(&s));
            }
        }
    }

    #[test]
    fn joint_flip_difference_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut p = PhasePolynomial::zero(6);
        p.toggle_product(0, 1);
        p.toggle_product(1, 4);
        p.toggle_product(2, 3);
        p.toggle_linear(5);
        p.toggle_product(3, 3);
        for _ in 0..50 {
            let x: Vec<bool> = (0..6).map(|_| rng.random()).collect();
            for (i, j) in [(0, 1), (1, 3), (2, 5), (3, 4)] {
                let mut y = x.clone();
                y[i] ^= true;
                y[j] ^= true;
                let d = p.joint_flip_difference(i, j);
                let val = d.support().iter().fold(d.constant(), |a, &k| a ^ x[k]);
                assert_eq!(val, p.evaluate(&x).unwrap() ^ p.evaluate(&y).unwrap());
            }
        }
    }

    #[test]
    fn parity_condition_small_sides() {
        for side in 2..=12 {
            let rep = check_parity_encoding(side).unwrap();
            assert_eq!(rep.pairs.len(), side * (side - 1));
            assert!(rep.passed(), "side {side}: {:?}", rep.failures());
        }
        // L = 2, pair (0,0)-(1,0): the difference is s_{0,1} xor s_{1,1}.
        let poly = gamma_polynomial(2);
        assert_eq!(poly.joint_flip_difference(0, 2).support(), vec![1, 3]);
    }

    #[test]
    fn empty_sweep_is_identity() {
        let steps = pipe_sweep(0, &[], &[], 5).unwrap();
        assert_eq!(steps.len(), 8);
        let c = schedule_greedy(5, 5, &steps.concat()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..20 {
            let s = BitGrid::new(5, (0..25).map(|_| rng.random()).collect()).unwrap();
            assert_eq!(circuit_phase(&c, &s), (true, false));
        }
    }

    #[test]
    fn sweep_contributions() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for side in 3..9 {
            let (fwd, undo) = sweep_b_gadgets();
            let b = schedule_greedy(
                side,
                side,
                &pipe_sweep(0, &fwd, &undo, side).unwrap().concat(),
            )
            .unwrap();
            let skip = schedule_greedy(
                side,
                side,
                &pipe_sweep(
                    0,
                    &[
                        GadgetSpec::new(GadgetKind::SkipMinus, -1),
                        GadgetSpec::new(GadgetKind::Same, -5),
                    ],
                    &[
                        GadgetSpec::new(GadgetKind::SkipPlus, 1),
                        GadgetSpec::new(GadgetKind::ZFix, 5),
                    ],
                    side,
                )
                .unwrap()
                .concat(),
            )
            .unwrap();
            for _ in 0..50 {
                let s =
                    BitGrid::new(side, (0..side * side).map(|_| rng.random()).collect()).unwrap();
                let (r0, r1, r2) = (s.row(0), s.row(1), s.row(2));
                assert_eq!(circuit_phase(&b, &s), (true, tri(&r0, &r0) ^ tri(&r0, &r1)));
                assert_eq!(
                    circuit_phase(&skip, &s),
                    (true, tri(&r0, &r0) ^ tri(&r0, &r2))
                );
            }
        }
    }

    #[test]
    fn circuit_matches_oracle_exhaustively_small() {
        for side in 2..=3 {
            let c = build_gamma(side).unwrap();
            for k in 0..1u64 << (side * side) {
                let s = bits(side, k);
                assert_eq!(
                    circuit_phase(&c, &s),
                    (true, gamma_phase_oracle(&s)),
                    "side {side} k {k}"
                );
            }
        }
    }

    #[test]
    fn circuit_matches_oracle_sampled() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for side in 4..=10 {
            let c = build_gamma(side).unwrap();
            let twice = c.then(&c).unwrap();
            for _ in 0..100 {
                let s =
                    BitGrid::new(side, (0..side * side).map(|_| rng.random()).collect()).unwrap();
                assert_eq!(circuit_phase(&c, &s), (true, gamma_phase_oracle(&s)));
                assert_eq!(circuit_phase(&twice, &s), (true, false));
            }
        }
    }

    #[test]
    fn emission_is_conflict_free_and_ancilla_free() {
        for side in 2..=32 {
            let steps = gamma_steps(side).unwrap();
            for step in &steps {
                check_step(step).unwrap();
            }
            let c = build_gamma(side).unwrap();
            assert_eq!(c.qubits(), side * side);
        }
        assert!(build_gamma(1).is_err());
    }

    #[test]
    fn depth_bound_small() {
        let d = metrics(&build_gamma(4).unwrap()).unwrap().cnot_depth;
        assert!(d <= 42, "depth {d}");
    }
}
