//! Benchmark workloads: the fermionic FFT on the grid and one Trotter step
//! of the sparse SYK model, together with their dense reference oracles.
//!
//! FFT mode labels are row-major over physical cells, `label = r * L + c`;
//! Fock states are ordered along the snake. The transform preserves the
//! vacuum and sends `a†_k` to `sum_n W[n][k] a†_n` with
//! `W[n][k] = exp(-2 pi i n k / N) / sqrt(N)`.

use std::collections::BTreeSet;
use std::f64::consts::{FRAC_PI_4, PI};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Geometric, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::{metrics, schedule_greedy, Cell, Circuit, Gate, GateKind};
use crate::error::{Error, Result};
use crate::fperm::{fperm_gates, Method};
use crate::gamma::gamma_steps;
use crate::geometry::{snake_cell, snake_index, Permutation};
use crate::planner::{chain_sort_gates, parallel_line_sorts, SwapKind};
use crate::verify::{
    chain_majorana, snake_qubits, sparse_simulate, statevector_simulate, PauliString, SparseState,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FfftVariant {
    /// Column stage conjugated by snake-chain FSWAP transposes.
    FswapBaseline,
    /// Column stage conjugated by grid fermionic transposes.
    FpSandwich,
    /// Bare column transforms inside one diagonal sandwich pair.
    GammaSandwich,
}

impl FfftVariant {
    pub const ALL: [FfftVariant; 3] = [
        FfftVariant::FswapBaseline,
        FfftVariant::FpSandwich,
        FfftVariant::GammaSandwich,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            FfftVariant::FswapBaseline => "fswap_baseline",
            FfftVariant::FpSandwich => "fp_sandwich",
            FfftVariant::GammaSandwich => "gamma_sandwich",
        }
    }
}

impl std::str::FromStr for FfftVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FfftVariant::ALL
            .into_iter()
            .find(|v| v.label() == s)
            .ok_or_else(|| Error::Parse(format!("unknown FFFT variant {s:?}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FfftConfig {
    pub side: usize,
    pub variant: FfftVariant,
}

fn check_power_of_two(n: usize) -> Result<()> {
    if n == 0 || !n.is_power_of_two() {
        return Err(Error::InvalidSize(format!("{n} is not a power of two")));
    }
    Ok(())
}

/// Radix-2 transform over a JW-contiguous chain: mode `k` on `cells[k]`
/// ends as output `k` on `cells[k]`. Consecutive cells must be neighbors in
/// both the grid and the JW order (or the gates are bare and need the
/// sandwich).
pub fn ffft_chain_gates(cells: &[Cell]) -> Result<Vec<Gate>> {
    check_power_of_two(cells.len())?;
    let mut gates = Vec::new();
    chain_fft(cells, &mut gates)?;
    Ok(gates)
}

fn chain_fft(cells: &[Cell], gates: &mut Vec<Gate>) -> Result<()> {
    let m = cells.len();
    if m == 1 {
        return Ok(());
    }
    let half = m / 2;
    // Even inputs to the front half, odd ones to the back half; the same
    // map sorts butterfly outputs back into natural order.
    let split: Vec<usize> = (0..m)
        .map(|k| if k % 2 == 0 { k / 2 } else { half + k / 2 })
        .collect();
    let merge: Vec<usize> = (0..m)
        .map(|p| if p < half { 2 * p } else { 2 * (p - half) + 1 })
        .collect();
    gates.extend(parallel_line_sorts(
        &[(cells.to_vec(), split.clone())],
        SwapKind::Fermionic,
    )?);
    chain_fft(&cells[..half], gates)?;
    chain_fft(&cells[half..], gates)?;
    gates.extend(parallel_line_sorts(
        &[(cells.to_vec(), merge)],
        SwapKind::Fermionic,
    )?);
    for n in 0..half {
        let (a, b) = (cells[2 * n], cells[2 * n + 1]);
        // Twiddle times the sign that turns the Givens into a butterfly.
        let kind = if n == 0 {
            GateKind::Z
        } else {
            GateKind::Phase(PI - 2.0 * PI * n as f64 / m as f64)
        };
        gates.push(Gate::one(kind, b));
        gates.push(Gate::two(GateKind::Givens(FRAC_PI_4), a, b));
    }
    gates.extend(parallel_line_sorts(
        &[(cells.to_vec(), split)],
        SwapKind::Fermionic,
    )?);
    Ok(())
}

/// Transform on a single row of `len` qubits (`1 x len` grid).
pub fn build_ffft_1d_local(len: usize) -> Result<Circuit> {
    check_power_of_two(len)?;
    let cells: Vec<Cell> = (0..len).map(|c| (0, c)).collect();
    Ok(schedule_greedy(1, len, &ffft_chain_gates(&cells)?)?.with_tag("kind", "ffft_1d"))
}

fn row_cells(r: usize, side: usize) -> Vec<Cell> {
    (0..side).map(|c| (r, c)).collect()
}

fn rows_transform(side: usize) -> Result<Vec<Gate>> {
    let mut gates = Vec::new();
    for r in 0..side {
        gates.extend(ffft_chain_gates(&row_cells(r, side))?);
    }
    Ok(gates)
}

fn transpose_gates(side: usize, chain: bool) -> Result<Vec<Gate>> {
    let t = Permutation::transpose(side);
    if chain {
        chain_sort_gates(&t, side)
    } else {
        fperm_gates(&t, side)
    }
}

/// Four-step transform on the `L x L` grid: column transforms (wrapped per
/// variant), twiddles, row transforms, fermionic transpose.
pub fn build_ffft_2d(config: &FfftConfig) -> Result<Circuit> {
    let side = config.side;
    check_power_of_two(side)?;
    if side < 2 {
        return Err(Error::InvalidSize("2D transform needs L >= 2".into()));
    }
    let n = side * side;
    let chain = config.variant == FfftVariant::FswapBaseline;
    let mut gates = Vec::new();
    match config.variant {
        FfftVariant::GammaSandwich => {
            let gamma: Vec<Gate> = gamma_steps(side)?.concat();
            gates.extend_from_slice(&gamma);
            for c in 0..side {
                let column: Vec<Cell> = (0..side).map(|r| (r, c)).collect();
                gates.extend(ffft_chain_gates(&column)?);
            }
            gates.extend(gamma);
        }
        FfftVariant::FpSandwich | FfftVariant::FswapBaseline => {
            let t = transpose_gates(side, chain)?;
            gates.extend_from_slice(&t);
            gates.extend(rows_transform(side)?);
            gates.extend(t);
        }
    }
    for r in 0..side {
        for c in 1..side {
            if r > 0 {
                let angle = -2.0 * PI * (r * c) as f64 / n as f64;
                gates.push(Gate::one(GateKind::Phase(angle), (r, c)));
            }
        }
    }
    gates.extend(rows_transform(side)?);
    gates.extend(transpose_gates(side, chain)?);
    Ok(schedule_greedy(side, side, &gates)?
        .with_tag("kind", "ffft_2d")
        .with_tag("variant", config.variant.label()))
}

/// `W[n][k] = exp(-2 pi i n k / len) / sqrt(len)`.
pub fn dft_matrix(len: usize) -> DMatrix<Complex64> {
    let norm = 1.0 / (len as f64).sqrt();
    DMatrix::from_fn(len, len, |n, k| {
        Complex64::from_polar(norm, -2.0 * PI * ((n * k) % len) as f64 / len as f64)
    })
}

/// Grid cell of an FFT mode label.
pub fn ffft_label_cell(label: usize, side: usize) -> Cell {
    (label / side, label % side)
}

/// Dense creation operator of the mode on `cell`, with the JW string taken
/// along the snake. Bit `q` of a basis index is qubit `q = r * L + c`.
pub fn creation_matrix(cell: Cell, side: usize) -> Result<DMatrix<Complex64>> {
    let n = side * side;
    let dim = 1usize << n;
    let j = snake_index(cell.0, cell.1, side)?;
    let order = snake_qubits(side);
    let target = 1usize << (cell.0 * side + cell.1);
    let string: usize = order[..j].iter().map(|&q| 1usize << q).sum();
    let mut m = DMatrix::zeros(dim, dim);
    for i in 0..dim {
        if i & target == 0 {
            let sign = if (i & string).count_ones().is_multiple_of(2) {
                1.0
            } else {
                -1.0
            };
            m[(i | target, i)] = Complex64::new(sign, 0.0);
        }
    }
    Ok(m)
}

/// Reference transform built as `exp(i K)` with `K = sum h_mn a†_m a_n` and
/// `h = -i log W`. Dense, so only for a handful of modes.
pub fn ffft_oracle_unitary(side: usize) -> Result<DMatrix<Complex64>> {
    let n = side * side;
    if n > 6 {
        return Err(Error::TooManyQubits(n));
    }
    let w = dft_matrix(n);
    // W is normal, so its Schur form is diagonal.
    let (q, t) = nalgebra::Schur::new(w).unpack();
    let log_diag = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            t[(i, i)].ln()
        } else {
            Complex64::default()
        }
    });
    let h = (&q * log_diag * q.adjoint()) * Complex64::new(0.0, -1.0);
    let creators: Vec<DMatrix<Complex64>> = (0..n)
        .map(|l| creation_matrix(ffft_label_cell(l, side), side))
        .collect::<Result<_>>()?;
    let dim = 1usize << n;
    let mut k = DMatrix::<Complex64>::zeros(dim, dim);
    for a in 0..n {
        for b in 0..n {
            if h[(a, b)].norm() > 0.0 {
                k += &creators[a] * creators[b].adjoint() * h[(a, b)];
            }
        }
    }
    Ok((k * Complex64::new(0.0, 1.0)).exp())
}

/// Occupied labels of a Fock basis index, in snake order.
pub fn occupied_labels(index: u128, side: usize) -> Vec<usize> {
    (0..side * side)
        .filter_map(|j| {
            let (r, c) = snake_cell(j, side).ok()?;
            (index >> (r * side + c) & 1 == 1).then_some(r * side + c)
        })
        .collect()
}

/// Basis index with the given labels occupied.
pub fn basis_of_labels(labels: &[usize]) -> u128 {
    labels.iter().map(|&l| 1u128 << l).sum()
}

/// Expected amplitude `<out| U |in>` for one- and two-particle states,
/// from the single-particle matrix: the entry, or its 2x2 minor.
pub fn slater_amplitude(
    w: &DMatrix<Complex64>,
    inputs: &[usize],
    outputs: &[usize],
) -> Result<Complex64> {
    match (inputs, outputs) {
        ([k], [m]) => Ok(w[(*m, *k)]),
        ([k, l], [m, n]) => Ok(w[(*m, *k)] * w[(*n, *l)] - w[(*m, *l)] * w[(*n, *k)]),
        _ => Err(Error::InvalidSize(
            "only one- and two-particle sectors".into(),
        )),
    }
}

/// Labels sorted by JW position of their cells.
fn jw_sorted(mut labels: Vec<usize>, side: usize) -> Vec<usize> {
    labels.sort_by_key(|&l| {
        let (r, c) = ffft_label_cell(l, side);
        snake_index(r, c, side).unwrap_or(usize::MAX)
    });
    labels
}

/// Largest amplitude deviation from the expected transform over every
/// one-particle input, and every two-particle input when `pairs` is set.
/// Amplitude leaking out of the sector counts as deviation.
pub fn ffft_sector_error(circuit: &Circuit, side: usize, pairs: bool) -> Result<f64> {
    let n = side * side;
    let w = dft_matrix(n);
    let mut inputs: Vec<Vec<usize>> = (0..n).map(|k| vec![k]).collect();
    if pairs {
        for a in 0..n {
            for b in a + 1..n {
                inputs.push(jw_sorted(vec![a, b], side));
            }
        }
    }
    let errors: Vec<f64> = inputs
        .par_iter()
        .map(|input| -> Result<f64> {
            let start = SparseState::from([(basis_of_labels(input), Complex64::new(1.0, 0.0))]);
            let out = sparse_simulate(circuit, &start)?;
            let mut worst: f64 = 0.0;
            for (&key, amp) in &out {
                if key.count_ones() as usize != input.len() {
                    worst = worst.max(amp.norm());
                }
            }
            let outputs: Vec<Vec<usize>> = if input.len() == 1 {
                (0..n).map(|m| vec![m]).collect()
            } else {
                (0..n)
                    .flat_map(|a| (a + 1..n).map(move |b| vec![a, b]))
                    .map(|o| jw_sorted(o, side))
                    .collect()
            };
            for o in outputs {
                let want = slater_amplitude(&w, input, &o)?;
                let got = out.get(&basis_of_labels(&o)).copied().unwrap_or_default();
                worst = worst.max((got - want).norm());
            }
            Ok(worst)
        })
        .collect::<Result<_>>()?;
    Ok(errors.into_iter().fold(0.0, f64::max))
}

/// Largest entry of `|U - e^{i phi} U_ref|` against the dense oracle, with
/// the phase fixed on the vacuum column.
pub fn ffft_unitary_error(circuit: &Circuit, side: usize) -> Result<f64> {
    let want = ffft_oracle_unitary(side)?;
    let dim = want.nrows();
    let mut worst: f64 = 0.0;
    let mut phase = Complex64::new(1.0, 0.0);
    for k in 0..dim {
        let mut input = vec![Complex64::default(); dim];
        input[k] = Complex64::new(1.0, 0.0);
        let out = statevector_simulate(circuit, &input)?;
        if k == 0 {
            let overlap = out[0] * want[(0, 0)].conj();
            if overlap.norm() > 0.5 {
                phase = overlap / overlap.norm();
            }
        }
        for (n, amp) in out.iter().enumerate() {
            worst = worst.max((amp - want[(n, k)] * phase).norm());
        }
    }
    Ok(worst)
}

/// One SYK quartet `J * g_q0 g_q1 g_q2 g_q3`, Majorana indices ascending.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SykTerm {
    pub q: [usize; 4],
    #[serde(rename = "J")]
    pub coupling: f64,
}

impl SykTerm {
    /// Distinct modes with their multiplicity in the quartet.
    fn modes(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<(usize, usize)> = Vec::new();
        for &m in &self.q {
            match out.last_mut() {
                Some((mode, count)) if *mode == m / 2 => *count += 1,
                _ => out.push((m / 2, 1)),
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SykInstance {
    #[serde(rename = "N")]
    pub modes: usize,
    pub k: f64,
    pub seed: u64,
    pub terms: Vec<SykTerm>,
    pub dt: f64,
}

pub const DEFAULT_DT: f64 = 0.1;

impl SykInstance {
    /// Validates indices, ordering and couplings.
    pub fn new(modes: usize, k: f64, seed: u64, terms: Vec<SykTerm>, dt: f64) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for t in &terms {
            if t.q.windows(2).any(|w| w[0] >= w[1]) || t.q[3] >= 2 * modes {
                return Err(Error::Parse(format!(
                    "bad quartet {:?} for {modes} modes",
                    t.q
                )));
            }
            if !t.coupling.is_finite() || !seen.insert(t.q) {
                return Err(Error::Parse(format!("bad or repeated term {:?}", t.q)));
            }
        }
        if !dt.is_finite() {
            return Err(Error::Parse("dt must be finite".into()));
        }
        Ok(Self {
            modes,
            k,
            seed,
            terms,
            dt,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance JSON is always serializable")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: SykInstance =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        SykInstance::new(raw.modes, raw.k, raw.seed, raw.terms, raw.dt)
    }
}

fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u128, |acc, i| acc * (n - i) / (i + 1))
}

/// Quartet at colex rank `rank`.
fn unrank_quartet(mut rank: u128) -> [usize; 4] {
    let mut q = [0usize; 4];
    for slot in (0..4).rev() {
        let k = slot as u128 + 1;
        // Largest c with C(c, k) <= rank.
        let mut c = k - 1;
        while binomial(c + 1, k) <= rank {
            c += 1;
        }
        q[slot] = c as usize;
        rank -= binomial(c, k);
    }
    q
}

/// Includes every quartet of the `2n` Majoranas independently with
/// probability `k * 2n / C(2n, 4)` and draws couplings from
/// `N(0, 6 / n^3)`. Terms come out in lexicographic order.
pub fn sample_syk_terms(n: usize, k: f64, seed: u64) -> Result<SykInstance> {
    if n < 2 || k.is_nan() || k < 0.0 || !k.is_finite() {
        return Err(Error::InvalidSize(format!(
            "need N >= 2 and finite k >= 0, got N={n} k={k}"
        )));
    }
    let total = binomial(2 * n as u128, 4);
    let p = (k * 2.0 * n as f64 / total as f64).min(1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, (6.0 / (n as f64).powi(3)).sqrt()).expect("positive variance");
    let mut terms = Vec::new();
    if p > 0.0 {
        let gap = Geometric::new(p).expect("p in (0, 1]");
        let mut rank: u128 = gap.sample(&mut rng) as u128;
        while rank < total {
            terms.push(SykTerm {
                q: unrank_quartet(rank),
                coupling: normal.sample(&mut rng),
            });
            rank += 1 + gap.sample(&mut rng) as u128;
        }
    }
    terms.sort_by_key(|a| a.q);
    SykInstance::new(n, k, seed, terms, DEFAULT_DT)
}

/// First-fit coloring of the terms in lexicographic order; two terms clash
/// when they touch a common mode.
pub fn color_terms(terms: &[SykTerm]) -> Vec<Vec<SykTerm>> {
    let mut sorted = terms.to_vec();
    sorted.sort_by_key(|a| a.q);
    let mut groups: Vec<(BTreeSet<usize>, Vec<SykTerm>)> = Vec::new();
    for t in sorted {
        let modes: Vec<usize> = t.modes().iter().map(|m| m.0).collect();
        match groups
            .iter_mut()
            .find(|(used, _)| modes.iter().all(|m| !used.contains(m)))
        {
            Some((used, members)) => {
                used.extend(&modes);
                members.push(t);
            }
            None => groups.push((modes.iter().copied().collect(), vec![t])),
        }
    }
    groups.into_iter().map(|g| g.1).collect()
}

/// Sends each term's modes to consecutive JW positions, term by term, with
/// modes used by both of their Majoranas first so the rotated string has
/// no identity gaps. Untouched modes follow in ascending order.
pub fn packing_permutation(group: &[SykTerm], n: usize) -> Result<Permutation> {
    let mut map = vec![usize::MAX; n];
    let mut next = 0;
    for t in group {
        let modes = t.modes();
        let doubles = modes.iter().filter(|m| m.1 == 2);
        let singles = modes.iter().filter(|m| m.1 == 1);
        for &(mode, _) in doubles.chain(singles) {
            if mode >= n || map[mode] != usize::MAX {
                return Err(Error::InvalidPermutation(format!(
                    "mode {mode} shared inside a color group"
                )));
            }
            map[mode] = next;
            next += 1;
        }
    }
    for slot in map.iter_mut().filter(|s| **s == usize::MAX) {
        *slot = next;
        next += 1;
    }
    Permutation::new(map)
}

/// JW string of `g_q0 g_q1 g_q2 g_q3` after the packing, as (sign, literal
/// Pauli) on grid qubits.
pub fn packed_term_string(
    term: &SykTerm,
    packing: &Permutation,
    side: usize,
) -> Result<(f64, PauliString)> {
    let n = side * side;
    let order = snake_qubits(side);
    let mut p = PauliString::identity(n);
    for &m in &term.q {
        let moved = 2 * packing.get(m / 2) + m % 2;
        p = p.mul(&chain_majorana(moved, &order, n))?;
    }
    match p.phase() {
        0 => Ok((1.0, p)),
        2 => Ok((-1.0, p.with_phase(0))),
        _ => Err(Error::UnsupportedGate(
            "quartet product is not Hermitian".into(),
        )),
    }
}

/// `exp(-i * theta * P)` for a literal Pauli string on consecutive snake
/// positions: basis change, CNOT ladder, RZ, and back.
pub fn pauli_rotation_gates(p: &PauliString, theta: f64, side: usize) -> Result<Vec<Gate>> {
    let order = snake_qubits(side);
    let positions: Vec<usize> = (0..order.len())
        .filter(|&j| p.get(order[j]) != 'I')
        .collect();
    let (Some(&lo), Some(&hi)) = (positions.first(), positions.last()) else {
        return Ok(Vec::new());
    };
    if hi - lo + 1 != positions.len() {
        return Err(Error::Routing(format!(
            "string {p} is not contiguous along the snake"
        )));
    }
    let cells: Vec<Cell> = (lo..=hi)
        .map(|j| snake_cell(j, side))
        .collect::<Result<_>>()?;
    let factor = |cell: Cell| p.get(cell.0 * side + cell.1);
    let mut gates = Vec::new();
    for &c in &cells {
        match factor(c) {
            'X' => gates.push(Gate::one(GateKind::H, c)),
            'Y' => gates.extend([Gate::one(GateKind::Sdg, c), Gate::one(GateKind::H, c)]),
            _ => {}
        }
    }
    let ladder: Vec<Gate> = cells.windows(2).map(|w| Gate::cnot(w[0], w[1])).collect();
    gates.extend_from_slice(&ladder);
    gates.push(Gate::one(
        GateKind::Rz(2.0 * theta),
        *cells.last().expect("nonempty"),
    ));
    gates.extend(ladder.iter().rev());
    for &c in &cells {
        match factor(c) {
            'X' => gates.push(Gate::one(GateKind::H, c)),
            'Y' => gates.extend([Gate::one(GateKind::H, c), Gate::one(GateKind::S, c)]),
            _ => {}
        }
    }
    Ok(gates)
}

/// Trotter step circuit and its depth split.
#[derive(Clone, Debug, PartialEq)]
pub struct TrotterStep {
    pub circuit: Circuit,
    pub groups: usize,
    /// Summed CNOT depth of every forward and inverse permutation.
    pub fp_depth: usize,
    /// Summed CNOT depth of the rotation layers.
    pub rotation_depth: usize,
}

fn grid_side(modes: usize) -> Result<usize> {
    let side = (modes as f64).sqrt().round() as usize;
    if side * side != modes || side < 2 {
        return Err(Error::InvalidSize(format!(
            "circuit needs N = L^2 with L >= 2, got {modes}"
        )));
    }
    Ok(side)
}

fn perm_gates(perm: &Permutation, side: usize, method: Method) -> Result<Vec<Gate>> {
    match method {
        Method::Ours => fperm_gates(perm, side),
        Method::OnedFswap => chain_sort_gates(perm, side),
    }
}

/// One first-order step: per color group, permute the group's modes
/// together, rotate every term in parallel, permute back.
pub fn build_trotter_step_with(instance: &SykInstance, method: Method) -> Result<TrotterStep> {
    let side = grid_side(instance.modes)?;
    let groups = color_terms(&instance.terms);
    let mut gates = Vec::new();
    let (mut fp_depth, mut rotation_depth) = (0, 0);
    let depth_of =
        |g: &[Gate]| -> Result<usize> { Ok(metrics(&schedule_greedy(side, side, g)?)?.cnot_depth) };
    for group in &groups {
        let pack = packing_permutation(group, instance.modes)?;
        let forward = perm_gates(&pack, side, method)?;
        let back = perm_gates(&pack.invert(), side, method)?;
        let mut rotations = Vec::new();
        for t in group {
            let (sign, p) = packed_term_string(t, &pack, side)?;
            rotations.extend(pauli_rotation_gates(
                &p,
                sign * t.coupling * instance.dt,
                side,
            )?);
        }
        fp_depth += depth_of(&forward)? + depth_of(&back)?;
        rotation_depth += depth_of(&rotations)?;
        gates.extend(forward);
        gates.extend(rotations);
        gates.extend(back);
    }
    let circuit = schedule_greedy(side, side, &gates)?
        .with_tag("kind", "syk_trotter")
        .with_tag("method", method.label());
    Ok(TrotterStep {
        circuit,
        groups: groups.len(),
        fp_depth,
        rotation_depth,
    })
}

pub fn build_trotter_step(instance: &SykInstance) -> Result<Circuit> {
    Ok(build_trotter_step_with(instance, Method::Ours)?.circuit)
}

/// Dense Majorana operators along the snake, `2N` of them.
pub fn majorana_matrices(side: usize) -> Result<Vec<DMatrix<Complex64>>> {
    let n = side * side;
    let mut out = Vec::with_capacity(2 * n);
    for j in 0..n {
        let up = creation_matrix(snake_cell(j, side)?, side)?;
        let down = up.adjoint();
        out.push(&up + &down);
        out.push((&up - &down) * Complex64::new(0.0, 1.0));
    }
    Ok(out)
}

/// `prod_t exp(-i J_t dt g g g g)` in coloring order, as a dense matrix.
pub fn trotter_oracle(instance: &SykInstance) -> Result<DMatrix<Complex64>> {
    let side = grid_side(instance.modes)?;
    let gam = majorana_matrices(side)?;
    let dim = 1usize << instance.modes;
    let mut u = DMatrix::<Complex64>::identity(dim, dim);
    for t in color_terms(&instance.terms).concat() {
        let prod = &gam[t.q[0]] * &gam[t.q[1]] * &gam[t.q[2]] * &gam[t.q[3]];
        let angle = t.coupling * instance.dt;
        let step = DMatrix::<Complex64>::identity(dim, dim) * Complex64::new(angle.cos(), 0.0)
            - prod * Complex64::new(0.0, angle.sin());
        u = step * u;
    }
    Ok(u)
}

/// Largest deviation of the compiled step from the dense oracle over
/// `states` random normalized inputs. Dense, so `N <= 9`.
pub fn trotter_error(instance: &SykInstance, states: usize, seed: u64) -> Result<f64> {
    if instance.modes > 9 {
        return Err(Error::TooManyQubits(instance.modes));
    }
    let circuit = build_trotter_step(instance)?;
    let u = trotter_oracle(instance)?;
    let dim = u.nrows();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, 1.0).expect("unit variance");
    let mut worst: f64 = 0.0;
    for _ in 0..states {
        let mut psi: Vec<Complex64> = (0..dim)
            .map(|_| Complex64::new(normal.sample(&mut rng), normal.sample(&mut rng)))
            .collect();
        let norm = psi.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        psi.iter_mut().for_each(|a| *a /= norm);
        let got = statevector_simulate(&circuit, &psi)?;
        let want = &u * nalgebra::DVector::from_vec(psi);
        for (g, w) in got.iter().zip(want.iter()) {
            worst = worst.max((g - w).norm());
        }
    }
    Ok(worst)
}
