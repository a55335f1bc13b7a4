//! Independent oracles: basis-state phase simulation, dense and sparse
//! statevectors, Pauli conjugation, the fermionic-permutation formula and a
//! Pauli-frame noise sampler.
//!
//! Qubit `q = r * cols + c` of a circuit is bit `q` of a statevector index.
//! Mode bits are indexed by snake position; [`modes_to_qubits`] converts.

use std::collections::HashMap;
use std::fmt;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::{decompose_to_cnot, Circuit, Gate, GateKind, Metrics};
use crate::error::{Error, Result};
use crate::geometry::{inversion_set, snake_cell_unchecked, Permutation};

pub type Amplitudes = Vec<Complex64>;

/// Largest register the dense engine accepts.
pub const MAX_DENSE_QUBITS: usize = 20;

/// Basis label with a phase `i^phase`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PhaseState {
    pub bits: Vec<bool>,
    pub phase: u8,
}

impl PhaseState {
    pub fn new(bits: Vec<bool>) -> Self {
        Self { bits, phase: 0 }
    }

    pub fn sign(&self) -> Complex64 {
        i_pow(self.phase)
    }
}

fn i_pow(k: u8) -> Complex64 {
    match k % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// Bits by snake position to bits by qubit index on an `side x side` grid.
pub fn modes_to_qubits(mode_bits: &[bool], side: usize) -> Vec<bool> {
    let mut out = vec![false; side * side];
    for (j, &b) in mode_bits.iter().enumerate() {
        let (r, c) = snake_cell_unchecked(j, side);
        out[r * side + c] = b;
    }
    out
}

pub fn qubits_to_modes(qubit_bits: &[bool], side: usize) -> Vec<bool> {
    (0..side * side)
        .map(|j| {
            let (r, c) = snake_cell_unchecked(j, side);
            qubit_bits[r * side + c]
        })
        .collect()
}

/// Exact action of a permutation-diagonal circuit on one basis state.
pub fn simulate_phase_circuit(circuit: &Circuit, input: &[bool]) -> Result<PhaseState> {
    if input.len() != circuit.qubits() {
        return Err(Error::LengthMismatch {
            expected: circuit.qubits(),
            got: input.len(),
        });
    }
    let mut st = PhaseState::new(input.to_vec());
    for g in circuit.gates() {
        apply_phase_gate(&mut st, g, circuit.cols())?;
    }
    Ok(st)
}

fn apply_phase_gate(st: &mut PhaseState, g: &Gate, cols: usize) -> Result<()> {
    let a = g.a.0 * cols + g.a.1;
    let b = g.b.map(|c| c.0 * cols + c.1);
    let s = &mut st.bits;
    let mut bump = 0u8;
    match (g.kind, b) {
        (GateKind::Cnot, Some(b)) => s[b] ^= s[a],
        (GateKind::Cz, Some(b)) => bump = 2 * u8::from(s[a] && s[b]),
        (GateKind::Swap, Some(b)) => s.swap(a, b),
        (GateKind::Fswap, Some(b)) => {
            bump = 2 * u8::from(s[a] && s[b]);
            s.swap(a, b);
        }
        (GateKind::Z, None) => bump = 2 * u8::from(s[a]),
        (GateKind::X, None) => s[a] = !s[a],
        (GateKind::Y, None) => {
            bump = if s[a] { 3 } else { 1 };
            s[a] = !s[a];
        }
        (GateKind::S, None) => bump = u8::from(s[a]),
        (GateKind::Sdg, None) => bump = 3 * u8::from(s[a]),
        (k, _) => {
            return Err(Error::UnsupportedGate(format!(
                "{} in phase simulation",
                k.name()
            )))
        }
    }
    st.phase = (st.phase + bump) % 4;
    Ok(())
}

/// The fermionic permutation on a mode-indexed basis state: the bit at `i`
/// moves to `perm(i)` and every occupied inversion pair contributes `-1`.
pub fn fperm_oracle(perm: &Permutation, bits: &[bool]) -> Result<PhaseState> {
    let out = perm.apply(bits)?;
    let m = perm.as_slice();
    let mut odd = false;
    // Count occupied inversions with a Fenwick tree over targets.
    let n = bits.len();
    let mut tree = vec![0u32; n + 1];
    let mut seen = 0u32;
    for i in 0..n {
        if !bits[i] {
            continue;
        }
        let mut below = 0u32;
        let mut k = m[i] + 1;
        while k > 0 {
            below += tree[k];
            k &= k - 1;
        }
        if (seen - below) % 2 == 1 {
            odd = !odd;
        }
        let mut k = m[i] + 1;
        while k <= n {
            tree[k] += 1;
            k += k & k.wrapping_neg();
        }
        seen += 1;
    }
    Ok(PhaseState {
        bits: out,
        phase: if odd { 2 } else { 0 },
    })
}

/// Direct transcription: a CZ on every inversion pair, then the permutation.
pub fn fperm_oracle_literal(perm: &Permutation, bits: &[bool]) -> Result<PhaseState> {
    let mut phase = 0u8;
    for &(i, j) in inversion_set(perm).pairs() {
        if bits[i] && bits[j] {
            phase = (phase + 2) % 4;
        }
    }
    Ok(PhaseState {
        bits: perm.apply(bits)?,
        phase,
    })
}

/// Fermionic swap of snake positions `j < k` including the parity of the
/// occupations strictly between them.
pub fn full_fswap_oracle(j: usize, k: usize, bits: &[bool]) -> PhaseState {
    let (j, k) = (j.min(k), j.max(k));
    let between = bits[j + 1..k].iter().filter(|&&b| b).count() % 2 == 1;
    let (sj, sk) = (bits[j], bits[k]);
    let odd = (sj && sk) ^ ((sj ^ sk) && between);
    let mut out = bits.to_vec();
    out.swap(j, k);
    PhaseState {
        bits: out,
        phase: if odd { 2 } else { 0 },
    }
}

/// Runs the phase simulator on mode bits and compares with [`fperm_oracle`].
pub fn matches_fperm_oracle(
    circuit: &Circuit,
    perm: &Permutation,
    side: usize,
    mode_bits: &[bool],
) -> Result<bool> {
    let got = simulate_phase_circuit(circuit, &modes_to_qubits(mode_bits, side))?;
    let want = fperm_oracle(perm, mode_bits)?;
    Ok(got.phase == want.phase && qubits_to_modes(&got.bits, side) == want.bits)
}

/// Pauli operator `i^phase * P_0 (x) P_1 (x) ...`; `x & z` is a literal `Y`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    x: Vec<bool>,
    z: Vec<bool>,
    phase: u8,
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        Self {
            x: vec![false; n],
            z: vec![false; n],
            phase: 0,
        }
    }

    /// Builds from `(qubit, 'X' | 'Y' | 'Z')` factors; later factors on the
    /// same qubit overwrite earlier ones.
    pub fn from_factors(n: usize, factors: &[(usize, char)]) -> Result<Self> {
        let mut p = Self::identity(n);
        for &(q, f) in factors {
            if q >= n {
                return Err(Error::OutOfRange(format!("qubit {q} of {n}")));
            }
            p.set(q, f)?;
        }
        Ok(p)
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn phase(&self) -> u8 {
        self.phase
    }

    pub fn negate(&mut self) {
        self.phase = (self.phase + 2) % 4;
    }

    pub fn with_phase(mut self, phase: u8) -> Self {
        self.phase = phase % 4;
        self
    }

    pub fn get(&self, q: usize) -> char {
        match (self.x[q], self.z[q]) {
            (false, false) => 'I',
            (true, false) => 'X',
            (true, true) => 'Y',
            (false, true) => 'Z',
        }
    }

    pub fn set(&mut self, q: usize, f: char) -> Result<()> {
        let (x, z) = match f {
            'I' => (false, false),
            'X' => (true, false),
            'Y' => (true, true),
            'Z' => (false, true),
            other => return Err(Error::Parse(format!("Pauli factor {other:?}"))),
        };
        self.x[q] = x;
        self.z[q] = z;
        Ok(())
    }

    pub fn x_bits(&self) -> &[bool] {
        &self.x
    }

    pub fn z_bits(&self) -> &[bool] {
        &self.z
    }

    /// Indices with a non-identity factor.
    pub fn support(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&q| self.x[q] || self.z[q])
            .collect()
    }

    /// `self * other`, tracking the phase exactly.
    pub fn mul(&self, other: &PauliString) -> Result<PauliString> {
        if self.len() != other.len() {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                got: other.len(),
            });
        }
        let mut phase = i32::from(self.phase) + i32::from(other.phase);
        let mut out = PauliString::identity(self.len());
        for q in 0..self.len() {
            let (x1, z1, x2, z2) = (self.x[q], self.z[q], other.x[q], other.z[q]);
            phase += pauli_product_exponent(x1, z1, x2, z2);
            out.x[q] = x1 ^ x2;
            out.z[q] = z1 ^ z2;
        }
        out.phase = phase.rem_euclid(4) as u8;
        Ok(out)
    }

    /// Replaces `self` with `G self G^dagger` for a Clifford gate.
    pub fn conjugate_gate(&mut self, g: &Gate, cols: usize) -> Result<()> {
        let a = g.a.0 * cols + g.a.1;
        let b = g.b.map(|c| c.0 * cols + c.1);
        let mut flip = false;
        match (g.kind, b) {
            (GateKind::H, None) => {
                flip = self.x[a] && self.z[a];
                std::mem::swap(&mut self.x[a], &mut self.z[a]);
            }
            (GateKind::S, None) => {
                flip = self.x[a] && self.z[a];
                self.z[a] ^= self.x[a];
            }
            (GateKind::Sdg, None) => {
                flip = self.x[a] && !self.z[a];
                self.z[a] ^= self.x[a];
            }
            (GateKind::X, None) => flip = self.z[a],
            (GateKind::Z, None) => flip = self.x[a],
            (GateKind::Y, None) => flip = self.x[a] ^ self.z[a],
            (GateKind::Cnot, Some(b)) => self.cnot(a, b, &mut flip),
            (GateKind::Cz, Some(b)) => self.cz(a, b, &mut flip),
            (GateKind::Swap, Some(b)) => self.swap(a, b),
            (GateKind::Fswap, Some(b)) => {
                self.swap(a, b);
                self.cz(a, b, &mut flip);
            }
            (k, _) => {
                return Err(Error::UnsupportedGate(format!(
                    "{} is not Clifford here",
                    k.name()
                )))
            }
        }
        if flip {
            self.negate();
        }
        Ok(())
    }

    fn cnot(&mut self, a: usize, b: usize, flip: &mut bool) {
        *flip ^= self.x[a] && self.z[b] && !(self.x[b] ^ self.z[a]);
        self.x[b] ^= self.x[a];
        self.z[a] ^= self.z[b];
    }

    fn cz(&mut self, a: usize, b: usize, flip: &mut bool) {
        *flip ^= self.x[a] && self.x[b] && (self.z[a] ^ self.z[b]);
        self.z[a] ^= self.x[b];
        self.z[b] ^= self.x[a];
    }

    fn swap(&mut self, a: usize, b: usize) {
        self.x.swap(a, b);
        self.z.swap(a, b);
    }
}

/// Exponent `e` with `P1 P2 = i^e (P1 P2 as a literal string)`.
fn pauli_product_exponent(x1: bool, z1: bool, x2: bool, z2: bool) -> i32 {
    let (x1, z1, x2, z2) = (i32::from(x1), i32::from(z1), i32::from(x2), i32::from(z2));
    match (x1, z1) {
        (0, 0) => 0,
        (1, 1) => z2 - x2,
        (1, 0) => z2 * (2 * x2 - 1),
        _ => x2 * (1 - 2 * z2),
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = ["+", "+i", "-", "-i"][usize::from(self.phase)];
        write!(f, "{sign}")?;
        for q in 0..self.len() {
            write!(f, "{}", self.get(q))?;
        }
        Ok(())
    }
}

/// `U p U^dagger` for the whole circuit.
pub fn conjugate_pauli(circuit: &Circuit, p: &PauliString) -> Result<PauliString> {
    if p.len() != circuit.qubits() {
        return Err(Error::LengthMismatch {
            expected: circuit.qubits(),
            got: p.len(),
        });
    }
    let mut out = p.clone();
    for g in circuit.gates() {
        out.conjugate_gate(g, circuit.cols())?;
    }
    Ok(out)
}

/// Majorana `2 * pos + alpha` under the chain order `qubit_of[pos]`.
pub fn chain_majorana(index: usize, qubit_of: &[usize], total_qubits: usize) -> PauliString {
    let (pos, alpha) = (index / 2, index % 2);
    let mut p = PauliString::identity(total_qubits);
    for &q in &qubit_of[..pos] {
        p.z[q] = true;
    }
    p.x[qubit_of[pos]] = true;
    p.z[qubit_of[pos]] = alpha == 1;
    p
}

/// Qubit index of every snake position on a square grid.
pub fn snake_qubits(side: usize) -> Vec<usize> {
    (0..side * side)
        .map(|j| {
            let (r, c) = snake_cell_unchecked(j, side);
            r * side + c
        })
        .collect()
}

/// Per-Majorana outcome of conjugating through a permutation circuit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MajoranaReport {
    pub checked: usize,
    pub failures: Vec<usize>,
}

impl MajoranaReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks `U g_{2j+a} U^dagger = g_{2 perm(j) + a}` for every Majorana.
pub fn check_majorana_permutation(
    circuit: &Circuit,
    perm: &Permutation,
    side: usize,
) -> Result<MajoranaReport> {
    let n = side * side;
    if perm.len() != n || circuit.qubits() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: perm.len(),
        });
    }
    let order = snake_qubits(side);
    let outcomes: Vec<Result<bool>> = (0..2 * n)
        .into_par_iter()
        .map(|m| {
            let src = chain_majorana(m, &order, n);
            let got = conjugate_pauli(circuit, &src)?;
            let want = chain_majorana(2 * perm.get(m / 2) + m % 2, &order, n);
            Ok(got == want)
        })
        .collect();
    let mut failures = Vec::new();
    for (m, ok) in outcomes.into_iter().enumerate() {
        if !ok? {
            failures.push(m);
        }
    }
    Ok(MajoranaReport {
        checked: 2 * n,
        failures,
    })
}

/// 2x2 matrix `m[out][in]` of a single-qubit gate.
pub fn gate_matrix_1q(kind: GateKind) -> Result<[[Complex64; 2]; 2]> {
    let c = |re: f64, im: f64| Complex64::new(re, im);
    let o = c(0.0, 0.0);
    let one = c(1.0, 0.0);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    Ok(match kind {
        GateKind::X => [[o, one], [one, o]],
        GateKind::Y => [[o, c(0.0, -1.0)], [c(0.0, 1.0), o]],
        GateKind::Z => [[one, o], [o, -one]],
        GateKind::H => [[c(h, 0.0), c(h, 0.0)], [c(h, 0.0), c(-h, 0.0)]],
        GateKind::S => [[one, o], [o, c(0.0, 1.0)]],
        GateKind::Sdg => [[one, o], [o, c(0.0, -1.0)]],
        GateKind::Rz(t) => [
            [Complex64::from_polar(1.0, -t / 2.0), o],
            [o, Complex64::from_polar(1.0, t / 2.0)],
        ],
        GateKind::Ry(t) => {
            let (s, co) = (t / 2.0).sin_cos();
            [[c(co, 0.0), c(-s, 0.0)], [c(s, 0.0), c(co, 0.0)]]
        }
        GateKind::Phase(t) => [[one, o], [o, Complex64::from_polar(1.0, t)]],
        k => {
            return Err(Error::UnsupportedGate(format!(
                "{} is not single-qubit",
                k.name()
            )))
        }
    })
}

/// 4x4 matrix `m[out][in]` over basis index `2 * bit(a) + bit(b)`.
pub fn gate_matrix_2q(kind: GateKind) -> Result<[[Complex64; 4]; 4]> {
    let o = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let mut m = [[o; 4]; 4];
    match kind {
        GateKind::Cnot => {
            m[0][0] = one;
            m[1][1] = one;
            m[3][2] = one;
            m[2][3] = one;
        }
        GateKind::Cz => {
            m[0][0] = one;
            m[1][1] = one;
            m[2][2] = one;
            m[3][3] = -one;
        }
        GateKind::Swap | GateKind::Fswap => {
            m[0][0] = one;
            m[2][1] = one;
            m[1][2] = one;
            m[3][3] = if kind == GateKind::Fswap { -one } else { one };
        }
        GateKind::Givens(t) => {
            let (s, c) = t.sin_cos();
            m[0][0] = one;
            m[3][3] = one;
            m[1][1] = Complex64::new(c, 0.0);
            m[1][2] = Complex64::new(s, 0.0);
            m[2][1] = Complex64::new(-s, 0.0);
            m[2][2] = Complex64::new(c, 0.0);
        }
        k => {
            return Err(Error::UnsupportedGate(format!(
                "{} is not two-qubit",
                k.name()
            )))
        }
    }
    Ok(m)
}

/// Dense evolution over the full alphabet.
pub fn statevector_simulate(circuit: &Circuit, input: &[Complex64]) -> Result<Amplitudes> {
    let n = circuit.qubits();
    if n > MAX_DENSE_QUBITS {
        return Err(Error::TooManyQubits(n));
    }
    if input.len() != 1 << n {
        return Err(Error::LengthMismatch {
            expected: 1 << n,
            got: input.len(),
        });
    }
    let mut psi = input.to_vec();
    for g in circuit.gates() {
        let a = g.a.0 * circuit.cols() + g.a.1;
        match g.b {
            None => {
                let m = gate_matrix_1q(g.kind)?;
                let bit = 1usize << a;
                for i in 0..psi.len() {
                    if i & bit == 0 {
                        let (u, v) = (psi[i], psi[i | bit]);
                        psi[i] = m[0][0] * u + m[0][1] * v;
                        psi[i | bit] = m[1][0] * u + m[1][1] * v;
                    }
                }
            }
            Some(cb) => {
                let b = cb.0 * circuit.cols() + cb.1;
                let m = gate_matrix_2q(g.kind)?;
                let (ba, bb) = (1usize << a, 1usize << b);
                for i in 0..psi.len() {
                    if i & (ba | bb) == 0 {
                        let idx = [i, i | bb, i | ba, i | ba | bb];
                        let v = idx.map(|k| psi[k]);
                        for (row, &k) in m.iter().zip(&idx) {
                            psi[k] = row[0] * v[0] + row[1] * v[1] + row[2] * v[2] + row[3] * v[3];
                        }
                    }
                }
            }
        }
    }
    Ok(psi)
}

/// Basis-state dictionary for circuits that keep few amplitudes alive, such
/// as particle-number conserving ones. Keys are qubit bitmasks.
pub type SparseState = HashMap<u128, Complex64>;

const SPARSE_PRUNE: f64 = 1e-14;

pub fn sparse_simulate(circuit: &Circuit, input: &SparseState) -> Result<SparseState> {
    let n = circuit.qubits();
    if n > 128 {
        return Err(Error::TooManyQubits(n));
    }
    let mut psi = input.clone();
    for g in circuit.gates() {
        let a = g.a.0 * circuit.cols() + g.a.1;
        let mut next: SparseState = HashMap::with_capacity(psi.len() * 2);
        match g.b {
            None => {
                let m = gate_matrix_1q(g.kind)?;
                let bit = 1u128 << a;
                for (&k, &amp) in &psi {
                    let inp = usize::from(k & bit != 0);
                    for (out, row) in m.iter().enumerate() {
                        let w = row[inp];
                        if w.re != 0.0 || w.im != 0.0 {
                            let key = if out == 1 { k | bit } else { k & !bit };
                            *next.entry(key).or_default() += w * amp;
                        }
                    }
                }
            }
            Some(cb) => {
                let b = cb.0 * circuit.cols() + cb.1;
                let m = gate_matrix_2q(g.kind)?;
                let (ba, bb) = (1u128 << a, 1u128 << b);
                for (&k, &amp) in &psi {
                    let inp = 2 * usize::from(k & ba != 0) + usize::from(k & bb != 0);
                    let rest = k & !(ba | bb);
                    for (out, row) in m.iter().enumerate() {
                        let w = row[inp];
                        if w.re != 0.0 || w.im != 0.0 {
                            let key = rest
                                | if out & 2 != 0 { ba } else { 0 }
                                | if out & 1 != 0 { bb } else { 0 };
                            *next.entry(key).or_default() += w * amp;
                        }
                    }
                }
            }
        }
        next.retain(|_, v| v.norm() > SPARSE_PRUNE);
        psi = next;
    }
    Ok(psi)
}

/// Two-qubit depolarizing rate `p2q`; idle qubits see `0.1 * p2q`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseParams {
    pub p2q: f64,
    pub shots: u64,
}

impl NoiseParams {
    pub const DEFAULT_SHOTS: u64 = 1_000_000;

    pub fn new(p2q: f64, shots: u64) -> Result<Self> {
        if !(0.0..1.0).contains(&p2q) {
            return Err(Error::InvalidSize(format!("p2q = {p2q} outside [0, 1)")));
        }
        Ok(Self { p2q, shots })
    }

    pub fn p_idle(&self) -> f64 {
        0.1 * self.p2q
    }
}

/// `(1 - p2q)^G (1 - 0.1 p2q)^I`.
pub fn estimate_fidelity(m: &Metrics, p2q: f64) -> f64 {
    (1.0 - p2q).powf(m.gates as f64) * (1.0 - 0.1 * p2q).powf(m.idle as f64)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FidelityEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub shots: u64,
}

#[derive(Clone, Copy)]
enum FrameOp {
    Cnot(usize, usize),
    Cz(usize, usize),
    Swap(usize, usize),
    Fswap(usize, usize),
    H(usize),
    Phase(usize),
}

struct FrameLayer {
    ops: Vec<FrameOp>,
    pairs: Vec<(usize, usize)>,
    idle: Vec<usize>,
}

fn frame_layers(circuit: &Circuit) -> Result<Vec<FrameLayer>> {
    let compiled = decompose_to_cnot(circuit)?;
    let cols = compiled.cols();
    let q = |c: (usize, usize)| c.0 * cols + c.1;
    let mut out = Vec::with_capacity(compiled.layers().len());
    for layer in compiled.layers() {
        let mut ops = Vec::with_capacity(layer.len());
        let mut pairs = Vec::new();
        let mut busy = vec![false; compiled.qubits()];
        for g in layer {
            let a = q(g.a);
            let op = match (g.kind, g.b.map(q)) {
                (GateKind::Cnot, Some(b)) => FrameOp::Cnot(a, b),
                (GateKind::Cz, Some(b)) => FrameOp::Cz(a, b),
                (GateKind::Swap, Some(b)) => FrameOp::Swap(a, b),
                (GateKind::Fswap, Some(b)) => FrameOp::Fswap(a, b),
                (GateKind::H, None) => FrameOp::H(a),
                (GateKind::S | GateKind::Sdg, None) => FrameOp::Phase(a),
                (GateKind::X | GateKind::Y | GateKind::Z, None) => continue,
                (k, _) => {
                    return Err(Error::UnsupportedGate(format!(
                        "{} in Pauli-frame sampling",
                        k.name()
                    )))
                }
            };
            if let Some(b) = g.b.map(q) {
                pairs.push((a, b));
                busy[a] = true;
                busy[b] = true;
            }
            ops.push(op);
        }
        let idle = if pairs.is_empty() {
            Vec::new()
        } else {
            (0..compiled.qubits()).filter(|&i| !busy[i]).collect()
        };
        out.push(FrameLayer { ops, pairs, idle });
    }
    Ok(out)
}

/// Countdown over a Bernoulli stream; yields gaps between successes.
struct Skipper {
    log_q: f64,
    left: u64,
}

impl Skipper {
    fn new(p: f64, rng: &mut ChaCha8Rng) -> Self {
        let mut s = Self {
            log_q: (1.0 - p).ln(),
            left: u64::MAX,
        };
        s.left = s.gap(rng);
        s
    }

    fn gap(&self, rng: &mut ChaCha8Rng) -> u64 {
        if self.log_q == 0.0 {
            return u64::MAX;
        }
        let u: f64 = 1.0 - rng.random::<f64>();
        let g = (u.ln() / self.log_q).floor();
        if g >= u64::MAX as f64 {
            u64::MAX
        } else {
            g as u64
        }
    }

    /// Calls `hit(k)` for every success among the next `trials` draws.
    fn run(
        &mut self,
        trials: u64,
        rng: &mut ChaCha8Rng,
        mut hit: impl FnMut(u64, &mut ChaCha8Rng),
    ) {
        let mut pos = 0u64;
        while self.left < trials - pos {
            pos += self.left;
            hit(pos, rng);
            pos += 1;
            self.left = self.gap(rng);
        }
        self.left -= trials - pos;
    }
}

/// Monte Carlo success probability of noisy-forward, noiseless-inverse,
/// measure-all from `|0...0>`. Each 64-shot word has its own stream so the
/// result does not depend on the thread count.
pub fn pauli_frame_sample(
    circuit: &Circuit,
    noise: &NoiseParams,
    seed: u64,
) -> Result<FidelityEstimate> {
    let layers = frame_layers(circuit)?;
    let nq = circuit.qubits();
    let words = noise.shots.div_ceil(64);
    let p2 = noise.p2q;
    let p1 = noise.p_idle();
    let successes: u64 = (0..words)
        .into_par_iter()
        .map(|w| {
            let lanes = if w + 1 == words && !noise.shots.is_multiple_of(64) {
                noise.shots % 64
            } else {
                64
            };
            let mask = if lanes == 64 {
                u64::MAX
            } else {
                (1u64 << lanes) - 1
            };
            if p2 == 0.0 {
                return u64::from(mask.count_ones());
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(w);
            let mut two = Skipper::new(p2, &mut rng);
            let mut one = Skipper::new(p1, &mut rng);
            let mut x = vec![0u64; nq];
            let mut z = vec![0u64; nq];
            for layer in layers.iter().rev() {
                two.run(layer.pairs.len() as u64 * 64, &mut rng, |k, rng| {
                    let (a, b) = layer.pairs[(k / 64) as usize];
                    let bit = 1u64 << (k % 64);
                    let e = rng.random_range(1..16u32);
                    if e & 1 != 0 {
                        x[a] ^= bit;
                    }
                    if e & 2 != 0 {
                        z[a] ^= bit;
                    }
                    if e & 4 != 0 {
                        x[b] ^= bit;
                    }
                    if e & 8 != 0 {
                        z[b] ^= bit;
                    }
                });
                one.run(layer.idle.len() as u64 * 64, &mut rng, |k, rng| {
                    let q = layer.idle[(k / 64) as usize];
                    let bit = 1u64 << (k % 64);
                    let e = rng.random_range(1..4u32);
                    if e & 1 != 0 {
                        x[q] ^= bit;
                    }
                    if e & 2 != 0 {
                        z[q] ^= bit;
                    }
                });
                for op in layer.ops.iter().rev() {
                    match *op {
                        FrameOp::Cnot(a, b) => {
                            x[b] ^= x[a];
                            z[a] ^= z[b];
                        }
                        FrameOp::Cz(a, b) => {
                            z[a] ^= x[b];
                            z[b] ^= x[a];
                        }
                        FrameOp::Swap(a, b) => {
                            x.swap(a, b);
                            z.swap(a, b);
                        }
                        FrameOp::Fswap(a, b) => {
                            z[a] ^= x[b];
                            z[b] ^= x[a];
                            x.swap(a, b);
                            z.swap(a, b);
                        }
                        FrameOp::H(a) => std::mem::swap(&mut x[a], &mut z[a]),
                        FrameOp::Phase(a) => z[a] ^= x[a],
                    }
                }
            }
            let flipped = x.iter().fold(0u64, |acc, &v| acc | v);
            u64::from((!flipped & mask).count_ones())
        })
        .sum();
    let shots = noise.shots.max(1);
    let mean = successes as f64 / shots as f64;
    Ok(FidelityEstimate {
        mean,
        stderr: (mean * (1.0 - mean) / shots as f64).sqrt(),
        shots: noise.shots,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{metrics, schedule_greedy};

    fn basis(n: usize, k: usize) -> Vec<bool> {
        (0..n).map(|i| k >> i & 1 == 1).collect()
    }

    #[test]
    fn phase_sim_examples() {
        let empty = Circuit::empty(1, 3);
        let s = vec![true, false, true];
        assert_eq!(
            simulate_phase_circuit(&empty, &s).unwrap(),
            PhaseState::new(s.clone())
        );
        let f = schedule_greedy(1, 2, &[Gate::fswap((0, 0), (0, 1))]).unwrap();
        let out = simulate_phase_circuit(&f, &[true, true]).unwrap();
        assert_eq!((out.bits, out.phase), (vec![true, true], 2));
        let h = schedule_greedy(1, 1, &[Gate::one(GateKind::H, (0, 0))]).unwrap();
        assert!(matches!(
            simulate_phase_circuit(&h, &[false]),
            Err(Error::UnsupportedGate(_))
        ));
    }

    #[test]
    fn full_fswap_example() {
        let out = full_fswap_oracle(0, 2, &[false, true, true]);
        assert_eq!((out.bits, out.phase), (vec![true, true, false], 2));
    }

    #[test]
    fn fperm_oracle_examples() {
        let s = vec![true, false, true, true, false];
        assert_eq!(
            fperm_oracle(&Permutation::identity(5), &s).unwrap(),
            PhaseState::new(s)
        );
        let swap = Permutation::new(vec![1, 0]).unwrap();
        assert_eq!(fperm_oracle(&swap, &[true, true]).unwrap().phase, 2);
        let out = fperm_oracle(&Permutation::reversal(3), &[true, true, false]).unwrap();
        assert_eq!((out.bits, out.phase), (vec![false, true, true], 2));
    }

    #[test]
    fn fperm_oracle_matches_literal_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in 1..=10 {
            for _ in 0..5 {
                let p = Permutation::random(n, &mut rng);
                for k in 0..1usize << n {
                    let s = basis(n, k);
                    assert_eq!(
                        fperm_oracle(&p, &s).unwrap(),
                        fperm_oracle_literal(&p, &s).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn adjacent_fswap_chain_matches_oracle() {
        // An FSWAP between snake neighbours is the fermionic transposition.
        let side = 3;
        let mut gates = Vec::new();
        let mut perm: Vec<usize> = (0..9).collect();
        for j in [0usize, 3, 4, 7, 1] {
            let a = snake_cell_unchecked(j, side);
            let b = snake_cell_unchecked(j + 1, side);
            gates.push(Gate::fswap(a, b));
            // Track where each original item sits.
            let (x, y) = (
                perm.iter().position(|&v| v == j).unwrap(),
                perm.iter().position(|&v| v == j + 1).unwrap(),
            );
            perm.swap(x, y);
        }
        // perm[i] is the slot holding item i after the swaps.
        let c = schedule_greedy(side, side, &gates).unwrap();
        let target = Permutation::new(perm).unwrap();
        for k in 0..512 {
            assert!(matches_fperm_oracle(&c, &target, side, &basis(9, k)).unwrap());
        }
    }

    #[test]
    fn phase_sim_agrees_with_statevector() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let kinds2 = [
            GateKind::Cnot,
            GateKind::Cz,
            GateKind::Fswap,
            GateKind::Swap,
        ];
        let kinds1 = [
            GateKind::X,
            GateKind::Y,
            GateKind::Z,
            GateKind::S,
            GateKind::Sdg,
        ];
        for _ in 0..20 {
            let mut gates = Vec::new();
            for _ in 0..40 {
                let r = rng.random_range(0..3);
                let c = rng.random_range(0..3);
                if rng.random_bool(0.6) {
                    let k = kinds2[rng.random_range(0..4)];
                    gates.push(Gate::two(k, (r, c), (r, c + 1)));
                } else {
                    gates.push(Gate::one(kinds1[rng.random_range(0..5)], (r, c)));
                }
            }
            let circ = schedule_greedy(3, 4, &gates).unwrap();
            let k = rng.random_range(0..1usize << 12);
            let s = basis(12, k);
            let ps = simulate_phase_circuit(&circ, &s).unwrap();
            let mut psi = vec![Complex64::new(0.0, 0.0); 1 << 12];
            psi[k] = Complex64::new(1.0, 0.0);
            let out = statevector_simulate(&circ, &psi).unwrap();
            let idx: usize = ps
                .bits
                .iter()
                .enumerate()
                .map(|(i, &b)| usize::from(b) << i)
                .sum();
            assert!((out[idx] - ps.sign()).norm() < 1e-12);
        }
    }

    #[test]
    fn statevector_examples() {
        let c = Circuit::empty(1, 2);
        let psi = vec![Complex64::new(0.5, 0.0); 4];
        assert_eq!(statevector_simulate(&c, &psi).unwrap(), psi);
        let rz = schedule_greedy(1, 1, &[Gate::one(GateKind::Rz(0.8), (0, 0))]).unwrap();
        let out = statevector_simulate(&rz, &[Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)])
            .unwrap();
        assert!((out[1] - Complex64::from_polar(1.0, 0.4)).norm() < 1e-15);
        assert!(statevector_simulate(&Circuit::empty(3, 7), &[]).is_err());
    }

    #[test]
    fn sparse_matches_dense() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let gates: Vec<Gate> = (0..60)
            .map(|_| {
                let c = rng.random_range(0..4);
                match rng.random_range(0..4) {
                    0 => Gate::two(
                        GateKind::Givens(rng.random_range(-2.0..2.0)),
                        (0, c),
                        (0, c + 1),
                    ),
                    1 => Gate::fswap((0, c), (0, c + 1)),
                    2 => Gate::one(GateKind::Phase(0.3), (0, c)),
                    _ => Gate::one(GateKind::H, (0, c)),
                }
            })
            .collect();
        let circ = schedule_greedy(1, 5, &gates).unwrap();
        let mut dense = vec![Complex64::new(0.0, 0.0); 32];
        dense[0b00110] = Complex64::new(1.0, 0.0);
        let d = statevector_simulate(&circ, &dense).unwrap();
        let s = sparse_simulate(
            &circ,
            &HashMap::from([(0b00110u128, Complex64::new(1.0, 0.0))]),
        )
        .unwrap();
        for (k, amp) in d.iter().enumerate() {
            let sv = s.get(&(k as u128)).copied().unwrap_or_default();
            assert!((sv - amp).norm() < 1e-12);
        }
    }

    #[test]
    fn pauli_conjugation_rules() {
        let cnot = schedule_greedy(1, 2, &[Gate::cnot((0, 0), (0, 1))]).unwrap();
        let x0 = PauliString::from_factors(2, &[(0, 'X')]).unwrap();
        assert_eq!(conjugate_pauli(&cnot, &x0).unwrap().to_string(), "+XX");
        let cz = schedule_greedy(1, 2, &[Gate::cz((0, 0), (0, 1))]).unwrap();
        let z0 = PauliString::from_factors(2, &[(0, 'Z')]).unwrap();
        assert_eq!(conjugate_pauli(&cz, &z0).unwrap(), z0);
        let rz = schedule_greedy(1, 1, &[Gate::one(GateKind::Rz(0.1), (0, 0))]).unwrap();
        assert!(conjugate_pauli(&rz, &PauliString::identity(1)).is_err());
    }

    /// Every Clifford rule is checked against dense matrices on all 16
    /// two-qubit Paulis.
    #[test]
    fn pauli_rules_match_matrices() {
        let gates = [
            Gate::one(GateKind::H, (0, 0)),
            Gate::one(GateKind::S, (0, 1)),
            Gate::one(GateKind::Sdg, (0, 0)),
            Gate::one(GateKind::X, (0, 1)),
            Gate::one(GateKind::Y, (0, 0)),
            Gate::one(GateKind::Z, (0, 1)),
            Gate::cnot((0, 0), (0, 1)),
            Gate::cnot((0, 1), (0, 0)),
            Gate::cz((0, 0), (0, 1)),
            Gate::swap((0, 0), (0, 1)),
            Gate::fswap((0, 0), (0, 1)),
        ];
        let letters = ['I', 'X', 'Y', 'Z'];
        for g in gates {
            let circ = schedule_greedy(1, 2, &[g]).unwrap();
            for a in letters {
                for b in letters {
                    let p = PauliString::from_factors(2, &[(0, a), (1, b)]).unwrap();
                    let q = conjugate_pauli(&circ, &p).unwrap();
                    // Check U P |k> == Q U |k> on all basis states.
                    for k in 0..4 {
                        let mut e = vec![Complex64::new(0.0, 0.0); 4];
                        e[k] = Complex64::new(1.0, 0.0);
                        let lhs = statevector_simulate(&circ, &apply_pauli(&p, &e)).unwrap();
                        let rhs = apply_pauli(&q, &statevector_simulate(&circ, &e).unwrap());
                        for (u, v) in lhs.iter().zip(&rhs) {
                            assert!((u - v).norm() < 1e-12, "{g:?} {p} -> {q}");
                        }
                    }
                }
            }
        }
    }

    fn apply_pauli(p: &PauliString, psi: &[Complex64]) -> Vec<Complex64> {
        let mut out = psi.to_vec();
        for q in 0..p.len() {
            let kind = match p.get(q) {
                'X' => GateKind::X,
                'Y' => GateKind::Y,
                'Z' => GateKind::Z,
                _ => continue,
            };
            let c = schedule_greedy(1, p.len(), &[Gate::one(kind, (0, q))]).unwrap();
            out = statevector_simulate(&c, &out).unwrap();
        }
        out.iter().map(|z| z * i_pow(p.phase())).collect()
    }

    #[test]
    fn pauli_multiplication() {
        let x = PauliString::from_factors(1, &[(0, 'X')]).unwrap();
        let y = PauliString::from_factors(1, &[(0, 'Y')]).unwrap();
        let z = PauliString::from_factors(1, &[(0, 'Z')]).unwrap();
        assert_eq!(x.mul(&y).unwrap(), z.clone().with_phase(1));
        assert_eq!(y.mul(&x).unwrap(), z.clone().with_phase(3));
        assert_eq!(z.mul(&x).unwrap(), y.clone().with_phase(1));
        assert_eq!(x.mul(&x).unwrap(), PauliString::identity(1));
    }

    #[test]
    fn conjugation_by_inverse_roundtrips() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let kinds = [
            GateKind::Cnot,
            GateKind::Cz,
            GateKind::Fswap,
            GateKind::Swap,
        ];
        let gates: Vec<Gate> = (0..100)
            .map(|_| {
                let r = rng.random_range(0..3);
                let c = rng.random_range(0..2);
                if rng.random_bool(0.5) {
                    Gate::two(kinds[rng.random_range(0..4)], (r, c), (r, c + 1))
                } else {
                    let k = [GateKind::H, GateKind::S, GateKind::Sdg][rng.random_range(0..3)];
                    Gate::one(k, (r, c))
                }
            })
            .collect();
        let circ = schedule_greedy(3, 3, &gates).unwrap();
        let both = circ.inverse().then(&circ).unwrap();
        for _ in 0..50 {
            let f: Vec<(usize, char)> = (0..9)
                .map(|q| (q, ['I', 'X', 'Y', 'Z'][rng.random_range(0..4)]))
                .collect();
            let p = PauliString::from_factors(9, &f).unwrap();
            assert_eq!(conjugate_pauli(&both, &p).unwrap(), p);
        }
    }

    #[test]
    fn majorana_check_identity_and_negative_control() {
        let id = Circuit::empty(2, 2);
        let rep = check_majorana_permutation(&id, &Permutation::identity(4), 2).unwrap();
        assert!(rep.passed());
        // A bare vertical swap between snake positions 0 and 3 is not fermionic.
        let bare = schedule_greedy(2, 2, &[Gate::fswap((0, 0), (1, 0))]).unwrap();
        let p = Permutation::new(vec![3, 1, 2, 0]).unwrap();
        assert!(!check_majorana_permutation(&bare, &p, 2).unwrap().passed());
    }

    #[test]
    fn fidelity_formula() {
        assert_eq!(estimate_fidelity(&Metrics::default(), 1e-3), 1.0);
        let m = Metrics {
            gates: 1,
            ..Metrics::default()
        };
        assert!((estimate_fidelity(&m, 1e-3) - 0.999).abs() < 1e-15);
    }

    #[test]
    fn frame_sampler_noiseless_is_exact() {
        let c = schedule_greedy(
            2,
            2,
            &[Gate::cnot((0, 0), (0, 1)), Gate::fswap((1, 0), (1, 1))],
        )
        .unwrap();
        let est = pauli_frame_sample(&c, &NoiseParams::new(0.0, 1000).unwrap(), 1).unwrap();
        assert_eq!((est.mean, est.stderr), (1.0, 0.0));
    }

    #[test]
    fn frame_sampler_single_cnot() {
        let p = 0.05;
        let c = schedule_greedy(1, 2, &[Gate::cnot((0, 0), (0, 1))]).unwrap();
        let est = pauli_frame_sample(&c, &NoiseParams::new(p, 400_000).unwrap(), 3).unwrap();
        let want = 1.0 - 12.0 / 15.0 * p;
        assert!(
            (est.mean - want).abs() < 5.0 * est.stderr,
            "{est:?} vs {want}"
        );
        // Same seed, same answer.
        let again = pauli_frame_sample(&c, &NoiseParams::new(p, 400_000).unwrap(), 3).unwrap();
        assert_eq!(est, again);
    }

    #[test]
    fn frame_sampler_tracks_analytic_model() {
        // Idle noise on a 2x2 grid with one busy pair.
        let p = 0.02;
        let c = schedule_greedy(
            2,
            2,
            &[Gate::cnot((0, 0), (0, 1)), Gate::cnot((0, 0), (0, 1))],
        )
        .unwrap();
        let m = metrics(&c).unwrap();
        assert_eq!((m.gates, m.idle), (2, 4));
        let est = pauli_frame_sample(&c, &NoiseParams::new(p, 400_000).unwrap(), 5).unwrap();
        // Two of three idle Paulis flip a measured bit.
        let pi = 0.1 * p;
        let per_idle = 1.0 - 2.0 / 3.0 * pi;
        assert!(est.mean < 1.0 && est.mean > 0.9);
        assert!(est.mean <= per_idle.powi(4) + 5.0 * est.stderr);
    }
}
