//! Fermionic permutation compiler: row sort, sandwich, bare column sort,
//! sandwich, row sort. Also the snake-chain baseline and closed-form cost
//! models of the comparison methods.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::{metrics, schedule_greedy, Circuit, Gate, Metrics};
use crate::error::{Error, Result};
use crate::gamma::gamma_steps;
use crate::geometry::Permutation;
use crate::planner::{
    chain_sort_gates, column_stage_gates, hall_rcr_plan, row_stage_gates, SwapKind,
};
use crate::verify::estimate_fidelity;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Row-column-row with the ancilla-free sandwich.
    Ours,
    /// FSWAP sort along the snake chain.
    OnedFswap,
}

impl Method {
    pub fn label(&self) -> &'static str {
        match self {
            Method::Ours => "ours",
            Method::OnedFswap => "oned_fswap",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ours" => Ok(Method::Ours),
            "oned_fswap" | "1d" | "oned" => Ok(Method::OnedFswap),
            other => Err(Error::Parse(format!("unknown method {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FermPermJob {
    pub perm: Permutation,
    pub side: usize,
    pub method: Method,
    pub seed_tag: Option<u64>,
}

impl FermPermJob {
    pub fn compile(&self) -> Result<Circuit> {
        let c = match self.method {
            Method::Ours => compile_fperm(&self.perm, self.side)?,
            Method::OnedFswap => compile_fperm_1d(&self.perm, self.side)?,
        };
        Ok(match self.seed_tag {
            Some(s) => c.with_tag("seed", s),
            None => c,
        })
    }
}

fn check_job(perm: &Permutation, side: usize) -> Result<()> {
    if side < 2 {
        return Err(Error::InvalidSize(format!("side {side} < 2")));
    }
    if perm.len() != side * side {
        return Err(Error::LengthMismatch {
            expected: side * side,
            got: perm.len(),
        });
    }
    Ok(())
}

/// Gate list of the full pipeline, in program order.
pub fn fperm_gates(perm: &Permutation, side: usize) -> Result<Vec<Gate>> {
    check_job(perm, side)?;
    let plan = hall_rcr_plan(perm, side)?;
    let gamma: Vec<Gate> = gamma_steps(side)?.concat();
    let mut gates = row_stage_gates(&plan.row_a, side, SwapKind::Fermionic)?;
    gates.extend_from_slice(&gamma);
    gates.extend(column_stage_gates(&plan.col, side, SwapKind::Fermionic)?);
    gates.extend_from_slice(&gamma);
    gates.extend(row_stage_gates(&plan.row_b, side, SwapKind::Fermionic)?);
    Ok(gates)
}

/// Ancilla-free fermionic permutation on an `side x side` grid. The mode on
/// snake position `j` ends on snake position `perm(j)`.
pub fn compile_fperm(perm: &Permutation, side: usize) -> Result<Circuit> {
    Ok(schedule_greedy(side, side, &fperm_gates(perm, side)?)?.with_tag("method", "ours"))
}

/// Odd-even transposition sort of FSWAPs along the snake.
pub fn compile_fperm_1d(perm: &Permutation, side: usize) -> Result<Circuit> {
    if perm.len() != side * side {
        return Err(Error::LengthMismatch {
            expected: side * side,
            got: perm.len(),
        });
    }
    Ok(schedule_greedy(side, side, &chain_sort_gates(perm, side)?)?
        .with_tag("method", "oned_fswap"))
}

/// Comparison methods with closed-form costs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CostMethod {
    Ours,
    OnedFswap,
    AncillaGamma,
    Reconf2dnn,
    Staircase2dnn,
}

impl CostMethod {
    pub const ALL: [CostMethod; 5] = [
        CostMethod::OnedFswap,
        CostMethod::AncillaGamma,
        CostMethod::Ours,
        CostMethod::Reconf2dnn,
        CostMethod::Staircase2dnn,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            CostMethod::Ours => "ours",
            CostMethod::OnedFswap => "oned_fswap",
            CostMethod::AncillaGamma => "ancilla_gamma",
            CostMethod::Reconf2dnn => "reconf_2dnn",
            CostMethod::Staircase2dnn => "staircase_2dnn",
        }
    }

    /// Asymptotic two-qubit gate count, as a display string.
    pub fn gate_order(&self) -> &'static str {
        match self {
            CostMethod::Ours | CostMethod::AncillaGamma => "O(N^1.5)",
            CostMethod::OnedFswap => "O(N^2)",
            CostMethod::Reconf2dnn => "O(N^1.5 log N)",
            CostMethod::Staircase2dnn => "O(N^1.5 log^2 N)",
        }
    }

    fn needs_power_of_two(&self) -> bool {
        matches!(self, CostMethod::Reconf2dnn | CostMethod::Staircase2dnn)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostRow {
    pub method: CostMethod,
    pub side: u64,
    pub depth: i64,
    pub ancillas: u64,
    pub qubits: u64,
}

/// Worst-case merge constant of the reconfigurable compilation.
pub const RECONF_KAPPA: i64 = 17;

/// Closed-form depth, ancillas and qubits at side `L`. The two grid-compiled
/// models assume `L` is a power of two.
pub fn cost_model(method: CostMethod, side: u64) -> Result<CostRow> {
    if side == 0 {
        return Err(Error::InvalidSize("side 0".into()));
    }
    if method.needs_power_of_two() && !side.is_power_of_two() {
        return Err(Error::InvalidSize(format!(
            "{} needs a power-of-two side, got {side}",
            method.label()
        )));
    }
    let l = side as i64;
    let n = side * side;
    let lg = i64::from(side.trailing_zeros());
    let (depth, ancillas, qubits) = match method {
        CostMethod::Ours => (22 * l + 20, 0, n),
        CostMethod::OnedFswap => (2 * n as i64, 0, n),
        CostMethod::AncillaGamma => (32 * l + 8, side, n + side),
        CostMethod::Reconf2dnn => (
            (17 * l + RECONF_KAPPA) * lg + 38 * l - 36,
            n + side,
            2 * n + side,
        ),
        CostMethod::Staircase2dnn => (
            108 * l * lg * lg + 615 * l * lg - 274 * l + 36 * lg * lg - 276 * lg + 276,
            0,
            n,
        ),
    };
    Ok(CostRow {
        method,
        side,
        depth,
        ancillas,
        qubits,
    })
}

/// All five models at a power-of-two side.
pub fn cost_table(side: u64) -> Result<Vec<CostRow>> {
    CostMethod::ALL
        .iter()
        .map(|&m| cost_model(m, side))
        .collect()
}

/// First side where `2 L^2 > 22 L + 20`.
pub fn depth_only_crossover() -> u64 {
    (2..)
        .find(|&l: &u64| 2 * l * l > 22 * l + 20)
        .expect("quadratic overtakes linear")
}

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer.
pub fn splitmix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of instance `index` under base seed `base`.
pub fn instance_seed(base: u64, index: u64) -> u64 {
    splitmix64(base.wrapping_add(index.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)))
}

pub fn random_permutation(n: usize, seed: u64) -> Permutation {
    Permutation::random(n, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// One benchmark instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    pub label: String,
    pub perm: Permutation,
    pub seed: Option<u64>,
}

/// `count` random permutations seeded from `base`.
pub fn random_instances(side: usize, count: usize, base: u64) -> Vec<Instance> {
    (0..count)
        .map(|i| {
            let seed = instance_seed(base, i as u64);
            Instance {
                label: format!("random{i}"),
                perm: random_permutation(side * side, seed),
                seed: Some(seed),
            }
        })
        .collect()
}

/// Reversal, transpose, then `random` seeded instances.
pub fn standard_ensemble(side: usize, random: usize, base: u64) -> Vec<Instance> {
    let mut out = vec![
        Instance {
            label: "reversal".into(),
            perm: Permutation::reversal(side * side),
            seed: None,
        },
        Instance {
            label: "transpose".into(),
            perm: Permutation::transpose(side),
            seed: None,
        },
    ];
    out.extend(random_instances(side, random, base));
    out
}

/// Metrics of every instance under `method`, in input order.
pub fn ensemble_metrics(
    instances: &[Instance],
    side: usize,
    method: Method,
) -> Result<Vec<Metrics>> {
    instances
        .par_iter()
        .map(|inst| {
            let job = FermPermJob {
                perm: inst.perm.clone(),
                side,
                method,
                seed_tag: inst.seed,
            };
            metrics(&job.compile()?)
        })
        .collect()
}

pub fn mean_depth(ms: &[Metrics]) -> f64 {
    ms.iter().map(|m| m.cnot_depth as f64).sum::<f64>() / ms.len().max(1) as f64
}

pub fn mean_fidelity(ms: &[Metrics], p2q: f64) -> f64 {
    ms.iter().map(|m| estimate_fidelity(m, p2q)).sum::<f64>() / ms.len().max(1) as f64
}

/// Per-side comparison used by the crossover scan.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossoverPoint {
    pub side: usize,
    pub ours: f64,
    pub oned: f64,
}

/// Smallest side in `sides` from which the mean analytic fidelity of ours
/// stays above the chain baseline, over `count` random permutations.
pub fn analytic_crossover(
    p2q: f64,
    sides: std::ops::RangeInclusive<usize>,
    count: usize,
    base: u64,
) -> Result<(Option<usize>, Vec<CrossoverPoint>)> {
    if !(0.0..1.0).contains(&p2q) || p2q == 0.0 {
        return Err(Error::InvalidSize(format!("p2q = {p2q} outside (0, 1)")));
    }
    let mut points = Vec::new();
    for side in sides {
        let inst = random_instances(side, count, base ^ side as u64);
        let ours = mean_fidelity(&ensemble_metrics(&inst, side, Method::Ours)?, p2q);
        let oned = mean_fidelity(&ensemble_metrics(&inst, side, Method::OnedFswap)?, p2q);
        points.push(CrossoverPoint { side, ours, oned });
    }
    let mut cross = None;
    for p in points.iter().rev() {
        if p.ours > p.oned {
            cross = Some(p.side);
        } else {
            break;
        }
    }
    Ok((cross, points))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verify::{check_majorana_permutation, matches_fperm_oracle};

    fn basis(n: usize, k: usize) -> Vec<bool> {
        (0..n).map(|i| k >> i & 1 == 1).collect()
    }

    #[test]
    fn identity_nets_to_identity() {
        let c = compile_fperm(&Permutation::identity(9), 3).unwrap();
        for k in 0..512 {
            assert!(matches_fperm_oracle(&c, &Permutation::identity(9), 3, &basis(9, k)).unwrap());
        }
    }

    #[test]
    fn reversal_on_three_by_three() {
        let p = Permutation::reversal(9);
        for c in [
            compile_fperm(&p, 3).unwrap(),
            compile_fperm_1d(&p, 3).unwrap(),
        ] {
            for k in 0..512 {
                assert!(matches_fperm_oracle(&c, &p, 3, &basis(9, k)).unwrap());
            }
        }
    }

    #[test]
    fn random_permutations_pass_majorana_check() {
        for side in [2, 3, 4, 5] {
            for inst in standard_ensemble(side, 5, 77) {
                let c = compile_fperm(&inst.perm, side).unwrap();
                let rep = check_majorana_permutation(&c, &inst.perm, side).unwrap();
                assert!(
                    rep.passed(),
                    "side {side} {}: {:?}",
                    inst.label,
                    rep.failures
                );
            }
        }
    }

    #[test]
    fn dropping_a_sandwich_breaks_it() {
        let side = 4;
        let p = Permutation::transpose(side);
        let plan = hall_rcr_plan(&p, side).unwrap();
        let mut gates = row_stage_gates(&plan.row_a, side, SwapKind::Fermionic).unwrap();
        gates.extend(gamma_steps(side).unwrap().concat());
        gates.extend(column_stage_gates(&plan.col, side, SwapKind::Fermionic).unwrap());
        gates.extend(row_stage_gates(&plan.row_b, side, SwapKind::Fermionic).unwrap());
        let c = schedule_greedy(side, side, &gates).unwrap();
        assert!(!check_majorana_permutation(&c, &p, side).unwrap().passed());
    }

    #[test]
    fn adjacent_transposition_is_one_round() {
        let mut m: Vec<usize> = (0..9).collect();
        m.swap(4, 5);
        let c = compile_fperm_1d(&Permutation::new(m).unwrap(), 3).unwrap();
        assert_eq!(c.entangling_depth(), 1);
        assert_eq!(metrics(&c).unwrap().cnot_depth, 2);
    }

    #[test]
    fn depth_bounds_hold() {
        for side in 2..=10 {
            for inst in standard_ensemble(side, 3, 5) {
                let ours = metrics(&compile_fperm(&inst.perm, side).unwrap()).unwrap();
                assert!(ours.cnot_depth <= 22 * side + 20);
                let oned = metrics(&compile_fperm_1d(&inst.perm, side).unwrap()).unwrap();
                assert!(oned.cnot_depth <= 2 * side * side);
            }
        }
    }

    #[test]
    fn rejects_bad_jobs() {
        assert!(compile_fperm(&Permutation::identity(4), 3).is_err());
        assert!(compile_fperm(&Permutation::identity(1), 1).is_err());
        assert!(compile_fperm_1d(&Permutation::identity(5), 2).is_err());
    }

    #[test]
    fn cost_model_values() {
        assert_eq!(cost_model(CostMethod::Ours, 12).unwrap().depth, 284);
        assert_eq!(cost_model(CostMethod::Reconf2dnn, 4).unwrap().depth, 286);
        assert_eq!(
            cost_model(CostMethod::Staircase2dnn, 4).unwrap().depth,
            5420
        );
        assert_eq!(cost_model(CostMethod::AncillaGamma, 4).unwrap().depth, 136);
        assert_eq!(cost_model(CostMethod::AncillaGamma, 4).unwrap().ancillas, 4);
        assert_eq!(cost_model(CostMethod::OnedFswap, 6).unwrap().depth, 72);
        assert!(cost_model(CostMethod::Reconf2dnn, 6).is_err());
        assert!(cost_model(CostMethod::Ours, 6).is_ok());
        assert_eq!(cost_table(8).unwrap().len(), 5);
        assert_eq!(depth_only_crossover(), 12);
    }

    #[test]
    fn seeds_are_stable_and_distinct() {
        assert_eq!(instance_seed(1, 0), instance_seed(1, 0));
        assert_ne!(instance_seed(1, 0), instance_seed(1, 1));
        assert_ne!(instance_seed(1, 0), instance_seed(2, 0));
        assert_eq!(random_permutation(20, 9), random_permutation(20, 9));
    }
}
