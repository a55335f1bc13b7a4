//! Row-column-row factorization of grid permutations and odd-even
//! transposition sorting networks.
//!
//! A permutation of grid cells is split into three stages that each move
//! items only inside one line: a row stage, a column stage, then a second
//! row stage. The split comes from coloring the bipartite multigraph
//! (source row -> destination row, one edge per item) with `L` colors; an
//! item's color is the column it visits in between.

use crate::circuit::{schedule_greedy, Cell, Circuit, Gate};
use crate::error::{Error, Result};
use crate::geometry::{snake_cell_unchecked, snake_index_unchecked, Permutation};

/// Three-stage plan. `row_a[r]` maps a column of row `r` to the item's
/// color, `col[c]` maps a row of column `c` to the item's destination row,
/// `row_b[r]` maps a color to the destination column inside row `r`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RcrPlan {
    pub side: usize,
    pub row_a: Vec<Permutation>,
    pub col: Vec<Permutation>,
    pub row_b: Vec<Permutation>,
}

impl RcrPlan {
    /// Moves `items[r * L + c]` through the three stages as plain data.
    pub fn apply<T: Clone>(&self, items: &[T]) -> Result<Vec<T>> {
        let l = self.side;
        if items.len() != l * l {
            return Err(Error::LengthMismatch {
                expected: l * l,
                got: items.len(),
            });
        }
        let mut cur = items.to_vec();
        let mut next = cur.clone();
        for r in 0..l {
            for c in 0..l {
                next[r * l + self.row_a[r].get(c)] = cur[r * l + c].clone();
            }
        }
        std::mem::swap(&mut cur, &mut next);
        for c in 0..l {
            for r in 0..l {
                next[self.col[c].get(r) * l + c] = cur[r * l + c].clone();
            }
        }
        std::mem::swap(&mut cur, &mut next);
        for r in 0..l {
            for c in 0..l {
                next[r * l + self.row_b[r].get(c)] = cur[r * l + c].clone();
            }
        }
        Ok(next)
    }

    pub fn is_identity(&self) -> bool {
        self.row_a
            .iter()
            .chain(&self.col)
            .chain(&self.row_b)
            .all(Permutation::is_identity)
    }
}

/// Plans a mode permutation given on snake indices.
pub fn hall_rcr_plan(perm: &Permutation, side: usize) -> Result<RcrPlan> {
    let n = side * side;
    if perm.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: perm.len(),
        });
    }
    let mut dest = vec![(0, 0); n];
    for j in 0..n {
        let (r, c) = snake_cell_unchecked(j, side);
        dest[r * side + c] = snake_cell_unchecked(perm.get(j), side);
    }
    plan_cells(&dest, side)
}

/// Plans a cell permutation: the item on cell `r * L + c` goes to `dest[r * L + c]`.
pub fn plan_cells(dest: &[Cell], side: usize) -> Result<RcrPlan> {
    let n = side * side;
    if dest.len() != n || side == 0 {
        return Err(Error::LengthMismatch {
            expected: n,
            got: dest.len(),
        });
    }
    let mut seen = vec![false; n];
    for &(r, c) in dest {
        if r >= side || c >= side || seen[r * side + c] {
            return Err(Error::InvalidPermutation(format!(
                "cell ({r}, {c}) repeated or out of range"
            )));
        }
        seen[r * side + c] = true;
    }

    let keeps_rows = (0..n).all(|i| dest[i].0 == i / side);
    let keeps_cols = (0..n).all(|i| dest[i].1 == i % side);
    let color: Vec<usize> = if keeps_rows || keeps_cols {
        (0..n).map(|i| i % side).collect()
    } else {
        // Edge i joins source row i / L to destination row dest[i].0; edges
        // stay in source-cell order so the coloring is deterministic.
        let ends: Vec<(usize, usize)> = (0..n).map(|i| (i / side, dest[i].0)).collect();
        let raw = color_regular_bipartite(&ends, side);
        relabel_toward_columns(&raw, side)
    };

    let mut row_a = vec![vec![0; side]; side];
    let mut col = vec![vec![0; side]; side];
    let mut row_b = vec![vec![0; side]; side];
    for i in 0..n {
        let (r, c) = (i / side, i % side);
        let k = color[i];
        let (dr, dc) = dest[i];
        row_a[r][c] = k;
        col[k][r] = dr;
        row_b[dr][k] = dc;
    }
    let wrap = |v: Vec<Vec<usize>>| -> Result<Vec<Permutation>> {
        v.into_iter().map(Permutation::new).collect()
    };
    Ok(RcrPlan {
        side,
        row_a: wrap(row_a)?,
        col: wrap(col)?,
        row_b: wrap(row_b)?,
    })
}

/// Proper edge coloring of a `d`-regular bipartite multigraph on `side + side`
/// vertices with `d = edges / side` colors.
fn color_regular_bipartite(ends: &[(usize, usize)], side: usize) -> Vec<usize> {
    let mut color = vec![0; ends.len()];
    let all: Vec<usize> = (0..ends.len()).collect();
    let degree = ends.len() / side;
    split_colors(ends, side, all, degree, 0, &mut color);
    color
}

fn split_colors(
    ends: &[(usize, usize)],
    side: usize,
    edges: Vec<usize>,
    degree: usize,
    base: usize,
    color: &mut [usize],
) {
    if degree == 0 {
        return;
    }
    if degree == 1 {
        for e in edges {
            color[e] = base;
        }
        return;
    }
    if degree % 2 == 1 {
        let matched = perfect_matching(ends, side, &edges);
        let mut in_match = vec![false; ends.len()];
        for &e in &matched {
            in_match[e] = true;
            color[e] = base;
        }
        let rest = edges.into_iter().filter(|&e| !in_match[e]).collect();
        split_colors(ends, side, rest, degree - 1, base + 1, color);
        return;
    }
    let (a, b) = euler_split(ends, side, &edges);
    split_colors(ends, side, a, degree / 2, base, color);
    split_colors(ends, side, b, degree / 2, base + degree / 2, color);
}

/// Orients closed trails and keeps left-to-right edges in the first half.
/// Every pass through a vertex uses one edge of each half.
fn euler_split(ends: &[(usize, usize)], side: usize, edges: &[usize]) -> (Vec<usize>, Vec<usize>) {
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); 2 * side];
    for &e in edges {
        let (u, v) = ends[e];
        adj[u].push(e);
        adj[side + v].push(e);
    }
    let mut ptr = vec![0usize; 2 * side];
    let mut used = vec![false; ends.len()];
    let (mut a, mut b) = (Vec::new(), Vec::new());
    for start in 0..2 * side {
        loop {
            while ptr[start] < adj[start].len() && used[adj[start][ptr[start]]] {
                ptr[start] += 1;
            }
            if ptr[start] == adj[start].len() {
                break;
            }
            let mut v = start;
            loop {
                while ptr[v] < adj[v].len() && used[adj[v][ptr[v]]] {
                    ptr[v] += 1;
                }
                if ptr[v] == adj[v].len() {
                    break;
                }
                let e = adj[v][ptr[v]];
                used[e] = true;
                let (u, w) = ends[e];
                if v < side {
                    a.push(e);
                    v = side + w;
                } else {
                    b.push(e);
                    v = u;
                }
            }
            debug_assert_eq!(v, start, "even degrees close every trail");
        }
    }
    a.sort_unstable();
    b.sort_unstable();
    (a, b)
}

/// Augmenting-path perfect matching; regular bipartite graphs always have one.
fn perfect_matching(ends: &[(usize, usize)], side: usize, edges: &[usize]) -> Vec<usize> {
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); side];
    for &e in edges {
        adj[ends[e].0].push(e);
    }
    let mut match_right: Vec<Option<usize>> = vec![None; side];
    for u in 0..side {
        let mut seen = vec![false; side];
        let ok = augment(u, ends, &adj, &mut match_right, &mut seen);
        assert!(
            ok,
            "regular bipartite multigraph must have a perfect matching"
        );
    }
    let mut out: Vec<usize> = match_right
        .into_iter()
        .map(|e| e.expect("matched"))
        .collect();
    out.sort_unstable();
    out
}

fn augment(
    u: usize,
    ends: &[(usize, usize)],
    adj: &[Vec<usize>],
    match_right: &mut [Option<usize>],
    seen: &mut [bool],
) -> bool {
    for &e in &adj[u] {
        let v = ends[e].1;
        if seen[v] {
            continue;
        }
        seen[v] = true;
        let free = match match_right[v] {
            None => true,
            Some(prev) => augment(ends[prev].0, ends, adj, match_right, seen),
        };
        if free {
            match_right[v] = Some(e);
            return true;
        }
    }
    false
}

/// Renames color classes so that as many items as possible keep their column.
fn relabel_toward_columns(raw: &[usize], side: usize) -> Vec<usize> {
    let mut score = vec![vec![0usize; side]; side];
    for (i, &k) in raw.iter().enumerate() {
        score[k][i % side] += 1;
    }
    let mut cand: Vec<(usize, usize, usize)> = Vec::with_capacity(side * side);
    for (k, row) in score.iter().enumerate() {
        for (c, &s) in row.iter().enumerate() {
            cand.push((s, k, c));
        }
    }
    cand.sort_by(|x, y| y.0.cmp(&x.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)));
    let mut label = vec![usize::MAX; side];
    let mut taken = vec![false; side];
    for (_, k, c) in cand {
        if label[k] == usize::MAX && !taken[c] {
            label[k] = c;
            taken[c] = true;
        }
    }
    raw.iter().map(|&k| label[k]).collect()
}

/// Odd-even transposition rounds; round `t` compares pairs starting at `t % 2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OetSchedule {
    pub n: usize,
    pub rounds: Vec<Vec<(usize, usize)>>,
}

impl OetSchedule {
    /// Replays the swaps on `items`.
    pub fn apply<T>(&self, items: &mut [T]) {
        for round in &self.rounds {
            for &(i, j) in round {
                items.swap(i, j);
            }
        }
    }

    pub fn swap_count(&self) -> usize {
        self.rounds.iter().map(Vec::len).sum()
    }
}

/// `targets[i]` is the final position of the item now at `i`. Comparators
/// swap only when the pair is out of order, so sorted input yields no rounds.
pub fn oet_schedule(targets: &[usize]) -> Result<OetSchedule> {
    let n = targets.len();
    Permutation::new(targets.to_vec())?;
    let mut arr = targets.to_vec();
    let mut rounds = Vec::new();
    let mut last_nonempty = 0;
    for t in 0..n {
        let mut round = Vec::new();
        let mut i = t % 2;
        while i + 1 < n {
            if arr[i] > arr[i + 1] {
                arr.swap(i, i + 1);
                round.push((i, i + 1));
            }
            i += 2;
        }
        if !round.is_empty() {
            last_nonempty = t + 1;
        }
        rounds.push(round);
    }
    rounds.truncate(last_nonempty);
    debug_assert!(arr.windows(2).all(|w| w[0] < w[1]));
    Ok(OetSchedule { n, rounds })
}

/// Which two-qubit gate realizes one comparator swap.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SwapKind {
    /// FSWAP; moves occupations and picks up the exchange sign.
    Fermionic,
    /// SWAP; plain qubit relabeling.
    Plain,
}

impl SwapKind {
    fn gate(self, a: Cell, b: Cell) -> Gate {
        match self {
            SwapKind::Fermionic => Gate::fswap(a, b),
            SwapKind::Plain => Gate::swap(a, b),
        }
    }
}

/// Sorts several disjoint lines in lockstep: round `t` of every line is
/// emitted before round `t + 1` of any line.
pub fn parallel_line_sorts(lines: &[(Vec<Cell>, Vec<usize>)], kind: SwapKind) -> Result<Vec<Gate>> {
    let schedules: Vec<OetSchedule> = lines
        .iter()
        .map(|(cells, targets)| {
            if cells.len() != targets.len() {
                return Err(Error::LengthMismatch {
                    expected: cells.len(),
                    got: targets.len(),
                });
            }
            oet_schedule(targets)
        })
        .collect::<Result<_>>()?;
    let depth = schedules.iter().map(|s| s.rounds.len()).max().unwrap_or(0);
    let mut gates = Vec::new();
    for t in 0..depth {
        for ((cells, _), sched) in lines.iter().zip(&schedules) {
            if let Some(round) = sched.rounds.get(t) {
                gates.extend(round.iter().map(|&(i, j)| kind.gate(cells[i], cells[j])));
            }
        }
    }
    Ok(gates)
}

fn check_stage(stage: &[Permutation], side: usize) -> Result<()> {
    if stage.len() != side || stage.iter().any(|p| p.len() != side) {
        return Err(Error::CrossLine(format!(
            "stage shape does not match side {side}"
        )));
    }
    Ok(())
}

/// All rows sorted in parallel; `stage[r]` maps columns of row `r`.
pub fn row_stage_gates(stage: &[Permutation], side: usize, kind: SwapKind) -> Result<Vec<Gate>> {
    check_stage(stage, side)?;
    let lines: Vec<_> = stage
        .iter()
        .enumerate()
        .map(|(r, p)| ((0..side).map(|c| (r, c)).collect(), p.as_slice().to_vec()))
        .collect();
    parallel_line_sorts(&lines, kind)
}

/// All columns sorted in parallel; `stage[c]` maps rows of column `c`.
pub fn column_stage_gates(stage: &[Permutation], side: usize, kind: SwapKind) -> Result<Vec<Gate>> {
    check_stage(stage, side)?;
    let lines: Vec<_> = stage
        .iter()
        .enumerate()
        .map(|(c, p)| ((0..side).map(|r| (r, c)).collect(), p.as_slice().to_vec()))
        .collect();
    parallel_line_sorts(&lines, kind)
}

pub fn row_stage_circuit(stage: &[Permutation], side: usize) -> Result<Circuit> {
    schedule_greedy(
        side,
        side,
        &row_stage_gates(stage, side, SwapKind::Fermionic)?,
    )
}

/// Bare vertical FSWAPs. These are fermionic only once wrapped in the
/// diagonal sandwich from [`crate::gamma`].
pub fn bare_column_sort_circuit(stage: &[Permutation], side: usize) -> Result<Circuit> {
    schedule_greedy(
        side,
        side,
        &column_stage_gates(stage, side, SwapKind::Fermionic)?,
    )
}

/// FSWAP network along the full snake chain.
pub fn chain_sort_gates(perm: &Permutation, side: usize) -> Result<Vec<Gate>> {
    let n = side * side;
    if perm.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: perm.len(),
        });
    }
    let cells: Vec<Cell> = (0..n).map(|j| snake_cell_unchecked(j, side)).collect();
    parallel_line_sorts(&[(cells, perm.as_slice().to_vec())], SwapKind::Fermionic)
}

pub fn chain_sort_circuit(perm: &Permutation, side: usize) -> Result<Circuit> {
    schedule_greedy(side, side, &chain_sort_gates(perm, side)?)
}

/// Snake index of a cell; handy when building line targets.
pub fn jw(cell: Cell, side: usize) -> usize {
    snake_index_unchecked(cell.0, cell.1, side)
}

/// `true` when the two-qubit gates of a row stage stay inside single rows.
pub fn gates_within_rows(gates: &[Gate]) -> bool {
    gates
        .iter()
        .filter_map(|g| g.b.map(|b| (g.a, b)))
        .all(|(a, b)| a.0 == b.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::metrics;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn check_plan(perm: &Permutation, side: usize) -> RcrPlan {
        let plan = hall_rcr_plan(perm, side).unwrap();
        let labels: Vec<usize> = (0..side * side).collect();
        let moved = plan.apply(&labels).unwrap();
        for j in 0..side * side {
            let (r, c) = snake_cell_unchecked(j, side);
            let (dr, dc) = snake_cell_unchecked(perm.get(j), side);
            assert_eq!(moved[dr * side + dc], r * side + c);
        }
        plan
    }

    #[test]
    fn identity_plan_is_trivial() {
        for side in 1..9 {
            let plan = check_plan(&Permutation::identity(side * side), side);
            assert!(plan.is_identity());
        }
    }

    #[test]
    fn transpose_plans() {
        for side in 2..10 {
            check_plan(&Permutation::transpose(side), side);
        }
    }

    #[test]
    fn random_plans_compose() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for side in [3, 5, 6, 7, 8] {
            for _ in 0..20 {
                check_plan(&Permutation::random(side * side, &mut rng), side);
            }
        }
    }

    #[test]
    fn plan_is_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let p = Permutation::random(64, &mut rng);
        assert_eq!(hall_rcr_plan(&p, 8).unwrap(), hall_rcr_plan(&p, 8).unwrap());
    }

    #[test]
    fn rejects_wrong_length() {
        assert!(hall_rcr_plan(&Permutation::identity(5), 2).is_err());
        assert!(plan_cells(&[(0, 0), (0, 0), (1, 0), (1, 1)], 2).is_err());
    }

    #[test]
    fn oet_examples() {
        let sorted = oet_schedule(&[0, 1, 2, 3]).unwrap();
        assert!(sorted.rounds.iter().all(Vec::is_empty));
        let rev = oet_schedule(&[3, 2, 1, 0]).unwrap();
        assert!(rev.rounds.len() <= 4);
        let mut items = [3, 2, 1, 0];
        rev.apply(&mut items);
        assert_eq!(items, [0, 1, 2, 3]);
        assert!(oet_schedule(&[0, 0]).is_err());
    }

    #[test]
    fn oet_moves_items_to_targets() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let p = Permutation::random(17, &mut rng);
        let sched = oet_schedule(p.as_slice()).unwrap();
        let mut items: Vec<usize> = (0..17).collect();
        sched.apply(&mut items);
        assert_eq!(items, p.invert().into_vec());
    }

    #[test]
    fn stage_circuits_match_table_depths() {
        let side = 4;
        let rev = vec![Permutation::reversal(side); side];
        let col = bare_column_sort_circuit(&rev, side).unwrap();
        assert!(metrics(&col).unwrap().cnot_depth <= 2 * side);
        let row = row_stage_circuit(&rev, side).unwrap();
        assert!(metrics(&row).unwrap().cnot_depth <= 2 * side);
        assert!(gates_within_rows(&row.gate_list()));
        let chain = chain_sort_circuit(&Permutation::reversal(16), 4).unwrap();
        assert!(metrics(&chain).unwrap().cnot_depth <= 32);
        let id = vec![Permutation::identity(side); side];
        assert!(row_stage_circuit(&id, side).unwrap().is_empty());
    }

    #[test]
    fn column_rounds_touch_disjoint_columns() {
        let side = 6;
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let stage: Vec<_> = (0..side)
            .map(|_| Permutation::random(side, &mut rng))
            .collect();
        let c = bare_column_sort_circuit(&stage, side).unwrap();
        assert!(c.entangling_depth() <= side);
        for g in c.gates() {
            let b = g.b.unwrap();
            assert_eq!(g.a.1, b.1);
            assert_eq!(g.a.0.abs_diff(b.0), 1);
        }
    }

    proptest! {
        #[test]
        fn oet_sorts_within_n_rounds(seed in any::<u64>(), n in 1usize..40) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let p = Permutation::random(n, &mut rng);
            let sched = oet_schedule(p.as_slice()).unwrap();
            prop_assert!(sched.rounds.len() <= n);
            for (t, round) in sched.rounds.iter().enumerate() {
                let mut used = vec![false; n];
                for &(i, j) in round {
                    prop_assert_eq!(j, i + 1);
                    prop_assert_eq!(i % 2, t % 2);
                    prop_assert!(!used[i] && !used[j]);
                    used[i] = true;
                    used[j] = true;
                }
            }
            let mut keys = p.as_slice().to_vec();
            sched.apply(&mut keys);
            prop_assert!(keys.windows(2).all(|w| w[0] < w[1]));
        }

        #[test]
        fn plans_compose_for_random_sizes(seed in any::<u64>(), side in 1usize..12) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            check_plan(&Permutation::random(side * side, &mut rng), side);
        }
    }
}
