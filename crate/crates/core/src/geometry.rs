//! Grid geometry, mode permutations, snake ordering and the Hilbert curve.

use rand::Rng;

use crate::error::{Error, Result};

/// Square grid of `side * side` qubits, one fermionic mode per cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GridSpec {
    side: usize,
}

impl GridSpec {
    pub fn new(side: usize) -> Result<Self> {
        if side == 0 {
            return Err(Error::InvalidSize("grid side must be at least 1".into()));
        }
        Ok(Self { side })
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn modes(&self) -> usize {
        self.side * self.side
    }
}

/// Position of cell `(r, c)` along the boustrophedon chain.
pub fn snake_index(r: usize, c: usize, side: usize) -> Result<usize> {
    if r >= side || c >= side {
        return Err(Error::OutOfRange(format!("({r}, {c}) on side {side}")));
    }
    Ok(snake_index_unchecked(r, c, side))
}

#[inline]
pub(crate) fn snake_index_unchecked(r: usize, c: usize, side: usize) -> usize {
    if r.is_multiple_of(2) {
        r * side + c
    } else {
        r * side + (side - 1 - c)
    }
}

/// Inverse of [`snake_index`].
pub fn snake_cell(j: usize, side: usize) -> Result<(usize, usize)> {
    if j >= side * side {
        return Err(Error::OutOfRange(format!("index {j} on side {side}")));
    }
    Ok(snake_cell_unchecked(j, side))
}

#[inline]
pub(crate) fn snake_cell_unchecked(j: usize, side: usize) -> (usize, usize) {
    let r = j / side;
    let off = j % side;
    if r.is_multiple_of(2) {
        (r, off)
    } else {
        (r, side - 1 - off)
    }
}

/// Dense bijection on `0..n`; `map[i]` is where item `i` goes.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Permutation {
    map: Vec<usize>,
}

impl Permutation {
    pub fn new(map: Vec<usize>) -> Result<Self> {
        let n = map.len();
        let mut seen = vec![false; n];
        for &v in &map {
            if v >= n || seen[v] {
                return Err(Error::InvalidPermutation(format!(
                    "value {v} repeated or out of range for length {n}"
                )));
            }
            seen[v] = true;
        }
        Ok(Self { map })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            map: (0..n).collect(),
        }
    }

    pub fn reversal(n: usize) -> Self {
        Self {
            map: (0..n).rev().collect(),
        }
    }

    /// Matrix transpose of the grid, expressed on snake indices.
    pub fn transpose(side: usize) -> Self {
        let n = side * side;
        let mut map = vec![0; n];
        for (j, slot) in map.iter_mut().enumerate() {
            let (r, c) = snake_cell_unchecked(j, side);
            *slot = snake_index_unchecked(c, r, side);
        }
        Self { map }
    }

    /// Uniform sample via Fisher-Yates.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut map: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            let j = rng.random_range(0..=i);
            map.swap(i, j);
        }
        Self { map }
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    #[inline]
    pub fn get(&self, i: usize) -> usize {
        self.map[i]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.map
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.map
    }

    pub fn is_identity(&self) -> bool {
        self.map.iter().enumerate().all(|(i, &v)| i == v)
    }

    /// `(self ∘ other)(i) = self(other(i))`.
    pub fn compose(&self, other: &Permutation) -> Result<Permutation> {
        if self.len() != other.len() {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                got: other.len(),
            });
        }
        Ok(Permutation {
            map: other.map.iter().map(|&j| self.map[j]).collect(),
        })
    }

    pub fn invert(&self) -> Permutation {
        let mut inv = vec![0; self.len()];
        for (i, &v) in self.map.iter().enumerate() {
            inv[v] = i;
        }
        Permutation { map: inv }
    }

    /// Moves `items[i]` to slot `self(i)`.
    pub fn apply<T: Clone>(&self, items: &[T]) -> Result<Vec<T>> {
        if items.len() != self.len() {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                got: items.len(),
            });
        }
        let mut out = items.to_vec();
        for (i, item) in items.iter().enumerate() {
            out[self.map[i]] = item.clone();
        }
        Ok(out)
    }
}

/// Pairs `(i, j)` with `i < j` and `π(i) > π(j)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InversionSet {
    pairs: Vec<(usize, usize)>,
}

impl InversionSet {
    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.pairs.binary_search(&(i, j)).is_ok()
    }
}

/// Sorted lexicographically.
pub fn inversion_set(perm: &Permutation) -> InversionSet {
    let m = perm.as_slice();
    let mut pairs = Vec::new();
    for i in 0..m.len() {
        for j in i + 1..m.len() {
            if m[i] > m[j] {
                pairs.push((i, j));
            }
        }
    }
    InversionSet { pairs }
}

/// Hilbert curve over a `2^floor(k/2)` row by `2^ceil(k/2)` column rectangle.
///
/// Even orders use the classic square recursion starting at the top-left
/// corner and ending at the top-right corner. Odd orders place two copies of
/// the `k - 1` square side by side, so the first half ends next to where the
/// second half starts.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HilbertCurve {
    order: u32,
}

impl HilbertCurve {
    pub fn new(order: u32) -> Result<Self> {
        if order > 40 {
            return Err(Error::InvalidSize(format!(
                "Hilbert order {order} too large"
            )));
        }
        Ok(Self { order })
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn len(&self) -> usize {
        1usize << self.order
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn rows(&self) -> usize {
        1usize << (self.order / 2)
    }

    pub fn cols(&self) -> usize {
        1usize << self.order.div_ceil(2)
    }

    fn square_side(&self) -> usize {
        1usize << (self.order / 2)
    }

    pub fn index_to_cell(&self, i: usize) -> Result<(usize, usize)> {
        if i >= self.len() {
            return Err(Error::OutOfRange(format!(
                "Hilbert index {i} for order {}",
                self.order
            )));
        }
        let side = self.square_side();
        let sq = side * side;
        let (block, d) = (i / sq, i % sq);
        let (x, y) = square_d2xy(side, d);
        Ok((y, x + block * side))
    }

    pub fn cell_to_index(&self, r: usize, c: usize) -> Result<usize> {
        if r >= self.rows() || c >= self.cols() {
            return Err(Error::OutOfRange(format!(
                "cell ({r}, {c}) for Hilbert order {}",
                self.order
            )));
        }
        let side = self.square_side();
        let block = c / side;
        Ok(block * side * side + square_xy2d(side, c % side, r))
    }
}

fn rotate_quadrant(s: usize, x: &mut usize, y: &mut usize, rx: usize, ry: usize) {
    if ry == 0 {
        if rx == 1 {
            *x = s - 1 - *x;
            *y = s - 1 - *y;
        }
        std::mem::swap(x, y);
    }
}

fn square_d2xy(side: usize, d: usize) -> (usize, usize) {
    let (mut x, mut y) = (0, 0);
    let mut t = d;
    let mut s = 1;
    while s < side {
        let rx = 1 & (t / 2);
        let ry = 1 & (t ^ rx);
        rotate_quadrant(s, &mut x, &mut y, rx, ry);
        x += s * rx;
        y += s * ry;
        t /= 4;
        s *= 2;
    }
    (x, y)
}

fn square_xy2d(side: usize, mut x: usize, mut y: usize) -> usize {
    let mut d = 0;
    let mut s = side / 2;
    while s > 0 {
        let rx = usize::from(x & s > 0);
        let ry = usize::from(y & s > 0);
        d += s * s * ((3 * rx) ^ ry);
        rotate_quadrant(side, &mut x, &mut y, rx, ry);
        s /= 2;
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn snake_examples() {
        assert_eq!(snake_index(0, 0, 4).unwrap(), 0);
        assert_eq!(snake_index(1, 2, 4).unwrap(), 5);
        assert_eq!(snake_index(2, 3, 4).unwrap(), 11);
        assert!(snake_index(4, 0, 4).is_err());
        assert!(snake_cell(16, 4).is_err());
    }

    #[test]
    fn snake_roundtrip_exhaustive() {
        for side in 1..=64 {
            for r in 0..side {
                for c in 0..side {
                    let j = snake_index(r, c, side).unwrap();
                    assert_eq!(snake_cell(j, side).unwrap(), (r, c));
                }
            }
        }
    }

    #[test]
    fn snake_neighbor_distances() {
        for side in 2..=12 {
            for r in 0..side {
                for c in 0..side {
                    let j = snake_index(r, c, side).unwrap() as i64;
                    if c + 1 < side {
                        let k = snake_index(r, c + 1, side).unwrap() as i64;
                        assert_eq!((j - k).abs(), 1);
                    }
                    if r + 1 < side {
                        let k = snake_index(r + 1, c, side).unwrap() as i64;
                        let gap = (k - j) as usize;
                        assert_eq!(gap % 2, 1);
                        assert!(gap < 2 * side);
                    }
                }
            }
        }
    }

    #[test]
    fn inversion_examples() {
        assert!(inversion_set(&Permutation::identity(5)).is_empty());
        let p = Permutation::new(vec![1, 0, 2]).unwrap();
        assert_eq!(inversion_set(&p).pairs(), &[(0, 1)]);
        assert_eq!(
            inversion_set(&Permutation::reversal(3)).pairs(),
            &[(0, 1), (0, 2), (1, 2)]
        );
        assert_eq!(inversion_set(&Permutation::reversal(9)).len(), 36);
    }

    #[test]
    fn compose_examples() {
        let p = Permutation::new(vec![1, 0, 2]).unwrap();
        let q = Permutation::new(vec![0, 2, 1]).unwrap();
        assert_eq!(p.compose(&q).unwrap().as_slice(), &[1, 2, 0]);
        assert_eq!(p.compose(&Permutation::identity(3)).unwrap(), p);
        assert!(q.compose(&q.invert()).unwrap().is_identity());
        assert!(p.compose(&Permutation::identity(4)).is_err());
        assert!(Permutation::new(vec![0, 0]).is_err());
        assert!(Permutation::new(vec![2, 0]).is_err());
    }

    #[test]
    fn transpose_is_involution() {
        for side in 1..8 {
            let t = Permutation::transpose(side);
            assert!(t.compose(&t).unwrap().is_identity());
        }
    }

    #[test]
    fn hilbert_small_orders() {
        let h0 = HilbertCurve::new(0).unwrap();
        assert_eq!(h0.index_to_cell(0).unwrap(), (0, 0));
        let h2 = HilbertCurve::new(2).unwrap();
        let cells: Vec<_> = (0..4).map(|i| h2.index_to_cell(i).unwrap()).collect();
        for w in cells.windows(2) {
            assert!(adjacent(w[0], w[1]));
        }
        let h4 = HilbertCurve::new(4).unwrap();
        let quad: Vec<_> = (0..4).map(|i| h4.index_to_cell(i).unwrap()).collect();
        let (r0, r1, c0, c1) = bbox(&quad);
        assert_eq!((r1 - r0 + 1) * (c1 - c0 + 1), 4);
    }

    fn adjacent(a: (usize, usize), b: (usize, usize)) -> bool {
        a.0.abs_diff(b.0) + a.1.abs_diff(b.1) == 1
    }

    fn bbox(cells: &[(usize, usize)]) -> (usize, usize, usize, usize) {
        let r0 = cells.iter().map(|c| c.0).min().unwrap();
        let r1 = cells.iter().map(|c| c.0).max().unwrap();
        let c0 = cells.iter().map(|c| c.1).min().unwrap();
        let c1 = cells.iter().map(|c| c.1).max().unwrap();
        (r0, r1, c0, c1)
    }

    #[test]
    fn hilbert_bijection_and_adjacency() {
        for k in 0..=12u32 {
            let h = HilbertCurve::new(k).unwrap();
            assert_eq!(h.rows() * h.cols(), h.len());
            let mut seen = vec![false; h.len()];
            let mut prev = None;
            for i in 0..h.len() {
                let (r, c) = h.index_to_cell(i).unwrap();
                assert_eq!(h.cell_to_index(r, c).unwrap(), i);
                let id = r * h.cols() + c;
                assert!(!seen[id]);
                seen[id] = true;
                if let Some(p) = prev {
                    assert!(adjacent(p, (r, c)), "order {k} index {i}");
                }
                prev = Some((r, c));
            }
            assert!(h.index_to_cell(h.len()).is_err());
        }
    }

    #[test]
    fn hilbert_dyadic_rectangles() {
        for k in 0..=10u32 {
            let h = HilbertCurve::new(k).unwrap();
            for q in 0..=k {
                let size = 1usize << q;
                for start in (0..h.len()).step_by(size) {
                    let cells: Vec<_> = (start..start + size)
                        .map(|i| h.index_to_cell(i).unwrap())
                        .collect();
                    let (r0, r1, c0, c1) = bbox(&cells);
                    let (hgt, wid) = (r1 - r0 + 1, c1 - c0 + 1);
                    assert_eq!(hgt * wid, size);
                    let mut sides = [hgt, wid];
                    sides.sort();
                    assert_eq!(sides, [1 << (q / 2), 1 << q.div_ceil(2)]);
                }
            }
        }
    }

    proptest! {
        #[test]
        fn compose_with_inverse_is_identity(seed in any::<u64>(), n in 1usize..60) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let p = Permutation::random(n, &mut rng);
            prop_assert!(p.compose(&p.invert()).unwrap().is_identity());
            prop_assert!(p.invert().compose(&p).unwrap().is_identity());
        }

        #[test]
        fn inversion_count_matches_double_loop(seed in any::<u64>(), n in 1usize..40) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let p = Permutation::random(n, &mut rng);
            let mut count = 0;
            for i in 0..n {
                for j in 0..n {
                    if i < j && p.get(i) > p.get(j) {
                        count += 1;
                    }
                }
            }
            let inv = inversion_set(&p);
            prop_assert_eq!(inv.len(), count);
            for &(i, j) in inv.pairs() {
                prop_assert!(inv.contains(i, j));
            }
        }
    }
}
