//! Exact linear algebra over an abstract field.
//!
//! Provides:
//! - `FieldElem`: the minimal field interface (implemented for `Rat` and
//!   `LaurentFrac`).
//! - Row reduction, rank, kernel bases and matrix inverses, all exact.
//! - `SparseRowSpace`: an incrementally built row-reduced span over sparsely
//!   keyed vectors, used for closure computations.
//! - `symmetric_inertia`: congruence diagonalization of an exact symmetric
//!   rational matrix, reporting signature and an explicit vector certifying
//!   the first negative diagonal value found.

use crate::scalars::{LaurentFrac, Rat};
use num::{One, Signed, Zero};
use std::collections::BTreeMap;

/// Minimal exact-field interface on top of the standard zero/one traits.
pub trait FieldElem: Clone + PartialEq + std::fmt::Debug + Zero + One {
    fn add_ref(&self, o: &Self) -> Self;
    fn sub_ref(&self, o: &Self) -> Self;
    fn mul_ref(&self, o: &Self) -> Self;
    /// Division; caller guarantees the divisor is nonzero.
    fn div_ref(&self, o: &Self) -> Self;
    fn neg_ref(&self) -> Self;
}

impl FieldElem for Rat {
    fn add_ref(&self, o: &Self) -> Self {
        self + o
    }
    fn sub_ref(&self, o: &Self) -> Self {
        self - o
    }
    fn mul_ref(&self, o: &Self) -> Self {
        self * o
    }
    fn div_ref(&self, o: &Self) -> Self {
        self / o
    }
    fn neg_ref(&self) -> Self {
        -self
    }
}

impl FieldElem for LaurentFrac {
    fn add_ref(&self, o: &Self) -> Self {
        LaurentFrac::add(self, o)
    }
    fn sub_ref(&self, o: &Self) -> Self {
        LaurentFrac::sub(self, o)
    }
    fn mul_ref(&self, o: &Self) -> Self {
        LaurentFrac::mul(self, o)
    }
    fn div_ref(&self, o: &Self) -> Self {
        LaurentFrac::div(self, o).expect("nonzero divisor")
    }
    fn neg_ref(&self) -> Self {
        LaurentFrac::neg(self)
    }
}

/// In-place reduced row echelon form; returns the pivot columns in order.
pub fn rref<F: FieldElem>(mat: &mut Vec<Vec<F>>) -> Vec<usize> {
    let rows = mat.len();
    if rows == 0 {
        return vec![];
    }
    let cols = mat[0].len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        // Find a pivot row at or below r.
        let Some(p) = (r..rows).find(|&i| !mat[i][c].is_zero()) else {
            continue;
        };
        mat.swap(r, p);
        let inv = F::one().div_ref(&mat[r][c]);
        for x in mat[r].iter_mut() {
            *x = x.mul_ref(&inv);
        }
        for i in 0..rows {
            if i != r && !mat[i][c].is_zero() {
                let f = mat[i][c].clone();
                for j in 0..cols {
                    let s = mat[r][j].mul_ref(&f);
                    mat[i][j] = mat[i][j].sub_ref(&s);
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    pivots
}

/// Rank of a dense matrix.
pub fn rank<F: FieldElem>(mat: &[Vec<F>]) -> usize {
    let mut m: Vec<Vec<F>> = mat.to_vec();
    rref(&mut m).len()
}

/// Basis of the right kernel of `mat` (viewing rows as equations over `cols`
/// unknowns).
pub fn kernel_basis<F: FieldElem>(mat: &[Vec<F>], cols: usize) -> Vec<Vec<F>> {
    let mut m: Vec<Vec<F>> = mat.to_vec();
    let pivots = rref(&mut m);
    let pivot_set: std::collections::BTreeSet<usize> = pivots.iter().copied().collect();
    let mut basis = Vec::new();
    for free in 0..cols {
        if pivot_set.contains(&free) {
            continue;
        }
        let mut v = vec![F::zero(); cols];
        v[free] = F::one();
        for (r, &pc) in pivots.iter().enumerate() {
            v[pc] = m[r][free].neg_ref();
        }
        basis.push(v);
    }
    basis
}

/// Inverse of a square matrix, or `None` if singular.
pub fn invert<F: FieldElem>(mat: &[Vec<F>]) -> Option<Vec<Vec<F>>> {
    let n = mat.len();
    let mut aug: Vec<Vec<F>> = Vec::with_capacity(n);
    for (i, row) in mat.iter().enumerate() {
        assert_eq!(row.len(), n, "square matrix required");
        let mut r = row.clone();
        for j in 0..n {
            r.push(if i == j { F::one() } else { F::zero() });
        }
        aug.push(r);
    }
    let pivots = rref(&mut aug);
    // Invertible iff the left block supplies all n pivots.
    if pivots.len() < n || pivots[n - 1] >= n {
        return None;
    }
    Some(aug.into_iter().map(|row| row[n..].to_vec()).collect())
}

/// Matrix product of dense matrices.
pub fn mat_mul<F: FieldElem>(a: &[Vec<F>], b: &[Vec<F>]) -> Vec<Vec<F>> {
    let n = a.len();
    let k = if n > 0 { a[0].len() } else { 0 };
    let m = if !b.is_empty() { b[0].len() } else { 0 };
    assert_eq!(b.len(), k, "inner dimensions must match");
    let mut out = vec![vec![F::zero(); m]; n];
    for i in 0..n {
        for t in 0..k {
            if a[i][t].is_zero() {
                continue;
            }
            for j in 0..m {
                if b[t][j].is_zero() {
                    continue;
                }
                let s = a[i][t].mul_ref(&b[t][j]);
                out[i][j] = out[i][j].add_ref(&s);
            }
        }
    }
    out
}

/// Incrementally built row-reduced span of sparse vectors keyed by `K`.
///
/// Rows are kept normalized (pivot coefficient 1) and sorted by pivot key;
/// `reduce` returns the canonical residue of a vector modulo the span.
pub struct SparseRowSpace<K: Ord + Clone, F: FieldElem> {
    rows: Vec<BTreeMap<K, F>>,
}

impl<K: Ord + Clone, F: FieldElem> Default for SparseRowSpace<K, F> {
    fn default() -> Self {
        Self::new()
    }
}

impl<K: Ord + Clone, F: FieldElem> SparseRowSpace<K, F> {
    pub fn new() -> Self {
        SparseRowSpace { rows: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    /// The normalized rows, sorted by pivot key.
    pub fn rows(&self) -> &[BTreeMap<K, F>] {
        &self.rows
    }

    /// Canonical residue of `v` modulo the current span.
    pub fn reduce(&self, mut v: BTreeMap<K, F>) -> BTreeMap<K, F> {
        for row in &self.rows {
            let pivot = row.keys().next().expect("rows are nonzero").clone();
            if let Some(c) = v.get(&pivot).cloned() {
                if c.is_zero() {
                    v.remove(&pivot);
                    continue;
                }
                for (k, rc) in row {
                    let delta = rc.mul_ref(&c);
                    let e = v.entry(k.clone()).or_insert_with(F::zero);
                    *e = e.sub_ref(&delta);
                    if e.is_zero() {
                        v.remove(k);
                    }
                }
            }
        }
        v.retain(|_, c| !c.is_zero());
        v
    }

    /// Reduce and, if the residue is nonzero, add it to the span.
    /// Returns `true` when the rank grew.
    pub fn insert(&mut self, v: BTreeMap<K, F>) -> bool {
        let r = self.reduce(v);
        if r.is_empty() {
            return false;
        }
        let pivot_val = r.values().next().expect("nonempty").clone();
        let inv = F::one().div_ref(&pivot_val);
        let normalized: BTreeMap<K, F> = r.into_iter().map(|(k, c)| (k, c.mul_ref(&inv))).collect();
        let pivot = normalized.keys().next().unwrap().clone();
        let pos = self
            .rows
            .partition_point(|row| row.keys().next().unwrap().clone() < pivot);
        self.rows.insert(pos, normalized);
        true
    }
}

/// Result of congruence-diagonalizing a symmetric rational matrix.
#[derive(Clone, Debug)]
pub struct Inertia {
    pub positive: usize,
    pub negative: usize,
    pub zero: usize,
    /// A vector `w` with `w^T G w < 0`, with the (negative) value, when the
    /// form is not positive semidefinite.
    pub negative_witness: Option<(Vec<Rat>, Rat)>,
}

/// Exact signature of a symmetric rational matrix by congruence reduction.
///
/// Handles zero diagonals via the standard hyperbolic-pair row operation; the
/// returned witness is exact and certified by re-evaluating `w^T G w`.
pub fn symmetric_inertia(g: &[Vec<Rat>]) -> Inertia {
    let n = g.len();
    for row in g {
        assert_eq!(row.len(), n, "square matrix required");
    }
    let mut m: Vec<Vec<Rat>> = g.to_vec();
    // Congruence transform accumulator: current form = T * G * T^T.
    let mut t: Vec<Vec<Rat>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { Rat::one() } else { Rat::zero() }).collect())
        .collect();
    let mut pos = 0;
    let mut neg = 0;
    let mut witness: Option<(Vec<Rat>, Rat)> = None;

    let mut step = 0;
    while step < n {
        // Prefer a nonzero diagonal pivot.
        let diag = (step..n).find(|&i| !m[i][i].is_zero());
        let i = match diag {
            Some(i) => i,
            None => {
                // Look for an off-diagonal entry; if none, the rest is zero.
                let mut found = None;
                'outer: for i in step..n {
                    for j in (i + 1)..n {
                        if !m[i][j].is_zero() {
                            found = Some((i, j));
                            break 'outer;
                        }
                    }
                }
                let Some((i, j)) = found else { break };
                // Row/column operation: row_i += row_j makes m[i][i] = 2*m[i][j] != 0.
                for c in 0..n {
                    let x = m[j][c].clone();
                    m[i][c] += x;
                }
                for r in 0..n {
                    let x = m[r][j].clone();
                    m[r][i] += x;
                }
                for c in 0..n {
                    let x = t[j][c].clone();
                    t[i][c] += x;
                }
                i
            }
        };
        // Swap pivot into position `step` (rows, columns, transform).
        if i != step {
            m.swap(i, step);
            for row in m.iter_mut() {
                row.swap(i, step);
            }
            t.swap(i, step);
        }
        let d = m[step][step].clone();
        debug_assert!(!d.is_zero());
        if d.is_positive() {
            pos += 1;
        } else {
            neg += 1;
            if witness.is_none() {
                let w = t[step].clone();
                // Certify: w^T G w equals the pivot.
                let mut val = Rat::zero();
                for a in 0..n {
                    if w[a].is_zero() {
                        continue;
                    }
                    for b in 0..n {
                        val += &w[a] * &g[a][b] * &w[b];
                    }
                }
                assert!(val.is_negative(), "witness must certify negativity");
                witness = Some((w, val));
            }
        }
        // Eliminate below/right of the pivot.
        for r in (step + 1)..n {
            if m[r][step].is_zero() {
                continue;
            }
            let f = &m[r][step] / &d;
            for c in 0..n {
                let x = &m[step][c] * &f;
                m[r][c] -= x;
            }
            for c in 0..n {
                let x = &m[step][c] * &f;
                m[c][r] -= x;
            }
            for c in 0..n {
                let x = &t[step][c] * &f;
                t[r][c] -= x;
            }
        }
        step += 1;
    }

    Inertia { positive: pos, negative: neg, zero: n - pos - neg, negative_witness: witness }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::rat_i;

    fn rmat(rows: &[&[i64]]) -> Vec<Vec<Rat>> {
        rows.iter().map(|r| r.iter().map(|&x| rat_i(x)).collect()).collect()
    }

    #[test]
    fn rank_and_kernel() {
        let m = rmat(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        assert_eq!(rank(&m), 2);
        let ker = kernel_basis(&m, 3);
        assert_eq!(ker.len(), 1);
        for row in &m {
            let mut acc = Rat::zero();
            for (c, k) in row.iter().zip(&ker[0]) {
                acc += c * k;
            }
            assert!(acc.is_zero());
        }
    }

    #[test]
    fn inverse_round_trip() {
        let m = rmat(&[&[2, 1], &[1, 1]]);
        let inv = invert(&m).unwrap();
        let prod = mat_mul(&m, &inv);
        assert_eq!(prod, rmat(&[&[1, 0], &[0, 1]]));
        assert!(invert(&rmat(&[&[1, 2], &[2, 4]])).is_none());
    }

    #[test]
    fn inertia_of_definite_and_indefinite_forms() {
        let id = symmetric_inertia(&rmat(&[&[2, 0], &[0, 3]]));
        assert_eq!((id.positive, id.negative, id.zero), (2, 0, 0));
        assert!(id.negative_witness.is_none());

        let ind = symmetric_inertia(&rmat(&[&[1, 0, 0], &[0, -2, 0], &[0, 0, 0]]));
        assert_eq!((ind.positive, ind.negative, ind.zero), (1, 1, 1));
        let (w, val) = ind.negative_witness.unwrap();
        assert_eq!(w, vec![rat_i(0), rat_i(1), rat_i(0)]);
        assert_eq!(val, rat_i(-2));
    }

    #[test]
    fn inertia_hyperbolic_pair() {
        // [[0,1],[1,0]] has signature (1,1).
        let h = symmetric_inertia(&rmat(&[&[0, 1], &[1, 0]]));
        assert_eq!((h.positive, h.negative, h.zero), (1, 1, 0));
        assert!(h.negative_witness.is_some());
    }

    #[test]
    fn sparse_row_space_inserts_and_reduces() {
        let mut s: SparseRowSpace<u32, Rat> = SparseRowSpace::new();
        let v = |pairs: &[(u32, i64)]| -> BTreeMap<u32, Rat> {
            pairs.iter().map(|&(k, c)| (k, rat_i(c))).collect()
        };
        assert!(s.insert(v(&[(0, 1), (2, 2)])));
        assert!(s.insert(v(&[(1, 3)])));
        assert!(!s.insert(v(&[(0, 2), (1, 3), (2, 4)])));
        assert_eq!(s.dim(), 2);
        let r = s.reduce(v(&[(0, 1), (1, 1), (2, 2)]));
        assert!(r.is_empty());
        let r2 = s.reduce(v(&[(2, 5)]));
        assert_eq!(r2, v(&[(2, 5)]));
    }
}
