//! Exact linear algebra over the rationals, plus inversion of polynomial
//! matrices whose determinant is a nonzero constant.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::poly::Poly;
use crate::rational::Q;

pub type Matrix = Vec<Vec<Q>>;
pub type SparseVec = BTreeMap<usize, Q>;

pub fn zeros(rows: usize, cols: usize) -> Matrix {
    vec![vec![Q::zero(); cols]; rows]
}

pub fn identity(n: usize) -> Matrix {
    let mut m = zeros(n, n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = Q::one();
    }
    m
}

pub fn mat_mul(a: &Matrix, b: &Matrix) -> Matrix {
    let n = a.len();
    let k = b.len();
    let m = if k == 0 { 0 } else { b[0].len() };
    let mut out = zeros(n, m);
    for i in 0..n {
        for l in 0..k {
            if a[i][l].is_zero() {
                continue;
            }
            for j in 0..m {
                if !b[l][j].is_zero() {
                    let t = &a[i][l] * &b[l][j];
                    out[i][j] += t;
                }
            }
        }
    }
    out
}

pub fn mat_vec(a: &Matrix, v: &[Q]) -> Vec<Q> {
    a.iter()
        .map(|row| row.iter().zip(v).filter(|(x, y)| !x.is_zero() && !y.is_zero()).map(|(x, y)| x * y).sum())
        .collect()
}

pub fn transpose(a: &Matrix) -> Matrix {
    if a.is_empty() {
        return Vec::new();
    }
    (0..a[0].len()).map(|j| a.iter().map(|r| r[j].clone()).collect()).collect()
}

/// In-place reduced row echelon form; returns pivot columns.
pub fn rref(m: &mut Matrix) -> Vec<usize> {
    let rows = m.len();
    if rows == 0 {
        return Vec::new();
    }
    let cols = m[0].len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let inv = Q::one() / &m[r][c];
        for x in m[r].iter_mut() {
            if !x.is_zero() {
                *x *= &inv;
            }
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, p) in row.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *x -= &f * p;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(m: &Matrix) -> usize {
    let mut m = m.clone();
    rref(&mut m).len()
}

/// Basis of `{x : m x = 0}`.
pub fn kernel(m: &Matrix, cols: usize) -> Vec<Vec<Q>> {
    let mut a = m.clone();
    let pivots = rref(&mut a);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Q::zero(); cols];
            v[f] = Q::one();
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = -a[r][f].clone();
            }
            v
        })
        .collect()
}

/// Some solution of `m x = b`, if one exists.
pub fn solve(m: &Matrix, b: &[Q]) -> Option<Vec<Q>> {
    let cols = if m.is_empty() { 0 } else { m[0].len() };
    let mut aug: Matrix = m
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.contains(&cols) {
        return None;
    }
    let mut x = vec![Q::zero(); cols];
    for (r, &p) in pivots.iter().enumerate() {
        x[p] = aug[r][cols].clone();
    }
    Some(x)
}

pub fn inverse(m: &Matrix) -> Option<Matrix> {
    let n = m.len();
    let mut aug: Matrix = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Q::one() } else { Q::zero() }));
            r
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return None;
    }
    Some(aug.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub fn det(m: &Matrix) -> Q {
    let n = m.len();
    let mut a = m.clone();
    let mut d = Q::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[i][c].is_zero()) else { return Q::zero() };
        if p != c {
            a.swap(p, c);
            d = -d;
        }
        d *= &a[c][c];
        let inv = Q::one() / &a[c][c];
        for i in c + 1..n {
            if a[i][c].is_zero() {
                continue;
            }
            let f = &a[i][c] * &inv;
            for j in c..n {
                let t = &f * &a[c][j];
                a[i][j] -= t;
            }
        }
    }
    d
}

fn sparse_axpy(dst: &mut SparseVec, f: &Q, src: &SparseVec) {
    for (k, v) in src {
        let t = f * v;
        match dst.get_mut(k) {
            Some(x) => {
                *x += t;
                if x.is_zero() {
                    dst.remove(k);
                }
            }
            None => {
                if !t.is_zero() {
                    dst.insert(*k, t);
                }
            }
        }
    }
}

/// Incrementally maintained echelon basis of a subspace, stored sparsely.
/// Rows are kept fully reduced against each other, so reduction of a new
/// vector needs one pass over its support.
#[derive(Clone, Debug, Default)]
pub struct Echelon {
    rows: BTreeMap<usize, SparseVec>,
}

impl Echelon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn pivots(&self) -> impl Iterator<Item = &usize> {
        self.rows.keys()
    }

    /// Remainder of `v` after elimination against the stored rows.
    pub fn reduce(&self, v: &SparseVec) -> SparseVec {
        let mut v = v.clone();
        let mut cursor = 0usize;
        loop {
            let next = v.range(cursor..).find(|(k, _)| self.rows.contains_key(k)).map(|(k, c)| (*k, c.clone()));
            let Some((k, c)) = next else { break };
            sparse_axpy(&mut v, &-c, &self.rows[&k]);
            cursor = k + 1;
        }
        v
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.reduce(v).is_empty()
    }

    /// Adds `v`; returns whether it enlarged the span.
    pub fn insert(&mut self, v: &SparseVec) -> bool {
        let r = self.reduce(v);
        let Some((&p, c)) = r.iter().next() else { return false };
        let inv = Q::one() / c;
        let r: SparseVec = r.iter().map(|(k, x)| (*k, x * &inv)).collect();
        for row in self.rows.values_mut() {
            if let Some(c) = row.get(&p).cloned() {
                sparse_axpy(row, &-c, &r);
            }
        }
        self.rows.insert(p, r);
        true
    }

    pub fn basis(&self) -> impl Iterator<Item = &SparseVec> {
        self.rows.values()
    }
}

/// Kernel of a sparse matrix given by rows, as sparse vectors over `cols`.
pub fn sparse_kernel(rows: &[SparseVec], cols: usize) -> Vec<SparseVec> {
    sparse_kernel_with_free(rows, cols).0
}

/// Kernel basis together with its free columns: basis vector `i` has entry 1
/// at `free[i]` and 0 at every other free column, so the coordinates of a
/// kernel vector are its entries at the free columns.
pub fn sparse_kernel_with_free(rows: &[SparseVec], cols: usize) -> (Vec<SparseVec>, Vec<usize>) {
    let mut ech = Echelon::new();
    for r in rows {
        ech.insert(r);
    }
    let pivots: std::collections::BTreeSet<usize> = ech.pivots().copied().collect();
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    let mut out = Vec::new();
    for &f in &free {
        let mut v = SparseVec::new();
        v.insert(f, Q::one());
        for (p, row) in &ech.rows {
            if let Some(c) = row.get(&f) {
                v.insert(*p, -c.clone());
            }
        }
        out.push(v);
    }
    (out, free)
}

pub fn to_sparse(v: &[Q]) -> SparseVec {
    v.iter().enumerate().filter(|(_, x)| !x.is_zero()).map(|(i, x)| (i, x.clone())).collect()
}

pub fn to_dense(v: &SparseVec, n: usize) -> Vec<Q> {
    let mut out = vec![Q::zero(); n];
    for (k, x) in v {
        out[*k] = x.clone();
    }
    out
}

/// Inverse of a square polynomial matrix by Gauss-Jordan elimination using
/// only nonzero constant pivots. Succeeds for the unitriangular-up-to-
/// permutation matrices that arise as Gram matrices of dual bases; returns
/// `None` when no constant pivot is available.
pub fn poly_matrix_inverse(m: &[Vec<Poly>]) -> Option<Vec<Vec<Poly>>> {
    let n = m.len();
    if n == 0 {
        return Some(Vec::new());
    }
    let nv = m[0][0].nvars();
    let mut a: Vec<Vec<Poly>> = m.to_vec();
    let mut inv: Vec<Vec<Poly>> =
        (0..n).map(|i| (0..n).map(|j| if i == j { Poly::one(nv) } else { Poly::zero(nv) }).collect()).collect();
    let mut used_rows = vec![false; n];
    let mut pivot_of_col = vec![usize::MAX; n];
    for _ in 0..n {
        let mut found = None;
        'search: for c in 0..n {
            if pivot_of_col[c] != usize::MAX {
                continue;
            }
            for r in 0..n {
                if !used_rows[r] && !a[r][c].is_zero() && a[r][c].is_constant() {
                    found = Some((r, c));
                    break 'search;
                }
            }
        }
        let (r, c) = found?;
        used_rows[r] = true;
        pivot_of_col[c] = r;
        let s = Q::one() / a[r][c].constant_term();
        for j in 0..n {
            a[r][j] = a[r][j].scale(&s);
            inv[r][j] = inv[r][j].scale(&s);
        }
        let prow = a[r].clone();
        let pinv = inv[r].clone();
        for i in 0..n {
            if i == r || a[i][c].is_zero() {
                continue;
            }
            let f = a[i][c].clone();
            for j in 0..n {
                if !prow[j].is_zero() {
                    a[i][j] = &a[i][j] - &(&f * &prow[j]);
                }
                if !pinv[j].is_zero() {
                    inv[i][j] = &inv[i][j] - &(&f * &pinv[j]);
                }
            }
        }
    }
    // Row r now has its pivot (1) in column c: permute rows into place.
    let mut out = vec![Vec::new(); n];
    for c in 0..n {
        out[c] = inv[pivot_of_col[c]].clone();
    }
    Some(out)
}

/// Determinant of a square polynomial matrix (fraction-free Bareiss).
pub fn poly_det(m: &[Vec<Poly>]) -> Poly {
    let n = m.len();
    if n == 0 {
        return Poly::one(0);
    }
    let nv = m[0][0].nvars();
    let mut a: Vec<Vec<Poly>> = m.to_vec();
    let mut prev = Poly::one(nv);
    let mut negate = false;
    for k in 0..n {
        let Some(p) = (k..n).find(|&r| !a[r][k].is_zero()) else {
            return Poly::zero(nv);
        };
        if p != k {
            a.swap(p, k);
            negate = !negate;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &(&a[k][k] * &a[i][j]) - &(&a[i][k] * &a[k][j]);
                a[i][j] = if num.is_zero() { num } else { num.div_exact(&prev).expect("Bareiss division is exact") };
            }
            a[i][k] = Poly::zero(nv);
        }
        prev = a[k][k].clone();
    }
    let d = a[n - 1][n - 1].clone();
    if negate {
        -&d
    } else {
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn m(rows: &[&[i64]]) -> Matrix {
        rows.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect()
    }

    #[test]
    fn kernel_and_rank() {
        let a = m(&[&[1, 2, 3], &[2, 4, 6]]);
        assert_eq!(rank(&a), 1);
        let k = kernel(&a, 3);
        assert_eq!(k.len(), 2);
        for v in &k {
            assert!(mat_vec(&a, v).iter().all(|x| x.is_zero()));
        }
    }

    #[test]
    fn inverse_and_det() {
        let a = m(&[&[2, 1], &[1, 1]]);
        assert_eq!(det(&a), q(1));
        let i = inverse(&a).unwrap();
        assert_eq!(mat_mul(&a, &i), identity(2));
        assert!(inverse(&m(&[&[1, 2], &[2, 4]])).is_none());
    }

    #[test]
    fn sparse_kernel_matches_dense() {
        let a = m(&[&[1, 0, -1, 2], &[0, 1, 1, 0], &[1, 1, 0, 2]]);
        let rows: Vec<SparseVec> = a.iter().map(|r| to_sparse(r)).collect();
        let k = sparse_kernel(&rows, 4);
        assert_eq!(k.len(), kernel(&a, 4).len());
        for v in &k {
            assert!(mat_vec(&a, &to_dense(v, 4)).iter().all(|x| x.is_zero()));
        }
    }

    #[test]
    fn polynomial_gram_inverse() {
        let a = Poly::var(1, 0);
        let g = vec![vec![Poly::zero(1), Poly::one(1)], vec![Poly::one(1), -&a]];
        let inv = poly_matrix_inverse(&g).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let mut s = Poly::zero(1);
                for k in 0..2 {
                    s.add_assign_ref(&(&g[i][k] * &inv[k][j]));
                }
                assert_eq!(s, if i == j { Poly::one(1) } else { Poly::zero(1) });
            }
        }
    }
}
