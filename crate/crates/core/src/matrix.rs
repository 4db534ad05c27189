//! Dense matrices over cyclotomic numbers with exact rank/kernel computation.
//!
//! Elimination pivots on the first nonzero entry; over an exact field there is
//! no conditioning to worry about, and the deterministic pivot keeps outputs
//! reproducible.  Products parallelize by output row.

use crate::cyclotomic::CycNum;
use crate::par;

#[derive(Clone, PartialEq)]
pub struct MatrixCyc {
    rows: usize,
    cols: usize,
    a: Vec<CycNum>,
}

impl MatrixCyc {
    pub fn zero(rows: usize, cols: usize) -> Self {
        MatrixCyc { rows, cols, a: vec![CycNum::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = MatrixCyc::zero(n, n);
        for i in 0..n {
            *m.at_mut(i, i) = CycNum::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> CycNum + Sync + Send) -> Self {
        let a = par::map_range(rows, |i| (0..cols).map(|j| f(i, j)).collect::<Vec<_>>());
        MatrixCyc { rows, cols, a: a.into_iter().flatten().collect() }
    }

    /// Permutation matrix sending basis vector j to basis vector perm[j].
    pub fn permutation(perm: &[usize]) -> Self {
        let n = perm.len();
        let mut m = MatrixCyc::zero(n, n);
        for (j, &i) in perm.iter().enumerate() {
            *m.at_mut(i, j) = CycNum::one();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, i: usize, j: usize) -> &CycNum {
        &self.a[i * self.cols + j]
    }

    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut CycNum {
        &mut self.a[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[CycNum] {
        &self.a[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        MatrixCyc::from_fn(self.cols, self.rows, |i, j| self.at(j, i).clone())
    }

    pub fn conjugate(&self) -> Self {
        MatrixCyc::from_fn(self.rows, self.cols, |i, j| self.at(i, j).conjugate())
    }

    pub fn scale(&self, c: &CycNum) -> Self {
        MatrixCyc::from_fn(self.rows, self.cols, |i, j| self.at(i, j).mul(c))
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        MatrixCyc::from_fn(self.rows, self.cols, |i, j| self.at(i, j).add(other.at(i, j)))
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        MatrixCyc::from_fn(self.rows, self.cols, |i, j| self.at(i, j).sub(other.at(i, j)))
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows);
        let rows = self.rows;
        let cols = other.cols;
        let inner = self.cols;
        let a = par::map_range(rows, |i| {
            let mut out = Vec::with_capacity(cols);
            for j in 0..cols {
                let mut acc = CycNum::zero();
                for k in 0..inner {
                    let x = self.at(i, k);
                    if x.is_zero() {
                        continue;
                    }
                    let y = other.at(k, j);
                    if y.is_zero() {
                        continue;
                    }
                    acc = acc.add(&x.mul(y));
                }
                out.push(acc);
            }
            out
        });
        MatrixCyc { rows, cols, a: a.into_iter().flatten().collect() }
    }

    pub fn mat_vec(&self, v: &[CycNum]) -> Vec<CycNum> {
        assert_eq!(self.cols, v.len());
        par::map_range(self.rows, |i| {
            let mut acc = CycNum::zero();
            for k in 0..self.cols {
                let x = self.at(i, k);
                if !x.is_zero() && !v[k].is_zero() {
                    acc = acc.add(&x.mul(&v[k]));
                }
            }
            acc
        })
    }

    /// Kronecker product with row-major index pairing:
    /// entry ((i1,i2),(j1,j2)) = self(i1,j1) * other(i2,j2).
    pub fn kronecker(&self, other: &Self) -> Self {
        let r = self.rows * other.rows;
        let c = self.cols * other.cols;
        MatrixCyc::from_fn(r, c, |i, j| {
            let (i1, i2) = (i / other.rows, i % other.rows);
            let (j1, j2) = (j / other.cols, j % other.cols);
            self.at(i1, j1).mul(other.at(i2, j2))
        })
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    if i == j {
                        self.at(i, j).is_one()
                    } else {
                        self.at(i, j).is_zero()
                    }
                })
            })
    }

    /// Reduced row echelon form in place; returns pivot column indices.
    fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            let Some(p) = (r..self.rows).find(|&i| !self.at(i, c).is_zero()) else {
                continue;
            };
            for j in 0..self.cols {
                let tmp = self.at(p, j).clone();
                *self.at_mut(p, j) = self.at(r, j).clone();
                *self.at_mut(r, j) = tmp;
            }
            let inv = self.at(r, c).inv().expect("pivot is nonzero");
            for j in c..self.cols {
                let v = self.at(r, j).mul(&inv);
                *self.at_mut(r, j) = v;
            }
            let pivot_row: Vec<CycNum> = self.row(r).to_vec();
            let updated = par::map_range(self.rows, |i| {
                if i == r || self.at(i, c).is_zero() {
                    None
                } else {
                    let f = self.at(i, c).clone();
                    let mut row = self.row(i).to_vec();
                    for j in c..self.cols {
                        if !pivot_row[j].is_zero() {
                            row[j] = row[j].sub(&pivot_row[j].mul(&f));
                        }
                    }
                    Some(row)
                }
            });
            for (i, row) in updated.into_iter().enumerate() {
                if let Some(row) = row {
                    self.a[i * self.cols..(i + 1) * self.cols].clone_from_slice(&row);
                }
            }
            pivots.push(c);
            r += 1;
            if r == self.rows {
                break;
            }
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        let mut w = self.clone();
        w.rref().len()
    }

    /// Exact basis of the right kernel { v : A v = 0 }.
    pub fn kernel_basis(&self) -> Vec<Vec<CycNum>> {
        let mut w = self.clone();
        let pivots = w.rref();
        let pivot_set: std::collections::HashSet<usize> = pivots.iter().copied().collect();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivot_set.contains(c)).collect();
        free.iter()
            .map(|&fc| {
                let mut v = vec![CycNum::zero(); self.cols];
                v[fc] = CycNum::one();
                for (r, &pc) in pivots.iter().enumerate() {
                    v[pc] = w.at(r, fc).neg();
                }
                v
            })
            .collect()
    }

    /// Exact inverse of a square matrix; None when singular.
    pub fn inverse(&self) -> Option<MatrixCyc> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut aug = MatrixCyc::zero(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                *aug.at_mut(i, j) = self.at(i, j).clone();
            }
            *aug.at_mut(i, n + i) = CycNum::one();
        }
        let pivots = aug.rref();
        if pivots.len() < n || pivots.iter().enumerate().any(|(k, &c)| c != k) {
            return None;
        }
        Some(MatrixCyc::from_fn(n, n, |i, j| aug.at(i, n + j).clone()))
    }
}

/// Exact rank of a list of column vectors.
pub fn span_rank(vectors: &[Vec<CycNum>]) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    let rows = vectors[0].len();
    let m = MatrixCyc::from_fn(rows, vectors.len(), |i, j| vectors[j][i].clone());
    m.rank()
}

/// Is `v` in the span of `basis`?  Compared by exact rank.
pub fn span_contains(basis: &[Vec<CycNum>], v: &[CycNum]) -> bool {
    if v.iter().all(|c| c.is_zero()) {
        return true;
    }
    let r0 = span_rank(basis);
    let mut ext: Vec<Vec<CycNum>> = basis.to_vec();
    ext.push(v.to_vec());
    span_rank(&ext) == r0
}

impl std::fmt::Debug for MatrixCyc {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "MatrixCyc {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| format!("{}", self.at(i, j))).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn c(n: i64) -> CycNum {
        CycNum::from_int(n)
    }

    #[test]
    fn kernel_of_rank_deficient_matrix() {
        // rows: (1,1,1), (1,2,3) -> kernel spanned by (1,-2,1)
        let m = MatrixCyc::from_fn(2, 3, |i, j| {
            c(if i == 0 { 1 } else { [1, 2, 3][j] })
        });
        let k = m.kernel_basis();
        assert_eq!(k.len(), 1);
        for v in &k {
            let img = m.mat_vec(v);
            assert!(img.iter().all(|x| x.is_zero()));
        }
        assert_eq!(m.rank(), 2);
    }

    #[test]
    fn kernel_over_cyclotomic_entries() {
        // (1, zeta_3, zeta_3^2) has kernel of dim 2 and each kernel vector
        // genuinely annihilates the row.
        let z = CycNum::root_of_unity(1, 3);
        let row = [CycNum::one(), z.clone(), z.mul(&z)];
        let m = MatrixCyc::from_fn(1, 3, |_, j| row[j].clone());
        let k = m.kernel_basis();
        assert_eq!(k.len(), 2);
        for v in &k {
            assert!(m.mat_vec(v).iter().all(|x| x.is_zero()));
        }
    }

    #[test]
    fn inverse_round_trip() {
        let z = CycNum::root_of_unity(1, 5);
        let m = MatrixCyc::from_fn(2, 2, |i, j| match (i, j) {
            (0, 0) => CycNum::one(),
            (0, 1) => z.clone(),
            (1, 0) => z.conjugate(),
            _ => c(2),
        });
        let inv = m.inverse().unwrap();
        assert!(m.mul(&inv).is_identity());
        assert!(inv.mul(&m).is_identity());
    }

    #[test]
    fn singular_matrix_has_no_inverse() {
        let m = MatrixCyc::from_fn(2, 2, |i, _| c(if i == 0 { 1 } else { 2 }));
        assert!(m.inverse().is_none());
    }

    #[test]
    fn kronecker_block_structure() {
        let a = MatrixCyc::from_fn(2, 2, |i, j| c((i * 2 + j) as i64));
        let b = MatrixCyc::identity(3);
        let k = a.kronecker(&b);
        assert_eq!(k.rows(), 6);
        assert_eq!(*k.at(0, 3), c(1));
        assert_eq!(*k.at(4, 1), c(2));
        assert!(k.at(0, 1).is_zero());
    }

    #[test]
    fn span_membership() {
        let b1 = vec![c(1), c(0), c(1)];
        let b2 = vec![c(0), c(1), c(1)];
        let inside = vec![c(2), c(3), c(5)];
        let outside = vec![c(0), c(0), c(1)];
        assert!(span_contains(&[b1.clone(), b2.clone()], &inside));
        assert!(!span_contains(&[b1, b2], &outside));
    }

    #[test]
    fn scale_by_rational_matrix_entry() {
        let m = MatrixCyc::identity(2).scale(&CycNum::from_rat(rat(1, 3)));
        assert_eq!(*m.at(0, 0), CycNum::from_rat(rat(1, 3)));
    }
}
