//! Exact integer linear algebra at desk scale: fraction-free determinants,
//! Smith normal form with unimodular transform tracking, and small rational
//! solves.  Entries are i64 with i128 intermediates; sizes here never exceed
//! a handful of rows.

use num_traits::Zero;

use crate::rational::Rat;

pub type IMat = Vec<Vec<i64>>;

pub fn identity(n: usize) -> IMat {
    (0..n)
        .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
        .collect()
}

pub fn matmul(a: &IMat, b: &IMat) -> IMat {
    let n = a.len();
    let m = b[0].len();
    let k = b.len();
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| {
                    let mut s: i128 = 0;
                    for t in 0..k {
                        s += a[i][t] as i128 * b[t][j] as i128;
                    }
                    i64::try_from(s).expect("integer matrix product overflow")
                })
                .collect()
        })
        .collect()
}

pub fn mat_vec(a: &IMat, v: &[i64]) -> Vec<i64> {
    a.iter()
        .map(|row| {
            let s: i128 = row.iter().zip(v).map(|(&x, &y)| x as i128 * y as i128).sum();
            i64::try_from(s).expect("integer matrix-vector overflow")
        })
        .collect()
}

/// Fraction-free (Bareiss) determinant.
pub fn det_bareiss(a: &IMat) -> i128 {
    let n = a.len();
    if n == 0 {
        return 1;
    }
    let mut m: Vec<Vec<i128>> = a.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if m[k][k] == 0 {
            let Some(p) = (k + 1..n).find(|&r| m[r][k] != 0) else {
                return 0;
            };
            m.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (m[k][k] * m[i][j] - m[i][k] * m[k][j]) / prev;
            }
            m[i][k] = 0;
        }
        prev = m[k][k];
    }
    sign * m[n - 1][n - 1]
}

/// All leading principal minors strictly positive (exact positive
/// definiteness test for symmetric matrices).
pub fn leading_minors_positive(a: &IMat) -> bool {
    (1..=a.len()).all(|k| {
        let sub: IMat = a[..k].iter().map(|r| r[..k].to_vec()).collect();
        det_bareiss(&sub) > 0
    })
}

/// Smith normal form `U * A * V = D` with unimodular `U`, `V`.
/// `u_inv` is maintained alongside so quotient presentations can map the
/// diagonal basis back to original coordinates without a separate inversion.
pub struct SnfResult {
    pub diag: Vec<i64>,
    pub u: IMat,
    pub u_inv: IMat,
    pub v: IMat,
}

pub fn smith_normal_form(a: &IMat) -> SnfResult {
    let n = a.len();
    let m = if n == 0 { 0 } else { a[0].len() };
    let mut w: Vec<Vec<i128>> = a.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let mut u: Vec<Vec<i128>> = (0..n).map(|i| (0..n).map(|j| i128::from(i == j)).collect()).collect();
    let mut uinv = u.clone();
    let mut v: Vec<Vec<i128>> = (0..m).map(|i| (0..m).map(|j| i128::from(i == j)).collect()).collect();

    // Row ops mirror into u (left) and u_inv (right, inverse op); col ops into v.
    fn swap_rows(w: &mut [Vec<i128>], u: &mut [Vec<i128>], uinv: &mut [Vec<i128>], a: usize, b: usize) {
        if a == b {
            return;
        }
        w.swap(a, b);
        u.swap(a, b);
        for row in uinv.iter_mut() {
            row.swap(a, b);
        }
    }
    fn negate_row(w: &mut [Vec<i128>], u: &mut [Vec<i128>], uinv: &mut [Vec<i128>], i: usize) {
        for x in w[i].iter_mut() {
            *x = -*x;
        }
        for x in u[i].iter_mut() {
            *x = -*x;
        }
        for row in uinv.iter_mut() {
            row[i] = -row[i];
        }
    }
    // row i += c * row k
    fn add_row(w: &mut [Vec<i128>], u: &mut [Vec<i128>], uinv: &mut [Vec<i128>], i: usize, k: usize, c: i128) {
        if c == 0 {
            return;
        }
        for j in 0..w[0].len() {
            w[i][j] += c * w[k][j];
        }
        for j in 0..u[0].len() {
            u[i][j] += c * u[k][j];
        }
        for row in uinv.iter_mut() {
            let t = c * row[i];
            row[k] -= t;
        }
    }
    fn swap_cols(w: &mut [Vec<i128>], v: &mut [Vec<i128>], a: usize, b: usize) {
        if a == b {
            return;
        }
        for row in w.iter_mut() {
            row.swap(a, b);
        }
        for row in v.iter_mut() {
            row.swap(a, b);
        }
    }
    // col j += c * col k
    fn add_col(w: &mut [Vec<i128>], v: &mut [Vec<i128>], j: usize, k: usize, c: i128) {
        if c == 0 {
            return;
        }
        for row in w.iter_mut() {
            let t = c * row[k];
            row[j] += t;
        }
        for row in v.iter_mut() {
            let t = c * row[k];
            row[j] += t;
        }
    }

    let rank_bound = n.min(m);
    for k in 0..rank_bound {
        'pivot: loop {
            // Smallest nonzero entry in the trailing block to (k,k).
            let mut best: Option<(usize, usize)> = None;
            for i in k..n {
                for j in k..m {
                    if w[i][j] != 0
                        && best
                            .map(|(bi, bj)| w[i][j].abs() < w[bi][bj].abs())
                            .unwrap_or(true)
                    {
                        best = Some((i, j));
                    }
                }
            }
            let Some((bi, bj)) = best else {
                break 'pivot;
            };
            swap_rows(&mut w, &mut u, &mut uinv, k, bi);
            swap_cols(&mut w, &mut v, k, bj);
            if w[k][k] < 0 {
                negate_row(&mut w, &mut u, &mut uinv, k);
            }
            let p = w[k][k];
            let mut clean = true;
            for i in k + 1..n {
                let q = w[i][k].div_euclid(p);
                add_row(&mut w, &mut u, &mut uinv, i, k, -q);
                if w[i][k] != 0 {
                    clean = false;
                }
            }
            for j in k + 1..m {
                let q = w[k][j].div_euclid(p);
                add_col(&mut w, &mut v, j, k, -q);
                if w[k][j] != 0 {
                    clean = false;
                }
            }
            if !clean {
                continue 'pivot;
            }
            // Enforce divisibility of the trailing block.
            let mut fixed = true;
            'scan: for i in k + 1..n {
                for j in k + 1..m {
                    if w[i][j] % p != 0 {
                        add_row(&mut w, &mut u, &mut uinv, k, i, 1);
                        fixed = false;
                        break 'scan;
                    }
                }
            }
            if fixed {
                break 'pivot;
            }
        }
    }

    let diag: Vec<i64> = (0..rank_bound)
        .map(|k| i64::try_from(w[k][k]).expect("SNF diagonal overflow"))
        .collect();
    let back = |m: Vec<Vec<i128>>| -> IMat {
        m.into_iter()
            .map(|r| r.into_iter().map(|x| i64::try_from(x).expect("SNF transform overflow")).collect())
            .collect()
    };
    SnfResult { diag, u: back(u), u_inv: back(uinv), v: back(v) }
}

/// Solve `A x = b` exactly over Q for square invertible `A`.
pub fn solve_rational(a: &[Vec<Rat>], b: &[Rat]) -> Option<Vec<Rat>> {
    let n = a.len();
    let mut aug: Vec<Vec<Rat>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&r| !aug[r][c].is_zero())?;
        aug.swap(c, p);
        let inv = aug[c][c].recip();
        for x in aug[c].iter_mut() {
            *x *= &inv;
        }
        for r in 0..n {
            if r != c && !aug[r][c].is_zero() {
                let f = aug[r][c].clone();
                for j in c..=n {
                    let t = &aug[c][j] * &f;
                    aug[r][j] -= t;
                }
            }
        }
    }
    Some(aug.into_iter().map(|row| row[n].clone()).collect())
}

/// Adjugate of a square integer matrix (cofactor transpose), exact.
pub fn adjugate(a: &IMat) -> IMat {
    let n = a.len();
    if n == 1 {
        return vec![vec![1]];
    }
    let mut adj = vec![vec![0i64; n]; n];
    for i in 0..n {
        for j in 0..n {
            let minor: IMat = (0..n)
                .filter(|&r| r != i)
                .map(|r| (0..n).filter(|&c| c != j).map(|c| a[r][c]).collect())
                .collect();
            let s = if (i + j) % 2 == 0 { 1 } else { -1 };
            adj[j][i] = i64::try_from(s as i128 * det_bareiss(&minor)).expect("adjugate overflow");
        }
    }
    adj
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bareiss_matches_cofactor_expansion() {
        fn det_cofactor(a: &IMat) -> i128 {
            let n = a.len();
            if n == 0 {
                return 1;
            }
            if n == 1 {
                return a[0][0] as i128;
            }
            let mut s = 0i128;
            for j in 0..n {
                if a[0][j] == 0 {
                    continue;
                }
                let minor: IMat = (1..n)
                    .map(|r| (0..n).filter(|&c| c != j).map(|c| a[r][c]).collect())
                    .collect();
                let sign = if j % 2 == 0 { 1 } else { -1 };
                s += sign * a[0][j] as i128 * det_cofactor(&minor);
            }
            s
        }
        let cases: Vec<IMat> = vec![
            vec![vec![2, 1], vec![1, 2]],
            vec![vec![2]],
            vec![vec![1, 2, 3], vec![4, 5, 6], vec![7, 8, 10]],
            vec![vec![0, 1], vec![1, 0]],
        ];
        for a in cases {
            assert_eq!(det_bareiss(&a), det_cofactor(&a));
        }
    }

    #[test]
    fn snf_of_gram_matrix() {
        let a = vec![vec![2, 1], vec![1, 2]];
        let r = smith_normal_form(&a);
        assert_eq!(r.diag, vec![1, 3]);
        let uav = matmul(&matmul(&r.u, &a), &r.v);
        for (k, &d) in r.diag.iter().enumerate() {
            assert_eq!(uav[k][k], d);
        }
        assert_eq!(matmul(&r.u, &r.u_inv), identity(2));
    }

    #[test]
    fn snf_transforms_are_unimodular() {
        let a = vec![vec![6, 4, 2], vec![4, 8, 0], vec![2, 0, 12]];
        let r = smith_normal_form(&a);
        assert_eq!(det_bareiss(&r.u).abs(), 1);
        assert_eq!(det_bareiss(&r.v).abs(), 1);
        assert_eq!(matmul(&r.u, &r.u_inv), identity(3));
        let uav = matmul(&matmul(&r.u, &a), &r.v);
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(uav[i][j], if i == j { r.diag[i] } else { 0 });
            }
        }
        // divisibility chain
        assert!(r.diag[1] % r.diag[0] == 0 && r.diag[2] % r.diag[1] == 0);
        // |det| preserved
        assert_eq!(
            r.diag.iter().map(|&d| d as i128).product::<i128>().abs(),
            det_bareiss(&a).abs()
        );
    }

    #[test]
    fn adjugate_times_matrix_is_det_identity() {
        let a = vec![vec![2, 1, 0], vec![1, 4, 1], vec![0, 1, 6]];
        let adj = adjugate(&a);
        let d = det_bareiss(&a) as i64;
        let prod = matmul(&a, &adj);
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(prod[i][j], if i == j { d } else { 0 });
            }
        }
    }

    #[test]
    fn rational_solve_roundtrip() {
        use crate::rational::rat;
        let a = vec![
            vec![rat(2, 1), rat(1, 1)],
            vec![rat(1, 1), rat(3, 1)],
        ];
        let b = vec![rat(5, 1), rat(10, 1)];
        let x = solve_rational(&a, &b).unwrap();
        assert_eq!(x, vec![rat(1, 1), rat(3, 1)]);
    }
}
