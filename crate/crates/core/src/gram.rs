//! Half-integral index matrices F and their discriminant modules.
//!
//! The stored object is always the integral matrix 2F (symmetric, even
//! diagonal, positive definite), which keeps every parser and serializer
//! bit-exact.  F itself then has integers on the diagonal and half-integers
//! elsewhere.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::fqm::FiniteQuadraticModule;
use crate::intmat::{self, IMat};
use crate::rational::{lcm_u64, mod1, Rat};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HalfIntegralMatrix {
    two_f: IMat,
}

impl HalfIntegralMatrix {
    /// Validate and wrap 2F.  Positive definiteness is certified by exact
    /// leading principal minors, not a floating-point factorization.
    pub fn from_two_f(two_f: IMat) -> Result<Self> {
        let n = two_f.len();
        if n == 0 {
            return Err(Error::InvalidMatrix("matrix must be nonempty".into()));
        }
        if two_f.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidMatrix("matrix must be square".into()));
        }
        for i in 0..n {
            for j in 0..n {
                if two_f[i][j] != two_f[j][i] {
                    return Err(Error::InvalidMatrix(format!(
                        "not symmetric at ({i},{j})"
                    )));
                }
            }
            if two_f[i][i] % 2 != 0 {
                return Err(Error::InvalidMatrix(format!(
                    "diagonal entry {} at ({i},{i}) is odd; 2F must have even diagonal",
                    two_f[i][i]
                )));
            }
        }
        if !intmat::leading_minors_positive(&two_f) {
            return Err(Error::NotPositiveDefinite);
        }
        Ok(HalfIntegralMatrix { two_f })
    }

    /// Parse the compact row format, e.g. `"2 1; 1 2"`.
    pub fn parse_row_string(s: &str) -> Result<Self> {
        let rows: Result<IMat> = s
            .split(';')
            .map(|row| {
                row.split_whitespace()
                    .map(|tok| {
                        tok.parse::<i64>()
                            .map_err(|_| Error::Parse(format!("bad matrix entry {tok:?}")))
                    })
                    .collect()
            })
            .collect();
        HalfIntegralMatrix::from_two_f(rows?)
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let rows: IMat = serde_json::from_value(v.clone())
            .map_err(|e| Error::Parse(format!("matrix JSON: {e}")))?;
        HalfIntegralMatrix::from_two_f(rows)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!(self.two_f)
    }

    pub fn size(&self) -> usize {
        self.two_f.len()
    }

    pub fn two_f(&self) -> &IMat {
        &self.two_f
    }

    /// Block sum (l) ⊕ F as index matrices, i.e. diag(2l, 2F).
    pub fn prepend_scalar_block(&self, l: u64) -> HalfIntegralMatrix {
        let n = self.size();
        let mut m = vec![vec![0i64; n + 1]; n + 1];
        m[0][0] = 2 * l as i64;
        for i in 0..n {
            for j in 0..n {
                m[i + 1][j + 1] = self.two_f[i][j];
            }
        }
        HalfIntegralMatrix::from_two_f(m).expect("block sum of valid matrices is valid")
    }

    /// det(2F), exact and positive.
    pub fn det_two_f(&self) -> u64 {
        let d = intmat::det_bareiss(&self.two_f);
        u64::try_from(d).expect("positive definite determinant fits u64")
    }

    /// Smallest f such that f (2F)^{-1} is again half integral, i.e. has
    /// integral diagonal and half-integral off-diagonal entries.
    pub fn level(&self) -> u64 {
        let det = self.det_two_f() as i64;
        let adj = intmat::adjugate(&self.two_f);
        let n = self.size();
        let mut f = 1u64;
        for i in 0..n {
            for j in 0..n {
                let a = if i == j { adj[i][j] } else { 2 * adj[i][j] };
                let g = num_integer::gcd(det, a.abs());
                f = lcm_u64(f, (det / g) as u64);
            }
        }
        f
    }

    /// Exact rational (1/4) r^t F^{-1} r = r^t adj(2F) r / (2 det).
    pub fn quarter_inv_quadratic(&self, r: &[i64]) -> Rat {
        assert_eq!(r.len(), self.size());
        let adj = intmat::adjugate(&self.two_f);
        let mut acc: i128 = 0;
        for (i, row) in adj.iter().enumerate() {
            for (j, &a) in row.iter().enumerate() {
                acc += r[i] as i128 * a as i128 * r[j] as i128;
            }
        }
        Rat::new(acc.into(), (2 * self.det_two_f() as i128).into())
    }

    /// Bilinear companion (1/2) x^t F^{-1} y = x^t adj(2F) y / det.
    pub fn half_inv_bilinear(&self, x: &[i64], y: &[i64]) -> Rat {
        let adj = intmat::adjugate(&self.two_f);
        let mut acc: i128 = 0;
        for (i, row) in adj.iter().enumerate() {
            for (j, &a) in row.iter().enumerate() {
                acc += x[i] as i128 * a as i128 * y[j] as i128;
            }
        }
        Rat::new(acc.into(), (self.det_two_f() as i128).into())
    }

    /// The discriminant module D_F = Z^n / 2F Z^n with Q = (1/4) F^{-1}[.],
    /// together with the coordinate data needed to canonicalize cosets.
    pub fn discriminant_presentation(&self) -> Result<DiscriminantPresentation> {
        let snf = intmat::smith_normal_form(&self.two_f);
        let n = self.size();
        let mut kept = Vec::new();
        let mut orders = Vec::new();
        let mut gens: Vec<Vec<i64>> = Vec::new();
        for k in 0..n {
            let d = snf.diag[k];
            assert!(d > 0, "positive definite matrix has full-rank SNF");
            if d == 1 {
                continue;
            }
            kept.push(k);
            orders.push(d as u64);
            gens.push((0..n).map(|r| snf.u_inv[r][k]).collect());
        }
        let s = orders.len();
        let mut gram = vec![vec![Rat::zero(); s]; s];
        for a in 0..s {
            gram[a][a] = mod1(&self.quarter_inv_quadratic(&gens[a]));
            for b in a + 1..s {
                let v = mod1(&self.half_inv_bilinear(&gens[a], &gens[b]));
                gram[a][b] = v.clone();
                gram[b][a] = v;
            }
        }
        let module = FiniteQuadraticModule::new(orders, gram)?;
        debug_assert_eq!(module.order(), self.det_two_f());
        Ok(DiscriminantPresentation {
            module,
            u: snf.u,
            diag: snf.diag,
            kept,
            gens,
        })
    }

    pub fn discriminant_module(&self) -> Result<FiniteQuadraticModule> {
        Ok(self.discriminant_presentation()?.module)
    }
}

/// Coordinates for D_F: the Smith transform U identifies Z^n / 2F Z^n with
/// the direct sum of Z/d_k over the non-unit diagonal entries, via
/// x -> (U x mod d).  `gens` are integer preimages of the module generators.
pub struct DiscriminantPresentation {
    pub module: FiniteQuadraticModule,
    pub u: IMat,
    pub diag: Vec<i64>,
    pub kept: Vec<usize>,
    pub gens: Vec<Vec<i64>>,
}

impl DiscriminantPresentation {
    /// Canonical coset coordinates of an integer vector.
    pub fn coset_coords(&self, r: &[i64]) -> Vec<i64> {
        let ur = intmat::mat_vec(&self.u, r);
        self.kept
            .iter()
            .map(|&k| ur[k].rem_euclid(self.diag[k]))
            .collect()
    }

    /// An integer representative of a module element given by coordinates.
    pub fn lift(&self, coords: &[i64]) -> Vec<i64> {
        let n = self.u.len();
        let mut out = vec![0i64; n];
        for (gi, g) in self.gens.iter().enumerate() {
            for r in 0..n {
                out[r] += coords[gi] * g[r];
            }
        }
        out
    }
}

/// The standard E8 Gram matrix (even, unimodular, rank 8), used as a
/// reference matrix in tests and checks.
pub fn e8_gram() -> HalfIntegralMatrix {
    let m = vec![
        vec![2, 0, -1, 0, 0, 0, 0, 0],
        vec![0, 2, 0, -1, 0, 0, 0, 0],
        vec![-1, 0, 2, -1, 0, 0, 0, 0],
        vec![0, -1, -1, 2, -1, 0, 0, 0],
        vec![0, 0, 0, -1, 2, -1, 0, 0],
        vec![0, 0, 0, 0, -1, 2, -1, 0],
        vec![0, 0, 0, 0, 0, -1, 2, -1],
        vec![0, 0, 0, 0, 0, 0, -1, 2],
    ];
    HalfIntegralMatrix::from_two_f(m).expect("E8 Gram matrix is valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn a3() -> HalfIntegralMatrix {
        HalfIntegralMatrix::parse_row_string("2 1; 1 2").unwrap()
    }

    #[test]
    fn validation_rejects_bad_input() {
        assert!(matches!(
            HalfIntegralMatrix::parse_row_string("2 1; 1 3"),
            Err(Error::InvalidMatrix(_))
        ));
        assert!(matches!(
            HalfIntegralMatrix::parse_row_string("2 1; 2 2"),
            Err(Error::InvalidMatrix(_))
        ));
        assert!(matches!(
            HalfIntegralMatrix::parse_row_string("2 3; 3 2"),
            Err(Error::NotPositiveDefinite)
        ));
        assert!(HalfIntegralMatrix::parse_row_string("2 x; 1 2").is_err());
    }

    #[test]
    fn determinant_examples() {
        assert_eq!(a3().det_two_f(), 3);
        assert_eq!(HalfIntegralMatrix::parse_row_string("2").unwrap().det_two_f(), 2);
        assert_eq!(e8_gram().det_two_f(), 1);
    }

    #[test]
    fn level_examples() {
        // 3 (2F)^{-1} = [[2,-1],[-1,2]] is the first half-integral multiple.
        assert_eq!(a3().level(), 3);
        // For 2F = (2): f * (1/2) is integral first at f = 2.
        assert_eq!(HalfIntegralMatrix::parse_row_string("2").unwrap().level(), 2);
        assert_eq!(e8_gram().level(), 1);
    }

    #[test]
    fn level_matches_brute_force_search() {
        let mats = [
            a3(),
            HalfIntegralMatrix::parse_row_string("2").unwrap(),
            HalfIntegralMatrix::parse_row_string("2 1; 1 4").unwrap(),
            HalfIntegralMatrix::parse_row_string("4 1; 1 6").unwrap(),
            e8_gram(),
        ];
        for f in &mats {
            let det = f.det_two_f() as i64;
            let adj = intmat::adjugate(f.two_f());
            let n = f.size();
            let brute = (1..=2 * det as u64)
                .find(|&cand| {
                    (0..n).all(|i| {
                        (0..n).all(|j| {
                            let num = cand as i128 * adj[i][j] as i128;
                            if i == j {
                                num % det as i128 == 0
                            } else {
                                (2 * num) % det as i128 == 0
                            }
                        })
                    })
                })
                .unwrap();
            assert_eq!(f.level(), brute);
        }
    }

    #[test]
    fn quarter_inv_quadratic_examples() {
        assert_eq!(a3().quarter_inv_quadratic(&[1, 0]), rat(1, 3));
        assert_eq!(a3().quarter_inv_quadratic(&[0, 0]), rat(0, 1));
        assert_eq!(
            HalfIntegralMatrix::parse_row_string("2").unwrap().quarter_inv_quadratic(&[1]),
            rat(1, 4)
        );
    }

    #[test]
    fn quarter_inv_is_well_defined_modulo_2f() {
        let f = a3();
        // Q(r + 2F m) - Q(r) must be an integer.
        for r in [[1, 0], [2, 1], [0, 2]] {
            for m in [[1, 0], [0, 1], [1, -1], [-2, 3]] {
                let shifted = [
                    r[0] + f.two_f()[0][0] * m[0] + f.two_f()[0][1] * m[1],
                    r[1] + f.two_f()[1][0] * m[0] + f.two_f()[1][1] * m[1],
                ];
                let diff = f.quarter_inv_quadratic(&shifted) - f.quarter_inv_quadratic(&r);
                assert!(crate::rational::is_integer(&diff), "difference {diff} not integral");
            }
        }
    }

    #[test]
    fn discriminant_module_examples() {
        let d = a3().discriminant_module().unwrap();
        assert_eq!(d.orders(), &[3]);
        let g = d.reduce_element(&[1]);
        assert_eq!(d.q_value(&g), rat(1, 3));

        let d2 = HalfIntegralMatrix::parse_row_string("2").unwrap().discriminant_module().unwrap();
        assert_eq!(d2.orders(), &[2]);
        assert_eq!(d2.q_value(&d2.reduce_element(&[1])), rat(1, 4));

        let de8 = e8_gram().discriminant_module().unwrap();
        assert_eq!(de8.order(), 1);
        assert!(de8.orders().is_empty());
    }

    #[test]
    fn coset_coordinates_are_stable_on_cosets() {
        let f = a3();
        let p = f.discriminant_presentation().unwrap();
        let r = [1i64, 0];
        let shifted = [1 + 2 * 1 + 1 * 1, 0 + 1 * 1 + 2 * 1]; // r + 2F (1,1)
        assert_eq!(p.coset_coords(&r), p.coset_coords(&shifted));
        let lifted = p.lift(&p.coset_coords(&r));
        assert_eq!(p.coset_coords(&lifted), p.coset_coords(&r));
    }

    #[test]
    fn json_round_trip() {
        let f = a3();
        let j = f.to_json();
        assert_eq!(HalfIntegralMatrix::from_json(&j).unwrap(), f);
    }
}
