//! Dimension computations for Jacobi forms of degree one with matrix index,
//! on the full modular group with trivial character.
//!
//! The main evaluator works term by term in exact arithmetic: the center
//! eigenspace of the conjugate Weil module is built explicitly, the two
//! elliptic traces are taken orbit by orbit, sqrt(3) is represented inside
//! Q(zeta_12), and the eigenvalue-exponent sum runs over every exponent
//! including zeros.  The total is asserted to be a nonnegative integer; a
//! fractional result is an error, never a rounding.
//!
//! A closed five-term formula for binary indices of prime determinant serves
//! as an independent second route to the same numbers.

use std::collections::HashMap;
use std::sync::{OnceLock, RwLock};

use num_traits::{Signed, ToPrimitive, Zero};

use crate::cyclotomic::CycNum;
use crate::error::{Error, Result};
use crate::gram::HalfIntegralMatrix;
use crate::rational::{is_integer, rat, Rat};
use crate::weil::{build_weil, invariants, iota_fixed_invariants};

/// One evaluated weight: the dimension and the four exact term values
/// (main, S-trace, ST-trace, eigenvalue-exponent sum), which add up to the
/// dimension exactly.
#[derive(Clone, Debug, PartialEq)]
pub struct DimResult {
    pub k: i64,
    pub value: u64,
    pub term_main: Rat,
    pub term_s: Rat,
    pub term_st: Rat,
    pub term_lambda: Rat,
}

impl DimResult {
    pub fn terms(&self) -> [&Rat; 4] {
        [&self.term_main, &self.term_s, &self.term_st, &self.term_lambda]
    }
}

fn rational_or_error(v: &CycNum, which: &'static str) -> Result<Rat> {
    v.as_rational().ok_or_else(|| Error::NonRationalTerm {
        which,
        value: format!("{v}"),
    })
}

/// dim J_{k,F} for k >= n/2 + 2, evaluated exactly.
pub fn dimension_formula(f: &HalfIntegralMatrix, k: i64) -> Result<DimResult> {
    let n = f.size() as i64;
    if 2 * k < n + 4 {
        return Err(Error::WeightOutOfRange { k, min: format!("{n}/2 + 2") });
    }
    let module = f.discriminant_module()?;
    let w = build_weil(&module)?;
    let x = w.z_eigenspace(n - 2 * k);
    let dim_x = rat(x.dim as i64, 1);

    // (k - n/2 - 1)/12 * dim X
    let term_main = rat(2 * k - n - 2, 24) * &dim_x;

    // (1/4) Re( e((2k - n)/8) tr(S* | X) )
    let phase_s = CycNum::root_of_unity(2 * k - n, 8);
    let tr_s = w.conj_s_trace_on(x.kind);
    let re_s = phase_s.mul(&tr_s).real_part();
    let term_s = rational_or_error(&re_s, "order-four elliptic")? * rat(1, 4);

    // (2/(3 sqrt 3)) Re( e((2k - n + 1)/12) tr(ST* | X) ) = (2 sqrt 3 / 9) Re(...)
    let phase_st = CycNum::root_of_unity(2 * k - n + 1, 12);
    let tr_st = w.conj_st_trace_on(x.kind);
    let re_st = phase_st.mul(&tr_st).real_part();
    let sqrt3 = CycNum::root_of_unity(1, 12).sub(&CycNum::root_of_unity(5, 12));
    let term_st = rational_or_error(&re_st.mul(&sqrt3), "order-six elliptic")? * rat(2, 9);

    // -(sum over all exponents, zeros included, of (lambda - 1/2))
    let term_lambda: Rat = w
        .lambda_exponents(x.kind)
        .iter()
        .map(|l| rat(1, 2) - l)
        .sum();

    let total = &term_main + &term_s + &term_st + &term_lambda;
    if !is_integer(&total) || total.is_negative() {
        return Err(Error::NonIntegerDimension {
            total: crate::rational::format_rat(&total),
        });
    }
    let value = total.numer().to_u64().expect("dimension fits u64");
    Ok(DimResult { k, value, term_main, term_s, term_st, term_lambda })
}

/// Kronecker symbol (a|n) for n >= 1 with the standard conventions
/// ((-4 | even) = 0 and so on).
pub fn kronecker_symbol(a: i64, n: i64) -> i64 {
    assert!(n >= 1);
    if n == 1 {
        return 1;
    }
    let mut n = n;
    let mut result = 1i64;
    let mut twos = 0u32;
    while n % 2 == 0 {
        n /= 2;
        twos += 1;
    }
    if twos > 0 {
        if a % 2 == 0 {
            return 0;
        }
        let a8 = a.rem_euclid(8);
        let k2 = if a8 == 1 || a8 == 7 { 1 } else { -1 };
        if twos % 2 == 1 {
            result *= k2;
        }
    }
    // Jacobi symbol over the odd part.
    let mut a = a.rem_euclid(n);
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            let n8 = n % 8;
            if n8 == 3 || n8 == 5 {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            result = -result;
        }
        a %= n;
    }
    if n == 1 {
        result
    } else {
        0
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            return false;
        }
        p += 1;
    }
    true
}

fn class_number_cache() -> &'static RwLock<HashMap<u64, u64>> {
    static CACHE: OnceLock<RwLock<HashMap<u64, u64>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Class number of the imaginary quadratic field of discriminant -p for a
/// prime p = 3 mod 4, p > 3, counted by enumerating reduced forms (a, b, c)
/// with b^2 - 4ac = -p, |b| <= a <= c, and b >= 0 on the boundary cases.
pub fn class_number(p: u64) -> Result<u64> {
    if !is_prime(p) || p % 4 != 3 || p == 3 {
        return Err(Error::InvalidPrime(p));
    }
    if let Some(&h) = class_number_cache().read().unwrap().get(&p) {
        return Ok(h);
    }
    let mut count = 0u64;
    let bmax = ((p / 3) as f64).sqrt() as i64 + 1;
    for b in -bmax..=bmax {
        if (b * b) as u64 > p / 3 {
            continue;
        }
        if (b * b + p as i64) % 4 != 0 {
            continue;
        }
        let m = ((b * b + p as i64) / 4) as u64;
        let mut a = b.unsigned_abs().max(1);
        while a * a <= m {
            if m % a == 0 {
                let c = m / a;
                // reduced: |b| <= a <= c with b >= 0 when |b| = a or a = c
                if b.unsigned_abs() <= a {
                    let boundary = b.unsigned_abs() == a || a == c;
                    if !(boundary && b < 0) {
                        count += 1;
                    }
                }
            }
            a += 1;
        }
    }
    class_number_cache().write().unwrap().insert(p, count);
    Ok(count)
}

/// The closed formula for dim J_{k,F} with binary F, det(2F) = p prime,
/// k >= 3, including the p = 3 variants: the whole third term is replaced by
/// a period-six table and h(3) = 1/3.
pub fn binary_prime_dim(p: u64, k: i64) -> Result<u64> {
    if !is_prime(p) || p % 4 != 3 {
        return Err(Error::InvalidPrime(p));
    }
    if k < 3 {
        return Err(Error::WeightOutOfRange { k, min: "3".into() });
    }
    let sign_k = if k % 2 == 0 { 1i64 } else { -1 };
    let t1 = rat(k - 2, 12) * rat(p as i64 + sign_k, 2);
    let t2 = -rat(1, 4)
        * rat(kronecker_symbol(-4, k - 2), 1)
        * rat(kronecker_symbol(-2, p as i64), 1);
    let t3 = if p == 3 {
        let table = [
            rat(0, 1),
            rat(0, 1),
            rat(-1, 3),
            rat(1, 3),
            rat(1, 3),
            rat(-1, 3),
        ];
        table[k.rem_euclid(6) as usize].clone()
    } else {
        -rat(1, 3)
            * rat(kronecker_symbol(k - 2, 3), 1)
            * rat(kronecker_symbol(p as i64, 3) + sign_k, 2)
    };
    let t4 = if p == 3 {
        -rat(1, 6) // -h(3)/2 with h(3) = 1/3
    } else {
        -rat(class_number(p)? as i64, 2)
    };
    let t5 = rat(1 + sign_k, 4);
    let total = t1 + t2 + t3 + t4 + t5;
    if !is_integer(&total) || total.is_negative() {
        return Err(Error::NonIntegerDimension {
            total: crate::rational::format_rat(&total),
        });
    }
    Ok(total.numer().to_u64().expect("dimension fits u64"))
}

/// dim J_{n/2, F} for even rank: the invariant dimension of W(D_F).
pub fn singular_weight_dim(f: &HalfIntegralMatrix) -> Result<u64> {
    let n = f.size();
    if n % 2 != 0 {
        return Err(Error::OddRank { n });
    }
    Ok(invariants(&f.discriminant_module()?)?.dim as u64)
}

fn is_squarefree(n: u64) -> bool {
    let mut n = n;
    let mut p = 2u64;
    while p * p <= n {
        if n % (p * p) == 0 {
            return false;
        }
        while n % p == 0 {
            n /= p;
        }
        p += 1;
    }
    true
}

/// dim J_{(n+1)/2, F} for odd rank: the sum over l | m with m/l squarefree of
/// the involution-fixed invariant dimensions of the extended modules.  Any
/// admissible m (level | 4m) gives the same value; m defaults to the smallest
/// admissible one.
pub fn critical_weight_dim(f: &HalfIntegralMatrix, m: Option<u64>) -> Result<u64> {
    let n = f.size();
    if n % 2 == 0 {
        return Err(Error::EvenRank { n });
    }
    let level = f.level();
    let m = match m {
        Some(m) => {
            if m == 0 || (4 * m) % level != 0 {
                return Err(Error::InadmissibleIndex { m, level });
            }
            m
        }
        None => level / num_integer::gcd(level, 4),
    };
    let mut total = 0u64;
    for l in 1..=m {
        if m % l == 0 && is_squarefree(m / l) {
            total += iota_fixed_invariants(l, f)? as u64;
        }
    }
    Ok(total)
}

/// How the weight-2 coefficient of the Poincare polynomial was resolved.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Weight2Inference {
    /// Nonnegativity of generator counts pins dim J_2 uniquely.
    Inferred(u64),
    /// Any value in the closed interval is consistent; reported, not chosen.
    Ambiguous { min: u64, max: u64 },
    /// No weight-2 hole in this rank (nothing to infer).
    NotApplicable,
}

#[derive(Clone, Debug)]
pub struct PoincareData {
    /// Coefficients of the degree-<=12 polynomial, weight-2 hole set to zero.
    pub ptilde: Vec<i64>,
    /// Value at x = 1; equals det(2F) for the full modular group.
    pub p_at_one: i64,
    /// Dimension table (k, dim); None marks the weights no formula covers.
    pub dims: Vec<(i64, Option<u64>)>,
    pub weight2: Weight2Inference,
    /// Weights whose dimension is not computable here (treated as zero in
    /// `ptilde`).
    pub unknown_weights: Vec<i64>,
}

/// Assemble the dimension table for 0 <= k <= k_max and the Poincare
/// polynomial, verifying the four-six recurrence on the tail.
pub fn hilbert_poincare(f: &HalfIntegralMatrix, k_max: i64) -> Result<PoincareData> {
    let n = f.size() as i64;
    if 2 * k_max < n + 28 {
        return Err(Error::WeightOutOfRange { k: k_max, min: format!("{n}/2 + 14") });
    }
    let mut dims: Vec<(i64, Option<u64>)> = Vec::new();
    let mut unknown = Vec::new();
    for k in 0..=k_max {
        let d = if 2 * k < n {
            Some(0)
        } else if n % 2 == 0 && 2 * k == n {
            Some(singular_weight_dim(f)?)
        } else if n % 2 == 0 && 2 * k == n + 2 {
            None
        } else if n % 2 == 1 && 2 * k == n + 1 {
            Some(critical_weight_dim(f, None)?)
        } else if n % 2 == 1 && 2 * k == n + 3 {
            None
        } else {
            Some(dimension_formula(f, k)?.value)
        };
        if d.is_none() {
            unknown.push(k);
        }
        dims.push((k, d));
    }
    let dhat = |k: i64| -> i64 {
        if k < 0 || k > k_max {
            0
        } else {
            dims[k as usize].1.unwrap_or(0) as i64
        }
    };
    // Tail recurrence d_k = d_{k-4} + d_{k-6} - d_{k-10}.
    for k in (n / 2 + 13)..=k_max {
        let expected = dhat(k - 4) + dhat(k - 6) - dhat(k - 10);
        if dims[k as usize].1.is_some() && dhat(k) != expected {
            return Err(Error::RecurrenceViolation { k, got: dhat(k), expected });
        }
    }
    // ptilde = (sum dhat_k x^k) (1 - x^4)(1 - x^6), degree <= 12.
    let coeff = |j: i64| dhat(j) - dhat(j - 4) - dhat(j - 6) + dhat(j - 10);
    let ptilde: Vec<i64> = (0..=12).map(coeff).collect();
    for j in 13..=k_max {
        if coeff(j) != 0 {
            return Err(Error::RecurrenceViolation {
                k: j,
                got: coeff(j),
                expected: 0,
            });
        }
    }
    let p_at_one: i64 = ptilde.iter().sum();
    // Weight-2 inference: p = ptilde + c (x^2 - x^6 - x^8 + x^12) needs all
    // coefficients nonnegative.
    let weight2 = if unknown == vec![2] {
        let lo = 0.max(-ptilde[12]);
        let hi = ptilde[6].min(ptilde[8]);
        if lo == hi {
            Weight2Inference::Inferred(lo as u64)
        } else {
            Weight2Inference::Ambiguous { min: lo as u64, max: hi as u64 }
        }
    } else {
        Weight2Inference::NotApplicable
    };
    Ok(PoincareData { ptilde, p_at_one, dims, weight2, unknown_weights: unknown })
}

/// Nonzero diagonal-generator exponents for the conjugate module of a
/// discriminant module, as a sorted multiset.  For binary prime determinant
/// these are (p - r)/p with r running over the quadratic residues.
pub fn nonzero_lambda_multiset(f: &HalfIntegralMatrix) -> Result<Vec<Rat>> {
    let module = f.discriminant_module()?;
    let w = build_weil(&module)?;
    let mut v: Vec<Rat> = w
        .lambda_exponents(crate::weil::EigenKind::Symmetric)
        .into_iter()
        .filter(|l| !l.is_zero())
        .collect();
    v.sort();
    Ok(v)
}

/// A binary even form of determinant p (p = 3 mod 4): 2F = [[2,1],[1,(p+1)/2]].
pub fn binary_matrix_of_prime_det(p: u64) -> Result<HalfIntegralMatrix> {
    if p % 4 != 3 {
        return Err(Error::InvalidPrime(p));
    }
    HalfIntegralMatrix::from_two_f(vec![
        vec![2, 1],
        vec![1, ((p + 1) / 2) as i64],
    ])
}
