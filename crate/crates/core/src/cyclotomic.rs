//! Exact arithmetic in cyclotomic fields Q(zeta_N).
//!
//! A [`CycNum`] is a coefficient vector over the rationals in the power basis
//! `1, zeta, ..., zeta^(phi(N)-1)` after reduction modulo the N-th cyclotomic
//! polynomial.  The polynomial is irreducible over Q, so the representation is
//! canonical within a fixed order and equality is coefficient-wise.  Binary
//! operations promote both operands to the lcm order; no global field is ever
//! fixed.
//!
//! Square roots of integers are never stored as radicals; callers carry
//! expressions like `G / sqrt(|M|)` as the pair `(G, |M|)` and work with
//! squared identities instead.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::rational::{lcm_u64, Rat};

/// Euler totient by trial-division factoring; orders stay at desk scale.
pub fn euler_phi(mut n: u64) -> u64 {
    assert!(n > 0);
    let mut phi = 1u64;
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut pk = 1;
            while n % p == 0 {
                n /= p;
                pk *= p;
            }
            phi *= pk - pk / p;
        }
        p += 1;
    }
    if n > 1 {
        phi *= n - 1;
    }
    phi
}

fn divisors(n: u64) -> Vec<u64> {
    let mut d = Vec::new();
    let mut i = 1;
    while i * i <= n {
        if n % i == 0 {
            d.push(i);
            if i != n / i {
                d.push(n / i);
            }
        }
        i += 1;
    }
    d.sort_unstable();
    d
}

/// Exact division of integer polynomials, `num / den` with monic `den`.
fn poly_div_exact(mut num: Vec<BigInt>, den: &[BigInt]) -> Vec<BigInt> {
    let dd = den.len() - 1;
    assert!(den[dd].is_one(), "divisor must be monic");
    let mut quot = vec![BigInt::zero(); num.len().saturating_sub(dd)];
    for j in (dd..num.len()).rev() {
        let c = std::mem::replace(&mut num[j], BigInt::zero());
        if c.is_zero() {
            continue;
        }
        quot[j - dd] = c.clone();
        for (i, den_i) in den.iter().enumerate().take(dd) {
            let t = den_i * &c;
            num[j - dd + i] -= t;
        }
    }
    assert!(num.iter().all(|c| c.is_zero()), "inexact polynomial division");
    quot
}

fn cyclo_cache() -> &'static RwLock<HashMap<u64, Arc<Vec<BigInt>>>> {
    static CACHE: OnceLock<RwLock<HashMap<u64, Arc<Vec<BigInt>>>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// The N-th cyclotomic polynomial, low-to-high integer coefficients.
///
/// Computed by dividing `x^N - 1` by the product of Phi_d over proper
/// divisors d of N.  Results are cached; the cache is read-concurrent with
/// serialized insertion.
pub fn cyclotomic_poly(n: u64) -> Arc<Vec<BigInt>> {
    if let Some(p) = cyclo_cache().read().unwrap().get(&n) {
        return p.clone();
    }
    let poly = if n == 1 {
        vec![BigInt::from(-1), BigInt::one()]
    } else {
        let mut num = vec![BigInt::zero(); n as usize + 1];
        num[0] = BigInt::from(-1);
        num[n as usize] = BigInt::one();
        let mut cur = num;
        for d in divisors(n) {
            if d == n {
                continue;
            }
            let phi_d = cyclotomic_poly(d);
            cur = poly_div_exact(cur, &phi_d);
        }
        cur
    };
    let arc = Arc::new(poly);
    cyclo_cache()
        .write()
        .unwrap()
        .entry(n)
        .or_insert_with(|| arc.clone())
        .clone()
}

/// An element of Q(zeta_N) in canonical form.
#[derive(Clone)]
pub struct CycNum {
    order: u64,
    coeffs: Vec<Rat>,
}

/// Mathematical equality: representations at different orders are compared
/// after promotion into the compositum.  Within a fixed order the canonical
/// form makes this coefficient-wise.
impl PartialEq for CycNum {
    fn eq(&self, other: &Self) -> bool {
        if self.order == other.order {
            return self.coeffs == other.coeffs;
        }
        let n = lcm_u64(self.order, other.order);
        self.promote(n).coeffs == other.promote(n).coeffs
    }
}

impl Eq for CycNum {}

impl CycNum {
    /// Reduce a dense coefficient vector (any length, exponent = index) into
    /// canonical form of the given order.
    fn reduce(order: u64, mut dense: Vec<Rat>) -> CycNum {
        let n = order as usize;
        // zeta^N = 1: fold exponents into 0..N first.
        if dense.len() > n {
            for j in (n..dense.len()).rev() {
                let c = std::mem::replace(&mut dense[j], Rat::zero());
                if !c.is_zero() {
                    dense[j % n] += c;
                }
            }
            dense.truncate(n);
        }
        let phi = euler_phi(order) as usize;
        let min_poly = cyclotomic_poly(order);
        let deg = min_poly.len() - 1;
        debug_assert_eq!(deg, phi);
        for j in (deg..dense.len()).rev() {
            let c = std::mem::replace(&mut dense[j], Rat::zero());
            if c.is_zero() {
                continue;
            }
            for (i, m) in min_poly.iter().enumerate().take(deg) {
                if !m.is_zero() {
                    let t = &c * Rat::from_integer(m.clone());
                    dense[j - deg + i] -= t;
                }
            }
        }
        dense.truncate(phi);
        dense.resize(phi, Rat::zero());
        CycNum { order, coeffs: dense }
    }

    pub fn zero() -> CycNum {
        CycNum { order: 1, coeffs: vec![Rat::zero()] }
    }

    pub fn one() -> CycNum {
        CycNum { order: 1, coeffs: vec![Rat::one()] }
    }

    pub fn from_rat(r: Rat) -> CycNum {
        CycNum { order: 1, coeffs: vec![r] }
    }

    pub fn from_int(n: i64) -> CycNum {
        CycNum::from_rat(Rat::from_integer(BigInt::from(n)))
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// True iff the canonical form has no zeta-components beyond the constant.
    pub fn is_rational(&self) -> bool {
        self.coeffs[1..].iter().all(|c| c.is_zero())
    }

    pub fn as_rational(&self) -> Option<Rat> {
        if self.is_rational() {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }

    pub fn is_one(&self) -> bool {
        self.as_rational().map(|r| r.is_one()).unwrap_or(false)
    }

    /// e(num/den) = exp(2 pi i num/den), period-reduced to its minimal order.
    pub fn root_of_unity(num: i64, den: u64) -> CycNum {
        assert!(den >= 1, "root_of_unity needs a positive denominator");
        let num = num.rem_euclid(den as i64) as u64;
        if num == 0 {
            return CycNum::one();
        }
        let g = num_integer::gcd(num, den);
        let order = den / g;
        let exp = (num / g) as usize;
        let mut dense = vec![Rat::zero(); exp + 1];
        dense[exp] = Rat::one();
        CycNum::reduce(order, dense)
    }

    /// e(x) for a rational exponent.
    pub fn root_of_unity_rat(x: &Rat) -> CycNum {
        let m = crate::rational::mod1(x);
        let num = m.numer().to_i64().expect("exponent numerator too large");
        let den = m.denom().to_u64().expect("exponent denominator too large");
        CycNum::root_of_unity(num, den)
    }

    /// Promote to lcm(order, n); helper for summation loops at a fixed level.
    pub fn promote_to_multiple(&self, n: u64) -> CycNum {
        self.promote(lcm_u64(self.order, n))
    }

    /// Embed into Q(zeta_new) where `order | new`.
    pub fn promote(&self, new_order: u64) -> CycNum {
        assert!(new_order % self.order == 0, "promotion requires order | new_order");
        if new_order == self.order {
            return self.clone();
        }
        let f = (new_order / self.order) as usize;
        let mut dense = vec![Rat::zero(); self.coeffs.len() * f];
        for (j, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                dense[j * f] = c.clone();
            }
        }
        CycNum::reduce(new_order, dense)
    }

    /// Express in Q(zeta_target) where `target | order`, if possible.
    ///
    /// Solves for coordinates over the promoted images of the target basis;
    /// promotion is injective so the solution, when it exists, is unique and
    /// `demote(promote(a)) = a`.
    pub fn demote(&self, target: u64) -> Result<CycNum> {
        if target == self.order {
            return Ok(self.clone());
        }
        assert!(self.order % target == 0, "demotion requires target | order");
        let phi_t = euler_phi(target) as usize;
        let phi_n = self.coeffs.len();
        let f = (self.order / target) as usize;
        // Columns: canonical form of zeta_target^i inside Q(zeta_order).
        let mut cols = Vec::with_capacity(phi_t);
        for i in 0..phi_t {
            let mut dense = vec![Rat::zero(); i * f + 1];
            dense[i * f] = Rat::one();
            cols.push(CycNum::reduce(self.order, dense).coeffs);
        }
        let mut aug: Vec<Vec<Rat>> = (0..phi_n)
            .map(|r| {
                let mut row: Vec<Rat> = cols.iter().map(|c| c[r].clone()).collect();
                row.push(self.coeffs[r].clone());
                row
            })
            .collect();
        // Gaussian elimination with consistency check.
        let mut pivot_rows = Vec::new();
        let mut r0 = 0;
        for c in 0..phi_t {
            let Some(pr) = (r0..phi_n).find(|&r| !aug[r][c].is_zero()) else {
                continue;
            };
            aug.swap(r0, pr);
            let inv = aug[r0][c].recip();
            for x in aug[r0].iter_mut() {
                *x *= &inv;
            }
            for r in 0..phi_n {
                if r != r0 && !aug[r][c].is_zero() {
                    let factor = aug[r][c].clone();
                    for x in 0..=phi_t {
                        let t = &aug[r0][x] * &factor;
                        aug[r][x] -= t;
                    }
                }
            }
            pivot_rows.push((r0, c));
            r0 += 1;
        }
        for r in r0..phi_n {
            if !aug[r][phi_t].is_zero() {
                return Err(Error::NotInSubfield { order: self.order, target });
            }
        }
        let mut coeffs = vec![Rat::zero(); phi_t];
        for (r, c) in pivot_rows {
            coeffs[c] = aug[r][phi_t].clone();
        }
        Ok(CycNum { order: target, coeffs })
    }

    /// Canonical form at the smallest order dividing `self.order` that
    /// contains the value.  Used for display and serialization.
    pub fn minimized(&self) -> CycNum {
        if let Some(r) = self.as_rational() {
            return CycNum::from_rat(r);
        }
        for d in divisors(self.order) {
            if d == self.order {
                break;
            }
            if let Ok(v) = self.demote(d) {
                return v;
            }
        }
        self.clone()
    }

    fn promoted_pair(&self, other: &CycNum) -> (CycNum, CycNum, u64) {
        let n = lcm_u64(self.order, other.order);
        (self.promote(n), other.promote(n), n)
    }

    pub fn add(&self, other: &CycNum) -> CycNum {
        let (mut a, b, n) = self.promoted_pair(other);
        for (x, y) in a.coeffs.iter_mut().zip(b.coeffs.iter()) {
            *x += y;
        }
        let _ = n;
        a
    }

    pub fn sub(&self, other: &CycNum) -> CycNum {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> CycNum {
        CycNum { order: self.order, coeffs: self.coeffs.iter().map(|c| -c.clone()).collect() }
    }

    pub fn scale(&self, r: &Rat) -> CycNum {
        if r.is_zero() {
            return CycNum::zero();
        }
        CycNum { order: self.order, coeffs: self.coeffs.iter().map(|c| c * r).collect() }
    }

    pub fn mul(&self, other: &CycNum) -> CycNum {
        // Rational factors need no promotion or reduction.
        if let Some(r) = self.as_rational() {
            return other.scale(&r);
        }
        if let Some(r) = other.as_rational() {
            return self.scale(&r);
        }
        let (a, b, n) = self.promoted_pair(other);
        let mut dense = vec![Rat::zero(); a.coeffs.len() + b.coeffs.len() - 1];
        for (i, x) in a.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.coeffs.iter().enumerate() {
                if !y.is_zero() {
                    dense[i + j] += x * y;
                }
            }
        }
        CycNum::reduce(n, dense)
    }

    /// Multiplicative inverse via the extended Euclidean algorithm against the
    /// minimal polynomial (irreducible, so any nonzero element is a unit).
    pub fn inv(&self) -> Result<CycNum> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if let Some(r) = self.as_rational() {
            return Ok(CycNum::from_rat(r.recip()));
        }
        let min_poly: Vec<Rat> = cyclotomic_poly(self.order)
            .iter()
            .map(|c| Rat::from_integer(c.clone()))
            .collect();
        let (g, u) = poly_ext_gcd(&self.coeffs, &min_poly);
        // g is a nonzero constant; scale u by 1/g.
        debug_assert!(g.len() == 1 && !g[0].is_zero());
        let ginv = g[0].recip();
        let dense: Vec<Rat> = u.iter().map(|c| c * &ginv).collect();
        Ok(CycNum::reduce(self.order, dense))
    }

    pub fn div(&self, other: &CycNum) -> Result<CycNum> {
        Ok(self.mul(&other.inv()?))
    }

    /// Field conjugation zeta -> zeta^(N-1); an involution fixing the
    /// maximal real subfield.
    pub fn conjugate(&self) -> CycNum {
        let n = self.order as usize;
        if n <= 2 {
            return self.clone();
        }
        let mut dense = vec![Rat::zero(); n];
        for (j, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                let e = if j == 0 { 0 } else { n - j };
                dense[e] += c;
            }
        }
        CycNum::reduce(self.order, dense)
    }

    /// (a + conj(a)) / 2; fixed by conjugation.
    pub fn real_part(&self) -> CycNum {
        self.add(&self.conjugate()).scale(&crate::rational::rat(1, 2))
    }

    pub fn pow(&self, e: u32) -> CycNum {
        let mut base = self.clone();
        let mut acc = CycNum::one();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Numeric embedding zeta_N -> exp(2 pi i / N).
    ///
    /// `precision_bits` is clamped to the 53 bits an f64 carries; the error is
    /// bounded by 2^(1-precision) times the sum of coefficient magnitudes.
    pub fn eval_complex(&self, precision_bits: u32) -> Complex64 {
        let _ = precision_bits.min(53);
        let n = self.order as f64;
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let theta = 2.0 * std::f64::consts::PI * (j as f64) / n;
            let cf = c.to_f64().expect("coefficient out of f64 range");
            acc += Complex64::new(theta.cos(), theta.sin()) * cf;
        }
        acc
    }
}

/// Extended gcd of polynomials over Q: returns (g, u) with u*a = g mod b.
/// Only the cofactor of `a` is tracked since callers reduce modulo `b`.
fn poly_ext_gcd(a: &[Rat], b: &[Rat]) -> (Vec<Rat>, Vec<Rat>) {
    fn trim(mut v: Vec<Rat>) -> Vec<Rat> {
        while v.len() > 1 && v.last().map(|c| c.is_zero()).unwrap_or(false) {
            v.pop();
        }
        v
    }
    fn is_zero_poly(v: &[Rat]) -> bool {
        v.iter().all(|c| c.is_zero())
    }
    let mut r0 = trim(a.to_vec());
    let mut r1 = trim(b.to_vec());
    let mut u0 = vec![Rat::one()];
    let mut u1 = vec![Rat::zero()];
    while !is_zero_poly(&r1) {
        // Divide r0 by r1.
        let mut rem = r0.clone();
        let d1 = r1.len() - 1;
        let lead = r1[d1].clone();
        let mut q = vec![Rat::zero(); rem.len().saturating_sub(d1)];
        for j in (d1..rem.len()).rev() {
            if rem[j].is_zero() {
                continue;
            }
            let c = &rem[j] / &lead;
            q[j - d1] = c.clone();
            for i in 0..=d1 {
                let t = &r1[i] * &c;
                rem[j - d1 + i] -= t;
            }
        }
        let rem = trim(rem);
        // u_next = u0 - q*u1
        let mut qu = vec![Rat::zero(); q.len() + u1.len() - 1];
        for (i, x) in q.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in u1.iter().enumerate() {
                if !y.is_zero() {
                    qu[i + j] += x * y;
                }
            }
        }
        let mut un = u0.clone();
        un.resize(un.len().max(qu.len()), Rat::zero());
        for (i, x) in qu.iter().enumerate() {
            un[i] -= x;
        }
        let un = trim(un);
        r0 = std::mem::replace(&mut r1, rem);
        u0 = std::mem::replace(&mut u1, un);
    }
    (r0, u0)
}

impl fmt::Debug for CycNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for CycNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = self.minimized();
        if v.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (j, c) in v.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let s = crate::rational::format_rat(c);
            if first {
                first = false;
            } else if !s.starts_with('-') {
                write!(f, " + ")?;
            } else {
                write!(f, " ")?;
            }
            if j == 0 {
                write!(f, "{s}")?;
            } else if s == "1" {
                write!(f, "z{}^{}", v.order, j)?;
            } else {
                write!(f, "{s}*z{}^{}", v.order, j)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, rat_int};

    fn e(num: i64, den: u64) -> CycNum {
        CycNum::root_of_unity(num, den)
    }

    #[test]
    fn cyclotomic_polys_are_the_classical_ones() {
        let as_i64 = |n: u64| -> Vec<i64> {
            cyclotomic_poly(n).iter().map(|c| c.to_i64().unwrap()).collect()
        };
        assert_eq!(as_i64(1), vec![-1, 1]);
        assert_eq!(as_i64(2), vec![1, 1]);
        assert_eq!(as_i64(3), vec![1, 1, 1]);
        assert_eq!(as_i64(4), vec![1, 0, 1]);
        assert_eq!(as_i64(6), vec![1, -1, 1]);
        assert_eq!(as_i64(12), vec![1, 0, -1, 0, 1]);
        assert_eq!(as_i64(7), vec![1; 7]);
        // First index with a coefficient outside {-1,0,1}.
        assert_eq!(as_i64(105)[7], -2);
    }

    #[test]
    fn roots_of_unity_basics() {
        assert_eq!(e(1, 2), CycNum::from_int(-1));
        assert_eq!(e(1, 1), CycNum::one());
        // minimal polynomial of zeta_3: 1 + z + z^2 = 0
        assert_eq!(e(1, 3).add(&e(2, 3)), CycNum::from_int(-1));
        // period reduction
        assert_eq!(e(5, 4), e(1, 4));
        assert_eq!(e(-1, 4), e(3, 4));
        assert_eq!(e(2, 8), e(1, 4));
    }

    #[test]
    fn i_squared_is_minus_one() {
        assert_eq!(e(1, 4).mul(&e(1, 4)), CycNum::from_int(-1));
    }

    #[test]
    fn inverse_law_for_roots() {
        let z = e(1, 5);
        assert!(z.inv().unwrap().mul(&z).is_one());
    }

    #[test]
    fn inverse_of_one_plus_zeta5_multiplies_back_to_one() {
        let a = CycNum::one().add(&e(1, 5));
        let inv = a.inv().unwrap();
        assert!(a.mul(&inv).is_one());
    }

    #[test]
    fn division_by_zero_is_an_error() {
        assert_eq!(CycNum::zero().inv(), Err(Error::DivisionByZero));
    }

    #[test]
    fn real_part_of_eighth_root() {
        let r = e(1, 8).real_part();
        assert_eq!(r, r.conjugate());
        let v = r.eval_complex(53);
        assert!((v.re - 2f64.sqrt() / 2.0).abs() < 1e-12);
        assert!(v.im.abs() < 1e-12);
    }

    #[test]
    fn real_part_of_rational_is_identity() {
        let x = CycNum::from_rat(rat(3, 7));
        assert_eq!(x.real_part(), x);
    }

    #[test]
    fn eval_complex_examples() {
        let v = CycNum::from_int(-1).eval_complex(53);
        assert!((v.re + 1.0).abs() < 1e-15 && v.im.abs() < 1e-15);
        let i = e(1, 4).eval_complex(53);
        assert!(i.re.abs() < 1e-15 && (i.im - 1.0).abs() < 1e-15);
        // Gauss sum of (Z/3, x^2/3): 1 + 2 e(-1/3) = -i sqrt(3)
        let g = CycNum::one().add(&e(-1, 3).scale(&rat_int(2)));
        let s = g.eval_complex(53) / 3f64.sqrt();
        assert!((s.re).abs() < 1e-12 && (s.im + 1.0).abs() < 1e-12);
    }

    #[test]
    fn promotion_round_trip() {
        let a = e(1, 3).scale(&rat(2, 5)).add(&CycNum::from_rat(rat(1, 7)));
        let up = a.promote(12);
        assert_eq!(up.order(), 12);
        assert_eq!(up.demote(3).unwrap(), a);
        assert_eq!(a.promote(6).demote(3).unwrap(), a);
    }

    #[test]
    fn demote_rejects_values_outside_subfield() {
        let z12 = e(1, 12);
        assert!(z12.demote(3).is_err());
        assert!(z12.demote(4).is_err());
        // but zeta_12^4 = zeta_3 lives downstairs
        assert_eq!(z12.pow(4).demote(3).unwrap(), e(1, 3));
    }

    #[test]
    fn sqrt3_as_difference_of_twelfth_roots() {
        let s3 = e(1, 12).sub(&e(5, 12));
        assert_eq!(s3.mul(&s3), CycNum::from_int(3));
        assert_eq!(s3, s3.conjugate());
    }

    #[test]
    fn mixed_order_equality() {
        assert_eq!(e(1, 2).promote(6), CycNum::from_int(-1));
        assert_eq!(e(3, 6), CycNum::from_int(-1));
        assert_eq!(e(2, 6), e(1, 3));
    }

    #[test]
    fn cache_is_safe_under_concurrent_access() {
        let handles: Vec<_> = (0..8)
            .map(|t| {
                std::thread::spawn(move || {
                    for n in 1..40u64 {
                        let p = cyclotomic_poly(n);
                        assert_eq!(p.len() as u64 - 1, euler_phi(n), "order {n} thread {t}");
                    }
                })
            })
            .collect();
        for h in handles {
            h.join().unwrap();
        }
    }
}
