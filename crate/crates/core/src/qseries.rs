//! Truncated exact q-expansions: lattice theta series, the odd Jacobi theta
//! function in sum and product form, the Dedekind eta function, the three
//! explicit forms of the smallest binary index, theta decomposition and
//! coefficient-level Jacobi-form constraint checks, plus numeric
//! transformation spot checks.
//!
//! Every series carries its truncation explicitly and products use the min
//! rule, so arithmetic never reads beyond what both factors guarantee.
//! Elliptic exponents live on a doubled lattice (integers standing for
//! half-integers) so the half-integral theta shares one representation with
//! the integral-index series.

use std::collections::BTreeMap;

use num_complex::Complex64;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::gram::HalfIntegralMatrix;
use crate::intmat;
use crate::rational::{is_integer, lcm_u64, rat, rat_int, to_f64, Rat};

/// A sparse exact q-series: rational exponents to rational coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct QSeries {
    coeffs: BTreeMap<Rat, Rat>,
    trunc: Rat,
}

impl QSeries {
    pub fn zero(trunc: Rat) -> Self {
        QSeries { coeffs: BTreeMap::new(), trunc }
    }

    pub fn one(trunc: Rat) -> Self {
        let mut s = QSeries::zero(trunc);
        s.add_term(Rat::zero(), Rat::one());
        s
    }

    pub fn truncation(&self) -> &Rat {
        &self.trunc
    }

    pub fn add_term(&mut self, exponent: Rat, c: Rat) {
        if c.is_zero() || exponent > self.trunc {
            return;
        }
        let entry = self.coeffs.entry(exponent.clone()).or_insert_with(Rat::zero);
        *entry += c;
        if entry.is_zero() {
            self.coeffs.remove(&exponent);
        }
    }

    pub fn coefficient(&self, exponent: &Rat) -> Rat {
        self.coeffs.get(exponent).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Rat, &Rat)> {
        self.coeffs.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn leading_exponent(&self) -> Option<&Rat> {
        self.coeffs.keys().next()
    }

    /// Smallest common denominator of all exponents.
    pub fn exponent_denominator(&self) -> u64 {
        self.coeffs
            .keys()
            .fold(1u64, |acc, e| lcm_u64(acc, crate::rational::denom_u64(e)))
    }

    pub fn neg(&self) -> QSeries {
        let mut s = QSeries::zero(self.trunc.clone());
        for (e, c) in &self.coeffs {
            s.coeffs.insert(e.clone(), -c.clone());
        }
        s
    }

    pub fn add(&self, other: &QSeries) -> QSeries {
        let trunc = self.trunc.clone().min(other.trunc.clone());
        let mut s = QSeries::zero(trunc);
        for (e, c) in self.coeffs.iter().chain(other.coeffs.iter()) {
            s.add_term(e.clone(), c.clone());
        }
        s
    }

    pub fn sub(&self, other: &QSeries) -> QSeries {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Rat) -> QSeries {
        let mut s = QSeries::zero(self.trunc.clone());
        for (e, v) in &self.coeffs {
            s.add_term(e.clone(), v * c);
        }
        s
    }

    /// Multiply by q^shift (moves the truncation window along).
    pub fn shift(&self, shift: &Rat) -> QSeries {
        let mut s = QSeries::zero(&self.trunc + shift);
        for (e, v) in &self.coeffs {
            s.add_term(e + shift, v.clone());
        }
        s
    }

    /// Product under the min-truncation rule; valid because all series here
    /// are supported in nonnegative exponents.
    pub fn mul(&self, other: &QSeries) -> QSeries {
        let trunc = self.trunc.clone().min(other.trunc.clone());
        let mut s = QSeries::zero(trunc);
        for (ea, ca) in &self.coeffs {
            if *ea > s.trunc {
                break;
            }
            for (eb, cb) in &other.coeffs {
                let e = ea + eb;
                if e > s.trunc {
                    break;
                }
                s.add_term(e, ca * cb);
            }
        }
        s
    }

    pub fn pow(&self, e: u32) -> QSeries {
        let mut acc = QSeries::one(self.trunc.clone());
        let mut base = self.clone();
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

    /// Numeric value at q corresponding to tau in the upper half plane.
    pub fn eval_at_tau(&self, tau: Complex64) -> Complex64 {
        let two_pi_i = Complex64::new(0.0, 2.0 * std::f64::consts::PI);
        self.coeffs
            .iter()
            .map(|(e, c)| (two_pi_i * to_f64(e) * tau).exp() * to_f64(c))
            .sum()
    }
}

/// The Dedekind eta function q^{1/24} prod_{n>=1} (1 - q^n), exact to the
/// requested truncation.
pub fn dedekind_eta(trunc: &Rat) -> QSeries {
    let inner_trunc = trunc - rat(1, 24);
    let mut s = QSeries::one(inner_trunc.clone());
    let nmax = inner_trunc.to_f64().unwrap_or(0.0).floor() as i64;
    for n in 1..=nmax {
        // multiply by (1 - q^n)
        s = s.sub(&s.shift(&rat_int(n)).truncate_to(&inner_trunc));
    }
    s.shift(&rat(1, 24))
}

impl QSeries {
    fn truncate_to(&self, trunc: &Rat) -> QSeries {
        let mut s = QSeries::zero(trunc.clone());
        for (e, c) in &self.coeffs {
            s.add_term(e.clone(), c.clone());
        }
        s
    }
}

/// A truncated Fourier expansion in q and n elliptic variables.  The vector
/// `r` of elliptic exponents is stored on a doubled lattice when `r_den = 2`,
/// so an entry r_j stands for the exponent r_j / r_den.
#[derive(Clone, Debug, PartialEq)]
pub struct FourierJacobiSeries {
    n_vars: usize,
    r_den: i64,
    coeffs: BTreeMap<(Rat, Vec<i64>), Rat>,
    trunc: Rat,
}

impl FourierJacobiSeries {
    pub fn zero(n_vars: usize, r_den: i64, trunc: Rat) -> Self {
        assert!(r_den == 1 || r_den == 2);
        FourierJacobiSeries { n_vars, r_den, coeffs: BTreeMap::new(), trunc }
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn r_denominator(&self) -> i64 {
        self.r_den
    }

    pub fn truncation(&self) -> &Rat {
        &self.trunc
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(Rat, Vec<i64>), &Rat)> {
        self.coeffs.iter()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add_term(&mut self, l: Rat, r: Vec<i64>, c: Rat) {
        assert_eq!(r.len(), self.n_vars);
        if c.is_zero() || l > self.trunc {
            return;
        }
        let key = (l, r);
        let entry = self.coeffs.entry(key.clone()).or_insert_with(Rat::zero);
        *entry += c;
        if entry.is_zero() {
            self.coeffs.remove(&key);
        }
    }

    /// Coefficient of q^l zeta^(r / r_den) with r given on this series' own
    /// doubled lattice.
    pub fn coefficient(&self, l: &Rat, r: &[i64]) -> Rat {
        self.coeffs
            .get(&(l.clone(), r.to_vec()))
            .cloned()
            .unwrap_or_else(Rat::zero)
    }

    fn promote_r_den(&self, new_den: i64) -> FourierJacobiSeries {
        assert!(new_den % self.r_den == 0);
        if new_den == self.r_den {
            return self.clone();
        }
        let f = new_den / self.r_den;
        let mut s = FourierJacobiSeries::zero(self.n_vars, new_den, self.trunc.clone());
        for ((l, r), c) in &self.coeffs {
            s.add_term(l.clone(), r.iter().map(|x| x * f).collect(), c.clone());
        }
        s
    }

    /// Demote the doubled lattice when every exponent is even.
    pub fn normalized(&self) -> FourierJacobiSeries {
        if self.r_den == 1
            || self
                .coeffs
                .keys()
                .any(|(_, r)| r.iter().any(|x| x % 2 != 0))
        {
            return self.clone();
        }
        let mut s = FourierJacobiSeries::zero(self.n_vars, 1, self.trunc.clone());
        for ((l, r), c) in &self.coeffs {
            s.add_term(l.clone(), r.iter().map(|x| x / 2).collect(), c.clone());
        }
        s
    }

    pub fn neg(&self) -> FourierJacobiSeries {
        let mut s = FourierJacobiSeries::zero(self.n_vars, self.r_den, self.trunc.clone());
        for ((l, r), c) in &self.coeffs {
            s.coeffs.insert((l.clone(), r.clone()), -c.clone());
        }
        s
    }

    pub fn add(&self, other: &FourierJacobiSeries) -> FourierJacobiSeries {
        assert_eq!(self.n_vars, other.n_vars);
        let den = num_integer::lcm(self.r_den, other.r_den);
        let a = self.promote_r_den(den);
        let b = other.promote_r_den(den);
        let trunc = a.trunc.clone().min(b.trunc.clone());
        let mut s = FourierJacobiSeries::zero(self.n_vars, den, trunc);
        for ((l, r), c) in a.coeffs.iter().chain(b.coeffs.iter()) {
            s.add_term(l.clone(), r.clone(), c.clone());
        }
        s
    }

    pub fn sub(&self, other: &FourierJacobiSeries) -> FourierJacobiSeries {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &FourierJacobiSeries) -> FourierJacobiSeries {
        assert_eq!(self.n_vars, other.n_vars);
        let den = num_integer::lcm(self.r_den, other.r_den);
        let a = self.promote_r_den(den);
        let b = other.promote_r_den(den);
        let trunc = a.trunc.clone().min(b.trunc.clone());
        let terms: Vec<((Rat, Vec<i64>), Rat)> = a.coeffs.into_iter().collect();
        let merged = crate::par::fold_merge(
            &terms,
            || BTreeMap::<(Rat, Vec<i64>), Rat>::new(),
            |mut acc, ((la, ra), ca)| {
                for ((lb, rb), cb) in &b.coeffs {
                    let l = la + lb;
                    if l > trunc {
                        break;
                    }
                    let r: Vec<i64> = ra.iter().zip(rb).map(|(x, y)| x + y).collect();
                    let entry = acc.entry((l, r)).or_insert_with(Rat::zero);
                    *entry += ca * cb;
                }
                acc
            },
            |mut x, y| {
                for (k, v) in y {
                    let entry = x.entry(k).or_insert_with(Rat::zero);
                    *entry += v;
                }
                x
            },
        );
        let mut s = FourierJacobiSeries::zero(self.n_vars, den, trunc);
        for ((l, r), c) in merged {
            if !c.is_zero() {
                s.coeffs.insert((l, r), c);
            }
        }
        s
    }

    /// Multiply by a pure q-series.
    pub fn mul_q(&self, q: &QSeries) -> FourierJacobiSeries {
        let trunc = self.trunc.clone().min(q.trunc.clone());
        let mut s = FourierJacobiSeries::zero(self.n_vars, self.r_den, trunc);
        for ((la, r), ca) in &self.coeffs {
            for (lb, cb) in q.terms() {
                let l = la + lb;
                if l > s.trunc {
                    break;
                }
                s.add_term(l, r.clone(), ca * cb);
            }
        }
        s
    }

    /// Reinterpret the elliptic exponents through an integer map, e.g. to
    /// embed a one-variable series into more variables or substitute
    /// zeta -> zeta_1 zeta_2.
    pub fn map_r(&self, n_vars: usize, f: impl Fn(&[i64]) -> Vec<i64>) -> FourierJacobiSeries {
        let mut s = FourierJacobiSeries::zero(n_vars, self.r_den, self.trunc.clone());
        for ((l, r), c) in &self.coeffs {
            let rr = f(r);
            assert_eq!(rr.len(), n_vars);
            s.add_term(l.clone(), rr, c.clone());
        }
        s
    }

    /// Numeric value at (tau, z).
    pub fn eval(&self, tau: Complex64, z: &[Complex64]) -> Complex64 {
        assert_eq!(z.len(), self.n_vars);
        let two_pi_i = Complex64::new(0.0, 2.0 * std::f64::consts::PI);
        let den = self.r_den as f64;
        self.coeffs
            .iter()
            .map(|((l, r), c)| {
                let mut phase = tau * to_f64(l);
                for (rj, zj) in r.iter().zip(z) {
                    phase += *zj * (*rj as f64 / den);
                }
                (two_pi_i * phase).exp() * to_f64(c)
            })
            .sum()
    }
}

/// All lattice points r = x mod 2F Z^n with (1/4) F^{-1}[r] <= bound.
/// Exact: the box radius per coordinate comes from r_i^2 <= 4 * bound * F_ii
/// and membership is checked through the adjugate divisibility test.
pub fn coset_lattice_points(
    f: &HalfIntegralMatrix,
    x: &[i64],
    bound: &Rat,
) -> Vec<Vec<i64>> {
    let n = f.size();
    assert_eq!(x.len(), n);
    if bound.is_negative() {
        return Vec::new();
    }
    let det = f.det_two_f() as i128;
    let adj = intmat::adjugate(f.two_f());
    let b = to_f64(bound);
    let radii: Vec<i64> = (0..n)
        .map(|i| ((4.0 * b * (f.two_f()[i][i] as f64 / 2.0)).sqrt().floor() as i64) + 1)
        .collect();
    let mut out = Vec::new();
    let mut r = vec![0i64; n];
    fn rec(
        i: usize,
        n: usize,
        radii: &[i64],
        r: &mut Vec<i64>,
        f: &HalfIntegralMatrix,
        x: &[i64],
        adj: &intmat::IMat,
        det: i128,
        bound: &Rat,
        out: &mut Vec<Vec<i64>>,
    ) {
        if i == n {
            let diff: Vec<i64> = r.iter().zip(x).map(|(a, b)| a - b).collect();
            let congruent = (0..n).all(|row| {
                let s: i128 = (0..n).map(|c| adj[row][c] as i128 * diff[c] as i128).sum();
                s % det == 0
            });
            if congruent && f.quarter_inv_quadratic(r) <= *bound {
                out.push(r.clone());
            }
            return;
        }
        for v in -radii[i]..=radii[i] {
            r[i] = v;
            rec(i + 1, n, radii, r, f, x, adj, det, bound, out);
        }
    }
    rec(0, n, &radii, &mut r, f, x, &adj, det, bound, &mut out);
    out.sort();
    out
}

/// Theta series of the coset x + 2F Z^n: sum of q^{(1/4)F^{-1}[r]} zeta^r.
pub fn theta_f_x(f: &HalfIntegralMatrix, x: &[i64], trunc: &Rat) -> FourierJacobiSeries {
    let mut s = FourierJacobiSeries::zero(f.size(), 1, trunc.clone());
    for r in coset_lattice_points(f, x, trunc) {
        let l = f.quarter_inv_quadratic(&r);
        s.add_term(l, r, Rat::one());
    }
    s
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ThetaForm {
    Sum,
    Product,
}

/// The odd theta function as a series in q^{1/8} and half-integral powers of
/// zeta: either the signed character sum or the triple product.
pub fn jacobi_theta(trunc: &Rat, form: ThetaForm) -> FourierJacobiSeries {
    match form {
        ThetaForm::Sum => {
            let mut s = FourierJacobiSeries::zero(1, 2, trunc.clone());
            let nmax = (8.0 * to_f64(trunc)).sqrt().floor() as i64 + 1;
            for m in -nmax..=nmax {
                if m % 2 == 0 {
                    continue;
                }
                let sign = if m.rem_euclid(4) == 1 { 1 } else { -1 };
                s.add_term(rat(m * m, 8), vec![m], rat_int(sign));
            }
            s
        }
        ThetaForm::Product => {
            // q^{1/8} (zeta^{1/2} - zeta^{-1/2}) prod (1-q^n)(1-q^n zeta)(1-q^n zeta^{-1})
            let mut s = FourierJacobiSeries::zero(1, 2, trunc.clone() - rat(1, 8));
            s.add_term(Rat::zero(), vec![1], Rat::one());
            s.add_term(Rat::zero(), vec![-1], rat_int(-1));
            let nmax = to_f64(&(trunc - rat(1, 8))).floor() as i64;
            for m in 1..=nmax {
                for zexp in [0i64, 2, -2] {
                    let mut factor =
                        FourierJacobiSeries::zero(1, 2, trunc.clone() - rat(1, 8));
                    factor.add_term(Rat::zero(), vec![0], Rat::one());
                    factor.add_term(rat_int(m), vec![zexp], rat_int(-1));
                    s = s.mul(&factor);
                }
            }
            // shift by q^{1/8}
            let mut out = FourierJacobiSeries::zero(1, 2, trunc.clone());
            for ((l, r), c) in s.coeffs {
                out.add_term(l + rat(1, 8), r, c);
            }
            out
        }
    }
}

/// The weight-nine form of the smallest binary index: the product of three
/// theta factors (in z1, z1 + z2, z2) and the fifteenth power of eta.
pub fn psi9(trunc: &Rat) -> FourierJacobiSeries {
    let t = jacobi_theta(trunc, ThetaForm::Sum);
    let t1 = t.map_r(2, |r| vec![r[0], 0]);
    let t12 = t.map_r(2, |r| vec![r[0], r[0]]);
    let t2 = t.map_r(2, |r| vec![0, r[0]]);
    let eta15 = dedekind_eta(trunc).pow(15);
    t1.mul(&t12).mul(&t2).mul_q(&eta15).normalized()
}

/// Divisor-sum coefficients a_k(N) = sum_{st=N} s^{k-2} (chi3(s) - chi3(t)),
/// with the constant term a_k(0) given by the special L-value
/// (1/2) L(2-k, chi3) computed through generalized Bernoulli numbers.
pub fn a_k_coefficient(k: u32, n: u64) -> Rat {
    assert!(k >= 3);
    if n == 0 {
        // (1/2) L(2-k, chi3) = -B_{k-1, chi3} / (2(k-1))
        let m = k - 1;
        let b = bernoulli_chi3(m);
        return -b / rat(2 * m as i64, 1);
    }
    let chi3 = |x: u64| crate::dims::kronecker_symbol(x as i64, 3);
    let mut acc = Rat::zero();
    for s in 1..=n {
        if n % s == 0 {
            let t = n / s;
            let diff = chi3(s) - chi3(t);
            if diff != 0 {
                let mut pw = Rat::one();
                for _ in 0..k - 2 {
                    pw *= rat(s as i64, 1);
                }
                acc += pw * rat(diff, 1);
            }
        }
    }
    acc
}

/// Bernoulli numbers by the defining recurrence.
fn bernoulli_numbers(up_to: u32) -> Vec<Rat> {
    let mut b = vec![Rat::one()];
    for m in 1..=up_to as usize {
        // sum_{j=0}^{m} C(m+1, j) B_j = 0
        let mut acc = Rat::zero();
        for (j, bj) in b.iter().enumerate() {
            acc += rat(binomial(m as i64 + 1, j as i64), 1) * bj;
        }
        b.push(-acc / rat(m as i64 + 1, 1));
    }
    b
}

fn binomial(n: i64, k: i64) -> i64 {
    let mut r = 1i64;
    for i in 0..k {
        r = r * (n - i) / (i + 1);
    }
    r
}

/// Generalized Bernoulli number for the quadratic character mod 3.
fn bernoulli_chi3(m: u32) -> Rat {
    let b = bernoulli_numbers(m);
    let bernoulli_poly_at = |x: Rat| -> Rat {
        // B_m(x) = sum_j C(m, j) B_j x^{m-j}
        let mut acc = Rat::zero();
        for j in 0..=m {
            let mut pw = Rat::one();
            for _ in 0..(m - j) {
                pw *= &x;
            }
            acc += rat(binomial(m as i64, j as i64), 1) * &b[j as usize] * pw;
        }
        acc
    };
    // 3^{m-1} (chi(1) B_m(1/3) + chi(2) B_m(2/3))
    let mut p3 = Rat::one();
    for _ in 0..m - 1 {
        p3 *= rat(3, 1);
    }
    p3 * (bernoulli_poly_at(rat(1, 3)) - bernoulli_poly_at(rat(2, 3)))
}

/// The explicit weight-4 and weight-6 forms of the smallest binary index:
/// c(n, (a, b)) = nu * a_k(3n - a^2 + ab - b^2) over the Fourier support
/// 3n >= a^2 - ab + b^2, with nu = 1/2 or 1 for norm 1 or 0 mod 3.
pub fn psi_k(k: u32, trunc: &Rat) -> FourierJacobiSeries {
    assert!(k == 4 || k == 6, "only the weight 4 and 6 forms are defined");
    let mut s = FourierJacobiSeries::zero(2, 1, trunc.clone());
    let nmax = to_f64(trunc).floor() as i64;
    let reach = ((3 * nmax.max(0)) as f64 / 0.75).sqrt().floor() as i64 + 1;
    for n in 0..=nmax {
        for a in -reach..=reach {
            for b in -reach..=reach {
                let norm = a * a - a * b + b * b;
                if 3 * n < norm {
                    continue;
                }
                let nu = match norm.rem_euclid(3) {
                    0 => Rat::one(),
                    1 => rat(1, 2),
                    _ => unreachable!("x^2 - xy + y^2 is never 2 mod 3"),
                };
                let c = nu * a_k_coefficient(k, (3 * n - norm) as u64);
                s.add_term(rat_int(n), vec![a, b], c);
            }
        }
    }
    s
}

/// Split a series into its theta components: coefficients c(l, r) land in
/// the component of the coset of r at exponent l - (1/4)F^{-1}[r].
/// Inconsistent coefficients across representatives are an error: the input
/// is then not a Jacobi-form expansion for this index.
pub fn theta_decomposition(
    phi: &FourierJacobiSeries,
    f: &HalfIntegralMatrix,
) -> Result<BTreeMap<Vec<i64>, QSeries>> {
    if phi.n_vars != f.size() {
        return Err(Error::InconsistentCoefficients(format!(
            "series has {} elliptic variables, index has rank {}",
            phi.n_vars,
            f.size()
        )));
    }
    if phi.r_den != 1 {
        return Err(Error::InconsistentCoefficients(
            "half-integral elliptic exponents do not match an integral index".into(),
        ));
    }
    let pres = f.discriminant_presentation()?;
    let module = &pres.module;
    // Component truncation: exponents up to trunc minus the coset minimum.
    let mut mins: BTreeMap<Vec<i64>, Rat> = BTreeMap::new();
    for x in module.elements() {
        let lift = pres.lift(&x.0);
        let reps = coset_lattice_points(f, &lift, phi.truncation());
        let min = reps
            .iter()
            .map(|r| f.quarter_inv_quadratic(r))
            .min()
            .unwrap_or_else(|| phi.truncation().clone());
        mins.insert(x.0.clone(), min);
    }
    let mut components: BTreeMap<Vec<i64>, QSeries> = mins
        .iter()
        .map(|(x, min)| (x.clone(), QSeries::zero(phi.truncation() - min)))
        .collect();
    for ((l, r), c) in &phi.coeffs {
        let coords = pres.coset_coords(r);
        let offset = l - f.quarter_inv_quadratic(r);
        let h = components.get_mut(&coords).expect("coset enumerated");
        let existing = h.coefficient(&offset);
        if existing.is_zero() {
            h.add_term(offset, c.clone());
        } else if existing != *c {
            return Err(Error::InconsistentCoefficients(format!(
                "coefficient at q^{} zeta^{:?} disagrees with its coset class",
                crate::rational::format_rat(l),
                r
            )));
        }
    }
    // Nonzero class values must be matched by every representative inside
    // the truncation; a missing (= zero) coefficient is a disagreement.
    for (coords, h) in &components {
        let lift = pres.lift(coords);
        for (offset, value) in h.terms() {
            for r in coset_lattice_points(f, &lift, &(phi.truncation() - offset)) {
                let l = offset + f.quarter_inv_quadratic(&r);
                if phi.coefficient(&l, &r) != *value {
                    return Err(Error::InconsistentCoefficients(format!(
                        "representative {:?} at q^{} missing its class value",
                        r,
                        crate::rational::format_rat(&l),
                    )));
                }
            }
        }
    }
    Ok(components)
}

/// Counterexample-carrying report of the coefficient-level Jacobi-form
/// constraints.
#[derive(Clone, Debug)]
pub struct ConstraintReport {
    /// 4l - F^{-1}[r] >= 0 on the support.
    pub support_violation: Option<(Rat, Vec<i64>)>,
    /// c(l, r) depends only on the coset of r and l - (1/4)F^{-1}[r].
    pub invariance_violation: Option<String>,
    /// c(l, -r) = (-1)^k c(l, r).
    pub parity_violation: Option<(Rat, Vec<i64>)>,
}

impl ConstraintReport {
    pub fn pass(&self) -> bool {
        self.support_violation.is_none()
            && self.invariance_violation.is_none()
            && self.parity_violation.is_none()
    }
}

pub fn check_jacobi_constraints(
    phi: &FourierJacobiSeries,
    k: i64,
    f: &HalfIntegralMatrix,
) -> ConstraintReport {
    let mut report = ConstraintReport {
        support_violation: None,
        invariance_violation: None,
        parity_violation: None,
    };
    if phi.n_vars != f.size() || phi.r_den != 1 {
        report.invariance_violation = Some("series shape does not match the index".into());
        return report;
    }
    for ((l, r), c) in &phi.coeffs {
        if c.is_zero() {
            continue;
        }
        if f.quarter_inv_quadratic(r) > *l {
            report.support_violation = Some((l.clone(), r.clone()));
            break;
        }
    }
    report.invariance_violation = match theta_decomposition(phi, f) {
        Ok(_) => None,
        Err(Error::InconsistentCoefficients(msg)) => Some(msg),
        Err(e) => Some(e.to_string()),
    };
    let sign = if k % 2 == 0 { Rat::one() } else { -Rat::one() };
    for ((l, r), c) in &phi.coeffs {
        let neg_r: Vec<i64> = r.iter().map(|x| -x).collect();
        if phi.coefficient(l, &neg_r) != c * &sign {
            report.parity_violation = Some((l.clone(), r.clone()));
            break;
        }
    }
    report
}

/// Words in the two standard modular substitutions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModularGen {
    S,
    T,
}

/// Multiplier system for the numeric transformation check.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TransformMultiplier {
    One,
    /// (eta(A tau) / (w(tau) eta(tau)))^p, evaluated from the eta series.
    EtaQuotientPower(i32),
}

fn word_matrix(word: &[ModularGen]) -> [[i64; 2]; 2] {
    let mut m = [[1i64, 0], [0, 1]];
    for g in word {
        let gm = match g {
            ModularGen::S => [[0i64, -1], [1, 0]],
            ModularGen::T => [[1i64, 1], [0, 1]],
        };
        m = [
            [
                m[0][0] * gm[0][0] + m[0][1] * gm[1][0],
                m[0][0] * gm[0][1] + m[0][1] * gm[1][1],
            ],
            [
                m[1][0] * gm[0][0] + m[1][1] * gm[1][0],
                m[1][0] * gm[0][1] + m[1][1] * gm[1][1],
            ],
        ];
    }
    m
}

/// Metaplectic data of a word at tau: (w(tau), A tau), built by composition
/// (A, w)(B, v) = (AB, w(B tau) v(tau)) from w_S = principal sqrt(tau) and
/// w_T = 1.
fn word_metaplectic(word: &[ModularGen], tau: Complex64) -> (Complex64, Complex64) {
    if word.is_empty() {
        return (Complex64::new(1.0, 0.0), tau);
    }
    let (w_rest, tau_rest) = word_metaplectic(&word[1..], tau);
    match word[0] {
        ModularGen::S => (tau_rest.sqrt() * w_rest, -1.0 / tau_rest),
        ModularGen::T => (w_rest, tau_rest + 1.0),
    }
}

/// Numerically verify a transformation law |phi|_{k,F}(A,w) = mult * phi| at
/// one point, with the slash action
/// phi(A tau, z/(c tau + d)) w(tau)^{-2k} e(-c F[z]/(c tau + d)).
///
/// `index` is the symmetric rational matrix F of the slash action (so the
/// half-integral theta passes [[1/2]]).  2k must be integral so the
/// w-power is branch-free.  Errors out when the series truncation cannot
/// support the tolerance.
#[allow(clippy::too_many_arguments)]
pub fn numeric_transform_check(
    phi: &FourierJacobiSeries,
    word: &[ModularGen],
    k: &Rat,
    index: &[Vec<Rat>],
    multiplier: TransformMultiplier,
    tau: Complex64,
    z: &[Complex64],
    tol: f64,
) -> Result<bool> {
    assert!(tau.im > 0.0, "tau must be in the upper half plane");
    let two_k = k * rat(2, 1);
    assert!(is_integer(&two_k), "2k must be integral");
    let a = word_matrix(word);
    let (w_tau, a_tau) = word_metaplectic(word, tau);
    debug_assert!(
        (w_tau * w_tau - (tau * a[1][0] as f64 + a[1][1] as f64)).norm() < 1e-9,
        "branch bookkeeping: w^2 = c tau + d"
    );

    // Tail estimate at both evaluation points, including growth from the
    // elliptic directions.
    let y_min = tau.im.min(a_tau.im);
    let c_total: f64 = phi.coeffs.values().map(|c| to_f64(c).abs()).sum();
    let r_max = phi
        .coeffs
        .keys()
        .map(|(_, r)| r.iter().map(|x| x.abs()).max().unwrap_or(0))
        .max()
        .unwrap_or(0) as f64
        / phi.r_den as f64;
    let z_im_max = z.iter().map(|v| v.im.abs()).fold(0.0f64, f64::max).max(1.0);
    let t = to_f64(phi.truncation());
    let tail = c_total
        * (-2.0 * std::f64::consts::PI * (t * y_min - r_max * (phi.n_vars as f64) * z_im_max)).exp();
    if tail > tol / 10.0 {
        return Err(Error::InsufficientTruncation { tail, budget: tol / 10.0 });
    }

    let c = a[1][0] as f64;
    let d = a[1][1] as f64;
    let denom = tau * c + d;
    let z_moved: Vec<Complex64> = z.iter().map(|v| v / denom).collect();
    // F[z] = z^t F z
    let mut fz = Complex64::new(0.0, 0.0);
    for (i, row) in index.iter().enumerate() {
        for (j, fij) in row.iter().enumerate() {
            fz += z[i] * z[j] * to_f64(fij);
        }
    }
    let two_pi_i = Complex64::new(0.0, 2.0 * std::f64::consts::PI);
    let exp_factor = (two_pi_i * (-(fz * c) / denom)).exp();
    let w_pow = w_tau.powi(-crate::rational::numer_i64(&two_k) as i32);
    let lhs = phi.eval(a_tau, &z_moved) * w_pow * exp_factor;

    let mult = match multiplier {
        TransformMultiplier::One => Complex64::new(1.0, 0.0),
        TransformMultiplier::EtaQuotientPower(p) => {
            let eta = dedekind_eta(&(phi.truncation() + rat(4, 1)));
            let eps = eta.eval_at_tau(a_tau) / (w_tau * eta.eval_at_tau(tau));
            eps.powi(p)
        }
    };
    let rhs = mult * phi.eval(tau, z);
    Ok((lhs - rhs).norm() < tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::parse_rat;

    fn a3() -> HalfIntegralMatrix {
        HalfIntegralMatrix::parse_row_string("2 1; 1 2").unwrap()
    }

    #[test]
    fn eta_leading_terms_match_the_pentagonal_oracle() {
        // Oracle: sum_{j in Z} (-1)^j q^{j(3j-1)/2 + 1/24}.
        let trunc = rat(12, 1);
        let eta = dedekind_eta(&trunc);
        let mut oracle = QSeries::zero(trunc.clone());
        for j in -10i64..=10 {
            let e = rat(j * (3 * j - 1), 2) + rat(1, 24);
            if !e.is_negative() {
                oracle.add_term(e, rat_int(if j % 2 == 0 { 1 } else { -1 }));
            }
        }
        assert_eq!(eta, oracle);
        assert_eq!(eta.leading_exponent(), Some(&rat(1, 24)));
        assert_eq!(eta.coefficient(&rat(25, 24)), rat_int(-1));
        assert_eq!(eta.coefficient(&rat(49, 24)), rat_int(-1));
        assert_eq!(eta.exponent_denominator(), 24);
    }

    #[test]
    fn theta_sum_examples() {
        let t = jacobi_theta(&rat(11, 1), ThetaForm::Sum);
        // q^{1/8} zeta^{1/2} has coefficient +1 (doubled lattice: r = [1]).
        assert_eq!(t.coefficient(&rat(1, 8), &[1]), Rat::one());
        // n = 3 term: q^{9/8} zeta^{3/2} has coefficient -1.
        assert_eq!(t.coefficient(&rat(9, 8), &[3]), rat_int(-1));
        assert_eq!(t.coefficient(&rat(1, 8), &[-1]), rat_int(-1));
    }

    #[test]
    fn theta_sum_equals_triple_product() {
        let trunc = rat(10, 1) + rat(1, 8);
        let sum = jacobi_theta(&trunc, ThetaForm::Sum);
        let prod = jacobi_theta(&trunc, ThetaForm::Product);
        assert_eq!(sum, prod);
    }

    #[test]
    fn theta_coset_series_examples() {
        let f = a3();
        let t = theta_f_x(&f, &[1, 0], &rat(4, 1));
        assert_eq!(t.coefficient(&rat(1, 3), &[1, 0]), Rat::one());
        assert_eq!(*t.terms().next().unwrap().0 .0.clone().numer(), 1.into());
        // shifting the representative by 2F m leaves the series unchanged
        let shifted = theta_f_x(&f, &[1 + 2 + 1, 0 + 1 + 2], &rat(4, 1));
        assert_eq!(t, shifted);
        // x = 0 has constant term 1
        let t0 = theta_f_x(&f, &[0, 0], &rat(4, 1));
        assert_eq!(t0.coefficient(&Rat::zero(), &[0, 0]), Rat::one());
    }

    #[test]
    fn theta_coefficient_counts_match_box_scan() {
        let f = a3();
        let trunc = rat(6, 1);
        let t = theta_f_x(&f, &[1, 0], &trunc);
        // Oracle: count points in a crude box and bucket by exponent.
        let mut counts: BTreeMap<Rat, i64> = BTreeMap::new();
        for r0 in -20i64..=20 {
            for r1 in -20i64..=20 {
                let r = [r0, r1];
                let diff = [r0 - 1, r1];
                // 2F m = diff solvable: adj * diff divisible by det
                let ok = (2 * diff[0] - diff[1]) % 3 == 0 && (-diff[0] + 2 * diff[1]) % 3 == 0;
                if !ok {
                    continue;
                }
                let l = f.quarter_inv_quadratic(&r);
                if l <= trunc {
                    *counts.entry(l).or_insert(0) += 1;
                }
            }
        }
        for (l, count) in counts {
            let got: i64 = t
                .terms()
                .filter(|((ll, _), _)| *ll == l)
                .map(|(_, c)| c.to_f64().unwrap() as i64)
                .sum();
            assert_eq!(got, count, "exponent {l}");
        }
    }

    #[test]
    fn a_k_special_values() {
        assert_eq!(a_k_coefficient(4, 0), parse_rat("-1/9").unwrap());
        assert_eq!(a_k_coefficient(6, 0), parse_rat("1/3").unwrap());
        // (s,t) in {(1,2),(2,1)}: 1*(1-(-1)) + 4*((-1)-1) = -6
        assert_eq!(a_k_coefficient(4, 2), rat_int(-6));
    }

    #[test]
    fn psi9_structure() {
        let p9 = psi9(&rat(5, 1));
        // integral q-exponents and integral elliptic exponents
        assert_eq!(p9.r_denominator(), 1);
        assert!(p9.terms().all(|((l, _), _)| is_integer(l)));
        // lowest power is q^1
        let (first, _) = p9.terms().next().unwrap();
        assert_eq!(first.0, rat_int(1));
        // odd weight: antisymmetric under r -> -r
        for ((l, r), c) in p9.terms() {
            let neg: Vec<i64> = r.iter().map(|x| -x).collect();
            assert_eq!(p9.coefficient(l, &neg), -c.clone());
        }
    }

    #[test]
    fn psi9_vanishes_along_the_first_elliptic_direction() {
        // Substituting zeta_1 = 1 collapses every (l, r2) slice to zero.
        let p9 = psi9(&rat(6, 1));
        let mut slices: BTreeMap<(Rat, i64), Rat> = BTreeMap::new();
        for ((l, r), c) in p9.terms() {
            *slices.entry((l.clone(), r[1])).or_insert_with(Rat::zero) += c;
        }
        assert!(slices.values().all(|v| v.is_zero()));
    }

    #[test]
    fn psi9_theta_decomposition_is_odd() {
        let f = a3();
        let p9 = psi9(&rat(8, 1));
        let comps = theta_decomposition(&p9, &f).unwrap();
        assert_eq!(comps.len(), 3);
        let h0 = comps.get(&vec![0]).unwrap();
        let h1 = comps.get(&vec![1]).unwrap();
        let h2 = comps.get(&vec![2]).unwrap();
        assert!(h0.is_zero());
        assert!(!h1.is_zero());
        assert_eq!(h1.neg(), *h2);
    }

    #[test]
    fn psi_even_forms_pass_the_constraint_checks() {
        let f = a3();
        for k in [4u32, 6] {
            let p = psi_k(k, &rat(5, 1));
            let report = check_jacobi_constraints(&p, k as i64, &f);
            assert!(report.pass(), "k = {k}: {report:?}");
            let comps = theta_decomposition(&p, &f).unwrap();
            let h1 = comps.get(&vec![1]).unwrap();
            let h2 = comps.get(&vec![2]).unwrap();
            assert_eq!(h1, h2, "even weight components coincide");
        }
        // spot coefficient: c(0, 0) = a_4(0) = -1/9
        let p4 = psi_k(4, &rat(5, 1));
        assert_eq!(p4.coefficient(&Rat::zero(), &[0, 0]), parse_rat("-1/9").unwrap());
    }

    #[test]
    fn deliberate_mismatch_fails_the_checks() {
        // A sum of two coset thetas tagged with the wrong index: the
        // invariance check must produce a witness.
        let f = a3();
        let t0 = theta_f_x(&f, &[0, 0], &rat(4, 1));
        let t1 = theta_f_x(&f, &[1, 0], &rat(4, 1));
        let wrong = t0.add(&t1.mul_q(&QSeries::one(rat(4, 1)).scale(&rat(2, 1))));
        // c(l, r) now differs between cosets 0 and e at matched offsets only
        // if the class structure is broken; scale one coset only:
        let report = check_jacobi_constraints(&wrong, 1, &f);
        // the two cosets have disjoint support, so invariance within each
        // class still holds; break it harder by adding a lone term.
        assert!(report.invariance_violation.is_none());
        let mut broken = wrong.clone();
        broken.add_term(rat_int(2), vec![1, 0], rat(7, 1));
        let report = check_jacobi_constraints(&broken, 1, &f);
        assert!(report.invariance_violation.is_some());
        assert!(!report.pass());
    }

    #[test]
    fn support_violation_is_detected() {
        let f = a3();
        let mut phi = FourierJacobiSeries::zero(2, 1, rat(4, 1));
        phi.add_term(Rat::zero(), vec![1, 0], Rat::one()); // Q(r) = 1/3 > 0
        let report = check_jacobi_constraints(&phi, 2, &f);
        assert!(report.support_violation.is_some());
    }

    #[test]
    fn min_truncation_rule_under_multiplication() {
        let trunc_a = rat(6, 1);
        let trunc_b = rat(4, 1);
        let eta_a = dedekind_eta(&trunc_a);
        let eta_b = dedekind_eta(&trunc_b);
        let prod = eta_a.mul(&eta_b);
        assert_eq!(*prod.truncation(), trunc_b);
        // Recomputing at the lower truncation gives the same series.
        let low = dedekind_eta(&trunc_b).mul(&dedekind_eta(&trunc_b));
        assert_eq!(prod, low);
    }

    #[test]
    fn theta_satisfies_its_modular_transformations_numerically() {
        let trunc = rat(21, 1);
        let theta = jacobi_theta(&trunc, ThetaForm::Sum);
        let index = vec![vec![rat(1, 2)]];
        let k = rat(1, 2);
        let tau = Complex64::new(0.0, 1.0);
        let z = [Complex64::new(0.3, 0.1)];
        let ok_s = numeric_transform_check(
            &theta,
            &[ModularGen::S],
            &k,
            &index,
            TransformMultiplier::EtaQuotientPower(3),
            tau,
            &z,
            1e-8,
        )
        .unwrap();
        assert!(ok_s);
        let ok_t = numeric_transform_check(
            &theta,
            &[ModularGen::T],
            &k,
            &index,
            TransformMultiplier::EtaQuotientPower(3),
            tau,
            &z,
            1e-8,
        )
        .unwrap();
        assert!(ok_t);
        // Sanity: a wrong multiplier fails.
        let bad = numeric_transform_check(
            &theta,
            &[ModularGen::S],
            &k,
            &index,
            TransformMultiplier::One,
            tau,
            &z,
            1e-8,
        )
        .unwrap();
        assert!(!bad);
    }

    #[test]
    fn insufficient_truncation_is_reported() {
        let theta = jacobi_theta(&rat(1, 1), ThetaForm::Sum);
        let err = numeric_transform_check(
            &theta,
            &[ModularGen::S],
            &rat(1, 2),
            &[vec![rat(1, 2)]],
            TransformMultiplier::EtaQuotientPower(3),
            Complex64::new(0.0, 0.05),
            &[Complex64::new(0.0, 0.0)],
            1e-12,
        );
        assert!(matches!(err, Err(Error::InsufficientTruncation { .. })));
    }

    #[test]
    fn weight_one_theta_sum_picks_up_diagonal_phases_under_t() {
        // The sum of the three coset thetas: translating tau by one
        // multiplies each component by e(Q(x)); check numerically.
        let f = a3();
        let trunc = rat(16, 1);
        let tau = Complex64::new(0.0, 0.9);
        let z = [Complex64::new(0.21, 0.05), Complex64::new(-0.11, 0.07)];
        let t0 = theta_f_x(&f, &[0, 0], &trunc);
        let t1 = theta_f_x(&f, &[1, 0], &trunc);
        let t2 = theta_f_x(&f, &[-1, 0], &trunc);
        let tau_shift = tau + 1.0;
        let phase = CycNumPhase::e(rat(1, 3));
        let lhs = t0.eval(tau_shift, &z) + t1.eval(tau_shift, &z) + t2.eval(tau_shift, &z);
        let rhs = t0.eval(tau, &z) + phase * (t1.eval(tau, &z) + t2.eval(tau, &z));
        assert!((lhs - rhs).norm() < 1e-9);
    }

    struct CycNumPhase;
    impl CycNumPhase {
        fn e(x: Rat) -> Complex64 {
            let t = 2.0 * std::f64::consts::PI * to_f64(&x);
            Complex64::new(t.cos(), t.sin())
        }
    }
}
