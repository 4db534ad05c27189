//! Finite quadratic modules: a finite abelian group with a Q/Z-valued
//! quadratic form, presented on cyclic generators.
//!
//! The serialized presentation is the "q-gram": diagonal entries are the
//! values Q(g_i) of the quadratic form on generators, off-diagonal entries the
//! bilinear values B(g_i, g_j) = Q(g_i+g_j) - Q(g_i) - Q(g_j).  Construction
//! enforces the well-definedness congruences and nondegeneracy; all values are
//! normalized into [0, 1).
//!
//! Subgroup enumeration is a closure BFS with canonical element-list
//! deduplication.  Worst case is exponential; a hard bound keeps it at desk
//! scale where correctness matters more than cleverness.

use std::collections::BTreeSet;

use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::cyclotomic::CycNum;
use crate::error::{Error, Result};
use crate::gram::HalfIntegralMatrix;
use crate::intmat;
use crate::rational::{denom_u64, format_rat, is_integer, lcm_u64, mod1, parse_rat, rat, Rat};

/// Default cap for subgroup enumeration and isomorphism search.
pub const DEFAULT_ENUMERATION_BOUND: u64 = 2000;

/// Hard cap on module order for construction-time validation, which has to
/// enumerate elements to certify nondegeneracy.
const VALIDATION_BOUND: u64 = 100_000;

/// An element, componentwise residues against the cyclic orders.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Element(pub Vec<i64>);

/// A subgroup as a canonical sorted element list plus a generating set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subgroup {
    pub elements: Vec<Element>,
    pub generators: Vec<Element>,
}

impl Subgroup {
    pub fn order(&self) -> u64 {
        self.elements.len() as u64
    }

    pub fn contains(&self, x: &Element) -> bool {
        self.elements.binary_search(x).is_ok()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SubgroupKind {
    All,
    Isotropic,
    IsotropicSelfDual,
}

/// The sigma invariant carried without radicals: the Gauss sum
/// `G = sum_x e(-Q(x))` together with `|M|`, so that sigma = G / sqrt(|M|).
#[derive(Clone, Debug, PartialEq)]
pub struct SigmaInvariant {
    pub gauss_sum: CycNum,
    pub module_order: u64,
}

impl SigmaInvariant {
    /// Numeric value of sigma itself, for display and sign checks.
    pub fn eval(&self) -> num_complex::Complex64 {
        self.gauss_sum.eval_complex(53) / (self.module_order as f64).sqrt()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FiniteQuadraticModule {
    orders: Vec<u64>,
    q_gram: Vec<Vec<Rat>>,
    order: u64,
}

impl FiniteQuadraticModule {
    /// Build and validate a module from cyclic orders and its q-gram.
    pub fn new(orders: Vec<u64>, q_gram: Vec<Vec<Rat>>) -> Result<Self> {
        let s = orders.len();
        if q_gram.len() != s || q_gram.iter().any(|r| r.len() != s) {
            return Err(Error::InvalidModule(format!(
                "q_gram must be {s}x{s} to match the cyclic orders"
            )));
        }
        if let Some(&d) = orders.iter().find(|&&d| d < 2) {
            return Err(Error::InvalidModule(format!("cyclic order {d} < 2")));
        }
        let mut order: u64 = 1;
        for &d in &orders {
            order = order
                .checked_mul(d)
                .ok_or_else(|| Error::InvalidModule("module order overflows u64".into()))?;
        }
        if order > VALIDATION_BOUND {
            return Err(Error::InvalidModule(format!(
                "module order {order} exceeds validation bound {VALIDATION_BOUND}"
            )));
        }
        let q_gram: Vec<Vec<Rat>> = q_gram
            .iter()
            .map(|row| row.iter().map(mod1).collect())
            .collect();
        for i in 0..s {
            for j in 0..s {
                if i != j && q_gram[i][j] != q_gram[j][i] {
                    return Err(Error::InvalidModule(format!(
                        "bilinear values not symmetric at ({i},{j})"
                    )));
                }
            }
        }
        // Well-definedness: d_i * B(g_i, g_j) and d_i^2 * Q(g_i) integral,
        // with B(g_i, g_i) = 2 Q(g_i).
        for i in 0..s {
            let di = rat(orders[i] as i64, 1);
            let qi = &q_gram[i][i];
            if !is_integer(&(&di * &di * qi)) {
                return Err(Error::InvalidModule(format!(
                    "d_{i}^2 * Q(g_{i}) = {} is not integral",
                    format_rat(&(&di * &di * qi))
                )));
            }
            for j in 0..s {
                let b = if i == j { mod1(&(qi + qi)) } else { q_gram[i][j].clone() };
                if !is_integer(&(&di * &b)) {
                    return Err(Error::InvalidModule(format!(
                        "d_{i} * B(g_{i}, g_{j}) = {} is not integral",
                        format_rat(&(&di * &b))
                    )));
                }
            }
        }
        let m = FiniteQuadraticModule { orders, q_gram, order };
        // Nondegeneracy: the radical of B must be trivial.
        if let Some(x) = m.radical_witness() {
            return Err(Error::Degenerate(format!(
                "element {:?} pairs trivially with the whole module",
                x.0
            )));
        }
        Ok(m)
    }

    /// Cyclic module (Z/d, Q(g) = q).
    pub fn cyclic(d: u64, q: Rat) -> Result<Self> {
        FiniteQuadraticModule::new(vec![d], vec![vec![q]])
    }

    /// Hyperbolic plane (Z/q)^2 with Q(x, y) = xy/q.
    pub fn hyperbolic_plane(q: u64) -> Result<Self> {
        FiniteQuadraticModule::new(
            vec![q, q],
            vec![vec![Rat::zero(), rat(1, q as i64)], vec![rat(1, q as i64), Rat::zero()]],
        )
    }

    pub fn trivial() -> Self {
        FiniteQuadraticModule { orders: vec![], q_gram: vec![], order: 1 }
    }

    pub fn orders(&self) -> &[u64] {
        &self.orders
    }

    pub fn q_gram(&self) -> &[Vec<Rat>] {
        &self.q_gram
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn rank(&self) -> usize {
        self.orders.len()
    }

    pub fn zero_element(&self) -> Element {
        Element(vec![0; self.orders.len()])
    }

    pub fn reduce_element(&self, x: &[i64]) -> Element {
        Element(
            x.iter()
                .zip(&self.orders)
                .map(|(&a, &d)| a.rem_euclid(d as i64))
                .collect(),
        )
    }

    pub fn add_elements(&self, x: &Element, y: &Element) -> Element {
        Element(
            x.0.iter()
                .zip(&y.0)
                .zip(&self.orders)
                .map(|((&a, &b), &d)| (a + b).rem_euclid(d as i64))
                .collect(),
        )
    }

    pub fn neg_element(&self, x: &Element) -> Element {
        Element(
            x.0.iter()
                .zip(&self.orders)
                .map(|(&a, &d)| (-a).rem_euclid(d as i64))
                .collect(),
        )
    }

    pub fn scale_element(&self, k: i64, x: &Element) -> Element {
        Element(
            x.0.iter()
                .zip(&self.orders)
                .map(|(&a, &d)| (k as i128 * a as i128).rem_euclid(d as i128) as i64)
                .collect(),
        )
    }

    pub fn element_order(&self, x: &Element) -> u64 {
        let mut ord = 1u64;
        for (&a, &d) in x.0.iter().zip(&self.orders) {
            let g = num_integer::gcd(a.rem_euclid(d as i64) as u64, d);
            ord = lcm_u64(ord, d / g);
        }
        ord
    }

    /// All elements, odometer order with the first coordinate most
    /// significant; index 0 is the neutral element.  Direct sums therefore
    /// enumerate with the left factor major, matching Kronecker products.
    pub fn elements(&self) -> Vec<Element> {
        let mut out = Vec::with_capacity(self.order as usize);
        let s = self.orders.len();
        let mut cur = vec![0i64; s];
        loop {
            out.push(Element(cur.clone()));
            let mut i = s;
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                cur[i] += 1;
                if (cur[i] as u64) < self.orders[i] {
                    break;
                }
                cur[i] = 0;
            }
        }
    }

    pub fn index_of(&self, x: &Element) -> usize {
        let mut idx: u64 = 0;
        for (&a, &d) in x.0.iter().zip(&self.orders) {
            idx = idx * d + a.rem_euclid(d as i64) as u64;
        }
        idx as usize
    }

    /// Q(x) in [0, 1).
    pub fn q_value(&self, x: &Element) -> Rat {
        let s = self.orders.len();
        let mut acc = Rat::zero();
        for i in 0..s {
            let xi = Rat::from_integer(x.0[i].into());
            acc += &xi * &xi * &self.q_gram[i][i];
            for j in i + 1..s {
                let xj = Rat::from_integer(x.0[j].into());
                acc += &xi * &xj * &self.q_gram[i][j];
            }
        }
        mod1(&acc)
    }

    /// B(x, y) in [0, 1).
    pub fn b_value(&self, x: &Element, y: &Element) -> Rat {
        let s = self.orders.len();
        let mut acc = Rat::zero();
        for i in 0..s {
            let xi = Rat::from_integer(x.0[i].into());
            if xi.is_zero() {
                continue;
            }
            for j in 0..s {
                let yj = Rat::from_integer(y.0[j].into());
                if yj.is_zero() {
                    continue;
                }
                let b = if i == j {
                    mod1(&(&self.q_gram[i][i] + &self.q_gram[i][i]))
                } else {
                    self.q_gram[i][j].clone()
                };
                acc += &xi * &yj * b;
            }
        }
        mod1(&acc)
    }

    fn radical_witness(&self) -> Option<Element> {
        let gens: Vec<Element> = (0..self.orders.len())
            .map(|i| {
                let mut v = vec![0i64; self.orders.len()];
                v[i] = 1;
                Element(v)
            })
            .collect();
        self.elements().into_iter().skip(1).find(|x| {
            gens.iter().all(|g| self.b_value(x, g).is_zero())
        })
    }

    /// Smallest l with l * Q identically zero; this is the exact order of the
    /// diagonal generator in the Weil representation.
    pub fn level(&self) -> u64 {
        let mut l = 1u64;
        for x in self.elements() {
            l = lcm_u64(l, denom_u64(&self.q_value(&x)));
        }
        l
    }

    /// Orthogonal sum; quadratic form adds componentwise.
    pub fn direct_sum(&self, other: &FiniteQuadraticModule) -> FiniteQuadraticModule {
        let s = self.orders.len();
        let t = other.orders.len();
        let mut orders = self.orders.clone();
        orders.extend_from_slice(&other.orders);
        let mut gram = vec![vec![Rat::zero(); s + t]; s + t];
        for i in 0..s {
            for j in 0..s {
                gram[i][j] = self.q_gram[i][j].clone();
            }
        }
        for i in 0..t {
            for j in 0..t {
                gram[s + i][s + j] = other.q_gram[i][j].clone();
            }
        }
        FiniteQuadraticModule::new(orders, gram).expect("sum of nondegenerate modules is nondegenerate")
    }

    /// Split into p-parts: the submodule of p-power-order elements with the
    /// restricted form, presented on the scaled generators (d_i/p^a) g_i.
    pub fn primary_decomposition(&self) -> Vec<(u64, FiniteQuadraticModule)> {
        let mut primes: Vec<u64> = Vec::new();
        for &d in &self.orders {
            let mut n = d;
            let mut p = 2;
            while p * p <= n {
                if n % p == 0 {
                    if !primes.contains(&p) {
                        primes.push(p);
                    }
                    while n % p == 0 {
                        n /= p;
                    }
                }
                p += 1;
            }
            if n > 1 && !primes.contains(&n) {
                primes.push(n);
            }
        }
        primes.sort_unstable();
        let mut parts = Vec::new();
        for p in primes {
            let mut gens: Vec<(usize, u64, u64)> = Vec::new(); // (index, p^a, cofactor)
            for (i, &d) in self.orders.iter().enumerate() {
                let mut pa = 1u64;
                let mut n = d;
                while n % p == 0 {
                    pa *= p;
                    n /= p;
                }
                if pa > 1 {
                    gens.push((i, pa, d / pa));
                }
            }
            if gens.is_empty() {
                continue;
            }
            let s = gens.len();
            let mut gram = vec![vec![Rat::zero(); s]; s];
            for a in 0..s {
                let (i, _, ci) = gens[a];
                let ci_r = Rat::from_integer((ci as i64).into());
                gram[a][a] = mod1(&(&ci_r * &ci_r * &self.q_gram[i][i]));
                for b in a + 1..s {
                    let (j, _, cj) = gens[b];
                    let cj_r = Rat::from_integer((cj as i64).into());
                    let v = mod1(&(&ci_r * &cj_r * &self.q_gram[i][j]));
                    gram[a][b] = v.clone();
                    gram[b][a] = v;
                }
            }
            let orders: Vec<u64> = gens.iter().map(|&(_, pa, _)| pa).collect();
            let part = FiniteQuadraticModule::new(orders, gram)
                .expect("primary part of a nondegenerate module is nondegenerate");
            parts.push((p, part));
        }
        parts
    }

    /// Gauss sum G = sum_x e(-Q(x)) together with |M|.
    ///
    /// The pair satisfies G * conj(G) = |M| and G^8 = |M|^4 exactly; both are
    /// cheap and asserted here since a violation would mean broken arithmetic.
    pub fn sigma_invariant(&self) -> SigmaInvariant {
        let level = self.level();
        let mut g = CycNum::zero();
        for x in self.elements() {
            let q = self.q_value(&x);
            g = g.add(&CycNum::root_of_unity_rat(&(-q)).promote_to_multiple(level));
        }
        let m = Rat::from_integer((self.order as i64).into());
        debug_assert_eq!(g.mul(&g.conjugate()).as_rational(), Some(m.clone()));
        debug_assert_eq!(g.pow(8).as_rational(), Some(&m * &m * &m * &m));
        SigmaInvariant { gauss_sum: g, module_order: self.order }
    }

    fn check_bound(&self, bound: u64) -> Result<()> {
        if self.order > bound {
            return Err(Error::EnumerationBound { bound, size: self.order });
        }
        Ok(())
    }

    fn closure(&self, gens: &[Element]) -> Vec<Element> {
        let mut set: BTreeSet<Element> = BTreeSet::new();
        set.insert(self.zero_element());
        let mut frontier: Vec<Element> = vec![self.zero_element()];
        while let Some(x) = frontier.pop() {
            for g in gens {
                let y = self.add_elements(&x, g);
                if set.insert(y.clone()) {
                    frontier.push(y);
                }
            }
        }
        set.into_iter().collect()
    }

    fn minimal_generators(&self, elements: &[Element]) -> Vec<Element> {
        let mut by_order: Vec<&Element> = elements.iter().filter(|e| !e.0.iter().all(|&a| a == 0)).collect();
        by_order.sort_by_key(|e| std::cmp::Reverse(self.element_order(e)));
        let mut gens: Vec<Element> = Vec::new();
        let mut span: Vec<Element> = vec![self.zero_element()];
        for e in by_order {
            if span.binary_search(e).is_err() {
                gens.push((*e).clone());
                span = self.closure(&gens);
            }
            if span.len() == elements.len() {
                break;
            }
        }
        gens
    }

    fn make_subgroup(&self, elements: Vec<Element>) -> Subgroup {
        let generators = self.minimal_generators(&elements);
        Subgroup { elements, generators }
    }

    pub fn subgroups(&self, kind: SubgroupKind) -> Result<Vec<Subgroup>> {
        self.subgroups_bounded(kind, DEFAULT_ENUMERATION_BOUND)
    }

    /// Complete duplicate-free enumeration by closure BFS.
    ///
    /// For the isotropic kinds only elements with Q(x) = 0 extend a candidate,
    /// and any closure containing a non-isotropic element is pruned: every
    /// supergroup of it would contain the same witness.
    pub fn subgroups_bounded(&self, kind: SubgroupKind, bound: u64) -> Result<Vec<Subgroup>> {
        self.check_bound(bound)?;
        let isotropic_only = matches!(kind, SubgroupKind::Isotropic | SubgroupKind::IsotropicSelfDual);
        let elems = self.elements();
        let candidates: Vec<Element> = elems
            .iter()
            .filter(|x| !isotropic_only || self.q_value(x).is_zero())
            .cloned()
            .collect();
        let zero_sub = vec![self.zero_element()];
        let mut seen: BTreeSet<Vec<Element>> = BTreeSet::new();
        seen.insert(zero_sub.clone());
        let mut queue: Vec<Vec<Element>> = vec![zero_sub];
        let mut accepted: Vec<Vec<Element>> = Vec::new();
        while let Some(h) = queue.pop() {
            accepted.push(h.clone());
            for x in &candidates {
                if h.binary_search(x).is_ok() {
                    continue;
                }
                let mut gens: Vec<Element> = self.minimal_generators(&h);
                gens.push(x.clone());
                let closed = self.closure(&gens);
                if isotropic_only && closed.iter().any(|e| !self.q_value(e).is_zero()) {
                    continue;
                }
                if seen.insert(closed.clone()) {
                    queue.push(closed);
                }
            }
        }
        let mut out: Vec<Subgroup> = accepted
            .into_iter()
            .filter(|h| match kind {
                SubgroupKind::All | SubgroupKind::Isotropic => true,
                SubgroupKind::IsotropicSelfDual => (h.len() as u64) * (h.len() as u64) == self.order,
            })
            .map(|h| self.make_subgroup(h))
            .collect();
        out.sort_by(|a, b| a.elements.cmp(&b.elements));
        Ok(out)
    }

    /// N^perp = { y : B(N, y) = 0 }, by exact membership test on generators.
    pub fn dual_subgroup(&self, n: &Subgroup) -> Subgroup {
        let members: Vec<Element> = self
            .elements()
            .into_iter()
            .filter(|y| n.generators.iter().all(|g| self.b_value(g, y).is_zero()))
            .collect();
        self.make_subgroup(members)
    }

    pub fn is_isotropic(&self, n: &Subgroup) -> bool {
        n.elements.iter().all(|x| self.q_value(x).is_zero())
    }

    /// N^perp / N with the induced quadratic form, presented via an exact
    /// lattice quotient (Smith normal form over the preimage lattices).
    pub fn quotient_module(&self, n: &Subgroup) -> Result<FiniteQuadraticModule> {
        if !self.is_isotropic(n) {
            return Err(Error::NotIsotropic);
        }
        let s = self.orders.len();
        if s == 0 {
            return Ok(FiniteQuadraticModule::trivial());
        }
        let dual = self.dual_subgroup(n);
        // Preimage lattices in Z^s: L_W for N^perp, L_V for N, both containing
        // diag(d) Z^s.
        let mut w_cols: Vec<Vec<i64>> = dual.generators.iter().map(|e| e.0.clone()).collect();
        let mut v_cols: Vec<Vec<i64>> = n.generators.iter().map(|e| e.0.clone()).collect();
        for i in 0..s {
            let mut col = vec![0i64; s];
            col[i] = self.orders[i] as i64;
            w_cols.push(col.clone());
            v_cols.push(col);
        }
        let to_mat = |cols: &Vec<Vec<i64>>| -> intmat::IMat {
            (0..s).map(|r| cols.iter().map(|c| c[r]).collect()).collect()
        };
        let w = to_mat(&w_cols);
        let snf_w = intmat::smith_normal_form(&w);
        // Basis of L_W: columns u_inv[:, k] * diag[k]; full rank is guaranteed
        // because diag(d) Z^s is contained in L_W.
        let mut basis: Vec<Vec<Rat>> = vec![vec![Rat::zero(); s]; s];
        for k in 0..s {
            assert!(snf_w.diag[k] != 0, "perp lattice must have full rank");
            for r in 0..s {
                basis[r][k] = Rat::from_integer((snf_w.u_inv[r][k] as i128 * snf_w.diag[k] as i128).into());
            }
        }
        // Express the N-lattice generators in that basis; coordinates must be
        // integral since L_V is a sublattice of L_W.
        let mut c_cols: Vec<Vec<i64>> = Vec::new();
        for v in &v_cols {
            let rhs: Vec<Rat> = v.iter().map(|&x| Rat::from_integer(x.into())).collect();
            let sol = intmat::solve_rational(&basis, &rhs).expect("lattice basis is invertible");
            let col: Vec<i64> = sol
                .iter()
                .map(|x| {
                    assert!(is_integer(x), "N-lattice coordinate not integral");
                    x.numer().to_i64().expect("lattice coordinate overflow")
                })
                .collect();
            c_cols.push(col);
        }
        let c_mat: intmat::IMat = (0..s).map(|r| c_cols.iter().map(|c| c[r]).collect()).collect();
        let snf_c = intmat::smith_normal_form(&c_mat);
        // Quotient invariant factors and generator lifts.
        let mut orders = Vec::new();
        let mut lifts: Vec<Element> = Vec::new();
        for k in 0..s {
            let dk = snf_c.diag.get(k).copied().unwrap_or(0);
            assert!(dk != 0, "quotient of full-rank lattices is finite");
            if dk == 1 {
                continue;
            }
            orders.push(dk as u64);
            // Lattice vector: basis * (u_inv of C) e_k, reduced into M.
            let coords: Vec<i64> = (0..s).map(|r| snf_c.u_inv[r][k]).collect();
            let mut vec_z = vec![0i128; s];
            for (r, row) in basis.iter().enumerate() {
                for (kk, b) in row.iter().enumerate() {
                    vec_z[r] += b.numer().to_i128().unwrap() * coords[kk] as i128;
                }
            }
            let elem = self.reduce_element(
                &vec_z.iter().map(|&x| i64::try_from(x).expect("lift overflow")).collect::<Vec<_>>(),
            );
            lifts.push(elem);
        }
        let t = orders.len();
        let mut gram = vec![vec![Rat::zero(); t]; t];
        for a in 0..t {
            gram[a][a] = self.q_value(&lifts[a]);
            for b in a + 1..t {
                let v = self.b_value(&lifts[a], &lifts[b]);
                gram[a][b] = v.clone();
                gram[b][a] = v;
            }
        }
        FiniteQuadraticModule::new(orders, gram)
    }

    pub fn is_witt_zero(&self) -> Result<bool> {
        Ok(!self.subgroups(SubgroupKind::IsotropicSelfDual)?.is_empty())
    }

    /// N^perp / N for a maximal isotropic N; anisotropic by maximality.
    pub fn anisotropic_kernel(&self) -> Result<FiniteQuadraticModule> {
        let mut iso = self.subgroups(SubgroupKind::Isotropic)?;
        iso.sort_by_key(|s| std::cmp::Reverse(s.order()));
        let maximal = iso.into_iter().next().expect("the zero subgroup always exists");
        let kernel = self.quotient_module(&maximal)?;
        debug_assert!(kernel
            .elements()
            .iter()
            .skip(1)
            .all(|x| !kernel.q_value(x).is_zero()));
        Ok(kernel)
    }

    /// Brute-force search for a group isomorphism preserving Q.
    pub fn is_isomorphic(&self, other: &FiniteQuadraticModule) -> Result<bool> {
        self.check_bound(DEFAULT_ENUMERATION_BOUND)?;
        other.check_bound(DEFAULT_ENUMERATION_BOUND)?;
        if self.order != other.order {
            return Ok(false);
        }
        if elementary_divisors(&self.orders) != elementary_divisors(&other.orders) {
            return Ok(false);
        }
        let mut mine: Vec<Rat> = self.elements().iter().map(|x| self.q_value(x)).collect();
        let mut theirs: Vec<Rat> = other.elements().iter().map(|x| other.q_value(x)).collect();
        mine.sort();
        theirs.sort();
        if mine != theirs {
            return Ok(false);
        }
        // Map our standard generators onto elements of `other` preserving
        // orders, Q and pairwise B; accept once the images generate.
        let gens: Vec<Element> = (0..self.orders.len())
            .map(|i| {
                let mut v = vec![0i64; self.orders.len()];
                v[i] = 1;
                Element(v)
            })
            .collect();
        let others = other.elements();
        fn extend(
            m: &FiniteQuadraticModule,
            n: &FiniteQuadraticModule,
            gens: &[Element],
            others: &[Element],
            images: &mut Vec<Element>,
        ) -> bool {
            if images.len() == gens.len() {
                return n.closure(images).len() as u64 == n.order();
            }
            let i = images.len();
            let gi = &gens[i];
            let di = m.orders()[i];
            for cand in others {
                if n.element_order(cand) > di || !(n.q_value(cand) == m.q_value(gi)) {
                    continue;
                }
                if n.scale_element(di as i64, cand) != n.zero_element() {
                    continue;
                }
                let ok = images
                    .iter()
                    .enumerate()
                    .all(|(j, im)| n.b_value(im, cand) == m.b_value(&gens[j], gi));
                if !ok {
                    continue;
                }
                images.push(cand.clone());
                if extend(m, n, gens, others, images) {
                    return true;
                }
                images.pop();
            }
            false
        }
        let mut images = Vec::new();
        Ok(extend(self, other, &gens, &others, &mut images))
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "orders": self.orders,
            "q_gram": self
                .q_gram
                .iter()
                .map(|row| row.iter().map(format_rat).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let dto: ModuleDto = serde_json::from_value(v.clone())
            .map_err(|e| Error::Parse(format!("module JSON: {e}")))?;
        dto.build()
    }
}

/// Multiset of prime-power elementary divisors; a complete isomorphism
/// invariant of the underlying abelian group.
fn elementary_divisors(orders: &[u64]) -> Vec<u64> {
    let mut out = Vec::new();
    for &d in orders {
        let mut n = d;
        let mut p = 2u64;
        while p * p <= n {
            if n % p == 0 {
                let mut pa = 1;
                while n % p == 0 {
                    pa *= p;
                    n /= p;
                }
                out.push(pa);
            }
            p += 1;
        }
        if n > 1 {
            out.push(n);
        }
    }
    out.sort_unstable();
    out
}

#[derive(Serialize, Deserialize)]
struct ModuleDto {
    orders: Vec<u64>,
    q_gram: Vec<Vec<String>>,
}

impl ModuleDto {
    fn build(&self) -> Result<FiniteQuadraticModule> {
        let gram: Result<Vec<Vec<Rat>>> = self
            .q_gram
            .iter()
            .map(|row| row.iter().map(|s| parse_rat(s)).collect())
            .collect();
        FiniteQuadraticModule::new(self.orders.clone(), gram?)
    }
}

/// Verify sigma(D_F) = e(-n/8) for positive definite half-integral F:
/// exactly via G^2 = |M| e(-n/4), plus a numeric sign check that
/// G * e(n/8) is positive real with margin.
pub fn milgram_check(f: &HalfIntegralMatrix) -> Result<bool> {
    let module = f.discriminant_module()?;
    let sigma = module.sigma_invariant();
    let n = f.size() as i64;
    let m = Rat::from_integer((sigma.module_order as i64).into());
    let squared_ok = sigma.gauss_sum.mul(&sigma.gauss_sum)
        == CycNum::root_of_unity(-n, 4).scale(&m);
    let v = sigma.gauss_sum.eval_complex(53)
        * CycNum::root_of_unity(n, 8).eval_complex(53);
    let sign_ok = v.re > 0.1;
    Ok(squared_ok && sign_ok)
}
