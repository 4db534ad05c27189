//! The Weil representation W(M) of a finite quadratic module, with exact
//! generator matrices over cyclotomic numbers.
//!
//! The diagonal generator acts by e(Q(x)); the Fourier-type generator has
//! entries (G/|M|) e(-B(y,x)) where G is the Gauss sum, so the normalization
//! sigma |M|^{-1/2} is carried without any square root.  The conjugate (dual)
//! module acts through A -> transpose of rho(A^{-1}); all dimension-formula
//! computations use that contract.

use num_traits::Zero;

use crate::cyclotomic::CycNum;
use crate::error::{Error, Result};
use crate::fqm::{Element, FiniteQuadraticModule, SubgroupKind};
use crate::gram::HalfIntegralMatrix;
use crate::matrix::{span_contains, span_rank, MatrixCyc};
use crate::par;
use crate::rational::{mod1, rat, Rat};

/// Default bound on |M| for building dense generator matrices.
pub const DEFAULT_MATRIX_BOUND: u64 = 200;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Gen {
    S,
    T,
    TInv,
}

#[derive(Clone)]
pub struct WeilRep {
    module: FiniteQuadraticModule,
    elements: Vec<Element>,
    q_values: Vec<Rat>,
    rho_s: MatrixCyc,
    gauss_sum: CycNum,
    neg_perm: Vec<usize>,
}

/// Exact basis of the subspace fixed by the whole representation.
#[derive(Clone, Debug)]
pub struct InvariantBasis {
    pub vectors: Vec<Vec<CycNum>>,
    pub dim: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EigenKind {
    /// Spanned by e_x + e_{-x} over orbits (fixed points included once).
    Symmetric,
    /// Spanned by e_x - e_{-x} over two-element orbits.
    Antisymmetric,
    /// The requested eigenvalue does not occur.
    Empty,
}

/// Eigenspace of the central element in the conjugate representation.
#[derive(Clone, Debug)]
pub struct Eigenspace {
    pub kind: EigenKind,
    pub basis: Vec<Vec<CycNum>>,
    pub dim: usize,
}

pub fn build_weil(module: &FiniteQuadraticModule) -> Result<WeilRep> {
    build_weil_bounded(module, DEFAULT_MATRIX_BOUND)
}

pub fn build_weil_bounded(module: &FiniteQuadraticModule, bound: u64) -> Result<WeilRep> {
    if module.order() > bound {
        return Err(Error::MatrixBound { bound, size: module.order() });
    }
    let elements = module.elements();
    let n = elements.len();
    let level = module.level();
    let q_values: Vec<Rat> = elements.iter().map(|x| module.q_value(x)).collect();
    let sigma = module.sigma_invariant();
    let gauss_sum = sigma.gauss_sum.clone();
    let scale = gauss_sum.scale(&rat(1, module.order() as i64));
    let rows = par::map_range(n, |y| {
        (0..n)
            .map(|x| {
                let b = module.b_value(&elements[y], &elements[x]);
                scale.mul(&CycNum::root_of_unity_rat(&(-b)).promote_to_multiple(level))
            })
            .collect::<Vec<_>>()
    });
    let rho_s = MatrixCyc::from_fn(n, n, |i, j| rows[i][j].clone());
    let neg_perm: Vec<usize> = elements
        .iter()
        .map(|x| module.index_of(&module.neg_element(x)))
        .collect();
    Ok(WeilRep { module: module.clone(), elements, q_values, rho_s, gauss_sum, neg_perm })
}

impl WeilRep {
    pub fn module(&self) -> &FiniteQuadraticModule {
        &self.module
    }

    pub fn dim(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn gauss_sum(&self) -> &CycNum {
        &self.gauss_sum
    }

    /// sigma^2 = G^2 / |M|, exactly representable.
    pub fn sigma_squared(&self) -> CycNum {
        self.gauss_sum
            .mul(&self.gauss_sum)
            .scale(&rat(1, self.module.order() as i64))
    }

    pub fn rho_t(&self) -> MatrixCyc {
        let n = self.dim();
        let mut m = MatrixCyc::zero(n, n);
        for i in 0..n {
            *m.at_mut(i, i) = CycNum::root_of_unity_rat(&self.q_values[i]);
        }
        m
    }

    pub fn rho_t_inv(&self) -> MatrixCyc {
        let n = self.dim();
        let mut m = MatrixCyc::zero(n, n);
        for i in 0..n {
            *m.at_mut(i, i) = CycNum::root_of_unity_rat(&-&self.q_values[i]);
        }
        m
    }

    pub fn rho_s(&self) -> &MatrixCyc {
        &self.rho_s
    }

    /// Permutation matrix e_x -> e_{-x}.
    pub fn p_neg(&self) -> MatrixCyc {
        MatrixCyc::permutation(&self.neg_perm)
    }

    /// Exact product of generator matrices in word order (empty = identity).
    pub fn rho_word(&self, word: &[Gen]) -> MatrixCyc {
        let mut acc = MatrixCyc::identity(self.dim());
        for g in word {
            let m = match g {
                Gen::S => self.rho_s.clone(),
                Gen::T => self.rho_t(),
                Gen::TInv => self.rho_t_inv(),
            };
            acc = acc.mul(&m);
        }
        acc
    }

    /// Indices of the isotropic elements Q(x) = 0; the fixed space of the
    /// diagonal generator is exactly the span of those basis vectors.
    fn isotropic_indices(&self) -> Vec<usize> {
        (0..self.dim()).filter(|&i| self.q_values[i].is_zero()).collect()
    }

    /// Orbit representatives of x -> -x: (index, paired) with paired = false
    /// for 2-torsion fixed points.
    fn negation_orbits(&self) -> Vec<(usize, bool)> {
        (0..self.dim())
            .filter_map(|i| {
                let j = self.neg_perm[i];
                if i == j {
                    Some((i, false))
                } else if i < j {
                    Some((i, true))
                } else {
                    None
                }
            })
            .collect()
    }

    /// Eigenspace basis of the center acting in the conjugate representation.
    ///
    /// The center acts there as sigma^{-2} P_neg, so the i^m eigenspace is the
    /// (+/-1)-eigenspace of the negation permutation whenever sigma^2 i^m is
    /// +/-1, and zero otherwise (a valid output, not an error).
    pub fn z_eigenspace(&self, m: i64) -> Eigenspace {
        let eps = self.sigma_squared().mul(&CycNum::root_of_unity(m.rem_euclid(4), 4));
        let kind = if eps.is_one() {
            EigenKind::Symmetric
        } else if eps == CycNum::from_int(-1) {
            EigenKind::Antisymmetric
        } else {
            EigenKind::Empty
        };
        let mut basis = Vec::new();
        match kind {
            EigenKind::Symmetric => {
                for (i, paired) in self.negation_orbits() {
                    let mut v = vec![CycNum::zero(); self.dim()];
                    v[i] = CycNum::one();
                    if paired {
                        v[self.neg_perm[i]] = CycNum::one();
                    }
                    basis.push(v);
                }
            }
            EigenKind::Antisymmetric => {
                for (i, paired) in self.negation_orbits() {
                    if !paired {
                        continue;
                    }
                    let mut v = vec![CycNum::zero(); self.dim()];
                    v[i] = CycNum::one();
                    v[self.neg_perm[i]] = CycNum::from_int(-1);
                    basis.push(v);
                }
            }
            EigenKind::Empty => {}
        }
        let dim = basis.len();
        Eigenspace { kind, basis, dim }
    }

    /// Trace of the conjugate action of the Fourier generator restricted to a
    /// center eigenspace, computed orbit by orbit.
    ///
    /// In the conjugate module rho*(S) = transpose of rho(S^{-1}); combining
    /// rho(S)^2 = sigma^2 P_neg with unitarity gives entries
    /// (conj(G)/|M|) e(B(y,x)).  The eigenspace is invariant (the center is
    /// central), so the trace is the sum of the coefficients of e_x in the
    /// image of each orbit basis vector.
    pub fn conj_s_trace_on(&self, kind: EigenKind) -> CycNum {
        self.conj_trace_on(kind, false)
    }

    /// Same for the composite generator ST in the conjugate action: the
    /// diagonal factor contributes e(-Q(x)) per orbit first.
    pub fn conj_st_trace_on(&self, kind: EigenKind) -> CycNum {
        self.conj_trace_on(kind, true)
    }

    fn conj_trace_on(&self, kind: EigenKind, with_t: bool) -> CycNum {
        if kind == EigenKind::Empty {
            return CycNum::zero();
        }
        let level = self.module.level();
        let mut acc = CycNum::zero();
        for (i, paired) in self.negation_orbits() {
            let q = &self.q_values[i];
            let two_q = mod1(&(q + q));
            // coefficient of e_x in rho*(S) (e_x +/- e_{-x}) is
            // (conj(G)/|M|)(e(2Q(x)) +/- e(-2Q(x))).
            let plus = CycNum::root_of_unity_rat(&two_q).promote_to_multiple(level);
            let minus = CycNum::root_of_unity_rat(&(-&two_q)).promote_to_multiple(level);
            let mut term = match kind {
                EigenKind::Symmetric => {
                    if paired {
                        plus.add(&minus)
                    } else {
                        plus
                    }
                }
                EigenKind::Antisymmetric => {
                    if !paired {
                        continue;
                    }
                    plus.sub(&minus)
                }
                EigenKind::Empty => unreachable!(),
            };
            if with_t {
                term = term.mul(&CycNum::root_of_unity_rat(&(-q)));
            }
            acc = acc.add(&term);
        }
        acc.mul(&self.gauss_sum.conjugate())
            .scale(&rat(1, self.module.order() as i64))
    }

    /// Exponents lambda in [0,1) of the diagonal generator acting on a center
    /// eigenspace of the conjugate module: eigenvalues are e(-Q(x)) per orbit.
    pub fn lambda_exponents(&self, kind: EigenKind) -> Vec<Rat> {
        if kind == EigenKind::Empty {
            return Vec::new();
        }
        self.negation_orbits()
            .into_iter()
            .filter(|&(_, paired)| paired || kind == EigenKind::Symmetric)
            .map(|(i, _)| mod1(&-&self.q_values[i]))
            .collect()
    }
}

/// Exact basis of Inv(M): the joint fixed space of both generators.
///
/// The diagonal generator confines invariant vectors to the isotropic basis
/// vectors, so only those columns enter the elimination; the kernel is then
/// computed over the full row set of (rho(S) - I).
pub fn invariants(module: &FiniteQuadraticModule) -> Result<InvariantBasis> {
    let w = build_weil(module)?;
    let iso = w.isotropic_indices();
    let n = w.dim();
    let a = MatrixCyc::from_fn(n, iso.len(), |y, j| {
        let x = iso[j];
        let entry = w.rho_s.at(y, x).clone();
        if y == x {
            entry.sub(&CycNum::one())
        } else {
            entry
        }
    });
    let small = a.kernel_basis();
    let vectors: Vec<Vec<CycNum>> = small
        .into_iter()
        .map(|c| {
            let mut v = vec![CycNum::zero(); n];
            for (j, &x) in iso.iter().enumerate() {
                v[x] = c[j].clone();
            }
            v
        })
        .collect();
    let dim = vectors.len();
    Ok(InvariantBasis { vectors, dim })
}

/// The subgroup indicator vectors I_U over isotropic self-dual subgroups.
/// Only defined for prime-power order (the hypothesis of the generation
/// theorem this feeds).
pub fn nrs_generators(module: &FiniteQuadraticModule) -> Result<Vec<Vec<CycNum>>> {
    let order = module.order();
    if !is_prime_power(order) {
        return Err(Error::NotPrimePower { order });
    }
    let subs = module.subgroups(SubgroupKind::IsotropicSelfDual)?;
    Ok(subs
        .iter()
        .map(|u| {
            let mut v = vec![CycNum::zero(); order as usize];
            for x in &u.elements {
                v[module.index_of(x)] = CycNum::one();
            }
            v
        })
        .collect())
}

fn is_prime_power(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut n = n;
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            while n % p == 0 {
                n /= p;
            }
            return n == 1;
        }
        p += 1;
    }
    true
}

/// Product over primary parts of dim Inv(M(p)); the tensor-factorization
/// route that must agree with the direct kernel computation.
pub fn invariants_dim_via_primary(module: &FiniteQuadraticModule) -> Result<usize> {
    let mut dim = 1usize;
    for (_, part) in module.primary_decomposition() {
        dim *= invariants(&part)?.dim;
        if dim == 0 {
            break;
        }
    }
    Ok(dim)
}

/// Dimension of the invariants of W(D_{(l) + F}) that are also fixed by the
/// involution negating the first block coordinate.
pub fn iota_fixed_invariants(l: u64, f: &HalfIntegralMatrix) -> Result<usize> {
    assert!(l >= 1);
    let extended = f.prepend_scalar_block(l);
    let pres = extended.discriminant_presentation()?;
    let module = &pres.module;
    let s = module.orders().len();
    // Images of the generators under (x, y) -> (-x, y) on Z^{n+1}.
    let gen_images: Vec<Element> = (0..s)
        .map(|k| {
            let mut v = pres.gens[k].clone();
            v[0] = -v[0];
            module.reduce_element(&pres.coset_coords(&v))
        })
        .collect();
    let iota = |x: &Element| -> Element {
        let mut acc = module.zero_element();
        for (k, g) in gen_images.iter().enumerate() {
            acc = module.add_elements(&acc, &module.scale_element(x.0[k], g));
        }
        acc
    };
    let elements = module.elements();
    let perm: Vec<usize> = elements.iter().map(|x| module.index_of(&iota(x))).collect();
    // The involution must preserve the quadratic form; this certifies that it
    // commutes with both generator matrices.
    for (i, x) in elements.iter().enumerate() {
        debug_assert_eq!(module.q_value(&elements[perm[i]]), module.q_value(x));
        debug_assert_eq!(perm[perm[i]], i, "involution must square to the identity");
    }
    let inv = invariants(module)?;
    if inv.dim == 0 {
        return Ok(0);
    }
    // Solve (P_iota - I) K c = 0 over the invariant basis K.
    let n = elements.len();
    let a = MatrixCyc::from_fn(n, inv.dim, |y, j| {
        inv.vectors[j][perm[y]].sub(&inv.vectors[j][y])
    });
    Ok(a.kernel_basis().len())
}

/// Exact dimension and two-way containment comparison between the indicator
/// span and the invariant space.
pub fn nrs_span_equals_invariants(module: &FiniteQuadraticModule) -> Result<bool> {
    let gens = nrs_generators(module)?;
    let inv = invariants(module)?;
    let span_dim = span_rank(&gens);
    if span_dim != inv.dim {
        return Ok(false);
    }
    let gens_in_inv = gens.iter().all(|g| span_contains(&inv.vectors, g));
    let inv_in_gens = inv.vectors.iter().all(|v| span_contains(&gens, v));
    Ok(gens_in_inv && inv_in_gens)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fqm::FiniteQuadraticModule as Fqm;
    use crate::gram::e8_gram;

    fn z3() -> Fqm {
        Fqm::cyclic(3, rat(1, 3)).unwrap()
    }

    fn h(q: u64) -> Fqm {
        Fqm::hyperbolic_plane(q).unwrap()
    }

    /// Dense oracle: stack (rho_T - 1) over (rho_S - 1), take the kernel.
    fn invariants_dense_oracle(m: &Fqm) -> Vec<Vec<CycNum>> {
        let w = build_weil(m).unwrap();
        let n = w.dim();
        let rho_t = w.rho_t();
        let id = MatrixCyc::identity(n);
        let top = rho_t.sub(&id);
        let bottom = w.rho_s().sub(&id);
        let stacked = MatrixCyc::from_fn(2 * n, n, |i, j| {
            if i < n {
                top.at(i, j).clone()
            } else {
                bottom.at(i - n, j).clone()
            }
        });
        stacked.kernel_basis()
    }

    #[test]
    fn rho_t_diagonal_of_cyclic_module() {
        let w = build_weil(&z3()).unwrap();
        let t = w.rho_t();
        assert!(t.at(0, 0).is_one());
        let z = CycNum::root_of_unity(1, 3);
        assert_eq!(*t.at(1, 1), z);
        assert_eq!(*t.at(2, 2), z);
        assert!(t.at(0, 1).is_zero());
    }

    #[test]
    fn trivial_module_generators_are_scalar_one() {
        let w = build_weil(&Fqm::trivial()).unwrap();
        assert_eq!(w.dim(), 1);
        assert!(w.rho_t().is_identity());
        assert!(w.rho_s().is_identity());
    }

    #[test]
    fn rho_s_of_order_two_module() {
        // (Z/2, x^2/4): rho_S = (G/2) [[1,1],[1,-1]] with G = 1 + e(-1/4).
        let m = Fqm::cyclic(2, rat(1, 4)).unwrap();
        let w = build_weil(&m).unwrap();
        let g = CycNum::one().add(&CycNum::root_of_unity(-1, 4));
        let half = rat(1, 2);
        assert_eq!(*w.rho_s().at(0, 0), g.scale(&half));
        assert_eq!(*w.rho_s().at(0, 1), g.scale(&half));
        assert_eq!(*w.rho_s().at(1, 0), g.scale(&half));
        assert_eq!(*w.rho_s().at(1, 1), g.scale(&half).neg());
    }

    #[test]
    fn word_ss_equals_sigma_squared_p_neg() {
        for m in [z3(), Fqm::cyclic(4, rat(1, 8)).unwrap(), h(2)] {
            let w = build_weil(&m).unwrap();
            let lhs = w.rho_word(&[Gen::S, Gen::S]);
            let rhs = w.p_neg().scale(&w.sigma_squared());
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn metaplectic_relation_st_cubed() {
        for m in [z3(), Fqm::cyclic(2, rat(1, 4)).unwrap(), h(3)] {
            let w = build_weil(&m).unwrap();
            let st3 = w.rho_word(&[Gen::S, Gen::T, Gen::S, Gen::T, Gen::S, Gen::T]);
            let ss = w.rho_word(&[Gen::S, Gen::S]);
            assert_eq!(st3, ss);
        }
    }

    #[test]
    fn empty_word_is_identity() {
        let w = build_weil(&z3()).unwrap();
        assert!(w.rho_word(&[]).is_identity());
        assert!(w.rho_word(&[Gen::T, Gen::TInv]).is_identity());
    }

    #[test]
    fn invariant_dims_of_small_modules() {
        assert_eq!(invariants(&z3()).unwrap().dim, 0);
        assert_eq!(invariants(&Fqm::trivial()).unwrap().dim, 1);
        assert_eq!(invariants(&h(3)).unwrap().dim, 2);
    }

    #[test]
    fn restricted_kernel_matches_dense_oracle() {
        for m in [
            z3(),
            h(2),
            h(3),
            Fqm::cyclic(4, rat(1, 8)).unwrap(),
            z3().direct_sum(&Fqm::cyclic(3, rat(2, 3)).unwrap()),
            h(2).direct_sum(&h(2)),
        ] {
            let fast = invariants(&m).unwrap();
            let dense = invariants_dense_oracle(&m);
            assert_eq!(fast.dim, dense.len());
            for v in &fast.vectors {
                assert!(span_contains(&dense, v));
            }
            // Invariant vectors are genuinely fixed by both generators.
            let w = build_weil(&m).unwrap();
            for v in &fast.vectors {
                assert_eq!(w.rho_t().mat_vec(v), *v);
                assert_eq!(w.rho_s().mat_vec(v), *v);
            }
        }
    }

    #[test]
    fn nrs_generators_examples() {
        let gens = nrs_generators(&h(3)).unwrap();
        assert_eq!(gens.len(), 2);
        assert!(nrs_span_equals_invariants(&h(3)).unwrap());

        let gens2 = nrs_generators(&h(2)).unwrap();
        assert_eq!(gens2.len(), 2);
        assert!(nrs_span_equals_invariants(&h(2)).unwrap());

        assert!(nrs_generators(&z3()).unwrap().is_empty());
        assert_eq!(invariants(&z3()).unwrap().dim, 0);
    }

    #[test]
    fn nrs_requires_prime_power_order() {
        let m = h(2).direct_sum(&h(3)); // order 36
        assert!(matches!(
            nrs_generators(&m),
            Err(Error::NotPrimePower { order: 36 })
        ));
    }

    #[test]
    fn primary_dimension_factorization() {
        let m = h(3).direct_sum(&h(2));
        assert_eq!(invariants_dim_via_primary(&m).unwrap(), 4);
        assert_eq!(invariants(&m).unwrap().dim, 4);

        let with_zero_factor = z3().direct_sum(&h(2));
        assert_eq!(invariants_dim_via_primary(&with_zero_factor).unwrap(), 0);
        assert_eq!(invariants(&with_zero_factor).unwrap().dim, 0);

        assert_eq!(invariants_dim_via_primary(&Fqm::trivial()).unwrap(), 1);
    }

    #[test]
    fn z_eigenspace_of_binary_prime_module() {
        // With sigma^2 = -1 the even-weight condition lands in the symmetric
        // space: orbits {0} and {1,2} give dimension 2.
        let w = build_weil(&z3()).unwrap();
        let x = w.z_eigenspace(-6);
        assert_eq!(x.kind, EigenKind::Symmetric);
        assert_eq!(x.dim, 2);
        let x_odd = w.z_eigenspace(-8);
        assert_eq!(x_odd.kind, EigenKind::Antisymmetric);
        assert_eq!(x_odd.dim, 1);
    }

    #[test]
    fn z_eigenspace_of_trivial_module_is_everything() {
        let w = build_weil(&Fqm::trivial()).unwrap();
        let x = w.z_eigenspace(0);
        assert_eq!(x.dim, 1);
        assert_eq!(x.kind, EigenKind::Symmetric);
    }

    #[test]
    fn z_eigenspace_two_torsion_is_all_or_nothing() {
        let w = build_weil(&Fqm::cyclic(2, rat(1, 4)).unwrap()).unwrap();
        // sigma^2 = e(-1/4): eigenvalue condition holds iff m = 1 mod 4.
        assert_eq!(w.z_eigenspace(1).dim, 2);
        assert_eq!(w.z_eigenspace(1).kind, EigenKind::Symmetric);
        assert_eq!(w.z_eigenspace(3).dim, 0);
        assert_eq!(w.z_eigenspace(0).dim, 0);
        assert_eq!(w.z_eigenspace(2).dim, 0);
    }

    #[test]
    fn restricted_traces_match_projection_oracle() {
        // Oracle: rho*(S) = transpose(inverse(rho(S))), then read the
        // diagonal coefficient of the restriction at each orbit basis vector.
        for m in [z3(), Fqm::cyclic(5, rat(1, 5)).unwrap(), Fqm::cyclic(4, rat(3, 8)).unwrap(), h(2)] {
            let w = build_weil(&m).unwrap();
            let conj_s = w.rho_s().inverse().unwrap().transpose();
            let conj_t = w.rho_t_inv(); // diagonal, self-transposed
            let conj_st = conj_s.mul(&conj_t);
            for mm in 0..4 {
                let x = w.z_eigenspace(mm);
                if x.dim == 0 {
                    assert!(w.conj_s_trace_on(x.kind).is_zero());
                    continue;
                }
                for (op, fast) in [
                    (&conj_s, w.conj_s_trace_on(x.kind)),
                    (&conj_st, w.conj_st_trace_on(x.kind)),
                ] {
                    let mut tr = CycNum::zero();
                    for v in &x.basis {
                        let img = op.mat_vec(v);
                        let rep = v.iter().position(|c| !c.is_zero()).unwrap();
                        tr = tr.add(&img[rep]);
                    }
                    assert_eq!(fast, tr, "module {:?} target {mm}", m.orders());
                }
            }
        }
    }

    #[test]
    fn lambda_exponents_of_binary_prime_module() {
        let w = build_weil(&z3()).unwrap();
        let sym = w.lambda_exponents(EigenKind::Symmetric);
        assert_eq!(sym, vec![rat(0, 1), rat(2, 3)]);
        let anti = w.lambda_exponents(EigenKind::Antisymmetric);
        assert_eq!(anti, vec![rat(2, 3)]);
    }

    #[test]
    fn iota_fixed_invariants_examples() {
        // l = 1, F = (1): module (Z/2)^2 with Q = (x^2 + y^2)/4 has no
        // invariants at all.
        let unary = HalfIntegralMatrix::parse_row_string("2").unwrap();
        assert_eq!(iota_fixed_invariants(1, &unary).unwrap(), 0);

        // 2-torsion module: the involution is the identity, so the count is
        // the full invariant dimension.
        let f = e8_gram(); // rank 8, trivial discriminant
        let ext = f.prepend_scalar_block(1);
        let full = invariants(&ext.discriminant_module().unwrap()).unwrap().dim;
        assert_eq!(iota_fixed_invariants(1, &f).unwrap(), full);
    }

    #[test]
    fn iota_commutes_with_the_representation() {
        let unary = HalfIntegralMatrix::parse_row_string("2").unwrap();
        for l in [1u64, 2, 3] {
            let ext = unary.prepend_scalar_block(l);
            let pres = ext.discriminant_presentation().unwrap();
            let module = pres.module.clone();
            let w = build_weil(&module).unwrap();
            let s = module.orders().len();
            let gen_images: Vec<Element> = (0..s)
                .map(|k| {
                    let mut v = pres.gens[k].clone();
                    v[0] = -v[0];
                    module.reduce_element(&pres.coset_coords(&v))
                })
                .collect();
            let perm: Vec<usize> = module
                .elements()
                .iter()
                .map(|x| {
                    let mut acc = module.zero_element();
                    for (k, g) in gen_images.iter().enumerate() {
                        acc = module.add_elements(&acc, &module.scale_element(x.0[k], g));
                    }
                    module.index_of(&acc)
                })
                .collect();
            let p = MatrixCyc::permutation(&perm);
            assert_eq!(p.mul(w.rho_s()), w.rho_s().mul(&p), "l = {l}");
            assert_eq!(p.mul(&w.rho_t()), w.rho_t().mul(&p), "l = {l}");
        }
    }

    #[test]
    fn unitarity_and_t_order() {
        for m in [z3(), h(2), Fqm::cyclic(4, rat(1, 8)).unwrap()] {
            let w = build_weil(&m).unwrap();
            let s = w.rho_s();
            assert!(s.mul(&s.conjugate().transpose()).is_identity());
            let level = m.level();
            let mut acc = MatrixCyc::identity(w.dim());
            let t = w.rho_t();
            for _ in 0..level {
                acc = acc.mul(&t);
            }
            assert!(acc.is_identity());
        }
    }

    #[test]
    fn kronecker_functoriality_of_rho_s() {
        let pairs = [
            (z3(), Fqm::cyclic(2, rat(1, 4)).unwrap()),
            (h(2), z3()),
        ];
        for (a, b) in pairs {
            let ws = build_weil(&a.direct_sum(&b)).unwrap();
            let wa = build_weil(&a).unwrap();
            let wb = build_weil(&b).unwrap();
            assert_eq!(*ws.rho_s(), wa.rho_s().kronecker(wb.rho_s()));
            assert_eq!(ws.rho_t(), wa.rho_t().kronecker(&wb.rho_t()));
        }
    }

    #[test]
    fn matrix_bound_is_enforced() {
        let m = h(3);
        assert!(matches!(
            build_weil_bounded(&m, 4),
            Err(Error::MatrixBound { bound: 4, size: 9 })
        ));
    }
}
