//! Truncated multivariate power series over `Complex64`.
//!
//! Everything downstream (kernel expansions, operator compressions) works
//! on Taylor polynomials truncated at a total degree cap. Coefficients are
//! stored densely against a shared graded-lexicographic basis so that the
//! matrix fixtures produced elsewhere are reproducible.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lfmap::LinearFractionalMap;
use crate::CVec;

/// Exponent vector of a monomial `z^alpha`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MultiIndex(pub Vec<u32>);

impl MultiIndex {
    pub fn zero(dim: usize) -> Self {
        MultiIndex(vec![0; dim])
    }

    pub fn unit(dim: usize, j: usize) -> Self {
        let mut e = vec![0; dim];
        e[j] = 1;
        MultiIndex(e)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// Total degree `|alpha|`.
    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    /// `alpha!` as an exact integer.
    pub fn factorial(&self) -> u128 {
        self.0.iter().map(|&e| factorial(e as u64)).product()
    }

    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Evaluates `z^alpha`.
    pub fn eval(&self, z: &CVec) -> Complex64 {
        self.0
            .iter()
            .enumerate()
            .map(|(j, &e)| z[j].powu(e))
            .product()
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

/// Graded-lexicographic order: total degree first, then lexicographic on
/// the exponent tuple with the first variable most significant.
impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

pub fn factorial(n: u64) -> u128 {
    (1..=n as u128).product()
}

/// Exact binomial coefficient, exact in `u128` for every argument used here.
pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// The monomial basis of polynomials of total degree `<= cap` in `dim`
/// variables, enumerated in increasing graded-lex order.
#[derive(Debug)]
pub struct Basis {
    dim: usize,
    cap: u32,
    indices: Vec<MultiIndex>,
    position: HashMap<MultiIndex, usize>,
}

impl Basis {
    pub fn new(dim: usize, cap: u32) -> Arc<Basis> {
        assert!(dim >= 1, "ambient dimension must be at least 1");
        let mut indices = Vec::new();
        for k in 0..=cap {
            append_degree(dim, k, &mut Vec::new(), &mut indices);
        }
        let position = indices
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, a)| (a, i))
            .collect();
        Arc::new(Basis { dim, cap, indices, position })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn cap(&self) -> u32 {
        self.cap
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn indices(&self) -> &[MultiIndex] {
        &self.indices
    }

    pub fn index_of(&self, alpha: &MultiIndex) -> Option<usize> {
        self.position.get(alpha).copied()
    }

    fn same_shape(&self, other: &Basis) -> bool {
        self.dim == other.dim && self.cap == other.cap
    }
}

/// Multi-indices of exact degree `k`, first exponent largest first, so the
/// overall enumeration is graded-lex.
fn append_degree(dim: usize, k: u32, prefix: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
    if dim == 1 {
        let mut idx = prefix.clone();
        idx.push(k);
        out.push(MultiIndex(idx));
        return;
    }
    for e in (0..=k).rev() {
        prefix.push(e);
        append_degree(dim - 1, k - e, prefix, out);
        prefix.pop();
    }
}

/// A polynomial of total degree `<= cap`, dense against a shared [`Basis`].
#[derive(Clone)]
pub struct PowerSeries {
    basis: Arc<Basis>,
    coeffs: Vec<Complex64>,
}

impl fmt::Debug for PowerSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PowerSeries[")?;
        let mut first = true;
        for (alpha, c) in self.iter_nonzero() {
            if !first {
                write!(f, " + ")?;
            }
            write!(f, "({c})z^{alpha}")?;
            first = false;
        }
        write!(f, "]")
    }
}

impl PowerSeries {
    pub fn zero(basis: &Arc<Basis>) -> Self {
        PowerSeries { basis: Arc::clone(basis), coeffs: vec![Complex64::ZERO; basis.len()] }
    }

    pub fn constant(basis: &Arc<Basis>, c: Complex64) -> Self {
        let mut s = Self::zero(basis);
        s.coeffs[0] = c;
        s
    }

    pub fn monomial(basis: &Arc<Basis>, alpha: &MultiIndex, c: Complex64) -> Self {
        let mut s = Self::zero(basis);
        let i = basis.index_of(alpha).expect("monomial degree exceeds the cap");
        s.coeffs[i] = c;
        s
    }

    /// The linear form `sum_j coeffs[j] z_j`.
    pub fn linear_form(basis: &Arc<Basis>, coeffs: &CVec) -> Self {
        assert_eq!(coeffs.len(), basis.dim());
        let mut s = Self::zero(basis);
        for j in 0..basis.dim() {
            let i = basis
                .index_of(&MultiIndex::unit(basis.dim(), j))
                .expect("degree cap must be >= 1 for a linear form");
            s.coeffs[i] = coeffs[j];
        }
        s
    }

    pub fn basis(&self) -> &Arc<Basis> {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn degree_cap(&self) -> u32 {
        self.basis.cap()
    }

    pub fn coeff(&self, alpha: &MultiIndex) -> Complex64 {
        self.basis.index_of(alpha).map_or(Complex64::ZERO, |i| self.coeffs[i])
    }

    pub fn coeff_at(&self, i: usize) -> Complex64 {
        self.coeffs[i]
    }

    pub fn set_coeff(&mut self, alpha: &MultiIndex, c: Complex64) {
        let i = self.basis.index_of(alpha).expect("index outside the degree cap");
        self.coeffs[i] = c;
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn iter_nonzero(&self) -> impl Iterator<Item = (&MultiIndex, Complex64)> {
        self.basis
            .indices()
            .iter()
            .zip(self.coeffs.iter())
            .filter(|(_, c)| c.norm_sqr() != 0.0)
            .map(|(a, c)| (a, *c))
    }

    fn check_shape(&self, other: &PowerSeries) -> Result<()> {
        if !self.basis.same_shape(&other.basis) {
            return Err(Error::DimensionMismatch(format!(
                "series on {} vars capped at {} vs {} vars capped at {}",
                self.dim(),
                self.degree_cap(),
                other.dim(),
                other.degree_cap()
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &PowerSeries) -> Result<PowerSeries> {
        self.check_shape(other)?;
        let mut out = self.clone();
        for (c, d) in out.coeffs.iter_mut().zip(&other.coeffs) {
            *c += d;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &PowerSeries) -> Result<PowerSeries> {
        self.check_shape(other)?;
        let mut out = self.clone();
        for (c, d) in out.coeffs.iter_mut().zip(&other.coeffs) {
            *c -= d;
        }
        Ok(out)
    }

    pub fn scale(&self, c: Complex64) -> PowerSeries {
        let mut out = self.clone();
        for v in &mut out.coeffs {
            *v *= c;
        }
        out
    }

    /// Truncated product: terms of total degree beyond the cap are dropped.
    pub fn mul(&self, other: &PowerSeries) -> Result<PowerSeries> {
        self.check_shape(other)?;
        let basis = &self.basis;
        let cap = basis.cap();
        let mut out = PowerSeries::zero(basis);
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.norm_sqr() == 0.0 {
                continue;
            }
            let alpha = &basis.indices()[i];
            let da = alpha.degree();
            for (j, b) in other.coeffs.iter().enumerate() {
                if b.norm_sqr() == 0.0 {
                    continue;
                }
                let beta = &basis.indices()[j];
                if da + beta.degree() > cap {
                    continue;
                }
                let k = basis.index_of(&alpha.add(beta)).expect("sum within cap");
                out.coeffs[k] += a * b;
            }
        }
        Ok(out)
    }

    /// Repeated truncated multiplication.
    pub fn pow(&self, k: u32) -> PowerSeries {
        let mut out = PowerSeries::constant(&self.basis, Complex64::ONE);
        for _ in 0..k {
            out = out.mul(self).expect("shared basis");
        }
        out
    }

    /// Sums the truncated series at `z`.
    pub fn eval(&self, z: &CVec) -> Complex64 {
        assert_eq!(z.len(), self.dim());
        self.basis
            .indices()
            .iter()
            .zip(&self.coeffs)
            .filter(|(_, c)| c.norm_sqr() != 0.0)
            .map(|(alpha, c)| c * alpha.eval(z))
            .sum()
    }

    /// Partial derivative in the `j`-th variable, treating the series as a
    /// polynomial (exact when the top-degree coefficients are complete).
    pub fn partial_derivative(&self, j: usize) -> PowerSeries {
        let basis = &self.basis;
        let mut out = PowerSeries::zero(basis);
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.norm_sqr() == 0.0 {
                continue;
            }
            let alpha = &basis.indices()[i];
            if alpha.0[j] == 0 {
                continue;
            }
            let mut shifted = alpha.clone();
            shifted.0[j] -= 1;
            let k = basis.index_of(&shifted).expect("lower degree stays in basis");
            out.coeffs[k] += c * alpha.0[j] as f64;
        }
        out
    }
}

/// The linear form `<z, c> = sum_j z_j conj(c_j)`.
fn pairing_form(basis: &Arc<Basis>, c: &CVec) -> PowerSeries {
    PowerSeries::linear_form(basis, &c.map(|x| x.conj()))
}

/// Formal Taylor expansion of `(1 - <z,c>)^{-m}`; no ball check.
pub fn expand_reciprocal_linear_formal(basis: &Arc<Basis>, c: &CVec, m: u32) -> PowerSeries {
    if basis.cap() == 0 {
        return PowerSeries::constant(basis, Complex64::ONE);
    }
    let l = pairing_form(basis, c);
    let mut power = PowerSeries::constant(basis, Complex64::ONE);
    let mut out = PowerSeries::zero(basis);
    for k in 0..=basis.cap() {
        let b = binomial((m - 1 + k) as u64, k as u64) as f64;
        out = out.add(&power.scale(b.into())).expect("shared basis");
        if k < basis.cap() {
            power = power.mul(&l).expect("shared basis");
        }
    }
    out
}

/// Taylor expansion of `(1 - <z,c>)^{-m}` to the basis degree cap.
pub fn expand_reciprocal_linear(basis: &Arc<Basis>, c: &CVec, m: u32) -> Result<PowerSeries> {
    let n = c.norm();
    if n >= 1.0 {
        return Err(Error::NotInBall(n));
    }
    Ok(expand_reciprocal_linear_formal(basis, c, m))
}

/// Formal expansion of `ln(1/(1 - <z,c>)) = sum_k <z,c>^k / k`; no ball check.
pub fn expand_log_reciprocal_formal(basis: &Arc<Basis>, c: &CVec) -> PowerSeries {
    if basis.cap() == 0 {
        return PowerSeries::zero(basis);
    }
    let l = pairing_form(basis, c);
    let mut power = l.clone();
    let mut out = PowerSeries::zero(basis);
    for k in 1..=basis.cap() {
        out = out.add(&power.scale((1.0 / k as f64).into())).expect("shared basis");
        if k < basis.cap() {
            power = power.mul(&l).expect("shared basis");
        }
    }
    out
}

/// Expansion of `ln(1/(1 - <z,c>))` to the degree cap (no constant term).
pub fn expand_log_reciprocal(basis: &Arc<Basis>, c: &CVec) -> Result<PowerSeries> {
    let n = c.norm();
    if n >= 1.0 {
        return Err(Error::NotInBall(n));
    }
    Ok(expand_log_reciprocal_formal(basis, c))
}

/// Componentwise Taylor expansion of a linear fractional map about the
/// origin: `phi_j = ((A z + b)_j / d) * (1 - <z, -c/conj(d)>)^{-1}`.
pub fn map_component_series(
    phi: &LinearFractionalMap,
    basis: &Arc<Basis>,
) -> Result<Vec<PowerSeries>> {
    if phi.dim() != basis.dim() {
        return Err(Error::DimensionMismatch(format!(
            "map on {} vars, basis on {}",
            phi.dim(),
            basis.dim()
        )));
    }
    let d = phi.d;
    if d.norm() < 1e-13 {
        return Err(Error::DenominatorVanishesAtOrigin);
    }
    let shifted = phi.c.map(|x| -x / d.conj());
    let recip = expand_reciprocal_linear_formal(basis, &shifted, 1).scale(d.inv());
    let mut out = Vec::with_capacity(phi.dim());
    for j in 0..phi.dim() {
        let mut numerator = PowerSeries::constant(basis, phi.b[j]);
        let row = DVector::from_fn(phi.dim(), |i, _| phi.a[(j, i)]);
        numerator = numerator.add(&PowerSeries::linear_form(basis, &row))?;
        out.push(numerator.mul(&recip)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lfmap::LinearFractionalMap;
    use nalgebra::DMatrix;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn approx_series(a: &PowerSeries, b: &PowerSeries, tol: f64) {
        for (alpha, ca) in a.basis().indices().iter().zip(a.coeffs()) {
            let cb = b.coeff(alpha);
            assert!(
                (ca - cb).norm() < tol,
                "coefficient at {alpha}: {ca} vs {cb}"
            );
        }
    }

    #[test]
    fn grlex_enumeration_n2() {
        let basis = Basis::new(2, 2);
        let expect: Vec<MultiIndex> = [
            vec![0, 0],
            vec![1, 0],
            vec![0, 1],
            vec![2, 0],
            vec![1, 1],
            vec![0, 2],
        ]
        .into_iter()
        .map(MultiIndex)
        .collect();
        assert_eq!(basis.indices(), &expect[..]);
        assert_eq!(basis.len(), 6);
    }

    #[test]
    fn basis_dimension_is_binomial() {
        for n in 1..=3usize {
            for d in 0..=8u32 {
                let basis = Basis::new(n, d);
                assert_eq!(basis.len() as u128, binomial((n as u32 + d) as u64, d as u64));
            }
        }
    }

    #[test]
    fn mul_truncates_telescoping_product() {
        // (sum_{k<=4} z^k)(1 - z) at cap 4 leaves only the constant term.
        let basis = Basis::new(1, 4);
        let mut geo = PowerSeries::zero(&basis);
        for k in 0..=4u32 {
            geo.set_coeff(&MultiIndex(vec![k]), Complex64::ONE);
        }
        let mut one_minus = PowerSeries::constant(&basis, Complex64::ONE);
        one_minus.set_coeff(&MultiIndex(vec![1]), c(-1.0, 0.0));
        let prod = geo.mul(&one_minus).unwrap();
        approx_series(&prod, &PowerSeries::constant(&basis, Complex64::ONE), 1e-15);
    }

    #[test]
    fn binomial_square() {
        let basis = Basis::new(2, 2);
        let s = PowerSeries::linear_form(&basis, &DVector::from_vec(vec![Complex64::ONE, Complex64::ONE]));
        let sq = s.pow(2);
        assert_eq!(sq.coeff(&MultiIndex(vec![2, 0])), Complex64::ONE);
        assert_eq!(sq.coeff(&MultiIndex(vec![1, 1])), c(2.0, 0.0));
        assert_eq!(sq.coeff(&MultiIndex(vec![0, 2])), Complex64::ONE);
    }

    #[test]
    fn mul_of_conjugate_linear_factors() {
        let basis = Basis::new(2, 2);
        let one = PowerSeries::constant(&basis, Complex64::ONE);
        let z1 = PowerSeries::monomial(&basis, &MultiIndex(vec![1, 0]), Complex64::ONE);
        let plus = one.add(&z1).unwrap();
        let minus = one.sub(&z1).unwrap();
        let prod = plus.mul(&minus).unwrap();
        assert_eq!(prod.coeff(&MultiIndex(vec![0, 0])), Complex64::ONE);
        assert_eq!(prod.coeff(&MultiIndex(vec![1, 0])), Complex64::ZERO);
        assert_eq!(prod.coeff(&MultiIndex(vec![2, 0])), c(-1.0, 0.0));
    }

    #[test]
    fn geometric_series_in_one_variable() {
        let basis = Basis::new(1, 3);
        let s = expand_reciprocal_linear(&basis, &DVector::from_vec(vec![c(0.5, 0.0)]), 1).unwrap();
        for (k, expect) in [1.0, 0.5, 0.25, 0.125].into_iter().enumerate() {
            assert!((s.coeff(&MultiIndex(vec![k as u32])) - c(expect, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn reciprocal_linear_degree_one_coefficient() {
        // (1 - 0.5 z_1)^{-2} has degree-1 coefficient binom(2,1) * 0.5 = 1.
        let basis = Basis::new(2, 1);
        let s = expand_reciprocal_linear(&basis, &DVector::from_vec(vec![c(0.5, 0.0), Complex64::ZERO]), 2)
            .unwrap();
        assert!((s.coeff(&MultiIndex(vec![0, 0])) - Complex64::ONE).norm() < 1e-15);
        assert!((s.coeff(&MultiIndex(vec![1, 0])) - Complex64::ONE).norm() < 1e-15);
        assert!(s.coeff(&MultiIndex(vec![0, 1])).norm() < 1e-15);
    }

    #[test]
    fn reciprocal_rejects_exterior_point() {
        let basis = Basis::new(1, 3);
        let err = expand_reciprocal_linear(&basis, &DVector::from_vec(vec![c(1.2, 0.0)]), 1);
        assert!(matches!(err, Err(Error::NotInBall(_))));
    }

    #[test]
    fn log_series_harmonic_coefficients() {
        // Formal expansion at c = 1: coefficients 1, 1/2, 1/3.
        let basis = Basis::new(1, 3);
        let s = expand_log_reciprocal_formal(&basis, &DVector::from_vec(vec![Complex64::ONE]));
        assert!((s.coeff(&MultiIndex(vec![1])) - c(1.0, 0.0)).norm() < 1e-15);
        assert!((s.coeff(&MultiIndex(vec![2])) - c(0.5, 0.0)).norm() < 1e-15);
        assert!((s.coeff(&MultiIndex(vec![3])) - c(1.0 / 3.0, 0.0)).norm() < 1e-15);
        assert!(s.coeff(&MultiIndex(vec![0])).norm() == 0.0);
    }

    #[test]
    fn log_series_mixed_coefficient() {
        let scale = 0.9;
        let cvec = DVector::from_vec(vec![c(0.6 * scale, 0.0), c(0.0, 0.8 * scale)]);
        let basis = Basis::new(2, 2);
        let s = expand_log_reciprocal(&basis, &cvec).unwrap();
        let expect = cvec[0].conj() * cvec[1].conj();
        assert!((s.coeff(&MultiIndex(vec![1, 1])) - expect).norm() < 1e-15);
    }

    #[test]
    fn map_series_identity() {
        let id = LinearFractionalMap::identity(2);
        let basis = Basis::new(2, 3);
        let comps = map_component_series(&id, &basis).unwrap();
        approx_series(
            &comps[0],
            &PowerSeries::monomial(&basis, &MultiIndex(vec![1, 0]), Complex64::ONE),
            1e-15,
        );
        approx_series(
            &comps[1],
            &PowerSeries::monomial(&basis, &MultiIndex(vec![0, 1]), Complex64::ONE),
            1e-15,
        );
    }

    #[test]
    fn map_series_disk_involution() {
        // (0.5 - z)/(1 - 0.5 z) = 0.5 - 0.75 z - 0.375 z^2 + ...
        let phi = LinearFractionalMap::new(
            DMatrix::from_element(1, 1, c(-1.0, 0.0)),
            DVector::from_vec(vec![c(0.5, 0.0)]),
            DVector::from_vec(vec![c(-0.5, 0.0)]),
            Complex64::ONE,
        );
        let basis = Basis::new(1, 2);
        let comps = map_component_series(&phi, &basis).unwrap();
        assert!((comps[0].coeff(&MultiIndex(vec![0])) - c(0.5, 0.0)).norm() < 1e-15);
        assert!((comps[0].coeff(&MultiIndex(vec![1])) - c(-0.75, 0.0)).norm() < 1e-15);
        assert!((comps[0].coeff(&MultiIndex(vec![2])) - c(-0.375, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn map_series_affine_is_exact() {
        let phi = LinearFractionalMap::affine(
            DMatrix::from_row_slice(2, 2, &[c(0.5, 0.0), c(0.1, 0.2), c(0.0, 0.0), c(0.3, 0.0)]),
            DVector::from_vec(vec![c(0.25, 0.0), c(0.0, -0.1)]),
        );
        let basis = Basis::new(2, 3);
        let comps = map_component_series(&phi, &basis).unwrap();
        assert_eq!(comps[0].coeff(&MultiIndex(vec![0, 0])), c(0.25, 0.0));
        assert_eq!(comps[0].coeff(&MultiIndex(vec![1, 0])), c(0.5, 0.0));
        assert_eq!(comps[0].coeff(&MultiIndex(vec![0, 1])), c(0.1, 0.2));
        assert_eq!(comps[1].coeff(&MultiIndex(vec![0, 1])), c(0.3, 0.0));
        assert!(comps[1].coeff(&MultiIndex(vec![2, 0])).norm() == 0.0);
    }

    #[test]
    fn evaluation_matches_closed_form_inside_tail_bound() {
        let basis = Basis::new(2, 8);
        let cvec = DVector::from_vec(vec![c(0.3, 0.1), c(-0.2, 0.4)]);
        let s = expand_reciprocal_linear(&basis, &cvec, 2).unwrap();
        let grid = crate::sampling::ball_grid(50, 2, 0.5, 11);
        for z in grid {
            let pairing: Complex64 = (0..2).map(|j| z[j] * cvec[j].conj()).sum();
            let closed = (Complex64::ONE - pairing).powi(-2);
            let ratio = z.norm() * cvec.norm();
            let tail = 3.0 * (basis.cap() as f64 + 2.0) * ratio.powi(basis.cap() as i32 + 1)
                / (1.0 - ratio);
            assert!((s.eval(&z) - closed).norm() <= 10.0 * tail + 1e-13);
        }
    }

    proptest! {
        #[test]
        fn grlex_is_total_and_degree_monotone(a in proptest::collection::vec(0u32..5, 2), b in proptest::collection::vec(0u32..5, 2)) {
            let x = MultiIndex(a);
            let y = MultiIndex(b);
            if x.degree() < y.degree() {
                prop_assert!(x < y);
            }
            prop_assert_eq!(x == y, x.cmp(&y) == std::cmp::Ordering::Equal);
        }

        #[test]
        fn ring_laws_hold_exactly(
            xs in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 6),
            ys in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 6),
            zs in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 6),
        ) {
            let basis = Basis::new(2, 2);
            let mk = |v: &Vec<(f64, f64)>| {
                let mut s = PowerSeries::zero(&basis);
                for (i, (re, im)) in v.iter().enumerate() {
                    s.coeffs[i] = Complex64::new(*re, *im);
                }
                s
            };
            let (f, g, h) = (mk(&xs), mk(&ys), mk(&zs));
            // (f g) h = f (g h) up to rounding; distributivity exactly by linearity.
            let lhs = f.mul(&g).unwrap().mul(&h).unwrap();
            let rhs = f.mul(&g.mul(&h).unwrap()).unwrap();
            for (a, b) in lhs.coeffs().iter().zip(rhs.coeffs()) {
                prop_assert!((a - b).norm() < 1e-12);
            }
            let dist_l = f.mul(&g.add(&h).unwrap()).unwrap();
            let dist_r = f.mul(&g).unwrap().add(&f.mul(&h).unwrap()).unwrap();
            for (a, b) in dist_l.coeffs().iter().zip(dist_r.coeffs()) {
                prop_assert!((a - b).norm() < 1e-12);
            }
        }
    }
}
