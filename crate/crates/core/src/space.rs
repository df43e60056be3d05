//! Reproducing kernels of `H^2(B_N)` and the Dirichlet space `D(B_N)`,
//! the closed weight families used by the classification theorems, and the
//! adjoint action of a weighted composition operator on (derivative)
//! kernels.
//!
//! The Dirichlet inner product here is the one induced by the kernel
//! `K_w(z) = 1 + ln(1/(1 - <z,w>))`, i.e. the coefficientwise weights
//! returned by [`Space::monomial_norm_sq`]; evaluation and first/second
//! partial derivatives at interior points are bounded functionals with the
//! explicit kernels below.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lfmap::LinearFractionalMap;
use crate::series::{self, Basis, MultiIndex, PowerSeries};
use crate::{inner, CVec};
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpaceKind {
    Dirichlet,
    Hardy,
}

impl SpaceKind {
    pub fn name(&self) -> &'static str {
        match self {
            SpaceKind::Dirichlet => "dirichlet",
            SpaceKind::Hardy => "hardy",
        }
    }
}

/// A reproducing kernel space over the unit ball of `C^dim`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Space {
    pub kind: SpaceKind,
    pub dim: usize,
}

impl Space {
    pub fn dirichlet(dim: usize) -> Space {
        assert!(dim >= 1);
        Space { kind: SpaceKind::Dirichlet, dim }
    }

    pub fn hardy(dim: usize) -> Space {
        assert!(dim >= 1);
        Space { kind: SpaceKind::Hardy, dim }
    }

    /// `K_w(z)`: `1 + ln(1/(1 - <z,w>))` on the Dirichlet space,
    /// `(1 - <z,w>)^{-N}` on the Hardy space. Principal branch; valid since
    /// `Re(1 - <z,w>) > 0` whenever `|<z,w>| < 1`.
    pub fn kernel(&self, w: &CVec, z: &CVec) -> Result<Complex64> {
        let p = inner(z, w);
        if p.norm() >= 1.0 {
            return Err(Error::OutOfDomain(p.norm()));
        }
        let one_minus = Complex64::ONE - p;
        Ok(match self.kind {
            SpaceKind::Dirichlet => Complex64::ONE - one_minus.ln(),
            SpaceKind::Hardy => one_minus.powi(-(self.dim as i32)),
        })
    }

    /// `|K_w|^2 = K_w(w)`.
    pub fn kernel_norm_sq(&self, w: &CVec) -> Result<f64> {
        let n2 = w.norm_squared();
        if n2 >= 1.0 {
            return Err(Error::OutOfDomain(n2.sqrt()));
        }
        Ok(match self.kind {
            SpaceKind::Dirichlet => 1.0 + (1.0 / (1.0 - n2)).ln(),
            SpaceKind::Hardy => (1.0 - n2).powi(-(self.dim as i32)),
        })
    }

    /// `|z^alpha|^2` in the kernel-induced inner product: the reciprocal of
    /// the coefficient of `z^alpha conj(w)^alpha` in the kernel expansion.
    ///
    /// Hardy: `(N-1)! alpha! / (N-1+|alpha|)!`.
    /// Dirichlet: `1` for `alpha = 0`, else `alpha! / (|alpha|-1)!`.
    pub fn monomial_norm_sq(&self, alpha: &MultiIndex) -> f64 {
        let k = alpha.degree() as u64;
        match self.kind {
            SpaceKind::Hardy => {
                let n = self.dim as u64;
                (series::factorial(n - 1) * alpha.factorial()) as f64
                    / series::factorial(n - 1 + k) as f64
            }
            SpaceKind::Dirichlet => {
                if k == 0 {
                    1.0
                } else {
                    alpha.factorial() as f64 / series::factorial(k - 1) as f64
                }
            }
        }
    }

    pub fn monomial_norm(&self, alpha: &MultiIndex) -> f64 {
        self.monomial_norm_sq(alpha).sqrt()
    }

    /// Taylor expansion of `z -> K_w(z)` to the basis degree cap.
    pub fn kernel_series(&self, w: &CVec, basis: &Arc<Basis>) -> Result<PowerSeries> {
        let n = w.norm();
        if n >= 1.0 {
            return Err(Error::OutOfDomain(n));
        }
        match self.kind {
            SpaceKind::Hardy => series::expand_reciprocal_linear(basis, w, self.dim as u32),
            SpaceKind::Dirichlet => {
                let log = series::expand_log_reciprocal(basis, w)?;
                log.add(&PowerSeries::constant(basis, Complex64::ONE))
            }
        }
    }
}

/// `K_w^{D_j}(z) = z_j / (1 - <z,w>)`, the Dirichlet-space kernel
/// reproducing the first partial derivative at `w`.
pub fn deriv_kernel(w: &CVec, j: usize, z: &CVec) -> Result<Complex64> {
    let p = inner(z, w);
    if p.norm() >= 1.0 {
        return Err(Error::OutOfDomain(p.norm()));
    }
    Ok(z[j] / (Complex64::ONE - p))
}

/// `K_w^{D_{i,j}}(z) = z_i z_j / (1 - <z,w>)^2`, reproducing the second
/// partial derivative on the Dirichlet space.
pub fn second_deriv_kernel(w: &CVec, i: usize, j: usize, z: &CVec) -> Result<Complex64> {
    let p = inner(z, w);
    if p.norm() >= 1.0 {
        return Err(Error::OutOfDomain(p.norm()));
    }
    Ok(z[i] * z[j] / (Complex64::ONE - p).powi(2))
}

/// The multiplier `psi` of a weighted composition operator, restricted to
/// the closed families the classification theorems use.
#[derive(Debug, Clone, PartialEq)]
pub enum WeightSpec {
    /// `psi(z) = c`.
    Constant(Complex64),
    /// `psi(z) = a1 / (1 - <z, conj(a0)>)^power`; the pairing reduces to
    /// the bilinear form `sum_j z_j (a0)_j`.
    KernelPower { a1: Complex64, a0: CVec, power: u32 },
    /// `psi(z) = mu (1-|a|^2)^{power/2} / (1 - <z, a>)^power`, a scalar
    /// multiple of a normalized-kernel power.
    NormalizedKernel { mu: Complex64, a: CVec, power: u32 },
}

impl WeightSpec {
    pub fn constant(c: Complex64) -> WeightSpec {
        WeightSpec::Constant(c)
    }

    /// Validates the family invariants: nonzero leading scalar and interior
    /// base point.
    pub fn validate(&self) -> Result<()> {
        match self {
            WeightSpec::Constant(_) => Ok(()),
            WeightSpec::KernelPower { a1, a0, .. } => {
                if a1.norm() == 0.0 {
                    return Err(Error::PreconditionViolated("a1 must be nonzero".into()));
                }
                if a0.norm() >= 1.0 {
                    return Err(Error::NotInBall(a0.norm()));
                }
                Ok(())
            }
            WeightSpec::NormalizedKernel { a, .. } => {
                if a.norm() >= 1.0 {
                    return Err(Error::NotInBall(a.norm()));
                }
                Ok(())
            }
        }
    }

    /// Base of the denominator pairing: `sum_j z_j t_j` with `t` as below.
    fn bilinear_vector(&self) -> Option<CVec> {
        match self {
            WeightSpec::Constant(_) => None,
            // <z, conj(a0)> = sum z_j (a0)_j
            WeightSpec::KernelPower { a0, .. } => Some(a0.clone()),
            // <z, a> = sum z_j conj(a_j)
            WeightSpec::NormalizedKernel { a, .. } => Some(a.map(|x| x.conj())),
        }
    }

    fn front_scalar(&self) -> Complex64 {
        match self {
            WeightSpec::Constant(c) => *c,
            WeightSpec::KernelPower { a1, .. } => *a1,
            WeightSpec::NormalizedKernel { mu, a, power } => {
                mu * (1.0 - a.norm_squared()).powf(*power as f64 / 2.0)
            }
        }
    }

    fn power(&self) -> u32 {
        match self {
            WeightSpec::Constant(_) => 0,
            WeightSpec::KernelPower { power, .. } => *power,
            WeightSpec::NormalizedKernel { power, .. } => *power,
        }
    }

    /// Closed-form evaluation at an interior point.
    pub fn eval(&self, z: &CVec) -> Complex64 {
        match self.bilinear_vector() {
            None => self.front_scalar(),
            Some(t) => {
                let pairing: Complex64 = z.iter().zip(t.iter()).map(|(a, b)| a * b).sum();
                self.front_scalar() * (Complex64::ONE - pairing).powi(-(self.power() as i32))
            }
        }
    }

    /// `d psi / d z_k`, analytic.
    pub fn partial(&self, z: &CVec, k: usize) -> Complex64 {
        match self.bilinear_vector() {
            None => Complex64::ZERO,
            Some(t) => {
                let pairing: Complex64 = z.iter().zip(t.iter()).map(|(a, b)| a * b).sum();
                let p = self.power();
                self.front_scalar()
                    * (p as f64)
                    * t[k]
                    * (Complex64::ONE - pairing).powi(-(p as i32) - 1)
            }
        }
    }

    /// `d^2 psi / (d z_k d z_l)`, analytic.
    pub fn second_partial(&self, z: &CVec, k: usize, l: usize) -> Complex64 {
        match self.bilinear_vector() {
            None => Complex64::ZERO,
            Some(t) => {
                let pairing: Complex64 = z.iter().zip(t.iter()).map(|(a, b)| a * b).sum();
                let p = self.power();
                self.front_scalar()
                    * (p as f64)
                    * ((p + 1) as f64)
                    * t[k]
                    * t[l]
                    * (Complex64::ONE - pairing).powi(-(p as i32) - 2)
            }
        }
    }

    /// Truncated Taylor expansion to the basis degree cap.
    pub fn series(&self, basis: &Arc<Basis>) -> Result<PowerSeries> {
        self.validate()?;
        match self.bilinear_vector() {
            None => Ok(PowerSeries::constant(basis, self.front_scalar())),
            Some(t) => {
                // The bilinear pairing sum z_j t_j equals <z, conj(t)>.
                let c = t.map(|x| x.conj());
                let s = series::expand_reciprocal_linear(basis, &c, self.power())?;
                Ok(s.scale(self.front_scalar()))
            }
        }
    }
}

/// Derivative order of a kernel directive.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DerivOrder {
    None,
    First(usize),
    Second(usize, usize),
}

/// A kernel, first-derivative kernel or second-derivative kernel anchored
/// at an interior base point.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelDirective {
    pub base: CVec,
    pub order: DerivOrder,
}

impl KernelDirective {
    pub fn point(base: CVec) -> Self {
        KernelDirective { base, order: DerivOrder::None }
    }

    pub fn first(base: CVec, j: usize) -> Self {
        KernelDirective { base, order: DerivOrder::First(j) }
    }

    pub fn second(base: CVec, i: usize, j: usize) -> Self {
        KernelDirective { base, order: DerivOrder::Second(i, j) }
    }

    /// Evaluates the directive as a function of `z`. Derivative kernels are
    /// Dirichlet-space objects.
    pub fn eval(&self, space: &Space, z: &CVec) -> Result<Complex64> {
        match self.order {
            DerivOrder::None => space.kernel(&self.base, z),
            DerivOrder::First(j) => {
                require_dirichlet(space)?;
                deriv_kernel(&self.base, j, z)
            }
            DerivOrder::Second(i, j) => {
                require_dirichlet(space)?;
                second_deriv_kernel(&self.base, i, j, z)
            }
        }
    }

    /// The reproduced functional `<f, K>` applied to a polynomial:
    /// evaluation, or a first/second partial derivative, at the base point.
    pub fn pair(&self, f: &PowerSeries) -> Complex64 {
        match self.order {
            DerivOrder::None => f.eval(&self.base),
            DerivOrder::First(j) => f.partial_derivative(j).eval(&self.base),
            DerivOrder::Second(i, j) => {
                f.partial_derivative(i).partial_derivative(j).eval(&self.base)
            }
        }
    }
}

fn require_dirichlet(space: &Space) -> Result<()> {
    if space.kind != SpaceKind::Dirichlet {
        return Err(Error::WrongSpace {
            expected: "dirichlet".into(),
            got: space.kind.name().into(),
        });
    }
    Ok(())
}

/// A finite linear combination `sum_i c_i K_i` of kernel directives.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelCombination {
    pub terms: Vec<(Complex64, KernelDirective)>,
}

impl KernelCombination {
    pub fn eval(&self, space: &Space, z: &CVec) -> Result<Complex64> {
        let mut acc = Complex64::ZERO;
        for (c, k) in &self.terms {
            acc += c * k.eval(space, z)?;
        }
        Ok(acc)
    }

    /// `<f, sum_i c_i K_i> = sum_i conj(c_i) <f, K_i>`.
    pub fn pair(&self, f: &PowerSeries) -> Complex64 {
        self.terms.iter().map(|(c, k)| c.conj() * k.pair(f)).sum()
    }
}

fn check_interior(label: &str, v: &CVec) -> Result<()> {
    if v.norm() >= 1.0 {
        return Err(Error::OutOfDomain(v.norm()));
    }
    let _ = label;
    Ok(())
}

/// `W* K_w = conj(psi(w)) K_{phi(w)}`, returned as the scalar and the new
/// base point.
pub fn adjoint_on_kernel(
    psi: &WeightSpec,
    phi: &LinearFractionalMap,
    w: &CVec,
) -> Result<(Complex64, CVec)> {
    check_interior("w", w)?;
    let image = phi.eval(w)?;
    check_interior("phi(w)", &image)?;
    Ok((psi.eval(w).conj(), image))
}

/// Adjoint action on a first-derivative kernel (Dirichlet space):
/// `W* K_a^{D_k} = conj(d psi/d z_k (a)) K_{phi(a)}
///   + conj(psi(a)) sum_j conj(d phi_j/d z_k (a)) K_{phi(a)}^{D_j}`.
pub fn adjoint_on_deriv_kernel(
    psi: &WeightSpec,
    phi: &LinearFractionalMap,
    a: &CVec,
    k: usize,
) -> Result<KernelCombination> {
    check_interior("a", a)?;
    let image = phi.eval(a)?;
    check_interior("phi(a)", &image)?;
    let mut terms = Vec::with_capacity(phi.dim() + 1);
    terms.push((psi.partial(a, k).conj(), KernelDirective::point(image.clone())));
    let psi_bar = psi.eval(a).conj();
    for j in 0..phi.dim() {
        let coeff = psi_bar * phi.partial(a, j, k)?.conj();
        terms.push((coeff, KernelDirective::first(image.clone(), j)));
    }
    Ok(KernelCombination { terms })
}

/// Adjoint action on a second-derivative kernel for an index pair `(k, l)`;
/// the five groups are the zeroth-order term, two first-derivative groups,
/// the curvature group and the second-derivative square group. The
/// diagonal pair `(1, 1)` is the printed expansion.
pub fn adjoint_on_second_deriv_kernel_at(
    psi: &WeightSpec,
    phi: &LinearFractionalMap,
    a: &CVec,
    k: usize,
    l: usize,
) -> Result<KernelCombination> {
    check_interior("a", a)?;
    let image = phi.eval(a)?;
    check_interior("phi(a)", &image)?;
    let n = phi.dim();
    let psi_bar = psi.eval(a).conj();
    let dpsi_k = psi.partial(a, k).conj();
    let dpsi_l = psi.partial(a, l).conj();

    let mut terms = Vec::new();
    terms.push((
        psi.second_partial(a, k, l).conj(),
        KernelDirective::point(image.clone()),
    ));
    for j in 0..n {
        let dphi_jk = phi.partial(a, j, k)?.conj();
        let dphi_jl = phi.partial(a, j, l)?.conj();
        terms.push((dpsi_k * dphi_jl + dpsi_l * dphi_jk, KernelDirective::first(image.clone(), j)));
        terms.push((
            psi_bar * phi.second_partial(a, j, k, l)?.conj(),
            KernelDirective::first(image.clone(), j),
        ));
    }
    for i in 0..n {
        let dphi_ik = phi.partial(a, i, k)?.conj();
        for j in 0..n {
            let dphi_jl = phi.partial(a, j, l)?.conj();
            terms.push((
                psi_bar * dphi_ik * dphi_jl,
                KernelDirective::second(image.clone(), i, j),
            ));
        }
    }
    Ok(KernelCombination { terms })
}

/// The printed `(1, 1)` case of the second-derivative adjoint action.
pub fn adjoint_on_second_deriv_kernel(
    psi: &WeightSpec,
    phi: &LinearFractionalMap,
    a: &CVec,
) -> Result<KernelCombination> {
    adjoint_on_second_deriv_kernel_at(psi, phi, a, 0, 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{ball_grid, ball_pair_grid};
    use nalgebra::{DMatrix, DVector};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn cv(entries: &[(f64, f64)]) -> CVec {
        DVector::from_iterator(entries.len(), entries.iter().map(|&(r, i)| c(r, i)))
    }

    #[test]
    fn kernel_at_origin_is_one() {
        let z = cv(&[(0.3, 0.2), (0.1, 0.0)]);
        let origin = cv(&[(0.0, 0.0), (0.0, 0.0)]);
        for space in [Space::dirichlet(2), Space::hardy(2)] {
            assert!((space.kernel(&origin, &z).unwrap() - Complex64::ONE).norm() < 1e-15);
        }
    }

    #[test]
    fn dirichlet_diagonal_value() {
        let w = cv(&[(0.5, 0.0), (0.5, 0.0)]);
        let k = Space::dirichlet(2).kernel(&w, &w).unwrap();
        assert!((k - c(1.0 + 2.0f64.ln(), 0.0)).norm() < 1e-14);
    }

    #[test]
    fn hardy_diagonal_value() {
        let w = cv(&[(0.5, 0.0), (0.0, 0.0)]);
        let k = Space::hardy(2).kernel(&w, &w).unwrap();
        assert!((k - c(16.0 / 9.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn kernel_norms_match_diagonal() {
        let w = cv(&[(0.5, 0.2), (-0.1, 0.3)]);
        for space in [Space::dirichlet(2), Space::hardy(2)] {
            let d = space.kernel(&w, &w).unwrap();
            let n = space.kernel_norm_sq(&w).unwrap();
            assert!((d - c(n, 0.0)).norm() < 1e-13);
        }

        let scale = (0.75f64).sqrt();
        let w = cv(&[(scale, 0.0), (0.0, 0.0)]);
        assert!((Space::hardy(2).kernel_norm_sq(&w).unwrap() - 16.0).abs() < 1e-12);

        let r = (1.0 - (-1.0f64).exp()).sqrt();
        let w = cv(&[(r, 0.0), (0.0, 0.0)]);
        assert!((Space::dirichlet(2).kernel_norm_sq(&w).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn kernel_is_hermitian_symmetric() {
        for (z, w) in ball_pair_grid(25, 2, 0.7, 3) {
            for space in [Space::dirichlet(2), Space::hardy(2)] {
                let a = space.kernel(&w, &z).unwrap();
                let b = space.kernel(&z, &w).unwrap();
                assert!((a - b.conj()).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn out_of_domain_is_rejected() {
        let w = cv(&[(1.0, 0.0)]);
        assert!(matches!(
            Space::hardy(1).kernel(&w, &w),
            Err(Error::OutOfDomain(_))
        ));
        assert!(matches!(
            Space::dirichlet(1).kernel_norm_sq(&w),
            Err(Error::OutOfDomain(_))
        ));
    }

    #[test]
    fn deriv_kernel_values() {
        let origin = cv(&[(0.0, 0.0), (0.0, 0.0)]);
        let z = cv(&[(0.3, 0.0), (0.4, 0.0)]);
        assert!((deriv_kernel(&origin, 0, &z).unwrap() - c(0.3, 0.0)).norm() < 1e-15);

        let w = cv(&[(0.5, 0.0), (0.0, 0.0)]);
        let z = cv(&[(0.2, 0.0), (0.1, 0.0)]);
        assert!((deriv_kernel(&w, 1, &z).unwrap() - c(0.1 / 0.9, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn second_deriv_kernel_values() {
        let origin = cv(&[(0.0, 0.0), (0.0, 0.0)]);
        let z = cv(&[(0.3, 0.1), (0.4, -0.2)]);
        let v = second_deriv_kernel(&origin, 0, 1, &z).unwrap();
        assert!((v - z[0] * z[1]).norm() < 1e-15);

        let w = cv(&[(0.5, 0.0), (0.0, 0.0)]);
        let z = cv(&[(0.2, 0.0), (0.1, 0.0)]);
        let v = second_deriv_kernel(&w, 0, 1, &z).unwrap();
        assert!((v - c(0.02 / 0.81, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn monomial_norms_frozen_values() {
        let hardy = Space::hardy(2);
        let dirichlet = Space::dirichlet(2);
        assert_eq!(hardy.monomial_norm_sq(&MultiIndex(vec![0, 0])), 1.0);
        assert_eq!(dirichlet.monomial_norm_sq(&MultiIndex(vec![0, 0])), 1.0);
        assert!((hardy.monomial_norm_sq(&MultiIndex(vec![1, 0])) - 0.5).abs() < 1e-15);
        assert!((dirichlet.monomial_norm_sq(&MultiIndex(vec![1, 1])) - 1.0).abs() < 1e-15);
        // Hardy in one variable: the monomials are orthonormal.
        let disk = Space::hardy(1);
        for k in 0..6 {
            assert!((disk.monomial_norm_sq(&MultiIndex(vec![k])) - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn derivative_reproducing_via_series() {
        // <z_1^2, K_w^{D_1}> = 0.6 at w = (0.3, 0).
        let basis = Basis::new(2, 6);
        let w = cv(&[(0.3, 0.0), (0.0, 0.0)]);
        let dir = Space::dirichlet(2);
        let recip = series::expand_reciprocal_linear(&basis, &w, 1).unwrap();
        let z1 = PowerSeries::monomial(&basis, &MultiIndex(vec![1, 0]), Complex64::ONE);
        let dk_series = z1.mul(&recip).unwrap();
        let f = PowerSeries::monomial(&basis, &MultiIndex(vec![2, 0]), Complex64::ONE);
        let mut ip = Complex64::ZERO;
        for (alpha, fc) in f.iter_nonzero() {
            ip += fc * dk_series.coeff(alpha).conj() * dir.monomial_norm_sq(alpha);
        }
        assert!((ip - c(0.6, 0.0)).norm() < 1e-13);

        // <z_1 z_2, K_w^{D_{1,2}}> = 1 for arbitrary w.
        let w = cv(&[(0.2, 0.1), (-0.3, 0.2)]);
        let sq = series::expand_reciprocal_linear(&basis, &w, 2).unwrap();
        let z1z2 = PowerSeries::monomial(&basis, &MultiIndex(vec![1, 1]), Complex64::ONE);
        let dk2_series = z1z2.mul(&sq).unwrap();
        let f = PowerSeries::monomial(&basis, &MultiIndex(vec![1, 1]), Complex64::ONE);
        let mut ip = Complex64::ZERO;
        for (alpha, fc) in f.iter_nonzero() {
            ip += fc * dk2_series.coeff(alpha).conj() * dir.monomial_norm_sq(alpha);
        }
        assert!((ip - Complex64::ONE).norm() < 1e-13);
    }

    #[test]
    fn reproducing_property_from_kernel_series() {
        let basis = Basis::new(2, 6);
        let dir = Space::dirichlet(2);
        let hardy = Space::hardy(2);
        let points = ball_grid(20, 2, 0.6, 9);
        let polys = ball_grid(5, basis.len(), 1.0, 10);
        for coeff_vec in &polys {
            let mut f = PowerSeries::zero(&basis);
            for i in 0..basis.len() {
                f = f
                    .add(&PowerSeries::monomial(&basis, &basis.indices()[i], coeff_vec[i]))
                    .unwrap();
            }
            for w in &points {
                for space in [dir, hardy] {
                    let kw = space.kernel_series(w, &basis).unwrap();
                    let mut ip = Complex64::ZERO;
                    for (alpha, fc) in f.iter_nonzero() {
                        ip += fc * kw.coeff(alpha).conj() * space.monomial_norm_sq(alpha);
                    }
                    assert!((ip - f.eval(w)).norm() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn weight_eval_and_series_agree() {
        let specs = vec![
            WeightSpec::Constant(c(2.0, -1.0)),
            WeightSpec::KernelPower { a1: c(1.5, 0.5), a0: cv(&[(0.3, 0.1), (0.0, -0.2)]), power: 2 },
            WeightSpec::NormalizedKernel { mu: c(0.6, 0.8), a: cv(&[(0.4, 0.0), (0.1, 0.2)]), power: 2 },
        ];
        let basis = Basis::new(2, 10);
        for psi in specs {
            let s = psi.series(&basis).unwrap();
            for z in ball_grid(20, 2, 0.4, 12) {
                assert!((s.eval(&z) - psi.eval(&z)).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn weight_series_frozen_values() {
        let basis = Basis::new(2, 1);
        let psi = WeightSpec::KernelPower { a1: Complex64::ONE, a0: cv(&[(0.5, 0.0), (0.0, 0.0)]), power: 2 };
        let s = psi.series(&basis).unwrap();
        assert!((s.coeff(&MultiIndex(vec![0, 0])) - Complex64::ONE).norm() < 1e-15);
        assert!((s.coeff(&MultiIndex(vec![1, 0])) - Complex64::ONE).norm() < 1e-15);

        let basis0 = Basis::new(2, 0);
        let psi = WeightSpec::NormalizedKernel { mu: Complex64::ONE, a: cv(&[(0.5, 0.0), (0.0, 0.0)]), power: 2 };
        let s = psi.series(&basis0).unwrap();
        assert!((s.coeff(&MultiIndex(vec![0, 0])) - c(0.75, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn weight_partials_match_finite_differences() {
        let specs = vec![
            WeightSpec::KernelPower { a1: c(1.2, -0.3), a0: cv(&[(0.3, 0.1), (-0.1, 0.2)]), power: 2 },
            WeightSpec::NormalizedKernel { mu: c(0.0, 1.0), a: cv(&[(0.2, -0.4), (0.3, 0.0)]), power: 3 },
        ];
        let h = 1e-5;
        for psi in specs {
            for z in ball_grid(10, 2, 0.4, 13) {
                for k in 0..2 {
                    let mut zp = z.clone();
                    let mut zm = z.clone();
                    zp[k] += c(h, 0.0);
                    zm[k] -= c(h, 0.0);
                    let fd = (psi.eval(&zp) - psi.eval(&zm)) / c(2.0 * h, 0.0);
                    assert!((psi.partial(&z, k) - fd).norm() < 1e-7);
                    for l in 0..2 {
                        let mut zpl = z.clone();
                        let mut zml = z.clone();
                        zpl[l] += c(h, 0.0);
                        zml[l] -= c(h, 0.0);
                        let fd2 = (psi.partial(&zpl, k) - psi.partial(&zml, k)) / c(2.0 * h, 0.0);
                        assert!((psi.second_partial(&z, k, l) - fd2).norm() < 1e-6);
                    }
                }
            }
        }
    }

    #[test]
    fn adjoint_on_kernel_trivial_and_weighted() {
        let id = LinearFractionalMap::identity(2);
        let w = cv(&[(0.2, 0.1), (0.0, 0.3)]);
        let (s, p) = adjoint_on_kernel(&WeightSpec::Constant(Complex64::ONE), &id, &w).unwrap();
        assert_eq!(s, Complex64::ONE);
        assert_eq!(p, w);

        let a1 = c(1.5, 0.5);
        let psi = WeightSpec::KernelPower { a1, a0: cv(&[(0.3, 0.0), (0.0, 0.0)]), power: 2 };
        let phi = LinearFractionalMap::affine(
            DMatrix::identity(2, 2) * c(0.5, 0.0),
            cv(&[(0.1, 0.0), (0.0, 0.0)]),
        );
        let origin = cv(&[(0.0, 0.0), (0.0, 0.0)]);
        let (s, p) = adjoint_on_kernel(&psi, &phi, &origin).unwrap();
        assert!((s - a1.conj()).norm() < 1e-15);
        assert!((p - phi.eval(&origin).unwrap()).norm() < 1e-15);
    }

    #[test]
    fn adjoint_on_kernel_consistency_with_compression_pairing() {
        // <W e_alpha, K_w> = <e_alpha, W* K_w> for monomials e_alpha.
        let basis = Basis::new(2, 10);
        let dir = Space::dirichlet(2);
        let psi = WeightSpec::KernelPower { a1: c(0.8, 0.1), a0: cv(&[(0.2, 0.0), (0.1, 0.0)]), power: 2 };
        let phi = LinearFractionalMap::affine(
            DMatrix::from_row_slice(2, 2, &[c(0.4, 0.0), c(0.1, 0.0), c(0.1, 0.0), c(0.3, 0.0)]),
            cv(&[(0.05, 0.0), (0.0, 0.0)]),
        );
        let psi_series = psi.series(&basis).unwrap();
        let comps = series::map_component_series(&phi, &basis).unwrap();
        for w in ball_grid(5, 2, 0.1, 14) {
            let (scalar, point) = adjoint_on_kernel(&psi, &phi, &w).unwrap();
            for alpha in [MultiIndex(vec![1, 0]), MultiIndex(vec![2, 1])] {
                // Left side: (W z^alpha)(w) via truncated series of psi phi^alpha.
                let mut m = psi_series.clone();
                for (j, e) in alpha.0.iter().enumerate() {
                    for _ in 0..*e {
                        m = m.mul(&comps[j]).unwrap();
                    }
                }
                let lhs = m.eval(&w);
                // Right side: <z^alpha, conj(psi(w)) K_{phi(w)}> = psi(w) point^alpha.
                let rhs = scalar.conj() * alpha.eval(&point);
                let _ = dir;
                assert!((lhs - rhs).norm() < 1e-9, "alpha {alpha}: {lhs} vs {rhs}");
            }
        }
    }

    #[test]
    fn adjoint_on_deriv_kernel_identity_case() {
        let id = LinearFractionalMap::identity(2);
        let a = cv(&[(0.3, 0.1), (0.0, 0.2)]);
        let combo = adjoint_on_deriv_kernel(&WeightSpec::Constant(Complex64::ONE), &id, &a, 1).unwrap();
        let dir = Space::dirichlet(2);
        for z in ball_grid(10, 2, 0.5, 15) {
            let lhs = combo.eval(&dir, &z).unwrap();
            let rhs = deriv_kernel(&a, 1, &z).unwrap();
            assert!((lhs - rhs).norm() < 1e-13);
        }
    }

    #[test]
    fn adjoint_on_deriv_kernel_linear_map_case() {
        // psi = c, phi = S z at a = 0: combination is conj(c) sum_j conj(S_{jk}) K_0^{D_j}.
        let s = DMatrix::from_row_slice(2, 2, &[c(0.3, 0.1), c(0.2, 0.0), c(0.0, 0.4), c(0.5, 0.0)]);
        let cval = c(2.0, -0.5);
        let phi = LinearFractionalMap::linear(s.clone());
        let origin = cv(&[(0.0, 0.0), (0.0, 0.0)]);
        let k = 1;
        let combo =
            adjoint_on_deriv_kernel(&WeightSpec::Constant(cval), &phi, &origin, k).unwrap();
        let dir = Space::dirichlet(2);
        for z in ball_grid(10, 2, 0.5, 16) {
            let lhs = combo.eval(&dir, &z).unwrap();
            let mut rhs = Complex64::ZERO;
            for j in 0..2 {
                rhs += cval.conj() * s[(j, k)].conj() * deriv_kernel(&origin, j, &z).unwrap();
            }
            assert!((lhs - rhs).norm() < 1e-13);
        }
    }

    #[test]
    fn adjoint_on_second_deriv_kernel_identity_case() {
        let id = LinearFractionalMap::identity(2);
        let a = cv(&[(0.2, 0.0), (0.1, -0.1)]);
        let combo =
            adjoint_on_second_deriv_kernel(&WeightSpec::Constant(Complex64::ONE), &id, &a).unwrap();
        let dir = Space::dirichlet(2);
        for z in ball_grid(10, 2, 0.5, 17) {
            let lhs = combo.eval(&dir, &z).unwrap();
            let rhs = second_deriv_kernel(&a, 0, 0, &z).unwrap();
            assert!((lhs - rhs).norm() < 1e-13);
        }
    }

    #[test]
    fn adjoint_on_second_deriv_kernel_linear_map_case() {
        let s = DMatrix::from_row_slice(2, 2, &[c(0.3, 0.1), c(0.2, 0.0), c(0.0, 0.4), c(0.5, 0.0)]);
        let phi = LinearFractionalMap::linear(s.clone());
        let origin = cv(&[(0.0, 0.0), (0.0, 0.0)]);
        let combo =
            adjoint_on_second_deriv_kernel(&WeightSpec::Constant(Complex64::ONE), &phi, &origin)
                .unwrap();
        let dir = Space::dirichlet(2);
        for z in ball_grid(10, 2, 0.5, 18) {
            let lhs = combo.eval(&dir, &z).unwrap();
            let mut rhs = Complex64::ZERO;
            for i in 0..2 {
                for j in 0..2 {
                    rhs += s[(i, 0)].conj()
                        * s[(j, 0)].conj()
                        * second_deriv_kernel(&origin, i, j, &z).unwrap();
                }
            }
            assert!((lhs - rhs).norm() < 1e-13);
        }
    }
}
