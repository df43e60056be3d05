//! The classification theorems as executable predicates.
//!
//! Each predicate checks the closed-form conditions of one theorem and
//! returns a [`Verdict`]: a pass/fail flag plus one [`ConditionReport`]
//! per condition, so a failing instance names exactly which hypothesis
//! broke and by how much. Residual checks from [`crate::operator`] provide
//! the independent numerical route the test suites compare against.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lfmap::{involution_linear_part, LinearFractionalMap};
use crate::operator::{
    kernel_symmetry_residual, validate_wphij_pair, ConjugationSpec, WeightedComposition,
};
use crate::sampling;
use crate::space::{Space, SpaceKind, WeightSpec};
use crate::{spectral_norm, CMat, CVec};

/// One checked condition: `slack = tolerance - deviation`, so the
/// condition holds exactly when `slack >= 0`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConditionReport {
    pub name: String,
    pub lhs_norm: f64,
    pub rhs_norm: f64,
    pub slack: f64,
}

impl ConditionReport {
    pub fn ok(&self) -> bool {
        self.slack >= 0.0
    }
}

/// Outcome of one classification predicate.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Verdict {
    pub theorem: String,
    pub holds: bool,
    pub conditions: Vec<ConditionReport>,
    pub diagnostics: BTreeMap<String, f64>,
}

impl Verdict {
    fn new(theorem: &str) -> Verdict {
        Verdict {
            theorem: theorem.to_string(),
            holds: true,
            conditions: Vec::new(),
            diagnostics: BTreeMap::new(),
        }
    }

    fn condition(&mut self, name: &str, lhs_norm: f64, rhs_norm: f64, deviation: f64, tol: f64) {
        let report = ConditionReport {
            name: name.to_string(),
            lhs_norm,
            rhs_norm,
            slack: tol - deviation,
        };
        self.holds &= report.ok();
        self.conditions.push(report);
    }

    fn note(&mut self, key: &str, value: f64) {
        self.diagnostics.insert(key.to_string(), value);
    }

    /// Names of the conditions that failed.
    pub fn failed(&self) -> Vec<&str> {
        self.conditions
            .iter()
            .filter(|c| !c.ok())
            .map(|c| c.name.as_str())
            .collect()
    }
}

fn require_space(w: &WeightedComposition, kind: SpaceKind) -> Result<()> {
    if w.space.kind != kind {
        return Err(Error::WrongSpace {
            expected: match kind {
                SpaceKind::Dirichlet => "dirichlet".into(),
                SpaceKind::Hardy => "hardy".into(),
            },
            got: w.space.kind.name().into(),
        });
    }
    Ok(())
}

/// Deviation of `psi` from a constant, and the constant when it is one.
fn constant_weight(psi: &WeightSpec) -> (f64, Complex64) {
    match psi {
        WeightSpec::Constant(c) => (0.0, *c),
        WeightSpec::KernelPower { a1, a0, .. } => (a0.norm(), *a1),
        WeightSpec::NormalizedKernel { mu, a, power } => (
            a.norm(),
            mu * (1.0 - a.norm_squared()).powf(*power as f64 / 2.0),
        ),
    }
}

/// Deviation of `phi` from an exactly linear map, plus the linear part.
/// Decided on the canonically normalized associated matrix: the corner
/// must be 1 and the off-blocks must vanish.
fn linear_part(phi: &LinearFractionalMap) -> (f64, CMat) {
    let n = phi.dim();
    let m = phi.assoc_matrix().normalized().m;
    let b_norm = m.view((0, n), (n, 1)).norm();
    let c_norm = m.view((n, 0), (1, n)).norm();
    let corner = (m[(n, n)] - Complex64::ONE).norm();
    (b_norm + c_norm + corner, m.view((0, 0), (n, n)).into_owned())
}

fn symmetric_deviation(s: &CMat) -> f64 {
    (s - s.transpose()).norm()
}

fn unitary_deviation(u: &CMat) -> f64 {
    let n = u.nrows();
    (u.adjoint() * u - DMatrix::identity(n, n)).norm()
}

/// `J`-symmetry on the Dirichlet space: `psi` constant and
/// `phi(z) = S z` with `S` symmetric, `|S| <= 1`.
pub fn classify_dirichlet_j(w: &WeightedComposition) -> Result<Verdict> {
    require_space(w, SpaceKind::Dirichlet)?;
    let mut v = Verdict::new("dirichlet_j_symmetric");
    let (const_dev, _) = constant_weight(&w.psi);
    v.condition("psi constant", const_dev, 0.0, const_dev, 1e-12);
    let (linear_dev, s) = linear_part(&w.phi);
    v.condition("phi linear", linear_dev, 0.0, linear_dev, 1e-12);
    let sym = symmetric_deviation(&s);
    v.condition("S symmetric", s.norm(), s.norm(), sym, 1e-10);
    let norm = spectral_norm(&s);
    v.condition("S contractive", norm, 1.0, (norm - 1.0).max(0.0), 1e-10);
    Ok(v)
}

/// `J C_{Uz}`-symmetry on the Dirichlet space: `psi` constant and
/// `phi(z) = S conj(U) z` with `S` symmetric, `|S| <= 1`, and
/// `S conj(U) = conj(U) S`.
pub fn classify_dirichlet_jcu(w: &WeightedComposition, u: &CMat) -> Result<Verdict> {
    require_space(w, SpaceKind::Dirichlet)?;
    let udev = unitary_deviation(u);
    let usym = symmetric_deviation(u);
    if udev > 1e-12 || usym > 1e-12 {
        return Err(Error::InvalidConjugation(format!(
            "U must be unitary symmetric (unitary dev {udev:.3e}, symmetry dev {usym:.3e})"
        )));
    }
    let mut v = Verdict::new("dirichlet_jcu_symmetric");
    let (const_dev, _) = constant_weight(&w.psi);
    v.condition("psi constant", const_dev, 0.0, const_dev, 1e-12);
    let (linear_dev, m) = linear_part(&w.phi);
    v.condition("phi linear", linear_dev, 0.0, linear_dev, 1e-12);
    // phi'(0) = M conj(U)^{-1} = M U for unitary symmetric U.
    let s = &m * u;
    let sym = symmetric_deviation(&s);
    v.condition("S symmetric", s.norm(), s.norm(), sym, 1e-10);
    let norm = spectral_norm(&s);
    v.condition("S contractive", norm, 1.0, (norm - 1.0).max(0.0), 1e-10);
    let u_bar = u.map(|x| x.conj());
    let comm = (&s * &u_bar - &u_bar * &s).norm();
    v.condition(
        "S commutes with conj(U)",
        (&s * &u_bar).norm(),
        (&u_bar * &s).norm(),
        comm,
        1e-10,
    );
    Ok(v)
}

/// Hermitian weighted composition operators on the Dirichlet space:
/// `psi` a real constant and `phi(z) = H z` with `H` Hermitian, `|H| <= 1`.
pub fn classify_dirichlet_hermitian(w: &WeightedComposition) -> Result<Verdict> {
    require_space(w, SpaceKind::Dirichlet)?;
    let mut v = Verdict::new("dirichlet_hermitian");
    let (const_dev, value) = constant_weight(&w.psi);
    v.condition("psi constant", const_dev, 0.0, const_dev, 1e-12);
    v.condition("c real", value.im.abs(), 0.0, value.im.abs(), 1e-12);
    let (linear_dev, h) = linear_part(&w.phi);
    v.condition("phi linear", linear_dev, 0.0, linear_dev, 1e-12);
    let herm = (&h - h.adjoint()).norm();
    v.condition("H hermitian", h.norm(), h.norm(), herm, 1e-10);
    let norm = spectral_norm(&h);
    v.condition("H contractive", norm, 1.0, (norm - 1.0).max(0.0), 1e-10);
    Ok(v)
}

/// The Hardy-space symbol family
/// `psi = a1 / (1 - <z, conj(a0)>)^N`, `phi = (a0 - A z)/(1 - <z, conj(a0)>)`
/// as a weighted composition operator.
pub fn hardy_family_symbols(
    dim: usize,
    a1: Complex64,
    a0: &CVec,
    a: &CMat,
) -> Result<WeightedComposition> {
    let psi = WeightSpec::KernelPower { a1, a0: a0.clone(), power: dim as u32 };
    let phi = LinearFractionalMap::new(
        -a.clone(),
        a0.clone(),
        -a0.map(|x| x.conj()),
        Complex64::ONE,
    );
    WeightedComposition::new(Space::hardy(dim), psi, phi)
}

/// Recovers `(a1, a0, A)` from a weighted composition operator in the
/// Hardy-space symbol family, or reports why it is outside the family.
pub fn hardy_family_parameters(w: &WeightedComposition) -> Result<(Complex64, CVec, CMat)> {
    let n = w.space.dim;
    let (a1, a0, power) = match &w.psi {
        WeightSpec::KernelPower { a1, a0, power } => (*a1, a0.clone(), *power),
        WeightSpec::Constant(c) => (*c, CVec::zeros(n), n as u32),
        _ => {
            return Err(Error::UnsupportedFamily(
                "psi must be a1 / (1 - <z, conj(a0)>)^N".into(),
            ))
        }
    };
    if power != n as u32 {
        return Err(Error::UnsupportedFamily(format!(
            "kernel power {power} does not match the dimension {n}"
        )));
    }
    let m = w.phi.assoc_matrix().normalized().m;
    if (m[(n, n)] - Complex64::ONE).norm() > 1e-10 {
        return Err(Error::UnsupportedFamily(
            "denominator does not normalize to 1 - <z, conj(a0)>".into(),
        ));
    }
    let b = CVec::from_fn(n, |i, _| m[(i, n)]);
    if (&b - &a0).norm() > 1e-10 {
        return Err(Error::UnsupportedFamily(
            "phi(0) does not match the weight base point a0".into(),
        ));
    }
    let row = CVec::from_fn(n, |i, _| m[(n, i)]);
    if (&row + &a0).norm() > 1e-10 {
        return Err(Error::UnsupportedFamily(
            "denominator vector does not match -a0^T".into(),
        ));
    }
    let a = -m.view((0, 0), (n, n)).into_owned();
    Ok((a1, a0, a))
}

/// Unitarity of the Hardy-space family (the Krein conditions on the
/// associated matrix made explicit): for `a0 != 0`,
/// `|a1| = (1-|a0|^2)^{N/2}`, `conj(A) A - conj(a0) a0^T = (1-|a0|^2) I`
/// and `A conj(a0) = a0`; for `a0 = 0`, `|a1| = 1` and `A` unitary.
pub fn hardy_unitary_check(a1: Complex64, a0: &CVec, a: &CMat) -> Result<Verdict> {
    let sym = symmetric_deviation(a);
    if sym > 1e-10 {
        return Err(Error::NotSymmetric(sym));
    }
    let n = a0.len();
    let mut v = Verdict::new("hardy_unitary");
    let norm_sq = a0.norm_squared();
    if a0.norm() < 1e-14 {
        let dev = (a1.norm() - 1.0).abs();
        v.condition("|a1| = 1", a1.norm(), 1.0, dev, 1e-10);
        let unit = unitary_deviation(a);
        v.condition("A unitary", (a.adjoint() * a).norm(), (n as f64).sqrt(), unit, 1e-10);
    } else {
        let target = (1.0 - norm_sq).powf(n as f64 / 2.0);
        let dev = (a1.norm() - target).abs();
        v.condition("|a1| = (1-|a0|^2)^{N/2}", a1.norm(), target, dev, 1e-10);

        let a_bar = a.map(|x| x.conj());
        let lhs = &a_bar * a - a0.map(|x| x.conj()) * a0.transpose();
        let rhs = DMatrix::identity(n, n) * Complex64::from(1.0 - norm_sq);
        v.condition(
            "conj(A) A - conj(a0) a0^T = (1-|a0|^2) I",
            lhs.norm(),
            rhs.norm(),
            (&lhs - &rhs).norm(),
            1e-10,
        );

        let image = a * a0.map(|x| x.conj());
        v.condition(
            "A conj(a0) = a0",
            image.norm(),
            a0.norm(),
            (&image - a0).norm(),
            1e-10,
        );
    }
    // Krein route: the multiplier of the associated matrix must equal
    // 1/(1-|a0|^2) for an automorphism symbol.
    let phi = LinearFractionalMap::new(
        -a.clone(),
        a0.clone(),
        -a0.map(|x| x.conj()),
        Complex64::ONE,
    );
    if let Some(k2) = phi.assoc_matrix().krein_multiplier() {
        v.note("krein_multiplier", k2);
        v.note("krein_expected", 1.0 / (1.0 - norm_sq));
    }
    Ok(v)
}

/// Hermitian-ness of the Hardy-space family: `a1` real, `a0` real, `A` real.
pub fn hardy_hermitian_check(a1: Complex64, a0: &CVec, a: &CMat) -> Result<Verdict> {
    let sym = symmetric_deviation(a);
    if sym > 1e-10 {
        return Err(Error::NotSymmetric(sym));
    }
    let mut v = Verdict::new("hardy_hermitian");
    v.condition("a1 real", a1.im.abs(), 0.0, a1.im.abs(), 1e-12);
    let a0_im = a0.map(|x| Complex64::new(x.im, 0.0)).norm();
    v.condition("a0 real", a0_im, 0.0, a0_im, 1e-12);
    let a_im = a.map(|x| Complex64::new(x.im, 0.0)).norm();
    v.condition("A real", a_im, 0.0, a_im, 1e-12);
    Ok(v)
}

/// Input for [`build_unitary_jsym`].
#[derive(Debug, Clone)]
pub enum UnitaryJsymChoice {
    /// `Psi = lambda`, `Phi = U z` with `|lambda| = 1` and `U` unitary
    /// symmetric.
    Rotation { lambda: Complex64, u: CMat },
    /// `Psi = mu (1-|a|^2)^{N/2} / (1 - <z,a>)^N`,
    /// `Phi = U (a - T z)/(1 - <z,a>)` with `|mu| = 1`, `U a = conj(a)`,
    /// `U` unitary symmetric, `T` the self-adjoint part of the involution.
    Involution { mu: Complex64, a: CVec, u: CMat },
}

/// Constructs a unitary, `J`-symmetric weighted composition pair
/// `(Psi, Phi)`; precondition failures are listed in the error.
pub fn build_unitary_jsym(choice: &UnitaryJsymChoice) -> Result<(WeightSpec, LinearFractionalMap)> {
    let mut violations = Vec::new();
    match choice {
        UnitaryJsymChoice::Rotation { lambda, u } => {
            if (lambda.norm() - 1.0).abs() > 1e-12 {
                violations.push(format!("|lambda| = {} is not 1", lambda.norm()));
            }
            if unitary_deviation(u) > 1e-12 {
                violations.push("U is not unitary".into());
            }
            if symmetric_deviation(u) > 1e-12 {
                violations.push("U is not symmetric".into());
            }
            if !violations.is_empty() {
                return Err(Error::PreconditionViolated(violations.join("; ")));
            }
            Ok((
                WeightSpec::Constant(*lambda),
                LinearFractionalMap::linear(u.clone()),
            ))
        }
        UnitaryJsymChoice::Involution { mu, a, u } => {
            if (mu.norm() - 1.0).abs() > 1e-12 {
                violations.push(format!("|mu| = {} is not 1", mu.norm()));
            }
            if a.norm() >= 1.0 {
                violations.push(format!("|a| = {} is not inside the ball", a.norm()));
            }
            if unitary_deviation(u) > 1e-12 {
                violations.push("U is not unitary".into());
            }
            if symmetric_deviation(u) > 1e-12 {
                violations.push("U is not symmetric".into());
            }
            let a_bar = a.map(|x| x.conj());
            if (u * a - &a_bar).norm() > 1e-12 {
                violations.push(format!(
                    "U a != conj(a) (deviation {:.3e})",
                    (u * a - &a_bar).norm()
                ));
            }
            if !violations.is_empty() {
                return Err(Error::PreconditionViolated(violations.join("; ")));
            }
            let n = a.len();
            let t = crate::lfmap::involution_selfadjoint_part(a)?;
            let ut = u * &t;
            // U a = conj(a) forces U T symmetric; surface a failure rather
            // than returning a broken conjugation.
            if symmetric_deviation(&ut) > 1e-10 {
                return Err(Error::PreconditionViolated(format!(
                    "U T is not symmetric (deviation {:.3e})",
                    symmetric_deviation(&ut)
                )));
            }
            let psi = WeightSpec::NormalizedKernel { mu: *mu, a: a.clone(), power: n as u32 };
            let phi = LinearFractionalMap::new(-ut, u * a, -a.clone(), Complex64::ONE);
            Ok((psi, phi))
        }
    }
}

/// Transforms a Hardy-family symbol pair into the pair that is complex
/// symmetric with respect to the given conjugation:
/// `psi~ = Psi . (psi o Phi)`, `phi~ = phi o Phi` for `W_{Psi,Phi} J`, and
/// `psi~ = psi o Uz`, `phi~ = phi o Uz` for `C_{Uz} J`. The closed weight
/// family absorbs the composition, so the result is again a
/// `(KernelPower, LinearFractionalMap)` pair.
pub fn conjugate_symbols(
    w: &WeightedComposition,
    c: &ConjugationSpec,
) -> Result<(WeightSpec, LinearFractionalMap)> {
    require_space(w, SpaceKind::Hardy)?;
    let n = w.space.dim;
    let (a1, a0, a_mat) = hardy_family_parameters(w)?;
    let sym = symmetric_deviation(&a_mat);
    if sym > 1e-10 {
        return Err(Error::UnsupportedFamily(format!(
            "A is not symmetric (deviation {sym:.3e})"
        )));
    }
    let (front, phi_inner) = match c {
        ConjugationSpec::PlainJ => {
            return Ok((w.psi.clone(), w.phi.clone()));
        }
        ConjugationSpec::JCU { u } => {
            if unitary_deviation(u) > 1e-12 || symmetric_deviation(u) > 1e-12 {
                return Err(Error::InvalidConjugation(
                    "U must be unitary symmetric".into(),
                ));
            }
            (Complex64::ONE, LinearFractionalMap::linear(u.clone()))
        }
        ConjugationSpec::WPhiJ { psi, phi } => {
            let (scalar, base, _) = validate_wphij_pair(psi, phi, &w.space)?;
            let front = scalar * (1.0 - base.norm_squared()).powf(n as f64 / 2.0);
            (front, phi.clone())
        }
    };

    // psi o Phi: with Phi = (A z + b)/(<z,c> + d) and d normalized to 1,
    // the weight denominators cancel against Psi's kernel power and leave
    // z^T e + f below.
    let m = phi_inner.assoc_matrix().normalized().m;
    let d = m[(n, n)];
    if (d - Complex64::ONE).norm() > 1e-10 {
        return Err(Error::UnsupportedFamily(
            "inner map denominator does not normalize".into(),
        ));
    }
    let a_blk = m.view((0, 0), (n, n)).into_owned();
    let b_vec = CVec::from_fn(n, |i, _| m[(i, n)]);
    let cbar = CVec::from_fn(n, |i, _| m[(n, i)]);
    let e = &cbar - a_blk.transpose() * &a0;
    let f = Complex64::ONE - (b_vec.transpose() * &a0)[(0, 0)];
    if f.norm() < 1e-13 {
        return Err(Error::UnsupportedFamily(
            "transformed weight denominator vanishes at the origin".into(),
        ));
    }
    let new_a1 = front * a1 / f.powi(n as i32);
    let new_a0 = -e / f;
    let psi_new = WeightSpec::KernelPower { a1: new_a1, a0: new_a0, power: n as u32 };
    let phi_new = w.phi.compose(&phi_inner);
    Ok((psi_new, phi_new))
}

/// Eigenvector condition `A b = lambda b` in Rayleigh-quotient form, so no
/// eigenvalue is selected by division: the deviation is
/// `|A b - ((b* A b)/(b* b)) b|`.
fn collinearity_deviation(a: &CMat, b: &CVec) -> (f64, Complex64) {
    let bsq = b.norm_squared();
    if bsq == 0.0 {
        return (0.0, Complex64::ZERO);
    }
    let image = a * b;
    let lambda = (b.adjoint() * &image)[(0, 0)] / Complex64::from(bsq);
    ((image - b * lambda).norm(), lambda)
}

/// `C_sigma` for affine `sigma = A z + c` is `J W_{psi_b, phi_b}`-symmetric
/// when `b = (I-A)^{-1} c` is a real interior eigenvector direction of `A`.
/// On a pass the helper identities `T c = c`, `A T = T A` and the kernel
/// form of the symmetry identity are verified as well.
pub fn jw_affine_symmetry_check(a: &CMat, c: &CVec) -> Result<Verdict> {
    let sym = symmetric_deviation(a);
    if sym > 1e-10 {
        return Err(Error::NotSymmetric(sym));
    }
    let n = c.len();
    let eye = DMatrix::identity(n, n);
    let i_minus_a = &eye - a;
    let det = i_minus_a.determinant();
    if det.norm() < 1e-12 {
        return Err(Error::SingularIminusA(det.norm()));
    }
    let b = i_minus_a
        .lu()
        .solve(c)
        .ok_or(Error::SingularIminusA(det.norm()))?;

    let mut v = Verdict::new("jw_affine_symmetric");
    let b_im = b.map(|x| Complex64::new(x.im, 0.0)).norm();
    v.condition("b real", b_im, 0.0, b_im, 1e-10);
    v.condition("b inside ball", b.norm(), 1.0, b.norm() - 1.0, 0.0);
    let (coll, lambda) = collinearity_deviation(a, &b);
    let coll_tol = 1e-10 * a.norm().max(1.0) * b.norm().max(1e-30);
    v.condition(
        "A b collinear with b",
        (a * &b).norm(),
        (&b * lambda).norm(),
        coll,
        coll_tol,
    );
    v.note("lambda_re", lambda.re);
    v.note("lambda_im", lambda.im);
    v.note("k_re", 1.0 - lambda.re);
    v.note("k_im", -lambda.im);
    v.note("b_norm", b.norm());

    if !v.holds {
        return Ok(v);
    }

    let b_real = b.map(|x| Complex64::new(x.re, 0.0));
    let t = involution_linear_part(&b_real)?;
    let tc = &t * c;
    v.condition("T c = c", tc.norm(), c.norm(), (&tc - c).norm(), 1e-12);
    let at = a * &t;
    let ta = &t * a;
    v.condition("A T = T A", at.norm(), ta.norm(), (&at - &ta).norm(), 1e-12);

    let sigma = LinearFractionalMap::affine(a.clone(), c.clone());
    let w = WeightedComposition::composition(Space::hardy(n), sigma)?;
    let psi_b =
        WeightSpec::NormalizedKernel { mu: Complex64::ONE, a: b_real.clone(), power: n as u32 };
    let phi_b = LinearFractionalMap::new(
        -involution_linear_part(&b_real)?,
        b_real.clone(),
        -b_real,
        Complex64::ONE,
    );
    let conj = ConjugationSpec::WPhiJ { psi: psi_b, phi: phi_b };
    let samples = sampling::default_pair_grid(n);
    let residual = kernel_symmetry_residual(&w, &conj, &samples)?;
    v.condition("kernel symmetry residual", residual, 0.0, residual, 1e-10);
    Ok(v)
}

fn theorem_49_map(a0: &CVec, a: &CMat, u: &CMat) -> LinearFractionalMap {
    // phi(z) = (a0 - A U z)/(1 - <U z, conj(a0)>); the denominator pairing
    // reduces to 1 - z^T U^T a0.
    let c = -(u.transpose() * a0).map(|x| x.conj());
    LinearFractionalMap::new(-(a * u), a0.clone(), c, Complex64::ONE)
}

/// The two composition routes `m_{phi o sigma}` and `m_{sigma o phi}`
/// compared by least squares: returns the proportionality constant `k` of
/// `m_{phi o sigma} = k m_{sigma o phi}` and the relative residual.
pub fn composition_commutation_diagnostic(a0: &CVec, a: &CMat, u: &CMat) -> (Complex64, f64) {
    let phi = theorem_49_map(a0, a, u);
    let sigma = phi.adjoint();
    let p = phi.assoc_matrix().m * sigma.assoc_matrix().m;
    let q = sigma.assoc_matrix().m * phi.assoc_matrix().m;
    let qq: f64 = q.iter().map(|x| x.norm_sqr()).sum();
    let pq: Complex64 = p.iter().zip(q.iter()).map(|(x, y)| x * y.conj()).sum();
    let k = pq / Complex64::from(qq);
    let residual = (&p - &q * k).norm() / p.norm();
    (k, residual)
}

/// The symbols of the normality theorem:
/// `psi(z) = a1 / (1 - <Uz, conj(a0)>)^N`,
/// `phi(z) = (a0 - A U z)/(1 - <Uz, conj(a0)>)`.
pub fn hardy_normality_symbols(
    dim: usize,
    a1: Complex64,
    a0: &CVec,
    a: &CMat,
    u: &CMat,
) -> Result<WeightedComposition> {
    let psi = WeightSpec::KernelPower { a1, a0: u.transpose() * a0, power: dim as u32 };
    WeightedComposition::new(Space::hardy(dim), psi, theorem_49_map(a0, a, u))
}

/// Recovers `(a1, a0, A)` from a weighted composition operator in the
/// normality family for a known `U`, checking the coupling between the
/// weight and the map.
pub fn hardy_normality_parameters(
    w: &WeightedComposition,
    u: &CMat,
) -> Result<(Complex64, CVec, CMat)> {
    let n = w.space.dim;
    if unitary_deviation(u) > 1e-10 || symmetric_deviation(u) > 1e-10 {
        return Err(Error::PreconditionViolated("U must be unitary symmetric".into()));
    }
    let (a1, a0_psi, power) = match &w.psi {
        WeightSpec::KernelPower { a1, a0, power } => (*a1, a0.clone(), *power),
        WeightSpec::Constant(c) => (*c, CVec::zeros(n), n as u32),
        _ => {
            return Err(Error::UnsupportedFamily(
                "psi must be a1 / (1 - <Uz, conj(a0)>)^N".into(),
            ))
        }
    };
    if power != n as u32 {
        return Err(Error::UnsupportedFamily(format!(
            "kernel power {power} does not match the dimension {n}"
        )));
    }
    let m = w.phi.assoc_matrix().normalized().m;
    if (m[(n, n)] - Complex64::ONE).norm() > 1e-10 {
        return Err(Error::UnsupportedFamily(
            "denominator does not normalize to 1 - <Uz, conj(a0)>".into(),
        ));
    }
    let a0 = CVec::from_fn(n, |i, _| m[(i, n)]);
    // psi's base point must be U^T a0.
    if (&a0_psi - u.transpose() * &a0).norm() > 1e-10 {
        return Err(Error::UnsupportedFamily(
            "weight base point does not equal U^T a0".into(),
        ));
    }
    let row = CVec::from_fn(n, |i, _| m[(n, i)]);
    if (&row + u.transpose() * &a0).norm() > 1e-10 {
        return Err(Error::UnsupportedFamily(
            "denominator vector does not match -(U^T a0)^T".into(),
        ));
    }
    // numerator block is -A U.
    let a = -(m.view((0, 0), (n, n)).into_owned()) * u.adjoint();
    Ok((a1, a0, a))
}

/// Normality of the `C_{Uz} J`-symmetric Hardy family, checked exactly as
/// printed:
/// (i)  `conj(UA) A U - conj(U a0) a0^T U = A conj(A) - a0 a0*`,
/// (ii) `conj(UA) a0 - conj(U a0) = A conj(a0) - a0`.
/// The compositional route `m_{phi o sigma} = k m_{sigma o phi}` is
/// reported in the diagnostics so the two routes can be compared.
pub fn hardy_normality_check(a1: Complex64, a0: &CVec, a: &CMat, u: &CMat) -> Result<Verdict> {
    let mut violations = Vec::new();
    if a1.norm() == 0.0 {
        violations.push("a1 must be nonzero".to_string());
    }
    let sym = symmetric_deviation(a);
    if sym > 1e-10 {
        violations.push(format!("A is not symmetric (deviation {sym:.3e})"));
    }
    if unitary_deviation(u) > 1e-10 || symmetric_deviation(u) > 1e-10 {
        violations.push("U is not unitary symmetric".to_string());
    }
    if a0.norm() >= 1.0 {
        violations.push(format!("|a0| = {} is not inside the ball", a0.norm()));
    }
    if !violations.is_empty() {
        return Err(Error::PreconditionViolated(violations.join("; ")));
    }

    let mut v = Verdict::new("hardy_normal");
    let ua = u * a;
    let ua_conj = ua.map(|x| x.conj());
    let ua0_conj = (u * a0).map(|x| x.conj());
    let lhs1 = &ua_conj * a * u - &ua0_conj * (a0.transpose() * u);
    let rhs1 = a * a.map(|x| x.conj()) - a0 * a0.adjoint();
    v.condition(
        "conj(UA) A U - conj(U a0) a0^T U = A conj(A) - a0 a0*",
        lhs1.norm(),
        rhs1.norm(),
        (&lhs1 - &rhs1).norm(),
        1e-10,
    );
    let lhs2 = &ua_conj * a0 - &ua0_conj;
    let rhs2 = a * a0.map(|x| x.conj()) - a0;
    v.condition(
        "conj(UA) a0 - conj(U a0) = A conj(a0) - a0",
        lhs2.norm(),
        rhs2.norm(),
        (&lhs2 - &rhs2).norm(),
        1e-10,
    );

    let (k, residual) = composition_commutation_diagnostic(a0, a, u);
    v.note("k_re", k.re);
    v.note("k_im", k.im);
    v.note("k_minus_one", (k - Complex64::ONE).norm());
    v.note("composition_proportionality_residual", residual);
    Ok(v)
}

/// Whether the composition-route diagnostic of a normality verdict agrees
/// with normality: the two products proportional with `k = 1`.
pub fn commutation_route_agrees(v: &Verdict) -> bool {
    let k_dev = v.diagnostics.get("k_minus_one").copied().unwrap_or(f64::INFINITY);
    let res = v
        .diagnostics
        .get("composition_proportionality_residual")
        .copied()
        .unwrap_or(f64::INFINITY);
    k_dev <= 1e-10 && res <= 1e-10
}
