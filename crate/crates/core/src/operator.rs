//! Finite compressions `P_D W P_D` of weighted composition operators on
//! the orthonormal monomial basis, anti-linear conjugation compressions,
//! and the residual checks used to cross-validate the classification
//! predicates.
//!
//! Two symmetry checks coexist on purpose. The matrix residual compares
//! `T M` with `M T^t` on the compression; it is exact (up to rounding)
//! whenever the conjugation preserves each homogeneous-degree block, since
//! then `P_D C T C P_D = C (P_D T P_D) C`. For conjugations that move mass
//! across degrees (the `W_{Psi,Phi} J` family) the matrix residual only
//! converges as the cap grows, and the closed-form kernel residual is the
//! ground truth.

use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lfmap::LinearFractionalMap;
use crate::series::{self, Basis, PowerSeries};
use crate::space::{Space, SpaceKind, WeightSpec};
use crate::{CMat, CVec};

/// Tolerance enforced on the involution/isometry laws of the
/// degree-preserving conjugations.
pub const TOL_CONJUGATION: f64 = 1e-6;

/// `W f = psi . (f o phi)` on a reproducing kernel space of the ball.
#[derive(Debug, Clone)]
pub struct WeightedComposition {
    pub space: Space,
    pub psi: WeightSpec,
    pub phi: LinearFractionalMap,
}

impl WeightedComposition {
    pub fn new(space: Space, psi: WeightSpec, phi: LinearFractionalMap) -> Result<Self> {
        if phi.dim() != space.dim {
            return Err(Error::DimensionMismatch(format!(
                "map on {} vars, space on {}",
                phi.dim(),
                space.dim
            )));
        }
        psi.validate()?;
        let origin = CVec::zeros(space.dim);
        let image = phi.eval(&origin)?;
        if image.norm() >= 1.0 {
            return Err(Error::OutOfDomain(image.norm()));
        }
        Ok(WeightedComposition { space, psi, phi })
    }

    /// Composition operator `C_phi = W_{1, phi}`.
    pub fn composition(space: Space, phi: LinearFractionalMap) -> Result<Self> {
        Self::new(space, WeightSpec::Constant(Complex64::ONE), phi)
    }

    /// Whether `phi` maps each homogeneous degree into itself (i.e. is
    /// linear); compressions of degree-preserving symbols are exact.
    pub fn is_degree_preserving(&self) -> bool {
        let scale = self.phi.a.norm().max(self.phi.d.norm());
        self.phi.b.norm() <= 1e-14 * scale && self.phi.c.norm() <= 1e-14 * scale
    }

    /// Builds the compression `P_D W P_D` on the orthonormal basis
    /// `e_alpha = z^alpha / |z^alpha|`: column `beta` holds the
    /// coefficients of `psi . phi^beta` rescaled by `|z^alpha| / |z^beta|`.
    pub fn compression(&self, degree_cap: u32) -> Result<Compression> {
        let basis = Basis::new(self.space.dim, degree_cap);
        let psi_series = self.psi.series(&basis)?;
        let comps = series::map_component_series(&self.phi, &basis)?;
        let dim = basis.len();

        // phi^beta by reuse of the predecessor power along the first
        // nonzero exponent.
        let mut powers: Vec<PowerSeries> = Vec::with_capacity(dim);
        powers.push(PowerSeries::constant(&basis, Complex64::ONE));
        for idx in 1..dim {
            let beta = &basis.indices()[idx];
            let j = beta.0.iter().position(|&e| e > 0).expect("degree >= 1");
            let mut pred = beta.clone();
            pred.0[j] -= 1;
            let pred_idx = basis.index_of(&pred).expect("predecessor in basis");
            powers.push(powers[pred_idx].mul(&comps[j])?);
        }

        let norms: Vec<f64> = basis
            .indices()
            .iter()
            .map(|alpha| self.space.monomial_norm(alpha))
            .collect();
        let mut matrix = DMatrix::zeros(dim, dim);
        for (col, power) in powers.iter().enumerate() {
            let column = psi_series.mul(power)?;
            for row in 0..dim {
                matrix[(row, col)] = column.coeff_at(row) * (norms[row] / norms[col]);
            }
        }
        Ok(Compression { space: self.space, basis, matrix })
    }
}

/// The matrix of `P_D W P_D` on the orthonormal monomial basis in
/// graded-lex order.
#[derive(Debug, Clone)]
pub struct Compression {
    pub space: Space,
    pub basis: Arc<Basis>,
    pub matrix: CMat,
}

impl Compression {
    pub fn degree_cap(&self) -> u32 {
        self.basis.cap()
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    fn check_compatible(&self, other_space: Space, other_basis: &Basis) -> Result<()> {
        if self.space != other_space
            || self.basis.dim() != other_basis.dim()
            || self.basis.cap() != other_basis.cap()
        {
            return Err(Error::DimensionMismatch(
                "compressions live on different spaces or degree caps".into(),
            ));
        }
        Ok(())
    }

    /// Serializable row-major form; `entries[i*dim + j] = [re, im]`.
    pub fn export(&self) -> MatrixExport {
        let dim = self.dim();
        let mut entries = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                let v = self.matrix[(i, j)];
                entries.push([v.re, v.im]);
            }
        }
        MatrixExport {
            space: self.space.kind.name().to_string(),
            n: self.space.dim,
            d: self.degree_cap(),
            ordering: "grlex".to_string(),
            entries,
        }
    }

    pub fn from_export(e: &MatrixExport) -> Result<Compression> {
        let kind = match e.space.as_str() {
            "dirichlet" => SpaceKind::Dirichlet,
            "hardy" => SpaceKind::Hardy,
            other => {
                return Err(Error::PreconditionViolated(format!(
                    "unknown space kind {other:?}"
                )))
            }
        };
        let space = Space { kind, dim: e.n };
        if e.ordering != "grlex" {
            return Err(Error::PreconditionViolated(format!(
                "unknown ordering {:?}",
                e.ordering
            )));
        }
        let basis = Basis::new(e.n, e.d);
        let dim = basis.len();
        if e.entries.len() != dim * dim {
            return Err(Error::DimensionMismatch(format!(
                "expected {} entries, got {}",
                dim * dim,
                e.entries.len()
            )));
        }
        let matrix = DMatrix::from_fn(dim, dim, |i, j| {
            let [re, im] = e.entries[i * dim + j];
            Complex64::new(re, im)
        });
        Ok(Compression { space, basis, matrix })
    }
}

/// Wire format for compressed operator matrices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixExport {
    pub space: String,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "D")]
    pub d: u32,
    pub ordering: String,
    pub entries: Vec<[f64; 2]>,
}

/// One of the three conjugation families.
#[derive(Debug, Clone, PartialEq)]
pub enum ConjugationSpec {
    /// `J f(z) = conj(f(conj(z)))`: plain coefficient conjugation.
    PlainJ,
    /// `J C_{Uz}` for a unitary symmetric `U`.
    JCU { u: CMat },
    /// `W_{Psi, Phi} J` for a unitary `J`-symmetric pair from the closed
    /// weight/involution family.
    WPhiJ { psi: WeightSpec, phi: LinearFractionalMap },
}

impl ConjugationSpec {
    /// Whether the conjugation preserves each homogeneous-degree block,
    /// making its compression exact.
    pub fn is_degree_preserving(&self) -> bool {
        match self {
            ConjugationSpec::PlainJ | ConjugationSpec::JCU { .. } => true,
            ConjugationSpec::WPhiJ { phi, .. } => {
                phi.b.norm() <= 1e-14 && phi.c.norm() <= 1e-14
            }
        }
    }

    /// Closed-form evaluation of `(C K_w)(z)`.
    ///
    /// Both kernels have real Taylor coefficients, so `J K_w = K_{conj w}`;
    /// composition with `Uz` moves the base point, and the weighted family
    /// multiplies by `Psi` and composes with `Phi`.
    pub fn kernel_image(&self, space: &Space, w: &CVec, z: &CVec) -> Result<Complex64> {
        match self {
            ConjugationSpec::PlainJ => space.kernel(&w.map(|x| x.conj()), z),
            ConjugationSpec::JCU { u } => {
                // J (K_w o Uz) = K_{conj(U* w)} and conj(U* w) = U^t conj(w).
                let moved = u.transpose() * w.map(|x| x.conj());
                space.kernel(&moved, z)
            }
            ConjugationSpec::WPhiJ { psi, phi } => {
                let image = phi.eval(z)?;
                Ok(psi.eval(z) * space.kernel(&w.map(|x| x.conj()), &image)?)
            }
        }
    }
}

/// Degree of the fixed observation window on which the conjugation laws
/// of non-degree-preserving compressions are evaluated. The full-matrix
/// law residual of such a compression cannot converge (truncation empties
/// the top-degree columns no matter the cap), while the finite section on
/// a fixed low-degree window converges geometrically.
pub const LAW_WINDOW_DEGREE: u32 = 2;

/// The matrix `m` of an anti-linear compression `f -> m . conj(coeffs f)`,
/// together with its conjugation-law residuals.
#[derive(Debug, Clone)]
pub struct AntiLinearCompression {
    pub space: Space,
    pub basis: Arc<Basis>,
    pub m: CMat,
    /// Failure of `C^2 = I`: `|m conj(m) - I|_F` over the law window.
    pub involution_residual: f64,
    /// Failure of the anti-isometry law: `|m* m - I|_F` over the window.
    pub isometry_residual: f64,
    /// Degree of the window the law residuals were measured on: the full
    /// cap for degree-preserving conjugations, [`LAW_WINDOW_DEGREE`]
    /// otherwise.
    pub law_window: u32,
    /// True when the conjugation preserves degrees and the residuals are
    /// rounding-level by construction.
    pub exact: bool,
}

/// `(involution, isometry)` law residuals of an anti-linear matrix,
/// measured on the leading block of indices of degree `<= window`.
pub fn conjugation_law_residuals(m: &CMat, basis: &Basis, window: u32) -> (f64, f64) {
    let wdim = basis
        .indices()
        .iter()
        .take_while(|alpha| alpha.degree() <= window)
        .count();
    let eye = DMatrix::identity(wdim, wdim);
    let inv_full = m * m.map(|x| x.conj());
    let iso_full = m.adjoint() * m;
    let inv = (inv_full.view((0, 0), (wdim, wdim)) - &eye).norm();
    let iso = (iso_full.view((0, 0), (wdim, wdim)) - &eye).norm();
    (inv, iso)
}

fn validate_unitary_symmetric(u: &CMat, tol: f64) -> Result<()> {
    let n = u.nrows();
    let unitary = (u.adjoint() * u - DMatrix::identity(n, n)).norm();
    if unitary > tol {
        return Err(Error::InvalidConjugation(format!(
            "U is not unitary (|U*U - I| = {unitary:.3e})"
        )));
    }
    let symmetric = (u - u.transpose()).norm();
    if symmetric > tol {
        return Err(Error::InvalidConjugation(format!(
            "U is not symmetric (|U - U^t| = {symmetric:.3e})"
        )));
    }
    Ok(())
}

/// Structural validation of a `W_{Psi,Phi} J` pair against the closed
/// unitary `J`-symmetric family; returns the recovered scalar, base point
/// and unitary factor.
pub fn validate_wphij_pair(
    psi: &WeightSpec,
    phi: &LinearFractionalMap,
    space: &Space,
) -> Result<(Complex64, CVec, CMat)> {
    let tol = 1e-8;
    let n = space.dim;
    match psi {
        WeightSpec::Constant(lambda) => {
            if (lambda.norm() - 1.0).abs() > tol {
                return Err(Error::InvalidConjugation(format!(
                    "|lambda| = {} is not 1",
                    lambda.norm()
                )));
            }
            let m = phi.assoc_matrix().normalized().m;
            let linear = m.view((0, n), (n, 1)).norm() + m.view((n, 0), (1, n)).norm();
            if linear > tol {
                return Err(Error::InvalidConjugation(
                    "Phi is not linear for a constant Psi".into(),
                ));
            }
            let u = m.view((0, 0), (n, n)).into_owned();
            validate_unitary_symmetric(&u, tol)?;
            Ok((*lambda, CVec::zeros(n), u))
        }
        WeightSpec::NormalizedKernel { mu, a, power } => {
            if *power != n as u32 {
                return Err(Error::InvalidConjugation(format!(
                    "kernel power {} does not match the space dimension {}",
                    power, n
                )));
            }
            if (mu.norm() - 1.0).abs() > tol {
                return Err(Error::InvalidConjugation(format!(
                    "|mu| = {} is not 1",
                    mu.norm()
                )));
            }
            if a.norm() >= 1.0 {
                return Err(Error::NotInBall(a.norm()));
            }
            // Phi(z) = U (a - T z) / (1 - <z, a>): after normalization the
            // denominator vector is -a and d = 1.
            let m = phi.assoc_matrix().normalized().m;
            let d = m[(n, n)];
            if (d - Complex64::ONE).norm() > tol {
                return Err(Error::InvalidConjugation(
                    "denominator does not normalize to 1 - <z, a>".into(),
                ));
            }
            let c_vec = CVec::from_fn(n, |i, _| m[(n, i)].conj());
            if (&c_vec + a).norm() > tol {
                return Err(Error::InvalidConjugation(
                    "denominator vector does not match the weight base point".into(),
                ));
            }
            let t = crate::lfmap::involution_selfadjoint_part(a)?;
            let t_inv = t.clone().try_inverse().expect("T is positive definite");
            let a_block = m.view((0, 0), (n, n)).into_owned();
            let u = -a_block * t_inv;
            validate_unitary_symmetric(&u, tol)?;
            let ua = &u * a;
            let a_bar = a.map(|x| x.conj());
            if (&ua - &a_bar).norm() > tol {
                return Err(Error::InvalidConjugation(format!(
                    "U a != conj(a) (deviation {:.3e})",
                    (&ua - &a_bar).norm()
                )));
            }
            let b_vec = CVec::from_fn(n, |i, _| m[(i, n)]);
            if (&b_vec - &ua).norm() > tol {
                return Err(Error::InvalidConjugation(
                    "numerator constant does not equal U a".into(),
                ));
            }
            Ok((*mu, a.clone(), u))
        }
        WeightSpec::KernelPower { .. } => Err(Error::InvalidConjugation(
            "Psi must be a constant or a normalized kernel power".into(),
        )),
    }
}

/// Builds the anti-linear compression of a conjugation. The involution and
/// isometry residuals are enforced for the degree-preserving families and
/// reported (not enforced) for `W_{Psi,Phi} J`, whose compression is
/// inexact by construction.
pub fn build_conjugation(
    spec: &ConjugationSpec,
    space: Space,
    degree_cap: u32,
) -> Result<AntiLinearCompression> {
    let (m, basis, exact) = match spec {
        ConjugationSpec::PlainJ => {
            let basis = Basis::new(space.dim, degree_cap);
            (DMatrix::identity(basis.len(), basis.len()), basis, true)
        }
        ConjugationSpec::JCU { u } => {
            if u.nrows() != space.dim || u.ncols() != space.dim {
                return Err(Error::DimensionMismatch(format!(
                    "U is {}x{}, space dimension is {}",
                    u.nrows(),
                    u.ncols(),
                    space.dim
                )));
            }
            validate_unitary_symmetric(u, 1e-12)?;
            let compose = WeightedComposition::composition(
                space,
                LinearFractionalMap::linear(u.map(|x| x.conj())),
            )?;
            let c = compose.compression(degree_cap)?;
            (c.matrix, c.basis, true)
        }
        ConjugationSpec::WPhiJ { psi, phi } => {
            validate_wphij_pair(psi, phi, &space)?;
            let w = WeightedComposition::new(space, psi.clone(), phi.clone())?;
            let c = w.compression(degree_cap)?;
            (c.matrix, c.basis, false)
        }
    };
    let law_window = if exact {
        basis.cap()
    } else {
        LAW_WINDOW_DEGREE.min(basis.cap())
    };
    let (involution_residual, isometry_residual) =
        conjugation_law_residuals(&m, &basis, law_window);
    if exact && (involution_residual > TOL_CONJUGATION || isometry_residual > TOL_CONJUGATION) {
        return Err(Error::InvalidConjugation(format!(
            "conjugation laws fail: involution {involution_residual:.3e}, isometry {isometry_residual:.3e}"
        )));
    }
    Ok(AntiLinearCompression {
        space,
        basis,
        m,
        involution_residual,
        isometry_residual,
        law_window,
        exact,
    })
}

/// Finite form of `T C = C T*` for `C = M . conj`: returns
/// `|T M - M T^t|_F / |T|_F`.
pub fn symmetry_residual_matrix(t: &Compression, c: &AntiLinearCompression) -> Result<f64> {
    t.check_compatible(c.space, &c.basis)?;
    let lhs = &t.matrix * &c.m;
    let rhs = &c.m * t.matrix.transpose();
    Ok((lhs - rhs).norm() / t.matrix.norm())
}

/// `|T - T*|_F / |T|_F`.
pub fn hermitian_residual(t: &Compression) -> f64 {
    (&t.matrix - t.matrix.adjoint()).norm() / t.matrix.norm()
}

/// `|T* T - I|_F`. For symbols that do not preserve degrees the
/// compression of a unitary operator is not unitary; treat the value as a
/// convergence diagnostic in that case.
pub fn unitary_residual(t: &Compression) -> f64 {
    let n = t.dim();
    (t.matrix.adjoint() * &t.matrix - DMatrix::identity(n, n)).norm()
}

/// Convergence form of the unitarity check for non-degree-preserving
/// symbols: `|T* T - I|_F` over the leading block of degree `<= window`,
/// which converges as the cap grows while the full-matrix residual cannot.
pub fn unitary_residual_window(t: &Compression, window: u32) -> f64 {
    let wdim = t
        .basis
        .indices()
        .iter()
        .take_while(|alpha| alpha.degree() <= window)
        .count();
    let gram = t.matrix.adjoint() * &t.matrix;
    (gram.view((0, 0), (wdim, wdim)) - DMatrix::identity(wdim, wdim)).norm()
}

/// `|T* T - T T*|_F / |T|_F^2`, with the same caution as
/// [`unitary_residual`] for non-degree-preserving symbols.
pub fn normal_residual(t: &Compression) -> f64 {
    let n2 = t.matrix.norm();
    (t.matrix.adjoint() * &t.matrix - &t.matrix * t.matrix.adjoint()).norm() / (n2 * n2)
}

/// Pointwise form of `W C K_w = C W* K_w` over a sample set, all four
/// factors in closed form:
/// `max |psi(z) (C K_w)(phi z) - psi(w) (C K_{phi w})(z)| / (1 + |K_w(z)|)`.
pub fn kernel_symmetry_residual(
    w: &WeightedComposition,
    c: &ConjugationSpec,
    samples: &[(CVec, CVec)],
) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for (z, w0) in samples {
        if z.norm() >= 1.0 || w0.norm() >= 1.0 {
            return Err(Error::OutOfDomain(z.norm().max(w0.norm())));
        }
        let phi_z = w.phi.eval(z)?;
        let phi_w0 = w.phi.eval(w0)?;
        if phi_z.norm() >= 1.0 || phi_w0.norm() >= 1.0 {
            return Err(Error::OutOfDomain(phi_z.norm().max(phi_w0.norm())));
        }
        let lhs = w.psi.eval(z) * c.kernel_image(&w.space, w0, &phi_z)?;
        let rhs = w.psi.eval(w0) * c.kernel_image(&w.space, &phi_w0, z)?;
        let scale = 1.0 + w.space.kernel(w0, z)?.norm();
        worst = worst.max((lhs - rhs).norm() / scale);
    }
    Ok(worst)
}

/// Pointwise form of the Hermitian identity `W K_w = W* K_w`:
/// `max |psi(z) K_w(phi z) - conj(psi(w)) K_{phi w}(z)| / (1 + |K_w(z)|)`.
pub fn hermitian_kernel_residual(
    w: &WeightedComposition,
    samples: &[(CVec, CVec)],
) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for (z, w0) in samples {
        let phi_z = w.phi.eval(z)?;
        let phi_w0 = w.phi.eval(w0)?;
        let lhs = w.psi.eval(z) * w.space.kernel(w0, &phi_z)?;
        let rhs = w.psi.eval(w0).conj() * w.space.kernel(&phi_w0, z)?;
        let scale = 1.0 + w.space.kernel(w0, z)?.norm();
        worst = worst.max((lhs - rhs).norm() / scale);
    }
    Ok(worst)
}

/// Spot check of the compression columns against the adjoint formula:
/// `sum_alpha T[alpha, beta] e_alpha(w) = psi(w) e_beta(phi w)`, since
/// `(W e_beta)(w) = <e_beta, W* K_w>`. Exact for degree-preserving
/// symbols; truncation-limited otherwise, so keep `w` small.
pub fn adjoint_consistency_residual(
    t: &Compression,
    w_op: &WeightedComposition,
    w: &CVec,
) -> Result<f64> {
    let (scalar, point) = crate::space::adjoint_on_kernel(&w_op.psi, &w_op.phi, w)?;
    let mut worst: f64 = 0.0;
    for (col, beta) in t.basis.indices().iter().enumerate() {
        let mut lhs = Complex64::ZERO;
        for (row, alpha) in t.basis.indices().iter().enumerate() {
            lhs += t.matrix[(row, col)] * alpha.eval(w) / t.space.monomial_norm(alpha);
        }
        let rhs = scalar.conj() * beta.eval(&point) / t.space.monomial_norm(beta);
        worst = worst.max((lhs - rhs).norm());
    }
    Ok(worst)
}

/// Inner product `<f, g>` of two truncated series in the space's norm.
pub fn series_inner_product(space: &Space, f: &PowerSeries, g: &PowerSeries) -> Complex64 {
    f.basis()
        .indices()
        .iter()
        .zip(f.coeffs())
        .map(|(alpha, fc)| fc * g.coeff(alpha).conj() * space.monomial_norm_sq(alpha))
        .sum()
}
