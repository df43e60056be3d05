//! Linear fractional self-maps of the unit ball.
//!
//! A map `phi(z) = (A z + b) / (<z, c> + d)` is stored by its four
//! parameters; `<., .>` is the Euclidean inner product of `C^N`,
//! conjugate-linear in the second slot. The `(N+1) x (N+1)` associated
//! matrix realizes composition as a matrix product and carries the Krein
//! isometry test that characterizes ball automorphisms.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::sampling;
use crate::{inner, CMat, CVec};

/// Threshold below which a denominator counts as vanished.
pub const EPS_DENOMINATOR: f64 = 1e-13;

/// Relative Frobenius tolerance for the Krein isometry relation.
pub const TOL_KREIN: f64 = 1e-10;

/// `phi(z) = (a z + b) / (<z, c> + d)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearFractionalMap {
    pub a: CMat,
    pub b: CVec,
    pub c: CVec,
    pub d: Complex64,
}

impl LinearFractionalMap {
    pub fn new(a: CMat, b: CVec, c: CVec, d: Complex64) -> Self {
        let n = b.len();
        assert!(n >= 1, "ambient dimension must be at least 1");
        assert_eq!(a.nrows(), n);
        assert_eq!(a.ncols(), n);
        assert_eq!(c.len(), n);
        let all_zero = a.iter().all(|x| x.norm_sqr() == 0.0)
            && b.iter().all(|x| x.norm_sqr() == 0.0)
            && c.iter().all(|x| x.norm_sqr() == 0.0)
            && d.norm_sqr() == 0.0;
        assert!(!all_zero, "parameters must not all vanish");
        LinearFractionalMap { a, b, c, d }
    }

    pub fn identity(dim: usize) -> Self {
        Self::affine(DMatrix::identity(dim, dim), DVector::zeros(dim))
    }

    /// `z -> A z + b` (denominator identically 1).
    pub fn affine(a: CMat, b: CVec) -> Self {
        let n = b.len();
        Self::new(a, b, DVector::zeros(n), Complex64::ONE)
    }

    /// `z -> A z`.
    pub fn linear(a: CMat) -> Self {
        let n = a.nrows();
        Self::affine(a, DVector::zeros(n))
    }

    pub fn dim(&self) -> usize {
        self.b.len()
    }

    pub fn denominator_at(&self, z: &CVec) -> Complex64 {
        inner(z, &self.c) + self.d
    }

    /// Evaluates the map; no self-map check is performed.
    pub fn eval(&self, z: &CVec) -> Result<CVec> {
        let den = self.denominator_at(z);
        if den.norm() < EPS_DENOMINATOR {
            return Err(Error::DenominatorVanishes(den.norm()));
        }
        Ok((&self.a * z + &self.b) / den)
    }

    /// The block matrix `[[A, b], [c*, d]]` associated with the map.
    pub fn assoc_matrix(&self) -> AssocMatrix {
        let n = self.dim();
        let mut m = DMatrix::zeros(n + 1, n + 1);
        m.view_mut((0, 0), (n, n)).copy_from(&self.a);
        for i in 0..n {
            m[(i, n)] = self.b[i];
            m[(n, i)] = self.c[i].conj();
        }
        m[(n, n)] = self.d;
        AssocMatrix { m }
    }

    /// The adjoint map `sigma(z) = (A* z - c) / (<z, -b> + conj(d))`.
    pub fn adjoint(&self) -> LinearFractionalMap {
        LinearFractionalMap::new(
            self.a.adjoint(),
            -self.c.clone(),
            -self.b.clone(),
            self.d.conj(),
        )
    }

    /// `outer . inner`, realized as a product of associated matrices.
    pub fn compose(&self, inner_map: &LinearFractionalMap) -> LinearFractionalMap {
        let m = self.assoc_matrix().m * inner_map.assoc_matrix().m;
        AssocMatrix { m }.to_map()
    }

    /// `d phi_j / d z_k`, analytic: with `n_j = (A z + b)_j`,
    /// `den = <z,c> + d` and `g_k = conj(c_k)`, the quotient rule gives
    /// `(A_{jk} den - n_j g_k) / den^2`.
    pub fn partial(&self, z: &CVec, j: usize, k: usize) -> Result<Complex64> {
        let den = self.denominator_at(z);
        if den.norm() < EPS_DENOMINATOR {
            return Err(Error::DenominatorVanishes(den.norm()));
        }
        let numerator_j = (&self.a * z + &self.b)[j];
        let g_k = self.c[k].conj();
        Ok((self.a[(j, k)] * den - numerator_j * g_k) / (den * den))
    }

    /// `d^2 phi_j / (d z_k d z_l)`, analytic:
    /// `(-A_{jl} g_k den - A_{jk} g_l den + 2 n_j g_k g_l) / den^3`.
    pub fn second_partial(&self, z: &CVec, j: usize, k: usize, l: usize) -> Result<Complex64> {
        let den = self.denominator_at(z);
        if den.norm() < EPS_DENOMINATOR {
            return Err(Error::DenominatorVanishes(den.norm()));
        }
        let numerator_j = (&self.a * z + &self.b)[j];
        let g_k = self.c[k].conj();
        let g_l = self.c[l].conj();
        Ok(
            (-self.a[(j, l)] * g_k * den - self.a[(j, k)] * g_l * den
                + 2.0 * numerator_j * g_k * g_l)
                / (den * den * den),
        )
    }

    /// True when the map sends the ball onto itself: the associated matrix
    /// is a Krein multiple of an isometry and a fixed sample grid of
    /// interior points stays interior.
    pub fn is_automorphism(&self) -> bool {
        if self.assoc_matrix().krein_multiplier().is_none() {
            return false;
        }
        let grid = sampling::ball_grid(200, self.dim(), 0.99, sampling::DEFAULT_SEED);
        grid.iter().all(|z| match self.eval(z) {
            Ok(w) => w.norm() < 1.0,
            Err(_) => false,
        })
    }
}

/// The involutive automorphism `phi_a` of the ball exchanging `0` and `a`:
/// `phi_a(z) = (a - P_a z - s_a Q_a z) / (1 - <z, a>)` with
/// `s_a = sqrt(1 - |a|^2)`, `P_a` the projection onto the span of `a`
/// (the zero map when `a = 0`) and `Q_a = I - P_a`.
pub fn ball_involution(a: &CVec) -> Result<LinearFractionalMap> {
    let t = involution_selfadjoint_part(a)?;
    Ok(LinearFractionalMap::new(
        -t,
        a.clone(),
        -a.clone(),
        Complex64::ONE,
    ))
}

/// The self-adjoint linear part `P_a + s_a Q_a` of the involution `phi_a`,
/// valid for complex centers (the projection conjugates): `phi_a(z) =
/// (a - T z)/(1 - <z, a>)` with this `T`.
pub fn involution_selfadjoint_part(a: &CVec) -> Result<CMat> {
    let n = a.len();
    let norm = a.norm();
    if norm >= 1.0 {
        return Err(Error::NotInBall(norm));
    }
    let s = (1.0 - norm * norm).sqrt();
    let mut proj = DMatrix::zeros(n, n);
    if norm > 0.0 {
        // P_a z = (<z, a>/|a|^2) a, i.e. (a a*) / |a|^2.
        for i in 0..n {
            for j in 0..n {
                proj[(i, j)] = a[i] * a[j].conj() / Complex64::from(norm * norm);
            }
        }
    }
    let q = DMatrix::identity(n, n) - &proj;
    Ok(proj + q * Complex64::from(s))
}

/// The self-adjoint linear part `T` of `phi_b` for real `b`:
/// `T = sqrt(1-|b|^2) I + (1 - sqrt(1-|b|^2)) b b^T / |b|^2`,
/// with the limit `T = I` at `b = 0`. The rank-one block uses the plain
/// transpose, so the symmetry and fixed-vector identities are only claimed
/// for real `b`.
pub fn involution_linear_part(b: &CVec) -> Result<CMat> {
    let n = b.len();
    let norm = b.norm();
    if norm >= 1.0 {
        return Err(Error::NotInBall(norm));
    }
    if norm == 0.0 {
        return Ok(DMatrix::identity(n, n));
    }
    let s = (1.0 - norm * norm).sqrt();
    let mut t = DMatrix::identity(n, n) * Complex64::from(s);
    for i in 0..n {
        for j in 0..n {
            t[(i, j)] += (1.0 - s) * b[i] * b[j] / Complex64::from(norm * norm);
        }
    }
    Ok(t)
}

/// An `(N+1) x (N+1)` matrix associated with a linear fractional map,
/// meaningful up to a nonzero complex scalar.
#[derive(Debug, Clone, PartialEq)]
pub struct AssocMatrix {
    pub m: CMat,
}

impl AssocMatrix {
    pub fn dim(&self) -> usize {
        self.m.nrows() - 1
    }

    /// Recovers the map from the blocks `[[A, b], [c*, d]]`.
    pub fn to_map(&self) -> LinearFractionalMap {
        let n = self.dim();
        let a = self.m.view((0, 0), (n, n)).into_owned();
        let b = DVector::from_fn(n, |i, _| self.m[(i, n)]);
        let c = DVector::from_fn(n, |i, _| self.m[(n, i)].conj());
        LinearFractionalMap::new(a, b, c, self.m[(n, n)])
    }

    /// Scales so the last diagonal entry is 1 when it is nonzero, otherwise
    /// so the first nonzero entry in row-major order is 1.
    pub fn normalized(&self) -> AssocMatrix {
        let n = self.m.nrows();
        let corner = self.m[(n - 1, n - 1)];
        let pivot = if corner.norm() > 1e-12 {
            corner
        } else {
            let mut found = Complex64::ONE;
            let scale = self.m.iter().map(|x| x.norm()).fold(0.0_f64, f64::max);
            'scan: for i in 0..n {
                for j in 0..n {
                    if self.m[(i, j)].norm() > 1e-12 * scale {
                        found = self.m[(i, j)];
                        break 'scan;
                    }
                }
            }
            found
        };
        AssocMatrix { m: self.m.clone() / pivot }
    }

    /// Equality up to a nonzero scalar, via canonical normalization.
    pub fn proportional_to(&self, other: &AssocMatrix, tol: f64) -> bool {
        let a = self.normalized().m;
        let b = other.normalized().m;
        (&a - &b).norm() <= tol * a.norm().max(b.norm())
    }

    /// When `k . m_hat` is an isometry of the Krein space
    /// `(C^{N+1}, diag(I, -1))` for the canonically normalized `m_hat`,
    /// returns `|k|^2`; equivalently `m_hat* J m_hat = |k|^{-2} J`. For the
    /// automorphism family `phi_a` this gives `1 / (1 - |a|^2)`.
    pub fn krein_multiplier(&self) -> Option<f64> {
        let m = self.normalized().m;
        let n = m.nrows();
        let mut j = DMatrix::identity(n, n);
        j[(n - 1, n - 1)] = -Complex64::ONE;
        let x = m.adjoint() * &j * &m;
        // Frobenius projection of x onto the line spanned by j.
        let mut dot = Complex64::ZERO;
        for i in 0..n - 1 {
            dot += x[(i, i)];
        }
        dot -= x[(n - 1, n - 1)];
        let c = dot / Complex64::from(n as f64);
        let residual = (&x - &j * c).norm();
        if residual > TOL_KREIN * x.norm() {
            return None;
        }
        if c.re <= 0.0 || c.im.abs() > TOL_KREIN * c.norm() {
            return None;
        }
        Some(1.0 / c.re)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::ball_grid;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn cv(entries: &[(f64, f64)]) -> CVec {
        DVector::from_iterator(entries.len(), entries.iter().map(|&(r, i)| c(r, i)))
    }

    fn disk_involution_half() -> LinearFractionalMap {
        ball_involution(&cv(&[(0.5, 0.0)])).unwrap()
    }

    fn random_map(rng: &mut impl Rng, dim: usize) -> LinearFractionalMap {
        let a = DMatrix::from_fn(dim, dim, |_, _| {
            c(rng.random_range(-0.5..0.5), rng.random_range(-0.5..0.5))
        });
        let b = DVector::from_fn(dim, |_, _| {
            c(rng.random_range(-0.3..0.3), rng.random_range(-0.3..0.3))
        });
        let cc = DVector::from_fn(dim, |_, _| {
            c(rng.random_range(-0.2..0.2), rng.random_range(-0.2..0.2))
        });
        LinearFractionalMap::new(a, b, cc, Complex64::ONE)
    }

    #[test]
    fn identity_fixes_points() {
        let id = LinearFractionalMap::identity(2);
        let z = cv(&[(0.3, 0.0), (0.0, 0.4)]);
        assert_eq!(id.eval(&z).unwrap(), z);
    }

    #[test]
    fn disk_involution_at_origin() {
        let phi = disk_involution_half();
        let out = phi.eval(&cv(&[(0.0, 0.0)])).unwrap();
        assert!((out[0] - c(0.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn affine_fixed_point() {
        let sigma = LinearFractionalMap::affine(
            DMatrix::identity(2, 2) * c(0.5, 0.0),
            cv(&[(0.25, 0.0), (0.0, 0.0)]),
        );
        let fixed = cv(&[(0.5, 0.0), (0.0, 0.0)]);
        let out = sigma.eval(&fixed).unwrap();
        assert!((out - fixed).norm() < 1e-15);
    }

    #[test]
    fn vanishing_denominator_is_reported() {
        // phi(z) = z / (1 - z) at z = 1.
        let phi = LinearFractionalMap::new(
            DMatrix::identity(1, 1),
            DVector::zeros(1),
            cv(&[(-1.0, 0.0)]),
            Complex64::ONE,
        );
        assert!(matches!(
            phi.eval(&cv(&[(1.0, 0.0)])),
            Err(Error::DenominatorVanishes(_))
        ));
    }

    #[test]
    fn assoc_matrix_blocks() {
        let id = LinearFractionalMap::identity(2);
        assert_eq!(id.assoc_matrix().m, DMatrix::identity(3, 3));

        let phi = disk_involution_half();
        let m = phi.assoc_matrix().m;
        assert!((m[(0, 0)] - c(-1.0, 0.0)).norm() < 1e-15);
        assert!((m[(0, 1)] - c(0.5, 0.0)).norm() < 1e-15);
        assert!((m[(1, 0)] - c(-0.5, 0.0)).norm() < 1e-15);
        assert!((m[(1, 1)] - c(1.0, 0.0)).norm() < 1e-15);

        let sigma = LinearFractionalMap::affine(
            DMatrix::identity(2, 2) * c(0.5, 0.0),
            cv(&[(0.25, 0.0), (0.0, 0.0)]),
        );
        let m = sigma.assoc_matrix().m;
        assert_eq!(m[(2, 0)], Complex64::ZERO);
        assert_eq!(m[(2, 1)], Complex64::ZERO);
        assert_eq!(m[(2, 2)], Complex64::ONE);
        assert_eq!(m[(0, 2)], c(0.25, 0.0));
    }

    #[test]
    fn round_trip_through_assoc_matrix() {
        let phi = disk_involution_half();
        let back = phi.assoc_matrix().to_map();
        assert!(back
            .assoc_matrix()
            .proportional_to(&phi.assoc_matrix(), 1e-12));
    }

    #[test]
    fn adjoint_of_identity() {
        let id = LinearFractionalMap::identity(2);
        assert!(id
            .adjoint()
            .assoc_matrix()
            .proportional_to(&id.assoc_matrix(), 1e-12));
    }

    #[test]
    fn adjoint_of_affine_matches_closed_form() {
        // sigma(z) = A z + c has adjoint z -> A* z / (1 - <z, c>).
        let a = DMatrix::from_row_slice(2, 2, &[c(0.5, 0.1), c(0.0, 0.2), c(0.3, 0.0), c(0.4, 0.0)]);
        let cc = cv(&[(0.25, 0.0), (0.0, 0.1)]);
        let sigma = LinearFractionalMap::affine(a.clone(), cc.clone());
        let adj = sigma.adjoint();
        assert_eq!(adj.a, a.adjoint());
        assert_eq!(adj.b, DVector::zeros(2));
        assert_eq!(adj.c, -cc);
        assert_eq!(adj.d, Complex64::ONE);
    }

    #[test]
    fn double_adjoint_is_identity_on_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..50 {
            let phi = random_map(&mut rng, 2);
            let twice = phi.adjoint().adjoint();
            assert!(twice
                .assoc_matrix()
                .proportional_to(&phi.assoc_matrix(), 1e-12));
        }
    }

    #[test]
    fn adjoint_reverses_composition() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        for _ in 0..20 {
            let phi = random_map(&mut rng, 2);
            let tau = random_map(&mut rng, 2);
            let lhs = phi.compose(&tau).adjoint().assoc_matrix();
            let rhs = AssocMatrix {
                m: tau.adjoint().assoc_matrix().m * phi.adjoint().assoc_matrix().m,
            };
            assert!(lhs.proportional_to(&rhs, 1e-10));
        }
    }

    #[test]
    fn composition_is_functorial() {
        let mut rng = ChaCha8Rng::seed_from_u64(44);
        for _ in 0..20 {
            let phi = random_map(&mut rng, 2);
            let tau = random_map(&mut rng, 2);
            let comp = phi.compose(&tau);
            let prod = AssocMatrix {
                m: phi.assoc_matrix().m * tau.assoc_matrix().m,
            };
            assert!(comp.assoc_matrix().proportional_to(&prod, 1e-10));
            for z in ball_grid(20, 2, 0.3, 45) {
                let direct = phi.eval(&tau.eval(&z).unwrap()).unwrap();
                let via = comp.eval(&z).unwrap();
                assert!((direct - via).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn compose_with_identity() {
        let phi = disk_involution_half();
        let id = LinearFractionalMap::identity(1);
        assert!(id
            .compose(&phi)
            .assoc_matrix()
            .proportional_to(&phi.assoc_matrix(), 1e-12));
    }

    #[test]
    fn linear_maps_compose_by_matrix_product() {
        let a = DMatrix::from_row_slice(2, 2, &[c(0.5, 0.0), c(0.1, 0.0), c(0.0, 0.0), c(0.3, 0.0)]);
        let b = DMatrix::from_row_slice(2, 2, &[c(0.2, 0.0), c(0.0, 0.1), c(0.1, 0.0), c(0.4, 0.0)]);
        let comp = LinearFractionalMap::linear(a.clone()).compose(&LinearFractionalMap::linear(b.clone()));
        let expect = LinearFractionalMap::linear(&a * &b);
        assert!(comp
            .assoc_matrix()
            .proportional_to(&expect.assoc_matrix(), 1e-12));
    }

    #[test]
    fn involutions_square_to_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(46);
        let id = LinearFractionalMap::identity(2).assoc_matrix();
        for _ in 0..100 {
            let mut a = DVector::from_fn(2, |_, _| {
                c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
            });
            if a.norm() > 0.9 {
                a *= Complex64::from(0.9 / a.norm() * rng.random_range(0.1..1.0));
            }
            let phi = ball_involution(&a).unwrap();
            assert!(phi.compose(&phi).assoc_matrix().proportional_to(&id, 1e-10));
        }
    }

    #[test]
    fn involution_at_zero_is_minus_identity() {
        let phi = ball_involution(&cv(&[(0.0, 0.0), (0.0, 0.0)])).unwrap();
        let z = cv(&[(0.2, 0.1), (0.0, -0.3)]);
        let out = phi.eval(&z).unwrap();
        assert!((out + z).norm() < 1e-15);
    }

    #[test]
    fn involution_exchanges_zero_and_center() {
        let a = cv(&[(0.5, 0.0), (0.0, 0.0)]);
        let phi = ball_involution(&a).unwrap();
        let at_a = phi.eval(&a).unwrap();
        let at_zero = phi.eval(&cv(&[(0.0, 0.0), (0.0, 0.0)])).unwrap();
        assert!(at_a.norm() < 1e-15);
        assert!((at_zero - a).norm() < 1e-15);
    }

    #[test]
    fn involution_rejects_exterior_center() {
        assert!(matches!(
            ball_involution(&cv(&[(1.0, 0.0)])),
            Err(Error::NotInBall(_))
        ));
    }

    #[test]
    fn krein_multiplier_identity() {
        let id = LinearFractionalMap::identity(2);
        let k = id.assoc_matrix().krein_multiplier().unwrap();
        assert!((k - 1.0).abs() < 1e-12);
    }

    #[test]
    fn krein_multiplier_of_disk_involution() {
        let phi = disk_involution_half();
        let k = phi.assoc_matrix().krein_multiplier().unwrap();
        assert!((k - 4.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn krein_multiplier_matches_involution_family() {
        let mut rng = ChaCha8Rng::seed_from_u64(47);
        for _ in 0..50 {
            let mut a = DVector::from_fn(2, |_, _| {
                c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
            });
            a *= Complex64::from(rng.random_range(0.0..0.85) / a.norm().max(1e-9));
            let phi = ball_involution(&a).unwrap();
            let k = phi.assoc_matrix().krein_multiplier().unwrap();
            let expect = 1.0 / (1.0 - a.norm_squared());
            assert!((k - expect).abs() < 1e-10 * expect);
        }
    }

    #[test]
    fn dilation_is_not_a_krein_multiple() {
        let double = LinearFractionalMap::linear(DMatrix::identity(1, 1) * c(2.0, 0.0));
        assert!(double.assoc_matrix().krein_multiplier().is_none());
    }

    #[test]
    fn automorphism_detection() {
        let swap = DMatrix::from_row_slice(2, 2, &[
            Complex64::ZERO,
            Complex64::ONE,
            Complex64::ONE,
            Complex64::ZERO,
        ]);
        assert!(LinearFractionalMap::linear(swap).is_automorphism());

        let phi = ball_involution(&cv(&[(0.5, 0.0), (0.0, 0.0)])).unwrap();
        assert!(phi.is_automorphism());

        let sigma = LinearFractionalMap::affine(
            DMatrix::identity(2, 2) * c(0.5, 0.0),
            cv(&[(0.25, 0.0), (0.0, 0.0)]),
        );
        assert!(!sigma.is_automorphism());
    }

    #[test]
    fn heart_matrix_limit_and_rank_one_block() {
        let t = involution_linear_part(&cv(&[(0.0, 0.0), (0.0, 0.0)])).unwrap();
        assert_eq!(t, DMatrix::identity(2, 2));

        let t = involution_linear_part(&cv(&[(0.5, 0.0), (0.0, 0.0)])).unwrap();
        assert!((t[(0, 0)] - Complex64::ONE).norm() < 1e-15);
        assert!((t[(1, 1)] - c(0.75_f64.sqrt(), 0.0)).norm() < 1e-15);
        assert!(t[(0, 1)].norm() < 1e-15);

        assert!(matches!(
            involution_linear_part(&cv(&[(1.2, 0.0)])),
            Err(Error::NotInBall(_))
        ));
    }

    #[test]
    fn heart_matrix_fixes_multiples_of_center() {
        let b = cv(&[(0.5, 0.0), (0.0, 0.0)]);
        let t = involution_linear_part(&b).unwrap();
        let cvec = &b * c(0.5, 0.0);
        assert!((&t * &cvec - cvec).norm() < 1e-15);
    }
}
