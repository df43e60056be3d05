//! Weighted composition operators `W f = psi . (f o phi)` on the Hardy
//! space and the kernel-defined Dirichlet space of the unit ball `B_N`.
//!
//! The crate has three layers:
//!
//! * exact symbol calculus: linear fractional maps, their associated
//!   matrices and adjoints ([`lfmap`]), reproducing kernels, weights and
//!   adjoint actions on kernels ([`space`]);
//! * truncated power series and finite matrix compressions of the
//!   operators and of anti-linear conjugations ([`series`], [`operator`]);
//! * executable classification predicates for complex symmetry,
//!   Hermitian-ness, unitarity and normality, each cross-checked against
//!   numerical residuals ([`verdicts`]).
//!
//! The narrative guide lives in `book/`; its code snippets are compiled as
//! doc-tests of this crate.

pub mod acceptance;
pub mod error;
pub mod lfmap;
pub mod operator;
pub mod sampling;
pub mod series;
pub mod space;
pub mod verdicts;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub use error::{Error, Result};

/// Complex column vector in `C^N`.
pub type CVec = DVector<Complex64>;
/// Dense complex matrix.
pub type CMat = DMatrix<Complex64>;

/// Euclidean inner product `<z, w> = sum_j z_j conj(w_j)`.
pub fn inner(z: &CVec, w: &CVec) -> Complex64 {
    assert_eq!(z.len(), w.len());
    z.iter().zip(w.iter()).map(|(a, b)| a * b.conj()).sum()
}

/// Largest singular value.
pub fn spectral_norm(m: &CMat) -> f64 {
    m.clone().svd(false, false).singular_values.max()
}

/// Default truncation degree: the basis dimension grows as
/// `binom(N + D, N)`, so higher ambient dimensions get a lower cap.
pub fn default_degree_cap(dim: usize) -> u32 {
    if dim <= 2 {
        8
    } else {
        6
    }
}

#[cfg(doctest)]
mod book {
    macro_rules! chapter {
        ($name:ident, $path:literal) => {
            #[doc = include_str!($path)]
            mod $name {}
        };
    }

    chapter!(introduction, "../../../book/src/introduction.md");
    chapter!(maps, "../../../book/src/maps.md");
    chapter!(kernels, "../../../book/src/kernels.md");
    chapter!(series, "../../../book/src/series.md");
    chapter!(compressions, "../../../book/src/compressions.md");
    chapter!(verdicts, "../../../book/src/verdicts.md");
}
