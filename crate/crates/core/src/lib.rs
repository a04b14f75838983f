//! Chained Bell (Braunstein-Caves) inequality violations for two-mode light when
//! both parties measure with coherent-displacement projectors, i.e. a
//! Mach-Zehnder interferometer fed by a strong coherent state and terminated by
//! a click/no-click photodetector.
//!
//! The numerical core ([`coherent`], [`fock`], [`spectral`], [`families`]) is
//! generic over the scalar type: any [`Scalar`] (`f32`, `f64`, or their complex
//! counterparts) can be used to build Gram matrices, observables and the chained
//! operator. The optimization, regression and persistence layers work in `f64`
//! and use the aliases defined below.

pub mod coherent;
pub mod error;
pub mod families;
pub mod fock;
pub mod optimize;
pub mod regression;
pub mod spectral;
pub mod store;

use nalgebra::{ComplexField, RealField};

pub use nalgebra::Complex;
pub use num_traits;

pub use error::{Error, Result};

/// Real scalar usable by the generic numerical core.
pub trait Real: RealField + Copy {}

impl<T: RealField + Copy> Real for T {}

/// Field scalar (real or complex) usable by the generic numerical core.
///
/// Real fields are their own amplitude type: with `f64` displacements every
/// matrix stays real symmetric, which is the fast path used by the optimizer.
pub trait Scalar: ComplexField<RealField = <Self as Scalar>::Real> + Copy {
    type Real: Real;
}

impl<T> Scalar for T
where
    T: ComplexField + Copy,
    T::RealField: Copy,
{
    type Real = T::RealField;
}

/// Converts an `f64` literal into any real scalar.
#[inline]
pub(crate) fn lit<R: Real>(x: f64) -> R {
    nalgebra::convert(x)
}

/// Double precision real.
pub type Float = f64;
/// Complex displacement amplitude in double precision.
pub type Amplitude = Complex<f64>;

pub type RealSequence = coherent::DisplacementSequence<f64>;
pub type ComplexSequence = coherent::DisplacementSequence<Amplitude>;
pub type RealOperator = coherent::BccbOperator<f64>;
pub type ComplexOperator = coherent::BccbOperator<Amplitude>;
pub type RealEigenpair = spectral::ViolationEigenpair<f64>;
pub type ComplexEigenpair = spectral::ViolationEigenpair<Amplitude>;
pub type FockState = fock::TwoModeFockState<f64>;

/// Numerical tolerances shared by the whole crate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Smallest accepted distance between two displacements of one party.
    pub min_separation: f64,
    /// Multiple of `|smallest Gram eigenvalue|` added to the diagonal when the
    /// plain Cholesky factorization fails.
    pub regularization_factor: f64,
    /// Top eigenvalues closer than this are reported as degenerate.
    pub degenerate_gap: f64,
    /// Required accuracy of `L L^†` against the (shifted) Gram matrix.
    pub cholesky_residual: f64,
    /// Target for the discarded Fock-space norm.
    pub fock_tail: f64,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        min_separation: 1e-6,
        regularization_factor: 3.0,
        degenerate_gap: 1e-10,
        cholesky_residual: 1e-10,
        fock_tail: 1e-12,
    };
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}

/// Classical (local hidden variable) bound `2n - 2` of the chained inequality.
pub fn classical_bound<R: Real>(n: usize) -> R {
    lit::<R>(2.0 * n as f64 - 2.0)
}

/// Quantum (Tsirelson-type) bound `2n cos(pi / 2n)` of the chained inequality.
pub fn quantum_bound<R: Real>(n: usize) -> R {
    let two_n = lit::<R>(2.0 * n as f64);
    two_n * (R::pi() / two_n).cos()
}

/// Sums a two-index correlator over the chain
/// `sum_i E(i,i) + sum_{i<n} E(i+1,i) - E(1,n)` (zero-based indices).
pub fn chain_sum<R: Real>(n: usize, mut term: impl FnMut(usize, usize) -> R) -> R {
    let mut acc = R::zero();
    for i in 0..n {
        acc += term(i, i);
    }
    for i in 0..n - 1 {
        acc += term(i + 1, i);
    }
    acc - term(0, n - 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn bounds_small_n() {
        assert_eq!(classical_bound::<f64>(2), 2.0);
        assert_relative_eq!(quantum_bound::<f64>(2), 2.0 * 2f64.sqrt(), epsilon = 1e-14);
        assert_eq!(classical_bound::<f64>(3), 4.0);
        assert_relative_eq!(quantum_bound::<f64>(3), 3.0 * 3f64.sqrt(), epsilon = 1e-14);
        assert_relative_eq!(quantum_bound::<f32>(3), 5.196_152, epsilon = 1e-5);
    }

    #[test]
    fn bound_gap_is_positive_and_below_two() {
        for n in 2..=50 {
            let gap = quantum_bound::<f64>(n) - classical_bound::<f64>(n);
            assert!(gap > 0.0, "n={n}");
            assert!(gap < 2.0, "n={n}");
        }
        // the gap grows from n = 2 onward
        let gaps: Vec<f64> = (2..=50)
            .map(|n| quantum_bound::<f64>(n) - classical_bound::<f64>(n))
            .collect();
        assert!(gaps.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn chain_sum_counts_terms() {
        // all +1 correlators: n + (n-1) - 1
        for n in 2..8 {
            assert_eq!(chain_sum::<f64>(n, |_, _| 1.0), classical_bound::<f64>(n));
        }
    }
}
