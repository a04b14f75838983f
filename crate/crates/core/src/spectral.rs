//! Top eigenpair of the chained operator, coherent-basis coefficients and
//! Schmidt spectra of the maximally violating state.

use nalgebra::{ComplexField as _, RealField as _};
use num_traits::Zero as _;
use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::coherent::{to_f64, BccbOperator, DisplacementSequence, ObservableSet};
use crate::{Error, Real, Result, Scalar, Tolerances};

pub fn max_eigenvalue<C: Scalar>(m: &DMatrix<C>) -> C::Real {
    m.symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(C::Real::min_value().unwrap_or(crate::lit(f64::MIN)), C::Real::max)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ViolationEigenpair<C: Scalar> {
    pub n: usize,
    pub value: C::Real,
    /// `value - (2n - 2)`.
    pub violation: C::Real,
    /// Unit vector in the orthonormal `{e_i (x) e_j}` basis, row-major with the
    /// Lab X index first.
    pub vector_orthonormal: DVector<C>,
    /// Coefficients in the non-orthogonal `{beta_i (x) gamma_j}` basis.
    pub vector_coherent: Option<DVector<C>>,
    /// Nonincreasing, unit square sum.
    pub schmidt: Vec<C::Real>,
}

/// Rotates `v` so that its largest-magnitude entry is real and positive.
fn fix_phase<C: Scalar>(v: &mut DVector<C>) {
    let Some((k, _)) = v
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.modulus().partial_cmp(&b.1.modulus()).unwrap())
    else {
        return;
    };
    let pivot = v[k];
    let modulus = pivot.modulus();
    if modulus > C::Real::zero() {
        let phase = pivot.conjugate().unscale(modulus);
        v.iter_mut().for_each(|x| *x *= phase);
        v[k] = C::from_real(v[k].real());
    }
}

/// Largest eigenvalue of `S` with its eigenvector and Schmidt spectrum.
///
/// Fails with [`Error::DegenerateTop`] when the two largest eigenvalues are
/// closer than [`Tolerances::degenerate_gap`]; the error carries both values.
pub fn max_eigenpair<C: Scalar>(op: &BccbOperator<C>) -> Result<ViolationEigenpair<C>> {
    let eig = SymmetricEigen::new(op.matrix.clone());
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].partial_cmp(&eig.eigenvalues[a]).unwrap());
    let top = order[0];
    let value = eig.eigenvalues[top];
    if let Some(&second) = order.get(1) {
        let runner_up = eig.eigenvalues[second];
        if value - runner_up < crate::lit(Tolerances::DEFAULT.degenerate_gap) {
            return Err(Error::DegenerateTop {
                value: to_f64(value),
                runner_up: to_f64(runner_up),
            });
        }
    }
    let mut vector: DVector<C> = eig.eigenvectors.column(top).into_owned();
    vector.normalize_mut();
    fix_phase(&mut vector);
    let schmidt = schmidt_coefficients(&vector, op.n);
    Ok(ViolationEigenpair {
        n: op.n,
        value,
        violation: value - op.classical_bound,
        vector_orthonormal: vector,
        vector_coherent: None,
        schmidt,
    })
}

/// Reshapes an `n^2` vector into the `n x n` matrix with the Lab X index as row.
pub fn reshape<C: Scalar>(v: &DVector<C>, n: usize) -> DMatrix<C> {
    assert_eq!(v.len(), n * n, "vector length must be n^2");
    DMatrix::from_row_slice(n, n, v.as_slice())
}

fn flatten<C: Scalar>(m: &DMatrix<C>) -> DVector<C> {
    DVector::from_iterator(m.len(), m.transpose().iter().copied())
}

/// Solves `(L^† (x) K^†) c = v`: with `V` the reshaped vector,
/// `V = L^† C conj(K)`, so `C = (L^†)^{-1} V conj(K)^{-1}`.
pub fn to_coherent_basis<C: Scalar>(
    vector: &DVector<C>,
    x: &ObservableSet<C>,
    y: &ObservableSet<C>,
) -> Result<DVector<C>> {
    let n = x.len();
    if y.len() != n {
        return Err(Error::LengthMismatch { x: n, y: y.len() });
    }
    let failure = || Error::FactorizationFailure { shift: 0.0 };
    let v = reshape(vector, n);
    let left = x
        .cholesky_factor
        .adjoint()
        .solve_upper_triangular(&v)
        .ok_or_else(failure)?;
    // W conj(K)^{-1} = (K^{†-1} W^T)^T
    let right = y
        .cholesky_factor
        .adjoint()
        .solve_upper_triangular(&left.transpose())
        .ok_or_else(failure)?;
    Ok(flatten(&right.transpose()))
}

/// Inverse of [`to_coherent_basis`]: `(L^† (x) K^†) c`.
pub fn from_coherent_basis<C: Scalar>(
    coefficients: &DVector<C>,
    x: &ObservableSet<C>,
    y: &ObservableSet<C>,
) -> DVector<C> {
    let n = x.len();
    let c = reshape(coefficients, n);
    let v = x.cholesky_factor.adjoint() * c * y.cholesky_factor.conjugate();
    flatten(&v)
}

/// Singular values of the reshaped `n x n` coefficient matrix, sorted
/// nonincreasing and normalized to unit square sum.
pub fn schmidt_coefficients<C: Scalar>(vector: &DVector<C>, n: usize) -> Vec<C::Real> {
    let m = reshape(vector, n);
    let mut values: Vec<C::Real> = m.singular_values().iter().copied().collect();
    values.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let norm = values.iter().fold(C::Real::zero(), |acc, s| acc + *s * *s).sqrt();
    if norm > C::Real::zero() {
        values.iter_mut().for_each(|s| *s /= norm);
    }
    values
}

/// Number of Schmidt coefficients above `threshold`.
pub fn schmidt_rank<R: Real>(schmidt: &[R], threshold: R) -> usize {
    schmidt.iter().filter(|&&s| s > threshold).count()
}

/// Builds `S` for the given displacements and returns its top eigenpair with
/// the coherent-basis coefficients filled in.
pub fn analyze<C: Scalar>(
    betas: &DisplacementSequence<C>,
    gammas: &DisplacementSequence<C>,
) -> Result<ViolationEigenpair<C>> {
    let x = crate::coherent::observables(betas)?;
    let y = crate::coherent::observables(gammas)?;
    let op = BccbOperator::from_observables(&x, &y)?;
    let mut pair = max_eigenpair(&op)?;
    pair.vector_coherent = Some(to_coherent_basis(&pair.vector_orthonormal, &x, &y)?);
    Ok(pair)
}
