//! Coherent-state overlaps, Gram matrices and the finite matrix representation
//! of displacement observables `A(beta) = I - 2|beta><beta|`.
//!
//! A party's `n` pairwise distinct coherent vectors span an `n`-dimensional
//! subspace. With the Cholesky factorization `G = L L^†` of their Gram matrix,
//! column `i` of `L^†` holds the coordinates of `|beta_i>` in an orthonormal
//! basis of that span, so every observable becomes the `n x n` matrix
//! `I - 2 l_i l_i^†`.

use nalgebra::{ComplexField as _, RealField as _};
use num_traits::Zero as _;
use nalgebra::{Cholesky, Complex, DMatrix};

use crate::spectral::max_eigenvalue;
use crate::{classical_bound, lit, quantum_bound, Error, Real, Result, Scalar, Tolerances};

/// `<x|y> = exp(-|x - y|^2 / 2 + i Im(x^* y))`.
pub fn overlap<C: Scalar>(x: C, y: C) -> C {
    let distance = (x - y).modulus_squared();
    let cross = x.conjugate() * y;
    let phase = cross - C::from_real(cross.real());
    (C::from_real(-distance * lit(0.5)) + phase).exp()
}

pub(crate) fn to_f64<R: Real>(x: R) -> f64 {
    x.to_subset().unwrap_or(f64::NAN)
}

/// Ordered displacements of one party, validated to be finite and pairwise
/// separated by at least [`Tolerances::min_separation`].
#[derive(Debug, Clone, PartialEq)]
pub struct DisplacementSequence<C: Scalar> {
    values: Vec<C>,
}

impl<C: Scalar> DisplacementSequence<C> {
    pub fn new(values: Vec<C>) -> Result<Self> {
        Self::with_min_separation(values, Tolerances::DEFAULT.min_separation)
    }

    pub fn with_min_separation(values: Vec<C>, min_separation: f64) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::TooFewSettings(values.len()));
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        let minimum: C::Real = lit(min_separation);
        for (i, a) in values.iter().enumerate() {
            for (j, b) in values.iter().enumerate().skip(i + 1) {
                let distance = (*a - *b).modulus();
                if distance < minimum {
                    return Err(Error::Degenerate {
                        first: i,
                        second: j,
                        distance: to_f64(distance),
                        minimum: min_separation,
                    });
                }
            }
        }
        Ok(Self { values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[C] {
        &self.values
    }

    pub fn into_values(self) -> Vec<C> {
        self.values
    }
}

/// Gram matrix of coherent vectors, plus the diagonal shift applied by
/// [`regularized_cholesky`] (zero until a shift was needed).
#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix<C: Scalar> {
    pub entries: DMatrix<C>,
    pub regularization_shift: C::Real,
}

impl<C: Scalar> GramMatrix<C> {
    /// Builds the Gram matrix of arbitrary amplitudes without the separation
    /// check; near-coincident inputs end up on the regularization path.
    pub fn from_amplitudes(values: &[C]) -> Self {
        let n = values.len();
        let entries = DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                C::one()
            } else {
                overlap(values[i], values[j])
            }
        });
        Self {
            entries,
            regularization_shift: C::Real::zero(),
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }
}

pub fn gram<C: Scalar>(seq: &DisplacementSequence<C>) -> GramMatrix<C> {
    GramMatrix::from_amplitudes(seq.values())
}

fn checked_cholesky<C: Scalar>(m: &DMatrix<C>, tolerance: C::Real) -> Option<DMatrix<C>> {
    let lower = Cholesky::new(m.clone())?.unpack();
    let diagonal_ok = lower
        .diagonal()
        .iter()
        .all(|d| d.is_finite() && d.real() > C::Real::zero());
    if !diagonal_ok {
        return None;
    }
    let residual = (&lower * lower.adjoint() - m).norm();
    (residual <= tolerance).then_some(lower)
}

/// Cholesky factor `L` (lower triangular, positive real diagonal) of the Gram
/// matrix. When the plain factorization fails, `3 |lambda_min|` is added to the
/// diagonal once and recorded in `g.regularization_shift`; a second failure is
/// reported as [`Error::FactorizationFailure`].
pub fn regularized_cholesky<C: Scalar>(g: &mut GramMatrix<C>) -> Result<DMatrix<C>> {
    let tol = Tolerances::DEFAULT;
    let n = g.dim();
    let eps: C::Real = lit::<C::Real>(f64::EPSILON * 64.0 * n as f64);
    let tolerance = C::Real::max(lit(tol.cholesky_residual), eps);

    g.regularization_shift = C::Real::zero();
    if let Some(lower) = checked_cholesky(&g.entries, tolerance) {
        return Ok(lower);
    }

    let smallest = g
        .entries
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(C::Real::max_value().unwrap_or(lit(f64::MAX)), C::Real::min);
    let shift = smallest.abs() * lit(tol.regularization_factor);
    g.regularization_shift = shift;
    if !(shift > C::Real::zero()) || !shift.is_finite() {
        return Err(Error::FactorizationFailure { shift: to_f64(shift) });
    }
    let mut shifted = g.entries.clone();
    for i in 0..n {
        shifted[(i, i)] += C::from_real(shift);
    }
    checked_cholesky(&shifted, tolerance).ok_or(Error::FactorizationFailure {
        shift: to_f64(shift),
    })
}

/// Matrices of one party's observables in the orthonormal basis defined by the
/// Cholesky factor of its Gram matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservableSet<C: Scalar> {
    pub cholesky_factor: DMatrix<C>,
    pub observables: Vec<DMatrix<C>>,
    pub regularization_shift: C::Real,
}

impl<C: Scalar> ObservableSet<C> {
    pub fn len(&self) -> usize {
        self.observables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observables.is_empty()
    }

    /// Coordinates of `|beta_i>` in the orthonormal basis (column `i` of `L^†`).
    pub fn coherent_vector(&self, i: usize) -> nalgebra::DVector<C> {
        self.cholesky_factor.row(i).adjoint()
    }
}

/// Displacement projector `I - 2 v v^†` for the basis coordinates `v`.
pub fn dichotomic_observable<C: Scalar>(v: &nalgebra::DVector<C>) -> DMatrix<C> {
    let n = v.len();
    let mut m = DMatrix::identity(n, n);
    m.gerc(C::from_real(lit(-2.0)), v, v, C::one());
    m
}

pub fn observables_from_gram<C: Scalar>(mut g: GramMatrix<C>) -> Result<ObservableSet<C>> {
    let lower = regularized_cholesky(&mut g)?;
    let observables = (0..g.dim())
        .map(|i| dichotomic_observable(&lower.row(i).adjoint()))
        .collect();
    Ok(ObservableSet {
        cholesky_factor: lower,
        observables,
        regularization_shift: g.regularization_shift,
    })
}

pub fn observables<C: Scalar>(seq: &DisplacementSequence<C>) -> Result<ObservableSet<C>> {
    observables_from_gram(gram(seq))
}

/// Assembles `S = sum_i X_i (x) Y_i + sum_{i<n} X_{i+1} (x) Y_i - X_1 (x) Y_n`.
///
/// The chain is regrouped by Lab X factor,
/// `S = X_1 (x) (Y_1 - Y_n) + sum_{i>1} X_i (x) (Y_i + Y_{i-1})`,
/// which needs `n` Kronecker products instead of `2n`.
pub fn assemble_chain<C: Scalar>(xs: &[DMatrix<C>], ys: &[DMatrix<C>]) -> DMatrix<C> {
    let n = xs.len();
    assert_eq!(n, ys.len(), "chain needs equal setting counts");
    let mut s = xs[0].kronecker(&(&ys[0] - &ys[n - 1]));
    for i in 1..n {
        s += xs[i].kronecker(&(&ys[i] + &ys[i - 1]));
    }
    s
}

/// The chained Bell operator on `span{beta_i} (x) span{gamma_j}`.
#[derive(Debug, Clone, PartialEq)]
pub struct BccbOperator<C: Scalar> {
    pub matrix: DMatrix<C>,
    pub n: usize,
    pub classical_bound: C::Real,
    pub quantum_bound: C::Real,
}

impl<C: Scalar> BccbOperator<C> {
    pub fn from_observables(x: &ObservableSet<C>, y: &ObservableSet<C>) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::LengthMismatch { x: x.len(), y: y.len() });
        }
        let n = x.len();
        Ok(Self {
            matrix: assemble_chain(&x.observables, &y.observables),
            n,
            classical_bound: classical_bound(n),
            quantum_bound: quantum_bound(n),
        })
    }

    pub fn max_eigenvalue(&self) -> C::Real {
        max_eigenvalue(&self.matrix)
    }
}

pub fn bccb_operator<C: Scalar>(
    betas: &DisplacementSequence<C>,
    gammas: &DisplacementSequence<C>,
) -> Result<BccbOperator<C>> {
    if betas.len() != gammas.len() {
        return Err(Error::LengthMismatch {
            x: betas.len(),
            y: gammas.len(),
        });
    }
    BccbOperator::from_observables(&observables(betas)?, &observables(gammas)?)
}

fn pauli_setting<R: Real>(angle: R) -> DMatrix<Complex<R>> {
    let (s, c) = angle.sin_cos();
    let zero = Complex::new(R::zero(), R::zero());
    DMatrix::from_row_slice(2, 2, &[zero, Complex::new(c, -s), Complex::new(c, s), zero])
}

/// Largest eigenvalue of the chained operator built from the qubit observables
/// `X_k = cos(k pi/n) sigma_x + sin(k pi/n) sigma_y` and
/// `Y_k = cos(k pi/n) sigma_x - sin(k pi/n) sigma_y`, which saturate the
/// quantum bound on the singlet.
pub fn pauli_reference_violation<R: Real>(n: usize) -> R {
    let step = R::pi() / lit(n as f64);
    let xs: Vec<_> = (1..=n)
        .map(|k| pauli_setting(step * lit(k as f64)))
        .collect();
    let ys: Vec<_> = (1..=n)
        .map(|k| pauli_setting(-step * lit(k as f64)))
        .collect();
    max_eigenvalue(&assemble_chain(&xs, &ys))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Amplitude;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Amplitude {
        Amplitude::new(re, im)
    }

    /// Term-by-term chain, kept separate from the regrouped assembly.
    fn naive_chain<C: Scalar>(xs: &[DMatrix<C>], ys: &[DMatrix<C>]) -> DMatrix<C> {
        let n = xs.len();
        let dim = xs[0].nrows() * ys[0].nrows();
        let mut s = DMatrix::zeros(dim, dim);
        for i in 0..n {
            s += xs[i].kronecker(&ys[i]);
        }
        for i in 0..n - 1 {
            s += xs[i + 1].kronecker(&ys[i]);
        }
        s - xs[0].kronecker(&ys[n - 1])
    }

    #[test]
    fn overlap_identity_and_real_separation() {
        assert_eq!(overlap(c(0.0, 0.0), c(0.0, 0.0)), c(1.0, 0.0));
        assert_eq!(overlap(c(1.3, -0.4), c(1.3, -0.4)), c(1.0, 0.0));
        let d = 2f64.ln().sqrt();
        assert_relative_eq!(d, 0.832_554_611_157_697_7, epsilon = 1e-15);
        assert_relative_eq!(overlap(0.0, d), std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_relative_eq!(overlap(0.0f64, 1.7), (-1.7f64 * 1.7 / 2.0).exp(), epsilon = 1e-15);
    }

    #[test]
    fn overlap_matches_exponent_form() {
        // <x|y> = exp(-|x|^2/2 - |y|^2/2 + x^* y)
        let pairs = [(c(0.3, 1.1), c(-0.7, 0.2)), (c(2.0, -1.0), c(1.5, 0.5))];
        for (x, y) in pairs {
            let expected = (-x.norm_sqr() / 2.0 - y.norm_sqr() / 2.0 + x.conj() * y).exp();
            let got = overlap(x, y);
            assert!((got - expected).norm() < 1e-14);
            assert!(got.norm() <= 1.0);
        }
    }

    #[test]
    fn gram_two_real_points() {
        let d = 0.9;
        let seq = DisplacementSequence::new(vec![0.0, d]).unwrap();
        let g = gram(&seq);
        let off = (-d * d / 2.0).exp();
        assert_eq!(g.entries, DMatrix::from_row_slice(2, 2, &[1.0, off, off, 1.0]));
        assert_eq!(g.regularization_shift, 0.0);
    }

    #[test]
    fn sequence_validation() {
        assert!(matches!(DisplacementSequence::new(vec![1.0]), Err(Error::TooFewSettings(1))));
        assert!(matches!(
            DisplacementSequence::new(vec![0.0, f64::NAN]),
            Err(Error::NonFinite { index: 1 })
        ));
        assert!(matches!(
            DisplacementSequence::new(vec![0.0, 1.0, 1.0 + 1e-9]),
            Err(Error::Degenerate { first: 1, second: 2, .. })
        ));
        assert!(DisplacementSequence::new(vec![0.0, 2e-6]).is_ok());
    }

    #[test]
    fn cholesky_of_identity_gram() {
        let seq = DisplacementSequence::new(vec![c(0.0, 0.0), c(20.0, 0.0), c(0.0, 20.0)]).unwrap();
        let mut g = gram(&seq);
        let l = regularized_cholesky(&mut g).unwrap();
        assert!((l - DMatrix::<Amplitude>::identity(3, 3)).norm() < 1e-14);
        assert_eq!(g.regularization_shift, 0.0);
    }

    #[test]
    fn cholesky_two_by_two_closed_form() {
        for cc in [0.1, 0.5, std::f64::consts::FRAC_1_SQRT_2, 0.95] {
            let mut g = GramMatrix {
                entries: DMatrix::from_row_slice(2, 2, &[1.0, cc, cc, 1.0]),
                regularization_shift: 0.0,
            };
            let l = regularized_cholesky(&mut g).unwrap();
            let expected = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, cc, (1.0 - cc * cc).sqrt()]);
            assert!((l - expected).norm() < 1e-14, "c={cc}");
        }
    }

    #[test]
    fn near_coincident_displacements_shift_or_fail() {
        let mut g = GramMatrix::from_amplitudes(&[0.0, 1.0, 1.0 + 1e-9]);
        match regularized_cholesky(&mut g) {
            Ok(l) => {
                assert!(g.regularization_shift > 0.0);
                let shifted = &g.entries + DMatrix::identity(3, 3) * g.regularization_shift;
                let residual: DMatrix<f64> = &l * l.transpose() - shifted;
                assert!(residual.norm() < 1e-10);
            }
            Err(Error::FactorizationFailure { .. }) => {}
            Err(e) => panic!("unexpected error {e}"),
        }
        // coincident points have a singular Gram matrix with zero smallest eigenvalue
        let mut g = GramMatrix::from_amplitudes(&[0.5, 0.5]);
        assert!(matches!(
            regularized_cholesky(&mut g),
            Err(Error::FactorizationFailure { .. })
        ));
    }

    #[test]
    fn n2_observables_anticommute_at_inverse_sqrt_two_overlap() {
        // X_i = I - 2 P_i with unit rank-one P_i:
        // tr(X_1 X_2) = n - 4 + 4 |<b_1|b_2>|^2, zero for n = 2 and |<b_1|b_2>|^2 = 1/2,
        // and two traceless 2x2 involutions with tr(X_1 X_2) = 0 anticommute.
        let d = 2f64.ln().sqrt();
        let set = observables(&DisplacementSequence::new(vec![0.0, d]).unwrap()).unwrap();
        let (x1, x2) = (&set.observables[0], &set.observables[1]);
        assert!(x1.trace().abs() < 1e-14);
        assert!(x2.trace().abs() < 1e-14);
        assert!((x1 * x2).trace().abs() < 1e-14);
        assert!((x1 * x2 + x2 * x1).norm() < 1e-14);

        for &delta in &[0.3, 1.2, 2.5] {
            let set = observables(&DisplacementSequence::new(vec![c(0.1, 0.2), c(0.1 + delta, -0.4)]).unwrap())
                .unwrap();
            let ov = overlap(c(0.1, 0.2), c(0.1 + delta, -0.4)).norm_sqr();
            let tr = (&set.observables[0] * &set.observables[1]).trace();
            assert!((tr - Amplitude::from(4.0 * ov - 2.0)).norm() < 1e-13);
        }
    }

    #[test]
    fn far_separated_observables_commute() {
        let seq = DisplacementSequence::new(vec![c(0.0, 0.0), c(8.0, 0.0), c(16.0, 0.0), c(8.0, 8.0)]).unwrap();
        let set = observables(&seq).unwrap();
        for a in &set.observables {
            for b in &set.observables {
                assert!((a * b - b * a).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn n2_optimal_operator_reaches_tsirelson() {
        let d = 2f64.ln().sqrt();
        let b = DisplacementSequence::new(vec![0.0, d]).unwrap();
        let op = bccb_operator(&b, &b).unwrap();
        assert_relative_eq!(op.max_eigenvalue(), 2.0 * 2f64.sqrt(), epsilon = 1e-10);
        assert_eq!(op.classical_bound, 2.0);
    }

    #[test]
    fn far_separated_operator_is_classical() {
        for n in 2..=5 {
            let values: Vec<f64> = (0..n).map(|k| 9.0 * k as f64).collect();
            let seq = DisplacementSequence::new(values).unwrap();
            let op = bccb_operator(&seq, &seq).unwrap();
            assert!(op.max_eigenvalue() <= classical_bound::<f64>(n) + 1e-8, "n={n}");
        }
    }

    #[test]
    fn real_displacements_give_real_symmetric_operator() {
        let b = DisplacementSequence::new(vec![c(0.0, 0.0), c(0.7, 0.0), c(1.9, 0.0)]).unwrap();
        let g = DisplacementSequence::new(vec![c(-0.3, 0.0), c(0.4, 0.0), c(2.2, 0.0)]).unwrap();
        let op = bccb_operator(&b, &g).unwrap();
        assert_eq!(op.matrix.shape(), (9, 9));
        let max_im = op.matrix.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
        assert!(max_im < 1e-12);
        assert!((&op.matrix - op.matrix.adjoint()).norm() < 1e-12);
    }

    #[test]
    fn length_mismatch_is_rejected() {
        let b = DisplacementSequence::new(vec![0.0, 1.0]).unwrap();
        let g = DisplacementSequence::new(vec![0.0, 1.0, 2.0]).unwrap();
        assert!(matches!(bccb_operator(&b, &g), Err(Error::LengthMismatch { x: 2, y: 3 })));
    }

    #[test]
    fn regrouped_chain_equals_term_by_term_sum() {
        let b = DisplacementSequence::new(vec![c(0.0, 0.1), c(0.9, -0.3), c(1.4, 0.8), c(-0.5, 0.6)]).unwrap();
        let g = DisplacementSequence::new(vec![c(0.2, 0.0), c(-0.8, 0.5), c(1.1, 1.1), c(0.3, -1.2)]).unwrap();
        let (x, y) = (observables(&b).unwrap(), observables(&g).unwrap());
        let fast = assemble_chain(&x.observables, &y.observables);
        let slow = naive_chain(&x.observables, &y.observables);
        assert!((fast - slow).norm() < 1e-13);
    }

    #[test]
    fn pauli_reference_saturates_quantum_bound() {
        assert_relative_eq!(pauli_reference_violation::<f64>(2), 2.0 * 2f64.sqrt(), epsilon = 1e-12);
        assert_relative_eq!(pauli_reference_violation::<f64>(3), 3.0 * 3f64.sqrt(), epsilon = 1e-12);
        let seven = 14.0 * (std::f64::consts::PI / 14.0).cos();
        assert_relative_eq!(pauli_reference_violation::<f64>(7), seven, epsilon = 1e-12);
        assert_relative_eq!(pauli_reference_violation::<f32>(4), quantum_bound::<f32>(4), epsilon = 1e-4);
    }

    #[test]
    fn single_precision_instantiation() {
        let seq = DisplacementSequence::new(vec![0.0f32, 0.8, 1.9]).unwrap();
        let set = observables(&seq).unwrap();
        for m in &set.observables {
            assert!((m * m - DMatrix::<f32>::identity(3, 3)).norm() < 1e-5);
        }
    }

    fn sequence(n: usize) -> impl Strategy<Value = Vec<Amplitude>> {
        prop::collection::vec((-2.5..2.5f64, -2.5..2.5f64), n).prop_filter_map("well separated", |pts| {
            let v: Vec<Amplitude> = pts.into_iter().map(|(r, i)| c(r, i)).collect();
            let ok = v
                .iter()
                .enumerate()
                .all(|(i, a)| v.iter().skip(i + 1).all(|b| (a - b).norm() > 0.05));
            ok.then_some(v)
        })
    }

    fn spectrum(m: &DMatrix<Amplitude>) -> Vec<f64> {
        let mut e: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
        e.sort_by(f64::total_cmp);
        e
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn observables_are_reflections(v in (2usize..7).prop_flat_map(sequence)) {
            let n = v.len();
            let seq = DisplacementSequence::new(v.clone()).unwrap();
            let g = gram(&seq);
            for i in 0..n {
                for j in 0..n {
                    prop_assert_eq!(g.entries[(i, j)], if i == j { c(1.0, 0.0) } else { overlap(v[i], v[j]) });
                    prop_assert!((g.entries[(i, j)] - g.entries[(j, i)].conj()).norm() < 1e-15);
                }
            }
            let set = observables(&seq).unwrap();
            let l = &set.cholesky_factor;
            let shifted = &g.entries + DMatrix::identity(n, n) * Amplitude::from(set.regularization_shift);
            prop_assert!((l * l.adjoint() - shifted).norm() < 1e-10);
            let eye = DMatrix::<Amplitude>::identity(n, n);
            for m in &set.observables {
                prop_assert!((m - m.adjoint()).norm() < 1e-8);
                prop_assert!((m * m - &eye).norm() < 1e-8);
                let e = spectrum(m);
                prop_assert!((e[0] + 1.0).abs() < 1e-8);
                prop_assert!(e[1..].iter().all(|x| (x - 1.0).abs() < 1e-8));
            }
        }

        #[test]
        fn spectrum_invariant_under_common_offset_and_phase(
            (b, g) in (2usize..5).prop_flat_map(|n| (sequence(n), sequence(n))),
            offset in (-1.5..1.5f64, -1.5..1.5f64),
            angle in 0.0..std::f64::consts::TAU,
        ) {
            let base = bccb_operator(
                &DisplacementSequence::new(b.clone()).unwrap(),
                &DisplacementSequence::new(g.clone()).unwrap(),
            ).unwrap();
            let z = c(offset.0, offset.1);
            let rot = Amplitude::from_polar(1.0, angle);
            let shifted: Vec<_> = b.iter().map(|x| x + z).collect();
            let rotated: Vec<_> = g.iter().map(|x| x * rot).collect();
            let moved = bccb_operator(
                &DisplacementSequence::new(shifted).unwrap(),
                &DisplacementSequence::new(rotated).unwrap(),
            ).unwrap();
            let (s0, s1) = (spectrum(&base.matrix), spectrum(&moved.matrix));
            for (a, b) in s0.iter().zip(&s1) {
                prop_assert!((a - b).abs() < 1e-8);
            }
            let q = quantum_bound::<f64>(b.len());
            prop_assert!(s0.iter().all(|x| x.abs() <= q + 1e-8));
        }

        #[test]
        fn hermitian_overlap_symmetry(x in (-3.0..3.0f64, -3.0..3.0f64), y in (-3.0..3.0f64, -3.0..3.0f64)) {
            let (x, y) = (c(x.0, x.1), c(y.0, y.1));
            prop_assert!((overlap(x, y) - overlap(y, x).conj()).norm() < 1e-15);
            prop_assert!(overlap(x, y).norm() <= 1.0 + 1e-15);
        }
    }

    #[test]
    fn random_gram_is_positive_definite() {
        let v = [c(0.1, 0.3), c(-1.2, 0.4), c(0.8, -0.9), c(1.7, 1.1), c(-0.4, -1.6)];
        let g = GramMatrix::from_amplitudes(&v);
        let eig = g.entries.symmetric_eigenvalues();
        assert!(eig.iter().all(|&e| e > 0.0));
    }
}
