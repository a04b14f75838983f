//! Truncated Fock-space evaluator.
//!
//! Everything here works with explicit photon-number coefficients, so it
//! shares no code path with the Gram/Cholesky representation or the
//! closed-form state expectations and serves as their brute-force oracle.

use nalgebra::{Complex, DMatrix, DVector};

use crate::{chain_sum, lit, Error, Real, Result, Tolerances};

#[derive(Debug, Clone, PartialEq)]
pub struct FockVector<R: Real> {
    pub coefficients: DVector<Complex<R>>,
    /// Upper bound on the norm^2 discarded by the truncation.
    pub tail_bound: R,
}

/// Two-mode pure state `sum_jk c_jk |j> (x) |k>` (row index = first mode).
#[derive(Debug, Clone, PartialEq)]
pub struct TwoModeFockState<R: Real> {
    pub coefficients: DMatrix<Complex<R>>,
    pub tail_bound: R,
}

impl<R: Real> TwoModeFockState<R> {
    pub fn n_trunc(&self) -> usize {
        self.coefficients.nrows()
    }

    pub fn norm_squared(&self) -> R {
        self.coefficients.norm_squared()
    }

    pub fn product(u: &FockVector<R>, w: &FockVector<R>) -> Self {
        Self {
            coefficients: &u.coefficients * w.coefficients.transpose(),
            tail_bound: u.tail_bound + w.tail_bound,
        }
    }

    /// `sum_ij c_ij |beta_i> (x) |gamma_j>` for a coefficient matrix in the
    /// coherent basis (rows = Lab X). The tail bound is the observed norm
    /// deficit `|1 - norm^2|`, so the expansion should describe a unit vector.
    pub fn from_coherent_expansion(
        coefficients: &DMatrix<Complex<R>>,
        betas: &[Complex<R>],
        gammas: &[Complex<R>],
        n_trunc: usize,
    ) -> Self {
        let columns = |amps: &[Complex<R>]| {
            let vectors: Vec<_> = amps
                .iter()
                .map(|&a| coherent_coefficients(a, n_trunc))
                .collect();
            DMatrix::from_columns(&vectors)
        };
        let (b, g) = (columns(betas), columns(gammas));
        let m = b * coefficients * g.transpose();
        let tail_bound = (R::one() - m.norm_squared()).abs();
        Self {
            coefficients: m,
            tail_bound,
        }
    }
}

fn ln_factorial<R: Real>(n: usize) -> R {
    (2..=n).fold(R::zero(), |acc, k| acc + lit::<R>(k as f64).ln())
}

/// Upper bound on `sum_{k >= n} e^{-mu} mu^k / k!`, using the geometric
/// majorant `p_n / (1 - mu / (n + 1))` once `n + 1 > mu`.
pub fn poisson_tail_bound<R: Real>(mean: R, n: usize) -> R {
    if mean <= R::zero() {
        return if n == 0 { R::one() } else { R::zero() };
    }
    let next = lit::<R>(n as f64 + 1.0);
    if next <= mean {
        return R::one();
    }
    let log_p = -mean + lit::<R>(n as f64) * mean.ln() - ln_factorial::<R>(n);
    log_p.exp() / (R::one() - mean / next)
}

/// Smallest truncation whose Poisson tail bound is below `target`.
pub fn truncation_for_mean<R: Real>(mean: R, target: R) -> usize {
    let mut n = 1;
    while poisson_tail_bound(mean, n) >= target {
        n += 1;
    }
    n
}

/// Smallest truncation for the two-mode squeezed vacuum with squeezing `r`:
/// the discarded weight is `tanh(r)^{2N}`.
pub fn truncation_for_squeezing<R: Real>(r: R, target: R) -> usize {
    let t2 = r.tanh().powi(2);
    if t2 <= R::zero() {
        return 1;
    }
    let n = (target.ln() / t2.ln()).ceil();
    crate::coherent::to_f64(n).max(1.0) as usize + 1
}

/// Truncation covering every amplitude in `amplitudes` to the default tail target.
pub fn truncation_for<R: Real>(amplitudes: &[Complex<R>]) -> usize {
    let mean = amplitudes
        .iter()
        .map(|a| a.norm_sqr())
        .fold(R::zero(), R::max);
    truncation_for_mean(mean, lit(Tolerances::DEFAULT.fock_tail))
}

/// `e^{-|a|^2/2} a^k / sqrt(k!)` for `k < n_trunc`, without a tail check.
pub fn coherent_coefficients<R: Real>(alpha: Complex<R>, n_trunc: usize) -> DVector<Complex<R>> {
    let mut c = DVector::zeros(n_trunc);
    let mut current = Complex::new((-alpha.norm_sqr() * lit(0.5)).exp(), R::zero());
    for k in 0..n_trunc {
        c[k] = current;
        current = current * alpha / lit::<R>(k as f64 + 1.0).sqrt();
    }
    c
}

pub fn coherent_fock<R: Real>(alpha: Complex<R>, n_trunc: usize) -> Result<FockVector<R>> {
    let target = Tolerances::DEFAULT.fock_tail;
    let tail_bound = poisson_tail_bound(alpha.norm_sqr(), n_trunc);
    if tail_bound >= lit(target) {
        return Err(Error::TruncationTooSmall {
            n_trunc,
            tail: crate::coherent::to_f64(tail_bound),
            target,
        });
    }
    Ok(FockVector {
        coefficients: coherent_coefficients(alpha, n_trunc),
        tail_bound,
    })
}

/// `<Psi| A(beta) (x) A(gamma) |Psi>` with `A(z) = I - 2|z><z|`, expanded as
/// `1 - 2 p_beta - 2 p_gamma + 4 |<beta, gamma|Psi>|^2` and normalized by the
/// truncated norm of the state.
pub fn expectation_brute<R: Real>(
    state: &TwoModeFockState<R>,
    beta: Complex<R>,
    gamma: Complex<R>,
) -> R {
    let n = state.n_trunc();
    let b = coherent_coefficients(beta, n).conjugate();
    let g = coherent_coefficients(gamma, n).conjugate();
    let m = &state.coefficients;
    let first = m.transpose() * &b; // (<beta| (x) I)|Psi>
    let second = m * &g; // (I (x) <gamma|)|Psi>
    let joint = b.dot(&second);
    let norm = state.norm_squared();
    let two: R = lit(2.0);
    let four: R = lit(4.0);
    (norm - two * first.norm_squared() - two * second.norm_squared() + four * joint.norm_sqr()) / norm
}

/// Brute-force `<Psi|S|Psi>` for the chained operator.
pub fn bccb_expectation_brute<R: Real>(
    state: &TwoModeFockState<R>,
    betas: &[Complex<R>],
    gammas: &[Complex<R>],
) -> R {
    assert_eq!(betas.len(), gammas.len(), "parties need equal setting counts");
    chain_sum(betas.len(), |i, j| expectation_brute(state, betas[i], gammas[j]))
}

/// Phase-averaged projector `(1/2pi) int |e^{i phi} a><e^{i phi} a| dphi`,
/// diagonal in the Fock basis.
#[derive(Debug, Clone, PartialEq)]
pub struct DephasedProjector<R: Real> {
    /// Poisson weights `e^{-|a|^2} |a|^{2k} / k!`.
    pub diagonal: DVector<R>,
    pub tail_bound: R,
}

pub fn dephased_projector<R: Real>(alpha: Complex<R>, n_trunc: usize) -> DephasedProjector<R> {
    let diagonal = coherent_coefficients(alpha, n_trunc).map(|c| c.norm_sqr());
    DephasedProjector {
        diagonal,
        tail_bound: poisson_tail_bound(alpha.norm_sqr(), n_trunc),
    }
}

/// `<Psi|S|Psi>` after replacing every projector by its phase-averaged
/// counterpart. The averaged effects are all diagonal, so only the joint
/// photon-number distribution `|c_jk|^2` of the state enters.
pub fn dephased_bccb_expectation<R: Real>(
    state: &TwoModeFockState<R>,
    betas: &[Complex<R>],
    gammas: &[Complex<R>],
) -> R {
    assert_eq!(betas.len(), gammas.len(), "parties need equal setting counts");
    let n_trunc = state.n_trunc();
    let weights = state.coefficients.map(|c| c.norm_sqr()) / state.norm_squared();
    let outcome = |z: Complex<R>| {
        dephased_projector(z, n_trunc)
            .diagonal
            .map(|p| R::one() - p * lit(2.0))
    };
    let xs: Vec<DVector<R>> = betas.iter().map(|&z| outcome(z)).collect();
    let ys: Vec<DVector<R>> = gammas.iter().map(|&z| outcome(z)).collect();
    chain_sum(betas.len(), |i, j| xs[i].dot(&(&weights * &ys[j])))
}
