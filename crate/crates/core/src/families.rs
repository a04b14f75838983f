//! Closed-form chained-operator expectations for entangled coherent states
//! `N (a|alpha>|0> + |0>|alpha>)` and two-mode squeezed vacuum
//! `(1/cosh r) sum_k (-tanh r)^k |k>|k>`, together with their truncated Fock
//! representations.

use nalgebra::ComplexField as _;
use nalgebra::{Complex, DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::coherent::{overlap, to_f64};
use crate::fock::{coherent_fock, TwoModeFockState};
use crate::{chain_sum, lit, Error, Real, Result, Tolerances};

/// Smallest `N_alpha^{-2} / (1 + |a|^2)` accepted by [`EcsParams`].
pub const MIN_RELATIVE_NORM: f64 = 1e-6;

/// Largest squeezing accepted by [`TmsvParams`].
pub const MAX_SQUEEZING: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EcsParams<R: Real> {
    pub alpha: R,
    pub a: Complex<R>,
}

impl<R: Real> EcsParams<R> {
    pub fn new(alpha: R, a: Complex<R>) -> Result<Self> {
        if !(alpha >= R::zero()) || !alpha.is_finite() || !a.re.is_finite() || !a.im.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "entangled coherent state needs finite alpha >= 0 and a, got alpha={alpha}, a={a}"
            )));
        }
        let p = Self { alpha, a };
        // The closed forms are O(1) sums divided by this denominator; when the
        // two branches nearly cancel the result is dominated by rounding.
        let scale = R::one() + a.norm_sqr();
        if !(p.norm_denominator() > scale * lit::<R>(MIN_RELATIVE_NORM)) {
            return Err(Error::InvalidParameter(format!(
                "entangled coherent state with alpha={alpha}, a={a} has (nearly) zero norm"
            )));
        }
        Ok(p)
    }

    /// `1 + |a|^2 + 2 e^{-alpha^2} Re(a)`.
    pub fn norm_denominator(&self) -> R {
        R::one() + self.a.norm_sqr() + lit::<R>(2.0) * (-self.alpha * self.alpha).exp() * self.a.re
    }

    /// `N_alpha^2`.
    pub fn normalization_squared(&self) -> R {
        R::one() / self.norm_denominator()
    }
}

/// `<x|A(z)|y> = <x|y> - 2 <x|z><z|y>`.
fn displaced_matrix_element<R: Real>(x: Complex<R>, y: Complex<R>, z: Complex<R>) -> Complex<R> {
    overlap(x, y) - overlap(x, z) * overlap(z, y) * lit::<R>(2.0)
}

/// `<Psi_EC| A(beta) (x) A(gamma) |Psi_EC>`.
///
/// Expanding the state gives
/// `N^2 [ |a|^2 b(alpha,alpha,beta) b(0,0,gamma) + b(0,0,beta) b(alpha,alpha,gamma)
///        + 2 Re(a^* b(alpha,0,beta) b(0,alpha,gamma)) ]`
/// with `b(x,y,z) = <x|A(z)|y>`. Only the cross term carries the `2 Re`; the
/// second diagonal term enters once, with unit weight.
pub fn ecs_correlator<R: Real>(p: &EcsParams<R>, beta: Complex<R>, gamma: Complex<R>) -> R {
    let zero = Complex::new(R::zero(), R::zero());
    let alpha = Complex::new(p.alpha, R::zero());
    let b = displaced_matrix_element::<R>;
    let diagonal = b(alpha, alpha, beta).re * b(zero, zero, gamma).re * p.a.norm_sqr()
        + b(zero, zero, beta).re * b(alpha, alpha, gamma).re;
    let cross = (p.a.conj() * b(alpha, zero, beta) * b(zero, alpha, gamma)).re * lit(2.0);
    p.normalization_squared() * (diagonal + cross)
}

pub fn ecs_expectation<R: Real>(p: &EcsParams<R>, betas: &[Complex<R>], gammas: &[Complex<R>]) -> Result<R> {
    check_lengths(betas, gammas)?;
    Ok(chain_sum(betas.len(), |i, j| ecs_correlator(p, betas[i], gammas[j])))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TmsvParams<R> {
    pub r: R,
}

impl<R: Real> TmsvParams<R> {
    pub fn new(r: R) -> Result<Self> {
        if !(r >= R::zero() && r <= lit(MAX_SQUEEZING)) {
            return Err(Error::InvalidParameter(format!(
                "squeezing must lie in [0, {MAX_SQUEEZING}], got {r}"
            )));
        }
        Ok(Self { r })
    }
}

/// `<Psi_TMSV(r)| A(beta) (x) A(gamma) |Psi_TMSV(r)>`
/// `= 1 - 2 [e^{-|beta|^2/cosh^2 r} + e^{-|gamma|^2/cosh^2 r}
///           - 2 e^{-|beta|^2 - |gamma|^2 - 2 Re(beta gamma) tanh r}] / cosh^2 r`.
pub fn tmsv_correlator<R: Real>(r: R, beta: Complex<R>, gamma: Complex<R>) -> R {
    let c2 = r.cosh().powi(2);
    let (b2, g2) = (beta.norm_sqr(), gamma.norm_sqr());
    let joint = (-b2 - g2 - lit::<R>(2.0) * (beta * gamma).re * r.tanh()).exp();
    let two: R = lit(2.0);
    R::one() - two * ((-b2 / c2).exp() + (-g2 / c2).exp() - two * joint) / c2
}

pub fn tmsv_expectation<R: Real>(p: &TmsvParams<R>, betas: &[Complex<R>], gammas: &[Complex<R>]) -> Result<R> {
    check_lengths(betas, gammas)?;
    Ok(chain_sum(betas.len(), |i, j| tmsv_correlator(p.r, betas[i], gammas[j])))
}

fn check_lengths<T>(betas: &[T], gammas: &[T]) -> Result<()> {
    if betas.len() != gammas.len() {
        return Err(Error::LengthMismatch {
            x: betas.len(),
            y: gammas.len(),
        });
    }
    if betas.len() < 2 {
        return Err(Error::TooFewSettings(betas.len()));
    }
    Ok(())
}

pub fn ecs_state_fock<R: Real>(p: &EcsParams<R>, n_trunc: usize) -> Result<TwoModeFockState<R>> {
    let coherent = coherent_fock(Complex::new(p.alpha, R::zero()), n_trunc)?;
    let mut vacuum = DVector::zeros(n_trunc);
    vacuum[0] = Complex::new(R::one(), R::zero());
    let u = &coherent.coefficients;
    let m: DMatrix<Complex<R>> = (u * vacuum.transpose() * p.a + &vacuum * u.transpose())
        * Complex::new(p.normalization_squared().sqrt(), R::zero());
    let weight = (p.a.modulus() + R::one()).powi(2) * p.normalization_squared();
    Ok(TwoModeFockState {
        coefficients: m,
        tail_bound: coherent.tail_bound * weight,
    })
}

pub fn tmsv_state_fock<R: Real>(p: &TmsvParams<R>, n_trunc: usize) -> Result<TwoModeFockState<R>> {
    let t = p.r.tanh();
    let target = Tolerances::DEFAULT.fock_tail;
    let tail_bound = (t * t).powi(n_trunc as i32);
    if tail_bound >= lit(target) {
        return Err(Error::TruncationTooSmall {
            n_trunc,
            tail: to_f64(tail_bound),
            target,
        });
    }
    let mut m = DMatrix::zeros(n_trunc, n_trunc);
    let mut c = R::one() / p.r.cosh();
    for k in 0..n_trunc {
        m[(k, k)] = Complex::new(c, R::zero());
        c *= -t;
    }
    Ok(TwoModeFockState {
        coefficients: m,
        tail_bound,
    })
}
