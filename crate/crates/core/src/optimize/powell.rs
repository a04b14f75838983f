//! Powell's conjugate-direction method with Brent line minimization.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalConfig {
    /// Relative tolerance of each line minimization.
    pub x_tolerance: f64,
    /// Relative decrease per sweep below which the search stops.
    pub f_tolerance: f64,
    pub max_evaluations: usize,
}

impl Default for LocalConfig {
    fn default() -> Self {
        Self {
            x_tolerance: 1e-8,
            f_tolerance: 1e-10,
            max_evaluations: 20_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Converged,
    /// The evaluation budget ran out; the point is the best seen so far.
    BudgetExhausted,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalMinimum {
    pub point: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    pub termination: Termination,
}

const GOLD: f64 = 1.618_033_988_749_895;
const CGOLD: f64 = 0.381_966_011_250_105;
const GLIMIT: f64 = 100.0;
const TINY: f64 = 1e-21;
const ZEPS: f64 = 1e-12;
const MAX_BRACKET_STEPS: usize = 60;
const MAX_BRENT_STEPS: usize = 100;

struct Counted<F> {
    f: F,
    evaluations: usize,
    budget: usize,
}

impl<F: FnMut(&[f64]) -> f64> Counted<F> {
    fn eval(&mut self, x: &[f64]) -> f64 {
        self.evaluations += 1;
        let v = (self.f)(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    }

    fn exhausted(&self) -> bool {
        self.evaluations >= self.budget
    }
}

fn along(x: &[f64], d: &[f64], t: f64) -> Vec<f64> {
    x.iter().zip(d).map(|(a, b)| a + t * b).collect()
}

/// Minimizes `t -> f(x + t d)` starting from the known value `f0 = f(x)`;
/// returns `(t, f(x + t d))` with `f(x + t d) <= f0`.
fn line_minimize<F: FnMut(&[f64]) -> f64>(
    f: &mut Counted<F>,
    x: &[f64],
    d: &[f64],
    f0: f64,
    tol: f64,
) -> (f64, f64) {
    let phi = |t: f64, f: &mut Counted<F>| f.eval(&along(x, d, t));

    // bracket
    let (mut ax, mut bx) = (0.0, 1.0);
    let (mut fa, mut fb) = (f0, phi(bx, f));
    if fb > fa {
        std::mem::swap(&mut ax, &mut bx);
        std::mem::swap(&mut fa, &mut fb);
    }
    let mut cx = bx + GOLD * (bx - ax);
    let mut fc = phi(cx, f);
    let mut steps = 0;
    while fb > fc {
        steps += 1;
        if steps > MAX_BRACKET_STEPS || f.exhausted() {
            return if fc < fb { (cx, fc) } else { (bx, fb) };
        }
        let r = (bx - ax) * (fb - fc);
        let q = (bx - cx) * (fb - fa);
        let denom = 2.0 * (q - r).abs().max(TINY).copysign(q - r);
        let mut u = bx - ((bx - cx) * q - (bx - ax) * r) / denom;
        let ulim = bx + GLIMIT * (cx - bx);
        let mut fu;
        if (bx - u) * (u - cx) > 0.0 {
            fu = phi(u, f);
            if fu < fc {
                ax = bx;
                bx = u;
                fa = fb;
                fb = fu;
                break;
            } else if fu > fb {
                cx = u;
                break;
            }
            u = cx + GOLD * (cx - bx);
            fu = phi(u, f);
        } else if (cx - u) * (u - ulim) > 0.0 {
            fu = phi(u, f);
            if fu < fc {
                bx = cx;
                cx = u;
                u = cx + GOLD * (cx - bx);
                fb = fc;
                fc = fu;
                fu = phi(u, f);
            }
        } else if (u - ulim) * (ulim - cx) >= 0.0 {
            u = ulim;
            fu = phi(u, f);
        } else {
            u = cx + GOLD * (cx - bx);
            fu = phi(u, f);
        }
        ax = bx;
        bx = cx;
        cx = u;
        fa = fb;
        fb = fc;
        fc = fu;
    }
    let _ = fa;

    // Brent
    let (mut a, mut b) = if ax < cx { (ax, cx) } else { (cx, ax) };
    let (mut x0, mut w, mut v) = (bx, bx, bx);
    let (mut fx, mut fw, mut fv) = (fb, fb, fb);
    let (mut d_step, mut e): (f64, f64) = (0.0, 0.0);
    for _ in 0..MAX_BRENT_STEPS {
        let xm = 0.5 * (a + b);
        let tol1 = tol * x0.abs() + ZEPS;
        let tol2 = 2.0 * tol1;
        if (x0 - xm).abs() <= tol2 - 0.5 * (b - a) || f.exhausted() {
            break;
        }
        if e.abs() > tol1 {
            let r = (x0 - w) * (fx - fv);
            let mut q = (x0 - v) * (fx - fw);
            let mut p = (x0 - v) * q - (x0 - w) * r;
            q = 2.0 * (q - r);
            if q > 0.0 {
                p = -p;
            }
            q = q.abs();
            let etemp = e;
            e = d_step;
            if p.abs() >= (0.5 * q * etemp).abs() || p <= q * (a - x0) || p >= q * (b - x0) {
                e = if x0 >= xm { a - x0 } else { b - x0 };
                d_step = CGOLD * e;
            } else {
                d_step = p / q;
                let u = x0 + d_step;
                if u - a < tol2 || b - u < tol2 {
                    d_step = tol1.copysign(xm - x0);
                }
            }
        } else {
            e = if x0 >= xm { a - x0 } else { b - x0 };
            d_step = CGOLD * e;
        }
        let u = if d_step.abs() >= tol1 {
            x0 + d_step
        } else {
            x0 + tol1.copysign(d_step)
        };
        let fu = phi(u, f);
        if fu <= fx {
            if u >= x0 {
                a = x0;
            } else {
                b = x0;
            }
            v = w;
            w = x0;
            x0 = u;
            fv = fw;
            fw = fx;
            fx = fu;
        } else {
            if u < x0 {
                a = u;
            } else {
                b = u;
            }
            if fu <= fw || w == x0 {
                v = w;
                w = u;
                fv = fw;
                fw = fu;
            } else if fu <= fv || v == x0 || v == w {
                v = u;
                fv = fu;
            }
        }
    }
    (x0, fx)
}

/// Derivative-free local minimization of `objective` from `start`.
///
/// Each sweep line-minimizes along every direction of the current set, then
/// replaces the direction of largest decrease by the net sweep displacement
/// when the extrapolation test allows it. The search stops when a sweep lowers
/// the value by less than `f_tolerance` in relative terms.
pub fn minimize_scalar<F: FnMut(&[f64]) -> f64>(
    objective: F,
    start: &[f64],
    config: &LocalConfig,
) -> LocalMinimum {
    let dim = start.len();
    let mut f = Counted {
        f: objective,
        evaluations: 0,
        budget: config.max_evaluations.max(1),
    };
    let mut x = start.to_vec();
    let mut fx = f.eval(&x);
    if dim == 0 {
        return LocalMinimum {
            point: x,
            value: fx,
            evaluations: f.evaluations,
            termination: Termination::Converged,
        };
    }
    let mut directions: Vec<Vec<f64>> = (0..dim)
        .map(|i| (0..dim).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();

    let termination = loop {
        let (x_start, f_start) = (x.clone(), fx);
        let mut biggest_drop = 0.0;
        let mut biggest_index = 0;
        for (i, d) in directions.iter().enumerate() {
            let before = fx;
            let (t, value) = line_minimize(&mut f, &x, d, fx, config.x_tolerance);
            if value < fx {
                x = along(&x, d, t);
                fx = value;
            }
            if before - fx > biggest_drop {
                biggest_drop = before - fx;
                biggest_index = i;
            }
        }
        if 2.0 * (f_start - fx) <= config.f_tolerance * (f_start.abs() + fx.abs()) + 1e-20 {
            break Termination::Converged;
        }
        if f.exhausted() {
            break Termination::BudgetExhausted;
        }
        let new_direction: Vec<f64> = x.iter().zip(&x_start).map(|(a, b)| a - b).collect();
        let extrapolated: Vec<f64> = x.iter().zip(&x_start).map(|(a, b)| 2.0 * a - b).collect();
        let f_ext = f.eval(&extrapolated);
        if f_ext < f_start {
            let t = 2.0 * (f_start - 2.0 * fx + f_ext) * (f_start - fx - biggest_drop).powi(2)
                - biggest_drop * (f_start - f_ext).powi(2);
            if t < 0.0 {
                let (step, value) = line_minimize(&mut f, &x, &new_direction, fx, config.x_tolerance);
                if value < fx {
                    x = along(&x, &new_direction, step);
                    fx = value;
                }
                directions[biggest_index] = directions[dim - 1].clone();
                directions[dim - 1] = new_direction;
            }
        }
        if f.exhausted() {
            break Termination::BudgetExhausted;
        }
    };

    LocalMinimum {
        point: x,
        value: fx,
        evaluations: f.evaluations,
        termination,
    }
}
