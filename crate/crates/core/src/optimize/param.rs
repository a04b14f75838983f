//! Maps between optimizer coordinates and physical settings.

use serde::{Deserialize, Serialize};

use crate::families::MAX_SQUEEZING;
use crate::{Amplitude, Error, Result};

/// Which state the violation is maximized for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// Any two-mode state: the top eigenvalue of the chained operator.
    General,
    /// Entangled coherent states `N (a|alpha,0> + |0,alpha>)`.
    Ecs,
    /// Two-mode squeezed vacuum.
    Tmsv,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::General => "general",
            Family::Ecs => "ecs",
            Family::Tmsv => "tmsv",
        }
    }
}

/// State parameters carried along with the displacements.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum StateParams {
    /// The state is whatever eigenvector maximizes the operator.
    Optimal,
    Ecs { alpha: f64, a: f64 },
    Tmsv { r: f64 },
}

/// Coordinate systems the optimizer works in.
///
/// Entries of `betas`/`gammas` are one-based in the comments below; `beta_1`
/// and `gamma_1` are pinned to zero in every general reduction, which loses
/// nothing because a common displacement of one party is a local unitary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum Parametrization {
    /// `4n` coordinates: real and imaginary parts of every displacement.
    GeneralComplex,
    /// `2n - 2` coordinates: `beta_2..beta_n, gamma_2..gamma_n`, all real.
    GeneralReal,
    /// Two coordinates `(d, e)`:
    /// `beta = [0, e, e + d, ..., e + (n-2) d]`,
    /// `gamma = [0, d, ..., (n-2) d, (n-2) d + e]`.
    GeneralTwoStep,
    /// Seven coordinates `(alpha, a, b1, b2, g1, g2, g3)`:
    /// `beta_1..beta_{n-2} = b1`, `beta_{n-1} = beta_n = b2`,
    /// `gamma_1 = gamma_{n-1} = g1`, `gamma_2..gamma_{n-2} = g2`, `gamma_n = g3`.
    EcsReduced,
    /// Nine coordinates `(alpha, a, b1, b2, b3, g1, g2, g3, g4)`:
    /// `beta_1..beta_{n-3} = b1`, `beta_{n-2} = b2`, `beta_{n-1} = beta_n = b3`,
    /// `gamma_1 = g1`, `gamma_2..gamma_{n-2} = g3`, `gamma_{n-1} = g2`, `gamma_n = g4`.
    EcsDetailed,
    /// Eight coordinates `(alpha, a, b1, b2, b3, g1, g2, g3)` describing a
    /// staircase between the levels `0` and `alpha`:
    /// `beta = [b1, b2, alpha + b3, ..., alpha + b3]`,
    /// `gamma = [alpha + g1, g2, g3, ..., g3]`.
    /// Reversing the chain and exchanging the parties maps the mirrored
    /// staircase onto this one, so a single orientation suffices.
    EcsStaircase,
    /// `2n + 2` coordinates: `alpha, a`, then all betas and all gammas.
    EcsFull,
    /// `2n + 1` coordinates: `r`, then all betas and all gammas.
    TmsvFull,
    /// `2n` coordinates at a fixed squeezing.
    TmsvFixed { r: f64 },
}

/// Physical settings decoded from a coordinate vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Decoded {
    pub betas: Vec<Amplitude>,
    pub gammas: Vec<Amplitude>,
    pub state: StateParams,
}

impl Decoded {
    pub fn is_real(&self) -> bool {
        self.betas.iter().chain(&self.gammas).all(|z| z.im == 0.0)
    }

    pub fn real_betas(&self) -> Vec<f64> {
        self.betas.iter().map(|z| z.re).collect()
    }

    pub fn real_gammas(&self) -> Vec<f64> {
        self.gammas.iter().map(|z| z.re).collect()
    }
}

fn real(values: impl IntoIterator<Item = f64>) -> Vec<Amplitude> {
    values.into_iter().map(|v| Amplitude::new(v, 0.0)).collect()
}

/// Squeezing coordinate folded into `[0, MAX_SQUEEZING]`.
fn squeezing(x: f64) -> f64 {
    x.abs().min(MAX_SQUEEZING)
}

impl Parametrization {
    pub fn name(&self) -> &'static str {
        match self {
            Parametrization::GeneralComplex => "general_complex",
            Parametrization::GeneralReal => "general_real",
            Parametrization::GeneralTwoStep => "general_two_step",
            Parametrization::EcsReduced => "ecs_reduced",
            Parametrization::EcsDetailed => "ecs_detailed",
            Parametrization::EcsStaircase => "ecs_staircase",
            Parametrization::EcsFull => "ecs_full",
            Parametrization::TmsvFull => "tmsv_full",
            Parametrization::TmsvFixed { .. } => "tmsv_fixed",
        }
    }

    pub(crate) fn stream_tag(&self) -> u64 {
        match self {
            Parametrization::GeneralComplex => 1,
            Parametrization::GeneralReal => 2,
            Parametrization::GeneralTwoStep => 3,
            Parametrization::EcsReduced => 4,
            Parametrization::EcsDetailed => 5,
            Parametrization::EcsFull => 6,
            Parametrization::TmsvFull => 7,
            Parametrization::TmsvFixed { .. } => 8,
            Parametrization::EcsStaircase => 9,
        }
    }

    pub fn family(&self) -> Family {
        match self {
            Parametrization::GeneralComplex
            | Parametrization::GeneralReal
            | Parametrization::GeneralTwoStep => Family::General,
            Parametrization::EcsReduced
            | Parametrization::EcsDetailed
            | Parametrization::EcsStaircase
            | Parametrization::EcsFull => Family::Ecs,
            Parametrization::TmsvFull | Parametrization::TmsvFixed { .. } => Family::Tmsv,
        }
    }

    /// Smallest chain length the parametrization can describe.
    pub fn min_settings(&self) -> usize {
        match self {
            Parametrization::EcsReduced | Parametrization::EcsStaircase => 3,
            Parametrization::EcsDetailed => 4,
            _ => 2,
        }
    }

    pub fn dimension(&self, n: usize) -> usize {
        match self {
            Parametrization::GeneralComplex => 4 * n,
            Parametrization::GeneralReal => 2 * n - 2,
            Parametrization::GeneralTwoStep => 2,
            Parametrization::EcsReduced => 7,
            Parametrization::EcsDetailed => 9,
            Parametrization::EcsStaircase => 8,
            Parametrization::EcsFull => 2 * n + 2,
            Parametrization::TmsvFull => 2 * n + 1,
            Parametrization::TmsvFixed { .. } => 2 * n,
        }
    }

    fn check(&self, n: usize, len: usize) -> Result<()> {
        if n < self.min_settings() {
            return Err(Error::InvalidParameter(format!(
                "{} needs at least {} settings, got {n}",
                self.name(),
                self.min_settings()
            )));
        }
        if len != self.dimension(n) {
            return Err(Error::InvalidParameter(format!(
                "{} at n = {n} takes {} coordinates, got {len}",
                self.name(),
                self.dimension(n)
            )));
        }
        Ok(())
    }

    /// Settings for chain length `n` at coordinates `x`.
    pub fn decode(&self, n: usize, x: &[f64]) -> Result<Decoded> {
        self.check(n, x.len())?;
        let decoded = match *self {
            Parametrization::GeneralComplex => Decoded {
                betas: (0..n).map(|i| Amplitude::new(x[2 * i], x[2 * i + 1])).collect(),
                gammas: (0..n)
                    .map(|i| Amplitude::new(x[2 * n + 2 * i], x[2 * n + 2 * i + 1]))
                    .collect(),
                state: StateParams::Optimal,
            },
            Parametrization::GeneralReal => Decoded {
                betas: real(std::iter::once(0.0).chain(x[..n - 1].iter().copied())),
                gammas: real(std::iter::once(0.0).chain(x[n - 1..].iter().copied())),
                state: StateParams::Optimal,
            },
            Parametrization::GeneralTwoStep => {
                let (d, e) = (x[0], x[1]);
                let mut betas = vec![0.0];
                betas.extend((0..n - 1).map(|k| e + k as f64 * d));
                let mut gammas: Vec<f64> = (0..n - 1).map(|k| k as f64 * d).collect();
                gammas.push((n - 2) as f64 * d + e);
                Decoded {
                    betas: real(betas),
                    gammas: real(gammas),
                    state: StateParams::Optimal,
                }
            }
            Parametrization::EcsReduced => {
                let (b1, b2, g1, g2, g3) = (x[2], x[3], x[4], x[5], x[6]);
                let betas = (0..n).map(|i| if i < n - 2 { b1 } else { b2 });
                let gammas = (0..n).map(|i| match i {
                    0 => g1,
                    i if i == n - 1 => g3,
                    i if i == n - 2 => g1,
                    _ => g2,
                });
                Decoded {
                    betas: real(betas),
                    gammas: real(gammas),
                    state: StateParams::Ecs { alpha: x[0], a: x[1] },
                }
            }
            Parametrization::EcsDetailed => {
                let (b1, b2, b3) = (x[2], x[3], x[4]);
                let (g1, g2, g3, g4) = (x[5], x[6], x[7], x[8]);
                let betas = (0..n).map(|i| match i {
                    i if i + 3 <= n - 1 => b1,
                    i if i == n - 3 => b2,
                    _ => b3,
                });
                let gammas = (0..n).map(|i| match i {
                    0 => g1,
                    i if i == n - 1 => g4,
                    i if i == n - 2 => g2,
                    _ => g3,
                });
                Decoded {
                    betas: real(betas),
                    gammas: real(gammas),
                    state: StateParams::Ecs { alpha: x[0], a: x[1] },
                }
            }
            Parametrization::EcsStaircase => {
                let alpha = x[0];
                let step = |v: [f64; 3]| (0..n).map(|i| v[i.min(2)]).collect::<Vec<_>>();
                Decoded {
                    betas: real(step([x[2], x[3], alpha + x[4]])),
                    gammas: real(step([alpha + x[5], x[6], x[7]])),
                    state: StateParams::Ecs { alpha: x[0], a: x[1] },
                }
            }
            Parametrization::EcsFull => Decoded {
                betas: real(x[2..2 + n].iter().copied()),
                gammas: real(x[2 + n..].iter().copied()),
                state: StateParams::Ecs { alpha: x[0], a: x[1] },
            },
            Parametrization::TmsvFull => Decoded {
                betas: real(x[1..1 + n].iter().copied()),
                gammas: real(x[1 + n..].iter().copied()),
                state: StateParams::Tmsv { r: squeezing(x[0]) },
            },
            Parametrization::TmsvFixed { r } => Decoded {
                betas: real(x[..n].iter().copied()),
                gammas: real(x[n..].iter().copied()),
                state: StateParams::Tmsv { r: squeezing(r) },
            },
        };
        Ok(decoded)
    }

    /// Coordinates reproducing `decoded` exactly. Only the full
    /// parametrizations are invertible; reduced ones return `InvalidParameter`.
    pub fn encode(&self, decoded: &Decoded) -> Result<Vec<f64>> {
        let n = decoded.betas.len();
        let unsupported = || {
            Error::InvalidParameter(format!("{} cannot encode these settings", self.name()))
        };
        let real_only = |values: &[Amplitude]| -> Result<Vec<f64>> {
            values
                .iter()
                .map(|z| if z.im == 0.0 { Ok(z.re) } else { Err(unsupported()) })
                .collect()
        };
        if decoded.gammas.len() != n {
            return Err(Error::LengthMismatch {
                x: n,
                y: decoded.gammas.len(),
            });
        }
        match (*self, decoded.state) {
            (Parametrization::GeneralComplex, StateParams::Optimal) => Ok(decoded
                .betas
                .iter()
                .chain(&decoded.gammas)
                .flat_map(|z| [z.re, z.im])
                .collect()),
            (Parametrization::GeneralReal, StateParams::Optimal) => {
                let (betas, gammas) = (real_only(&decoded.betas)?, real_only(&decoded.gammas)?);
                if betas[0] != 0.0 || gammas[0] != 0.0 {
                    return Err(unsupported());
                }
                Ok(betas[1..].iter().chain(&gammas[1..]).copied().collect())
            }
            (Parametrization::EcsFull, StateParams::Ecs { alpha, a }) => {
                let mut x = vec![alpha, a];
                x.extend(real_only(&decoded.betas)?);
                x.extend(real_only(&decoded.gammas)?);
                Ok(x)
            }
            (Parametrization::TmsvFull, StateParams::Tmsv { r }) => {
                let mut x = vec![r];
                x.extend(real_only(&decoded.betas)?);
                x.extend(real_only(&decoded.gammas)?);
                Ok(x)
            }
            (Parametrization::TmsvFixed { r: fixed }, StateParams::Tmsv { r }) if fixed == r => {
                let mut x = real_only(&decoded.betas)?;
                x.extend(real_only(&decoded.gammas)?);
                Ok(x)
            }
            _ => Err(unsupported()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn re(v: &[Amplitude]) -> Vec<f64> {
        v.iter().map(|z| z.re).collect()
    }

    #[test]
    fn two_step_layout() {
        let d = Parametrization::GeneralTwoStep.decode(4, &[0.5, 0.2]).unwrap();
        assert_eq!(re(&d.betas), vec![0.0, 0.2, 0.7, 0.2 + 2.0 * 0.5]);
        assert_eq!(re(&d.gammas), vec![0.0, 0.5, 1.0, 1.2]);
        // beta_2 - beta_1 = gamma_n - gamma_{n-1} = e
        let d2 = Parametrization::GeneralTwoStep.decode(2, &[9.0, 0.3]).unwrap();
        assert_eq!(re(&d2.betas), vec![0.0, 0.3]);
        assert_eq!(re(&d2.gammas), vec![0.0, 0.3]);
    }

    #[test]
    fn ecs_reduced_layout() {
        let x = [1.0, 0.5, 1.0, 2.0, 3.0, 4.0, 5.0];
        let d = Parametrization::EcsReduced.decode(6, &x).unwrap();
        assert_eq!(re(&d.betas), vec![1.0, 1.0, 1.0, 1.0, 2.0, 2.0]);
        assert_eq!(re(&d.gammas), vec![3.0, 4.0, 4.0, 4.0, 3.0, 5.0]);
        let d3 = Parametrization::EcsReduced.decode(3, &x).unwrap();
        assert_eq!(re(&d3.betas), vec![1.0, 2.0, 2.0]);
        assert_eq!(re(&d3.gammas), vec![3.0, 3.0, 5.0]);
        assert_eq!(d.state, StateParams::Ecs { alpha: 1.0, a: 0.5 });
        assert!(Parametrization::EcsReduced.decode(2, &x).is_err());
    }

    #[test]
    fn ecs_detailed_layout() {
        let x = [1.0, 0.5, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0];
        let d = Parametrization::EcsDetailed.decode(6, &x).unwrap();
        assert_eq!(re(&d.betas), vec![1.0, 1.0, 1.0, 2.0, 3.0, 3.0]);
        assert_eq!(re(&d.gammas), vec![4.0, 6.0, 6.0, 6.0, 5.0, 7.0]);
    }

    #[test]
    fn ecs_staircase_layout() {
        let x = [10.0, 0.5, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
        let d = Parametrization::EcsStaircase.decode(5, &x).unwrap();
        assert_eq!(re(&d.betas), vec![1.0, 2.0, 13.0, 13.0, 13.0]);
        assert_eq!(re(&d.gammas), vec![14.0, 5.0, 6.0, 6.0, 6.0]);
        let d3 = Parametrization::EcsStaircase.decode(3, &x).unwrap();
        assert_eq!(re(&d3.betas), vec![1.0, 2.0, 13.0]);
    }

    #[test]
    fn squeezing_is_folded() {
        let d = Parametrization::TmsvFull.decode(2, &[-4.0, 0.0, 1.0, 0.0, 1.0]).unwrap();
        assert_eq!(d.state, StateParams::Tmsv { r: MAX_SQUEEZING });
    }

    #[test]
    fn dimension_is_checked() {
        assert!(Parametrization::GeneralReal.decode(3, &[0.0; 3]).is_err());
        assert!(Parametrization::GeneralReal.decode(3, &[0.0; 4]).is_ok());
    }

    #[test]
    fn reduced_forms_do_not_encode() {
        let d = Parametrization::GeneralTwoStep.decode(3, &[0.5, 0.2]).unwrap();
        assert!(Parametrization::GeneralTwoStep.encode(&d).is_err());
        assert!(Parametrization::EcsFull.encode(&d).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn full_forms_round_trip(n in 2usize..9, seed in proptest::collection::vec(-3.0f64..3.0, 4 * 9 + 2)) {
            for p in [
                Parametrization::GeneralComplex,
                Parametrization::GeneralReal,
                Parametrization::EcsFull,
                Parametrization::TmsvFull,
                Parametrization::TmsvFixed { r: 0.7 },
            ] {
                let mut x = seed[..p.dimension(n)].to_vec();
                if p == Parametrization::TmsvFull {
                    x[0] = x[0].abs();
                }
                let d = p.decode(n, &x).unwrap();
                prop_assert_eq!(d.betas.len(), n);
                prop_assert_eq!(d.gammas.len(), n);
                prop_assert_eq!(p.encode(&d).unwrap(), x);
            }
        }

        #[test]
        fn reduced_forms_expand_into_full(n in 4usize..12, x in proptest::collection::vec(-3.0f64..3.0, 9)) {
            for (reduced, full) in [
                (Parametrization::GeneralTwoStep, Parametrization::GeneralReal),
                (Parametrization::EcsReduced, Parametrization::EcsFull),
                (Parametrization::EcsDetailed, Parametrization::EcsFull),
                (Parametrization::EcsStaircase, Parametrization::EcsFull),
            ] {
                let d = reduced.decode(n, &x[..reduced.dimension(n)]).unwrap();
                let y = full.encode(&d).unwrap();
                prop_assert_eq!(full.decode(n, &y).unwrap(), d);
            }
        }
    }
}
