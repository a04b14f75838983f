//! Properties of the chained operator and the state families, checked through
//! the public API against independently written oracles.

use bellmzi_core::coherent::{bccb_operator, gram, overlap, DisplacementSequence};
use bellmzi_core::families::{ecs_expectation, tmsv_expectation, EcsParams, TmsvParams};
use bellmzi_core::regression::{fit_saturation, SaturationModel};
use bellmzi_core::{classical_bound, quantum_bound, Amplitude, ComplexSequence};
use proptest::prelude::*;

/// `<x|y>` by direct summation of the photon-number series.
fn overlap_series(x: Amplitude, y: Amplitude) -> Amplitude {
    let mut term = Amplitude::new(1.0, 0.0);
    let mut sum = term;
    let xy = x.conj() * y;
    for k in 1..200 {
        term *= xy / k as f64;
        sum += term;
    }
    sum * (-(x.norm_sqr() + y.norm_sqr()) / 2.0).exp()
}

fn amp() -> impl Strategy<Value = Amplitude> {
    (-2.0..2.0f64, -2.0..2.0f64).prop_map(|(re, im)| Amplitude::new(re, im))
}

fn settings() -> impl Strategy<Value = (Vec<Amplitude>, Vec<Amplitude>)> {
    (2usize..=5).prop_flat_map(|n| (prop::collection::vec(amp(), n), prop::collection::vec(amp(), n)))
}

fn max_eig(betas: &[Amplitude], gammas: &[Amplitude]) -> Option<f64> {
    let x = ComplexSequence::new(betas.to_vec()).ok()?;
    let y = ComplexSequence::new(gammas.to_vec()).ok()?;
    bccb_operator(&x, &y).ok().map(|op| op.max_eigenvalue())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn overlap_matches_series(x in amp(), y in amp()) {
        prop_assert!((overlap(x, y) - overlap_series(x, y)).norm() < 1e-12);
    }

    #[test]
    fn gram_is_hermitian_with_unit_diagonal((betas, _) in settings()) {
        let Ok(seq) = DisplacementSequence::new(betas.clone()) else { return Ok(()) };
        let g = gram(&seq);
        for i in 0..betas.len() {
            for j in 0..betas.len() {
                let (a, b) = (g.entries[(i, j)], g.entries[(j, i)]);
                prop_assert!((a - b.conj()).norm() < 1e-14);
            }
            prop_assert!((g.entries[(i, i)] - 1.0).norm() < 1e-14);
        }
    }

    #[test]
    fn spectrum_is_bounded((betas, gammas) in settings()) {
        let Some(top) = max_eig(&betas, &gammas) else { return Ok(()) };
        prop_assert!(top <= quantum_bound::<f64>(betas.len()) + 1e-8);
    }

    /// A common displacement of one party's settings is a local unitary.
    #[test]
    fn translation_invariant((betas, gammas) in settings(), shift in amp()) {
        let Some(before) = max_eig(&betas, &gammas) else { return Ok(()) };
        let moved: Vec<Amplitude> = betas.iter().map(|b| b + shift).collect();
        let after = max_eig(&moved, &gammas).unwrap();
        prop_assert!((before - after).abs() < 1e-8, "{before} vs {after}");
    }

    /// A common phase rotation is a local unitary too, and so is conjugating
    /// every amplitude (the operator becomes its complex conjugate).
    #[test]
    fn rotation_and_conjugation_invariant((betas, gammas) in settings(), phase in 0.0..6.3f64) {
        let Some(before) = max_eig(&betas, &gammas) else { return Ok(()) };
        let turn = Amplitude::from_polar(1.0, phase);
        let rotated: Vec<Amplitude> = gammas.iter().map(|g| g * turn).collect();
        prop_assert!((before - max_eig(&betas, &rotated).unwrap()).abs() < 1e-8);
        let conj = |v: &[Amplitude]| v.iter().map(|z| z.conj()).collect::<Vec<_>>();
        prop_assert!((before - max_eig(&conj(&betas), &conj(&gammas)).unwrap()).abs() < 1e-8);
    }

    /// No state beats the top eigenvalue of the operator.
    #[test]
    fn family_expectations_below_spectrum(
        (betas, gammas) in settings(),
        alpha in 0.2..2.5f64,
        a in amp(),
        r in 0.0..2.0f64,
    ) {
        let Some(top) = max_eig(&betas, &gammas) else { return Ok(()) };
        if let Ok(p) = EcsParams::new(alpha, a) {
            prop_assert!(ecs_expectation(&p, &betas, &gammas).unwrap() <= top + 1e-9);
        }
        let t = TmsvParams::new(r).unwrap();
        prop_assert!(tmsv_expectation(&t, &betas, &gammas).unwrap() <= top + 1e-9);
    }
}

#[test]
fn separated_settings_stay_classical() {
    for n in 2..=8 {
        let far = |k: usize, offset: f64| Amplitude::new(30.0 * k as f64, offset);
        let x = ComplexSequence::new((0..n).map(|k| far(k, 0.0)).collect()).unwrap();
        let y = ComplexSequence::new((0..n).map(|k| far(k, 15.0)).collect()).unwrap();
        let top = bccb_operator(&x, &y).unwrap().max_eigenvalue();
        assert!(top <= classical_bound::<f64>(n) + 1e-8, "n = {n}: {top}");
    }
}

#[test]
fn vacuum_squeezing_gives_product_statistics() {
    // r = 0 is the vacuum, a product state: never above the classical bound
    let betas = [Amplitude::new(0.0, 0.0), Amplitude::new(0.7, 0.0), Amplitude::new(-0.4, 0.3)];
    let gammas = [Amplitude::new(0.2, 0.0), Amplitude::new(-0.9, 0.1), Amplitude::new(1.1, -0.5)];
    let vacuum = tmsv_expectation(&TmsvParams::new(0.0).unwrap(), &betas, &gammas).unwrap();
    assert!(vacuum <= classical_bound::<f64>(3) + 1e-12);
}

#[test]
fn fits_recover_synthetic_curves() {
    let (a, b, c) = (0.8, 0.6, -1.5);
    let data: Vec<(f64, f64)> = (2..=12).map(|n| (n as f64, a + c * (-b * n as f64).exp())).collect();
    let fit = fit_saturation(&data, SaturationModel::ThreeParam).unwrap();
    assert!((fit.parameter("a").unwrap() - a).abs() < 1e-8);
    assert!((fit.parameter("b").unwrap() - b).abs() < 1e-8);
    assert!((fit.parameter("c").unwrap() - c).abs() < 1e-8);

    let d2 = 2.0 * 2f64.sqrt() - 2.0;
    let (ap, bp) = (-2.0, 0.75);
    let anchored: Vec<(f64, f64)> = (2..=12)
        .map(|n| {
            let x = n as f64;
            (x, d2 + ap * ((-bp * x).exp() - (-bp * 2.0).exp()))
        })
        .collect();
    let fit = fit_saturation(&anchored, SaturationModel::Anchored).unwrap();
    assert!((fit.parameter("b").unwrap() - bp).abs() < 1e-8);
    let saturation = d2 - ap * (-bp * 2.0).exp();
    assert!((fit.parameter("c").unwrap() - saturation).abs() < 1e-8);
}
