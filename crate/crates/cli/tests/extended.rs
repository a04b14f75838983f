//! Long campaigns beyond n = 12. Run with `--ignored`; they take hours at full
//! restart counts.

use bellmzi_cli::campaign::run_campaign;
use bellmzi_core::optimize::{Family, OptimizerConfig};
use bellmzi_core::quantum_bound;
use bellmzi_core::regression::{fit_saturation, SaturationModel};

fn config() -> OptimizerConfig {
    OptimizerConfig {
        restarts: 300,
        ..OptimizerConfig::default()
    }
}

#[test]
#[ignore = "hours of optimization"]
fn general_curve_to_nineteen() {
    let record = run_campaign(Family::General, [2, 19], &config());
    assert!(record.failures.is_empty(), "{:?}", record.failures);
    let values: Vec<f64> = record.runs.iter().map(|r| r.violation).collect();
    for (run, w) in record.runs.iter().zip(values.windows(2)) {
        assert!(w[1] >= w[0] - 1e-9, "drop after n = {}", run.n);
    }
    for run in &record.runs {
        assert!(run.best_value <= quantum_bound::<f64>(run.n) + 1e-8);
    }
    let data: Vec<(f64, f64)> = record.runs.iter().map(|r| (r.n as f64, r.violation)).collect();
    let fit = fit_saturation(&data, SaturationModel::Anchored).unwrap();
    let c = fit.parameter("c").unwrap();
    println!("anchored fit on n = 2..19: c = {c:.4}, b = {:.4}", fit.parameter("b").unwrap());
    assert!((c - values.last().unwrap()).abs() < 0.05);
}

#[test]
#[ignore = "long optimization"]
fn ecs_violation_vanishes_to_nineteen() {
    let record = run_campaign(Family::Ecs, [13, 19], &config());
    for run in &record.runs {
        assert!(run.violation < 0.02, "n = {}: {}", run.n, run.violation);
    }
}

#[test]
#[ignore = "long optimization"]
fn tmsv_plateau_to_nineteen() {
    let record = run_campaign(Family::Tmsv, [13, 19], &config());
    let values: Vec<f64> = record.runs.iter().map(|r| r.violation).collect();
    let spread = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        - values.iter().cloned().fold(f64::INFINITY, f64::min);
    assert!(spread < 0.01, "{values:?}");
}
