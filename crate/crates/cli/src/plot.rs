//! `plot --spec <file>`: SVG figures from stored records.
//!
//! The spec is a JSON object, e.g.
//! `{"kind": "curve", "inputs": ["results/general/2-12_0.json"], "output": "curve.svg"}`.
//! Relative paths are resolved against the spec file's directory.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use bellmzi_core::optimize::StateParams;
use bellmzi_core::store::{self, write_atomic, CampaignKind, CampaignRecord, StoredEigenpair};

use crate::svg::{bar_chart, heatmap, line_chart, Series};
use crate::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlotKind {
    /// Real parts of both parties' settings of one run.
    Displacements,
    /// Violation against chain length, one series per record (plus its fit).
    Curve,
    /// Moduli of the coherent-basis coefficients of one eigenvector.
    EigvecHeatmap,
    SchmidtBars,
    /// Violation against squeezing, one series per chain length.
    ViolationVsR,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlotSpec {
    pub kind: PlotKind,
    pub inputs: Vec<PathBuf>,
    pub output: PathBuf,
    #[serde(default)]
    pub title: Option<String>,
    #[serde(default)]
    pub x_label: Option<String>,
    #[serde(default)]
    pub y_label: Option<String>,
    /// Chain length for kinds that show a single optimum.
    #[serde(default)]
    pub n: Option<usize>,
}

fn usage(msg: String) -> CliError {
    CliError::Usage(msg)
}

fn single<'a>(records: &'a [CampaignRecord], kind: PlotKind) -> CliResult<&'a CampaignRecord> {
    match records {
        [one] => Ok(one),
        _ => Err(usage(format!("{kind:?} plots take exactly one input, got {}", records.len()))),
    }
}

fn pick_n(available: &[usize], n: Option<usize>) -> CliResult<usize> {
    match (n, available) {
        (Some(n), _) if available.contains(&n) => Ok(n),
        (Some(n), _) => Err(usage(format!("no data for n = {n} (have {available:?})"))),
        (None, [only]) => Ok(*only),
        (None, _) => Err(usage(format!("several chain lengths {available:?}; set \"n\""))),
    }
}

fn eigen_for(record: &CampaignRecord, n: Option<usize>) -> CliResult<&StoredEigenpair> {
    let ns: Vec<usize> = record.eigen.iter().map(|e| e.n).collect();
    if ns.is_empty() {
        return Err(usage(format!("{} records carry no eigenvectors", record.kind.name())));
    }
    let n = pick_n(&ns, n)?;
    Ok(record.eigen.iter().find(|e| e.n == n).expect("picked from the list"))
}

fn label(spec: &Option<String>, default: &str) -> String {
    spec.clone().unwrap_or_else(|| default.to_string())
}

/// SVG text for `spec` with its inputs already loaded.
pub fn render(spec: &PlotSpec, records: &[CampaignRecord]) -> CliResult<String> {
    if records.is_empty() {
        return Err(usage("plot spec lists no inputs".into()));
    }
    match spec.kind {
        PlotKind::Displacements => {
            let record = single(records, spec.kind)?;
            let ns: Vec<usize> = record.runs.iter().map(|r| r.n).collect();
            let n = pick_n(&ns, spec.n)?;
            let run = record.runs.iter().find(|r| r.n == n).expect("picked from the list");
            let series = |label: &str, values: &[[f64; 2]]| Series {
                label: label.into(),
                points: values.iter().enumerate().map(|(i, p)| ((i + 1) as f64, p[0])).collect(),
                line: false,
            };
            Ok(line_chart(
                &label(&spec.title, &format!("{} optimum, n = {n}", run.family.name())),
                &label(&spec.x_label, "setting i"),
                &label(&spec.y_label, "displacement (real part)"),
                &[series("beta_i", &run.betas), series("gamma_i", &run.gammas)],
                true,
            ))
        }
        PlotKind::Curve => {
            let mut series = Vec::new();
            for record in records {
                if record.kind == CampaignKind::TmsvRScan || record.runs.is_empty() {
                    return Err(usage(format!("{} records hold no violation curve", record.kind.name())));
                }
                let family = record.runs[0].family.name();
                series.push(Series {
                    label: format!("{family} (seed {})", record.config.seed),
                    points: record.runs.iter().map(|r| (r.n as f64, r.violation)).collect(),
                    line: true,
                });
                if let Some(fit) = &record.fit {
                    let [lo, hi] = record.n_range;
                    let steps = (hi - lo) * 10;
                    series.push(Series {
                        label: format!("{family} fit"),
                        points: (0..=steps)
                            .map(|k| {
                                let x = lo as f64 + k as f64 / 10.0;
                                (x, fit.predict(x))
                            })
                            .collect(),
                        line: true,
                    });
                }
            }
            Ok(line_chart(
                &label(&spec.title, "maximal violation"),
                &label(&spec.x_label, "n"),
                &label(&spec.y_label, "violation"),
                &series,
                true,
            ))
        }
        PlotKind::EigvecHeatmap => {
            let e = eigen_for(single(records, spec.kind)?, spec.n)?;
            let values = e.vector_coherent.as_ref().unwrap_or(&e.vector_orthonormal);
            let rows: Vec<Vec<f64>> = values
                .chunks(e.n)
                .map(|row| row.iter().map(|[re, im]| re.hypot(*im)).collect())
                .collect();
            Ok(heatmap(
                &label(&spec.title, &format!("|coefficients|, n = {}", e.n)),
                &label(&spec.x_label, "gamma_j"),
                &label(&spec.y_label, "beta_i"),
                &rows,
            ))
        }
        PlotKind::SchmidtBars => {
            let e = eigen_for(single(records, spec.kind)?, spec.n)?;
            Ok(bar_chart(
                &label(&spec.title, &format!("Schmidt coefficients, n = {}", e.n)),
                &label(&spec.x_label, "k"),
                &label(&spec.y_label, "coefficient"),
                &e.schmidt,
            ))
        }
        PlotKind::ViolationVsR => {
            let record = single(records, spec.kind)?;
            if record.kind != CampaignKind::TmsvRScan {
                return Err(usage(format!("{} is not an r-scan record", record.kind.name())));
            }
            let mut ns: Vec<usize> = record.runs.iter().map(|r| r.n).collect();
            ns.dedup();
            let series: Vec<Series> = ns
                .iter()
                .map(|&n| {
                    let mut points: Vec<(f64, f64)> = record
                        .runs
                        .iter()
                        .filter(|r| r.n == n)
                        .filter_map(|r| match r.state {
                            StateParams::Tmsv { r: sq } => Some((sq, r.violation)),
                            _ => None,
                        })
                        .collect();
                    points.sort_by(|a, b| a.0.total_cmp(&b.0));
                    Series {
                        label: format!("n = {n}"),
                        points,
                        line: true,
                    }
                })
                .collect();
            Ok(line_chart(
                &label(&spec.title, "violation against squeezing"),
                &label(&spec.x_label, "r"),
                &label(&spec.y_label, "violation"),
                &series,
                false,
            ))
        }
    }
}

fn resolve(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

pub fn run(spec_path: &Path) -> CliResult<()> {
    let text = std::fs::read_to_string(spec_path).map_err(|e| usage(format!("{}: {e}", spec_path.display())))?;
    let spec: PlotSpec =
        serde_json::from_str(&text).map_err(|e| usage(format!("bad plot spec {}: {e}", spec_path.display())))?;
    let base = spec_path.parent().unwrap_or(Path::new(""));
    let mut records = Vec::new();
    for input in &spec.inputs {
        let path = resolve(base, input);
        if !path.exists() {
            return Err(usage(format!("input {} does not exist", path.display())));
        }
        records.push(store::load(&path)?);
    }
    let svg = render(&spec, &records)?;
    let output = resolve(base, &spec.output);
    write_atomic(&output, svg.as_bytes())?;
    println!("{}", output.display());
    println!("{}", serde_json::json!({"command": "plot", "path": output.display().to_string()}));
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use bellmzi_core::optimize::{optimize_tmsv, OptimizerConfig};

    fn scan() -> CampaignRecord {
        let config = OptimizerConfig {
            restarts: 2,
            ..OptimizerConfig::default()
        };
        let mut r = CampaignRecord::new(CampaignKind::TmsvRScan, [2, 2], config.clone());
        for sq in [0.0, 0.5, 1.0] {
            r.runs.push(optimize_tmsv(2, &config, Some(sq)).unwrap());
        }
        r
    }

    fn spec(kind: PlotKind) -> PlotSpec {
        PlotSpec {
            kind,
            inputs: vec!["x.json".into()],
            output: "x.svg".into(),
            title: None,
            x_label: None,
            y_label: None,
            n: None,
        }
    }

    #[test]
    fn kinds_must_match_records() {
        let r = scan();
        let svg = render(&spec(PlotKind::ViolationVsR), std::slice::from_ref(&r)).unwrap();
        assert_eq!(svg.matches("<circle").count(), 3);
        assert!(matches!(render(&spec(PlotKind::Curve), &[r.clone()]), Err(CliError::Usage(_))));
        assert!(matches!(render(&spec(PlotKind::SchmidtBars), &[r]), Err(CliError::Usage(_))));
    }

    #[test]
    fn spec_parses_with_defaults() {
        let s: PlotSpec =
            serde_json::from_str(r#"{"kind": "violation_vs_r", "inputs": ["a.json"], "output": "b.svg"}"#).unwrap();
        assert_eq!(s.kind, PlotKind::ViolationVsR);
        assert!(s.n.is_none());
        assert!(serde_json::from_str::<PlotSpec>(r#"{"kind": "pie", "inputs": [], "output": "b"}"#).is_err());
    }
}
