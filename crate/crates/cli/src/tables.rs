//! CSV tables derived from campaign records.
//!
//! Columns per table:
//! - `curve`: `n,violation,quantum_gap,classical_bound` where `quantum_gap` is
//!   `2n cos(pi/2n)` minus the best expectation found.
//! - `displacements`: `n,party,index,re,im` (party `x` holds the betas).
//! - `states`: `n,alpha,a,r` (empty cells where a family has no such parameter).
//! - `r_scan`: `n,r,violation`.
//! - `eigvec`: `n,basis,row,col,re,im,abs`, row = Lab X setting.
//! - `schmidt`: `n,k,coefficient`.
//! - `fit`: `name,value,std_error` (empty error for free parameters).
//! - `fit_curve`: `n,violation,fitted`.

use std::path::Path;

use bellmzi_core::optimize::StateParams;
use bellmzi_core::store::{write_atomic, CampaignKind, CampaignRecord};
use bellmzi_core::{classical_bound, quantum_bound};

use crate::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: &'static str,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(name: &'static str, header: &[&'static str]) -> Self {
        Self {
            name,
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> CliResult<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Csv(e.into_error().into()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn write(&self, path: &Path) -> CliResult<()> {
        Ok(write_atomic(path, self.to_csv()?.as_bytes())?)
    }
}

/// Shortest representation that reads back to the same `f64`.
fn num(v: f64) -> String {
    format!("{v}")
}

fn curve(record: &CampaignRecord) -> Table {
    let mut t = Table::new("curve", &["n", "violation", "quantum_gap", "classical_bound"]);
    for run in &record.runs {
        t.push(vec![
            run.n.to_string(),
            num(run.violation),
            num(quantum_bound::<f64>(run.n) - run.best_value),
            num(classical_bound(run.n)),
        ]);
    }
    t
}

fn displacements(record: &CampaignRecord) -> Table {
    let mut t = Table::new("displacements", &["n", "party", "index", "re", "im"]);
    for run in &record.runs {
        for (party, values) in [("x", &run.betas), ("y", &run.gammas)] {
            for (i, [re, im]) in values.iter().enumerate() {
                t.push(vec![run.n.to_string(), party.into(), (i + 1).to_string(), num(*re), num(*im)]);
            }
        }
    }
    t
}

fn states(record: &CampaignRecord) -> Table {
    let mut t = Table::new("states", &["n", "alpha", "a", "r"]);
    for run in &record.runs {
        let row = match run.state {
            StateParams::Optimal => continue,
            StateParams::Ecs { alpha, a } => vec![num(alpha), num(a), String::new()],
            StateParams::Tmsv { r } => vec![String::new(), String::new(), num(r)],
        };
        let mut full = vec![run.n.to_string()];
        full.extend(row);
        t.push(full);
    }
    t
}

fn r_scan(record: &CampaignRecord) -> Table {
    let mut t = Table::new("r_scan", &["n", "r", "violation"]);
    for run in &record.runs {
        if let StateParams::Tmsv { r } = run.state {
            t.push(vec![run.n.to_string(), num(r), num(run.violation)]);
        }
    }
    t
}

fn eigvec(record: &CampaignRecord) -> Table {
    let mut t = Table::new("eigvec", &["n", "basis", "row", "col", "re", "im", "abs"]);
    for e in &record.eigen {
        let (basis, values) = match &e.vector_coherent {
            Some(v) => ("coherent", v),
            None => ("orthonormal", &e.vector_orthonormal),
        };
        for (k, [re, im]) in values.iter().enumerate() {
            t.push(vec![
                e.n.to_string(),
                basis.into(),
                (k / e.n + 1).to_string(),
                (k % e.n + 1).to_string(),
                num(*re),
                num(*im),
                num(re.hypot(*im)),
            ]);
        }
    }
    t
}

fn schmidt(record: &CampaignRecord) -> Table {
    let mut t = Table::new("schmidt", &["n", "k", "coefficient"]);
    for e in &record.eigen {
        for (k, s) in e.schmidt.iter().enumerate() {
            t.push(vec![e.n.to_string(), (k + 1).to_string(), num(*s)]);
        }
    }
    t
}

fn fit(record: &CampaignRecord) -> Vec<Table> {
    let Some(result) = &record.fit else {
        return Vec::new();
    };
    let mut params = Table::new("fit", &["name", "value", "std_error"]);
    for (name, value) in &result.parameters {
        params.push(vec![name.clone(), num(*value), String::new()]);
    }
    for (name, value, se) in &result.derived {
        params.push(vec![name.clone(), num(*value), num(*se)]);
    }
    let mut fitted = Table::new("fit_curve", &["n", "violation", "fitted"]);
    for run in &record.runs {
        fitted.push(vec![run.n.to_string(), num(run.violation), num(result.predict(run.n as f64))]);
    }
    vec![params, fitted]
}

/// Every table the record supports, empty ones dropped.
pub fn tables(record: &CampaignRecord) -> Vec<Table> {
    let mut out = match record.kind {
        CampaignKind::General | CampaignKind::Ecs | CampaignKind::Tmsv => {
            vec![curve(record), displacements(record), states(record)]
        }
        CampaignKind::TmsvRScan => vec![r_scan(record)],
        CampaignKind::Eigvec => vec![displacements(record)],
        CampaignKind::Fit => vec![curve(record)],
    };
    out.extend([eigvec(record), schmidt(record)]);
    out.extend(fit(record));
    out.retain(|t| !t.rows.is_empty());
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use bellmzi_core::optimize::{optimize, Family, OptimizerConfig};

    fn record(family: Family, range: [usize; 2]) -> CampaignRecord {
        let config = OptimizerConfig {
            restarts: 3,
            seed: 1,
            ..OptimizerConfig::default()
        };
        let kind = crate::campaign::kind_of(family);
        let mut r = CampaignRecord::new(kind, range, config.clone());
        for n in range[0]..=range[1] {
            r.runs.push(optimize(family, n, &config).unwrap());
        }
        r
    }

    #[test]
    fn curve_has_one_row_per_n() {
        let r = record(Family::Tmsv, [2, 4]);
        let t = tables(&r);
        let curve = t.iter().find(|t| t.name == "curve").unwrap();
        assert_eq!(curve.rows.len(), 3);
        let csv = curve.to_csv().unwrap();
        assert!(csv.starts_with("n,violation,quantum_gap,classical_bound\n"));
        assert_eq!(csv.lines().count(), 4);
        assert!(t.iter().any(|t| t.name == "states"));
        assert!(!t.iter().any(|t| t.name == "eigvec"));
    }

    #[test]
    fn displacements_list_both_parties() {
        let r = record(Family::Tmsv, [3, 3]);
        let t = displacements(&r);
        assert_eq!(t.rows.len(), 6);
        assert_eq!(t.rows[0][1], "x");
        assert_eq!(t.rows[5][1], "y");
    }

    #[test]
    fn numbers_round_trip() {
        for v in [0.1, 1.0 / 3.0, -2.5e-17, 1e300] {
            assert_eq!(num(v).parse::<f64>().unwrap(), v);
        }
    }
}
