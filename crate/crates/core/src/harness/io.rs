//! Config files and result files.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::families::{FamilyId, DEFAULT_DELTA};
use crate::harness::classify::RegionVerdict;
use crate::harness::sweep::{GridPolicy, SweepConfig, SweepResult};
use crate::harness::verify::Verdict;
use crate::model::{Exponent, ExponentPair, NodeBudget};
use crate::transform::TransformMethod;

pub const SWEEP_HEADER: [&str; 8] = [
    "family",
    "d",
    "p",
    "q",
    "N",
    "norm_f_p",
    "norm_Ff_q",
    "ratio",
];
pub const CLASSIFY_HEADER: [&str; 4] = ["inv_p", "inv_q", "bounded_admissible", "defeated_by"];

/// JSON form of a [`SweepConfig`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub family: FamilyId,
    pub d: usize,
    pub p: Exponent,
    pub q: Exponent,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub method: Option<TransformMethod>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_budget: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_policy: Option<GridPolicy>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    /// Resolve defaults. `FSL_BUDGET_NODES`, when set, overrides `grid_budget`.
    pub fn into_config(self) -> Result<SweepConfig> {
        let mut cfg = SweepConfig::new(self.family, self.d, ExponentPair::new(self.p, self.q));
        if let Some(s) = self.sweep {
            cfg.sweep = s;
        }
        cfg.delta = self.delta.unwrap_or(DEFAULT_DELTA);
        if let Some(m) = self.method {
            cfg.method = m;
        }
        if let Some(p) = self.grid_policy {
            cfg.policy = p;
        }
        cfg.budget = resolve_budget(self.grid_budget)?;
        cfg.out = self.out;
        cfg.validate()?;
        Ok(cfg)
    }
}

/// The environment variable wins over an explicit value, which wins over the default.
pub fn resolve_budget(explicit: Option<u64>) -> Result<NodeBudget> {
    if std::env::var_os(NodeBudget::ENV_VAR).is_some() {
        return NodeBudget::from_env();
    }
    match explicit {
        Some(0) => Err(Error::InvalidParameter(
            "grid_budget must be positive".into(),
        )),
        Some(n) => Ok(NodeBudget(n)),
        None => Ok(NodeBudget::DEFAULT),
    }
}

/// `family_{F}_d{d}_p{p}_q{q}`.
pub fn result_stem(result: &SweepResult) -> String {
    format!(
        "family_{}_d{}_p{}_q{}",
        result.family, result.d, result.pq.p, result.pq.q
    )
}

pub fn write_sweep_csv<W: Write>(result: &SweepResult, w: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(SWEEP_HEADER)?;
    for r in &result.rows {
        wtr.write_record([
            result.family.to_string(),
            result.d.to_string(),
            result.pq.p.to_string(),
            result.pq.q.to_string(),
            r.n.to_string(),
            r.norm_f_p.to_string(),
            r.norm_ff_q.to_string(),
            r.ratio.to_string(),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sidecar {
    pub fitted_slope: f64,
    pub stderr: f64,
    pub predicted_slope: f64,
    pub verdict: Verdict,
}

impl Sidecar {
    pub fn new(result: &SweepResult, verdict: Verdict) -> Self {
        Sidecar {
            fitted_slope: result.fitted_slope,
            stderr: result.slope_stderr,
            predicted_slope: result.predicted_slope,
            verdict,
        }
    }
}

/// Writes `{stem}.csv` and `{stem}.json` into `dir`, creating it if needed.
pub fn write_sweep_files(
    result: &SweepResult,
    verdict: Verdict,
    dir: &Path,
) -> Result<(PathBuf, PathBuf)> {
    fs::create_dir_all(dir)?;
    let stem = result_stem(result);
    let csv_path = dir.join(format!("{stem}.csv"));
    let json_path = dir.join(format!("{stem}.json"));
    write_sweep_csv(result, fs::File::create(&csv_path)?)?;
    let mut f = fs::File::create(&json_path)?;
    serde_json::to_writer_pretty(&mut f, &Sidecar::new(result, verdict))?;
    writeln!(f)?;
    Ok((csv_path, json_path))
}

pub fn write_classification_csv<W: Write>(rows: &[RegionVerdict], w: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(CLASSIFY_HEADER)?;
    for v in rows {
        let defeated: Vec<String> = v.defeated_by.iter().map(|f| f.to_string()).collect();
        wtr.write_record([
            v.pq.inv_p().to_string(),
            v.pq.inv_q().to_string(),
            v.bounded_admissible.to_string(),
            defeated.join(";"),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}
