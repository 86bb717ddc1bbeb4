//! The end-to-end evaluation run and its JSON report.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::fixture::{Fixture, FixturePoint};
use super::ingest::{load_survival_csv, IngestConfig, IngestSummary, PointRule};
use crate::divergence::{
    renyi_unit_link, symmetry_report, Direction, SymmetryReport, DEFAULT_SYMMETRY_TOL,
};
use crate::error::{Error, Result};
use crate::fitting::{
    fit_po_mle, sample_po, CovariateSampler, FitConfig, FitResult, SurvivalDataset,
};
use crate::links::UnitLink;
use crate::numerics::quadrature::QuadratureSpec;
use crate::subset_eval::{
    entries_from_fits, enumerate_subsets, evaluate_table, js_and_bounds, reference_divergences,
    EvaluationTable, JsBounds, PredictorEntry, ReferenceDivergences,
};

/// Where the linear predictors come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum Source {
    /// Precomputed predictors; `None` uses the shipped file.
    Fixture {
        path: Option<PathBuf>,
        binary_feature: String,
    },
    /// Fit every subset on a CSV dataset.
    Csv {
        ingest: IngestConfig,
        /// Covariate toggled between 0 and 1 to make two prediction points.
        binary_index: Option<usize>,
    },
    /// Fit every subset on data drawn by the PO sampler.
    Synthetic {
        beta: Vec<f64>,
        baseline: (f64, f64),
        covariates: CovariateSampler,
        censor_rate: f64,
        n: usize,
        point: PointRule,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub source: Source,
    pub q_grid: Vec<f64>,
    pub seed: u64,
    pub fit: FitConfig,
    /// Also compute the Jensen-Shannon value by quadrature.
    pub compute_js: bool,
}

impl RunConfig {
    pub fn builtin_fixture() -> Self {
        Self {
            source: Source::Fixture {
                path: None,
                binary_feature: super::fixture::BUILTIN_BINARY_FEATURE.into(),
            },
            q_grid: vec![0.5, 1.0, 2.0, 3.0],
            seed: 0,
            fit: FitConfig::default(),
            compute_js: true,
        }
    }

    /// Hex SHA-256 of the config's JSON form.
    pub fn hash(&self) -> Result<String> {
        let json = serde_json::to_vec(self)?;
        Ok(hex::encode(Sha256::digest(&json)))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetadata {
    pub tool_version: String,
    pub config_hash: String,
    pub seed: u64,
    pub notes: Vec<String>,
}

/// `K_q` of the averaged model from the null over the order grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DivergenceCurve {
    pub label: String,
    pub x: f64,
    pub q_grid: Vec<f64>,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointReport {
    pub label: String,
    /// Covariate vector, when predictors were computed from fits.
    pub point: Option<Vec<f64>>,
    pub table: EvaluationTable,
    pub reference: ReferenceDivergences,
    pub js: Option<JsBounds>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub metadata: RunMetadata,
    pub config: RunConfig,
    pub ingest: Option<IngestSummary>,
    pub fits: Vec<FitResult>,
    pub points: Vec<PointReport>,
    pub curves: Vec<DivergenceCurve>,
    pub symmetry: Vec<SymmetryReport>,
}

impl Report {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn point(&self, label: &str) -> Option<&PointReport> {
        self.points.iter().find(|p| p.label == label)
    }
}

fn pair_note(n: usize) -> String {
    format!(
        "pair_count is N(N-1)/2 = {} for N = {n} models; every distinct pair is counted \
         (for N = 31 this is 465, so a count of 365 would be an arithmetic slip)",
        n * n.saturating_sub(1) / 2
    )
}

fn fit_all(data: &SurvivalDataset, config: &FitConfig) -> Result<Vec<FitResult>> {
    let subsets = enumerate_subsets(data.names.len())?;
    std::thread::scope(|s| {
        let handles: Vec<_> = subsets
            .iter()
            .map(|sub| s.spawn(move || fit_po_mle(data, sub, config)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("fit thread panicked"))
            .collect()
    })
}

/// Points toggling `binary` between 0 and 1, or the base point alone.
fn split_points(base: Vec<f64>, binary: Option<usize>) -> Result<Vec<(String, Vec<f64>)>> {
    match binary {
        None => Ok(vec![("point".into(), base)]),
        Some(b) if b < base.len() => {
            let mut absent = base.clone();
            absent[b] = 0.0;
            let mut present = base;
            present[b] = 1.0;
            Ok(vec![("absent".into(), absent), ("present".into(), present)])
        }
        Some(b) => Err(Error::InvalidParam(format!(
            "binary covariate index {b} out of range"
        ))),
    }
}

/// Builds the per-point tables, reference divergences, curves and symmetry
/// reports. Deterministic for a fixed config.
pub fn run_pipeline(config: &RunConfig) -> Result<Report> {
    let spec = QuadratureSpec::default();
    let mut ingest = None;
    let mut fits = Vec::new();
    let mut sets: Vec<(String, Option<Vec<f64>>, Vec<PredictorEntry>)> = Vec::new();
    match &config.source {
        Source::Fixture {
            path,
            binary_feature,
        } => {
            let fixture = match path {
                Some(p) => Fixture::load(p, binary_feature)?,
                None => Fixture::builtin()?,
            };
            for pt in [FixturePoint::Absent, FixturePoint::Present] {
                sets.push((pt.label().into(), None, fixture.entries(pt)));
            }
        }
        Source::Csv {
            ingest: cfg,
            binary_index,
        } => {
            let got = load_survival_csv(cfg)?;
            let base = got.prediction_point(&cfg.point_rule)?;
            fits = fit_all(&got.dataset, &config.fit)?;
            for (label, z) in split_points(base, *binary_index)? {
                let entries = entries_from_fits(&fits, &got.dataset.names, &z)?;
                sets.push((label, Some(z), entries));
            }
            ingest = Some(got.summary);
        }
        Source::Synthetic {
            beta,
            baseline,
            covariates,
            censor_rate,
            n,
            point,
        } => {
            let data = sample_po(beta, *baseline, *covariates, *censor_rate, *n, config.seed)?;
            let z = match point {
                PointRule::Explicit(v) => v.clone(),
                PointRule::Median => (0..data.names.len())
                    .map(|j| {
                        let mut col: Vec<f64> = data.covariates.iter().map(|r| r[j]).collect();
                        super::ingest::median(&mut col).unwrap_or(0.0)
                    })
                    .collect(),
            };
            fits = fit_all(&data, &config.fit)?;
            let entries = entries_from_fits(&fits, &data.names, &z)?;
            sets.push(("point".into(), Some(z), entries));
        }
    }

    let mut points = Vec::new();
    let mut curves = Vec::new();
    let mut symmetry = Vec::new();
    for (label, point, entries) in sets {
        let table = evaluate_table(&entries, &label)?;
        let reference = reference_divergences(&table, 0.0);
        let js = if config.compute_js {
            Some(js_and_bounds(&table, &spec)?)
        } else {
            None
        };
        let link = UnitLink::po(table.beta_r_lin.exp())?;
        let values = config
            .q_grid
            .iter()
            .map(|&q| renyi_unit_link(&link, q, Direction::Forward, &spec).map(|r| r.value))
            .collect::<Result<Vec<_>>>()?;
        curves.push(DivergenceCurve {
            label: label.clone(),
            x: table.beta_r_lin,
            q_grid: config.q_grid.clone(),
            values,
        });
        symmetry.push(symmetry_report(
            format!("{label}: po(x={})", table.beta_r_lin),
            &config.q_grid,
            DEFAULT_SYMMETRY_TOL,
            |q| {
                Ok((
                    renyi_unit_link(&link, q, Direction::Forward, &spec)?,
                    renyi_unit_link(&link, q, Direction::Reverse, &spec)?,
                ))
            },
        )?);
        points.push(PointReport {
            label,
            point,
            table,
            reference,
            js,
        });
    }
    let n_models = points.first().map_or(0, |p| p.table.models.len());
    Ok(Report {
        metadata: RunMetadata {
            tool_version: env!("CARGO_PKG_VERSION").into(),
            config_hash: config.hash()?,
            seed: config.seed,
            notes: vec![pair_note(n_models)],
        },
        config: config.clone(),
        ingest,
        fits,
        points,
        curves,
        symmetry,
    })
}
