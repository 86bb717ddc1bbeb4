//! Loading right-censored survival data from CSV.

use std::collections::HashMap;
use std::io::Read;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fitting::SurvivalDataset;

/// How status codes map to events, censoring and exclusion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatusCodes {
    pub event: i64,
    pub censor: i64,
    /// Rows with this status are dropped before anything else.
    pub exclude: Option<i64>,
}

/// One covariate: the source column, its label in outputs, and whether it
/// is log-transformed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CovariateColumn {
    pub column: String,
    pub label: String,
    pub log: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PointRule {
    Median,
    Explicit(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IngestConfig {
    pub path: PathBuf,
    pub time_column: String,
    pub status_column: String,
    pub status: StatusCodes,
    pub covariates: Vec<CovariateColumn>,
    /// Cell contents read as missing.
    pub missing_tokens: Vec<String>,
    pub point_rule: PointRule,
}

impl IngestConfig {
    /// The public PBC schema: status 0 censored, 1 transplant (dropped),
    /// 2 dead; covariates age, edema and logs of albumin, bilirubin and
    /// prothrombin time.
    pub fn pbc(path: impl Into<PathBuf>) -> Self {
        let cov = |column: &str, label: &str, log: bool| CovariateColumn {
            column: column.into(),
            label: label.into(),
            log,
        };
        Self {
            path: path.into(),
            time_column: "time".into(),
            status_column: "status".into(),
            status: StatusCodes {
                event: 2,
                censor: 0,
                exclude: Some(1),
            },
            covariates: vec![
                cov("age", "age", false),
                cov("edema", "edema", false),
                cov("albumin", "log_albumin", true),
                cov("bili", "log_bili", true),
                cov("protime", "log_protime", true),
            ],
            missing_tokens: vec!["NA".into(), String::new()],
            point_rule: PointRule::Median,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IngestSummary {
    pub rows_read: usize,
    /// Rows left after removing the excluded status.
    pub rows_retained: usize,
    /// Retained rows with no missing covariate, which form the dataset.
    pub rows_complete: usize,
    pub labels: Vec<String>,
    /// Per-covariate medians over retained rows, after transforms, skipping
    /// missing cells.
    pub medians: Vec<Option<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ingested {
    pub dataset: SurvivalDataset,
    pub summary: IngestSummary,
}

impl Ingested {
    /// The prediction point chosen by the config's rule.
    pub fn prediction_point(&self, rule: &PointRule) -> Result<Vec<f64>> {
        match rule {
            PointRule::Explicit(v) => {
                if v.len() != self.summary.labels.len() {
                    return Err(Error::DimensionMismatch {
                        expected: self.summary.labels.len(),
                        got: v.len(),
                    });
                }
                Ok(v.clone())
            }
            PointRule::Median => self
                .summary
                .medians
                .iter()
                .zip(&self.summary.labels)
                .map(|(m, l)| {
                    m.ok_or_else(|| Error::EmptyInput(format!("no observed values for '{l}'")))
                })
                .collect(),
        }
    }
}

pub fn median(values: &mut [f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(f64::total_cmp);
    let n = values.len();
    Some(if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    })
}

pub fn load_survival_csv(config: &IngestConfig) -> Result<Ingested> {
    let file = std::fs::File::open(&config.path)?;
    read_survival_csv(file, config)
}

/// Parses survival CSV from any reader. Row numbers in errors are 1-based
/// data rows (the header is row 0).
pub fn read_survival_csv<R: Read>(reader: R, config: &IngestConfig) -> Result<Ingested> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    if headers.is_empty() {
        return Err(Error::Parse {
            row: 0,
            column: String::new(),
            message: "missing header row".into(),
        });
    }
    let index: HashMap<&str, usize> = headers.iter().enumerate().map(|(i, h)| (h, i)).collect();
    let col = |name: &str| {
        index
            .get(name)
            .copied()
            .ok_or_else(|| Error::MissingColumn(name.to_string()))
    };
    let time_ix = col(&config.time_column)?;
    let status_ix = col(&config.status_column)?;
    let cov_ix: Vec<usize> = config
        .covariates
        .iter()
        .map(|c| col(&c.column))
        .collect::<Result<_>>()?;

    let is_missing = |s: &str| config.missing_tokens.iter().any(|t| t == s.trim());
    let parse = |row: usize, column: &str, s: &str| -> Result<f64> {
        s.trim().parse::<f64>().map_err(|e| Error::Parse {
            row,
            column: column.to_string(),
            message: format!("'{s}': {e}"),
        })
    };

    let mut rows_read = 0;
    let mut retained: Vec<(f64, bool, Vec<Option<f64>>)> = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let row = i + 1;
        let record = record?;
        rows_read += 1;
        let cell = |ix: usize| record.get(ix).unwrap_or("");
        let status_raw = parse(row, &config.status_column, cell(status_ix))?;
        if status_raw.fract() != 0.0 {
            return Err(Error::Parse {
                row,
                column: config.status_column.clone(),
                message: format!("status '{status_raw}' is not an integer code"),
            });
        }
        let status = status_raw as i64;
        if Some(status) == config.status.exclude {
            continue;
        }
        let event = if status == config.status.event {
            true
        } else if status == config.status.censor {
            false
        } else {
            return Err(Error::Parse {
                row,
                column: config.status_column.clone(),
                message: format!("unknown status code {status}"),
            });
        };
        let time = parse(row, &config.time_column, cell(time_ix))?;
        if !(time > 0.0 && time.is_finite()) {
            return Err(Error::Parse {
                row,
                column: config.time_column.clone(),
                message: format!("time must be positive, got {time}"),
            });
        }
        let mut covs = Vec::with_capacity(cov_ix.len());
        for (c, &ix) in config.covariates.iter().zip(&cov_ix) {
            let raw = cell(ix);
            if is_missing(raw) {
                covs.push(None);
                continue;
            }
            let v = parse(row, &c.column, raw)?;
            covs.push(Some(if c.log {
                if !(v > 0.0) {
                    return Err(Error::NonPositiveForLog {
                        column: c.column.clone(),
                        row,
                        value: v,
                    });
                }
                v.ln()
            } else {
                v
            }));
        }
        retained.push((time, event, covs));
    }
    if rows_read == 0 {
        return Err(Error::Parse {
            row: 0,
            column: String::new(),
            message: "no data rows".into(),
        });
    }

    let medians = (0..config.covariates.len())
        .map(|j| {
            let mut v: Vec<f64> = retained.iter().filter_map(|r| r.2[j]).collect();
            median(&mut v)
        })
        .collect();
    let rows_retained = retained.len();
    let (mut times, mut events, mut covariates) = (Vec::new(), Vec::new(), Vec::new());
    for (t, e, c) in retained {
        if let Some(c) = c.into_iter().collect::<Option<Vec<f64>>>() {
            times.push(t);
            events.push(e);
            covariates.push(c);
        }
    }
    let labels: Vec<String> = config.covariates.iter().map(|c| c.label.clone()).collect();
    let rows_complete = times.len();
    Ok(Ingested {
        dataset: SurvivalDataset::new(times, events, covariates, labels.clone())?,
        summary: IngestSummary {
            rows_read,
            rows_retained,
            rows_complete,
            labels,
            medians,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config() -> IngestConfig {
        IngestConfig::pbc("unused.csv")
    }

    const SMALL: &str = "\
\"\",id,time,status,age,edema,bili,albumin,protime
1,1,400,2,58.7,1,14.5,2.6,12.2
2,2,4500,0,56.4,0,1.1,4.14,10.6
3,3,1012,1,70.1,0.5,1.4,3.48,12
4,4,1925,2,54.7,0.5,1.8,2.54,NA
";

    #[test]
    fn reads_and_filters() {
        let got = read_survival_csv(SMALL.as_bytes(), &config()).unwrap();
        assert_eq!(got.summary.rows_read, 4);
        assert_eq!(got.summary.rows_retained, 3);
        assert_eq!(got.summary.rows_complete, 2);
        assert_eq!(got.dataset.events, vec![true, false]);
        assert!((got.dataset.covariates[0][2] - 2.6f64.ln()).abs() < 1e-15);
        let m = got.summary.medians[0].unwrap();
        assert!((m - 56.4).abs() < 1e-12);
        // Median of protime skips the missing cell.
        assert!(
            (got.summary.medians[4].unwrap() - 0.5 * (12.2f64.ln() + 10.6f64.ln())).abs() < 1e-12
        );
    }

    #[test]
    fn error_cases() {
        assert!(matches!(
            read_survival_csv("".as_bytes(), &config()),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            read_survival_csv("time,status\n".as_bytes(), &config()),
            Err(Error::MissingColumn(c)) if c == "age"
        ));
        let bad = SMALL.replace("58.7", "5x8");
        assert!(matches!(
            read_survival_csv(bad.as_bytes(), &config()),
            Err(Error::Parse { row: 1, ref column, .. }) if column == "age"
        ));
        let neg = SMALL.replace("14.5", "-1");
        assert!(matches!(
            read_survival_csv(neg.as_bytes(), &config()),
            Err(Error::NonPositiveForLog { row: 1, .. })
        ));
        let status = SMALL.replace("400,2", "400,7");
        assert!(read_survival_csv(status.as_bytes(), &config()).is_err());
    }

    #[test]
    fn shuffling_rows_changes_nothing_reported() {
        let mut lines: Vec<&str> = SMALL.lines().collect();
        let header = lines.remove(0);
        lines.reverse();
        let shuffled = format!("{header}\n{}\n", lines.join("\n"));
        let a = read_survival_csv(SMALL.as_bytes(), &config()).unwrap();
        let b = read_survival_csv(shuffled.as_bytes(), &config()).unwrap();
        assert_eq!(a.summary, b.summary);
    }

    #[test]
    fn median_helper() {
        assert_eq!(median(&mut []), None);
        assert_eq!(median(&mut [3.0, 1.0, 2.0]), Some(2.0));
        assert_eq!(median(&mut [4.0, 1.0, 2.0, 3.0]), Some(2.5));
    }
}
