//! Precomputed linear predictors for every feature subset at two prediction
//! points that differ only in one binary feature.
//!
//! A blank cell at the second point means the subset does not use the
//! binary feature, so its predictor is the same at both points.

use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::subset_eval::PredictorEntry;

/// The shipped PBC fixture.
pub const BUILTIN_FIXTURE: &str = include_str!("../../data/pbc_subsets.csv");

/// Label of the binary feature in the shipped fixture.
pub const BUILTIN_BINARY_FEATURE: &str = "z2";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixtureRow {
    pub j: usize,
    pub subset: Vec<String>,
    pub x_absent: f64,
    pub x_present: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FixturePoint {
    Absent,
    Present,
}

impl FixturePoint {
    pub fn label(&self) -> &'static str {
        match self {
            FixturePoint::Absent => "absent",
            FixturePoint::Present => "present",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fixture {
    pub rows: Vec<FixtureRow>,
    pub binary_feature: String,
}

#[derive(Debug, Deserialize)]
struct RawRow {
    j: String,
    subset: String,
    x_absent: String,
    x_present: String,
}

impl Fixture {
    pub fn builtin() -> Result<Self> {
        Self::read(BUILTIN_FIXTURE.as_bytes(), BUILTIN_BINARY_FEATURE)
    }

    pub fn load(path: &Path, binary_feature: &str) -> Result<Self> {
        Self::read(std::fs::File::open(path)?, binary_feature)
    }

    /// Reads `j,subset,x_absent,x_present` rows; subsets are
    /// whitespace-separated labels.
    pub fn read<R: Read>(reader: R, binary_feature: &str) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(reader);
        let headers = rdr.headers()?.clone();
        for name in ["j", "subset", "x_absent", "x_present"] {
            if !headers.iter().any(|h| h == name) {
                return Err(Error::MissingColumn(name.into()));
            }
        }
        let mut rows = Vec::new();
        for (i, rec) in rdr.deserialize::<RawRow>().enumerate() {
            let row = i + 1;
            let raw = rec?;
            let num = |column: &str, s: &str| {
                s.trim().parse::<f64>().map_err(|e| Error::Parse {
                    row,
                    column: column.into(),
                    message: format!("'{s}': {e}"),
                })
            };
            let j = raw.j.trim().parse::<usize>().map_err(|e| Error::Parse {
                row,
                column: "j".into(),
                message: format!("'{}': {e}", raw.j),
            })?;
            let subset: Vec<String> = raw.subset.split_whitespace().map(String::from).collect();
            if subset.is_empty() {
                return Err(Error::Parse {
                    row,
                    column: "subset".into(),
                    message: "empty subset".into(),
                });
            }
            let x_present = if raw.x_present.trim().is_empty() {
                if subset.iter().any(|s| s == binary_feature) {
                    return Err(Error::Parse {
                        row,
                        column: "x_present".into(),
                        message: format!(
                            "blank cell for a subset containing '{binary_feature}' cannot be inherited"
                        ),
                    });
                }
                None
            } else {
                Some(num("x_present", &raw.x_present)?)
            };
            rows.push(FixtureRow {
                j,
                subset,
                x_absent: num("x_absent", &raw.x_absent)?,
                x_present,
            });
        }
        if rows.is_empty() {
            return Err(Error::EmptyInput("fixture has no rows".into()));
        }
        Ok(Self {
            rows,
            binary_feature: binary_feature.into(),
        })
    }

    /// Predictors at one point; blank present-point cells take the
    /// absent-point value.
    pub fn entries(&self, point: FixturePoint) -> Vec<PredictorEntry> {
        self.rows
            .iter()
            .map(|r| PredictorEntry {
                subset: r.subset.clone(),
                x: match point {
                    FixturePoint::Absent => r.x_absent,
                    FixturePoint::Present => r.x_present.unwrap_or(r.x_absent),
                },
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_fixture_shape() {
        let f = Fixture::builtin().unwrap();
        assert_eq!(f.rows.len(), 31);
        assert_eq!(f.rows[8].subset, vec!["z1", "z5"]);
        assert_eq!(f.rows[8].x_absent, 23.896);
        let absent = f.entries(FixturePoint::Absent);
        let present = f.entries(FixturePoint::Present);
        for (r, (a, p)) in f.rows.iter().zip(absent.iter().zip(&present)) {
            if !r.subset.iter().any(|s| s == "z2") {
                assert_eq!(a.x, p.x);
            } else {
                assert_ne!(a.x, p.x, "row {}", r.j);
            }
        }
        assert_eq!(present[15].x, -2.903);
    }

    #[test]
    fn rejects_bad_fixtures() {
        let blank_binary = "j,subset,x_absent,x_present\n1,z1 z2,1.0,\n";
        assert!(matches!(
            Fixture::read(blank_binary.as_bytes(), "z2"),
            Err(Error::Parse { row: 1, .. })
        ));
        assert!(matches!(
            Fixture::read("j,subset,x_absent\n".as_bytes(), "z2"),
            Err(Error::MissingColumn(_))
        ));
        assert!(Fixture::read("j,subset,x_absent,x_present\n".as_bytes(), "z2").is_err());
        let bad = "j,subset,x_absent,x_present\n1,z1,abc,\n";
        assert!(matches!(
            Fixture::read(bad.as_bytes(), "z2"),
            Err(Error::Parse { ref column, .. }) if column == "x_absent"
        ));
    }
}
