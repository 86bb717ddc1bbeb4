//! CSV series behind the divergence plots.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::divergence::{kl_ph, kl_po_null, Direction};
use crate::error::{Error, Result};
use crate::subset_eval::{pairwise_matrix, EvaluationTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlotKind {
    /// PO and PH divergences from the null against `β′z`.
    PoPhCurves,
    /// Divergences from the null in rank order.
    RankedBars,
    /// Histogram of pairwise divergences.
    PairwiseHist,
}

impl FromStr for PlotKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "po_ph_curves" => Ok(Self::PoPhCurves),
            "ranked_bars" => Ok(Self::RankedBars),
            "pairwise_hist" => Ok(Self::PairwiseHist),
            other => Err(Error::InvalidKind(other.into())),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlotParams {
    /// `(lo, hi, points)` for the curves.
    pub grid: (f64, f64, usize),
    pub table: Option<EvaluationTable>,
    pub bins: usize,
}

impl Default for PlotParams {
    fn default() -> Self {
        Self {
            grid: (-4.0, 4.0, 81),
            table: None,
            bins: 20,
        }
    }
}

fn need_table(p: &PlotParams) -> Result<&EvaluationTable> {
    p.table
        .as_ref()
        .ok_or_else(|| Error::InvalidParam("this plot needs an evaluation table".into()))
}

pub fn emit_plot_data(kind: PlotKind, params: &PlotParams) -> Result<String> {
    let mut out = String::new();
    match kind {
        PlotKind::PoPhCurves => {
            let (lo, hi, n) = params.grid;
            if n < 2 || !(lo < hi) {
                return Err(Error::InvalidParam(format!(
                    "grid needs lo < hi and at least 2 points, got ({lo}, {hi}, {n})"
                )));
            }
            out.push_str("x,k_po,k_ph_forward,k_ph_reverse\n");
            for i in 0..n {
                let x = lo + (hi - lo) * i as f64 / (n - 1) as f64;
                writeln!(
                    out,
                    "{x},{},{},{}",
                    kl_po_null(x),
                    kl_ph(x, Direction::Forward),
                    kl_ph(x, Direction::Reverse)
                )
                .expect("writing to a String");
            }
        }
        PlotKind::RankedBars => {
            let t = need_table(params)?;
            let mut models: Vec<_> = t.models.iter().collect();
            models.sort_by_key(|m| m.rank);
            out.push_str("rank,model,size,k,k_r0\n");
            for m in models {
                writeln!(
                    out,
                    "{},{},{},{},{}",
                    m.rank,
                    m.j,
                    m.subset.len(),
                    m.k_null,
                    t.k_r0
                )
                .expect("writing to a String");
            }
        }
        PlotKind::PairwiseHist => {
            let t = need_table(params)?;
            if params.bins == 0 {
                return Err(Error::InvalidParam(
                    "histogram needs at least one bin".into(),
                ));
            }
            let values = pairwise_matrix(t).distinct;
            let top = values
                .iter()
                .copied()
                .fold(0.0, f64::max)
                .max(f64::MIN_POSITIVE);
            let width = top / params.bins as f64;
            let mut counts = vec![0usize; params.bins];
            for v in &values {
                let b = ((v / width) as usize).min(params.bins - 1);
                counts[b] += 1;
            }
            out.push_str("bin_lo,bin_hi,count,h_w,b_wj\n");
            for (i, c) in counts.iter().enumerate() {
                writeln!(
                    out,
                    "{},{},{c},{},{}",
                    i as f64 * width,
                    (i + 1) as f64 * width,
                    t.h_w,
                    t.b_wj
                )
                .expect("writing to a String");
            }
        }
    }
    Ok(out)
}
