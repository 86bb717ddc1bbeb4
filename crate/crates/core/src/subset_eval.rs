//! Ranking, weighting and averaging proportional odds models built on
//! feature subsets.
//!
//! Every model is summarized by its linear predictor `x_j = β_j′z` at a
//! prediction point. Its KL divergence from the null model is the symmetric
//! `kl_po_null(x_j)`, which yields ranks and information weights
//! `w_j = K_{j0} / Σ K_{k0}`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::divergence::{kl_generic, kl_po_null, kl_po_pair};
use crate::error::{Error, Result};
use crate::fitting::{linear_predictor, FitResult};
use crate::numerics::distributions::{Dist, Support, UnivariateModel};
use crate::numerics::quadrature::QuadratureSpec;
use crate::numerics::special::xlogx;

/// Largest feature count accepted by [`enumerate_subsets`].
pub const MAX_FEATURES: usize = 20;

/// All nonempty subsets of `{0, …, p−1}`, ordered by size and then
/// lexicographically.
pub fn enumerate_subsets(p: usize) -> Result<Vec<Vec<usize>>> {
    if p == 0 {
        return Err(Error::EmptyInput("feature set".into()));
    }
    if p > MAX_FEATURES {
        return Err(Error::TooLarge { p });
    }
    let mut out: Vec<Vec<usize>> = (1u32..1 << p)
        .map(|mask| (0..p).filter(|i| mask & (1 << i) != 0).collect())
        .collect();
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    Ok(out)
}

/// One subset and its linear predictor at the prediction point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictorEntry {
    pub subset: Vec<String>,
    pub x: f64,
}

/// Linear predictors of fitted models at the full covariate vector `point`.
pub fn entries_from_fits(
    fits: &[FitResult],
    names: &[String],
    point: &[f64],
) -> Result<Vec<PredictorEntry>> {
    if point.len() != names.len() {
        return Err(Error::DimensionMismatch {
            expected: names.len(),
            got: point.len(),
        });
    }
    fits.iter()
        .map(|fit| {
            let z: Vec<f64> = fit.subset.iter().map(|&i| point[i]).collect();
            Ok(PredictorEntry {
                subset: fit.subset.iter().map(|&i| names[i].clone()).collect(),
                x: linear_predictor(fit, &z)?,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubsetModel {
    /// 1-based position in the input.
    pub j: usize,
    pub subset: Vec<String>,
    pub x: f64,
    pub k_null: f64,
    /// 1 is the most informative.
    pub rank: usize,
    pub weight: f64,
}

/// Share of pairwise divergences below each bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FractionBelow {
    pub min_bound: f64,
    pub h_w: f64,
    pub b_wj: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationTable {
    pub label: String,
    pub models: Vec<SubsetModel>,
    pub sum_k: f64,
    /// `Σ w_j x_j`, the linear predictor of the averaged model.
    pub beta_r_lin: f64,
    pub k_r0: f64,
    /// `Σ w_j K_{j0}`.
    pub bound_null: f64,
    /// Entropy of the weights.
    pub h_w: f64,
    /// `Σ_{j<k} w_j w_k J_{jk}`.
    pub b_wj: f64,
    pub fraction_below: FractionBelow,
    /// `N(N−1)/2`.
    pub pair_count: usize,
}

impl EvaluationTable {
    pub fn weights(&self) -> Vec<f64> {
        self.models.iter().map(|m| m.weight).collect()
    }

    pub fn xs(&self) -> Vec<f64> {
        self.models.iter().map(|m| m.x).collect()
    }
}

/// Builds the table: divergences from the null, ranks (ties go to the lower
/// `j`), information weights, averages and the closed-form bounds.
///
/// Models with `x_j = 0` get weight zero. If every model is null the weights
/// fall back to uniform.
pub fn evaluate_table(entries: &[PredictorEntry], label: &str) -> Result<EvaluationTable> {
    if entries.is_empty() {
        return Err(Error::EmptyInput("linear predictors".into()));
    }
    if let Some(e) = entries.iter().find(|e| !e.x.is_finite()) {
        return Err(Error::InvalidParam(format!(
            "linear predictor for {:?} is not finite",
            e.subset
        )));
    }
    let n = entries.len();
    let ks: Vec<f64> = entries.iter().map(|e| kl_po_null(e.x)).collect();
    let sum_k: f64 = ks.iter().sum();
    let weights: Vec<f64> = if sum_k > 0.0 {
        ks.iter().map(|k| k / sum_k).collect()
    } else {
        vec![1.0 / n as f64; n]
    };
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| ks[b].total_cmp(&ks[a]).then(a.cmp(&b)));
    let mut ranks = vec![0; n];
    for (r, &i) in order.iter().enumerate() {
        ranks[i] = r + 1;
    }
    let models: Vec<SubsetModel> = entries
        .iter()
        .enumerate()
        .map(|(i, e)| SubsetModel {
            j: i + 1,
            subset: e.subset.clone(),
            x: e.x,
            k_null: ks[i],
            rank: ranks[i],
            weight: weights[i],
        })
        .collect();
    let beta_r_lin: f64 = entries.iter().zip(&weights).map(|(e, w)| w * e.x).sum();
    let bound_null: f64 = ks.iter().zip(&weights).map(|(k, w)| w * k).sum();
    let h_w = -weights.iter().map(|&w| xlogx(w)).sum::<f64>();
    let mut b_wj = 0.0;
    let mut pairs = Vec::with_capacity(n * (n - 1) / 2);
    for a in 0..n {
        for b in a + 1..n {
            let k = kl_po_pair(entries[a].x, entries[b].x);
            b_wj += weights[a] * weights[b] * 2.0 * k;
            pairs.push(k);
        }
    }
    let share = |bound: f64| {
        if pairs.is_empty() {
            0.0
        } else {
            pairs.iter().filter(|k| **k < bound).count() as f64 / pairs.len() as f64
        }
    };
    Ok(EvaluationTable {
        label: label.to_string(),
        models,
        sum_k,
        beta_r_lin,
        k_r0: kl_po_null(beta_r_lin),
        bound_null,
        h_w,
        b_wj,
        fraction_below: FractionBelow {
            min_bound: share(h_w.min(b_wj)),
            h_w: share(h_w),
            b_wj: share(b_wj),
        },
        pair_count: pairs.len(),
    })
}

/// `Σ w_j x_j`. The tilt of the averaged model is the weighted geometric
/// mean of the tilts.
pub fn average_parameter(table: &EvaluationTable) -> f64 {
    table.beta_r_lin
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceDivergences {
    /// Linear predictor of the reference used for the bound.
    pub reference_x: f64,
    /// Divergence of the averaged model from the null.
    pub k_r0: f64,
    /// `Σ w_j K(f_j : f_ref)`, which bounds the mixture's divergence from the
    /// reference.
    pub bound: f64,
    /// `K(f_j : f_r)` for the averaged model `f_r`.
    pub pairwise_to_r: Vec<f64>,
}

/// Divergences against the averaged model and the mixture bound against a
/// reference model; `reference_x = 0` is the null.
pub fn reference_divergences(table: &EvaluationTable, reference_x: f64) -> ReferenceDivergences {
    ReferenceDivergences {
        reference_x,
        k_r0: kl_po_null(table.beta_r_lin),
        bound: table
            .models
            .iter()
            .map(|m| m.weight * kl_po_pair(m.x, reference_x))
            .sum(),
        pairwise_to_r: table
            .models
            .iter()
            .map(|m| kl_po_pair(m.x, table.beta_r_lin))
            .collect(),
    }
}

/// Mixture of PO models `Σ w_j G_{α_j}(S₀)` with `α_j = e^{x_j}`.
#[derive(Debug, Clone)]
pub struct PoMixture {
    base: Arc<dyn UnivariateModel>,
    ln_weights: Vec<f64>,
    xs: Vec<f64>,
}

impl PoMixture {
    pub fn new<M: UnivariateModel + 'static>(base: M, weights: &[f64], xs: &[f64]) -> Result<Self> {
        if weights.len() != xs.len() {
            return Err(Error::DimensionMismatch {
                expected: xs.len(),
                got: weights.len(),
            });
        }
        if weights.is_empty() {
            return Err(Error::EmptyInput("mixture components".into()));
        }
        let total: f64 = weights.iter().sum();
        if weights.iter().any(|w| !(*w >= 0.0)) || (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParam(
                "mixture weights must be nonnegative and sum to 1".into(),
            ));
        }
        Ok(Self {
            base: Arc::new(base),
            ln_weights: weights.iter().map(|w| w.ln()).collect(),
            xs: xs.to_vec(),
        })
    }

    pub fn from_table<M: UnivariateModel + 'static>(
        table: &EvaluationTable,
        base: M,
    ) -> Result<Self> {
        Self::new(base, &table.weights(), &table.xs())
    }

    /// A single PO model.
    pub fn single<M: UnivariateModel + 'static>(base: M, x: f64) -> Self {
        Self {
            base: Arc::new(base),
            ln_weights: vec![0.0],
            xs: vec![x],
        }
    }

    fn components(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.ln_weights
            .iter()
            .zip(&self.xs)
            .filter(|(lw, _)| **lw > f64::NEG_INFINITY)
            .map(|(lw, x)| (lw.exp(), *x))
    }
}

/// `(S, F)` of the PO model with tilt `e^x` given the baseline `(S₀, F₀)`:
/// `S = S₀/(S₀ + F₀e^{−x})`, written to avoid overflow for large `|x|`.
fn po_pair(s0: f64, f0: f64, x: f64) -> (f64, f64) {
    if x >= 0.0 {
        let e = (-x).exp();
        let d = s0 + f0 * e;
        (s0 / d, f0 * e / d)
    } else {
        let e = x.exp();
        let d = s0 * e + f0;
        (s0 * e / d, f0 / d)
    }
}

/// `ln g(u)` for the PO link with tilt `e^x`, `g(u) = α/(1 − ᾱu)²`.
fn po_ln_link_density(s0: f64, f0: f64, x: f64) -> f64 {
    if x >= 0.0 {
        -x - 2.0 * (s0 + f0 * (-x).exp()).ln()
    } else {
        x - 2.0 * (s0 * x.exp() + f0).ln()
    }
}

fn log_sum_exp(terms: impl Iterator<Item = f64>) -> f64 {
    let v: Vec<f64> = terms.collect();
    let m = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + v.iter().map(|t| (t - m).exp()).sum::<f64>().ln()
}

impl UnivariateModel for PoMixture {
    fn density(&self, y: f64) -> f64 {
        self.ln_density(y).exp()
    }

    fn ln_density(&self, y: f64) -> f64 {
        let lf0 = self.base.ln_density(y);
        if lf0 == f64::NEG_INFINITY {
            return lf0;
        }
        let (s0, f0) = (self.base.survival(y), self.base.cdf(y));
        let ln_g = log_sum_exp(
            self.ln_weights
                .iter()
                .zip(&self.xs)
                .map(|(lw, &x)| lw + po_ln_link_density(s0, f0, x)),
        );
        ln_g + lf0
    }

    fn cdf(&self, y: f64) -> f64 {
        let (s0, f0) = (self.base.survival(y), self.base.cdf(y));
        self.components()
            .map(|(w, x)| w * po_pair(s0, f0, x).1)
            .sum()
    }

    fn survival(&self, y: f64) -> f64 {
        let (s0, f0) = (self.base.survival(y), self.base.cdf(y));
        self.components()
            .map(|(w, x)| w * po_pair(s0, f0, x).0)
            .sum()
    }

    fn support(&self) -> Support {
        self.base.support()
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.base.breakpoints()
    }
}

/// `S_m(y) = Σ w_j G_{α_j}(S₀(y))` with the table's weights.
pub fn mixture_survival<M: UnivariateModel + 'static>(
    table: &EvaluationTable,
    baseline: M,
    y: f64,
) -> Result<f64> {
    Ok(PoMixture::from_table(table, baseline)?.survival(y))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JsBounds {
    /// `Σ w_j K(f_j : f_m)`.
    pub js: f64,
    pub h_w: f64,
    pub b_wj: f64,
    pub fraction_below: FractionBelow,
    pub err_estimate: f64,
}

/// The Jensen-Shannon divergence of the table's models with its two upper
/// bounds.
///
/// Divergences are invariant under monotone maps of the variable, so the
/// models are evaluated on the logistic baseline, where the PO model with
/// tilt `e^x` is the logistic law shifted by `x`. Fails with
/// `ConstraintViolated` if the bound `js ≤ min{H_w, B_wJ}` is broken by more
/// than the quadrature error.
pub fn js_and_bounds(table: &EvaluationTable, spec: &QuadratureSpec) -> Result<JsBounds> {
    let base = Dist::logistic(0.0, 1.0)?;
    let mixture = PoMixture::from_table(table, base)?;
    let mut breaks = table.xs();
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let mut js = 0.0;
    let mut err = 0.0;
    for m in table.models.iter().filter(|m| m.weight > 0.0) {
        let comp = Located {
            x: m.x,
            breaks: breaks.clone(),
        };
        let r = kl_generic(&comp, &mixture, 1.0, spec)?;
        js += m.weight * r.value;
        err += m.weight * r.err_estimate;
    }
    let bound = table.h_w.min(table.b_wj);
    if js > bound + 1e-9 + err {
        return Err(Error::ConstraintViolated(format!(
            "Jensen-Shannon value {js} exceeds min(H_w, B_wJ) = {bound}"
        )));
    }
    Ok(JsBounds {
        js,
        h_w: table.h_w,
        b_wj: table.b_wj,
        fraction_below: table.fraction_below,
        err_estimate: err,
    })
}

/// Standard logistic shifted by `x`, with the mixture's breakpoints so both
/// sides of a divergence integral share a partition.
#[derive(Debug)]
struct Located {
    x: f64,
    breaks: Vec<f64>,
}

impl UnivariateModel for Located {
    fn density(&self, y: f64) -> f64 {
        self.ln_density(y).exp()
    }
    fn ln_density(&self, y: f64) -> f64 {
        let a = (y - self.x).abs();
        -a - 2.0 * (-a).exp().ln_1p()
    }
    fn cdf(&self, y: f64) -> f64 {
        1.0 / (1.0 + (self.x - y).exp())
    }
    fn support(&self) -> Support {
        Support::REAL_LINE
    }
    fn breakpoints(&self) -> Vec<f64> {
        self.breaks.clone()
    }
}

/// Divergences between every pair of models.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairwiseMatrix {
    /// `K_{jk}`; symmetric, so it also holds `min{K_{jk}, K_{kj}}`.
    pub k: Vec<Vec<f64>>,
    /// Jeffreys `J_{jk} = 2K_{jk}`.
    pub jeffreys: Vec<Vec<f64>>,
    /// Upper-triangle entries in row order.
    pub distinct: Vec<f64>,
}

impl PairwiseMatrix {
    pub fn distinct_pairs(&self) -> usize {
        self.distinct.len()
    }
}

pub fn pairwise_matrix(table: &EvaluationTable) -> PairwiseMatrix {
    let xs = table.xs();
    let n = xs.len();
    let mut k = vec![vec![0.0; n]; n];
    let mut distinct = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for a in 0..n {
        for b in a + 1..n {
            let v = kl_po_pair(xs[a], xs[b]);
            k[a][b] = v;
            k[b][a] = v;
            distinct.push(v);
        }
    }
    let jeffreys = k
        .iter()
        .map(|row| row.iter().map(|v| 2.0 * v).collect())
        .collect();
    PairwiseMatrix {
        k,
        jeffreys,
        distinct,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::divergence::{renyi_unit_link, Direction};
    use crate::links::{po_transform, UnitLink};
    use crate::numerics::quadrature::integrate_with_breaks;
    use proptest::prelude::*;
    use std::f64::consts::E;

    fn entries(xs: &[f64]) -> Vec<PredictorEntry> {
        xs.iter()
            .enumerate()
            .map(|(i, &x)| PredictorEntry {
                subset: vec![format!("z{}", i + 1)],
                x,
            })
            .collect()
    }

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn subset_enumeration() {
        assert_eq!(enumerate_subsets(5).unwrap().len(), 31);
        assert_eq!(enumerate_subsets(1).unwrap(), vec![vec![0]]);
        let s3 = enumerate_subsets(3).unwrap();
        let want: Vec<Vec<usize>> = vec![
            vec![0],
            vec![1],
            vec![2],
            vec![0, 1],
            vec![0, 2],
            vec![1, 2],
            vec![0, 1, 2],
        ];
        assert_eq!(s3, want);
        let s5 = enumerate_subsets(5).unwrap();
        assert_eq!(s5[8], vec![0, 4]);
        assert_eq!(s5[15], vec![0, 1, 2]);
        assert_eq!(s5[30], vec![0, 1, 2, 3, 4]);
        assert!(matches!(
            enumerate_subsets(21),
            Err(Error::TooLarge { p: 21 })
        ));
        assert!(enumerate_subsets(0).is_err());
    }

    #[test]
    fn table_basics() {
        let t = evaluate_table(&entries(&[22.263, 23.896, 0.0]), "absent").unwrap();
        assert!((t.models[0].k_null - 20.263).abs() < 5e-4);
        assert!((t.models[1].k_null - 21.896).abs() < 5e-4);
        assert_eq!(
            t.models.iter().map(|m| m.rank).collect::<Vec<_>>(),
            vec![2, 1, 3]
        );
        assert_eq!(t.models[2].weight, 0.0);
        assert!((t.weights().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert_eq!(t.pair_count, 3);
        assert!(evaluate_table(&[], "x").is_err());
        assert!(evaluate_table(&entries(&[f64::NAN]), "x").is_err());
    }

    #[test]
    fn equal_predictors_get_equal_weights() {
        let t = evaluate_table(&entries(&[1.5; 4]), "eq").unwrap();
        assert!(t.models.iter().all(|m| (m.weight - 0.25).abs() < 1e-15));
        assert_eq!(
            t.models.iter().map(|m| m.rank).collect::<Vec<_>>(),
            vec![1, 2, 3, 4]
        );
        assert!((t.h_w - 4f64.ln()).abs() < 1e-12);
        let z = evaluate_table(&entries(&[0.0; 3]), "null").unwrap();
        assert!(z
            .models
            .iter()
            .all(|m| (m.weight - 1.0 / 3.0).abs() < 1e-15));
    }

    #[test]
    fn present_point_row_sixteen() {
        assert!((kl_po_null(-2.903) - 1.240).abs() < 5e-4);
    }

    #[test]
    fn single_model_table() {
        let t = evaluate_table(&entries(&[3.2]), "one").unwrap();
        assert_eq!(average_parameter(&t), 3.2);
        assert_eq!(t.h_w, 0.0);
        assert_eq!(t.b_wj, 0.0);
        let jb = js_and_bounds(&t, &spec()).unwrap();
        assert!(jb.js.abs() < 1e-12);
        let r = reference_divergences(&t, 0.0);
        assert!((r.bound - kl_po_null(3.2)).abs() < 1e-15);
        assert_eq!(r.pairwise_to_r, vec![0.0]);
    }

    #[test]
    fn pairwise_structure() {
        let t = evaluate_table(&entries(&[23.896, 22.263, -1.0, 0.4]), "p").unwrap();
        let m = pairwise_matrix(&t);
        assert_eq!(m.distinct_pairs(), 6);
        for a in 0..4 {
            assert_eq!(m.k[a][a], 0.0);
            for b in 0..4 {
                assert_eq!(m.k[a][b], m.k[b][a]);
                assert_eq!(m.jeffreys[a][b], 2.0 * m.k[a][b]);
            }
        }
        assert!((m.k[0][1] - kl_po_null(1.633)).abs() < 1e-12);
        let big = evaluate_table(
            &entries(&(0..31).map(|i| i as f64 * 0.3).collect::<Vec<_>>()),
            "b",
        )
        .unwrap();
        assert_eq!(pairwise_matrix(&big).distinct_pairs(), 465);
        assert_eq!(big.pair_count, 465);
    }

    #[test]
    fn ranks_agree_in_both_directions() {
        let xs = [2.305, -8.753, 0.354, 22.263, 1.739, -6.464];
        let t = evaluate_table(&entries(&xs), "r").unwrap();
        let s = spec();
        let by_dir = |dir| -> Vec<f64> {
            xs.iter()
                .map(|x| {
                    renyi_unit_link(&UnitLink::po(x.exp()).unwrap(), 1.0, dir, &s)
                        .unwrap()
                        .value
                })
                .collect()
        };
        let rank = |ks: &[f64]| {
            let mut o: Vec<usize> = (0..ks.len()).collect();
            o.sort_by(|&a, &b| ks[b].total_cmp(&ks[a]).then(a.cmp(&b)));
            let mut r = vec![0; ks.len()];
            for (i, &j) in o.iter().enumerate() {
                r[j] = i + 1;
            }
            r
        };
        let fwd = rank(&by_dir(Direction::Forward));
        let rev = rank(&by_dir(Direction::Reverse));
        assert_eq!(fwd, rev);
        assert_eq!(fwd, t.models.iter().map(|m| m.rank).collect::<Vec<_>>());
    }

    #[test]
    fn mixture_survival_examples() {
        let base = Dist::exponential(1.0).unwrap();
        let t = evaluate_table(&entries(&[1.0, -1.0]), "m").unwrap();
        let got = mixture_survival(&t, base, 1.0).unwrap();
        // Direct arithmetic on αu/(1 − ᾱu) with u = e^{−1}.
        let g = |a: f64, u: f64| a * u / (1.0 - (1.0 - a) * u);
        let want = 0.5 * g(E, 1.0 / E) + 0.5 * g(1.0 / E, 1.0 / E);
        assert!((got - want).abs() < 1e-14);
        assert!((got - 0.394_521).abs() < 1e-6);
        assert_eq!(mixture_survival(&t, base, 0.0).unwrap(), 1.0);
        let one = PoMixture::new(base, &[1.0, 0.0], &[0.7, -3.0]).unwrap();
        let single = po_transform(0.7f64.exp(), base).unwrap();
        for &y in &[0.1, 1.0, 5.0] {
            assert!((one.survival(y) - single.survival(y)).abs() < 1e-14);
            assert!((one.density(y) - single.density(y)).abs() < 1e-13);
        }
    }

    #[test]
    fn logistic_shift_equals_po_transform() {
        let base = Dist::logistic(0.0, 1.0).unwrap();
        let po = PoMixture::single(base, 1.7);
        let shifted = Located {
            x: 1.7,
            breaks: vec![],
        };
        for &y in &[-5.0, 0.0, 1.7, 9.0] {
            assert!((po.cdf(y) - shifted.cdf(y)).abs() < 1e-15);
            assert!((po.ln_density(y) - shifted.ln_density(y)).abs() < 1e-12);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10))]

        #[test]
        fn weights_normalized_and_js_bounded(xs in prop::collection::vec(-8.0f64..8.0, 2..8)) {
            let t = evaluate_table(&entries(&xs), "rand").unwrap();
            prop_assert!((t.weights().iter().sum::<f64>() - 1.0).abs() < 1e-12);
            prop_assert!(t.h_w <= (xs.len() as f64).ln() + 1e-12);
            let jb = js_and_bounds(&t, &spec()).unwrap();
            prop_assert!(jb.js >= -1e-12);
            prop_assert!(jb.js <= jb.h_w + 1e-9 && jb.js <= jb.b_wj + 1e-9);
            let mut ranks: Vec<usize> = t.models.iter().map(|m| m.rank).collect();
            ranks.sort();
            prop_assert_eq!(ranks, (1..=xs.len()).collect::<Vec<_>>());
        }

        #[test]
        fn mixture_bound_holds(xs in prop::collection::vec(-3.0f64..3.0, 2..6), rate in 0.5f64..2.0) {
            let t = evaluate_table(&entries(&xs), "mix").unwrap();
            let base = Dist::exponential(rate).unwrap();
            let m = PoMixture::from_table(&t, base).unwrap();
            let k = kl_generic(&m, &base, 1.0, &spec()).unwrap().value;
            prop_assert!(k <= t.bound_null + 1e-9);
            let s0 = m.survival(0.0);
            prop_assert!((s0 - 1.0).abs() < 1e-15);
            let mut prev = 1.0;
            for i in 1..50 {
                let s = m.survival(0.2 * i as f64);
                prop_assert!(s <= prev);
                prev = s;
            }
            let norm = integrate_with_breaks(|y| m.density(y), 0.0, f64::INFINITY, &[], &spec()).unwrap();
            prop_assert!((norm.value - 1.0).abs() < 1e-9);
        }

        #[test]
        fn reference_bound_at_null_matches_table(xs in prop::collection::vec(-10.0f64..10.0, 1..10)) {
            let t = evaluate_table(&entries(&xs), "ref").unwrap();
            let r = reference_divergences(&t, 0.0);
            prop_assert!((r.bound - t.bound_null).abs() < 1e-12 * t.bound_null.max(1.0));
            let direct: f64 = t.models.iter().map(|m| m.k_null * m.k_null).sum::<f64>() / t.sum_k.max(f64::MIN_POSITIVE);
            if t.sum_k > 0.0 {
                prop_assert!((t.bound_null - direct).abs() < 1e-9 * direct.max(1.0));
            }
        }
    }
}
