//! Maximum likelihood for proportional odds models with a log-logistic
//! baseline, plus a synthetic data generator used as its oracle.
//!
//! With baseline `S₀(t) = 1/(1 + (t/σ)^k)` and tilt `α = exp(β′z)`, the PO
//! transform `αS₀/(1 − ᾱS₀)` is `1/(1 + e^η)` with
//! `η = k ln t − k ln σ − β′z`, so the model stays log-logistic in `t`.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::roots::find_root;
use crate::numerics::special::{sigmoid, softplus};

/// Right-censored survival records with covariates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurvivalDataset {
    pub times: Vec<f64>,
    pub events: Vec<bool>,
    /// One row per record.
    pub covariates: Vec<Vec<f64>>,
    pub names: Vec<String>,
}

impl SurvivalDataset {
    pub fn new(
        times: Vec<f64>,
        events: Vec<bool>,
        covariates: Vec<Vec<f64>>,
        names: Vec<String>,
    ) -> Result<Self> {
        let n = times.len();
        for (got, what) in [
            (events.len(), "events"),
            (covariates.len(), "covariate rows"),
        ] {
            if got != n {
                return Err(Error::InvalidParam(format!(
                    "{what}: expected {n} entries, got {got}"
                )));
            }
        }
        if let Some(t) = times.iter().find(|t| !(**t > 0.0 && t.is_finite())) {
            return Err(Error::InvalidParam(format!(
                "survival times must be positive and finite, got {t}"
            )));
        }
        let p = names.len();
        for row in &covariates {
            if row.len() != p {
                return Err(Error::DimensionMismatch {
                    expected: p,
                    got: row.len(),
                });
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidParam("covariates must be finite".into()));
            }
        }
        Ok(Self {
            times,
            events,
            covariates,
            names,
        })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn event_count(&self) -> usize {
        self.events.iter().filter(|e| **e).count()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitConfig {
    pub max_iterations: usize,
    /// Convergence when the max-norm of the log-likelihood gradient is below this.
    pub grad_tol: f64,
    /// A standardized coefficient or standard error beyond this size means
    /// the likelihood keeps rising, or goes flat, as `β` runs off to infinity.
    pub separation_bound: f64,
    /// Return an error instead of an unconverged result.
    pub require_convergence: bool,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            max_iterations: 200,
            grad_tol: 1e-8,
            separation_bound: 30.0,
            require_convergence: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    /// Indices of the covariates used, in dataset order.
    pub subset: Vec<usize>,
    pub beta: Vec<f64>,
    /// Approximate standard errors of `beta` from the observed information.
    pub std_errors: Vec<f64>,
    /// `(shape k, scale σ)` of the log-logistic baseline.
    pub baseline_params: (f64, f64),
    pub loglik: f64,
    pub converged: bool,
    pub iterations: usize,
    pub grad_norm: f64,
}

impl FitResult {
    /// `S(t | z)` under the fitted model; `z` holds the subset's covariates.
    pub fn survival(&self, t: f64, z: &[f64]) -> Result<f64> {
        let lp = linear_predictor(self, z)?;
        if t <= 0.0 {
            return Ok(1.0);
        }
        let (k, sigma) = self.baseline_params;
        Ok(sigmoid(-(k * (t.ln() - sigma.ln()) - lp)))
    }
}

/// `β′z`. The PO tilt is its exponential.
pub fn linear_predictor(fit: &FitResult, z: &[f64]) -> Result<f64> {
    if z.len() != fit.beta.len() {
        return Err(Error::DimensionMismatch {
            expected: fit.beta.len(),
            got: z.len(),
        });
    }
    Ok(fit.beta.iter().zip(z).map(|(b, x)| b * x).sum())
}

/// Log-likelihood in the working parameters `θ = (ln k, c, β)` with
/// `η = k·τ + c − β′x`, where `τ` and `x` are the (centred) log-times and
/// design rows.
#[derive(Debug, Clone)]
pub(crate) struct PoLogLik {
    pub tau: Vec<f64>,
    /// Jacobian term `−ln t` in the event density, constant in `θ`.
    pub ln_t: Vec<f64>,
    pub events: Vec<bool>,
    pub design: Vec<Vec<f64>>,
}

impl PoLogLik {
    pub fn dim(&self) -> usize {
        2 + self.design.first().map_or(0, Vec::len)
    }

    fn eta(&self, theta: &[f64], i: usize) -> f64 {
        let k = theta[0].exp();
        let xb: f64 = self.design[i]
            .iter()
            .zip(&theta[2..])
            .map(|(x, b)| x * b)
            .sum();
        k * self.tau[i] + theta[1] - xb
    }

    pub fn value(&self, theta: &[f64]) -> f64 {
        (0..self.tau.len())
            .map(|i| {
                let eta = self.eta(theta, i);
                if self.events[i] {
                    theta[0] - self.ln_t[i] + eta - 2.0 * softplus(eta)
                } else {
                    -softplus(eta)
                }
            })
            .sum()
    }

    /// Value, gradient and Hessian.
    pub fn derivatives(&self, theta: &[f64]) -> (f64, DVector<f64>, DMatrix<f64>) {
        let d = self.dim();
        let k = theta[0].exp();
        let mut value = 0.0;
        let mut grad = DVector::zeros(d);
        let mut hess = DMatrix::zeros(d, d);
        let mut deta = DVector::zeros(d);
        for i in 0..self.tau.len() {
            let eta = self.eta(theta, i);
            let s = sigmoid(eta);
            let event = self.events[i];
            let (r, h) = if event {
                value += theta[0] - self.ln_t[i] + eta - 2.0 * softplus(eta);
                grad[0] += 1.0;
                (1.0 - 2.0 * s, -2.0 * s * (1.0 - s))
            } else {
                value -= softplus(eta);
                (-s, -s * (1.0 - s))
            };
            deta[0] = k * self.tau[i];
            deta[1] = 1.0;
            for (j, x) in self.design[i].iter().enumerate() {
                deta[2 + j] = -x;
            }
            grad.axpy(r, &deta, 1.0);
            hess.ger(h, &deta, &deta, 1.0);
            // η is nonlinear only in ln k.
            hess[(0, 0)] += r * k * self.tau[i];
        }
        (value, grad, hess)
    }
}

/// Log-likelihood and its analytic gradient on the raw data, in the working
/// parameters `θ = (ln k, c, β)` where `c = −k ln σ`.
pub fn po_loglik_with_gradient(
    data: &SurvivalDataset,
    subset: &[usize],
    theta: &[f64],
) -> Result<(f64, Vec<f64>)> {
    let p = data.names.len();
    if let Some(&j) = subset.iter().find(|&&j| j >= p) {
        return Err(Error::InvalidParam(format!(
            "covariate index {j} out of range for {p} covariates"
        )));
    }
    if theta.len() != 2 + subset.len() {
        return Err(Error::DimensionMismatch {
            expected: 2 + subset.len(),
            got: theta.len(),
        });
    }
    let ln_t: Vec<f64> = data.times.iter().map(|t| t.ln()).collect();
    let ll = PoLogLik {
        tau: ln_t.clone(),
        ln_t,
        events: data.events.clone(),
        design: data
            .covariates
            .iter()
            .map(|row| subset.iter().map(|&j| row[j]).collect())
            .collect(),
    };
    let (v, g, _) = ll.derivatives(theta);
    Ok((v, g.iter().copied().collect()))
}

fn max_norm(v: &DVector<f64>) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Fits `S(t|z) = 1/(1 + (t/σ)^k·e^{−β′z})` by damped Newton on the
/// standardized problem. `subset` picks covariate columns; an empty subset
/// fits the baseline alone.
pub fn fit_po_mle(
    data: &SurvivalDataset,
    subset: &[usize],
    config: &FitConfig,
) -> Result<FitResult> {
    if data.event_count() == 0 {
        return Err(Error::AllCensored);
    }
    let p = data.names.len();
    if let Some(&j) = subset.iter().find(|&&j| j >= p) {
        return Err(Error::InvalidParam(format!(
            "covariate index {j} out of range for {p} covariates"
        )));
    }
    let n = data.len() as f64;
    let ln_t: Vec<f64> = data.times.iter().map(|t| t.ln()).collect();
    let ln_centre = ln_t.iter().sum::<f64>() / n;
    let mut centres = Vec::with_capacity(subset.len());
    let mut scales = Vec::with_capacity(subset.len());
    for &j in subset {
        let m = data.covariates.iter().map(|r| r[j]).sum::<f64>() / n;
        let v = data
            .covariates
            .iter()
            .map(|r| (r[j] - m).powi(2))
            .sum::<f64>()
            / n;
        if !(v > 0.0) {
            return Err(Error::InvalidParam(format!(
                "covariate '{}' is constant",
                data.names[j]
            )));
        }
        centres.push(m);
        scales.push(v.sqrt());
    }
    let ll = PoLogLik {
        tau: ln_t.iter().map(|l| l - ln_centre).collect(),
        ln_t: ln_t.clone(),
        events: data.events.clone(),
        design: data
            .covariates
            .iter()
            .map(|r| {
                subset
                    .iter()
                    .enumerate()
                    .map(|(i, &j)| (r[j] - centres[i]) / scales[i])
                    .collect()
            })
            .collect(),
    };

    let d = ll.dim();
    let mut theta = DVector::<f64>::zeros(d);
    let (mut value, mut grad, mut hess) = ll.derivatives(theta.as_slice());
    let mut iterations = 0;
    let mut converged = max_norm(&grad) <= config.grad_tol;
    while !converged && iterations < config.max_iterations {
        iterations += 1;
        let neg_hess = -&hess;
        let (step, newton) = match neg_hess.cholesky() {
            Some(ch) => (ch.solve(&grad), true),
            // Not concave here: fall back to steepest ascent.
            None => (grad.clone() / grad.norm().max(1.0), false),
        };
        // Near the optimum the expected gain `gᵀH⁻¹g/2` drops below the
        // rounding noise of the summed log-likelihood; take the full step.
        if newton && grad.dot(&step) < 1e-10 {
            theta += &step;
            (value, grad, hess) = ll.derivatives(theta.as_slice());
            converged = max_norm(&grad) <= config.grad_tol;
            continue;
        }
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..60 {
            let cand = &theta + t * &step;
            let v = ll.value(cand.as_slice());
            if v.is_finite() && v >= value + 1e-4 * t * grad.dot(&step).min(0.0) && v >= value {
                theta = cand;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            break;
        }
        if let Some((j, _)) = theta
            .iter()
            .skip(2)
            .enumerate()
            .find(|(_, b)| b.abs() > config.separation_bound)
        {
            return Err(Error::SeparationDetected {
                coefficient: data.names[subset[j]].clone(),
            });
        }
        (value, grad, hess) = ll.derivatives(theta.as_slice());
        converged = max_norm(&grad) <= config.grad_tol;
    }
    let grad_norm = max_norm(&grad);
    if !converged && config.require_convergence {
        return Err(Error::FitNonConvergent {
            iterations,
            grad_norm,
        });
    }
    if !value.is_finite() {
        return Err(Error::NonFinite { x: value });
    }

    // Back to the original scales: β_j = β̃_j / sd_j and
    // c = c̃ − k·ln_centre + Σ β̃_j m_j / sd_j.
    let k = theta[0].exp();
    let beta: Vec<f64> = (0..subset.len())
        .map(|i| theta[2 + i] / scales[i])
        .collect();
    let c = theta[1] - k * ln_centre
        + (0..subset.len())
            .map(|i| theta[2 + i] * centres[i] / scales[i])
            .sum::<f64>();
    let sigma = (-c / k).exp();
    // Standardized standard errors; a flat likelihood in some direction
    // shows up as a huge or undefined value.
    let std_se: Vec<f64> = match (-&hess).try_inverse() {
        Some(cov) => (0..subset.len())
            .map(|i| cov[(2 + i, 2 + i)].max(0.0).sqrt())
            .collect(),
        None => vec![f64::INFINITY; subset.len()],
    };
    if let Some(j) = std_se
        .iter()
        .position(|se| !(*se <= config.separation_bound))
    {
        return Err(Error::SeparationDetected {
            coefficient: data.names[subset[j]].clone(),
        });
    }
    let std_errors = std_se.iter().zip(&scales).map(|(se, sd)| se / sd).collect();
    Ok(FitResult {
        subset: subset.to_vec(),
        beta,
        std_errors,
        baseline_params: (k, sigma),
        loglik: value,
        converged,
        iterations,
        grad_norm,
    })
}

/// How `sample_po` draws covariate vectors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CovariateSampler {
    /// Independent standard normals.
    Normal { dim: usize },
    /// Independent Bernoulli(p) indicators.
    Binary { dim: usize, p: f64 },
}

impl CovariateSampler {
    fn dim(&self) -> usize {
        match *self {
            Self::Normal { dim } | Self::Binary { dim, .. } => dim,
        }
    }
}

/// Draws a PO dataset: event times invert `S(t|z) = 1/(1 + (t/σ)^k e^{−β′z})`
/// at uniform deviates; censoring times are exponential and independent of
/// everything else, with rate chosen so that the expected censored fraction
/// given the drawn event times equals `censor_rate`.
pub fn sample_po(
    beta: &[f64],
    baseline: (f64, f64),
    covariates: CovariateSampler,
    censor_rate: f64,
    n: usize,
    seed: u64,
) -> Result<SurvivalDataset> {
    let (k, sigma) = baseline;
    if !(k > 0.0 && sigma > 0.0 && k.is_finite() && sigma.is_finite()) {
        return Err(Error::InvalidParam(format!(
            "baseline needs positive shape and scale, got ({k}, {sigma})"
        )));
    }
    if !(0.0..1.0).contains(&censor_rate) {
        return Err(Error::InvalidParam(format!(
            "censor_rate must lie in [0, 1), got {censor_rate}"
        )));
    }
    if covariates.dim() != beta.len() {
        return Err(Error::DimensionMismatch {
            expected: beta.len(),
            got: covariates.dim(),
        });
    }
    if let CovariateSampler::Binary { p, .. } = covariates {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParam(format!(
                "bernoulli probability must lie in [0, 1], got {p}"
            )));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::with_capacity(n);
    let mut event_times = Vec::with_capacity(n);
    for _ in 0..n {
        let z: Vec<f64> = match covariates {
            CovariateSampler::Normal { dim } => (0..dim)
                .map(|_| rng.sample::<f64, _>(StandardNormal))
                .collect(),
            CovariateSampler::Binary { dim, p } => (0..dim)
                .map(|_| if rng.random::<f64>() < p { 1.0 } else { 0.0 })
                .collect(),
        };
        let lp: f64 = z.iter().zip(beta).map(|(a, b)| a * b).sum();
        // S = u  ⇔  (t/σ)^k = e^{lp}(1 − u)/u.
        let u: f64 = rng.random_range(f64::EPSILON..1.0);
        let t = sigma * ((lp + (1.0 - u).ln() - u.ln()) / k).exp();
        rows.push(z);
        event_times.push(t);
    }
    let exp_draws: Vec<f64> = (0..n).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
    let (times, events) = if censor_rate == 0.0 || n == 0 {
        (event_times, vec![true; n])
    } else {
        let expected = |lambda: f64| {
            event_times
                .iter()
                .map(|t| -(-lambda * t).exp_m1())
                .sum::<f64>()
                / n as f64
                - censor_rate
        };
        let mut hi = 1.0 / event_times.iter().sum::<f64>() * n as f64;
        while expected(hi) < 0.0 {
            hi *= 2.0;
        }
        let lambda = find_root(expected, (0.0, hi), 1e-14)?;
        event_times
            .iter()
            .zip(&exp_draws)
            .map(|(&t, &e)| {
                let c = e / lambda;
                if c < t {
                    (c, false)
                } else {
                    (t, true)
                }
            })
            .unzip()
    };
    let names = (1..=beta.len()).map(|j| format!("z{j}")).collect();
    SurvivalDataset::new(times, events, rows, names)
}
