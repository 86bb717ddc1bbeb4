//! Continuous univariate models.
//!
//! [`UnivariateModel`] is the interface every other module consumes: density,
//! CDF, survival, quantile, mean and support. [`Dist`] provides the built-in
//! parametric families; linked and equilibrium models implement the trait
//! themselves.

use std::f64::consts::PI;
use std::fmt::Debug;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::quadrature::{integrate_with_breaks, QuadratureSpec};
use super::roots::brent;
use super::special::{ln_gamma, normal_cdf, normal_quantile, normal_sf, normal_upper_quantile};
use crate::error::{Error, Result};

/// Closed interval of support; endpoints may be infinite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Support {
    pub lo: f64,
    pub hi: f64,
}

impl Support {
    pub const REAL_LINE: Support = Support {
        lo: f64::NEG_INFINITY,
        hi: f64::INFINITY,
    };
    pub const NONNEGATIVE: Support = Support {
        lo: 0.0,
        hi: f64::INFINITY,
    };

    pub fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo && x <= self.hi
    }

    pub fn is_nonnegative(&self) -> bool {
        self.lo >= 0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Exponential,
    Weibull,
    Logistic,
    Normal,
    Laplace,
    StudentT,
    Gumbel,
    LogLogistic,
    PiecewiseExponential,
    Uniform,
    Custom,
}

/// A continuous distribution on an interval of the real line.
///
/// Implementations must keep `survival` accurate in the upper tail rather than
/// computing it as `1 - cdf`, since divergence integrands take logs of both.
pub trait UnivariateModel: Debug + Send + Sync {
    fn density(&self, x: f64) -> f64;

    fn ln_density(&self, x: f64) -> f64 {
        self.density(x).ln()
    }

    fn cdf(&self, x: f64) -> f64;

    fn survival(&self, x: f64) -> f64 {
        1.0 - self.cdf(x)
    }

    /// `ln S(x)`, kept finite deep in the upper tail where `S` underflows.
    fn ln_survival(&self, x: f64) -> f64 {
        self.survival(x).ln()
    }

    fn support(&self) -> Support;

    fn family(&self) -> Family {
        Family::Custom
    }

    /// Closed-form mean when one is known.
    fn mean(&self) -> Option<f64> {
        None
    }

    /// Points where the density has a kink or jump; quadrature splits there.
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }

    /// `∫_x^∞ S(t) dt` in closed form, when available.
    fn integrated_survival(&self, _x: f64) -> Option<f64> {
        None
    }

    /// Inverse CDF. The default brackets and solves with Brent, working on the
    /// survival function above the median for tail accuracy.
    fn quantile(&self, p: f64) -> Result<f64> {
        invert_by_root(self, p)
    }
}

impl<T: UnivariateModel + ?Sized> UnivariateModel for Arc<T> {
    fn density(&self, x: f64) -> f64 {
        (**self).density(x)
    }
    fn ln_density(&self, x: f64) -> f64 {
        (**self).ln_density(x)
    }
    fn cdf(&self, x: f64) -> f64 {
        (**self).cdf(x)
    }
    fn survival(&self, x: f64) -> f64 {
        (**self).survival(x)
    }
    fn ln_survival(&self, x: f64) -> f64 {
        (**self).ln_survival(x)
    }
    fn support(&self) -> Support {
        (**self).support()
    }
    fn family(&self) -> Family {
        (**self).family()
    }
    fn mean(&self) -> Option<f64> {
        (**self).mean()
    }
    fn breakpoints(&self) -> Vec<f64> {
        (**self).breakpoints()
    }
    fn integrated_survival(&self, x: f64) -> Option<f64> {
        (**self).integrated_survival(x)
    }
    fn quantile(&self, p: f64) -> Result<f64> {
        (**self).quantile(p)
    }
}

/// Bracketed inversion of the CDF (or of the survival function above the median).
pub fn invert_by_root<M: UnivariateModel + ?Sized>(model: &M, p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) || p.is_nan() {
        return Err(Error::QuantileFailure { p });
    }
    let support = model.support();
    if p == 0.0 {
        return Ok(support.lo);
    }
    if p == 1.0 {
        return Ok(support.hi);
    }
    let upper = p > 0.5;
    let h = |x: f64| {
        if upper {
            (1.0 - p) - model.survival(x)
        } else {
            model.cdf(x) - p
        }
    };

    let mut lo = if support.lo.is_finite() {
        support.lo
    } else {
        -1.0
    };
    let mut hi = if support.hi.is_finite() {
        support.hi
    } else {
        lo.max(0.0) + 1.0
    };
    let mut expansions = 0;
    while h(lo) > 0.0 {
        if support.lo.is_finite() || expansions > 2000 {
            return Err(Error::QuantileFailure { p });
        }
        let width = hi - lo;
        hi = lo;
        lo -= 2.0 * width;
        expansions += 1;
    }
    while h(hi) < 0.0 {
        if support.hi.is_finite() || expansions > 2000 {
            return Err(Error::QuantileFailure { p });
        }
        let width = hi - lo;
        lo = hi;
        hi += 2.0 * width;
        expansions += 1;
    }
    brent(&h, lo, hi, 0.0, 0.0).map_err(|_| Error::QuantileFailure { p })
}

/// Built-in parametric families.
///
/// Parameters by family:
/// - `Exponential { rate }`: `S(x) = e^{-rate x}`, `x ≥ 0`
/// - `Weibull { shape, scale }`: `S(x) = exp(-(x/scale)^shape)`
/// - `Logistic { location, scale }`: `S(x) = 1 / (1 + e^{(x-location)/scale})`
/// - `Normal { mean, sd }`
/// - `Laplace { location, scale }`
/// - `StudentT { dof, location, scale }`: CDF by quadrature of the density
/// - `Gumbel { location, scale }`: max-stable, `F(x) = exp(-e^{-(x-location)/scale})`
/// - `LogLogistic { shape, scale }`: `S(x) = 1 / (1 + (x/scale)^shape)`
/// - `PiecewiseExponential { rate, p }`: exponential with one change point at
///   `-ln(p)/rate`, the piecewise-uniform link applied to an exponential
/// - `Uniform { lo, hi }`
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Dist {
    Exponential { rate: f64 },
    Weibull { shape: f64, scale: f64 },
    Logistic { location: f64, scale: f64 },
    Normal { mean: f64, sd: f64 },
    Laplace { location: f64, scale: f64 },
    StudentT { dof: f64, location: f64, scale: f64 },
    Gumbel { location: f64, scale: f64 },
    LogLogistic { shape: f64, scale: f64 },
    PiecewiseExponential { rate: f64, p: f64 },
    Uniform { lo: f64, hi: f64 },
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParam(format!(
            "{name} must be positive and finite, got {v}"
        )))
    }
}

impl Dist {
    pub fn exponential(rate: f64) -> Result<Self> {
        positive("rate", rate)?;
        Ok(Dist::Exponential { rate })
    }

    pub fn weibull(shape: f64, scale: f64) -> Result<Self> {
        positive("shape", shape)?;
        positive("scale", scale)?;
        Ok(Dist::Weibull { shape, scale })
    }

    pub fn logistic(location: f64, scale: f64) -> Result<Self> {
        positive("scale", scale)?;
        Ok(Dist::Logistic { location, scale })
    }

    pub fn normal(mean: f64, sd: f64) -> Result<Self> {
        positive("sd", sd)?;
        Ok(Dist::Normal { mean, sd })
    }

    pub fn laplace(location: f64, scale: f64) -> Result<Self> {
        positive("scale", scale)?;
        Ok(Dist::Laplace { location, scale })
    }

    pub fn student_t(dof: f64) -> Result<Self> {
        positive("dof", dof)?;
        Ok(Dist::StudentT {
            dof,
            location: 0.0,
            scale: 1.0,
        })
    }

    pub fn gumbel(location: f64, scale: f64) -> Result<Self> {
        positive("scale", scale)?;
        Ok(Dist::Gumbel { location, scale })
    }

    pub fn log_logistic(shape: f64, scale: f64) -> Result<Self> {
        positive("shape", shape)?;
        positive("scale", scale)?;
        Ok(Dist::LogLogistic { shape, scale })
    }

    pub fn piecewise_exponential(rate: f64, p: f64) -> Result<Self> {
        positive("rate", rate)?;
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::InvalidParam(format!(
                "p must lie in (0, 1), got {p}"
            )));
        }
        Ok(Dist::PiecewiseExponential { rate, p })
    }

    pub fn uniform(lo: f64, hi: f64) -> Result<Self> {
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::InvalidParam(format!(
                "uniform needs finite lo < hi, got [{lo}, {hi}]"
            )));
        }
        Ok(Dist::Uniform { lo, hi })
    }

    pub fn validate(&self) -> Result<()> {
        let rebuilt = match *self {
            Dist::Exponential { rate } => Dist::exponential(rate),
            Dist::Weibull { shape, scale } => Dist::weibull(shape, scale),
            Dist::Logistic { location, scale } => Dist::logistic(location, scale),
            Dist::Normal { mean, sd } => Dist::normal(mean, sd),
            Dist::Laplace { location, scale } => Dist::laplace(location, scale),
            Dist::StudentT { dof, scale, .. } => positive("dof", dof)
                .and_then(|_| positive("scale", scale))
                .map(|_| *self),
            Dist::Gumbel { location, scale } => Dist::gumbel(location, scale),
            Dist::LogLogistic { shape, scale } => Dist::log_logistic(shape, scale),
            Dist::PiecewiseExponential { rate, p } => Dist::piecewise_exponential(rate, p),
            Dist::Uniform { lo, hi } => Dist::uniform(lo, hi),
        };
        rebuilt.map(|_| ())
    }

    /// Change point of the piecewise exponential family.
    pub fn change_point(&self) -> Option<f64> {
        match *self {
            Dist::PiecewiseExponential { rate, p } => Some(-p.ln() / rate),
            _ => None,
        }
    }
}

fn student_t_ln_norm(dof: f64) -> f64 {
    ln_gamma(0.5 * (dof + 1.0)) - ln_gamma(0.5 * dof) - 0.5 * (dof * PI).ln()
}

fn student_t_std_density(dof: f64, t: f64) -> f64 {
    (student_t_ln_norm(dof) - 0.5 * (dof + 1.0) * (t * t / dof).ln_1p()).exp()
}

/// Upper tail `P(T > t)` for `t ≥ 0` by quadrature of the density.
fn student_t_std_upper(dof: f64, t: f64) -> f64 {
    let spec = QuadratureSpec {
        rel_tol: 1e-13,
        abs_tol: 1e-16,
        max_subdivisions: 500,
        ..QuadratureSpec::default()
    };
    let dens = |x: f64| student_t_std_density(dof, x);
    let r = if t <= 1.0 {
        integrate_with_breaks(dens, 0.0, t, &[], &spec).map(|r| 0.5 - r.value)
    } else {
        integrate_with_breaks(dens, t, f64::INFINITY, &[], &spec).map(|r| r.value)
    };
    r.unwrap_or_else(|e| match e {
        Error::NonConvergent { value, .. } => {
            if t <= 1.0 {
                0.5 - value
            } else {
                value
            }
        }
        _ => f64::NAN,
    })
}

impl UnivariateModel for Dist {
    fn density(&self, x: f64) -> f64 {
        match *self {
            Dist::Uniform { lo, hi } => {
                if x >= lo && x <= hi {
                    1.0 / (hi - lo)
                } else {
                    0.0
                }
            }
            _ => {
                if self.support().contains(x) {
                    self.ln_density(x).exp()
                } else {
                    0.0
                }
            }
        }
    }

    fn ln_density(&self, x: f64) -> f64 {
        if !self.support().contains(x) {
            return f64::NEG_INFINITY;
        }
        match *self {
            Dist::Exponential { rate } => rate.ln() - rate * x,
            Dist::Weibull { shape, scale } => {
                let z = x / scale;
                (shape / scale).ln() + (shape - 1.0) * z.ln() - z.powf(shape)
            }
            Dist::Logistic { location, scale } => {
                let z = ((x - location) / scale).abs();
                -z - 2.0 * (-z).exp().ln_1p() - scale.ln()
            }
            Dist::Normal { mean, sd } => {
                let z = (x - mean) / sd;
                -0.5 * z * z - super::special::LN_SQRT_2PI - sd.ln()
            }
            Dist::Laplace { location, scale } => {
                -((x - location).abs() / scale) - (2.0 * scale).ln()
            }
            Dist::StudentT {
                dof,
                location,
                scale,
            } => {
                let z = (x - location) / scale;
                student_t_ln_norm(dof) - 0.5 * (dof + 1.0) * (z * z / dof).ln_1p() - scale.ln()
            }
            Dist::Gumbel { location, scale } => {
                let z = (x - location) / scale;
                -(z + (-z).exp()) - scale.ln()
            }
            Dist::LogLogistic { shape, scale } => {
                let lz = (x / scale).ln();
                // f = (k/σ) z^{k-1} / (1+z^k)^2
                let kl = shape * lz;
                (shape / scale).ln() + (shape - 1.0) * lz - 2.0 * super::special::softplus(kl)
            }
            Dist::PiecewiseExponential { rate, p } => {
                let xp = -p.ln() / rate;
                let factor = if x < xp { p / (1.0 - p) } else { (1.0 - p) / p };
                factor.ln() + rate.ln() - rate * x
            }
            Dist::Uniform { lo, hi } => -(hi - lo).ln(),
        }
    }

    fn cdf(&self, x: f64) -> f64 {
        let s = self.support();
        if x <= s.lo {
            return 0.0;
        }
        if x >= s.hi {
            return 1.0;
        }
        match *self {
            Dist::Exponential { rate } => -(-rate * x).exp_m1(),
            Dist::Weibull { shape, scale } => -(-(x / scale).powf(shape)).exp_m1(),
            Dist::Logistic { location, scale } => super::special::sigmoid((x - location) / scale),
            Dist::Normal { mean, sd } => normal_cdf((x - mean) / sd),
            Dist::Laplace { location, scale } => {
                let z = (x - location) / scale;
                if z < 0.0 {
                    0.5 * z.exp()
                } else {
                    1.0 - 0.5 * (-z).exp()
                }
            }
            Dist::StudentT {
                dof,
                location,
                scale,
            } => {
                let z = (x - location) / scale;
                if z >= 0.0 {
                    1.0 - student_t_std_upper(dof, z)
                } else {
                    student_t_std_upper(dof, -z)
                }
            }
            Dist::Gumbel { location, scale } => (-(-(x - location) / scale).exp()).exp(),
            Dist::LogLogistic { shape, scale } => super::special::sigmoid(shape * (x / scale).ln()),
            Dist::PiecewiseExponential { .. } => 1.0 - self.survival(x),
            Dist::Uniform { lo, hi } => (x - lo) / (hi - lo),
        }
    }

    fn survival(&self, x: f64) -> f64 {
        let s = self.support();
        if x <= s.lo {
            return 1.0;
        }
        if x >= s.hi {
            return 0.0;
        }
        match *self {
            Dist::Exponential { rate } => (-rate * x).exp(),
            Dist::Weibull { shape, scale } => (-(x / scale).powf(shape)).exp(),
            Dist::Logistic { location, scale } => super::special::sigmoid(-(x - location) / scale),
            Dist::Normal { mean, sd } => normal_sf((x - mean) / sd),
            Dist::Laplace { location, scale } => {
                let z = (x - location) / scale;
                if z < 0.0 {
                    1.0 - 0.5 * z.exp()
                } else {
                    0.5 * (-z).exp()
                }
            }
            Dist::StudentT {
                dof,
                location,
                scale,
            } => {
                let z = (x - location) / scale;
                if z >= 0.0 {
                    student_t_std_upper(dof, z)
                } else {
                    1.0 - student_t_std_upper(dof, -z)
                }
            }
            Dist::Gumbel { location, scale } => -(-(-(x - location) / scale).exp()).exp_m1(),
            Dist::LogLogistic { shape, scale } => {
                super::special::sigmoid(-shape * (x / scale).ln())
            }
            Dist::PiecewiseExponential { rate, p } => {
                let u = (-rate * x).exp();
                if u >= p {
                    1.0 - p + p / (1.0 - p) * (u - p)
                } else {
                    (1.0 - p) / p * u
                }
            }
            Dist::Uniform { lo, hi } => (hi - x) / (hi - lo),
        }
    }

    fn ln_survival(&self, x: f64) -> f64 {
        let s = self.support();
        if x <= s.lo {
            return 0.0;
        }
        if x >= s.hi {
            return f64::NEG_INFINITY;
        }
        match *self {
            Dist::Exponential { rate } => -rate * x,
            Dist::Weibull { shape, scale } => -(x / scale).powf(shape),
            Dist::Logistic { location, scale } => -super::special::softplus((x - location) / scale),
            Dist::Laplace { location, scale } if x >= location => {
                -std::f64::consts::LN_2 - (x - location) / scale
            }
            Dist::LogLogistic { shape, scale } => {
                -super::special::softplus(shape * (x / scale).ln())
            }
            Dist::PiecewiseExponential { rate, p } if x >= -p.ln() / rate => {
                ((1.0 - p) / p).ln() - rate * x
            }
            Dist::Gumbel { location, scale } => {
                let z = (x - location) / scale;
                let e = (-z).exp();
                if e < 1e-8 {
                    // 1 − exp(−e) = e(1 − e/2 + ...)
                    -z + (-0.5 * e).ln_1p()
                } else {
                    (-(-e).exp_m1()).ln()
                }
            }
            _ => self.survival(x).ln(),
        }
    }

    fn support(&self) -> Support {
        match *self {
            Dist::Exponential { .. }
            | Dist::Weibull { .. }
            | Dist::LogLogistic { .. }
            | Dist::PiecewiseExponential { .. } => Support::NONNEGATIVE,
            Dist::Uniform { lo, hi } => Support::new(lo, hi),
            _ => Support::REAL_LINE,
        }
    }

    fn family(&self) -> Family {
        match self {
            Dist::Exponential { .. } => Family::Exponential,
            Dist::Weibull { .. } => Family::Weibull,
            Dist::Logistic { .. } => Family::Logistic,
            Dist::Normal { .. } => Family::Normal,
            Dist::Laplace { .. } => Family::Laplace,
            Dist::StudentT { .. } => Family::StudentT,
            Dist::Gumbel { .. } => Family::Gumbel,
            Dist::LogLogistic { .. } => Family::LogLogistic,
            Dist::PiecewiseExponential { .. } => Family::PiecewiseExponential,
            Dist::Uniform { .. } => Family::Uniform,
        }
    }

    fn mean(&self) -> Option<f64> {
        match *self {
            Dist::Exponential { rate } => Some(1.0 / rate),
            Dist::Weibull { shape, scale } => {
                Some(scale * super::special::gamma(1.0 + 1.0 / shape))
            }
            Dist::Logistic { location, .. } | Dist::Laplace { location, .. } => Some(location),
            Dist::Normal { mean, .. } => Some(mean),
            Dist::StudentT { dof, location, .. } => (dof > 1.0).then_some(location),
            Dist::Gumbel { location, scale } => Some(location + scale * 0.577_215_664_901_532_9),
            Dist::LogLogistic { shape, scale } => {
                (shape > 1.0).then(|| scale * (PI / shape) / (PI / shape).sin())
            }
            Dist::PiecewiseExponential { rate, p } => {
                Some(((1.0 - 2.0 * p) / (1.0 - p)) * (-p.ln() / rate) + 1.0 / rate)
            }
            Dist::Uniform { lo, hi } => Some(0.5 * (lo + hi)),
        }
    }

    fn breakpoints(&self) -> Vec<f64> {
        match *self {
            Dist::Laplace { location, .. } => vec![location],
            Dist::PiecewiseExponential { .. } => self.change_point().into_iter().collect(),
            _ => Vec::new(),
        }
    }

    fn integrated_survival(&self, x: f64) -> Option<f64> {
        match *self {
            Dist::Exponential { rate } => Some(self.survival(x) / rate),
            Dist::Uniform { lo, hi } => {
                let t = x.clamp(lo, hi);
                let below = (lo - x).max(0.0);
                Some(below + (hi - t) * (hi - t) / (2.0 * (hi - lo)))
            }
            _ => None,
        }
    }

    fn quantile(&self, p: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&p) || p.is_nan() {
            return Err(Error::QuantileFailure { p });
        }
        let s = self.support();
        if p == 0.0 {
            return Ok(s.lo);
        }
        if p == 1.0 {
            return Ok(s.hi);
        }
        let q = match *self {
            Dist::Exponential { rate } => -(-p).ln_1p() / rate,
            Dist::Weibull { shape, scale } => scale * (-(-p).ln_1p()).powf(1.0 / shape),
            Dist::Logistic { location, scale } => location + scale * (p / (1.0 - p)).ln(),
            Dist::Normal { mean, sd } => {
                let z = if p > 0.5 {
                    normal_upper_quantile(1.0 - p)
                } else {
                    normal_quantile(p)
                };
                mean + sd * z
            }
            Dist::Laplace { location, scale } => {
                if p < 0.5 {
                    location + scale * (2.0 * p).ln()
                } else {
                    location - scale * (2.0 * (1.0 - p)).ln()
                }
            }
            Dist::Gumbel { location, scale } => location - scale * (-p.ln()).ln(),
            Dist::LogLogistic { shape, scale } => scale * (p / (1.0 - p)).powf(1.0 / shape),
            Dist::Uniform { lo, hi } => lo + p * (hi - lo),
            Dist::StudentT { .. } | Dist::PiecewiseExponential { .. } => {
                return invert_by_root(self, p)
            }
        };
        Ok(q)
    }
}

/// Mean of a nonnegative model as `∫₀^∞ S(x) dx`.
pub fn model_mean_via_survival<M: UnivariateModel + ?Sized>(
    model: &M,
    spec: &QuadratureSpec,
) -> Result<f64> {
    let support = model.support();
    if !support.is_nonnegative() {
        return Err(Error::SupportMismatch(format!(
            "mean via survival needs support in [0, inf), got [{}, {}]",
            support.lo, support.hi
        )));
    }
    let r = integrate_with_breaks(
        |x| model.survival(x),
        support.lo,
        support.hi,
        &model.breakpoints(),
        spec,
    )
    .map_err(|e| match e {
        Error::NonConvergent { value, .. } => Error::DivergentMean(format!(
            "survival integral did not converge (last estimate {value})"
        )),
        other => other,
    })?;
    if !r.value.is_finite() || r.value <= 0.0 {
        return Err(Error::DivergentMean(format!(
            "survival integral = {}",
            r.value
        )));
    }
    Ok(support.lo + r.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::quadrature::integrate_with_breaks;

    fn families() -> Vec<Dist> {
        vec![
            Dist::exponential(1.7).unwrap(),
            Dist::weibull(2.0, 1.3).unwrap(),
            Dist::weibull(0.8, 0.5).unwrap(),
            Dist::logistic(0.4, 1.5).unwrap(),
            Dist::normal(-1.0, 2.0).unwrap(),
            Dist::laplace(0.5, 0.7).unwrap(),
            Dist::student_t(4.0).unwrap(),
            Dist::gumbel(0.3, 1.2).unwrap(),
            Dist::log_logistic(2.5, 3.0).unwrap(),
            Dist::piecewise_exponential(1.0, 0.25).unwrap(),
            Dist::uniform(-1.0, 3.0).unwrap(),
        ]
    }

    #[test]
    fn densities_integrate_to_one() {
        let spec = QuadratureSpec::default();
        for d in families() {
            let s = d.support();
            let r = integrate_with_breaks(|x| d.density(x), s.lo, s.hi, &d.breakpoints(), &spec)
                .unwrap();
            assert!((r.value - 1.0).abs() < 1e-8, "{d:?}: {}", r.value);
        }
    }

    #[test]
    fn quantile_inverts_cdf() {
        for d in families() {
            let s = d.support();
            for &p in &[0.01, 0.1, 0.3, 0.5, 0.77, 0.95, 0.999] {
                let x = d.quantile(p).unwrap();
                assert!(s.contains(x));
                assert!((d.cdf(x) - p).abs() < 1e-10, "{d:?} p={p}");
                let back = d.quantile(d.cdf(x)).unwrap();
                assert!((back - x).abs() < 1e-8 * (1.0 + x.abs()), "{d:?} x={x}");
            }
        }
    }

    #[test]
    fn survival_complements_cdf_and_is_monotone() {
        for d in families() {
            let mut prev = 0.0;
            for i in 0..200 {
                let x = -10.0 + 0.1 * i as f64;
                let c = d.cdf(x);
                assert!((c + d.survival(x) - 1.0).abs() < 1e-12, "{d:?} x={x}");
                assert!(c >= prev - 1e-15);
                prev = c;
            }
        }
    }

    #[test]
    fn cdf_hits_endpoints() {
        for d in families() {
            let s = d.support();
            let lo = if s.lo.is_finite() { s.lo } else { -1e6 };
            let hi = if s.hi.is_finite() { s.hi } else { 1e6 };
            assert!(d.cdf(lo) < 1e-6, "{d:?}");
            assert!((d.cdf(hi) - 1.0).abs() < 1e-6, "{d:?}");
        }
    }

    #[test]
    fn closed_form_means_match_survival_integral() {
        let spec = QuadratureSpec::default();
        for d in families()
            .into_iter()
            .filter(|d| d.support().is_nonnegative())
        {
            let m = model_mean_via_survival(&d, &spec).unwrap();
            assert!((m - d.mean().unwrap()).abs() < 1e-8, "{d:?}");
        }
    }

    #[test]
    fn mean_examples() {
        let spec = QuadratureSpec::default();
        let m = model_mean_via_survival(&Dist::exponential(2.0).unwrap(), &spec).unwrap();
        assert!((m - 0.5).abs() < 1e-10);
        let m = model_mean_via_survival(&Dist::weibull(2.0, 1.0).unwrap(), &spec).unwrap();
        // Γ(1.5) = √π / 2
        assert!((m - PI.sqrt() / 2.0).abs() < 1e-9);
        assert!((m - 0.886_227).abs() < 1e-6);
    }

    #[test]
    fn ln_survival_stays_finite_in_the_tail() {
        for d in families() {
            for &x in &[0.3, 2.0, 9.0] {
                let direct = d.survival(x).ln();
                if direct == f64::NEG_INFINITY {
                    assert_eq!(d.ln_survival(x), direct);
                    continue;
                }
                assert!(
                    (d.ln_survival(x) - direct).abs() < 1e-12 * (1.0 + direct.abs()),
                    "{d:?} x={x}"
                );
            }
        }
        assert_eq!(Dist::exponential(2.0).unwrap().ln_survival(1e4), -2e4);
        assert!((Dist::gumbel(0.0, 1.0).unwrap().ln_survival(800.0) + 800.0).abs() < 1e-9);
        assert!((Dist::logistic(0.0, 1.0).unwrap().ln_survival(900.0) + 900.0).abs() < 1e-9);
    }

    #[test]
    fn heavy_tail_mean_diverges() {
        let spec = QuadratureSpec::default();
        let err =
            model_mean_via_survival(&Dist::log_logistic(1.0, 1.0).unwrap(), &spec).unwrap_err();
        assert!(matches!(err, Error::DivergentMean(_)));
        let err = model_mean_via_survival(&Dist::normal(0.0, 1.0).unwrap(), &spec).unwrap_err();
        assert!(matches!(err, Error::SupportMismatch(_)));
    }

    #[test]
    fn piecewise_exponential_is_continuous_at_change_point() {
        let d = Dist::piecewise_exponential(1.0, 0.25).unwrap();
        let xp = d.change_point().unwrap();
        assert!((xp - 4f64.ln()).abs() < 1e-15);
        assert!((d.survival(xp) - 0.75).abs() < 1e-15);
        assert!((d.survival(xp - 1e-12) - d.survival(xp + 1e-12)).abs() < 1e-11);
    }

    #[test]
    fn student_t_cdf_matches_closed_form_for_two_dof() {
        // ν = 2: F(t) = 1/2 + t / (2 sqrt(2 + t²))
        let d = Dist::student_t(2.0).unwrap();
        for &t in &[-7.0f64, -1.2, 0.0, 0.4, 3.3, 40.0] {
            let exact = 0.5 + t / (2.0 * (2.0 + t * t).sqrt());
            assert!((d.cdf(t) - exact).abs() < 1e-12, "t={t}");
        }
    }

    #[test]
    fn invalid_parameters_rejected() {
        assert!(Dist::exponential(0.0).is_err());
        assert!(Dist::weibull(-1.0, 1.0).is_err());
        assert!(Dist::piecewise_exponential(1.0, 1.0).is_err());
        assert!(Dist::uniform(1.0, 1.0).is_err());
        assert!(Dist::Exponential { rate: -2.0 }.validate().is_err());
    }
}
