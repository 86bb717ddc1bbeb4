//! Link functions and the models they generate.
//!
//! A [`UnitLink`] is a CDF on `[0, 1]` applied to a survival function,
//! `S₁(x) = G(S₂(x))`. A [`RealLink`] is a CDF on the real line used as a
//! generalized location link, `F₁(x) = G(G⁻¹(F₂(x)) + θ)`. Either way the
//! result is a [`LinkedModel`], itself a [`UnivariateModel`].

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::numerics::distributions::{Dist, Support, UnivariateModel};
use crate::numerics::roots::brent;
use crate::numerics::special::{normal_quantile, normal_upper_quantile};

type UnitFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A user-supplied link on `[0, 1]`.
#[derive(Clone)]
pub struct CustomLink {
    pub name: String,
    pub cdf: UnitFn,
    pub density: UnitFn,
    /// `g'(u)`; a central difference of `density` is used when absent.
    pub derivative: Option<UnitFn>,
    pub breakpoints: Vec<f64>,
}

impl fmt::Debug for CustomLink {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomLink")
            .field("name", &self.name)
            .field("breakpoints", &self.breakpoints)
            .finish_non_exhaustive()
    }
}

/// Survival links `G: [0, 1] → [0, 1]`.
#[derive(Debug, Clone)]
pub enum UnitLink {
    /// `G(u) = u`; the identity transform.
    Uniform,
    /// Proportional odds with tilt `α`: `G(u) = αu / (1 − (1−α)u)`.
    Po {
        alpha: f64,
    },
    /// Two-piece uniform density with change point `p`; `G(p) = 1 − p`.
    PiecewiseUniform {
        p: f64,
    },
    /// Proportional hazards: `G(u) = u^π`.
    Power {
        pi: f64,
    },
    Custom(CustomLink),
}

impl UnitLink {
    pub fn po(alpha: f64) -> Result<Self> {
        let l = UnitLink::Po { alpha };
        l.validate()?;
        Ok(l)
    }

    pub fn piecewise_uniform(p: f64) -> Result<Self> {
        let l = UnitLink::PiecewiseUniform { p };
        l.validate()?;
        Ok(l)
    }

    pub fn power(pi: f64) -> Result<Self> {
        let l = UnitLink::Power { pi };
        l.validate()?;
        Ok(l)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            UnitLink::Po { alpha } if !(alpha > 0.0 && alpha.is_finite()) => Err(
                Error::InvalidParam(format!("PO tilt must be positive and finite, got {alpha}")),
            ),
            UnitLink::PiecewiseUniform { p } if !(p > 0.0 && p < 1.0) => Err(Error::InvalidParam(
                format!("piecewise-uniform p must lie in (0, 1), got {p}"),
            )),
            UnitLink::Power { pi } if !(pi > 0.0 && pi.is_finite()) => Err(Error::InvalidParam(
                format!("power must be positive and finite, got {pi}"),
            )),
            _ => Ok(()),
        }
    }

    pub fn name(&self) -> String {
        match self {
            UnitLink::Uniform => "uniform".into(),
            UnitLink::Po { alpha } => format!("po(alpha={alpha})"),
            UnitLink::PiecewiseUniform { p } => format!("piecewise_uniform(p={p})"),
            UnitLink::Power { pi } => format!("power(pi={pi})"),
            UnitLink::Custom(c) => c.name.clone(),
        }
    }

    /// `(G(u), 1 − G(u))` given `u` and its complement `w = 1 − u`, each
    /// accurate near its own end of the interval.
    pub fn cdf_pair(&self, u: f64, w: f64) -> (f64, f64) {
        match *self {
            UnitLink::Uniform => (u, w),
            UnitLink::Po { alpha } => {
                let den = alpha + (1.0 - alpha) * w;
                (alpha * u / den, w / den)
            }
            UnitLink::PiecewiseUniform { p } => {
                if u < p {
                    let g = (1.0 - p) * u / p;
                    (g, 1.0 - g)
                } else {
                    let c = p * w / (1.0 - p);
                    (1.0 - c, c)
                }
            }
            UnitLink::Power { pi } => {
                let ln_u = if w < 0.5 { (-w).ln_1p() } else { u.ln() };
                let g = (pi * ln_u).exp();
                (g, -(pi * ln_u).exp_m1())
            }
            UnitLink::Custom(ref c) => {
                let g = (c.cdf)(u);
                (g, 1.0 - g)
            }
        }
    }

    pub fn cdf(&self, u: f64) -> f64 {
        self.cdf_pair(u, 1.0 - u).0
    }

    pub fn density(&self, u: f64) -> f64 {
        match *self {
            UnitLink::Uniform => 1.0,
            UnitLink::Po { alpha } => {
                let d = 1.0 - (1.0 - alpha) * u;
                alpha / (d * d)
            }
            UnitLink::PiecewiseUniform { p } => {
                if u < p {
                    (1.0 - p) / p
                } else {
                    p / (1.0 - p)
                }
            }
            UnitLink::Power { pi } => pi * u.powf(pi - 1.0),
            UnitLink::Custom(ref c) => (c.density)(u),
        }
    }

    pub fn ln_density(&self, u: f64) -> f64 {
        match *self {
            UnitLink::Uniform => 0.0,
            UnitLink::Po { alpha } => alpha.ln() - 2.0 * (-(1.0 - alpha) * u).ln_1p(),
            UnitLink::Power { pi } => pi.ln() + (pi - 1.0) * u.ln(),
            _ => self.density(u).ln(),
        }
    }

    /// `ln g(u)` evaluated from `ln u`, for `u` too small to represent.
    pub fn ln_density_from_ln(&self, ln_u: f64) -> f64 {
        match *self {
            UnitLink::Power { pi } => pi.ln() + (pi - 1.0) * ln_u,
            _ => self.ln_density(ln_u.exp()),
        }
    }

    /// `g'(u)`.
    pub fn density_derivative(&self, u: f64) -> f64 {
        match *self {
            UnitLink::Uniform | UnitLink::PiecewiseUniform { .. } => 0.0,
            UnitLink::Po { alpha } => {
                let ab = 1.0 - alpha;
                let d = 1.0 - ab * u;
                2.0 * alpha * ab / (d * d * d)
            }
            UnitLink::Power { pi } => pi * (pi - 1.0) * u.powf(pi - 2.0),
            UnitLink::Custom(ref c) => match &c.derivative {
                Some(d) => d(u),
                None => {
                    let h = 1e-6;
                    let (a, b) = ((u - h).max(0.0), (u + h).min(1.0));
                    ((c.density)(b) - (c.density)(a)) / (b - a)
                }
            },
        }
    }

    /// `G⁻¹(s)`.
    pub fn inverse(&self, s: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&s) {
            return Err(Error::QuantileFailure { p: s });
        }
        Ok(match *self {
            UnitLink::Uniform => s,
            UnitLink::Po { alpha } => s / (alpha + (1.0 - alpha) * s),
            UnitLink::PiecewiseUniform { p } => {
                if s < 1.0 - p {
                    s * p / (1.0 - p)
                } else {
                    p + (s - (1.0 - p)) * (1.0 - p) / p
                }
            }
            UnitLink::Power { pi } => s.powf(1.0 / pi),
            UnitLink::Custom(ref c) => {
                if s == 0.0 || s == 1.0 {
                    s
                } else {
                    brent(&|u| (c.cdf)(u) - s, 0.0, 1.0, 0.0, 0.0)
                        .map_err(|_| Error::QuantileFailure { p: s })?
                }
            }
        })
    }

    /// Points in `(0, 1)` where `g` is discontinuous.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            UnitLink::PiecewiseUniform { p } => vec![*p],
            UnitLink::Custom(c) => c.breakpoints.clone(),
            _ => Vec::new(),
        }
    }
}

/// The piecewise-uniform density on the real line with an asymmetric centre.
///
/// Density `a₁` on `[−θ/2, 0)`, `a₂` on `[0, θ/2)`, and `b_k = n^{−(k−1)}` on
/// the band pair `(2k−1)θ/2 < |x| < (2k+1)θ/2`, `k ≥ 1`. Each band has width
/// `θ` per side, so total mass is `θ(a₁+a₂)/2 + 2θ·n/(n−1)`, which equals one
/// exactly when `(a₁+a₂)/2 = 1/θ − 2n/(n−1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymmetricPw {
    pub theta: f64,
    pub a1: f64,
    pub a2: f64,
    pub n: f64,
    /// Bands kept for integration; mass beyond is `O(n^{−truncation})`.
    pub truncation: usize,
}

pub const DEFAULT_TRUNCATION: usize = 60;

impl AsymmetricPw {
    pub fn new(theta: f64, a1: f64, a2: f64, n: f64, truncation: usize) -> Result<Self> {
        if !(theta > 0.0 && theta.is_finite()) || !(a1 > 0.0) || !(a2 > 0.0) || !(n > 1.0) {
            return Err(Error::InvalidParam(format!(
                "asymmetric piecewise density needs theta > 0, a1 > 0, a2 > 0, n > 1 (got {theta}, {a1}, {a2}, {n})"
            )));
        }
        if truncation == 0 {
            return Err(Error::InvalidParam("truncation must be at least 1".into()));
        }
        let lhs = 0.5 * (a1 + a2);
        let rhs = 1.0 / theta - 2.0 * n / (n - 1.0);
        if (lhs - rhs).abs() > 1e-9 {
            return Err(Error::ConstraintViolated(format!(
                "(a1 + a2)/2 = {lhs} but 1/theta - 2n/(n-1) = {rhs}"
            )));
        }
        Ok(Self {
            theta,
            a1,
            a2,
            n,
            truncation,
        })
    }

    fn band(&self, ax: f64) -> f64 {
        (ax / self.theta).round()
    }

    fn band_height(&self, k: f64) -> f64 {
        self.n.powf(-(k - 1.0))
    }

    /// Mass on one side beyond the outer edge of band `k` (`k = 0` is the
    /// central plateau edge θ/2).
    fn tail_beyond(&self, k: f64) -> f64 {
        self.theta * self.n / (self.n - 1.0) * self.n.powf(-k)
    }

    pub fn density(&self, x: f64) -> f64 {
        let ax = x.abs();
        if ax < 0.5 * self.theta {
            if x < 0.0 {
                self.a1
            } else {
                self.a2
            }
        } else {
            self.band_height(self.band(ax))
        }
    }

    pub fn ln_density(&self, x: f64) -> f64 {
        let ax = x.abs();
        if ax < 0.5 * self.theta {
            self.density(x).ln()
        } else {
            -(self.band(ax) - 1.0) * self.n.ln()
        }
    }

    /// Mass beyond `|x|` on the side whose central plateau has height `a`.
    fn side_tail(&self, ax: f64, a: f64) -> f64 {
        let half = 0.5 * self.theta;
        if ax < half {
            a * (half - ax) + self.tail_beyond(0.0)
        } else {
            let k = self.band(ax);
            self.band_height(k) * ((2.0 * k + 1.0) * half - ax) + self.tail_beyond(k)
        }
    }

    /// Inverse of `side_tail`: the `|x|` with the given one-sided tail mass.
    fn side_tail_inverse(&self, m: f64, a: f64) -> f64 {
        let half = 0.5 * self.theta;
        let c0 = self.tail_beyond(0.0);
        if m >= c0 {
            return (half - (m - c0) / a).max(0.0);
        }
        if m <= 0.0 {
            return f64::INFINITY;
        }
        let mut k = ((c0 / m).ln() / self.n.ln()).ceil().max(1.0);
        while self.tail_beyond(k) > m {
            k += 1.0;
        }
        while k > 1.0 && self.tail_beyond(k - 1.0) <= m {
            k -= 1.0;
        }
        (2.0 * k + 1.0) * half - (m - self.tail_beyond(k)) / self.band_height(k)
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            self.side_tail(-x, self.a1)
        } else {
            1.0 - self.side_tail(x, self.a2)
        }
    }

    pub fn ccdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            1.0 - self.side_tail(-x, self.a1)
        } else {
            self.side_tail(x, self.a2)
        }
    }

    pub fn quantile(&self, u: f64) -> f64 {
        let left_mass = self.side_tail(0.0, self.a1);
        if u <= left_mass {
            -self.side_tail_inverse(u, self.a1)
        } else {
            self.side_tail_inverse(1.0 - u, self.a2)
        }
    }

    pub fn upper_quantile(&self, s: f64) -> f64 {
        let right_mass = self.side_tail(0.0, self.a2);
        if s <= right_mass {
            self.side_tail_inverse(s, self.a2)
        } else {
            -self.side_tail_inverse(1.0 - s, self.a1)
        }
    }

    /// Sum of rectangle areas over the central plateaus and `k` band pairs.
    pub fn truncated_mass(&self, k: usize) -> f64 {
        let bands: f64 = (1..=k).map(|j| self.band_height(j as f64)).sum();
        0.5 * self.theta * (self.a1 + self.a2) + 2.0 * self.theta * bands
    }

    /// Outer edge of the last retained band.
    pub fn reach(&self) -> f64 {
        (2.0 * self.truncation as f64 + 1.0) * 0.5 * self.theta
    }

    pub fn breakpoints(&self) -> Vec<f64> {
        let half = 0.5 * self.theta;
        let mut out = vec![0.0];
        for k in 0..=self.truncation {
            let e = (2.0 * k as f64 + 1.0) * half;
            out.push(e);
            out.push(-e);
        }
        out.sort_by(f64::total_cmp);
        out
    }
}

/// Generalized location links: CDFs `G` with support the whole real line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RealLink {
    Probit,
    Logit,
    Laplace,
    StudentT {
        dof: f64,
    },
    /// Max-stable Gumbel, `G(y) = exp(−e^{−y})`.
    Gumbel,
    AsymmetricPw(AsymmetricPw),
}

/// Builds the asymmetric piecewise-uniform link, checking its normalization.
pub fn asymmetric_pw_density(
    theta: f64,
    a1: f64,
    a2: f64,
    n: f64,
    truncation: usize,
) -> Result<RealLink> {
    AsymmetricPw::new(theta, a1, a2, n, truncation).map(RealLink::AsymmetricPw)
}

impl RealLink {
    pub fn student_t(dof: f64) -> Result<Self> {
        Dist::student_t(dof)?;
        Ok(RealLink::StudentT { dof })
    }

    pub fn name(&self) -> String {
        match self {
            RealLink::Probit => "probit".into(),
            RealLink::Logit => "logit".into(),
            RealLink::Laplace => "laplace".into(),
            RealLink::StudentT { dof } => format!("student_t(dof={dof})"),
            RealLink::Gumbel => "gumbel".into(),
            RealLink::AsymmetricPw(a) => format!(
                "asymmetric_pw(theta={}, a1={}, a2={}, n={})",
                a.theta, a.a1, a.a2, a.n
            ),
        }
    }

    /// The standard distribution behind the link, for the parametric cases.
    pub fn standard(&self) -> Option<Dist> {
        match *self {
            RealLink::Probit => Some(Dist::Normal { mean: 0.0, sd: 1.0 }),
            RealLink::Logit => Some(Dist::Logistic {
                location: 0.0,
                scale: 1.0,
            }),
            RealLink::Laplace => Some(Dist::Laplace {
                location: 0.0,
                scale: 1.0,
            }),
            RealLink::StudentT { dof } => Some(Dist::StudentT {
                dof,
                location: 0.0,
                scale: 1.0,
            }),
            RealLink::Gumbel => Some(Dist::Gumbel {
                location: 0.0,
                scale: 1.0,
            }),
            RealLink::AsymmetricPw(_) => None,
        }
    }

    pub fn density(&self, y: f64) -> f64 {
        match self {
            RealLink::AsymmetricPw(a) => a.density(y),
            _ => self.standard().map_or(f64::NAN, |d| d.density(y)),
        }
    }

    pub fn ln_density(&self, y: f64) -> f64 {
        match self {
            RealLink::AsymmetricPw(a) => a.ln_density(y),
            _ => self.standard().map_or(f64::NAN, |d| d.ln_density(y)),
        }
    }

    pub fn cdf(&self, y: f64) -> f64 {
        match self {
            RealLink::AsymmetricPw(a) => a.cdf(y),
            _ => self.standard().map_or(f64::NAN, |d| d.cdf(y)),
        }
    }

    /// `1 − G(y)`, accurate in the upper tail.
    pub fn ccdf(&self, y: f64) -> f64 {
        match self {
            RealLink::AsymmetricPw(a) => a.ccdf(y),
            _ => self.standard().map_or(f64::NAN, |d| d.survival(y)),
        }
    }

    /// `G⁻¹(u)`.
    pub fn quantile(&self, u: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&u) {
            return Err(Error::QuantileFailure { p: u });
        }
        match *self {
            RealLink::Probit => Ok(normal_quantile(u)),
            RealLink::Logit => Ok((u / (1.0 - u)).ln()),
            RealLink::AsymmetricPw(a) => Ok(a.quantile(u)),
            _ => self
                .standard()
                .ok_or(Error::QuantileFailure { p: u })?
                .quantile(u),
        }
    }

    /// The `y` with `1 − G(y) = s`, accurate for small `s`.
    pub fn upper_quantile(&self, s: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&s) {
            return Err(Error::QuantileFailure { p: 1.0 - s });
        }
        match *self {
            RealLink::Probit => Ok(normal_upper_quantile(s)),
            RealLink::Logit => Ok(((1.0 - s) / s).ln()),
            RealLink::Laplace => Ok(if s < 0.5 {
                -(2.0 * s).ln()
            } else {
                (2.0 * (1.0 - s)).ln()
            }),
            RealLink::StudentT { .. } => self.quantile(s).map(|q| -q),
            RealLink::Gumbel => Ok(-(-(-s).ln_1p()).ln()),
            RealLink::AsymmetricPw(a) => Ok(a.upper_quantile(s)),
        }
    }

    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            RealLink::Laplace => vec![0.0],
            RealLink::AsymmetricPw(a) => a.breakpoints(),
            _ => Vec::new(),
        }
    }

    /// Interval over which divergence integrals are taken.
    pub fn integration_domain(&self) -> (f64, f64) {
        match self {
            RealLink::AsymmetricPw(a) => (-a.reach(), a.reach()),
            _ => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    /// True when the density is an even function.
    pub fn is_symmetric(&self) -> bool {
        match self {
            RealLink::Gumbel => false,
            RealLink::AsymmetricPw(a) => a.a1 == a.a2,
            _ => true,
        }
    }
}

/// How a [`LinkedModel`] is derived from its base.
#[derive(Debug, Clone)]
pub enum Transform {
    /// `S₁ = G(S₂)`.
    Survival(UnitLink),
    /// `F₁ = G(G⁻¹(F₂) + θ)`.
    Location { link: RealLink, shift: f64 },
}

/// A model obtained by linking a base model.
#[derive(Debug, Clone)]
pub struct LinkedModel {
    base: Arc<dyn UnivariateModel>,
    transform: Transform,
}

pub fn po_transform<B: UnivariateModel + 'static>(alpha: f64, base: B) -> Result<LinkedModel> {
    LinkedModel::survival(UnitLink::po(alpha)?, base)
}

pub fn piecewise_uniform_transform<B: UnivariateModel + 'static>(
    p: f64,
    base: B,
) -> Result<LinkedModel> {
    LinkedModel::survival(UnitLink::piecewise_uniform(p)?, base)
}

pub fn gll_transform<B: UnivariateModel + 'static>(
    link: RealLink,
    theta: f64,
    base: B,
) -> Result<LinkedModel> {
    LinkedModel::location(link, theta, base)
}

impl LinkedModel {
    pub fn survival<B: UnivariateModel + 'static>(link: UnitLink, base: B) -> Result<Self> {
        link.validate()?;
        Ok(Self {
            base: Arc::new(base),
            transform: Transform::Survival(link),
        })
    }

    pub fn location<B: UnivariateModel + 'static>(
        link: RealLink,
        shift: f64,
        base: B,
    ) -> Result<Self> {
        if !shift.is_finite() {
            return Err(Error::InvalidParam(format!(
                "shift must be finite, got {shift}"
            )));
        }
        let s = base.support();
        if !(s.lo < s.hi) {
            return Err(Error::SupportMismatch(format!(
                "base support [{}, {}] is empty",
                s.lo, s.hi
            )));
        }
        Ok(Self {
            base: Arc::new(base),
            transform: Transform::Location { link, shift },
        })
    }

    pub fn base(&self) -> &dyn UnivariateModel {
        self.base.as_ref()
    }

    pub fn transform(&self) -> &Transform {
        &self.transform
    }

    /// `v = G⁻¹(F₂(x))`, taken from whichever tail keeps precision.
    fn location_v(&self, link: &RealLink, x: f64) -> Result<f64> {
        let f2 = self.base.cdf(x);
        if f2 <= 0.5 {
            link.quantile(f2)
        } else {
            link.upper_quantile(self.base.survival(x))
        }
    }

    /// CDF with any quantile failure surfaced as an error.
    pub fn try_cdf(&self, x: f64) -> Result<f64> {
        match &self.transform {
            Transform::Survival(link) => {
                Ok(link.cdf_pair(self.base.survival(x), self.base.cdf(x)).1)
            }
            Transform::Location { link, shift } => {
                let v = self.location_v(link, x)?;
                Ok(link.cdf(v + shift))
            }
        }
    }

    pub fn try_survival(&self, x: f64) -> Result<f64> {
        match &self.transform {
            Transform::Survival(link) => {
                Ok(link.cdf_pair(self.base.survival(x), self.base.cdf(x)).0)
            }
            Transform::Location { link, shift } => {
                let v = self.location_v(link, x)?;
                Ok(link.ccdf(v + shift))
            }
        }
    }

    pub fn try_ln_density(&self, x: f64) -> Result<f64> {
        if !self.base.support().contains(x) {
            return Ok(f64::NEG_INFINITY);
        }
        match &self.transform {
            Transform::Survival(link) => {
                Ok(link.ln_density_from_ln(self.base.ln_survival(x)) + self.base.ln_density(x))
            }
            Transform::Location { link, shift } => {
                let lf2 = self.base.ln_density(x);
                if lf2 == f64::NEG_INFINITY {
                    return Ok(lf2);
                }
                let v = self.location_v(link, x)?;
                if !v.is_finite() {
                    return Ok(f64::NEG_INFINITY);
                }
                Ok(lf2 + link.ln_density(v + shift) - link.ln_density(v))
            }
        }
    }
}

impl UnivariateModel for LinkedModel {
    fn density(&self, x: f64) -> f64 {
        match &self.transform {
            Transform::Survival(link) => {
                let f2 = self.base.density(x);
                if f2 == 0.0 {
                    0.0
                } else {
                    link.density(self.base.survival(x)) * f2
                }
            }
            Transform::Location { .. } => self.ln_density(x).exp(),
        }
    }

    fn ln_density(&self, x: f64) -> f64 {
        self.try_ln_density(x).unwrap_or(f64::NAN)
    }

    fn cdf(&self, x: f64) -> f64 {
        self.try_cdf(x).unwrap_or(f64::NAN)
    }

    fn survival(&self, x: f64) -> f64 {
        self.try_survival(x).unwrap_or(f64::NAN)
    }

    fn support(&self) -> Support {
        self.base.support()
    }

    fn breakpoints(&self) -> Vec<f64> {
        let mut out = self.base.breakpoints();
        match &self.transform {
            Transform::Survival(link) => {
                for b in link.breakpoints() {
                    if let Ok(x) = self.base.quantile(1.0 - b) {
                        out.push(x);
                    }
                }
            }
            Transform::Location { link, shift } => {
                for c in link.breakpoints() {
                    for v in [c, c - shift] {
                        let u = link.cdf(v);
                        if u > 0.0 && u < 1.0 {
                            if let Ok(x) = self.base.quantile(u) {
                                out.push(x);
                            }
                        }
                    }
                }
            }
        }
        out.retain(|x| x.is_finite());
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }

    /// Exact composition of inverses: no root finding beyond the base's own.
    fn quantile(&self, p: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&p) || p.is_nan() {
            return Err(Error::QuantileFailure { p });
        }
        match &self.transform {
            Transform::Survival(link) => {
                let s2 = link.inverse(1.0 - p)?;
                self.base.quantile(1.0 - s2)
            }
            Transform::Location { link, shift } => {
                let v = link.quantile(p)? - shift;
                self.base.quantile(link.cdf(v))
            }
        }
    }
}
