//! Kullback-Leibler and Rényi divergences.
//!
//! Closed forms cover the proportional-odds and proportional-hazards families.
//! Everything else goes through quadrature, either directly on two densities
//! or after the change of variables that reduces a linked pair to an integral
//! of the link density alone. The reduced integrals do not depend on the
//! baseline, which is what makes the symmetry checks here baseline-free.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::links::{RealLink, UnitLink};
use crate::numerics::distributions::UnivariateModel;
use crate::numerics::quadrature::{integrate_with_breaks, Integral, QuadratureSpec};
use crate::numerics::roots::scan_roots;
use crate::numerics::special::ln_sinhc;

/// Radius around removable singularities inside which series are used.
const SERIES_RADIUS_X: f64 = 1e-2;
const SERIES_RADIUS_Q: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// `K(f₁ : f₂)`, the transformed model against its base.
    Forward,
    /// `K(f₂ : f₁)`.
    Reverse,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    Quadrature,
}

/// A divergence value in nats.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DivergenceResult {
    pub value: f64,
    /// Order; `q = 1` is the Kullback-Leibler divergence.
    pub q: f64,
    pub direction: Direction,
    pub method: Method,
    pub err_estimate: f64,
    /// Set when a slightly negative quadrature result was clamped to zero.
    pub clamped: bool,
}

impl DivergenceResult {
    fn closed(value: f64, q: f64, direction: Direction) -> Self {
        Self {
            value: value.max(0.0),
            q,
            direction,
            method: Method::ClosedForm,
            err_estimate: 0.0,
            clamped: false,
        }
    }

    pub(crate) fn quadrature(value: f64, err_estimate: f64, q: f64, direction: Direction) -> Self {
        let clamped = value < 0.0;
        Self {
            value: value.max(0.0),
            q,
            direction,
            method: Method::Quadrature,
            err_estimate,
            clamped,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Symmetric,
    Asymmetric,
}

/// Forward and reverse values at one order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymmetryEntry {
    pub q: f64,
    pub forward: f64,
    pub reverse: f64,
    pub defect: f64,
    pub err_estimate: f64,
    /// False for `q = 1/2`, which is symmetric for every pair and so says
    /// nothing about the link.
    pub counted: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymmetryReport {
    pub subject: String,
    /// Forward and reverse values at the order with the worst defect.
    pub condition_lhs: f64,
    pub condition_rhs: f64,
    pub defect: f64,
    pub q_grid: Vec<f64>,
    pub entries: Vec<SymmetryEntry>,
    pub tolerance: f64,
    pub verdict: Verdict,
    /// Roots of `e^m − e^{−m} − 2m` on `[−10, 10]`, reported for the Gumbel link.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub root_scan: Option<Vec<f64>>,
}

pub const DEFAULT_SYMMETRY_TOL: f64 = 1e-6;

/// Builds a report from per-order forward/reverse pairs.
pub(crate) fn symmetry_report(
    subject: String,
    q_grid: &[f64],
    tol: f64,
    mut pair_at: impl FnMut(f64) -> Result<(DivergenceResult, DivergenceResult)>,
) -> Result<SymmetryReport> {
    if q_grid.is_empty() {
        return Err(Error::EmptyInput("q grid".into()));
    }
    if !(tol >= 0.0) {
        return Err(Error::InvalidParam(format!(
            "tolerance must be nonnegative, got {tol}"
        )));
    }
    let mut entries = Vec::with_capacity(q_grid.len());
    for &q in q_grid {
        let (f, r) = pair_at(q)?;
        entries.push(SymmetryEntry {
            q,
            forward: f.value,
            reverse: r.value,
            defect: f.value - r.value,
            err_estimate: f.err_estimate + r.err_estimate,
            counted: (q - 0.5).abs() > 1e-12,
        });
    }
    let worst = entries
        .iter()
        .filter(|e| e.counted)
        .max_by(|a, b| a.defect.abs().total_cmp(&b.defect.abs()));
    let (lhs, rhs, defect, symmetric) = match worst {
        Some(w) => {
            let symmetric = entries
                .iter()
                .filter(|e| e.counted)
                .all(|e| e.defect.abs() <= tol + e.err_estimate);
            (w.forward, w.reverse, w.defect, symmetric)
        }
        None => {
            let e = &entries[0];
            (e.forward, e.reverse, 0.0, true)
        }
    };
    Ok(SymmetryReport {
        subject,
        condition_lhs: lhs,
        condition_rhs: rhs,
        defect,
        q_grid: q_grid.to_vec(),
        entries,
        tolerance: tol,
        verdict: if symmetric {
            Verdict::Symmetric
        } else {
            Verdict::Asymmetric
        },
        root_scan: None,
    })
}

pub(crate) fn check_order(q: f64) -> Result<()> {
    if q > 0.0 && q.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParam(format!(
            "order q must be positive and finite, got {q}"
        )))
    }
}

/// Symmetric KL between a PO model with tilt `e^x` and the null model:
/// `x·(e^x + 1)/(e^x − 1) − 2 = x·coth(x/2) − 2`.
pub fn kl_po_null(x: f64) -> f64 {
    let ax = x.abs();
    if ax < SERIES_RADIUS_X {
        let x2 = ax * ax;
        x2 * (1.0 / 6.0 - x2 * (1.0 / 360.0 - x2 * (1.0 / 15120.0 - x2 / 604_800.0)))
    } else {
        ax / (0.5 * ax).tanh() - 2.0
    }
}

/// Symmetric KL between PO models with tilts `e^a` and `e^b`.
pub fn kl_po_pair(a: f64, b: f64) -> f64 {
    kl_po_null(a - b)
}

/// Rényi divergence of order `q` between the PO link density and the uniform,
/// identical in both directions:
/// `(q−1)⁻¹ ln[(α^q − α^{1−q}) / ((α−1)(2q−1))]`.
///
/// With `a = ln α` the bracket is `sinhc(a(q−½)) / sinhc(a/2)`, which has no
/// removable singularity at `α = 1` or `q = ½`. Near `q = 1` a two-term
/// expansion replaces the division.
pub fn renyi_po(alpha: f64, q: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidParam(format!(
            "tilt must be positive, got {alpha}"
        )));
    }
    check_order(q)?;
    let a = alpha.ln();
    if a == 0.0 {
        return Ok(0.0);
    }
    let d = q - 1.0;
    let value = if d.abs() < SERIES_RADIUS_Q {
        let h = 0.5 * a;
        let ratio = if h.abs() > 700.0 { 0.0 } else { h / h.sinh() };
        kl_po_null(a) + 0.5 * d * (4.0 - 4.0 * ratio * ratio)
    } else {
        (ln_sinhc(a * (q - 0.5)) - ln_sinhc(0.5 * a)) / d
    };
    Ok(value.max(0.0))
}

/// KL between PH models with hazard ratio `e^x` and the null.
/// Forward is `K(f_π : f₀) = e^{−x} + x − 1`; reverse is `e^x − x − 1`.
pub fn kl_ph(x: f64, direction: Direction) -> f64 {
    match direction {
        Direction::Forward => (-x).exp_m1() + x,
        Direction::Reverse => x.exp_m1() - x,
    }
}

pub(crate) fn renyi_from_integral(q: f64, r: Integral) -> Result<(f64, f64)> {
    if !(r.value > 0.0) || !r.value.is_finite() {
        return Err(Error::NonConvergent {
            value: r.value,
            err_estimate: r.err_estimate,
            subdivisions: 0,
        });
    }
    let d = q - 1.0;
    Ok((r.value.ln() / d, r.err_estimate / (r.value * d.abs())))
}

fn divergent(q: f64) -> Error {
    Error::NonConvergent {
        value: f64::INFINITY,
        err_estimate: f64::INFINITY,
        subdivisions: q as usize,
    }
}

/// Closed forms for the built-in unit links, when registered.
fn unit_link_closed_form(link: &UnitLink, q: f64, direction: Direction) -> Option<Result<f64>> {
    // Reverse at order q integrates g^{1−q}; write it as the forward
    // integrand at order r = 1 − q.
    let r = match direction {
        Direction::Forward => q,
        Direction::Reverse => 1.0 - q,
    };
    let is_kl = (q - 1.0).abs() == 0.0;
    match *link {
        UnitLink::Uniform => Some(Ok(0.0)),
        UnitLink::Po { alpha } => Some(renyi_po(alpha, q)),
        UnitLink::PiecewiseUniform { p } => {
            let lo = (1.0 - p) / p;
            if is_kl {
                return Some(Ok((1.0 - 2.0 * p) * lo.ln()));
            }
            let integral = p * lo.powf(r) + (1.0 - p) * lo.powf(-r);
            Some(Ok(integral.ln() / (q - 1.0)))
        }
        UnitLink::Power { pi } => {
            if is_kl {
                return Some(Ok(match direction {
                    Direction::Forward => pi.ln() - (pi - 1.0) / pi,
                    Direction::Reverse => -pi.ln() + (pi - 1.0),
                }));
            }
            let denom = r * (pi - 1.0) + 1.0;
            if denom <= 0.0 {
                return Some(Err(divergent(q)));
            }
            Some(Ok((r * pi.ln() - denom.ln()) / (q - 1.0)))
        }
        UnitLink::Custom(_) => None,
    }
}

/// Rényi divergence between `S₁ = G(S₂)` and the base, for any base.
///
/// Forward is `(q−1)⁻¹ ln ∫₀¹ g^q`, reverse `(q−1)⁻¹ ln ∫₀¹ g^{1−q}`; at `q = 1`
/// they become `∫ g ln g` and `−∫ ln g`. Closed forms are used when the link
/// has one.
pub fn renyi_unit_link(
    link: &UnitLink,
    q: f64,
    direction: Direction,
    spec: &QuadratureSpec,
) -> Result<DivergenceResult> {
    check_order(q)?;
    link.validate()?;
    match unit_link_closed_form(link, q, direction) {
        Some(v) => Ok(DivergenceResult::closed(v?, q, direction)),
        None => renyi_unit_link_by_quadrature(link, q, direction, spec),
    }
}

/// As [`renyi_unit_link`], always by quadrature.
pub fn renyi_unit_link_by_quadrature(
    link: &UnitLink,
    q: f64,
    direction: Direction,
    spec: &QuadratureSpec,
) -> Result<DivergenceResult> {
    check_order(q)?;
    link.validate()?;
    let bps = link.breakpoints();
    if q == 1.0 {
        let r = match direction {
            Direction::Forward => integrate_with_breaks(
                |u| {
                    let lg = link.ln_density(u);
                    if lg == f64::NEG_INFINITY {
                        0.0
                    } else {
                        lg.exp() * lg
                    }
                },
                0.0,
                1.0,
                &bps,
                spec,
            )?,
            Direction::Reverse => {
                let r = integrate_with_breaks(|u| link.ln_density(u), 0.0, 1.0, &bps, spec)?;
                Integral {
                    value: -r.value,
                    ..r
                }
            }
        };
        return Ok(DivergenceResult::quadrature(
            r.value,
            r.err_estimate,
            q,
            direction,
        ));
    }
    let power = match direction {
        Direction::Forward => q,
        Direction::Reverse => 1.0 - q,
    };
    let r = integrate_with_breaks(
        |u| {
            let lg = link.ln_density(u);
            if lg == f64::NEG_INFINITY && power > 0.0 {
                0.0
            } else {
                (power * lg).exp()
            }
        },
        0.0,
        1.0,
        &bps,
        spec,
    )?;
    let (v, e) = renyi_from_integral(q, r)?;
    Ok(DivergenceResult::quadrature(v, e, q, direction))
}

/// `exp(q·l₁ + (1−q)·l₂)` with the conventions `0·∞ = 0` where one density
/// vanishes faster than the other.
fn renyi_integrand(q: f64, l1: f64, l2: f64) -> f64 {
    if l1 == f64::NEG_INFINITY {
        return 0.0;
    }
    if l2 == f64::NEG_INFINITY {
        return if q > 1.0 { f64::INFINITY } else { 0.0 };
    }
    (q * l1 + (1.0 - q) * l2).exp()
}

fn kl_integrand(l1: f64, l2: f64) -> f64 {
    if l1 == f64::NEG_INFINITY {
        return 0.0;
    }
    if l2 == f64::NEG_INFINITY {
        return f64::INFINITY;
    }
    let d = l1 - l2;
    if d == 0.0 {
        0.0
    } else {
        l1.exp() * d
    }
}

/// Rényi divergence between `F₁ = G(G⁻¹(F₂) + θ)` and `F₂`, for any base.
///
/// The change of variables `v = G⁻¹(F₂(x))` gives forward
/// `(q−1)⁻¹ ln ∫ g^q(v) g^{1−q}(v−θ) dv` and reverse with `v+θ`; at `q = 1`
/// the full KL `∫ g(v) ln[g(v)/g(v∓θ)] dv`.
pub fn renyi_gll(
    link: &RealLink,
    theta: f64,
    q: f64,
    direction: Direction,
    spec: &QuadratureSpec,
) -> Result<DivergenceResult> {
    check_order(q)?;
    if !theta.is_finite() {
        return Err(Error::InvalidParam(format!(
            "shift must be finite, got {theta}"
        )));
    }
    if theta == 0.0 {
        return Ok(DivergenceResult::closed(0.0, q, direction));
    }
    let shift = match direction {
        Direction::Forward => -theta,
        Direction::Reverse => theta,
    };
    let (lo, hi) = link.integration_domain();
    let mut bps = link.breakpoints();
    bps.extend(link.breakpoints().iter().map(|b| b - shift));
    let r = if q == 1.0 {
        integrate_with_breaks(
            |v| kl_integrand(link.ln_density(v), link.ln_density(v + shift)),
            lo,
            hi,
            &bps,
            spec,
        )?
    } else {
        let r = integrate_with_breaks(
            |v| renyi_integrand(q, link.ln_density(v), link.ln_density(v + shift)),
            lo,
            hi,
            &bps,
            spec,
        )?;
        let (v, e) = renyi_from_integral(q, r)?;
        return Ok(DivergenceResult::quadrature(v, e, q, direction));
    };
    Ok(DivergenceResult::quadrature(
        r.value,
        r.err_estimate,
        q,
        direction,
    ))
}

/// `K_q(m₁ : m₂)` by direct quadrature of the defining integral.
pub fn kl_generic<A, B>(m1: &A, m2: &B, q: f64, spec: &QuadratureSpec) -> Result<DivergenceResult>
where
    A: UnivariateModel + ?Sized,
    B: UnivariateModel + ?Sized,
{
    check_order(q)?;
    let (s1, s2) = (m1.support(), m2.support());
    if s1 != s2 {
        return Err(Error::SupportMismatch(format!(
            "supports differ: [{}, {}] vs [{}, {}]",
            s1.lo, s1.hi, s2.lo, s2.hi
        )));
    }
    let mut bps = m1.breakpoints();
    bps.extend(m2.breakpoints());
    let r = if q == 1.0 {
        integrate_with_breaks(
            |x| kl_integrand(m1.ln_density(x), m2.ln_density(x)),
            s1.lo,
            s1.hi,
            &bps,
            spec,
        )?
    } else {
        let r = integrate_with_breaks(
            |x| renyi_integrand(q, m1.ln_density(x), m2.ln_density(x)),
            s1.lo,
            s1.hi,
            &bps,
            spec,
        )?;
        let (v, e) = renyi_from_integral(q, r)?;
        return Ok(DivergenceResult::quadrature(v, e, q, Direction::Forward));
    };
    Ok(DivergenceResult::quadrature(
        r.value,
        r.err_estimate,
        q,
        Direction::Forward,
    ))
}

/// Both KL directions, their sum and their minimum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Jeffreys {
    pub forward: f64,
    pub reverse: f64,
    pub jeffreys: f64,
    /// `min{K₁₂, K₂₁}`.
    pub intrinsic: f64,
    pub err_estimate: f64,
}

pub fn jeffreys<A, B>(m1: &A, m2: &B, spec: &QuadratureSpec) -> Result<Jeffreys>
where
    A: UnivariateModel + ?Sized,
    B: UnivariateModel + ?Sized,
{
    let f = kl_generic(m1, m2, 1.0, spec)?;
    let r = kl_generic(m2, m1, 1.0, spec)?;
    Ok(Jeffreys {
        forward: f.value,
        reverse: r.value,
        jeffreys: f.value + r.value,
        intrinsic: f.value.min(r.value),
        err_estimate: f.err_estimate + r.err_estimate,
    })
}

/// Compares forward and reverse divergences of a survival link by quadrature.
pub fn check_survival_link_symmetry(
    link: &UnitLink,
    q_grid: &[f64],
    tol: f64,
    spec: &QuadratureSpec,
) -> Result<SymmetryReport> {
    let one = |q: f64, dir: Direction| match renyi_unit_link_by_quadrature(link, q, dir, spec) {
        Ok(r) => Ok(r),
        // A failed quadrature is read as +∞ only when the closed form
        // confirms the integral diverges.
        Err(e) => match unit_link_closed_form(link, q, dir) {
            Some(Err(Error::NonConvergent { .. })) => Ok(DivergenceResult {
                value: f64::INFINITY,
                q,
                direction: dir,
                method: Method::ClosedForm,
                err_estimate: 0.0,
                clamped: false,
            }),
            _ => Err(e),
        },
    };
    symmetry_report(link.name(), q_grid, tol, |q| {
        Ok((one(q, Direction::Forward)?, one(q, Direction::Reverse)?))
    })
}

/// Compares forward and reverse divergences of a location link at shift `θ`.
/// At `q = 1` the defect is `E_g[ln g(X+θ)] − E_g[ln g(X−θ)]`.
pub fn check_gll_symmetry(
    link: &RealLink,
    theta: f64,
    q_grid: &[f64],
    tol: f64,
    spec: &QuadratureSpec,
) -> Result<SymmetryReport> {
    let mut report = symmetry_report(format!("{} shift={theta}", link.name()), q_grid, tol, |q| {
        Ok((
            renyi_gll(link, theta, q, Direction::Forward, spec)?,
            renyi_gll(link, theta, q, Direction::Reverse, spec)?,
        ))
    })?;
    if matches!(link, RealLink::Gumbel) {
        report.root_scan = Some(gumbel_condition_roots()?);
    }
    Ok(report)
}

/// Roots of `e^m − e^{−m} − 2m` on `[−10, 10]`. For the Gumbel family this is
/// the condition under which the two KL directions agree.
pub fn gumbel_condition_roots() -> Result<Vec<f64>> {
    scan_roots(|m: f64| 2.0 * (m.sinh() - m), (-10.0, 10.0), 2001, 1e-12)
}
