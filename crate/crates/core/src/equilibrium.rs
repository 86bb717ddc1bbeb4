//! Equilibrium distributions and divergences between scaled survival functions.
//!
//! The equilibrium distribution (ED) of a lifetime with survival `S` and mean
//! `μ` has density `S(x)/μ`. Linking two EDs, `S₁ᵉ = G(S₂ᵉ)`, determines a new
//! parent `S₁ = S₂·g(S₂ᵉ)/g(1)` with mean `μ₂/g(1)`.

use std::sync::Arc;

use crate::divergence::{kl_generic, renyi_unit_link, Direction, DivergenceResult};
use crate::error::{Error, Result};
use crate::links::UnitLink;
use crate::numerics::distributions::{model_mean_via_survival, Support, UnivariateModel};
use crate::numerics::quadrature::{integrate_with_breaks, QuadratureSpec};

/// The ED of a nonnegative lifetime. As a [`UnivariateModel`] it *is* the ED:
/// `density(x) = parent.survival(x) / mean`.
#[derive(Debug, Clone)]
pub struct EquilibriumModel {
    parent: Arc<dyn UnivariateModel>,
    mean: f64,
    spec: QuadratureSpec,
}

fn require_nonnegative(m: &dyn UnivariateModel) -> Result<Support> {
    let s = m.support();
    if s.is_nonnegative() {
        Ok(s)
    } else {
        Err(Error::SupportMismatch(format!(
            "lifetime support must lie in [0, inf), got [{}, {}]",
            s.lo, s.hi
        )))
    }
}

/// Builds the ED of `parent`, computing its mean by quadrature when no
/// closed form is known.
pub fn equilibrium_of<M: UnivariateModel + 'static>(
    parent: M,
    spec: &QuadratureSpec,
) -> Result<EquilibriumModel> {
    require_nonnegative(&parent)?;
    let mean = match parent.mean() {
        Some(m) if m.is_finite() && m > 0.0 => m,
        _ => model_mean_via_survival(&parent, spec)?,
    };
    Ok(EquilibriumModel {
        parent: Arc::new(parent),
        mean,
        spec: *spec,
    })
}

impl EquilibriumModel {
    pub fn parent(&self) -> &dyn UnivariateModel {
        self.parent.as_ref()
    }

    /// Mean of the parent, `μ = ∫ S`.
    pub fn parent_mean(&self) -> f64 {
        self.mean
    }

    /// `Sᵉ(x) = μ⁻¹ ∫_x^∞ S(t) dt`.
    pub fn try_ed_survival(&self, x: f64) -> Result<f64> {
        let s = self.parent.support();
        if x <= s.lo {
            return Ok(1.0);
        }
        if x >= s.hi {
            return Ok(0.0);
        }
        if let Some(tail) = self.parent.integrated_survival(x) {
            return Ok(tail / self.mean);
        }
        let bps = self.parent.breakpoints();
        let r = integrate_with_breaks(|t| self.parent.survival(t), x, s.hi, &bps, &self.spec)?;
        Ok((r.value / self.mean).clamp(0.0, 1.0))
    }

    /// `μ⁻¹ ∫₀^x S(t) dt`, accurate for small `x`.
    fn try_ed_cdf(&self, x: f64) -> Result<f64> {
        let s = self.parent.support();
        if x <= s.lo {
            return Ok(0.0);
        }
        let bps = self.parent.breakpoints();
        let r = integrate_with_breaks(|t| self.parent.survival(t), s.lo, x, &bps, &self.spec)?;
        Ok((r.value / self.mean).clamp(0.0, 1.0))
    }
}

impl UnivariateModel for EquilibriumModel {
    fn density(&self, x: f64) -> f64 {
        if self.support().contains(x) {
            self.parent.survival(x) / self.mean
        } else {
            0.0
        }
    }

    fn ln_density(&self, x: f64) -> f64 {
        if self.support().contains(x) {
            self.parent.ln_survival(x) - self.mean.ln()
        } else {
            f64::NEG_INFINITY
        }
    }

    fn cdf(&self, x: f64) -> f64 {
        if x < self.mean {
            self.try_ed_cdf(x).unwrap_or(f64::NAN)
        } else {
            self.try_ed_survival(x).map(|s| 1.0 - s).unwrap_or(f64::NAN)
        }
    }

    fn survival(&self, x: f64) -> f64 {
        if x < self.mean {
            self.try_ed_cdf(x).map(|c| 1.0 - c).unwrap_or(f64::NAN)
        } else {
            self.try_ed_survival(x).unwrap_or(f64::NAN)
        }
    }

    fn support(&self) -> Support {
        self.parent.support()
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.parent.breakpoints()
    }
}

/// The parent whose ED is `G(S₂ᵉ)`:
/// `S₁(x) = S₂(x)·g(S₂ᵉ(x))/g(1)`.
#[derive(Debug, Clone)]
pub struct EdLinkParent {
    link: UnitLink,
    base: EquilibriumModel,
    g_at_one: f64,
}

/// Builds the linked parent and its mean `μ₁ = μ₂/g(1)`.
pub fn ed_link_parent<M: UnivariateModel + 'static>(
    link: UnitLink,
    base: M,
    spec: &QuadratureSpec,
) -> Result<(EdLinkParent, f64)> {
    link.validate()?;
    let g1 = link.density(1.0);
    if !(g1 > 0.0 && g1.is_finite()) {
        return Err(Error::DegenerateLink);
    }
    let base = equilibrium_of(base, spec)?;
    let mean = base.parent_mean() / g1;
    Ok((
        EdLinkParent {
            link,
            base,
            g_at_one: g1,
        },
        mean,
    ))
}

impl EdLinkParent {
    pub fn base(&self) -> &EquilibriumModel {
        &self.base
    }

    pub fn link(&self) -> &UnitLink {
        &self.link
    }

    /// `G(S₂ᵉ(x))`, the ED survival this parent was built to have.
    pub fn linked_ed_survival(&self, x: f64) -> Result<f64> {
        Ok(self.link.cdf(self.base.try_ed_survival(x)?))
    }

    fn try_survival(&self, x: f64) -> Result<f64> {
        let s2 = self.base.parent().survival(x);
        if s2 == 0.0 {
            return Ok(0.0);
        }
        let se = self.base.try_ed_survival(x)?;
        Ok(s2 * self.link.density(se) / self.g_at_one)
    }

    /// `f₁ = [f₂·g(S₂ᵉ) + S₂²·g'(S₂ᵉ)/μ₂] / g(1)`.
    fn try_density(&self, x: f64) -> Result<f64> {
        let parent = self.base.parent();
        let (f2, s2) = (parent.density(x), parent.survival(x));
        if f2 == 0.0 && s2 == 0.0 {
            return Ok(0.0);
        }
        let se = self.base.try_ed_survival(x)?;
        let mu2 = self.base.parent_mean();
        Ok(
            (f2 * self.link.density(se) + s2 * s2 * self.link.density_derivative(se) / mu2)
                / self.g_at_one,
        )
    }
}

impl UnivariateModel for EdLinkParent {
    fn density(&self, x: f64) -> f64 {
        if !self.support().contains(x) {
            return 0.0;
        }
        self.try_density(x).unwrap_or(f64::NAN)
    }

    fn cdf(&self, x: f64) -> f64 {
        1.0 - self.survival(x)
    }

    fn survival(&self, x: f64) -> f64 {
        let s = self.support();
        if x <= s.lo {
            return 1.0;
        }
        self.try_survival(x).unwrap_or(f64::NAN)
    }

    fn ln_survival(&self, x: f64) -> f64 {
        let s = self.support();
        if x <= s.lo {
            return 0.0;
        }
        match self.base.try_ed_survival(x) {
            Ok(se) => {
                self.base.parent().ln_survival(x) + self.link.ln_density(se) - self.g_at_one.ln()
            }
            Err(_) => f64::NAN,
        }
    }

    fn support(&self) -> Support {
        self.base.support()
    }

    fn mean(&self) -> Option<f64> {
        Some(self.base.parent_mean() / self.g_at_one)
    }

    fn breakpoints(&self) -> Vec<f64> {
        let mut out = self.base.breakpoints();
        for b in self.link.breakpoints() {
            if let Ok(x) = self.base.quantile(1.0 - b) {
                out.push(x);
            }
        }
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }
}

/// `K_q(S₁ : S₂)` between scaled survival functions, computed as the
/// divergence between the two EDs.
pub fn scaled_survival_divergence(
    p1: &EquilibriumModel,
    p2: &EquilibriumModel,
    q: f64,
    spec: &QuadratureSpec,
) -> Result<DivergenceResult> {
    kl_generic(p1, p2, q, spec)
}

/// `μ₁⁻¹ ∫ S₁ ln(S₁/S₂) − ln(μ₁/μ₂)`, the KL between scaled survival
/// functions written on the parents directly.
pub fn scaled_survival_kl_explicit(
    p1: &EquilibriumModel,
    p2: &EquilibriumModel,
    spec: &QuadratureSpec,
) -> Result<f64> {
    let s = p1.support();
    let mut bps = p1.parent().breakpoints();
    bps.extend(p2.parent().breakpoints());
    let r = integrate_with_breaks(
        |x| {
            let s1 = p1.parent().survival(x);
            if s1 == 0.0 {
                0.0
            } else {
                s1 * (p1.parent().ln_survival(x) - p2.parent().ln_survival(x))
            }
        },
        s.lo,
        s.hi,
        &bps,
        spec,
    )?;
    Ok(r.value / p1.parent_mean() - (p1.parent_mean() / p2.parent_mean()).ln())
}

/// Cumulative residual KL, `∫ S₁ ln(S₁/S₂) + μ₂ − μ₁`.
///
/// Integrated as `∫ [S₁ ln(S₁/S₂) − S₁ + S₂]`, whose integrand is pointwise
/// nonnegative, so heavy tails never produce `∞ − ∞`.
pub fn crkl<A, B>(m1: &A, m2: &B, spec: &QuadratureSpec) -> Result<f64>
where
    A: UnivariateModel + ?Sized,
    B: UnivariateModel + ?Sized,
{
    let s = require_nonnegative_pair(m1.support(), m2.support())?;
    let mut bps = m1.breakpoints();
    bps.extend(m2.breakpoints());
    let r = integrate_with_breaks(
        |x| {
            let (s1, s2) = (m1.survival(x), m2.survival(x));
            if s1 == 0.0 {
                return s2;
            }
            let ls2 = m2.ln_survival(x);
            if ls2 == f64::NEG_INFINITY {
                return f64::INFINITY;
            }
            s1 * (m1.ln_survival(x) - ls2) - s1 + s2
        },
        s.lo,
        s.hi,
        &bps,
        spec,
    )?;
    Ok(r.value.max(0.0))
}

fn require_nonnegative_pair(a: Support, b: Support) -> Result<Support> {
    if a != b || !a.is_nonnegative() {
        return Err(Error::SupportMismatch(format!(
            "need a common support in [0, inf), got [{}, {}] and [{}, {}]",
            a.lo, a.hi, b.lo, b.hi
        )));
    }
    Ok(a)
}

/// `K(g:g*) − g(1)K(g*:g) − 2[1−g(1)] − [1+g(1)] ln g(1)`.
///
/// Under `S₁ᵉ = G(S₂ᵉ)` the two CRKL directions differ by `μ₂/g(1)` times
/// this quantity, so it vanishes exactly when CRKL is symmetric.
pub fn crkl_symmetry_defect(link: &UnitLink, spec: &QuadratureSpec) -> Result<f64> {
    let g1 = link.density(1.0);
    if !(g1 > 0.0 && g1.is_finite()) {
        return Err(Error::DegenerateLink);
    }
    let forward = renyi_unit_link(link, 1.0, Direction::Forward, spec)?.value;
    let reverse = renyi_unit_link(link, 1.0, Direction::Reverse, spec)?.value;
    Ok(forward - g1 * reverse - 2.0 * (1.0 - g1) - (1.0 + g1) * g1.ln())
}
