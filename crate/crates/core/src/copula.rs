//! Copula densities and the dependence divergence `K_q(c : 1)`.
//!
//! The divergence between a bivariate density and the product of its
//! marginals depends only on the copula, so everything here lives on the
//! unit square with the independence copula `c* = 1` as reference.

use serde::{Deserialize, Serialize};

use crate::divergence::{
    check_order, renyi_from_integral, symmetry_report, Direction, DivergenceResult, Method,
    SymmetryReport,
};
use crate::error::{Error, Result};
use crate::numerics::quadrature::{integrate_rectangle, integrate_unit_square, QuadratureSpec};
use crate::numerics::special::{normal_quantile, LN_SQRT_2PI};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum CopulaModel {
    Independent,
    Gaussian {
        rho: f64,
    },
    /// Farlie-Gumbel-Morgenstern.
    Fgm {
        theta: f64,
    },
}

/// Gaussian copula log-density at normal scores `(x, y)`.
fn gaussian_ln_density(rho: f64, x: f64, y: f64) -> f64 {
    let r2 = 1.0 - rho * rho;
    -0.5 * r2.ln() - (rho * rho * (x * x + y * y) - 2.0 * rho * x * y) / (2.0 * r2)
}

impl CopulaModel {
    pub fn gaussian(rho: f64) -> Result<Self> {
        let c = Self::Gaussian { rho };
        c.validate()?;
        Ok(c)
    }

    pub fn fgm(theta: f64) -> Result<Self> {
        let c = Self::Fgm { theta };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::Independent => Ok(()),
            Self::Gaussian { rho } if rho.abs() < 1.0 => Ok(()),
            Self::Fgm { theta } if theta.abs() <= 1.0 => Ok(()),
            Self::Gaussian { rho } => Err(Error::InvalidParam(format!(
                "gaussian copula needs rho in (-1, 1), got {rho}"
            ))),
            Self::Fgm { theta } => Err(Error::InvalidParam(format!(
                "fgm copula needs theta in [-1, 1], got {theta}"
            ))),
        }
    }

    pub fn name(&self) -> String {
        match self {
            Self::Independent => "independent".into(),
            Self::Gaussian { rho } => format!("gaussian(rho={rho})"),
            Self::Fgm { theta } => format!("fgm(theta={theta})"),
        }
    }

    /// `ln c(u, v)` without domain checks.
    fn ln_density_unchecked(&self, u: f64, v: f64) -> f64 {
        match *self {
            Self::Independent => 0.0,
            Self::Fgm { theta } => (theta * (1.0 - 2.0 * u) * (1.0 - 2.0 * v)).ln_1p(),
            Self::Gaussian { rho } => {
                gaussian_ln_density(rho, normal_quantile(u), normal_quantile(v))
            }
        }
    }
}

fn check_open_square(u: f64, v: f64) -> Result<()> {
    if u > 0.0 && u < 1.0 && v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(Error::OutOfDomain(format!(
            "({u}, {v}) is outside the open unit square"
        )))
    }
}

pub fn copula_density(cop: &CopulaModel, u: f64, v: f64) -> Result<f64> {
    cop.validate()?;
    check_open_square(u, v)?;
    Ok(cop.ln_density_unchecked(u, v).exp())
}

pub fn copula_ln_density(cop: &CopulaModel, u: f64, v: f64) -> Result<f64> {
    cop.validate()?;
    check_open_square(u, v)?;
    Ok(cop.ln_density_unchecked(u, v))
}

/// Exponent of `c` in the order-`q` integrand.
fn renyi_power(q: f64, direction: Direction) -> f64 {
    match direction {
        Direction::Forward => q,
        Direction::Reverse => 1.0 - q,
    }
}

/// Whether `∫ c^s` is finite for the Gaussian copula. In normal scores the
/// integrand is a Gaussian kernel whose precision matrix has eigenvalues
/// `1 − s|ρ|/(1+|ρ|)` and `1 + s|ρ|/(1−|ρ|)`.
fn gaussian_power_integrable(rho: f64, s: f64) -> bool {
    let r = rho.abs();
    1.0 - s * r / (1.0 + r) > 0.0 && 1.0 + s * r / (1.0 - r) > 0.0
}

/// `K_q(c : 1)` forward or `K_q(1 : c)` reverse, by 2-D quadrature.
///
/// At `q = 1` forward is `−H(c) = ∫ c ln c` and reverse is `−E*[ln c]`.
pub fn dependence_divergence(
    cop: &CopulaModel,
    q: f64,
    direction: Direction,
    spec: &QuadratureSpec,
) -> Result<DivergenceResult> {
    cop.validate()?;
    check_order(q)?;
    if matches!(cop, CopulaModel::Independent) {
        return Ok(DivergenceResult::quadrature(0.0, 0.0, q, direction));
    }
    if let CopulaModel::Gaussian { rho } = *cop {
        if q != 1.0 && !gaussian_power_integrable(rho, renyi_power(q, direction)) {
            return Ok(DivergenceResult {
                value: f64::INFINITY,
                q,
                direction,
                method: Method::ClosedForm,
                err_estimate: 0.0,
                clamped: false,
            });
        }
    }
    // `lw` is the log of the change-of-variables weight; keeping it in the
    // exponent avoids `∞ · 0` far out in the tails.
    let integrand = |l: f64, lw: f64| -> f64 {
        if q == 1.0 {
            match direction {
                Direction::Forward if l > f64::NEG_INFINITY => (l + lw).exp() * l,
                Direction::Forward => 0.0,
                Direction::Reverse => -l * lw.exp(),
            }
        } else {
            (renyi_power(q, direction) * l + lw).exp()
        }
    };
    let r = match *cop {
        // Normal scores `u = Φ(x)` turn the edge singularity into a smooth
        // Gaussian-weighted integrand on the plane.
        CopulaModel::Gaussian { rho } => integrate_rectangle(
            |x, y| {
                let lw = -2.0 * LN_SQRT_2PI - 0.5 * (x * x + y * y);
                integrand(gaussian_ln_density(rho, x, y), lw)
            },
            (f64::NEG_INFINITY, f64::INFINITY),
            &[0.0],
            spec,
        )?,
        _ => integrate_unit_square(
            |u, v| integrand(cop.ln_density_unchecked(u, v), 0.0),
            &[0.5],
            spec,
        )?,
    };
    if q == 1.0 {
        return Ok(DivergenceResult::quadrature(
            r.value,
            r.err_estimate,
            q,
            direction,
        ));
    }
    let (value, err) = renyi_from_integral(q, r)?;
    Ok(DivergenceResult::quadrature(value, err, q, direction))
}

/// Symmetry of the dependence divergence over `q_grid`. At `q = 1` this is
/// the condition `H(c) = E*[ln c]`.
pub fn check_dependence_symmetry(
    cop: &CopulaModel,
    q_grid: &[f64],
    tol: f64,
    spec: &QuadratureSpec,
) -> Result<SymmetryReport> {
    symmetry_report(cop.name(), q_grid, tol, |q| {
        Ok((
            dependence_divergence(cop, q, Direction::Forward, spec)?,
            dependence_divergence(cop, q, Direction::Reverse, spec)?,
        ))
    })
}

/// `1 − exp(−K_{1/2})`, in `[0, 1)` and zero only under independence.
pub fn normalized_dependence_index(cop: &CopulaModel, spec: &QuadratureSpec) -> Result<f64> {
    let k = dependence_divergence(cop, 0.5, Direction::Forward, spec)?.value;
    Ok(-(-k).exp_m1())
}
