//! Adaptive Gauss-Kronrod quadrature.
//!
//! The kernel is the 21-point Kronrod extension of the 10-point Gauss rule
//! with QUADPACK's error heuristic. Intervals are bisected in order of their
//! error estimate until the global estimate meets
//! `max(abs_tol, rel_tol * |value|)`. Infinite endpoints are handled by
//! mapping each half-line onto `[0, 1)`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

// Published to more digits than f64 holds.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_931_524_078,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

// Gauss weights for the nodes XGK[1], XGK[3], ..., XGK[9].
#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// How a half-infinite range is folded onto `[0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailMapping {
    /// `x = a + t / (1 - t)`
    Rational,
    /// `x = a - ln(1 - t)`
    Exponential,
}

/// Tolerances and budget for [`integrate_adaptive`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
    pub tail_mapping: TailMapping,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_subdivisions: 2000,
            tail_mapping: TailMapping::Rational,
        }
    }
}

impl QuadratureSpec {
    pub fn new(rel_tol: f64, abs_tol: f64, max_subdivisions: usize) -> Result<Self> {
        let spec = Self {
            rel_tol,
            abs_tol,
            max_subdivisions,
            tail_mapping: TailMapping::Rational,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_tail_mapping(mut self, mapping: TailMapping) -> Self {
        self.tail_mapping = mapping;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) || !(self.abs_tol > 0.0) || self.max_subdivisions < 1 {
            return Err(Error::InvalidParam(format!(
                "quadrature spec needs rel_tol > 0, abs_tol > 0, max_subdivisions >= 1 (got {self:?})"
            )));
        }
        Ok(())
    }

    fn tolerance_for(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.abs())
    }
}

/// Integral estimate with its absolute error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub err_estimate: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn checked<F: Fn(f64) -> f64>(f: &F, x: f64) -> Result<f64> {
    let y = f(x);
    if y.is_finite() {
        Ok(y)
    } else {
        Err(Error::NonFinite { x })
    }
}

/// One application of the 21-point Kronrod rule on `[a, b]`.
// Index loops follow the QUADPACK layout of paired abscissae.
#[allow(clippy::needless_range_loop)]
fn gk21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<(f64, f64)> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = checked(f, center)?;
    let mut resg = 0.0;
    let mut resk = fc * WGK[10];
    let mut resabs = resk.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];

    for j in 0..5 {
        let jtw = 2 * j + 1;
        let dx = half * XGK[jtw];
        let f1 = checked(f, center - dx)?;
        let f2 = checked(f, center + dx)?;
        fv1[jtw] = f1;
        fv2[jtw] = f2;
        resg += WG[j] * (f1 + f2);
        resk += WGK[jtw] * (f1 + f2);
        resabs += WGK[jtw] * (f1.abs() + f2.abs());
    }
    for j in 0..5 {
        let jtwm1 = 2 * j;
        let dx = half * XGK[jtwm1];
        let f1 = checked(f, center - dx)?;
        let f2 = checked(f, center + dx)?;
        fv1[jtwm1] = f1;
        fv2[jtwm1] = f2;
        resk += WGK[jtwm1] * (f1 + f2);
        resabs += WGK[jtwm1] * (f1.abs() + f2.abs());
    }

    let reskh = resk * 0.5;
    let mut resasc = WGK[10] * (fc - reskh).abs();
    for j in 0..10 {
        resasc += WGK[j] * ((fv1[j] - reskh).abs() + (fv2[j] - reskh).abs());
    }

    let result = resk * half;
    let resabs = resabs * half.abs();
    let resasc = resasc * half.abs();
    let mut abserr = ((resk - resg) * half).abs();
    if resasc != 0.0 && abserr != 0.0 {
        abserr = resasc * (200.0 * abserr / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        abserr = abserr.max(50.0 * f64::EPSILON * resabs);
    }
    Ok((result, abserr))
}

/// Adaptive integration of `f` over `[lo, hi]`; either endpoint may be infinite.
///
/// Returns [`Error::NonConvergent`] when the subdivision budget runs out before
/// the error estimate meets the tolerance, and [`Error::NonFinite`] if `f`
/// produces NaN or an infinity at a quadrature node. Nodes never touch the
/// endpoints, so integrable endpoint singularities are allowed.
pub fn integrate_adaptive<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    spec: &QuadratureSpec,
) -> Result<Integral> {
    spec.validate()?;
    if lo.is_nan() || hi.is_nan() || lo > hi {
        return Err(Error::InvalidParam(format!(
            "integration interval [{lo}, {hi}] is not ordered"
        )));
    }
    if lo == hi {
        return Ok(Integral {
            value: 0.0,
            err_estimate: 0.0,
            evaluations: 0,
        });
    }
    match (lo.is_finite(), hi.is_finite()) {
        (true, true) => adaptive_finite(&f, lo, hi, spec),
        (true, false) => upper_tail(&f, lo, spec),
        (false, true) => lower_tail(&f, hi, spec),
        (false, false) => {
            let left = lower_tail(&f, 0.0, spec)?;
            let right = upper_tail(&f, 0.0, spec)?;
            Ok(combine(&[left, right]))
        }
    }
}

/// Integrates over `[lo, hi]` after splitting at every breakpoint strictly
/// inside the interval. Use this for integrands with kinks or jumps.
pub fn integrate_with_breaks<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    breaks: &[f64],
    spec: &QuadratureSpec,
) -> Result<Integral> {
    let mut cuts: Vec<f64> = breaks
        .iter()
        .copied()
        .filter(|b| b.is_finite() && *b > lo && *b < hi)
        .collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    if cuts.is_empty() {
        return integrate_adaptive(f, lo, hi, spec);
    }
    let mut pieces = Vec::with_capacity(cuts.len() + 1);
    let mut left = lo;
    for &c in cuts.iter().chain(std::iter::once(&hi)) {
        pieces.push(integrate_adaptive(&f, left, c, spec)?);
        left = c;
    }
    Ok(combine(&pieces))
}

fn combine(parts: &[Integral]) -> Integral {
    parts.iter().fold(
        Integral {
            value: 0.0,
            err_estimate: 0.0,
            evaluations: 0,
        },
        |acc, p| Integral {
            value: acc.value + p.value,
            err_estimate: acc.err_estimate + p.err_estimate,
            evaluations: acc.evaluations + p.evaluations,
        },
    )
}

fn upper_tail<F: Fn(f64) -> f64>(f: &F, a: f64, spec: &QuadratureSpec) -> Result<Integral> {
    match spec.tail_mapping {
        TailMapping::Rational => adaptive_finite(
            &|t: f64| {
                let s = 1.0 - t;
                let y = f(a + t / s);
                if y == 0.0 {
                    0.0
                } else {
                    y / (s * s)
                }
            },
            0.0,
            1.0,
            spec,
        ),
        TailMapping::Exponential => adaptive_finite(
            &|t: f64| {
                let s = 1.0 - t;
                let y = f(a - s.ln());
                if y == 0.0 {
                    0.0
                } else {
                    y / s
                }
            },
            0.0,
            1.0,
            spec,
        ),
    }
}

fn lower_tail<F: Fn(f64) -> f64>(f: &F, b: f64, spec: &QuadratureSpec) -> Result<Integral> {
    upper_tail(&|x: f64| f(2.0 * b - x), b, spec)
}

fn adaptive_finite<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
) -> Result<Integral> {
    let (value, error) = gk21(f, a, b)?;
    let mut evaluations = 21;
    let mut total_value = value;
    let mut total_error = error;
    if total_error <= spec.tolerance_for(total_value) {
        return Ok(Integral {
            value: total_value,
            err_estimate: total_error,
            evaluations,
        });
    }

    let mut heap = BinaryHeap::new();
    heap.push(Segment { a, b, value, error });
    // Segments too narrow to bisect further; their error is frozen.
    let mut frozen_value = 0.0;
    let mut frozen_error = 0.0;
    let mut subdivisions = 1;

    while subdivisions < spec.max_subdivisions {
        let Some(seg) = heap.pop() else { break };
        let mid = 0.5 * (seg.a + seg.b);
        if !(mid > seg.a && mid < seg.b) {
            frozen_value += seg.value;
            frozen_error += seg.error;
            continue;
        }
        let (lv, le) = gk21(f, seg.a, mid)?;
        let (rv, re) = gk21(f, mid, seg.b)?;
        evaluations += 42;
        subdivisions += 1;
        heap.push(Segment {
            a: seg.a,
            b: mid,
            value: lv,
            error: le,
        });
        heap.push(Segment {
            a: mid,
            b: seg.b,
            value: rv,
            error: re,
        });

        // Re-sum from scratch now and then to keep the running totals honest.
        if subdivisions % 64 == 0 {
            total_value = frozen_value + heap.iter().map(|s| s.value).sum::<f64>();
            total_error = frozen_error + heap.iter().map(|s| s.error).sum::<f64>();
        } else {
            total_value += lv + rv - seg.value;
            total_error += le + re - seg.error;
        }
        if total_error <= spec.tolerance_for(total_value) {
            break;
        }
    }

    total_value = frozen_value + heap.iter().map(|s| s.value).sum::<f64>();
    total_error = frozen_error + heap.iter().map(|s| s.error).sum::<f64>();
    if total_error <= spec.tolerance_for(total_value) {
        Ok(Integral {
            value: total_value,
            err_estimate: total_error,
            evaluations,
        })
    } else {
        Err(Error::NonConvergent {
            value: total_value,
            err_estimate: total_error,
            subdivisions,
        })
    }
}

/// Tensor-product adaptive integration over the unit square.
///
/// The inner integral over `v` runs at a tolerance tighter than the outer one
/// so inner errors do not dominate; adaptive bisection in both directions
/// concentrates nodes near corner singularities. Breakpoints apply to both
/// coordinates.
pub fn integrate_unit_square<F: Fn(f64, f64) -> f64>(
    f: F,
    breaks: &[f64],
    spec: &QuadratureSpec,
) -> Result<Integral> {
    integrate_rectangle(f, (0.0, 1.0), breaks, spec)
}

/// Tensor-product adaptive integration over `[lo, hi]²`, where either end
/// may be infinite.
pub fn integrate_rectangle<F: Fn(f64, f64) -> f64>(
    f: F,
    (lo, hi): (f64, f64),
    breaks: &[f64],
    spec: &QuadratureSpec,
) -> Result<Integral> {
    let inner_spec = QuadratureSpec {
        rel_tol: spec.rel_tol * 0.1,
        abs_tol: spec.abs_tol * 0.1,
        ..*spec
    };
    let inner_error = std::cell::Cell::new(0.0_f64);
    let inner_failure = std::cell::RefCell::new(None::<Error>);
    let evaluations = std::cell::Cell::new(0_usize);
    let outer = integrate_with_breaks(
        |u| match integrate_with_breaks(|v| f(u, v), lo, hi, breaks, &inner_spec) {
            Ok(r) => {
                inner_error.set(inner_error.get().max(r.err_estimate));
                evaluations.set(evaluations.get() + r.evaluations);
                r.value
            }
            Err(e) => {
                inner_failure.borrow_mut().get_or_insert(e);
                f64::NAN
            }
        },
        lo,
        hi,
        breaks,
        spec,
    );
    if let Some(e) = inner_failure.into_inner() {
        return Err(e);
    }
    let outer = outer?;
    Ok(Integral {
        value: outer.value,
        err_estimate: outer.err_estimate + inner_error.get(),
        evaluations: evaluations.get(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn constant_on_unit_interval() {
        let r = integrate_adaptive(|_| 1.0, 0.0, 1.0, &spec()).unwrap();
        assert!((r.value - 1.0).abs() < 1e-15);
    }

    #[test]
    fn exponential_half_line_both_mappings() {
        for mapping in [TailMapping::Rational, TailMapping::Exponential] {
            let s = spec().with_tail_mapping(mapping);
            let r = integrate_adaptive(|x| (-x).exp(), 0.0, f64::INFINITY, &s).unwrap();
            assert!((r.value - 1.0).abs() < 1e-12, "{mapping:?}: {}", r.value);
        }
    }

    #[test]
    fn whole_line_gaussian() {
        let r = integrate_adaptive(
            |x| (-0.5 * x * x).exp(),
            f64::NEG_INFINITY,
            f64::INFINITY,
            &spec(),
        )
        .unwrap();
        assert!((r.value - (2.0 * std::f64::consts::PI).sqrt()).abs() < 1e-11);
    }

    #[test]
    fn polynomials_up_to_degree_five_are_exact() {
        let coeffs = [0.3, -1.2, 2.5, 0.7, -0.4, 1.1];
        let p = |x: f64| coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c);
        let antider = |x: f64| {
            coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| c * x.powi(k as i32 + 1) / (k as f64 + 1.0))
                .sum::<f64>()
        };
        let r = integrate_adaptive(p, -0.7, 1.9, &spec()).unwrap();
        assert!((r.value - (antider(1.9) - antider(-0.7))).abs() < 1e-12);
        assert_eq!(r.evaluations, 21);
    }

    #[test]
    fn log_endpoint_singularity() {
        // ∫₀¹ ln u du = -1
        let r = integrate_adaptive(|u: f64| u.ln(), 0.0, 1.0, &spec()).unwrap();
        assert!((r.value + 1.0).abs() < 1e-10);
    }

    #[test]
    fn jump_handled_with_breakpoint() {
        let f = |u: f64| if u < 0.25 { 3.0 } else { 1.0 / 3.0 };
        let r = integrate_with_breaks(f, 0.0, 1.0, &[0.25], &spec()).unwrap();
        assert!((r.value - 1.0).abs() < 1e-14);
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let tight = QuadratureSpec::new(1e-14, 1e-14, 3).unwrap();
        let err = integrate_adaptive(|x: f64| 1.0 / x.sqrt().sqrt(), 0.0, 1.0, &tight).unwrap_err();
        assert!(matches!(err, Error::NonConvergent { .. }));
    }

    #[test]
    fn divergent_integral_fails() {
        let err =
            integrate_adaptive(|x: f64| 1.0 / (1.0 + x), 0.0, f64::INFINITY, &spec()).unwrap_err();
        assert!(matches!(err, Error::NonConvergent { .. }));
    }

    #[test]
    fn nan_integrand_is_rejected() {
        let err = integrate_adaptive(
            |x: f64| if x > 0.5 { f64::NAN } else { 1.0 },
            0.0,
            1.0,
            &spec(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::NonFinite { .. }));
    }

    #[test]
    fn invalid_spec_rejected() {
        assert!(QuadratureSpec::new(0.0, 1e-12, 10).is_err());
        assert!(QuadratureSpec::new(1e-10, 1e-12, 0).is_err());
        assert!(integrate_adaptive(|x| x, 1.0, 0.0, &spec()).is_err());
    }

    #[test]
    fn unit_square_product() {
        let r = integrate_unit_square(|u, v| 6.0 * u * v * v, &[], &spec()).unwrap();
        assert!((r.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn plane_gaussian() {
        let r = integrate_rectangle(
            |x, y| (-(x * x + x * y + y * y)).exp(),
            (f64::NEG_INFINITY, f64::INFINITY),
            &[],
            &spec(),
        )
        .unwrap();
        // ∫ e^{−zᵀAz} = π/√det A with det A = 3/4.
        assert!((r.value - std::f64::consts::PI / 0.75f64.sqrt()).abs() < 1e-9);
    }
}
