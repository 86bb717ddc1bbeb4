//! Bracketed root finding (Brent) and a grid scan for every sign change.

use crate::error::{Error, Result};

const MAX_ITER: usize = 200;

/// Finds `x` in `bracket` with `|h(x)| <= tol`, or the bracket has collapsed
/// to machine resolution around a sign change.
pub fn find_root<F: Fn(f64) -> f64>(h: F, bracket: (f64, f64), tol: f64) -> Result<f64> {
    brent(&h, bracket.0, bracket.1, tol, 0.0)
}

/// Brent's method. Stops when `|h(x)| <= f_tol` or the bracket is narrower
/// than `x_tol` (plus a few ulps).
pub fn brent<F: Fn(f64) -> f64>(h: &F, lo: f64, hi: f64, f_tol: f64, x_tol: f64) -> Result<f64> {
    let (mut a, mut b) = (lo, hi);
    let mut fa = h(a);
    let mut fb = h(b);
    if !fa.is_finite() || !fb.is_finite() {
        return Err(Error::NonFinite {
            x: if fa.is_finite() { b } else { a },
        });
    }
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::NoSignChange { lo, hi });
    }

    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for _ in 0..MAX_ITER {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * x_tol;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb.abs() <= f_tol || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(xm) };
        fb = h(b);
        if !fb.is_finite() {
            return Err(Error::NonFinite { x: b });
        }
    }
    Err(Error::RootNonConvergent { lo, hi })
}

/// Scan mode: evaluates `h` on `n_grid + 1` equally spaced points and refines
/// every sign change with Brent to `x_tol`. Grid points where `h` is exactly
/// zero are roots themselves. Roots closer than `x_tol` are merged.
pub fn scan_roots<F: Fn(f64) -> f64>(
    h: F,
    bracket: (f64, f64),
    n_grid: usize,
    x_tol: f64,
) -> Result<Vec<f64>> {
    let (lo, hi) = bracket;
    if !(lo < hi) || n_grid == 0 {
        return Err(Error::InvalidParam(format!(
            "scan needs lo < hi and a nonempty grid (got [{lo}, {hi}], {n_grid})"
        )));
    }
    let step = (hi - lo) / n_grid as f64;
    let point = |i: usize| {
        if i == n_grid {
            hi
        } else {
            lo + step * i as f64
        }
    };
    let mut roots: Vec<f64> = Vec::new();
    let mut prev_x = point(0);
    let mut prev_h = h(prev_x);
    if !prev_h.is_finite() {
        return Err(Error::NonFinite { x: prev_x });
    }
    if prev_h == 0.0 {
        roots.push(prev_x);
    }
    for i in 1..=n_grid {
        let x = point(i);
        let hx = h(x);
        if !hx.is_finite() {
            return Err(Error::NonFinite { x });
        }
        if hx == 0.0 {
            roots.push(x);
        } else if prev_h != 0.0 && prev_h.signum() != hx.signum() {
            roots.push(brent(&h, prev_x, x, 0.0, x_tol)?);
        }
        prev_x = x;
        prev_h = hx;
    }
    roots.sort_by(f64::total_cmp);
    roots.dedup_by(|a, b| (*a - *b).abs() <= x_tol);
    Ok(roots)
}
