//! Scalar root finding for monotone functions.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub x: f64,
    pub fx: f64,
    pub bracket: (f64, f64),
    pub evaluations: usize,
}

/// Stopping rule for [`brent`]: stop once `|f(x)| <= ftol`, or once the
/// bracket is narrower than `xtol_rel * |x|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stop {
    pub ftol: f64,
    pub xtol_rel: f64,
    pub max_iter: usize,
}

impl Default for Stop {
    fn default() -> Self {
        Self { ftol: 1e-9, xtol_rel: 1e-12, max_iter: 200 }
    }
}

/// Brent's method on a bracket `[a, b]` with `f(a)` and `f(b)` of opposite sign.
pub fn brent<F>(mut f: F, a: f64, b: f64, fa: f64, fb: f64, stop: &Stop) -> Result<Root>
where
    F: FnMut(f64) -> Result<f64>,
{
    let (mut a, mut b, mut fa, mut fb) = (a, b, fa, fb);
    let mut evaluations = 0;
    if fa == 0.0 {
        return Ok(Root { x: a, fx: 0.0, bracket: (a, a), evaluations });
    }
    if fb == 0.0 {
        return Ok(Root { x: b, fx: 0.0, bracket: (b, b), evaluations });
    }
    if fa.signum() == fb.signum() {
        return Err(Error::BracketFailure { expansions: 0 });
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for _ in 0..stop.max_iter {
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
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * stop.xtol_rel * b.abs();
        let m = 0.5 * (c - b);
        if fb.abs() <= stop.ftol || m.abs() <= tol {
            let bracket = if b < c { (b, c) } else { (c, b) };
            return Ok(Root { x: b, fx: fb, bracket, evaluations });
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = f(b)?;
        evaluations += 1;
    }
    let bracket = if b < c { (b, c) } else { (c, b) };
    Ok(Root { x: b, fx: fb, bracket, evaluations })
}

/// Finds the root of a non-increasing function on `(0, ∞)`, starting from
/// `x0` and expanding geometrically by `factor` until the sign flips.
pub fn solve_decreasing<F>(
    mut f: F,
    x0: f64,
    factor: f64,
    max_expansions: usize,
    stop: &Stop,
) -> Result<Root>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut evaluations = 1;
    let f0 = f(x0)?;
    if f0 == 0.0 {
        return Ok(Root { x: x0, fx: 0.0, bracket: (x0, x0), evaluations });
    }
    // f > 0 means x is too small.
    let up = f0 > 0.0;
    let (mut lo, mut flo, mut hi, mut fhi) = (x0, f0, x0, f0);
    let mut found = false;
    for _ in 0..max_expansions {
        if up {
            lo = hi;
            flo = fhi;
            hi *= factor;
            fhi = f(hi)?;
            evaluations += 1;
            if fhi <= 0.0 {
                found = true;
                break;
            }
        } else {
            hi = lo;
            fhi = flo;
            lo /= factor;
            flo = f(lo)?;
            evaluations += 1;
            if flo >= 0.0 {
                found = true;
                break;
            }
        }
    }
    if !found {
        return Err(Error::BracketFailure { expansions: max_expansions });
    }
    let mut root = brent(&mut f, lo, hi, flo, fhi, stop)?;
    root.evaluations += evaluations;
    Ok(root)
}

/// Plain bisection of a sign change on `[a, b]` to absolute width `xtol`.
pub fn bisect<F: FnMut(f64) -> f64>(mut f: F, mut a: f64, mut b: f64, xtol: f64) -> f64 {
    let mut fa = f(a);
    for _ in 0..2000 {
        if (b - a).abs() <= xtol {
            break;
        }
        let m = 0.5 * (a + b);
        if m == a || m == b {
            break;
        }
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}
