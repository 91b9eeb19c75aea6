//! Adaptive Gauss–Kronrod quadrature.
//!
//! Every routine here works with two tolerance pairs: a *target* the
//! subdivision loop tries to reach, and an *acceptance* bound. Running out of
//! subdivisions is only an error when the estimated error exceeds the
//! acceptance bound, which defaults to absolute 1e-10 / relative 1e-8.

use std::collections::BinaryHeap;
use std::cmp::Ordering;

use crate::error::{Error, Result};

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

const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Tolerance {
    pub fn new(abs: f64, rel: f64) -> Self {
        Self { abs, rel }
    }

    fn bound(&self, value: f64) -> f64 {
        self.abs.max(self.rel * value.abs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadConfig {
    pub target: Tolerance,
    pub accept: Tolerance,
    pub max_intervals: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self {
            target: Tolerance::new(1e-14, 1e-12),
            accept: Tolerance::new(1e-10, 1e-8),
            max_intervals: 500,
        }
    }
}

impl QuadConfig {
    /// A looser configuration for nested integrals (d-dimensional densities).
    pub fn reduced() -> Self {
        Self {
            target: Tolerance::new(1e-11, 1e-9),
            accept: Tolerance::new(1e-7, 1e-5),
            max_intervals: 200,
        }
    }

    pub fn with_target(mut self, abs: f64, rel: f64) -> Self {
        self.target = Tolerance::new(abs, rel);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
struct Piece {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl Eq for Piece {}

impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// One 21-point Kronrod panel with the QUADPACK error heuristic.
pub fn gk21<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut res_g = 0.0;
    let mut res_k = fc * WGK[10];
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = res_k * half;
    let res_abs = res_abs * half.abs();
    let res_asc = res_asc * half.abs();
    let mut err = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    (value, err)
}

/// Nodes and weights of the 21-point Kronrod rule on `[a, b]`.
pub fn kronrod_nodes(a: f64, b: f64) -> [(f64, f64); 21] {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut out = [(center, WGK[10] * half); 21];
    for j in 0..10 {
        let dx = half * XGK[j];
        out[2 * j] = (center - dx, WGK[j] * half);
        out[2 * j + 1] = (center + dx, WGK[j] * half);
    }
    out
}

/// Adaptive integration of `f` over `[a, b]`.
pub fn integrate<F: FnMut(f64) -> f64>(f: F, a: f64, b: f64, cfg: &QuadConfig) -> Result<Integral> {
    integrate_pieces(f, &[a, b], cfg)
}

/// Adaptive integration over consecutive breakpoints `points[0] < ... < points[n]`;
/// error control is global across all pieces.
pub fn integrate_pieces<F: FnMut(f64) -> f64>(
    mut f: F,
    points: &[f64],
    cfg: &QuadConfig,
) -> Result<Integral> {
    if points.len() < 2 {
        return Ok(Integral { value: 0.0, error: 0.0, evaluations: 0 });
    }
    let mut heap = BinaryHeap::with_capacity(points.len() + 32);
    let mut evaluations = 0;
    let mut total = 0.0;
    let mut total_err = 0.0;
    // Pieces that cannot be split further are retired here.
    let mut frozen_value = 0.0;
    let mut frozen_err = 0.0;
    for w in points.windows(2) {
        let (a, b) = (w[0], w[1]);
        if a == b {
            continue;
        }
        let (value, error) = gk21(&mut f, a, b);
        evaluations += 21;
        if !value.is_finite() {
            return Err(quad_failure(a, b, value, error));
        }
        total += value;
        total_err += error;
        heap.push(Piece { a, b, value, error });
    }
    let mut count = heap.len();
    loop {
        if total_err <= cfg.target.bound(total) || heap.is_empty() {
            break;
        }
        if count >= cfg.max_intervals {
            break;
        }
        let worst = heap.pop().expect("non-empty heap");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b || (worst.b - worst.a) < 1e-15 * mid.abs().max(1e-300) {
            frozen_value += worst.value;
            frozen_err += worst.error;
            continue;
        }
        let (v1, e1) = gk21(&mut f, worst.a, mid);
        let (v2, e2) = gk21(&mut f, mid, worst.b);
        evaluations += 42;
        if !(v1.is_finite() && v2.is_finite()) {
            return Err(quad_failure(worst.a, worst.b, v1 + v2, e1 + e2));
        }
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.error;
        heap.push(Piece { a: worst.a, b: mid, value: v1, error: e1 });
        heap.push(Piece { a: mid, b: worst.b, value: v2, error: e2 });
        count += 1;
    }
    // Recompute sums to shed accumulated rounding from the running updates.
    let value: f64 = heap.iter().map(|p| p.value).sum::<f64>() + frozen_value;
    let error: f64 = heap.iter().map(|p| p.error).sum::<f64>() + frozen_err;
    if error > cfg.accept.bound(value) {
        return Err(quad_failure(points[0], points[points.len() - 1], value, error));
    }
    Ok(Integral { value, error, evaluations })
}

fn quad_failure(a: f64, b: f64, value: f64, error: f64) -> Error {
    Error::QuadratureFailure { a, b, value, error }
}

/// Integral of `f` over `[a, ∞)` using the substitution `x = a + scale·e^t`.
///
/// The `t` axis is cut into geometrically growing panels in both directions
/// and summation stops once a panel contributes nothing measurable. If the
/// largest representable `x` is reached first, the remainder is extrapolated
/// from the local exponential decay rate in `t` (a power law in `x`); a
/// non-decaying integrand yields [`Error::NonFiniteLogMoment`].
pub fn integrate_semi_infinite<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    scale: f64,
    cfg: &QuadConfig,
) -> Result<Integral> {
    debug_assert!(scale > 0.0);
    let mut g = |t: f64| {
        let e = scale * t.exp();
        let v = f(a + e);
        if v == 0.0 { 0.0 } else { v * e }
    };
    let panel_cfg = QuadConfig {
        target: Tolerance::new(cfg.target.abs / 8.0, cfg.target.rel),
        accept: Tolerance::new(cfg.accept.abs / 8.0, cfg.accept.rel),
        max_intervals: cfg.max_intervals,
    };
    let mut total = 0.0;
    let mut error = 0.0;
    let mut evaluations = 0;
    let negligible = |c: f64, total: f64| c.abs() <= 1e-17 * total.abs() + 1e-300;

    // Upward panels: [0,1], [1,2], [2,4], ...
    let t_cap = (1e300 / scale).ln().min(700.0);
    let mut lo = 0.0;
    let mut hi = 1.0;
    let mut idx = 0;
    let mut reached_cap = false;
    loop {
        let top = if hi >= t_cap { t_cap } else { hi };
        let r = match integrate(&mut g, lo, top, &panel_cfg) {
            Err(Error::QuadratureFailure { value, .. }) if !value.is_finite() => {
                return Err(Error::NonFiniteLogMoment)
            }
            r => r?,
        };
        total += r.value;
        error += r.error;
        evaluations += r.evaluations;
        idx += 1;
        if idx >= 3 && negligible(r.value, total) {
            break;
        }
        if top >= t_cap {
            reached_cap = true;
            break;
        }
        lo = top;
        hi = if hi < 2.0 { hi + 1.0 } else { hi * 2.0 };
    }
    if reached_cap {
        let f1 = g(t_cap - 1.0);
        let f2 = g(t_cap);
        evaluations += 2;
        if f2 != 0.0 {
            let rate = (f1 / f2).ln();
            if !(f1 * f2 > 0.0 && rate.is_finite() && rate > 1e-3) {
                return Err(Error::NonFiniteLogMoment);
            }
            let rem = f2 / rate;
            if rem.abs() > cfg.accept.bound(total) * 1e3 {
                return Err(Error::NonFiniteLogMoment);
            }
            total += rem;
            error += rem.abs() * 1e-2;
        }
    }

    // Downward panels: [-1,0], [-2,-1], [-4,-2], ... down to t = -64.
    let mut hi = 0.0;
    let mut lo = -1.0;
    let mut idx = 0;
    loop {
        let r = integrate(&mut g, lo, hi, &panel_cfg)?;
        total += r.value;
        error += r.error;
        evaluations += r.evaluations;
        idx += 1;
        if (idx >= 2 && negligible(r.value, total)) || lo <= -64.0 {
            break;
        }
        hi = lo;
        lo = if lo > -2.0 { lo - 1.0 } else { lo * 2.0 };
    }
    if lo <= -64.0 {
        let head_end = a + scale * lo.exp();
        if head_end > a {
            let (v, e) = gk21(&mut f, a, head_end);
            total += v;
            error += e;
            evaluations += 21;
        }
    }
    if !total.is_finite() {
        return Err(Error::NonFiniteLogMoment);
    }
    Ok(Integral { value: total, error, evaluations })
}

/// Integral over the whole real line, split at `center`.
pub fn integrate_real_line<F: FnMut(f64) -> f64>(
    mut f: F,
    center: f64,
    scale: f64,
    cfg: &QuadConfig,
) -> Result<Integral> {
    let right = integrate_semi_infinite(&mut f, center, scale, cfg)?;
    let left = integrate_semi_infinite(|y| f(2.0 * center - y), center, scale, cfg)?;
    Ok(Integral {
        value: right.value + left.value,
        error: right.error + left.error,
        evaluations: right.evaluations + left.evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn polynomial_exact() {
        let r = integrate(|x| x * x * x - 2.0 * x + 1.0, -1.0, 2.0, &QuadConfig::default()).unwrap();
        assert!((r.value - (15.0 / 4.0 - 3.0 + 3.0)).abs() < 1e-13);
    }

    #[test]
    fn endpoint_singularity() {
        // ∫_0^1 ln x dx = -1
        let r = integrate(|x: f64| x.ln(), 0.0, 1.0, &QuadConfig::default()).unwrap();
        assert!((r.value + 1.0).abs() < 1e-10, "{}", r.value);
    }

    #[test]
    fn cauchy_mass_and_log_moment() {
        let cfg = QuadConfig::default();
        let f = |x: f64| 1.0 / (PI * (1.0 + x * x));
        let m = integrate_real_line(f, 0.0, 1.0, &cfg).unwrap();
        assert!((m.value - 1.0).abs() < 1e-12, "{}", m.value);
        // E ln(1+X^2) = ln 4 for standard Cauchy
        let l = integrate_real_line(|x| f(x) * (1.0 + x * x).ln(), 0.0, 1.0, &cfg).unwrap();
        assert!((l.value - 4f64.ln()).abs() < 1e-11, "{}", l.value);
    }

    #[test]
    fn power_law_remainder_is_extrapolated() {
        // ∫_1^∞ x^{-1.02} dx = 50; decays too slowly to be finished before the cap
        let r = integrate_semi_infinite(|x: f64| (1.0 + x).powf(-1.02), 0.0, 1.0, &QuadConfig::default())
            .unwrap();
        assert!((r.value - 50.0).abs() < 1e-6, "{}", r.value);
    }

    #[test]
    fn divergent_tail_is_reported() {
        let r = integrate_semi_infinite(|x: f64| 1.0 / (1.0 + x), 0.0, 1.0, &QuadConfig::default());
        assert_eq!(r.unwrap_err(), Error::NonFiniteLogMoment);
    }

    #[test]
    fn failure_when_budget_exhausted() {
        let cfg = QuadConfig { max_intervals: 2, ..QuadConfig::default() };
        let r = integrate(|x: f64| (1.0 / x).sin(), 1e-6, 1.0, &cfg);
        assert!(matches!(r, Err(Error::QuadratureFailure { .. })));
    }
}
