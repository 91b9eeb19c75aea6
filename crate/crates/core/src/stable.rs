//! Univariate stable laws `S(α, β, γ, δ)` and the reference laws used by the
//! strength measure.
//!
//! Parameterization: the characteristic function is
//! `exp[iδω − γ^α (1 − iβ sgn(ω) Φ(ω)) |ω|^α]` with `Φ = tan(πα/2)` for
//! `α ≠ 1` and `Φ = −(2/π) ln|ω|` for `α = 1`.
//!
//! Density evaluation picks a method per region:
//!
//! | case | method |
//! |------|--------|
//! | `α = 2`, or `α = 1, β = 0` | closed form |
//! | symmetric, `|x/γ| > 30` | convergent / asymptotic tail series |
//! | symmetric, tiny `|x/γ|` | two-term series at the mode |
//! | `|α − 1| < 0.02` | Fourier inversion with panels between zeros of the cosine |
//! | otherwise | Zolotarev's non-oscillatory integral, split at the peak of the integrand |
//!
//! [`pdf_by_inversion`] exposes the Fourier route on its own so that the
//! other methods can be checked against it.

use std::collections::HashMap;
use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::{Arc, Mutex, OnceLock};

use libm::lgamma as ln_gamma;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};
use statrs::function::gamma::digamma;

use crate::cheb::PiecewiseChebyshev;
use crate::error::{Error, Result};
use crate::quad::{self, QuadConfig, Tolerance};
use crate::roots;

/// Beyond this standardized distance the symmetric density is taken from the tail series.
pub const TAIL_CUTOFF: f64 = 30.0;

/// Half-width of the band around `α = 1` where Fourier inversion replaces the
/// Zolotarev integral (whose exponents `1/(α−1)` blow up there).
const NEAR_CAUCHY_BAND: f64 = 0.02;

/// Largest estimated relative truncation error accepted from the tail series.
const SERIES_TOL: f64 = 1e-13;

/// Absolute error below which Zolotarev quadrature is accepted even when the
/// relative target is missed; such densities are far below any use.
const NEGLIGIBLE_DENSITY: f64 = 1e-30;

/// The quadruple `(α, β, γ, δ)` of a univariate stable law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StableParams {
    alpha: f64,
    beta: f64,
    gamma: f64,
    delta: f64,
}

impl StableParams {
    pub fn new(alpha: f64, beta: f64, gamma: f64, delta: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 2.0) {
            return Err(Error::InvalidParams(format!("alpha = {alpha} not in (0, 2]")));
        }
        if !(-1.0..=1.0).contains(&beta) {
            return Err(Error::InvalidParams(format!("beta = {beta} not in [-1, 1]")));
        }
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::InvalidParams(format!("gamma = {gamma} must be positive")));
        }
        if !delta.is_finite() {
            return Err(Error::InvalidParams(format!("delta = {delta} must be finite")));
        }
        Ok(Self { alpha, beta, gamma, delta })
    }

    /// Symmetric `S(α, γ)`, i.e. `β = δ = 0`.
    pub fn symmetric(alpha: f64, gamma: f64) -> Result<Self> {
        Self::new(alpha, 0.0, gamma, 0.0)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn is_symmetric(&self) -> bool {
        self.beta == 0.0 && self.delta == 0.0
    }

    /// Location of the standardized variable: `X = γ Z + loc` with `Z ~ S(α, β, 1, 0)`.
    fn standard_location(&self) -> f64 {
        if self.alpha == 1.0 {
            self.delta + 2.0 / PI * self.beta * self.gamma * self.gamma.ln()
        } else {
            self.delta
        }
    }
}

/// Characteristic function `E[exp(iωX)]`.
pub fn char_fn(p: &StableParams, omega: f64) -> Complex64 {
    if omega == 0.0 {
        return Complex64::new(1.0, 0.0);
    }
    let a = omega.abs();
    let phi = if p.alpha == 1.0 { -2.0 / PI * a.ln() } else { (PI * p.alpha / 2.0).tan() };
    let scale = p.gamma.powf(p.alpha) * a.powf(p.alpha);
    let exponent = Complex64::new(-scale, p.delta * omega + scale * p.beta * omega.signum() * phi);
    exponent.exp()
}

/// Probability density of `S(α, β, γ, δ)` at `x`.
pub fn pdf(p: &StableParams, x: f64) -> Result<f64> {
    if p.alpha == 2.0 {
        let var = 2.0 * p.gamma * p.gamma;
        let d = x - p.delta;
        return Ok((-d * d / (2.0 * var)).exp() / (2.0 * PI * var).sqrt());
    }
    if p.alpha == 1.0 && p.beta == 0.0 {
        let d = x - p.delta;
        return Ok(p.gamma / (PI * (p.gamma * p.gamma + d * d)));
    }
    let z = (x - p.standard_location()) / p.gamma;
    Ok(standard_pdf(p.alpha, p.beta, z)? / p.gamma)
}

/// Density of `S(α, β, 1, 0)`.
fn standard_pdf(alpha: f64, beta: f64, z: f64) -> Result<f64> {
    if beta == 0.0 {
        return Ok(ln_symmetric_pdf(alpha, z)?.exp());
    }
    if (alpha - 1.0).abs() < NEAR_CAUCHY_BAND && alpha != 1.0 {
        return fourier_standard(alpha, beta, z, &QuadConfig::default());
    }
    if alpha == 1.0 {
        return if beta > 0.0 { zolotarev_alpha_one(beta, z) } else { zolotarev_alpha_one(-beta, -z) };
    }
    if z == 0.0 {
        let zeta = beta * (PI * alpha / 2.0).tan();
        let theta0 = zeta.atan() / alpha;
        return Ok(ln_gamma(1.0 + 1.0 / alpha).exp() * theta0.cos()
            / (PI * (1.0 + zeta * zeta).powf(1.0 / (2.0 * alpha))));
    }
    let (b, x) = if z < 0.0 { (-beta, -z) } else { (beta, z) };
    if x > TAIL_CUTOFF && b > -0.9 {
        let (v, err) = tail_series(alpha, b, x);
        if err < SERIES_TOL {
            return Ok(v.exp());
        }
    }
    zolotarev(alpha, b, x)
}

/// `ln f(z)` for the standard symmetric law `S(α, 1)`.
pub fn ln_symmetric_pdf(alpha: f64, z: f64) -> Result<f64> {
    let z = z.abs();
    if alpha == 2.0 {
        return Ok(-0.25 * z * z - (4.0 * PI).sqrt().ln());
    }
    if alpha == 1.0 {
        return Ok(-(PI * (1.0 + z * z)).ln());
    }
    if z > TAIL_CUTOFF {
        let (v, err) = tail_series(alpha, 0.0, z);
        if err < SERIES_TOL {
            return Ok(v);
        }
    }
    if let Some(v) = ln_mode_series(alpha, z) {
        return Ok(v);
    }
    if (alpha - 1.0).abs() < NEAR_CAUCHY_BAND {
        return Ok(fourier_standard(alpha, 0.0, z, &QuadConfig::default())?.ln());
    }
    Ok(zolotarev(alpha, 0.0, z)?.ln())
}

/// Leading tail constant `k` in `f(x) ≈ k |x|^{−α−1}` for `S(α, 1)`.
pub fn tail_constant(alpha: f64) -> f64 {
    ln_gamma(alpha + 1.0).exp() * (PI * alpha / 2.0).sin() / PI
}

/// `ln f(z)` for `S(α, 1)` from the tail series; see [`ln_tail_series_skewed`].
pub fn ln_tail_series(alpha: f64, z: f64) -> f64 {
    ln_tail_series_skewed(alpha, 0.0, z)
}

/// `ln f(z)` of `S(α, β, 1, 0)` at `z > 0` from the tail series
/// `f(z) = (1/π) Σ_{k≥1} (−1)^{k+1} Γ(αk+1)/k! (1+ζ²)^{k/2} sin(k(πα/2 + arctan ζ)) z^{−αk−1}`
/// with `ζ = β tan(πα/2)`. Convergent for `α < 1`, asymptotic for `α > 1`
/// (truncated at the smallest term). Requires `β > −1`.
pub fn ln_tail_series_skewed(alpha: f64, beta: f64, z: f64) -> f64 {
    tail_series(alpha, beta, z).0
}

/// The tail series and an estimate of its relative truncation error.
fn tail_series(alpha: f64, beta: f64, z: f64) -> (f64, f64) {
    let zeta = beta * (PI * alpha / 2.0).tan();
    let phase = PI * alpha / 2.0 + zeta.atan();
    let lz = z.ln() - 0.5 * zeta.mul_add(zeta, 1.0).ln() / alpha;
    let ln_term = |k: f64| ln_gamma(alpha * k + 1.0) - ln_gamma(k + 1.0) - alpha * k * lz;
    let lead = ln_term(1.0);
    let s1 = phase.sin();
    let mut rest = 0.0;
    let mut prev_mag = f64::INFINITY;
    let mut omitted = f64::INFINITY;
    for k in 2..600 {
        let kf = k as f64;
        let sign = if k % 2 == 0 { -1.0 } else { 1.0 };
        let ratio_mag = (ln_term(kf) - lead).exp();
        if alpha > 1.0 && ratio_mag > prev_mag {
            omitted = prev_mag;
            break;
        }
        prev_mag = ratio_mag;
        rest += sign * ratio_mag * (kf * phase).sin() / s1;
        if ratio_mag < 1e-18 {
            omitted = ratio_mag;
            break;
        }
    }
    let err = omitted / (s1.abs() * (1.0 + rest).abs());
    (lead - z.ln() + (s1 / PI).ln() + rest.ln_1p(), err)
}

/// Two-term expansion at the mode, used only when the quadratic correction is
/// below 1e-10 relative:
/// `f(z) ≈ Γ(1/α)/(πα) − Γ(3/α)/(2πα) z²`.
/// Largest `z` at which the two-term mode series is used.
fn mode_series_limit(alpha: f64) -> f64 {
    let c = (ln_gamma(3.0 / alpha) - ln_gamma(1.0 / alpha)).exp() / 2.0;
    (1e-10 / c).sqrt()
}

fn ln_mode_series(alpha: f64, z: f64) -> Option<f64> {
    let c = (ln_gamma(3.0 / alpha) - ln_gamma(1.0 / alpha)).exp() / 2.0;
    let r = c * z * z;
    if r > 1e-10 {
        return None;
    }
    Some(ln_gamma(1.0 / alpha) - (PI * alpha).ln() + (-r).ln_1p())
}

fn zolotarev_cfg() -> QuadConfig {
    QuadConfig {
        target: Tolerance::new(1e-300, 1e-13),
        accept: Tolerance::new(1e-300, 1e-8),
        max_intervals: 400,
    }
}

/// Zolotarev's integral for the density of `S(α, β, 1, 0)` at `x > 0`.
fn zolotarev(alpha: f64, beta: f64, x: f64) -> Result<f64> {
    debug_assert!(x > 0.0 && alpha != 1.0);
    let am1 = alpha - 1.0;
    let tan = (PI * alpha / 2.0).tan();
    let theta0 = (beta * tan).atan() / alpha;
    let span = FRAC_PI_2 + theta0;
    if span <= 1e-15 {
        return Ok(0.0);
    }
    let c0 = (alpha * theta0).cos().ln() / am1;
    let ex = alpha / am1;
    let lnx = ex * x.ln();
    // θ = −θ0 + lo = π/2 − hi; the offsets keep full precision at both ends.
    let ln_g = |lo: f64, hi: f64| {
        let th = if lo < hi { lo - theta0 } else { FRAC_PI_2 - hi };
        let ln_cos = hi.sin().ln();
        lnx + c0 + ex * (ln_cos - (alpha * lo).sin().ln()) + (alpha * theta0 + am1 * th).cos().ln() - ln_cos
    };
    Ok(alpha / (PI * am1.abs() * x) * integrate_offsets(ln_g, span)?)
}

/// Zolotarev's integral for `α = 1`, `β > 0`, any `x`.
fn zolotarev_alpha_one(beta: f64, x: f64) -> Result<f64> {
    let shift = -PI * x / (2.0 * beta) + (2.0 / PI).ln();
    // θ = −π/2 + lo = π/2 − hi
    let ln_g = |lo: f64, hi: f64| {
        let (c, s, a) = if lo < hi {
            (lo.sin(), -lo.cos(), (1.0 - beta) * FRAC_PI_2 + beta * lo)
        } else {
            (hi.sin(), hi.cos(), (1.0 + beta) * FRAC_PI_2 - beta * hi)
        };
        shift + (a / c).ln() + a * s / (c * beta)
    };
    Ok(integrate_offsets(ln_g, PI)? / (2.0 * beta.abs()))
}

/// `∫ g e^{−g} dθ` over an interval of length `span`, with `ln g` given as a
/// function of the distances to the two ends. Each half is integrated in its
/// own offset variable.
fn integrate_offsets<F: Fn(f64, f64) -> f64>(ln_g: F, span: f64) -> Result<f64> {
    let half = 0.5 * span;
    let cfg = zolotarev_cfg();
    let (mut total, mut err) = (0.0, 0.0);
    let mut failure = None;
    for from_low in [true, false] {
        let part = |t: f64| if from_low { ln_g(t, span - t) } else { ln_g(span - t, t) };
        let peak = find_peak(&part, half * 1e-40, half);
        // grade geometrically from the far end down past the peak
        let floor = peak.first().map_or(half * 1e-6, |p| p * 1e-4);
        let mut pts = vec![0.0];
        let mut t = half;
        while t > floor {
            pts.push(t);
            t *= 0.25;
        }
        pts.extend(peak);
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        match quad::integrate_pieces(|t| peak_kernel(part(t)), &pts, &cfg) {
            Ok(r) => total += r.value,
            Err(Error::QuadratureFailure { value, error, .. }) => {
                total += value;
                err += error;
                failure = failure.or(Some((pts[0], pts[pts.len() - 1])));
            }
            Err(e) => return Err(e),
        }
    }
    if let Some((a, b)) = failure {
        if err > cfg.accept.rel * total.abs() && err > NEGLIGIBLE_DENSITY {
            return Err(Error::QuadratureFailure { a, b, value: total, error: err });
        }
    }
    Ok(total)
}

/// `g e^{−g}` given `ln g`; the integrand of Zolotarev's representation.
fn peak_kernel(ln_g: f64) -> f64 {
    if ln_g.is_nan() || ln_g > 6.0 * std::f64::consts::LN_10 || ln_g == f64::NEG_INFINITY {
        return 0.0;
    }
    (ln_g - ln_g.exp()).exp()
}

/// Points in `(a, b)` where `ln g` crosses −3, 0 and 3. The maximum of
/// `g e^{−g}` sits at `ln g = 0`; `ln g` is monotone on the interval.
fn find_peak<F: Fn(f64) -> f64>(ln_g: &F, a: f64, b: f64) -> Vec<f64> {
    let (ga, gb) = (ln_g(a), ln_g(b));
    let mut out = Vec::with_capacity(3);
    for level in [-3.0, 0.0, 3.0] {
        if !((ga - level) * (gb - level) < 0.0) {
            continue;
        }
        // bisect in log space when the crossing may sit very close to `a`
        let t = roots::bisect(|u| ln_g(u.exp()) - level, a.ln(), b.ln(), 1e-15);
        out.push(t.exp());
    }
    out.sort_by(f64::total_cmp);
    out.dedup();
    out
}

/// Density by direct Fourier inversion `f(x) = (1/π) ∫_0^∞ Re[φ(ω) e^{−iωx}] dω`,
/// integrated panel by panel between consecutive zeros of `cos(ωx)`.
pub fn pdf_by_inversion(p: &StableParams, x: f64) -> Result<f64> {
    let z = (x - p.standard_location()) / p.gamma;
    Ok(fourier_standard(p.alpha, p.beta, z, &QuadConfig::default())? / p.gamma)
}

fn fourier_standard(alpha: f64, beta: f64, z: f64, cfg: &QuadConfig) -> Result<f64> {
    let upper = 42f64.powf(1.0 / alpha);
    let skew = if alpha == 1.0 { 0.0 } else { beta * (PI * alpha / 2.0).tan() };
    let integrand = |w: f64| {
        if w == 0.0 {
            return 1.0;
        }
        let wa = w.powf(alpha);
        let phase = if alpha == 1.0 { -2.0 / PI * beta * w * w.ln() } else { skew * wa } - w * z;
        (-wa).exp() * phase.cos()
    };
    let width = if z == 0.0 { upper } else { (PI / z.abs()).min(upper) };
    let mut pts = vec![0.0];
    // Resolve the cusp at ω = 0 for small α.
    let first = width.min(1.0);
    let mut k = 30;
    while k > 0 {
        pts.push(first * 2f64.powi(-k));
        k -= 6;
    }
    let mut w = first;
    while w < upper {
        pts.push(w);
        w += width;
    }
    pts.push(upper);
    pts.dedup();
    let cfg = QuadConfig {
        target: Tolerance::new(1e-15, 1e-13),
        max_intervals: pts.len() + cfg.max_intervals,
        ..*cfg
    };
    let r = quad::integrate_pieces(integrand, &pts, &cfg)?;
    Ok((r.value / PI).max(0.0))
}

/// Law of `X₁ + X₂` for independent stable variables with a common `α`.
pub fn add_independent(p1: &StableParams, p2: &StableParams) -> Result<StableParams> {
    if p1.alpha != p2.alpha {
        return Err(Error::AlphaMismatch(p1.alpha, p2.alpha));
    }
    let a = p1.alpha;
    let w1 = p1.gamma.powf(a);
    let w2 = p2.gamma.powf(a);
    let gamma = (w1 + w2).powf(1.0 / a);
    let beta = (p1.beta * w1 + p2.beta * w2) / (w1 + w2);
    StableParams::new(a, beta.clamp(-1.0, 1.0), gamma, p1.delta + p2.delta)
}

/// Law of `cX + shift`.
pub fn scale_shift(p: &StableParams, c: f64, shift: f64) -> Result<StableParams> {
    if c == 0.0 {
        return Err(Error::ZeroScale);
    }
    let mut delta = c * p.delta;
    if p.alpha == 1.0 {
        delta -= 2.0 / PI * c * p.gamma * p.beta * c.abs().ln();
    }
    StableParams::new(p.alpha, c.signum() * p.beta, c.abs() * p.gamma, delta + shift)
}

/// Draws stored row-major; `dim` values per draw.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleBatch {
    values: Vec<f64>,
    dim: usize,
    seed: u64,
}

impl SampleBatch {
    pub fn new(values: Vec<f64>, dim: usize, seed: u64) -> Result<Self> {
        if dim == 0 || values.len() % dim != 0 {
            return Err(Error::InvalidSource(format!(
                "{} values cannot be split into rows of {dim}",
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidSource("non-finite sample".into()));
        }
        Ok(Self { values, dim, seed })
    }

    pub fn scalar(values: Vec<f64>) -> Result<Self> {
        Self::new(values, 1, 0)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn len(&self) -> usize {
        self.values.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn rows(&self) -> std::slice::ChunksExact<'_, f64> {
        self.values.chunks_exact(self.dim)
    }

    pub fn norms(&self) -> impl Iterator<Item = f64> + '_ {
        self.rows().map(|r| r.iter().map(|v| v * v).sum::<f64>().sqrt())
    }
}

fn open_unit<R: Rng>(rng: &mut R) -> f64 {
    loop {
        let u: f64 = rng.random();
        if u > 0.0 {
            return u;
        }
    }
}

/// One Chambers–Mallows–Stuck draw from `S(α, β, 1, 0)`.
fn cms_standard<R: Rng>(alpha: f64, beta: f64, rng: &mut R) -> f64 {
    let v = PI * (open_unit(rng) - 0.5);
    let w: f64 = rng.sample(Exp1);
    if alpha == 1.0 {
        let a = FRAC_PI_2 + beta * v;
        return 2.0 / PI * (a * v.tan() - beta * ((FRAC_PI_2 * w * v.cos()) / a).ln());
    }
    let t = beta * (PI * alpha / 2.0).tan();
    let b = t.atan() / alpha;
    let s = (1.0 + t * t).powf(1.0 / (2.0 * alpha));
    let av = alpha * (v + b);
    s * av.sin() / v.cos().powf(1.0 / alpha) * ((v - av).cos() / w).powf((1.0 - alpha) / alpha)
}

/// `n` i.i.d. draws of `S(α, β, γ, δ)` (Chambers–Mallows–Stuck), reproducible from `seed`.
pub fn sample(p: &StableParams, n: usize, seed: u64) -> SampleBatch {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let loc = p.standard_location();
    let values = if p.alpha == 2.0 {
        let sd = 2f64.sqrt() * p.gamma;
        (0..n).map(|_| p.delta + sd * rng.sample::<f64, _>(StandardNormal)).collect()
    } else {
        (0..n).map(|_| loc + p.gamma * cms_standard(p.alpha, p.beta, &mut rng)).collect()
    };
    SampleBatch { values, dim: 1, seed }
}

/// `n` draws of the sub-Gaussian vector `A^{1/2} G` in `d` dimensions, where
/// `G` has i.i.d. `N(0, 2γ²)` components and `A ~ S(α/2, 1, cos(πα/4)^{2/α}, 0)`.
pub fn sample_subgaussian(alpha: f64, gamma: f64, d: usize, n: usize, seed: u64) -> Result<SampleBatch> {
    StableParams::symmetric(alpha, gamma)?;
    if d == 0 {
        return Err(Error::InvalidParams("dimension must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sd = 2f64.sqrt() * gamma;
    let mut values = Vec::with_capacity(n * d);
    let gamma_a = (PI * alpha / 4.0).cos().powf(2.0 / alpha);
    for _ in 0..n {
        let root_a = if alpha == 2.0 {
            1.0
        } else {
            (gamma_a * cms_standard(alpha / 2.0, 1.0, &mut rng)).max(0.0).sqrt()
        };
        for _ in 0..d {
            values.push(root_a * sd * rng.sample::<f64, _>(StandardNormal));
        }
    }
    Ok(SampleBatch { values, dim: d, seed })
}

/// `ln f` of `S(α, 1)` interpolated in `ln z` between the ranges of the mode
/// and tail series, where every direct evaluation is a quadrature.
#[derive(Debug)]
struct LogDensityTable {
    alpha: f64,
    z_lo: f64,
    z_hi: f64,
    table: PiecewiseChebyshev,
}

impl LogDensityTable {
    fn build(alpha: f64) -> Result<Self> {
        let z_lo = mode_series_limit(alpha);
        let mut z_hi = TAIL_CUTOFF;
        while tail_series(alpha, 0.0, z_hi).1 >= SERIES_TOL && z_hi < 1e5 {
            z_hi *= 2.0;
        }
        let table = PiecewiseChebyshev::build(|t| ln_symmetric_pdf(alpha, t.exp()), z_lo.ln(), z_hi.ln(), 0.125, 16)?;
        Ok(Self { alpha, z_lo, z_hi, table })
    }

    fn ln_pdf(&self, z: f64) -> Result<f64> {
        if z > self.z_lo && z < self.z_hi {
            Ok(self.table.eval(z.ln()))
        } else {
            ln_symmetric_pdf(self.alpha, z)
        }
    }
}

fn log_density_table(alpha: f64) -> Result<Arc<LogDensityTable>> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Arc<LogDensityTable>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(t) = cache.lock().ok().and_then(|c| c.get(&alpha.to_bits()).cloned()) {
        return Ok(t);
    }
    let t = Arc::new(LogDensityTable::build(alpha)?);
    if let Ok(mut c) = cache.lock() {
        c.insert(alpha.to_bits(), t.clone());
    }
    Ok(t)
}

/// `ln f(z)` of `S(α, 1)` through the cached interpolation table.
pub(crate) fn ln_symmetric_pdf_tabulated(alpha: f64, z: f64) -> Result<f64> {
    if alpha == 1.0 || alpha == 2.0 {
        return ln_symmetric_pdf(alpha, z);
    }
    log_density_table(alpha)?.ln_pdf(z.abs())
}

/// The reference symmetric law `S(α, (1/α)^{1/α})` in `d` dimensions
/// (sub-Gaussian for `α < 2`, i.i.d. unit normals for `α = 2`).
#[derive(Debug)]
pub struct ReferenceLaw {
    alpha: f64,
    dim: usize,
    entropy: OnceLock<f64>,
}

impl Clone for ReferenceLaw {
    fn clone(&self) -> Self {
        let entropy = OnceLock::new();
        if let Some(h) = self.entropy.get() {
            let _ = entropy.set(*h);
        }
        Self { alpha: self.alpha, dim: self.dim, entropy }
    }
}

fn entropy_cache() -> &'static Mutex<HashMap<(u64, usize), f64>> {
    static CACHE: OnceLock<Mutex<HashMap<(u64, usize), f64>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

impl ReferenceLaw {
    pub fn new(alpha: f64, dim: usize) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 2.0) {
            return Err(Error::InvalidParams(format!("alpha = {alpha} not in (0, 2]")));
        }
        if dim == 0 {
            return Err(Error::InvalidParams("dimension must be positive".into()));
        }
        Ok(Self { alpha, dim, entropy: OnceLock::new() })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `(1/α)^{1/α}`.
    pub fn scale(&self) -> f64 {
        (1.0 / self.alpha).powf(1.0 / self.alpha)
    }

    /// `ln f(x)` for a scalar argument (`d = 1`) or a radius (`d ≥ 2`).
    pub fn log_pdf_radial(&self, r: f64) -> Result<f64> {
        let r = r.abs();
        let d = self.dim as f64;
        match (self.dim, self.alpha) {
            (1, a) if a == 2.0 => Ok(-0.5 * (2.0 * PI).ln() - 0.5 * r * r),
            (1, a) if a == 1.0 => Ok(-(PI * (1.0 + r * r)).ln()),
            (1, a) => {
                let s = self.scale();
                Ok(ln_symmetric_pdf_tabulated(a, r / s)? - s.ln())
            }
            (_, a) if a == 2.0 => Ok(-0.5 * d * (2.0 * PI).ln() - 0.5 * r * r),
            (_, a) if a == 1.0 => {
                let h = 0.5 * (d + 1.0);
                Ok(ln_gamma(h) - h * PI.ln() - h * (r * r).ln_1p())
            }
            _ => Ok(subgaussian_pdf_radial(self.alpha, self.scale(), self.dim, r)?.ln()),
        }
    }

    /// `ln f(x)` for a point of dimension `d`.
    pub fn log_pdf(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim {
            return Err(Error::InvalidParams(format!(
                "point has {} coordinates, law has {}",
                x.len(),
                self.dim
            )));
        }
        let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        self.log_pdf_radial(r)
    }

    /// Differential entropy `h(Z̃_α)` in nats; computed once and cached.
    pub fn entropy(&self) -> Result<f64> {
        if let Some(h) = self.entropy.get() {
            return Ok(*h);
        }
        let key = (self.alpha.to_bits(), self.dim);
        let cached = entropy_cache().lock().map(|c| c.get(&key).copied()).unwrap_or(None);
        let h = match cached {
            Some(h) => h,
            None => {
                let h = self.compute_entropy()?;
                if let Ok(mut c) = entropy_cache().lock() {
                    c.insert(key, h);
                }
                h
            }
        };
        Ok(*self.entropy.get_or_init(|| h))
    }

    fn compute_entropy(&self) -> Result<f64> {
        let d = self.dim as f64;
        if self.alpha == 2.0 {
            return Ok(0.5 * d * (2.0 * PI * std::f64::consts::E).ln());
        }
        if self.alpha == 1.0 {
            let h = 0.5 * (d + 1.0);
            return Ok(h * (digamma(h) - digamma(0.5)) + h * PI.ln() - ln_gamma(h));
        }
        if self.dim == 1 {
            return Ok(symmetric_entropy(self.alpha)? + self.scale().ln());
        }
        self.radial_entropy()
    }

    fn radial_entropy(&self) -> Result<f64> {
        let d = self.dim as f64;
        let sphere = 2.0 * PI.powf(0.5 * d) / ln_gamma(0.5 * d).exp();
        let cfg = QuadConfig::reduced();
        let r = quad::integrate_semi_infinite(
            |r| {
                let lf = self.log_pdf_radial(r).unwrap_or(f64::NAN);
                if lf == f64::NEG_INFINITY { 0.0 } else { -r.powf(d - 1.0) * lf.exp() * lf }
            },
            0.0,
            self.scale(),
            &cfg,
        )?;
        Ok(sphere * r.value)
    }
}

/// Differential entropy of the standard symmetric law `S(α, 1)` by numerical
/// integration of `−f ln f`. The body is integrated on geometrically graded
/// pieces of `[0, 30]`; the tail beyond uses the tail series with a power-law
/// remainder.
pub fn symmetric_entropy(alpha: f64) -> Result<f64> {
    let cfg = QuadConfig::default();
    let neg_f_ln_f = |z: f64| -> f64 {
        match ln_symmetric_pdf(alpha, z) {
            Ok(l) if l.is_finite() => -l.exp() * l,
            Ok(_) => 0.0,
            Err(_) => f64::NAN,
        }
    };
    let mut pts = vec![0.0];
    let mut edges = Vec::new();
    let mut e = TAIL_CUTOFF;
    while e > 1e-32 {
        edges.push(e);
        e *= 0.5;
    }
    edges.reverse();
    pts.extend(edges);
    let body = quad::integrate_pieces(neg_f_ln_f, &pts, &cfg.with_target(1e-15, 1e-13))?;
    let tail = quad::integrate_semi_infinite(neg_f_ln_f, TAIL_CUTOFF, TAIL_CUTOFF, &cfg)?;
    Ok(2.0 * (body.value + tail.value))
}

/// Density of the sub-Gaussian vector `S(α, γ)` in `d` dimensions at radius `r`,
/// as the Gaussian scale mixture `∫ f_A(a) N_d(r; a·2γ²) da`.
pub fn subgaussian_pdf_radial(alpha: f64, gamma: f64, d: usize, r: f64) -> Result<f64> {
    let d = d as f64;
    let var_g = 2.0 * gamma * gamma;
    if alpha == 2.0 {
        return Ok((-r * r / (2.0 * var_g)).exp() / (2.0 * PI * var_g).powf(0.5 * d));
    }
    let gamma_a = (PI * alpha / 4.0).cos().powf(2.0 / alpha);
    let mixer = StableParams::new(alpha / 2.0, 1.0, gamma_a, 0.0)?;
    let cfg = QuadConfig::reduced();
    let res = quad::integrate_semi_infinite(
        |a| {
            if a <= 0.0 {
                return 0.0;
            }
            let v = a * var_g;
            let ln_gauss = -r * r / (2.0 * v) - 0.5 * d * (2.0 * PI * v).ln();
            match pdf(&mixer, a) {
                Ok(fa) if fa > 0.0 => (fa.ln() + ln_gauss).exp(),
                Ok(_) => 0.0,
                Err(_) => f64::NAN,
            }
        },
        0.0,
        gamma_a.max(1e-3),
        &cfg,
    )?;
    Ok(res.value)
}
