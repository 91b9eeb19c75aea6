//! Uniform quantizers: the lattice `kΔ`, its `M`-point truncations, and the
//! high-rate law `s_α(X − X̂_Δ) ≈ Δ s_α(U)`.
//!
//! The error of a lattice quantizer lives on one cell, so its density is the
//! source density folded onto `(−Δ/2, Δ/2]`:
//! `f_E(e) = Σ_k f_X(x̂_k + e)`. The fold is tabulated once at fixed
//! quadrature nodes, after which every evaluation of the strength equation
//! is a single weighted sum. Lattice terms far from the origin are summed
//! with the Euler–Maclaurin midpoint formula instead of one by one.

use crate::error::{Error, Result};
use crate::optim::golden_section;
use crate::quad;
use crate::quantizer::Quantizer;
use crate::stable::ReferenceLaw;
use crate::strength::{self, region_log_moment, strength_of_uniform, SourceSpec, StrengthSolution, DEFAULT_TOL};

/// Lattice terms within this many source scales of the origin are summed
/// explicitly.
const WINDOW_SCALES: f64 = 8.0;
/// ... and at least this many cells on each side.
const WINDOW_CELLS: f64 = 64.0;
/// Depth of the geometric grading of the cell towards the error origin.
const GRADING_LEVELS: i32 = 14;

/// The infinite uniform quantizer `x ∈ (kΔ − Δ/2, kΔ + Δ/2] ↦ kΔ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformSpec {
    pub delta: f64,
    /// Lattice terms `|k| ≤ k_max` are summed explicitly; the rest use the
    /// Euler–Maclaurin remainder, whose error is far below 1e-9 nats.
    pub k_max: u64,
}

impl UniformSpec {
    pub fn new(delta: f64, source: &SourceSpec) -> Result<Self> {
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(Error::OutOfRange(delta));
        }
        let window = window(delta, source);
        Ok(Self { delta, k_max: (window / delta).ceil() as u64 })
    }

    /// `(k, kΔ)` for the cell containing `x`.
    pub fn quantize(&self, x: f64) -> (i64, f64) {
        let k = (x / self.delta - 0.5).ceil() as i64;
        (k, k as f64 * self.delta)
    }
}

fn window(delta: f64, source: &SourceSpec) -> f64 {
    (WINDOW_SCALES * source.scale_hint()).max(WINDOW_CELLS * delta)
}

fn derivative(source: &SourceSpec, x: f64, width: f64) -> Result<f64> {
    let h = 1e-4 * (x.abs() + width);
    Ok((source.density(x + h)? - source.density(x - h)?) / (2.0 * h))
}

/// `Σ f(x)` over `x = a, a + Δ, …, b` (`b` may be infinite, `a` may be
/// negative infinity) by the midpoint rule with its first correction.
fn lattice_block(source: &SourceSpec, a: f64, b: f64, delta: f64) -> Result<f64> {
    let lo = a - 0.5 * delta;
    let hi = b + 0.5 * delta;
    let d_lo = if lo.is_finite() { derivative(source, lo, delta)? } else { 0.0 };
    let d_hi = if hi.is_finite() { derivative(source, hi, delta)? } else { 0.0 };
    Ok(source.mass(lo, hi)? / delta + delta / 24.0 * (d_lo - d_hi))
}

/// `Σ_k f_X(first + kΔ)` over `k ∈ [k_lo, k_hi]` (bounds may be infinite).
fn lattice_sum(source: &SourceSpec, first: f64, delta: f64, k_lo: f64, k_hi: f64, window: f64) -> Result<f64> {
    let e_lo = ((-window - first) / delta).ceil().max(k_lo);
    let e_hi = ((window - first) / delta).floor().min(k_hi);
    let mut total = 0.0;
    if e_lo <= e_hi {
        let mut k = e_lo;
        while k <= e_hi {
            total += source.density(first + k * delta)?;
            k += 1.0;
        }
    }
    let right = e_hi.max(e_lo - 1.0) + 1.0;
    if right <= k_hi {
        total += lattice_block(source, first + right * delta, first + k_hi * delta, delta)?;
    }
    let left = e_lo.min(e_hi + 1.0) - 1.0;
    if left >= k_lo {
        total += lattice_block(source, first + k_lo * delta, first + left * delta, delta)?;
    }
    Ok(total)
}

/// `(e, w f_E(e))` on the cell, graded towards `shift`.
fn folded_nodes(
    source: &SourceSpec,
    delta: f64,
    first: f64,
    k_lo: f64,
    k_hi: f64,
    shift: f64,
) -> Result<Vec<(f64, f64)>> {
    let half = 0.5 * delta;
    let mut edges = vec![-half, half];
    for j in 0..=GRADING_LEVELS {
        let t = delta * 0.5f64.powi(j);
        edges.push(shift + t);
        edges.push(shift - t);
    }
    edges.push(shift);
    edges.retain(|e| *e >= -half && *e <= half);
    edges.sort_by(f64::total_cmp);
    edges.dedup();
    let win = window(delta, source);
    let mut out = Vec::with_capacity(21 * edges.len());
    for w in edges.windows(2) {
        for (e, wt) in quad::kronrod_nodes(w[0], w[1]) {
            let f = lattice_sum(source, first + e, delta, k_lo, k_hi, win)?;
            out.push((e - shift, wt * f));
        }
    }
    Ok(out)
}

fn folded_moment(nodes: &[(f64, f64)], law: &ReferenceLaw, s: f64) -> Result<f64> {
    let mut acc = 0.0;
    for (u, wf) in nodes {
        if *wf != 0.0 {
            acc -= wf * law.log_pdf_radial(u / s)?;
        }
    }
    Ok(acc)
}

fn check(source: &SourceSpec) -> Result<()> {
    if source.dim() != 1 || matches!(source, SourceSpec::Empirical(_)) {
        return Err(Error::InvalidSource("uniform quantizers need a scalar density".into()));
    }
    Ok(())
}

/// Error strength of the infinite uniform quantizer.
pub fn uniform_error_strength(spec: &UniformSpec, source: &SourceSpec, alpha: f64) -> Result<StrengthSolution> {
    shifted_uniform_error_strength(spec, source, alpha, 0.0)
}

/// As [`uniform_error_strength`], with every point moved to `kΔ + shift`
/// while the cells stay put.
pub fn shifted_uniform_error_strength(
    spec: &UniformSpec,
    source: &SourceSpec,
    alpha: f64,
    shift: f64,
) -> Result<StrengthSolution> {
    check(source)?;
    let law = ReferenceLaw::new(alpha, 1)?;
    let nodes = folded_nodes(source, spec.delta, 0.0, f64::NEG_INFINITY, f64::INFINITY, shift)?;
    let h = law.entropy()?;
    let mut gap = |s: f64| Ok(folded_moment(&nodes, &law, s)? - h);
    strength::solve_monotone_with(&mut gap, 0.15 * spec.delta, 2.0, DEFAULT_TOL)
}

/// `Δ s_α(U)`.
pub fn high_rate_prediction(alpha: f64, delta: f64) -> Result<f64> {
    if !(delta > 0.0) {
        return Err(Error::OutOfRange(delta));
    }
    Ok(delta * strength_of_uniform(alpha)?)
}

/// `H(V)` of the infinite uniform quantizer.
pub fn uniform_output_entropy(spec: &UniformSpec, source: &SourceSpec) -> Result<f64> {
    check(source)?;
    let d = spec.delta;
    let k = spec.k_max as f64;
    let mut h = 0.0;
    let mut i = -k;
    while i <= k {
        let p = source.mass((i - 0.5) * d, (i + 0.5) * d)?;
        if p > 0.0 {
            h -= p * p.ln();
        }
        i += 1.0;
    }
    // beyond the window p_k ≈ Δ f(kΔ)
    let edge = (k + 0.5) * d;
    let w = |x: f64| match source.density(x) {
        Ok(f) if f > 0.0 => -(d * f).ln(),
        _ => 0.0,
    };
    h += source.integrate_density(w, edge, f64::INFINITY)?;
    h += source.integrate_density(w, f64::NEG_INFINITY, -edge)?;
    Ok(h)
}

/// Error strength of the `M`-point uniform quantizer of step `Δ`.
pub fn bounded_uniform_error_strength(
    m: usize,
    delta: f64,
    source: &SourceSpec,
    alpha: f64,
) -> Result<StrengthSolution> {
    check(source)?;
    if m == 0 || !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::InvalidQuantizer(format!("M = {m}, delta = {delta}")));
    }
    let law = ReferenceLaw::new(alpha, 1)?;
    let first = -0.5 * (m as f64 - 1.0) * delta;
    let last = -first;
    let nodes = folded_nodes(source, delta, first, 0.0, m as f64 - 1.0, 0.0)?;
    let h = law.entropy()?;
    let symmetric = source.is_symmetric();
    let mut gap = |s: f64| {
        // the outer cells extend to infinity beyond the folded cell
        let mut g = folded_moment(&nodes, &law, s)?;
        let right = region_log_moment(source, &law, last + 0.5 * delta, f64::INFINITY, last, s)?;
        g += if symmetric {
            2.0 * right
        } else {
            right + region_log_moment(source, &law, f64::NEG_INFINITY, first - 0.5 * delta, first, s)?
        };
        Ok(g - h)
    };
    let s0 = (0.15 * delta).min(source.scale_hint());
    strength::solve_monotone_with(&mut gap, s0, 2.0, DEFAULT_TOL)
}

/// An `M`-point uniform quantizer with its step chosen to minimize the error
/// strength.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimalUniform {
    pub delta: f64,
    pub quantizer: Quantizer,
    pub error_strength: f64,
}

/// Minimizes [`bounded_uniform_error_strength`] over `Δ`.
pub fn optimal_uniform(m: usize, source: &SourceSpec, alpha: f64) -> Result<OptimalUniform> {
    check(source)?;
    if m < 2 {
        return Err(Error::InvalidQuantizer("an optimal step needs M ≥ 2".into()));
    }
    let eval = |ln_d: f64| -> f64 {
        bounded_uniform_error_strength(m, ln_d.exp(), source, alpha).map_or(f64::INFINITY, |s| s.value)
    };
    // coarse scan in ln Δ, then golden section around the best cell
    let scale = source.scale_hint();
    let lo = (scale * 1e-2 / m as f64).ln();
    let hi = (scale * 20.0).ln();
    let n = 48;
    let grid: Vec<f64> = (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect();
    let vals: Vec<f64> = grid.iter().map(|x| eval(*x)).collect();
    let best = (0..=n).min_by(|a, b| vals[*a].total_cmp(&vals[*b])).unwrap_or(0);
    if !vals[best].is_finite() {
        return Err(Error::InvalidQuantizer(format!("no finite error strength for M = {m}")));
    }
    let a = grid[best.saturating_sub(1)];
    let b = grid[(best + 1).min(n)];
    let (ln_d, _) = golden_section(eval, a, b, 1e-6);
    let delta = ln_d.exp();
    let sol = bounded_uniform_error_strength(m, delta, source, alpha)?;
    Ok(OptimalUniform { delta, quantizer: Quantizer::uniform(m, delta)?, error_strength: sol.value })
}

/// The unique `u > 0` with `arctan(u)/u = 1 − ratio/2`, for `0 < ratio < 2`.
pub fn kkt_width_solution(ratio: f64) -> Result<f64> {
    if !(ratio > 0.0 && ratio < 2.0) {
        return Err(Error::OutOfRange(ratio));
    }
    let target = 0.5 * ratio;
    // 1 − arctan(u)/u, increasing from 0 to 1
    let deficit = |u: f64| {
        if u < 1e-3 {
            let u2 = u * u;
            u2 * (1.0 / 3.0 - u2 * (1.0 / 5.0 - u2 * (1.0 / 7.0 - u2 / 9.0)))
        } else {
            1.0 - u.atan() / u
        }
    };
    let (mut lo, mut hi) = (-400.0f64, 400.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if deficit(mid.exp()) < target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    Ok((0.5 * (lo + hi)).exp())
}
