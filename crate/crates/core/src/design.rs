//! Iterative design of strength-optimal symmetric quantizers.
//!
//! Starting from seeded quantile points, the loop alternates nearest-neighbour
//! boundaries with a Nelder–Mead search over the positive points (in log
//! coordinates, the negative half mirrored) until the error strength stops
//! improving.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::optim::NelderMead;
use crate::quantizer::{initial_guess, midpoint_boundaries, mirror, strength_of_partition, Quantizer};
use crate::roots;
use crate::stable::ReferenceLaw;
use crate::strength::SourceSpec;

/// Relative improvement below which the outer loop stops.
pub const DEFAULT_DESIGN_REL_TOL: f64 = 1e-6;
pub const MAX_OUTER_ITERATIONS: usize = 200;
/// Points closer than this are treated as merged.
pub const MERGE_DISTANCE: f64 = 1e-9;
/// Log-scale standard deviation of the seeded jitter on the starting points.
const JITTER: f64 = 0.05;
/// Residual tolerance of the inner strength solves; tighter than the public
/// default so that the minimizer sees a smooth objective.
const INNER_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct DesignReport {
    pub quantizer: Quantizer,
    pub error_strength: f64,
    pub iterations: usize,
    /// Error strength of the initial quantizer and after every iteration.
    pub strength_trace: Vec<f64>,
    pub seed: u64,
}

/// Symmetric about zero and non-increasing in `|x|`, checked on a grid.
pub fn is_symmetric_unimodal(source: &SourceSpec) -> Result<bool> {
    if !source.is_symmetric() {
        return Ok(false);
    }
    match source {
        SourceSpec::SymmetricStable(_) | SourceSpec::UniformInterval { .. } | SourceSpec::Empirical(_) => Ok(true),
        SourceSpec::Tabulated(_) => {
            let scale = source.scale_hint();
            let mut prev = source.density(0.0)?;
            for i in 1..=600 {
                let x = scale * 1e-4 * 1.03f64.powi(i);
                let f = source.density(x)?;
                if f > prev * (1.0 + 1e-9) + 1e-300 {
                    return Ok(false);
                }
                prev = f;
            }
            Ok(true)
        }
    }
}

/// `x` with `P(|X| ≤ x) = level`.
fn abs_quantile(source: &SourceSpec, level: f64) -> Result<f64> {
    let scale = source.scale_hint();
    let f = |x: f64| Ok(level - source.mass(-x, x)?);
    let stop = roots::Stop { ftol: 1e-12, xtol_rel: 1e-10, max_iter: 200 };
    Ok(roots::solve_decreasing(f, scale, 2.0, 200, &stop)?.x)
}

/// Positive points at the source quantiles `(2j+1)/(2M)`, jittered in log
/// scale by the seed.
fn initial_points(source: &SourceSpec, m: usize, seed: u64) -> Result<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pts = Vec::with_capacity(m / 2);
    for j in m.div_ceil(2)..m {
        let q = (2 * j + 1) as f64 / (2 * m) as f64;
        let x = abs_quantile(source, 2.0 * q - 1.0)?;
        let z: f64 = rng.sample(StandardNormal);
        pts.push(x * (JITTER * z).exp());
    }
    pts.sort_by(f64::total_cmp);
    Ok(pts)
}

fn check_distinct(points: &[f64]) -> Result<()> {
    for w in points.windows(2) {
        if w[1] - w[0] < MERGE_DISTANCE {
            return Err(Error::DegenerateDesign(w[0], w[1]));
        }
    }
    Ok(())
}

struct Objective<'a> {
    source: &'a SourceSpec,
    law: ReferenceLaw,
    odd: bool,
    warm: f64,
}

impl Objective<'_> {
    fn strength(&mut self, points: &[f64], boundaries: &[f64]) -> Result<f64> {
        let sol = strength_of_partition(points, boundaries, self.source, &self.law, self.warm, 1.25, INNER_TOL)?;
        self.warm = sol.value;
        Ok(sol.value)
    }

    /// Minimizes over the positive points with `boundaries` held fixed.
    fn step(&mut self, positive: &[f64], boundaries: &[f64]) -> Result<Vec<f64>> {
        let odd = self.odd;
        let y0: Vec<f64> = positive.iter().map(|p| p.ln()).collect();
        let mut run = |start: &[f64], step: f64| {
            let nm = NelderMead { step, ftol_rel: 1e-11, xtol: 1e-7, max_evals: 400 + 300 * start.len() };
            nm.minimize(
                |y| {
                    let mut p: Vec<f64> = y.iter().map(|v| v.exp()).collect();
                    p.sort_by(f64::total_cmp);
                    let full = mirror(&p, odd);
                    self.strength(&full, boundaries).unwrap_or(f64::INFINITY)
                },
                start,
            )
        };
        let first = run(&y0, 0.1);
        // one restart from a fresh simplex around the first answer
        let second = run(&first.x, 0.02);
        let best = if second.value <= first.value { second } else { first };
        let mut p: Vec<f64> = best.x.iter().map(|v| v.exp()).collect();
        p.sort_by(f64::total_cmp);
        Ok(p)
    }
}

/// Designs an `M`-point symmetric quantizer minimizing the error strength.
///
/// `tol` is the absolute improvement (strength units) below which the loop
/// stops; `None` means `1e-6` times the current strength.
pub fn design_optimal(
    source: &SourceSpec,
    alpha: f64,
    m: usize,
    tol: Option<f64>,
    seed: u64,
) -> Result<DesignReport> {
    if m == 0 {
        return Err(Error::InvalidQuantizer("M must be positive".into()));
    }
    if source.dim() != 1 || !is_symmetric_unimodal(source)? {
        return Err(Error::NonSymmetricSource);
    }
    let law = ReferenceLaw::new(alpha, 1)?;
    let odd = m % 2 == 1;
    let mut positive = initial_points(source, m, seed)?;
    let full = mirror(&positive, odd);
    check_distinct(&full)?;
    let mut obj = Objective { source, law, odd, warm: initial_guess(&full, source) };
    let boundaries = if m == 1 { vec![] } else { midpoint_boundaries(&full)? };
    let mut current = obj.strength(&full, &boundaries)?;
    let mut trace = vec![current];
    let mut iterations = 0;
    if m > 1 {
        while iterations < MAX_OUTER_ITERATIONS {
            let full = mirror(&positive, odd);
            let boundaries = midpoint_boundaries(&full)?;
            let candidate = obj.step(&positive, &boundaries)?;
            let cand_full = mirror(&candidate, odd);
            check_distinct(&cand_full)?;
            let next = obj.strength(&cand_full, &midpoint_boundaries(&cand_full)?)?;
            iterations += 1;
            if next > current {
                break;
            }
            let improvement = current - next;
            positive = candidate;
            current = next;
            trace.push(current);
            if improvement < tol.unwrap_or(DEFAULT_DESIGN_REL_TOL * current) {
                break;
            }
        }
    }
    let quantizer = Quantizer::symmetric(&positive, odd)?;
    Ok(DesignReport { quantizer, error_strength: current, iterations, strength_trace: trace, seed })
}

/// Runs [`design_optimal`] once per seed and keeps the lowest strength.
pub fn design_best_of(
    source: &SourceSpec,
    alpha: f64,
    m: usize,
    tol: Option<f64>,
    seeds: &[u64],
) -> Result<DesignReport> {
    let mut best: Option<DesignReport> = None;
    let mut last_err = None;
    for &seed in seeds {
        match design_optimal(source, alpha, m, tol, seed) {
            Ok(r) => {
                if best.as_ref().is_none_or(|b| r.error_strength < b.error_strength) {
                    best = Some(r);
                }
            }
            Err(e) => last_err = Some(e),
        }
    }
    best.ok_or_else(|| last_err.unwrap_or(Error::InvalidParams("no seeds".into())))
}
