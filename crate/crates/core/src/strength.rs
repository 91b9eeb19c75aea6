//! The strength `s_α(X)`: the unique `s > 0` with
//! `−E[ln f_Z̃α(X/s)] = h(Z̃α)`.
//!
//! `g(s) = −E[ln f_Z̃α(X/s)]` is non-increasing in `s`, so the strength is found
//! by geometric bracketing followed by Brent's method.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use libm::erfc;
use statrs::function::gamma::digamma;

use crate::error::{Error, Result};
use crate::quad::{self, QuadConfig};
use crate::roots::{self, Stop};
use crate::stable::{self, ReferenceLaw, SampleBatch, StableParams};

/// Euler–Mascheroni constant.
const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Default residual tolerance on `|g(s) − h|`, in nats.
pub const DEFAULT_TOL: f64 = 1e-9;

const BRACKET_FACTOR: f64 = 4.0;
const MAX_EXPANSIONS: usize = 60;

/// A density given as a function together with its support and the points
/// where it is not smooth.
#[derive(Clone)]
pub struct Tabulated {
    density: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    support: (f64, f64),
    breakpoints: Vec<f64>,
    scale: f64,
}

impl fmt::Debug for Tabulated {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Tabulated")
            .field("support", &self.support)
            .field("breakpoints", &self.breakpoints)
            .field("scale", &self.scale)
            .finish()
    }
}

impl Tabulated {
    /// `scale` is a typical magnitude of the variable, used to start the
    /// strength bracket and to grade the quadrature. The density must
    /// integrate to one within 1e-6.
    pub fn new<F>(density: F, support: (f64, f64), breakpoints: Vec<f64>, scale: f64) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        if !(support.0 < support.1) || !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::InvalidSource("empty support or non-positive scale".into()));
        }
        let mut breakpoints: Vec<f64> =
            breakpoints.into_iter().filter(|b| *b > support.0 && *b < support.1).collect();
        breakpoints.sort_by(f64::total_cmp);
        breakpoints.dedup();
        let t = Self { density: Arc::new(density), support, breakpoints, scale };
        let mass = t.integrate(|_| 1.0, support.0, support.1)?;
        if (mass - 1.0).abs() > 1e-6 {
            return Err(Error::InvalidSource(format!("density integrates to {mass}")));
        }
        Ok(t)
    }

    pub fn density(&self, x: f64) -> f64 {
        if x < self.support.0 || x > self.support.1 {
            0.0
        } else {
            (self.density)(x)
        }
    }

    /// `∫_a^b f(x) w(x) dx` with the density's own breakpoints honoured.
    fn integrate<W: Fn(f64) -> f64>(&self, w: W, a: f64, b: f64) -> Result<f64> {
        let lo = a.max(self.support.0);
        let hi = b.min(self.support.1);
        if !(lo < hi) {
            return Ok(0.0);
        }
        let f = |x: f64| {
            let v = self.density(x);
            if v == 0.0 { 0.0 } else { v * w(x) }
        };
        let mut pts = vec![];
        pts.extend(self.breakpoints.iter().copied().filter(|p| *p > lo && *p < hi));
        integrate_line(f, lo, hi, &pts, self.scale)
    }
}

/// A random variable whose strength is measured.
#[derive(Debug, Clone)]
pub enum SourceSpec {
    /// `S(α, γ)`, symmetric about zero.
    SymmetricStable(StableParams),
    /// Samples; vectors are allowed (strength of the norm).
    Empirical(SampleBatch),
    Tabulated(Tabulated),
    /// Uniform on `(−w, w)`.
    UniformInterval { half_width: f64 },
}

impl SourceSpec {
    pub fn symmetric_stable(alpha: f64, gamma: f64) -> Result<Self> {
        Ok(Self::SymmetricStable(StableParams::symmetric(alpha, gamma)?))
    }

    pub fn stable(params: StableParams) -> Result<Self> {
        if params.beta() != 0.0 || params.delta() != 0.0 {
            return Err(Error::InvalidSource("stable source must have beta = delta = 0".into()));
        }
        Ok(Self::SymmetricStable(params))
    }

    pub fn uniform(half_width: f64) -> Result<Self> {
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(Error::InvalidSource(format!("half-width {half_width}")));
        }
        Ok(Self::UniformInterval { half_width })
    }

    pub fn empirical(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidSource("empty sample".into()));
        }
        Ok(Self::Empirical(SampleBatch::scalar(values)?))
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Empirical(b) => b.dim(),
            _ => 1,
        }
    }

    /// Law of `cX`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        if c == 0.0 || !c.is_finite() {
            return Err(Error::ZeroScale);
        }
        Ok(match self {
            Self::SymmetricStable(p) => Self::SymmetricStable(stable::scale_shift(p, c, 0.0)?),
            Self::UniformInterval { half_width } => Self::UniformInterval { half_width: half_width * c.abs() },
            Self::Empirical(b) => Self::Empirical(SampleBatch::new(
                b.values().iter().map(|v| v * c).collect(),
                b.dim(),
                b.seed(),
            )?),
            Self::Tabulated(t) => {
                let inner = t.density.clone();
                let a = c.abs();
                let (lo, hi) = (t.support.0 * c, t.support.1 * c);
                let mut bps: Vec<f64> = t.breakpoints.iter().map(|b| b * c).collect();
                bps.sort_by(f64::total_cmp);
                Self::Tabulated(Tabulated {
                    density: Arc::new(move |x| inner(x / c) / a),
                    support: (lo.min(hi), lo.max(hi)),
                    breakpoints: bps,
                    scale: t.scale * a,
                })
            }
        })
    }

    /// A typical magnitude: `γ`, the half-width, the median `‖x‖`, or the
    /// supplied scale hint.
    pub fn scale_hint(&self) -> f64 {
        match self {
            Self::SymmetricStable(p) => p.gamma(),
            Self::UniformInterval { half_width } => *half_width,
            Self::Tabulated(t) => t.scale,
            Self::Empirical(b) => {
                let mut n: Vec<f64> = b.norms().collect();
                n.sort_by(f64::total_cmp);
                let med = n[n.len() / 2];
                if med > 0.0 { med } else { n.iter().copied().fold(0.0, f64::max) }
            }
        }
    }

    /// Density at `x` (scalar kinds only).
    pub fn density(&self, x: f64) -> Result<f64> {
        match self {
            Self::SymmetricStable(p) => stable::pdf(p, x),
            Self::UniformInterval { half_width } => {
                Ok(if x.abs() < *half_width { 0.5 / half_width } else { 0.0 })
            }
            Self::Tabulated(t) => Ok(t.density(x)),
            Self::Empirical(_) => Err(Error::InvalidSource("empirical source has no density".into())),
        }
    }

    /// `(lo, hi)` outside of which the density vanishes.
    pub fn support(&self) -> (f64, f64) {
        match self {
            Self::UniformInterval { half_width } => (-half_width, *half_width),
            Self::Tabulated(t) => t.support,
            Self::Empirical(b) => {
                let v = b.values();
                (v.iter().copied().fold(f64::INFINITY, f64::min), v.iter().copied().fold(f64::NEG_INFINITY, f64::max))
            }
            Self::SymmetricStable(_) => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    /// Points at which the density is not smooth or changes scale.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            Self::SymmetricStable(p) => {
                let g = p.gamma();
                let mut v = vec![0.0];
                let depth = if p.alpha() < 1.0 { (12.0 / p.alpha()) as i32 } else { 2 };
                for k in -depth..=3 {
                    let x = g * 4f64.powi(k);
                    v.push(x);
                    v.push(-x);
                }
                v.sort_by(f64::total_cmp);
                v
            }
            Self::UniformInterval { half_width } => vec![-half_width, *half_width],
            Self::Tabulated(t) => t.breakpoints.clone(),
            Self::Empirical(_) => vec![],
        }
    }

    /// True if the law of `X` equals the law of `−X`. Tabulated densities are
    /// compared on a grid.
    pub fn is_symmetric(&self) -> bool {
        match self {
            Self::SymmetricStable(_) | Self::UniformInterval { .. } => true,
            Self::Empirical(b) => {
                if b.dim() != 1 {
                    return false;
                }
                let mut v: Vec<f64> = b.values().to_vec();
                v.sort_by(f64::total_cmp);
                v.iter().zip(v.iter().rev()).all(|(a, b)| (a + b).abs() <= 1e-12 * (a.abs() + 1.0))
            }
            Self::Tabulated(t) => {
                if (t.support.0 + t.support.1).abs() > 1e-12 * t.support.1.abs().max(1.0) {
                    return false;
                }
                (1..=400).all(|i| {
                    let x = t.scale * 1e-3 * 1.04f64.powi(i);
                    let (a, b) = (t.density(x), t.density(-x));
                    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1e-300)
                })
            }
        }
    }

    /// `P(a < X ≤ b)`.
    pub fn mass(&self, a: f64, b: f64) -> Result<f64> {
        if !(a < b) {
            return Ok(0.0);
        }
        match self {
            Self::SymmetricStable(p) if p.alpha() == 1.0 => {
                let g = p.gamma();
                // arctan difference written to keep relative accuracy in the tails
                Ok(cauchy_mass(a / g, b / g))
            }
            Self::SymmetricStable(p) if p.alpha() == 2.0 => {
                // σ√2 = 2γ
                let w = 2.0 * p.gamma();
                Ok(gauss_mass(a / w, b / w))
            }
            Self::UniformInterval { half_width: w } => {
                let lo = a.max(-w);
                let hi = b.min(*w);
                Ok(if hi > lo { (hi - lo) / (2.0 * w) } else { 0.0 })
            }
            Self::Empirical(bt) => {
                if bt.dim() != 1 {
                    return Err(Error::InvalidSource("mass of a vector sample".into()));
                }
                let n = bt.values().iter().filter(|&&x| x > a && x <= b).count();
                Ok(n as f64 / bt.len() as f64)
            }
            Self::Tabulated(t) => t.integrate(|_| 1.0, a, b),
            Self::SymmetricStable(_) => self.integrate_density(|_| 1.0, a, b),
        }
    }

    /// `∫_a^b f(x) w(x) dx` for a density source.
    pub(crate) fn integrate_density<W: Fn(f64) -> f64>(&self, w: W, a: f64, b: f64) -> Result<f64> {
        let (lo, hi) = self.support();
        let (a, b) = (a.max(lo), b.min(hi));
        if !(a < b) {
            return Ok(0.0);
        }
        if let Self::Tabulated(t) = self {
            return t.integrate(w, a, b);
        }
        let mut err = None;
        let f = |x: f64| match self.density(x) {
            Ok(v) if v == 0.0 => 0.0,
            Ok(v) => v * w(x),
            Err(e) => {
                err.get_or_insert(e);
                f64::NAN
            }
        };
        let pts: Vec<f64> = self.breakpoints().into_iter().filter(|p| *p > a && *p < b).collect();
        let r = integrate_line(f, a, b, &pts, self.scale_hint());
        match err {
            Some(e) => Err(e),
            None => r,
        }
    }
}

fn cauchy_mass(a: f64, b: f64) -> f64 {
    // P(a < X ≤ b) = (atan b − atan a)/π, via the difference formula when both share a sign.
    if a >= 0.0 || b <= 0.0 {
        let (a, b) = if a >= 0.0 { (a, b) } else { (-b, -a) };
        if b.is_infinite() {
            return if a == 0.0 { 0.5 } else { (1.0 / a).atan() / PI };
        }
        ((b - a) / (1.0 + a * b)).atan() / PI
    } else {
        (b.atan() - a.atan()) / PI
    }
}

fn gauss_mass(a: f64, b: f64) -> f64 {
    // a, b already divided by σ√2.
    if a >= 0.0 {
        0.5 * (erfc(a) - erfc(b))
    } else if b <= 0.0 {
        0.5 * (erfc(-b) - erfc(-a))
    } else {
        1.0 - 0.5 * (erfc(-a) + erfc(b))
    }
}

/// `∫_a^b f` with `a`, `b` possibly infinite, splitting at `pts`.
pub(crate) fn integrate_line<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    pts: &[f64],
    scale: f64,
) -> Result<f64> {
    let cfg = QuadConfig::default();
    let mut edges: Vec<f64> = pts.iter().copied().filter(|p| *p > a && *p < b).collect();
    edges.sort_by(f64::total_cmp);
    edges.dedup();
    let first = if a.is_finite() { a } else { edges.first().copied().unwrap_or(if b.is_finite() { b.min(0.0) } else { 0.0 }) };
    let last = if b.is_finite() { b } else { edges.last().copied().unwrap_or(first.max(0.0)) };
    let mut total = 0.0;
    if a.is_infinite() {
        let s = scale.max(first.abs() * 0.25);
        total += quad::integrate_semi_infinite(|y| f(2.0 * first - y), first, s, &cfg)?.value;
    }
    let mut inner = vec![first];
    inner.extend(edges.iter().copied().filter(|p| *p > first && *p < last));
    inner.push(last);
    if last > first {
        total += quad::integrate_pieces(&mut f, &inner, &cfg)?.value;
    }
    if b.is_infinite() {
        let s = scale.max(last.abs() * 0.25);
        total += quad::integrate_semi_infinite(&mut f, last, s, &cfg)?.value;
    }
    Ok(total)
}

/// Outcome of a strength computation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrengthSolution {
    pub value: f64,
    /// `|g(value) − h(Z̃α)|` in nats.
    pub residual: f64,
    pub bracket: (f64, f64),
    pub evaluations: usize,
}

/// Breakpoints for `u ↦ ln f_Z̃α(u/s)`: zero, and points graded towards zero
/// where the reference density of a small `α` has a sharp peak.
pub(crate) fn reference_breakpoints(law: &ReferenceLaw, s: f64) -> Vec<f64> {
    let base = s * law.scale();
    let depth = if law.alpha() < 1.0 { (4.0 + 10.0 / law.alpha()) as i32 } else { 2 };
    let mut v = vec![0.0];
    for k in -depth..=3 {
        let x = base * 4f64.powi(k);
        v.push(x);
        v.push(-x);
    }
    v.sort_by(f64::total_cmp);
    v
}

/// `−∫_{lo}^{hi} f_X(x) ln f_Z̃α((x − center)/s) dx`, one term of the
/// error-strength sum; with `center = 0` over the real line it is `g(s)`.
pub fn region_log_moment(
    source: &SourceSpec,
    law: &ReferenceLaw,
    lo: f64,
    hi: f64,
    center: f64,
    s: f64,
) -> Result<f64> {
    let mut err = None;
    let (slo, shi) = source.support();
    let (lo, hi) = (lo.max(slo), hi.min(shi));
    if !(lo < hi) {
        return Ok(0.0);
    }
    let integrand = |u: f64| {
        let fx = match source.density(center + u) {
            Ok(v) => v,
            Err(e) => {
                err.get_or_insert(e);
                return f64::NAN;
            }
        };
        if fx == 0.0 {
            return 0.0;
        }
        match law.log_pdf_radial(u / s) {
            Ok(l) => -fx * l,
            Err(e) => {
                err.get_or_insert(e);
                f64::NAN
            }
        }
    };
    let mut pts = reference_breakpoints(law, s);
    pts.extend(source.breakpoints().into_iter().map(|p| p - center));
    let scale = source.scale_hint().max(s);
    let r = integrate_line(integrand, lo - center, hi - center, &pts, scale);
    match err {
        Some(e) => Err(e),
        None => r,
    }
}

/// `g(s) = −E[ln f_Z̃α(X/s)]` in nats.
pub fn g_value(source: &SourceSpec, alpha: f64, s: f64) -> Result<f64> {
    let law = ReferenceLaw::new(alpha, source.dim())?;
    g_with_law(source, &law, s)
}

fn g_with_law(source: &SourceSpec, law: &ReferenceLaw, s: f64) -> Result<f64> {
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::OutOfRange(s));
    }
    match source {
        SourceSpec::Empirical(b) => {
            let mut acc = 0.0;
            for r in b.norms() {
                acc -= law.log_pdf_radial(r / s)?;
            }
            Ok(acc / b.len() as f64)
        }
        _ if source.is_symmetric() => {
            let (_, hi) = source.support();
            Ok(2.0 * region_log_moment(source, law, 0.0, hi, 0.0, s)?)
        }
        _ => region_log_moment(source, law, f64::NEG_INFINITY, f64::INFINITY, 0.0, s),
    }
}

/// Solves `G(s) = 0` for a non-increasing `G`, starting at `s0`.
pub fn solve_monotone<F>(mut gap: F, s0: f64, tol: f64) -> Result<StrengthSolution>
where
    F: FnMut(f64) -> Result<f64>,
{
    solve_monotone_with(&mut gap, s0, BRACKET_FACTOR, tol)
}

pub(crate) fn solve_monotone_with<F>(gap: &mut F, s0: f64, factor: f64, tol: f64) -> Result<StrengthSolution>
where
    F: FnMut(f64) -> Result<f64>,
{
    let stop = Stop { ftol: tol, ..Stop::default() };
    let root = roots::solve_decreasing(&mut *gap, s0, factor, MAX_EXPANSIONS, &stop)?;
    if !(root.fx.abs() <= tol) {
        return Err(Error::ToleranceNotMet { residual: root.fx.abs(), tol });
    }
    Ok(StrengthSolution {
        value: root.x,
        residual: root.fx.abs(),
        bracket: root.bracket,
        evaluations: root.evaluations,
    })
}

fn is_zero_source(source: &SourceSpec) -> bool {
    matches!(source, SourceSpec::Empirical(b) if b.values().iter().all(|v| *v == 0.0))
}

/// `s_α(X)` with residual tolerance `tol` (nats).
pub fn solve_strength(source: &SourceSpec, alpha: f64, tol: f64) -> Result<StrengthSolution> {
    let law = ReferenceLaw::new(alpha, source.dim())?;
    if is_zero_source(source) {
        return Ok(StrengthSolution { value: 0.0, residual: 0.0, bracket: (0.0, 0.0), evaluations: 0 });
    }
    let h = law.entropy()?;
    solve_monotone(|s| Ok(g_with_law(source, &law, s)? - h), source.scale_hint(), tol)
}

/// `α^{1/α} γ`, the strength of `S(α, γ)`.
pub fn strength_closed_form(alpha: f64, gamma: f64) -> f64 {
    alpha.powf(1.0 / alpha) * gamma
}

/// The Cauchy-based strength: the `s` with
/// `E[ln(1 + ‖X‖²/s²)] = ln 4 + ψ((d+1)/2) + γ_e`.
pub fn cb_strength(source: &SourceSpec, d: usize) -> Result<f64> {
    if d == 0 || d != source.dim() {
        return Err(Error::InvalidParams(format!("dimension {d} does not match the source")));
    }
    if is_zero_source(source) {
        return Ok(0.0);
    }
    let rhs = 4f64.ln() + digamma(0.5 * (d as f64 + 1.0)) + EULER_GAMMA;
    let moment = |s: f64| -> Result<f64> {
        match source {
            SourceSpec::Empirical(b) => {
                Ok(b.norms().map(|r| (r / s * (r / s)).ln_1p()).sum::<f64>() / b.len() as f64)
            }
            _ => {
                let (lo, hi) = source.support();
                let f = |x: f64| (x / s * (x / s)).ln_1p();
                if source.is_symmetric() {
                    Ok(2.0 * source.integrate_density(f, 0.0, hi)?)
                } else {
                    source.integrate_density(f, lo, hi)
                }
            }
        }
    };
    let sol = solve_monotone(|s| Ok(moment(s)? - rhs), source.scale_hint(), 1e-12)?;
    Ok(sol.value)
}

/// `s_α(U)` for `U ~ Uniform(−½, ½)`.
pub fn strength_of_uniform(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha <= 2.0) {
        return Err(Error::InvalidParams(format!("alpha = {alpha} not in (0, 2]")));
    }
    if alpha == 2.0 {
        return Ok(1.0 / 12f64.sqrt());
    }
    if alpha == 1.0 {
        // ln(1 + 1/(4s²)) − 2 + 4s·atan(1/(2s)) = ln 4
        let gap = |s: f64| Ok((0.25 / (s * s)).ln_1p() - 2.0 + 4.0 * s * (0.5 / s).atan() - 4f64.ln());
        return Ok(solve_monotone(gap, 0.5, 1e-14)?.value);
    }
    Ok(solve_strength(&SourceSpec::uniform(0.5)?, alpha, DEFAULT_TOL)?.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn closed_form_examples() {
        assert_relative_eq!(strength_closed_form(2.0, 2f64.sqrt()), 2.0, max_relative = 1e-15);
        assert_eq!(strength_closed_form(1.0, 5.0), 5.0);
        assert_relative_eq!(strength_closed_form(0.5, 1.0), 0.25, max_relative = 1e-15);
    }

    #[test]
    fn cauchy_mass_matches_arctan() {
        for &(a, b) in &[(-3.0, 2.0), (1.0, 4.0), (-7.0, -0.5), (10.0, f64::INFINITY), (f64::NEG_INFINITY, -2.0), (f64::NEG_INFINITY, 0.0), (0.0, f64::INFINITY)] {
            let expected = (f64::atan(b) - f64::atan(a)) / PI;
            assert_relative_eq!(cauchy_mass(a, b), expected, max_relative = 1e-13);
        }
    }

    #[test]
    fn gauss_mass_total() {
        assert_relative_eq!(gauss_mass(f64::NEG_INFINITY, f64::INFINITY), 1.0, max_relative = 1e-15);
        assert_relative_eq!(gauss_mass(0.0, f64::INFINITY), 0.5, max_relative = 1e-15);
    }

    #[test]
    fn stable_mass_matches_density_integral() {
        for &(a, g) in &[(2.0, 0.5f64.sqrt()), (2.0, 3.0), (1.0, 2.0), (1.5, 1.0)] {
            let src = SourceSpec::symmetric_stable(a, g).unwrap();
            for &(lo, hi) in &[(0.3, 1.7), (-2.0, 0.5), (1.0, f64::INFINITY)] {
                let direct = src.integrate_density(|_| 1.0, lo, hi).unwrap();
                assert_relative_eq!(src.mass(lo, hi).unwrap(), direct, max_relative = 1e-9);
            }
        }
        // standard normal: P(X ≤ 1) = 0.8413447460685429
        let n = SourceSpec::symmetric_stable(2.0, 0.5f64.sqrt()).unwrap();
        assert_relative_eq!(n.mass(f64::NEG_INFINITY, 1.0).unwrap(), 0.841_344_746_068_542_9, max_relative = 1e-14);
    }

    #[test]
    fn zero_sample_has_zero_strength() {
        let z = SourceSpec::empirical(vec![0.0; 5]).unwrap();
        assert_eq!(solve_strength(&z, 1.3, DEFAULT_TOL).unwrap().value, 0.0);
        assert_eq!(cb_strength(&z, 1).unwrap(), 0.0);
    }

    #[test]
    fn uniform_alpha_two_is_exact() {
        assert_eq!(strength_of_uniform(2.0).unwrap(), 1.0 / 12f64.sqrt());
    }
}
