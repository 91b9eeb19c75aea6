//! Scalar quantizers and the strength of their error.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::stable::ReferenceLaw;
use crate::strength::{self, region_log_moment, SourceSpec, StrengthSolution, DEFAULT_TOL};

/// An `M`-point scalar quantizer. Region `j` is `(r_{j−1}, r_j]` with
/// `r_{−1} = −∞` and `r_{M−1} = +∞`.
#[derive(Debug, Clone, PartialEq)]
pub struct Quantizer {
    points: Vec<f64>,
    boundaries: Vec<f64>,
    symmetric: bool,
}

fn strictly_increasing(v: &[f64]) -> bool {
    v.iter().all(|x| x.is_finite()) && v.windows(2).all(|w| w[0] < w[1])
}

/// `r_j = (x̂_j + x̂_{j+1}) / 2`.
pub fn midpoint_boundaries(points: &[f64]) -> Result<Vec<f64>> {
    if points.len() < 2 {
        return Err(Error::InvalidQuantizer("need at least two points".into()));
    }
    if !strictly_increasing(points) {
        return Err(Error::NotSorted);
    }
    Ok(points.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect())
}

impl Quantizer {
    pub fn new(points: Vec<f64>, boundaries: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidQuantizer("no representation points".into()));
        }
        if !strictly_increasing(&points) || !strictly_increasing(&boundaries) {
            return Err(Error::NotSorted);
        }
        if boundaries.len() + 1 != points.len() {
            return Err(Error::InvalidQuantizer(format!(
                "{} points need {} boundaries, got {}",
                points.len(),
                points.len() - 1,
                boundaries.len()
            )));
        }
        for (j, r) in boundaries.iter().enumerate() {
            if !(points[j] < *r && *r < points[j + 1]) {
                return Err(Error::InvalidQuantizer(format!("boundary {r} outside ({}, {})", points[j], points[j + 1])));
            }
        }
        let symmetric = is_mirrored(&points) && is_mirrored(&boundaries) && {
            let mids = midpoint_boundaries(&points).unwrap_or_default();
            mids.iter().zip(&boundaries).all(|(m, r)| (m - r).abs() <= 1e-12 * m.abs().max(1e-300))
        };
        Ok(Self { points, boundaries, symmetric })
    }

    /// Nearest-neighbour quantizer for the given points.
    pub fn from_points(points: Vec<f64>) -> Result<Self> {
        if points.len() == 1 {
            return Self::new(points, vec![]);
        }
        let b = midpoint_boundaries(&points)?;
        Self::new(points, b)
    }

    /// Mirrors the positive points, adding a point at zero when `odd`.
    pub fn symmetric(positive: &[f64], odd: bool) -> Result<Self> {
        Self::from_points(mirror(positive, odd))
    }

    /// `M` points spaced `Δ` apart, centred on zero.
    pub fn uniform(m: usize, delta: f64) -> Result<Self> {
        if m == 0 || !(delta > 0.0 && delta.is_finite()) {
            return Err(Error::InvalidQuantizer(format!("M = {m}, delta = {delta}")));
        }
        let c = 0.5 * (m as f64 - 1.0);
        Self::from_points((0..m).map(|k| (k as f64 - c) * delta).collect())
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn boundaries(&self) -> &[f64] {
        &self.boundaries
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `(lo, hi, x̂)` for every region.
    pub fn regions(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        regions(&self.points, &self.boundaries)
    }
}

fn is_mirrored(v: &[f64]) -> bool {
    v.iter().zip(v.iter().rev()).all(|(a, b)| (a + b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1e-300))
}

pub(crate) fn mirror(positive: &[f64], odd: bool) -> Vec<f64> {
    let mut v: Vec<f64> = positive.iter().rev().map(|p| -p).collect();
    if odd {
        v.push(0.0);
    }
    v.extend_from_slice(positive);
    v
}

fn regions<'a>(points: &'a [f64], boundaries: &'a [f64]) -> impl Iterator<Item = (f64, f64, f64)> + 'a {
    points.iter().enumerate().map(move |(j, x)| {
        let lo = if j == 0 { f64::NEG_INFINITY } else { boundaries[j - 1] };
        let hi = boundaries.get(j).copied().unwrap_or(f64::INFINITY);
        (lo, hi, *x)
    })
}

/// Index `j` with `x ∈ (r_{j−1}, r_j]`, and `x̂_j`.
pub fn quantize(q: &Quantizer, x: f64) -> (usize, f64) {
    let j = q.boundaries.partition_point(|r| *r < x);
    (j, q.points[j])
}

/// `Σ_j −∫_{R_j} f_X(x) ln f_Z̃α((x − x̂_j)/s) dx`, or the sample mean for an
/// empirical source. Regions need not contain their points.
pub(crate) fn quantizer_log_moment(
    points: &[f64],
    boundaries: &[f64],
    source: &SourceSpec,
    law: &ReferenceLaw,
    s: f64,
    mirrored: bool,
) -> Result<f64> {
    if let SourceSpec::Empirical(b) = source {
        let mut acc = 0.0;
        for x in b.values() {
            let j = boundaries.partition_point(|r| r < x);
            acc -= law.log_pdf_radial((x - points[j]) / s)?;
        }
        return Ok(acc / b.len() as f64);
    }
    let mut total = 0.0;
    for (lo, hi, x) in regions(points, boundaries) {
        if mirrored {
            if hi <= 0.0 {
                continue;
            }
            total += 2.0 * region_log_moment(source, law, lo.max(0.0), hi, x, s)?;
        } else {
            total += region_log_moment(source, law, lo, hi, x, s)?;
        }
    }
    Ok(total)
}

/// Solves for the error strength given points and boundaries, starting the
/// bracket at `s0` and widening it by `factor`.
pub(crate) fn strength_of_partition(
    points: &[f64],
    boundaries: &[f64],
    source: &SourceSpec,
    law: &ReferenceLaw,
    s0: f64,
    factor: f64,
    tol: f64,
) -> Result<StrengthSolution> {
    let h = law.entropy()?;
    let mirrored = source.is_symmetric()
        && !matches!(source, SourceSpec::Empirical(_))
        && is_mirrored(points)
        && is_mirrored(boundaries);
    let mut gap = |s: f64| Ok(quantizer_log_moment(points, boundaries, source, law, s, mirrored)? - h);
    strength::solve_monotone_with(&mut gap, s0, factor, tol)
}

/// A starting guess for the error strength: a fraction of the typical cell.
pub(crate) fn initial_guess(points: &[f64], source: &SourceSpec) -> f64 {
    let scale = source.scale_hint();
    if points.len() < 2 {
        return scale.max(f64::MIN_POSITIVE);
    }
    (0.3 * scale / points.len() as f64).max(1e-300)
}

/// `s_α(X − Q(X))`.
pub fn error_strength(q: &Quantizer, source: &SourceSpec, alpha: f64) -> Result<StrengthSolution> {
    if source.dim() != 1 {
        return Err(Error::InvalidSource("quantizers act on scalar sources".into()));
    }
    let law = ReferenceLaw::new(alpha, 1)?;
    let s0 = initial_guess(&q.points, source);
    strength_of_partition(&q.points, &q.boundaries, source, &law, s0, 4.0, DEFAULT_TOL)
}

/// `H(V) = −Σ p_j ln p_j` in nats.
pub fn output_entropy(q: &Quantizer, source: &SourceSpec) -> Result<f64> {
    let mut h = 0.0;
    for (lo, hi, _) in q.regions() {
        let p = source.mass(lo, hi)?;
        if p > 0.0 {
            h -= p * p.ln();
        }
    }
    Ok(h)
}

/// A quantizer together with the index it was designed for and its error
/// strength, in a fixed JSON layout.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantizerDocument {
    pub alpha: f64,
    pub quantizer: Quantizer,
    pub error_strength: f64,
}

fn number(x: f64) -> String {
    format!("{x:.16e}")
}

fn array(v: &[f64]) -> String {
    let items: Vec<String> = v.iter().map(|x| number(*x)).collect();
    format!("[{}]", items.join(", "))
}

impl QuantizerDocument {
    pub fn to_json(&self) -> String {
        let q = &self.quantizer;
        let mut s = String::new();
        s.push_str("{\n");
        let _ = writeln!(s, "  \"alpha\": {},", number(self.alpha));
        let _ = writeln!(s, "  \"points\": {},", array(&q.points));
        let _ = writeln!(s, "  \"boundaries\": {},", array(&q.boundaries));
        let _ = writeln!(s, "  \"symmetric\": {},", q.symmetric);
        let _ = writeln!(s, "  \"error_strength\": {}", number(self.error_strength));
        s.push('}');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let bad = |m: &str| Error::InvalidQuantizer(m.to_string());
        let v: serde_json::Value = serde_json::from_str(text).map_err(|e| bad(&e.to_string()))?;
        let num = |k: &str| v.get(k).and_then(|x| x.as_f64()).ok_or_else(|| bad(&format!("missing number {k}")));
        let list = |k: &str| -> Result<Vec<f64>> {
            v.get(k)
                .and_then(|x| x.as_array())
                .ok_or_else(|| bad(&format!("missing array {k}")))?
                .iter()
                .map(|x| x.as_f64().ok_or_else(|| bad(&format!("non-number in {k}"))))
                .collect()
        };
        let quantizer = Quantizer::new(list("points")?, list("boundaries")?)?;
        Ok(Self { alpha: num("alpha")?, quantizer, error_strength: num("error_strength")? })
    }
}
