//! Rate-distortion functions with distortion measured in strength.
//!
//! Rates are in nats throughout.

use crate::error::{Error, Result};
use crate::strength::strength_closed_form;

/// A point on a rate-distortion curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RDPoint {
    pub distortion: f64,
    pub rate: f64,
}

/// Reverse water-filling over independent components.
#[derive(Debug, Clone, PartialEq)]
pub struct WaterFillAllocation {
    pub distortions: Vec<f64>,
    pub level: f64,
    pub rate: f64,
}

/// The test channel `X = X̂ + Z` achieving the scalar curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestChannel {
    pub alpha: f64,
    pub gamma_reconstruction: f64,
    pub gamma_noise: f64,
}

fn check_law(alpha: f64, gamma: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha <= 2.0) || !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::InvalidParams(format!("alpha = {alpha}, gamma = {gamma}")));
    }
    Ok(())
}

fn check_distortion(d: f64) -> Result<()> {
    if !(d > 0.0 && d.is_finite()) {
        return Err(Error::InvalidDistortion(d));
    }
    Ok(())
}

/// `R(D) = max{ln(s/D), 0}` for a source of strength `s`.
pub fn rate_for_strength(strength: f64, distortion: f64) -> Result<RDPoint> {
    check_distortion(distortion)?;
    Ok(RDPoint { distortion, rate: (strength / distortion).ln().max(0.0) })
}

/// Scalar `S(α, γ_x)` source.
pub fn rd_scalar(alpha: f64, gamma_x: f64, distortion: f64) -> Result<RDPoint> {
    check_law(alpha, gamma_x)?;
    rate_for_strength(strength_closed_form(alpha, gamma_x), distortion)
}

/// Inverse of [`rd_scalar`]: `D = α^{1/α} γ_x e^{−R}`.
pub fn distortion_at_rate(alpha: f64, gamma_x: f64, rate: f64) -> Result<f64> {
    check_law(alpha, gamma_x)?;
    if !(rate >= 0.0) {
        return Err(Error::OutOfRange(rate));
    }
    Ok(strength_closed_form(alpha, gamma_x) * (-rate).exp())
}

/// Sub-Gaussian `d`-dimensional source; the curve does not depend on `d`.
pub fn rd_vector_subgaussian(alpha: f64, gamma_x: f64, d: usize, distortion: f64) -> Result<RDPoint> {
    if d == 0 {
        return Err(Error::InvalidParams("dimension must be positive".into()));
    }
    rd_scalar(alpha, gamma_x, distortion)
}

/// Splits a total distortion over components of the given strengths.
///
/// The constraint is `Σ D_i = D`, so `D` grows with the number of components.
pub fn reverse_waterfill(alpha: f64, strengths: &[f64], distortion: f64) -> Result<WaterFillAllocation> {
    check_law(alpha, 1.0)?;
    check_distortion(distortion)?;
    if strengths.is_empty() || strengths.iter().any(|s| !(*s > 0.0 && s.is_finite())) {
        return Err(Error::InvalidParams("component strengths must be positive".into()));
    }
    let mut sorted = strengths.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let total: f64 = sorted.iter().sum();
    let level = if distortion >= total {
        sorted[n - 1]
    } else {
        // on [s_(k−1), s_(k)] the sum is Σ_{i<k} s_(i) + (n − k) λ
        let mut below = 0.0;
        let mut level = sorted[n - 1];
        for (k, s) in sorted.iter().enumerate() {
            let at = below + (n - k) as f64 * s;
            if distortion <= at {
                level = (distortion - below) / (n - k) as f64;
                break;
            }
            below += s;
        }
        level
    };
    let distortions: Vec<f64> = strengths.iter().map(|s| s.min(level)).collect();
    let rate = strengths.iter().zip(&distortions).map(|(s, d)| (s / d).ln().max(0.0)).sum();
    Ok(WaterFillAllocation { distortions, level, rate })
}

/// `γ_Z = D α^{−1/α}` and `γ_X̂ = (γ_x^α − γ_Z^α)^{1/α}`.
pub fn test_channel(alpha: f64, gamma_x: f64, distortion: f64) -> Result<TestChannel> {
    check_law(alpha, gamma_x)?;
    check_distortion(distortion)?;
    if distortion >= strength_closed_form(alpha, gamma_x) {
        return Err(Error::InvalidDistortion(distortion));
    }
    let gamma_noise = distortion * alpha.powf(-1.0 / alpha);
    let gamma_reconstruction = (gamma_x.powf(alpha) - gamma_noise.powf(alpha)).powf(1.0 / alpha);
    Ok(TestChannel { alpha, gamma_reconstruction, gamma_noise })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boundary_is_closed() {
        let p = rd_scalar(1.0, 2.0, 2.0).unwrap();
        assert_eq!(p.rate, 0.0);
        assert!(matches!(rd_scalar(1.0, 2.0, 0.0), Err(Error::InvalidDistortion(_))));
        assert!(matches!(rd_scalar(1.0, 2.0, -1.0), Err(Error::InvalidDistortion(_))));
    }

    #[test]
    fn waterfill_above_total() {
        let a = reverse_waterfill(1.0, &[1.0, 3.0], 10.0).unwrap();
        assert_eq!(a.distortions, vec![1.0, 3.0]);
        assert_eq!(a.level, 3.0);
        assert_eq!(a.rate, 0.0);
    }
}
