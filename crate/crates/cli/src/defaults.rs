//! Parameter grids of the figure tables. Changing any grid bumps
//! [`DEFAULTS_VERSION`], which is echoed in every figure header.

pub const DEFAULTS_VERSION: u32 = 1;

pub const FIG1_ALPHAS: [f64; 4] = [0.5, 1.0, 1.5, 2.0];
pub const FIG1_GAMMA: f64 = 2.0;
/// Distortions `0.05, 0.10, …, 6.00`.
pub fn fig1_distortions() -> Vec<f64> {
    (1..=120).map(|i| 0.05 * i as f64).collect()
}

pub const FIG2_LEVELS: [usize; 3] = [2, 3, 4];
pub const FIG2_GAMMAS: [f64; 10] = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0];

/// `0.1, 0.2, …, 2.0`.
pub fn fig3_alphas() -> Vec<f64> {
    (1..=20).map(|i| i as f64 / 10.0).collect()
}

/// `2, 4, …, 2¹⁴`.
pub fn fig4_levels() -> Vec<usize> {
    (1..=14).map(|k| 1usize << k).collect()
}

/// `2, 4, …, 2⁸`.
pub fn fig5_levels() -> Vec<usize> {
    (1..=8).map(|k| 1usize << k).collect()
}

/// Designed quantizers are computed only up to this size.
pub const DESIGNED_MAX_LEVELS: usize = 16;

/// Unit-variance Gaussian as a stable law: `γ = 1/√2`.
pub const FIG5_GAMMA: f64 = std::f64::consts::FRAC_1_SQRT_2;
