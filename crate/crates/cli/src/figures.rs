//! Tables behind the figures, one per curve.

use rayon::prelude::*;

use stable_rd::design::design_optimal;
use stable_rd::quantizer::output_entropy;
use stable_rd::rd::{distortion_at_rate, rd_scalar};
use stable_rd::strength::{strength_of_uniform, SourceSpec};
use stable_rd::uniform::{high_rate_prediction, optimal_uniform};

use crate::args::{Figure, Units};
use crate::defaults::*;
use crate::output::Table;
use crate::CliError;

pub type Curve = (String, Result<Table, CliError>);

fn rows<T, F>(params: Vec<T>, f: F) -> Result<Vec<Vec<f64>>, CliError>
where
    T: Send,
    F: Fn(T) -> Result<Vec<f64>, CliError> + Sync + Send,
{
    params.into_par_iter().map(f).collect()
}

fn filled(mut table: Table, rows: Result<Vec<Vec<f64>>, CliError>) -> Result<Table, CliError> {
    table.rows = rows?;
    Ok(table)
}

/// Rate-distortion curves of `S(α, 2)`.
pub fn fig1(units: Units) -> Vec<Curve> {
    FIG1_ALPHAS
        .iter()
        .map(|&alpha| {
            let name = format!("fig1_alpha_{alpha}");
            let r = rows(fig1_distortions(), |d| Ok(vec![d, units.from_nats(rd_scalar(alpha, FIG1_GAMMA, d)?.rate)]));
            let t = filled(Table::new(&name, &["D", "R"]), r);
            (name, t)
        })
        .collect()
}

/// Designed 2-, 3- and 4-point quantizers of `S(1, γ)` against `γ`.
pub fn fig2(seed: u64) -> Vec<Curve> {
    FIG2_LEVELS
        .iter()
        .map(|&m| {
            let name = format!("fig2_M{m}");
            let mut columns = vec!["gamma".to_string(), "error_strength".to_string()];
            columns.extend((1..=m).map(|j| format!("x{j}")));
            let table = Table { name: name.clone(), columns, rows: vec![] };
            let r = rows(FIG2_GAMMAS.to_vec(), |gamma| {
                let src = SourceSpec::symmetric_stable(1.0, gamma)?;
                let d = design_optimal(&src, 1.0, m, None, seed)?;
                let mut row = vec![gamma, d.error_strength];
                row.extend_from_slice(d.quantizer.points());
                Ok(row)
            });
            (name, filled(table, r))
        })
        .collect()
}

/// `s_α(U)` against `α`.
pub fn fig3() -> Vec<Curve> {
    let name = "fig3".to_string();
    let r = rows(fig3_alphas(), |alpha| Ok(vec![alpha, strength_of_uniform(alpha)?]));
    vec![(name.clone(), filled(Table::new(&name, &["alpha", "strength"]), r))]
}

/// Uniform and designed quantizers of a symmetric stable source against `M`,
/// with the rate-distortion floor evaluated at their output entropy.
fn level_sweep(prefix: &str, alpha: f64, gamma: f64, levels: Vec<usize>, max_designed: usize, seed: u64, units: Units) -> Vec<Curve> {
    let src = match SourceSpec::symmetric_stable(alpha, gamma) {
        Ok(s) => s,
        Err(e) => return vec![(format!("{prefix}_uniform"), Err(e.into()))],
    };
    let uniform_name = format!("{prefix}_uniform");
    let uniform = rows(levels.clone(), |m| {
        let u = optimal_uniform(m, &src, alpha)?;
        let h = output_entropy(&u.quantizer, &src)?;
        let floor = distortion_at_rate(alpha, gamma, h)?;
        let analytical = high_rate_prediction(alpha, u.delta)?;
        Ok(vec![
            m as f64,
            u.delta,
            u.error_strength,
            units.from_nats(h),
            floor,
            u.error_strength - floor,
            analytical,
            analytical - floor,
        ])
    });
    let uniform_table = Table::new(
        &uniform_name,
        &["M", "delta", "error_strength", "entropy", "rd_floor", "gap", "analytical_strength", "analytical_gap"],
    );
    let designed_name = format!("{prefix}_designed");
    let designed = rows(levels.into_iter().filter(|&m| m <= max_designed).collect(), |m| {
        let d = design_optimal(&src, alpha, m, None, seed)?;
        let h = output_entropy(&d.quantizer, &src)?;
        let floor = distortion_at_rate(alpha, gamma, h)?;
        Ok(vec![m as f64, d.error_strength, units.from_nats(h), floor, d.error_strength - floor])
    });
    let designed_table = Table::new(&designed_name, &["M", "error_strength", "entropy", "rd_floor", "gap"]);
    vec![(uniform_name, filled(uniform_table, uniform)), (designed_name, filled(designed_table, designed))]
}

/// Standard Cauchy source.
pub fn fig4(max_designed: usize, seed: u64, units: Units) -> Vec<Curve> {
    level_sweep("fig4", 1.0, 1.0, fig4_levels(), max_designed, seed, units)
}

/// Unit-variance Gaussian source.
pub fn fig5(max_designed: usize, seed: u64, units: Units) -> Vec<Curve> {
    level_sweep("fig5", 2.0, FIG5_GAMMA, fig5_levels(), max_designed, seed, units)
}

pub fn curves(figure: Figure, units: Units, seed: u64, max_designed: usize) -> Vec<Curve> {
    match figure {
        Figure::Fig1 => fig1(units),
        Figure::Fig2 => fig2(seed),
        Figure::Fig3 => fig3(),
        Figure::Fig4 => fig4(max_designed, seed, units),
        Figure::Fig5 => fig5(max_designed, seed, units),
        Figure::All => {
            let mut v = fig1(units);
            v.extend(fig2(seed));
            v.extend(fig3());
            v.extend(fig4(max_designed, seed, units));
            v.extend(fig5(max_designed, seed, units));
            v
        }
    }
}
