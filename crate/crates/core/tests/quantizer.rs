use std::f64::consts::PI;

use stable_rd::design::*;
use stable_rd::quantizer::*;
use stable_rd::rd::distortion_at_rate;
use stable_rd::strength::*;
use stable_rd::uniform::*;
use stable_rd::Error;

fn cauchy(gamma: f64) -> SourceSpec {
    SourceSpec::symmetric_stable(1.0, gamma).unwrap()
}

fn gauss() -> SourceSpec {
    SourceSpec::symmetric_stable(2.0, 0.5f64.sqrt()).unwrap()
}

/// Composite Simpson with `n` (even) intervals.
fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for i in 1..n {
        acc += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    acc * h / 3.0
}

/// `E ln(1 + (X − Q(X))²/s²)` for a standard Cauchy `X`, by Simpson in
/// `u = asinh x` on `|x| ≤ 10⁴` plus the leading tail term.
fn cauchy_error_moment(points: &[f64], boundaries: &[f64], s: f64) -> f64 {
    let big = 1e4f64;
    let mut edges = vec![-big.asinh()];
    edges.extend(boundaries.iter().map(|r| r.asinh()));
    edges.push(big.asinh());
    let mut total = 0.0;
    for (j, w) in edges.windows(2).enumerate() {
        let c = points[j];
        let f = |u: f64| {
            let x = u.sinh();
            (1.0 + ((x - c) / s).powi(2)).ln() * u.cosh() / (PI * (1.0 + x * x))
        };
        total += simpson(f, w[0], w[1], 600);
    }
    // ∫_L^∞ ln(x²/s²)/(πx²) dx on each side
    total + 2.0 * (2.0 * (big / s).ln() + 2.0) / (PI * big)
}

/// Strength of the α = 1 error: `E ln(1 + E²/s²) = ln 4`, by bisection.
fn cauchy_oracle_strength(points: &[f64], boundaries: &[f64]) -> f64 {
    let (mut lo, mut hi) = (1e-4f64.ln(), 1e2f64.ln());
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if cauchy_error_moment(points, boundaries, mid.exp()) > 4f64.ln() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (0.5 * (lo + hi)).exp()
}

#[test]
fn quantize_examples() {
    let q = Quantizer::from_points(vec![-1.0, 1.0]).unwrap();
    assert_eq!(quantize(&q, 0.0), (0, -1.0));
    assert_eq!(quantize(&q, 0.0001), (1, 1.0));
    let spec = UniformSpec::new(1.0, &cauchy(1.0)).unwrap();
    assert_eq!(spec.quantize(2.4), (2, 2.0));
    let q = Quantizer::uniform(5, 1.0).unwrap();
    assert_eq!(quantize(&q, 2.4), (4, 2.0));
    assert_eq!(quantize(&q, 1.5), (3, 1.0));
}

#[test]
fn one_point_quantizer_keeps_source_strength() {
    let q = Quantizer::from_points(vec![0.0]).unwrap();
    let s = error_strength(&q, &cauchy(1.0), 1.0).unwrap();
    assert!((s.value - 1.0).abs() < 1e-8, "{}", s.value);
}

#[test]
fn two_point_cauchy_matches_simpson_oracle() {
    let q = Quantizer::from_points(vec![-1.0, 1.0]).unwrap();
    let s = error_strength(&q, &cauchy(1.0), 1.0).unwrap().value;
    let oracle = cauchy_oracle_strength(&[-1.0, 1.0], &[0.0]);
    assert!((s / oracle - 1.0).abs() < 1e-7, "{s} vs {oracle}");
}

#[test]
fn asymmetric_quantizer_matches_simpson_oracle() {
    let points = [-2.5, -0.3, 0.8, 4.0];
    let boundaries = [-1.0, 0.2, 2.0];
    let q = Quantizer::new(points.to_vec(), boundaries.to_vec()).unwrap();
    let s = error_strength(&q, &cauchy(1.0), 1.0).unwrap().value;
    let oracle = cauchy_oracle_strength(&points, &boundaries);
    assert!((s / oracle - 1.0).abs() < 1e-7, "{s} vs {oracle}");
}

#[test]
fn folded_and_regionwise_routes_agree() {
    for (src, alpha) in [(cauchy(1.0), 1.0), (gauss(), 2.0), (SourceSpec::symmetric_stable(1.5, 1.0).unwrap(), 1.5)] {
        for &(m, delta) in &[(3usize, 1.2), (8, 0.5), (41, 0.2)] {
            let folded = bounded_uniform_error_strength(m, delta, &src, alpha).unwrap().value;
            let q = Quantizer::uniform(m, delta).unwrap();
            let direct = error_strength(&q, &src, alpha).unwrap().value;
            assert!((folded / direct - 1.0).abs() < 1e-7, "alpha {alpha} M {m}: {folded} vs {direct}");
        }
    }
}

#[test]
fn empirical_source_uses_sample_mean() {
    let src = SourceSpec::empirical(vec![-2.0, -0.5, 0.7, 3.0]).unwrap();
    let q = Quantizer::from_points(vec![-1.0, 1.0]).unwrap();
    let s = error_strength(&q, &src, 1.0).unwrap().value;
    // errors −1, 0.5, −0.3, 2
    let errs = SourceSpec::empirical(vec![-1.0, 0.5, -0.3, 2.0]).unwrap();
    let want = solve_strength(&errs, 1.0, DEFAULT_TOL).unwrap().value;
    assert!((s - want).abs() < 1e-9);
}

#[test]
fn small_cell_limits() {
    let spec = UniformSpec::new(0.01, &cauchy(1.0)).unwrap();
    let r = uniform_error_strength(&spec, &cauchy(1.0), 1.0).unwrap().value / 0.01;
    assert!((r / 0.1359 - 1.0).abs() < 0.02, "{r}");
    let spec = UniformSpec::new(0.01, &gauss()).unwrap();
    let r = uniform_error_strength(&spec, &gauss(), 2.0).unwrap().value / 0.01;
    assert!((r * 12f64.sqrt() - 1.0).abs() < 0.02, "{r}");
    assert!((r * 12f64.sqrt() - 1.0).abs() < 1e-8, "{r}");
}

/// Cauchy error density on one cell of width Δ, from Poisson summation.
fn cauchy_fold(delta: f64, e: f64) -> f64 {
    let t = 2.0 * PI / delta;
    t.sinh() / (t.cosh() - (t * e).cos()) / delta
}

#[test]
fn unit_cell_cauchy_is_below_high_rate_limit() {
    let delta = 1.0;
    let spec = UniformSpec::new(delta, &cauchy(1.0)).unwrap();
    let s = uniform_error_strength(&spec, &cauchy(1.0), 1.0).unwrap().value;
    let moment = |s: f64| simpson(|e| cauchy_fold(delta, e) * (1.0 + (e / s).powi(2)).ln(), -0.5, 0.5, 20_000);
    let (mut lo, mut hi) = (0.01f64, 1.0f64);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if moment(mid) > 4f64.ln() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    assert!((s - lo).abs() < 1e-9, "{s} vs oracle {lo}");
    let limit = high_rate_prediction(1.0, delta).unwrap();
    assert!(s.is_finite() && s < limit && s > 0.998 * limit, "{s} vs {limit}");
}

#[test]
fn high_rate_examples() {
    assert!((high_rate_prediction(2.0, 0.1).unwrap() - 0.1 / 12f64.sqrt()).abs() < 1e-15);
    assert!((high_rate_prediction(1.0, 0.1).unwrap() - 0.01359).abs() < 1e-5);
    assert_eq!(high_rate_prediction(1.5, 1.0).unwrap(), strength_of_uniform(1.5).unwrap());
    assert!(high_rate_prediction(1.0, 0.0).is_err());
}

#[test]
fn output_entropy_examples() {
    let q = Quantizer::from_points(vec![-1.3, 1.3]).unwrap();
    for src in [cauchy(1.0), gauss()] {
        assert!((output_entropy(&q, &src).unwrap() - 2f64.ln()).abs() < 1e-14);
    }
    let mut prev = f64::INFINITY;
    for &d in &[0.5, 0.1, 0.02] {
        let spec = UniformSpec::new(d, &cauchy(1.0)).unwrap();
        let h = uniform_output_entropy(&spec, &cauchy(1.0)).unwrap();
        let gap = (h - ((4.0 * PI).ln() - d.ln())).abs();
        assert!(gap < prev, "{d}: {gap}");
        prev = gap;
    }
    assert!(prev < 1e-4);
}

#[test]
fn designed_cauchy_entropy_matches_arctan_oracle() {
    let r = design_optimal(&cauchy(1.0), 1.0, 4, None, 3).unwrap();
    let q = &r.quantizer;
    let cdf = |x: f64| 0.5 + x.atan() / PI;
    let mut edges = vec![f64::NEG_INFINITY];
    edges.extend_from_slice(q.boundaries());
    edges.push(f64::INFINITY);
    let oracle: f64 = edges
        .windows(2)
        .map(|w| {
            let p = cdf(w[1]) - cdf(w[0]);
            -p * p.ln()
        })
        .sum();
    assert!((output_entropy(q, &cauchy(1.0)).unwrap() - oracle).abs() < 1e-12);
}

#[test]
fn single_level_design() {
    for src in [cauchy(2.0), gauss()] {
        let r = design_optimal(&src, 1.0, 1, None, 0).unwrap();
        assert_eq!(r.quantizer.points(), &[0.0]);
        let s = solve_strength(&src, 1.0, DEFAULT_TOL).unwrap().value;
        assert!((r.error_strength - s).abs() < 1e-8);
    }
}

#[test]
fn two_level_design_matches_grid_search() {
    let r = design_optimal(&cauchy(1.0), 1.0, 2, None, 11).unwrap();
    let a = r.quantizer.points()[1];
    // coarse grid, then a 1e-3 grid around the best coarse point
    let mut best = (f64::INFINITY, 0.0);
    for i in 1..=100 {
        let a = 0.1 * i as f64;
        let s = cauchy_oracle_strength(&[-a, a], &[0.0]);
        if s < best.0 {
            best = (s, a);
        }
    }
    let centre = best.1;
    for i in -100..=100 {
        let a = centre + 1e-3 * i as f64;
        let s = cauchy_oracle_strength(&[-a, a], &[0.0]);
        if s < best.0 {
            best = (s, a);
        }
    }
    assert!((r.error_strength / best.0 - 1.0).abs() < 1e-6, "{} vs {}", r.error_strength, best.0);
    assert!((a - best.1).abs() < 2e-3, "{a} vs {}", best.1);
}

#[test]
fn three_level_design_matches_grid_search() {
    let r = design_optimal(&cauchy(1.0), 1.0, 3, None, 5).unwrap();
    let pts = r.quantizer.points();
    assert_eq!(pts.len(), 3);
    assert_eq!(pts[1], 0.0);
    assert_eq!(pts[0], -pts[2]);
    let strength = |a: f64| cauchy_oracle_strength(&[-a, 0.0, a], &[-0.5 * a, 0.5 * a]);
    let mut best = (f64::INFINITY, 0.0);
    for i in 1..=100 {
        let a = 0.1 * i as f64;
        let s = strength(a);
        if s < best.0 {
            best = (s, a);
        }
    }
    let centre = best.1;
    for i in -100..=100 {
        let a = centre + 1e-3 * i as f64;
        let s = strength(a);
        if s < best.0 {
            best = (s, a);
        }
    }
    assert!((r.error_strength / best.0 - 1.0).abs() < 1e-6, "{} vs {}", r.error_strength, best.0);
    assert!((pts[2] - best.1).abs() < 2e-3, "{} vs {}", pts[2], best.1);
}

#[test]
fn design_trace_is_non_increasing() {
    for (src, alpha) in [(cauchy(1.0), 1.0), (gauss(), 2.0), (cauchy(3.0), 1.3)] {
        for m in 2..=5 {
            let r = design_optimal(&src, alpha, m, None, 21).unwrap();
            assert!(r.strength_trace.windows(2).all(|w| w[1] <= w[0]), "{:?}", r.strength_trace);
            assert_eq!(*r.strength_trace.last().unwrap(), r.error_strength);
            assert_eq!(r.seed, 21);
        }
    }
}

#[test]
fn converged_boundaries_are_locally_optimal() {
    let src = cauchy(1.0);
    for m in [3usize, 4] {
        let r = design_optimal(&src, 1.0, m, None, 2).unwrap();
        let pts = r.quantizer.points().to_vec();
        let b = r.quantizer.boundaries().to_vec();
        let base = error_strength(&r.quantizer, &src, 1.0).unwrap().value;
        for j in 0..b.len() {
            let gap = pts[j + 1] - pts[j];
            for sign in [-1.0, 1.0] {
                let mut moved = b.clone();
                moved[j] += sign * 0.05 * gap;
                let q = Quantizer::new(pts.clone(), moved).unwrap();
                let s = error_strength(&q, &src, 1.0).unwrap().value;
                assert!(s > base, "M {m} boundary {j} sign {sign}: {s} <= {base}");
            }
        }
    }
}

#[test]
fn design_is_scale_equivariant() {
    for m in [2usize, 3, 4] {
        let base = design_optimal(&cauchy(1.0), 1.0, m, None, 4).unwrap();
        for c in [2.0, 5.0] {
            let r = design_optimal(&cauchy(c), 1.0, m, None, 4).unwrap();
            assert!((r.error_strength / (c * base.error_strength) - 1.0).abs() < 1e-3);
            for (p, q) in r.quantizer.points().iter().zip(base.quantizer.points()) {
                assert!((p - c * q).abs() <= 1e-3 * (c * q).abs().max(1e-12), "M {m} c {c}: {p} vs {}", c * q);
            }
        }
    }
}

#[test]
fn more_levels_never_hurt() {
    let src = cauchy(1.0);
    let s: Vec<f64> = (1..=4).map(|m| design_optimal(&src, 1.0, m, None, 8).unwrap().error_strength).collect();
    assert!(s.windows(2).all(|w| w[1] < w[0]), "{s:?}");
}

#[test]
fn error_strength_respects_rate_distortion_floor() {
    let cases = [(cauchy(1.0), 1.0, 1.0), (gauss(), 2.0, 0.5f64.sqrt())];
    for (src, alpha, gamma) in &cases {
        for m in [2usize, 3, 5, 8] {
            let r = design_optimal(src, *alpha, m, None, 1).unwrap();
            let h = output_entropy(&r.quantizer, src).unwrap();
            assert!(r.error_strength >= distortion_at_rate(*alpha, *gamma, h).unwrap());
        }
        for m in [2usize, 16, 128] {
            let u = optimal_uniform(m, src, *alpha).unwrap();
            let h = output_entropy(&u.quantizer, src).unwrap();
            assert!(u.error_strength >= distortion_at_rate(*alpha, *gamma, h).unwrap());
        }
    }
}

#[test]
fn centred_points_beat_shifted_points() {
    for (src, alpha) in [(cauchy(1.0), 1.0), (gauss(), 2.0)] {
        let delta = 0.05;
        let spec = UniformSpec::new(delta, &src).unwrap();
        let centred = uniform_error_strength(&spec, &src, alpha).unwrap().value;
        for shift in [delta / 4.0, delta / 2.0] {
            let s = shifted_uniform_error_strength(&spec, &src, alpha, shift).unwrap().value;
            assert!(s > centred, "shift {shift}: {s} <= {centred}");
        }
    }
}

#[test]
fn design_rejects_asymmetric_sources() {
    let t = Tabulated::new(|x: f64| (-(x + 1.0)).exp(), (-1.0, f64::INFINITY), vec![], 1.0).unwrap();
    let r = design_optimal(&SourceSpec::Tabulated(t), 1.0, 3, None, 0);
    assert_eq!(r.unwrap_err(), Error::NonSymmetricSource);
    // symmetric but bimodal
    let bimodal = Tabulated::new(
        |x: f64| 0.5 * ((-(x - 2.0).powi(2) / 2.0).exp() + (-(x + 2.0).powi(2) / 2.0).exp()) / (2.0 * PI).sqrt(),
        (f64::NEG_INFINITY, f64::INFINITY),
        vec![-2.0, 0.0, 2.0],
        2.0,
    )
    .unwrap();
    let r = design_optimal(&SourceSpec::Tabulated(bimodal), 1.0, 3, None, 0);
    assert_eq!(r.unwrap_err(), Error::NonSymmetricSource);
}

#[test]
fn kkt_examples_and_oracle() {
    assert!((kkt_width_solution(2.0 * (1.0 - PI / 4.0)).unwrap() - 1.0).abs() < 1e-12);
    assert!(kkt_width_solution(1e-10).unwrap() < 1e-4);
    let u = kkt_width_solution(1.0).unwrap();
    let (mut lo, mut hi) = (1e-6f64, 1e6f64);
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        if mid.atan() / mid > 0.5 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    assert!((u - lo).abs() < 1e-11, "{u} vs {lo}");
    assert!(matches!(kkt_width_solution(2.5), Err(Error::OutOfRange(_))));
}

#[test]
fn json_round_trip_of_design() {
    let r = design_optimal(&cauchy(1.0), 1.0, 4, None, 7).unwrap();
    let doc = QuantizerDocument { alpha: 1.0, quantizer: r.quantizer.clone(), error_strength: r.error_strength };
    let text = doc.to_json();
    let back = QuantizerDocument::from_json(&text).unwrap();
    assert_eq!(back, doc);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["points"].as_array().unwrap().len(), 4);
    assert_eq!(v["symmetric"], serde_json::Value::Bool(true));
}

#[test]
fn best_of_seeds_is_no_worse_than_any_seed() {
    let src = cauchy(1.0);
    let seeds = [1u64, 2, 3];
    let best = design_best_of(&src, 1.0, 4, None, &seeds).unwrap();
    for s in seeds {
        assert!(best.error_strength <= design_optimal(&src, 1.0, 4, None, s).unwrap().error_strength);
    }
}
