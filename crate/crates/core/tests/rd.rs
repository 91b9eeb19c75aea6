use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stable_rd::rd::*;
use stable_rd::stable::{add_independent, StableParams};
use stable_rd::strength::strength_closed_form;
use stable_rd::Error;

fn allocation_rate(strengths: &[f64], d: &[f64]) -> f64 {
    strengths.iter().zip(d).map(|(s, d)| (s / d).ln().max(0.0)).sum()
}

#[test]
fn scalar_examples() {
    let sigma: f64 = 1.7;
    for &d in &[0.1, 0.5, 1.0, 1.69] {
        let p = rd_scalar(2.0, sigma / 2f64.sqrt(), d).unwrap();
        assert!((p.rate - 0.5 * (sigma * sigma / (d * d)).ln()).abs() < 1e-14);
    }
    assert_eq!(rd_scalar(1.0, 2.0, 2.0).unwrap().rate, 0.0);
    assert!((rd_scalar(1.0, 2.0, 1.0).unwrap().rate - 2f64.ln()).abs() < 1e-15);
}

#[test]
fn gaussian_curve_on_random_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..10 {
        let sigma: f64 = rng.random_range(0.1..10.0);
        let d = sigma * rng.random_range(0.01..1.0);
        let r = rd_scalar(2.0, sigma / 2f64.sqrt(), d).unwrap().rate;
        let want = 0.5 * (sigma * sigma / (d * d)).ln();
        assert!((r - want).abs() <= 4.0 * f64::EPSILON * want.abs().max(1.0), "{r} vs {want}");
    }
}

#[test]
fn scalar_curve_is_non_increasing_and_convex() {
    for &(a, g) in &[(0.5, 1.0), (1.0, 2.0), (1.5, 0.3), (2.0, 1.0)] {
        let s = strength_closed_form(a, g);
        let grid: Vec<f64> = (1..=200).map(|i| 2.0 * s * i as f64 / 200.0).collect();
        let r: Vec<f64> = grid.iter().map(|d| rd_scalar(a, g, *d).unwrap().rate).collect();
        for w in r.windows(2) {
            assert!(w[1] <= w[0]);
        }
        for w in r.windows(3) {
            assert!(w[0] - 2.0 * w[1] + w[2] >= -1e-12);
        }
        for (d, r) in grid.iter().zip(&r) {
            if *d >= s {
                assert_eq!(*r, 0.0);
            } else {
                assert!(*r > 0.0);
            }
        }
    }
}

#[test]
fn inverse_examples() {
    assert_eq!(distortion_at_rate(1.3, 2.0, 0.0).unwrap(), strength_closed_form(1.3, 2.0));
    assert!((distortion_at_rate(1.0, 1.0, 4f64.ln()).unwrap() - 0.25).abs() < 1e-15);
    let d = distortion_at_rate(2.0, 0.5f64.sqrt(), 0.5 * 100f64.ln()).unwrap();
    assert!((d - 0.1).abs() < 1e-15);
    let r = rd_scalar(2.0, 0.5f64.sqrt(), d).unwrap().rate;
    assert!((r - 0.5 * 100f64.ln()).abs() < 1e-14);
    assert!(distortion_at_rate(1.0, 1.0, -0.1).is_err());
}

#[test]
fn subgaussian_examples() {
    assert_eq!(rd_vector_subgaussian(1.0, 1.0, 3, 1.0).unwrap().rate, 0.0);
    let r = rd_vector_subgaussian(1.5, 2.0, 2, 1.0).unwrap().rate;
    assert!((r - (1.5f64.powf(2.0 / 3.0) * 2.0).ln()).abs() < 1e-14);
    let r = rd_vector_subgaussian(2.0, 1.0, 2, 0.5).unwrap().rate;
    assert!((r - (2.0 * 2f64.sqrt()).ln()).abs() < 1e-14);
    assert!(matches!(rd_vector_subgaussian(2.0, 1.0, 2, 0.0), Err(Error::InvalidDistortion(_))));
}

#[test]
fn waterfill_examples() {
    let a = reverse_waterfill(1.0, &[1.0, 3.0], 2.0).unwrap();
    assert_eq!(a.level, 1.0);
    assert_eq!(a.distortions, vec![1.0, 1.0]);
    assert!((a.rate - 3f64.ln()).abs() < 1e-15);

    let a = reverse_waterfill(1.0, &[1.0, 3.0], 4.0).unwrap();
    assert_eq!(a.distortions, vec![1.0, 3.0]);
    assert_eq!(a.rate, 0.0);

    let a = reverse_waterfill(1.0, &[2.0, 2.0, 2.0], 1.5).unwrap();
    assert!((a.level - 0.5).abs() < 1e-15);
    assert!((a.rate - 3.0 * 4f64.ln()).abs() < 1e-14);
}

#[test]
fn waterfill_matches_grid_minimum() {
    let s = [1.0, 3.0];
    let mut best = f64::INFINITY;
    let mut arg = 0.0;
    for i in 1..20_000 {
        let d1 = 2.0 * i as f64 / 20_000.0;
        let r = allocation_rate(&s, &[d1, 2.0 - d1]);
        if r < best {
            best = r;
            arg = d1;
        }
    }
    let a = reverse_waterfill(1.0, &s, 2.0).unwrap();
    assert!((a.rate - best).abs() < 1e-12);
    assert!((a.distortions[0] - arg).abs() < 1e-3);
}

#[test]
fn waterfill_beats_random_allocations() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let s = [0.3, 1.0, 1.1, 2.5, 7.0];
    for &d in &[0.5, 2.0, 5.0, 11.0] {
        let a = reverse_waterfill(1.2, &s, d).unwrap();
        for _ in 0..1000 {
            let w: Vec<f64> = (0..s.len()).map(|_| rng.random_range(1e-3..1.0)).collect();
            let total: f64 = w.iter().sum();
            let alloc: Vec<f64> = w.iter().map(|x| d * x / total).collect();
            assert!(a.rate <= allocation_rate(&s, &alloc) + 1e-12);
        }
    }
}

#[test]
fn waterfill_rejects_bad_input() {
    assert!(matches!(reverse_waterfill(1.0, &[1.0], 0.0), Err(Error::InvalidDistortion(_))));
    assert!(reverse_waterfill(1.0, &[], 1.0).is_err());
    assert!(reverse_waterfill(1.0, &[1.0, -1.0], 1.0).is_err());
    assert!(reverse_waterfill(2.5, &[1.0], 1.0).is_err());
}

#[test]
fn equal_components_match_scalar_curve() {
    for &d in &[1usize, 2, 5, 16] {
        for &(a, g) in &[(1.0, 1.0), (1.7, 0.4)] {
            let s = strength_closed_form(a, g);
            let d0 = 0.3 * s;
            let alloc = reverse_waterfill(a, &vec![s; d], d as f64 * d0).unwrap();
            let scalar = rd_scalar(a, g, d0).unwrap().rate;
            assert!((alloc.rate - d as f64 * scalar).abs() < 1e-12);
        }
    }
}

#[test]
fn test_channel_examples() {
    let c = test_channel(2.0, 1.0, 1.0).unwrap();
    assert!((c.gamma_noise - 0.5f64.sqrt()).abs() < 1e-15);
    assert!((c.gamma_reconstruction - 0.5f64.sqrt()).abs() < 1e-15);

    let c = test_channel(1.0, 2.0, 1.0).unwrap();
    assert!((c.gamma_noise - 1.0).abs() < 1e-15);
    assert!((c.gamma_reconstruction - 1.0).abs() < 1e-15);

    let c = test_channel(1.5, 2.0, 1.0).unwrap();
    assert!((c.gamma_noise - 1.5f64.powf(-2.0 / 3.0)).abs() < 1e-15);
    let want = (2f64.powf(1.5) - 1.0 / 1.5).powf(2.0 / 3.0);
    assert!((c.gamma_reconstruction - want).abs() < 1e-14);
    assert!((strength_closed_form(1.5, c.gamma_noise) - 1.0).abs() < 1e-14);

    assert!(matches!(test_channel(1.0, 2.0, 2.0), Err(Error::InvalidDistortion(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn test_channel_round_trip(a in 0.1f64..=2.0, g in 0.01f64..50.0, frac in 0.001f64..0.999) {
        let d = frac * strength_closed_form(a, g);
        let c = test_channel(a, g, d).unwrap();
        prop_assert!((strength_closed_form(a, c.gamma_noise) / d - 1.0).abs() < 1e-12);
        let x = add_independent(
            &StableParams::symmetric(a, c.gamma_reconstruction).unwrap(),
            &StableParams::symmetric(a, c.gamma_noise).unwrap(),
        ).unwrap();
        prop_assert!((x.gamma() / g - 1.0).abs() < 1e-12);
    }

    #[test]
    fn inverse_round_trip(a in 0.1f64..=2.0, g in 0.01f64..50.0, r in 1e-6f64..20.0) {
        let d = distortion_at_rate(a, g, r).unwrap();
        let back = rd_scalar(a, g, d).unwrap().rate;
        prop_assert!((back - r).abs() < 1e-12 * r.max(1.0));
    }

    #[test]
    fn waterfill_invariants(s in prop::collection::vec(0.01f64..10.0, 1..12), frac in 0.01f64..1.5) {
        let total: f64 = s.iter().sum();
        let d = frac * total;
        let a = reverse_waterfill(1.0, &s, d).unwrap();
        let sum: f64 = a.distortions.iter().sum();
        if d < total {
            prop_assert!((sum - d).abs() < 1e-9 * d.max(1.0));
        } else {
            prop_assert!((sum - total).abs() < 1e-12 * total);
            prop_assert_eq!(a.rate, 0.0);
        }
        for (si, di) in s.iter().zip(&a.distortions) {
            prop_assert_eq!(*di, si.min(a.level));
            if di < si {
                prop_assert_eq!(*di, a.level);
            }
        }
        prop_assert!((a.rate - allocation_rate(&s, &a.distortions)).abs() < 1e-12);
    }
}
