use aalab_core::aa_signals::{
    aa_translation_test, eval_a, eval_b, pow3, pow3_ladder, resonance_slope_scan,
    sp_translation_distance, stepanov_norm, unbounded_recurrence_bound, unbounded_stepanov_bound,
    BochnerTransform, BumpSpec, SampledSignal, SignalKind, StepanovConfig, UnboundedAASpec,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[allow(clippy::too_many_arguments)]
fn simpson(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
        return left + right + (left + right - whole) / 15.0;
    }
    simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson(f, a, b, fa, fm, fb, whole, tol, 60)
}

/// `a(t)` by enumerating every lattice point of every level near `t`.
fn brute_force_a(t: f64, spec: &UnboundedAASpec) -> f64 {
    let mut total = 0.0;
    for n in 1..=spec.max_level {
        let p = pow3(n);
        let n2 = (n * n) as f64;
        let lo = ((t - 1.0) / p).floor() as i64 - 1;
        let hi = ((t + 1.0) / p).ceil() as i64 + 1;
        for j in lo..=hi {
            if j.rem_euclid(2) == 1 {
                total += spec.bump.eval(n2 * (t - p * j as f64));
            }
        }
    }
    total
}

#[test]
fn bump_integral_matches_adaptive_quadrature() {
    let spec = BumpSpec::default();
    let oracle = adaptive_simpson(&|s| spec.eval(s), -0.5, 0.5, 1e-12);
    assert!(
        (spec.integral() - oracle).abs() < 1e-10,
        "{} vs {oracle}",
        spec.integral()
    );
    assert!((spec.integral() - 0.6035).abs() < 5e-5);
}

#[test]
fn lazy_a_equals_brute_force_summation() {
    let spec = UnboundedAASpec::new(BumpSpec::default(), 5);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for i in 0..500 {
        // Half the points sit within a spike of some level.
        let t = if i % 2 == 0 {
            rng.gen_range(-800.0..800.0)
        } else {
            let n = rng.gen_range(1..=5u32);
            let j = 2 * rng.gen_range(-20i64..20) + 1;
            pow3(n) * j as f64 + rng.gen_range(-0.5..0.5) / (n * n) as f64
        };
        assert_eq!(eval_a(t, &spec), brute_force_a(t, &spec), "t = {t}");
    }
}

#[test]
fn a_is_unbounded_but_stepanov_bounded() {
    let spec = UnboundedAASpec::default();
    for k in 1..=4u32 {
        // Every spike peak in [0, 3^k] sits on the level-1 lattice.
        let peak = (0..)
            .map(|j| 3.0 * (2 * j + 1) as f64)
            .take_while(|&t| t <= pow3(k))
            .map(|t| eval_a(t, &spec))
            .fold(0.0, f64::max);
        assert!(peak >= k as f64, "k = {k}: {peak}");
    }
    let cfg = StepanovConfig::new(1.0, 0.0, 250.0).unwrap();
    let norm = stepanov_norm(&SignalKind::Unbounded(spec), &cfg).unwrap();
    assert!(norm <= unbounded_stepanov_bound(&spec) + 1e-6);
    assert!(norm >= spec.bump.integral());
}

#[test]
fn sine_stepanov_norm_is_two_over_pi() {
    let cfg = StepanovConfig::new(1.0, 0.0, 5.0).unwrap();
    let norm = stepanov_norm(&SignalKind::unit_sine(), &cfg).unwrap();
    assert!((norm - 2.0 / std::f64::consts::PI).abs() < 1e-12);
}

#[test]
fn translates_of_a_obey_the_recurrence_bound() {
    let spec = UnboundedAASpec::default();
    let f = SignalKind::Unbounded(spec);
    // Windows straddle high-level spikes, where the shift disagrees most.
    let windows: Vec<f64> = (1..=8u32).map(|n| pow3(n) - 0.5).collect();
    for m in 1..=4u32 {
        let shift = 2.0 * pow3(m);
        let worst = windows
            .iter()
            .map(|&t| sp_translation_distance(&f, &f, shift, t, 1.0).unwrap())
            .fold(0.0, f64::max);
        assert!(
            worst <= unbounded_recurrence_bound(&spec, m) + 1e-6,
            "m = {m}: {worst}"
        );
    }
    let cfg = StepanovConfig::new(1.0, 0.0, 0.0).unwrap();
    let report = aa_translation_test(&f, &pow3_ladder(1, 5), &cfg, &windows, 1e-3).unwrap();
    for n in 0..5 {
        for m in 0..n {
            let bound = unbounded_recurrence_bound(&spec, m as u32 + 1);
            assert!(report.distances[n][m] <= bound + 1e-6);
            assert!((report.distances[n][m] - report.distances[m][n]).abs() < 1e-12);
        }
    }
}

#[test]
fn slope_of_b_grows_with_the_span() {
    let slopes: Vec<f64> = (1..=4)
        .map(|k| resonance_slope_scan(0.0, 10f64.powi(k), 0.05).max_slope)
        .collect();
    assert!(slopes.windows(2).all(|w| w[1] >= w[0]), "{slopes:?}");
    assert!(slopes[3] > 10.0 * slopes[0], "{slopes:?}");
    assert!(eval_b(0.0) == 0.25f64.sin());
}

fn registry() -> Vec<SignalKind> {
    let knots: Vec<f64> = (0..=400).map(|i| -100.0 + 0.5 * i as f64).collect();
    let values = knots.iter().map(|t| (0.3 * t).cos() + 0.1 * t).collect();
    vec![
        SignalKind::Unbounded(UnboundedAASpec::default()),
        SignalKind::Resonant,
        SignalKind::unit_sine(),
        SignalKind::Sampled(SampledSignal::scalar(knots, values).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn stepanov_norm_is_monotone_in_p(
        values in proptest::collection::vec(-3.0f64..3.0, 8..40),
        p1 in 1.0f64..4.0,
        extra in 0.0f64..4.0,
    ) {
        let times: Vec<f64> = (0..values.len()).map(|i| 0.25 * i as f64).collect();
        let hi = times[times.len() - 1];
        let f = SampledSignal::scalar(times, values).unwrap();
        let lo_norm = stepanov_norm(&f, &StepanovConfig::new(p1, 0.0, hi - 1.0).unwrap()).unwrap();
        let hi_norm = stepanov_norm(&f, &StepanovConfig::new(p1 + extra, 0.0, hi - 1.0).unwrap()).unwrap();
        prop_assert!(lo_norm <= hi_norm * (1.0 + 1e-12) + 1e-300);
    }

    #[test]
    fn bochner_identity_holds(t in -50.0f64..50.0, s in 0.0f64..1.0, u in 0.0f64..1.0) {
        // τ = s - u keeps both window arguments inside [0, 1].
        let tau = s - u;
        for f in registry() {
            let phi = BochnerTransform::new(&f);
            let lhs = phi.phi(t + tau, s - tau).unwrap();
            let rhs = phi.phi(t, s).unwrap();
            prop_assert!((lhs[0] - rhs[0]).abs() <= 1e-9, "{:?}", f);
        }
    }
}
