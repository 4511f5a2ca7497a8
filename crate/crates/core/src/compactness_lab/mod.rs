//! Diagnostics on solved trajectories.
//!
//! * Greedy ε-net covers of the range, the finite stand-in for a vanishing
//!   Kuratowski measure: counts that stop changing under refinement of the
//!   time sampling are evidence of a relatively compact range.
//! * The energy `E(x) = ½∫|x|²` and its monotonicity along differences of
//!   solutions.
//! * Subvariant functionals `λ(x) = sup_t Φ(x(t))`, selection of minimal
//!   candidates and the parallelogram gap between the two best.
//! * Uniform Stepanov bounds `k_p` of the right-hand side over a range.

mod cover;
mod energy;
mod subvariant;

pub use cover::{
    greedy_cover, range_compactness_report, CompactnessReport, CompactnessVerdict, CoverReport,
    Metric, PointCloud,
};
pub use energy::{
    constant_energy_offset_check, difference_energy, energy, energy_monotonicity_check,
    energy_of_coeffs, EnergyReport, EnergyTrace, OffsetReport,
};
pub use subvariant::{
    limit_stepanov_bound, minimal_solution_select, parallelogram_gap, state_stepanov_bound,
    subvariant_eval, subvariant_eval_window, uniform_stepanov_bound, Functional, StepanovBound,
    SubvariantReport, TIE_TOLERANCE,
};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aa_signals::{SampledSignal, Signal, SignalKind, Span, StepanovConfig};
    use crate::error::Error;
    use crate::mild_solver::{
        solve, ForcingSpec, NonlinearitySpec, Problem, SolverConfig, Trajectory,
    };
    use crate::spectral_heat::{apply_semigroup, assemble_basis, Field, SpectralBasis};
    use alloc::vec::Vec;
    use core::f64::consts::PI;
    use proptest::prelude::*;

    fn basis() -> SpectralBasis {
        assemble_basis(1.0, 8, 32).unwrap()
    }

    fn free_run(b: &SpectralBasis, x0: &Field, horizon: f64) -> Trajectory {
        let p = Problem::new(b.clone(), NonlinearitySpec::zero(), ForcingSpec::none()).unwrap();
        solve(&p, x0, &SolverConfig::new(1e-2, horizon)).unwrap()
    }

    #[test]
    fn energy_examples() {
        let b = basis();
        assert_eq!(energy(&Field::zero(&b)), 0.0);
        let s = Field::sine_mode(&b, 1, 1.0).unwrap();
        assert!((energy(&s) - 0.25).abs() < 1e-15);
        assert!((energy_of_coeffs(s.coeffs()) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn energy_is_additive_over_disjoint_supports() {
        let b = assemble_basis(1.0, 4, 64).unwrap();
        let left =
            Field::from_fn(&b, |x| if x < 0.5 { (2.0 * PI * x).sin() } else { 0.0 }).unwrap();
        let right = Field::from_fn(&b, |x| {
            if x >= 0.5 {
                (2.0 * PI * x).sin().powi(2)
            } else {
                0.0
            }
        })
        .unwrap();
        let both = left.combine(1.0, &right, 1.0).unwrap();
        assert!((energy(&both) - energy(&left) - energy(&right)).abs() < 1e-15);
    }

    #[test]
    fn identical_runs_have_zero_difference_energy() {
        let b = basis();
        let x0 = Field::sine_mode(&b, 1, 1.0).unwrap();
        let u = free_run(&b, &x0, 1.0);
        let r = energy_monotonicity_check(&u, &u, 0.0).unwrap();
        assert!(r.pass);
        assert!(r.trace.values.iter().all(|&e| e == 0.0));
        let short = free_run(&b, &x0, 0.5);
        assert_eq!(
            energy_monotonicity_check(&u, &short, 0.0).unwrap_err(),
            Error::StampMismatch
        );
    }

    #[test]
    fn free_difference_energy_matches_mode_decay() {
        let b = basis();
        let u0 = Field::from_coeffs(&b, (1..=8).map(|k| 1.0 / k as f64).collect()).unwrap();
        let v0 = Field::sine_mode(&b, 2, 0.3).unwrap();
        let (u, v) = (free_run(&b, &u0, 1.0), free_run(&b, &v0, 1.0));
        let r = energy_monotonicity_check(&u, &v, 0.0).unwrap();
        assert!(r.pass);
        let w0: Vec<f64> = u0
            .coeffs()
            .iter()
            .zip(v0.coeffs())
            .map(|(a, c)| a - c)
            .collect();
        for (t, e) in r.trace.stamps.iter().zip(&r.trace.values) {
            let want: f64 = w0
                .iter()
                .zip(b.eigenvalues())
                .map(|(c, l)| 0.5 * c * c * libm::exp(-2.0 * l * t))
                .sum();
            assert!((e - want).abs() <= 1e-13 * want.max(1e-300));
        }
        assert!(r.trace.values.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn offset_of_identical_runs_is_zero() {
        let b = basis();
        let p = Problem::new(b.clone(), NonlinearitySpec::default(), ForcingSpec::none()).unwrap();
        let u = solve(
            &p,
            &Field::sine_mode(&b, 1, 0.5).unwrap(),
            &SolverConfig::new(1e-2, 0.5),
        )
        .unwrap();
        let r = constant_energy_offset_check(&p, &u, &u, 1e-12).unwrap();
        assert!(r.w0.coeffs().iter().all(|&c| c == 0.0));
        assert_eq!(r.deviation, 0.0);
        assert_eq!(r.g_residual, 0.0);
    }

    #[test]
    fn offset_check_recovers_a_constant_shift() {
        // g(r) = -λ₁ r is linear with g(r) - r strictly decreasing; a constant
        // w₀ added to a frozen state then satisfies G(u) - G(v) = -λ₁ w₀.
        let b = basis();
        let l1 = b.lambda1();
        let p = Problem::new(
            b.clone(),
            NonlinearitySpec::parse(&alloc::format!("linear:{}", -l1)).unwrap(),
            ForcingSpec::none(),
        )
        .unwrap();
        let mut p = p;
        p.nonlinearity.dealias = false;
        let v0 = Field::sine_mode(&b, 2, 0.2).unwrap();
        let w0 = b.project_fn(|x| x * (1.0 - x));
        let u0: Vec<f64> = v0.coeffs().iter().zip(&w0).map(|(a, c)| a + c).collect();
        let v = Trajectory::from_parts(
            &b,
            alloc::vec![0.0, 1.0, 2.0],
            [v0.coeffs(); 3].concat(),
            Vec::new(),
            None,
        )
        .unwrap();
        let u = Trajectory::from_parts(
            &b,
            alloc::vec![0.0, 1.0, 2.0],
            [&u0[..]; 3].concat(),
            Vec::new(),
            None,
        )
        .unwrap();
        let r = constant_energy_offset_check(&p, &u, &v, 1e-12).unwrap();
        for (a, c) in r.w0.coeffs().iter().zip(&w0) {
            assert!((a - c).abs() < 1e-15);
        }
        assert!(r.deviation < 1e-15);
        assert!(r.g_residual < 1e-12);
    }

    #[test]
    fn offset_check_refuses_decaying_pairs() {
        let b = basis();
        let p = Problem::new(b.clone(), NonlinearitySpec::zero(), ForcingSpec::none()).unwrap();
        let u = free_run(&b, &Field::sine_mode(&b, 1, 1.0).unwrap(), 1.0);
        let v = free_run(&b, &Field::zero(&b), 1.0);
        assert!(matches!(
            constant_energy_offset_check(&p, &u, &v, 1e-6),
            Err(Error::EnergyNotConstant { .. })
        ));
    }

    #[test]
    fn subvariant_examples() {
        let b = basis();
        let zero = free_run(&b, &Field::zero(&b), 1.0);
        assert_eq!(
            subvariant_eval(&b, &zero, Functional::SupNorm).unwrap(),
            0.0
        );
        let decay = free_run(&b, &Field::sine_mode(&b, 1, 1.0).unwrap(), 1.0);
        assert!((subvariant_eval(&b, &decay, Functional::SupNorm).unwrap() - 1.0).abs() < 1e-15);
        let moved = decay.translate(0.3);
        let a = subvariant_eval_window(&b, &decay, Functional::EnergySup, 0.5, 1.0).unwrap();
        let c = subvariant_eval_window(&b, &moved, Functional::EnergySup, 0.2, 0.7).unwrap();
        assert!((a - c).abs() < 1e-15);
        let first = |g: &[f64]| g[1];
        let custom = Functional::Custom("first-node", &first);
        assert_eq!(custom.id(), "first-node");
        assert!(subvariant_eval(&b, &decay, custom).unwrap() > 0.0);
    }

    #[test]
    fn selection_examples() {
        let b = basis();
        let one = free_run(&b, &Field::sine_mode(&b, 1, 1.0).unwrap(), 1.0);
        let r = minimal_solution_select(&b, core::slice::from_ref(&one), Functional::SupNorm, 1e-6)
            .unwrap();
        assert_eq!(r.argmin, 0);
        assert!(r.gap.is_none());
        // Shifting by whole steps keeps shared stamps; the states coincide.
        let moved = one.translate(0.0);
        let r =
            minimal_solution_select(&b, &[one.clone(), moved], Functional::SupNorm, 1e-6).unwrap();
        assert_eq!(r.ties, [0, 1]);
        assert_eq!(r.gap, Some(0.0));
        assert!(r.indistinguishable);
        let smaller = free_run(&b, &Field::sine_mode(&b, 1, 0.5).unwrap(), 1.0);
        let r = minimal_solution_select(&b, &[one, smaller], Functional::SupNorm, 1e-12).unwrap();
        assert_eq!(r.argmin, 1);
        // Mode-1 runs differ by 0.5·sin πξ·e^{-π² t}; the gap is its energy at t = 1.
        let want = 0.0625 * libm::exp(-2.0 * PI * PI);
        assert!((r.gap.unwrap() / want - 1.0).abs() < 1e-10);
        assert!(!r.indistinguishable);
        assert!(minimal_solution_select(&b, &[], Functional::SupNorm, 1e-6).is_err());
    }

    #[test]
    fn constant_trajectory_needs_one_ball() {
        let b = basis();
        let x = Field::sine_mode(&b, 1, 0.7).unwrap();
        let t = Trajectory::from_parts(
            &b,
            (0..20).map(|i| i as f64).collect(),
            [x.coeffs(); 20].concat(),
            Vec::new(),
            None,
        )
        .unwrap();
        let r =
            range_compactness_report(&b, &t, &[0.2, 0.1, 0.05], &[2, 1], 0.0, Metric::Sup).unwrap();
        assert!(r.covers.iter().all(|c| c.counts == [1, 1, 1]));
        assert_eq!(r.verdict, CompactnessVerdict::CompactnessConsistent);
    }

    #[test]
    fn decaying_arc_matches_its_analytic_cover() {
        // x(t) = e^{-π² t} sin πξ traces the segment [e^{-π² T}, 1]·sin πξ in
        // sup norm, so the cloud is a segment of length ℓ = 1 - e^{-π² T}.
        // Greedy bisects it, so its count jumps where ε crosses ℓ/2^j; the
        // ε ladder stays clear of those points by more than the spacing.
        let b = basis();
        let p = Problem::new(b.clone(), NonlinearitySpec::zero(), ForcingSpec::none()).unwrap();
        let traj = solve(
            &p,
            &Field::sine_mode(&b, 1, 1.0).unwrap(),
            &SolverConfig::new(2.5e-4, 2.0),
        )
        .unwrap();
        let len = 1.0 - traj.sup_trace().last().unwrap();
        let r = range_compactness_report(&b, &traj, &[0.3, 0.15, 0.075], &[2, 1], 0.0, Metric::Sup)
            .unwrap();
        let fine = r.covers.last().unwrap();
        assert_eq!(fine.counts, [5, 9, 17]);
        for (e, &n) in fine.eps.iter().zip(&fine.counts) {
            let optimal = libm::ceil(len / e - 1e-9) as usize;
            assert!(
                n >= optimal && n <= 2 * optimal,
                "ε = {e}: {n} vs {optimal}"
            );
        }
        assert_eq!(r.verdict, CompactnessVerdict::CompactnessConsistent);
    }

    struct Frozen(Vec<f64>);

    impl Signal for Frozen {
        fn dim(&self) -> usize {
            self.0.len()
        }
        fn eval_into(&self, _t: f64, out: &mut [f64]) {
            out.copy_from_slice(&self.0);
        }
    }

    struct Modulated(Vec<f64>);

    impl Signal for Modulated {
        fn dim(&self) -> usize {
            self.0.len()
        }
        fn eval_into(&self, t: f64, out: &mut [f64]) {
            let s = crate::aa_signals::eval_b(t);
            for (o, v) in out.iter_mut().zip(&self.0) {
                *o = s * v;
            }
        }
    }

    #[test]
    fn stepanov_bound_examples() {
        let cloud: Vec<Vec<f64>> = alloc::vec![
            alloc::vec![0.5, -1.0],
            alloc::vec![2.0, 0.1],
            alloc::vec![-0.3, 0.0]
        ];
        let cfg = StepanovConfig::new(1.0, 0.0, 20.0).unwrap();
        let k = uniform_stepanov_bound(3, |i| Ok(Frozen(cloud[i].clone())), &cfg).unwrap();
        assert!((k.k_p - 2.0).abs() < 1e-12);
        assert_eq!(k.argmax, 1);
        let k = uniform_stepanov_bound(3, |i| Ok(Modulated(cloud[i].clone())), &cfg).unwrap();
        assert!(k.k_p <= 2.0);

        let b = basis();
        let h0 = Field::sine_mode(&b, 1, 1.0).unwrap();
        let p = Problem::new(
            b.clone(),
            NonlinearitySpec::zero(),
            ForcingSpec::single(SignalKind::Const(3.0), &h0),
        )
        .unwrap();
        let traj = free_run(&b, &Field::zero(&b), 0.1);
        let k = state_stepanov_bound(&p, &traj, &cfg).unwrap();
        assert!((k.k_p - 3.0).abs() < 1e-12);
    }

    #[test]
    fn limit_bound_needs_a_candidate() {
        use crate::aa_signals::{aa_translation_test, RecurrenceVerdict};
        let cfg = StepanovConfig::new(1.0, 0.0, 1.0).unwrap();
        let r = aa_translation_test(
            &SignalKind::Const(2.0),
            &[1.0, 2.0, 3.0],
            &cfg,
            &[0.0, 2.0],
            1e-3,
        )
        .unwrap();
        assert_eq!(r.verdict, RecurrenceVerdict::RecurrenceConsistent);
        let l = limit_stepanov_bound(&r, 1.0).unwrap().unwrap();
        assert!((l - 2.0).abs() < 1e-12);
        let tab = SampledSignal::scalar(alloc::vec![0.0, 1.0], alloc::vec![0.0, 1.0]).unwrap();
        assert_eq!(tab.span(), Span::new(0.0, 1.0));
    }

    #[test]
    fn semigroup_trajectories_respect_the_energy_law() {
        let b = basis();
        let x = Field::sine_mode(&b, 3, 1.0).unwrap();
        let y = apply_semigroup(&b, &x, 0.01).unwrap();
        assert!(energy(&y) < energy(&x));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn cover_counts_are_monotone_and_bounded(
            values in proptest::collection::vec(-5.0f64..5.0, 1..60),
            mut eps in proptest::collection::vec(0.01f64..4.0, 1..6),
        ) {
            eps.sort_by(f64::total_cmp);
            let cloud = PointCloud::from_scalars(values.clone(), Metric::Sup).unwrap();
            let r = greedy_cover(&cloud, &eps).unwrap();
            prop_assert!(r.counts.windows(2).all(|w| w[1] <= w[0]));
            prop_assert!(r.counts.iter().all(|&c| c >= 1 && c <= values.len()));
            // Every point lies within ε/2 of a centre unless the whole cloud
            // fits in one set of diameter ε.
            for (k, &e) in eps.iter().enumerate() {
                let centres = &r.centers[k];
                let spread = values.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v))
                    - values.iter().fold(f64::INFINITY, |m, &v| m.min(v));
                if r.counts[k] == 1 && spread <= e {
                    continue;
                }
                for v in &values {
                    let d = centres.iter().map(|&c| (values[c] - v).abs()).fold(f64::INFINITY, f64::min);
                    prop_assert!(d <= 0.5 * e);
                }
            }
            let spread = values.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v))
                - values.iter().fold(f64::INFINITY, |m, &v| m.min(v));
            let r = greedy_cover(&cloud, &[spread.max(1e-9)]).unwrap();
            prop_assert_eq!(r.counts[0], 1);
        }

        #[test]
        fn energy_is_quadratic_and_nonnegative(
            coeffs in proptest::collection::vec(-1.0f64..1.0, 8),
            c in -3.0f64..3.0,
        ) {
            let b = basis();
            let x = Field::from_coeffs(&b, coeffs).unwrap();
            let e = energy(&x);
            prop_assert!(e >= 0.0);
            prop_assert!((energy(&x.scaled(c)) - c * c * e).abs() <= 1e-12 * (1.0 + c * c * e));
            prop_assert!((energy_of_coeffs(x.coeffs()) - e).abs() <= 1e-13 * (1.0 + e));
        }

        #[test]
        fn selection_is_deterministic(amps in proptest::collection::vec(0.1f64..2.0, 1..4)) {
            let b = basis();
            let runs: Vec<Trajectory> = amps
                .iter()
                .map(|&a| free_run(&b, &Field::sine_mode(&b, 1, a).unwrap(), 0.1))
                .collect();
            let r1 = minimal_solution_select(&b, &runs, Functional::SupNorm, 1e-6).unwrap();
            let r2 = minimal_solution_select(&b, &runs, Functional::SupNorm, 1e-6).unwrap();
            prop_assert_eq!(&r1, &r2);
            let best = amps.iter().copied().fold(f64::INFINITY, f64::min);
            prop_assert!((r1.values[r1.argmin] - best).abs() < 1e-12);
        }
    }
}
