//! Invariants that hold for every input, checked with generated cases.

use proptest::prelude::*;

use rwrs::cli::config::{Command, ExperimentConfig};
use rwrs::limit::{grid_local_time, sample_levy_path};
use rwrs::rng::{stream_rng, Stream};
use rwrs::scenery::Scenery;
use rwrs::schema::{delta_exponent, feasible_pair, FeasibleBranch, SchemaConfig, SchemaSampler};
use rwrs::stable::SceneryLaw;
use rwrs::stats::{empirical_cf, hill_estimator, ks_two_sample, loglog_slope};
use rwrs::walk::WalkPath;
use rwrs::StableLaw;

fn walk_from_steps(steps: &[i8]) -> WalkPath {
    let mut pos = vec![0i64];
    for &s in steps {
        pos.push(pos.last().unwrap() + s as i64);
    }
    WalkPath::from_positions(pos).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hill_is_scale_invariant(xs in prop::collection::vec(1e-3f64..1e3, 20..200), c in 1e-3f64..1e3) {
        let k = xs.len() / 4;
        if let Ok(h) = hill_estimator(&xs, k) {
            let scaled: Vec<f64> = xs.iter().map(|x| x * c).collect();
            let hs = hill_estimator(&scaled, k).unwrap();
            prop_assert!((h - hs).abs() <= 1e-9 * h);
        }
    }

    #[test]
    fn loglog_slope_invariances(
        xs in prop::collection::btree_set(1u32..10_000, 3..30),
        a in 0.01f64..100.0,
        b in 0.01f64..100.0,
        noise in prop::collection::vec(0.5f64..2.0, 30),
    ) {
        let x: Vec<f64> = xs.iter().map(|&v| v as f64).collect();
        let y: Vec<f64> = x.iter().zip(&noise).map(|(x, e)| x.powf(0.7) * e).collect();
        let base = loglog_slope(&x, &y).unwrap();
        let x2: Vec<f64> = x.iter().map(|v| v * a).collect();
        let y2: Vec<f64> = y.iter().map(|v| v * b).collect();
        let moved = loglog_slope(&x2, &y2).unwrap();
        prop_assert!((base.slope - moved.slope).abs() < 1e-9);
    }

    #[test]
    fn empirical_cf_bounded(xs in prop::collection::vec(-1e6f64..1e6, 1..100), u in -50f64..50.0) {
        let e = empirical_cf(&xs, u).unwrap();
        prop_assert!(e.value().norm() <= 1.0 + 1e-12);
        let neg = empirical_cf(&xs, -u).unwrap();
        prop_assert!((e.value() - neg.value().conj()).norm() < 1e-12);
    }

    #[test]
    fn ks_symmetric_and_bounded(
        a in prop::collection::vec(-10f64..10.0, 1..80),
        b in prop::collection::vec(-10f64..10.0, 1..80),
    ) {
        let ab = ks_two_sample(&a, &b).unwrap();
        let ba = ks_two_sample(&b, &a).unwrap();
        prop_assert_eq!(ab.statistic, ba.statistic);
        prop_assert!((0.0..=1.0).contains(&ab.statistic));
        prop_assert!((0.0..=1.0).contains(&ab.p_value));
        prop_assert_eq!(ks_two_sample(&a, &a).unwrap().statistic, 0.0);
    }

    #[test]
    fn local_time_identities(steps in prop::collection::vec(-2i8..=2, 1..60), frac in 0f64..1.0) {
        let w = walk_from_steps(&steps);
        let n = steps.len();
        for m in 0..=n {
            let f = w.local_time_field(m).unwrap();
            let s = m as f64;
            prop_assert_eq!(f.total(), m as u64 + 1);
            prop_assert_eq!(f.range() as f64, w.range(s).unwrap());
            prop_assert_eq!(f.self_intersections() as f64, w.self_intersections(s).unwrap());
            let v: u64 = f.iter().map(|(_, c)| c * c).sum();
            prop_assert_eq!(v, f.self_intersections());
            prop_assert!(w.range(s).unwrap() <= 2.0 * w.max_abs(m).unwrap() as f64 + 1.0);
            prop_assert!(w.range(s).unwrap() <= w.self_intersections(s).unwrap());
            for (x, c) in f.iter() {
                prop_assert_eq!(w.local_time(x, s).unwrap(), c as f64);
            }
        }
        // Monotone in time, with interpolation in between.
        let s = (n - 1) as f64 + frac;
        let lo = (n - 1) as f64;
        prop_assert!(w.range(lo).unwrap() <= w.range(s).unwrap());
        prop_assert!(w.range(s).unwrap() <= w.range(n as f64).unwrap());
        prop_assert!(w.self_intersections(lo).unwrap() <= w.self_intersections(s).unwrap());
        prop_assert!(w.self_intersections(s).unwrap() <= w.self_intersections(n as f64).unwrap());
        let total: f64 = w.local_time_field(n).unwrap().sites().iter().map(|&x| w.local_time(x, s).unwrap()).sum();
        prop_assert!((total - (s + 1.0)).abs() < 1e-12);
    }

    #[test]
    fn grid_local_time_mass_is_elapsed_time(seed in 0u64..1000, k in 1usize..=64, alpha in 1.1f64..=2.0, h_x in 0.001f64..1.0) {
        let law = StableLaw::symmetric(alpha, 1.0).unwrap();
        let mut rng = stream_rng(seed, Stream::Levy, 0, 0);
        let path = sample_levy_path(&law, 1.0, 1.0 / 64.0, &mut rng).unwrap();
        let t = k as f64 / 64.0;
        let lt = grid_local_time(&path, h_x, &[t, 1.0]).unwrap();
        prop_assert!((lt.mass(t).unwrap() - t).abs() < 1e-12);
        prop_assert!((lt.mass(1.0).unwrap() - 1.0).abs() < 1e-12);
        prop_assert!(lt.power_integral(t, 1.0).unwrap() - t < 1e-12);
    }

    #[test]
    fn feasibility_on_the_domain(alpha in 1.0001f64..=2.0, beta in 0.01f64..=2.0) {
        let h = delta_exponent(alpha, beta).unwrap();
        let f = feasible_pair(alpha, beta).unwrap();
        let recip = 1.0 / beta;
        let mid = (beta + 1.0) / (2.0 * beta);
        match f.branch {
            FeasibleBranch::BelowOne => prop_assert!(h >= mid - 1e-12 && h < recip + 1e-12),
            FeasibleBranch::One => prop_assert_eq!(f.h, 1.0),
            FeasibleBranch::AboveOne => prop_assert!(h > recip - 1e-12 && h <= mid + 1e-12),
        }
        prop_assert!(h > 0.5 && h.is_finite());
    }

    #[test]
    fn stable_cf_modulus_and_conjugate(
        b in 0.05f64..=2.0, s in 0.01f64..10.0, nu in -1f64..=1.0, u in -20f64..20.0,
    ) {
        let nu = if (b - 1.0).abs() < 1e-9 { 0.0 } else { nu };
        let law = StableLaw::new(b, s, nu).unwrap();
        let z = law.cf(u);
        prop_assert!(z.norm() <= 1.0 + 1e-15);
        prop_assert!((z - law.cf(-u).conj()).norm() < 1e-14);
        let a = (s * u.abs()).powf(b);
        if a < 500.0 {
            prop_assert!((a + z.norm().ln()).abs() < 1e-9 * (1.0 + a));
        }
    }

    #[test]
    fn scenery_values_ignore_query_order(seed in 0u64..1000, mut sites in prop::collection::vec(-1000i64..1000, 1..50)) {
        let law = SceneryLaw::ExactStable(StableLaw::new(1.3, 1.0, 0.2).unwrap());
        let mut a = Scenery::new(law, seed, 1);
        let first: Vec<(i64, f64)> = sites.iter().map(|&x| (x, a.scenery_at(x))).collect();
        sites.reverse();
        let mut b = Scenery::new(law, seed, 1);
        for &x in &sites {
            let v = b.scenery_at(x);
            prop_assert!(first.iter().any(|&(y, w)| y == x && w == v));
        }
    }

    #[test]
    fn config_canonical_round_trip(
        alpha in 1.01f64..=2.0, beta in 0.1f64..=2.0, n in 1usize..100_000, seed in any::<u64>(),
        copies in prop::option::of(1usize..100), h_t in prop::option::of(1e-6f64..1.0),
        times in prop::collection::vec(0f64..10.0, 1..5), cmd in 0usize..7,
    ) {
        let mut c = ExperimentConfig { alpha, beta, n, seed, copies, h_t, times, ..Default::default() };
        c.command = [Command::WalkScaling, Command::SchemaCf, Command::LimitSelfsim, Command::TailCheck,
            Command::HolderCheck, Command::FeasibleSweep].get(cmd).copied();
        let back = ExperimentConfig::from_text(&c.canonical()).unwrap();
        prop_assert_eq!(back, c);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn schema_samples_reproducible(seed in any::<u64>(), replica in 0u64..1000) {
        let mut c = SchemaConfig::new(1.5, 0.9, 64);
        c.master_seed = seed;
        c.copies = 3;
        let s = SchemaSampler::new(&c).unwrap();
        prop_assert_eq!(s.sample(replica).unwrap(), s.sample(replica).unwrap());
    }
}
