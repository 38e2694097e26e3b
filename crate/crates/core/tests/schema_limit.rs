//! The rescaled schema, its discretized limit and the associated functionals.

use std::collections::HashMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rwrs::limit::{grid_local_time, holder_modulus, sample_levy_path, LimitConfig};
use rwrs::rng::{stream_rng, Stream};
use rwrs::scenery::Scenery;
use rwrs::schema::{delta_exponent, ks_functional, rescaled_rwrs, RwrsPath, SchemaConfig, SchemaSampler};
use rwrs::stats::{ks_two_sample, mean, median, CfEstimate};
use rwrs::StableLaw;

fn schema(alpha: f64, beta: f64, n: usize, copies: usize, seed: u64) -> SchemaSampler {
    let mut c = SchemaConfig::new(alpha, beta, n);
    c.copies = copies;
    c.master_seed = seed;
    SchemaSampler::new(&c).unwrap()
}

/// Direct evaluation of `s^b n^(-delta b) sum_x |theta N_n(x)|^b (1 - i nu tan(pi b/2) sgn)`.
fn functional_oracle(positions: &[i64], sigma: f64, beta: f64, nu: f64, delta: f64, theta: f64) -> Complex64 {
    let mut counts: HashMap<i64, f64> = HashMap::new();
    for &x in positions {
        *counts.entry(x).or_default() += 1.0;
    }
    let n = (positions.len() - 1) as f64;
    let tan = (PI * beta / 2.0).tan();
    let mut z = Complex64::new(0.0, 0.0);
    for c in counts.values() {
        let v = theta * c;
        let p = v.abs().powf(beta);
        let skew = if beta == 2.0 || nu == 0.0 { 0.0 } else { -p * nu * tan * v.signum() };
        z += Complex64::new(p, skew);
    }
    z * sigma.powf(beta) * n.powf(-delta * beta)
}

#[test]
fn conditional_cf_given_walk_is_exp_of_functional() {
    let mut c = SchemaConfig::new(1.5, 1.2, 200);
    c.nu = 0.6;
    c.sigma = 0.8;
    c.master_seed = 11;
    let sampler = SchemaSampler::new(&c).unwrap();
    let walk = sampler.walk(0, 0).unwrap();
    let index = walk.site_index();
    let law = c.scenery_law().unwrap();
    let delta = sampler.delta();
    let theta = 0.7;
    let zs: Vec<Complex64> = (0..10_000u64)
        .map(|r| {
            let s = Scenery::for_copy(law, 11, r, 0);
            let d = rescaled_rwrs(&RwrsPath::build_indexed(&walk, &index, &s), 200, delta, 1.0).unwrap();
            Complex64::new(0.0, theta * d).exp()
        })
        .collect();
    let est = CfEstimate::from_samples(&zs);
    let x = ks_functional(&walk, &c, &[theta], &[1.0]).unwrap();
    let oracle = functional_oracle(walk.positions(), 0.8, 1.2, 0.6, delta, theta);
    assert!((x - oracle).norm() < 1e-10 * oracle.norm());
    let want = (-x).exp();
    assert!((est.re - want.re).abs() < 3.0 * est.se_re, "{} vs {}", est.re, want.re);
    assert!((est.im - want.im).abs() < 3.0 * est.se_im, "{} vs {}", est.im, want.im);
}

#[test]
fn gaussian_functional_is_self_intersection_count() {
    let mut c = SchemaConfig::new(2.0, 2.0, 4096);
    c.sigma = 1.3;
    let sampler = SchemaSampler::new(&c).unwrap();
    for r in 0..5 {
        let walk = sampler.walk(r, 0).unwrap();
        let x = ks_functional(&walk, &c, &[1.0], &[1.0]).unwrap();
        let v = walk.self_intersections(4096.0).unwrap();
        let want = 1.3f64.powi(2) * 4096f64.powf(-1.5) * v;
        assert!((x.re - want).abs() < 1e-12 * want);
        assert_eq!(x.im, 0.0);
    }
}

#[test]
fn rescaled_sums_stabilize_in_n() {
    let small = schema(2.0, 1.5, 1 << 12, 1, 12);
    let large = schema(2.0, 1.5, 1 << 14, 1, 13);
    let a: Vec<f64> = (0..2000).map(|r| small.sample_copy(r, 0).unwrap()[0]).collect();
    let b: Vec<f64> = (0..2000).map(|r| large.sample_copy(r, 0).unwrap()[0]).collect();
    let ks = ks_two_sample(&a, &b).unwrap();
    assert!(ks.statistic < 2.0 * ks.critical_1pct, "{ks:?}");
}

#[test]
fn averaged_copies_are_stable_in_copy_count() {
    let few = schema(2.0, 1.5, 1024, 4, 14);
    let many = schema(2.0, 1.5, 1024, 8, 15);
    let a: Vec<f64> = (0..2000).map(|r| few.sample(r).unwrap()[0]).collect();
    let b: Vec<f64> = (0..2000).map(|r| many.sample(r).unwrap()[0]).collect();
    let ks = ks_two_sample(&a, &b).unwrap();
    assert!(ks.statistic < 2.0 * ks.critical_1pct, "{ks:?}");
}

#[test]
fn levy_path_endpoint_scales() {
    for (i, alpha) in [2.0, 1.5].into_iter().enumerate() {
        let law = StableLaw::symmetric(alpha, 1.0).unwrap();
        let t = 4.0;
        let mut rng = stream_rng(16 + i as u64, Stream::Levy, 0, 0);
        let ends: Vec<f64> = (0..5000)
            .map(|_| *sample_levy_path(&law, t, t / 256.0, &mut rng).unwrap().values().last().unwrap() * t.powf(-1.0 / alpha))
            .collect();
        let mut rng = stream_rng(16 + i as u64, Stream::Direct, 0, 0);
        let direct: Vec<f64> = (0..5000).map(|_| law.sample(&mut rng)).collect();
        let ks = ks_two_sample(&ends, &direct).unwrap();
        assert!(ks.statistic < ks.critical_1pct, "alpha {alpha}: {ks:?}");
    }
}

#[test]
fn grid_local_time_mass_and_square_integral_converge() {
    let law = StableLaw::symmetric(2.0, 1.0).unwrap();
    let step = 1.0 / 65536.0;
    let widths = [0.08, 0.04, 0.02];
    let mut means = [0.0; 3];
    for r in 0..300u64 {
        let mut rng = stream_rng(17, Stream::Levy, r, 0);
        let path = sample_levy_path(&law, 1.0, step, &mut rng).unwrap();
        for (m, &h) in means.iter_mut().zip(&widths) {
            let lt = grid_local_time(&path, h, &[0.5, 1.0]).unwrap();
            assert!((lt.mass(1.0).unwrap() - 1.0).abs() < 1e-9);
            assert!((lt.mass(0.5).unwrap() - 0.5).abs() < 1e-9);
            *m += lt.power_integral(1.0, 2.0).unwrap() / 300.0;
        }
    }
    let (d1, d2) = ((means[1] - means[0]).abs(), (means[2] - means[1]).abs());
    assert!(d2 < d1, "{means:?}");
}

#[test]
fn gaussian_delta_variance_matches_square_integral() {
    let sigma = 0.9;
    let mut cfg = LimitConfig::new(StableLaw::symmetric(2.0, 1.0).unwrap(), StableLaw::new(2.0, sigma, 0.0).unwrap());
    cfg.step = Some(1.0 / 1024.0);
    cfg.master_seed = 18;
    let grid = cfg.grid(1.0).unwrap();
    let reps = 40_000u64;
    let sq: Vec<f64> = (0..reps)
        .map(|r| cfg.delta_path(&grid, r, 0).unwrap()[grid.steps].powi(2))
        .collect();
    let var = mean(&sq);
    let (moment, _) = cfg.local_time_power_moment(1.0, reps as usize).unwrap();
    let want = 2.0 * sigma * sigma * moment;
    assert!((var / want - 1.0).abs() < 0.05, "{var} vs {want}");
}

fn excess_kurtosis(xs: &[f64]) -> f64 {
    let m = mean(xs);
    let m2 = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / xs.len() as f64;
    let m4 = xs.iter().map(|x| (x - m).powi(4)).sum::<f64>() / xs.len() as f64;
    m4 / (m2 * m2) - 3.0
}

#[test]
fn gaussian_gamma_approaches_normal_in_copies() {
    let base = LimitConfig::new(StableLaw::symmetric(2.0, 1.0).unwrap(), StableLaw::new(2.0, 1.0, 0.0).unwrap());
    let kurt: Vec<f64> = [1usize, 16]
        .iter()
        .map(|&m| {
            let mut cfg = base.clone();
            cfg.copies = m;
            cfg.step = Some(1.0 / 256.0);
            cfg.master_seed = 19;
            let xs: Vec<f64> = (0..4000)
                .map(|r| *cfg.sample_gamma(1.0, r).unwrap().values().last().unwrap())
                .collect();
            excess_kurtosis(&xs)
        })
        .collect();
    assert!(kurt[0] > 0.2, "{kurt:?}");
    assert!(kurt[1].abs() < kurt[0] / 2.0, "{kurt:?}");
}

fn small_limit(alpha: f64, beta: f64, nu: f64) -> LimitConfig {
    let mut cfg = LimitConfig::new(StableLaw::symmetric(alpha, 1.0).unwrap(), StableLaw::new(beta, 1.0, nu).unwrap());
    cfg.step = Some(1.0 / 256.0);
    cfg.master_seed = 20;
    cfg
}

#[test]
fn gamma_cf_basic_properties() {
    let cfg = small_limit(1.5, 1.3, 0.7);
    let times = [0.5, 1.0];
    let one = cfg.gamma_cf(&[0.0, 0.0], &times, 100).unwrap();
    assert_eq!(one.value(), Complex64::new(1.0, 0.0));
    let z = cfg.gamma_cf(&[0.4, -1.1], &times, 200).unwrap();
    let zc = cfg.gamma_cf(&[-0.4, 1.1], &times, 200).unwrap();
    assert!(z.value().norm() <= 1.0);
    assert!((z.value() - zc.value().conj()).norm() < 1e-12);
    assert!(z.im.abs() > 0.0);
    let sym = small_limit(1.5, 1.3, 0.0).gamma_cf(&[0.4, -1.1], &times, 200).unwrap();
    assert_eq!(sym.im, 0.0);
    let d = cfg.delta_cf(&[0.4, -1.1], &times, 200).unwrap();
    assert!(d.value().norm() <= 1.0);
}

#[test]
fn gamma_cf_is_self_similar() {
    // With default grids, horizon c reuses the same normalized paths.
    for (alpha, beta) in [(2.0, 1.5), (1.5, 0.8)] {
        let mut cfg = LimitConfig::new(StableLaw::symmetric(alpha, 1.0).unwrap(), StableLaw::new(beta, 1.0, 0.3).unwrap());
        cfg.master_seed = 21;
        let delta = delta_exponent(alpha, beta).unwrap();
        let c = 2.0;
        let scaled = cfg.gamma_cf(&[1.0], &[c], 100).unwrap();
        let unit = cfg.gamma_cf(&[c.powf(delta)], &[1.0], 100).unwrap();
        assert!((scaled.value() - unit.value()).norm() < 1e-3, "{scaled:?} vs {unit:?}");
    }
}

#[test]
fn power_moment_scales_with_horizon() {
    for (alpha, beta) in [(2.0, 1.5), (1.5, 0.8)] {
        let mut cfg = LimitConfig::new(StableLaw::symmetric(alpha, 1.0).unwrap(), StableLaw::new(beta, 1.0, 0.0).unwrap());
        cfg.master_seed = 22;
        let (m1, _) = cfg.local_time_power_moment(1.0, 100).unwrap();
        let (m2, _) = cfg.local_time_power_moment(2.0, 100).unwrap();
        let want = 2f64.powf(beta * (1.0 - 1.0 / alpha) + 1.0 / alpha);
        assert!((m2 / m1 / want - 1.0).abs() < 1e-3, "{} vs {want}", m2 / m1);
    }
}

#[test]
fn power_moment_running_mean_settles() {
    let mut cfg = LimitConfig::new(StableLaw::symmetric(2.0, 1.0).unwrap(), StableLaw::new(1.5, 1.0, 0.0).unwrap());
    cfg.step = Some(1.0 / 1024.0);
    cfg.master_seed = 23;
    let (a, _) = cfg.local_time_power_moment(1.0, 1000).unwrap();
    let (b, se) = cfg.local_time_power_moment(1.0, 10_000).unwrap();
    assert!((a / b - 1.0).abs() < 0.05, "{a} vs {b}");
    assert!(se / b < 0.01);
}

#[test]
fn holder_modulus_stable_across_resolutions() {
    let mut cfg = LimitConfig::new(StableLaw::symmetric(2.0, 1.0).unwrap(), StableLaw::new(1.5, 1.0, 0.0).unwrap());
    cfg.step = Some(1.0 / 1024.0);
    cfg.copies = 8;
    cfg.master_seed = 24;
    let paths = cfg.sample_gamma_many(0.5, 100).unwrap();
    let medians: Vec<f64> = [16usize, 4, 1]
        .iter()
        .map(|&stride| {
            let v: Vec<f64> = paths
                .iter()
                .map(|p| holder_modulus(&p.coarsen(stride, 0.5).unwrap(), 2.0, 0.0).unwrap())
                .collect();
            assert!(v.iter().all(|x| *x > 0.0 && x.is_finite()));
            median(&v)
        })
        .collect();
    for w in medians.windows(2) {
        assert!(w[1] >= w[0], "{medians:?}");
        assert!(w[1] / w[0] - 1.0 < 0.5, "{medians:?}");
    }
}
