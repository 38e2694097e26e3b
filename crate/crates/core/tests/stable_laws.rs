//! Distributional checks of the stable, walk-increment and scenery samplers
//! against independently evaluated oracles.

use std::f64::consts::PI;

use num_complex::Complex64;
use rwrs::rng::{stream_rng, Stream};
use rwrs::stable::{c_beta, DiscretePareto, SceneryLaw, TwoSidedPareto, WalkIncrementLaw};
use rwrs::stats::{empirical_cf, ks_two_sample, mean, std_error, variance};
use rwrs::StableLaw;

fn draws(law: &StableLaw, n: usize, seed: u64) -> Vec<f64> {
    let mut rng = stream_rng(seed, Stream::Direct, 0, 0);
    let mut out = vec![0.0; n];
    law.sample_into(&mut rng, &mut out);
    out
}

/// `exp(-s^b |u|^b (1 - i nu tan(pi b / 2) sgn u))`, written out independently.
fn cf_oracle(b: f64, s: f64, nu: f64, u: f64) -> Complex64 {
    if u == 0.0 {
        return Complex64::new(1.0, 0.0);
    }
    let skew = if b == 1.0 { 0.0 } else { nu * (PI * b / 2.0).tan() * u.signum() };
    let a = (s * u.abs()).powf(b);
    Complex64::new(-a, a * skew).exp()
}

#[test]
fn gaussian_variance_is_twice_scale_squared() {
    let sigma = 0.7;
    let xs = draws(&StableLaw::new(2.0, sigma, 0.0).unwrap(), 1_000_000, 1);
    let v = variance(&xs);
    let m = mean(&xs);
    let centered: Vec<f64> = xs.iter().map(|x| (x - m).powi(2)).collect();
    let se = std_error(&centered);
    assert!((v - 2.0 * sigma * sigma).abs() < 3.0 * se, "{v} vs {}", 2.0 * sigma * sigma);
}

#[test]
fn empirical_cf_matches_formula_pointwise() {
    let n = 1_000_000;
    let bound = 3.0 / (n as f64).sqrt();
    for (i, (b, s, nu)) in [(1.5, 1.0, 0.5), (0.8, 1.3, -0.3), (2.0, 1.0, 0.0), (1.0, 0.6, 0.0), (0.5, 0.4, 1.0), (1.2, 1.0, -1.0)]
        .into_iter()
        .enumerate()
    {
        let law = StableLaw::new(b, s, nu).unwrap();
        let xs = draws(&law, n, 10 + i as u64);
        for u in [-2.0, -1.0, -0.5, -0.1, 0.1, 0.5, 1.0, 2.0] {
            let e = empirical_cf(&xs, u).unwrap();
            let want = cf_oracle(b, s, nu, u);
            assert!((e.re - want.re).abs() < bound, "re ({b},{s},{nu}) u={u}: {} vs {}", e.re, want.re);
            assert!((e.im - want.im).abs() < bound, "im ({b},{s},{nu}) u={u}: {} vs {}", e.im, want.im);
            assert!((law.cf(u) - want).norm() < 1e-14);
        }
    }
}

#[test]
fn skewed_cf_example_value() {
    let law = StableLaw::new(1.5, 1.0, 0.5).unwrap();
    // tan(3 pi / 4) = -1.
    let want = (-1.0f64).exp() * Complex64::new(0.0, -0.5).exp();
    assert!((law.cf(1.0) - want).norm() < 1e-14);
    let xs = draws(&law, 200_000, 3);
    let e = empirical_cf(&xs, 1.0).unwrap();
    assert!((e.value() - want).norm() < 3.0 * e.std_error());
}

#[test]
fn strict_stability_under_pairwise_sums() {
    for (i, (b, nu)) in [(0.5, 0.0), (1.5, 0.0), (0.8, 0.6), (1.7, -0.4)].into_iter().enumerate() {
        let law = StableLaw::new(b, 1.0, nu).unwrap();
        let n = 100_000;
        let xs = draws(&law, 2 * n, 20 + i as u64);
        let sums: Vec<f64> = xs.chunks(2).map(|p| (p[0] + p[1]) * 2f64.powf(-1.0 / b)).collect();
        let single = draws(&law, n, 40 + i as u64);
        let ks = ks_two_sample(&sums, &single).unwrap();
        assert!(ks.statistic < ks.critical_1pct, "beta {b}: {ks:?}");
    }
}

#[test]
fn simple_walk_increments_are_centered() {
    let law = WalkIncrementLaw::SimpleSymmetric;
    let mut rng = stream_rng(5, Stream::Walk, 0, 0);
    let xs: Vec<f64> = (0..1_000_000).map(|_| law.sample(&mut rng) as f64).collect();
    assert!(xs.iter().all(|x| x.abs() == 1.0));
    assert!(mean(&xs).abs() < 3.0 * std_error(&xs));
}

/// `zeta(s)` from a partial sum with the Euler-Maclaurin remainder.
fn zeta_partial(s: f64) -> f64 {
    let n = 100_000u64;
    let body: f64 = (1..n).rev().map(|k| (k as f64).powf(-s)).sum();
    let nf = n as f64;
    body + nf.powf(1.0 - s) / (s - 1.0) + 0.5 * nf.powf(-s) + s / 12.0 * nf.powf(-s - 1.0)
}

#[test]
fn discrete_pareto_masses_use_zeta_normalizer() {
    let z = zeta_partial(2.5);
    let dp = DiscretePareto::new(1.5).unwrap();
    assert!((dp.zeta() - z).abs() < 1e-12 * z);
    let c = 1.0 / (2.0 * z);
    for k in [1i64, -1] {
        assert!((dp.pmf(k) - c).abs() < 1e-12 * c);
    }
    for k in [2i64, -2] {
        assert!((dp.pmf(k) - c * 2f64.powf(-2.5)).abs() < 1e-12 * c);
    }
    // Partial mass up to K plus the exact tail is one.
    let k = 10_000u64;
    let body: f64 = (1..=k as i64).map(|j| 2.0 * dp.pmf(j)).sum();
    assert!((body + dp.tail_prob(k) - 1.0).abs() < 1e-9);
}

#[test]
fn discrete_pareto_tail_slope() {
    let law = WalkIncrementLaw::discrete_pareto(1.5).unwrap();
    let mut rng = stream_rng(6, Stream::Walk, 0, 0);
    let n = 10_000_000usize;
    let mut mags: Vec<u64> = (0..n).map(|_| law.sample(&mut rng).unsigned_abs()).collect();
    mags.sort_unstable();
    let ks: Vec<f64> = (0..=10).map(|i| 10f64 * 1.5f64.powi(i)).collect();
    let tails: Vec<f64> = ks
        .iter()
        .map(|&k| {
            let above = n - mags.partition_point(|&m| (m as f64) <= k);
            above as f64 / n as f64
        })
        .collect();
    let fit = rwrs::stats::loglog_slope(&ks, &tails).unwrap();
    assert!((fit.slope + 1.5).abs() < 0.05, "slope {}", fit.slope);
    for (k, p) in ks.iter().zip(&tails) {
        let scaled = p * k.powf(1.5);
        assert!(scaled > 0.0 && scaled.is_finite());
    }
}

#[test]
fn scenery_laws_moments() {
    let mut rng = stream_rng(7, Stream::Scenery, 0, 0);
    let gauss = SceneryLaw::ExactStable(StableLaw::new(2.0, 1.0, 0.0).unwrap());
    let xs: Vec<f64> = (0..1_000_000).map(|_| gauss.sample(&mut rng)).collect();
    let sq: Vec<f64> = xs.iter().map(|x| x * x).collect();
    assert!((mean(&sq) - 2.0).abs() < 3.0 * std_error(&sq));

    let p = SceneryLaw::TwoSidedPareto(TwoSidedPareto::new(1.5, 0.4, 0.4).unwrap());
    let ys: Vec<f64> = (0..1_000_000).map(|_| p.sample(&mut rng)).collect();
    assert!(mean(&ys).abs() < 3.0 * std_error(&ys));
}

#[test]
fn tail_constant_classical_values() {
    // int_0^inf sin x / x dx = pi/2.
    assert!((c_beta(1.0).unwrap() - 2.0 / PI).abs() < 1e-10 * 2.0 / PI);
    // Gamma(1/2) cos(pi/4) = sqrt(pi) sqrt(2)/2.
    let half = 1.0 / (PI.sqrt() * 2f64.sqrt() / 2.0);
    assert!((c_beta(0.5).unwrap() - half).abs() < 1e-10 * half);
    // Gamma(-1/2) cos(3 pi/4) = (-2 sqrt(pi)) (-sqrt(2)/2) = sqrt(2 pi).
    let three_halves = 1.0 / (2.0 * PI).sqrt();
    assert!((c_beta(1.5).unwrap() - three_halves).abs() < 1e-10 * three_halves);
}
