//! Discretized limit objects.
//!
//! A Lévy path `Y` is sampled on the grid `k h_t`, its local time is binned
//! with width `h_x` using the left-point rule
//! `L_t(b) = (h_t / h_x) #{k < t/h_t : floor(Y(k h_t) / h_x) = b}`,
//! so that `sum_b L_t(b) h_x = t` exactly. The stable process in random
//! scenery is `Delta(t) = sum_b L_t(b) dW(b)` with i.i.d. bin increments
//! `dW(b) ~ S(b, sigma h_x^(1/b), nu)`, and `Gamma` is approximated by
//! `m^(-1/b) sum_i Delta^(i)`.

use num_complex::Complex64;
use rand::RngCore;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rng::{child_seed, stream_rng, Stream};
use crate::schema::{delta_exponent, SchemaConfig};
use crate::stable::{c_beta_closed_form, StableLaw};
use crate::stats::{mean, std_error, CfEstimate, ComplexSum, NeumaierSum};
use crate::walk::SiteIndex;

/// Default number of time steps per horizon.
pub const DEFAULT_STEPS: usize = 1 << 14;

fn grid_steps(horizon: f64, step: f64) -> Result<usize> {
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(Error::param("horizon", format!("{horizon} must be positive")));
    }
    if !(step > 0.0 && step <= horizon) {
        return Err(Error::param("h_t", format!("{step} not in (0, {horizon}]")));
    }
    let steps = (horizon / step).round();
    if (steps * step - horizon).abs() > 1e-9 * horizon {
        return Err(Error::Grid(format!(
            "horizon {horizon} is not a multiple of the step {step}"
        )));
    }
    Ok(steps as usize)
}

/// Index of `t` on the grid of step `h`.
fn grid_index(t: f64, step: f64) -> Result<usize> {
    let k = (t / step).round();
    if !(t >= 0.0) || (k * step - t).abs() > 1e-9 * t.max(step) {
        return Err(Error::Grid(format!("time {t} is not on the grid of step {step}")));
    }
    Ok(k as usize)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LevyPath {
    step: f64,
    values: Vec<f64>,
}

impl LevyPath {
    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn steps(&self) -> usize {
        self.values.len() - 1
    }

    pub fn horizon(&self) -> f64 {
        self.step * self.steps() as f64
    }

    /// `Y(k h_t)` for `k = 0..=steps`.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn increments(&self) -> Vec<f64> {
        self.values.windows(2).map(|w| w[1] - w[0]).collect()
    }

    /// `floor(Y(k h_t) / h_x)` for `k < steps`, the bins entering the left-point rule.
    pub fn bins(&self, bin_width: f64) -> Vec<i64> {
        let inv = 1.0 / bin_width;
        self.values[..self.steps()]
            .iter()
            .map(|y| (y * inv).floor() as i64)
            .collect()
    }
}

/// Samples `Y` on `{0, h_t, ..., T}`; `law` is the law of `Y(1)`.
pub fn sample_levy_path<R: RngCore + ?Sized>(
    law: &StableLaw,
    horizon: f64,
    step: f64,
    rng: &mut R,
) -> Result<LevyPath> {
    let steps = grid_steps(horizon, step)?;
    let inc_law = law.with_scale(law.scale() * step.powf(1.0 / law.index()))?;
    let mut values = vec![0.0; steps + 1];
    inc_law.sample_into(rng, &mut values[1..]);
    for k in 1..=steps {
        values[k] += values[k - 1];
    }
    Ok(LevyPath { step, values })
}

/// Local time at one checkpoint: occupied bins in increasing order and `L_t(b)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LocalTimeSlice {
    pub time: f64,
    pub bins: Vec<i64>,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridLocalTime {
    step: f64,
    bin_width: f64,
    slices: Vec<LocalTimeSlice>,
}

impl GridLocalTime {
    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn bin_width(&self) -> f64 {
        self.bin_width
    }

    pub fn slices(&self) -> &[LocalTimeSlice] {
        &self.slices
    }

    pub fn slice(&self, t: f64) -> Result<&LocalTimeSlice> {
        self.slices
            .iter()
            .find(|s| (s.time - t).abs() <= 1e-12 * t.max(1.0))
            .ok_or_else(|| Error::Grid(format!("{t} is not a checkpoint")))
    }

    /// `sum_b L_t(b) h_x`, equal to `t`.
    pub fn mass(&self, t: f64) -> Result<f64> {
        let s = self.slice(t)?;
        Ok(s.values.iter().copied().collect::<NeumaierSum>().value() * self.bin_width)
    }

    /// `int L_t(x)^p dx` on the grid.
    pub fn power_integral(&self, t: f64, p: f64) -> Result<f64> {
        let s = self.slice(t)?;
        Ok(power_integral(&s.values, self.bin_width, p))
    }

    /// Union of occupied bins over all checkpoints, sorted.
    pub fn bins(&self) -> Vec<i64> {
        let mut all: Vec<i64> = self.slices.iter().flat_map(|s| s.bins.iter().copied()).collect();
        all.sort_unstable();
        all.dedup();
        all
    }
}

fn power_integral(values: &[f64], bin_width: f64, p: f64) -> f64 {
    values
        .iter()
        .map(|v| v.powf(p))
        .collect::<NeumaierSum>()
        .value()
        * bin_width
}

/// Bins the path's occupation measure at each checkpoint.
pub fn grid_local_time(path: &LevyPath, bin_width: f64, checkpoints: &[f64]) -> Result<GridLocalTime> {
    if !(bin_width > 0.0 && bin_width.is_finite()) {
        return Err(Error::param("h_x", format!("{bin_width} must be positive")));
    }
    let bins = path.bins(bin_width);
    let index = SiteIndex::new(&bins);
    let weight = path.step / bin_width;
    let mut slices = Vec::with_capacity(checkpoints.len());
    for &t in checkpoints {
        let k = grid_index(t, path.step)?;
        if k > path.steps() {
            return Err(Error::TimeOutOfRange {
                time: t,
                horizon: path.horizon(),
            });
        }
        let mut counts = vec![0u64; index.len()];
        for &s in &index.slots[..k] {
            counts[s as usize] += 1;
        }
        let (b, v): (Vec<i64>, Vec<f64>) = index
            .sites
            .iter()
            .zip(&counts)
            .filter(|(_, &c)| c > 0)
            .map(|(&b, &c)| (b, c as f64 * weight))
            .unzip();
        slices.push(LocalTimeSlice {
            time: t,
            bins: b,
            values: v,
        });
    }
    Ok(GridLocalTime {
        step: path.step,
        bin_width,
        slices,
    })
}

/// Increments of the scenery process over a set of bins.
#[derive(Debug, Clone, PartialEq)]
pub struct SceneryLevy {
    bin_width: f64,
    bins: Vec<i64>,
    increments: Vec<f64>,
}

impl SceneryLevy {
    /// Draws `dW(b)` for each bin in `bins` (sorted, distinct), in order.
    /// `law` is the law of `W(1)`.
    pub fn sample<R: RngCore + ?Sized>(
        law: &StableLaw,
        bin_width: f64,
        bins: Vec<i64>,
        rng: &mut R,
    ) -> Result<Self> {
        if bins.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::param("bins", "must be strictly increasing"));
        }
        let inc = law.with_scale(law.scale() * bin_width.powf(1.0 / law.index()))?;
        let mut increments = vec![0.0; bins.len()];
        inc.sample_into(rng, &mut increments);
        Ok(Self {
            bin_width,
            bins,
            increments,
        })
    }

    /// Explicit increments, e.g. for tests.
    pub fn from_increments(bin_width: f64, bins: Vec<i64>, increments: Vec<f64>) -> Result<Self> {
        if bins.len() != increments.len() || bins.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::param("bins", "must be strictly increasing and match increments"));
        }
        Ok(Self {
            bin_width,
            bins,
            increments,
        })
    }

    pub fn bin_width(&self) -> f64 {
        self.bin_width
    }

    pub fn increment(&self, bin: i64) -> Option<f64> {
        self.bins.binary_search(&bin).ok().map(|i| self.increments[i])
    }
}

/// `Delta(t) = sum_b L_t(b) dW(b)`.
pub fn sample_delta(localtime: &GridLocalTime, scenery: &SceneryLevy, t: f64) -> Result<f64> {
    if (scenery.bin_width - localtime.bin_width).abs() > 1e-15 * localtime.bin_width {
        return Err(Error::Grid("scenery and local time use different bin widths".into()));
    }
    let s = localtime.slice(t)?;
    let mut acc = NeumaierSum::new();
    for (&b, &l) in s.bins.iter().zip(&s.values) {
        let w = scenery
            .increment(b)
            .ok_or_else(|| Error::Grid(format!("scenery does not cover bin {b}")))?;
        acc.add(l * w);
    }
    Ok(acc.value())
}

/// Parameters of the discretized limit process.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitConfig {
    /// Law of `Y(1)`.
    pub walk: StableLaw,
    /// Law of `W(1)`.
    pub scenery: StableLaw,
    /// `h_t`; `None` means `horizon / 2^14`.
    pub step: Option<f64>,
    /// `h_x`; `None` means `2 h_t^(1/a)`.
    pub bin_width: Option<f64>,
    /// Number of averaged copies `m`.
    pub copies: usize,
    pub master_seed: u64,
}

/// Resolved grid for one horizon.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Grid {
    pub horizon: f64,
    pub step: f64,
    pub steps: usize,
    pub bin_width: f64,
}

impl LimitConfig {
    pub fn new(walk: StableLaw, scenery: StableLaw) -> Self {
        Self {
            walk,
            scenery,
            step: None,
            bin_width: None,
            copies: 64,
            master_seed: 1,
        }
    }

    /// Limit objects matching a schema configuration.
    pub fn from_schema(config: &SchemaConfig) -> Result<Self> {
        let mut c = Self::new(config.walk_law()?.limit_law()?, config.scenery_limit()?);
        c.master_seed = config.master_seed;
        Ok(c)
    }

    pub fn alpha(&self) -> f64 {
        self.walk.index()
    }

    pub fn beta(&self) -> f64 {
        self.scenery.index()
    }

    pub fn delta(&self) -> Result<f64> {
        delta_exponent(self.alpha(), self.beta())
    }

    pub fn grid(&self, horizon: f64) -> Result<Grid> {
        let step = self.step.unwrap_or(horizon / DEFAULT_STEPS as f64);
        let steps = grid_steps(horizon, step)?;
        let bin_width = self
            .bin_width
            .unwrap_or(2.0 * step.powf(1.0 / self.alpha()));
        if !(bin_width > 0.0 && bin_width.is_finite()) {
            return Err(Error::param("h_x", format!("{bin_width} must be positive")));
        }
        Ok(Grid {
            horizon,
            step,
            steps,
            bin_width,
        })
    }

    fn validate(&self) -> Result<()> {
        if self.copies == 0 {
            return Err(Error::param("copies", "must be at least 1"));
        }
        self.delta().map(|_| ())
    }

    /// Lévy path for stream coordinates `(replica, copy)` under `domain`.
    fn levy_path(&self, grid: &Grid, seed: u64, domain: Stream, replica: u64, copy: u64) -> Result<LevyPath> {
        let mut rng = stream_rng(seed, domain, replica, copy);
        sample_levy_path(&self.walk, grid.horizon, grid.step, &mut rng)
    }

    /// `Delta^(copy)(k h_t)` for `k = 0..=steps`.
    pub fn delta_path(&self, grid: &Grid, replica: u64, copy: u64) -> Result<Vec<f64>> {
        let seed = self.master_seed;
        let path = self.levy_path(grid, seed, Stream::Levy, replica, copy)?;
        let index = SiteIndex::new(&path.bins(grid.bin_width));
        let mut rng = stream_rng(seed, Stream::LevyScenery, replica, copy);
        let w = SceneryLevy::sample(&self.scenery, grid.bin_width, index.sites.clone(), &mut rng)?;
        let weight = grid.step / grid.bin_width;
        let mut out = Vec::with_capacity(grid.steps + 1);
        let mut acc = 0.0;
        out.push(0.0);
        for &s in &index.slots {
            acc += w.increments[s as usize];
            out.push(weight * acc);
        }
        Ok(out)
    }

    /// `Gamma_m` on the full grid of `[0, horizon]` for one replica.
    pub fn sample_gamma(&self, horizon: f64, replica: u64) -> Result<GammaPath> {
        self.validate()?;
        let grid = self.grid(horizon)?;
        let mut sums = vec![0.0; grid.steps + 1];
        for copy in 0..self.copies as u64 {
            for (acc, d) in sums.iter_mut().zip(self.delta_path(&grid, replica, copy)?) {
                *acc += d;
            }
        }
        let norm = (self.copies as f64).powf(-1.0 / self.beta());
        for v in &mut sums {
            *v *= norm;
        }
        Ok(GammaPath {
            step: grid.step,
            values: sums,
        })
    }

    /// Replicas `0..replicas` in parallel, returned in replica order.
    pub fn sample_gamma_many(&self, horizon: f64, replicas: usize) -> Result<Vec<GammaPath>> {
        (0..replicas as u64)
            .into_par_iter()
            .map(|r| self.sample_gamma(horizon, r))
            .collect()
    }

    /// Lévy paths from the oracle stream, used for CF and moment estimates.
    fn oracle_local_time(&self, grid: &Grid, seed: u64, rep: u64, times: &[f64]) -> Result<GridLocalTime> {
        let path = self.levy_path(grid, seed, Stream::Oracle, rep, 0)?;
        grid_local_time(&path, grid.bin_width, times)
    }

    /// `X = sigma^b int |sum_j th_j L_(t_j)|^b (1 - i nu tan(pi b/2) sgn) dx` on the grid.
    pub fn cf_exponent(&self, lt: &GridLocalTime, theta: &[f64], times: &[f64]) -> Result<Complex64> {
        let slices: Vec<&LocalTimeSlice> = times.iter().map(|&t| lt.slice(t)).collect::<Result<_>>()?;
        let bins = lt.bins();
        let mut comb = vec![0.0; bins.len()];
        for (s, &th) in slices.iter().zip(theta) {
            if th == 0.0 {
                continue;
            }
            for (&b, &v) in s.bins.iter().zip(&s.values) {
                let i = bins.binary_search(&b).expect("bin in union");
                comb[i] += th * v;
            }
        }
        let beta = self.beta();
        let skew = if self.scenery.skewness() == 0.0 {
            0.0
        } else {
            self.scenery.skewness() * (std::f64::consts::FRAC_PI_2 * beta).tan()
        };
        let mut re = NeumaierSum::new();
        let mut im = NeumaierSum::new();
        for &v in &comb {
            if v == 0.0 {
                continue;
            }
            let p = v.abs().powf(beta);
            re.add(p);
            if skew != 0.0 {
                im.add(-p * skew * v.signum());
            }
        }
        let scale = self.scenery.scale().powf(beta) * lt.bin_width();
        Ok(Complex64::new(scale * re.value(), scale * im.value()))
    }

    /// Per-realization exponents `X` for each `theta` vector, over `mc_reps` local-time fields.
    pub fn cf_exponents(&self, thetas: &[Vec<f64>], times: &[f64], mc_reps: usize) -> Result<Vec<Vec<Complex64>>> {
        if times.is_empty() || mc_reps == 0 {
            return Err(Error::param("mc_reps", "need at least one time and one repetition"));
        }
        if thetas.iter().any(|th| th.len() != times.len()) {
            return Err(Error::param("theta", "theta and times must have the same length"));
        }
        let horizon = times.iter().copied().fold(0.0, f64::max);
        if horizon == 0.0 {
            return Ok(vec![vec![Complex64::new(0.0, 0.0); mc_reps]; thetas.len()]);
        }
        let grid = self.grid(horizon)?;
        let seed = self.master_seed;
        let per_rep: Vec<Vec<Complex64>> = (0..mc_reps as u64)
            .into_par_iter()
            .map(|r| {
                let lt = self.oracle_local_time(&grid, seed, r, times)?;
                thetas.iter().map(|th| self.cf_exponent(&lt, th, times)).collect()
            })
            .collect::<Result<_>>()?;
        Ok((0..thetas.len())
            .map(|j| per_rep.iter().map(|row| row[j]).collect())
            .collect())
    }

    /// `E exp(i sum_j th_j Gamma(t_j)) = exp(-E X)`, one estimate per `theta` vector.
    pub fn gamma_cf_batch(&self, thetas: &[Vec<f64>], times: &[f64], mc_reps: usize) -> Result<Vec<CfEstimate>> {
        let xs = self.cf_exponents(thetas, times, mc_reps)?;
        xs.iter()
            .enumerate()
            .map(|(j, x)| self.exp_of_mean(x, j as u64))
            .collect()
    }

    pub fn gamma_cf(&self, theta: &[f64], times: &[f64], mc_reps: usize) -> Result<CfEstimate> {
        Ok(self.gamma_cf_batch(&[theta.to_vec()], times, mc_reps)?[0])
    }

    /// `E exp(i sum_j th_j Delta(t_j)) = E exp(-X)`.
    pub fn delta_cf(&self, theta: &[f64], times: &[f64], mc_reps: usize) -> Result<CfEstimate> {
        let xs = self.cf_exponents(&[theta.to_vec()], times, mc_reps)?;
        let zs: Vec<Complex64> = xs[0].iter().map(|x| (-x).exp()).collect();
        Ok(CfEstimate::from_samples(&zs))
    }

    /// `exp(-mean X)` with bootstrap standard errors for both parts.
    fn exp_of_mean(&self, xs: &[Complex64], tag: u64) -> Result<CfEstimate> {
        let mut total = ComplexSum::default();
        for &x in xs {
            total.add(x);
        }
        let value = (-total.value() / xs.len() as f64).exp();
        if xs.len() < 2 {
            return Ok(CfEstimate {
                re: value.re,
                im: value.im,
                se_re: f64::NAN,
                se_im: f64::NAN,
            });
        }
        let mut rng = stream_rng(self.master_seed, Stream::Bootstrap, tag, 0);
        let n = xs.len() as u64;
        let (mut re, mut im) = (Vec::new(), Vec::new());
        for _ in 0..BOOTSTRAP_RESAMPLES {
            let mut s = ComplexSum::default();
            for _ in 0..n {
                s.add(xs[(rng.next_u64() % n) as usize]);
            }
            let z = (-s.value() / n as f64).exp();
            re.push(z.re);
            im.push(z.im);
        }
        Ok(CfEstimate {
            re: value.re,
            im: value.im,
            se_re: crate::stats::variance(&re).sqrt(),
            se_im: crate::stats::variance(&im).sqrt(),
        })
    }

    /// Monte Carlo mean and standard error of `int L_T(x)^b dx`, from an
    /// independent seed so it can serve as an oracle for path statistics.
    pub fn local_time_power_moment(&self, horizon: f64, reps: usize) -> Result<(f64, f64)> {
        if reps < 2 {
            return Err(Error::param("reps", "need at least two repetitions"));
        }
        let grid = self.grid(horizon)?;
        let seed = child_seed(self.master_seed, 0x70);
        let beta = self.beta();
        let vals: Vec<f64> = (0..reps as u64)
            .into_par_iter()
            .map(|r| {
                let lt = self.oracle_local_time(&grid, seed, r, &[horizon])?;
                lt.power_integral(horizon, beta)
            })
            .collect::<Result<_>>()?;
        Ok((mean(&vals), std_error(&vals)))
    }
}

const BOOTSTRAP_RESAMPLES: usize = 200;

/// Free-function form of [`LimitConfig::gamma_cf`].
pub fn gamma_cf(config: &LimitConfig, theta: &[f64], times: &[f64], mc_reps: usize) -> Result<CfEstimate> {
    config.gamma_cf(theta, times, mc_reps)
}

/// Free-function form of [`LimitConfig::sample_gamma`].
pub fn sample_gamma(config: &LimitConfig, horizon: f64, replica: u64) -> Result<GammaPath> {
    config.sample_gamma(horizon, replica)
}

/// Values of `Gamma_m` on a regular grid starting at 0.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaPath {
    step: f64,
    values: Vec<f64>,
}

impl GammaPath {
    pub fn new(step: f64, values: Vec<f64>) -> Result<Self> {
        if !(step > 0.0) || values.is_empty() {
            return Err(Error::param("path", "need a positive step and at least one value"));
        }
        Ok(Self { step, values })
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn horizon(&self) -> f64 {
        self.step * (self.values.len() - 1) as f64
    }

    pub fn at(&self, t: f64) -> Result<f64> {
        let k = grid_index(t, self.step)?;
        self.values.get(k).copied().ok_or(Error::TimeOutOfRange {
            time: t,
            horizon: self.horizon(),
        })
    }

    /// Every `stride`-th value, restricted to `[0, horizon]`.
    pub fn coarsen(&self, stride: usize, horizon: f64) -> Result<GammaPath> {
        if stride == 0 {
            return Err(Error::param("stride", "must be positive"));
        }
        let last = grid_index(horizon, self.step)?;
        if last >= self.values.len() || last % stride != 0 {
            return Err(Error::Grid(format!("cannot coarsen to {horizon} with stride {stride}")));
        }
        Ok(GammaPath {
            step: self.step * stride as f64,
            values: self.values[..=last].iter().step_by(stride).copied().collect(),
        })
    }

    pub fn sup(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn sup_abs(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }
}

/// Exponent `eps` of the logarithmic correction in the Hölder modulus.
pub fn holder_epsilon(beta: f64) -> Result<f64> {
    if beta >= 1.0 && beta < 2.0 {
        Ok(0.0)
    } else if beta > 0.0 && beta < 1.0 {
        Ok(0.5)
    } else {
        Err(Error::param("beta", format!("{beta} not in (0, 2)")))
    }
}

/// `sup_{s<t} |G(t) - G(s)| / ((t-s)^(1-1/a) |log(t-s)|^(1/a+eps))` over grid
/// pairs with `t - s < 1/e`.
pub fn holder_modulus(path: &GammaPath, alpha: f64, epsilon: f64) -> Result<f64> {
    if !(alpha > 1.0 && alpha <= 2.0) {
        return Err(Error::param("alpha", format!("{alpha} not in (1, 2]")));
    }
    if !(epsilon >= 0.0) {
        return Err(Error::param("epsilon", "must be nonnegative"));
    }
    let v = path.values();
    let h = path.step();
    let max_lag = (v.len() - 1).min(((-1.0f64).exp() / h).ceil() as usize);
    let weights: Vec<f64> = (1..=max_lag)
        .map(|d| {
            let tau = d as f64 * h;
            if tau >= (-1.0f64).exp() {
                0.0
            } else {
                1.0 / (tau.powf(1.0 - 1.0 / alpha) * (-tau.ln()).powf(1.0 / alpha + epsilon))
            }
        })
        .collect();
    if weights.iter().all(|w| *w == 0.0) {
        return Err(Error::DegenerateSample("no pair with t - s < 1/e".into()));
    }
    let mut sup: f64 = 0.0;
    for (d, w) in (1..=max_lag).zip(&weights) {
        if *w == 0.0 {
            continue;
        }
        let m = v
            .iter()
            .zip(&v[d..])
            .map(|(a, b)| (b - a).abs())
            .fold(0.0, f64::max);
        sup = sup.max(m * w);
    }
    Ok(sup)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailRow {
    pub u: f64,
    pub exceed_one_sided: usize,
    pub exceed_two_sided: usize,
    /// `u^b P(sup G >= u)`.
    pub scaled_one_sided: f64,
    pub scaled_one_sided_se: f64,
    /// `u^b P(sup |G| >= u)`.
    pub scaled_two_sided: f64,
    pub scaled_two_sided_se: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailReport {
    pub beta: f64,
    pub nu: f64,
    pub horizon: f64,
    pub replicas: usize,
    pub grid: Grid,
    pub copies: usize,
    /// Monte Carlo estimate of `E int L_T^b dx` and its standard error.
    pub moment: f64,
    pub moment_se: f64,
    /// `C_b sigma^b (1+nu)/2 E int L_T^b dx`.
    pub constant_one_sided: f64,
    /// `C_b sigma^b E int L_T^b dx`.
    pub constant_two_sided: f64,
    pub constant_two_sided_se: f64,
    pub rows: Vec<TailRow>,
    #[serde(skip)]
    pub sup: Vec<f64>,
    #[serde(skip)]
    pub sup_abs: Vec<f64>,
}

impl TailReport {
    /// Exceedance rows at each level of `u_grid`.
    pub fn tail_rows(&self, u_grid: &[f64]) -> Vec<TailRow> {
        let nf = self.sup.len() as f64;
        u_grid
            .iter()
            .map(|&u| {
                let one = self.sup.iter().filter(|&&s| s >= u).count();
                let two = self.sup_abs.iter().filter(|&&s| s >= u).count();
                let scale = u.powf(self.beta);
                let (p1, p2) = (one as f64 / nf, two as f64 / nf);
                TailRow {
                    u,
                    exceed_one_sided: one,
                    exceed_two_sided: two,
                    scaled_one_sided: scale * p1,
                    scaled_one_sided_se: scale * (p1 * (1.0 - p1) / nf).sqrt(),
                    scaled_two_sided: scale * p2,
                    scaled_two_sided_se: scale * (p2 * (1.0 - p2) / nf).sqrt(),
                }
            })
            .collect()
    }

    /// Replaces the rows with those for `u_grid`.
    pub fn with_rows(mut self, u_grid: &[f64]) -> Self {
        self.rows = self.tail_rows(u_grid);
        self
    }

    /// Row with the largest `u` whose two-sided exceedance count is at least `min_count`.
    pub fn largest_resolvable(&self, min_count: usize) -> Option<&TailRow> {
        self.rows
            .iter()
            .filter(|r| r.exceed_two_sided >= min_count)
            .max_by(|a, b| a.u.total_cmp(&b.u))
    }
}

/// Supremum tails of `Gamma_m` over `[0, horizon]` against the asymptotic constants.
pub fn sup_tail_check(
    config: &LimitConfig,
    horizon: f64,
    u_grid: &[f64],
    replicas: usize,
    moment_reps: usize,
) -> Result<TailReport> {
    let beta = config.beta();
    if !(beta > 0.0 && beta < 2.0) {
        return Err(Error::param("beta", format!("{beta} not in (0, 2)")));
    }
    if replicas == 0 {
        return Err(Error::param("replicas", "must be positive"));
    }
    let grid = config.grid(horizon)?;
    let (sup, sup_abs): (Vec<f64>, Vec<f64>) = (0..replicas as u64)
        .into_par_iter()
        .map(|r| config.sample_gamma(horizon, r).map(|p| (p.sup(), p.sup_abs())))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .unzip();
    let (moment, moment_se) = config.local_time_power_moment(horizon, moment_reps)?;
    let c = c_beta_closed_form(beta)? * config.scenery.scale().powf(beta);
    Ok(TailReport {
        beta,
        nu: config.scenery.skewness(),
        horizon,
        replicas,
        grid,
        copies: config.copies,
        moment,
        moment_se,
        constant_one_sided: c * (1.0 + config.scenery.skewness()) / 2.0 * moment,
        constant_two_sided: c * moment,
        constant_two_sided_se: c * moment_se,
        rows: Vec::new(),
        sup,
        sup_abs,
    }
    .with_rows(u_grid))
}
