//! Random walk in random scenery and the random rewards schema.
//!
//! `Z_s = sum_{k <= s} xi_{S_k}` with linear interpolation between integer
//! times, `D_n(t) = n^-delta Z_(nt)` and
//! `G_n(t) = c^(-1/b) sum_{i < c} D_n^(i)(t)` over independent copies.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rng::{stream_rng, Stream};
use crate::scenery::Scenery;
use crate::stable::{SceneryLaw, StableLaw, TwoSidedPareto, WalkIncrementLaw};
use crate::stats::NeumaierSum;
use crate::walk::{generate_walk, split_time, Provenance, SiteIndex, WalkPath};

/// `Z_0, ..., Z_n` for one (walk, scenery) pair.
#[derive(Debug, Clone, PartialEq)]
pub struct RwrsPath {
    values: Vec<f64>,
}

impl RwrsPath {
    /// Path sums along the walk. Scenery values are fetched through the cache.
    pub fn build(walk: &WalkPath, scenery: &mut Scenery) -> Self {
        let mut acc = 0.0;
        let values = walk
            .positions()
            .iter()
            .map(|&x| {
                acc += scenery.scenery_at(x);
                acc
            })
            .collect();
        Self { values }
    }

    /// Same values as [`RwrsPath::build`], fetching each distinct site once.
    pub fn build_indexed(walk: &WalkPath, index: &SiteIndex, scenery: &Scenery) -> Self {
        let xi: Vec<f64> = index.sites.iter().map(|&x| scenery.value_at(x)).collect();
        let mut acc = 0.0;
        let values = index
            .slots
            .iter()
            .map(|&s| {
                acc += xi[s as usize];
                acc
            })
            .collect();
        debug_assert_eq!(index.slots.len(), walk.positions().len());
        Self { values }
    }

    pub fn horizon(&self) -> usize {
        self.values.len() - 1
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `Z_s`. The interpolation weight multiplies `Z_(m+1) - Z_m = xi_(S_(m+1))`.
    pub fn value(&self, s: f64) -> Result<f64> {
        let (m, f) = split_time(s, self.horizon())?;
        if f == 0.0 {
            Ok(self.values[m])
        } else {
            Ok(self.values[m] + f * (self.values[m + 1] - self.values[m]))
        }
    }
}

pub fn rwrs_value(walk: &WalkPath, scenery: &mut Scenery, s: f64) -> Result<f64> {
    let (m, f) = split_time(s, walk.horizon())?;
    let p = walk.positions();
    let mut acc = NeumaierSum::new();
    for &x in &p[..=m] {
        acc.add(scenery.scenery_at(x));
    }
    if f > 0.0 {
        acc.add(f * scenery.scenery_at(p[m + 1]));
    }
    Ok(acc.value())
}

/// `sum_x N_m(x) xi_x`.
pub fn local_time_sum(walk: &WalkPath, scenery: &mut Scenery, m: usize) -> Result<f64> {
    let field = walk.local_time_field(m)?;
    let mut acc = NeumaierSum::new();
    for (x, n) in field.iter() {
        acc.add(n as f64 * scenery.scenery_at(x));
    }
    Ok(acc.value())
}

fn check_indices(alpha: f64, beta: f64) -> Result<()> {
    if !(alpha > 1.0 && alpha <= 2.0) {
        return Err(Error::param("alpha", format!("{alpha} not in (1, 2]")));
    }
    if !(beta > 0.0 && beta <= 2.0) {
        return Err(Error::param("beta", format!("{beta} not in (0, 2]")));
    }
    Ok(())
}

/// `delta = 1 - 1/a + 1/(a b)`.
pub fn delta_exponent(alpha: f64, beta: f64) -> Result<f64> {
    check_indices(alpha, beta)?;
    Ok(1.0 - 1.0 / alpha + 1.0 / (alpha * beta))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FeasibleBranch {
    /// `b < 1`: `H in [(b+1)/(2b), 1/b)`.
    BelowOne,
    /// `b = 1`: `H = 1`.
    One,
    /// `1 < b <= 2`: `H in (1/b, (b+1)/(2b)]`.
    AboveOne,
}

impl FeasibleBranch {
    pub fn label(&self) -> &'static str {
        match self {
            Self::BelowOne => "below-one",
            Self::One => "one",
            Self::AboveOne => "above-one",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Feasibility {
    pub alpha: f64,
    pub beta: f64,
    pub h: f64,
    pub branch: FeasibleBranch,
    /// `(b+1)/(2b)`.
    pub midpoint: f64,
    /// `1/b`.
    pub reciprocal: f64,
}

/// Classifies `H = delta(a, b)` against the feasible self-similarity range.
///
/// The membership tests use the exact factorizations
/// `H - 1/b = (1 - 1/a)(1 - 1/b)` and `H - (b+1)/(2b) = (1 - 1/b)(1/2 - 1/a)`,
/// whose factor signs are exact in floating point.
pub fn feasible_pair(alpha: f64, beta: f64) -> Result<Feasibility> {
    let h = delta_exponent(alpha, beta)?;
    let to_reciprocal = (1.0 - 1.0 / alpha) * (1.0 - 1.0 / beta);
    let to_midpoint = (1.0 - 1.0 / beta) * (0.5 - 1.0 / alpha);
    let (branch, ok) = if beta < 1.0 {
        (FeasibleBranch::BelowOne, to_midpoint >= 0.0 && to_reciprocal < 0.0)
    } else if beta == 1.0 {
        (FeasibleBranch::One, to_reciprocal == 0.0)
    } else {
        (FeasibleBranch::AboveOne, to_reciprocal > 0.0 && to_midpoint <= 0.0)
    };
    if !ok {
        return Err(Error::Infeasible {
            h,
            beta,
            branch: branch.label(),
        });
    }
    Ok(Feasibility {
        alpha,
        beta,
        h: if beta == 1.0 { 1.0 } else { h },
        branch,
        midpoint: (beta + 1.0) / (2.0 * beta),
        reciprocal: 1.0 / beta,
    })
}

/// `D_n(t) = n^-delta Z_(nt)`.
pub fn rescaled_rwrs(path: &RwrsPath, n: usize, delta: f64, t: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::param("n", "must be positive"));
    }
    let nf = n as f64;
    if !(t >= 0.0 && t * nf <= path.horizon() as f64) {
        return Err(Error::TimeOutOfRange {
            time: t,
            horizon: path.horizon() as f64 / nf,
        });
    }
    Ok(nf.powf(-delta) * path.value(nf * t)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SceneryKind {
    /// Exactly stable scenery.
    Stable,
    /// Two-sided Pareto scenery in the domain of attraction of the same stable law.
    Pareto,
    /// Identically zero.
    Zero,
}

impl SceneryKind {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "stable" => Some(Self::Stable),
            "pareto" => Some(Self::Pareto),
            "zero" => Some(Self::Zero),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Stable => "stable",
            Self::Pareto => "pareto",
            Self::Zero => "zero",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SchemaConfig {
    pub alpha: f64,
    pub beta: f64,
    pub sigma: f64,
    pub nu: f64,
    pub scenery: SceneryKind,
    pub n: usize,
    pub copies: usize,
    pub times: Vec<f64>,
    pub replicas: usize,
    pub master_seed: u64,
}

/// Default copy count `ceil(sqrt(n))`.
pub fn default_copies(n: usize) -> usize {
    ((n as f64).sqrt().ceil() as usize).max(1)
}

impl SchemaConfig {
    pub fn new(alpha: f64, beta: f64, n: usize) -> Self {
        Self {
            alpha,
            beta,
            sigma: 1.0,
            nu: 0.0,
            scenery: SceneryKind::Stable,
            n,
            copies: default_copies(n),
            times: vec![1.0],
            replicas: 1000,
            master_seed: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        feasible_pair(self.alpha, self.beta)?;
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(Error::param("sigma", "must be positive and finite"));
        }
        if !(-1.0..=1.0).contains(&self.nu) {
            return Err(Error::param("nu", "must lie in [-1, 1]"));
        }
        if self.n == 0 {
            return Err(Error::param("n", "must be positive"));
        }
        if self.copies == 0 {
            return Err(Error::param("copies", "must be at least 1"));
        }
        if self.replicas == 0 {
            return Err(Error::param("replicas", "must be at least 1"));
        }
        if self.times.is_empty() {
            return Err(Error::param("times", "need at least one time"));
        }
        if self.times.iter().any(|t| !(*t >= 0.0 && t.is_finite())) {
            return Err(Error::param("times", "must be finite and nonnegative"));
        }
        if self.times.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::param("times", "must be sorted"));
        }
        Ok(())
    }

    pub fn delta(&self) -> Result<f64> {
        delta_exponent(self.alpha, self.beta)
    }

    /// Walk steps needed to reach the last time.
    pub fn steps(&self) -> usize {
        let t_max = self.times.last().copied().unwrap_or(0.0);
        (self.n as f64 * t_max).ceil() as usize
    }

    pub fn walk_law(&self) -> Result<WalkIncrementLaw> {
        WalkIncrementLaw::for_index(self.alpha)
    }

    /// Stable law `Z_b` the scenery sums converge to.
    pub fn scenery_limit(&self) -> Result<StableLaw> {
        StableLaw::new(self.beta, self.sigma, self.nu)
    }

    pub fn scenery_law(&self) -> Result<SceneryLaw> {
        match self.scenery {
            SceneryKind::Stable => Ok(SceneryLaw::ExactStable(self.scenery_limit()?)),
            SceneryKind::Pareto => Ok(SceneryLaw::TwoSidedPareto(TwoSidedPareto::with_limit(
                self.beta, self.sigma, self.nu,
            )?)),
            SceneryKind::Zero => Ok(SceneryLaw::Zero),
        }
    }
}

/// Prepared sampler for one schema configuration.
#[derive(Debug, Clone)]
pub struct SchemaSampler {
    config: SchemaConfig,
    walk_law: WalkIncrementLaw,
    scenery_law: SceneryLaw,
    delta: f64,
}

impl SchemaSampler {
    pub fn new(config: &SchemaConfig) -> Result<Self> {
        config.validate()?;
        Ok(Self {
            walk_law: config.walk_law()?,
            scenery_law: config.scenery_law()?,
            delta: config.delta()?,
            config: config.clone(),
        })
    }

    pub fn config(&self) -> &SchemaConfig {
        &self.config
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn walk(&self, replica: u64, copy: u64) -> Result<WalkPath> {
        let c = &self.config;
        let mut rng = stream_rng(c.master_seed, Stream::Walk, replica, copy);
        Ok(generate_walk(c.steps(), &self.walk_law, &mut rng)?.with_provenance(
            Provenance {
                master_seed: c.master_seed,
                replica,
                copy,
            },
        ))
    }

    pub fn scenery(&self, replica: u64, copy: u64) -> Scenery {
        Scenery::for_copy(self.scenery_law, self.config.master_seed, replica, copy)
    }

    /// `D_n^(copy)(t_j)` for every configured time.
    pub fn sample_copy(&self, replica: u64, copy: u64) -> Result<Vec<f64>> {
        let walk = self.walk(replica, copy)?;
        let index = walk.site_index();
        let path = RwrsPath::build_indexed(&walk, &index, &self.scenery(replica, copy));
        self.config
            .times
            .iter()
            .map(|&t| rescaled_rwrs(&path, self.config.n, self.delta, t))
            .collect()
    }

    /// `G_n(t_j)` for one replica; copies are summed in index order.
    pub fn sample(&self, replica: u64) -> Result<Vec<f64>> {
        let k = self.config.times.len();
        let mut sums = vec![NeumaierSum::new(); k];
        for copy in 0..self.config.copies as u64 {
            for (acc, d) in sums.iter_mut().zip(self.sample_copy(replica, copy)?) {
                acc.add(d);
            }
        }
        let norm = (self.config.copies as f64).powf(-1.0 / self.config.beta);
        Ok(sums.iter().map(|s| norm * s.value()).collect())
    }
}

/// `G_n(t_j)` for one replica of `config`.
pub fn sample_schema(config: &SchemaConfig, replica: u64) -> Result<Vec<f64>> {
    SchemaSampler::new(config)?.sample(replica)
}

/// The statistic `X_n = s^b n^(-delta b) sum_x |sum_j th_j N_(n t_j)(x)|^b (1 - i nu tan(pi b/2) sgn)`.
pub fn ks_functional(
    walk: &WalkPath,
    config: &SchemaConfig,
    theta: &[f64],
    times: &[f64],
) -> Result<Complex64> {
    if theta.len() != times.len() {
        return Err(Error::param("theta", "theta and times must have the same length"));
    }
    let delta = config.delta()?;
    let beta = config.beta;
    let nf = config.n as f64;
    let index = walk.site_index();
    let mut comb = vec![0.0f64; index.len()];
    for (&th, &t) in theta.iter().zip(times) {
        if th == 0.0 {
            continue;
        }
        let (m, f) = split_time(nf * t, walk.horizon())?;
        for &s in &index.slots[..=m] {
            comb[s as usize] += th;
        }
        if f > 0.0 {
            comb[index.slots[m + 1] as usize] += th * f;
        }
    }
    let skew = if config.nu == 0.0 || beta == 2.0 {
        0.0
    } else {
        config.nu * (std::f64::consts::FRAC_PI_2 * beta).tan()
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
    let scale = config.sigma.powf(beta) * nf.powf(-delta * beta);
    Ok(Complex64::new(scale * re.value(), scale * im.value()))
}
