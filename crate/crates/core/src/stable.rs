//! Stable laws, walk increment laws and scenery laws.
//!
//! Stable laws use the characteristic function
//! `exp(-sigma^b |u|^b (1 - i nu tan(pi b / 2) sgn u))`, so at `b = 2` the
//! law is Gaussian with variance `2 sigma^2`.

use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::Arc;

use num_complex::Complex64;
use rand::RngCore;
use rand_distr::weighted::WeightedAliasIndex;
use rand_distr::Distribution;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rng::open_unit;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StableLaw {
    index: f64,
    scale: f64,
    skewness: f64,
}

impl StableLaw {
    /// Builds `S(index, scale, skewness)`. Index 1 is only available in the
    /// symmetric case.
    pub fn new(index: f64, scale: f64, skewness: f64) -> Result<Self> {
        if !(index > 0.0 && index <= 2.0) {
            return Err(Error::param("index", format!("{index} not in (0, 2]")));
        }
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::param("scale", format!("{scale} must be positive and finite")));
        }
        if !(-1.0..=1.0).contains(&skewness) {
            return Err(Error::param("skewness", format!("{skewness} not in [-1, 1]")));
        }
        if index == 1.0 && skewness != 0.0 {
            return Err(Error::Unsupported(
                "index 1 with nonzero skewness".to_string(),
            ));
        }
        // Skewness has no effect at index 2.
        let skewness = if index == 2.0 { 0.0 } else { skewness };
        Ok(Self {
            index,
            scale,
            skewness,
        })
    }

    pub fn symmetric(index: f64, scale: f64) -> Result<Self> {
        Self::new(index, scale, 0.0)
    }

    pub fn index(&self) -> f64 {
        self.index
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn skewness(&self) -> f64 {
        self.skewness
    }

    /// Same law with a different scale.
    pub fn with_scale(&self, scale: f64) -> Result<Self> {
        Self::new(self.index, scale, self.skewness)
    }

    /// `tan(pi b / 2)` times the skewness, zero when the law is symmetric.
    fn skew_factor(&self) -> f64 {
        if self.skewness == 0.0 {
            0.0
        } else {
            self.skewness * (FRAC_PI_2 * self.index).tan()
        }
    }

    /// The exponent `psi(u)` with `E exp(iuX) = exp(-psi(u))`.
    pub fn cf_exponent(&self, u: f64) -> Complex64 {
        if u == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let mag = (self.scale * u.abs()).powf(self.index);
        Complex64::new(mag, -mag * self.skew_factor() * u.signum())
    }

    pub fn cf(&self, u: f64) -> Complex64 {
        (-self.cf_exponent(u)).exp()
    }

    pub fn sample<R: RngCore + ?Sized>(&self, rng: &mut R) -> f64 {
        if self.index == 2.0 {
            let (z, _) = gaussian_pair(rng);
            return self.scale * std::f64::consts::SQRT_2 * z;
        }
        let v = PI * (open_unit(rng) - 0.5);
        let w = -open_unit(rng).ln();
        self.scale * self.standard_cms(v, w)
    }

    fn standard_cms(&self, v: f64, w: f64) -> f64 {
        let a = self.index;
        if a == 1.0 {
            return v.tan();
        }
        let zeta = self.skew_factor();
        let b = zeta.atan() / a;
        let s = (1.0 + zeta * zeta).powf(0.5 / a);
        let t = a * (v + b);
        s * t.sin() / v.cos().powf(1.0 / a) * ((v - t).cos() / w).powf((1.0 - a) / a)
    }

    /// Fills `out` with independent draws. At index 2 both Box-Muller outputs
    /// are used, so the stream differs from repeated calls to [`sample`].
    ///
    /// [`sample`]: StableLaw::sample
    pub fn sample_into<R: RngCore + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        if self.index == 2.0 {
            let s = self.scale * std::f64::consts::SQRT_2;
            let mut chunks = out.chunks_exact_mut(2);
            for pair in &mut chunks {
                let (a, b) = gaussian_pair(rng);
                pair[0] = s * a;
                pair[1] = s * b;
            }
            if let [last] = chunks.into_remainder() {
                *last = s * gaussian_pair(rng).0;
            }
        } else {
            for x in out.iter_mut() {
                *x = self.sample(rng);
            }
        }
    }
}

impl Distribution<f64> for StableLaw {
    fn sample<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        StableLaw::sample(self, rng)
    }
}

pub fn stable_cf(law: &StableLaw, u: f64) -> Complex64 {
    law.cf(u)
}

pub fn sample_stable<R: RngCore + ?Sized>(law: &StableLaw, rng: &mut R) -> f64 {
    law.sample(rng)
}

fn gaussian_pair<R: RngCore + ?Sized>(rng: &mut R) -> (f64, f64) {
    let r = (-2.0 * open_unit(rng).ln()).sqrt();
    let (s, c) = (2.0 * PI * open_unit(rng)).sin_cos();
    (r * c, r * s)
}

/// Converts one-sided tail constants `P(X > x) ~ upper x^-b`,
/// `P(X < -x) ~ lower x^-b` into the stable law of the normalized sums.
pub fn stable_from_tails(index: f64, upper: f64, lower: f64) -> Result<StableLaw> {
    let total = upper + lower;
    if !(upper >= 0.0 && lower >= 0.0 && total > 0.0) {
        return Err(Error::param("tail constants", "must be nonnegative with a positive sum"));
    }
    let scale = (total / c_beta_closed_form(index)?).powf(1.0 / index);
    StableLaw::new(index, scale, (upper - lower) / total)
}

// ---------------------------------------------------------------------------
// Tail constant

/// `C_b = (int_0^inf x^-b sin x dx)^-1`, computed by quadrature.
///
/// The first half-period is integrated term by term from the sine series; the
/// remaining half-periods form an alternating series summed with
/// Cohen-Villegas-Zagier acceleration, each term by Gauss-Legendre.
pub fn c_beta(beta: f64) -> Result<f64> {
    check_tail_index(beta)?;
    let mut head = 0.0;
    let mut fact = 1.0; // (2k+1)!
    for k in 0..60 {
        let kk = k as f64;
        if k > 0 {
            fact *= (2.0 * kk) * (2.0 * kk + 1.0);
        }
        let p = 2.0 * kk + 2.0 - beta;
        let term = PI.powf(p) / (fact * p);
        head += if k % 2 == 0 { term } else { -term };
        if term < 1e-18 * head.abs() {
            break;
        }
    }
    let (nodes, weights) = gauss_legendre(24);
    let half_period = |j: usize| -> f64 {
        // int_0^pi (x + (j+1) pi)^-b sin x dx
        let shift = (j as f64 + 1.0) * PI;
        nodes
            .iter()
            .zip(&weights)
            .map(|(&t, &w)| {
                let x = FRAC_PI_2 * (t + 1.0);
                w * (x + shift).powf(-beta) * x.sin()
            })
            .sum::<f64>()
            * FRAC_PI_2
    };
    let tail = -cvz_alternating(half_period, 40);
    Ok(1.0 / (head + tail))
}

/// Closed form `(1 - b) / (Gamma(2 - b) cos(pi b / 2))`, with `C_1 = 2 / pi`.
pub fn c_beta_closed_form(beta: f64) -> Result<f64> {
    check_tail_index(beta)?;
    if beta == 1.0 {
        return Ok(2.0 / PI);
    }
    Ok((1.0 - beta) / (libm::tgamma(2.0 - beta) * (FRAC_PI_2 * beta).cos()))
}

fn check_tail_index(beta: f64) -> Result<()> {
    if beta > 0.0 && beta < 2.0 {
        Ok(())
    } else {
        Err(Error::param("beta", format!("{beta} not in (0, 2)")))
    }
}

/// `sum_{k>=0} (-1)^k a_k` for a totally monotone sequence.
fn cvz_alternating(a: impl Fn(usize) -> f64, n: usize) -> f64 {
    let mut d = (3.0 + 8f64.sqrt()).powi(n as i32);
    d = (d + 1.0 / d) / 2.0;
    let mut b = -1.0;
    let mut c = -d;
    let mut s = 0.0;
    for k in 0..n {
        c = b - c;
        s += c * a(k);
        let (kf, nf) = (k as f64, n as f64);
        b = (kf + nf) * (kf - nf) * b / ((kf + 0.5) * (kf + 1.0));
    }
    s / d
}

/// Gauss-Legendre nodes and weights on [-1, 1].
fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = nf * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

// ---------------------------------------------------------------------------
// Riemann zeta on (1, inf)

const BERNOULLI_OVER_FACT: [f64; 6] = [
    1.0 / 12.0,          // B2 / 2!
    -1.0 / 720.0,        // B4 / 4!
    1.0 / 30240.0,       // B6 / 6!
    -1.0 / 1209600.0,    // B8 / 8!
    1.0 / 47900160.0,    // B10 / 10!
    -691.0 / 1307674368000.0, // B12 / 12!
];

/// `sum_{k >= n} k^-s` by Euler-Maclaurin, accurate for `n >= 16`.
fn zeta_tail(s: f64, n: f64) -> f64 {
    let mut total = n.powf(1.0 - s) / (s - 1.0) + 0.5 * n.powf(-s);
    let mut rising = s; // s (s+1) ... (s + 2j - 2)
    let mut npow = n.powf(-s - 1.0);
    for (j, c) in BERNOULLI_OVER_FACT.iter().enumerate() {
        total += c * rising * npow;
        let jf = j as f64;
        rising *= (s + 2.0 * jf + 1.0) * (s + 2.0 * jf + 2.0);
        npow /= n * n;
    }
    total
}

/// Riemann zeta function for real `s > 1`.
pub fn zeta(s: f64) -> Result<f64> {
    if !(s > 1.0 && s.is_finite()) {
        return Err(Error::param("s", format!("{s} must exceed 1")));
    }
    const N: u32 = 32;
    let head: f64 = (1..N).rev().map(|k| (k as f64).powf(-s)).sum();
    Ok(head + zeta_tail(s, N as f64))
}

// ---------------------------------------------------------------------------
// Walk increment laws

const BODY: usize = 1 << 16;
const MAX_MAGNITUDE: f64 = (1u64 << 62) as f64;

/// Symmetric discrete Pareto law `P(X = +-k) = k^(-a-1) / (2 zeta(a+1))`, `k >= 1`.
///
/// Magnitudes up to 2^16 come from an alias table; the remaining tail is
/// drawn exactly by rejection from a continuous Pareto proposal.
#[derive(Debug)]
pub struct DiscretePareto {
    index: f64,
    zeta: f64,
    alias: WeightedAliasIndex<f64>,
    accept_bound: f64,
}

impl DiscretePareto {
    pub fn new(index: f64) -> Result<Self> {
        if !(index > 0.0 && index < 2.0) {
            return Err(Error::param("alpha", format!("{index} not in (0, 2)")));
        }
        let s = index + 1.0;
        let mut weights: Vec<f64> = (1..=BODY).map(|k| (k as f64).powf(-s)).collect();
        let body: f64 = weights.iter().rev().sum();
        let tail = zeta_tail(s, (BODY + 1) as f64);
        weights.push(tail);
        let alias = WeightedAliasIndex::new(weights)
            .map_err(|e| Error::param("alpha", format!("alias table: {e}")))?;
        let k0 = (BODY + 1) as f64;
        Ok(Self {
            index,
            zeta: body + tail,
            alias,
            accept_bound: (1.0 + 1.0 / k0).powf(s) / index,
        })
    }

    pub fn index(&self) -> f64 {
        self.index
    }

    /// `zeta(alpha + 1)`.
    pub fn zeta(&self) -> f64 {
        self.zeta
    }

    pub fn pmf(&self, k: i64) -> f64 {
        if k == 0 {
            0.0
        } else {
            (k.unsigned_abs() as f64).powf(-self.index - 1.0) / (2.0 * self.zeta)
        }
    }

    /// `P(|X| > k)` for `k >= 0`.
    pub fn tail_prob(&self, k: u64) -> f64 {
        let s = self.index + 1.0;
        let upper = if k < 64 {
            self.zeta - (1..=k).map(|j| (j as f64).powf(-s)).sum::<f64>()
        } else {
            zeta_tail(s, (k + 1) as f64)
        };
        (upper / self.zeta).clamp(0.0, 1.0)
    }

    fn sample_magnitude<R: RngCore + ?Sized>(&self, rng: &mut R) -> u64 {
        let i = self.alias.sample(&mut RngAdapter(rng));
        if i < BODY {
            return i as u64 + 1;
        }
        let k0 = (BODY + 1) as f64;
        loop {
            let y = k0 * open_unit(rng).powf(-1.0 / self.index);
            if y >= MAX_MAGNITUDE {
                return MAX_MAGNITUDE as u64;
            }
            let k = y.floor();
            // k^(-a-1) / (k^-a - (k+1)^-a), the pmf over the proposal mass of [k, k+1).
            let ratio = 1.0 / (k * -(-self.index * (1.0 / k).ln_1p()).exp_m1());
            if open_unit(rng) * self.accept_bound <= ratio {
                return k as u64;
            }
        }
    }

    pub fn sample<R: RngCore + ?Sized>(&self, rng: &mut R) -> i64 {
        let mag = self.sample_magnitude(rng) as i64;
        if rng.next_u32() & 1 == 0 {
            mag
        } else {
            -mag
        }
    }

    /// Stable law of `n^(-1/a) S_n`.
    pub fn limit_law(&self) -> Result<StableLaw> {
        let each_side = 1.0 / (2.0 * self.zeta * self.index);
        stable_from_tails(self.index, each_side, each_side)
    }
}

/// Lets `Distribution::sample` accept an unsized `RngCore`.
struct RngAdapter<'a, R: RngCore + ?Sized>(&'a mut R);

impl<R: RngCore + ?Sized> RngCore for RngAdapter<'_, R> {
    fn next_u32(&mut self) -> u32 {
        self.0.next_u32()
    }
    fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }
    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.0.fill_bytes(dst)
    }
}

#[derive(Debug, Clone)]
pub enum WalkIncrementLaw {
    /// `+-1` with probability 1/2 each.
    SimpleSymmetric,
    DiscretePareto(Arc<DiscretePareto>),
}

impl WalkIncrementLaw {
    pub fn discrete_pareto(alpha: f64) -> Result<Self> {
        Ok(Self::DiscretePareto(Arc::new(DiscretePareto::new(alpha)?)))
    }

    /// Simple symmetric walk at `alpha = 2`, discrete Pareto below.
    pub fn for_index(alpha: f64) -> Result<Self> {
        if alpha == 2.0 {
            Ok(Self::SimpleSymmetric)
        } else if alpha > 1.0 && alpha < 2.0 {
            Self::discrete_pareto(alpha)
        } else {
            Err(Error::param("alpha", format!("{alpha} not in (1, 2]")))
        }
    }

    pub fn index(&self) -> f64 {
        match self {
            Self::SimpleSymmetric => 2.0,
            Self::DiscretePareto(p) => p.index(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::SimpleSymmetric => "simple-symmetric",
            Self::DiscretePareto(_) => "discrete-pareto",
        }
    }

    pub fn pmf(&self, k: i64) -> f64 {
        match self {
            Self::SimpleSymmetric => {
                if k.abs() == 1 {
                    0.5
                } else {
                    0.0
                }
            }
            Self::DiscretePareto(p) => p.pmf(k),
        }
    }

    pub fn sample<R: RngCore + ?Sized>(&self, rng: &mut R) -> i64 {
        match self {
            Self::SimpleSymmetric => {
                if rng.next_u32() & 1 == 0 {
                    1
                } else {
                    -1
                }
            }
            Self::DiscretePareto(p) => p.sample(rng),
        }
    }

    /// Stable law `Z_a` with `n^(-1/a) S_n -> Z_a`.
    pub fn limit_law(&self) -> Result<StableLaw> {
        match self {
            Self::SimpleSymmetric => StableLaw::symmetric(2.0, std::f64::consts::FRAC_1_SQRT_2),
            Self::DiscretePareto(p) => p.limit_law(),
        }
    }
}

pub fn sample_walk_increment<R: RngCore + ?Sized>(law: &WalkIncrementLaw, rng: &mut R) -> i64 {
    law.sample(rng)
}

// ---------------------------------------------------------------------------
// Scenery laws

/// Two-sided Pareto law with `P(xi > x) = upper x^-b`, `P(xi < -x) = lower x^-b`
/// beyond the threshold `u0 = (upper + lower)^(1/b)`, minus the constant
/// `u0 b/(b-1) (upper-lower)/(upper+lower)`.
///
/// For `b > 1` the constant is the mean. For `b < 1` it is the drift of the
/// stable Lévy measure below `u0`, which removes the `n^(1-1/b)` bias of
/// normalized sums without changing their limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoSidedPareto {
    index: f64,
    upper: f64,
    lower: f64,
    threshold: f64,
    shift: f64,
}

impl TwoSidedPareto {
    pub fn new(index: f64, upper: f64, lower: f64) -> Result<Self> {
        check_tail_index(index)?;
        let total = upper + lower;
        if !(upper >= 0.0 && lower >= 0.0 && total > 0.0 && total.is_finite()) {
            return Err(Error::param("tail constants", "must be nonnegative with a positive sum"));
        }
        if index == 1.0 && upper != lower {
            return Err(Error::Unsupported(
                "asymmetric Pareto scenery at index 1".to_string(),
            ));
        }
        let threshold = total.powf(1.0 / index);
        let shift = if index == 1.0 {
            0.0
        } else {
            (upper - lower) / total * threshold * index / (index - 1.0)
        };
        Ok(Self {
            index,
            upper,
            lower,
            threshold,
            shift,
        })
    }

    /// Pareto law whose normalized sums converge to `S(index, scale, skewness)`.
    pub fn with_limit(index: f64, scale: f64, skewness: f64) -> Result<Self> {
        let total = scale.powf(index) * c_beta_closed_form(index)?;
        Self::new(
            index,
            total * (1.0 + skewness) / 2.0,
            total * (1.0 - skewness) / 2.0,
        )
    }

    pub fn index(&self) -> f64 {
        self.index
    }

    pub fn sample<R: RngCore + ?Sized>(&self, rng: &mut R) -> f64 {
        let mag = self.threshold * open_unit(rng).powf(-1.0 / self.index);
        let up = open_unit(rng) * (self.upper + self.lower) < self.upper;
        (if up { mag } else { -mag }) - self.shift
    }

    pub fn limit_law(&self) -> Result<StableLaw> {
        stable_from_tails(self.index, self.upper, self.lower)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SceneryLaw {
    ExactStable(StableLaw),
    TwoSidedPareto(TwoSidedPareto),
    /// Degenerate scenery, identically zero.
    Zero,
}

impl SceneryLaw {
    pub fn index(&self) -> Option<f64> {
        match self {
            Self::ExactStable(l) => Some(l.index()),
            Self::TwoSidedPareto(p) => Some(p.index()),
            Self::Zero => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::ExactStable(_) => "stable",
            Self::TwoSidedPareto(_) => "pareto",
            Self::Zero => "zero",
        }
    }

    pub fn sample<R: RngCore + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            Self::ExactStable(l) => l.sample(rng),
            Self::TwoSidedPareto(p) => p.sample(rng),
            Self::Zero => 0.0,
        }
    }

    /// Stable law `Z_b` with `n^(-1/b) sum xi -> Z_b`.
    pub fn limit_law(&self) -> Result<StableLaw> {
        match self {
            Self::ExactStable(l) => Ok(*l),
            Self::TwoSidedPareto(p) => p.limit_law(),
            Self::Zero => Err(Error::Unsupported("zero scenery has no stable limit".into())),
        }
    }
}

pub fn sample_scenery_value<R: RngCore + ?Sized>(law: &SceneryLaw, rng: &mut R) -> f64 {
    law.sample(rng)
}
