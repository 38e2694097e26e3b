//! Estimators and summaries used by the experiments.

use num_complex::Complex64;
use rand::RngCore;
use serde::Serialize;

use crate::error::{Error, Result};

/// Neumaier compensated summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for NeumaierSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = Self::new();
        for x in iter {
            s.add(x);
        }
        s
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ComplexSum {
    re: NeumaierSum,
    im: NeumaierSum,
}

impl ComplexSum {
    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

pub fn compensated_sum(xs: &[f64]) -> f64 {
    xs.iter().copied().collect::<NeumaierSum>().value()
}

pub fn mean(xs: &[f64]) -> f64 {
    compensated_sum(xs) / xs.len() as f64
}

/// Unbiased sample variance.
pub fn variance(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    xs.iter()
        .map(|x| (x - m) * (x - m))
        .collect::<NeumaierSum>()
        .value()
        / (xs.len() - 1) as f64
}

pub fn std_error(xs: &[f64]) -> f64 {
    (variance(xs) / xs.len() as f64).sqrt()
}

/// Linear-interpolation quantile of an already sorted slice.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let h = p.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    quantile_sorted(&v, 0.5)
}

/// A named collection of scalar Monte Carlo outputs.
#[derive(Debug, Clone, Default, Serialize)]
pub struct SampleSet {
    pub label: String,
    pub values: Vec<f64>,
}

impl SampleSet {
    pub fn new(label: impl Into<String>, values: Vec<f64>) -> Self {
        Self {
            label: label.into(),
            values,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn mean(&self) -> f64 {
        mean(&self.values)
    }

    pub fn std_error(&self) -> f64 {
        std_error(&self.values)
    }

    pub fn median(&self) -> f64 {
        median(&self.values)
    }

    pub fn sorted(&self) -> Vec<f64> {
        let mut v = self.values.clone();
        v.sort_by(f64::total_cmp);
        v
    }
}

/// Hill estimate of the tail index from the `k` largest values.
///
/// All samples must be positive; pass `|x|` or the positive part.
pub fn hill_estimator(samples: &[f64], k: usize) -> Result<f64> {
    if samples.iter().any(|x| !(*x > 0.0 && x.is_finite())) {
        return Err(Error::param("samples", "Hill estimator needs positive finite samples"));
    }
    if k < 2 || k >= samples.len() {
        return Err(Error::param(
            "k",
            format!("need 2 <= k < {}, got {k}", samples.len()),
        ));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let anchor = sorted[k].ln();
    let h = sorted[..k]
        .iter()
        .map(|x| x.ln() - anchor)
        .collect::<NeumaierSum>()
        .value()
        / k as f64;
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::DegenerateSample(
            "top order statistics are tied".to_string(),
        ));
    }
    Ok(1.0 / h)
}

/// Default Hill threshold `ceil(n^0.6)`.
pub fn hill_default_k(n: usize) -> usize {
    ((n as f64).powf(0.6).ceil() as usize).min(n.saturating_sub(1)).max(2)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Slope {
    pub slope: f64,
    pub intercept: f64,
    pub std_error: f64,
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> Result<Slope> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::param("points", "need at least two (x, y) pairs"));
    }
    if xs.iter().chain(ys).any(|v| !(*v > 0.0 && v.is_finite())) {
        return Err(Error::param("points", "log-log fit needs positive finite values"));
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let (mx, my) = (mean(&lx), mean(&ly));
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::DegenerateSample("all abscissae equal".to_string()));
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let n = lx.len();
    let std_error = if n > 2 {
        let rss: f64 = lx
            .iter()
            .zip(&ly)
            .map(|(x, y)| (y - intercept - slope * x).powi(2))
            .sum();
        (rss / (n - 2) as f64 / sxx).sqrt()
    } else {
        0.0
    };
    Ok(Slope {
        slope,
        intercept,
        std_error,
    })
}

/// A complex mean with standard errors of its real and imaginary parts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CfEstimate {
    pub re: f64,
    pub im: f64,
    pub se_re: f64,
    pub se_im: f64,
}

impl CfEstimate {
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }

    /// Standard error of the complex estimate, `sqrt(se_re^2 + se_im^2)`.
    pub fn std_error(&self) -> f64 {
        self.se_re.hypot(self.se_im)
    }

    pub fn from_samples(zs: &[Complex64]) -> Self {
        let re: Vec<f64> = zs.iter().map(|z| z.re).collect();
        let im: Vec<f64> = zs.iter().map(|z| z.im).collect();
        Self {
            re: mean(&re),
            im: mean(&im),
            se_re: std_error(&re),
            se_im: std_error(&im),
        }
    }
}

/// `n^-1 sum exp(i u x_j)` with its standard error.
pub fn empirical_cf(samples: &[f64], u: f64) -> Result<CfEstimate> {
    if samples.is_empty() {
        return Err(Error::param("samples", "empty sample"));
    }
    let zs: Vec<Complex64> = samples
        .iter()
        .map(|&x| Complex64::new(0.0, u * x).exp())
        .collect();
    Ok(CfEstimate::from_samples(&zs))
}

/// Kolmogorov distribution tail `Q(l) = 2 sum_{k>=1} (-1)^(k-1) exp(-2 k^2 l^2)`.
pub fn kolmogorov_q(lambda: f64) -> f64 {
    if lambda < 0.2 {
        return 1.0;
    }
    let mut total = 0.0;
    for k in 1..=100 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * lambda * lambda).exp();
        total += if k % 2 == 1 { term } else { -term };
        if term < 1e-17 {
            break;
        }
    }
    (2.0 * total).clamp(0.0, 1.0)
}

/// Asymptotic two-sample critical value `c(a) sqrt((n+m)/(nm))`, `c(a) = sqrt(-ln(a/2)/2)`.
pub fn ks_critical_value(n: usize, m: usize, level: f64) -> f64 {
    let c = (-(level / 2.0).ln() / 2.0).sqrt();
    c * ((n + m) as f64 / (n as f64 * m as f64)).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KsResult {
    pub statistic: f64,
    pub p_value: f64,
    pub n: usize,
    pub m: usize,
    pub critical_1pct: f64,
}

/// Two-sample Kolmogorov-Smirnov statistic with the asymptotic p-value.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<KsResult> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::param("samples", "both samples must be nonempty"));
    }
    if a.iter().chain(b).any(|x| x.is_nan()) {
        return Err(Error::param("samples", "NaN in sample"));
    }
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    x.sort_by(f64::total_cmp);
    y.sort_by(f64::total_cmp);
    let (n, m) = (x.len(), y.len());
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < n && j < m {
        let v = x[i].min(y[j]);
        while i < n && x[i] <= v {
            i += 1;
        }
        while j < m && y[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / n as f64 - j as f64 / m as f64).abs());
    }
    let en = (n as f64 * m as f64 / (n + m) as f64).sqrt();
    Ok(KsResult {
        statistic: d,
        p_value: kolmogorov_q((en + 0.12 + 0.11 / en) * d),
        n,
        m,
        critical_1pct: ks_critical_value(n, m, 0.01),
    })
}

/// Bootstrap standard error of `stat` over `resamples` resamples with replacement.
pub fn bootstrap_se<T: Copy, R: RngCore + ?Sized>(
    samples: &[T],
    stat: impl Fn(&[T]) -> f64,
    resamples: usize,
    rng: &mut R,
) -> Result<f64> {
    if samples.is_empty() || resamples < 2 {
        return Err(Error::param("bootstrap", "need samples and at least two resamples"));
    }
    let n = samples.len() as u64;
    let mut buf = Vec::with_capacity(samples.len());
    let stats: Vec<f64> = (0..resamples)
        .map(|_| {
            buf.clear();
            buf.extend((0..n).map(|_| samples[(rng.next_u64() % n) as usize]));
            stat(&buf)
        })
        .collect();
    Ok(variance(&stats).sqrt())
}
