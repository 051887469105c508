//! Summation and Monte Carlo error estimation.

use rustfft::FftPlanner;

use crate::field::Complex;

/// Neumaier-compensated running sum.
#[derive(Clone, Copy, Debug, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

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

impl FromIterator<f64> for KahanSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = KahanSum::new();
        for x in iter {
            s.add(x);
        }
        s
    }
}

pub fn kahan_sum(xs: impl IntoIterator<Item = f64>) -> f64 {
    xs.into_iter().collect::<KahanSum>().value()
}

pub fn mean(xs: &[f64]) -> f64 {
    kahan_sum(xs.iter().copied()) / xs.len() as f64
}

/// Unbiased sample variance; zero for fewer than two points.
pub fn variance(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    kahan_sum(xs.iter().map(|x| (x - m) * (x - m))) / (xs.len() - 1) as f64
}

/// A Monte Carlo estimate with its standard error and effective sample size.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EstimateWithError {
    pub value: f64,
    pub std_error: f64,
    pub ess: f64,
    /// Fewer than [`MIN_ESS`] effective samples.
    pub low_ess: bool,
}

pub const MIN_ESS: f64 = 10.0;

impl EstimateWithError {
    /// Mean of independent draws.
    pub fn iid(xs: &[f64]) -> Self {
        let n = xs.len() as f64;
        let var = variance(xs);
        let ess = if var > 0.0 { n } else { 0.0 };
        Self { value: mean(xs), std_error: (var / n).sqrt(), ess, low_ess: ess < MIN_ESS }
    }

    /// Combined standard error of `self - other` for independent estimates.
    pub fn combined_se(&self, other: &Self) -> f64 {
        self.std_error.hypot(other.std_error)
    }
}

/// Normalized autocorrelation function up to lag `n - 1`, via zero-padded FFT.
pub fn autocorrelation(xs: &[f64]) -> Vec<f64> {
    let n = xs.len();
    if n == 0 {
        return Vec::new();
    }
    let m = mean(xs);
    let len = (2 * n).next_power_of_two();
    let mut buf: Vec<Complex> = xs.iter().map(|x| Complex::new(x - m, 0.0)).collect();
    buf.resize(len, Complex::new(0.0, 0.0));
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(len).process(&mut buf);
    for c in buf.iter_mut() {
        *c = Complex::new(c.norm_sqr(), 0.0);
    }
    planner.plan_fft_inverse(len).process(&mut buf);
    let c0 = buf[0].re;
    if c0 <= 0.0 {
        return vec![0.0; n];
    }
    buf[..n].iter().map(|c| c.re / c0).collect()
}

/// Integrated autocorrelation time `1 + 2 sum rho_t`, truncated by Geyer's
/// initial positive sequence.
pub fn integrated_autocorrelation_time(xs: &[f64]) -> f64 {
    let rho = autocorrelation(xs);
    let n = rho.len();
    let mut tau = -1.0;
    let mut t = 0;
    while t + 1 < n {
        let pair = rho[t] + rho[t + 1];
        if pair <= 0.0 {
            break;
        }
        tau += 2.0 * pair;
        t += 2;
    }
    tau.max(1.0 / n.max(1) as f64)
}

/// Mean of a correlated series, with ESS from the integrated autocorrelation
/// time and the standard error from non-overlapping batch means.
pub fn series_estimate(xs: &[f64]) -> EstimateWithError {
    let n = xs.len();
    let value = mean(xs);
    let var = variance(xs);
    if n < 2 || var <= 0.0 {
        return EstimateWithError { value, std_error: 0.0, ess: 0.0, low_ess: true };
    }
    let tau = integrated_autocorrelation_time(xs);
    let ess = (n as f64 / tau).min(n as f64);
    let batches = ((n as f64).sqrt() as usize).clamp(2, n);
    let size = n / batches;
    let means: Vec<f64> = (0..batches).map(|b| mean(&xs[b * size..(b + 1) * size])).collect();
    let std_error = (variance(&means) / batches as f64).sqrt();
    EstimateWithError { value, std_error, ess, low_ess: ess < MIN_ESS }
}

/// Least-squares slope of `y` against `x`.
pub fn ls_slope(x: &[f64], y: &[f64]) -> f64 {
    let mx = mean(x);
    let my = mean(y);
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}
