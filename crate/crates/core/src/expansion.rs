//! Small-temperature expansion around the two wells.
//!
//! Around a well `w` the measure `e^{-V/eps} d mu_eps` is a Gaussian `mu_w`
//! times `theta_re(w) G(w, sqrt(eps) v)`. Expanding `G` in `t = sqrt(eps)`
//! and averaging the coefficients over `mu_w` gives the coefficients `a_j` of
//! the expansion of `I(eps) = int F e^{-V/eps} d mu_eps`.

use std::io::Write;

use rayon::prelude::*;

use crate::determinant::{theta_re, weights_b};
use crate::error::{invalid, Result};
use crate::field::{default_grid, sample_gaussian, ReferenceMeasure, RngStream, SpectralField, Transform, Well};
use crate::fmt_f64;
use crate::observable::{wick_integrals, Observable};
use crate::renorm::{d_limit, h3_h4, wick_constants, wick_powers, WickConstants};
use crate::sampler::{
    langevin_chain, nearest_well, pooled_chain_estimate, reweight_samples, ChainConfig, ChainInit, Interaction,
    Proposal, ReweightConfig,
};
use crate::series::Series;
use crate::stats::{ls_slope, EstimateWithError, MIN_ESS};

/// Truncated power series in `t = sqrt(eps)`.
pub type FormalSeries = Series;

/// Which `d` enters the fluctuation functionals.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum DMode {
    /// `d_N` at the working cutoff, consistent with the samplers.
    #[default]
    Cutoff,
    /// The `N -> infinity` value.
    Limit,
}

/// Whether the exponent of `G` is kept. `Off` reduces `G` to `F(w + t v)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Exponent {
    #[default]
    Full,
    Off,
}

/// Constants needed to expand around a well at a given cutoff.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WellContext {
    pub consts: WickConstants,
    /// `d` actually used in `H3`, `H4`.
    pub d: f64,
}

impl WellContext {
    pub fn new(cutoff: usize, mode: DMode) -> Self {
        let consts = wick_constants(cutoff);
        let d = match mode {
            DMode::Cutoff => consts.d,
            DMode::Limit => d_limit(),
        };
        Self { consts, d }
    }
}

/// Everything about one fluctuation sample `v ~ mu_w` that the series need.
struct FluctuationData {
    /// `int H_l(v; c_N)` for `l = 0..=4`.
    wick_c: [f64; 5],
    h3: f64,
    h4: f64,
}

fn fluctuation_data(t: &Transform, ctx: &WellContext, v: &SpectralField) -> Result<FluctuationData> {
    let g = t.to_grid(v)?;
    let (h3, h4) = h3_h4(&wick_powers(&g, ctx.consts.c_w)?, ctx.d);
    Ok(FluctuationData { wick_c: wick_integrals(&g, ctx.consts.c), h3, h4 })
}

/// `G(w, sqrt(eps) v) = F(w + sqrt(eps) v) exp(-(eps/4) H4 - sqrt(eps) H3 w)`.
pub fn density_g(
    f: &Observable,
    w: Well,
    v: &SpectralField,
    eps: f64,
    cutoff: usize,
    mode: DMode,
) -> Result<f64> {
    if !(eps >= 0.0) {
        return Err(invalid("eps", format!("must be non-negative, got {eps}")));
    }
    let ctx = WellContext::new(cutoff, mode);
    let t = Transform::new(default_grid(cutoff));
    let v = crate::field::project(v, cutoff);
    let data = fluctuation_data(&t, &ctx, &v)?;
    let s = eps.sqrt();
    let phi = v.scaled(s).shifted(w.value());
    let value = f.eval(&phi, &t.to_grid(&phi)?, eps * ctx.consts.c);
    Ok(value * (-0.25 * eps * data.h4 - s * data.h3 * w.value()).exp())
}

fn series_from_data(f: &Observable, w: Well, v: &SpectralField, data: &FluctuationData, k: usize, exp: Exponent) -> Series {
    let fs = f.series_at(w.value(), v, &data.wick_c, k);
    match exp {
        Exponent::Off => fs,
        Exponent::Full => {
            let e = Series::from_coeffs(k, &[0.0, -data.h3 * w.value(), -0.25 * data.h4]).exp_of_nilpotent();
            fs.mul(&e)
        }
    }
}

/// Coefficients `q_j = Q_j(w, v) / j!` of `G(w, t v)` in `t`, up to order `k`.
pub fn taylor_q(
    f: &Observable,
    w: Well,
    v: &SpectralField,
    k: usize,
    cutoff: usize,
    mode: DMode,
    exp: Exponent,
) -> Result<FormalSeries> {
    let ctx = WellContext::new(cutoff, mode);
    let t = Transform::new(default_grid(cutoff));
    let v = crate::field::project(v, cutoff);
    let data = fluctuation_data(&t, &ctx, &v)?;
    Ok(series_from_data(f, w, &v, &data, k, exp))
}

#[derive(Clone, Debug)]
pub struct CoeffConfig {
    pub cutoff: usize,
    pub order: usize,
    pub n_mc: usize,
    pub seed: u64,
    pub mode: DMode,
    pub exponent: Exponent,
}

impl CoeffConfig {
    pub fn new(cutoff: usize, order: usize, n_mc: usize, seed: u64) -> Self {
        Self { cutoff, order, n_mc, seed, mode: DMode::Cutoff, exponent: Exponent::Full }
    }
}

/// Expansion coefficients with per-well contributions.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientTable {
    pub order: usize,
    pub a: Vec<EstimateWithError>,
    /// `theta(w) E[q_j]` for `w = +1` and `w = -1`.
    pub plus: Vec<EstimateWithError>,
    pub minus: Vec<EstimateWithError>,
    pub theta: f64,
}

impl CoefficientTable {
    /// `sum_{j <= k} a_j eps^{j/2}`.
    pub fn partial_sum(&self, k: usize, eps: f64) -> f64 {
        self.a.iter().take(k + 1).enumerate().map(|(j, a)| a.value * eps.powf(j as f64 / 2.0)).sum()
    }

    /// Standard error of [`partial_sum`](Self::partial_sum).
    pub fn partial_sum_se(&self, k: usize, eps: f64) -> f64 {
        self.a
            .iter()
            .take(k + 1)
            .enumerate()
            .map(|(j, a)| (a.std_error * eps.powf(j as f64 / 2.0)).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "j,a_j,stderr,plus,plus_stderr,minus,minus_stderr")?;
        for j in 0..=self.order {
            writeln!(
                out,
                "{j},{},{},{},{},{},{}",
                fmt_f64(self.a[j].value),
                fmt_f64(self.a[j].std_error),
                fmt_f64(self.plus[j].value),
                fmt_f64(self.plus[j].std_error),
                fmt_f64(self.minus[j].value),
                fmt_f64(self.minus[j].std_error),
            )?;
        }
        Ok(())
    }
}

/// The `eps`-independent weight of each well: the renormalized determinant at
/// `eps = 0` and the working cutoff, or 1 when the exponent is off.
pub fn well_theta(cutoff: usize, exp: Exponent) -> Result<f64> {
    Ok(match exp {
        Exponent::Full => theta_re(cutoff, Well::Plus, 0.0)?.theta(),
        Exponent::Off => 1.0,
    })
}

/// Monte Carlo estimate of the `a_j`.
///
/// The determinant carries a factor `exp(-(3 eps / 4) d^2)`; it is expanded
/// together with `G`, so the coefficients themselves do not depend on `eps`.
/// All orders share one sample set per well.
pub fn coefficients_a(f: &Observable, cfg: &CoeffConfig) -> Result<CoefficientTable> {
    if cfg.n_mc < 2 {
        return Err(invalid("n_mc", "need at least two samples"));
    }
    let k = cfg.order;
    let ctx = WellContext::new(cfg.cutoff, cfg.mode);
    let theta = well_theta(cfg.cutoff, cfg.exponent)?;
    let det_factor = match cfg.exponent {
        Exponent::Full => Series::from_coeffs(k, &[0.0, 0.0, -0.75 * ctx.d * ctx.d]).exp_of_nilpotent(),
        Exponent::Off => Series::constant(k, 1.0),
    };
    let t = Transform::new(default_grid(cfg.cutoff));

    let per_well = |wi: u64, w: Well| -> Result<Vec<EstimateWithError>> {
        let qs: Vec<Vec<f64>> = (0..cfg.n_mc)
            .into_par_iter()
            .map(|i| {
                let mut rng = RngStream::new(cfg.seed, 2 * i as u64 + wi).rng();
                let v = sample_gaussian(ReferenceMeasure::MuW(w), cfg.cutoff, &mut rng);
                let data = fluctuation_data(&t, &ctx, &v)?;
                let q = series_from_data(f, w, &v, &data, k, cfg.exponent).mul(&det_factor);
                Ok(q.coeffs().to_vec())
            })
            .collect::<Result<_>>()?;
        Ok((0..=k)
            .map(|j| {
                let col: Vec<f64> = qs.iter().map(|q| theta * q[j]).collect();
                let mut e = EstimateWithError::iid(&col);
                // q_0 is deterministic; it is still a full-size sample.
                e.ess = col.len() as f64;
                e.low_ess = e.ess < MIN_ESS;
                e
            })
            .collect())
    };
    let plus = per_well(0, Well::Plus)?;
    let minus = per_well(1, Well::Minus)?;
    let a = plus
        .iter()
        .zip(&minus)
        .map(|(p, m)| EstimateWithError {
            value: p.value + m.value,
            std_error: p.combined_se(m),
            ess: p.ess.min(m.ess),
            low_ess: p.low_ess || m.low_ess,
        })
        .collect();
    Ok(CoefficientTable { order: k, a, plus, minus, theta })
}

// ---------------------------------------------------------------------------
// Remainder order

#[derive(Clone, Debug)]
pub struct VerifyConfig {
    pub cutoff: usize,
    pub order: usize,
    pub eps_grid: Vec<f64>,
    pub n_mc: usize,
    pub n_reweight: usize,
    pub seed: u64,
    pub mode: DMode,
    pub proposal: Proposal,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RemainderRow {
    pub eps: f64,
    pub integral: EstimateWithError,
    pub expansion: f64,
    pub remainder: f64,
    /// Combined Monte Carlo error of `I` and the partial sum.
    pub remainder_se: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExpansionReport {
    pub order: usize,
    pub rows: Vec<RemainderRow>,
    pub coefficients: CoefficientTable,
    /// Least-squares slope of `log R` against `log eps`.
    pub slope: f64,
    /// Some remainder is within two standard errors of zero.
    pub inconclusive: bool,
}

impl ExpansionReport {
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "eps,I,expansion,remainder,I_stderr,remainder_stderr")?;
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{},{},{},{}",
                fmt_f64(r.eps),
                fmt_f64(r.integral.value),
                fmt_f64(r.expansion),
                fmt_f64(r.remainder),
                fmt_f64(r.integral.std_error),
                fmt_f64(r.remainder_se),
            )?;
        }
        Ok(())
    }
}

/// `I(eps)` for every `eps` in the grid. Draw `i` uses the same stream at
/// every temperature.
pub fn integrals(f: &Observable, cfg: &VerifyConfig) -> Result<Vec<EstimateWithError>> {
    cfg.eps_grid
        .iter()
        .map(|&eps| {
            let rc = ReweightConfig {
                cutoff: cfg.cutoff,
                eps,
                n_samples: cfg.n_reweight,
                seed: cfg.seed,
                proposal: cfg.proposal.clone(),
                interaction: Interaction::Full,
            };
            Ok(reweight_samples(&rc, |s| vec![s.eval(f)])?.integral(0))
        })
        .collect()
}

/// Remainder table for a given order against precomputed `I(eps)` and
/// coefficients.
pub fn remainder_report(
    order: usize,
    eps_grid: &[f64],
    ints: &[EstimateWithError],
    coefficients: &CoefficientTable,
) -> ExpansionReport {
    let rows: Vec<RemainderRow> = eps_grid
        .iter()
        .zip(ints)
        .map(|(&eps, i)| {
            let expansion = coefficients.partial_sum(order, eps);
            RemainderRow {
                eps,
                integral: *i,
                expansion,
                remainder: (i.value - expansion).abs(),
                remainder_se: i.std_error.hypot(coefficients.partial_sum_se(order, eps)),
            }
        })
        .collect();
    let x: Vec<f64> = rows.iter().map(|r| r.eps.ln()).collect();
    let y: Vec<f64> = rows.iter().map(|r| r.remainder.ln()).collect();
    let inconclusive = rows.iter().any(|r| r.remainder < 2.0 * r.remainder_se);
    ExpansionReport { order, rows, coefficients: coefficients.clone(), slope: ls_slope(&x, &y), inconclusive }
}

pub fn verify_expansion(f: &Observable, cfg: &VerifyConfig) -> Result<ExpansionReport> {
    if cfg.eps_grid.len() < 2 {
        return Err(invalid("eps_grid", "need at least two temperatures"));
    }
    if cfg.eps_grid.windows(2).any(|w| w[1] >= w[0]) {
        return Err(invalid("eps_grid", "must be strictly decreasing"));
    }
    let cc = CoeffConfig {
        cutoff: cfg.cutoff,
        order: cfg.order.max(1),
        n_mc: cfg.n_mc,
        seed: cfg.seed ^ 0x5eed,
        mode: cfg.mode,
        exponent: Exponent::Full,
    };
    let coefficients = coefficients_a(f, &cc)?;
    let ints = integrals(f, cfg)?;
    Ok(remainder_report(cfg.order, &cfg.eps_grid, &ints, &coefficients))
}

// ---------------------------------------------------------------------------
// Law of large numbers and central limit

#[derive(Clone, Debug)]
pub struct LlnCltConfig {
    pub cutoff: usize,
    pub eps_grid: Vec<f64>,
    /// Temperature of the chain experiment.
    pub eps_chain: f64,
    pub n_reweight: usize,
    pub n_chains: usize,
    pub chain: ChainConfig,
    pub delta: f64,
    pub eta: f64,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LlnRow {
    pub eps: f64,
    pub mean: EstimateWithError,
    pub target: f64,
    pub gap: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModeVariance {
    pub n: crate::field::Frequency,
    /// `E|v_n - mean_w|^2` with the mean taken per well.
    pub centered: EstimateWithError,
    /// `E|v_n|^2` around the well itself.
    pub raw: EstimateWithError,
    pub target: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LlnCltReport {
    pub lln: Vec<LlnRow>,
    pub occupancy_plus: EstimateWithError,
    pub occupancy_minus: EstimateWithError,
    pub b_plus: f64,
    pub b_minus: f64,
    pub captured: usize,
    pub total: usize,
    /// A well was visited fewer than 10 times.
    pub occupancy_flag: bool,
    pub modes: Vec<ModeVariance>,
}

impl LlnCltReport {
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "kind,key,value,stderr,target")?;
        for r in &self.lln {
            writeln!(out, "lln,{},{},{},{}", fmt_f64(r.eps), fmt_f64(r.mean.value), fmt_f64(r.mean.std_error), fmt_f64(r.target))?;
        }
        for (name, e, b) in [("plus", self.occupancy_plus, self.b_plus), ("minus", self.occupancy_minus, self.b_minus)] {
            writeln!(out, "occupancy,{name},{},{},{}", fmt_f64(e.value), fmt_f64(e.std_error), fmt_f64(b))?;
        }
        for m in &self.modes {
            let key = format!("{}:{}", m.n.n1, m.n.n2);
            writeln!(out, "clt_centered,{key},{},{},{}", fmt_f64(m.centered.value), fmt_f64(m.centered.std_error), fmt_f64(m.target))?;
            writeln!(out, "clt_raw,{key},{},{},{}", fmt_f64(m.raw.value), fmt_f64(m.raw.std_error), fmt_f64(m.target))?;
        }
        Ok(())
    }
}

/// Normalized `<F>` by reweighting at each temperature of the grid.
pub fn lln_means(f: &Observable, cutoff: usize, eps_grid: &[f64], n: usize, seed: u64) -> Result<Vec<EstimateWithError>> {
    eps_grid
        .iter()
        .map(|&eps| {
            let rc = ReweightConfig::new(cutoff, eps, n, seed);
            Ok(reweight_samples(&rc, |s| vec![s.eval(f)])?.normalized(0))
        })
        .collect()
}

/// The `q`-quantile of `dist(w + sqrt(eps) v, M)` for `v ~ mu_w`, from `n`
/// draws: a capture radius for the projection that keeps all but a fraction
/// `1 - q` of genuine Gaussian fluctuations around a well.
pub fn fluctuation_radius(cutoff: usize, eps: f64, eta: f64, q: f64, n: usize, seed: u64) -> Result<f64> {
    if !(0.0..=1.0).contains(&q) || n == 0 {
        return Err(invalid("q", format!("need 0 <= q <= 1 and draws, got q={q}, n={n}")));
    }
    let t = Transform::new(default_grid(cutoff));
    let s = eps.sqrt();
    let mut d: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| {
            let v = sample_gaussian(ReferenceMeasure::MuW(Well::Plus), cutoff, &mut RngStream::new(seed, i as u64).rng());
            nearest_well(&t, &v.scaled(s).shifted(1.0), eta).1
        })
        .collect();
    d.sort_by(f64::total_cmp);
    Ok(d[((q * n as f64).ceil() as usize).clamp(1, n) - 1])
}

/// Per-chain occupancy and CLT statistics.
struct ChainStats {
    plus: usize,
    minus: usize,
    total: usize,
    /// Per well, per mode: rescaled fluctuation coefficients.
    fluct: [Vec<Vec<crate::field::Complex>>; 2],
}

pub const CLT_MODES: [crate::field::Frequency; 3] = [
    crate::field::Frequency::new(0, 0),
    crate::field::Frequency::new(1, 0),
    crate::field::Frequency::new(1, 1),
];

fn chain_stats(cfg: &ChainConfig, delta: f64, eta: f64) -> Result<ChainStats> {
    let t = Transform::new(cfg.grid);
    let s = cfg.eps.sqrt();
    let mut st = ChainStats { plus: 0, minus: 0, total: 0, fluct: [vec![Vec::new(); 3], vec![Vec::new(); 3]] };
    let batch = langevin_chain(cfg)?;
    for psi in &batch.fields {
        st.total += 1;
        let phi = psi.scaled(s);
        let (w, dist) = nearest_well(&t, &phi, eta);
        if dist >= delta {
            continue;
        }
        let wi = match w {
            Well::Plus => {
                st.plus += 1;
                0
            }
            Well::Minus => {
                st.minus += 1;
                1
            }
        };
        let v = psi.shifted(-w.value() / s);
        for (m, &n) in CLT_MODES.iter().enumerate() {
            st.fluct[wi][m].push(v.get(n));
        }
    }
    Ok(st)
}

pub fn lln_clt_experiment(f: &Observable, cfg: &LlnCltConfig) -> Result<LlnCltReport> {
    if !(cfg.delta > 0.0) {
        return Err(invalid("delta", "must be positive"));
    }
    let target = {
        let th = theta_re(cfg.cutoff, Well::Plus, 0.0)?.theta();
        let b = weights_b(th, th)?;
        let t = Transform::new(default_grid(cfg.cutoff));
        Well::ALL
            .iter()
            .map(|&w| {
                let phi = SpectralField::constant(cfg.cutoff, w.value());
                let g = t.to_grid(&phi)?;
                Ok(b.get(w) * f.eval(&phi, &g, 0.0))
            })
            .sum::<Result<f64>>()?
    };
    let means = lln_means(f, cfg.cutoff, &cfg.eps_grid, cfg.n_reweight, cfg.seed)?;
    let lln = cfg
        .eps_grid
        .iter()
        .zip(means)
        .map(|(&eps, mean)| LlnRow { eps, mean, target, gap: (mean.value - target).abs() })
        .collect();

    let base = ChainConfig { cutoff: cfg.cutoff, eps: cfg.eps_chain, init: ChainInit::FreeField, ..cfg.chain.clone() };
    let stats: Vec<ChainStats> = (0..cfg.n_chains)
        .into_par_iter()
        .map(|i| chain_stats(&ChainConfig { stream: i as u64, ..base.clone() }, cfg.delta, cfg.eta))
        .collect::<Result<_>>()?;

    let captured: usize = stats.iter().map(|s| s.plus + s.minus).sum();
    let total: usize = stats.iter().map(|s| s.total).sum();
    let frac = |pick: fn(&ChainStats) -> usize| {
        let per: Vec<Vec<f64>> = stats
            .iter()
            .filter(|s| s.plus + s.minus > 0)
            .map(|s| vec![pick(s) as f64 / (s.plus + s.minus) as f64])
            .collect();
        pooled_chain_estimate(&per)
    };
    let occupancy_plus = frac(|s| s.plus);
    let occupancy_minus = frac(|s| s.minus);
    let n_plus: usize = stats.iter().map(|s| s.plus).sum();
    let n_minus: usize = stats.iter().map(|s| s.minus).sum();

    let modes = CLT_MODES
        .iter()
        .enumerate()
        .map(|(m, &n)| {
            // Per-well means pooled over chains.
            let well_mean = |wi: usize| {
                let all: Vec<_> = stats.iter().flat_map(|s| s.fluct[wi][m].iter().copied()).collect();
                let len = all.len().max(1) as f64;
                all.iter().fold(crate::field::Complex::new(0.0, 0.0), |a, b| a + b) / len
            };
            let centers = [well_mean(0), well_mean(1)];
            let per_chain = |center: bool| -> Vec<Vec<f64>> {
                stats
                    .iter()
                    .map(|s| {
                        (0..2)
                            .flat_map(|wi| {
                                let c = if center { centers[wi] } else { crate::field::Complex::new(0.0, 0.0) };
                                s.fluct[wi][m].iter().map(move |a| (a - c).norm_sqr())
                            })
                            .collect()
                    })
                    .filter(|v: &Vec<f64>| !v.is_empty())
                    .collect()
            };
            ModeVariance {
                n,
                centered: pooled_chain_estimate(&per_chain(true)),
                raw: pooled_chain_estimate(&per_chain(false)),
                target: 1.0 / ReferenceMeasure::MuW(Well::Plus).eigenvalue(n),
            }
        })
        .collect();

    Ok(LlnCltReport {
        lln,
        occupancy_plus,
        occupancy_minus,
        b_plus: 0.5,
        b_minus: 0.5,
        captured,
        total,
        occupancy_flag: n_plus < 10 || n_minus < 10,
        modes,
    })
}
