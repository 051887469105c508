//! Samplers for the truncated Gibbs measure.
//!
//! Everything works in the rescaled variable `psi = phi / sqrt(eps)` with
//! `psi` distributed under the free field `mu`, so the Wick variance of `psi`
//! is the tadpole `c_N` independently of `eps`. Two routes are provided:
//! exact importance reweighting from Gaussian proposals and a spectral
//! Langevin chain integrated by exponential Euler.

use rand::Rng;
use rand_distr::StandardNormal;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::field::{
    ball, cminus_norm, default_grid, half_ball, sample_diagonal, sample_gaussian, Complex, Frequency, GridField, ReferenceMeasure,
    RngStream, SpectralField, Transform, Well,
};
use crate::observable::Observable;
use crate::renorm::{wick_constants, wick_powers, PotentialValue, WickConstants};
use crate::stats::{mean, series_estimate, variance, EstimateWithError, MIN_ESS};

pub use crate::stats::EstimateWithError as Estimate;

/// Whether the interaction is switched on. `Off` leaves the bare Gaussian.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Interaction {
    Full,
    Off,
}

/// `F(phi)` at `phi = sqrt(eps) psi`, Wick powers with variance `eps * sigma`.
pub fn observable_eval(f: &Observable, psi: &SpectralField, eps: f64, sigma: f64) -> Result<f64> {
    let t = Transform::new(default_grid(psi.cutoff()));
    observable_eval_on(&t, f, psi, eps, sigma)
}

pub fn observable_eval_on(t: &Transform, f: &Observable, psi: &SpectralField, eps: f64, sigma: f64) -> Result<f64> {
    let phi = psi.scaled(eps.sqrt());
    let grid = t.to_grid(&phi)?;
    Ok(f.eval(&phi, &grid, eps * sigma))
}

/// `(1 / eps) V_N(sqrt(eps) psi)` from the grid values of `psi`.
pub fn rescaled_potential(psi_grid: &GridField, eps: f64, c: f64) -> Result<f64> {
    let s = eps.sqrt();
    let phi = psi_grid.map(|x| s * x);
    Ok(PotentialValue::from_bundle(&wick_powers(&phi, eps * c)?).total / eps)
}

// ---------------------------------------------------------------------------
// Importance reweighting

/// Gaussian proposal for the reweighting sampler.
#[derive(Clone, Debug, PartialEq)]
pub enum Proposal {
    /// Draw `psi ~ mu` directly.
    FreeField,
    /// Mixture of `mu` (weight `defensive`) and the two Hessian Gaussians
    /// centred at `w / sqrt(eps)`, which covers the wells at small `eps`.
    WellMixture { defensive: f64 },
    /// Mixture of `mu` and two Gaussians fitted to the measure, see
    /// [`tune_proposal`].
    Tuned(TunedProposal),
    /// A [`TunedProposal`] fitted by a short pilot run at the sampled
    /// temperature, see [`Proposal::resolve`].
    Auto { defensive: f64 },
}

impl Default for Proposal {
    fn default() -> Self {
        Proposal::Auto { defensive: 0.05 }
    }
}

impl Proposal {
    /// Replaces `Auto` by a fitted proposal: 8 pilot chains of 100 time units
    /// (10 discarded), seeded from `seed`. Other variants are returned as is.
    pub fn resolve(&self, cutoff: usize, eps: f64, seed: u64) -> Result<Proposal> {
        let Proposal::Auto { defensive } = *self else {
            return Ok(self.clone());
        };
        let dt = 0.005f64.min(1.0 / (1.0 + (cutoff * cutoff) as f64));
        let mut pilot = ChainConfig::new(cutoff, eps, dt, (100.0 / dt) as usize, seed ^ 0x7069_6c6f_7400);
        pilot.n_burnin = (10.0 / dt) as usize;
        pilot.thin = 5;
        Ok(Proposal::Tuned(tune_proposal(&pilot, 8, 2.0, defensive)?))
    }
}

/// Two diagonal Gaussians in `psi`: zero mode centred at `+-center / sqrt(eps)`
/// (`center` in units of `phi`) with variance `zero_var`, and mode `n != 0`
/// with precision `precision[|n|^2]`.
#[derive(Clone, Debug, PartialEq)]
pub struct TunedProposal {
    pub defensive: f64,
    pub center: f64,
    pub zero_var: f64,
    pub precision: Vec<f64>,
}

/// One Gaussian component of a proposal.
#[derive(Clone, Debug)]
struct Component {
    log_mix: f64,
    /// Zero-mode mean in `psi`.
    mean: f64,
    zero_prec: f64,
    /// Precision of the nonzero modes by `|n|^2`.
    precision: Arc<Vec<f64>>,
    /// `sum_{n in half ball} log(kappa_n / lambda_n)`.
    log_det: f64,
}

impl Component {
    fn new(log_mix: f64, mean: f64, zero_prec: f64, precision: Arc<Vec<f64>>, cutoff: usize) -> Self {
        let log_det = half_ball(cutoff)
            .map(|n| {
                let k2 = n.norm_sq() as usize;
                (precision[k2] / (1.0 + k2 as f64)).ln()
            })
            .sum();
        Self { log_mix, mean, zero_prec, precision, log_det }
    }

    fn sample<R: Rng + ?Sized>(&self, cutoff: usize, rng: &mut R) -> SpectralField {
        sample_diagonal(
            cutoff,
            |n| if n == Frequency::ZERO { self.zero_prec } else { self.precision[n.norm_sq() as usize] },
            rng,
        )
        .shifted(self.mean)
    }

    /// `log (dq / d mu)(psi)`. Each pair mode contributes a two-dimensional
    /// Gaussian ratio, the zero mode a one-dimensional one.
    fn log_ratio(&self, psi: &SpectralField, cutoff: usize) -> f64 {
        let x = psi.zero_mode();
        let zero = 0.5 * self.zero_prec.ln() - 0.5 * self.zero_prec * (x - self.mean).powi(2) + 0.5 * x * x;
        let quad: f64 = half_ball(cutoff)
            .map(|n| {
                let k2 = n.norm_sq() as usize;
                (self.precision[k2] - 1.0 - k2 as f64) * psi.get(n).norm_sqr()
            })
            .sum();
        self.log_det - quad + zero
    }
}

fn components(cfg: &ReweightConfig) -> Vec<Component> {
    let k2max = cfg.cutoff * cfg.cutoff;
    let free = Arc::new((0..=k2max).map(|k2| 1.0 + k2 as f64).collect::<Vec<_>>());
    let (defensive, mean, zero_prec, precision) = match &cfg.proposal {
        Proposal::FreeField => return vec![Component::new(0.0, 0.0, 1.0, free, cfg.cutoff)],
        Proposal::WellMixture { defensive } => {
            let hess = (0..=k2max).map(|k2| 2.0 + k2 as f64).collect();
            (*defensive, 1.0 / cfg.eps.sqrt(), 2.0, Arc::new(hess))
        }
        Proposal::Tuned(t) => (t.defensive, t.center / cfg.eps.sqrt(), 1.0 / t.zero_var, Arc::new(t.precision.clone())),
        Proposal::Auto { .. } => unreachable!("resolved before sampling"),
    };
    let mut out = Vec::new();
    if defensive > 0.0 {
        out.push(Component::new(defensive.ln(), 0.0, 1.0, free, cfg.cutoff));
    }
    let log_mix = (0.5 * (1.0 - defensive)).ln();
    for m in [mean, -mean] {
        out.push(Component::new(log_mix, m, zero_prec, precision.clone(), cfg.cutoff));
    }
    out
}

#[derive(Clone, Debug)]
pub struct ReweightConfig {
    pub cutoff: usize,
    pub eps: f64,
    pub n_samples: usize,
    pub seed: u64,
    pub proposal: Proposal,
    pub interaction: Interaction,
}

impl ReweightConfig {
    pub fn new(cutoff: usize, eps: f64, n_samples: usize, seed: u64) -> Self {
        Self { cutoff, eps, n_samples, seed, proposal: Proposal::default(), interaction: Interaction::Full }
    }

    fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0) {
            return Err(invalid("eps", format!("must be positive, got {}", self.eps)));
        }
        if self.n_samples == 0 {
            return Err(invalid("n_samples", "must be positive"));
        }
        let defensive = match &self.proposal {
            Proposal::FreeField => 0.0,
            Proposal::WellMixture { defensive } | Proposal::Auto { defensive } => *defensive,
            Proposal::Tuned(t) => {
                let ok = t.zero_var > 0.0
                    && t.center.is_finite()
                    && t.precision.len() > self.cutoff * self.cutoff
                    && t.precision.iter().all(|p| *p > 0.0 && p.is_finite());
                if !ok {
                    return Err(invalid("proposal", format!("bad tuned proposal {t:?}")));
                }
                t.defensive
            }
        };
        if !(0.0..1.0).contains(&defensive) {
            return Err(invalid("defensive", format!("must lie in [0, 1), got {defensive}")));
        }
        Ok(())
    }
}

/// What a measurement closure sees for each draw.
pub struct SampleView<'a> {
    pub psi: &'a SpectralField,
    pub psi_grid: &'a GridField,
    pub eps: f64,
    pub consts: &'a WickConstants,
    pub transform: &'a Transform,
}

impl SampleView<'_> {
    /// The physical field `phi = sqrt(eps) psi`.
    pub fn phi(&self) -> SpectralField {
        self.psi.scaled(self.eps.sqrt())
    }

    pub fn eval(&self, f: &Observable) -> f64 {
        let s = self.eps.sqrt();
        let phi = self.psi.scaled(s);
        f.eval(&phi, &self.psi_grid.map(|x| s * x), self.eps * self.consts.c)
    }
}

/// Per-draw log weights and measured values.
#[derive(Clone, Debug)]
pub struct ReweightRun {
    pub log_weights: Vec<f64>,
    pub values: Vec<Vec<f64>>,
    pub rejected: usize,
}

impl ReweightRun {
    fn shift(&self) -> f64 {
        self.log_weights.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    fn estimate(&self, g: impl Fn(usize) -> f64) -> EstimateWithError {
        let m = self.shift();
        let terms: Vec<f64> = self.log_weights.iter().enumerate().map(|(i, lw)| g(i) * (lw - m).exp()).collect();
        let mut est = EstimateWithError::iid(&terms);
        let scale = m.exp();
        est.value *= scale;
        est.std_error *= scale;
        est.ess = self.kish_ess();
        est.low_ess = est.ess < MIN_ESS;
        est
    }

    /// `int F e^{-V/eps} d mu_eps` for measurement `i`.
    pub fn integral(&self, i: usize) -> EstimateWithError {
        self.estimate(|s| self.values[s][i])
    }

    /// The partition function `Z_{N,eps}`.
    pub fn partition(&self) -> EstimateWithError {
        self.estimate(|_| 1.0)
    }

    /// Self-normalized `<F>` with delta-method standard error.
    pub fn normalized(&self, i: usize) -> EstimateWithError {
        let m = self.shift();
        let w: Vec<f64> = self.log_weights.iter().map(|lw| (lw - m).exp()).collect();
        let sw: f64 = w.iter().sum();
        let value = w.iter().zip(&self.values).map(|(w, v)| w * v[i]).sum::<f64>() / sw;
        let var = w.iter().zip(&self.values).map(|(w, v)| (w * (v[i] - value)).powi(2)).sum::<f64>() / (sw * sw);
        let ess = self.kish_ess();
        EstimateWithError { value, std_error: var.sqrt(), ess, low_ess: ess < MIN_ESS }
    }

    /// Kish effective sample size of the weights.
    pub fn kish_ess(&self) -> f64 {
        let m = self.shift();
        let (s1, s2) = self.log_weights.iter().fold((0.0, 0.0), |(a, b), lw| {
            let w = (lw - m).exp();
            (a + w, b + w * w)
        });
        s1 * s1 / s2
    }
}

fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + xs.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// Draws from the proposal, weights each draw by `e^{-V/eps} d mu / d q` and
/// records `measure(view)` for it. Draw `i` uses stream `i` of `cfg.seed`, so
/// the output does not depend on the thread count.
pub fn reweight_samples<M>(cfg: &ReweightConfig, measure: M) -> Result<ReweightRun>
where
    M: Fn(&SampleView) -> Vec<f64> + Sync,
{
    cfg.validate()?;
    if let Proposal::Auto { .. } = cfg.proposal {
        let proposal = cfg.proposal.resolve(cfg.cutoff, cfg.eps, cfg.seed)?;
        return reweight_samples(&ReweightConfig { proposal, ..cfg.clone() }, measure);
    }
    let consts = wick_constants(cfg.cutoff);
    let transform = Transform::new(default_grid(cfg.cutoff));
    let comps = components(cfg);
    let is_free = cfg.proposal == Proposal::FreeField;

    let draws: Vec<(f64, Vec<f64>)> = (0..cfg.n_samples)
        .into_par_iter()
        .map(|i| -> Result<(f64, Vec<f64>)> {
            let mut rng = RngStream::new(cfg.seed, i as u64).rng();
            let psi = if is_free {
                sample_gaussian(ReferenceMeasure::Mu, cfg.cutoff, &mut rng)
            } else {
                let u: f64 = rng.random();
                let mut acc = 0.0;
                let mut pick = &comps[comps.len() - 1];
                for c in &comps {
                    acc += c.log_mix.exp();
                    if u < acc {
                        pick = c;
                        break;
                    }
                }
                pick.sample(cfg.cutoff, &mut rng)
            };
            let grid = transform.to_grid(&psi)?;
            let mut log_w = match cfg.interaction {
                Interaction::Full => -rescaled_potential(&grid, cfg.eps, consts.c)?,
                Interaction::Off => 0.0,
            };
            if !is_free {
                let terms: Vec<f64> = comps.iter().map(|c| c.log_mix + c.log_ratio(&psi, cfg.cutoff)).collect();
                log_w -= log_sum_exp(&terms);
            }
            let view = SampleView { psi: &psi, psi_grid: &grid, eps: cfg.eps, consts: &consts, transform: &transform };
            Ok((log_w, measure(&view)))
        })
        .collect::<Result<_>>()?;

    let total = draws.len();
    let (kept, dropped): (Vec<_>, Vec<_>) =
        draws.into_iter().partition(|(lw, vals)| lw.is_finite() && vals.iter().all(|v| v.is_finite()));
    let rejected = dropped.len();
    if rejected * 100 > total {
        return Err(Error::TooManyRejections { rejected, total });
    }
    let (log_weights, values) = kept.into_iter().unzip();
    Ok(ReweightRun { log_weights, values, rejected })
}

/// Fits a [`TunedProposal`] to pilot Langevin chains at the target cutoff and
/// temperature. The centre is the mean of `|phi_0|`, the zero-mode variance
/// is the spread of `|psi_0|`, and each `|n|^2` class gets the inverse of its
/// mean `|psi_n|^2`. The zero-mode variance is multiplied by `inflate` so the
/// proposal tails stay heavier than the target's in the direction that
/// separates the wells.
pub fn tune_proposal(pilot: &ChainConfig, n_chains: usize, inflate: f64, defensive: f64) -> Result<TunedProposal> {
    let k2max = pilot.cutoff * pilot.cutoff;
    let per_chain = run_chains(pilot, n_chains, |cfg| {
        let mut zero = Vec::new();
        let mut second = vec![0.0; k2max + 1];
        let mut count = vec![0usize; k2max + 1];
        run_chain(cfg, |_, psi| {
            zero.push(psi.zero_mode().abs());
            for n in half_ball(cfg.cutoff) {
                let k2 = n.norm_sq() as usize;
                second[k2] += psi.get(n).norm_sqr();
                count[k2] += 1;
            }
        })?;
        Ok((zero, second, count))
    })?;
    let zero: Vec<f64> = per_chain.iter().flat_map(|(z, _, _)| z.iter().copied()).collect();
    if zero.len() < 2 {
        return Err(Error::EmptySample);
    }
    let precision = (0..=k2max)
        .map(|k2| {
            let s: f64 = per_chain.iter().map(|(_, sec, _)| sec[k2]).sum();
            let c: usize = per_chain.iter().map(|(_, _, cnt)| cnt[k2]).sum();
            // Classes with no lattice point are never used.
            if c == 0 || s <= 0.0 {
                1.0 + k2 as f64
            } else {
                c as f64 / s
            }
        })
        .collect();
    Ok(TunedProposal { defensive, center: mean(&zero) * pilot.eps.sqrt(), zero_var: variance(&zero) * inflate, precision })
}

/// Importance estimates of `I = int F e^{-V/eps} d mu_eps` and of `Z`.
pub fn reweight_estimate(f: &Observable, cfg: &ReweightConfig) -> Result<(EstimateWithError, EstimateWithError)> {
    let run = reweight_samples(cfg, |s| vec![s.eval(f)])?;
    Ok((run.integral(0), run.partition()))
}

// ---------------------------------------------------------------------------
// Langevin dynamics

#[derive(Clone, Debug, PartialEq)]
pub enum ChainInit {
    Zero,
    /// Constant rescaled field.
    Constant(f64),
    /// A draw from `mu` on the chain's own stream.
    FreeField,
    Field(SpectralField),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChainConfig {
    pub cutoff: usize,
    pub grid: usize,
    pub eps: f64,
    pub dt: f64,
    /// Steps after burn-in.
    pub n_steps: usize,
    pub n_burnin: usize,
    pub thin: usize,
    pub seed: u64,
    pub stream: u64,
    pub interaction: Interaction,
    pub noise: bool,
    pub init: ChainInit,
}

impl ChainConfig {
    pub fn new(cutoff: usize, eps: f64, dt: f64, n_steps: usize, seed: u64) -> Self {
        Self {
            cutoff,
            grid: default_grid(cutoff),
            eps,
            dt,
            n_steps,
            n_burnin: 0,
            thin: 1,
            seed,
            stream: 0,
            interaction: Interaction::Full,
            noise: true,
            init: ChainInit::FreeField,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0) {
            return Err(invalid("eps", format!("must be positive, got {}", self.eps)));
        }
        if !(self.dt > 0.0) {
            return Err(invalid("dt", format!("must be positive, got {}", self.dt)));
        }
        let stiff = self.dt * (1.0 + (self.cutoff * self.cutoff) as f64);
        if stiff > 2.0 {
            return Err(invalid("dt", format!("dt * (1 + N^2) = {stiff} exceeds 2")));
        }
        if self.thin == 0 {
            return Err(invalid("thin", "must be positive"));
        }
        if self.grid < 4 * self.cutoff + 1 {
            return Err(Error::GridTooSmall { grid: self.grid, cutoff: self.cutoff, min: 4 * self.cutoff + 1 });
        }
        Ok(())
    }
}

/// Provenance of a batch: enough to regenerate it.
#[derive(Clone, Debug, PartialEq)]
pub struct Provenance {
    pub config: ChainConfig,
    pub steps: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SampleBatch {
    /// Rescaled fields `psi`.
    pub fields: Vec<SpectralField>,
    pub weights: Vec<f64>,
    pub provenance: Provenance,
}

/// One exponential-Euler step per mode: the linear part `-(1 + |n|^2)` is
/// integrated exactly, the Wick-cubic drift is frozen over the step.
struct Stepper {
    cutoff: usize,
    modes: Vec<Frequency>,
    decay: Vec<f64>,
    drift_gain: Vec<f64>,
    noise_sd: Vec<f64>,
    transform: Transform,
    eps: f64,
    c: f64,
}

impl Stepper {
    fn new(cfg: &ChainConfig) -> Self {
        let modes: Vec<Frequency> = std::iter::once(Frequency::ZERO).chain(half_ball(cfg.cutoff)).collect();
        let lambda: Vec<f64> = modes.iter().map(|&n| ReferenceMeasure::Mu.eigenvalue(n)).collect();
        let decay = lambda.iter().map(|l| (-l * cfg.dt).exp()).collect();
        let drift_gain = lambda.iter().map(|l| -(-l * cfg.dt).exp_m1() / l).collect();
        let noise_sd = lambda.iter().map(|l| (-(-2.0 * l * cfg.dt).exp_m1() / l).sqrt()).collect();
        Self {
            cutoff: cfg.cutoff,
            modes,
            decay,
            drift_gain,
            noise_sd,
            transform: Transform::new(cfg.grid),
            eps: cfg.eps,
            c: wick_constants(cfg.cutoff).c,
        }
    }

    /// Spectral coefficients of `eps :psi^3: - 2 psi`, the gradient of the
    /// rescaled interaction.
    fn force(&self, psi: &SpectralField) -> Result<SpectralField> {
        let g = self.transform.to_grid(psi)?;
        let (eps, c) = (self.eps, self.c);
        let u = g.map(|x| eps * x * (x * x - 3.0 * c) - 2.0 * x);
        self.transform.to_spectral(&u, self.cutoff)
    }

    fn step<R: Rng>(&self, psi: &SpectralField, interaction: Interaction, rng: Option<&mut R>) -> Result<SpectralField> {
        let force = match interaction {
            Interaction::Full => Some(self.force(psi)?),
            Interaction::Off => None,
        };
        let mut next = SpectralField::zeros(self.cutoff);
        let mut rng = rng;
        for (i, &n) in self.modes.iter().enumerate() {
            let mut a = psi.get(n) * self.decay[i];
            if let Some(f) = &force {
                a -= f.get(n) * self.drift_gain[i];
            }
            if let Some(r) = rng.as_deref_mut() {
                let x: f64 = r.sample(StandardNormal);
                a += if n == Frequency::ZERO {
                    Complex::new(x * self.noise_sd[i], 0.0)
                } else {
                    let y: f64 = r.sample(StandardNormal);
                    Complex::new(x, y) * (self.noise_sd[i] * std::f64::consts::FRAC_1_SQRT_2)
                };
            }
            next.set(n, a);
        }
        Ok(next)
    }
}

/// Runs the chain and hands every emitted state (after burn-in, thinned) to
/// `visit` together with its step index.
pub fn run_chain(cfg: &ChainConfig, mut visit: impl FnMut(usize, &SpectralField)) -> Result<()> {
    cfg.validate()?;
    let stepper = Stepper::new(cfg);
    let mut rng = RngStream::new(cfg.seed, cfg.stream).rng();
    let mut psi = match &cfg.init {
        ChainInit::Zero => SpectralField::zeros(cfg.cutoff),
        ChainInit::Constant(c) => SpectralField::constant(cfg.cutoff, *c),
        ChainInit::FreeField => sample_gaussian(ReferenceMeasure::Mu, cfg.cutoff, &mut rng),
        ChainInit::Field(f) => crate::field::project(f, cfg.cutoff),
    };
    let total = cfg.n_burnin + cfg.n_steps;
    for step in 1..=total {
        psi = if cfg.noise {
            stepper.step(&psi, cfg.interaction, Some(&mut rng))?
        } else {
            stepper.step::<rand_chacha::ChaCha8Rng>(&psi, cfg.interaction, None)?
        };
        if !psi.zero_mode().is_finite() || psi.iter().any(|(_, c)| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::NonFiniteField { step });
        }
        if step > cfg.n_burnin && (step - cfg.n_burnin) % cfg.thin == 0 {
            visit(step, &psi);
        }
    }
    Ok(())
}

pub fn langevin_chain(cfg: &ChainConfig) -> Result<SampleBatch> {
    let mut fields = Vec::new();
    let mut steps = Vec::new();
    run_chain(cfg, |step, psi| {
        fields.push(psi.clone());
        steps.push(step);
    })?;
    let weights = vec![1.0; fields.len()];
    Ok(SampleBatch { fields, weights, provenance: Provenance { config: cfg.clone(), steps } })
}

/// Runs independent copies of `base` on streams `0..n_chains` in parallel.
pub fn run_chains<T: Send>(
    base: &ChainConfig,
    n_chains: usize,
    per_chain: impl Fn(&ChainConfig) -> Result<T> + Sync,
) -> Result<Vec<T>> {
    (0..n_chains)
        .into_par_iter()
        .map(|i| {
            let cfg = ChainConfig { stream: i as u64, ..base.clone() };
            per_chain(&cfg)
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Projection and diagnostics

/// Nearest well in the `C^{-eta}` proxy distance if it lies within `delta`;
/// ties go to `+1`.
pub fn projection_pi(phi: &SpectralField, delta: f64, eta: f64) -> Option<Well> {
    projection_pi_on(&Transform::new(default_grid(phi.cutoff())), phi, delta, eta)
}

pub fn projection_pi_on(t: &Transform, phi: &SpectralField, delta: f64, eta: f64) -> Option<Well> {
    let (w, dist) = nearest_well(t, phi, eta);
    (dist < delta).then_some(w)
}

/// Nearest well and its `C^{-eta}` proxy distance.
pub fn nearest_well(t: &Transform, phi: &SpectralField, eta: f64) -> (Well, f64) {
    let dp = cminus_norm(t, &phi.shifted(-1.0), eta);
    let dm = cminus_norm(t, &phi.shifted(1.0), eta);
    if dp <= dm {
        (Well::Plus, dp)
    } else {
        (Well::Minus, dm)
    }
}

/// Grid-field form of [`projection_pi`], at the largest cutoff the grid carries.
pub fn projection_pi_grid(phi: &GridField, delta: f64, eta: f64) -> Result<Option<Well>> {
    let t = Transform::new(phi.size());
    let f = t.to_spectral(phi, (phi.size() - 2) / 2)?;
    Ok(projection_pi_on(&t, &f, delta, eta))
}

/// Time-series estimate of `<F>` over a chain batch.
pub fn diagnostics(batch: &SampleBatch, f: &Observable) -> Result<EstimateWithError> {
    if batch.fields.is_empty() {
        return Err(Error::EmptySample);
    }
    let cfg = &batch.provenance.config;
    let t = Transform::new(cfg.grid);
    let c = wick_constants(cfg.cutoff).c;
    let xs: Vec<f64> =
        batch.fields.iter().map(|psi| observable_eval_on(&t, f, psi, cfg.eps, c)).collect::<Result<_>>()?;
    Ok(series_estimate(&xs))
}

/// Mean over chains of per-chain means, with the between-chain standard error.
pub fn pooled_chain_estimate(per_chain: &[Vec<f64>]) -> EstimateWithError {
    let means: Vec<f64> = per_chain.iter().filter(|c| !c.is_empty()).map(|c| mean(c)).collect();
    let n = means.len() as f64;
    let ess: f64 = per_chain.iter().map(|c| series_estimate(c).ess).sum();
    EstimateWithError { value: mean(&means), std_error: (variance(&means) / n).sqrt(), ess, low_ess: ess < MIN_ESS }
}

/// Mass of `{dist(phi, M) >= delta}` under the truncated measure, by
/// reweighting.
pub fn concentration_mass(cfg: &ReweightConfig, delta: f64, eta: f64) -> Result<EstimateWithError> {
    if !(delta > 0.0) {
        return Err(invalid("delta", format!("must be positive, got {delta}")));
    }
    let run = reweight_samples(cfg, |s| {
        let (_, dist) = nearest_well(s.transform, &s.phi(), eta);
        vec![if dist >= delta { 1.0 } else { 0.0 }]
    })?;
    Ok(run.normalized(0))
}

/// Every `n` in the ball with its `mu` variance, for covariance checks.
pub fn mode_variances(cutoff: usize, measure: ReferenceMeasure) -> Vec<(Frequency, f64)> {
    ball(cutoff).map(|n| (n, 1.0 / measure.eigenvalue(n))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::to_grid;

    fn cos_test_fn(cutoff: usize) -> SpectralField {
        let mut f = SpectralField::constant(cutoff, 1.0);
        f.set(Frequency::new(1, 0), Complex::new(0.5, 0.0));
        f
    }

    #[test]
    fn observable_examples() {
        let psi = sample_gaussian(ReferenceMeasure::Mu, 3, &mut RngStream::new(1, 0).rng());
        assert_eq!(observable_eval(&Observable::constant(3.5), &psi, 0.3, 2.0).unwrap(), 3.5);
        let n = Frequency::new(1, 2);
        let mut f = SpectralField::zeros(3);
        f.set(n, Complex::new(1.0, 0.0));
        let mut single = SpectralField::zeros(3);
        single.set(n, Complex::new(0.4, -0.7));
        let v = observable_eval(&Observable::pair(f), &single, 0.25, 1.0).unwrap();
        assert!((v - 2.0 * 0.4 * 0.5).abs() < 1e-15);
        let w2 = observable_eval(&Observable::WickInt(2), &SpectralField::zeros(3), 0.25, 1.7).unwrap();
        assert!((w2 + 0.25 * 1.7).abs() < 1e-14, "{w2}");
    }

    /// Rescaled potential against the well-translated identity: after removing
    /// the Cameron-Martin terms it is a quartic in `psi` plus `-c/2`.
    #[test]
    fn rescaling_identity() {
        let cutoff = 4;
        let c = wick_constants(cutoff).c;
        let t = Transform::new(default_grid(cutoff));
        for (seed, eps, w) in [(1, 0.3f64, 1.0f64), (2, 0.05, -1.0), (3, 0.8, 1.0)] {
            let psi = sample_gaussian(ReferenceMeasure::Mu, cutoff, &mut RngStream::new(seed, 0).rng());
            let g = t.to_grid(&psi).unwrap();
            let shifted = psi.scaled(eps.sqrt()).shifted(w);
            let sg = t.to_grid(&shifted).unwrap();
            let lhs = PotentialValue::from_bundle(&wick_powers(&sg, eps * c).unwrap()).total / eps
                + 0.5 / eps
                + w / eps.sqrt() * psi.zero_mode();
            let b = wick_powers(&g, c).unwrap();
            let rhs = 0.25 * eps * b.p4.mean() + eps.sqrt() * w * b.p3.mean()
                + 0.5 * g.values().iter().map(|x| x * x).sum::<f64>() / g.values().len() as f64
                - 0.5 * c;
            assert!((lhs - rhs).abs() < 1e-8, "{lhs} {rhs}");
        }
    }

    #[test]
    fn unweighted_partition_is_one() {
        let mut cfg = ReweightConfig::new(2, 0.5, 2000, 9);
        cfg.proposal = Proposal::FreeField;
        cfg.interaction = Interaction::Off;
        let (i, z) = reweight_estimate(&Observable::constant(1.0), &cfg).unwrap();
        assert_eq!(z.value, 1.0);
        assert_eq!(i.value, 1.0);
        let (i, _) = reweight_estimate(&Observable::pair(cos_test_fn(2)), &cfg).unwrap();
        assert!(i.value.abs() < 4.0 * i.std_error, "{i:?}");
    }

    #[test]
    fn invalid_reweight_config() {
        let cfg = ReweightConfig::new(2, 0.0, 10, 1);
        assert!(reweight_estimate(&Observable::constant(1.0), &cfg).is_err());
    }

    #[test]
    fn deterministic_flow_to_shifted_well() {
        let mut cfg = ChainConfig::new(0, 1.0, 0.01, 5000, 1);
        cfg.noise = false;
        cfg.init = ChainInit::Constant(0.1);
        let batch = langevin_chain(&cfg).unwrap();
        let last = batch.fields.last().unwrap().zero_mode();
        assert!((last - 2.0).abs() < 1e-6, "{last}");
    }

    #[test]
    fn chains_are_reproducible() {
        let mut cfg = ChainConfig::new(3, 0.3, 0.01, 200, 4);
        cfg.thin = 10;
        let a = langevin_chain(&cfg).unwrap();
        let b = langevin_chain(&cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.fields.len(), 20);
    }

    #[test]
    fn chain_config_validation() {
        let cfg = ChainConfig::new(8, 0.1, 0.05, 10, 1);
        assert!(cfg.validate().is_err());
        let mut cfg = ChainConfig::new(8, 0.1, 0.01, 10, 1);
        cfg.grid = 20;
        assert!(matches!(cfg.validate(), Err(Error::GridTooSmall { .. })));
    }

    #[test]
    fn blow_up_reports_step() {
        let mut cfg = ChainConfig::new(1, 1.0, 0.5, 100, 1);
        cfg.noise = false;
        cfg.init = ChainInit::Constant(1e6);
        match langevin_chain(&cfg) {
            Err(Error::NonFiniteField { step }) => assert!(step >= 1),
            other => panic!("expected blow-up, got {other:?}"),
        }
    }

    #[test]
    fn projection_examples() {
        let one = SpectralField::constant(4, 1.0);
        assert_eq!(projection_pi(&one, 1e-3, 0.5), Some(Well::Plus));
        let zero = SpectralField::zeros(4);
        assert_eq!(projection_pi(&zero, 0.5, 0.5), None);
        let noise = sample_gaussian(ReferenceMeasure::Mu, 4, &mut RngStream::new(3, 0).rng());
        let t = Transform::new(default_grid(4));
        let size = cminus_norm(&t, &noise, 0.5);
        let delta = 0.5;
        let small = noise.scaled(0.2 * delta / size);
        assert_eq!(projection_pi(&small.shifted(-1.0), delta, 0.5), Some(Well::Minus));
        let g = to_grid(&one, 12).unwrap();
        assert_eq!(projection_pi_grid(&g, 0.1, 0.5).unwrap(), Some(Well::Plus));
    }

    #[test]
    fn diagnostics_on_empty_batch() {
        let cfg = ChainConfig::new(1, 0.5, 0.01, 10, 1);
        let batch = SampleBatch { fields: vec![], weights: vec![], provenance: Provenance { config: cfg, steps: vec![] } };
        assert!(matches!(diagnostics(&batch, &Observable::constant(1.0)), Err(Error::EmptySample)));
    }
}
