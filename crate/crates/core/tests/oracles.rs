//! Samplers against independent closed-form and quadrature oracles.

use phi4::field::{ball, sample_gaussian, Frequency, ReferenceMeasure, RngStream, Well};
use phi4::observable::Observable;
use phi4::renorm::wick_constants;
use phi4::sampler::{reweight_samples, Interaction, Proposal, ReweightConfig};

/// Composite Simpson weights for `n` (odd) points with spacing `h`.
fn simpson(n: usize, h: f64) -> Vec<f64> {
    assert!(n % 2 == 1);
    (0..n)
        .map(|i| {
            let w = if i == 0 || i == n - 1 {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            w * h / 3.0
        })
        .collect()
}

/// `(Z, <int :phi^2:>)` at cutoff 1 by quadrature.
///
/// At cutoff 1 the rescaled field is `a + r1 cos(x1 + t1) + r2 cos(x2 + t2)`
/// with `a` standard normal and `r1, r2` Rayleigh. The torus averages of
/// `psi^2` and `psi^4` do not depend on the phases and are elementary, which
/// leaves a three-dimensional integral over `(a, r1, r2)`.
fn cutoff_one_quadrature(eps: f64) -> (f64, f64) {
    let c = 3.0;
    let (na, nr) = (561, 241);
    let (la, lr) = (14.0, 12.0);
    let ha = 2.0 * la / (na - 1) as f64;
    let hr = lr / (nr - 1) as f64;
    let wa = simpson(na, ha);
    let wr = simpson(nr, hr);
    let radial: Vec<f64> = (0..nr)
        .map(|j| {
            let r = j as f64 * hr;
            wr[j] * r * (-0.5 * r * r).exp()
        })
        .collect();
    let (mut z, mut m2) = (0.0, 0.0);
    for (i, wai) in wa.iter().enumerate() {
        let a = -la + i as f64 * ha;
        let ga = wai * (-0.5 * a * a).exp() / (2.0 * std::f64::consts::PI).sqrt();
        for (j, w1) in radial.iter().enumerate() {
            let x = (j as f64 * hr).powi(2);
            for (k, w2) in radial.iter().enumerate() {
                let y = (k as f64 * hr).powi(2);
                let s2 = a * a + 0.5 * (x + y);
                let s4 = a.powi(4) + 3.0 * a * a * (x + y) + 0.375 * (x * x + y * y) + 1.5 * x * y;
                let w2int = s2 - c;
                let w4int = s4 - 6.0 * c * s2 + 3.0 * c * c;
                let u = 0.25 * eps * w4int - w2int + 0.25 / eps;
                let g = ga * w1 * w2 * (-u).exp();
                z += g;
                m2 += g * eps * w2int;
            }
        }
    }
    (z, m2 / z)
}

#[test]
fn partition_function_at_cutoff_one() {
    let eps = 0.5;
    let (z, m2) = cutoff_one_quadrature(eps);
    let cfg = ReweightConfig::new(1, eps, 200_000, 41);
    let f = Observable::WickInt(2);
    let run = reweight_samples(&cfg, |s| vec![s.eval(&f)]).unwrap();
    let zm = run.partition();
    let mm = run.normalized(0);
    assert!((zm.value - z).abs() < 3.0 * zm.std_error, "Z: quadrature {z}, reweighting {zm:?}");
    assert!((mm.value - m2).abs() < 3.0 * mm.std_error, "<:phi^2:>: quadrature {m2}, reweighting {mm:?}");
}

#[test]
fn free_proposal_agrees_with_tuned_proposal() {
    let eps = 0.5;
    let mut free = ReweightConfig::new(1, eps, 200_000, 43);
    free.proposal = Proposal::FreeField;
    let a = reweight_samples(&free, |_| vec![]).unwrap().partition();
    let b = reweight_samples(&ReweightConfig::new(1, eps, 200_000, 44), |_| vec![]).unwrap().partition();
    assert!((a.value - b.value).abs() < 4.0 * a.combined_se(&b), "{a:?} vs {b:?}");
}

#[test]
fn wick_constant_is_pointwise_variance() {
    let cutoff = 4;
    let c = wick_constants(cutoff).c;
    let t = phi4::field::Transform::new(phi4::field::default_grid(cutoff));
    let n = 20_000;
    let mut rng = RngStream::new(5, 0).rng();
    let xs: Vec<f64> = (0..n)
        .map(|_| t.to_grid(&sample_gaussian(ReferenceMeasure::Mu, cutoff, &mut rng)).unwrap().at(3, 5).powi(2))
        .collect();
    let m = xs.iter().sum::<f64>() / n as f64;
    let sd = (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt();
    assert!((m - c).abs() < 4.0 * sd / (n as f64).sqrt(), "{m} vs {c}");
}

#[test]
fn mode_covariance_law() {
    let cutoff = 3;
    let n = 100_000;
    for (k, measure) in [ReferenceMeasure::Mu, ReferenceMeasure::MuEps(0.3), ReferenceMeasure::MuW(Well::Minus)]
        .into_iter()
        .enumerate()
    {
        let mut rng = RngStream::new(9, k as u64).rng();
        let draws: Vec<_> = (0..n).map(|_| sample_gaussian(measure, cutoff, &mut rng)).collect();
        for mode in ball(cutoff) {
            let xs: Vec<f64> = if mode == Frequency::ZERO {
                draws.iter().map(|d| d.zero_mode().powi(2)).collect()
            } else {
                draws.iter().map(|d| d.get(mode).norm_sqr()).collect()
            };
            let m = xs.iter().sum::<f64>() / n as f64;
            let sd = (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt();
            let target = 1.0 / measure.eigenvalue(mode);
            assert!((m - target).abs() < 4.0 * sd / (n as f64).sqrt(), "{measure:?} {mode:?}: {m} vs {target}");
        }
    }
}

#[test]
fn switching_off_the_interaction_leaves_the_free_field() {
    // With the quartic term off every weight is one, whatever the proposal.
    let mut cfg = ReweightConfig::new(2, 0.3, 1000, 3);
    cfg.interaction = Interaction::Off;
    cfg.proposal = Proposal::FreeField;
    let run = reweight_samples(&cfg, |_| vec![]).unwrap();
    assert!(run.log_weights.iter().all(|w| *w == 0.0));
    assert!((run.kish_ess() - 1000.0).abs() < 1e-9);
}
