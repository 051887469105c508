//! Property tests over random fields, Wick bundles and observables.

use std::f64::consts::TAU;

use proptest::prelude::*;

use phi4::expansion::{density_g, taylor_q, DMode, Exponent};
use phi4::field::{
    ball, default_grid, norm, sample_gaussian, Complex, GridField, NormKind, ReferenceMeasure, RngStream,
    SpectralField, Transform, Well,
};
use phi4::observable::Observable;
use phi4::renorm::{convert_reference, wick_powers};
use phi4::series::Series;

fn field(cutoff: usize, seed: u64) -> SpectralField {
    let mut rng = RngStream::new(seed, 0).rng();
    sample_gaussian(ReferenceMeasure::MuW(Well::Plus), cutoff, &mut rng)
}

/// Plain double sum `sum_n c_n e^{i n.x}` at a grid point.
fn direct(f: &SpectralField, m: usize, j: usize, k: usize) -> Complex {
    f.iter()
        .map(|(n, c)| {
            let arg = TAU * (n.n1 as f64 * j as f64 + n.n2 as f64 * k as f64) / m as f64;
            c * Complex::new(arg.cos(), arg.sin())
        })
        .sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn grid_values_are_real_and_match_direct_sum(cutoff in 0usize..6, extra in 0usize..4, seed in any::<u64>()) {
        let f = field(cutoff, seed);
        let m = 4 * cutoff + 2 + extra;
        let g = Transform::new(m).to_grid(&f).unwrap();
        for j in 0..m {
            for k in 0..m {
                let z = direct(&f, m, j, k);
                prop_assert!(z.im.abs() < 1e-12, "imaginary part {}", z.im);
                prop_assert!((z.re - g.at(j, k)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn spectral_round_trip(cutoff in 0usize..8, seed in any::<u64>()) {
        let f = field(cutoff, seed);
        let t = Transform::new(default_grid(cutoff));
        let back = t.to_spectral(&t.to_grid(&f).unwrap(), cutoff).unwrap();
        for n in ball(cutoff) {
            prop_assert!((back.get(n) - f.get(n)).norm() < 1e-12);
        }
        prop_assert_eq!(back.hermitian_defect(), 0.0);
    }

    #[test]
    fn parseval(cutoff in 0usize..8, seed in any::<u64>()) {
        let f = field(cutoff, seed);
        let g = Transform::new(2 * cutoff + 2).to_grid(&f).unwrap();
        let mean_sq = g.values().iter().map(|x| x * x).sum::<f64>() / (g.size() * g.size()) as f64;
        prop_assert!((norm(&f, NormKind::L2).powi(2) - mean_sq).abs() < 1e-10);
    }

    #[test]
    fn reference_conversion_is_recomputation(
        values in prop::collection::vec(-4.0f64..4.0, 16),
        sigma in 0.0f64..6.0,
        frac in 0.0f64..1.0,
    ) {
        let v = GridField::new(4, values).unwrap();
        let d = frac * sigma;
        let converted = convert_reference(&wick_powers(&v, sigma).unwrap(), d).unwrap();
        let direct = wick_powers(&v, sigma - d).unwrap();
        for (a, b) in [(&converted.p2, &direct.p2), (&converted.p3, &direct.p3), (&converted.p4, &direct.p4)] {
            for (x, y) in a.values().iter().zip(b.values()) {
                prop_assert!((x - y).abs() <= 1e-12 * (1.0 + y.abs()), "{x} vs {y}");
            }
        }
        prop_assert!((converted.sigma - (sigma - d)).abs() < 1e-15);
    }

    #[test]
    fn negative_reference_variance_rejected(sigma in 0.0f64..3.0, excess in 1e-6f64..3.0) {
        let v = GridField::constant(4, 0.5);
        prop_assert!(convert_reference(&wick_powers(&v, sigma).unwrap(), sigma + excess).is_err());
    }
}

// ---------------------------------------------------------------------------
// Truncated series against the exact density

fn test_fn(cutoff: usize, seed: u64) -> SpectralField {
    let mut rng = RngStream::new(seed, 7).rng();
    sample_gaussian(ReferenceMeasure::Mu, cutoff, &mut rng).scaled(0.7).shifted(1.0)
}

fn observable() -> impl Strategy<Value = Observable> {
    let leaf = prop_oneof![
        (-2.0f64..2.0).prop_map(Observable::constant),
        any::<u64>().prop_map(|s| Observable::pair(test_fn(2, s))),
        (0usize..=4).prop_map(Observable::WickInt),
    ];
    leaf.prop_recursive(2, 6, 3, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 1..3).prop_map(Observable::Sum),
            prop::collection::vec(inner.clone(), 1..3).prop_map(Observable::Product),
            (inner, 1u32..3).prop_map(|(x, n)| x.powi(n)),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    /// The truncation error of the order-`k` series shrinks like `t^(k+1)`,
    /// and its leading coefficient is the next series coefficient.
    #[test]
    fn series_truncation_order(f in observable(), seed in any::<u64>(), plus in any::<bool>(), k in 0usize..4) {
        let cutoff = 2;
        let w = if plus { Well::Plus } else { Well::Minus };
        let v = field(cutoff, seed);
        let q = taylor_q(&f, w, &v, k + 2, cutoff, DMode::Cutoff, Exponent::Full).unwrap();
        let truncated = Series::from_coeffs(k, &q.coeffs()[..=k]);
        let (next, after) = (q.coeffs()[k + 1], q.coeffs()[k + 2]);
        let residual = |t: f64| density_g(&f, w, &v, t * t, cutoff, DMode::Cutoff).unwrap() - truncated.eval(t);
        let (e1, e2) = (residual(0.01), residual(0.001));
        let scale = 1.0 + density_g(&f, w, &v, 0.0, cutoff, DMode::Cutoff).unwrap().abs();
        // Below this the residual is rounding and the series is exact to working precision.
        if e2.abs() > 1e-12 * scale {
            // The two-point ratio only measures the order when the leading
            // term dominates at the coarser t.
            if after.abs() * 0.01 <= 0.5 * next.abs() {
                let order = (e1 / e2).abs().log10();
                prop_assert!(order >= k as f64 + 0.7, "k={k} order={order} residuals {e1:e} {e2:e}");
            }
            let t = 0.001f64;
            let lead = e2 / t.powi(k as i32 + 1);
            // The next term shifts the ratio by about `after * t`; rounding in
            // the residual is amplified by `t^-(k+1)`.
            let tol = 0.01 * next.abs() + 2.0 * after.abs() * t + 1e-14 * scale / t.powi(k as i32 + 1);
            prop_assert!((lead - next).abs() <= tol, "k={k} leading {lead} vs {next}, next term {after}");
        }
    }
}

#[test]
fn odd_observables_flip_sign_between_wells() {
    let cutoff = 3;
    let f = Observable::pair(test_fn(cutoff, 1)).powi(3);
    let v = field(cutoff, 2);
    let plus = taylor_q(&f, Well::Plus, &v, 3, cutoff, DMode::Cutoff, Exponent::Full).unwrap();
    let minus = taylor_q(&f, Well::Minus, &v.scaled(-1.0), 3, cutoff, DMode::Cutoff, Exponent::Full).unwrap();
    for (a, b) in plus.coeffs().iter().zip(minus.coeffs()) {
        assert!((a + b).abs() < 1e-12 * (1.0 + a.abs()));
    }
}
