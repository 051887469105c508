//! Renormalized (Carleman-Fredholm) determinant of the Gaussian change of
//! measure at a well, and the resulting well weights.

use std::io::Write;

use crate::error::{invalid, Result};
use crate::fmt_f64;
use crate::field::Well;
use crate::renorm::{ball_sums, d_tail_bound, quartic_tail_bound, wick_constants};

/// `sum_{|n| <= N} log(1 + 1 / (1 + |n|^2))`.
///
/// The Hessian at either well is `2 - Laplacian`, so the value does not
/// depend on the well.
pub fn log_fredholm(cutoff: usize, _well: Well) -> f64 {
    let [s] = ball_sums(cutoff, |k2| [(1.0 / (1.0 + k2)).ln_1p()]);
    s
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DeterminantResult {
    pub cutoff: usize,
    pub eps: f64,
    pub log_fredholm: f64,
    /// `c_N / 2 - log_fredholm / 2 - (3 eps / 4) d_N^2`
    pub log_theta: f64,
    /// Certified bound on `|log theta_inf - log theta_N|`.
    pub tail_bound: f64,
}

impl DeterminantResult {
    pub fn theta(&self) -> f64 {
        self.log_theta.exp()
    }
}

/// The renormalized determinant at cutoff `N`.
///
/// The divergent pieces are never formed separately: the trace correction is
/// summed term by term as `x - log(1 + x)`, `x = 1 / lambda_n`, which is
/// non-negative and at most `x^2 / 2`.
pub fn theta_re(cutoff: usize, _well: Well, eps: f64) -> Result<DeterminantResult> {
    if !(eps >= 0.0) {
        return Err(invalid("eps", format!("must be non-negative, got {eps}")));
    }
    let [log_fred, compensated] = ball_sums(cutoff, |k2| {
        let x = 1.0 / (1.0 + k2);
        [x.ln_1p(), x - x.ln_1p()]
    });
    let d = wick_constants(cutoff).d;
    let log_theta = 0.5 * compensated - 0.75 * eps * d * d;
    let det_tail = 0.25 * quartic_tail_bound(cutoff);
    let dt = d_tail_bound(cutoff);
    let tail_bound = det_tail + 0.75 * eps * dt * (2.0 * d + dt);
    Ok(DeterminantResult { cutoff, eps, log_fredholm: log_fred, log_theta, tail_bound })
}

/// Determinant in limit mode, at the cutoff where the `d` limit is taken.
pub fn theta_re_limit(well: Well, eps: f64) -> Result<DeterminantResult> {
    theta_re(crate::renorm::D_LIMIT_CUTOFF, well, eps)
}

/// Limiting masses `b(w) = theta(w) / sum theta`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeightTable {
    pub plus: f64,
    pub minus: f64,
}

impl WeightTable {
    pub fn get(&self, w: Well) -> f64 {
        match w {
            Well::Plus => self.plus,
            Well::Minus => self.minus,
        }
    }
}

pub fn weights_b(theta_plus: f64, theta_minus: f64) -> Result<WeightTable> {
    if !(theta_plus > 0.0) {
        return Err(invalid("theta_plus", format!("must be positive, got {theta_plus}")));
    }
    if !(theta_minus > 0.0) {
        return Err(invalid("theta_minus", format!("must be positive, got {theta_minus}")));
    }
    let total = theta_plus + theta_minus;
    Ok(WeightTable { plus: theta_plus / total, minus: theta_minus / total })
}

pub fn write_csv<W: Write>(mut w: W, rows: &[DeterminantResult]) -> Result<()> {
    writeln!(w, "N,log_fredholm,log_theta,tail_bound")?;
    for r in rows {
        writeln!(w, "{},{},{},{}", r.cutoff, fmt_f64(r.log_fredholm), fmt_f64(r.log_theta), fmt_f64(r.tail_bound))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::ball;

    #[test]
    fn fredholm_small_cutoffs() {
        assert!((log_fredholm(0, Well::Plus) - std::f64::consts::LN_2).abs() < 1e-15);
        let expect = std::f64::consts::LN_2 + 4.0 * 1.5f64.ln();
        assert!((log_fredholm(1, Well::Minus) - expect).abs() < 1e-14);
        assert!((expect - 2.315007).abs() < 1e-6);
    }

    #[test]
    fn fredholm_diverges_logarithmically() {
        let diff = log_fredholm(2048, Well::Plus) - log_fredholm(1024, Well::Plus);
        let expect = 2.0 * std::f64::consts::PI * std::f64::consts::LN_2;
        assert!((diff / expect - 1.0).abs() < 0.02);
    }

    #[test]
    fn theta_at_zero_cutoff() {
        let r = theta_re(0, Well::Plus, 0.0).unwrap();
        assert!((r.log_theta - (0.5 - 0.5 * std::f64::consts::LN_2)).abs() < 1e-15);
        assert!((r.log_theta - 0.153426).abs() < 1e-6);
        assert!((r.theta() - 1.165821).abs() < 1e-6);
        let r = theta_re(0, Well::Plus, 0.1).unwrap();
        assert!((r.log_theta - (0.5 - 0.5 * std::f64::consts::LN_2 - 0.01875)).abs() < 1e-15);
        assert!(theta_re(0, Well::Plus, -1.0).is_err());
    }

    #[test]
    fn compensated_split_is_bracketed() {
        for n in [0, 1, 3, 8, 30] {
            let k = wick_constants(n);
            let r = theta_re(n, Well::Plus, 0.0).unwrap();
            let direct = 0.5 * k.c - 0.5 * r.log_fredholm;
            assert!((direct - r.log_theta).abs() < 1e-12);
            let quartic: f64 = ball(n).map(|f| (1.0 + f.norm_sq() as f64).powi(-2)).sum();
            assert!(r.log_theta >= 0.0 && r.log_theta <= 0.25 * quartic);
        }
    }

    #[test]
    fn increments_within_certified_tails() {
        for eps in [0.0, 0.1] {
            let rs: Vec<_> = (4..=11).map(|p| theta_re(1 << p, Well::Plus, eps).unwrap()).collect();
            for w in rs.windows(2) {
                assert!((w[1].log_theta - w[0].log_theta).abs() <= w[0].tail_bound);
            }
        }
    }

    #[test]
    fn weights() {
        assert_eq!(weights_b(0.7, 0.7).unwrap(), WeightTable { plus: 0.5, minus: 0.5 });
        let w = weights_b(2.0, 1.0).unwrap();
        assert!((w.plus - 2.0 / 3.0).abs() < 1e-15 && (w.minus - 1.0 / 3.0).abs() < 1e-15);
        assert!(weights_b(0.0, 1.0).is_err());
        assert!(weights_b(1.0, -1.0).is_err());
        let tp = theta_re(64, Well::Plus, 0.0).unwrap().theta();
        let tm = theta_re(64, Well::Minus, 0.0).unwrap().theta();
        assert_eq!(weights_b(tp, tm).unwrap(), WeightTable { plus: 0.5, minus: 0.5 });
    }

    #[test]
    fn csv_header() {
        let mut out = Vec::new();
        write_csv(&mut out, &[theta_re(0, Well::Plus, 0.0).unwrap()]).unwrap();
        let s = String::from_utf8(out).unwrap();
        assert!(s.starts_with("N,log_fredholm,log_theta,tail_bound\n0,"));
    }
}
