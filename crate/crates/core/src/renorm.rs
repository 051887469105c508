//! Wick calculus at finite cutoff: tadpole constants, Hermite-renormalized
//! powers, change of reference variance, the renormalized potential and the
//! fluctuation functionals around a well.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{self, default_grid, project, GridField, SpectralField, Transform};
use crate::stats::KahanSum;

/// Hermite polynomial `H_k(x; sigma)` with variance parameter `sigma`.
pub fn hermite(k: usize, x: f64, sigma: f64) -> Result<f64> {
    let x2 = x * x;
    Ok(match k {
        0 => 1.0,
        1 => x,
        2 => x2 - sigma,
        3 => x * (x2 - 3.0 * sigma),
        4 => x2 * x2 - 6.0 * sigma * x2 + 3.0 * sigma * sigma,
        _ => return Err(Error::UnsupportedDegree(k)),
    })
}

/// Tadpole constants of the free field and the Hessian Gaussian at cutoff `N`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WickConstants {
    pub cutoff: usize,
    /// `sum 1 / (1 + |n|^2)`
    pub c: f64,
    /// `sum 1 / (2 + |n|^2)`
    pub c_w: f64,
    /// `c - c_w`, summed directly as `sum 1 / ((1 + |n|^2)(2 + |n|^2))`.
    pub d: f64,
}

/// Cutoff at which the limit value of `d` is taken.
pub const D_LIMIT_CUTOFF: usize = 2000;

/// Applies `term(|n|^2)` over the ball row by row and returns compensated sums.
/// Rows are reduced in a fixed order, so the result does not depend on the
/// thread count.
pub(crate) fn ball_sums<const K: usize>(cutoff: usize, term: impl Fn(f64) -> [f64; K] + Sync) -> [f64; K] {
    let c = cutoff as i64;
    let rows: Vec<[f64; K]> = (-c..=c)
        .into_par_iter()
        .map(|n1| {
            let span = ((c * c - n1 * n1) as f64).sqrt().floor() as i64;
            let mut acc = [KahanSum::new(); K];
            for n2 in -span..=span {
                let vals = term((n1 * n1 + n2 * n2) as f64);
                for (a, v) in acc.iter_mut().zip(vals) {
                    a.add(v);
                }
            }
            acc.map(|a| a.value())
        })
        .collect();
    let mut total = [KahanSum::new(); K];
    for row in rows {
        for (t, v) in total.iter_mut().zip(row) {
            t.add(v);
        }
    }
    total.map(|t| t.value())
}

pub fn wick_constants(cutoff: usize) -> WickConstants {
    let [c, c_w, d] = ball_sums(cutoff, |k2| [1.0 / (1.0 + k2), 1.0 / (2.0 + k2), 1.0 / ((1.0 + k2) * (2.0 + k2))]);
    WickConstants { cutoff, c, c_w, d }
}

/// `d` in limit mode: the partial sum at [`D_LIMIT_CUTOFF`].
pub fn d_limit() -> f64 {
    wick_constants(D_LIMIT_CUTOFF).d
}

/// Certified upper bound on `sum_{|n| > N} (1 + |n|^2)^-2`.
///
/// Each lattice point is charged to its unit cell, on which `|x| - 1/sqrt 2`
/// does not exceed `|n|`; integrating the decreasing summand over the shifted
/// exterior gives `pi / (1 + a^2) + 2 pi s / (3 a^3)` with `a = N - sqrt 2`.
/// Cutoffs below 4 add the exact shell sum up to 4.
pub fn quartic_tail_bound(cutoff: usize) -> f64 {
    const START: usize = 4;
    if cutoff < START {
        let explicit: f64 = field::ball(START)
            .filter(|n| !n.admitted(cutoff))
            .map(|n| (1.0 + n.norm_sq() as f64).powi(-2))
            .sum();
        return explicit + quartic_tail_bound(START);
    }
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let a = cutoff as f64 - 2.0 * s;
    std::f64::consts::PI / (1.0 + a * a) + 2.0 * std::f64::consts::PI * s / (3.0 * a.powi(3))
}

/// Certified bound on `d_inf - d_N`.
pub fn d_tail_bound(cutoff: usize) -> f64 {
    quartic_tail_bound(cutoff)
}

/// The enhanced data set `(v, :v^2:, :v^3:, :v^4:)` on a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct WickBundle {
    pub v: GridField,
    pub p2: GridField,
    pub p3: GridField,
    pub p4: GridField,
    pub sigma: f64,
}

pub fn wick_powers(v: &GridField, sigma: f64) -> Result<WickBundle> {
    if sigma < 0.0 {
        return Err(Error::NegativeVariance(sigma));
    }
    Ok(WickBundle {
        v: v.clone(),
        p2: v.map(|x| x * x - sigma),
        p3: v.map(|x| x * (x * x - 3.0 * sigma)),
        p4: v.map(|x| {
            let x2 = x * x;
            x2 * x2 - 6.0 * sigma * x2 + 3.0 * sigma * sigma
        }),
        sigma,
    })
}

/// Re-expresses the Wick powers relative to the variance `sigma - d`.
pub fn convert_reference(b: &WickBundle, d: f64) -> Result<WickBundle> {
    let sigma = b.sigma - d;
    if sigma < 0.0 {
        return Err(Error::NegativeVariance(sigma));
    }
    let zip = |a: &GridField, c: &GridField, f: &dyn Fn(f64, f64) -> f64| {
        GridField::new(a.size(), a.values().iter().zip(c.values()).map(|(&x, &y)| f(x, y)).collect())
    };
    let p2 = b.p2.map(|x| x + d);
    let p3 = zip(&b.p3, &b.v, &|h3, x| h3 + 3.0 * d * x)?;
    let p4 = zip(&b.p4, &p2, &|h4, h2| h4 + 6.0 * d * h2 - 3.0 * d * d)?;
    Ok(WickBundle { v: b.v.clone(), p2, p3, p4, sigma })
}

/// Value of the renormalized potential split into its two parts.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PotentialValue {
    /// `1/4 int :phi^4: - 1/2 int :phi^2: + 1/4`
    pub v1: f64,
    /// `-1/2 int :phi^2:`
    pub v2: f64,
    pub total: f64,
}

impl PotentialValue {
    pub fn from_bundle(b: &WickBundle) -> Self {
        let i4 = b.p4.mean();
        let i2 = b.p2.mean();
        let v1 = 0.25 * i4 - 0.5 * i2 + 0.25;
        let v2 = -0.5 * i2;
        Self { v1, v2, total: v1 + v2 }
    }
}

/// Renormalized potential of `P_N phi` with Wick variance `sigma`, by grid
/// quadrature on the alias-free grid.
pub fn potential_v(phi: &SpectralField, cutoff: usize, sigma: f64) -> Result<PotentialValue> {
    potential_v_on(&Transform::new(default_grid(cutoff)), phi, cutoff, sigma)
}

/// As [`potential_v`] on a caller-supplied grid. Grids below `4N + 1` alias
/// the quartic term and are rejected.
pub fn potential_v_on(t: &Transform, phi: &SpectralField, cutoff: usize, sigma: f64) -> Result<PotentialValue> {
    if t.size() < 4 * cutoff + 1 {
        return Err(Error::GridTooSmall { grid: t.size(), cutoff, min: 4 * cutoff + 1 });
    }
    let g = t.to_grid(&project(phi, cutoff))?;
    Ok(PotentialValue::from_bundle(&wick_powers(&g, sigma)?))
}

/// `(H3, H4)` of a bundle taken relative to `c_w`, with `d = c - c_w`:
/// `H4 = int :v^4:_w - 6 d int :v^2:_w`, `H3 = int :v^3:_w - 3 d int v`.
pub fn h3_h4(b: &WickBundle, d: f64) -> (f64, f64) {
    let h4 = b.p4.mean() - 6.0 * d * b.p2.mean();
    let h3 = b.p3.mean() - 3.0 * d * b.v.mean();
    (h3, h4)
}

/// `C^{-eta}` proxy norm of grid data, through its trigonometric interpolant.
fn grid_cminus(t: &Transform, g: &GridField, eta: f64) -> Result<f64> {
    let cutoff = (t.size() - 2) / 2;
    Ok(field::cminus_norm(t, &t.to_spectral(g, cutoff)?, eta))
}

/// Homogeneous norm `|v| + |:v^2:|^(1/2) + |:v^3:|^(1/3) + |:v^4:|^(1/4)` with
/// the `C^{-eta}` proxy in each slot.
pub fn model_norm(b: &WickBundle, eta: f64) -> Result<f64> {
    let t = Transform::new(b.v.size());
    model_norm_on(&t, b, eta)
}

pub fn model_norm_on(t: &Transform, b: &WickBundle, eta: f64) -> Result<f64> {
    Ok(grid_cminus(t, &b.v, eta)?
        + grid_cminus(t, &b.p2, eta)?.sqrt()
        + grid_cminus(t, &b.p3, eta)?.cbrt()
        + grid_cminus(t, &b.p4, eta)?.powf(0.25))
}
