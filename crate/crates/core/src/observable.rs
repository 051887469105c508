//! Polynomial observables built from linear pairings and integrated Wick
//! powers.
//!
//! An observable is evaluated at a field `phi` together with the Wick variance
//! of `phi`'s reference measure. Because the primitives are polynomial, the
//! observable at `w + t v` (Wick variance `t^2 c`) is an exact polynomial in
//! `t`, which is what the expansion coefficients are built from.

use std::ops::{Add, Mul};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::{GridField, SpectralField};
use crate::renorm::hermite;
use crate::series::Series;

#[derive(Clone, Debug, PartialEq)]
pub enum Observable {
    Const(f64),
    /// `<phi, f>` for a fixed real test function.
    Pair(Arc<SpectralField>),
    /// `int :phi^k: dx`, `k <= 4`.
    WickInt(usize),
    Sum(Vec<Observable>),
    Product(Vec<Observable>),
    Pow(Box<Observable>, u32),
}

/// Behaviour under `phi -> -phi`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    fn times(self, other: Parity) -> Parity {
        if self == other {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

impl Observable {
    pub fn constant(c: f64) -> Self {
        Observable::Const(c)
    }

    pub fn pair(f: SpectralField) -> Self {
        Observable::Pair(Arc::new(f))
    }

    pub fn wickint(k: usize) -> Result<Self> {
        if k > 4 {
            return Err(Error::UnsupportedDegree(k));
        }
        Ok(Observable::WickInt(k))
    }

    pub fn powi(self, n: u32) -> Self {
        Observable::Pow(Box::new(self), n)
    }

    /// Polynomial degree in the field.
    pub fn degree(&self) -> usize {
        match self {
            Observable::Const(_) => 0,
            Observable::Pair(_) => 1,
            Observable::WickInt(k) => *k,
            Observable::Sum(xs) => xs.iter().map(Observable::degree).max().unwrap_or(0),
            Observable::Product(xs) => xs.iter().map(Observable::degree).sum(),
            Observable::Pow(x, n) => x.degree() * *n as usize,
        }
    }

    /// `None` when the observable mixes even and odd parts.
    pub fn parity(&self) -> Option<Parity> {
        match self {
            Observable::Const(_) => Some(Parity::Even),
            Observable::Pair(_) => Some(Parity::Odd),
            Observable::WickInt(k) => Some(if k % 2 == 0 { Parity::Even } else { Parity::Odd }),
            Observable::Sum(xs) => {
                let mut ps = xs.iter().map(Observable::parity);
                let first = ps.next().unwrap_or(Some(Parity::Even))?;
                ps.all(|p| p == Some(first)).then_some(first)
            }
            Observable::Product(xs) => {
                xs.iter().map(Observable::parity).try_fold(Parity::Even, |acc, p| p.map(|p| acc.times(p)))
            }
            Observable::Pow(x, n) => {
                let p = x.parity()?;
                Some(if n % 2 == 0 { Parity::Even } else { p })
            }
        }
    }

    /// Folds the expression tree into any commutative algebra, given the values
    /// of the leaves.
    pub fn fold<A: Clone>(
        &self,
        leaf: &mut impl FnMut(&Observable) -> A,
        add: &impl Fn(&A, &A) -> A,
        mul: &impl Fn(&A, &A) -> A,
    ) -> A {
        match self {
            Observable::Sum(xs) => {
                let mut acc: Option<A> = None;
                for x in xs {
                    let v = x.fold(leaf, add, mul);
                    acc = Some(match acc {
                        Some(a) => add(&a, &v),
                        None => v,
                    });
                }
                acc.unwrap_or_else(|| leaf(&Observable::Const(0.0)))
            }
            Observable::Product(xs) => {
                let mut acc: Option<A> = None;
                for x in xs {
                    let v = x.fold(leaf, add, mul);
                    acc = Some(match acc {
                        Some(a) => mul(&a, &v),
                        None => v,
                    });
                }
                acc.unwrap_or_else(|| leaf(&Observable::Const(1.0)))
            }
            Observable::Pow(x, n) => {
                let base = x.fold(leaf, add, mul);
                let mut acc = leaf(&Observable::Const(1.0));
                for _ in 0..*n {
                    acc = mul(&acc, &base);
                }
                acc
            }
            primitive => leaf(primitive),
        }
    }

    /// Value at `phi` (spectral and grid form of the same field), Wick powers
    /// taken with variance `wick_var`.
    pub fn eval(&self, phi: &SpectralField, grid: &GridField, wick_var: f64) -> f64 {
        let mut wick = [None::<f64>; 5];
        self.fold(
            &mut |p| match p {
                Observable::Const(c) => *c,
                Observable::Pair(f) => phi.pairing(f),
                Observable::WickInt(k) => *wick[*k].get_or_insert_with(|| wick_integral(grid, *k, wick_var)),
                _ => unreachable!("composite nodes are folded"),
            },
            &|a, b| a + b,
            &|a, b| a * b,
        )
    }

    /// Exact series in `t` of the observable at `w + t v`, where the Wick
    /// variance is `t^2 c`. `wick_v[l]` must hold `int H_l(v; c) dx` for
    /// `l = 0..=4`.
    pub fn series_at(&self, w: f64, v: &SpectralField, wick_v: &[f64; 5], order: usize) -> Series {
        self.fold(
            &mut |p| match p {
                Observable::Const(c) => Series::constant(order, *c),
                Observable::Pair(f) => {
                    let at_w = w * f.zero_mode();
                    Series::from_coeffs(order, &[at_w, v.pairing(f)])
                }
                Observable::WickInt(k) => {
                    let coeffs: Vec<f64> =
                        (0..=*k).map(|l| binomial(*k, l) * w.powi((*k - l) as i32) * wick_v[l]).collect();
                    Series::from_coeffs(order, &coeffs)
                }
                _ => unreachable!("composite nodes are folded"),
            },
            &|a, b| a.add(b),
            &|a, b| a.mul(b),
        )
    }
}

impl Add for Observable {
    type Output = Observable;
    fn add(self, rhs: Observable) -> Observable {
        Observable::Sum(vec![self, rhs])
    }
}

impl Mul for Observable {
    type Output = Observable;
    fn mul(self, rhs: Observable) -> Observable {
        Observable::Product(vec![self, rhs])
    }
}

fn binomial(k: usize, l: usize) -> f64 {
    (0..l).fold(1.0, |acc, i| acc * (k - i) as f64 / (i + 1) as f64)
}

/// `int H_k(g(x); sigma) dx` by grid quadrature.
pub fn wick_integral(grid: &GridField, k: usize, sigma: f64) -> f64 {
    let n = grid.values().len() as f64;
    grid.values().iter().map(|&x| hermite(k, x, sigma).expect("degree checked at construction")).sum::<f64>() / n
}

/// `[int H_l(g; sigma) dx for l in 0..=4]`.
pub fn wick_integrals(grid: &GridField, sigma: f64) -> [f64; 5] {
    let mut acc = [0.0; 5];
    for &x in grid.values() {
        let x2 = x * x;
        acc[0] += 1.0;
        acc[1] += x;
        acc[2] += x2 - sigma;
        acc[3] += x * (x2 - 3.0 * sigma);
        acc[4] += x2 * x2 - 6.0 * sigma * x2 + 3.0 * sigma * sigma;
    }
    let n = grid.values().len() as f64;
    acc.map(|a| a / n)
}
