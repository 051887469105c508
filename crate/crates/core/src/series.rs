//! Power series in one variable truncated at a fixed order.

/// `sum_j coeffs[j] t^j`, with all products truncated at `order`.
#[derive(Clone, Debug, PartialEq)]
pub struct Series {
    coeffs: Vec<f64>,
}

impl Series {
    pub fn zero(order: usize) -> Self {
        Self { coeffs: vec![0.0; order + 1] }
    }

    pub fn constant(order: usize, c: f64) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = c;
        s
    }

    /// Keeps the terms up to `order` of the given coefficients.
    pub fn from_coeffs(order: usize, coeffs: &[f64]) -> Self {
        let mut s = Self::zero(order);
        for (a, &c) in s.coeffs.iter_mut().zip(coeffs) {
            *a = c;
        }
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn add(&self, other: &Series) -> Series {
        Series { coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect() }
    }

    pub fn mul(&self, other: &Series) -> Series {
        let k = self.order();
        let mut out = Series::zero(k);
        for (i, a) in self.coeffs.iter().enumerate() {
            if *a == 0.0 {
                continue;
            }
            for (j, b) in other.coeffs.iter().take(k + 1 - i).enumerate() {
                out.coeffs[i + j] += a * b;
            }
        }
        out
    }

    /// `exp(s)` for a series with zero constant term, from `e' = s' e`.
    pub fn exp_of_nilpotent(&self) -> Series {
        debug_assert_eq!(self.coeffs[0], 0.0);
        let k = self.order();
        let mut e = Series::zero(k);
        e.coeffs[0] = 1.0;
        for m in 1..=k {
            let acc: f64 = (1..=m).map(|j| j as f64 * self.coeffs[j] * e.coeffs[m - j]).sum();
            e.coeffs[m] = acc / m as f64;
        }
        e
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c)
    }
}
