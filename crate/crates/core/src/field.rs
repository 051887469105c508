//! Periodic scalar fields on the two-torus in spectral and grid form.
//!
//! Spectral coefficients live on the Euclidean frequency ball `|n| <= N` and
//! are stored densely on the `(2N+1) x (2N+1)` square; entries outside the
//! ball are kept at zero. The torus carries the normalized measure
//! `(2 pi)^-2 dx`, so the zero mode is the spatial mean and the grid mean is
//! the integral.

use std::io::{Read, Write};
use std::sync::Arc;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rustfft::{Fft, FftPlanner};

use crate::error::{invalid, Error, Result};

pub type Complex = rustfft::num_complex::Complex64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Frequency {
    pub n1: i64,
    pub n2: i64,
}

impl Frequency {
    pub const ZERO: Frequency = Frequency { n1: 0, n2: 0 };

    pub const fn new(n1: i64, n2: i64) -> Self {
        Self { n1, n2 }
    }

    pub fn norm_sq(self) -> i64 {
        self.n1 * self.n1 + self.n2 * self.n2
    }

    pub fn admitted(self, cutoff: usize) -> bool {
        self.norm_sq() <= (cutoff * cutoff) as i64
    }

    pub fn neg(self) -> Self {
        Self::new(-self.n1, -self.n2)
    }

    /// One representative of each `{n, -n}` pair: `n1 > 0`, or `n1 == 0 && n2 > 0`.
    pub fn is_half_plane(self) -> bool {
        self.n1 > 0 || (self.n1 == 0 && self.n2 > 0)
    }

    /// Dyadic shell index: 0 for `|n| <= 1`, otherwise the `j` with
    /// `2^(j-1) < |n| <= 2^j`.
    pub fn shell(self) -> u32 {
        let r2 = self.norm_sq();
        let mut j = 0u32;
        while (1i64 << (2 * j)) < r2 {
            j += 1;
        }
        j
    }
}

/// All frequencies of the ball `|n| <= cutoff`, in row-major order.
pub fn ball(cutoff: usize) -> impl Iterator<Item = Frequency> {
    let c = cutoff as i64;
    (-c..=c).flat_map(move |n1| {
        (-c..=c)
            .map(move |n2| Frequency::new(n1, n2))
            .filter(move |f| f.admitted(cutoff))
    })
}

/// Half-plane representatives of the nonzero frequencies in the ball.
pub fn half_ball(cutoff: usize) -> impl Iterator<Item = Frequency> {
    ball(cutoff).filter(|f| f.is_half_plane())
}

/// Number of frequencies in the ball.
pub fn ball_size(cutoff: usize) -> usize {
    ball(cutoff).count()
}

/// Smallest admissible grid for a cutoff.
pub fn min_grid(cutoff: usize) -> usize {
    2 * cutoff + 2
}

/// Grid size on which quartic products of a cutoff-`N` field are alias free.
pub fn default_grid(cutoff: usize) -> usize {
    4 * cutoff + 4
}

/// Real field given by Hermitian-symmetric Fourier coefficients on the ball.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralField {
    cutoff: usize,
    coeffs: Vec<Complex>,
}

impl SpectralField {
    pub fn zeros(cutoff: usize) -> Self {
        let side = 2 * cutoff + 1;
        Self { cutoff, coeffs: vec![Complex::new(0.0, 0.0); side * side] }
    }

    pub fn constant(cutoff: usize, value: f64) -> Self {
        let mut f = Self::zeros(cutoff);
        f.set(Frequency::ZERO, Complex::new(value, 0.0));
        f
    }

    /// Builds a field from its values on the half-plane representatives and the
    /// zero mode; the remaining coefficients follow by conjugation.
    pub fn from_fn(cutoff: usize, mut coeff: impl FnMut(Frequency) -> Complex) -> Self {
        let mut f = Self::zeros(cutoff);
        f.set(Frequency::ZERO, coeff(Frequency::ZERO));
        for n in half_ball(cutoff) {
            f.set(n, coeff(n));
        }
        f
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    fn index(&self, n: Frequency) -> usize {
        let c = self.cutoff as i64;
        ((n.n1 + c) * (2 * c + 1) + (n.n2 + c)) as usize
    }

    pub fn get(&self, n: Frequency) -> Complex {
        if n.admitted(self.cutoff) {
            self.coeffs[self.index(n)]
        } else {
            Complex::new(0.0, 0.0)
        }
    }

    /// Sets `coeff(n)` and `coeff(-n) = conj(coeff(n))`; the zero mode keeps only
    /// the real part. Frequencies outside the ball are ignored.
    pub fn set(&mut self, n: Frequency, value: Complex) {
        if !n.admitted(self.cutoff) {
            return;
        }
        if n == Frequency::ZERO {
            let i = self.index(n);
            self.coeffs[i] = Complex::new(value.re, 0.0);
            return;
        }
        let i = self.index(n);
        let j = self.index(n.neg());
        self.coeffs[i] = value;
        self.coeffs[j] = value.conj();
    }

    pub fn zero_mode(&self) -> f64 {
        self.get(Frequency::ZERO).re
    }

    /// `(n, coeff(n))` over the whole ball.
    pub fn iter(&self) -> impl Iterator<Item = (Frequency, Complex)> + '_ {
        ball(self.cutoff).map(move |n| (n, self.coeffs[self.index(n)]))
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self { cutoff: self.cutoff, coeffs: self.coeffs.iter().map(|c| c * s).collect() }
    }

    /// Adds a constant to the zero mode.
    pub fn shifted(&self, c: f64) -> Self {
        let mut f = self.clone();
        let i = f.index(Frequency::ZERO);
        f.coeffs[i].re += c;
        f
    }

    /// Coefficient-wise `self + s * other`, on the larger of the two cutoffs.
    pub fn add_scaled(&self, other: &SpectralField, s: f64) -> Self {
        let cutoff = self.cutoff.max(other.cutoff);
        let mut out = Self::zeros(cutoff);
        for n in ball(cutoff) {
            let i = out.index(n);
            out.coeffs[i] = self.get(n) + other.get(n) * s;
        }
        out
    }

    /// Real pairing `<f, g> = int f g dx = sum_n f(n) conj(g(n))`.
    pub fn pairing(&self, other: &SpectralField) -> f64 {
        let cutoff = self.cutoff.min(other.cutoff);
        ball(cutoff).map(|n| (self.get(n) * other.get(n).conj()).re).sum()
    }

    /// Largest deviation from Hermitian symmetry; zero for fields built here.
    pub fn hermitian_defect(&self) -> f64 {
        self.iter()
            .map(|(n, c)| (c - self.get(n.neg()).conj()).norm())
            .fold(0.0, f64::max)
    }
}

/// Frequency projector `P_N`.
pub fn project(f: &SpectralField, cutoff: usize) -> SpectralField {
    if f.cutoff() <= cutoff {
        return f.clone();
    }
    let mut out = SpectralField::zeros(cutoff);
    for n in ball(cutoff) {
        let i = out.index(n);
        out.coeffs[i] = f.get(n);
    }
    out
}

/// Real samples on the uniform `M x M` grid `x_jk = (2 pi j / M, 2 pi k / M)`,
/// stored row-major in `j`.
#[derive(Clone, Debug, PartialEq)]
pub struct GridField {
    size: usize,
    values: Vec<f64>,
}

impl GridField {
    pub fn new(size: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != size * size {
            return Err(invalid("values", format!("expected {} samples, got {}", size * size, values.len())));
        }
        Ok(Self { size, values })
    }

    pub fn constant(size: usize, value: f64) -> Self {
        Self { size, values: vec![value; size * size] }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn at(&self, j: usize, k: usize) -> f64 {
        self.values[j * self.size + k]
    }

    /// Integral under the normalized measure; exact for trigonometric
    /// polynomials the grid resolves.
    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self { size: self.size, values: self.values.iter().map(|&v| f(v)).collect() }
    }
}

/// Planned 2-d DFT pair for one grid size.
#[derive(Clone)]
pub struct Transform {
    size: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Transform {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Transform").field("size", &self.size).finish()
    }
}

impl Transform {
    pub fn new(size: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self { size, forward: planner.plan_fft_forward(size), inverse: planner.plan_fft_inverse(size) }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn check(&self, cutoff: usize) -> Result<()> {
        if self.size < min_grid(cutoff) {
            return Err(Error::GridTooSmall { grid: self.size, cutoff, min: min_grid(cutoff) });
        }
        Ok(())
    }

    fn slot(&self, n: Frequency) -> usize {
        let m = self.size as i64;
        (n.n1.rem_euclid(m) * m + n.n2.rem_euclid(m)) as usize
    }

    fn transform_2d(&self, buf: &mut [Complex], fft: &Arc<dyn Fft<f64>>) {
        let m = self.size;
        let mut scratch = vec![Complex::new(0.0, 0.0); fft.get_inplace_scratch_len()];
        fft.process_with_scratch(buf, &mut scratch);
        transpose(buf, m);
        fft.process_with_scratch(buf, &mut scratch);
        transpose(buf, m);
    }

    /// Evaluates the spectral sum at the grid points.
    pub fn to_grid(&self, f: &SpectralField) -> Result<GridField> {
        self.check(f.cutoff())?;
        Ok(self.to_grid_filtered(f, |_| true))
    }

    /// Grid values of the part of `f` on frequencies accepted by `keep`.
    pub(crate) fn to_grid_filtered(&self, f: &SpectralField, keep: impl Fn(Frequency) -> bool) -> GridField {
        let m = self.size;
        let mut buf = vec![Complex::new(0.0, 0.0); m * m];
        for (n, c) in f.iter() {
            if keep(n) {
                buf[self.slot(n)] = c;
            }
        }
        self.transform_2d(&mut buf, &self.inverse);
        GridField { size: m, values: buf.iter().map(|c| c.re).collect() }
    }

    /// Fourier coefficients of grid data on the ball `|n| <= cutoff`; the result
    /// is Hermitian by construction.
    pub fn to_spectral(&self, g: &GridField, cutoff: usize) -> Result<SpectralField> {
        self.check(cutoff)?;
        if g.size() != self.size {
            return Err(invalid("grid", format!("transform is for size {}, field has {}", self.size, g.size())));
        }
        let m = self.size;
        let mut buf: Vec<Complex> = g.values().iter().map(|&v| Complex::new(v, 0.0)).collect();
        self.transform_2d(&mut buf, &self.forward);
        let scale = 1.0 / (m * m) as f64;
        Ok(SpectralField::from_fn(cutoff, |n| buf[self.slot(n)] * scale))
    }
}

fn transpose(buf: &mut [Complex], m: usize) {
    for i in 0..m {
        for j in (i + 1)..m {
            buf.swap(i * m + j, j * m + i);
        }
    }
}

pub fn to_grid(f: &SpectralField, size: usize) -> Result<GridField> {
    Transform::new(size).to_grid(f)
}

pub fn to_spectral(g: &GridField, cutoff: usize) -> Result<SpectralField> {
    Transform::new(g.size()).to_spectral(g, cutoff)
}

/// Minimizing constant fields of the double well.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Well {
    Plus,
    Minus,
}

impl Well {
    pub const ALL: [Well; 2] = [Well::Plus, Well::Minus];

    pub fn value(self) -> f64 {
        match self {
            Well::Plus => 1.0,
            Well::Minus => -1.0,
        }
    }
}

/// The three Gaussian reference measures, diagonal in Fourier space.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ReferenceMeasure {
    /// Massive free field, covariance `(1 - Laplacian)^-1`.
    Mu,
    /// Free field at temperature `eps`, covariance `eps (1 - Laplacian)^-1`.
    MuEps(f64),
    /// Hessian Gaussian at a well, covariance `(2 - Laplacian)^-1`.
    MuW(Well),
}

impl ReferenceMeasure {
    /// Precision `lambda_n` of mode `n`; the mode variance is `1 / lambda_n`.
    pub fn eigenvalue(self, n: Frequency) -> f64 {
        let k2 = n.norm_sq() as f64;
        match self {
            ReferenceMeasure::Mu => 1.0 + k2,
            ReferenceMeasure::MuEps(eps) => (1.0 + k2) / eps,
            ReferenceMeasure::MuW(_) => 2.0 + k2,
        }
    }
}

/// Seed plus stream id; distinct pairs give independent ChaCha streams.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RngStream {
    pub seed: u64,
    pub stream: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        Self { seed, stream }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }
}

/// Draws `coeff(n) = g_n / sqrt(lambda_n)` with standard complex `g_n`
/// (`E|g_n|^2 = 1`), `g_{-n} = conj(g_n)` and a real zero mode.
pub fn sample_gaussian<R: Rng + ?Sized>(measure: ReferenceMeasure, cutoff: usize, rng: &mut R) -> SpectralField {
    if let ReferenceMeasure::MuEps(eps) = measure {
        return sample_gaussian(ReferenceMeasure::Mu, cutoff, rng).scaled(eps.sqrt());
    }
    sample_diagonal(cutoff, |n| measure.eigenvalue(n), rng)
}

/// Centred Gaussian field with independent modes of precision `precision(n)`.
pub fn sample_diagonal<R: Rng + ?Sized>(
    cutoff: usize,
    precision: impl Fn(Frequency) -> f64,
    rng: &mut R,
) -> SpectralField {
    SpectralField::from_fn(cutoff, |n| {
        let sd = precision(n).sqrt().recip();
        if n == Frequency::ZERO {
            let x: f64 = rng.sample(StandardNormal);
            Complex::new(x * sd, 0.0)
        } else {
            let x: f64 = rng.sample(StandardNormal);
            let y: f64 = rng.sample(StandardNormal);
            Complex::new(x, y) * (sd * std::f64::consts::FRAC_1_SQRT_2)
        }
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NormKind {
    L2,
    H1,
    /// Sharp-annulus proxy for the Besov norm `C^{-eta}`.
    CMinus(f64),
}

pub fn norm(f: &SpectralField, kind: NormKind) -> f64 {
    match kind {
        NormKind::L2 => f.iter().map(|(_, c)| c.norm_sqr()).sum::<f64>().sqrt(),
        NormKind::H1 => f.iter().map(|(n, c)| (1.0 + n.norm_sq() as f64) * c.norm_sqr()).sum::<f64>().sqrt(),
        NormKind::CMinus(eta) => cminus_norm(&Transform::new(default_grid(f.cutoff())), f, eta),
    }
}

/// `max_j 2^{-eta j} sup_x |Delta_j f(x)|` with sharp dyadic annuli, the sup
/// taken over the transform's grid.
pub fn cminus_norm(transform: &Transform, f: &SpectralField, eta: f64) -> f64 {
    let top = f.iter().filter(|(_, c)| c.norm_sqr() > 0.0).map(|(n, _)| n.shell()).max();
    let Some(top) = top else { return 0.0 };
    (0..=top)
        .map(|j| {
            let g = transform.to_grid_filtered(f, |n| n.shell() == j);
            2f64.powf(-eta * j as f64) * g.sup_norm()
        })
        .fold(0.0, f64::max)
}

const SNAPSHOT_MAGIC: &[u8; 4] = b"PHI4";
pub const SNAPSHOT_VERSION: u16 = 1;

/// Writes `PHI4`, version (u16), cutoff (u32), grid size (u32), then the grid
/// values as little-endian f64, row-major.
pub fn write_snapshot<W: Write>(mut w: W, cutoff: usize, grid: &GridField) -> Result<()> {
    w.write_all(SNAPSHOT_MAGIC)?;
    w.write_all(&SNAPSHOT_VERSION.to_le_bytes())?;
    w.write_all(&(cutoff as u32).to_le_bytes())?;
    w.write_all(&(grid.size() as u32).to_le_bytes())?;
    for v in grid.values() {
        w.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_snapshot<R: Read>(mut r: R) -> Result<(usize, GridField)> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != SNAPSHOT_MAGIC {
        return Err(Error::Snapshot("wrong magic".into()));
    }
    let mut b2 = [0u8; 2];
    r.read_exact(&mut b2)?;
    let version = u16::from_le_bytes(b2);
    if version != SNAPSHOT_VERSION {
        return Err(Error::Snapshot(format!("unsupported version {version}")));
    }
    let mut b4 = [0u8; 4];
    r.read_exact(&mut b4)?;
    let cutoff = u32::from_le_bytes(b4) as usize;
    r.read_exact(&mut b4)?;
    let size = u32::from_le_bytes(b4) as usize;
    let mut values = Vec::with_capacity(size * size);
    let mut b8 = [0u8; 8];
    for _ in 0..size * size {
        r.read_exact(&mut b8)?;
        values.push(f64::from_le_bytes(b8));
    }
    Ok((cutoff, GridField::new(size, values)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn random_field(cutoff: usize, seed: u64) -> SpectralField {
        sample_gaussian(ReferenceMeasure::Mu, cutoff, &mut RngStream::new(seed, 0).rng())
    }

    fn two_cos_x1(cutoff: usize) -> SpectralField {
        let mut f = SpectralField::zeros(cutoff);
        f.set(Frequency::new(1, 0), Complex::new(1.0, 0.0));
        f
    }

    #[test]
    fn shells() {
        assert_eq!(Frequency::new(0, 0).shell(), 0);
        assert_eq!(Frequency::new(1, 0).shell(), 0);
        assert_eq!(Frequency::new(1, 1).shell(), 1);
        assert_eq!(Frequency::new(2, 0).shell(), 1);
        assert_eq!(Frequency::new(2, 1).shell(), 2);
        assert_eq!(Frequency::new(4, 0).shell(), 2);
        assert_eq!(Frequency::new(4, 1).shell(), 3);
    }

    #[test]
    fn ball_counts() {
        assert_eq!(ball_size(0), 1);
        assert_eq!(ball_size(1), 5);
        assert_eq!(ball_size(2), 13);
        assert_eq!(half_ball(2).count(), 6);
    }

    #[test]
    fn projection() {
        let f = random_field(6, 1);
        assert_eq!(project(&f, 8), f);
        assert_eq!(project(&project(&f, 3), 3), project(&f, 3));
        let mut g = SpectralField::zeros(3);
        g.set(Frequency::new(2, 0), Complex::new(0.7, 0.1));
        let p = project(&g, 1);
        assert_eq!(p.cutoff(), 1);
        assert!(p.iter().all(|(_, c)| c == Complex::new(0.0, 0.0)));
    }

    #[test]
    fn constant_field_transforms() {
        let f = SpectralField::constant(3, 1.7);
        let g = to_grid(&f, default_grid(3)).unwrap();
        assert!(g.values().iter().all(|&v| (v - 1.7).abs() < 1e-14));
        let back = to_spectral(&g, 3).unwrap();
        assert!((back.zero_mode() - 1.7).abs() < 1e-14);
        assert!(back.iter().filter(|(n, _)| *n != Frequency::ZERO).all(|(_, c)| c.norm() < 1e-14));
    }

    #[test]
    fn cosine_transform() {
        let m = 16;
        let g = GridField::new(
            m,
            (0..m * m).map(|i| 2.0 * (2.0 * std::f64::consts::PI * (i / m) as f64 / m as f64).cos()).collect(),
        )
        .unwrap();
        let f = to_spectral(&g, 3).unwrap();
        for (n, c) in f.iter() {
            let expect = if n == Frequency::new(1, 0) || n == Frequency::new(-1, 0) { 1.0 } else { 0.0 };
            assert!((c - Complex::new(expect, 0.0)).norm() < 1e-13, "{n:?} {c}");
        }
    }

    #[test]
    fn round_trip_cutoff_8() {
        let f = random_field(8, 7);
        let t = Transform::new(64);
        let back = t.to_spectral(&t.to_grid(&f).unwrap(), 8).unwrap();
        let err = f.iter().map(|(n, c)| (c - back.get(n)).norm()).fold(0.0, f64::max);
        assert!(err < 1e-12, "{err}");
    }

    #[test]
    fn grid_too_small_rejected() {
        let f = random_field(4, 1);
        assert!(matches!(to_grid(&f, 9), Err(Error::GridTooSmall { .. })));
        assert!(to_grid(&f, 10).is_ok());
    }

    #[test]
    fn norms_of_simple_fields() {
        let z = SpectralField::zeros(4);
        for k in [NormKind::L2, NormKind::H1, NormKind::CMinus(0.5)] {
            assert_eq!(norm(&z, k), 0.0);
        }
        let c = SpectralField::constant(4, -2.5);
        for k in [NormKind::L2, NormKind::H1, NormKind::CMinus(0.5)] {
            assert!((norm(&c, k) - 2.5).abs() < 1e-12);
        }
        let f = two_cos_x1(3);
        assert!((norm(&f, NormKind::L2) - 2f64.sqrt()).abs() < 1e-14);
        assert!((norm(&f, NormKind::H1) - 2.0).abs() < 1e-14);
        assert!((norm(&f, NormKind::CMinus(1.0)) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn parseval_and_realness() {
        let f = random_field(5, 3);
        let g = to_grid(&f, min_grid(5)).unwrap();
        let l2 = norm(&f, NormKind::L2);
        let mean_sq = g.values().iter().map(|v| v * v).sum::<f64>() / g.values().len() as f64;
        assert!((l2 * l2 - mean_sq).abs() < 1e-10);
        assert!(f.hermitian_defect() == 0.0);
    }

    #[test]
    fn eps_sample_is_scaled_mu_sample() {
        let s = RngStream::new(11, 4);
        let a = sample_gaussian(ReferenceMeasure::Mu, 5, &mut s.rng());
        let b = sample_gaussian(ReferenceMeasure::MuEps(0.3), 5, &mut s.rng());
        assert_eq!(a.scaled(0.3f64.sqrt()), b);
    }

    #[test]
    fn streams_reproduce_and_differ() {
        let a = sample_gaussian(ReferenceMeasure::Mu, 3, &mut RngStream::new(5, 1).rng());
        let b = sample_gaussian(ReferenceMeasure::Mu, 3, &mut RngStream::new(5, 1).rng());
        let c = sample_gaussian(ReferenceMeasure::Mu, 3, &mut RngStream::new(5, 2).rng());
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn snapshot_round_trip() {
        let g = to_grid(&random_field(3, 2), 8).unwrap();
        let mut bytes = Vec::new();
        write_snapshot(&mut bytes, 3, &g).unwrap();
        assert_eq!(&bytes[..4], b"PHI4");
        assert_eq!(bytes.len(), 4 + 2 + 4 + 4 + 8 * 64);
        let (n, back) = read_snapshot(bytes.as_slice()).unwrap();
        assert_eq!(n, 3);
        assert_eq!(back, g);
        bytes[0] = b'X';
        assert!(read_snapshot(bytes.as_slice()).is_err());
    }
}
