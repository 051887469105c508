//! Plain-text `key=value` experiment configuration.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::field::{default_grid, Complex, Frequency, SpectralField};
use crate::observable::Observable;

/// Named observables built on the test function `f = 1 + cos x_1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ObservableChoice {
    One,
    Pair,
    PairSquared,
    Wick2,
    Wick4,
}

impl ObservableChoice {
    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "one" => Self::One,
            "pair" => Self::Pair,
            "pair2" => Self::PairSquared,
            "wick2" => Self::Wick2,
            "wick4" => Self::Wick4,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::One => "one",
            Self::Pair => "pair",
            Self::PairSquared => "pair2",
            Self::Wick2 => "wick2",
            Self::Wick4 => "wick4",
        }
    }

    pub fn build(self, cutoff: usize) -> Observable {
        match self {
            Self::One => Observable::constant(1.0),
            Self::Pair => Observable::pair(test_function(cutoff)),
            Self::PairSquared => Observable::pair(test_function(cutoff)).powi(2),
            Self::Wick2 => Observable::WickInt(2),
            Self::Wick4 => Observable::WickInt(4),
        }
    }
}

/// `f(x) = 1 + cos x_1`.
pub fn test_function(cutoff: usize) -> SpectralField {
    let mut f = SpectralField::constant(cutoff, 1.0);
    if cutoff >= 1 {
        f.set(Frequency::new(1, 0), Complex::new(0.5, 0.0));
    }
    f
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub command: String,
    /// Cutoff `N`.
    pub n: usize,
    /// Largest cutoff of the `constants` and `determinant` tables.
    pub nmax: usize,
    /// Grid size; `0` selects `4N + 4`.
    pub m: usize,
    pub eps: f64,
    pub eps_grid: Vec<f64>,
    pub k: usize,
    pub n_mc: usize,
    pub n_reweight: usize,
    pub dt: f64,
    pub steps: usize,
    pub burnin: usize,
    pub thin: usize,
    pub chains: usize,
    pub seed: u64,
    pub delta: f64,
    pub eta: f64,
    pub observable: ObservableChoice,
    pub out: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            command: String::new(),
            n: 8,
            nmax: 8,
            m: 0,
            eps: 0.05,
            eps_grid: vec![0.4, 0.2, 0.1, 0.05],
            k: 1,
            n_mc: 20_000,
            n_reweight: 20_000,
            dt: 0.01,
            steps: 20_000,
            burnin: 2_000,
            thin: 10,
            chains: 20,
            seed: 1,
            delta: 0.3,
            eta: 1.0,
            observable: ObservableChoice::PairSquared,
            out: PathBuf::from("out"),
        }
    }
}

/// Every accepted key, in manifest order.
pub const KEYS: [&str; 19] = [
    "command", "n", "nmax", "m", "eps", "eps_grid", "k", "n_mc", "n_reweight", "dt", "steps", "burnin", "thin",
    "chains", "seed", "delta", "eta", "observable", "out",
];

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value.trim().parse().map_err(|_| Error::Config(format!("bad value `{value}` for key `{key}`")))
}

impl ExperimentConfig {
    pub fn grid(&self) -> usize {
        if self.m == 0 {
            default_grid(self.n)
        } else {
            self.m
        }
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key.trim() {
            "command" => self.command = value.to_string(),
            "n" => self.n = parse(key, value)?,
            "nmax" => self.nmax = parse(key, value)?,
            "m" => self.m = parse(key, value)?,
            "eps" => self.eps = parse(key, value)?,
            "eps_grid" => {
                self.eps_grid = value.split(',').map(|v| parse(key, v)).collect::<Result<_>>()?;
            }
            "k" => self.k = parse(key, value)?,
            "n_mc" => self.n_mc = parse(key, value)?,
            "n_reweight" => self.n_reweight = parse(key, value)?,
            "dt" => self.dt = parse(key, value)?,
            "steps" => self.steps = parse(key, value)?,
            "burnin" => self.burnin = parse(key, value)?,
            "thin" => self.thin = parse(key, value)?,
            "chains" => self.chains = parse(key, value)?,
            "seed" => self.seed = parse(key, value)?,
            "delta" => self.delta = parse(key, value)?,
            "eta" => self.eta = parse(key, value)?,
            "observable" => {
                self.observable = ObservableChoice::parse(value)
                    .ok_or_else(|| Error::Config(format!("unknown observable `{value}` for key `observable`")))?
            }
            "out" => self.out = PathBuf::from(value),
            other => return Err(Error::Config(format!("unknown key `{other}`"))),
        }
        Ok(())
    }

    /// Applies a `key=value` file. Blank lines and `#` comments are skipped.
    pub fn load_str(&mut self, text: &str) -> Result<()> {
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key=value", lineno + 1)))?;
            self.set(key, value)?;
        }
        Ok(())
    }

    pub fn load_file(&mut self, path: &Path) -> Result<()> {
        self.load_str(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |key: &str, why: &str| Err(Error::Config(format!("key `{key}`: {why}")));
        // The tables are defined at zero temperature; sampling is not.
        let tables_only = matches!(self.command.as_str(), "constants" | "determinant");
        if !(self.eps > 0.0 || tables_only && self.eps == 0.0) {
            return bad("eps", "must be positive");
        }
        if self.eps_grid.iter().any(|e| !(*e > 0.0)) {
            return bad("eps_grid", "entries must be positive");
        }
        if self.m != 0 && self.m < 4 * self.n + 1 {
            return bad("m", "grid must be at least 4N + 1");
        }
        if !(self.dt > 0.0) {
            return bad("dt", "must be positive");
        }
        if self.thin == 0 {
            return bad("thin", "must be positive");
        }
        if !(self.delta > 0.0) {
            return bad("delta", "must be positive");
        }
        if !(self.eta > 0.0) {
            return bad("eta", "must be positive");
        }
        if self.n_mc < 2 {
            return bad("n_mc", "need at least two samples");
        }
        if self.n_reweight == 0 {
            return bad("n_reweight", "must be positive");
        }
        if self.chains == 0 {
            return bad("chains", "must be positive");
        }
        Ok(())
    }

    /// The configuration as a loadable `key=value` file.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let grid: Vec<String> = self.eps_grid.iter().map(|e| format!("{e:?}")).collect();
        let _ = writeln!(s, "command={}", self.command);
        let _ = writeln!(s, "n={}", self.n);
        let _ = writeln!(s, "nmax={}", self.nmax);
        let _ = writeln!(s, "m={}", self.m);
        let _ = writeln!(s, "eps={:?}", self.eps);
        let _ = writeln!(s, "eps_grid={}", grid.join(","));
        let _ = writeln!(s, "k={}", self.k);
        let _ = writeln!(s, "n_mc={}", self.n_mc);
        let _ = writeln!(s, "n_reweight={}", self.n_reweight);
        let _ = writeln!(s, "dt={:?}", self.dt);
        let _ = writeln!(s, "steps={}", self.steps);
        let _ = writeln!(s, "burnin={}", self.burnin);
        let _ = writeln!(s, "thin={}", self.thin);
        let _ = writeln!(s, "chains={}", self.chains);
        let _ = writeln!(s, "seed={}", self.seed);
        let _ = writeln!(s, "delta={:?}", self.delta);
        let _ = writeln!(s, "eta={:?}", self.eta);
        let _ = writeln!(s, "observable={}", self.observable.name());
        let _ = writeln!(s, "out={}", self.out.display());
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let mut c = ExperimentConfig::default();
        c.load_str("# comment\nn = 4\neps_grid=0.3,0.1\nobservable=wick2\n\nseed=99").unwrap();
        assert_eq!(c.n, 4);
        assert_eq!(c.eps_grid, vec![0.3, 0.1]);
        let mut d = ExperimentConfig::default();
        d.load_str(&c.to_text()).unwrap();
        assert_eq!(c, d);
    }

    #[test]
    fn unknown_key_is_named() {
        let err = ExperimentConfig::default().load_str("bogus=1").unwrap_err();
        assert!(err.to_string().contains("bogus"));
        let err = ExperimentConfig::default().load_str("n=abc").unwrap_err();
        assert!(err.to_string().contains("`n`"));
    }

    #[test]
    fn validation() {
        let mut c = ExperimentConfig::default();
        c.eps = -1.0;
        assert!(c.validate().unwrap_err().to_string().contains("eps"));
    }
}
