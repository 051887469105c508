//! Experiment orchestration: subcommands, seeds, CSV output and manifests.

mod config;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use sha2::{Digest, Sha256};

pub use config::{test_function, ExperimentConfig, ObservableChoice, KEYS};

use crate::determinant::{self, theta_re};
use crate::error::{Error, Result};
use crate::expansion::{
    coefficients_a, lln_clt_experiment, verify_expansion, CoeffConfig, DMode, LlnCltConfig, VerifyConfig,
};
use crate::field::{write_snapshot, Transform, Well};
use crate::fmt_f64;
use crate::renorm::wick_constants;
use crate::sampler::{diagnostics, langevin_chain, ChainConfig, ChainInit, Proposal};

pub const COMMANDS: [&str; 6] = ["constants", "determinant", "sample", "coeffs", "verify-expansion", "verify-lln-clt"];

/// Seed for a named task: the first eight bytes of `SHA-256(root || label)`.
pub fn task_seed(root: u64, label: &str) -> u64 {
    let mut h = Sha256::new();
    h.update(root.to_le_bytes());
    h.update(label.as_bytes());
    let digest = h.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("digest has 32 bytes"))
}

/// Writes through a temporary sibling and renames, so readers never see a
/// partial file.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    std::fs::write(&tmp, contents)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

/// What a run produced.
#[derive(Clone, Debug, Default)]
pub struct RunManifest {
    pub config: String,
    pub seeds: Vec<(String, u64)>,
    pub wall_seconds: Vec<(String, f64)>,
    pub outputs: Vec<PathBuf>,
    /// Lines echoed to stdout.
    pub summary: Vec<String>,
}

impl RunManifest {
    fn seed(&mut self, root: u64, label: &str) -> u64 {
        let s = task_seed(root, label);
        self.seeds.push((label.to_string(), s));
        s
    }

    fn timed<T>(&mut self, label: &str, f: impl FnOnce() -> Result<T>) -> Result<T> {
        let start = Instant::now();
        let out = f()?;
        self.wall_seconds.push((label.to_string(), start.elapsed().as_secs_f64()));
        Ok(out)
    }

    fn output(&mut self, path: PathBuf, contents: &[u8]) -> Result<()> {
        write_atomic(&path, contents)?;
        self.outputs.push(path);
        Ok(())
    }

    /// The manifest is itself a loadable config file; everything else is in
    /// comments.
    pub fn to_text(&self) -> String {
        let mut s = String::from("# phi4 run manifest\n");
        let _ = writeln!(s, "# version={}", env!("CARGO_PKG_VERSION"));
        let _ = writeln!(s, "# threads={}", rayon::current_num_threads());
        s.push_str(&self.config);
        for (label, seed) in &self.seeds {
            let _ = writeln!(s, "# seed.{label}={seed}");
        }
        for (label, t) in &self.wall_seconds {
            let _ = writeln!(s, "# wall_seconds.{label}={t:.3}");
        }
        for p in &self.outputs {
            let _ = writeln!(s, "# output={}", p.display());
        }
        s
    }
}

fn csv(header: &str, rows: impl IntoIterator<Item = String>) -> Vec<u8> {
    let mut s = String::from(header);
    s.push('\n');
    for r in rows {
        s.push_str(&r);
        s.push('\n');
    }
    s.into_bytes()
}

fn determinant_cutoffs(nmax: usize) -> Vec<usize> {
    let mut ns = vec![0];
    let mut p = 1;
    while p <= nmax {
        ns.push(p);
        p *= 2;
    }
    if *ns.last().expect("nonempty") != nmax {
        ns.push(nmax);
    }
    ns
}

/// Runs one subcommand and writes its outputs and `manifest.txt` under
/// `cfg.out`.
pub fn run(cfg: &ExperimentConfig) -> Result<RunManifest> {
    cfg.validate()?;
    if !COMMANDS.contains(&cfg.command.as_str()) {
        return Err(Error::Config(format!("unknown command `{}`", cfg.command)));
    }
    std::fs::create_dir_all(&cfg.out)?;
    let mut m = RunManifest { config: cfg.to_text(), ..Default::default() };
    let out = |name: &str| cfg.out.join(name);

    match cfg.command.as_str() {
        "constants" => {
            let rows = m.timed("constants", || {
                Ok((0..=cfg.nmax)
                    .map(|n| {
                        let k = wick_constants(n);
                        format!("{n},{},{},{}", fmt_f64(k.c), fmt_f64(k.c_w), fmt_f64(k.d))
                    })
                    .collect::<Vec<_>>())
            })?;
            m.output(out("constants.csv"), &csv("N,c,c_w,d", rows))?;
        }
        "determinant" => {
            let rows = m.timed("determinant", || {
                determinant_cutoffs(cfg.nmax).into_iter().map(|n| theta_re(n, Well::Plus, cfg.eps)).collect::<Result<Vec<_>>>()
            })?;
            let mut buf = Vec::new();
            determinant::write_csv(&mut buf, &rows)?;
            let last = rows.last().expect("nonempty");
            m.summary.push(format!("log_theta(N={})={}", last.cutoff, fmt_f64(last.log_theta)));
            m.output(out("determinant.csv"), &buf)?;
        }
        "sample" => {
            let seed = m.seed(cfg.seed, "chains");
            let f = cfg.observable.build(cfg.n);
            let base = ChainConfig {
                cutoff: cfg.n,
                grid: cfg.grid(),
                eps: cfg.eps,
                dt: cfg.dt,
                n_steps: cfg.steps,
                n_burnin: cfg.burnin,
                thin: cfg.thin,
                seed,
                stream: 0,
                interaction: crate::sampler::Interaction::Full,
                noise: true,
                init: ChainInit::FreeField,
            };
            let batches = m.timed("chains", || {
                crate::sampler::run_chains(&base, cfg.chains, |c| {
                    let b = langevin_chain(c)?;
                    let d = diagnostics(&b, &f)?;
                    Ok((b, d))
                })
            })?;
            let t = Transform::new(cfg.grid());
            let s = cfg.eps.sqrt();
            let mut summary = Vec::new();
            for (i, (batch, d)) in batches.iter().enumerate() {
                let mut snaps = Vec::new();
                let mut side = Vec::new();
                for (j, psi) in batch.fields.iter().enumerate() {
                    write_snapshot(&mut snaps, cfg.n, &t.to_grid(&psi.scaled(s))?)?;
                    let step = batch.provenance.steps[j];
                    side.push(format!("{j},{step},{seed},{i},{}", fmt_f64(batch.weights[j])));
                }
                m.output(out(&format!("chain_{i:03}.phi4")), &snaps)?;
                m.output(out(&format!("chain_{i:03}.csv")), &csv("index,step,seed,stream,weight", side))?;
                summary.push(format!("{i},{},{},{}", fmt_f64(d.value), fmt_f64(d.std_error), fmt_f64(d.ess)));
            }
            m.output(out("sample_summary.csv"), &csv("chain,mean,stderr,ess", summary))?;
        }
        "coeffs" => {
            let seed = m.seed(cfg.seed, "coeffs");
            let f = cfg.observable.build(cfg.n);
            let cc = CoeffConfig::new(cfg.n, cfg.k, cfg.n_mc, seed);
            let table = m.timed("coeffs", || coefficients_a(&f, &cc))?;
            let mut buf = Vec::new();
            table.write_csv(&mut buf)?;
            m.output(out("coeffs.csv"), &buf)?;
        }
        "verify-expansion" => {
            let seed = m.seed(cfg.seed, "verify-expansion");
            let f = cfg.observable.build(cfg.n);
            let vc = VerifyConfig {
                cutoff: cfg.n,
                order: cfg.k,
                eps_grid: cfg.eps_grid.clone(),
                n_mc: cfg.n_mc,
                n_reweight: cfg.n_reweight,
                seed,
                mode: DMode::Cutoff,
                proposal: Proposal::default(),
            };
            let report = m.timed("verify-expansion", || verify_expansion(&f, &vc))?;
            let mut buf = Vec::new();
            report.write_csv(&mut buf)?;
            m.output(out("expansion.csv"), &buf)?;
            let mut buf = Vec::new();
            report.coefficients.write_csv(&mut buf)?;
            m.output(out("coeffs.csv"), &buf)?;
            m.summary.push(format!("slope={} inconclusive={}", fmt_f64(report.slope), report.inconclusive));
        }
        "verify-lln-clt" => {
            let seed = m.seed(cfg.seed, "verify-lln-clt");
            let chain_seed = m.seed(cfg.seed, "verify-lln-clt.chains");
            let f = cfg.observable.build(cfg.n);
            let mut chain = ChainConfig::new(cfg.n, cfg.eps, cfg.dt, cfg.steps, chain_seed);
            chain.grid = cfg.grid();
            chain.n_burnin = cfg.burnin;
            chain.thin = cfg.thin;
            let lc = LlnCltConfig {
                cutoff: cfg.n,
                eps_grid: cfg.eps_grid.clone(),
                eps_chain: cfg.eps,
                n_reweight: cfg.n_reweight,
                n_chains: cfg.chains,
                chain,
                delta: cfg.delta,
                eta: cfg.eta,
                seed,
            };
            let report = m.timed("verify-lln-clt", || lln_clt_experiment(&f, &lc))?;
            let mut buf = Vec::new();
            report.write_csv(&mut buf)?;
            m.output(out("lln_clt.csv"), &buf)?;
            if report.occupancy_flag {
                m.summary.push("warning: a well was visited fewer than 10 times".to_string());
            }
        }
        _ => unreachable!("command checked above"),
    }
    let manifest = m.to_text();
    write_atomic(&cfg.out.join("manifest.txt"), manifest.as_bytes())?;
    Ok(m)
}
