use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use phi4::harness::{run, ExperimentConfig, COMMANDS};
use phi4::Error;

/// Spectral toolkit for the truncated double-well field on the torus.
///
/// Settings are read from an optional `key=value` file, then overridden by
/// flags. Outputs and `manifest.txt` go to `--out`.
#[derive(Parser, Debug)]
#[command(name = "phi4", version, allow_negative_numbers = true)]
struct Cli {
    #[arg(value_parser = COMMANDS)]
    command: String,
    /// `key=value` configuration file (a previous manifest works too).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Extra `key=value` overrides, applied last.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    nmax: Option<String>,
    #[arg(long)]
    m: Option<String>,
    #[arg(long)]
    eps: Option<String>,
    #[arg(long)]
    eps_grid: Option<String>,
    #[arg(long)]
    k: Option<String>,
    #[arg(long)]
    n_mc: Option<String>,
    #[arg(long)]
    n_reweight: Option<String>,
    #[arg(long)]
    dt: Option<String>,
    #[arg(long)]
    steps: Option<String>,
    #[arg(long)]
    burnin: Option<String>,
    #[arg(long)]
    thin: Option<String>,
    #[arg(long)]
    chains: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    delta: Option<String>,
    #[arg(long)]
    eta: Option<String>,
    #[arg(long)]
    observable: Option<String>,
    #[arg(long)]
    out: Option<String>,
}

impl Cli {
    fn flags(&self) -> [(&'static str, &Option<String>); 18] {
        [
            ("n", &self.n),
            ("nmax", &self.nmax),
            ("m", &self.m),
            ("eps", &self.eps),
            ("eps_grid", &self.eps_grid),
            ("k", &self.k),
            ("n_mc", &self.n_mc),
            ("n_reweight", &self.n_reweight),
            ("dt", &self.dt),
            ("steps", &self.steps),
            ("burnin", &self.burnin),
            ("thin", &self.thin),
            ("chains", &self.chains),
            ("seed", &self.seed),
            ("delta", &self.delta),
            ("eta", &self.eta),
            ("observable", &self.observable),
            ("out", &self.out),
        ]
    }

    fn config(&self) -> Result<ExperimentConfig, Error> {
        let mut cfg = ExperimentConfig::default();
        if let Some(path) = &self.config {
            cfg.load_file(path)?;
        }
        for (key, value) in self.flags() {
            if let Some(v) = value {
                cfg.set(key, v)?;
            }
        }
        for kv in &self.set {
            let (k, v) = kv.split_once('=').ok_or_else(|| Error::Config(format!("expected key=value, got `{kv}`")))?;
            cfg.set(k, v)?;
        }
        cfg.command = self.command.clone();
        Ok(cfg)
    }
}

fn init_threads() -> Result<(), Error> {
    if let Ok(v) = std::env::var("PHI4_THREADS") {
        let n: usize = v.parse().map_err(|_| Error::Config(format!("PHI4_THREADS: bad value `{v}`")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Config(format!("PHI4_THREADS: {e}")))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = init_threads().and_then(|_| cli.config()).and_then(|cfg| run(&cfg));
    match result {
        Ok(m) => {
            for line in &m.summary {
                println!("{line}");
            }
            for p in &m.outputs {
                println!("wrote {}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e @ Error::Config(_)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
