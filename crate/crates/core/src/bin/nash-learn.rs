use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nash_learn::bench::{generate_instance, run_rate_fit, run_table, ExperimentConfig, ExperimentKind};
use nash_learn::Error;

#[derive(Parser)]
#[command(
    name = "nash-learn",
    version,
    about = "Learning and equilibrium computation in misspecified Nash-Cournot games"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a networked Cournot instance as JSON.
    Gen {
        #[arg(long)]
        firms: usize,
        #[arg(long)]
        nodes: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Gradient response with learning on networked instances.
    RunGrad(Common),
    /// Fixed-point scheme with learning of the intercept (a) or slope (b).
    RunFp {
        #[arg(long, value_enum)]
        case: Case,
        #[command(flatten)]
        common: Common,
    },
    /// Fixed-point scheme without noise; checks termination after two steps.
    RunNoiseFree(Common),
    /// Fixed-point scheme with a power price `p = a − b·X^σ`.
    RunNonlinear {
        #[arg(long, default_value_t = 1.1, allow_hyphen_values = true)]
        sigma: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Learn-then-compute baseline against the simultaneous scheme.
    CompareSeqSim(Common),
    /// Log-log rate slope and bound check for harmonic steps.
    RateFit(Common),
}

#[derive(Clone, Copy, ValueEnum)]
enum Case {
    A,
    B,
}

#[derive(Args)]
struct Common {
    /// Instance JSON; when absent the default rows are generated.
    #[arg(long)]
    instance: Option<PathBuf>,
    /// Generated rows as `NxW` pairs, e.g. `5x1,5x3`.
    #[arg(long, value_delimiter = ',', value_parser = parse_row)]
    rows: Option<Vec<(usize, usize)>>,
    #[arg(long)]
    instance_seed: Option<u64>,
    #[arg(long)]
    steps: Option<usize>,
    /// Seeds as a list with ranges, e.g. `1-30` or `1,4,7-9`.
    #[arg(long, value_parser = parse_seeds)]
    seeds: Option<Seeds>,
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    lambda: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    eps0: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    rho: Option<f64>,
    /// Noise half widths as fractions of the learned coefficient.
    #[arg(long, value_delimiter = ',')]
    noise: Option<Vec<f64>>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone)]
struct Seeds(Vec<u64>);

fn parse_seeds(s: &str) -> Result<Seeds, String> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let range = part.split_once("..=").or_else(|| part.split_once("..")).or_else(|| part.split_once('-'));
        match range {
            Some((lo, hi)) => {
                let lo: u64 = lo.parse().map_err(|e| format!("{part}: {e}"))?;
                let hi: u64 = hi.parse().map_err(|e| format!("{part}: {e}"))?;
                if hi < lo {
                    return Err(format!("empty seed range {part}"));
                }
                out.extend(lo..=hi);
            }
            None => out.push(part.parse().map_err(|e| format!("{part}: {e}"))?),
        }
    }
    if out.is_empty() {
        return Err("no seeds given".into());
    }
    Ok(Seeds(out))
}

fn parse_row(s: &str) -> Result<(usize, usize), String> {
    let (n, w) = s.split_once(['x', 'X']).ok_or_else(|| format!("row `{s}` is not NxW"))?;
    Ok((n.trim().parse().map_err(|e| format!("{s}: {e}"))?, w.trim().parse().map_err(|e| format!("{s}: {e}"))?))
}

impl Common {
    fn config(self, kind: ExperimentKind) -> ExperimentConfig {
        let mut c = ExperimentConfig::new(kind);
        c.instance = self.instance;
        if let Some(v) = self.rows {
            c.rows = v;
        }
        macro_rules! set {
            ($($f:ident => $g:ident),*) => { $(if let Some(v) = self.$f { c.$g = v; })* };
        }
        set!(instance_seed => instance_seed, steps => horizon, alpha => alpha, beta => beta,
             lambda => lambda, eps0 => eps0, rho => rho, noise => noise_fractions);
        if let Some(Seeds(s)) = self.seeds {
            c.seeds = s;
        }
        c.out = self.out;
        c
    }
}

fn run(cli: Cli) -> nash_learn::Result<()> {
    let config = match cli.command {
        Command::Gen { firms, nodes, seed, out } => {
            let inst = generate_instance(firms, nodes, seed)?;
            inst.save(&out)?;
            println!("wrote {}", out.display());
            return Ok(());
        }
        Command::RunGrad(c) => c.config(ExperimentKind::GradTable),
        Command::RunFp { case: Case::A, common } => common.config(ExperimentKind::FpTableA),
        Command::RunFp { case: Case::B, common } => common.config(ExperimentKind::FpTableB),
        Command::RunNoiseFree(c) => c.config(ExperimentKind::NoiseFree),
        Command::RunNonlinear { sigma, common } => {
            let mut c = common.config(ExperimentKind::Nonlinear);
            c.sigma = sigma;
            c
        }
        Command::CompareSeqSim(c) => c.config(ExperimentKind::SeqVsSim),
        Command::RateFit(c) => c.config(ExperimentKind::RateFit),
    };
    let table = if config.kind == ExperimentKind::RateFit {
        let r = run_rate_fit(&config)?;
        println!(
            "slope {:.4} (r^2 {:.4}, {} points); Q_x,theta {:.4e}, Q_theta {:.4e}; bound violations at {:?}",
            r.fit.slope,
            r.fit.r_squared,
            r.fit.points,
            r.bound.q_x_theta,
            r.bound.q_theta,
            r.bound_violations()
        );
        r.table
    } else {
        run_table(&config)?
    };
    print!("{}", table.console());
    if let Some(dir) = &config.out {
        let files = table.write_outputs(dir, &config)?;
        println!("wrote {} files to {}", files.len(), dir.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Validation(_)
                | Error::InvalidModel(_)
                | Error::InvalidParameter(_)
                | Error::Dimension { .. }
                | Error::DegenerateSet(_) => ExitCode::from(2),
                _ => ExitCode::FAILURE,
            }
        }
    }
}
