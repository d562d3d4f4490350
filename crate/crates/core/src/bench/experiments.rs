use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::instance::{generate_instance, market_noise, single_market_from, with_power_price};
use super::reference::{reference_network, reference_single_market, ReferenceConfig};
use super::stats::{column_value, fit_rate_slope, mean, mean_over_seeds, median, std_error, SlopeFit};
use crate::error::{Error, Result};
use crate::fixed_point::{run_algorithm_two, run_noise_free, EpsSchedule, FixedPointOptions};
use crate::game::{
    build_learning_problem, AffineGame, CournotNetworkSpec, Game, Instance, InstanceGame, LearnTarget,
    LearningObjective, QuadraticObjective, SingleMarketCournotSpec, ThetaBox,
};
use crate::gradient::{
    make_schedule, rate_bound_constants, run_algorithm_one, NoiseSpec, ProblemConstants, RateBound, RateLambdas,
    RunOptions, SteplengthSchedule, ThetaGroup,
};
use crate::linalg::{dist, norm};
use crate::rng::{stream_rng, Stream};
use crate::trajectory::{ErrorTrajectory, RecordPolicy};
use crate::vi::{BoxSet, ConvexSet};

/// Strategy upper bound of the first row of the sequential comparison.
pub const SEQ_BOUND_UNIT: f64 = 32.3664;

/// Safety factor applied to sampled gradient bounds.
const BOUND_SAFETY: f64 = 1.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    GradTable,
    FpTableA,
    FpTableB,
    NoiseFree,
    Nonlinear,
    SeqVsSim,
    RateFit,
}

/// Everything needed to reproduce one experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    /// Instance file; when absent, one instance per `(N, W)` row is generated.
    pub instance: Option<PathBuf>,
    pub rows: Vec<(usize, usize)>,
    pub instance_seed: u64,
    pub horizon: usize,
    pub seeds: Vec<u64>,
    pub alpha: f64,
    pub beta: f64,
    /// Regularisation of the least-squares learning problem.
    pub lambda: f64,
    pub eps0: f64,
    pub rho: f64,
    pub sigma: f64,
    /// Noise half widths as fractions of the learned coefficient.
    pub noise_fractions: Vec<f64>,
    /// Multiples of [`SEQ_BOUND_UNIT`] used as strategy upper bounds.
    pub bound_multiples: Vec<f64>,
    pub out: Option<PathBuf>,
}

impl ExperimentConfig {
    /// Defaults for `kind`.
    pub fn new(kind: ExperimentKind) -> Self {
        let (rows, horizon) = match kind {
            ExperimentKind::GradTable => (vec![(5, 1), (5, 3), (5, 5)], 10_000),
            ExperimentKind::FpTableA => (vec![(5, 1), (10, 1)], 10_000),
            ExperimentKind::FpTableB => (vec![(5, 1), (10, 1)], 50_000),
            ExperimentKind::NoiseFree => (vec![(2, 1), (5, 1)], 2),
            ExperimentKind::Nonlinear => (vec![(5, 1)], 10_000),
            ExperimentKind::SeqVsSim => (vec![(5, 1)], 10_000),
            ExperimentKind::RateFit => (vec![(2, 1)], 10_000),
        };
        Self {
            kind,
            instance: None,
            rows,
            instance_seed: 1,
            horizon,
            seeds: (1..=30).collect(),
            alpha: 0.8,
            beta: 0.6,
            lambda: 1e-3,
            eps0: 1.0,
            rho: 0.5,
            sigma: 1.1,
            noise_fractions: vec![0.5],
            bound_multiples: (1..=5).map(f64::from).collect(),
            out: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.horizon == 0 {
            return Err(Error::InvalidParameter("horizon must be at least 1".into()));
        }
        if self.seeds.is_empty() {
            return Err(Error::InvalidParameter("need at least one seed".into()));
        }
        if self.instance.is_none() && self.rows.is_empty() {
            return Err(Error::InvalidParameter("no rows and no instance file".into()));
        }
        if self.noise_fractions.iter().any(|f| !(*f >= 0.0)) {
            return Err(Error::InvalidParameter("noise fractions must be nonnegative".into()));
        }
        if let Some(p) = &self.instance {
            Instance::load(p)?;
        }
        EpsSchedule::new(self.eps0, self.rho)?;
        Ok(())
    }

    fn eps(&self) -> EpsSchedule {
        EpsSchedule { eps0: self.eps0, rho: self.rho }
    }

    /// One `(label, instance)` per row.
    fn instances(&self) -> Result<Vec<(String, Instance)>> {
        if let Some(p) = &self.instance {
            let inst = Instance::load(p)?;
            let label = p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "instance".into());
            return Ok(vec![(label, inst)]);
        }
        self.rows
            .iter()
            .map(|&(n, w)| Ok((format!("N{n}_W{w}"), generate_instance(n, w, self.instance_seed)?)))
            .collect()
    }
}

/// Seed statistics of one column at one iteration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricSummary {
    pub name: String,
    pub k: usize,
    pub median: f64,
    pub max: f64,
    pub mean: f64,
    pub std_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord {
    pub arm: String,
    pub seed: u64,
    pub trajectory: ErrorTrajectory,
}

/// One table row: statistics over seeds plus the raw trajectories.
#[derive(Debug, Clone, PartialEq)]
pub struct RowResult {
    pub label: String,
    pub n_firms: usize,
    pub n_nodes: usize,
    pub metrics: Vec<MetricSummary>,
    pub trajectories: Vec<TrajectoryRecord>,
}

impl RowResult {
    pub fn metric(&self, name: &str, k: usize) -> Option<&MetricSummary> {
        self.metrics.iter().find(|m| m.name == name && m.k == k)
    }

    /// Statistics of `name` at the largest recorded iteration.
    pub fn final_metric(&self, name: &str) -> Option<&MetricSummary> {
        self.metrics.iter().filter(|m| m.name == name).max_by_key(|m| m.k)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TableResult {
    pub kind: ExperimentKind,
    pub rows: Vec<RowResult>,
}

impl TableResult {
    pub fn row(&self, label: &str) -> Option<&RowResult> {
        self.rows.iter().find(|r| r.label == label)
    }

    /// Summary CSV: one line per (row, metric, k).
    pub fn summary_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["row", "n_firms", "n_nodes", "metric", "k", "median", "max", "mean", "std_error"])?;
        for r in &self.rows {
            for m in &r.metrics {
                w.write_record([
                    r.label.clone(),
                    r.n_firms.to_string(),
                    r.n_nodes.to_string(),
                    m.name.clone(),
                    m.k.to_string(),
                    crate::trajectory::fmt_f64(m.median),
                    crate::trajectory::fmt_f64(m.max),
                    crate::trajectory::fmt_f64(m.mean),
                    crate::trajectory::fmt_f64(m.std_error),
                ])?;
            }
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    /// Human-readable table of final medians.
    pub fn console(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{:?}", self.kind);
        for r in &self.rows {
            let _ = write!(out, "{:<24}", r.label);
            let mut names: Vec<&str> = Vec::new();
            for m in &r.metrics {
                if !names.contains(&m.name.as_str()) {
                    names.push(&m.name);
                }
            }
            for name in names {
                if let Some(m) = r.final_metric(name) {
                    let _ = write!(out, "  {name}@{}={:.2e}", m.k, m.median);
                }
            }
            out.push('\n');
        }
        out
    }

    /// Writes trajectories, the summary and a manifest under `dir`.
    pub fn write_outputs(&self, dir: &Path, config: &ExperimentConfig) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        for r in &self.rows {
            for t in &r.trajectories {
                let p = dir.join(format!("{}_{}_seed{}.csv", r.label, t.arm, t.seed));
                t.trajectory.save_csv(&p)?;
                written.push(p);
            }
        }
        let summary = dir.join("summary.csv");
        std::fs::write(&summary, self.summary_csv()?)?;
        written.push(summary);
        let manifest = dir.join("manifest.json");
        write_manifest(&manifest, config, &written)?;
        written.push(manifest);
        Ok(written)
    }
}

#[derive(Serialize)]
struct Manifest<'a> {
    config: &'a ExperimentConfig,
    seeds: &'a [u64],
    code_version: &'static str,
    outputs: Vec<String>,
}

/// Run manifest: config, seeds, crate version and the files produced.
pub fn write_manifest(path: &Path, config: &ExperimentConfig, outputs: &[PathBuf]) -> Result<()> {
    let m = Manifest {
        config,
        seeds: &config.seeds,
        code_version: env!("CARGO_PKG_VERSION"),
        outputs: outputs
            .iter()
            .map(|p| p.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default())
            .collect(),
    };
    std::fs::write(path, serde_json::to_string_pretty(&m)? + "\n")?;
    Ok(())
}

/// Powers of ten up to `horizon`, plus `horizon`.
pub fn checkpoints(horizon: usize) -> Vec<usize> {
    let mut ks = Vec::new();
    let mut k = 1;
    while k < horizon {
        ks.push(k);
        k *= 10;
    }
    ks.push(horizon);
    ks
}

fn summarize(
    records: &[TrajectoryRecord],
    arm: &str,
    columns: &[&str],
    ks: &[usize],
    prefix: &str,
) -> Result<Vec<MetricSummary>> {
    let mut out = Vec::new();
    for col in columns {
        for &k in ks {
            let mut vals = Vec::new();
            for r in records.iter().filter(|r| r.arm == arm) {
                if let Some(row) = r.trajectory.at(k) {
                    vals.push(column_value(&r.trajectory, row, col)?);
                }
            }
            if vals.is_empty() {
                continue;
            }
            out.push(MetricSummary {
                name: format!("{prefix}{col}"),
                k,
                median: median(&vals),
                max: vals.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                mean: mean(&vals),
                std_error: std_error(&vals),
            });
        }
    }
    Ok(out)
}

fn summary_of(name: &str, k: usize, vals: &[f64]) -> MetricSummary {
    MetricSummary {
        name: name.into(),
        k,
        median: median(vals),
        max: vals.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        mean: mean(vals),
        std_error: std_error(vals),
    }
}

/// Runs the experiment selected by `config.kind`.
pub fn run_table(config: &ExperimentConfig) -> Result<TableResult> {
    config.validate()?;
    match config.kind {
        ExperimentKind::GradTable => run_grad_table(config),
        ExperimentKind::FpTableA | ExperimentKind::FpTableB | ExperimentKind::Nonlinear => run_fp_table(config),
        ExperimentKind::NoiseFree => run_noise_free_table(config),
        ExperimentKind::SeqVsSim => run_seq_vs_sim(config),
        ExperimentKind::RateFit => Ok(run_rate_fit(config)?.table),
    }
}

/// Algorithm I on networks, learning every `(a_i, b_i)`.
pub fn run_grad_table(config: &ExperimentConfig) -> Result<TableResult> {
    let mut rows = Vec::new();
    for (label, inst) in config.instances()? {
        let net = inst.network_spec()?;
        rows.push(grad_row(&label, net, config)?);
    }
    Ok(TableResult { kind: ExperimentKind::GradTable, rows })
}

const GRAD_COLUMNS: [&str; 3] = ["err_x_scaled", "err_a_scaled_max", "err_b_scaled_max"];

fn grad_row(label: &str, net: &CournotNetworkSpec, config: &ExperimentConfig) -> Result<RowResult> {
    let theta_star = net.theta_star();
    let x_ref = reference_network(net, &theta_star, &ReferenceConfig::default())?.x;
    let mid = net.theta_box.midpoint();
    let initial: Vec<(f64, f64)> = (0..net.n_nodes).map(|i| (mid[2 * i], mid[2 * i + 1])).collect();
    let objective = build_learning_problem(net, config.lambda, &initial)?;
    let w = net.n_nodes;
    let opts = RunOptions {
        theta_groups: vec![
            ThetaGroup { name: "err_a_scaled_max".into(), coords: (0..w).map(|i| 2 * i).collect() },
            ThetaGroup { name: "err_b_scaled_max".into(), coords: (0..w).map(|i| 2 * i + 1).collect() },
        ],
        ..RunOptions::default()
    };
    let records = config
        .seeds
        .par_iter()
        .map(|&seed| {
            let schedule = make_schedule(config.alpha, config.beta, (1, 200), net.n_firms, seed)?;
            let trajectory = run_algorithm_one(
                net,
                &objective,
                &schedule,
                &NoiseSpec::none(),
                config.horizon,
                seed,
                &x_ref,
                &theta_star,
                &opts,
            )?;
            Ok(TrajectoryRecord { arm: "grad".into(), seed, trajectory })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RowResult {
        label: label.into(),
        n_firms: net.n_firms,
        n_nodes: net.n_nodes,
        metrics: summarize(&records, "grad", &GRAD_COLUMNS, &checkpoints(config.horizon), "")?,
        trajectories: records,
    })
}

fn market_for(inst: &Instance, target: LearnTarget) -> Result<SingleMarketCournotSpec> {
    match &inst.game {
        InstanceGame::Network(n) => single_market_from(n, target),
        InstanceGame::SingleMarket(s) if s.learn_target == target => Ok(s.clone()),
        InstanceGame::SingleMarket(s) => {
            Err(Error::Validation(format!("instance learns {:?}, experiment needs {target:?}", s.learn_target)))
        }
    }
}

/// Algorithm II rows: intercept, slope, or intercept under a power price.
pub fn run_fp_table(config: &ExperimentConfig) -> Result<TableResult> {
    let target = match config.kind {
        ExperimentKind::FpTableB => LearnTarget::B,
        _ => LearnTarget::A,
    };
    let fraction = config.noise_fractions.first().copied().unwrap_or(0.5);
    let mut rows = Vec::new();
    for (label, inst) in config.instances()? {
        let mut spec = market_for(&inst, target)?;
        if config.kind == ExperimentKind::Nonlinear {
            spec = with_power_price(&spec, config.sigma)?;
        }
        rows.push(fp_row(&label, &spec, fraction, config)?);
    }
    Ok(TableResult { kind: config.kind, rows })
}

fn fp_row(label: &str, spec: &SingleMarketCournotSpec, fraction: f64, config: &ExperimentConfig) -> Result<RowResult> {
    let theta_star = spec.theta_star();
    let x_ref = reference_single_market(spec, theta_star, &ReferenceConfig::default())?.x;
    let noise = market_noise(spec, fraction, 0)?;
    let eps = config.eps();
    let opts = FixedPointOptions::default();
    let records = config
        .seeds
        .par_iter()
        .map(|&seed| {
            let trajectory = run_algorithm_two(spec, &noise, &eps, config.horizon, seed, &x_ref, theta_star, &opts)?;
            Ok(TrajectoryRecord { arm: "fp".into(), seed, trajectory })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RowResult {
        label: label.into(),
        n_firms: spec.n_firms(),
        n_nodes: 1,
        metrics: summarize(
            &records,
            "fp",
            &["err_x_scaled", "err_theta_scaled_max", "vartheta_max_dev", "consistency_residual"],
            &checkpoints(config.horizon),
            "",
        )?,
        trajectories: records,
    })
}

/// Noise-free two-step runs for both learning targets.
pub fn run_noise_free_table(config: &ExperimentConfig) -> Result<TableResult> {
    let mut rows = Vec::new();
    for (label, inst) in config.instances()? {
        for target in [LearnTarget::A, LearnTarget::B] {
            let spec = match market_for(&inst, target) {
                Ok(s) => s,
                Err(Error::Validation(_)) => continue,
                Err(e) => return Err(e),
            };
            let x_ref = reference_single_market(&spec, spec.theta_star(), &ReferenceConfig::default())?.x;
            let out = run_noise_free(&spec, &config.eps(), &FixedPointOptions::default())?;
            let theta_err: Vec<f64> = out.theta_hat_1.iter().map(|t| (t - spec.theta_star()).abs()).collect();
            let x_err: Vec<f64> = out.x_2.iter().map(|x| dist(x, &x_ref)).collect();
            rows.push(RowResult {
                label: format!("{label}_{target:?}").to_lowercase(),
                n_firms: spec.n_firms(),
                n_nodes: 1,
                metrics: vec![summary_of("theta_hat_1_abs_err", 1, &theta_err), summary_of("x_2_abs_err", 2, &x_err)],
                trajectories: Vec::new(),
            });
        }
    }
    Ok(TableResult { kind: ExperimentKind::NoiseFree, rows })
}

/// Sequential learning-then-computation baseline on a single market, learning
/// the slope. Returns the trajectory over `2·horizon` steps: the first half
/// learns with strategies frozen at their start, the second computes with the
/// estimate frozen.
///
/// With `preconditioned`, the slope gradient is divided by `s_max²`.
#[allow(clippy::too_many_arguments)]
pub fn run_sequential(
    spec: &SingleMarketCournotSpec,
    noise_half_width: f64,
    horizon: usize,
    seed: u64,
    alpha: f64,
    beta: f64,
    lambda: f64,
    preconditioned: bool,
    x_ref: &[f64],
) -> Result<ErrorTrajectory> {
    if spec.learn_target != LearnTarget::B {
        return Err(Error::Validation("the sequential baseline learns the slope".into()));
    }
    let n = spec.n_firms();
    let schedule = make_schedule(alpha, beta, (1, 200), n, seed)?;
    let (a, b_true) = (spec.price.a(), spec.theta_star());
    let tb = &spec.theta_box;
    let mut b = tb.midpoint()[0];
    let s_max = a / b;
    let gain = if preconditioned { 1.0 / (s_max * s_max) } else { 1.0 };
    let set = spec.strategy_set();
    let mut x = set.project(&vec![0.0; n]);
    let mut traj = ErrorTrajectory::new(&[]);
    let record = RecordPolicy::default();
    let total = 2 * horizon;
    let xn = norm(x_ref);
    let push = |traj: &mut ErrorTrajectory, k: usize, x: &[f64], b: f64, g: f64, al: f64| {
        traj.push(crate::trajectory::TrajectoryRow {
            k,
            err_x: dist(x, x_ref) / (1.0 + xn),
            err_theta: (b - b_true).abs() / (1.0 + b_true),
            gamma_max: g,
            alpha_max: al,
            extra: Vec::new(),
        })
    };
    push(&mut traj, 0, &x, b, 0.0, schedule.alpha(0, 0))?;
    for k in 0..horizon {
        let mut rng = stream_rng(seed, Stream::Learning, 0, k as u64);
        let s = rng.gen_range(0.0..=s_max);
        let xi = if noise_half_width > 0.0 { rng.gen_range(-noise_half_width..=noise_half_width) } else { 0.0 };
        let p = a - (b_true + xi) * s;
        let g = -2.0 * s * (a - b * s - p) + 2.0 * lambda * b;
        let al = schedule.alpha(0, k);
        b = tb.project_scalar(0, b - al * gain * g);
        if record.records(k + 1, total) {
            push(&mut traj, k + 1, &x, b, 0.0, al)?;
        }
    }
    let mut f = vec![0.0; n];
    for k in 0..horizon {
        f.copy_from_slice(&spec.eval_map(&x, b)?);
        for i in 0..n {
            let g = schedule.gamma(i, k);
            x[i] = (x[i] - g * f[i]).clamp(spec.lower[i], spec.upper[i]);
        }
        let kk = horizon + k + 1;
        if record.records(kk, total) {
            push(&mut traj, kk, &x, b, schedule.gamma_max(k), 0.0)?;
        }
    }
    Ok(traj)
}

fn seq_market(base: &SingleMarketCournotSpec, bound: f64) -> Result<SingleMarketCournotSpec> {
    let mut s = base.clone();
    s.upper = vec![bound; s.n_firms()];
    s.validate()?;
    Ok(s)
}

/// Sequential baseline against Algorithm II at matched budgets, one row per
/// (strategy bound, noise width).
pub fn run_seq_vs_sim(config: &ExperimentConfig) -> Result<TableResult> {
    let mut rows = Vec::new();
    for (label, inst) in config.instances()? {
        let base = market_for(&inst, LearnTarget::B)?;
        for &m in &config.bound_multiples {
            for &frac in &config.noise_fractions {
                let bound = SEQ_BOUND_UNIT * m;
                let spec = seq_market(&base, bound)?;
                let row_label = format!("{label}_bound{bound:.4}_noise{frac}");
                rows.push(seq_row(&row_label, &spec, frac, config)?);
            }
        }
    }
    Ok(TableResult { kind: ExperimentKind::SeqVsSim, rows })
}

fn seq_row(label: &str, spec: &SingleMarketCournotSpec, fraction: f64, config: &ExperimentConfig) -> Result<RowResult> {
    let b_star = spec.theta_star();
    let x_ref = reference_single_market(spec, b_star, &ReferenceConfig::default())?.x;
    let noise = market_noise(spec, fraction, 0)?;
    let eps = config.eps();
    let opts = FixedPointOptions::default();
    let k = config.horizon;
    let per_seed = config
        .seeds
        .par_iter()
        .map(|&seed| {
            let seq = |pre: bool| {
                run_sequential(spec, noise.half_width, k, seed, config.alpha, config.beta, config.lambda, pre, &x_ref)
            };
            let sequential = seq(false)?;
            let preconditioned = seq(true)?;
            let sim = run_algorithm_two(spec, &noise, &eps, k, seed, &x_ref, b_star, &opts)?;
            Ok([
                TrajectoryRecord { arm: "seq".into(), seed, trajectory: sequential },
                TrajectoryRecord { arm: "seqpre".into(), seed, trajectory: preconditioned },
                TrajectoryRecord { arm: "sim".into(), seed, trajectory: sim },
            ])
        })
        .collect::<Result<Vec<_>>>()?;
    let records: Vec<TrajectoryRecord> = per_seed.into_iter().flatten().collect();
    let mut metrics = Vec::new();
    for (arm, at) in [("seq", 2 * k), ("seqpre", 2 * k), ("sim", k)] {
        let xs: Vec<f64> = records
            .iter()
            .filter(|r| r.arm == arm)
            .map(|r| r.trajectory.at(at).map(|row| row.err_x).unwrap_or(f64::NAN))
            .collect();
        let bs: Vec<f64> = records
            .iter()
            .filter(|r| r.arm == arm)
            .map(|r| r.trajectory.at(at).map(|row| row.err_theta).unwrap_or(f64::NAN))
            .collect();
        metrics.push(summary_of(&format!("{arm}_err_x"), k, &xs));
        metrics.push(summary_of(&format!("{arm}_err_b"), k, &bs));
    }
    Ok(RowResult { label: label.into(), n_firms: spec.n_firms(), n_nodes: 1, metrics, trajectories: records })
}

/// Rate experiment outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct RateFitResult {
    pub fit: SlopeFit,
    pub bound: RateBound,
    pub constants: ProblemConstants,
    /// `(K, mean ‖x^K−x*‖², mean max_i ‖θ_i^K−θ*‖²)` at every recorded `K ≥ 1`.
    pub checkpoints: Vec<(usize, f64, f64)>,
    pub table: TableResult,
}

impl RateFitResult {
    /// Checkpoints where a measured mean exceeds its `Q/K` bound.
    pub fn bound_violations(&self) -> Vec<usize> {
        self.checkpoints
            .iter()
            .filter(|(k, x, t)| *x > self.bound.q_x_theta / *k as f64 || *t > self.bound.q_theta / *k as f64)
            .map(|c| c.0)
            .collect()
    }
}

/// Duopoly with known slope `b = 1`, unknown intercept `a* = 3`, zero costs
/// and strategies in `[0, 3]`, written as an affine game in `(x, a)`.
pub fn rate_duopoly() -> Result<(AffineGame, Vec<f64>, f64)> {
    let game = AffineGame::new(
        DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0]),
        DMatrix::from_element(2, 1, -1.0),
        DVector::zeros(2),
        vec![BoxSet::cube(1, 0.0, 3.0)?, BoxSet::cube(1, 0.0, 3.0)?],
    )?;
    Ok((game, vec![1.0, 1.0], 3.0))
}

/// Algorithm I with harmonic steps on [`rate_duopoly`]: fits the decay of the
/// mean-squared strategy error and evaluates the `Q/K` bounds.
pub fn run_rate_fit(config: &ExperimentConfig) -> Result<RateFitResult> {
    let (game, x_star, a_star) = rate_duopoly()?;
    let n = game.n_agents();
    let theta_box = ThetaBox::scalar(1.0, 5.0)?;
    let (mu_theta, theta_noise, strategy_noise) = (1.0, 1.0, 0.5);
    let objective = QuadraticObjective::new(vec![a_star], mu_theta, theta_noise, theta_box.clone())?;
    let spread =
        |lo: f64, hi: f64| -> Vec<f64> { (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1).max(1) as f64).collect() };
    let schedule = SteplengthSchedule::Harmonic { lambda_x: spread(2.4, 2.5), lambda_theta: spread(1.0, 1.2) };
    let noise = NoiseSpec { strategy_half_width: strategy_noise };

    let nu_x_sq = noise.nu_x_sq(1);
    let f_sup = game.max_block_norm_sq(&theta_box).into_iter().fold(0.0, f64::max);
    let m_sq = BOUND_SAFETY * n as f64 * (f_sup + nu_x_sq);
    let g_sup =
        theta_box.lower.iter().chain(&theta_box.upper).map(|t| (mu_theta * (t - a_star)).powi(2)).fold(0.0, f64::max);
    let m_theta_sq = BOUND_SAFETY * (g_sup + objective.noise_second_moment());
    let constants = ProblemConstants {
        mu_x: game.strong_monotonicity(),
        l_x: game.lipschitz(),
        l_theta: game.theta_lipschitz(),
        mu_theta: objective.strong_convexity(),
        m: m_sq.sqrt(),
        m_theta: m_theta_sq.sqrt(),
    };
    let theta0 = theta_box.midpoint();
    let x0 = game.joint_set().project(&vec![0.0; game.dim()]);
    let bound = rate_bound_constants(
        &constants,
        &RateLambdas::from_schedule(&schedule)?,
        dist(&theta0, &[a_star]).powi(2),
        dist(&x0, &x_star).powi(2),
        n,
    )?;

    let opts = RunOptions { squared_errors: true, ..RunOptions::default() };
    let records = config
        .seeds
        .par_iter()
        .map(|&seed| {
            let trajectory = run_algorithm_one(
                &game,
                &objective,
                &schedule,
                &noise,
                config.horizon,
                seed,
                &x_star,
                &[a_star],
                &opts,
            )?;
            Ok(TrajectoryRecord { arm: "rate".into(), seed, trajectory })
        })
        .collect::<Result<Vec<_>>>()?;
    let trajs: Vec<ErrorTrajectory> = records.iter().map(|r| r.trajectory.clone()).collect();
    let window = (100.min(config.horizon), config.horizon);
    let fit = fit_rate_slope(&trajs, "x_err_sq", window)?;
    let xs = mean_over_seeds(&trajs, "x_err_sq")?;
    let ts = mean_over_seeds(&trajs, "theta_err_sq_max")?;
    let measured: Vec<(usize, f64, f64)> =
        xs.iter().zip(&ts).filter(|((k, _), _)| *k >= 1).map(|((k, x), (_, t))| (*k, *x, *t)).collect();
    let mut metrics = summarize(&records, "rate", &["x_err_sq", "theta_err_sq_max"], &checkpoints(config.horizon), "")?;
    metrics.push(summary_of("slope", config.horizon, &[fit.slope]));
    metrics.push(summary_of("q_x_theta", config.horizon, &[bound.q_x_theta]));
    metrics.push(summary_of("q_theta", config.horizon, &[bound.q_theta]));
    let table = TableResult {
        kind: ExperimentKind::RateFit,
        rows: vec![RowResult { label: "duopoly".into(), n_firms: n, n_nodes: 1, metrics, trajectories: records }],
    };
    Ok(RateFitResult { fit, bound, constants, checkpoints: measured, table })
}
