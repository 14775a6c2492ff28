//! Command-line interface: argument parsing and subcommand dispatch.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use pdmmis::{draw_samples, select_num_mixtures, Point};

use crate::experiment::{
    benchmark_target, build_proposals, stage_rng, STAGE_MEANS, STAGE_PARTITIONS, STAGE_SAMPLES,
};
use crate::{config, experiment, output, variance, ConfigOverrides, Result};

#[derive(Parser)]
#[command(
    name = "pdmmis",
    version,
    about = "Benchmark harness for partitioned-denominator importance sampling"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep the group count P, aggregate MSE over replications, write CSV
    /// and plot data.
    Sweep(SweepArgs),
    /// Pick a group count on one realization by halving P until the
    /// estimate stops moving.
    SelectP(SelectArgs),
    /// Check that coarser grouping never raises estimator variance on a
    /// small 1-D problem.
    VarianceCheck(VarianceArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Config file of `key = value` lines; flags override it.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Number of Gaussian proposals.
    #[arg(long, value_name = "N")]
    n_proposals: Option<usize>,
    /// Proposal scale; every proposal has covariance sigma^2 I.
    #[arg(long, value_name = "SIGMA")]
    sigma: Option<f64>,
    /// Dimension of the sample space (the benchmark target is 2-D).
    #[arg(long, value_name = "D")]
    dim: Option<usize>,
    /// Master seed for all randomness.
    #[arg(long, value_name = "SEED")]
    seed: Option<u64>,
    /// Group counts to sweep, comma-separated; defaults to halving N down
    /// to 1.
    #[arg(long, value_delimiter = ',', value_name = "P1,P2,...")]
    p_values: Option<Vec<usize>>,
    /// Interval the proposal means are drawn from, per coordinate.
    #[arg(long, value_parser = parse_interval, value_name = "LO,HI")]
    mean_box: Option<(f64, f64)>,
    /// Draw proposal means once and reuse them in every replication.
    #[arg(long)]
    fixed_means: bool,
    /// Preset for fast runs: 1024 proposals, 200 replications.
    #[arg(long)]
    quick: bool,
}

impl CommonArgs {
    fn overrides(&self) -> ConfigOverrides {
        ConfigOverrides {
            n_proposals: self.n_proposals,
            dim: self.dim,
            sigma: self.sigma,
            mean_box: self.mean_box,
            p_values: self.p_values.clone(),
            seed: self.seed,
            fixed_means: self.fixed_means.then_some(true),
            ..ConfigOverrides::default()
        }
    }
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Number of seeded replications to average over.
    #[arg(long, value_name = "RUNS")]
    runs: Option<usize>,
    /// Output CSV path; plot data and an SVG are written next to it.
    /// Without it the CSV goes to stdout.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SelectArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Stop when no estimate component changes by more than this relative
    /// amount between consecutive steps.
    #[arg(long, default_value_t = 0.01, value_name = "REL")]
    threshold: f64,
}

#[derive(Args)]
struct VarianceArgs {
    /// Number of paired replications.
    #[arg(long, default_value_t = 2000, value_name = "REPS")]
    reps: usize,
    /// Seed for samples and shuffles.
    #[arg(long, default_value_t = 42, value_name = "SEED")]
    seed: u64,
}

fn parse_interval(text: &str) -> std::result::Result<(f64, f64), String> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    if parts.len() != 2 {
        return Err(format!("expected `lo,hi`, got `{text}`"));
    }
    let lo: f64 = parts[0]
        .parse()
        .map_err(|_| format!("invalid number `{}`", parts[0]))?;
    let hi: f64 = parts[1]
        .parse()
        .map_err(|_| format!("invalid number `{}`", parts[1]))?;
    Ok((lo, hi))
}

/// Parses `argv` and runs the selected subcommand, returning the process
/// exit code: 0 on success, 1 on runtime failure, 2 on usage errors.
pub fn cli_main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(err) => {
            let code = err.exit_code();
            let _ = err.print();
            return code;
        }
    };
    let outcome = match cli.command {
        Command::Sweep(args) => run_sweep(args),
        Command::SelectP(args) => run_select(args),
        Command::VarianceCheck(args) => run_variance(args),
    };
    match outcome {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            1
        }
    }
}

fn run_sweep(args: SweepArgs) -> Result<i32> {
    let flags = ConfigOverrides {
        runs: args.runs,
        out: args.out.clone(),
        ..args.common.overrides()
    };
    let cfg = config::load_config(args.common.config.as_deref(), args.common.quick, &flags)?;
    let rows = experiment::run_experiment(&cfg)?;
    match &cfg.output_path {
        Some(path) => {
            output::write_csv(&rows, path)?;
            let data_path = path.with_extension("plot");
            let svg_path = path.with_extension("svg");
            output::write_plot_data(&rows, &data_path, Some(&svg_path))?;
            println!(
                "wrote {} rows to {} (plot data: {}, figure: {})",
                rows.len(),
                path.display(),
                data_path.display(),
                svg_path.display()
            );
        }
        None => print!("{}", output::csv_string(&rows)),
    }
    Ok(0)
}

fn run_select(args: SelectArgs) -> Result<i32> {
    let cfg = config::load_config(
        args.common.config.as_deref(),
        args.common.quick,
        &args.common.overrides(),
    )?;
    let target = benchmark_target();
    let proposals = build_proposals(&cfg, &mut stage_rng(cfg.seed, 0, STAGE_MEANS))?;
    let samples = draw_samples(&proposals, &mut stage_rng(cfg.seed, 0, STAGE_SAMPLES))?;
    let mut rng = stage_rng(cfg.seed, 0, STAGE_PARTITIONS);
    let result = select_num_mixtures(
        &target,
        &proposals,
        &samples,
        |x: &Point| x.to_vec(),
        &cfg.p_values,
        args.threshold,
        &mut rng,
    )?;
    for step in &result.steps {
        let mean = step
            .estimate
            .moment
            .iter()
            .map(|m| format!("{m:+.5}"))
            .collect::<Vec<_>>()
            .join(", ");
        let change = match step.rel_change {
            Some(change) => format!("{change:.6}"),
            None => "-".into(),
        };
        println!(
            "P={:>6}  mean=[{mean}]  z={:.5}  rel-change={change}",
            step.partition.num_subsets(),
            step.estimate.z_hat
        );
    }
    println!("chosen P = {}", result.chosen_p());
    println!(
        "distinct proposal evaluations: {}",
        result.distinct_proposal_evals
    );
    Ok(0)
}

fn run_variance(args: VarianceArgs) -> Result<i32> {
    let check = variance::variance_ordering(args.reps, args.seed)?;
    for (p, var) in variance::GROUP_LEVELS.iter().zip(&check.variances) {
        println!("P={p}: variance {var:.6}");
    }
    if check.ordered_within(1.05) {
        println!("ordering holds: coarser grouping never raised the variance (5% slack)");
        Ok(0)
    } else {
        eprintln!(
            "ordering violated: worst adjacent variance ratio {:.4}",
            check.worst_ratio
        );
        Ok(1)
    }
}
