//! Experiment configuration: defaults, config-file parsing, flag merging.

use std::path::{Path, PathBuf};

use crate::{HarnessError, Result};

/// Full description of one benchmark sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    /// Number of Gaussian proposals `N`.
    pub n_proposals: usize,
    /// Dimension of the sample space.
    pub dim: usize,
    /// Proposal scale; every proposal has covariance `sigma^2 I`.
    pub sigma: f64,
    /// Per-coordinate interval the proposal means are drawn from.
    pub mean_box: (f64, f64),
    /// Group counts `P` to sweep, in output order.
    pub p_values: Vec<usize>,
    /// Number of seeded replications to average over.
    pub n_runs: usize,
    /// Master seed; every replication derives its own streams from it.
    pub seed: u64,
    /// Draw the proposal means once and reuse them in every replication
    /// instead of redrawing them per run.
    pub fixed_means: bool,
    /// Where to write the result CSV; `None` prints to stdout.
    pub output_path: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            n_proposals: 4096,
            dim: 2,
            sigma: 5.0,
            mean_box: (-20.0, 20.0),
            p_values: halving_schedule(4096),
            n_runs: 500,
            seed: 42,
            fixed_means: false,
            output_path: None,
        }
    }
}

impl ExperimentConfig {
    /// Checks every invariant, naming the first violated one.
    pub fn validate(&self) -> Result<()> {
        if self.n_proposals < 1 {
            return Err(HarnessError::InvalidConfig(
                "n-proposals must be at least 1".into(),
            ));
        }
        if self.dim < 1 {
            return Err(HarnessError::InvalidConfig("dim must be at least 1".into()));
        }
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(HarnessError::InvalidConfig(
                "sigma must be positive and finite".into(),
            ));
        }
        if self.n_runs < 1 {
            return Err(HarnessError::InvalidConfig("runs must be at least 1".into()));
        }
        let (lo, hi) = self.mean_box;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(HarnessError::InvalidConfig(
                "mean-box must be a finite interval lo,hi with lo < hi".into(),
            ));
        }
        if self.p_values.is_empty() {
            return Err(HarnessError::InvalidConfig(
                "p-values must not be empty".into(),
            ));
        }
        for &p in &self.p_values {
            if p < 1 || p > self.n_proposals {
                return Err(HarnessError::InvalidConfig(format!(
                    "p value {p} outside 1..={}",
                    self.n_proposals
                )));
            }
        }
        Ok(())
    }
}

/// The group counts `N, N/2, ..., 1` obtained by repeated halving.
pub fn halving_schedule(n: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut p = n.max(1);
    loop {
        out.push(p);
        if p == 1 {
            break;
        }
        p /= 2;
    }
    out
}

/// Partial configuration from a config file or command-line flags.
///
/// `None` fields leave the underlying value untouched when applied.
#[derive(Debug, Default, Clone, PartialEq)]
pub struct ConfigOverrides {
    /// Overrides [`ExperimentConfig::n_proposals`].
    pub n_proposals: Option<usize>,
    /// Overrides [`ExperimentConfig::dim`].
    pub dim: Option<usize>,
    /// Overrides [`ExperimentConfig::sigma`].
    pub sigma: Option<f64>,
    /// Overrides [`ExperimentConfig::mean_box`].
    pub mean_box: Option<(f64, f64)>,
    /// Overrides [`ExperimentConfig::p_values`].
    pub p_values: Option<Vec<usize>>,
    /// Overrides [`ExperimentConfig::n_runs`].
    pub runs: Option<usize>,
    /// Overrides [`ExperimentConfig::seed`].
    pub seed: Option<u64>,
    /// Overrides [`ExperimentConfig::fixed_means`].
    pub fixed_means: Option<bool>,
    /// Overrides [`ExperimentConfig::output_path`].
    pub out: Option<PathBuf>,
}

impl ConfigOverrides {
    fn apply_to(&self, cfg: &mut ExperimentConfig, p_explicit: &mut bool) {
        if let Some(n) = self.n_proposals {
            cfg.n_proposals = n;
        }
        if let Some(d) = self.dim {
            cfg.dim = d;
        }
        if let Some(s) = self.sigma {
            cfg.sigma = s;
        }
        if let Some(b) = self.mean_box {
            cfg.mean_box = b;
        }
        if let Some(ref p) = self.p_values {
            cfg.p_values = p.clone();
            *p_explicit = true;
        }
        if let Some(r) = self.runs {
            cfg.n_runs = r;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(f) = self.fixed_means {
            cfg.fixed_means = f;
        }
        if let Some(ref o) = self.out {
            cfg.output_path = Some(o.clone());
        }
    }
}

/// Builds the effective configuration.
///
/// Values are layered in increasing precedence: built-in defaults, the
/// `--quick` preset (`N = 1024`, 200 runs), the config file, then explicit
/// command-line flags. Unless `p-values` is set explicitly by the file or a
/// flag, the sweep defaults to [`halving_schedule`] of the final proposal
/// count. The merged result is validated before it is returned.
pub fn load_config(
    file: Option<&Path>,
    quick: bool,
    flags: &ConfigOverrides,
) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::default();
    let mut p_explicit = false;
    if quick {
        cfg.n_proposals = 1024;
        cfg.n_runs = 200;
    }
    if let Some(path) = file {
        let text = std::fs::read_to_string(path)?;
        parse_config_file(&text)?.apply_to(&mut cfg, &mut p_explicit);
    }
    flags.apply_to(&mut cfg, &mut p_explicit);
    if !p_explicit {
        cfg.p_values = halving_schedule(cfg.n_proposals);
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Parses a `key = value` config file into a set of overrides.
///
/// Keys mirror the command-line flag names (`n-proposals`, `dim`, `sigma`,
/// `mean-box`, `p-values`, `runs`, `seed`, `fixed-means`, `out`). Blank
/// lines are skipped and `#` starts a comment.
pub fn parse_config_file(text: &str) -> Result<ConfigOverrides> {
    let mut overrides = ConfigOverrides::default();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(HarnessError::Parse {
                line,
                message: format!("expected `key = value`, got `{content}`"),
            });
        };
        let key = key.trim();
        let value = value.trim();
        match key {
            "n-proposals" => overrides.n_proposals = Some(parse_scalar(line, key, value)?),
            "dim" => overrides.dim = Some(parse_scalar(line, key, value)?),
            "sigma" => overrides.sigma = Some(parse_scalar(line, key, value)?),
            "mean-box" => overrides.mean_box = Some(parse_mean_box(line, value)?),
            "p-values" => overrides.p_values = Some(parse_p_values(line, value)?),
            "runs" => overrides.runs = Some(parse_scalar(line, key, value)?),
            "seed" => overrides.seed = Some(parse_scalar(line, key, value)?),
            "fixed-means" => overrides.fixed_means = Some(parse_scalar(line, key, value)?),
            "out" => overrides.out = Some(PathBuf::from(value)),
            other => {
                return Err(HarnessError::Parse {
                    line,
                    message: format!("unknown key `{other}`"),
                });
            }
        }
    }
    Ok(overrides)
}

fn parse_scalar<T: std::str::FromStr>(line: usize, key: &str, value: &str) -> Result<T> {
    value.parse().map_err(|_| HarnessError::Parse {
        line,
        message: format!("invalid value `{value}` for `{key}`"),
    })
}

fn parse_mean_box(line: usize, value: &str) -> Result<(f64, f64)> {
    let parts: Vec<&str> = value.split(',').map(str::trim).collect();
    if parts.len() != 2 {
        return Err(HarnessError::Parse {
            line,
            message: format!("mean-box expects `lo,hi`, got `{value}`"),
        });
    }
    let lo = parse_scalar(line, "mean-box", parts[0])?;
    let hi = parse_scalar(line, "mean-box", parts[1])?;
    Ok((lo, hi))
}

/// Parses a comma-separated list of group counts.
pub fn parse_p_values(line: usize, value: &str) -> Result<Vec<usize>> {
    value
        .split(',')
        .map(|part| parse_scalar(line, "p-values", part.trim()))
        .collect()
}
