//! Acceptance checks for the estimator library and benchmark harness.
//!
//! Each test prints one `criterion NN PASS/FAIL` line. Stochastic checks
//! draw a fresh seed per process and print it, so a failure can be replayed.
//! Criteria 2 through 5 share one full-scale sweep (N = 4096, 500 runs),
//! which takes several minutes on a single core.
//!
//! The bands in criteria 2 through 4 were fixed up front against an external
//! reference run of this benchmark and are kept as pinned, not retuned to
//! this implementation. The default configuration does not attain them:
//! repeated sweeps concentrate at MSE(mean) near 12.3 for P = 4096 and 0.48
//! for P = 1 (ratio near 25, P=64/P=1 ratio near 1.11), so criteria 2 and 3
//! fail and criterion 4 fails on most seeds. Closed-form variance integrals
//! for the P = 1 estimator agree with the measured values, which points at
//! the reference run itself using a wider proposal scale (near sigma = 10,
//! which reproduces all of its figures) than the sigma = 5 pinned here. The
//! tests report the measured values rather than adjusting either side.

use std::sync::OnceLock;
use std::time::Instant;

use pdmmis::{
    benchmark_mixture, compute_weights, draw_samples, select_num_mixtures, Gaussian,
    GaussianMixture, Partition, Point, TargetDensity,
};
use pdmmis_cli::experiment::{benchmark_target, eval_costs};
use pdmmis_cli::variance::{variance_ordering, GROUP_LEVELS};
use pdmmis_cli::{run_experiment, ExperimentConfig, ResultRow};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

fn report(number: u8, name: &str, pass: bool, detail: &str) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    println!("criterion {number:02} {verdict} ({name}): {detail}");
    assert!(pass, "criterion {number:02} {name} failed: {detail}");
}

fn fresh_seed() -> u64 {
    rand::random()
}

/// The shared full-scale sweep for criteria 2 through 5.
fn full_sweep() -> &'static (u64, Vec<ResultRow>) {
    static SWEEP: OnceLock<(u64, Vec<ResultRow>)> = OnceLock::new();
    SWEEP.get_or_init(|| {
        let seed = fresh_seed();
        let cfg = ExperimentConfig {
            seed,
            ..ExperimentConfig::default()
        };
        let rows = run_experiment(&cfg).expect("full-scale sweep");
        (seed, rows)
    })
}

#[test]
fn criterion_01_sweep_evaluation_counts_are_exact() {
    let start = Instant::now();
    let costs = eval_costs(&ExperimentConfig::default()).unwrap();
    let expected: Vec<u64> = vec![
        4096, 8192, 16384, 32768, 65536, 131072, 262144, 524288, 1048576, 2097152, 4194304,
        8388608, 16777216,
    ];
    let elapsed = start.elapsed().as_secs_f64();
    report(
        1,
        "evaluation counts",
        costs == expected && elapsed < 1.0,
        &format!("13 rows, 4096..16777216, {elapsed:.3}s"),
    );
}

#[test]
fn criterion_02_full_scale_mse_bands() {
    let (seed, rows) = full_sweep();
    let smis = &rows[0];
    let fdm = &rows[12];
    let pass = (4.5..=9.5).contains(&smis.mse_mean)
        && (0.50..=1.00).contains(&fdm.mse_mean)
        && (0.045..=0.110).contains(&smis.mse_z)
        && (0.0040..=0.0080).contains(&fdm.mse_z);
    report(
        2,
        "full-scale MSE bands",
        pass,
        &format!(
            "seed {seed}: mse_mean P=4096 {:.4} (band 4.5..9.5), P=1 {:.4} (0.50..1.00); \
             mse_z P=4096 {:.5} (0.045..0.110), P=1 {:.5} (0.0040..0.0080)",
            smis.mse_mean, fdm.mse_mean, smis.mse_z, fdm.mse_z
        ),
    );
}

#[test]
fn criterion_03_variance_ratio_band() {
    let (seed, rows) = full_sweep();
    let ratio = rows[0].mse_mean / rows[12].mse_mean;
    report(
        3,
        "per-proposal to whole-set MSE ratio",
        (6.0..=13.0).contains(&ratio),
        &format!("seed {seed}: ratio {ratio:.3} (band 6..13)"),
    );
}

#[test]
fn criterion_04_plateau_at_p64() {
    let (seed, rows) = full_sweep();
    let p64 = rows.iter().find(|r| r.p == 64).expect("P=64 row");
    let p1 = &rows[12];
    let ratio = p64.mse_mean / p1.mse_mean;
    report(
        4,
        "P=64 plateau",
        ratio <= 1.10,
        &format!(
            "seed {seed}: mse_mean P=64 {:.4} vs P=1 {:.4}, ratio {ratio:.4} (limit 1.10)",
            p64.mse_mean, p1.mse_mean
        ),
    );
}

#[test]
fn criterion_05_mse_trend_is_monotone() {
    let (seed, rows) = full_sweep();
    let worst = rows
        .windows(2)
        .map(|pair| pair[1].mse_mean / pair[0].mse_mean)
        .fold(0.0f64, f64::max);
    report(
        5,
        "monotone MSE trend",
        worst <= 1.05,
        &format!("seed {seed}: worst adjacent up-ratio {worst:.4} (limit 1.05)"),
    );
}

#[test]
fn criterion_06_variance_ordering_on_the_small_problem() {
    let start = Instant::now();
    let seed = fresh_seed();
    let check = variance_ordering(2000, seed).unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    let ordered = check.ordered_within(1.05);
    report(
        6,
        "paired variance ordering",
        ordered && elapsed < 10.0,
        &format!(
            "seed {seed}: variances at P={GROUP_LEVELS:?} are {:?}, worst ratio {:.4}, {elapsed:.2}s",
            check.variances, check.worst_ratio
        ),
    );
}

// ---------------------------------------------------------------------------
// An independent weight oracle, deliberately written from scratch: linear
// domain, cofactor inverses, naive double loops.
// ---------------------------------------------------------------------------

fn det_small(n: usize, m: &[f64]) -> f64 {
    match n {
        1 => m[0],
        2 => m[0] * m[3] - m[1] * m[2],
        3 => {
            m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6])
                + m[2] * (m[3] * m[7] - m[4] * m[6])
        }
        _ => unreachable!("oracle supports dimensions 1 to 3"),
    }
}

fn inverse_small(n: usize, m: &[f64]) -> Vec<f64> {
    let det = det_small(n, m);
    match n {
        1 => vec![1.0 / det],
        2 => vec![m[3] / det, -m[1] / det, -m[2] / det, m[0] / det],
        3 => {
            let cof = [
                m[4] * m[8] - m[5] * m[7],
                -(m[3] * m[8] - m[5] * m[6]),
                m[3] * m[7] - m[4] * m[6],
                -(m[1] * m[8] - m[2] * m[7]),
                m[0] * m[8] - m[2] * m[6],
                -(m[0] * m[7] - m[1] * m[6]),
                m[1] * m[5] - m[2] * m[4],
                -(m[0] * m[5] - m[2] * m[3]),
                m[0] * m[4] - m[1] * m[3],
            ];
            // Adjugate is the transposed cofactor matrix.
            let mut inv = vec![0.0; 9];
            for r in 0..3 {
                for c in 0..3 {
                    inv[r * 3 + c] = cof[c * 3 + r] / det;
                }
            }
            inv
        }
        _ => unreachable!("oracle supports dimensions 1 to 3"),
    }
}

fn pdf_oracle(mean: &[f64], cov: &[f64], x: &[f64]) -> f64 {
    let n = mean.len();
    let inv = inverse_small(n, cov);
    let diff: Vec<f64> = x.iter().zip(mean).map(|(a, b)| a - b).collect();
    let mut quad = 0.0;
    for r in 0..n {
        for c in 0..n {
            quad += diff[r] * inv[r * n + c] * diff[c];
        }
    }
    let norm = (2.0 * std::f64::consts::PI).powi(n as i32) * det_small(n, cov);
    (-0.5 * quad).exp() / norm.sqrt()
}

struct OracleInstance {
    proposals: Vec<Gaussian>,
    subsets: Vec<Vec<usize>>,
    samples: Vec<Point>,
    target: TargetDensity,
    target_components: Vec<(Vec<f64>, Vec<f64>)>,
    target_scale: f64,
}

impl OracleInstance {
    fn random(rng: &mut ChaCha12Rng) -> Self {
        let n = rng.random_range(2..=16);
        let dim = rng.random_range(1..=3);
        let random_cov = |rng: &mut ChaCha12Rng| {
            let b: Vec<f64> = (0..dim * dim).map(|_| rng.random_range(-0.8..0.8)).collect();
            let mut cov = vec![0.0; dim * dim];
            for r in 0..dim {
                for c in 0..dim {
                    let mut dot = 0.0;
                    for k in 0..dim {
                        dot += b[r * dim + k] * b[c * dim + k];
                    }
                    cov[r * dim + c] = dot + if r == c { 0.4 } else { 0.0 };
                }
            }
            cov
        };
        let random_gaussian = |rng: &mut ChaCha12Rng, spread: f64| {
            let mean: Vec<f64> = (0..dim).map(|_| rng.random_range(-spread..spread)).collect();
            let cov = random_cov(rng);
            (mean, cov)
        };

        let proposal_params: Vec<(Vec<f64>, Vec<f64>)> =
            (0..n).map(|_| random_gaussian(rng, 4.0)).collect();
        let proposals: Vec<Gaussian> = proposal_params
            .iter()
            .map(|(mean, cov)| Gaussian::new(Point::new(mean.clone()).unwrap(), cov.clone()).unwrap())
            .collect();

        let components = rng.random_range(1..=3);
        let target_components: Vec<(Vec<f64>, Vec<f64>)> =
            (0..components).map(|_| random_gaussian(rng, 3.0)).collect();
        let target_scale: f64 = rng.random_range(-2.0..2.0f64).exp();
        let mixture = GaussianMixture::new(
            target_components
                .iter()
                .map(|(mean, cov)| {
                    Gaussian::new(Point::new(mean.clone()).unwrap(), cov.clone()).unwrap()
                })
                .collect(),
        )
        .unwrap();
        let log_scale = target_scale.ln();
        let target = TargetDensity::new(dim, move |x| {
            mixture.logpdf(&Point::new(x.to_vec()).unwrap()).unwrap() + log_scale
        })
        .unwrap();

        // Random partition: one index seeds each subset, the rest scatter.
        let p = rng.random_range(1..=n);
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(rng);
        let mut subsets: Vec<Vec<usize>> = order[..p].iter().map(|&i| vec![i]).collect();
        for &i in &order[p..] {
            let slot = rng.random_range(0..p);
            subsets[slot].push(i);
        }

        let samples = draw_samples(&proposals, rng).unwrap();
        Self {
            proposals,
            subsets,
            samples,
            target,
            target_components,
            target_scale,
        }
    }

    fn target_pdf_oracle(&self, x: &[f64]) -> f64 {
        let sum: f64 = self
            .target_components
            .iter()
            .map(|(mean, cov)| pdf_oracle(mean, cov, x))
            .sum();
        self.target_scale * sum / self.target_components.len() as f64
    }

    fn naive_weights(&self) -> Vec<f64> {
        let mut weights = vec![0.0; self.samples.len()];
        for subset in &self.subsets {
            for &i in subset {
                let mut denominator = 0.0;
                for &j in subset {
                    let proposal = &self.proposals[j];
                    denominator +=
                        pdf_oracle(proposal.mean(), proposal.cov(), &self.samples[i]);
                }
                denominator /= subset.len() as f64;
                weights[i] = self.target_pdf_oracle(&self.samples[i]) / denominator;
            }
        }
        weights
    }
}

#[test]
fn criterion_07_weights_match_the_naive_oracle() {
    let start = Instant::now();
    let seed = fresh_seed();
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let instance = OracleInstance::random(&mut rng);
        let partition =
            Partition::from_subsets(instance.subsets.clone(), instance.samples.len()).unwrap();
        let weighted = compute_weights(
            &instance.target,
            &instance.proposals,
            &partition,
            &instance.samples,
        )
        .unwrap();
        let expected = instance.naive_weights();
        for (lw, want) in weighted.log_weights().iter().zip(&expected) {
            let got = lw.exp();
            worst = worst.max((got - want).abs() / want.abs().max(f64::MIN_POSITIVE));
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    report(
        7,
        "naive-oracle equivalence",
        worst <= 1e-12 && elapsed < 5.0,
        &format!("seed {seed}: 100 instances, worst relative error {worst:.3e}, {elapsed:.2}s"),
    );
}

#[test]
fn criterion_08_exact_specializations() {
    let seed = fresh_seed();
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let instance = OracleInstance::random(&mut rng);
    let n = instance.samples.len();

    // Per-proposal weighting: each denominator is the generating proposal.
    let singleton = Partition::singleton(n).unwrap();
    let weighted = compute_weights(
        &instance.target,
        &instance.proposals,
        &singleton,
        &instance.samples,
    )
    .unwrap();
    let mut worst_single: f64 = 0.0;
    for (i, lw) in weighted.log_weights().iter().enumerate() {
        let proposal = &instance.proposals[i];
        let want = instance.target_pdf_oracle(&instance.samples[i])
            / pdf_oracle(proposal.mean(), proposal.cov(), &instance.samples[i]);
        worst_single = worst_single.max((lw.exp() - want).abs() / want.abs());
    }

    // Whole-set weighting: every denominator is the full proposal mixture.
    let full = Partition::full(n).unwrap();
    let weighted_full = compute_weights(
        &instance.target,
        &instance.proposals,
        &full,
        &instance.samples,
    )
    .unwrap();
    let mut worst_full: f64 = 0.0;
    for (i, lw) in weighted_full.log_weights().iter().enumerate() {
        let denominator: f64 = instance
            .proposals
            .iter()
            .map(|q| pdf_oracle(q.mean(), q.cov(), &instance.samples[i]))
            .sum::<f64>()
            / n as f64;
        let want = instance.target_pdf_oracle(&instance.samples[i]) / denominator;
        worst_full = worst_full.max((lw.exp() - want).abs() / want.abs());
    }

    // A constant integrand self-normalizes to exactly one.
    let ones = weighted_full.estimate_moment(|_| vec![1.0]).unwrap();
    let constant_exact = ones.moment[0] == 1.0;

    // Sampling a normalized target from itself estimates Z = 1.
    let gaussian = Gaussian::new(Point::new(vec![0.7, -0.3]).unwrap(), vec![2.0, 0.3, 0.3, 1.0])
        .unwrap();
    let self_target = {
        let gaussian = gaussian.clone();
        TargetDensity::new(2, move |x| {
            gaussian.logpdf(&Point::new(x.to_vec()).unwrap()).unwrap()
        })
        .unwrap()
    };
    let self_proposals = vec![gaussian];
    let self_samples = draw_samples(&self_proposals, &mut rng).unwrap();
    let self_partition = Partition::singleton(1).unwrap();
    let self_weighted = compute_weights(
        &self_target,
        &self_proposals,
        &self_partition,
        &self_samples,
    )
    .unwrap();
    let z_hat = self_weighted
        .estimate_moment(|x: &Point| x.to_vec())
        .unwrap()
        .z_hat;
    let z_error = (z_hat - 1.0).abs();

    report(
        8,
        "exact specializations",
        worst_single <= 1e-12 && worst_full <= 1e-12 && constant_exact && z_error <= 1e-14,
        &format!(
            "seed {seed}: per-proposal err {worst_single:.3e}, whole-set err {worst_full:.3e}, \
             constant integrand gives {} exactly, self-target Z error {z_error:.3e}",
            ones.moment[0]
        ),
    );
}

#[test]
fn criterion_09_sampling_procedures_agree() {
    let start = Instant::now();
    let seed = fresh_seed();
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mixture = benchmark_mixture();
    let count = 100_000;

    let random_points = mixture.sample_random(count, &mut rng);
    let mut deterministic_points = Vec::with_capacity(count);
    while deterministic_points.len() < count {
        deterministic_points.extend(mixture.sample_deterministic(&mut rng));
    }

    let moments = |points: &[Point]| {
        let mut mean = [0.0f64; 2];
        for p in points {
            mean[0] += p[0];
            mean[1] += p[1];
        }
        mean[0] /= points.len() as f64;
        mean[1] /= points.len() as f64;
        let mut cov = [0.0f64; 4];
        for p in points {
            let d = [p[0] - mean[0], p[1] - mean[1]];
            cov[0] += d[0] * d[0];
            cov[1] += d[0] * d[1];
            cov[3] += d[1] * d[1];
        }
        cov[0] /= (points.len() - 1) as f64;
        cov[1] /= (points.len() - 1) as f64;
        cov[2] = cov[1];
        cov[3] /= (points.len() - 1) as f64;
        (mean, cov)
    };
    let (mean_r, cov_r) = moments(&random_points);
    let (mean_d, cov_d) = moments(&deterministic_points);

    let truth = [1.6, 1.4];
    let analytic_cov = mixture.covariance();
    let mut mean_ok = true;
    let mut worst_sigmas: f64 = 0.0;
    for d in 0..2 {
        let se = (analytic_cov[d * 2 + d] / count as f64).sqrt();
        for mean in [&mean_r, &mean_d] {
            let sigmas = (mean[d] - truth[d]).abs() / se;
            worst_sigmas = worst_sigmas.max(sigmas);
            mean_ok &= sigmas <= 4.0;
        }
    }
    let frobenius = |m: &[f64]| m.iter().map(|v| v * v).sum::<f64>().sqrt();
    let diff: Vec<f64> = cov_r.iter().zip(cov_d.iter()).map(|(a, b)| a - b).collect();
    let cov_rel = frobenius(&diff) / frobenius(&cov_d);

    let elapsed = start.elapsed().as_secs_f64();
    report(
        9,
        "sampling procedure equivalence",
        mean_ok && cov_rel <= 0.05 && elapsed < 10.0,
        &format!(
            "seed {seed}: 10^5 points per procedure, worst mean deviation {worst_sigmas:.2} SE \
             (limit 4), covariance Frobenius difference {:.3}% (limit 5%), {elapsed:.2}s",
            100.0 * cov_rel
        ),
    );
}

#[test]
fn criterion_10_group_count_selection_is_frugal_and_consistent() {
    let seed = fresh_seed();
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let n = 4096;
    let target = benchmark_target();
    let proposals: Vec<Gaussian> = (0..n)
        .map(|_| {
            let mean: Vec<f64> = (0..2).map(|_| rng.random_range(-20.0..20.0)).collect();
            Gaussian::new(Point::new(mean).unwrap(), vec![25.0, 0.0, 0.0, 25.0]).unwrap()
        })
        .collect();
    let samples = draw_samples(&proposals, &mut rng).unwrap();
    let schedule = pdmmis_cli::config::halving_schedule(n);
    let result = select_num_mixtures(
        &target,
        &proposals,
        &samples,
        |x: &Point| x.to_vec(),
        &schedule,
        0.01,
        &mut rng,
    )
    .unwrap();

    let budget_ok = result.distinct_proposal_evals <= (n * n) as u64;

    let mut trace_ok = true;
    for step in &result.steps {
        let weighted = compute_weights(&target, &proposals, &step.partition, &samples).unwrap();
        let direct = weighted.estimate_moment(|x: &Point| x.to_vec()).unwrap();
        trace_ok &= direct.moment == step.estimate.moment && direct.z_hat == step.estimate.z_hat;
    }

    report(
        10,
        "group-count selection",
        budget_ok && trace_ok,
        &format!(
            "seed {seed}: visited {} steps, chose P={}, distinct evaluations {} <= {}, \
             trace identical to direct recomputation: {trace_ok}",
            result.steps.len(),
            result.chosen_p(),
            result.distinct_proposal_evals,
            (n * n) as u64
        ),
    );
}
