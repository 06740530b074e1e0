//! Monte Carlo harness: seeded, repeatable estimation experiments.
//!
//! Three studies are covered: posterior narrowing as the record grows,
//! estimation variance across a phase sweep against the SQL/OCRB/QCRB
//! ladder, and the width of the beyond-SQL phase window as a function of
//! probe purity. Every trial derives its own RNG substream from the master
//! seed, so reports are pure functions of their configuration and identical
//! whether trials run serially or in parallel.

use rayon::prelude::*;

use crate::bayes::{self, PosteriorGrid};
use crate::bounds::{self, BoundsReport};
use crate::error::{Error, Result};
use crate::measurement::sample_homodyne;
use crate::rng::substream;
use crate::state::SqueezedThermalState;

/// How a state was specified: directly by parameters or by measured dB
/// noise levels. Kept distinct so configs round-trip in their original
/// form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StateSpec {
    Params { r: f64, r_prime: f64 },
    Decibels { squeezing_db: f64, antisqueezing_db: f64 },
}

impl StateSpec {
    pub fn resolve(&self) -> Result<SqueezedThermalState> {
        match *self {
            StateSpec::Params { r, r_prime } => SqueezedThermalState::new(r, r_prime),
            StateSpec::Decibels {
                squeezing_db,
                antisqueezing_db,
            } => SqueezedThermalState::from_db(squeezing_db, antisqueezing_db),
        }
    }
}

/// Validated description of one experiment run; the single source of truth
/// recorded in every output file. `state`/`states` and `theta`/`thetas`
/// mirror which form the configuration used.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub state: Option<StateSpec>,
    pub states: Option<Vec<StateSpec>>,
    pub theta: Option<f64>,
    pub thetas: Option<Vec<f64>>,
    pub n_samples: usize,
    pub repetitions: usize,
    pub seed: u64,
    pub grid_points: usize,
    pub out_path: Option<String>,
}

impl ExperimentConfig {
    /// The single probe state; errors when the config carries none.
    pub fn primary_state(&self) -> Result<SqueezedThermalState> {
        match &self.state {
            Some(spec) => spec.resolve(),
            None => Err(Error::Config(vec![
                "a state spec is required (state.r/state.r_prime or \
                 state.squeezing_db/state.antisqueezing_db, or the matching flags)"
                    .into(),
            ])),
        }
    }

    /// Phase list: `thetas` if present, else the single `theta`.
    pub fn theta_list(&self) -> Result<Vec<f64>> {
        if let Some(list) = &self.thetas {
            return Ok(list.clone());
        }
        if let Some(theta) = self.theta {
            return Ok(vec![theta]);
        }
        Err(Error::Config(vec![
            "a phase is required (run.theta or run.thetas, or --theta/--thetas)".into(),
        ]))
    }
}

/// Probe ladder used by the purity scan when no states are configured:
/// the three measured dB pairs plus one interpolated between the second
/// and third, ordered by ascending purity.
pub fn default_purity_ladder() -> Vec<StateSpec> {
    vec![
        StateSpec::Decibels { squeezing_db: 6.02, antisqueezing_db: 10.96 },
        StateSpec::Decibels { squeezing_db: 4.50, antisqueezing_db: 7.72 },
        StateSpec::Decibels { squeezing_db: 3.21, antisqueezing_db: 4.23 },
        StateSpec::Decibels { squeezing_db: 3.21, antisqueezing_db: 3.41 },
    ]
}

/// Twelve equispaced phases spanning `[0, π/2]`.
pub fn default_sweep_thetas() -> Vec<f64> {
    let n = 12usize;
    let step = std::f64::consts::FRAC_PI_2 / (n - 1) as f64;
    (0..n).map(|i| i as f64 * step).collect()
}

/// Whether trials run on the current thread or across the rayon pool.
/// Either way the output is identical; the knob exists so that can be
/// verified.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExecMode {
    Serial,
    Parallel,
}

/// Point estimate and posterior spread from a single seeded trial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialResult {
    pub map_estimate: f64,
    pub posterior_variance: f64,
}

/// Everything measured at one phase: the per-repetition trials, their
/// aggregates, and the analytic bounds for context.
#[derive(Debug, Clone)]
pub struct ThetaAggregate {
    pub theta: f64,
    pub trials: Vec<TrialResult>,
    pub mean_estimate: f64,
    /// Unbiased variance of the MAP estimates across repetitions.
    pub empirical_variance: f64,
    pub mean_posterior_variance: f64,
    /// Jackknife standard error of `empirical_variance`; `None` below
    /// three repetitions, where the leave-one-out variances are undefined.
    pub stderr: Option<f64>,
    pub bounds: BoundsReport,
}

/// Full sweep output: one aggregate per requested phase.
#[derive(Debug, Clone)]
pub struct ExperimentReport {
    pub state: SqueezedThermalState,
    pub n_samples: usize,
    pub repetitions: usize,
    pub seed: u64,
    pub grid_points: usize,
    pub aggregates: Vec<ThetaAggregate>,
}

/// One row of the purity scan.
#[derive(Debug, Clone)]
pub struct PurityScanRow {
    pub purity: f64,
    pub r: f64,
    pub r_prime: f64,
    /// Width of the interval where `F(θ) > 4n`.
    pub delta_theta_theory: f64,
    /// Width of the widest contiguous run of sweep phases whose empirical
    /// variance beats the SQL; limited by the phase-grid resolution.
    pub delta_theta_empirical: f64,
}

/// Samples a homodyne record and runs the full inference chain once.
pub fn run_trial(
    state: &SqueezedThermalState,
    theta_true: f64,
    n_samples: usize,
    seed: u64,
    grid_points: usize,
) -> Result<TrialResult> {
    let samples = sample_homodyne(state, theta_true, n_samples, seed)?;
    let post = bayes::posterior(&samples, grid_points)?;
    Ok(TrialResult {
        map_estimate: bayes::map_estimate(&post)?,
        posterior_variance: bayes::posterior_variance(&post),
    })
}

/// Runs `repetitions` independent trials at one phase, each on its own
/// substream of `seed`, and aggregates them. Needs at least two
/// repetitions for the variance across repetitions to exist.
pub fn run_repeated(
    state: &SqueezedThermalState,
    theta_true: f64,
    n_samples: usize,
    repetitions: usize,
    seed: u64,
    grid_points: usize,
    mode: ExecMode,
) -> Result<ThetaAggregate> {
    if repetitions < 2 {
        return Err(Error::InvalidParameter(
            "variance aggregates need at least 2 repetitions".into(),
        ));
    }
    let trials = run_indexed_trials(state, theta_true, n_samples, repetitions, seed, grid_points, mode)?;
    aggregate(state, theta_true, n_samples, trials)
}

fn run_indexed_trials(
    state: &SqueezedThermalState,
    theta_true: f64,
    n_samples: usize,
    repetitions: usize,
    seed: u64,
    grid_points: usize,
    mode: ExecMode,
) -> Result<Vec<TrialResult>> {
    let job = |rep: usize| {
        run_trial(
            state,
            theta_true,
            n_samples,
            substream(seed, rep as u64),
            grid_points,
        )
    };
    match mode {
        ExecMode::Serial => (0..repetitions).map(job).collect(),
        ExecMode::Parallel => (0..repetitions).into_par_iter().map(job).collect(),
    }
}

fn aggregate(
    state: &SqueezedThermalState,
    theta: f64,
    n_samples: usize,
    trials: Vec<TrialResult>,
) -> Result<ThetaAggregate> {
    let maps: Vec<f64> = trials.iter().map(|t| t.map_estimate).collect();
    let mean_estimate = mean(&maps);
    let empirical_variance = sample_variance(&maps);
    let mean_posterior_variance =
        trials.iter().map(|t| t.posterior_variance).sum::<f64>() / trials.len() as f64;
    let stderr = jackknife_stderr_of_variance(&maps);
    let bounds = bounds::bounds_report(state, theta, n_samples as u64)?;
    Ok(ThetaAggregate {
        theta,
        trials,
        mean_estimate,
        empirical_variance,
        mean_posterior_variance,
        stderr,
        bounds,
    })
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn sample_variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64
}

/// Jackknife standard error of the unbiased sample variance: recompute the
/// variance with each point left out, then
/// `SE² = (R-1)/R · Σ (V₍ᵢ₎ - V̄)²`. Needs R >= 3 so every leave-one-out
/// subset still has a variance.
fn jackknife_stderr_of_variance(xs: &[f64]) -> Option<f64> {
    let r = xs.len();
    if r < 3 {
        return None;
    }
    let leave_outs: Vec<f64> = (0..r)
        .map(|i| {
            let rest: Vec<f64> = xs
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, x)| *x)
                .collect();
            sample_variance(&rest)
        })
        .collect();
    let lo_mean = mean(&leave_outs);
    let spread: f64 = leave_outs.iter().map(|v| (v - lo_mean) * (v - lo_mean)).sum();
    Some(((r - 1) as f64 / r as f64 * spread).sqrt())
}

/// Sweeps the phase list, running `repetitions` trials at each phase.
///
/// Trial `(j, i)` (phase index `j`, repetition `i`) draws from substream
/// `j·R + i` of the master seed, so results are keyed by position and the
/// report does not depend on execution order.
pub fn sweep_theta(
    state: &SqueezedThermalState,
    thetas: &[f64],
    n_samples: usize,
    repetitions: usize,
    seed: u64,
    grid_points: usize,
    mode: ExecMode,
) -> Result<ExperimentReport> {
    if thetas.is_empty() {
        return Err(Error::Config(vec!["the phase list must not be empty".into()]));
    }
    if repetitions < 2 {
        return Err(Error::InvalidParameter(
            "variance aggregates need at least 2 repetitions".into(),
        ));
    }
    let r = repetitions;
    let total = thetas.len() * r;
    let job = |k: usize| {
        let theta = thetas[k / r];
        run_trial(
            state,
            theta,
            n_samples,
            substream(seed, k as u64),
            grid_points,
        )
    };
    let flat: Result<Vec<TrialResult>> = match mode {
        ExecMode::Serial => (0..total).map(job).collect(),
        ExecMode::Parallel => (0..total).into_par_iter().map(job).collect(),
    };
    let flat = flat?;
    let aggregates: Result<Vec<ThetaAggregate>> = thetas
        .iter()
        .enumerate()
        .map(|(j, &theta)| aggregate(state, theta, n_samples, flat[j * r..(j + 1) * r].to_vec()))
        .collect();
    Ok(ExperimentReport {
        state: *state,
        n_samples,
        repetitions,
        seed,
        grid_points,
        aggregates: aggregates?,
    })
}

/// For each probe state: the predicted beyond-SQL window width and the
/// width observed in a seeded phase sweep (widest contiguous run of sweep
/// phases with empirical variance below the SQL). State `k` sweeps on
/// substream `k` of the master seed.
pub fn purity_scan(
    states: &[SqueezedThermalState],
    thetas: &[f64],
    n_samples: usize,
    repetitions: usize,
    seed: u64,
    grid_points: usize,
    mode: ExecMode,
) -> Result<Vec<PurityScanRow>> {
    if states.is_empty() {
        return Err(Error::Config(vec!["the state list must not be empty".into()]));
    }
    states
        .iter()
        .enumerate()
        .map(|(k, state)| {
            let report = sweep_theta(
                state,
                thetas,
                n_samples,
                repetitions,
                substream(seed, k as u64),
                grid_points,
                mode,
            )?;
            Ok(PurityScanRow {
                purity: state.purity(),
                r: state.r(),
                r_prime: state.r_prime(),
                delta_theta_theory: bounds::beyond_sql_interval(state).width(),
                delta_theta_empirical: empirical_interval_width(&report),
            })
        })
        .collect()
}

fn empirical_interval_width(report: &ExperimentReport) -> f64 {
    let below: Vec<bool> = report
        .aggregates
        .iter()
        .map(|agg| agg.empirical_variance < agg.bounds.sql)
        .collect();
    let mut best: Option<(usize, usize)> = None;
    let mut run_start = None;
    for (i, &b) in below.iter().enumerate() {
        match (b, run_start) {
            (true, None) => run_start = Some(i),
            (false, Some(s)) => {
                if best.is_none_or(|(bs, be)| i - 1 - s > be - bs) {
                    best = Some((s, i - 1));
                }
                run_start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = run_start {
        let e = below.len() - 1;
        if best.is_none_or(|(bs, be)| e - s > be - bs) {
            best = Some((s, e));
        }
    }
    let thetas: Vec<f64> = report.aggregates.iter().map(|a| a.theta).collect();
    match best {
        Some((s, e)) => (s..=e).map(|i| cell_width(&thetas, i)).sum(),
        None => 0.0,
    }
}

/// Width of the phase cell a sweep point represents: half the gap to each
/// neighbor, clipped at the sweep ends. Summing cells over a run avoids
/// the half-cell-per-edge undercount of `theta_last - theta_first`.
fn cell_width(thetas: &[f64], i: usize) -> f64 {
    let lo = if i == 0 {
        thetas[0]
    } else {
        0.5 * (thetas[i] + thetas[i - 1])
    };
    let hi = if i == thetas.len() - 1 {
        thetas[i]
    } else {
        0.5 * (thetas[i] + thetas[i + 1])
    };
    hi - lo
}

/// Posterior curves for a growing record: one posterior per requested
/// record length, each over the leading `n` outcomes of the same seeded
/// sample stream (the record grows, earlier outcomes are shared).
pub fn posterior_family(
    state: &SqueezedThermalState,
    theta_true: f64,
    n_list: &[usize],
    seed: u64,
    grid_points: usize,
) -> Result<Vec<(usize, PosteriorGrid)>> {
    let max_n = *n_list
        .iter()
        .max()
        .ok_or_else(|| Error::Config(vec!["posterior needs at least one record length".into()]))?;
    let full = sample_homodyne(state, theta_true, max_n, seed)?;
    n_list
        .iter()
        .map(|&n| {
            let prefix = crate::measurement::SampleSet::from_parts(
                full.samples()[..n].to_vec(),
                *state,
                theta_true,
                seed,
            )?;
            Ok((n, bayes::posterior(&prefix, grid_points)?))
        })
        .collect()
}
