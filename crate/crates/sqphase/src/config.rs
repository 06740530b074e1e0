//! Configuration files and flag overrides.
//!
//! Configs are JSON with three optional sections:
//!
//! ```json
//! {
//!   "state": {"r": 0.37, "r_prime": 0.0},
//!   "run":   {"theta": 0.4, "n_samples": 1000, "repetitions": 20,
//!             "seed": 1, "grid_points": 2048},
//!   "out":   {"path": "run.csv"}
//! }
//! ```
//!
//! A state is given either as `{r, r_prime}` or as
//! `{squeezing_db, antisqueezing_db}` (never both); the purity scan may
//! instead carry a `states` array. The phase is `run.theta` (single) or
//! `run.thetas` (list), never both. Validation reports every problem
//! found, not just the first. Precedence is flag > file > default.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::experiments::{ExperimentConfig, StateSpec};

pub const DEFAULT_N_SAMPLES: usize = 1000;
pub const DEFAULT_REPETITIONS: usize = 20;
pub const DEFAULT_SEED: u64 = 1;

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    state: Option<RawState>,
    #[serde(skip_serializing_if = "Option::is_none")]
    states: Option<Vec<RawState>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    run: Option<RawRun>,
    #[serde(skip_serializing_if = "Option::is_none")]
    out: Option<RawOut>,
}

#[derive(Debug, Default, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawState {
    #[serde(skip_serializing_if = "Option::is_none")]
    r: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    r_prime: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    squeezing_db: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    antisqueezing_db: Option<f64>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRun {
    #[serde(skip_serializing_if = "Option::is_none")]
    theta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    thetas: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    n_samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    repetitions: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    grid_points: Option<usize>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOut {
    #[serde(skip_serializing_if = "Option::is_none")]
    path: Option<String>,
}

/// Command-line values layered on top of a config file. `None` means the
/// flag was not given.
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub r: Option<f64>,
    pub r_prime: Option<f64>,
    pub squeezing_db: Option<f64>,
    pub antisqueezing_db: Option<f64>,
    pub theta: Option<f64>,
    pub thetas: Option<Vec<f64>>,
    pub n_samples: Option<usize>,
    pub repetitions: Option<usize>,
    pub seed: Option<u64>,
    pub grid_points: Option<usize>,
    pub out_path: Option<String>,
}

impl Overrides {
    fn has_state_flag(&self) -> bool {
        self.r.is_some()
            || self.r_prime.is_some()
            || self.squeezing_db.is_some()
            || self.antisqueezing_db.is_some()
    }
}

/// Parses and validates a config file on its own (no overrides).
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    build_config(Some(text), &Overrides::default())
}

/// Merges an optional config file with flag overrides and validates the
/// result, collecting every validation error.
pub fn build_config(file_text: Option<&str>, flags: &Overrides) -> Result<ExperimentConfig> {
    let mut raw: RawConfig = match file_text {
        Some(text) => serde_json::from_str(text)
            .map_err(|e| Error::Config(vec![format!("malformed config JSON: {e}")]))?,
        None => RawConfig::default(),
    };

    // flags override the file; any state flag replaces the whole state spec
    if flags.has_state_flag() {
        raw.state = Some(RawState {
            r: flags.r,
            r_prime: flags.r_prime,
            squeezing_db: flags.squeezing_db,
            antisqueezing_db: flags.antisqueezing_db,
        });
    }
    let run = raw.run.get_or_insert_with(RawRun::default);
    if flags.theta.is_some() {
        run.theta = flags.theta;
        run.thetas = None;
    }
    if let Some(thetas) = &flags.thetas {
        run.thetas = Some(thetas.clone());
        run.theta = None;
    }
    if flags.n_samples.is_some() {
        run.n_samples = flags.n_samples;
    }
    if flags.repetitions.is_some() {
        run.repetitions = flags.repetitions;
    }
    if flags.seed.is_some() {
        run.seed = flags.seed;
    }
    if flags.grid_points.is_some() {
        run.grid_points = flags.grid_points;
    }
    if let Some(path) = &flags.out_path {
        raw.out.get_or_insert_with(RawOut::default).path = Some(path.clone());
    }

    validate(raw)
}

fn validate(raw: RawConfig) -> Result<ExperimentConfig> {
    let mut errors = Vec::new();

    if raw.state.is_some() && raw.states.is_some() {
        errors.push("give either 'state' or 'states', not both".to_string());
    }
    let state = raw
        .state
        .as_ref()
        .and_then(|rs| validate_state(rs, "state", &mut errors));
    let states = raw.states.as_ref().map(|list| {
        list.iter()
            .enumerate()
            .filter_map(|(i, rs)| validate_state(rs, &format!("states[{i}]"), &mut errors))
            .collect::<Vec<_>>()
    });

    let run = raw.run.unwrap_or_default();
    if run.theta.is_some() && run.thetas.is_some() {
        errors.push("give either 'run.theta' or 'run.thetas', not both".to_string());
    }
    if let Some(theta) = run.theta {
        check_theta(theta, "run.theta", &mut errors);
    }
    if let Some(thetas) = &run.thetas {
        if thetas.is_empty() {
            errors.push("'run.thetas' must not be empty".to_string());
        }
        for (i, &theta) in thetas.iter().enumerate() {
            check_theta(theta, &format!("run.thetas[{i}]"), &mut errors);
        }
    }

    let n_samples = run.n_samples.unwrap_or(DEFAULT_N_SAMPLES);
    if n_samples == 0 {
        errors.push("'run.n_samples' must be at least 1".to_string());
    }
    let repetitions = run.repetitions.unwrap_or(DEFAULT_REPETITIONS);
    if repetitions == 0 {
        errors.push("'run.repetitions' must be at least 1".to_string());
    }
    let grid_points = run.grid_points.unwrap_or(crate::bayes::DEFAULT_GRID_POINTS);
    if grid_points < 64 {
        errors.push(format!(
            "'run.grid_points' must be at least 64, got {grid_points}"
        ));
    }
    let seed = run.seed.unwrap_or(DEFAULT_SEED);

    if !errors.is_empty() {
        return Err(Error::Config(errors));
    }
    Ok(ExperimentConfig {
        state,
        states,
        theta: run.theta,
        thetas: run.thetas,
        n_samples,
        repetitions,
        seed,
        grid_points,
        out_path: raw.out.and_then(|o| o.path),
    })
}

fn check_theta(theta: f64, key: &str, errors: &mut Vec<String>) {
    if !theta.is_finite() || !(0.0..=std::f64::consts::FRAC_PI_2).contains(&theta) {
        errors.push(format!(
            "'{key}' must lie in [0, pi/2] (phases outside are not identifiable \
             from the quadrature variance), got {theta}"
        ));
    }
}

fn validate_state(raw: &RawState, key: &str, errors: &mut Vec<String>) -> Option<StateSpec> {
    let has_params = raw.r.is_some() || raw.r_prime.is_some();
    let has_db = raw.squeezing_db.is_some() || raw.antisqueezing_db.is_some();
    if has_params && has_db {
        errors.push(format!(
            "'{key}' mixes the two spec forms: give r/r_prime or \
             squeezing_db/antisqueezing_db, not both"
        ));
        return None;
    }
    let spec = if has_db {
        let squeezing_db = match raw.squeezing_db {
            Some(s) => s,
            None => {
                errors.push(format!("'{key}.squeezing_db' is required with antisqueezing_db"));
                return None;
            }
        };
        StateSpec::Decibels {
            squeezing_db,
            antisqueezing_db: raw.antisqueezing_db.unwrap_or(squeezing_db),
        }
    } else if has_params {
        let r = match raw.r {
            Some(r) => r,
            None => {
                errors.push(format!("'{key}.r' is required with r_prime"));
                return None;
            }
        };
        StateSpec::Params {
            r,
            r_prime: raw.r_prime.unwrap_or(0.0),
        }
    } else {
        errors.push(format!(
            "'{key}' needs r/r_prime or squeezing_db/antisqueezing_db"
        ));
        return None;
    };
    match spec.resolve() {
        Ok(_) => Some(spec),
        Err(e) => {
            errors.push(format!("'{key}': {e}"));
            None
        }
    }
}

fn state_to_raw(spec: &StateSpec) -> RawState {
    match *spec {
        StateSpec::Params { r, r_prime } => RawState {
            r: Some(r),
            r_prime: Some(r_prime),
            ..RawState::default()
        },
        StateSpec::Decibels {
            squeezing_db,
            antisqueezing_db,
        } => RawState {
            squeezing_db: Some(squeezing_db),
            antisqueezing_db: Some(antisqueezing_db),
            ..RawState::default()
        },
    }
}

/// Renders a config back into the file schema as single-line JSON, the
/// form embedded in every output's `# meta:` header. Parsing the result
/// reproduces the config exactly.
pub fn config_to_json(cfg: &ExperimentConfig) -> String {
    let raw = RawConfig {
        state: cfg.state.as_ref().map(state_to_raw),
        states: cfg
            .states
            .as_ref()
            .map(|list| list.iter().map(state_to_raw).collect()),
        run: Some(RawRun {
            theta: cfg.theta,
            thetas: cfg.thetas.clone(),
            n_samples: Some(cfg.n_samples),
            repetitions: Some(cfg.repetitions),
            seed: Some(cfg.seed),
            grid_points: Some(cfg.grid_points),
        }),
        out: cfg.out_path.as_ref().map(|p| RawOut {
            path: Some(p.clone()),
        }),
    };
    serde_json::to_string(&raw).expect("config serializes")
}

/// Reads and parses a config file.
pub fn load_config(path: &std::path::Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path)?;
    parse_config(&text)
}
