//! Command-line front end.
//!
//! Subcommands: `convert`, `bounds`, `interval` (analytic, flags only) and
//! `posterior`, `simulate`, `sweep`, `purity-scan` (config-driven with flag
//! overrides; flag > file > default). Errors exit nonzero and print
//! `error: ...` lines on stderr.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use sqphase::config::{build_config, Overrides};
use sqphase::error::Error;
use sqphase::experiments::{
    default_purity_ladder, default_sweep_thetas, posterior_family, purity_scan, run_repeated,
    sweep_theta, ExecMode, ExperimentConfig,
};
use sqphase::report::{self, fmt_float};
use sqphase::state::SqueezedThermalState;
use sqphase::{bounds, svg};

#[derive(Parser)]
#[command(name = "sqphase", version, about = "Phase estimation with squeezed thermal light")]
struct Cli {
    /// Run trials on the current thread instead of the thread pool
    /// (output is identical either way).
    #[arg(long, global = true)]
    serial: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Convert measured dB noise levels to state parameters.
    Convert {
        /// Noise suppression below the vacuum level, in dB (magnitude).
        #[arg(long)]
        squeezing_db: f64,
        /// Noise amplification above the vacuum level, in dB.
        #[arg(long)]
        antisqueezing_db: f64,
    },

    /// Print the bound ladder (CSV) for a probe state at one or more phases.
    Bounds {
        #[arg(long)]
        r: f64,
        #[arg(long, default_value_t = 0.0)]
        r_prime: f64,
        /// Number of measurements N entering the bounds.
        #[arg(long)]
        n_meas: u64,
        /// Phases to evaluate (radians); default is 12 equispaced on [0, pi/2].
        #[arg(long, value_delimiter = ',')]
        theta: Option<Vec<f64>>,
        /// Write CSV here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },

    /// Print the phase window where the probe beats the SQL.
    Interval {
        #[arg(long)]
        r: f64,
        #[arg(long, default_value_t = 0.0)]
        r_prime: f64,
    },

    /// Compute posterior curves from a seeded homodyne record.
    Posterior {
        #[command(flatten)]
        run: RunArgs,
        /// Record lengths for a family of curves (e.g. 100,300,500,1000);
        /// default is the configured n_samples. Curves share the leading
        /// outcomes of one sample stream.
        #[arg(long, value_delimiter = ',')]
        curves: Option<Vec<usize>>,
        /// Also render an SVG figure next to the output CSV.
        #[arg(long)]
        plot: bool,
    },

    /// Run repeated trials at a single phase and report the estimates.
    Simulate {
        #[command(flatten)]
        run: RunArgs,
    },

    /// Sweep the phase list; writes per-trial and aggregate CSVs.
    Sweep {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        plot: bool,
    },

    /// Beyond-SQL window width against probe purity.
    #[command(name = "purity-scan")]
    PurityScan {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        plot: bool,
    },
}

/// Config file plus per-key overrides shared by the experiment commands.
#[derive(Args)]
struct RunArgs {
    /// Config file (JSON; see README for the schema).
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    r: Option<f64>,
    #[arg(long)]
    r_prime: Option<f64>,
    #[arg(long)]
    squeezing_db: Option<f64>,
    #[arg(long)]
    antisqueezing_db: Option<f64>,
    /// Single true phase (radians).
    #[arg(long)]
    theta: Option<f64>,
    /// Phase list (radians, comma separated).
    #[arg(long, value_delimiter = ',')]
    thetas: Option<Vec<f64>>,
    #[arg(long)]
    n_samples: Option<usize>,
    #[arg(long)]
    repetitions: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    grid_points: Option<usize>,
    /// Output path (CSV).
    #[arg(long)]
    out: Option<String>,
}

impl RunArgs {
    fn build(&self) -> sqphase::Result<ExperimentConfig> {
        let file_text = match &self.config {
            Some(path) => Some(std::fs::read_to_string(path)?),
            None => None,
        };
        let flags = Overrides {
            r: self.r,
            r_prime: self.r_prime,
            squeezing_db: self.squeezing_db,
            antisqueezing_db: self.antisqueezing_db,
            theta: self.theta,
            thetas: self.thetas.clone(),
            n_samples: self.n_samples,
            repetitions: self.repetitions,
            seed: self.seed,
            grid_points: self.grid_points,
            out_path: self.out.clone(),
        };
        build_config(file_text.as_deref(), &flags)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mode = if cli.serial {
        ExecMode::Serial
    } else {
        ExecMode::Parallel
    };
    match run(cli.command, mode) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            match &err {
                Error::Config(errors) => {
                    for e in errors {
                        eprintln!("error: config: {e}");
                    }
                }
                other => eprintln!("error: {other}"),
            }
            ExitCode::FAILURE
        }
    }
}

fn run(command: Command, mode: ExecMode) -> sqphase::Result<()> {
    match command {
        Command::Convert {
            squeezing_db,
            antisqueezing_db,
        } => {
            let s = SqueezedThermalState::from_db(squeezing_db, antisqueezing_db)?;
            println!("r {}", fmt_float(s.r()));
            println!("r_prime {}", fmt_float(s.r_prime()));
            println!("purity {}", fmt_float(s.purity()));
            println!("mean_photon {}", fmt_float(s.mean_photon_number()));
            Ok(())
        }

        Command::Bounds {
            r,
            r_prime,
            n_meas,
            theta,
            out,
        } => {
            let s = SqueezedThermalState::new(r, r_prime)?;
            let thetas = theta.unwrap_or_else(default_sweep_thetas);
            let csv = report::bounds_csv(&s, &thetas, n_meas)?;
            emit(out.as_deref(), &csv)
        }

        Command::Interval { r, r_prime } => {
            let s = SqueezedThermalState::new(r, r_prime)?;
            let iv = bounds::beyond_sql_interval(&s);
            println!("empty {}", iv.empty);
            println!("theta_low {}", fmt_float(iv.theta_low));
            println!("theta_high {}", fmt_float(iv.theta_high));
            println!("delta_theta {}", fmt_float(iv.width()));
            Ok(())
        }

        Command::Posterior { run, curves, plot } => {
            let cfg = run.build()?;
            let state = cfg.primary_state()?;
            let thetas = cfg.theta_list()?;
            let theta = single_theta(&thetas)?;
            let n_list = curves.unwrap_or_else(|| vec![cfg.n_samples]);
            if n_list.is_empty() || n_list.contains(&0) {
                return Err(Error::InvalidParameter(
                    "--curves entries must be positive".into(),
                ));
            }
            let family = posterior_family(&state, theta, &n_list, cfg.seed, cfg.grid_points)?;
            match &cfg.out_path {
                None => {
                    if family.len() > 1 {
                        return Err(Error::InvalidParameter(
                            "writing several curves needs an output path (--out)".into(),
                        ));
                    }
                    let csv = report::posterior_csv(&family[0].1, &cfg);
                    print!("{csv}");
                }
                Some(path) => {
                    for (n, grid) in &family {
                        let per_curve = ExperimentConfig {
                            n_samples: *n,
                            ..cfg.clone()
                        };
                        let target = if family.len() == 1 {
                            PathBuf::from(path)
                        } else {
                            suffixed(path, &format!("_n{n}"))
                        };
                        std::fs::write(&target, report::posterior_csv(grid, &per_curve))?;
                    }
                    if plot {
                        let fig = svg::posterior_figure(&family);
                        std::fs::write(with_extension(path, "svg"), fig)?;
                    }
                }
            }
            Ok(())
        }

        Command::Simulate { run } => {
            let cfg = run.build()?;
            let state = cfg.primary_state()?;
            let thetas = cfg.theta_list()?;
            let theta = single_theta(&thetas)?;
            let agg = run_repeated(
                &state,
                theta,
                cfg.n_samples,
                cfg.repetitions,
                cfg.seed,
                cfg.grid_points,
                mode,
            )?;
            let report_one = sqphase::experiments::ExperimentReport {
                state,
                n_samples: cfg.n_samples,
                repetitions: cfg.repetitions,
                seed: cfg.seed,
                grid_points: cfg.grid_points,
                aggregates: vec![agg],
            };
            let csv = report::trials_csv(&report_one, &cfg);
            let agg = &report_one.aggregates[0];
            match &cfg.out_path {
                None => print!("{csv}"),
                Some(path) => {
                    std::fs::write(path, csv)?;
                    println!("theta {}", fmt_float(agg.theta));
                    println!("mean_estimate {}", fmt_float(agg.mean_estimate));
                    println!("emp_var {}", fmt_float(agg.empirical_variance));
                    println!("mean_post_var {}", fmt_float(agg.mean_posterior_variance));
                    if let Some(se) = agg.stderr {
                        println!("stderr {}", fmt_float(se));
                    }
                }
            }
            Ok(())
        }

        Command::Sweep { run, plot } => {
            let cfg = run.build()?;
            let state = cfg.primary_state()?;
            let thetas = sweep_thetas(&cfg);
            let report_full = sweep_theta(
                &state,
                &thetas,
                cfg.n_samples,
                cfg.repetitions,
                cfg.seed,
                cfg.grid_points,
                mode,
            )?;
            let path = cfg.out_path.as_ref().ok_or_else(|| {
                Error::Config(vec!["sweep writes two files and needs out.path or --out".into()])
            })?;
            std::fs::write(
                suffixed(path, ".trials"),
                report::trials_csv(&report_full, &cfg),
            )?;
            std::fs::write(
                suffixed(path, ".aggregate"),
                report::aggregate_csv(&report_full, &cfg),
            )?;
            if plot {
                std::fs::write(with_extension(path, "svg"), svg::sweep_figure(&report_full))?;
            }
            Ok(())
        }

        Command::PurityScan { run, plot } => {
            let cfg = run.build()?;
            let specs = match (&cfg.states, &cfg.state) {
                (Some(list), _) => list.clone(),
                (None, Some(single)) => vec![*single],
                (None, None) => default_purity_ladder(),
            };
            let states: sqphase::Result<Vec<SqueezedThermalState>> =
                specs.iter().map(|s| s.resolve()).collect();
            let thetas = sweep_thetas(&cfg);
            let rows = purity_scan(
                &states?,
                &thetas,
                cfg.n_samples,
                cfg.repetitions,
                cfg.seed,
                cfg.grid_points,
                mode,
            )?;
            let csv = report::purity_scan_csv(&rows, &cfg);
            match &cfg.out_path {
                None => print!("{csv}"),
                Some(path) => {
                    std::fs::write(path, csv)?;
                    if plot {
                        std::fs::write(with_extension(path, "svg"), svg::purity_figure(&rows))?;
                    }
                }
            }
            Ok(())
        }
    }
}

fn single_theta(thetas: &[f64]) -> sqphase::Result<f64> {
    if thetas.len() != 1 {
        return Err(Error::Config(vec![format!(
            "this command takes a single phase (run.theta or --theta), got {} phases",
            thetas.len()
        )]));
    }
    Ok(thetas[0])
}

/// Sweep-style commands fall back to the 12-point default grid.
fn sweep_thetas(cfg: &ExperimentConfig) -> Vec<f64> {
    cfg.thetas
        .clone()
        .or_else(|| cfg.theta.map(|t| vec![t]))
        .unwrap_or_else(default_sweep_thetas)
}

fn emit(path: Option<&Path>, text: &str) -> sqphase::Result<()> {
    match path {
        None => {
            print!("{text}");
            Ok(())
        }
        Some(p) => {
            std::fs::write(p, text)?;
            Ok(())
        }
    }
}

/// `run.csv` + `.trials` -> `run.trials.csv`; bare stems keep appending.
fn suffixed(path: &str, suffix: &str) -> PathBuf {
    let p = Path::new(path);
    match (p.file_stem(), p.extension()) {
        (Some(stem), Some(ext)) => p.with_file_name(format!(
            "{}{suffix}.{}",
            stem.to_string_lossy(),
            ext.to_string_lossy()
        )),
        _ => PathBuf::from(format!("{path}{suffix}")),
    }
}

fn with_extension(path: &str, ext: &str) -> PathBuf {
    Path::new(path).with_extension(ext)
}
