//! `touchauth`: touch-log ingestion, feature analysis, per-user training,
//! evaluation sweeps and session simulation.

mod commands;
mod config;
mod output;

use std::ops::RangeInclusive;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use touchauth_core::classify::ClassifierKind;
use touchauth_core::evaluate::{DirectionSelection, Scenario};

use commands::Status;
use config::{ConfigError, RunConfig};

#[derive(Debug, Parser)]
#[command(
    name = "touchauth",
    version,
    about = "Touchscreen stroke biometrics for continuous authentication"
)]
struct Cli {
    /// Master seed for every randomized step.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// JSON run configuration; flags override its fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// More log output (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ClassifierArg {
    Knn,
    Svm,
}

/// Flags shared by every command that reads a feature CSV.
#[derive(Debug, Default, Args)]
struct DataArgs {
    /// Feature CSV written by `ingest` or `gen-synthetic`.
    #[arg(long)]
    features: Option<PathBuf>,
    /// Doc ids with this prefix are week-2 sessions.
    #[arg(long)]
    week2_prefix: Option<String>,
    /// Comma-separated week-2 doc ids.
    #[arg(long, value_delimiter = ',')]
    week2_docs: Vec<String>,
}

#[derive(Debug, Default, Args)]
struct ExperimentArgs {
    #[command(flatten)]
    data: DataArgs,
    /// intra-session, inter-session or inter-week.
    #[arg(long)]
    scenario: Option<Scenario>,
    /// vertical, horizontal or both.
    #[arg(long)]
    direction: Option<DirectionSelection>,
    #[arg(long, value_enum)]
    classifier: Option<ClassifierArg>,
    /// Strokes per decision.
    #[arg(long)]
    window: Option<usize>,
    /// Strokes between consecutive decisions.
    #[arg(long)]
    stride: Option<usize>,
    /// Training share of each session (intra-session scenario).
    #[arg(long)]
    train_fraction: Option<f64>,
    /// Keep strokes whose unused features are absent.
    #[arg(long)]
    include_incomplete: bool,
    /// Worker threads; results do not depend on it.
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse a raw touch log into a feature CSV.
    Ingest {
        /// Touch log CSV.
        #[arg(long)]
        log: Option<PathBuf>,
        /// Screen spec CSV (`phone_id,width_px,height_px`).
        #[arg(long)]
        screens: Option<PathBuf>,
        /// Click threshold as a fraction of the screen diagonal.
        #[arg(long)]
        min_displacement: Option<f64>,
    },
    /// Feature informativeness and correlation.
    Analyze {
        #[command(flatten)]
        data: DataArgs,
    },
    /// Train one model per user and direction group on all of their strokes.
    Train {
        #[command(flatten)]
        exp: ExperimentArgs,
        /// Restrict to these users (repeatable).
        #[arg(long)]
        user: Vec<String>,
    },
    /// Evaluate one authentication scenario.
    Eval {
        #[command(flatten)]
        exp: ExperimentArgs,
        /// Drop per-user ROC sweeps from the report.
        #[arg(long)]
        no_roc: bool,
    },
    /// EER as a function of strokes per decision.
    SweepStrokes {
        #[command(flatten)]
        exp: ExperimentArgs,
        /// Window sizes, e.g. `1..20` or `1,5,11`.
        #[arg(long, value_parser = parse_counts)]
        strokes: Option<Counts>,
    },
    /// EER as a function of the number of enrolled users.
    SweepSubjects {
        #[command(flatten)]
        exp: ExperimentArgs,
        /// Subject counts, e.g. `2..10`.
        #[arg(long, value_parser = parse_counts)]
        counts: Option<Counts>,
        /// Random subsets drawn per subject count
        #[arg(long)]
        repetitions: Option<usize>,
    },
    /// Same-phone vs. mixed-phone experiments of matched size.
    DeviceInfluence {
        #[command(flatten)]
        exp: ExperimentArgs,
    },
    /// Run one user's stroke stream through a continuous-authentication session.
    Simulate {
        #[command(flatten)]
        exp: ExperimentArgs,
        /// Device owner.
        #[arg(long)]
        owner: Option<String>,
        /// User whose strokes follow enrollment.
        #[arg(long)]
        attacker: Option<String>,
        /// Pretrained owner model; skips enrollment.
        #[arg(long)]
        model: Option<PathBuf>,
        /// Consecutive rejections before lockout.
        #[arg(long)]
        t: Option<usize>,
        /// Fused-score acceptance threshold.
        #[arg(long)]
        threshold: Option<f64>,
        /// Enrollment strokes.
        #[arg(long)]
        enrollment: Option<usize>,
    },
    /// Write a synthetic corpus (features, optionally raw logs).
    GenSynthetic {
        /// Number of synthetic users
        #[arg(long)]
        users: Option<usize>,
        /// Number of phones users are spread over
        #[arg(long)]
        phones: Option<usize>,
        /// Distance between user means, in noise units.
        #[arg(long)]
        separation: Option<f64>,
        /// Strokes drawn per session
        #[arg(long)]
        strokes_per_session: Option<usize>,
        /// Latent shift per phone, in noise units.
        #[arg(long)]
        phone_offset: Option<f64>,
        /// Also write `log.csv` and `screens.csv`.
        #[arg(long)]
        raw: bool,
    },
}

/// A parsed list of counts; a newtype so clap treats it as one value.
#[derive(Debug, Clone)]
struct Counts(Vec<usize>);

/// `a..b` and `a..=b` (both inclusive) and comma lists of either.
fn parse_counts(s: &str) -> Result<Counts, String> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let range: RangeInclusive<usize> = match part.split_once("..") {
            Some((a, b)) => {
                let b = b.strip_prefix('=').unwrap_or(b);
                let a: usize = a
                    .trim()
                    .parse()
                    .map_err(|_| format!("bad range start in `{part}`"))?;
                let b: usize = b
                    .trim()
                    .parse()
                    .map_err(|_| format!("bad range end in `{part}`"))?;
                if a > b {
                    return Err(format!("empty range `{part}`"));
                }
                a..=b
            }
            None => {
                let v: usize = part
                    .parse()
                    .map_err(|_| format!("`{part}` is not a count"))?;
                v..=v
            }
        };
        out.extend(range);
    }
    if out.is_empty() {
        return Err("no values".into());
    }
    Ok(Counts(out))
}

fn apply_data(cfg: &mut RunConfig, a: DataArgs) {
    if a.features.is_some() {
        cfg.inputs.features = a.features;
    }
    if a.week2_prefix.is_some() {
        cfg.weeks.week2_prefix = a.week2_prefix;
    }
    if !a.week2_docs.is_empty() {
        cfg.weeks.week2_docs = a.week2_docs;
    }
}

fn apply_experiment(cfg: &mut RunConfig, a: ExperimentArgs) {
    apply_data(cfg, a.data);
    let e = &mut cfg.experiment;
    if let Some(v) = a.scenario {
        e.scenario = v;
    }
    if let Some(v) = a.direction {
        e.direction = v;
    }
    if let Some(v) = a.classifier {
        e.train.classifier = match v {
            ClassifierArg::Knn => ClassifierKind::Knn,
            ClassifierArg::Svm => ClassifierKind::Svm,
        };
    }
    if let Some(v) = a.window {
        e.window.n = v;
    }
    if let Some(v) = a.stride {
        e.window.stride = v;
    }
    if let Some(v) = a.train_fraction {
        e.train_fraction = v;
    }
    if a.include_incomplete {
        e.include_incomplete = true;
    }
    if a.workers.is_some() {
        e.workers = a.workers;
    }
}

fn run(cli: Cli) -> anyhow::Result<Status> {
    let mut cfg = RunConfig::load(cli.config.as_deref())?;
    if cli.seed.is_some() {
        cfg.seed = cli.seed;
    }
    let out = cli.out;
    match cli.command {
        Command::Ingest {
            log,
            screens,
            min_displacement,
        } => {
            if log.is_some() {
                cfg.inputs.log = log;
            }
            if screens.is_some() {
                cfg.inputs.screens = screens;
            }
            if let Some(v) = min_displacement {
                cfg.ingest.min_displacement_frac = v;
            }
            cfg.resolve()?;
            commands::ingest(&cfg, &out)
        }
        Command::Analyze { data } => {
            apply_data(&mut cfg, data);
            cfg.resolve()?;
            commands::analyze_features(&cfg, &out)
        }
        Command::Train { exp, user } => {
            apply_experiment(&mut cfg, exp);
            cfg.resolve()?;
            commands::train(&cfg, &user, &out)
        }
        Command::Eval { exp, no_roc } => {
            apply_experiment(&mut cfg, exp);
            if no_roc {
                cfg.experiment.include_roc = false;
            }
            cfg.resolve()?;
            commands::eval(&cfg, &out)
        }
        Command::SweepStrokes { exp, strokes } => {
            apply_experiment(&mut cfg, exp);
            if let Some(Counts(v)) = strokes {
                cfg.sweep.strokes = v;
            }
            cfg.resolve()?;
            commands::sweep_strokes(&cfg, &out)
        }
        Command::SweepSubjects {
            exp,
            counts,
            repetitions,
        } => {
            apply_experiment(&mut cfg, exp);
            if let Some(Counts(v)) = counts {
                cfg.sweep.subjects = v;
            }
            if let Some(v) = repetitions {
                cfg.sweep.repetitions = v;
            }
            cfg.resolve()?;
            commands::sweep_subjects(&cfg, &out)
        }
        Command::DeviceInfluence { exp } => {
            apply_experiment(&mut cfg, exp);
            cfg.resolve()?;
            commands::device_influence(&cfg, &out)
        }
        Command::Simulate {
            exp,
            owner,
            attacker,
            model,
            t,
            threshold,
            enrollment,
        } => {
            apply_experiment(&mut cfg, exp);
            if owner.is_some() {
                cfg.simulate.owner = owner;
            }
            if attacker.is_some() {
                cfg.simulate.attacker = attacker;
            }
            if model.is_some() {
                cfg.inputs.model = model;
            }
            if let Some(v) = t {
                cfg.auth.t_threshold = v;
            }
            if let Some(v) = threshold {
                cfg.auth.threshold = v;
            }
            if let Some(v) = enrollment {
                cfg.auth.enrollment_target = v;
            }
            cfg.auth.window = cfg.experiment.window;
            cfg.resolve()?;
            commands::simulate(&cfg, &out)
        }
        Command::GenSynthetic {
            users,
            phones,
            separation,
            strokes_per_session,
            phone_offset,
            raw,
        } => {
            let s = &mut cfg.synthetic;
            if let Some(v) = users {
                s.users = v;
            }
            if let Some(v) = phones {
                s.phones = v;
            }
            if let Some(v) = separation {
                s.separation = v;
            }
            if let Some(v) = strokes_per_session {
                s.strokes_per_session = v;
            }
            if let Some(v) = phone_offset {
                s.phone_offset = v;
            }
            cfg.resolve()?;
            commands::gen_synthetic(&cfg, raw, &out)
        }
    }
}

/// Configuration problems and missing screen specs exit with 2, everything
/// else with 1.
fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<ConfigError>().is_some() {
        return 2;
    }
    match err.downcast_ref::<touchauth_core::Error>() {
        Some(
            touchauth_core::Error::UnknownPhone(_)
            | touchauth_core::Error::InvalidArgument(_)
            | touchauth_core::Error::UnknownFeature(_)
            | touchauth_core::Error::ModelVersion { .. },
        ) => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli) {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::PartialFailure) => ExitCode::from(1),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use config::config_error;

    #[test]
    fn counts_accept_ranges_and_lists() {
        assert_eq!(parse_counts("1..20").unwrap().0.len(), 20);
        assert_eq!(parse_counts("1..=3").unwrap().0, vec![1, 2, 3]);
        assert_eq!(parse_counts("1,5, 11").unwrap().0, vec![1, 5, 11]);
        assert_eq!(parse_counts("1..3,7").unwrap().0, vec![1, 2, 3, 7]);
        assert!(parse_counts("5..2").is_err());
        assert!(parse_counts("x").is_err());
        assert!(parse_counts("").is_err());
    }

    #[test]
    fn config_errors_map_to_two() {
        assert_eq!(exit_code(&config_error("bad")), 2);
        assert_eq!(
            exit_code(&touchauth_core::Error::UnknownPhone("p".into()).into()),
            2
        );
        assert_eq!(exit_code(&touchauth_core::Error::OneClass.into()), 1);
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
