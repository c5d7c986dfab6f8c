use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use irsplan::config::ScenarioConfig;
use irsplan::experiments::{output_header, run_coverage, run_deployment, run_link_sweep, write_csv};
use irsplan::pattern::{ApArrayPattern, ErpModel};
use irsplan::presets;
use irsplan::scenario::Scenario;
use irsplan::Error;

const EXIT_CONFIG: u8 = 2;
const EXIT_BUDGET: u8 = 3;

#[derive(Parser)]
#[command(
    name = "irsplan",
    version,
    about = "IRS link simulator and multi-IRS deployment planner"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Source {
    /// Scenario file (TOML).
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Built-in scenario: link_sweep, medium_deploy, split_1024, widearea_coverage.
    #[arg(long)]
    preset: Option<String>,
    /// Override the master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the Monte-Carlo sample count.
    #[arg(long)]
    samples: Option<usize>,
}

impl Source {
    fn load(&self) -> irsplan::Result<ScenarioConfig> {
        let mut cfg = match (&self.config, &self.preset) {
            (Some(p), None) => ScenarioConfig::load(p).map_err(|e| match e {
                Error::Io(io) => Error::Config {
                    field: "--config".into(),
                    reason: io.to_string(),
                },
                e => e,
            })?,
            (None, Some(name)) => presets::preset(name)?,
            _ => {
                return Err(Error::Config {
                    field: "--config".into(),
                    reason: "give --config or --preset".into(),
                })
            }
        };
        if let Some(s) = self.seed {
            cfg.mc.seed = s;
        }
        if let Some(n) = self.samples {
            cfg.mc.samples = n;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Check a scenario and print its hash.
    Validate {
        #[command(flatten)]
        src: Source,
        /// Print the resolved scenario as TOML.
        #[arg(long)]
        dump: bool,
    },
    /// List LoS-filtered candidate spots as CSV.
    Spots {
        #[command(flatten)]
        src: Source,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Ergodic rate versus AP-IRS distance for each IRS variant.
    LinkSweep {
        #[command(flatten)]
        src: Source,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve the placement problem and write the plans as JSON.
    Deploy {
        #[command(flatten)]
        src: Source,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Directory for cached link tables.
        #[arg(long)]
        cache_dir: Option<PathBuf>,
    },
    /// Coverage ratio per mode, IRS count and threshold as CSV.
    Coverage {
        #[command(flatten)]
        src: Source,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        cache_dir: Option<PathBuf>,
    },
    /// Tabulate the AP and element patterns.
    PatternDump {
        #[arg(long, default_value_t = 1.0)]
        erp_exponent: f64,
        #[arg(long, default_value_t = 1.0)]
        step_deg: f64,
        #[command(flatten)]
        src: Source,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Per-link statistics of one (UE, spot) pair as JSON.
    Stats {
        #[command(flatten)]
        src: Source,
        #[arg(long)]
        ue: usize,
        /// Spot id; omit for the AP-only link.
        #[arg(long)]
        spot: Option<usize>,
    },
}

fn output(path: &Option<PathBuf>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

#[derive(Serialize)]
struct SpotRow {
    id: usize,
    x: f64,
    y: f64,
    z: f64,
    nx: f64,
    ny: f64,
    nz: f64,
    building: usize,
    face: usize,
}

#[derive(Serialize)]
struct PatternRow {
    theta_deg: f64,
    ap_value: f64,
    ap_gain: f64,
    erp_value: f64,
}

/// Completed with the incumbent after hitting the solver budget.
struct BudgetStop;

fn run(cmd: Command) -> irsplan::Result<Option<BudgetStop>> {
    match cmd {
        Command::Validate { src, dump } => {
            let cfg = src.load()?;
            let scn = Scenario::build(&cfg)?;
            if dump {
                print!("{}", cfg.to_toml());
            } else {
                println!(
                    "ok {} hash={} ues={} spots={} (of {})",
                    cfg.name,
                    cfg.scenario_hash(),
                    scn.scene.ues.len(),
                    scn.spots.len(),
                    scn.raw_spot_count
                );
            }
        }
        Command::Spots { src, out } => {
            let cfg = src.load()?;
            let scn = Scenario::build(&cfg)?;
            let rows: Vec<_> = scn
                .spots
                .iter()
                .map(|s| SpotRow {
                    id: s.id,
                    x: s.position.x,
                    y: s.position.y,
                    z: s.position.z,
                    nx: s.facet_normal.x,
                    ny: s.facet_normal.y,
                    nz: s.facet_normal.z,
                    building: s.host_building,
                    face: s.face,
                })
                .collect();
            write_csv(output(&out)?, &output_header(&cfg), &rows)?;
        }
        Command::LinkSweep { src, out } => {
            let cfg = src.load()?;
            let sweep = run_link_sweep(&cfg)?;
            write_csv(output(&out)?, &output_header(&cfg), &sweep.rows)?;
        }
        Command::Deploy { src, out, cache_dir } => {
            let cfg = src.load()?;
            let scn = Scenario::build(&cfg)?;
            let report = run_deployment(&scn, cache_dir.as_deref())?;
            let mut w = output(&out)?;
            serde_json::to_writer_pretty(&mut w, &report)?;
            writeln!(w)?;
            w.flush()?;
            if report.budget_exceeded() {
                return Ok(Some(BudgetStop));
            }
        }
        Command::Coverage { src, out, cache_dir } => {
            let cfg = src.load()?;
            let scn = Scenario::build(&cfg)?;
            let study = run_coverage(&scn, cache_dir.as_deref())?;
            write_csv(output(&out)?, &output_header(&cfg), &study.rows)?;
            if study.budget_exceeded() {
                return Ok(Some(BudgetStop));
            }
        }
        Command::PatternDump {
            erp_exponent,
            step_deg,
            src,
            out,
        } => {
            if step_deg.is_nan() || step_deg <= 0.0 {
                return Err(Error::Config {
                    field: "--step-deg".into(),
                    reason: "must be positive".into(),
                });
            }
            let cfg = if src.config.is_some() || src.preset.is_some() {
                src.load()?
            } else {
                presets::link_sweep()
            };
            let a = &cfg.ap;
            let lambda = irsplan::channel::SPEED_OF_LIGHT / (cfg.rf.carrier_ghz * 1e9);
            let ap = ApArrayPattern::new(
                a.elements,
                a.spacing_wavelengths * lambda,
                a.tilt_deg,
                a.element_gain,
                lambda,
            )?;
            let erp = ErpModel::new(erp_exponent)?;
            let n = (180.0 / step_deg).floor() as usize;
            let rows = (0..=n)
                .map(|i| {
                    let t = i as f64 * step_deg;
                    // AP elevation runs over [-90, 90]; the ERP polar angle over [0, 180].
                    Ok(PatternRow {
                        theta_deg: t,
                        ap_value: ap.value(t - 90.0),
                        ap_gain: ap.gain(t - 90.0),
                        erp_value: erp.value(t)?,
                    })
                })
                .collect::<irsplan::Result<Vec<_>>>()?;
            write_csv(
                output(&out)?,
                &[("tool", format!("irsplan {}", irsplan::config::TOOL_VERSION))],
                &rows,
            )?;
        }
        Command::Stats { src, ue, spot } => {
            let cfg = src.load()?;
            let scn = Scenario::build(&cfg)?;
            let s = match spot {
                Some(m) => Some(
                    scn.spots
                        .get(m)
                        .ok_or_else(|| Error::InvalidArgument(format!("no spot {m}")))?,
                ),
                None => None,
            };
            let links = scn.model.site_links(&scn.scene, ue, s)?;
            let mut w = output(&None)?;
            serde_json::to_writer_pretty(&mut w, &links)?;
            writeln!(w)?;
            w.flush()?;
        }
    }
    Ok(None)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(None) => ExitCode::SUCCESS,
        Ok(Some(BudgetStop)) => {
            eprintln!("warning: solver node budget exceeded; incumbent plans written");
            ExitCode::from(EXIT_BUDGET)
        }
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Config { .. } | Error::ConfigParse(_) => ExitCode::from(EXIT_CONFIG),
                _ => ExitCode::FAILURE,
            }
        }
    }
}
