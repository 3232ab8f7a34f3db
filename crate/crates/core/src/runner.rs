//! Command line surface, trial orchestration and file export.
//!
//! Output layout under `--out DIR`:
//!
//! | file                        | when                      |
//! |-----------------------------|---------------------------|
//! | `summary.json`              | always                    |
//! | `trajectory_NNNN.csv`       | `--export-trajectories`   |
//! | `timing_NNNN.csv`           | `--export-trajectories`   |
//! | `events_NNNN.jsonl`         | `--export-events`         |
//!
//! Trajectory CSVs are byte-for-byte reproducible. Wall-clock decision times
//! are not, so they go to the separate timing file; the trajectory's
//! `decision_time_us` column stays empty unless `--trajectory-timing` is set.

use std::any::Any;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::panic::{self, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use clap::error::ErrorKind;
use clap::{Args, CommandFactory, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::engagement::{
    run_episode_with, EngagementEvent, EpisodeOptions, EpisodeResult, ScenarioConfig, Scores,
};
use crate::error::{Error, Result};
use crate::metrics::{
    draw_fraction, p_survive, p_win, team_timing_summary, timing_summary, Outcome, TeamCounts,
    TimingSummary, TrialSummary,
};
use crate::team::Team;

/// Column order of the trajectory CSV.
pub const TRAJECTORY_HEADER: [&str; 15] = [
    "step",
    "time_s",
    "aircraft_id",
    "team",
    "x_m",
    "y_m",
    "altitude_m",
    "v_mps",
    "gamma_rad",
    "psi_rad",
    "phi_rad",
    "alpha_rad",
    "action_index",
    "chosen_value",
    "decision_time_us",
];

pub const TIMING_HEADER: [&str; 4] = ["step", "aircraft_id", "team", "decision_time_us"];

#[derive(Parser, Debug)]
#[command(
    name = "fastmdp",
    version,
    about = "Team pursuit/evasion with closed-form MDP agents"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a batch of seeded trials and write results.
    Run(RunArgs),
}

#[derive(Args, Debug)]
struct RunArgs {
    /// Blue team size.
    #[arg(long)]
    blue: Option<usize>,
    /// Red team size.
    #[arg(long)]
    red: Option<usize>,
    /// Number of trials; trial i uses seed + i.
    #[arg(long, default_value_t = 1)]
    trials: usize,
    /// Base seed.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    max_steps: Option<u64>,
    /// Integration and decision step, s.
    #[arg(long)]
    dt: Option<f64>,
    /// Maximum terrain height, m.
    #[arg(long)]
    hmax: Option<f64>,
    #[arg(long, default_value = "results")]
    out: PathBuf,
    #[arg(long)]
    export_trajectories: bool,
    #[arg(long)]
    export_events: bool,
    /// Also fill the trajectory CSV's decision_time_us column (breaks byte-reproducibility).
    #[arg(long)]
    trajectory_timing: bool,
    /// Timing run: no telemetry is recorded or exported.
    #[arg(long)]
    benchmark: bool,
    /// TOML scenario file; command-line flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Trials run concurrently.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExportToggles {
    pub trajectories: bool,
    pub events: bool,
    pub trajectory_timing: bool,
}

/// Fully resolved run request.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    /// Scenario shared by every trial; its `seed` is the base seed.
    pub scenario: ScenarioConfig,
    pub trials: usize,
    pub seeds: Vec<u64>,
    pub out_dir: PathBuf,
    pub export: ExportToggles,
    pub benchmark: bool,
    pub jobs: usize,
}

impl RunManifest {
    pub fn new(scenario: ScenarioConfig, trials: usize, out_dir: impl Into<PathBuf>) -> Self {
        let seeds = (0..trials as u64)
            .map(|i| scenario.seed.wrapping_add(i))
            .collect();
        RunManifest {
            scenario,
            trials,
            seeds,
            out_dir: out_dir.into(),
            export: ExportToggles::default(),
            benchmark: false,
            jobs: 1,
        }
    }

    pub fn trial_config(&self, index: usize) -> ScenarioConfig {
        ScenarioConfig {
            seed: self.seeds[index],
            ..self.scenario.clone()
        }
    }
}

fn usage(kind: ErrorKind, msg: impl std::fmt::Display) -> clap::Error {
    Cli::command().error(kind, msg)
}

/// Reads a scenario file. Missing keys keep their defaults.
pub fn load_scenario(path: &Path) -> Result<ScenarioConfig> {
    let text = fs::read_to_string(path)?;
    Ok(toml::from_str(&text)?)
}

/// Parses a full argument vector (program name first).
pub fn parse_cli<I, T>(args: I) -> Result<RunManifest, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let Cli {
        command: Command::Run(a),
    } = Cli::try_parse_from(args)?;

    let mut scenario = match &a.config {
        Some(path) => load_scenario(path).map_err(|e| {
            usage(
                ErrorKind::InvalidValue,
                format!("cannot load {}: {e}", path.display()),
            )
        })?,
        None => ScenarioConfig::default(),
    };
    if let Some(n) = a.blue {
        scenario.blue_count = n;
    }
    if let Some(n) = a.red {
        scenario.red_count = n;
    }
    if let Some(s) = a.seed {
        scenario.seed = s;
    }
    if let Some(m) = a.max_steps {
        scenario.max_steps = m;
    }
    if let Some(dt) = a.dt {
        scenario.dt = dt;
    }
    if let Some(h) = a.hmax {
        scenario.terrain.h_max = h;
    }
    if a.trials < 1 {
        return Err(usage(
            ErrorKind::ValueValidation,
            "--trials must be at least 1",
        ));
    }
    if a.jobs < 1 {
        return Err(usage(
            ErrorKind::ValueValidation,
            "--jobs must be at least 1",
        ));
    }
    scenario
        .validate()
        .map_err(|e| usage(ErrorKind::ValueValidation, e))?;

    let mut manifest = RunManifest::new(scenario, a.trials, a.out);
    manifest.export = ExportToggles {
        trajectories: a.export_trajectories,
        events: a.export_events,
        trajectory_timing: a.trajectory_timing,
    };
    manifest.benchmark = a.benchmark;
    manifest.jobs = a.jobs;
    Ok(manifest)
}

/// 17 significant digits.
fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn micros(d: std::time::Duration) -> String {
    format!("{:.3}", d.as_secs_f64() * 1e6)
}

pub fn trajectory_path(dir: &Path, trial: usize) -> PathBuf {
    dir.join(format!("trajectory_{trial:04}.csv"))
}

pub fn timing_path(dir: &Path, trial: usize) -> PathBuf {
    dir.join(format!("timing_{trial:04}.csv"))
}

pub fn events_path(dir: &Path, trial: usize) -> PathBuf {
    dir.join(format!("events_{trial:04}.jsonl"))
}

pub fn write_trajectory<W: Write>(out: W, result: &EpisodeResult, with_timing: bool) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TRAJECTORY_HEADER)?;
    for r in &result.telemetry {
        let s = &r.state;
        w.write_record([
            r.step.to_string(),
            fmt_f64(r.time_s),
            r.aircraft_id.to_string(),
            r.team.to_string(),
            fmt_f64(s.x),
            fmt_f64(s.y),
            fmt_f64(s.altitude()),
            fmt_f64(s.speed),
            fmt_f64(s.gamma),
            fmt_f64(s.psi),
            fmt_f64(s.phi),
            fmt_f64(s.alpha),
            r.action_index.to_string(),
            fmt_f64(r.chosen_value),
            if with_timing {
                micros(r.decision_time)
            } else {
                String::new()
            },
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_timing<W: Write>(out: W, result: &EpisodeResult) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TIMING_HEADER)?;
    for r in &result.telemetry {
        w.write_record([
            r.step.to_string(),
            r.aircraft_id.to_string(),
            r.team.to_string(),
            micros(r.decision_time),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_events<W: Write>(mut out: W, events: &[EngagementEvent]) -> Result<()> {
    for e in events {
        serde_json::to_writer(&mut out, e)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialReport {
    pub index: usize,
    pub seed: u64,
    /// Set when the trial panicked or failed; the remaining fields are then empty.
    pub error: Option<String>,
    pub outcome: Option<Outcome>,
    pub scores: Option<Scores>,
    pub steps: Option<u64>,
    pub initial: Option<TeamCounts>,
    pub survivors: Option<TeamCounts>,
    pub mean_decision_ms: Option<f64>,
    pub max_decision_ms: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TeamMetrics {
    pub p_win: f64,
    pub p_survive: f64,
    pub timing: Option<TimingSummary>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub completed_trials: usize,
    pub blue: TeamMetrics,
    pub red: TeamMetrics,
    pub draw_fraction: f64,
    pub timing: Option<TimingSummary>,
}

impl MetricsReport {
    pub fn from_summaries(summaries: &[TrialSummary]) -> Result<Self> {
        let team = |t| -> Result<TeamMetrics> {
            Ok(TeamMetrics {
                p_win: p_win(summaries, t)?,
                p_survive: p_survive(summaries, t)?,
                timing: team_timing_summary(summaries, t).ok(),
            })
        };
        Ok(MetricsReport {
            completed_trials: summaries.len(),
            blue: team(Team::Blue)?,
            red: team(Team::Red)?,
            draw_fraction: draw_fraction(summaries)?,
            timing: timing_summary(summaries).ok(),
        })
    }

    pub fn team(&self, team: Team) -> &TeamMetrics {
        match team {
            Team::Blue => &self.blue,
            Team::Red => &self.red,
        }
    }
}

/// Contents of `summary.json`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub blue_count: usize,
    pub red_count: usize,
    pub benchmark: bool,
    pub trials: Vec<TrialReport>,
    /// Absent when no trial completed.
    pub metrics: Option<MetricsReport>,
}

impl RunReport {
    pub fn failed_trials(&self) -> usize {
        self.trials.iter().filter(|t| t.error.is_some()).count()
    }

    /// Process exit status: 0 when every trial completed.
    pub fn exit_code(&self) -> i32 {
        i32::from(self.failed_trials() > 0)
    }

    pub fn render_text(&self) -> String {
        let mut s = format!(
            "{}v{}  trials {}  failed {}\n",
            self.blue_count,
            self.red_count,
            self.trials.len(),
            self.failed_trials()
        );
        if let Some(m) = &self.metrics {
            s.push_str("team   P_win   P_s     mean_ms  p50_ms   p95_ms   max_ms\n");
            for t in Team::ALL {
                let tm = m.team(t);
                let timing = tm.timing.map_or_else(
                    || "-".to_string(),
                    |x| {
                        format!(
                            "{:<8.3} {:<8.3} {:<8.3} {:.3}",
                            x.mean_ms, x.p50_ms, x.p95_ms, x.max_ms
                        )
                    },
                );
                s.push_str(&format!(
                    "{:<6} {:<7.3} {:<7.3} {}\n",
                    t, tm.p_win, tm.p_survive, timing
                ));
            }
            s.push_str(&format!("draws  {:.3}\n", m.draw_fraction));
        }
        s
    }
}

fn panic_message(payload: &(dyn Any + Send)) -> String {
    if let Some(s) = payload.downcast_ref::<&str>() {
        s.to_string()
    } else if let Some(s) = payload.downcast_ref::<String>() {
        s.clone()
    } else {
        "trial panicked".to_string()
    }
}

struct TrialOk {
    summary: TrialSummary,
    scores: Scores,
    steps: u64,
}

fn run_one(manifest: &RunManifest, index: usize) -> Result<TrialOk> {
    let config = manifest.trial_config(index);
    let options = EpisodeOptions {
        record_telemetry: manifest.export.trajectories && !manifest.benchmark,
    };
    let result = run_episode_with(&config, options)?;
    let dir = &manifest.out_dir;
    if options.record_telemetry {
        write_trajectory(
            BufWriter::new(File::create(trajectory_path(dir, index))?),
            &result,
            manifest.export.trajectory_timing,
        )?;
        write_timing(
            BufWriter::new(File::create(timing_path(dir, index))?),
            &result,
        )?;
    }
    if manifest.export.events {
        write_events(
            BufWriter::new(File::create(events_path(dir, index))?),
            &result.events,
        )?;
    }
    Ok(TrialOk {
        summary: result.summary(),
        scores: result.scores,
        steps: result.steps,
    })
}

fn trial_report(
    manifest: &RunManifest,
    index: usize,
    outcome: &Result<TrialOk, String>,
) -> TrialReport {
    let mut r = TrialReport {
        index,
        seed: manifest.seeds[index],
        error: None,
        outcome: None,
        scores: None,
        steps: None,
        initial: None,
        survivors: None,
        mean_decision_ms: None,
        max_decision_ms: None,
    };
    match outcome {
        Err(e) => r.error = Some(e.clone()),
        Ok(ok) => {
            let s = &ok.summary;
            r.scores = Some(ok.scores);
            r.steps = Some(ok.steps);
            r.outcome = Some(s.outcome);
            r.initial = Some(s.initial);
            r.survivors = Some(s.survivors);
            r.mean_decision_ms = s.mean_decision_time().map(|d| d.as_secs_f64() * 1e3);
            r.max_decision_ms = s.max_decision_time().map(|d| d.as_secs_f64() * 1e3);
        }
    }
    r
}

/// Runs every trial of the manifest, writes the requested artifacts and
/// `summary.json`, and returns the report. A trial that panics or fails is
/// recorded and the others still run; only I/O on the output directory or
/// the summary aborts the run.
pub fn run_trials(manifest: &RunManifest) -> Result<RunReport> {
    manifest.scenario.validate()?;
    if manifest.seeds.len() != manifest.trials {
        return Err(Error::InvalidConfig(
            "seed list length must equal the trial count".into(),
        ));
    }
    fs::create_dir_all(&manifest.out_dir)?;

    let results: Mutex<Vec<Option<Result<TrialOk, String>>>> =
        Mutex::new((0..manifest.trials).map(|_| None).collect());
    let next = AtomicUsize::new(0);
    let worker = || loop {
        let i = next.fetch_add(1, Ordering::Relaxed);
        if i >= manifest.trials {
            break;
        }
        let r = panic::catch_unwind(AssertUnwindSafe(|| run_one(manifest, i)))
            .map_err(|p| panic_message(p.as_ref()))
            .and_then(|r| r.map_err(|e| e.to_string()));
        if let Err(e) = &r {
            eprintln!("trial {i} (seed {}) failed: {e}", manifest.seeds[i]);
        }
        results.lock().expect("results lock")[i] = Some(r);
    };
    let jobs = manifest.jobs.clamp(1, manifest.trials.max(1));
    if jobs == 1 {
        worker();
    } else {
        std::thread::scope(|s| {
            for _ in 0..jobs {
                s.spawn(worker);
            }
        });
    }

    let mut trials = Vec::with_capacity(manifest.trials);
    let mut summaries = Vec::new();
    for (i, r) in results
        .into_inner()
        .expect("results lock")
        .into_iter()
        .enumerate()
    {
        let r = r.unwrap_or_else(|| Err("trial did not run".into()));
        trials.push(trial_report(manifest, i, &r));
        if let Ok(ok) = r {
            summaries.push(ok.summary);
        }
    }
    let metrics = if summaries.is_empty() {
        None
    } else {
        Some(MetricsReport::from_summaries(&summaries)?)
    };
    let report = RunReport {
        blue_count: manifest.scenario.blue_count,
        red_count: manifest.scenario.red_count,
        benchmark: manifest.benchmark,
        trials,
        metrics,
    };
    let mut f = BufWriter::new(File::create(manifest.out_dir.join("summary.json"))?);
    serde_json::to_writer_pretty(&mut f, &report)?;
    f.write_all(b"\n")?;
    f.flush()?;
    Ok(report)
}
