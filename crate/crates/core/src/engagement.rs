//! The contest itself: spawning, the simultaneous decide/apply loop, capture
//! bookkeeping, hard-deck crashes, scoring and termination.
//!
//! Within a step every aircraft decides against the same frozen snapshot of
//! the world, and only then are all chosen states applied. Nothing an agent
//! decides in step `k` is visible to any other agent before step `k + 1`.

use std::collections::{BTreeMap, VecDeque};
use std::f64::consts::PI;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dynamics::{
    wrap_angle, AircraftState, ControlAction, PerformanceLimits, Projection, Vec3,
};
use crate::error::{Error, Result};
use crate::metrics::{Outcome, TeamCounts, TrialSummary};
use crate::reward::{AircraftId, AircraftSnapshot, RewardParams, TerrainConfig};
use crate::solver::{select_action, DecisionRecord, ValueSurface};
use crate::team::{Team, TeamProfile};

/// Steps of track kept per aircraft; also how far back the control point lies.
pub const HISTORY_LEN: usize = 30;

/// Geometry of the capture test and how long it must hold.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CaptureRules {
    /// Max distance from the control point, m.
    pub radius: f64,
    /// Max angle between velocity vectors, rad.
    pub max_angle: f64,
    /// Consecutive steps the condition must hold.
    pub hold_steps: u32,
}

impl Default for CaptureRules {
    fn default() -> Self {
        CaptureRules {
            radius: 100.0,
            max_angle: 60f64.to_radians(),
            hold_steps: 30,
        }
    }
}

impl CaptureRules {
    /// Instantaneous capture condition. The control point is where the
    /// evader was `HISTORY_LEN` steps ago, so nothing can be captured until
    /// a full history exists.
    pub fn check(
        &self,
        pursuer: &AircraftSnapshot,
        evader: &AircraftSnapshot,
        history: &TrackHistory,
    ) -> bool {
        let Some(control_point) = history.control_point() else {
            return false;
        };
        if (pursuer.position - control_point).norm() >= self.radius {
            return false;
        }
        let (a, b) = (pursuer.velocity, evader.velocity);
        let denom = a.norm() * b.norm();
        if !(denom > 0.0) {
            return false;
        }
        let angle = (a.dot(&b) / denom).clamp(-1.0, 1.0).acos();
        angle < self.max_angle
    }
}

pub fn check_capture(
    pursuer: &AircraftSnapshot,
    evader: &AircraftSnapshot,
    history: &TrackHistory,
) -> bool {
    CaptureRules::default().check(pursuer, evader, history)
}

/// Ring buffer of past positions and velocities, oldest first. The current
/// state is not part of the history.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TrackHistory {
    entries: VecDeque<(Vec3, Vec3)>,
}

impl TrackHistory {
    pub fn push(&mut self, position: Vec3, velocity: Vec3) {
        if self.entries.len() == HISTORY_LEN {
            self.entries.pop_front();
        }
        self.entries.push_back((position, velocity));
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Position exactly `HISTORY_LEN` steps back, once that much track exists.
    pub fn control_point(&self) -> Option<Vec3> {
        (self.entries.len() == HISTORY_LEN).then(|| self.entries[0].0)
    }

    pub fn iter(&self) -> impl Iterator<Item = &(Vec3, Vec3)> {
        self.entries.iter()
    }
}

/// Spawn geometry, meters and radians. The defaults start the two sides
/// 2 to 5 km apart near the middle of the arena, blue facing +x and red -x.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpawnConfig {
    pub blue_x: [f64; 2],
    pub red_x: [f64; 2],
    pub y: [f64; 2],
    pub altitude: [f64; 2],
    /// Uniform heading spread around the direction of the opposing side.
    pub heading_jitter: f64,
}

impl Default for SpawnConfig {
    fn default() -> Self {
        SpawnConfig {
            blue_x: [10_000.0, 11_500.0],
            red_x: [13_500.0, 15_000.0],
            y: [10_500.0, 14_500.0],
            altitude: [4000.0, 7000.0],
            heading_jitter: 20f64.to_radians(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub blue_count: usize,
    pub red_count: usize,
    /// Edge of the cubic arena, m. Only used to validate spawn regions.
    pub volume: f64,
    pub terrain: TerrainConfig,
    pub dt: f64,
    pub horizon: f64,
    pub max_steps: u64,
    pub seed: u64,
    #[serde(deserialize_with = "blue_profile")]
    pub blue: TeamProfile,
    #[serde(deserialize_with = "red_profile")]
    pub red: TeamProfile,
    pub rewards: RewardParams,
    pub capture: CaptureRules,
    pub spawn: SpawnConfig,
}

/// A team table in a scenario file may give only `limits` or only
/// `actions`; the rest comes from that team's defaults.
fn team_profile<'de, D: serde::Deserializer<'de>>(
    d: D,
    team: Team,
) -> std::result::Result<TeamProfile, D::Error> {
    #[derive(Deserialize)]
    #[serde(deny_unknown_fields)]
    struct Partial {
        limits: Option<PerformanceLimits>,
        actions: Option<crate::team::ActionGrid>,
    }
    let p = Partial::deserialize(d)?;
    let base = TeamProfile::default_for(team);
    Ok(TeamProfile {
        limits: p.limits.unwrap_or(base.limits),
        actions: p.actions.unwrap_or(base.actions),
    })
}

fn blue_profile<'de, D: serde::Deserializer<'de>>(
    d: D,
) -> std::result::Result<TeamProfile, D::Error> {
    team_profile(d, Team::Blue)
}

fn red_profile<'de, D: serde::Deserializer<'de>>(
    d: D,
) -> std::result::Result<TeamProfile, D::Error> {
    team_profile(d, Team::Red)
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            blue_count: 1,
            red_count: 1,
            volume: 25_000.0,
            terrain: TerrainConfig::default(),
            dt: crate::dynamics::DEFAULT_DT,
            horizon: crate::dynamics::DEFAULT_HORIZON,
            max_steps: 9000,
            seed: 0,
            blue: TeamProfile::default_for(Team::Blue),
            red: TeamProfile::default_for(Team::Red),
            rewards: RewardParams::default(),
            capture: CaptureRules::default(),
            spawn: SpawnConfig::default(),
        }
    }
}

impl ScenarioConfig {
    pub fn versus(blue: usize, red: usize, seed: u64) -> Self {
        ScenarioConfig {
            blue_count: blue,
            red_count: red,
            seed,
            ..Default::default()
        }
    }

    pub fn profile(&self, team: Team) -> &TeamProfile {
        match team {
            Team::Blue => &self.blue,
            Team::Red => &self.red,
        }
    }

    pub fn projection(&self) -> Projection {
        Projection {
            dt: self.dt,
            horizon: self.horizon,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.to_string()));
        if self.blue_count < 1 || self.red_count < 1 {
            return bad("team counts must be at least 1");
        }
        if self.max_steps < 1 {
            return bad("max_steps must be at least 1");
        }
        self.projection().steps()?;
        for team in Team::ALL {
            let p = self.profile(team);
            p.limits.validate()?;
            p.actions.validate()?;
        }
        let in_volume = |r: [f64; 2]| r[0] <= r[1] && r[0] >= 0.0 && r[1] <= self.volume;
        let s = &self.spawn;
        if !(in_volume(s.blue_x) && in_volume(s.red_x) && in_volume(s.y) && in_volume(s.altitude)) {
            return bad("spawn regions must lie inside the volume");
        }
        if s.altitude[0] < self.terrain.h_deck() {
            return bad("spawn altitude band starts below the hard deck");
        }
        if !(self.capture.radius > 0.0 && self.capture.hold_steps >= 1) {
            return bad("capture rules must have positive radius and hold time");
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Aircraft {
    pub id: AircraftId,
    pub team: Team,
    pub state: AircraftState,
    pub history: TrackHistory,
}

impl Aircraft {
    pub fn snapshot(&self) -> AircraftSnapshot {
        AircraftSnapshot {
            id: self.id,
            team: self.team,
            position: self.state.position(),
            velocity: self.state.velocity(),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Scores {
    pub blue: u32,
    pub red: u32,
}

impl Scores {
    pub fn get(&self, team: Team) -> u32 {
        match team {
            Team::Blue => self.blue,
            Team::Red => self.red,
        }
    }

    fn award(&mut self, team: Team) {
        match team {
            Team::Blue => self.blue += 1,
            Team::Red => self.red += 1,
        }
    }

    pub fn outcome(&self) -> Outcome {
        match self.blue.cmp(&self.red) {
            std::cmp::Ordering::Greater => Outcome::BlueWin,
            std::cmp::Ordering::Less => Outcome::RedWin,
            std::cmp::Ordering::Equal => Outcome::Draw,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    Spawn,
    Capture,
    Crash,
    DrawTimeout,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EngagementEvent {
    pub kind: EventKind,
    pub step: u64,
    pub subject_id: Option<AircraftId>,
    pub pursuer_id: Option<AircraftId>,
    /// Scores after the event.
    pub team_scores: Scores,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WorldState {
    /// Live aircraft, ascending id.
    pub aircraft: Vec<Aircraft>,
    /// Consecutive capture-condition count per (pursuer, evader).
    pub capture_progress: BTreeMap<(AircraftId, AircraftId), u32>,
    pub scores: Scores,
    pub step: u64,
    pub rng_seed: u64,
    pub initial: TeamCounts,
}

impl WorldState {
    pub fn live_count(&self, team: Team) -> usize {
        self.aircraft.iter().filter(|a| a.team == team).count()
    }

    pub fn counts(&self) -> TeamCounts {
        TeamCounts {
            blue: self.live_count(Team::Blue),
            red: self.live_count(Team::Red),
        }
    }

    pub fn get(&self, id: AircraftId) -> Option<&Aircraft> {
        self.aircraft.iter().find(|a| a.id == id)
    }

    /// True once either side has no aircraft left.
    pub fn is_decided(&self) -> bool {
        self.live_count(Team::Blue) == 0 || self.live_count(Team::Red) == 0
    }

    pub fn snapshot(&self) -> Vec<AircraftSnapshot> {
        self.aircraft.iter().map(Aircraft::snapshot).collect()
    }

    fn remove(&mut self, id: AircraftId) {
        self.aircraft.retain(|a| a.id != id);
        self.capture_progress
            .retain(|&(p, e), _| p != id && e != id);
    }
}

/// Spawns both teams. Blue ids come first; random draws are made per
/// aircraft in id order (x, y, altitude, heading).
pub fn spawn_world(config: &ScenarioConfig) -> Result<(WorldState, Vec<EngagementEvent>)> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let s = &config.spawn;
    let mut aircraft = Vec::with_capacity(config.blue_count + config.red_count);
    let teams = std::iter::repeat_n(Team::Blue, config.blue_count)
        .chain(std::iter::repeat_n(Team::Red, config.red_count));
    for (id, team) in teams.enumerate() {
        let (band, base_heading) = match team {
            Team::Blue => (s.blue_x, 0.0),
            Team::Red => (s.red_x, PI),
        };
        let x = rng.gen_range(band[0]..=band[1]);
        let y = rng.gen_range(s.y[0]..=s.y[1]);
        let altitude = rng.gen_range(s.altitude[0]..=s.altitude[1]);
        let jitter = rng.gen_range(-s.heading_jitter..=s.heading_jitter);
        let limits = config.profile(team).limits;
        let speed = 0.5 * (limits.v_min + limits.v_max);
        aircraft.push(Aircraft {
            id: id as AircraftId,
            team,
            state: AircraftState::level(x, y, altitude, speed, wrap_angle(base_heading + jitter)),
            history: TrackHistory::default(),
        });
    }
    let world = WorldState {
        aircraft,
        capture_progress: BTreeMap::new(),
        scores: Scores::default(),
        step: 0,
        rng_seed: config.seed,
        initial: TeamCounts {
            blue: config.blue_count,
            red: config.red_count,
        },
    };
    let events = world
        .aircraft
        .iter()
        .map(|a| EngagementEvent {
            kind: EventKind::Spawn,
            step: 0,
            subject_id: Some(a.id),
            pursuer_id: None,
            team_scores: Scores::default(),
        })
        .collect();
    Ok((world, events))
}

struct TeamContext {
    limits: PerformanceLimits,
    actions: Vec<ControlAction>,
}

/// Everything a decision needs besides the world: action tables, limits,
/// reward shape, terrain and projection.
pub struct SolverContext {
    blue: TeamContext,
    red: TeamContext,
    pub rewards: RewardParams,
    pub terrain: TerrainConfig,
    pub projection: Projection,
    pub capture: CaptureRules,
}

impl SolverContext {
    pub fn new(config: &ScenarioConfig) -> Result<Self> {
        config.validate()?;
        let team = |p: &TeamProfile| TeamContext {
            limits: p.limits,
            actions: p.actions.enumerate(),
        };
        Ok(SolverContext {
            blue: team(&config.blue),
            red: team(&config.red),
            rewards: config.rewards.clone(),
            terrain: config.terrain,
            projection: config.projection(),
            capture: config.capture,
        })
    }

    fn team(&self, team: Team) -> &TeamContext {
        match team {
            Team::Blue => &self.blue,
            Team::Red => &self.red,
        }
    }

    pub fn actions(&self, team: Team) -> &[ControlAction] {
        &self.team(team).actions
    }

    pub fn limits(&self, team: Team) -> &PerformanceLimits {
        &self.team(team).limits
    }

    /// One agent's full decision against a frozen snapshot. The recorded
    /// time covers peak construction, projection, valuation and argmax.
    pub fn decide(
        &self,
        ownship: &Aircraft,
        snapshot: &[AircraftSnapshot],
    ) -> Result<DecisionRecord> {
        let start = Instant::now();
        let peaks = self.rewards.peaks_for(ownship.id, ownship.team, snapshot);
        let surface = ValueSurface::from_peaks(&peaks, self.terrain, self.rewards.deck_weight);
        let tc = self.team(ownship.team);
        let mut record = select_action(
            &ownship.state,
            &tc.actions,
            &tc.limits,
            &surface,
            self.projection,
        )?;
        record.decision_time = start.elapsed();
        Ok(record)
    }
}

/// Decision made by one aircraft in one step, alongside the state it was
/// made from.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AgentDecision {
    pub id: AircraftId,
    pub team: Team,
    pub state: AircraftState,
    pub record: DecisionRecord,
}

#[derive(Clone, Debug, Default)]
pub struct StepOutcome {
    pub events: Vec<EngagementEvent>,
    /// Ascending aircraft id.
    pub decisions: Vec<AgentDecision>,
}

/// Advances the world by one step with agents deciding in id order.
pub fn step(world: &mut WorldState, ctx: &SolverContext) -> Result<StepOutcome> {
    let order: Vec<usize> = (0..world.aircraft.len()).collect();
    step_with_order(world, ctx, &order)
}

/// As [`step`], but agents are visited in `order` (indices into
/// `world.aircraft`). The result does not depend on the order.
pub fn step_with_order(
    world: &mut WorldState,
    ctx: &SolverContext,
    order: &[usize],
) -> Result<StepOutcome> {
    if world.is_decided() {
        return Err(Error::Terminated(world.step));
    }
    let n = world.aircraft.len();
    let mut seen = vec![false; n];
    if order.len() != n
        || order
            .iter()
            .any(|&i| i >= n || std::mem::replace(&mut seen[i], true))
    {
        return Err(Error::InvalidConfig(
            "agent order must be a permutation of the live aircraft".into(),
        ));
    }

    let snapshot = world.snapshot();
    let mut records: Vec<Option<DecisionRecord>> = vec![None; n];
    for &i in order {
        records[i] = Some(ctx.decide(&world.aircraft[i], &snapshot)?);
    }

    let mut decisions = Vec::with_capacity(n);
    for (ac, rec) in world.aircraft.iter_mut().zip(records) {
        let record = rec.expect("every index visited");
        decisions.push(AgentDecision {
            id: ac.id,
            team: ac.team,
            state: ac.state,
            record,
        });
        ac.history.push(ac.state.position(), ac.state.velocity());
        ac.state = record.one_step_state;
    }
    world.step += 1;

    let mut events = Vec::new();
    let snapshot = world.snapshot();
    let mut completed = Vec::new();
    for pursuer in &snapshot {
        for (ei, evader) in snapshot.iter().enumerate() {
            if pursuer.team == evader.team {
                continue;
            }
            let key = (pursuer.id, evader.id);
            if ctx
                .capture
                .check(pursuer, evader, &world.aircraft[ei].history)
            {
                let count = world.capture_progress.entry(key).or_insert(0);
                *count += 1;
                if *count >= ctx.capture.hold_steps {
                    completed.push(key);
                }
            } else {
                world.capture_progress.remove(&key);
            }
        }
    }
    completed.sort_unstable();
    for (pursuer_id, evader_id) in completed {
        let (Some(p), Some(_)) = (world.get(pursuer_id), world.get(evader_id)) else {
            continue;
        };
        let team = p.team;
        world.scores.award(team);
        world.remove(evader_id);
        events.push(EngagementEvent {
            kind: EventKind::Capture,
            step: world.step,
            subject_id: Some(evader_id),
            pursuer_id: Some(pursuer_id),
            team_scores: world.scores,
        });
    }

    let deck = ctx.terrain.h_deck();
    let crashed: Vec<AircraftId> = world
        .aircraft
        .iter()
        .filter(|a| a.state.altitude() < deck)
        .map(|a| a.id)
        .collect();
    for id in crashed {
        world.remove(id);
        events.push(EngagementEvent {
            kind: EventKind::Crash,
            step: world.step,
            subject_id: Some(id),
            pursuer_id: None,
            team_scores: world.scores,
        });
    }

    Ok(StepOutcome { events, decisions })
}

/// One row of per-step, per-aircraft telemetry: the state at `step` and the
/// decision taken from it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TelemetryRow {
    pub step: u64,
    pub time_s: f64,
    pub aircraft_id: AircraftId,
    pub team: Team,
    pub state: AircraftState,
    pub action_index: usize,
    pub chosen_value: f64,
    pub decision_time: Duration,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DecisionTiming {
    pub team: Team,
    pub time: Duration,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EpisodeOptions {
    /// Keep per-step telemetry rows. Timing samples are always kept.
    pub record_telemetry: bool,
}

impl Default for EpisodeOptions {
    fn default() -> Self {
        EpisodeOptions {
            record_telemetry: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EpisodeResult {
    pub seed: u64,
    pub outcome: Outcome,
    pub scores: Scores,
    pub steps: u64,
    pub initial: TeamCounts,
    pub survivors: TeamCounts,
    pub events: Vec<EngagementEvent>,
    pub telemetry: Vec<TelemetryRow>,
    pub timings: Vec<DecisionTiming>,
}

impl EpisodeResult {
    pub fn summary(&self) -> TrialSummary {
        TrialSummary::new(
            self.outcome,
            self.initial,
            self.survivors,
            self.timings.iter().map(|t| (t.team, t.time)).collect(),
        )
    }
}

pub fn run_episode(config: &ScenarioConfig) -> Result<EpisodeResult> {
    run_episode_with(config, EpisodeOptions::default())
}

/// Steps until one side is empty or `max_steps` is reached.
pub fn run_episode_with(config: &ScenarioConfig, options: EpisodeOptions) -> Result<EpisodeResult> {
    let ctx = SolverContext::new(config)?;
    let (mut world, mut events) = spawn_world(config)?;
    let mut telemetry = Vec::new();
    let mut timings = Vec::new();
    while !world.is_decided() && world.step < config.max_steps {
        let step_index = world.step;
        let out = step(&mut world, &ctx)?;
        for d in &out.decisions {
            timings.push(DecisionTiming {
                team: d.team,
                time: d.record.decision_time,
            });
            if options.record_telemetry {
                telemetry.push(TelemetryRow {
                    step: step_index,
                    time_s: step_index as f64 * config.dt,
                    aircraft_id: d.id,
                    team: d.team,
                    state: d.state,
                    action_index: d.record.action_index,
                    chosen_value: d.record.chosen_value,
                    decision_time: d.record.decision_time,
                });
            }
        }
        events.extend(out.events);
    }
    let outcome = world.scores.outcome();
    if !world.is_decided() && outcome == Outcome::Draw {
        events.push(EngagementEvent {
            kind: EventKind::DrawTimeout,
            step: world.step,
            subject_id: None,
            pursuer_id: None,
            team_scores: world.scores,
        });
    }
    Ok(EpisodeResult {
        seed: config.seed,
        outcome,
        scores: world.scores,
        steps: world.step,
        initial: world.initial,
        survivors: world.counts(),
        events,
        telemetry,
        timings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn snap(id: AircraftId, team: Team, p: Vec3, v: Vec3) -> AircraftSnapshot {
        AircraftSnapshot {
            id,
            team,
            position: p,
            velocity: v,
        }
    }

    fn straight_history(start: Vec3, v: Vec3, n: usize) -> TrackHistory {
        let mut h = TrackHistory::default();
        for k in 0..n {
            h.push(start + v * (0.1 * k as f64), v);
        }
        h
    }

    #[test]
    fn history_caps_at_thirty() {
        let h = straight_history(Vec3::zeros(), Vec3::new(100.0, 0.0, 0.0), 45);
        assert_eq!(h.len(), HISTORY_LEN);
        assert_eq!(h.control_point().unwrap().x, 100.0 * 0.1 * 15.0);
    }

    #[test]
    fn capture_at_control_point() {
        let v = Vec3::new(100.0, 0.0, 0.0);
        let h = straight_history(Vec3::zeros(), v, 30);
        let evader = snap(1, Team::Red, Vec3::new(300.0, 0.0, 0.0), v);
        let pursuer = snap(0, Team::Blue, Vec3::zeros(), v);
        assert!(check_capture(&pursuer, &evader, &h));
    }

    #[test]
    fn capture_fails_at_150m() {
        let v = Vec3::new(100.0, 0.0, 0.0);
        let h = straight_history(Vec3::zeros(), v, 30);
        let evader = snap(1, Team::Red, Vec3::new(300.0, 0.0, 0.0), v);
        let pursuer = snap(0, Team::Blue, Vec3::new(0.0, 150.0, 0.0), v);
        assert!(!check_capture(&pursuer, &evader, &h));
    }

    #[test]
    fn capture_fails_at_61_degrees() {
        let v = Vec3::new(100.0, 0.0, 0.0);
        let h = straight_history(Vec3::zeros(), v, 30);
        let evader = snap(1, Team::Red, Vec3::new(300.0, 0.0, 0.0), v);
        let a = 61f64.to_radians();
        let pv = Vec3::new(a.cos(), a.sin(), 0.0) * 90.0;
        let pursuer = snap(0, Team::Blue, Vec3::new(0.0, 50.0, 0.0), pv);
        assert!(!check_capture(&pursuer, &evader, &h));
        let a = 59f64.to_radians();
        let pursuer = snap(
            0,
            Team::Blue,
            Vec3::new(0.0, 50.0, 0.0),
            Vec3::new(a.cos(), a.sin(), 0.0),
        );
        assert!(check_capture(&pursuer, &evader, &h));
    }

    #[test]
    fn capture_needs_full_history() {
        let v = Vec3::new(100.0, 0.0, 0.0);
        let h = straight_history(Vec3::zeros(), v, 29);
        let evader = snap(1, Team::Red, Vec3::new(290.0, 0.0, 0.0), v);
        let pursuer = snap(0, Team::Blue, Vec3::zeros(), v);
        assert!(!check_capture(&pursuer, &evader, &h));
    }

    #[test]
    fn spawn_geometry_and_determinism() {
        for seed in 0..100 {
            let cfg = ScenarioConfig::versus(1, 1, seed);
            let (w, ev) = spawn_world(&cfg).unwrap();
            assert_eq!(w.aircraft.len(), 2);
            assert_eq!(ev.len(), 2);
            assert!(w.aircraft[0].state.x < 12_500.0 && 12_500.0 < w.aircraft[1].state.x);
            assert_eq!(w.aircraft[0].team, Team::Blue);
            let alt = w.aircraft[1].state.altitude();
            assert!((3000.0..=8000.0).contains(&alt));
        }
        let cfg = ScenarioConfig::versus(3, 2, 77);
        assert_eq!(spawn_world(&cfg).unwrap().0, spawn_world(&cfg).unwrap().0);
        assert_eq!(
            spawn_world(&ScenarioConfig::versus(10, 10, 1))
                .unwrap()
                .1
                .len(),
            20
        );
    }

    #[test]
    fn invalid_counts_rejected() {
        assert!(matches!(
            spawn_world(&ScenarioConfig::versus(0, 1, 0)),
            Err(Error::InvalidConfig(_))
        ));
        let cfg = ScenarioConfig {
            max_steps: 0,
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
    }

    fn head_on_world() -> (WorldState, SolverContext) {
        let cfg = ScenarioConfig::versus(1, 1, 0);
        let ctx = SolverContext::new(&cfg).unwrap();
        let (mut w, _) = spawn_world(&cfg).unwrap();
        w.aircraft[0].state = AircraftState::level(2000.0, 12_500.0, 6000.0, 80.0, 0.0);
        w.aircraft[1].state = AircraftState::level(23_000.0, 12_500.0, 6000.0, 70.0, PI);
        (w, ctx)
    }

    #[test]
    fn head_on_step_closes_distance() {
        let (mut w, ctx) = head_on_world();
        let before = (w.aircraft[0].state.position() - w.aircraft[1].state.position()).norm();
        let out = step(&mut w, &ctx).unwrap();
        assert!(out.events.is_empty());
        assert_eq!(out.decisions.len(), 2);
        let after = (w.aircraft[0].state.position() - w.aircraft[1].state.position()).norm();
        // Each closes roughly V * 0.1 along x.
        let closed = before - after;
        assert!((closed - 15.0).abs() < 2.0, "closed {closed}");
        assert_eq!(w.step, 1);
        assert!(w.aircraft.iter().all(|a| a.history.len() == 1));
    }

    #[test]
    fn capture_fires_on_thirtieth_step() {
        let (mut w, ctx) = head_on_world();
        // Put red in a long straight track with blue glued to its control point.
        let v = Vec3::new(70.0, 0.0, 0.0);
        let red_pos = Vec3::new(10_000.0, 10_000.0, -6000.0);
        w.aircraft[1].state = AircraftState::level(red_pos.x, red_pos.y, 6000.0, 70.0, 0.0);
        w.aircraft[1].history = straight_history(red_pos - v * 3.0, v, 30);
        w.aircraft[0].state = AircraftState::level(red_pos.x - 205.0, red_pos.y, 6000.0, 70.0, 0.0);
        w.capture_progress.insert((0, 1), 29);
        let out = step(&mut w, &ctx).unwrap();
        let e = out
            .events
            .iter()
            .find(|e| e.kind == EventKind::Capture)
            .expect("capture");
        assert_eq!((e.subject_id, e.pursuer_id), (Some(1), Some(0)));
        assert_eq!(e.step, 1);
        assert_eq!(e.team_scores, Scores { blue: 1, red: 0 });
        assert_eq!(w.scores.blue, 1);
        assert!(w.get(1).is_none());
        assert!(w.capture_progress.is_empty());
    }

    #[test]
    fn capture_counter_resets_when_condition_breaks() {
        let (mut w, ctx) = head_on_world();
        w.capture_progress.insert((0, 1), 29);
        w.capture_progress.insert((1, 0), 12);
        let out = step(&mut w, &ctx).unwrap();
        assert!(out.events.is_empty());
        assert!(w.capture_progress.is_empty());
    }

    #[test]
    fn crash_below_deck() {
        let (mut w, ctx) = head_on_world();
        // One Euler step drops 100 * sin(0.5) * 0.1 = 4.8 m regardless of the action.
        w.aircraft[1].state = AircraftState::level(23_000.0, 12_500.0, 502.0, 100.0, PI);
        w.aircraft[1].state.gamma = -0.5;
        let out = step(&mut w, &ctx).unwrap();
        let crash = out
            .events
            .iter()
            .find(|e| e.kind == EventKind::Crash)
            .expect("crash");
        assert_eq!(crash.subject_id, Some(1));
        assert_eq!(w.scores, Scores::default());
        assert!(w.is_decided());
        assert!(matches!(step(&mut w, &ctx), Err(Error::Terminated(1))));
    }

    #[test]
    fn minimal_episode_is_a_draw() {
        let cfg = ScenarioConfig {
            max_steps: 1,
            ..ScenarioConfig::versus(1, 1, 3)
        };
        let r = run_episode(&cfg).unwrap();
        assert_eq!(r.outcome, Outcome::Draw);
        assert_eq!(r.scores, Scores::default());
        assert_eq!(r.steps, 1);
        assert_eq!(r.telemetry.len(), 2);
        assert_eq!(r.events.last().unwrap().kind, EventKind::DrawTimeout);
    }

    #[test]
    fn bad_order_rejected() {
        let (mut w, ctx) = head_on_world();
        assert!(step_with_order(&mut w, &ctx, &[0, 0]).is_err());
        assert!(step_with_order(&mut w, &ctx, &[1]).is_err());
    }
}
