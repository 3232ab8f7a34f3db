//! Multi-trial aggregation: win probability, survivability, decision timing.

use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::team::Team;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    BlueWin,
    RedWin,
    Draw,
}

impl Outcome {
    pub fn winner(self) -> Option<Team> {
        match self {
            Outcome::BlueWin => Some(Team::Blue),
            Outcome::RedWin => Some(Team::Red),
            Outcome::Draw => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::BlueWin => "blue_win",
            Outcome::RedWin => "red_win",
            Outcome::Draw => "draw",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TeamCounts {
    pub blue: usize,
    pub red: usize,
}

impl TeamCounts {
    pub fn get(&self, team: Team) -> usize {
        match team {
            Team::Blue => self.blue,
            Team::Red => self.red,
        }
    }
}

/// What the aggregate metrics need from one finished contest.
#[derive(Clone, Debug, PartialEq)]
pub struct TrialSummary {
    pub outcome: Outcome,
    pub initial: TeamCounts,
    pub survivors: TeamCounts,
    /// Every per-agent decision time of the trial, tagged by team.
    pub decision_times: Vec<(Team, Duration)>,
}

impl TrialSummary {
    pub fn new(
        outcome: Outcome,
        initial: TeamCounts,
        survivors: TeamCounts,
        decision_times: Vec<(Team, Duration)>,
    ) -> Self {
        TrialSummary {
            outcome,
            initial,
            survivors,
            decision_times,
        }
    }

    pub fn survival_ratio(&self, team: Team) -> Option<f64> {
        let n0 = self.initial.get(team);
        (n0 > 0).then(|| self.survivors.get(team) as f64 / n0 as f64)
    }

    pub fn mean_decision_time(&self) -> Option<Duration> {
        let n = self.decision_times.len();
        (n > 0).then(|| {
            self.decision_times
                .iter()
                .map(|(_, d)| *d)
                .sum::<Duration>()
                / n as u32
        })
    }

    pub fn max_decision_time(&self) -> Option<Duration> {
        self.decision_times.iter().map(|(_, d)| *d).max()
    }
}

/// Fraction of trials won by `team`. Draws count as trials not won.
pub fn p_win(summaries: &[TrialSummary], team: Team) -> Result<f64> {
    if summaries.is_empty() {
        return Err(Error::EmptyTrials);
    }
    let wins = summaries
        .iter()
        .filter(|s| s.outcome.winner() == Some(team))
        .count();
    Ok(wins as f64 / summaries.len() as f64)
}

pub fn draw_fraction(summaries: &[TrialSummary]) -> Result<f64> {
    if summaries.is_empty() {
        return Err(Error::EmptyTrials);
    }
    let draws = summaries
        .iter()
        .filter(|s| s.outcome == Outcome::Draw)
        .count();
    Ok(draws as f64 / summaries.len() as f64)
}

/// Mean over trials of the surviving fraction of `team`.
pub fn p_survive(summaries: &[TrialSummary], team: Team) -> Result<f64> {
    if summaries.is_empty() {
        return Err(Error::EmptyTrials);
    }
    let mut total = 0.0;
    for (i, s) in summaries.iter().enumerate() {
        total += s.survival_ratio(team).ok_or(Error::ZeroInitialCount(i))?;
    }
    Ok(total / summaries.len() as f64)
}

/// Decision-time statistics, milliseconds.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimingSummary {
    pub samples: usize,
    pub mean_ms: f64,
    pub p50_ms: f64,
    pub p95_ms: f64,
    pub max_ms: f64,
}

impl TimingSummary {
    /// Nearest-rank percentiles over the samples.
    pub fn from_samples(samples: impl IntoIterator<Item = Duration>) -> Result<Self> {
        let mut ms: Vec<f64> = samples.into_iter().map(|d| d.as_secs_f64() * 1e3).collect();
        if ms.is_empty() {
            return Err(Error::NoTimingData);
        }
        ms.sort_by(f64::total_cmp);
        let n = ms.len();
        let rank = |q: f64| ms[((q * n as f64).ceil() as usize).clamp(1, n) - 1];
        Ok(TimingSummary {
            samples: n,
            mean_ms: ms.iter().sum::<f64>() / n as f64,
            p50_ms: rank(0.50),
            p95_ms: rank(0.95),
            max_ms: ms[n - 1],
        })
    }
}

/// Timing over every agent, step and trial.
pub fn timing_summary(summaries: &[TrialSummary]) -> Result<TimingSummary> {
    TimingSummary::from_samples(
        summaries
            .iter()
            .flat_map(|s| s.decision_times.iter().map(|(_, d)| *d)),
    )
}

/// Timing restricted to one team's agents.
pub fn team_timing_summary(summaries: &[TrialSummary], team: Team) -> Result<TimingSummary> {
    TimingSummary::from_samples(summaries.iter().flat_map(|s| {
        s.decision_times
            .iter()
            .filter(move |(t, _)| *t == team)
            .map(|(_, d)| *d)
    }))
}
