//! Closed-form value surface and argmax action selection.
//!
//! The value of a point is the best attractive peak, minus the worst risk
//! well covering it, minus the altitude penalty:
//!
//! ```text
//! V(p) = max_i |r_i| g_i^d_i  -  max_j [d_j < R_j] |r_j| g_j^d_j  -  deck(h)
//! ```
//!
//! Negative rewards are handled in standard positive form: their absolute
//! magnitudes build a positive surface which is then subtracted. An action
//! is valued at the end of its one-second projection; the executed state is
//! the first step of that same rollout.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::dynamics::{
    project_pair, AircraftState, ControlAction, PerformanceLimits, Projection, Vec3,
};
use crate::error::{Error, Result};
use crate::reward::{
    altitude_penalty_weighted, PeakSet, RewardPeak, TerrainConfig, DEFAULT_DECK_WEIGHT,
};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValueBreakdown {
    pub pos_max: f64,
    pub neg_max: f64,
    pub deck: f64,
    pub total: f64,
}

impl ValueBreakdown {
    fn new(pos_max: f64, neg_max: f64, deck: f64) -> Self {
        ValueBreakdown {
            pos_max,
            neg_max,
            deck,
            total: pos_max - neg_max - deck,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
struct Source {
    location: Vec3,
    magnitude: f64,
    ln_magnitude: f64,
    ln_decay: f64,
    radius: f64,
    /// Squared radius padded by a few ulps; only used to skip far wells.
    radius_sq: f64,
}

impl From<&RewardPeak> for Source {
    fn from(p: &RewardPeak) -> Self {
        let magnitude = p.magnitude.abs();
        Source {
            location: p.location,
            magnitude,
            ln_magnitude: magnitude.ln(),
            ln_decay: p.decay.ln(),
            radius: p.radius,
            radius_sq: p.radius * p.radius * (1.0 + 1e-12),
        }
    }
}

impl Source {
    #[inline]
    fn value(&self, d: f64) -> f64 {
        self.magnitude * (d * self.ln_decay).exp()
    }
}

/// Largest `magnitude * decay^d` over the sources, ranked in log space so
/// only the winner pays for an `exp`.
#[inline]
fn max_term<'a>(terms: impl Iterator<Item = (&'a Source, f64)>) -> f64 {
    let mut best: Option<(&Source, f64)> = None;
    let mut best_key = f64::NEG_INFINITY;
    for (s, d) in terms {
        let key = s.ln_magnitude + d * s.ln_decay;
        if key > best_key || best.is_none() {
            best_key = key;
            best = Some((s, d));
        }
    }
    best.map_or(0.0, |(s, d)| s.value(d).max(0.0))
}

/// Peaks prepared for repeated evaluation.
#[derive(Clone, Debug)]
pub struct ValueSurface {
    positive: Vec<Source>,
    negative: Vec<Source>,
    terrain: TerrainConfig,
    deck_weight: f64,
}

impl ValueSurface {
    pub fn new(
        positive: &[RewardPeak],
        negative: &[RewardPeak],
        terrain: TerrainConfig,
        deck_weight: f64,
    ) -> Self {
        ValueSurface {
            positive: positive.iter().map(Source::from).collect(),
            negative: negative.iter().map(Source::from).collect(),
            terrain,
            deck_weight,
        }
    }

    pub fn from_peaks(peaks: &PeakSet, terrain: TerrainConfig, deck_weight: f64) -> Self {
        Self::new(&peaks.positive, &peaks.negative, terrain, deck_weight)
    }

    /// Value at a NED point; altitude is taken as `-point.z`.
    pub fn evaluate(&self, point: &Vec3) -> ValueBreakdown {
        let pos_max = max_term(
            self.positive
                .iter()
                .map(|s| (s, (point - s.location).norm())),
        );
        let neg_max = max_term(self.negative.iter().filter_map(|s| {
            let d2 = (point - s.location).norm_squared();
            if d2 > s.radius_sq {
                return None;
            }
            let d = d2.sqrt();
            (d < s.radius).then_some((s, d))
        }));
        let deck = altitude_penalty_weighted(-point.z, &self.terrain, self.deck_weight);
        ValueBreakdown::new(pos_max, neg_max, deck)
    }
}

/// Value of one point against explicit peak lists.
pub fn value_at(
    point: &Vec3,
    pos_peaks: &[RewardPeak],
    neg_peaks: &[RewardPeak],
    terrain: &TerrainConfig,
) -> ValueBreakdown {
    ValueSurface::new(pos_peaks, neg_peaks, *terrain, DEFAULT_DECK_WEIGHT).evaluate(point)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecisionRecord {
    pub action_index: usize,
    pub chosen_value: f64,
    pub one_step_state: AircraftState,
    pub decision_time: Duration,
}

/// Projects every action, values each horizon state, and keeps the best.
/// Ties go to the lowest index; rollouts that hit a degenerate state are
/// skipped.
pub fn select_action(
    ownship: &AircraftState,
    actions: &[ControlAction],
    limits: &PerformanceLimits,
    surface: &ValueSurface,
    projection: Projection,
) -> Result<DecisionRecord> {
    let start = Instant::now();
    if actions.is_empty() {
        return Err(Error::EmptyActions);
    }
    let steps = projection.steps()?;
    let mut best: Option<(usize, f64, AircraftState)> = None;
    for (i, action) in actions.iter().enumerate() {
        let Ok(pair) = project_pair(ownship, action, limits, steps, projection.dt) else {
            continue;
        };
        let value = surface.evaluate(&pair.horizon.position()).total;
        if value.is_nan() {
            continue;
        }
        if best.is_none_or(|(_, v, _)| value > v) {
            best = Some((i, value, pair.one_step));
        }
    }
    let (action_index, chosen_value, one_step_state) = best.ok_or(Error::NoViableAction)?;
    Ok(DecisionRecord {
        action_index,
        chosen_value,
        one_step_state,
        decision_time: start.elapsed(),
    })
}
