//! Per-ownship reward peaks and the altitude penalty.
//!
//! Every other aircraft contributes one attractive peak at its current
//! position plus a string of bounded negative "risk wells" laid along its
//! constant-velocity extrapolation. Teammates attract weakly and repel at
//! short range; opponents attract strongly and repel along their path ahead,
//! which pushes pursuers toward the region behind an evader.

use serde::{Deserialize, Serialize};

use crate::dynamics::Vec3;
use crate::team::Team;

pub type AircraftId = u32;

/// One exponentially decaying reward source.
///
/// Its contribution at distance `d` (meters) is `|magnitude| * decay^d`,
/// gated to zero at `d >= radius` for negative wells. Attractive peaks carry
/// an infinite radius.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RewardPeak {
    pub magnitude: f64,
    pub decay: f64,
    pub location: Vec3,
    pub radius: f64,
}

impl RewardPeak {
    pub fn attractive(magnitude: f64, decay: f64, location: Vec3) -> Self {
        RewardPeak {
            magnitude,
            decay,
            location,
            radius: f64::INFINITY,
        }
    }

    pub fn well(magnitude: f64, decay: f64, location: Vec3, radius: f64) -> Self {
        RewardPeak {
            magnitude,
            decay,
            location,
            radius,
        }
    }

    pub fn is_positive(&self) -> bool {
        self.magnitude > 0.0
    }

    pub fn is_bounded(&self) -> bool {
        self.radius.is_finite()
    }
}

/// What an ownship knows about another aircraft: position and velocity.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AircraftSnapshot {
    pub id: AircraftId,
    pub team: Team,
    pub position: Vec3,
    pub velocity: Vec3,
}

/// Terrain is a single maximum height; everything else is derived from it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TerrainConfig {
    /// Highest terrain point, m.
    pub h_max: f64,
}

impl Default for TerrainConfig {
    fn default() -> Self {
        TerrainConfig { h_max: 0.0 }
    }
}

impl TerrainConfig {
    pub const DECK_CLEARANCE: f64 = 500.0;
    pub const PENALTY_BAND: f64 = 1000.0;

    /// Minimum safe altitude; below it an aircraft has crashed.
    pub fn h_deck(&self) -> f64 {
        self.h_max + Self::DECK_CLEARANCE
    }

    /// Top of the altitude penalty band.
    pub fn h_penalty(&self) -> f64 {
        self.h_deck() + Self::PENALTY_BAND
    }
}

/// Slope of the altitude penalty ramp, reward units per meter.
pub const DEFAULT_DECK_WEIGHT: f64 = 10.0;

/// Penalty magnitude at `altitude`: zero above the band, then a linear ramp
/// reaching `10 * 1000 = 10000` at the hard deck.
pub fn altitude_penalty(altitude: f64, terrain: &TerrainConfig) -> f64 {
    altitude_penalty_weighted(altitude, terrain, DEFAULT_DECK_WEIGHT)
}

pub fn altitude_penalty_weighted(altitude: f64, terrain: &TerrainConfig, weight: f64) -> f64 {
    let top = terrain.h_penalty();
    if altitude >= top {
        0.0
    } else {
        weight * (top - altitude)
    }
}

/// Shape of the reward field. Defaults reproduce the reference table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RewardParams {
    pub teammate_well_magnitude: f64,
    pub teammate_well_decay: f64,
    pub teammate_well_radius: f64,
    /// Radius growth per second of extrapolation, m/s.
    pub teammate_well_growth: f64,
    pub teammate_well_times: Vec<f64>,
    pub teammate_peak_magnitude: f64,
    pub teammate_peak_decay: f64,

    pub opponent_well_magnitude: f64,
    pub opponent_well_decay: f64,
    pub opponent_well_times: Vec<f64>,
    /// Radius given to the well at the opponent's current position, where
    /// `|v| * t` would be zero.
    pub opponent_well_floor: f64,
    pub pursuit_magnitude: f64,
    pub pursuit_decay: f64,

    pub deck_weight: f64,
}

impl Default for RewardParams {
    fn default() -> Self {
        RewardParams {
            teammate_well_magnitude: -100.0,
            teammate_well_decay: 0.97,
            teammate_well_radius: 150.0,
            teammate_well_growth: 10.0,
            teammate_well_times: vec![0.0, 1.0, 2.0, 3.0, 4.0, 5.0],
            teammate_peak_magnitude: 10.0,
            teammate_peak_decay: 0.999,

            opponent_well_magnitude: -300.0,
            opponent_well_decay: 0.99,
            opponent_well_times: vec![0.0, 1.0, 5.0, 10.0],
            opponent_well_floor: 150.0,
            pursuit_magnitude: 200.0,
            pursuit_decay: 0.999,

            deck_weight: DEFAULT_DECK_WEIGHT,
        }
    }
}

impl RewardParams {
    pub fn teammate_peaks(&self, mates: &[AircraftSnapshot]) -> Vec<RewardPeak> {
        let mut out = Vec::with_capacity(mates.len() * (self.teammate_well_times.len() + 1));
        for m in mates {
            for &t in &self.teammate_well_times {
                out.push(RewardPeak::well(
                    self.teammate_well_magnitude,
                    self.teammate_well_decay,
                    m.position + m.velocity * t,
                    self.teammate_well_radius + self.teammate_well_growth * t,
                ));
            }
            out.push(RewardPeak::attractive(
                self.teammate_peak_magnitude,
                self.teammate_peak_decay,
                m.position,
            ));
        }
        out
    }

    pub fn opponent_peaks(&self, opponents: &[AircraftSnapshot]) -> Vec<RewardPeak> {
        let mut out = Vec::with_capacity(opponents.len() * (self.opponent_well_times.len() + 1));
        for o in opponents {
            let speed = o.velocity.norm();
            for &t in &self.opponent_well_times {
                let radius = if t == 0.0 {
                    self.opponent_well_floor
                } else {
                    speed * t
                };
                out.push(RewardPeak::well(
                    self.opponent_well_magnitude,
                    self.opponent_well_decay,
                    o.position + o.velocity * t,
                    radius,
                ));
            }
            out.push(RewardPeak::attractive(
                self.pursuit_magnitude,
                self.pursuit_decay,
                o.position,
            ));
        }
        out
    }

    /// Peaks seen by `ownship`, split by sign. The ownship itself is skipped.
    pub fn peaks_for(
        &self,
        ownship: AircraftId,
        team: Team,
        world: &[AircraftSnapshot],
    ) -> PeakSet {
        let mates: Vec<AircraftSnapshot> = world
            .iter()
            .filter(|a| a.team == team && a.id != ownship)
            .copied()
            .collect();
        let opponents: Vec<AircraftSnapshot> =
            world.iter().filter(|a| a.team != team).copied().collect();
        let mut set = PeakSet::default();
        for p in self
            .teammate_peaks(&mates)
            .into_iter()
            .chain(self.opponent_peaks(&opponents))
        {
            set.push(p);
        }
        set
    }
}

pub fn build_teammate_peaks(mates: &[AircraftSnapshot]) -> Vec<RewardPeak> {
    RewardParams::default().teammate_peaks(mates)
}

pub fn build_opponent_peaks(opponents: &[AircraftSnapshot]) -> Vec<RewardPeak> {
    RewardParams::default().opponent_peaks(opponents)
}

/// Peaks partitioned into attractive and repulsive sets.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PeakSet {
    pub positive: Vec<RewardPeak>,
    pub negative: Vec<RewardPeak>,
}

impl PeakSet {
    pub fn push(&mut self, peak: RewardPeak) {
        if peak.is_positive() {
            self.positive.push(peak);
        } else {
            self.negative.push(peak);
        }
    }

    pub fn len(&self) -> usize {
        self.positive.len() + self.negative.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}
