//! Team identity, per-team performance limits and discrete action tables.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dynamics::{ControlAction, PerformanceLimits};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Team {
    Blue,
    Red,
}

impl Team {
    pub const ALL: [Team; 2] = [Team::Blue, Team::Red];

    pub fn opponent(self) -> Team {
        match self {
            Team::Blue => Team::Red,
            Team::Red => Team::Blue,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Team::Blue => "blue",
            Team::Red => "red",
        }
    }
}

impl fmt::Display for Team {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// `k * num / den` for k in `lo..=hi`, computed so that each entry is the
/// correctly rounded decimal (e.g. `0.3 * 1` is exactly `0.3`, and 0 is 0).
fn decimal_range(lo: i32, hi: i32, num: f64, den: f64) -> Vec<f64> {
    (lo..=hi).map(|k| f64::from(k) * num / den).collect()
}

/// The per-axis values a team may command. Actions are the Cartesian product.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ActionGrid {
    /// Roll rates, rad/s.
    pub phi_dot: Vec<f64>,
    /// Angle-of-attack rates, rad/s.
    pub alpha_dot: Vec<f64>,
    /// Thrust, g.
    pub n_x: Vec<f64>,
}

impl ActionGrid {
    /// Blue: roll rate -1.5..=1.5 step 0.3, alpha rate -0.5..=0.5 step 0.1, thrust 0..=8 g.
    pub fn blue() -> Self {
        ActionGrid {
            phi_dot: decimal_range(-5, 5, 3.0, 10.0),
            alpha_dot: decimal_range(-5, 5, 1.0, 10.0),
            n_x: decimal_range(0, 8, 1.0, 1.0),
        }
    }

    /// Red: roll rate -1.0..=1.0 step 0.2, alpha rate -0.5..=0.5 step 0.1, thrust 0..=6 g.
    pub fn red() -> Self {
        ActionGrid {
            phi_dot: decimal_range(-5, 5, 1.0, 5.0),
            alpha_dot: decimal_range(-5, 5, 1.0, 10.0),
            n_x: decimal_range(0, 6, 1.0, 1.0),
        }
    }

    pub fn len(&self) -> usize {
        self.phi_dot.len() * self.alpha_dot.len() * self.n_x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Full product with roll rate varying slowest and thrust fastest.
    pub fn enumerate(&self) -> Vec<ControlAction> {
        let mut out = Vec::with_capacity(self.len());
        for &phi_dot in &self.phi_dot {
            for &alpha_dot in &self.alpha_dot {
                for &n_x in &self.n_x {
                    out.push(ControlAction {
                        alpha_dot,
                        phi_dot,
                        n_x,
                    });
                }
            }
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let finite = |v: &[f64]| v.iter().all(|x| x.is_finite());
        if self.is_empty() {
            return Err(Error::InvalidConfig("action grid has an empty axis".into()));
        }
        if !(finite(&self.phi_dot) && finite(&self.alpha_dot) && finite(&self.n_x)) {
            return Err(Error::InvalidConfig(
                "action grid holds a non-finite value".into(),
            ));
        }
        Ok(())
    }
}

/// Limits and action table for one side.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TeamProfile {
    pub limits: PerformanceLimits,
    pub actions: ActionGrid,
}

impl TeamProfile {
    pub fn default_for(team: Team) -> Self {
        match team {
            Team::Blue => TeamProfile {
                limits: PerformanceLimits::blue(),
                actions: ActionGrid::blue(),
            },
            Team::Red => TeamProfile {
                limits: PerformanceLimits::red(),
                actions: ActionGrid::red(),
            },
        }
    }
}

/// Default action list for `team`, in the documented order.
pub fn enumerate_actions(team: Team) -> Vec<ControlAction> {
    TeamProfile::default_for(team).actions.enumerate()
}
