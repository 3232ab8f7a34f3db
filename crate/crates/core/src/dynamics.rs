//! Pseudo-6DOF point-mass aircraft model.
//!
//! The model is driven by three inputs: thrust `n_x` (in g), angle-of-attack
//! rate and roll rate. Lift is a constant 0.5 g plus the component of thrust
//! out the top of the airframe:
//!
//! ```text
//! n_f   = n_x sin(alpha) + 0.5
//! V'    = g (n_x cos(alpha) - sin(gamma))
//! gamma' = g/V (n_f cos(phi) - cos(gamma))
//! psi'  = g n_f sin(phi) / (V cos(gamma))      clamped to +/- psi_dot_max
//! x'    = V cos(gamma) cos(psi)
//! y'    = V cos(gamma) sin(psi)
//! h'    = V sin(gamma)                         (z = -h, so z' = -V sin(gamma))
//! ```
//!
//! Integration is forward Euler. After each step the state is projected
//! back onto the flight envelope in a fixed order: clamp alpha, clamp speed,
//! then wrap angles.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Vec3 = Vector3<f64>;

/// Standard gravity used throughout the model, m/s^2.
pub const GRAVITY: f64 = 9.8;
/// Constant lift acceleration, g.
pub const LIFT_ACCEL: f64 = 0.5;
/// Speed of sound used to express the team limits, m/s.
pub const MACH: f64 = 343.0;
/// Decision and integration step, s.
pub const DEFAULT_DT: f64 = 0.1;
/// Forward projection horizon used to value an action, s.
pub const DEFAULT_HORIZON: f64 = 1.0;
/// States closer than this to vertical flight are rejected.
pub const VERTICAL_MARGIN: f64 = 1e-6;

/// Full state of one aircraft. Position is NED, so altitude is `-z`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AircraftState {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    /// Airspeed, m/s.
    pub speed: f64,
    /// Flight path angle, rad, positive climbing.
    pub gamma: f64,
    /// Heading azimuth, rad.
    pub psi: f64,
    /// Roll angle, rad.
    pub phi: f64,
    /// Angle of attack, rad.
    pub alpha: f64,
    /// Pitch, always `gamma + alpha`.
    pub theta: f64,
}

impl AircraftState {
    pub fn new(position: Vec3, speed: f64, gamma: f64, psi: f64, phi: f64, alpha: f64) -> Self {
        AircraftState {
            x: position.x,
            y: position.y,
            z: position.z,
            speed,
            gamma,
            psi,
            phi,
            alpha,
            theta: gamma + alpha,
        }
    }

    /// Level flight at `altitude` heading `psi`.
    pub fn level(x: f64, y: f64, altitude: f64, speed: f64, psi: f64) -> Self {
        Self::new(Vec3::new(x, y, -altitude), speed, 0.0, psi, 0.0, 0.0)
    }

    pub fn position(&self) -> Vec3 {
        Vec3::new(self.x, self.y, self.z)
    }

    pub fn altitude(&self) -> f64 {
        -self.z
    }

    /// Inertial velocity in NED.
    pub fn velocity(&self) -> Vec3 {
        let (sg, cg) = self.gamma.sin_cos();
        let (sp, cp) = self.psi.sin_cos();
        Vec3::new(self.speed * cg * cp, self.speed * cg * sp, -self.speed * sg)
    }

    pub fn is_finite(&self) -> bool {
        [
            self.x, self.y, self.z, self.speed, self.gamma, self.psi, self.phi, self.alpha,
            self.theta,
        ]
        .iter()
        .all(|v| v.is_finite())
    }
}

/// One discrete command held for a projection.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ControlAction {
    /// rad/s
    pub alpha_dot: f64,
    /// rad/s
    pub phi_dot: f64,
    /// g
    pub n_x: f64,
}

impl ControlAction {
    pub const NEUTRAL: ControlAction = ControlAction {
        alpha_dot: 0.0,
        phi_dot: 0.0,
        n_x: 0.0,
    };
}

/// Flight envelope of one team.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PerformanceLimits {
    pub v_min: f64,
    pub v_max: f64,
    /// Symmetric bound on the turn rate magnitude, rad/s.
    pub psi_dot_max: f64,
    pub alpha_min: f64,
    pub alpha_max: f64,
}

impl PerformanceLimits {
    pub fn blue() -> Self {
        PerformanceLimits {
            v_min: 0.1 * MACH,
            v_max: 0.35 * MACH,
            psi_dot_max: 1.5,
            alpha_min: -0.009,
            alpha_max: 0.69,
        }
    }

    pub fn red() -> Self {
        PerformanceLimits {
            v_min: 0.1 * MACH,
            v_max: 0.30 * MACH,
            psi_dot_max: 1.3,
            alpha_min: -0.009,
            alpha_max: 0.52,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.v_min > 0.0
            && self.v_min < self.v_max
            && self.alpha_min < self.alpha_max
            && self.psi_dot_max > 0.0
            && self.v_max.is_finite()
            && self.psi_dot_max.is_finite();
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidConfig(format!(
                "inconsistent performance limits {self:?}"
            )))
        }
    }

    pub fn contains(&self, s: &AircraftState) -> bool {
        (self.v_min..=self.v_max).contains(&s.speed)
            && (self.alpha_min..=self.alpha_max).contains(&s.alpha)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StateDerivative {
    pub v_dot: f64,
    pub gamma_dot: f64,
    pub psi_dot: f64,
    pub x_dot: f64,
    pub y_dot: f64,
    pub z_dot: f64,
    pub phi_dot: f64,
    pub alpha_dot: f64,
    /// Normal acceleration out the top of the airframe, g.
    pub n_f: f64,
}

impl StateDerivative {
    pub fn altitude_rate(&self) -> f64 {
        -self.z_dot
    }
}

fn check_state(state: &AircraftState) -> Result<()> {
    let degenerate = !(state.speed > 0.0)
        || !(state.gamma.abs() < FRAC_PI_2 - VERTICAL_MARGIN)
        || !state.is_finite();
    if degenerate {
        Err(Error::DegenerateState {
            speed: state.speed,
            gamma: state.gamma,
        })
    } else {
        Ok(())
    }
}

/// Equations of motion, with the turn rate clamped to the team bound.
pub fn derivatives(
    state: &AircraftState,
    action: &ControlAction,
    limits: &PerformanceLimits,
) -> Result<StateDerivative> {
    check_state(state)?;
    let (sa, ca) = state.alpha.sin_cos();
    let (sg, cg) = state.gamma.sin_cos();
    let (sphi, cphi) = state.phi.sin_cos();
    let (spsi, cpsi) = state.psi.sin_cos();
    let v = state.speed;

    let n_f = action.n_x * sa + LIFT_ACCEL;
    let psi_dot = (GRAVITY * n_f * sphi / (v * cg)).clamp(-limits.psi_dot_max, limits.psi_dot_max);
    Ok(StateDerivative {
        v_dot: GRAVITY * (action.n_x * ca - sg),
        gamma_dot: GRAVITY / v * (n_f * cphi - cg),
        psi_dot,
        x_dot: v * cg * cpsi,
        y_dot: v * cg * spsi,
        z_dot: -v * sg,
        phi_dot: action.phi_dot,
        alpha_dot: action.alpha_dot,
        n_f,
    })
}

/// Wraps to (-pi, pi]. Values already in range are returned untouched.
pub fn wrap_angle(a: f64) -> f64 {
    if a > -PI && a <= PI {
        return a;
    }
    let r = a.rem_euclid(TAU);
    if r > PI {
        r - TAU
    } else {
        r
    }
}

/// Brings the attitude back to canonical ranges. A flight path angle past
/// vertical is folded back (gamma -> +/-pi - gamma) with heading and roll
/// flipped by pi, which describes the same velocity direction.
fn normalize_angles(s: &mut AircraftState) {
    if s.gamma > FRAC_PI_2 {
        s.gamma = PI - s.gamma;
        s.psi += PI;
        s.phi += PI;
    } else if s.gamma < -FRAC_PI_2 {
        s.gamma = -PI - s.gamma;
        s.psi += PI;
        s.phi += PI;
    }
    s.psi = wrap_angle(s.psi);
    s.phi = wrap_angle(s.phi);
}

fn check_dt(dt: f64) -> Result<()> {
    if dt > 0.0 && dt.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidTimeStep(dt))
    }
}

/// One forward-Euler step followed by envelope projection.
pub fn integrate_step(
    state: &AircraftState,
    action: &ControlAction,
    limits: &PerformanceLimits,
    dt: f64,
) -> Result<AircraftState> {
    check_dt(dt)?;
    Ok(euler_step(state, action, limits, dt)?)
}

#[inline]
fn euler_step(
    state: &AircraftState,
    action: &ControlAction,
    limits: &PerformanceLimits,
    dt: f64,
) -> Result<AircraftState> {
    let d = derivatives(state, action, limits)?;
    let mut next = AircraftState {
        x: state.x + d.x_dot * dt,
        y: state.y + d.y_dot * dt,
        z: state.z + d.z_dot * dt,
        speed: state.speed + d.v_dot * dt,
        gamma: state.gamma + d.gamma_dot * dt,
        psi: state.psi + d.psi_dot * dt,
        phi: state.phi + d.phi_dot * dt,
        alpha: state.alpha + d.alpha_dot * dt,
        theta: 0.0,
    };
    next.alpha = next.alpha.clamp(limits.alpha_min, limits.alpha_max);
    next.speed = next.speed.clamp(limits.v_min, limits.v_max);
    normalize_angles(&mut next);
    next.theta = next.gamma + next.alpha;
    Ok(next)
}

/// Number of `dt` steps in `horizon`, if it is a positive integer multiple.
pub fn step_count(horizon: f64, dt: f64) -> Result<usize> {
    check_dt(dt)?;
    let n = (horizon / dt).round();
    if !(horizon > 0.0) || n < 1.0 || (n * dt - horizon).abs() > 1e-9 * horizon.max(1.0) {
        return Err(Error::HorizonNotMultiple { horizon, dt });
    }
    Ok(n as usize)
}

/// Holds `action` for `horizon` seconds and returns the terminal state.
pub fn forward_project(
    state: &AircraftState,
    action: &ControlAction,
    limits: &PerformanceLimits,
    horizon: f64,
    dt: f64,
) -> Result<AircraftState> {
    let steps = step_count(horizon, dt)?;
    let mut s = *state;
    for _ in 0..steps {
        s = euler_step(&s, action, limits, dt)?;
    }
    Ok(s)
}

/// Time discretisation of a projection.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Projection {
    pub dt: f64,
    pub horizon: f64,
}

impl Default for Projection {
    fn default() -> Self {
        Projection {
            dt: DEFAULT_DT,
            horizon: DEFAULT_HORIZON,
        }
    }
}

impl Projection {
    pub fn steps(&self) -> Result<usize> {
        step_count(self.horizon, self.dt)
    }
}

/// The state after one step (what gets executed) and after the full
/// horizon (what gets valued) for a single held action.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReachablePair {
    pub one_step: AircraftState,
    pub horizon: AircraftState,
}

/// Rolls a held action out over the projection, keeping the first and last states.
pub fn project_pair(
    state: &AircraftState,
    action: &ControlAction,
    limits: &PerformanceLimits,
    steps: usize,
    dt: f64,
) -> Result<ReachablePair> {
    let one_step = euler_step(state, action, limits, dt)?;
    let mut s = one_step;
    for _ in 1..steps {
        s = euler_step(&s, action, limits, dt)?;
    }
    Ok(ReachablePair {
        one_step,
        horizon: s,
    })
}

/// Reachable-state approximation for every action, index-aligned with
/// `actions`. A rollout that hits a degenerate state carries its error.
pub fn reachable_states(
    state: &AircraftState,
    actions: &[ControlAction],
    limits: &PerformanceLimits,
    projection: Projection,
) -> Result<Vec<Result<ReachablePair>>> {
    if actions.is_empty() {
        return Err(Error::EmptyActions);
    }
    let steps = projection.steps()?;
    Ok(actions
        .iter()
        .map(|a| project_pair(state, a, limits, steps, projection.dt))
        .collect())
}
