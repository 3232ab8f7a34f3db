//! Synthetic inputs shared by the property tests and the acceptance suite.

use std::f64::consts::{FRAC_PI_2, PI};

use fastmdp::dynamics::{forward_project, AircraftState, ControlAction, PerformanceLimits, Vec3};
use fastmdp::engagement::{check_capture, TrackHistory};
use fastmdp::reward::AircraftSnapshot;
use fastmdp::Team;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{oracle_capture, P3};

pub struct CaptureCase {
    pub pursuer: AircraftSnapshot,
    pub evader: AircraftSnapshot,
    pub positions: Vec<P3>,
    pub history: TrackHistory,
}

pub fn unit(rng: &mut ChaCha8Rng) -> Vec3 {
    loop {
        let v = Vec3::new(
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        );
        let n = v.norm();
        if n > 0.1 && n <= 1.0 {
            return v / n;
        }
    }
}

/// Random evader track of 25..40 steps and a pursuer placed around the
/// point 30 steps back, with a velocity up to ~120 degrees off.
pub fn random_case(rng: &mut ChaCha8Rng) -> CaptureCase {
    let len = rng.gen_range(25..=40);
    let ev_vel = unit(rng) * rng.gen_range(34.0..120.0);
    let start = Vec3::new(
        rng.gen_range(0.0..25_000.0),
        rng.gen_range(0.0..25_000.0),
        -rng.gen_range(1000.0..9000.0),
    );
    let mut history = TrackHistory::default();
    let mut positions = Vec::new();
    for k in 0..len {
        let p = start + ev_vel * (0.1 * k as f64) + unit(rng) * rng.gen_range(0.0..3.0);
        history.push(p, ev_vel);
        positions.push([p.x, p.y, p.z]);
    }
    let evader_pos = start + ev_vel * (0.1 * len as f64);
    let anchor = if len >= 30 {
        Vec3::from(positions[len - 30])
    } else {
        start
    };
    let pursuer_pos = anchor + unit(rng) * rng.gen_range(0.0..200.0);
    let pursuer_vel =
        (ev_vel.normalize() + unit(rng) * rng.gen_range(0.0..1.7)) * rng.gen_range(34.0..120.0);
    CaptureCase {
        pursuer: AircraftSnapshot {
            id: 0,
            team: Team::Blue,
            position: pursuer_pos,
            velocity: pursuer_vel,
        },
        evader: AircraftSnapshot {
            id: 1,
            team: Team::Red,
            position: evader_pos,
            velocity: ev_vel,
        },
        positions,
        history,
    }
}

pub fn agree(c: &CaptureCase) -> (bool, bool) {
    let p = c.pursuer;
    let lib = check_capture(&p, &c.evader, &c.history);
    let want = oracle_capture(
        [p.position.x, p.position.y, p.position.z],
        [p.velocity.x, p.velocity.y, p.velocity.z],
        [
            c.evader.velocity.x,
            c.evader.velocity.y,
            c.evader.velocity.z,
        ],
        &c.positions,
    );
    (lib, want)
}

/// A straight evader track whose control point is at (1000, 0, -5000).
pub fn boundary_case(len: usize, offset: Vec3, pursuer_vel: Vec3) -> CaptureCase {
    let v = Vec3::new(100.0, 0.0, 0.0);
    let cp = Vec3::new(1000.0, 0.0, -5000.0);
    let first = cp - v * (0.1 * (len as f64 - 30.0).max(0.0));
    let mut history = TrackHistory::default();
    let mut positions = Vec::new();
    for k in 0..len {
        let p = first + v * (0.1 * k as f64);
        history.push(p, v);
        positions.push([p.x, p.y, p.z]);
    }
    CaptureCase {
        pursuer: AircraftSnapshot {
            id: 0,
            team: Team::Blue,
            position: cp + offset,
            velocity: pursuer_vel,
        },
        evader: AircraftSnapshot {
            id: 1,
            team: Team::Red,
            position: first + v * (0.1 * len as f64),
            velocity: v,
        },
        positions,
        history,
    }
}

pub fn random_state(rng: &mut ChaCha8Rng, lim: &PerformanceLimits) -> AircraftState {
    AircraftState::new(
        Vec3::new(
            rng.gen_range(0.0..25_000.0),
            rng.gen_range(0.0..25_000.0),
            -rng.gen_range(500.0..25_000.0),
        ),
        rng.gen_range(lim.v_min..=lim.v_max),
        rng.gen_range(-(FRAC_PI_2 - 0.01)..(FRAC_PI_2 - 0.01)),
        rng.gen_range(-PI..PI),
        rng.gen_range(-PI..PI),
        rng.gen_range(lim.alpha_min..=lim.alpha_max),
    )
}

pub fn random_action(rng: &mut ChaCha8Rng) -> ControlAction {
    ControlAction {
        alpha_dot: rng.gen_range(-0.5..=0.5),
        phi_dot: rng.gen_range(-1.5..=1.5),
        n_x: rng.gen_range(0.0..=8.0),
    }
}

/// A state and action in exact trim: n_x cos(a) = sin(g) and
/// n_f cos(phi) = cos(g). None when the sampled (g, a) admit no bank angle.
pub fn trim_case(
    rng: &mut ChaCha8Rng,
    lim: &PerformanceLimits,
) -> Option<(AircraftState, ControlAction)> {
    let gamma: f64 = rng.gen_range(0.05..1.3);
    let alpha: f64 = rng.gen_range(0.05..lim.alpha_max);
    let n_x = gamma.sin() / alpha.cos();
    let n_f = n_x * alpha.sin() + 0.5;
    let c = gamma.cos() / n_f;
    if c > 1.0 {
        return None;
    }
    let phi = c.acos() * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
    let speed = rng.gen_range(lim.v_min + 1.0..lim.v_max - 1.0);
    let s = AircraftState::new(
        Vec3::new(0.0, 0.0, -5000.0),
        speed,
        gamma,
        rng.gen_range(-3.0..3.0),
        phi,
        alpha,
    );
    Some((
        s,
        ControlAction {
            alpha_dot: 0.0,
            phi_dot: 0.0,
            n_x,
        },
    ))
}

/// Blue state and action that reach no clamp or fold within one second.
pub fn smooth_case(rng: &mut ChaCha8Rng) -> (AircraftState, ControlAction) {
    let s = AircraftState::new(
        Vec3::new(0.0, 0.0, -6000.0),
        rng.gen_range(60.0..95.0),
        rng.gen_range(-0.5..0.5),
        rng.gen_range(-PI..PI),
        rng.gen_range(-0.8..0.8),
        rng.gen_range(0.2..0.4),
    );
    let a = ControlAction {
        alpha_dot: rng.gen_range(-0.15..0.15),
        phi_dot: rng.gen_range(-0.5..0.5),
        n_x: rng.gen_range(0.0..1.5),
    };
    (s, a)
}

/// Ratio of successive position differences when halving dt; first order
/// methods give about 2. Returns None when the difference is below noise.
pub fn euler_ratio(s: &AircraftState, a: &ControlAction, lim: &PerformanceLimits) -> Option<f64> {
    let p = |dt: f64| forward_project(s, a, lim, 1.0, dt).unwrap().position();
    let (p1, p2, p3) = (p(0.1), p(0.05), p(0.025));
    let (e1, e2) = ((p1 - p2).norm(), (p2 - p3).norm());
    (e2 > 1e-6).then(|| e1 / e2)
}
