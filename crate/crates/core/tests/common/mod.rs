//! Independent reference implementations used by the integration tests and
//! the acceptance suite. The oracles in this file never call into the
//! library's math; `cases` builds inputs for both sides.

#![allow(dead_code)]

pub mod cases;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub type P3 = [f64; 3];

/// A reward source as plain numbers: (magnitude, decay, location, radius).
#[derive(Clone, Copy, Debug)]
pub struct RawPeak {
    pub magnitude: f64,
    pub decay: f64,
    pub at: P3,
    pub radius: f64,
}

fn dist(a: P3, b: P3) -> f64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    let dz = a[2] - b[2];
    (dx * dx + dy * dy + dz * dz).sqrt()
}

/// Brute-force value of a NED point: best attractive term, minus the worst
/// active well, minus the linear deck ramp. Uses `powf` directly.
pub fn oracle_value(point: P3, peaks: &[RawPeak], h_max: f64, deck_weight: f64) -> f64 {
    let mut best_pos = 0.0;
    let mut worst_neg = 0.0;
    for p in peaks {
        let d = dist(point, p.at);
        let term = p.magnitude.abs() * p.decay.powf(d);
        if p.magnitude > 0.0 {
            if term > best_pos {
                best_pos = term;
            }
        } else if d < p.radius && term > worst_neg {
            worst_neg = term;
        }
    }
    let altitude = -point[2];
    let top = h_max + 1500.0;
    let deck = if altitude < top {
        deck_weight * (top - altitude)
    } else {
        0.0
    };
    best_pos - worst_neg - deck
}

/// Geometric capture test recomputed from a raw position list (oldest
/// first). The control point is the entry 30 steps before "now", i.e. the
/// 30th from the end. The angle comes from atan2 of cross and dot products.
pub fn oracle_capture(
    pursuer_pos: P3,
    pursuer_vel: P3,
    evader_vel: P3,
    past_positions: &[P3],
) -> bool {
    if past_positions.len() < 30 {
        return false;
    }
    let cp = past_positions[past_positions.len() - 30];
    if dist(pursuer_pos, cp) >= 100.0 {
        return false;
    }
    let (a, b) = (pursuer_vel, evader_vel);
    let cross = [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ];
    let cn = (cross[0] * cross[0] + cross[1] * cross[1] + cross[2] * cross[2]).sqrt();
    let dot = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    if cn == 0.0 && dot == 0.0 {
        return false;
    }
    cn.atan2(dot).to_degrees() < 60.0
}

pub fn uniform3(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> P3 {
    [
        rng.gen_range(lo..hi),
        rng.gen_range(lo..hi),
        rng.gen_range(lo..hi),
    ]
}

/// Random peak with roughly the magnitudes and decays used in practice.
pub fn random_peak(rng: &mut ChaCha8Rng) -> RawPeak {
    let positive = rng.gen_bool(0.4);
    let magnitude = rng.gen_range(1.0..400.0) * if positive { 1.0 } else { -1.0 };
    let decay = rng.gen_range(0.95..0.9999);
    let at = uniform3(rng, 0.0, 25_000.0);
    let at = [at[0], at[1], -at[2]];
    let radius = if positive {
        f64::INFINITY
    } else {
        rng.gen_range(50.0..5000.0)
    };
    RawPeak {
        magnitude,
        decay,
        at,
        radius,
    }
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
    }
}
