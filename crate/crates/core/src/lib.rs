//! Pursuit/evasion for teams of aircraft using a closed-form MDP value
//! surface.
//!
//! Every aircraft, every 0.1 s, builds a field of exponentially decaying
//! reward peaks from the positions and velocities of all other aircraft,
//! forward-projects each of its discrete actions for one second through a
//! pseudo-6DOF model, and executes the first step of the action whose
//! projected end point sits highest on that field.
//!
//! The modules follow the decision pipeline:
//!
//! - [`dynamics`]: equations of motion, Euler integration, forward projection
//! - [`reward`]: attractive peaks, risk wells and the altitude penalty
//! - [`solver`]: the value surface and argmax action selection
//! - [`engagement`]: spawning, the simultaneous step loop, capture and scoring
//! - [`metrics`]: win probability, survivability and timing aggregates
//! - [`runner`]: command line, trial orchestration and file export
//!
//! ```
//! use fastmdp::engagement::{run_episode, ScenarioConfig};
//!
//! let config = ScenarioConfig { max_steps: 20, ..ScenarioConfig::versus(1, 1, 42) };
//! let result = run_episode(&config).unwrap();
//! assert_eq!(result.steps, 20);
//! assert_eq!(result.telemetry.len(), 40);
//! ```

pub mod dynamics;
pub mod engagement;
pub mod error;
pub mod metrics;
pub mod reward;
pub mod runner;
pub mod solver;
pub mod team;

pub use error::{Error, Result};
pub use team::Team;

#[cfg(doctest)]
mod guide {
    #[doc = include_str!("../../../book/src/introduction.md")]
    struct Introduction;
    #[doc = include_str!("../../../book/src/dynamics.md")]
    struct Dynamics;
    #[doc = include_str!("../../../book/src/rewards.md")]
    struct Rewards;
    #[doc = include_str!("../../../book/src/value-surface.md")]
    struct ValueSurface;
    #[doc = include_str!("../../../book/src/engagement.md")]
    struct Engagement;
    #[doc = include_str!("../../../book/src/metrics.md")]
    struct Metrics;
    #[doc = include_str!("../../../book/src/cli.md")]
    struct Cli;
}
