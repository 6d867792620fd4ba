//! Robust low-thrust trajectory design with reinforcement learning.
//!
//! The crate models a time-fixed, minimum-propellant Earth-Mars rendezvous as
//! a Markov decision process over a Sims-Flanagan transcription (ballistic
//! Keplerian arcs joined by bounded impulses), perturbs it with state,
//! observation, control and missed-thrust uncertainties, and trains a
//! two-head neural guidance policy on it with proximal policy optimization.
//! Trained policies are assessed with closed-loop Monte Carlo campaigns.
//!
//! Modules, bottom up:
//!
//! - [`astro`]: units, Kepler propagation, rocket equation.
//! - [`rng`]: reproducible per-episode random streams.
//! - [`uncertainty`]: the perturbation models.
//! - [`env`]: the transfer environment and its reward.
//! - [`policy`]: the actor-critic network, Gaussian policy head, checkpoints.
//! - [`ppo`]: rollouts, advantage estimation, clipped surrogate, training loop.
//! - [`eval`]: reference trajectories and Monte Carlo campaigns.
//! - [`config`]: the aggregated run configuration.

pub mod astro;
pub mod config;
pub mod env;
pub mod error;
pub mod eval;
pub mod policy;
pub mod ppo;
pub mod rng;
pub mod uncertainty;

pub use error::{Error, Result};

// The book's listings run as doctests, one module per chapter.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/units.md")]
    mod units {}
    #[doc = include_str!("../../../book/src/propagation.md")]
    mod propagation {}
    #[doc = include_str!("../../../book/src/environment.md")]
    mod environment {}
    #[doc = include_str!("../../../book/src/uncertainty.md")]
    mod uncertainty {}
    #[doc = include_str!("../../../book/src/policy.md")]
    mod policy {}
    #[doc = include_str!("../../../book/src/training.md")]
    mod training {}
    #[doc = include_str!("../../../book/src/evaluation.md")]
    mod evaluation {}
    #[doc = include_str!("../../../book/src/reproducibility.md")]
    mod reproducibility {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
