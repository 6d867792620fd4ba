//! Proximal policy optimization for the transfer environment.
//!
//! A rollout runs `n_b` episodes on each of `n_env` environments with the
//! stochastic policy, estimates advantages with GAE, and then the update
//! performs `n_opt` epochs of Adam steps on the clipped surrogate, one per
//! minibatch of `n_env * N` transitions. The learning rate and the clip range
//! decay linearly over the budget of `T` environment steps, and the terminal
//! tolerance tightens from 1e-2 to 1e-3 halfway through.

mod adam;
mod buffer;
mod gae;
mod hyper;
mod objective;
mod trainer;

pub use adam::{clip_global_norm, Adam};
pub use buffer::{collect_rollouts, EpisodeStats, RolloutBuffer, Transition};
pub use gae::{compute_gae, normalize, rewards_to_go};
pub use hyper::{schedules, HyperParams, ValueTarget};
pub use objective::{ppo_objective, probability_ratio, ObjectiveCoeffs, ObjectiveOutput};
pub use trainer::{
    ppo_update, train_to_dir, BestCheckpoint, ReferenceReport, RunLayout, TrainMetrics, TrainReport, Trainer,
    UpdateStats,
};
