//! Rollout collection across parallel environment workers.

use rayon::prelude::*;
use rayon::ThreadPool;
use serde::{Deserialize, Serialize};

use super::gae::{compute_gae, normalize, rewards_to_go};
use super::hyper::{HyperParams, ValueTarget};
use crate::env::{TransferEnv, ACTION_DIM, OBS_DIM};
use crate::error::{Error, Result};
use crate::policy::PolicyParams;
use crate::rng::{derive_stream, RngStream, StreamPurpose};

#[derive(Debug, Clone, PartialEq)]
pub struct Transition {
    pub obs: [f64; OBS_DIM],
    /// Pre-squash action sampled from the behaviour policy.
    pub action: [f64; ACTION_DIM],
    pub log_prob: f64,
    pub value: f64,
    pub reward: f64,
    pub done: bool,
    pub advantage: f64,
    pub return_target: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeStats {
    pub env_index: u64,
    pub episode_index: u64,
    pub undiscounted_return: f64,
    pub discounted_return: f64,
    pub m_f_kg: f64,
    pub pos_err: f64,
    pub vel_err: f64,
}

/// Transitions of one rollout in env-index order, then episode, then step.
/// A buffer may feed exactly one update.
#[derive(Debug, Clone)]
pub struct RolloutBuffer {
    transitions: Vec<Transition>,
    pub episodes: Vec<EpisodeStats>,
    consumed: bool,
}

impl RolloutBuffer {
    /// Build from finished transitions (advantages and targets already set).
    pub fn from_transitions(transitions: Vec<Transition>, episodes: Vec<EpisodeStats>) -> Self {
        Self {
            transitions,
            episodes,
            consumed: false,
        }
    }

    pub fn len(&self) -> usize {
        self.transitions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.transitions.is_empty()
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn is_consumed(&self) -> bool {
        self.consumed
    }

    /// Hand the transitions to an update, refusing a second use.
    pub fn consume(&mut self) -> Result<&[Transition]> {
        if self.consumed {
            return Err(Error::StaleBuffer);
        }
        self.consumed = true;
        Ok(&self.transitions)
    }
}

struct WorkerOutput {
    transitions: Vec<Transition>,
    episodes: Vec<EpisodeStats>,
}

fn run_worker(
    params: &PolicyParams,
    env: &mut TransferEnv,
    env_index: u64,
    hp: &HyperParams,
    seed: u64,
    rollout_index: u64,
) -> Result<WorkerOutput> {
    let mut transitions = Vec::with_capacity(hp.n_b * env.mission().segments);
    let mut episodes = Vec::with_capacity(hp.n_b);
    for j in 0..hp.n_b as u64 {
        let episode_index = rollout_index * hp.n_b as u64 + j;
        let mut obs = env.reset(derive_stream(seed, env_index, episode_index));
        let mut policy_stream = RngStream::derive(seed, env_index, episode_index, StreamPurpose::Policy);
        let (mut ret, mut disc_ret, mut discount) = (0.0, 0.0, 1.0);
        loop {
            let x = obs.to_array();
            let (mean, value) = params.forward(&x)?;
            let (action, log_prob) = params.distribution(mean).sample(&mut policy_stream);
            let action: [f64; ACTION_DIM] = action.try_into().map_err(|a: Vec<f64>| Error::ShapeMismatch {
                what: "policy output".into(),
                expected: ACTION_DIM.to_string(),
                got: a.len().to_string(),
            })?;
            let step = env.step_raw(&action)?;
            ret += step.reward;
            disc_ret += discount * step.reward;
            discount *= hp.gamma;
            transitions.push(Transition {
                obs: x,
                action,
                log_prob,
                value,
                reward: step.reward,
                done: step.done,
                advantage: 0.0,
                return_target: 0.0,
            });
            obs = step.obs;
            if step.done {
                break;
            }
        }
        let report = env.report().expect("episode finished");
        episodes.push(EpisodeStats {
            env_index,
            episode_index,
            undiscounted_return: ret,
            discounted_return: disc_ret,
            m_f_kg: report.m_f_kg,
            pos_err: report.pos_err,
            vel_err: report.vel_err,
        });
    }

    let rewards: Vec<f64> = transitions.iter().map(|t| t.reward).collect();
    let dones: Vec<bool> = transitions.iter().map(|t| t.done).collect();
    let mut values: Vec<f64> = transitions.iter().map(|t| t.value).collect();
    values.push(0.0);
    let (adv, lambda_returns) = compute_gae(&rewards, &values, &dones, hp.gamma, hp.lambda)?;
    let targets = match hp.value_target {
        ValueTarget::LambdaReturn => lambda_returns,
        ValueTarget::RewardToGo => rewards_to_go(&rewards, &dones)?,
    };
    for ((t, a), r) in transitions.iter_mut().zip(adv).zip(targets) {
        t.advantage = a;
        t.return_target = r;
    }
    Ok(WorkerOutput { transitions, episodes })
}

/// Run `n_b` episodes on every environment with the current stochastic
/// policy. Worker `e` uses the streams of `(seed, e, rollout_index * n_b + j)`
/// and results are merged in env-index order, so the buffer does not depend
/// on the thread count.
pub fn collect_rollouts(
    params: &PolicyParams,
    envs: &mut [TransferEnv],
    hp: &HyperParams,
    seed: u64,
    rollout_index: u64,
    pool: &ThreadPool,
) -> Result<RolloutBuffer> {
    let outputs: Vec<Result<WorkerOutput>> = pool.install(|| {
        envs.par_iter_mut()
            .enumerate()
            .map(|(e, env)| run_worker(params, env, e as u64, hp, seed, rollout_index))
            .collect()
    });
    let mut transitions = Vec::new();
    let mut episodes = Vec::new();
    for out in outputs {
        let out = out?;
        transitions.extend(out.transitions);
        episodes.extend(out.episodes);
    }
    if hp.normalize_advantages {
        let mut adv: Vec<f64> = transitions.iter().map(|t| t.advantage).collect();
        normalize(&mut adv);
        for (t, a) in transitions.iter_mut().zip(adv) {
            t.advantage = a;
        }
    }
    Ok(RolloutBuffer::from_transitions(transitions, episodes))
}
