//! Episode recording, reference trajectories and Monte Carlo campaigns.
//!
//! Closed-loop evaluation uses the deterministic action (the squashed mean of
//! the policy's Gaussian) unless stochastic sampling is requested.

mod campaign;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::astro::Mission;
use crate::env::{
    map_action, position_error, reward, terminal_violation, velocity_error, ConstraintReport,
    ImpulseCommand, Observation, SpacecraftState, TraceRow, TransferEnv, ACTION_DIM,
};
use crate::error::{Error, Result};
use crate::policy::PolicyParams;
use crate::rng::{derive_stream, RngStream};
use crate::uncertainty::MteSchedule;

pub use campaign::{
    mte_sweep, run_campaign, summarize, write_episodes_csv, write_sweep_csv, CampaignOptions,
    CampaignSummary, MteSweepRow, Stat, EPISODES_HEADER, SWEEP_HEADER,
};

/// Squashed policy mean for `obs`, bounded by the impulse limit at the
/// observed mass.
pub fn deterministic_action(params: &PolicyParams, obs: &Observation, mission: &Mission) -> Result<ImpulseCommand> {
    let (mean, _) = params.forward(&obs.to_array())?;
    Ok(map_action(&to_action(mean)?, mission.max_dv(obs.m)))
}

fn to_action(v: Vec<f64>) -> Result<[f64; ACTION_DIM]> {
    v.try_into().map_err(|v: Vec<f64>| Error::ShapeMismatch {
        what: "policy output".into(),
        expected: ACTION_DIM.to_string(),
        got: v.len().to_string(),
    })
}

/// Where the commands of an episode come from.
#[derive(Debug, Clone)]
pub enum ActionSource<'a> {
    Deterministic(&'a PolicyParams),
    /// Sample the Gaussian policy with the given stream.
    Stochastic(&'a PolicyParams, RngStream),
    /// Fixed nondimensional impulses per node; missing nodes coast.
    OpenLoop(&'a [Vector3<f64>]),
}

/// Everything recorded along one episode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeRecord {
    pub seed: (u64, u64, u64),
    /// `N + 1` nodes; see [`TraceRow`].
    pub rows: Vec<TraceRow>,
    /// State after the terminal maneuver.
    pub final_state: SpacecraftState,
    pub report: ConstraintReport,
    /// Tolerance the terminal reward was computed with.
    pub tolerance: f64,
    /// Undiscounted return.
    pub total_return: f64,
    pub mte: MteSchedule,
}

impl EpisodeRecord {
    pub fn success(&self, epsilon: f64) -> bool {
        self.report.satisfied(epsilon)
    }

    /// Realized agent impulses, one per decision node.
    pub fn realized_schedule(&self) -> Vec<Vector3<f64>> {
        self.rows[..self.rows.len() - 1].iter().map(|r| r.dv_realized).collect()
    }
}

/// Run one episode to completion from `env.reset(stream)`.
pub fn run_episode(env: &mut TransferEnv, stream: RngStream, mut source: ActionSource<'_>) -> Result<EpisodeRecord> {
    let seed = stream.seed_triple();
    let mission = env.mission().clone();
    let mut obs = env.reset(stream);
    let mut rows = Vec::with_capacity(mission.segments + 1);
    let mut last_reward = 0.0;
    let mut total = 0.0;
    loop {
        let k = env.state().k;
        let cmd = match &mut source {
            ActionSource::Deterministic(params) => deterministic_action(params, &obs, &mission)?,
            ActionSource::Stochastic(params, policy_stream) => {
                let (mean, _) = params.forward(&obs.to_array())?;
                let (raw, _) = params.distribution(mean).sample(policy_stream);
                map_action(&to_action(raw)?, mission.max_dv(obs.m))
            }
            ActionSource::OpenLoop(schedule) => {
                ImpulseCommand::new(schedule.get(k).copied().unwrap_or_else(Vector3::zeros))
            }
        };
        let step = env.step(&cmd)?;
        let prev = step.info.prev_state;
        rows.push(TraceRow {
            k,
            t: mission.node_time(k),
            r: prev.r,
            v: prev.v,
            m: prev.m,
            dv_commanded: step.info.commanded,
            dv_realized: step.info.realized,
            reward: last_reward,
        });
        last_reward = step.reward;
        total += step.reward;
        obs = step.obs;
        if let Some(term) = step.info.terminal {
            rows.push(TraceRow {
                k: mission.segments,
                t: mission.transfer_time,
                r: term.arrival.r,
                v: term.arrival.v,
                m: term.arrival.m,
                dv_commanded: term.dv,
                dv_realized: term.dv,
                reward: step.reward,
            });
            return Ok(EpisodeRecord {
                seed,
                rows,
                final_state: term.final_state,
                report: env.report().expect("episode finished"),
                tolerance: env.tolerance(),
                total_return: total,
                mte: env.mte_schedule().clone(),
            });
        }
    }
}

/// The robust reference trajectory: the deterministic policy flown in the
/// unperturbed environment.
pub fn extract_reference_trajectory(params: &PolicyParams, mission: &Mission) -> Result<EpisodeRecord> {
    let mut env = TransferEnv::deterministic(mission.clone());
    run_episode(&mut env, derive_stream(0, 0, 0), ActionSource::Deterministic(params))
}

/// Open-loop replay of nondimensional impulses in the unperturbed environment.
pub fn replay_schedule(mission: &Mission, schedule: &[Vector3<f64>]) -> Result<EpisodeRecord> {
    if schedule.len() > mission.segments {
        return Err(Error::Domain(format!(
            "schedule has {} impulses, the mission has {} nodes",
            schedule.len(),
            mission.segments
        )));
    }
    let mut env = TransferEnv::deterministic(mission.clone());
    run_episode(&mut env, derive_stream(0, 0, 0), ActionSource::OpenLoop(schedule))
}

/// Return of a record recomputed from its trace alone.
pub fn recompute_return(record: &EpisodeRecord, mission: &Mission) -> f64 {
    let n = record.rows.len() - 1;
    let mut total = 0.0;
    for k in 1..=n {
        let prev = &record.rows[k - 1];
        let (m_next, e_s) = if k == n {
            let pos = position_error(mission, &record.final_state.r);
            let vel = velocity_error(mission, &record.final_state.v);
            (record.final_state.m, terminal_violation(pos, vel, record.tolerance))
        } else {
            (record.rows[k].m, 0.0)
        };
        let e_u = crate::env::dv_violation(prev.dv_realized.norm(), mission.max_dv(prev.m));
        total += reward(prev.m - m_next, e_u, e_s);
    }
    total
}
