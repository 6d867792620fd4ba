use std::io::Write;
use std::ops::Range;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{run_episode, ActionSource, EpisodeRecord};
use crate::astro::Mission;
use crate::env::{TransferEnv, FINAL_TOLERANCE};
use crate::error::{Error, Result};
use crate::policy::PolicyParams;
use crate::rng::{derive_stream, RngStream, StreamPurpose};
use crate::uncertainty::{MteSchedule, Perturbations, UncertaintyConfig};

#[derive(Debug, Clone, PartialEq)]
pub struct CampaignOptions {
    /// Sample the Gaussian policy instead of flying its mode.
    pub stochastic_policy: bool,
    /// Tolerance of the terminal reward term.
    pub tolerance: f64,
    /// Worker threads; 0 picks rayon's default.
    pub threads: usize,
}

impl Default for CampaignOptions {
    fn default() -> Self {
        Self {
            stochastic_policy: false,
            tolerance: FINAL_TOLERANCE,
            threads: 0,
        }
    }
}

fn pool(threads: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))
}

/// Fly `n_episodes` closed-loop episodes; episode `i` draws its perturbations
/// from `derive_stream(global_seed, 0, i)`. Records come back in episode order.
pub fn run_campaign(
    params: &PolicyParams,
    mission: &Mission,
    uncertainty: &UncertaintyConfig,
    n_episodes: usize,
    global_seed: u64,
    options: &CampaignOptions,
) -> Result<Vec<EpisodeRecord>> {
    if n_episodes == 0 {
        return Err(Error::EmptyCampaign);
    }
    let perturbations = Perturbations::new(uncertainty, &mission.scales)?;
    let mut template = TransferEnv::new(mission.clone(), perturbations);
    template.set_tolerance(options.tolerance);
    let results: Vec<Result<EpisodeRecord>> = pool(options.threads)?.install(|| {
        (0..n_episodes as u64)
            .into_par_iter()
            .map(|i| {
                let mut env = template.clone();
                let stream = derive_stream(global_seed, 0, i);
                let source = if options.stochastic_policy {
                    ActionSource::Stochastic(params, RngStream::derive(global_seed, 0, i, StreamPurpose::Policy))
                } else {
                    ActionSource::Deterministic(params)
                };
                run_episode(&mut env, stream, source)
            })
            .collect()
    });
    results.into_iter().collect()
}

/// Population mean and standard deviation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stat {
    pub mean: f64,
    pub std: f64,
}

impl Stat {
    /// Computed about the first value, so identical inputs give exactly
    /// that value and a zero spread.
    pub fn of(values: &[f64]) -> Self {
        let n = values.len() as f64;
        let x0 = values[0];
        let shift = values.iter().map(|x| x - x0).sum::<f64>() / n;
        let mean = x0 + shift;
        let var = values.iter().map(|x| (x - x0 - shift).powi(2)).sum::<f64>() / n;
        Self { mean, std: var.sqrt() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignSummary {
    pub n_episodes: usize,
    pub tolerance: f64,
    pub m_f_kg: Stat,
    pub pos_err: Stat,
    pub vel_err: Stat,
    #[serde(rename = "return")]
    pub total_return: Stat,
    pub successes: usize,
    /// Percent of episodes with `max(pos_err, vel_err) <= tolerance`.
    pub success_rate: f64,
}

pub fn summarize(records: &[EpisodeRecord], epsilon: f64) -> Result<CampaignSummary> {
    if records.is_empty() {
        return Err(Error::EmptyCampaign);
    }
    let pick = |f: fn(&EpisodeRecord) -> f64| Stat::of(&records.iter().map(f).collect::<Vec<_>>());
    let successes = records.iter().filter(|r| r.success(epsilon)).count();
    Ok(CampaignSummary {
        n_episodes: records.len(),
        tolerance: epsilon,
        m_f_kg: pick(|r| r.report.m_f_kg),
        pos_err: pick(|r| r.report.pos_err),
        vel_err: pick(|r| r.report.vel_err),
        total_return: pick(|r| r.total_return),
        successes,
        success_rate: 100.0 * successes as f64 / records.len() as f64,
    })
}

pub const EPISODES_HEADER: [&str; 9] = [
    "episode",
    "seed",
    "m_f_kg",
    "pos_err",
    "vel_err",
    "return",
    "success",
    "mte_steps",
    "max_dv_violation",
];

pub fn write_episodes_csv<W: Write>(out: W, records: &[EpisodeRecord], epsilon: f64) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let err = |e: csv::Error| Error::Parse(e.to_string());
    w.write_record(EPISODES_HEADER).map_err(err)?;
    for r in records {
        let worst_dv = r.report.dv_violations.iter().cloned().fold(0.0, f64::max);
        w.write_record([
            r.seed.2.to_string(),
            r.seed.0.to_string(),
            r.report.m_f_kg.to_string(),
            r.report.pos_err.to_string(),
            r.report.vel_err.to_string(),
            r.total_return.to_string(),
            u8::from(r.success(epsilon)).to_string(),
            r.mte.describe(),
            worst_dv.to_string(),
        ])
        .map_err(err)?;
    }
    w.flush().map_err(|e| Error::Parse(e.to_string()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MteSweepRow {
    pub k_hat: usize,
    /// `max(pos_err, vel_err)` at arrival.
    pub constraint_violation: f64,
    pub m_f_kg: f64,
    pub pos_err: f64,
    pub vel_err: f64,
}

pub const SWEEP_HEADER: [&str; 5] = ["k_hat", "constraint_violation", "m_f_kg", "pos_err", "vel_err"];

/// One deterministic unperturbed episode per MTE location in `k_hats`, each
/// with a single one-step missed thrust.
pub fn mte_sweep(params: &PolicyParams, mission: &Mission, k_hats: Range<usize>) -> Result<Vec<MteSweepRow>> {
    let mut rows = Vec::with_capacity(k_hats.len());
    for k_hat in k_hats {
        let mut env = TransferEnv::deterministic(mission.clone());
        env.force_mte_schedule(Some(MteSchedule::single(mission.segments, k_hat)?));
        let rec = run_episode(&mut env, derive_stream(0, 0, k_hat as u64), ActionSource::Deterministic(params))?;
        rows.push(MteSweepRow {
            k_hat,
            constraint_violation: rec.report.max_error(),
            m_f_kg: rec.report.m_f_kg,
            pos_err: rec.report.pos_err,
            vel_err: rec.report.vel_err,
        });
    }
    Ok(rows)
}

pub fn write_sweep_csv<W: Write>(out: W, rows: &[MteSweepRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let err = |e: csv::Error| Error::Parse(e.to_string());
    w.write_record(SWEEP_HEADER).map_err(err)?;
    for r in rows {
        w.write_record([
            r.k_hat.to_string(),
            r.constraint_violation.to_string(),
            r.m_f_kg.to_string(),
            r.pos_err.to_string(),
            r.vel_err.to_string(),
        ])
        .map_err(err)?;
    }
    w.flush().map_err(|e| Error::Parse(e.to_string()))
}
