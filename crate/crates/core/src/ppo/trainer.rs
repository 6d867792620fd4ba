use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::ThreadPool;
use serde::{Deserialize, Serialize};

use super::adam::{clip_global_norm, Adam};
use super::buffer::{collect_rollouts, RolloutBuffer};
use super::hyper::HyperParams;
use super::objective::{ppo_objective, ObjectiveCoeffs};
use crate::astro::Mission;
use crate::config::RunConfig;
use crate::env::{tolerance_schedule, write_trace_csv, TransferEnv};
use crate::error::{Error, Result};
use crate::eval::{extract_reference_trajectory, EpisodeRecord};
use crate::policy::{save_params, PolicyParams};
use crate::rng::{RngStream, StreamPurpose};
use crate::uncertainty::Perturbations;

/// Averages over every minibatch step of one update.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct UpdateStats {
    /// Clipped surrogate on the first minibatch before any step.
    pub initial_clip_term: f64,
    pub clip_term: f64,
    pub value_loss: f64,
    pub entropy: f64,
    pub objective: f64,
    pub clip_fraction: f64,
    pub approx_kl: f64,
    /// Gradient norm before clipping.
    pub grad_norm: f64,
    pub minibatch_steps: usize,
}

/// `n_opt` epochs of minibatch ascent on the clipped objective. Each epoch
/// shuffles the buffer into `n_b` minibatches.
pub fn ppo_update(
    params: &mut PolicyParams,
    adam: &mut Adam,
    buffer: &mut RolloutBuffer,
    hp: &HyperParams,
    learning_rate: f64,
    clip_eps: f64,
    stream: &mut RngStream,
) -> Result<UpdateStats> {
    let transitions = buffer.consume()?;
    let coeffs = ObjectiveCoeffs {
        clip_eps,
        c1: hp.c1,
        c2: hp.c2,
    };
    let mut stats = UpdateStats::default();
    if transitions.is_empty() {
        return Ok(stats);
    }
    let batch = transitions.len().div_ceil(hp.n_b);
    let mut order: Vec<usize> = (0..transitions.len()).collect();
    for _ in 0..hp.n_opt {
        stream.shuffle(&mut order);
        for idx in order.chunks(batch) {
            let out = ppo_objective(params, transitions, idx, coeffs)?;
            if stats.minibatch_steps == 0 {
                stats.initial_clip_term = out.clip_term;
            }
            let mut grad = out.grads;
            grad.scale(-1.0);
            let norm = clip_global_norm(&mut grad, hp.max_grad_norm);
            adam.step(params, &grad, learning_rate);
            stats.clip_term += out.clip_term;
            stats.value_loss += out.value_loss;
            stats.entropy += out.entropy;
            stats.objective += out.objective;
            stats.clip_fraction += out.clip_fraction;
            stats.approx_kl += out.approx_kl;
            stats.grad_norm += norm;
            stats.minibatch_steps += 1;
        }
    }
    let n = stats.minibatch_steps.max(1) as f64;
    for x in [
        &mut stats.clip_term,
        &mut stats.value_loss,
        &mut stats.entropy,
        &mut stats.objective,
        &mut stats.clip_fraction,
        &mut stats.approx_kl,
        &mut stats.grad_norm,
    ] {
        *x /= n;
    }
    if !params.all_finite() {
        return Err(Error::Domain("parameters became non-finite".into()));
    }
    Ok(stats)
}

/// One line of `metrics.jsonl`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainMetrics {
    pub update: u64,
    /// Environment steps consumed after this update.
    pub steps: u64,
    pub tolerance: f64,
    pub learning_rate: f64,
    pub clip_eps: f64,
    pub mean_return: f64,
    pub mean_discounted_return: f64,
    pub mean_m_f_kg: f64,
    pub mean_pos_err: f64,
    pub mean_vel_err: f64,
    #[serde(flatten)]
    pub update_stats: UpdateStats,
    /// Deterministic policy in the unperturbed environment.
    pub eval_return: f64,
    pub eval_m_f_kg: f64,
    pub eval_pos_err: f64,
    pub eval_vel_err: f64,
    pub is_best: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BestCheckpoint {
    pub update: u64,
    pub eval_return: f64,
    pub params: PolicyParams,
}

pub struct Trainer {
    mission: Mission,
    hp: HyperParams,
    seed: u64,
    params: PolicyParams,
    adam: Adam,
    envs: Vec<TransferEnv>,
    pool: ThreadPool,
    steps: u64,
    updates: u64,
    best: Option<BestCheckpoint>,
}

impl Trainer {
    pub fn new(config: &RunConfig, threads: usize) -> Result<Self> {
        config.validate()?;
        let mission = Mission::new(config.mission.clone())?;
        let perturbations = Perturbations::new(&config.uncertainty, &mission.scales)?;
        let hp = config.hyper.clone();
        let params = PolicyParams::init(&config.network, config.seed)?;
        let adam = Adam::new(params.len(), hp.adam_beta1, hp.adam_beta2, hp.adam_eps);
        let envs = vec![TransferEnv::new(mission.clone(), perturbations); hp.n_env];
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads.max(1))
            .build()
            .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;
        Ok(Self {
            mission,
            hp,
            seed: config.seed,
            params,
            adam,
            envs,
            pool,
            steps: 0,
            updates: 0,
            best: None,
        })
    }

    pub fn params(&self) -> &PolicyParams {
        &self.params
    }

    pub fn mission(&self) -> &Mission {
        &self.mission
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn updates(&self) -> u64 {
        self.updates
    }

    pub fn best(&self) -> Option<&BestCheckpoint> {
        self.best.as_ref()
    }

    pub fn is_finished(&self) -> bool {
        self.steps >= self.hp.total_steps
    }

    /// Fresh rollout with the current policy at training step `t`.
    pub fn collect(&mut self) -> Result<RolloutBuffer> {
        let tolerance = tolerance_schedule(self.steps, self.hp.total_steps);
        for env in &mut self.envs {
            env.set_tolerance(tolerance);
        }
        collect_rollouts(&self.params, &mut self.envs, &self.hp, self.seed, self.updates, &self.pool)
    }

    /// One rollout followed by one update.
    pub fn step(&mut self) -> Result<TrainMetrics> {
        let tolerance = tolerance_schedule(self.steps, self.hp.total_steps);
        let (learning_rate, clip_eps) = self.hp.schedules(self.steps);
        let mut buffer = self.collect()?;
        let mut stream = RngStream::derive(self.seed, 0, self.updates, StreamPurpose::Minibatch);
        let stats = ppo_update(
            &mut self.params,
            &mut self.adam,
            &mut buffer,
            &self.hp,
            learning_rate,
            clip_eps,
            &mut stream,
        )?;
        self.steps += buffer.len() as u64;

        let n = buffer.episodes.len().max(1) as f64;
        let mean = |f: fn(&super::EpisodeStats) -> f64| buffer.episodes.iter().map(f).sum::<f64>() / n;
        let reference = extract_reference_trajectory(&self.params, &self.mission)?;
        let is_best = self.best.as_ref().is_none_or(|b| reference.total_return > b.eval_return);
        if is_best {
            self.best = Some(BestCheckpoint {
                update: self.updates,
                eval_return: reference.total_return,
                params: self.params.clone(),
            });
        }
        let metrics = TrainMetrics {
            update: self.updates,
            steps: self.steps,
            tolerance,
            learning_rate,
            clip_eps,
            mean_return: mean(|e| e.undiscounted_return),
            mean_discounted_return: mean(|e| e.discounted_return),
            mean_m_f_kg: mean(|e| e.m_f_kg),
            mean_pos_err: mean(|e| e.pos_err),
            mean_vel_err: mean(|e| e.vel_err),
            update_stats: stats,
            eval_return: reference.total_return,
            eval_m_f_kg: reference.report.m_f_kg,
            eval_pos_err: reference.report.pos_err,
            eval_vel_err: reference.report.vel_err,
            is_best,
        };
        self.updates += 1;
        Ok(metrics)
    }

    /// Train until the step budget is spent, handing every update's metrics
    /// to `on_update`.
    pub fn run(&mut self, mut on_update: impl FnMut(&TrainMetrics) -> Result<()>) -> Result<()> {
        while !self.is_finished() {
            let m = self.step()?;
            on_update(&m)?;
        }
        Ok(())
    }
}

/// The reference-trajectory figures reported at the end of training.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceReport {
    #[serde(rename = "J")]
    pub total_return: f64,
    pub m_f_kg: f64,
    pub pos_err: f64,
    pub vel_err: f64,
    pub success: bool,
}

impl ReferenceReport {
    pub fn from_record(rec: &EpisodeRecord) -> Self {
        Self {
            total_return: rec.total_return,
            m_f_kg: rec.report.m_f_kg,
            pos_err: rec.report.pos_err,
            vel_err: rec.report.vel_err,
            success: rec.success(crate::env::FINAL_TOLERANCE),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    pub updates: u64,
    pub steps: u64,
    pub best_update: u64,
    pub best: ReferenceReport,
    #[serde(rename = "final")]
    pub last: ReferenceReport,
}

/// Files of a training run directory.
pub struct RunLayout {
    pub dir: PathBuf,
}

impl RunLayout {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }
    pub fn config(&self) -> PathBuf {
        self.dir.join("config.json")
    }
    pub fn metrics(&self) -> PathBuf {
        self.dir.join("metrics.jsonl")
    }
    pub fn best_checkpoint(&self) -> PathBuf {
        self.dir.join("checkpoints").join("best.json")
    }
    pub fn final_checkpoint(&self) -> PathBuf {
        self.dir.join("checkpoints").join("final.json")
    }
    pub fn report(&self) -> PathBuf {
        self.dir.join("report.json")
    }
    pub fn reference_trace(&self) -> PathBuf {
        self.dir.join("reference_trajectory.csv")
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|e| Error::io(path, e))
}

/// Train and write the whole run directory: config snapshot, metrics log,
/// best and final checkpoints, the reference trajectory of the best policy
/// and the final report.
pub fn train_to_dir(config: &RunConfig, dir: &Path, threads: usize) -> Result<TrainReport> {
    let layout = RunLayout::new(dir);
    fs::create_dir_all(dir.join("checkpoints")).map_err(|e| Error::io(dir, e))?;
    fs::write(layout.config(), config.to_json()).map_err(|e| Error::io(layout.config(), e))?;

    let mut trainer = Trainer::new(config, threads)?;
    let metrics_path = layout.metrics();
    let mut log = create(&metrics_path)?;
    trainer.run(|m| {
        let line = serde_json::to_string(m).map_err(|e| Error::Parse(e.to_string()))?;
        writeln!(log, "{line}").map_err(|e| Error::io(&metrics_path, e))
    })?;
    log.flush().map_err(|e| Error::io(&metrics_path, e))?;

    let last = trainer.params().clone();
    let best = trainer.best().cloned().unwrap_or(BestCheckpoint {
        update: 0,
        eval_return: f64::NEG_INFINITY,
        params: last.clone(),
    });
    save_params(&last, layout.final_checkpoint())?;
    save_params(&best.params, layout.best_checkpoint())?;

    let mission = trainer.mission();
    let best_rec = extract_reference_trajectory(&best.params, mission)?;
    let last_rec = extract_reference_trajectory(&last, mission)?;
    write_trace_csv(create(&layout.reference_trace())?, &best_rec.rows, &mission.scales)?;
    let report = TrainReport {
        updates: trainer.updates(),
        steps: trainer.steps(),
        best_update: best.update,
        best: ReferenceReport::from_record(&best_rec),
        last: ReferenceReport::from_record(&last_rec),
    };
    let mut text = serde_json::to_string_pretty(&report).map_err(|e| Error::Parse(e.to_string()))?;
    text.push('\n');
    fs::write(layout.report(), text).map_err(|e| Error::io(layout.report(), e))?;
    Ok(report)
}
