//! Stochastic perturbation models: additive state noise, observation noise,
//! control execution errors and missed thrust events (MTEs).
//!
//! The samplers are stateless; every draw comes from a caller-owned
//! [`RngStream`]. Standard deviations are configured in physical units and
//! converted once into nondimensional units by [`Perturbations::new`].

use std::fmt;
use std::str::FromStr;

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::astro::ScaleSet;
use crate::error::{Error, Result};
use crate::rng::RngStream;

/// Which uncertainty source is active. Named after the trained policies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Unperturbed (deterministic) environment.
    #[default]
    Unp,
    /// Additive Gaussian noise on position and velocity after each coast.
    St,
    /// Additive Gaussian noise on the observed position and velocity.
    Obs,
    /// Random rotation and magnitude error of the executed impulse.
    Ctr,
    /// A single one-step missed thrust event.
    Mte1,
    /// A missed thrust event that may persist up to `n_mte` steps.
    Mte2,
}

impl Mode {
    pub const ALL: [Mode; 6] = [Mode::Unp, Mode::St, Mode::Obs, Mode::Ctr, Mode::Mte1, Mode::Mte2];

    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Unp => "unp",
            Mode::St => "st",
            Mode::Obs => "obs",
            Mode::Ctr => "ctr",
            Mode::Mte1 => "mte1",
            Mode::Mte2 => "mte2",
        }
    }

    pub fn state_noise(self) -> bool {
        self == Mode::St
    }
    pub fn observation_noise(self) -> bool {
        self == Mode::Obs
    }
    pub fn control_noise(self) -> bool {
        self == Mode::Ctr
    }
    pub fn missed_thrust(self) -> bool {
        matches!(self, Mode::Mte1 | Mode::Mte2)
    }
    pub fn is_stochastic(self) -> bool {
        self != Mode::Unp
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Mode::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| {
                Error::InvalidConfig(format!(
                    "unknown mode '{s}' (expected one of unp, st, obs, ctr, mte1, mte2)"
                ))
            })
    }
}

/// Uncertainty parameters in physical units (km, km/s, degrees).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct UncertaintyConfig {
    pub sigma_r: f64,
    pub sigma_v: f64,
    pub sigma_phi: f64,
    pub sigma_theta: f64,
    pub sigma_psi: f64,
    pub sigma_u: f64,
    pub p_mte: f64,
    pub n_mte: usize,
    pub mode: Mode,
    /// Guarantee at least one MTE per episode in the MTE modes.
    pub force_one_mte: bool,
    /// Allow new, independent MTEs to start after recovery. Off by default:
    /// a recovered thrust never fails again.
    pub mte_recurrence: bool,
}

impl Default for UncertaintyConfig {
    fn default() -> Self {
        Self {
            sigma_r: 1.0,
            sigma_v: 0.05,
            sigma_phi: 1.0,
            sigma_theta: 1.0,
            sigma_psi: 1.0,
            sigma_u: 0.05,
            p_mte: 0.1,
            n_mte: 3,
            mode: Mode::Unp,
            force_one_mte: true,
            mte_recurrence: false,
        }
    }
}

impl UncertaintyConfig {
    pub fn with_mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let sigmas = [
            self.sigma_r,
            self.sigma_v,
            self.sigma_phi,
            self.sigma_theta,
            self.sigma_psi,
            self.sigma_u,
        ];
        if sigmas.iter().any(|s| !(s.is_finite() && *s >= 0.0)) {
            return Err(Error::InvalidConfig(
                "standard deviations must be finite and non-negative".into(),
            ));
        }
        if !(0.0..1.0).contains(&self.p_mte) {
            return Err(Error::InvalidConfig("p_mte must lie in [0, 1)".into()));
        }
        if self.n_mte < 1 {
            return Err(Error::InvalidConfig("n_mte must be at least 1".into()));
        }
        Ok(())
    }
}

/// Uncertainty parameters in nondimensional units, ready for sampling.
#[derive(Debug, Clone, PartialEq)]
pub struct Perturbations {
    pub mode: Mode,
    pub sigma_r: f64,
    pub sigma_v: f64,
    /// Euler-angle standard deviations, radians.
    pub sigma_angles: [f64; 3],
    pub sigma_u: f64,
    pub p_mte: f64,
    /// Longest admissible MTE for the active mode.
    pub mte_cap: usize,
    pub force_one_mte: bool,
    pub mte_recurrence: bool,
}

impl Perturbations {
    pub fn new(config: &UncertaintyConfig, scales: &ScaleSet) -> Result<Self> {
        config.validate()?;
        Ok(Self {
            mode: config.mode,
            sigma_r: scales.length_to_nd(config.sigma_r),
            sigma_v: scales.speed_to_nd(config.sigma_v),
            sigma_angles: [
                config.sigma_phi.to_radians(),
                config.sigma_theta.to_radians(),
                config.sigma_psi.to_radians(),
            ],
            sigma_u: config.sigma_u,
            p_mte: config.p_mte,
            mte_cap: if config.mode == Mode::Mte1 { 1 } else { config.n_mte },
            force_one_mte: config.force_one_mte,
            mte_recurrence: config.mte_recurrence,
        })
    }

    /// Perturbations with every source switched off.
    pub fn none() -> Self {
        Self {
            mode: Mode::Unp,
            sigma_r: 0.0,
            sigma_v: 0.0,
            sigma_angles: [0.0; 3],
            sigma_u: 0.0,
            p_mte: 0.0,
            mte_cap: 1,
            force_one_mte: true,
            mte_recurrence: false,
        }
    }

    /// Position and velocity noise, `N(0, diag(sigma_r^2 I3, sigma_v^2 I3))`.
    /// Mass is never perturbed, so only six components are returned.
    pub fn sample_state_noise(&self, stream: &mut RngStream) -> (Vector3<f64>, Vector3<f64>) {
        let dr = Vector3::from_fn(|_, _| stream.normal(self.sigma_r));
        let dv = Vector3::from_fn(|_, _| stream.normal(self.sigma_v));
        (dr, dv)
    }

    /// Orbit-determination error; same covariance as the state noise.
    pub fn sample_obs_noise(&self, stream: &mut RngStream) -> (Vector3<f64>, Vector3<f64>) {
        self.sample_state_noise(stream)
    }

    /// Executed impulse `(1 + du) A a` for commanded impulse `a`.
    pub fn control_execution(&self, commanded: &Vector3<f64>, stream: &mut RngStream) -> Vector3<f64> {
        let [s_phi, s_theta, s_psi] = self.sigma_angles;
        let d_phi = stream.normal(s_phi);
        let d_theta = stream.normal(s_theta);
        let d_psi = stream.normal(s_psi);
        let d_u = stream.normal(self.sigma_u);
        if commanded.iter().all(|c| *c == 0.0) {
            return Vector3::zeros();
        }
        (1.0 + d_u) * (small_angle_rotation(d_phi, d_theta, d_psi) * commanded)
    }

    pub fn mte_schedule(&self, stream: &mut RngStream, segments: usize) -> MteSchedule {
        mte_schedule(
            stream,
            segments,
            self.p_mte,
            self.mte_cap,
            self.force_one_mte,
            self.mte_recurrence,
        )
    }
}

/// First-order rotation matrix for small Euler angles (radians).
pub fn small_angle_rotation(d_phi: f64, d_theta: f64, d_psi: f64) -> Matrix3<f64> {
    Matrix3::new(
        1.0, -d_psi, d_theta, //
        d_psi, 1.0, -d_phi, //
        -d_theta, d_phi, 1.0,
    )
}

/// One missed thrust event: `duration` consecutive blocked steps from `start`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MteEvent {
    pub start: usize,
    pub duration: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct MteSchedule {
    pub events: Vec<MteEvent>,
    blocked: Vec<bool>,
}

impl MteSchedule {
    pub fn empty(segments: usize) -> Self {
        Self {
            events: Vec::new(),
            blocked: vec![false; segments],
        }
    }

    /// A single one-step MTE at `k_hat`.
    pub fn single(segments: usize, k_hat: usize) -> Result<Self> {
        if k_hat >= segments {
            return Err(Error::Domain(format!(
                "MTE location {k_hat} outside [0, {segments})"
            )));
        }
        let mut s = Self::empty(segments);
        s.push(MteEvent {
            start: k_hat,
            duration: 1,
        });
        Ok(s)
    }

    fn push(&mut self, event: MteEvent) {
        let end = (event.start + event.duration).min(self.blocked.len());
        for b in &mut self.blocked[event.start..end] {
            *b = true;
        }
        self.events.push(event);
    }

    pub fn is_blocked(&self, k: usize) -> bool {
        self.blocked.get(k).copied().unwrap_or(false)
    }

    pub fn blocked_steps(&self) -> Vec<usize> {
        (0..self.blocked.len()).filter(|&k| self.blocked[k]).collect()
    }

    /// Compact text form, e.g. `"12;13"`, used in campaign CSVs.
    pub fn describe(&self) -> String {
        self.blocked_steps()
            .iter()
            .map(|k| k.to_string())
            .collect::<Vec<_>>()
            .join(";")
    }
}

/// Persistence draw: the event lasts one step, then extends by one step with
/// probability `p_mte` each time, never beyond `cap` steps.
fn draw_duration(stream: &mut RngStream, p_mte: f64, cap: usize) -> usize {
    let mut duration = 1;
    while duration < cap && stream.uniform() < p_mte {
        duration += 1;
    }
    duration
}

/// Draw the blocked steps of one episode.
///
/// Without recurrence a single event starts at a uniform `k_hat` in
/// `[0, segments)`; once thrust is recovered it never fails again. With
/// recurrence each unblocked step may start a fresh event with probability
/// `p_mte`, and `force_one` inserts a uniform event if none occurred.
pub fn mte_schedule(
    stream: &mut RngStream,
    segments: usize,
    p_mte: f64,
    cap: usize,
    force_one: bool,
    recurrence: bool,
) -> MteSchedule {
    let mut schedule = MteSchedule::empty(segments);
    if segments == 0 {
        return schedule;
    }
    if !recurrence {
        let start = stream.index(segments);
        let duration = draw_duration(stream, p_mte, cap);
        schedule.push(MteEvent { start, duration });
        return schedule;
    }
    let mut k = 0;
    while k < segments {
        if stream.uniform() < p_mte {
            let duration = draw_duration(stream, p_mte, cap);
            schedule.push(MteEvent { start: k, duration });
            // Recovery takes at least one step.
            k += duration + 1;
        } else {
            k += 1;
        }
    }
    if force_one && schedule.events.is_empty() {
        let start = stream.index(segments);
        let duration = draw_duration(stream, p_mte, cap);
        schedule.push(MteEvent { start, duration });
    }
    schedule
}
