//! The time-discrete Earth-Mars rendezvous environment.
//!
//! An episode starts at Earth with zero hyperbolic excess and consists of `N`
//! agent decisions. At node `k` the agent commands an impulse, the control
//! model turns it into the realized impulse `u_k`, the spacecraft coasts for
//! one segment on a Keplerian arc and its mass drops according to the rocket
//! equation. After the last coast an algebraic terminal maneuver matches
//! Mars' velocity as far as the segment bound allows.
//!
//! The environment emits undiscounted rewards; discounting lives in the
//! learner.

mod reward;
mod trace;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::astro::{kepler_propagate, tsiolkovsky_mass, Mission};
use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::uncertainty::{MteSchedule, Perturbations};

pub use reward::{
    dv_violation, reward, terminal_violation, tolerance_schedule, RewardTerms, FINAL_TOLERANCE,
    INITIAL_TOLERANCE, LAMBDA_DV, LAMBDA_TERMINAL,
};
pub use trace::{read_dv_schedule, write_dv_schedule, write_trace_csv, TraceRow, SCHEDULE_HEADER, TRACE_HEADER};

pub const OBS_DIM: usize = 8;
pub const ACTION_DIM: usize = 3;

/// Spacecraft state at node `k`, nondimensional.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpacecraftState {
    pub r: Vector3<f64>,
    pub v: Vector3<f64>,
    pub m: f64,
    pub k: usize,
}

/// What the agent sees: position, velocity, mass and time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub r: Vector3<f64>,
    pub v: Vector3<f64>,
    pub m: f64,
    pub t: f64,
}

impl Observation {
    pub fn from_state(state: &SpacecraftState, t: f64) -> Self {
        Self {
            r: state.r,
            v: state.v,
            m: state.m,
            t,
        }
    }

    pub fn to_array(&self) -> [f64; OBS_DIM] {
        [
            self.r.x, self.r.y, self.r.z, self.v.x, self.v.y, self.v.z, self.m, self.t,
        ]
    }
}

/// Commanded impulse `a_k`, nondimensional.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ImpulseCommand {
    pub dv: Vector3<f64>,
}

impl ImpulseCommand {
    pub fn zero() -> Self {
        Self {
            dv: Vector3::zeros(),
        }
    }

    pub fn new(dv: Vector3<f64>) -> Self {
        Self { dv }
    }
}

/// Maps an unbounded policy output onto the cube `[-dv_max, dv_max]^3`.
/// The norm may still exceed `dv_max` near the cube corners; that excess is
/// what the bound penalty in the reward acts on.
pub fn map_action(raw: &[f64; ACTION_DIM], max_dv: f64) -> ImpulseCommand {
    ImpulseCommand::new(Vector3::from_fn(|i, _| max_dv * raw[i].tanh()))
}

/// Terminal constraint errors and propellant summary of one episode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstraintReport {
    /// `|r_f - r_mars| / |r_mars|`
    pub pos_err: f64,
    /// `|v_f - v_mars| / |v_mars|`
    pub vel_err: f64,
    pub m_f_kg: f64,
    /// Bound violation of every agent impulse, nondimensional.
    pub dv_violations: Vec<f64>,
}

impl ConstraintReport {
    pub fn max_error(&self) -> f64 {
        self.pos_err.max(self.vel_err)
    }

    pub fn satisfied(&self, tolerance: f64) -> bool {
        self.max_error() <= tolerance
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TerminalOutcome {
    /// Pre-maneuver state `s_N`.
    pub arrival: SpacecraftState,
    pub dv: Vector3<f64>,
    pub max_dv: f64,
    /// State after the terminal maneuver.
    pub final_state: SpacecraftState,
    pub pos_err: f64,
    pub vel_err: f64,
}

/// Evaluation-only details of a step. The agent never sees these.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepInfo {
    pub terms: RewardTerms,
    pub commanded: Vector3<f64>,
    pub realized: Vector3<f64>,
    /// Impulse bound of the segment the step started on.
    pub max_dv: f64,
    pub mte_blocked: bool,
    /// True state before the impulse.
    pub prev_state: SpacecraftState,
    /// True state after the step (before the terminal maneuver on the last step).
    pub state: SpacecraftState,
    pub terminal: Option<TerminalOutcome>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepResult {
    pub obs: Observation,
    pub reward: f64,
    pub done: bool,
    pub info: StepInfo,
}

/// Algebraic final impulse toward Mars' velocity, limited by the segment bound.
///
/// When the bound is not active the final velocity is set to Mars' velocity
/// exactly, so the velocity error is identically zero.
pub fn terminal_maneuver(mission: &Mission, state: &SpacecraftState) -> (Vector3<f64>, SpacecraftState) {
    let mismatch = mission.v_mars - state.v;
    let gap = mismatch.norm();
    let max_dv = mission.max_dv(state.m);
    let (dv, v_f) = if gap == 0.0 {
        (Vector3::zeros(), state.v)
    } else if gap <= max_dv {
        (mismatch, mission.v_mars)
    } else {
        let dv = mismatch * (max_dv / gap);
        (dv, state.v + dv)
    };
    let final_state = SpacecraftState {
        r: state.r,
        v: v_f,
        m: tsiolkovsky_mass(state.m, dv.norm(), mission.exhaust_velocity),
        k: state.k,
    };
    (dv, final_state)
}

pub fn position_error(mission: &Mission, r: &Vector3<f64>) -> f64 {
    (r - mission.r_mars).norm() / mission.r_mars.norm()
}

pub fn velocity_error(mission: &Mission, v: &Vector3<f64>) -> f64 {
    (v - mission.v_mars).norm() / mission.v_mars.norm()
}

#[derive(Debug, Clone)]
pub struct TransferEnv {
    mission: Mission,
    perturbations: Perturbations,
    tolerance: f64,
    forced_mte: Option<MteSchedule>,
    state: SpacecraftState,
    stream: Option<RngStream>,
    mte: MteSchedule,
    dv_violations: Vec<f64>,
    terminal: Option<TerminalOutcome>,
    done: bool,
}

impl TransferEnv {
    pub fn new(mission: Mission, perturbations: Perturbations) -> Self {
        let state = Self::departure(&mission);
        let segments = mission.segments;
        Self {
            mission,
            perturbations,
            tolerance: FINAL_TOLERANCE,
            forced_mte: None,
            state,
            stream: None,
            mte: MteSchedule::empty(segments),
            dv_violations: Vec::with_capacity(segments),
            terminal: None,
            done: true,
        }
    }

    /// Unperturbed environment.
    pub fn deterministic(mission: Mission) -> Self {
        Self::new(mission, Perturbations::none())
    }

    fn departure(mission: &Mission) -> SpacecraftState {
        SpacecraftState {
            r: mission.r_earth,
            v: mission.v_earth,
            m: 1.0,
            k: 0,
        }
    }

    pub fn mission(&self) -> &Mission {
        &self.mission
    }

    pub fn perturbations(&self) -> &Perturbations {
        &self.perturbations
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn set_tolerance(&mut self, tolerance: f64) {
        self.tolerance = tolerance;
    }

    /// Replace the random MTE draw by a fixed schedule on every reset.
    pub fn force_mte_schedule(&mut self, schedule: Option<MteSchedule>) {
        self.forced_mte = schedule;
    }

    pub fn state(&self) -> &SpacecraftState {
        &self.state
    }

    pub fn mte_schedule(&self) -> &MteSchedule {
        &self.mte
    }

    pub fn is_done(&self) -> bool {
        self.done
    }

    pub fn terminal(&self) -> Option<&TerminalOutcome> {
        self.terminal.as_ref()
    }

    /// Constraint report of the finished episode.
    pub fn report(&self) -> Option<ConstraintReport> {
        self.terminal.map(|t| ConstraintReport {
            pos_err: t.pos_err,
            vel_err: t.vel_err,
            m_f_kg: self.mission.scales.mass_to_kg(t.final_state.m),
            dv_violations: self.dv_violations.clone(),
        })
    }

    pub fn max_dv(&self) -> f64 {
        self.mission.max_dv(self.state.m)
    }

    pub fn reset(&mut self, stream: RngStream) -> Observation {
        self.state = Self::departure(&self.mission);
        self.stream = Some(stream);
        self.dv_violations.clear();
        self.terminal = None;
        self.done = false;
        self.mte = match (&self.forced_mte, self.perturbations.mode.missed_thrust()) {
            (Some(forced), _) => forced.clone(),
            (None, true) => {
                let stream = self.stream.as_mut().expect("stream set above");
                self.perturbations.mte_schedule(stream, self.mission.segments)
            }
            (None, false) => MteSchedule::empty(self.mission.segments),
        };
        self.observe()
    }

    fn observe(&mut self) -> Observation {
        let t = self.mission.node_time(self.state.k);
        let mut obs = Observation::from_state(&self.state, t);
        if self.perturbations.mode.observation_noise() {
            let stream = self.stream.as_mut().expect("reset before observe");
            let (dr, dv) = self.perturbations.sample_obs_noise(stream);
            obs.r += dr;
            obs.v += dv;
        }
        obs
    }

    /// Step with a raw (unbounded) policy output, squashed onto the action cube.
    pub fn step_raw(&mut self, raw: &[f64; ACTION_DIM]) -> Result<StepResult> {
        let cmd = map_action(raw, self.max_dv());
        self.step(&cmd)
    }

    pub fn step(&mut self, action: &ImpulseCommand) -> Result<StepResult> {
        if self.done {
            return Err(Error::EpisodeFinished);
        }
        let prev = self.state;
        let k = prev.k;
        let max_dv = self.mission.max_dv(prev.m);
        let stream = self.stream.as_mut().expect("reset before step");

        let mut realized = if self.perturbations.mode.control_noise() {
            self.perturbations.control_execution(&action.dv, stream)
        } else {
            action.dv
        };
        let mte_blocked = self.mte.is_blocked(k);
        if mte_blocked {
            realized = Vector3::zeros();
        }

        let burn = realized.norm();
        let (mut r, mut v) = kepler_propagate(
            &prev.r,
            &(prev.v + realized),
            self.mission.segment_time,
            self.mission.mu,
        )?;
        if self.perturbations.mode.state_noise() {
            let (dr, dv) = self.perturbations.sample_state_noise(stream);
            r += dr;
            v += dv;
        }
        let m = tsiolkovsky_mass(prev.m, burn, self.mission.exhaust_velocity);
        self.state = SpacecraftState { r, v, m, k: k + 1 };

        let dv_violation = reward::dv_violation(burn, max_dv);
        self.dv_violations.push(dv_violation);

        let (terms, terminal) = if self.state.k == self.mission.segments {
            let (dv_final, final_state) = terminal_maneuver(&self.mission, &self.state);
            let pos_err = position_error(&self.mission, &final_state.r);
            let vel_err = velocity_error(&self.mission, &final_state.v);
            let outcome = TerminalOutcome {
                arrival: self.state,
                dv: dv_final,
                max_dv: self.mission.max_dv(self.state.m),
                final_state,
                pos_err,
                vel_err,
            };
            let terms = RewardTerms {
                mass_cost: prev.m - final_state.m,
                dv_violation,
                terminal_violation: reward::terminal_violation(pos_err, vel_err, self.tolerance),
            };
            (terms, Some(outcome))
        } else {
            let terms = RewardTerms {
                mass_cost: prev.m - m,
                dv_violation,
                terminal_violation: 0.0,
            };
            (terms, None)
        };

        let obs = match &terminal {
            Some(t) => {
                self.done = true;
                self.terminal = Some(*t);
                Observation::from_state(&t.final_state, self.mission.transfer_time)
            }
            None => self.observe(),
        };

        Ok(StepResult {
            obs,
            reward: terms.reward(),
            done: self.done,
            info: StepInfo {
                terms,
                commanded: action.dv,
                realized,
                max_dv,
                mte_blocked,
                prev_state: prev,
                state: self.state,
                terminal,
            },
        })
    }
}
