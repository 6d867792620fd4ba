//! Reward shaping: propellant cost plus penalties for exceeding the segment
//! impulse bound and for missing the terminal rendezvous constraints.

/// Penalty weight on the per-segment impulse bound violation.
pub const LAMBDA_DV: f64 = 100.0;
/// Penalty weight on the terminal constraint violation.
pub const LAMBDA_TERMINAL: f64 = 50.0;

/// Terminal constraint tolerance used for evaluation and late training.
pub const FINAL_TOLERANCE: f64 = 1e-3;
/// Looser tolerance used during the first half of training.
pub const INITIAL_TOLERANCE: f64 = 1e-2;

/// The three ingredients of one reward, all nondimensional.
#[derive(Debug, Clone, Copy, PartialEq, Default, serde::Serialize, serde::Deserialize)]
pub struct RewardTerms {
    /// Propellant consumed over the step.
    pub mass_cost: f64,
    /// `max(0, |u| - dv_max)` of the impulse that opened the step.
    pub dv_violation: f64,
    /// `max(0, max(pos_err, vel_err) - tolerance)` on the final step, else 0.
    pub terminal_violation: f64,
}

impl RewardTerms {
    pub fn reward(&self) -> f64 {
        reward(self.mass_cost, self.dv_violation, self.terminal_violation)
    }
}

pub fn reward(mass_cost: f64, dv_violation: f64, terminal_violation: f64) -> f64 {
    -mass_cost - LAMBDA_DV * dv_violation - LAMBDA_TERMINAL * terminal_violation
}

pub fn dv_violation(realized_dv: f64, max_dv: f64) -> f64 {
    (realized_dv - max_dv).max(0.0)
}

pub fn terminal_violation(pos_err: f64, vel_err: f64, tolerance: f64) -> f64 {
    (pos_err.max(vel_err) - tolerance).max(0.0)
}

/// Constraint tolerance at training step `t` of `total`: loose for the first
/// half, tight from `total / 2` on.
pub fn tolerance_schedule(t: u64, total: u64) -> f64 {
    if 2 * t < total {
        INITIAL_TOLERANCE
    } else {
        FINAL_TOLERANCE
    }
}
