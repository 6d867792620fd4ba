//! Two-body astrodynamics in nondimensional units.

mod kepler;
mod mission;

pub use kepler::{
    angular_momentum, kepler_propagate, lagrange_coefficients, orbital_period, specific_energy,
    stumpff, tsiolkovsky_mass, LagrangeCoefficients, DEGENERATE_ANGULAR_MOMENTUM, MAX_ITERATIONS,
    RESIDUAL_TOLERANCE,
};
pub use mission::{make_scales, Mission, MissionConfig, ScaleSet, DAY_S, REFERENCE_LENGTH_KM};
