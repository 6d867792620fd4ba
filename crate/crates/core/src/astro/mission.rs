//! Mission data and the reference scales used to nondimensionalize it.
//!
//! Everything inside the library works in nondimensional units: lengths in
//! units of `r_ref` (the Earth-Sun mean distance), speeds in units of the
//! circular speed at that distance, masses in units of the initial spacecraft
//! mass and times in units of `r_ref / v_ref`. With these choices the Sun's
//! gravitational parameter is exactly 1.

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Earth-Sun mean distance used as the length scale, km.
pub const REFERENCE_LENGTH_KM: f64 = 149.6e6;

/// Seconds per day.
pub const DAY_S: f64 = 86_400.0;

/// Physical mission definition. Units are the ones used at the CLI boundary:
/// km, km/s, kg, N and days.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MissionConfig {
    /// Number of Sims-Flanagan segments.
    pub segments: usize,
    pub transfer_time_days: f64,
    pub max_thrust_n: f64,
    pub exhaust_velocity_km_s: f64,
    pub initial_mass_kg: f64,
    /// Sun gravitational parameter, km^3/s^2.
    pub mu_sun: f64,
    pub r_earth: [f64; 3],
    pub v_earth: [f64; 3],
    pub r_mars: [f64; 3],
    pub v_mars: [f64; 3],
}

impl Default for MissionConfig {
    fn default() -> Self {
        Self {
            segments: 40,
            transfer_time_days: 358.79,
            max_thrust_n: 0.50,
            exhaust_velocity_km_s: 19.6133,
            initial_mass_kg: 1000.0,
            mu_sun: 132_712_440_018.0,
            r_earth: [-140_699_693.0, -51_614_428.0, 980.0],
            v_earth: [9.774596, -28.07828, 4.337725e-4],
            r_mars: [-172_682_023.0, 176_959_469.0, 7_948_912.0],
            v_mars: [-16.427384, -14.860506, 9.21486e-2],
        }
    }
}

impl MissionConfig {
    pub fn validate(&self) -> Result<()> {
        let check = |ok: bool, msg: &str| {
            if ok {
                Ok(())
            } else {
                Err(Error::InvalidConfig(msg.to_string()))
            }
        };
        check(self.segments >= 2, "segments must be at least 2")?;
        check(
            self.transfer_time_days > 0.0 && self.transfer_time_days.is_finite(),
            "transfer_time_days must be positive",
        )?;
        check(self.max_thrust_n > 0.0, "max_thrust_n must be positive")?;
        check(
            self.exhaust_velocity_km_s > 0.0,
            "exhaust_velocity_km_s must be positive",
        )?;
        check(self.initial_mass_kg > 0.0, "initial_mass_kg must be positive")?;
        check(self.mu_sun > 0.0, "mu_sun must be positive")?;
        let all_finite = [self.r_earth, self.v_earth, self.r_mars, self.v_mars]
            .iter()
            .flatten()
            .all(|x| x.is_finite());
        check(all_finite, "boundary-condition vectors must be finite")?;
        Ok(())
    }
}

/// Reference scales. `v_ref = sqrt(mu_sun / r_ref)` and `t_ref = r_ref / v_ref`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaleSet {
    pub r_ref: f64,
    pub v_ref: f64,
    pub m_ref: f64,
    pub t_ref: f64,
}

pub fn make_scales(config: &MissionConfig) -> ScaleSet {
    let r_ref = REFERENCE_LENGTH_KM;
    let v_ref = (config.mu_sun / r_ref).sqrt();
    ScaleSet {
        r_ref,
        v_ref,
        m_ref: config.initial_mass_kg,
        t_ref: r_ref / v_ref,
    }
}

impl ScaleSet {
    pub fn length_to_nd(&self, km: f64) -> f64 {
        km / self.r_ref
    }
    pub fn length_to_km(&self, nd: f64) -> f64 {
        nd * self.r_ref
    }
    pub fn speed_to_nd(&self, km_s: f64) -> f64 {
        km_s / self.v_ref
    }
    pub fn speed_to_km_s(&self, nd: f64) -> f64 {
        nd * self.v_ref
    }
    pub fn mass_to_nd(&self, kg: f64) -> f64 {
        kg / self.m_ref
    }
    pub fn mass_to_kg(&self, nd: f64) -> f64 {
        nd * self.m_ref
    }
    pub fn time_to_nd(&self, seconds: f64) -> f64 {
        seconds / self.t_ref
    }
    pub fn time_to_s(&self, nd: f64) -> f64 {
        nd * self.t_ref
    }
    pub fn time_to_days(&self, nd: f64) -> f64 {
        self.time_to_s(nd) / DAY_S
    }
    pub fn position_to_nd(&self, km: [f64; 3]) -> Vector3<f64> {
        Vector3::from(km) / self.r_ref
    }
    pub fn position_to_km(&self, nd: &Vector3<f64>) -> [f64; 3] {
        (nd * self.r_ref).into()
    }
    pub fn velocity_to_nd(&self, km_s: [f64; 3]) -> Vector3<f64> {
        Vector3::from(km_s) / self.v_ref
    }
    pub fn velocity_to_km_s(&self, nd: &Vector3<f64>) -> [f64; 3] {
        (nd * self.v_ref).into()
    }
}

/// The mission expressed in nondimensional units, plus the derived per-segment
/// quantities the environment needs on every step.
#[derive(Debug, Clone, PartialEq)]
pub struct Mission {
    pub config: MissionConfig,
    pub scales: ScaleSet,
    pub segments: usize,
    pub transfer_time: f64,
    /// Coast duration of one segment, `t_f / N`.
    pub segment_time: f64,
    /// Maximum thrust divided by the reference mass, as a nondimensional acceleration.
    pub max_accel: f64,
    pub exhaust_velocity: f64,
    pub mu: f64,
    pub r_earth: Vector3<f64>,
    pub v_earth: Vector3<f64>,
    pub r_mars: Vector3<f64>,
    pub v_mars: Vector3<f64>,
}

impl Mission {
    pub fn new(config: MissionConfig) -> Result<Self> {
        config.validate()?;
        let scales = make_scales(&config);
        let transfer_time = scales.time_to_nd(config.transfer_time_days * DAY_S);
        // N -> kN, divided by kg, gives km/s^2.
        let accel_km_s2 = config.max_thrust_n * 1e-3 / config.initial_mass_kg;
        let accel_ref = scales.v_ref / scales.t_ref;
        Ok(Self {
            segments: config.segments,
            transfer_time,
            segment_time: transfer_time / config.segments as f64,
            max_accel: accel_km_s2 / accel_ref,
            exhaust_velocity: scales.speed_to_nd(config.exhaust_velocity_km_s),
            mu: 1.0,
            r_earth: scales.position_to_nd(config.r_earth),
            v_earth: scales.velocity_to_nd(config.v_earth),
            r_mars: scales.position_to_nd(config.r_mars),
            v_mars: scales.velocity_to_nd(config.v_mars),
            scales,
            config,
        })
    }

    /// Nondimensional time of node `k`.
    pub fn node_time(&self, k: usize) -> f64 {
        k as f64 * self.segment_time
    }

    /// Per-segment impulse bound: the velocity change accumulated at maximum
    /// thrust over one segment, for the current (nondimensional) mass.
    pub fn max_dv(&self, mass: f64) -> f64 {
        self.max_accel / mass * self.segment_time
    }
}

impl Default for Mission {
    fn default() -> Self {
        Mission::new(MissionConfig::default()).expect("default mission is valid")
    }
}
