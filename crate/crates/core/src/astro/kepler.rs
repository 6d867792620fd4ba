//! Two-body propagation with the universal-variable formulation.
//!
//! One code path covers elliptic, parabolic and hyperbolic arcs. The universal
//! anomaly is found with a Newton iteration kept inside a sign bracket of the
//! (monotone) time-of-flight residual, so a bad Newton step falls back to
//! bisection instead of diverging.

use nalgebra::Vector3;

use crate::error::{Error, Result};

pub const MAX_ITERATIONS: usize = 50;
pub const RESIDUAL_TOLERANCE: f64 = 1e-12;
/// Below this specific angular momentum the orbit is treated as rectilinear.
pub const DEGENERATE_ANGULAR_MOMENTUM: f64 = 1e-12;

/// Lagrange coefficients mapping `(r0, v0)` to the state after `dt`:
/// `r = f r0 + g v0`, `v = fdot r0 + gdot v0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LagrangeCoefficients {
    pub f: f64,
    pub g: f64,
    pub fdot: f64,
    pub gdot: f64,
}

impl LagrangeCoefficients {
    pub const IDENTITY: Self = Self {
        f: 1.0,
        g: 0.0,
        fdot: 0.0,
        gdot: 1.0,
    };

    /// `f gdot - fdot g`, which is 1 for any exact two-body map.
    pub fn determinant(&self) -> f64 {
        self.f * self.gdot - self.fdot * self.g
    }

    pub fn apply(&self, r0: &Vector3<f64>, v0: &Vector3<f64>) -> (Vector3<f64>, Vector3<f64>) {
        (self.f * r0 + self.g * v0, self.fdot * r0 + self.gdot * v0)
    }
}

/// Stumpff functions `(C(z), S(z))`.
pub fn stumpff(z: f64) -> (f64, f64) {
    if z.abs() < 0.1 {
        // Alternating series; the dropped terms are below 1e-20 for |z| < 0.1.
        let mut c = 0.0;
        let mut s = 0.0;
        let mut term_c = 0.5; // 1/2!
        let mut term_s = 1.0 / 6.0; // 1/3!
        for n in 0..9 {
            c += term_c;
            s += term_s;
            let k = 2 * n + 3;
            term_c *= -z / ((k * (k + 1)) as f64);
            term_s *= -z / (((k + 1) * (k + 2)) as f64);
        }
        (c, s)
    } else if z > 0.0 {
        let sz = z.sqrt();
        ((1.0 - sz.cos()) / z, (sz - sz.sin()) / (sz * z))
    } else {
        let sz = (-z).sqrt();
        ((sz.cosh() - 1.0) / -z, (sz.sinh() - sz) / (sz * -z))
    }
}

struct UniversalGeometry {
    r0: f64,
    /// `r0 . v0 / sqrt(mu)`
    sigma0: f64,
    /// Reciprocal semi-major axis.
    alpha: f64,
    sqrt_mu: f64,
}

impl UniversalGeometry {
    /// Time-of-flight residual `F(chi)` and its derivative, which equals the
    /// radius reached at `chi` and is therefore positive.
    fn residual(&self, chi: f64, dt: f64) -> (f64, f64) {
        let chi2 = chi * chi;
        let z = self.alpha * chi2;
        let (c, s) = stumpff(z);
        let one_minus = 1.0 - self.alpha * self.r0;
        let f = self.sigma0 * chi2 * c + one_minus * chi2 * chi * s + self.r0 * chi
            - self.sqrt_mu * dt;
        let df = self.sigma0 * chi * (1.0 - z * s) + one_minus * chi2 * c + self.r0;
        (f, df)
    }
}

/// Logarithmic starter for strongly hyperbolic arcs, where `dt / r0` lands
/// far out on the exponential branch of the residual.
fn hyperbolic_guess(geo: &UniversalGeometry, dt: f64) -> Option<f64> {
    if geo.alpha >= 0.0 {
        return None;
    }
    let a = 1.0 / geo.alpha;
    let sign = dt.signum();
    let mu = geo.sqrt_mu * geo.sqrt_mu;
    let denom = geo.sigma0 * geo.sqrt_mu + sign * (-mu * a).sqrt() * (1.0 - geo.r0 * geo.alpha);
    let arg = -2.0 * mu * geo.alpha * dt / denom;
    let chi = sign * (-a).sqrt() * arg.ln();
    (arg > 0.0 && chi.is_finite() && chi * dt > 0.0).then_some(chi)
}

fn solve_universal_anomaly(geo: &UniversalGeometry, dt: f64) -> Result<f64> {
    let target = geo.sqrt_mu * dt;
    let tol = RESIDUAL_TOLERANCE * (1.0 + target.abs());

    // F(0) = -sqrt(mu) dt and F is increasing, so the root has the sign of dt.
    let mut guess = if geo.alpha > 0.0 {
        geo.sqrt_mu * dt * geo.alpha
    } else {
        hyperbolic_guess(geo, dt).unwrap_or(target / geo.r0)
    };
    if guess == 0.0 {
        guess = target / geo.r0;
    }
    let (mut lo, mut hi) = if dt > 0.0 { (0.0, guess) } else { (guess, 0.0) };
    // Expand the open end of the bracket until it straddles the root.
    let mut expansions = 0;
    loop {
        let (f_lo, _) = geo.residual(lo, dt);
        let (f_hi, _) = geo.residual(hi, dt);
        if f_lo <= 0.0 && f_hi >= 0.0 {
            break;
        }
        expansions += 1;
        if expansions > 200 || !f_lo.is_finite() || !f_hi.is_finite() {
            return Err(Error::NonConvergence {
                iterations: 0,
                residual: f_hi.abs().max(f_lo.abs()),
            });
        }
        if f_hi < 0.0 {
            lo = hi;
            hi = if hi == 0.0 { 1.0 } else { hi * 2.0 };
        } else {
            hi = lo;
            lo = if lo == 0.0 { -1.0 } else { lo * 2.0 };
        }
    }

    let mut chi = guess.clamp(lo, hi);
    let mut last_residual = f64::INFINITY;
    for _ in 0..MAX_ITERATIONS {
        let (f, df) = geo.residual(chi, dt);
        last_residual = f.abs();
        if last_residual <= tol {
            return Ok(chi);
        }
        if f < 0.0 {
            lo = chi;
        } else {
            hi = chi;
        }
        let newton = chi - f / df;
        let next = if newton > lo && newton < hi && newton.is_finite() {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if (next - chi).abs() <= 4.0 * f64::EPSILON * chi.abs().max(1.0) {
            // Stagnated at floating-point resolution.
            return Ok(next);
        }
        chi = next;
    }
    Err(Error::NonConvergence {
        iterations: MAX_ITERATIONS,
        residual: last_residual,
    })
}

pub fn lagrange_coefficients(
    r0: &Vector3<f64>,
    v0: &Vector3<f64>,
    dt: f64,
    mu: f64,
) -> Result<LagrangeCoefficients> {
    let h = r0.cross(v0).norm();
    if !(h >= DEGENERATE_ANGULAR_MOMENTUM) {
        return Err(Error::DegenerateOrbit(h));
    }
    if !dt.is_finite() {
        return Err(Error::Domain(format!("non-finite propagation time {dt}")));
    }
    if dt == 0.0 {
        return Ok(LagrangeCoefficients::IDENTITY);
    }

    let r0n = r0.norm();
    let sqrt_mu = mu.sqrt();
    let geo = UniversalGeometry {
        r0: r0n,
        sigma0: r0.dot(v0) / sqrt_mu,
        alpha: 2.0 / r0n - v0.norm_squared() / mu,
        sqrt_mu,
    };
    let chi = solve_universal_anomaly(&geo, dt)?;

    let chi2 = chi * chi;
    let z = geo.alpha * chi2;
    let (c, s) = stumpff(z);
    let f = 1.0 - chi2 / r0n * c;
    let g = dt - chi2 * chi * s / sqrt_mu;
    let r1n = (f * r0 + g * v0).norm();
    let fdot = sqrt_mu / (r1n * r0n) * (z * s - 1.0) * chi;
    let gdot = 1.0 - chi2 / r1n * c;
    Ok(LagrangeCoefficients { f, g, fdot, gdot })
}

/// Ballistic two-body propagation of `(r, v)` by `dt`.
pub fn kepler_propagate(
    r: &Vector3<f64>,
    v: &Vector3<f64>,
    dt: f64,
    mu: f64,
) -> Result<(Vector3<f64>, Vector3<f64>)> {
    if dt == 0.0 {
        // Still reject degenerate input.
        lagrange_coefficients(r, v, dt, mu)?;
        return Ok((*r, *v));
    }
    Ok(lagrange_coefficients(r, v, dt, mu)?.apply(r, v))
}

/// Tsiolkovsky mass after an impulsive burn of magnitude `dv`.
pub fn tsiolkovsky_mass(mass: f64, dv: f64, exhaust_velocity: f64) -> f64 {
    if dv == 0.0 {
        return mass;
    }
    mass * (-dv / exhaust_velocity).exp()
}

pub fn specific_energy(r: &Vector3<f64>, v: &Vector3<f64>, mu: f64) -> f64 {
    0.5 * v.norm_squared() - mu / r.norm()
}

pub fn angular_momentum(r: &Vector3<f64>, v: &Vector3<f64>) -> Vector3<f64> {
    r.cross(v)
}

/// Orbital period for an elliptic state, `None` otherwise.
pub fn orbital_period(r: &Vector3<f64>, v: &Vector3<f64>, mu: f64) -> Option<f64> {
    let alpha = 2.0 / r.norm() - v.norm_squared() / mu;
    (alpha > 0.0).then(|| 2.0 * std::f64::consts::PI / (alpha.powi(3) * mu).sqrt())
}
