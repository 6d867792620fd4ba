//! Independent reference implementations shared by the integration tests.
//! Nothing here calls into the propagation or learning code under test.

#![allow(dead_code)]

use nalgebra::Vector3;

pub type V3 = Vector3<f64>;

fn two_body_rhs(x: &[f64; 6], mu: f64) -> [f64; 6] {
    let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
    let k = -mu / (r * r * r);
    [x[3], x[4], x[5], k * x[0], k * x[1], k * x[2]]
}

fn axpy(a: &[f64; 6], s: f64, b: &[f64; 6]) -> [f64; 6] {
    std::array::from_fn(|i| a[i] + s * b[i])
}

/// Gragg's modified midpoint rule with `n` substeps over `h`.
fn modified_midpoint(x0: &[f64; 6], h: f64, n: usize, mu: f64) -> [f64; 6] {
    let sub = h / n as f64;
    let mut z0 = *x0;
    let mut z1 = axpy(x0, sub, &two_body_rhs(x0, mu));
    for _ in 1..n {
        let z2 = axpy(&z0, 2.0 * sub, &two_body_rhs(&z1, mu));
        z0 = z1;
        z1 = z2;
    }
    let end = two_body_rhs(&z1, mu);
    std::array::from_fn(|i| 0.5 * (z0[i] + z1[i] + sub * end[i]))
}

/// One extrapolated Bulirsch-Stoer step; returns the estimate and an error norm.
fn bs_step(x0: &[f64; 6], h: f64, mu: f64) -> ([f64; 6], f64) {
    const COLUMNS: usize = 9;
    let seq: [usize; COLUMNS] = std::array::from_fn(|j| 2 * (j + 1));
    let mut table: Vec<[f64; 6]> = Vec::with_capacity(COLUMNS);
    let mut err = f64::INFINITY;
    for j in 0..COLUMNS {
        let mut row = vec![modified_midpoint(x0, h, seq[j], mu)];
        for k in 1..=j {
            let ratio = (seq[j] as f64 / seq[j - k] as f64).powi(2);
            let prev = &table[k - 1];
            let cur = row[k - 1];
            row.push(std::array::from_fn(|i| cur[i] + (cur[i] - prev[i]) / (ratio - 1.0)));
        }
        if j > 0 {
            let a = row[j];
            let b = row[j - 1];
            let scale = a.iter().map(|v| v.abs()).fold(0.0, f64::max).max(1.0);
            err = a.iter().zip(&b).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max) / scale;
        }
        table = row;
    }
    (table[COLUMNS - 1], err)
}

/// Adaptive Bulirsch-Stoer integration of the two-body problem over `dt`
/// (either sign) with relative local tolerance `tol`.
pub fn integrate_two_body(r: &V3, v: &V3, dt: f64, mu: f64, tol: f64) -> (V3, V3) {
    let mut x = [r.x, r.y, r.z, v.x, v.y, v.z];
    let (sign, span) = (dt.signum(), dt.abs());
    let mut t = 0.0;
    let mut h = span / 8.0;
    while t < span {
        if t + h > span {
            h = span - t;
        }
        let (next, err) = bs_step(&x, sign * h, mu);
        if err <= tol {
            x = next;
            t += h;
            let grow = if err == 0.0 { 2.0 } else { (0.9 * (tol / err).powf(1.0 / 17.0)).clamp(0.5, 2.0) };
            h *= grow;
        } else {
            h *= 0.5;
        }
    }
    (V3::new(x[0], x[1], x[2]), V3::new(x[3], x[4], x[5]))
}

pub fn energy(r: &V3, v: &V3, mu: f64) -> f64 {
    0.5 * v.norm_squared() - mu / r.norm()
}

/// Stumpff functions from their closed forms only.
fn stumpff_closed(z: f64) -> (f64, f64) {
    if z > 1e-8 {
        let s = z.sqrt();
        ((1.0 - s.cos()) / z, (s - s.sin()) / (s * s * s))
    } else if z < -1e-8 {
        let s = (-z).sqrt();
        ((s.cosh() - 1.0) / -z, (s.sinh() - s) / (s * s * s))
    } else {
        (0.5, 1.0 / 6.0)
    }
}

/// Lambert's problem by bisection on the universal variable, single
/// revolution, prograde (angular momentum along +z). Returns the departure
/// and arrival velocities.
pub fn lambert(r1: &V3, r2: &V3, tof: f64, mu: f64) -> (V3, V3) {
    let (n1, n2) = (r1.norm(), r2.norm());
    let mut dtheta = (r1.dot(r2) / (n1 * n2)).clamp(-1.0, 1.0).acos();
    if r1.cross(r2).z < 0.0 {
        dtheta = 2.0 * std::f64::consts::PI - dtheta;
    }
    let a = dtheta.sin() * (n1 * n2 / (1.0 - dtheta.cos())).sqrt();
    let y = |z: f64| {
        let (c, s) = stumpff_closed(z);
        n1 + n2 + a * (z * s - 1.0) / c.sqrt()
    };
    let time = |z: f64| {
        let (c, s) = stumpff_closed(z);
        let yz = y(z);
        ((yz / c).powf(1.5) * s + a * yz.sqrt()) / mu.sqrt()
    };
    let four_pi2 = 4.0 * std::f64::consts::PI.powi(2);
    let (mut lo, mut hi) = (-four_pi2, four_pi2 - 1e-9);
    while y(lo) < 0.0 {
        lo = 0.5 * (lo + hi);
    }
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if y(mid) < 0.0 || time(mid) < tof {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let z = 0.5 * (lo + hi);
    let yz = y(z);
    let f = 1.0 - yz / n1;
    let g = a * (yz / mu).sqrt();
    let gdot = 1.0 - yz / n2;
    let v1 = (r2 - f * r1) / g;
    let v2 = (gdot * r2 - r1) / g;
    (v1, v2)
}

/// Generalized advantage estimates written as the explicit double sum
/// `A_k = sum_l (gamma lambda)^l delta_{k+l}`, truncated at episode ends.
pub fn brute_force_gae(rewards: &[f64], values: &[f64], dones: &[bool], gamma: f64, lambda: f64) -> Vec<f64> {
    let n = rewards.len();
    let delta: Vec<f64> = (0..n)
        .map(|k| {
            let next = if dones[k] { 0.0 } else { values[k + 1] };
            rewards[k] + gamma * next - values[k]
        })
        .collect();
    (0..n)
        .map(|k| {
            let mut sum = 0.0;
            for l in 0..(n - k) {
                sum += (gamma * lambda).powi(l as i32) * delta[k + l];
                if dones[k + l] {
                    break;
                }
            }
            sum
        })
        .collect()
}

/// `||a - b|| / max(||a||, ||b||)`.
pub fn relative_error(a: &[f64], b: &[f64]) -> f64 {
    let diff = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    let scale = a
        .iter()
        .map(|x| x * x)
        .sum::<f64>()
        .sqrt()
        .max(b.iter().map(|x| x * x).sum::<f64>().sqrt());
    if scale == 0.0 {
        diff
    } else {
        diff / scale
    }
}

/// Pearson chi-square statistic of `observed` counts against `probs`.
pub fn chi_square(observed: &[u64], probs: &[f64]) -> f64 {
    let n: u64 = observed.iter().sum();
    observed
        .iter()
        .zip(probs)
        .map(|(&o, &p)| {
            let e = p * n as f64;
            (o as f64 - e).powi(2) / e
        })
        .sum()
}

/// Upper 0.1% points of the chi-square distribution.
pub fn chi_square_critical_999(dof: usize) -> f64 {
    match dof {
        1 => 10.828,
        2 => 13.816,
        3 => 16.266,
        39 => 72.055,
        _ => panic!("no tabulated critical value for {dof} degrees of freedom"),
    }
}

/// Print and return a criterion outcome line.
pub fn report(id: usize, name: &str, pass: bool, detail: &str) -> bool {
    println!("criterion {id} [{}] {name}: {detail}", if pass { "PASS" } else { "FAIL" });
    pass
}
