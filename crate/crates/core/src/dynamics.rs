//! Driven, damped two-level dynamics of a bound state in the frame of the drive.
//!
//! With `s = <sigma_->`, `w = <sigma_z>` and detuning `delta = omega_d - omega_b`:
//!
//! ```text
//! ds/dt = (i delta - Gamma/2) s + i (Omega/2) w
//! dw/dt = -Gamma (1 + w) - i Omega (s* - s)
//! ```
//!
//! The drive is a rectangular pulse, on for `0 <= t < tau`.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::boundstate::BoundStateResult;
use crate::error::{Error, Result};
use crate::greens::GreensProvider;
use crate::model::SystemSpec;
use crate::scattering::gp;

/// Steps per fastest time scale required of the integrator.
pub const STEPS_PER_SCALE: f64 = 50.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveSpec {
    pub omega_d: f64,
    /// Rabi frequency `Omega_r`.
    pub rabi: f64,
    pub pulse_length: f64,
}

impl DriveSpec {
    pub fn new(omega_d: f64, rabi: f64, pulse_length: f64) -> Result<Self> {
        if !(pulse_length.is_finite() && pulse_length > 0.0) {
            return Err(Error::Argument(format!("pulse length must be positive, got {pulse_length}")));
        }
        if !(rabi.is_finite() && rabi >= 0.0) {
            return Err(Error::Argument(format!("Rabi frequency must be non-negative, got {rabi}")));
        }
        if !omega_d.is_finite() {
            return Err(Error::Argument("drive frequency must be finite".into()));
        }
        Ok(DriveSpec {
            omega_d,
            rabi,
            pulse_length,
        })
    }

    pub fn detuning(&self, omega_b: f64) -> f64 {
        self.omega_d - omega_b
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochState {
    pub sigma_minus: Complex64,
    pub sigma_z: f64,
}

impl BlochState {
    pub const GROUND: BlochState = BlochState {
        sigma_minus: Complex64::new(0.0, 0.0),
        sigma_z: -1.0,
    };

    /// `|s|^2 <= (1 - w^2)/4` up to `tol`.
    pub fn in_bloch_ball(&self, tol: f64) -> bool {
        self.sigma_minus.norm_sqr() <= 0.25 * (1.0 - self.sigma_z * self.sigma_z) + tol
    }

    fn axpy(&self, h: f64, d: &BlochState) -> BlochState {
        BlochState {
            sigma_minus: self.sigma_minus + d.sigma_minus * h,
            sigma_z: self.sigma_z + d.sigma_z * h,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlochTrace {
    pub times: Vec<f64>,
    pub states: Vec<BlochState>,
    /// `|<sigma_->|`; multiply by [`emission_prefactor`] for the output field.
    pub emission: Vec<f64>,
}

#[derive(Debug, Clone, Copy)]
struct Rates {
    delta: f64,
    gamma: f64,
    rabi: f64,
    pulse_end: f64,
}

impl Rates {
    fn fastest(&self) -> f64 {
        self.rabi.max(self.gamma).max(self.delta.abs())
    }

    fn derivative(&self, y: &BlochState, driven: bool) -> BlochState {
        let omega = if driven { self.rabi } else { 0.0 };
        let s = y.sigma_minus;
        BlochState {
            sigma_minus: Complex64::new(-0.5 * self.gamma, self.delta) * s
                + Complex64::new(0.0, 0.5 * omega * y.sigma_z),
            sigma_z: -self.gamma * (1.0 + y.sigma_z) - 2.0 * omega * s.im,
        }
    }

    fn rk4(&self, y: &BlochState, h: f64, driven: bool) -> BlochState {
        let k1 = self.derivative(y, driven);
        let k2 = self.derivative(&y.axpy(0.5 * h, &k1), driven);
        let k3 = self.derivative(&y.axpy(0.5 * h, &k2), driven);
        let k4 = self.derivative(&y.axpy(h, &k3), driven);
        BlochState {
            sigma_minus: y.sigma_minus
                + (k1.sigma_minus + 2.0 * k2.sigma_minus + 2.0 * k3.sigma_minus + k4.sigma_minus) * (h / 6.0),
            sigma_z: y.sigma_z + (k1.sigma_z + 2.0 * k2.sigma_z + 2.0 * k3.sigma_z + k4.sigma_z) * (h / 6.0),
        }
    }

    /// Advance from `t0` to `t1` in equal steps no longer than `max_dt`, splitting
    /// any step that straddles the end of the pulse.
    fn advance(&self, mut y: BlochState, t0: f64, t1: f64, max_dt: f64) -> BlochState {
        if t1 <= t0 {
            return y;
        }
        let n = ((t1 - t0) / max_dt).ceil().max(1.0) as usize;
        let h = (t1 - t0) / n as f64;
        for k in 0..n {
            let a = t0 + k as f64 * h;
            let b = if k + 1 == n { t1 } else { a + h };
            let tau = self.pulse_end;
            if a < tau && tau < b {
                y = self.rk4(&y, tau - a, true);
                y = self.rk4(&y, b - tau, false);
            } else {
                y = self.rk4(&y, b - a, a < tau);
            }
        }
        y
    }
}

fn rates(omega_b: f64, gamma_b: f64, drive: &DriveSpec) -> Result<Rates> {
    if !(gamma_b.is_finite() && gamma_b >= 0.0) {
        return Err(Error::Argument(format!("linewidth must be non-negative, got {gamma_b}")));
    }
    Ok(Rates {
        delta: drive.detuning(omega_b),
        gamma: gamma_b,
        rabi: drive.rabi,
        pulse_end: drive.pulse_length,
    })
}

/// RK4 trace on the grid `0, dt, 2dt, ..., t_end` for explicit `omega_b`, `Gamma_b`.
pub fn simulate_bloch_rates(
    omega_b: f64,
    gamma_b: f64,
    drive: &DriveSpec,
    t_end: f64,
    dt: f64,
) -> Result<BlochTrace> {
    let r = rates(omega_b, gamma_b, drive)?;
    if !(dt > 0.0) || !(t_end > 0.0) {
        return Err(Error::Argument(format!("need dt > 0 and t_end > 0, got {dt} and {t_end}")));
    }
    let fastest = r.fastest();
    if fastest > 0.0 && dt > 1.0 / (STEPS_PER_SCALE * fastest) {
        return Err(Error::Argument(format!(
            "dt = {dt:.3e} s exceeds the stability bound 1/(50 max(Omega, Gamma, |delta|)) = {:.3e} s",
            1.0 / (STEPS_PER_SCALE * fastest)
        )));
    }
    let n = (t_end / dt).round().max(1.0) as usize;
    let mut times = Vec::with_capacity(n + 1);
    let mut states = Vec::with_capacity(n + 1);
    let mut y = BlochState::GROUND;
    times.push(0.0);
    states.push(y);
    for k in 1..=n {
        let (a, b) = ((k - 1) as f64 * dt, k as f64 * dt);
        y = r.advance(y, a, b, dt);
        times.push(b);
        states.push(y);
    }
    let emission = states.iter().map(|s| s.sigma_minus.norm()).collect();
    Ok(BlochTrace { times, states, emission })
}

/// [`simulate_bloch_rates`] with the frequency and linewidth of a solved bound state.
pub fn simulate_bloch(bound: &BoundStateResult, drive: &DriveSpec, t_end: f64, dt: f64) -> Result<BlochTrace> {
    simulate_bloch_rates(bound.omega_b, bound.gamma_b, drive, t_end, dt)
}

/// `|<sigma_->|_ss = Omega sqrt(4 delta^2 + Gamma^2) / (2 Omega^2 + 4 delta^2 + Gamma^2)`.
pub fn steady_state_magnitude(gamma_b: f64, rabi: f64, delta_d: f64) -> f64 {
    let q = 4.0 * delta_d * delta_d + gamma_b * gamma_b;
    let den = 2.0 * rabi * rabi + q;
    if den == 0.0 {
        return 0.0;
    }
    rabi * q.sqrt() / den
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChevronMap {
    pub omega_d: Vec<f64>,
    pub times: Vec<f64>,
    /// `emission[i][k] = |<sigma_->|` at drive `omega_d[i]` and time `times[k]`.
    pub emission: Vec<Vec<f64>>,
}

/// Emission versus drive frequency and time for a pulse of length `tau_p`.
///
/// Each column is integrated with the largest step allowed by its own rates.
pub fn chevron_map_rates(
    omega_b: f64,
    gamma_b: f64,
    rabi: f64,
    tau_p: f64,
    omega_d_grid: &[f64],
    t_grid: &[f64],
) -> Result<ChevronMap> {
    if omega_d_grid.is_empty() || t_grid.is_empty() {
        return Err(Error::Argument("chevron grids must be non-empty".into()));
    }
    if t_grid[0] < 0.0 || t_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Argument("time grid must be non-negative and strictly increasing".into()));
    }
    let emission = omega_d_grid
        .par_iter()
        .map(|&wd| {
            let drive = DriveSpec::new(wd, rabi, tau_p)?;
            let r = rates(omega_b, gamma_b, &drive)?;
            let fastest = r.fastest();
            let max_dt = if fastest > 0.0 {
                1.0 / (STEPS_PER_SCALE * fastest)
            } else {
                f64::INFINITY
            };
            let mut y = BlochState::GROUND;
            let mut t = 0.0;
            let mut col = Vec::with_capacity(t_grid.len());
            for &tk in t_grid {
                y = r.advance(y, t, tk, max_dt);
                t = tk;
                col.push(y.sigma_minus.norm());
            }
            Ok(col)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ChevronMap {
        omega_d: omega_d_grid.to_vec(),
        times: t_grid.to_vec(),
        emission,
    })
}

pub fn chevron_map(
    bound: &BoundStateResult,
    rabi: f64,
    tau_p: f64,
    omega_d_grid: &[f64],
    t_grid: &[f64],
) -> Result<ChevronMap> {
    chevron_map_rates(bound.omega_b, bound.gamma_b, rabi, tau_p, omega_d_grid, t_grid)
}

/// Output-field scale `2 g sqrt(pi Gamma_R) tau |c*Gp(z_R, z_q; omega_b)|` multiplying
/// `|<sigma_->|`.
pub fn emission_prefactor(
    system: &SystemSpec,
    provider: &dyn GreensProvider,
    qubit_index: usize,
    omega_b: f64,
) -> Result<f64> {
    let q = system.qubit(qubit_index)?;
    let tau = system.waveguide.transit_time();
    let g = gp(system, provider, system.port_right.position, q.position, omega_b)?;
    Ok(2.0 * q.g * (std::f64::consts::PI * system.port_right.gamma).sqrt() * tau * g.norm())
}
