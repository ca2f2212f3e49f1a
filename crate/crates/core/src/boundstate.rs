//! Single-qubit bound state below the cutoff.

use crate::error::{Error, Result};
use crate::greens::provider::DERIVATIVE_STEP;
use crate::greens::GreensProvider;
use crate::model::{SystemSpec, WaveguideSpec};

/// Lower end of the root bracket, in units of `omega_c`.
pub const BRACKET_LOW: f64 = 1e-3;
/// Gap between the upper end of the bracket and `omega_c`, in units of `omega_c`.
pub const BRACKET_GAP: f64 = 1e-6;
pub const ROOT_RTOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Linewidth {
    pub nonradiative: f64,
    pub radiative: f64,
}

impl Linewidth {
    pub fn total(&self) -> f64 {
        self.nonradiative + self.radiative
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundStateResult {
    pub qubit_index: usize,
    pub omega_b: f64,
    /// Quasiparticle weight `Z`, the qubit fraction of the bound state.
    pub weight: f64,
    pub gamma_b: f64,
    pub linewidth: Linewidth,
    /// Peak transmission `|S_RL(omega_b)|^2` in the Lorentzian approximation.
    pub amplitude: f64,
    pub xi: f64,
}

/// `omega - omega_q - gamma Re c*G0(z1, z1; omega)`; vanishes at the bound state.
pub fn bound_state_residual(
    system: &SystemSpec,
    provider: &dyn GreensProvider,
    qubit_index: usize,
    omega: f64,
) -> Result<f64> {
    let q = system.qubit(qubit_index)?;
    let gamma = system.gamma_eff(qubit_index)?;
    let g = provider.eval(q.position, q.position, omega)?;
    Ok(omega - q.omega_q - gamma * g.re)
}

/// Root of [`bound_state_residual`] in `(1e-3 omega_c, omega_c (1 - 1e-6))`.
pub fn find_bound_frequency(system: &SystemSpec, provider: &dyn GreensProvider, qubit_index: usize) -> Result<f64> {
    let wc = system.waveguide.omega_c;
    let f = |w: f64| bound_state_residual(system, provider, qubit_index, w);
    let (mut lo, mut hi) = (BRACKET_LOW * wc, wc * (1.0 - BRACKET_GAP));
    let (mut f_lo, mut f_hi) = (f(lo)?, f(hi)?);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::NoBoundState(format!(
            "residual has the same sign at both ends of ({lo:.6e}, {hi:.6e}) rad/s: {f_lo:.3e}, {f_hi:.3e}"
        )));
    }
    for _ in 0..200 {
        if hi - lo <= ROOT_RTOL * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid)?;
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
            f_hi = f_mid;
        }
    }
    // one secant step inside the final bracket
    let secant = hi - f_hi * (hi - lo) / (f_hi - f_lo);
    let best = if f_lo.abs() < f_hi.abs() { (lo, f_lo) } else { (hi, f_hi) };
    if secant > lo && secant < hi {
        let f_sec = f(secant)?;
        if f_sec.abs() <= best.1.abs() {
            return Ok(secant);
        }
    }
    Ok(best.0)
}

/// Full bound-state characterization for qubit `qubit_index`.
pub fn solve_bound_state(
    system: &SystemSpec,
    provider: &dyn GreensProvider,
    qubit_index: usize,
) -> Result<BoundStateResult> {
    let omega_b = find_bound_frequency(system, provider, qubit_index)?;
    let weight = quasiparticle_weight(system, provider, qubit_index, omega_b)?;
    let linewidth = bound_linewidth(system, provider, qubit_index, omega_b, weight)?;
    let gamma_b = linewidth.total();
    let amplitude = peak_amplitude(system, provider, qubit_index, omega_b, weight, gamma_b)?;
    Ok(BoundStateResult {
        qubit_index,
        omega_b,
        weight,
        gamma_b,
        linewidth,
        amplitude,
        xi: localization_length(&system.waveguide, omega_b)?,
    })
}

/// `Z = 1/(1 - gamma d/d omega Re c*G0(z1, z1; omega))` using the provider's derivative.
pub fn quasiparticle_weight(
    system: &SystemSpec,
    provider: &dyn GreensProvider,
    qubit_index: usize,
    omega_b: f64,
) -> Result<f64> {
    let q = system.qubit(qubit_index)?;
    let gamma = system.gamma_eff(qubit_index)?;
    let wc = system.waveguide.omega_c;
    if wc - omega_b < 100.0 * DERIVATIVE_STEP * wc {
        log::warn!(
            "quasiparticle weight evaluated {:.3e} rad/s below the cutoff; derivative ill-conditioned",
            wc - omega_b
        );
    }
    let d = provider.derivative(q.position, q.position, omega_b)?;
    Ok(1.0 / (1.0 - gamma * d.re))
}

/// Long-guide closed form `Z = 1/(1 + gamma omega_c^2 / (omega_c^2 - omega_b^2)^{3/2})`.
pub fn quasiparticle_weight_closed(wg: &WaveguideSpec, gamma: f64, omega_b: f64) -> Result<f64> {
    let wb2 = wg.omega_c * wg.omega_c - omega_b * omega_b;
    if !(wb2 > 0.0) {
        return Err(Error::domain(
            "quasiparticle weight",
            format!("omega_b = {omega_b} rad/s is not below omega_c"),
        ));
    }
    Ok(1.0 / (1.0 + gamma * wg.omega_c * wg.omega_c / wb2.powf(1.5)))
}

/// `Gamma_b = 2Z [gamma_a/2 + gamma tau sum_s Gamma_s |c*G0(z1, z_s)|^2]`.
pub fn bound_linewidth(
    system: &SystemSpec,
    provider: &dyn GreensProvider,
    qubit_index: usize,
    omega_b: f64,
    weight: f64,
) -> Result<Linewidth> {
    let q = system.qubit(qubit_index)?;
    let gamma = system.gamma_eff(qubit_index)?;
    let tau = system.waveguide.transit_time();
    let mut leak = 0.0;
    for port in system.ports() {
        if port.gamma != 0.0 {
            leak += port.gamma * provider.eval(q.position, port.position, omega_b)?.norm_sqr();
        }
    }
    Ok(Linewidth {
        nonradiative: weight * q.gamma_a,
        radiative: 2.0 * weight * gamma * tau * leak,
    })
}

fn peak_amplitude(
    system: &SystemSpec,
    provider: &dyn GreensProvider,
    qubit_index: usize,
    omega_b: f64,
    weight: f64,
    gamma_b: f64,
) -> Result<f64> {
    let q = system.qubit(qubit_index)?;
    let gamma = system.gamma_eff(qubit_index)?;
    let tau = system.waveguide.transit_time();
    let (gl, gr) = (system.port_left.gamma, system.port_right.gamma);
    let to_r = provider.eval(q.position, system.port_right.position, omega_b)?;
    let to_l = provider.eval(q.position, system.port_left.position, omega_b)?;
    let numerator = 4.0 * weight * (gr * gl).sqrt() * gamma * tau * (to_r * to_l).norm();
    if numerator == 0.0 {
        return Ok(0.0);
    }
    if !(gamma_b > 0.0) {
        return Err(Error::domain("resonance amplitude", "bound-state linewidth must be positive"));
    }
    Ok((numerator / gamma_b).powi(2))
}

/// Lorentzian `A (Gamma_b/2)^2 / ((omega - omega_b)^2 + (Gamma_b/2)^2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResonanceProfile {
    pub amplitude: f64,
    pub center: f64,
    pub width: f64,
}

impl ResonanceProfile {
    pub fn eval(&self, omega: f64) -> f64 {
        let hw = 0.5 * self.width;
        self.amplitude * hw * hw / ((omega - self.center).powi(2) + hw * hw)
    }
}

/// Recompute the peak amplitude for `bound` and return it with its Lorentzian.
pub fn resonance_amplitude(
    system: &SystemSpec,
    provider: &dyn GreensProvider,
    bound: &BoundStateResult,
) -> Result<ResonanceProfile> {
    let amplitude = peak_amplitude(
        system,
        provider,
        bound.qubit_index,
        bound.omega_b,
        bound.weight,
        bound.gamma_b,
    )?;
    Ok(ResonanceProfile {
        amplitude,
        center: bound.omega_b,
        width: bound.gamma_b,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhotonicProfile {
    /// `|psi_phot(z)|^2` in 1/m.
    pub density: Vec<f64>,
    /// Trapezoidal integral of `density` over the grid.
    pub integral: f64,
}

/// Photonic density `gamma Z |c*G0(z, z1; omega_b)|^2 / c` on `z_grid`.
pub fn photonic_wavefunction(
    system: &SystemSpec,
    provider: &dyn GreensProvider,
    bound: &BoundStateResult,
    z_grid: &[f64],
) -> Result<PhotonicProfile> {
    let q = system.qubit(bound.qubit_index)?;
    let gamma = system.gamma_eff(bound.qubit_index)?;
    let wg = &system.waveguide;
    if z_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Argument("z grid must be strictly increasing".into()));
    }
    let scale = gamma * bound.weight / wg.speed_c;
    let density = z_grid
        .iter()
        .map(|&z| Ok(scale * provider.eval(z, q.position, bound.omega_b)?.norm_sqr()))
        .collect::<Result<Vec<f64>>>()?;
    let integral = z_grid
        .windows(2)
        .zip(density.windows(2))
        .map(|(z, d)| 0.5 * (z[1] - z[0]) * (d[0] + d[1]))
        .sum();
    Ok(PhotonicProfile { density, integral })
}

/// `xi = c / sqrt(omega_c^2 - omega_b^2)`.
pub fn localization_length(wg: &WaveguideSpec, omega_b: f64) -> Result<f64> {
    let wb2 = wg.omega_c * wg.omega_c - omega_b * omega_b;
    if !(wb2 > 0.0) || !(omega_b >= 0.0) {
        return Err(Error::domain(
            "localization length",
            format!("omega_b = {omega_b} rad/s must lie in [0, omega_c)"),
        ));
    }
    Ok(wg.speed_c / wb2.sqrt())
}
