//! Radiative (Purcell) decay of a bound state into the ports.

use std::fmt;

use crate::boundstate::{bound_linewidth, quasiparticle_weight};
use crate::error::{Error, Result};
use crate::greens::{GreensProvider, TruncatedGreens};
use crate::model::SystemSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeCount {
    Finite(usize),
    Infinite,
}

impl fmt::Display for ModeCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModeCount::Finite(n) => write!(f, "{n}"),
            ModeCount::Infinite => write!(f, "inf"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PurcellResult {
    pub gamma_r: f64,
    pub n_modes: ModeCount,
    pub omega_b: f64,
    /// Quasiparticle weight used in the rate.
    pub weight: f64,
}

/// `2 Z gamma tau sum_s Gamma_s |c*G0(z1, z_s; omega_b)|^2` with all modes.
pub fn purcell_infinite(
    system: &SystemSpec,
    provider: &dyn GreensProvider,
    qubit_index: usize,
    omega_b: f64,
) -> Result<PurcellResult> {
    let weight = quasiparticle_weight(system, provider, qubit_index, omega_b)?;
    let lw = bound_linewidth(system, provider, qubit_index, omega_b, weight)?;
    Ok(PurcellResult {
        gamma_r: lw.radiative,
        n_modes: ModeCount::Infinite,
        omega_b,
        weight,
    })
}

/// Same rate with the propagator and `Z` both built from the lowest `n_modes` modes.
pub fn purcell_finite(system: &SystemSpec, qubit_index: usize, omega_b: f64, n_modes: usize) -> Result<PurcellResult> {
    if n_modes < 1 {
        return Err(Error::Argument("n_modes must be at least 1".into()));
    }
    let provider = TruncatedGreens::new(system.waveguide, n_modes);
    let weight = quasiparticle_weight(system, &provider, qubit_index, omega_b)?;
    let lw = bound_linewidth(system, &provider, qubit_index, omega_b, weight)?;
    Ok(PurcellResult {
        gamma_r: lw.radiative,
        n_modes: ModeCount::Finite(n_modes),
        omega_b,
        weight,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingleModePurcell {
    pub result: PurcellResult,
    /// Cavity decay rate `sum_s 2 Gamma_s L psi_1(z_s)^2`.
    pub kappa: f64,
    pub g_tilde: f64,
}

/// Decay through the lowest mode only.
///
/// Regularized: `g~^2 kappa / ((eps_1 - w)^2 + g~^2)`, equal to `kappa` on resonance.
/// Otherwise the dispersive `g~^2 kappa / (eps_1 - w)^2` (no weight factor).
pub fn purcell_single_mode(
    system: &SystemSpec,
    qubit_index: usize,
    omega_b: f64,
    regularized: bool,
) -> Result<SingleModePurcell> {
    let q = system.qubit(qubit_index)?;
    let wg = &system.waveguide;
    let modes = wg.modes();
    let g_tilde = q.g * wg.length.sqrt() * modes.psi_of(1, q.position);
    let kappa: f64 = system
        .ports()
        .iter()
        .map(|p| 2.0 * p.gamma * wg.length * modes.psi_of(1, p.position).powi(2))
        .sum();
    let detuning = modes.epsilon_of(1) - omega_b;
    let g2 = g_tilde * g_tilde;
    let (gamma_r, weight) = if regularized {
        let den = detuning * detuning + g2;
        if den == 0.0 {
            // uncoupled qubit exactly on resonance: the limit g~ -> 0 of the regularized form
            (kappa, 0.0)
        } else {
            (g2 * kappa / den, detuning * detuning / den)
        }
    } else {
        if detuning == 0.0 {
            return Err(Error::Singular("omega_b equals the lowest mode frequency".into()));
        }
        (g2 * kappa / (detuning * detuning), 1.0)
    };
    Ok(SingleModePurcell {
        result: PurcellResult {
            gamma_r,
            n_modes: ModeCount::Finite(1),
            omega_b,
            weight,
        },
        kappa,
        g_tilde,
    })
}
