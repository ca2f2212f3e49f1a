//! Two bound states and the waveguide-mediated exchange between them.
//!
//! The undressed self-energy `Sigma0` (no ports, no non-radiative loss) is used
//! throughout; in the stopband only its real part matters.

use std::fmt;

use rayon::prelude::*;

use crate::boundstate::{find_bound_frequency, localization_length, BRACKET_GAP, BRACKET_LOW, ROOT_RTOL};
use crate::error::{Error, Result};
use crate::greens::GreensProvider;
use crate::model::{SystemSpec, WaveguideSpec};
use crate::scattering::s_rl;

pub const SELF_CONSISTENT_RTOL: f64 = 1e-10;
pub const SELF_CONSISTENT_MAX_ITER: usize = 200;
/// Relative tolerance of the mirror-symmetry check guarding the closed forms.
pub const SYMMETRY_RTOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SplittingMethod {
    Determinant,
    SelfConsistent,
    Linear,
    LongWaveguide,
    SingleMode,
    Overlap,
}

impl fmt::Display for SplittingMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SplittingMethod::Determinant => "determinant",
            SplittingMethod::SelfConsistent => "self-consistent",
            SplittingMethod::Linear => "linear",
            SplittingMethod::LongWaveguide => "long-waveguide",
            SplittingMethod::SingleMode => "single-mode",
            SplittingMethod::Overlap => "overlap",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplittingResult {
    pub omega_bar_b: f64,
    /// `Delta = omega_b2 - omega_b1` (or the exchange `J` for the closed forms).
    pub delta: f64,
    pub method: SplittingMethod,
    /// Lower and upper bound-state frequency, when solved for explicitly.
    pub roots: Option<[f64; 2]>,
}

fn require_pair(system: &SystemSpec) -> Result<()> {
    match system.qubits.len() {
        0 => Err(Error::EmptySystem),
        2 => Ok(()),
        n => Err(Error::Argument(format!("a qubit pair is required, {n} configured"))),
    }
}

fn require_symmetric(system: &SystemSpec) -> Result<()> {
    require_pair(system)?;
    let (a, b) = (&system.qubits[0], &system.qubits[1]);
    let close = |x: f64, y: f64, scale: f64| (x - y).abs() <= SYMMETRY_RTOL * scale;
    if close(a.position, -b.position, system.waveguide.length)
        && close(a.g, b.g, a.g.max(b.g))
        && close(a.omega_q, b.omega_q, a.omega_q.max(b.omega_q))
    {
        Ok(())
    } else {
        Err(Error::Argument(
            "closed-form exchange needs a mirror-symmetric pair (z1 = -z2, equal g and omega_q)".into(),
        ))
    }
}

/// Real parts of `Sigma0_11`, `Sigma0_22`, `Sigma0_12` at `omega`.
fn sigma0(system: &SystemSpec, provider: &dyn GreensProvider, omega: f64) -> Result<[f64; 3]> {
    let tau = system.waveguide.transit_time();
    let (a, b) = (&system.qubits[0], &system.qubits[1]);
    let s11 = a.g * a.g * tau * provider.eval(a.position, a.position, omega)?.re;
    let s22 = b.g * b.g * tau * provider.eval(b.position, b.position, omega)?.re;
    let s12 = a.g * b.g * tau * provider.eval(a.position, b.position, omega)?.re;
    Ok([s11, s22, s12])
}

/// `omega - lambda(omega)` for the lower (`upper = false`) or upper eigenvalue of
/// `diag(omega_q) + Sigma0(omega)`.
fn branch_residual(system: &SystemSpec, provider: &dyn GreensProvider, omega: f64, upper: bool) -> Result<f64> {
    let [s11, s22, s12] = sigma0(system, provider, omega)?;
    let a = system.qubits[0].omega_q + s11;
    let d = system.qubits[1].omega_q + s22;
    let mean = 0.5 * (a + d);
    let radius = (0.5 * (a - d)).hypot(s12);
    let lambda = if upper { mean + radius } else { mean - radius };
    Ok(omega - lambda)
}

/// `det[diag(omega - omega_q) - Re Sigma0(omega)]` with non-radiative loss dropped.
pub fn pair_determinant(system: &SystemSpec, provider: &dyn GreensProvider, omega: f64) -> Result<f64> {
    require_pair(system)?;
    let [s11, s22, s12] = sigma0(system, provider, omega)?;
    Ok((omega - system.qubits[0].omega_q - s11) * (omega - system.qubits[1].omega_q - s22) - s12 * s12)
}

fn bisect<F: Fn(f64) -> Result<f64>>(f: F, mut lo: f64, mut hi: f64) -> Result<Option<f64>> {
    let (mut f_lo, f_hi) = (f(lo)?, f(hi)?);
    if f_lo == 0.0 {
        return Ok(Some(lo));
    }
    if f_hi == 0.0 {
        return Ok(Some(hi));
    }
    if f_lo.signum() == f_hi.signum() {
        return Ok(None);
    }
    for _ in 0..200 {
        if hi - lo <= ROOT_RTOL * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid)?;
        if f_mid == 0.0 {
            return Ok(Some(mid));
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(Some(0.5 * (lo + hi)))
}

/// Both stopband zeros of the pair determinant.
///
/// Each eigen-branch `omega - lambda_pm(omega)` is strictly increasing (the
/// self-energy decreases with frequency), so each holds at most one root.
pub fn solve_pair_determinant(system: &SystemSpec, provider: &dyn GreensProvider) -> Result<SplittingResult> {
    require_pair(system)?;
    let wc = system.waveguide.omega_c;
    let (lo, hi) = (BRACKET_LOW * wc, wc * (1.0 - BRACKET_GAP));

    if let Some(idle) = system.qubits.iter().position(|q| q.g == 0.0) {
        let other = 1 - idle;
        let roots = match find_bound_frequency(system, provider, other) {
            Ok(w) if system.qubits[other].g != 0.0 => vec![w],
            _ => vec![],
        };
        return Err(Error::DegeneratePair {
            reason: format!("qubit {idle} is uncoupled (g = 0)"),
            roots,
        });
    }

    let lower = bisect(|w| branch_residual(system, provider, w, false), lo, hi)?;
    let upper = bisect(|w| branch_residual(system, provider, w, true), lo, hi)?;
    match (lower, upper) {
        (Some(a), Some(b)) => Ok(SplittingResult {
            omega_bar_b: 0.5 * (a + b),
            delta: b - a,
            method: SplittingMethod::Determinant,
            roots: Some([a, b]),
        }),
        (a, b) => Err(Error::DegeneratePair {
            reason: format!("fewer than two stopband roots in ({lo:.6e}, {hi:.6e}) rad/s"),
            roots: a.into_iter().chain(b).collect(),
        }),
    }
}

fn weight_at(system: &SystemSpec, provider: &dyn GreensProvider, omega: f64) -> Result<f64> {
    let q = &system.qubits[0];
    let gamma = system.gamma_eff(0)?;
    let d = provider.derivative(q.position, q.position, omega)?;
    Ok(1.0 / (1.0 - gamma * d.re))
}

/// Solve `Delta = Sigma_-(w + Delta/2) - Sigma_+(w - Delta/2)` for a symmetric pair,
/// `Sigma_pm = Sigma0_11 pm Sigma0_12`.
///
/// The update is damped by the quasiparticle weight,
/// `Delta <- Delta + Z (rhs(Delta) - Delta)`, a Newton-like step that stays stable
/// near the cutoff where the undamped map diverges (its slope is `1 - 1/Z`).
/// Starting from zero, the first step gives the linear exchange `J`.
pub fn splitting_selfconsistent(
    system: &SystemSpec,
    provider: &dyn GreensProvider,
    omega_bar_b: f64,
) -> Result<SplittingResult> {
    require_symmetric(system)?;
    let z = weight_at(system, provider, omega_bar_b)?;
    let rhs = |delta: f64| -> Result<f64> {
        let [s11_hi, _, s12_hi] = sigma0(system, provider, omega_bar_b + 0.5 * delta)?;
        let [s11_lo, _, s12_lo] = sigma0(system, provider, omega_bar_b - 0.5 * delta)?;
        Ok((s11_hi - s12_hi) - (s11_lo + s12_lo))
    };
    let mut delta = 0.0;
    let mut previous = f64::NAN;
    for _ in 0..SELF_CONSISTENT_MAX_ITER {
        let next = delta + z * (rhs(delta)? - delta);
        if !next.is_finite() {
            break;
        }
        previous = delta;
        delta = next;
        if (delta - previous).abs() <= SELF_CONSISTENT_RTOL * delta.abs() || delta == previous {
            return Ok(SplittingResult {
                omega_bar_b,
                delta,
                method: SplittingMethod::SelfConsistent,
                roots: Some([omega_bar_b - 0.5 * delta, omega_bar_b + 0.5 * delta]),
            });
        }
    }
    Err(Error::NoConvergence {
        operation: "self-consistent splitting",
        iterations: SELF_CONSISTENT_MAX_ITER,
        last: vec![previous, delta],
    })
}

/// `J = -2 Sigma0_12(w) Z(w)`.
pub fn j_linear(system: &SystemSpec, provider: &dyn GreensProvider, omega_bar_b: f64) -> Result<SplittingResult> {
    require_symmetric(system)?;
    let [_, _, s12] = sigma0(system, provider, omega_bar_b)?;
    let z = weight_at(system, provider, omega_bar_b)?;
    Ok(SplittingResult {
        omega_bar_b,
        delta: -2.0 * s12 * z,
        method: SplittingMethod::Linear,
        roots: None,
    })
}

/// `J = 2 gamma (w xi/c) exp(-d/xi) / (1 + gamma omega_c^2 xi^3/c^3)`.
pub fn j_long_waveguide(wg: &WaveguideSpec, gamma: f64, d: f64, omega_bar_b: f64) -> Result<SplittingResult> {
    let xi = localization_length(wg, omega_bar_b)?;
    if wg.length < 10.0 * xi {
        log::warn!(
            "long-waveguide exchange used with L/xi = {:.2}; the walls are not negligible",
            wg.length / xi
        );
    }
    let c = wg.speed_c;
    let r = xi / c;
    let j = 2.0 * gamma * omega_bar_b * r * (-d.abs() / xi).exp() / (1.0 + gamma * wg.omega_c * wg.omega_c * r * r * r);
    Ok(SplittingResult {
        omega_bar_b,
        delta: j,
        method: SplittingMethod::LongWaveguide,
        roots: None,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingleModeExchange {
    pub j: f64,
    /// `g_j sqrt(L) psi_1(z_j)`.
    pub g_tilde: [f64; 2],
    /// `[1 + g_tilde_1^2 / (eps_1 - w)^2]^-1`.
    pub weight: f64,
}

/// Exchange through the lowest cavity mode alone: `J = 2 Z g1~ g2~ / (eps_1 - w)`.
pub fn j_single_mode(system: &SystemSpec, omega_bar_b: f64) -> Result<SingleModeExchange> {
    require_symmetric(system)?;
    let wg = &system.waveguide;
    let modes = wg.modes();
    let detuning = modes.epsilon_of(1) - omega_bar_b;
    if detuning == 0.0 {
        return Err(Error::Singular("omega_bar_b equals the lowest mode frequency".into()));
    }
    if detuning.abs() > 0.1 * wg.mode_spacing() {
        log::warn!("single-mode exchange used {detuning:.3e} rad/s away from the lowest mode");
    }
    let g_tilde = [0, 1].map(|j| {
        let q = &system.qubits[j];
        q.g * wg.length.sqrt() * modes.psi_of(1, q.position)
    });
    let weight = 1.0 / (1.0 + (g_tilde[0] / detuning).powi(2));
    Ok(SingleModeExchange {
        j: 2.0 * weight * g_tilde[0] * g_tilde[1] / detuning,
        g_tilde,
        weight,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct OverlapExchange {
    /// `2 |<psi1|(w - H0)|psi2>| = 2 |Z Sigma0_12|`.
    pub j: f64,
    pub matrix_element: f64,
    /// `int psi1(z) psi2(z) dz` of the two photonic clouds on the grid.
    pub photonic_overlap: f64,
    pub max_grid_step: f64,
    /// Grid finer than `xi/50`.
    pub resolved: bool,
}

/// Exchange as the photonic matrix element between the two single-qubit bound states.
pub fn j_overlap(
    system: &SystemSpec,
    provider: &dyn GreensProvider,
    omega_bar_b: f64,
    z_grid: &[f64],
) -> Result<OverlapExchange> {
    require_symmetric(system)?;
    let xi = localization_length(&system.waveguide, omega_bar_b)?;
    let [_, _, s12] = sigma0(system, provider, omega_bar_b)?;
    let z = weight_at(system, provider, omega_bar_b)?;
    let matrix_element = z * s12;

    let max_grid_step = z_grid.windows(2).map(|w| (w[1] - w[0]).abs()).fold(0.0, f64::max);
    let resolved = max_grid_step <= xi / 50.0;
    if !resolved {
        log::warn!("overlap grid step {max_grid_step:.3e} m exceeds xi/50 = {:.3e} m", xi / 50.0);
    }
    let gamma = system.gamma_eff(0)?;
    let amp = (gamma * z / system.waveguide.speed_c).sqrt();
    let (z1, z2) = (system.qubits[0].position, system.qubits[1].position);
    let cloud = |z_q: f64| -> Result<Vec<f64>> {
        z_grid
            .iter()
            .map(|&x| Ok(amp * provider.eval(x, z_q, omega_bar_b)?.re))
            .collect()
    };
    let (p1, p2) = (cloud(z1)?, cloud(z2)?);
    let photonic_overlap = (1..z_grid.len())
        .map(|i| 0.5 * (z_grid[i] - z_grid[i - 1]) * (p1[i] * p2[i] + p1[i - 1] * p2[i - 1]))
        .sum();
    Ok(OverlapExchange {
        j: 2.0 * matrix_element.abs(),
        matrix_element,
        photonic_overlap,
        max_grid_step,
        resolved,
    })
}

/// [`j_overlap`] evaluated with an explicit `n_modes` mode sum for both
/// `Sigma0_12` and `Z`.
pub fn j_overlap_mode_sum(system: &SystemSpec, omega_bar_b: f64, n_modes: usize) -> Result<f64> {
    require_symmetric(system)?;
    let provider = crate::greens::TruncatedGreens::new(system.waveguide, n_modes);
    let [_, _, s12] = sigma0(system, &provider, omega_bar_b)?;
    let z = weight_at(system, &provider, omega_bar_b)?;
    Ok(2.0 * (z * s12).abs())
}

#[derive(Debug, Clone, PartialEq)]
pub struct AvoidedCrossingMap {
    pub omega_q2: Vec<f64>,
    pub omega: Vec<f64>,
    /// `power[i][j] = |S_RL(omega[i])|^2` at `omega_q2[j]`.
    pub power: Vec<Vec<f64>>,
    /// Refined peak frequencies per column, highest peak first.
    pub peaks: Vec<Vec<f64>>,
    /// Minimal distance between the two strongest peaks over all columns.
    pub splitting: Option<f64>,
    pub splitting_column: Option<usize>,
}

/// Local maxima of `values`, refined by a parabola through each maximum and its
/// neighbours; sorted by height, strongest first.
pub fn column_peaks(omega: &[f64], values: &[f64]) -> Vec<f64> {
    let mut found: Vec<(f64, f64)> = Vec::new();
    for i in 1..values.len().saturating_sub(1) {
        let (a, b, c) = (values[i - 1], values[i], values[i + 1]);
        if b > a && b >= c {
            let curvature = a - 2.0 * b + c;
            let shift = if curvature < 0.0 { 0.5 * (a - c) / curvature } else { 0.0 };
            let step = if shift >= 0.0 { omega[i + 1] - omega[i] } else { omega[i] - omega[i - 1] };
            let height = b - 0.25 * (a - c) * shift;
            found.push((omega[i] + shift * step, height));
        }
    }
    found.sort_by(|x, y| y.1.total_cmp(&x.1));
    found.into_iter().map(|p| p.0).collect()
}

/// Transmission map over the second qubit's frequency and the probe frequency.
pub fn avoided_crossing_map(
    system: &SystemSpec,
    provider: &dyn GreensProvider,
    omega_q2_grid: &[f64],
    omega_grid: &[f64],
) -> Result<AvoidedCrossingMap> {
    require_pair(system)?;
    if omega_q2_grid.is_empty() || omega_grid.is_empty() {
        return Err(Error::Argument("avoided-crossing grids must be non-empty".into()));
    }
    let columns: Vec<Vec<f64>> = omega_q2_grid
        .par_iter()
        .map(|&wq2| {
            let mut sys = system.clone();
            sys.qubits[1].omega_q = wq2;
            omega_grid
                .iter()
                .map(|&w| Ok(s_rl(&sys, provider, w)?.power()))
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<_>>()?;

    let peaks: Vec<Vec<f64>> = columns.iter().map(|col| column_peaks(omega_grid, col)).collect();
    let mut splitting = None;
    let mut splitting_column = None;
    for (j, p) in peaks.iter().enumerate() {
        if p.len() >= 2 {
            let d = (p[0] - p[1]).abs();
            if splitting.is_none_or(|s| d < s) {
                splitting = Some(d);
                splitting_column = Some(j);
            }
        }
    }
    let power = (0..omega_grid.len())
        .map(|i| columns.iter().map(|col| col[i]).collect())
        .collect();
    Ok(AvoidedCrossingMap {
        omega_q2: omega_q2_grid.to_vec(),
        omega: omega_grid.to_vec(),
        power,
        peaks,
        splitting,
        splitting_column,
    })
}
