//! Bare Green's function `c*G0(z, z'; omega)` of the closed rectangular waveguide.
//!
//! Every routine evaluates at the broadened frequency `omega + i*eta*omega_c`.
//! Above the cutoff `wbar = sqrt(omega_c^2 - omega^2)` is taken on the principal
//! branch of the broadened argument, which selects outgoing (retarded) waves.

use std::f64::consts::PI;
use std::sync::atomic::{AtomicBool, Ordering};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::WaveguideSpec;
use crate::quad;

/// Absolute tolerance of the branch-cut quadrature.
pub const BRANCH_CUT_TOL: f64 = 1e-8;

pub(crate) fn broadened(wg: &WaveguideSpec, omega: f64) -> Complex64 {
    Complex64::new(omega, wg.eta * wg.omega_c)
}

pub(crate) fn wbar(wg: &WaveguideSpec, w: Complex64) -> Complex64 {
    (wg.omega_c * wg.omega_c - w * w).sqrt()
}

pub(crate) fn check_position(wg: &WaveguideSpec, z: f64) -> Result<()> {
    if z.is_finite() && wg.contains(z) {
        Ok(())
    } else {
        Err(Error::domain(
            "position",
            format!("z = {z} m is outside [-{0}, {0}] m", 0.5 * wg.length),
        ))
    }
}

fn check_omega(omega: f64) -> Result<()> {
    if omega.is_finite() && omega > 0.0 {
        Ok(())
    } else {
        Err(Error::domain("frequency", format!("omega = {omega} rad/s must be positive")))
    }
}

/// `exp(x) - 1` without cancellation for small `|x|`.
fn expm1(x: Complex64) -> Complex64 {
    let s = (0.5 * x.im).sin();
    Complex64::new(x.re.exp_m1() * x.im.cos() - 2.0 * s * s, x.re.exp() * x.im.sin())
}

/// Wall factor `F(z, z'; w)`: image sum of `exp(-w x)` over the two walls.
///
/// Written as `exp(-w a) expm1(-w (b-a)) expm1(-w (beta-a-b)) / expm1(-w beta)` with
/// `a = |z-z'|/c`, `b = |z+z'+L|/c`, `beta = 2L/c`. All exponents are non-positive in
/// the stopband, so nothing overflows, and both wall zeros are exact.
pub fn wall_factor(wg: &WaveguideSpec, z: f64, zp: f64, w: Complex64) -> Result<Complex64> {
    let c = wg.speed_c;
    let half = 0.5 * wg.length;
    let a = (z - zp).abs() / c;
    let left = 2.0 * (z.min(zp) + half) / c;
    let right = 2.0 * (half - z.max(zp)) / c;
    let beta = 2.0 * wg.length / c;
    let den = expm1(-w * beta);
    if den == Complex64::new(0.0, 0.0) {
        return Err(Error::Singular(format!(
            "standing-wave resonance of the wall factor at w = {w}"
        )));
    }
    Ok((-w * a).exp() * expm1(-w * left) * expm1(-w * right) / den)
}

/// Plain mode sum `c * sum_{l<=n} psi_l(z) psi_l(z') / (omega - eps_l)`.
///
/// With `include_fk` every term carries the extra factor `omega/omega_c`.
pub fn g0_truncated(
    wg: &WaveguideSpec,
    z: f64,
    zp: f64,
    omega: f64,
    n_modes: usize,
    include_fk: bool,
) -> Result<Complex64> {
    let (s, _) = truncated_sums(wg, z, zp, omega, n_modes, false)?;
    let w = broadened(wg, omega);
    Ok(if include_fk { s * w / wg.omega_c } else { s })
}

/// Frequency derivative of [`g0_truncated`], summed term by term.
pub fn g0_truncated_derivative(
    wg: &WaveguideSpec,
    z: f64,
    zp: f64,
    omega: f64,
    n_modes: usize,
    include_fk: bool,
) -> Result<Complex64> {
    let (s, ds) = truncated_sums(wg, z, zp, omega, n_modes, true)?;
    let w = broadened(wg, omega);
    Ok(if include_fk {
        s / wg.omega_c + ds * w / wg.omega_c
    } else {
        ds
    })
}

/// Returns `(c*sum psi psi/(w - eps), -c*sum psi psi/(w - eps)^2)`, Kahan-compensated.
fn truncated_sums(
    wg: &WaveguideSpec,
    z: f64,
    zp: f64,
    omega: f64,
    n_modes: usize,
    with_derivative: bool,
) -> Result<(Complex64, Complex64)> {
    if n_modes < 1 {
        return Err(Error::Argument("n_modes must be at least 1".into()));
    }
    check_position(wg, z)?;
    check_position(wg, zp)?;
    check_omega(omega)?;
    let half = 0.5 * wg.length;
    if z.abs() == half || zp.abs() == half {
        return Ok((Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)));
    }
    // Ordered arguments make the sum bitwise symmetric.
    let (z, zp) = (z.min(zp), z.max(zp));
    let modes = wg.modes();
    let w = broadened(wg, omega);
    let th = PI * (z + half) / wg.length;
    let thp = PI * (zp + half) / wg.length;
    let norm = 2.0 / wg.length;

    let mut sum = Kahan::default();
    let mut dsum = Kahan::default();
    for l in 1..=n_modes {
        let lf = l as f64;
        let num = norm * (lf * th).sin() * (lf * thp).sin();
        let den = w - modes.epsilon_of(l);
        if den.norm_sqr() == 0.0 {
            return Err(Error::Singular(format!(
                "omega coincides with mode {l} at {} rad/s",
                modes.epsilon_of(l)
            )));
        }
        let inv = den.inv();
        sum.add(inv * num);
        if with_derivative {
            dsum.add(-inv * inv * num);
        }
    }
    Ok((sum.total() * wg.speed_c, dsum.total() * wg.speed_c))
}

#[derive(Default)]
struct Kahan {
    sum: Complex64,
    comp: Complex64,
}

impl Kahan {
    fn add(&mut self, x: Complex64) {
        let y = x - self.comp;
        let t = self.sum + y;
        self.comp = (t - self.sum) - y;
        self.sum = t;
    }

    fn total(&self) -> Complex64 {
        self.sum
    }
}

/// Pole contribution `(omega/wbar) F(z, z'; wbar)` of the mode sum.
pub fn g0_pole(wg: &WaveguideSpec, z: f64, zp: f64, omega: f64) -> Result<Complex64> {
    check_position(wg, z)?;
    check_position(wg, zp)?;
    check_omega(omega)?;
    let w = broadened(wg, omega);
    let wb = wbar(wg, w);
    if wb.norm_sqr() == 0.0 {
        return Err(Error::Singular("omega equals omega_c with eta = 0 (wbar = 0)".into()));
    }
    Ok(w / wb * wall_factor(wg, z, zp, wb)?)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchCut {
    pub value: Complex64,
    pub error_estimate: f64,
    /// Coincident-point closed form (image terms dropped), only for `z == z'`.
    pub closed_form: Option<Complex64>,
}

/// Branch-cut remainder `(1/pi) int_{omega_c}^{omega_hf} sqrt(u^2 - omega_c^2)
/// F(z, z'; u) / (omega^2 + u^2 - omega_c^2) du`.
///
/// Diagnostic only: nothing downstream adds it to the pole term.
pub fn g0_branchcut(
    wg: &WaveguideSpec,
    z: f64,
    zp: f64,
    omega: f64,
    omega_hf: f64,
) -> Result<BranchCut> {
    check_position(wg, z)?;
    check_position(wg, zp)?;
    check_omega(omega)?;
    let wc = wg.omega_c;
    if !(omega_hf > 10.0 * wc) {
        return Err(Error::Argument(format!(
            "omega_hf = {omega_hf} rad/s must exceed 10 omega_c"
        )));
    }
    let w = broadened(wg, omega);
    let w2 = w * w;
    // u = omega_c cosh(lambda)
    let integrand = move |lambda: f64| -> Result<Complex64> {
        let sh = lambda.sinh();
        let u = wc * lambda.cosh();
        let f = wall_factor(wg, z, zp, Complex64::new(u, 0.0))?;
        let s2 = wc * wc * sh * sh;
        Ok(f * s2 / (w2 + s2) / PI)
    };
    // validate once so the closures below can unwrap
    integrand(0.5)?;
    let top = (omega_hf / wc).acosh();
    let re = quad::integrate(&|x| integrand(x).map(|v| v.re).unwrap_or(f64::NAN), 0.0, top, BRANCH_CUT_TOL)?;
    let im = quad::integrate(&|x| integrand(x).map(|v| v.im).unwrap_or(f64::NAN), 0.0, top, BRANCH_CUT_TOL)?;

    let closed_form = (z == zp).then(|| {
        let wb = wbar(wg, w);
        let tail = if wb.norm_sqr() == 0.0 {
            Complex64::new(1.0 / PI, 0.0)
        } else {
            w / wb * (wb / wc).asin() / PI
        };
        tail - (2.0 * omega_hf / wc).ln() / PI
    });
    Ok(BranchCut {
        value: Complex64::new(re.value, im.value),
        error_estimate: re.error_estimate.hypot(im.error_estimate),
        closed_form,
    })
}

/// Long-waveguide limit `-(omega/wbar) exp(-wbar |z-z'|/c)`, stopband only.
pub fn g0_long(wg: &WaveguideSpec, z: f64, zp: f64, omega: f64) -> Result<Complex64> {
    let (w, wb) = long_args(wg, omega)?;
    let a = (z - zp).abs() / wg.speed_c;
    Ok(-w / wb * (-wb * a).exp())
}

pub fn g0_long_derivative(wg: &WaveguideSpec, z: f64, zp: f64, omega: f64) -> Result<Complex64> {
    let (w, wb) = long_args(wg, omega)?;
    let a = (z - zp).abs() / wg.speed_c;
    let w2 = w * w;
    Ok(-(-wb * a).exp() * (wb.inv() + w2 / (wb * wb * wb) + w2 * a / (wb * wb)))
}

fn long_args(wg: &WaveguideSpec, omega: f64) -> Result<(Complex64, Complex64)> {
    check_omega(omega)?;
    if omega >= wg.omega_c {
        return Err(Error::domain(
            "long-waveguide Green's function",
            format!("omega = {omega} rad/s is not below omega_c = {} rad/s", wg.omega_c),
        ));
    }
    let w = broadened(wg, omega);
    Ok((w, wbar(wg, w)))
}

/// Lowest standing-wave resonance alone:
/// `-(c/(L dbar)) [cos(pi|z-z'|/L) - cos(pi|z+z'+L|/L)]`, `dbar = eps_1 - omega`.
pub fn g0_single_mode(wg: &WaveguideSpec, z: f64, zp: f64, omega: f64) -> Result<Complex64> {
    let (dbar, shape) = single_mode_args(wg, z, zp, omega)?;
    Ok(-wg.speed_c / wg.length * shape / dbar)
}

pub fn g0_single_mode_derivative(
    wg: &WaveguideSpec,
    z: f64,
    zp: f64,
    omega: f64,
) -> Result<Complex64> {
    let (dbar, shape) = single_mode_args(wg, z, zp, omega)?;
    Ok(-wg.speed_c / wg.length * shape / (dbar * dbar))
}

fn single_mode_args(wg: &WaveguideSpec, z: f64, zp: f64, omega: f64) -> Result<(Complex64, f64)> {
    check_position(wg, z)?;
    check_position(wg, zp)?;
    check_omega(omega)?;
    let eps1 = wg.modes().epsilon_of(1);
    let dbar = eps1 - broadened(wg, omega);
    if dbar.norm_sqr() == 0.0 {
        return Err(Error::Singular("omega equals the lowest mode frequency".into()));
    }
    // once per process; sweeps would otherwise repeat it for every point
    static WARNED: AtomicBool = AtomicBool::new(false);
    if dbar.norm() > 0.1 * wg.mode_spacing() && !WARNED.swap(true, Ordering::Relaxed) {
        log::warn!(
            "single-mode approximation used {:.3e} rad/s from the lowest mode (mode spacing {:.3e} rad/s)",
            dbar.norm(),
            wg.mode_spacing()
        );
    }
    let k = PI / wg.length;
    let shape = (k * (z - zp).abs()).cos() - (k * (z + zp + wg.length).abs()).cos();
    Ok((dbar, shape))
}
