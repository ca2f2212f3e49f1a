//! Tight-binding chain of coupled cavities: `N` sites at `z_n = n a`, `n = 1..N`,
//! hopping `t`, band `omega_c + 2t - 2t cos(k a)`.
//!
//! Functions here return `G` itself (units 1/(rad/s * m)); multiply by `c` to compare
//! with the continuum routines.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::DEFAULT_ETA;
use crate::quad;

/// Below this ratio `4t/delta` the broadband form is flagged as unreliable.
pub const BROADBAND_VALIDITY: f64 = 20.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeSpec {
    pub n_sites: usize,
    pub hopping: f64,
    pub spacing: f64,
    /// Band bottom.
    pub omega_c: f64,
    pub eta: f64,
}

impl LatticeSpec {
    pub fn new(n_sites: usize, hopping: f64, spacing: f64, omega_c: f64) -> Result<Self> {
        let lat = LatticeSpec {
            n_sites,
            hopping,
            spacing,
            omega_c,
            eta: DEFAULT_ETA,
        };
        lat.validate()?;
        Ok(lat)
    }

    pub fn with_eta(mut self, eta: f64) -> Result<Self> {
        self.eta = eta;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_sites < 1 {
            return Err(Error::validation("lattice.n_sites", "must be at least 1"));
        }
        for (name, v) in [
            ("lattice.hopping", self.hopping),
            ("lattice.spacing", self.spacing),
            ("lattice.omega_c", self.omega_c),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::validation(name, "must be positive and finite"));
            }
        }
        if !(self.eta.is_finite() && self.eta >= 0.0) {
            return Err(Error::validation("lattice.eta", "must be non-negative"));
        }
        Ok(())
    }

    /// `(N + 1) a`.
    pub fn length(&self) -> f64 {
        (self.n_sites as f64 + 1.0) * self.spacing
    }

    pub fn k_of(&self, l: usize) -> f64 {
        l as f64 * PI / self.length()
    }

    pub fn epsilon_of(&self, l: usize) -> f64 {
        self.omega_c + 2.0 * self.hopping * (1.0 - (self.k_of(l) * self.spacing).cos())
    }

    pub fn psi_of(&self, l: usize, n: usize) -> f64 {
        (2.0 / self.length()).sqrt() * (self.k_of(l) * n as f64 * self.spacing).sin()
    }

    fn check_site(&self, n: usize) -> Result<()> {
        if n >= 1 && n <= self.n_sites {
            Ok(())
        } else {
            Err(Error::SiteIndex {
                site: n as i64,
                n_sites: self.n_sites,
            })
        }
    }
}

fn mode_sums(lat: &LatticeSpec, n: usize, np: usize, omega: f64, power: i32) -> Result<Complex64> {
    lat.check_site(n)?;
    lat.check_site(np)?;
    let w = Complex64::new(omega, lat.eta * lat.omega_c);
    let mut sum = Complex64::new(0.0, 0.0);
    for l in 1..=lat.n_sites {
        let den = w - lat.epsilon_of(l);
        if den.norm_sqr() == 0.0 {
            return Err(Error::Singular(format!("omega coincides with lattice mode {l}")));
        }
        sum += lat.psi_of(l, n) * lat.psi_of(l, np) * den.powi(-power);
    }
    Ok(sum)
}

/// Exact finite sum `sum_l psi_l(n) psi_l(n') / (omega - eps_l)`.
pub fn lattice_g0(lat: &LatticeSpec, n: usize, np: usize, omega: f64) -> Result<Complex64> {
    mode_sums(lat, n, np, omega, 1)
}

pub fn lattice_g0_derivative(lat: &LatticeSpec, n: usize, np: usize, omega: f64) -> Result<Complex64> {
    Ok(-mode_sums(lat, n, np, omega, 2)?)
}

fn check_detuning(delta: f64) -> Result<()> {
    if delta.is_finite() && delta > 0.0 {
        Ok(())
    } else {
        Err(Error::domain(
            "lattice detuning",
            format!("delta = omega_c - omega = {delta} rad/s must be positive"),
        ))
    }
}

/// Infinite-chain integral
/// `I_n = (1/(pi a)) int_0^pi cos(n theta) / (2t cos(theta) - 2t - delta) d theta`
/// in closed form.
pub fn lattice_i(lat: &LatticeSpec, n_bar: u32, delta: f64) -> Result<f64> {
    check_detuning(delta)?;
    let t = lat.hopping;
    let root = ((4.0 * t + delta) * delta).sqrt();
    let ratio = 2.0 * t / (2.0 * t + delta + root);
    Ok(-ratio.powi(n_bar as i32) / (lat.spacing * root))
}

/// The defining integral of [`lattice_i`] by adaptive quadrature.
pub fn lattice_i_quadrature(lat: &LatticeSpec, n_bar: u32, delta: f64, abs_tol: f64) -> Result<f64> {
    check_detuning(delta)?;
    let t = lat.hopping;
    let n = n_bar as f64;
    // scaled by 1/t so the integrand is O(1)
    let f = |th: f64| (n * th).cos() / (2.0 * th.cos() - 2.0 - delta / t);
    let scale = PI * lat.spacing * t;
    let r = quad::integrate(&f, 0.0, PI, abs_tol * scale)?;
    Ok(r.value / scale)
}

/// Broad-band approximation `-exp(-|n-n'| sqrt(delta/t)) / (a sqrt(4 t delta))`.
pub fn lattice_g0_broadband(lat: &LatticeSpec, n: usize, np: usize, delta: f64) -> Result<f64> {
    lat.check_site(n)?;
    lat.check_site(np)?;
    check_detuning(delta)?;
    let t = lat.hopping;
    if 4.0 * t <= BROADBAND_VALIDITY * delta {
        log::warn!("broadband lattice form used with 4t/delta = {:.2}", 4.0 * t / delta);
    }
    let nbar = n.abs_diff(np) as f64;
    Ok(-(-nbar * (delta / t).sqrt()).exp() / (lat.spacing * (4.0 * t * delta).sqrt()))
}

/// `m_eff = 1/(2 t a^2)` at the band bottom.
pub fn effective_mass(lat: &LatticeSpec) -> f64 {
    1.0 / (2.0 * lat.hopping * lat.spacing * lat.spacing)
}

/// Hopping that reproduces the waveguide band-bottom mass `omega_c / c^2`.
pub fn hopping_for_mass(omega_c: f64, speed_c: f64, spacing: f64) -> f64 {
    speed_c * speed_c / (2.0 * omega_c * spacing * spacing)
}

/// Spatial decay constant `sqrt(delta/t)/a` of the broadband form, per metre.
pub fn lattice_decay_constant(lat: &LatticeSpec, delta: f64) -> Result<f64> {
    check_detuning(delta)?;
    Ok((delta / lat.hopping).sqrt() / lat.spacing)
}

/// Continuum decay constant `sqrt(2 m delta)` for a quadratic band of mass `m`.
pub fn quadratic_band_decay_constant(mass: f64, delta: f64) -> Result<f64> {
    check_detuning(delta)?;
    Ok((2.0 * mass * delta).sqrt())
}
