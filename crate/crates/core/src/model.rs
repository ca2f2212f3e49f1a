//! Physical description of the system: waveguide, ports and qubits.
//!
//! All quantities are SI: angular frequencies in rad/s, lengths in metres.
//! The waveguide occupies `[-L/2, L/2]`.

use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 2.997_924_58e8;

/// Default broadening `eta`: frequencies are evaluated at `omega + i*eta*omega_c`.
pub const DEFAULT_ETA: f64 = 1e-6;

/// Largest supported number of qubits.
pub const MAX_QUBITS: usize = 2;

pub fn ghz(f: f64) -> f64 {
    TAU * f * 1e9
}

pub fn mhz(f: f64) -> f64 {
    TAU * f * 1e6
}

pub fn to_ghz(omega: f64) -> f64 {
    omega / (TAU * 1e9)
}

pub fn to_mhz(omega: f64) -> f64 {
    omega / (TAU * 1e6)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveguideSpec {
    /// Cutoff (band-bottom) angular frequency.
    pub omega_c: f64,
    pub length: f64,
    /// Phase velocity scale `c` in the dispersion `sqrt(c^2 k^2 + omega_c^2)`.
    pub speed_c: f64,
    pub eta: f64,
}

impl WaveguideSpec {
    pub fn new(omega_c: f64, length: f64) -> Result<Self> {
        let wg = WaveguideSpec {
            omega_c,
            length,
            speed_c: SPEED_OF_LIGHT,
            eta: DEFAULT_ETA,
        };
        wg.validate()?;
        Ok(wg)
    }

    pub fn with_eta(mut self, eta: f64) -> Result<Self> {
        self.eta = eta;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega_c.is_finite() && self.omega_c > 0.0) {
            return Err(Error::validation("waveguide.omega_c", "must be positive and finite"));
        }
        if !(self.length.is_finite() && self.length > 0.0) {
            return Err(Error::validation("waveguide.length", "must be positive and finite"));
        }
        if !(self.speed_c.is_finite() && self.speed_c > 0.0) {
            return Err(Error::validation("waveguide.speed_c", "must be positive and finite"));
        }
        if !(self.eta.is_finite() && self.eta >= 0.0) {
            return Err(Error::validation("waveguide.eta", "must be non-negative and finite"));
        }
        Ok(())
    }

    /// One-way transit time `L/c`; it converts between `c*G` and `L*G`.
    pub fn transit_time(&self) -> f64 {
        self.length / self.speed_c
    }

    pub fn contains(&self, z: f64) -> bool {
        z.abs() <= 0.5 * self.length * (1.0 + 1e-12)
    }

    pub fn modes(&self) -> ModeBasis {
        ModeBasis {
            length: self.length,
            speed_c: self.speed_c,
            omega_c: self.omega_c,
        }
    }

    /// Frequency spacing of the lowest modes, `c*pi/L`.
    pub fn mode_spacing(&self) -> f64 {
        self.speed_c * PI / self.length
    }
}

/// Standing-wave eigenmodes of the closed waveguide, `l = 1, 2, ...`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeBasis {
    pub length: f64,
    pub speed_c: f64,
    pub omega_c: f64,
}

impl ModeBasis {
    pub fn k_of(&self, l: usize) -> f64 {
        l as f64 * PI / self.length
    }

    pub fn epsilon_of(&self, l: usize) -> f64 {
        (self.speed_c * self.k_of(l)).hypot(self.omega_c)
    }

    /// `sqrt(2/L) sin(k_l (z + L/2))`, exactly zero at both walls.
    pub fn psi_of(&self, l: usize, z: f64) -> f64 {
        let half = 0.5 * self.length;
        if z == half || z == -half {
            return 0.0;
        }
        (2.0 / self.length).sqrt() * (self.k_of(l) * (z + half)).sin()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PortSpec {
    pub position: f64,
    /// Port coupling rate `Gamma_s`.
    pub gamma: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitSpec {
    pub position: f64,
    pub omega_q: f64,
    /// Non-radiative linewidth.
    pub gamma_a: f64,
    /// Coupling `g`; the effective rate is `g^2 L / c`.
    pub g: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SystemSpec {
    pub waveguide: WaveguideSpec,
    pub port_left: PortSpec,
    pub port_right: PortSpec,
    pub qubits: Vec<QubitSpec>,
}

impl SystemSpec {
    pub fn new(
        waveguide: WaveguideSpec,
        port_left: PortSpec,
        port_right: PortSpec,
        qubits: Vec<QubitSpec>,
    ) -> Result<Self> {
        let sys = SystemSpec {
            waveguide,
            port_left,
            port_right,
            qubits,
        };
        sys.validate()?;
        Ok(sys)
    }

    pub fn validate(&self) -> Result<()> {
        self.waveguide.validate()?;
        let half = 0.5 * self.waveguide.length;
        for (name, port) in [("ports.left", &self.port_left), ("ports.right", &self.port_right)] {
            if !port.position.is_finite() || !self.waveguide.contains(port.position) {
                return Err(Error::validation(
                    format!("{name}.position_z"),
                    format!("{} m lies outside [-{half}, {half}] m", port.position),
                ));
            }
            if !(port.gamma.is_finite() && port.gamma >= 0.0) {
                return Err(Error::validation(format!("{name}.gamma"), "must be non-negative"));
            }
        }
        if !(self.port_left.position < self.port_right.position) {
            return Err(Error::validation(
                "ports.left.position_z",
                format!(
                    "{} m must lie left of ports.right.position_z = {} m",
                    self.port_left.position, self.port_right.position
                ),
            ));
        }
        if self.qubits.len() > MAX_QUBITS {
            return Err(Error::validation(
                "qubits",
                format!("at most {MAX_QUBITS} qubits are supported, got {}", self.qubits.len()),
            ));
        }
        for (i, q) in self.qubits.iter().enumerate() {
            if !q.position.is_finite() || !self.waveguide.contains(q.position) {
                return Err(Error::validation(
                    format!("qubits[{i}].position_z"),
                    format!("{} m lies outside [-{half}, {half}] m", q.position),
                ));
            }
            if !(q.omega_q.is_finite() && q.omega_q > 0.0) {
                return Err(Error::validation(format!("qubits[{i}].omega_q"), "must be positive"));
            }
            if !(q.gamma_a.is_finite() && q.gamma_a >= 0.0) {
                return Err(Error::validation(format!("qubits[{i}].gamma_a"), "must be non-negative"));
            }
            if !(q.g.is_finite() && q.g >= 0.0) {
                return Err(Error::validation(format!("qubits[{i}].g"), "must be non-negative"));
            }
        }
        Ok(())
    }

    pub fn qubit(&self, index: usize) -> Result<&QubitSpec> {
        self.qubits.get(index).ok_or(Error::QubitIndex {
            index,
            count: self.qubits.len(),
        })
    }

    /// `gamma = g^2 L / c` for qubit `index`.
    pub fn gamma_eff(&self, index: usize) -> Result<f64> {
        let q = self.qubit(index)?;
        Ok(q.g * q.g * self.waveguide.transit_time())
    }

    pub fn ports(&self) -> [PortSpec; 2] {
        [self.port_left, self.port_right]
    }
}
