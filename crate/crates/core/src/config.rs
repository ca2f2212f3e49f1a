//! JSON configuration documents in laboratory units (GHz, MHz, mm).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    ghz, mhz, to_ghz, to_mhz, PortSpec, QubitSpec, SystemSpec, WaveguideSpec, DEFAULT_ETA,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigDocument {
    pub waveguide: WaveguideSection,
    pub ports: PortsSection,
    #[serde(default)]
    pub qubits: Vec<QubitSection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WaveguideSection {
    #[serde(rename = "omega_c_GHz")]
    pub omega_c_ghz: f64,
    #[serde(rename = "length_L_mm")]
    pub length_mm: f64,
    #[serde(default = "default_eta")]
    pub eta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PortsSection {
    pub left: PortSection,
    pub right: PortSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PortSection {
    pub z_mm: f64,
    #[serde(rename = "gamma_MHz")]
    pub gamma_mhz: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QubitSection {
    pub z_mm: f64,
    #[serde(rename = "omega_q_GHz")]
    pub omega_q_ghz: f64,
    #[serde(rename = "gamma_a_MHz", default)]
    pub gamma_a_mhz: f64,
    #[serde(rename = "g_MHz")]
    pub g_mhz: f64,
}

fn default_eta() -> f64 {
    DEFAULT_ETA
}

impl ConfigDocument {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::ConfigSyntax {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    }

    pub fn to_system(&self) -> Result<SystemSpec> {
        let waveguide = WaveguideSpec {
            omega_c: ghz(self.waveguide.omega_c_ghz),
            length: self.waveguide.length_mm * 1e-3,
            speed_c: crate::model::SPEED_OF_LIGHT,
            eta: self.waveguide.eta,
        };
        let port = |p: &PortSection| PortSpec {
            position: p.z_mm * 1e-3,
            gamma: mhz(p.gamma_mhz),
        };
        let qubits = self
            .qubits
            .iter()
            .map(|q| QubitSpec {
                position: q.z_mm * 1e-3,
                omega_q: ghz(q.omega_q_ghz),
                gamma_a: mhz(q.gamma_a_mhz),
                g: mhz(q.g_mhz),
            })
            .collect();
        SystemSpec::new(waveguide, port(&self.ports.left), port(&self.ports.right), qubits)
    }
}

impl From<&SystemSpec> for ConfigDocument {
    fn from(sys: &SystemSpec) -> Self {
        let port = |p: &PortSpec| PortSection {
            z_mm: p.position * 1e3,
            gamma_mhz: to_mhz(p.gamma),
        };
        ConfigDocument {
            waveguide: WaveguideSection {
                omega_c_ghz: to_ghz(sys.waveguide.omega_c),
                length_mm: sys.waveguide.length * 1e3,
                eta: sys.waveguide.eta,
            },
            ports: PortsSection {
                left: port(&sys.port_left),
                right: port(&sys.port_right),
            },
            qubits: sys
                .qubits
                .iter()
                .map(|q| QubitSection {
                    z_mm: q.position * 1e3,
                    omega_q_ghz: to_ghz(q.omega_q),
                    gamma_a_mhz: to_mhz(q.gamma_a),
                    g_mhz: to_mhz(q.g),
                })
                .collect(),
        }
    }
}

/// Parse and validate a JSON configuration.
pub fn from_config(text: &str) -> Result<SystemSpec> {
    ConfigDocument::parse(text)?.to_system()
}

/// Serialize a system back to a JSON configuration document.
pub fn to_config(sys: &SystemSpec) -> String {
    serde_json::to_string_pretty(&ConfigDocument::from(sys)).expect("config document is always serializable")
}
