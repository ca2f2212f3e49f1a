#![allow(dead_code)]

use num_complex::Complex64;
use wqed_core::model::{ghz, mhz, PortSpec, QubitSpec, SystemSpec, WaveguideSpec};

/// Cutoff of the measured device, 6.5213 GHz.
pub const OMEGA_C_GHZ: f64 = 6.5213;

pub fn guide(length: f64) -> WaveguideSpec {
    WaveguideSpec::new(ghz(OMEGA_C_GHZ), length).unwrap()
}

pub fn exact_guide(length: f64) -> WaveguideSpec {
    guide(length).with_eta(0.0).unwrap()
}

/// Ports `edge` metres inside each wall.
pub fn ports(wg: &WaveguideSpec, edge: f64, gamma_mhz: f64) -> (PortSpec, PortSpec) {
    let h = 0.5 * wg.length;
    (
        PortSpec {
            position: -h + edge,
            gamma: mhz(gamma_mhz),
        },
        PortSpec {
            position: h - edge,
            gamma: mhz(gamma_mhz),
        },
    )
}

pub fn qubit(position: f64, omega_q_ghz: f64, g_mhz: f64, gamma_a_mhz: f64) -> QubitSpec {
    QubitSpec {
        position,
        omega_q: ghz(omega_q_ghz),
        gamma_a: mhz(gamma_a_mhz),
        g: mhz(g_mhz),
    }
}

pub fn system(wg: WaveguideSpec, edge: f64, gamma_mhz: f64, qubits: Vec<QubitSpec>) -> SystemSpec {
    let (l, r) = ports(&wg, edge, gamma_mhz);
    SystemSpec::new(wg, l, r, qubits).unwrap()
}

pub fn rel_err(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / a.norm().max(b.norm())
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs())
}

/// Least-squares slope of `y` against `x`.
pub fn slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

/// Port-dressed propagator by brute force: dense solve of
/// `(omega - eps_k) x_k - sum_k' Sigma_kk' x_k' = psi_k(z')` in the lowest `n` modes,
/// `Sigma_kk' = -i L sum_s Gamma_s psi_k(z_s) psi_k'(z_s)`.
pub fn dyson_oracle(sys: &SystemSpec, z: f64, zp: f64, omega: f64, n: usize) -> Complex64 {
    use nalgebra::{DMatrix, DVector};
    let wg = &sys.waveguide;
    let modes = wg.modes();
    let w = Complex64::new(omega, wg.eta * wg.omega_c);
    let port_amp: Vec<Vec<f64>> = sys
        .ports()
        .iter()
        .map(|p| (1..=n).map(|k| modes.psi_of(k, p.position)).collect())
        .collect();
    let gammas: Vec<f64> = sys.ports().iter().map(|p| p.gamma).collect();
    let mut m = DMatrix::<Complex64>::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let mut s = 0.0;
            for (amp, g) in port_amp.iter().zip(&gammas) {
                s += g * amp[i] * amp[j];
            }
            m[(i, j)] = Complex64::new(0.0, wg.length * s);
        }
        m[(i, i)] += w - modes.epsilon_of(i + 1);
    }
    let rhs = DVector::from_iterator(n, (1..=n).map(|k| Complex64::new(modes.psi_of(k, zp), 0.0)));
    let x = m.lu().solve(&rhs).expect("dense Dyson matrix is invertible");
    let mut out = Complex64::new(0.0, 0.0);
    for k in 0..n {
        out += modes.psi_of(k + 1, z) * x[k];
    }
    out * wg.speed_c
}
