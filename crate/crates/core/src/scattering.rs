//! Port-dressed propagator, qubit self-energies and the transmission amplitude `S_RL`.
//!
//! Conventions: `tau = L/c`, so a product `L G` of the continuum formulas is `tau * (c G)`.

use num_complex::{Complex, Complex64};
use rayon::prelude::*;
use twofloat::TwoFloat;

use crate::error::{Error, Result};
use crate::greens::GreensProvider;
use crate::model::{ghz, SystemSpec};

const I: Complex64 = Complex64::new(0.0, 1.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Below this `|D|` the port-dressing denominator is treated as singular.
pub const MIN_DENOMINATOR: f64 = 1e-30;
/// Condition number above which a dressed qubit propagator is flagged.
pub const MAX_CONDITION: f64 = 1e14;

/// Complex matrix over the qubit indices, 1x1 or 2x2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitMatrix2 {
    pub dim: usize,
    pub data: [[Complex64; 2]; 2],
}

impl QubitMatrix2 {
    pub fn zeros(dim: usize) -> Self {
        assert!((1..=2).contains(&dim), "qubit matrices are 1x1 or 2x2");
        QubitMatrix2 {
            dim,
            data: [[ZERO; 2]; 2],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i][i] = ONE;
        }
        m
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i][j]
    }

    pub fn det(&self) -> Complex64 {
        match self.dim {
            1 => self.data[0][0],
            _ => self.data[0][0] * self.data[1][1] - self.data[0][1] * self.data[1][0],
        }
    }

    /// Inverse through the adjugate; `None` if the determinant is exactly zero.
    pub fn inverse(&self) -> Option<Self> {
        let det = self.det();
        if det.norm_sqr() == 0.0 {
            return None;
        }
        let mut out = Self::zeros(self.dim);
        match self.dim {
            1 => out.data[0][0] = det.inv(),
            _ => {
                let m = &self.data;
                out.data = [[m[1][1] / det, -m[0][1] / det], [-m[1][0] / det, m[0][0] / det]];
            }
        }
        Some(out)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                out.data[i][j] = (0..self.dim).map(|k| self.data[i][k] * other.data[k][j]).sum();
            }
        }
        out
    }

    pub fn frobenius(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                s += self.data[i][j].norm_sqr();
            }
        }
        s.sqrt()
    }
}

// The dressing and the qubit sums subtract quantities of order |c*G0| to leave results that
// can be many orders smaller near standing-wave resonances, so that algebra runs in
// double-double and only the rounded result leaves this module.
type Cdd = Complex<TwoFloat>;

fn dd(z: Complex64) -> Cdd {
    Complex::new(TwoFloat::from_f64(z.re), TwoFloat::from_f64(z.im))
}

fn dd_real(x: f64) -> Cdd {
    Complex::new(TwoFloat::from_f64(x), TwoFloat::from_f64(0.0))
}

fn round(z: Cdd) -> Complex64 {
    Complex64::new(z.re.hi(), z.im.hi())
}

/// `TwoFloat`'s own division forms its residual without an fma and is only f64-accurate,
/// so quotients take one correction step by hand.
fn dd_div(a: TwoFloat, b: TwoFloat) -> TwoFloat {
    let q0 = TwoFloat::from_f64(a.hi() / b.hi());
    let r = a - q0 * b;
    let q1 = q0 + TwoFloat::from_f64(r.hi() / b.hi());
    let r = a - q1 * b;
    q1 + TwoFloat::from_f64(r.hi() / b.hi())
}

fn cdiv(a: Cdd, b: Cdd) -> Cdd {
    let norm = b.re * b.re + b.im * b.im;
    let num = a * b.conj();
    Complex::new(dd_div(num.re, norm), dd_div(num.im, norm))
}

fn is_zero(z: &Cdd) -> bool {
    z.re == 0.0 && z.im == 0.0
}

/// `c*G0` sampled at the two ports for one frequency, enough to dress any pair of points.
pub struct PortDressing<'a> {
    system: &'a SystemSpec,
    provider: &'a dyn GreensProvider,
    omega: f64,
    /// `u_s = -i Gamma_s tau`
    u_l: Cdd,
    u_r: Cdd,
    g_rr: Cdd,
    g_ll: Cdd,
    g_rl: Cdd,
    g_lr: Cdd,
    denominator: Cdd,
}

impl<'a> PortDressing<'a> {
    pub fn new(system: &'a SystemSpec, provider: &'a dyn GreensProvider, omega: f64) -> Result<Self> {
        let (zl, zr) = (system.port_left.position, system.port_right.position);
        let tau = system.waveguide.transit_time();
        let u_l = -dd(I * system.port_left.gamma) * dd_real(tau);
        let u_r = -dd(I * system.port_right.gamma) * dd_real(tau);
        let g_rr = dd(provider.eval(zr, zr, omega)?);
        let g_ll = dd(provider.eval(zl, zl, omega)?);
        let g_rl = dd(provider.eval(zr, zl, omega)?);
        let g_lr = dd(provider.eval(zl, zr, omega)?);
        let one = dd_real(1.0);
        // (1 + i Gamma_R tau G_RR)(1 + i Gamma_L tau G_LL) + tau^2 Gamma_R Gamma_L G_RL G_LR
        let denominator = (one - u_r * g_rr) * (one - u_l * g_ll) - u_r * u_l * g_rl * g_lr;
        let norm = round(denominator).norm();
        if !(norm >= MIN_DENOMINATOR) {
            return Err(Error::Singular(format!(
                "port-dressing denominator |D| = {norm:.3e} at omega = {omega} rad/s"
            )));
        }
        Ok(PortDressing {
            system,
            provider,
            omega,
            u_l,
            u_r,
            g_rr,
            g_ll,
            g_rl,
            g_lr,
            denominator,
        })
    }

    pub fn denominator(&self) -> Complex64 {
        round(self.denominator)
    }

    /// Dressed `c*Gp(z, z')`.
    pub fn eval(&self, z: f64, zp: f64) -> Result<Complex64> {
        self.eval_dd(z, zp).map(round)
    }

    fn eval_dd(&self, z: f64, zp: f64) -> Result<Cdd> {
        let p = self.provider;
        let w = self.omega;
        let g0 = dd(p.eval(z, zp, w)?);
        if is_zero(&self.u_l) && is_zero(&self.u_r) {
            return Ok(g0);
        }
        let (zl, zr) = (self.system.port_left.position, self.system.port_right.position);
        let (g_zl, g_zr) = (dd(p.eval(z, zl, w)?), dd(p.eval(z, zr, w)?));
        let (g_lz, g_rz) = (dd(p.eval(zl, zp, w)?), dd(p.eval(zr, zp, w)?));
        let one = dd_real(1.0);
        let (ul, ur) = (self.u_l, self.u_r);
        // The five correction terms, grouped as v^T adj(1 - U G) U w / D.
        let y_l = (one - ur * self.g_rr) * ul * g_lz + ul * self.g_lr * ur * g_rz;
        let y_r = ur * self.g_rl * ul * g_lz + (one - ul * self.g_ll) * ur * g_rz;
        Ok(g0 + cdiv(g_zl * y_l + g_zr * y_r, self.denominator))
    }
}

/// Port-dressed `c*Gp(z, z'; omega)` (exact in the port couplings).
pub fn gp(system: &SystemSpec, provider: &dyn GreensProvider, z: f64, zp: f64, omega: f64) -> Result<Complex64> {
    PortDressing::new(system, provider, omega)?.eval(z, zp)
}

/// First order in the port couplings.
pub fn gp_weak(system: &SystemSpec, provider: &dyn GreensProvider, z: f64, zp: f64, omega: f64) -> Result<Complex64> {
    let tau = system.waveguide.transit_time();
    let mut out = provider.eval(z, zp, omega)?;
    for port in system.ports() {
        if port.gamma != 0.0 {
            let s = port.position;
            out -= I * tau * port.gamma * provider.eval(z, s, omega)? * provider.eval(s, zp, omega)?;
        }
    }
    Ok(out)
}

/// `Sigma_jj' = g_j g_j' tau c*G(z_j, z_j')`, with the port-dressed propagator if `dressed`.
pub fn qubit_self_energy(
    system: &SystemSpec,
    provider: &dyn GreensProvider,
    omega: f64,
    dressed: bool,
) -> Result<QubitMatrix2> {
    let n = system.qubits.len();
    if n == 0 {
        return Err(Error::EmptySystem);
    }
    let dressing = if dressed {
        Some(PortDressing::new(system, provider, omega)?)
    } else {
        None
    };
    let tau = system.waveguide.transit_time();
    let mut sigma = QubitMatrix2::zeros(n);
    for i in 0..n {
        for j in i..n {
            let (qi, qj) = (&system.qubits[i], &system.qubits[j]);
            let g = match &dressing {
                Some(d) => d.eval(qi.position, qj.position)?,
                None => provider.eval(qi.position, qj.position, omega)?,
            };
            sigma.data[i][j] = qi.g * qj.g * tau * g;
            sigma.data[j][i] = sigma.data[i][j];
        }
    }
    Ok(sigma)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DressedQubitGreen {
    pub matrix: QubitMatrix2,
    /// `Ghat^-1 = diag(omega - omega_q + i gamma_a/2) - Sigma`.
    pub inverse: QubitMatrix2,
    pub condition: f64,
    pub near_singular: bool,
}

fn invert_dressed(system: &SystemSpec, omega: f64, sigma: &QubitMatrix2) -> Result<DressedQubitGreen> {
    let mut inverse = QubitMatrix2::zeros(sigma.dim);
    for (j, q) in system.qubits.iter().enumerate() {
        for k in 0..sigma.dim {
            inverse.data[j][k] = -sigma.data[j][k];
        }
        inverse.data[j][j] += Complex64::new(omega - q.omega_q, 0.5 * q.gamma_a);
    }
    let matrix = inverse.inverse().ok_or_else(|| {
        Error::Singular(format!("dressed qubit propagator has a pole at omega = {omega} rad/s"))
    })?;
    let (condition, near_singular) = warn_if_near_singular(&inverse, omega);
    Ok(DressedQubitGreen {
        matrix,
        inverse,
        condition,
        near_singular,
    })
}

fn warn_if_near_singular(inverse: &QubitMatrix2, omega: f64) -> (f64, bool) {
    let condition = match inverse.inverse() {
        Some(m) => inverse.frobenius() * m.frobenius(),
        None => f64::INFINITY,
    };
    let near_singular = !(condition <= MAX_CONDITION);
    if near_singular {
        log::warn!("dressed qubit propagator near-singular (condition {condition:.3e}) at omega = {omega}");
    }
    (condition, near_singular)
}

/// `Ghat = (Ghat0^-1 - Sigma)^-1` with the port-dressed self-energy.
pub fn dressed_qubit_green(
    system: &SystemSpec,
    provider: &dyn GreensProvider,
    omega: f64,
) -> Result<DressedQubitGreen> {
    let sigma = qubit_self_energy(system, provider, omega, true)?;
    invert_dressed(system, omega, &sigma)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transmission {
    pub amplitude: Complex64,
}

impl Transmission {
    pub fn power(&self) -> f64 {
        self.amplitude.norm_sqr()
    }

    pub fn db(&self) -> f64 {
        10.0 * self.power().log10()
    }
}

/// `S_RL` through the dressed qubit propagator.
pub fn s_rl(system: &SystemSpec, provider: &dyn GreensProvider, omega: f64) -> Result<Transmission> {
    let dressing = PortDressing::new(system, provider, omega)?;
    let (zl, zr) = (system.port_left.position, system.port_right.position);
    let tau = system.waveguide.transit_time();
    let prefactor = -2.0 * I * tau * (system.port_left.gamma * system.port_right.gamma).sqrt();
    let mut amp = dressing.eval_dd(zr, zl)?;

    let qubits = &system.qubits;
    if qubits.iter().any(|q| q.g != 0.0) {
        let n = qubits.len();
        // inverse = diag(omega - omega_q + i gamma_a/2) - Sigma
        let mut inverse = [[dd_real(0.0); 2]; 2];
        for i in 0..n {
            for j in i..n {
                let g = dressing.eval_dd(qubits[i].position, qubits[j].position)?;
                inverse[i][j] = -(dd_real(qubits[i].g) * dd_real(qubits[j].g) * dd_real(tau) * g);
                inverse[j][i] = inverse[i][j];
            }
            inverse[i][i] += dd(Complex64::new(omega - qubits[i].omega_q, 0.5 * qubits[i].gamma_a));
        }
        let det = if n == 1 {
            inverse[0][0]
        } else {
            inverse[0][0] * inverse[1][1] - inverse[0][1] * inverse[1][0]
        };
        if is_zero(&det) {
            return Err(Error::Singular(format!("dressed qubit propagator has a pole at omega = {omega} rad/s")));
        }
        let adjugate = if n == 1 {
            [[dd_real(1.0), dd_real(0.0)], [dd_real(0.0), dd_real(0.0)]]
        } else {
            [[inverse[1][1], -inverse[0][1]], [-inverse[1][0], inverse[0][0]]]
        };
        warn_if_near_singular(
            &QubitMatrix2 {
                dim: n,
                data: inverse.map(|row| row.map(round)),
            },
            omega,
        );
        let to_r: Vec<Cdd> = qubits
            .iter()
            .map(|q| dressing.eval_dd(zr, q.position))
            .collect::<Result<_>>()?;
        let from_l: Vec<Cdd> = qubits
            .iter()
            .map(|q| dressing.eval_dd(q.position, zl))
            .collect::<Result<_>>()?;
        let mut sum = dd_real(0.0);
        for j in 0..n {
            for k in 0..n {
                sum += dd_real(qubits[j].g) * dd_real(qubits[k].g) * to_r[j] * adjugate[j][k] * from_l[k];
            }
        }
        amp += cdiv(dd_real(tau) * sum, det);
    }
    Ok(Transmission {
        amplitude: prefactor * round(amp),
    })
}

/// `S_RL` from the full propagator, treating ports and qubits alike as point scatterers
/// `G = G0 + G0 T G0` on the points {left port, right port, qubits}.
pub fn s_rl_full_green(system: &SystemSpec, provider: &dyn GreensProvider, omega: f64) -> Result<Transmission> {
    let tau = system.waveguide.transit_time();
    let (zl, zr) = (system.port_left.position, system.port_right.position);
    let mut points = vec![zl, zr];
    let mut strength = vec![
        -dd(I * system.port_left.gamma) * dd_real(tau),
        -dd(I * system.port_right.gamma) * dd_real(tau),
    ];
    for q in &system.qubits {
        points.push(q.position);
        let bare = Complex64::new(omega - q.omega_q, 0.5 * q.gamma_a);
        if bare.norm_sqr() == 0.0 {
            return Err(Error::Singular(format!("bare qubit pole at omega = {omega} rad/s")));
        }
        strength.push(cdiv(dd_real(tau) * dd_real(q.g) * dd_real(q.g), dd(bare)));
    }
    let n = points.len();
    let mut g0 = vec![vec![dd_real(0.0); n]; n];
    for i in 0..n {
        for j in i..n {
            g0[i][j] = dd(provider.eval(points[i], points[j], omega)?);
            g0[j][i] = g0[i][j];
        }
    }
    // (1 - U G0) x = U G0(., z_L);  G(z_R, z_L) = G0(z_R, z_L) + G0(z_R, .) x
    let mut a = vec![vec![dd_real(0.0); n]; n];
    let mut rhs = vec![dd_real(0.0); n];
    for i in 0..n {
        for j in 0..n {
            a[i][j] = dd_real(if i == j { 1.0 } else { 0.0 }) - strength[i] * g0[i][j];
        }
        rhs[i] = strength[i] * g0[i][0];
    }
    let x = solve_dense(a, rhs)
        .ok_or_else(|| Error::Singular(format!("point-scatterer system singular at omega = {omega}")))?;
    let mut full = g0[1][0];
    for p in 0..n {
        full += g0[1][p] * x[p];
    }
    let prefactor = -2.0 * I * tau * (system.port_left.gamma * system.port_right.gamma).sqrt();
    Ok(Transmission {
        amplitude: prefactor * round(full),
    })
}

/// Gaussian elimination with partial pivoting.
fn solve_dense(mut a: Vec<Vec<Cdd>>, mut b: Vec<Cdd>) -> Option<Vec<Cdd>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| round(a[i][col]).norm().total_cmp(&round(a[j][col]).norm()))?;
        if is_zero(&a[pivot][col]) {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let f = cdiv(a[row][col], a[col][col]);
            let (top, bottom) = a.split_at_mut(row);
            for (r, p) in bottom[0][col..].iter_mut().zip(&top[col][col..]) {
                *r -= f * *p;
            }
            let pivot_b = b[col];
            b[row] -= f * pivot_b;
        }
    }
    let mut x = vec![dd_real(0.0); n];
    for row in (0..n).rev() {
        let mut s = b[row];
        for k in row + 1..n {
            s -= a[row][k] * x[k];
        }
        x[row] = cdiv(s, a[row][row]);
    }
    Some(x)
}

/// Transmission on a uniform frequency grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexSpectrum {
    pub f_ghz: Vec<f64>,
    pub omega: Vec<f64>,
    /// NaN where the evaluation failed.
    pub values: Vec<Complex64>,
    /// Error message per failed point.
    pub failures: Vec<Option<String>>,
}

impl ComplexSpectrum {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn power(&self) -> Vec<f64> {
        self.values.iter().map(|s| s.norm_sqr()).collect()
    }

    pub fn n_failed(&self) -> usize {
        self.failures.iter().filter(|f| f.is_some()).count()
    }
}

/// `n_points` frequencies from `f_min` to `f_max` GHz inclusive, endpoints exact.
pub fn uniform_grid(f_min: f64, f_max: f64, n_points: usize) -> Result<Vec<f64>> {
    if !(f_min < f_max) || !f_min.is_finite() || !f_max.is_finite() {
        return Err(Error::Argument(format!("need f_min < f_max, got {f_min} and {f_max}")));
    }
    if n_points < 2 {
        return Err(Error::Argument("a sweep needs at least 2 points".into()));
    }
    let last = n_points - 1;
    Ok((0..n_points)
        .map(|i| {
            if i == last {
                f_max
            } else {
                f_min + (f_max - f_min) * i as f64 / last as f64
            }
        })
        .collect())
}

/// Parallel sweep of [`s_rl`]; failed points are recorded instead of aborting.
pub fn s_rl_spectrum(
    system: &SystemSpec,
    provider: &dyn GreensProvider,
    f_min: f64,
    f_max: f64,
    n_points: usize,
) -> Result<ComplexSpectrum> {
    let f_ghz = uniform_grid(f_min, f_max, n_points)?;
    let omega: Vec<f64> = f_ghz.iter().map(|&f| ghz(f)).collect();
    let results: Vec<Result<Transmission>> = omega.par_iter().map(|&w| s_rl(system, provider, w)).collect();
    let nan = Complex64::new(f64::NAN, f64::NAN);
    let mut values = Vec::with_capacity(n_points);
    let mut failures = Vec::with_capacity(n_points);
    for r in results {
        match r {
            Ok(t) => {
                values.push(t.amplitude);
                failures.push(None);
            }
            Err(e) => {
                values.push(nan);
                failures.push(Some(e.to_string()));
            }
        }
    }
    Ok(ComplexSpectrum {
        f_ghz,
        omega,
        values,
        failures,
    })
}
