//! Interchangeable waveguide models behind one evaluation interface.

use std::fmt;

use num_complex::Complex64;

use super::continuum;
use super::lattice::{self, LatticeSpec};
use crate::error::{Error, Result};
use crate::model::WaveguideSpec;

/// Relative step of the default central-difference frequency derivative.
pub const DERIVATIVE_STEP: f64 = 1e-7;

/// Evaluates `c*G0(z, z'; omega)` for some waveguide model.
pub trait GreensProvider: Send + Sync {
    fn eval(&self, z: f64, zp: f64, omega: f64) -> Result<Complex64>;

    /// Frequency scale setting the finite-difference step (normally `omega_c`).
    fn omega_scale(&self) -> f64;

    fn name(&self) -> String;

    /// `d/d omega` of [`eval`](Self::eval). Central difference unless overridden.
    fn derivative(&self, z: f64, zp: f64, omega: f64) -> Result<Complex64> {
        central_difference(self, z, zp, omega, DERIVATIVE_STEP * self.omega_scale())
    }
}

pub fn central_difference<P: GreensProvider + ?Sized>(
    provider: &P,
    z: f64,
    zp: f64,
    omega: f64,
    h: f64,
) -> Result<Complex64> {
    let up = provider.eval(z, zp, omega + h)?;
    let down = provider.eval(z, zp, omega - h)?;
    Ok((up - down) / (2.0 * h))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoleGreens(pub WaveguideSpec);

impl GreensProvider for PoleGreens {
    fn eval(&self, z: f64, zp: f64, omega: f64) -> Result<Complex64> {
        continuum::g0_pole(&self.0, z, zp, omega)
    }
    fn omega_scale(&self) -> f64 {
        self.0.omega_c
    }
    fn name(&self) -> String {
        "pole".into()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncatedGreens {
    pub waveguide: WaveguideSpec,
    pub n_modes: usize,
    pub include_fk: bool,
}

impl TruncatedGreens {
    pub fn new(waveguide: WaveguideSpec, n_modes: usize) -> Self {
        TruncatedGreens {
            waveguide,
            n_modes,
            include_fk: false,
        }
    }
}

impl GreensProvider for TruncatedGreens {
    fn eval(&self, z: f64, zp: f64, omega: f64) -> Result<Complex64> {
        continuum::g0_truncated(&self.waveguide, z, zp, omega, self.n_modes, self.include_fk)
    }
    fn derivative(&self, z: f64, zp: f64, omega: f64) -> Result<Complex64> {
        continuum::g0_truncated_derivative(&self.waveguide, z, zp, omega, self.n_modes, self.include_fk)
    }
    fn omega_scale(&self) -> f64 {
        self.waveguide.omega_c
    }
    fn name(&self) -> String {
        format!("truncated({})", self.n_modes)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LongGreens(pub WaveguideSpec);

impl GreensProvider for LongGreens {
    fn eval(&self, z: f64, zp: f64, omega: f64) -> Result<Complex64> {
        continuum::g0_long(&self.0, z, zp, omega)
    }
    fn derivative(&self, z: f64, zp: f64, omega: f64) -> Result<Complex64> {
        continuum::g0_long_derivative(&self.0, z, zp, omega)
    }
    fn omega_scale(&self) -> f64 {
        self.0.omega_c
    }
    fn name(&self) -> String {
        "long".into()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingleModeGreens(pub WaveguideSpec);

impl GreensProvider for SingleModeGreens {
    fn eval(&self, z: f64, zp: f64, omega: f64) -> Result<Complex64> {
        continuum::g0_single_mode(&self.0, z, zp, omega)
    }
    fn derivative(&self, z: f64, zp: f64, omega: f64) -> Result<Complex64> {
        continuum::g0_single_mode_derivative(&self.0, z, zp, omega)
    }
    fn omega_scale(&self) -> f64 {
        self.0.omega_c
    }
    fn name(&self) -> String {
        "single-mode".into()
    }
}

/// Tight-binding chain standing in for the waveguide.
///
/// A waveguide coordinate `z` maps to the nearest site of `z + L/2 = n a`; the
/// walls map to the empty sites `0` and `N + 1` where every amplitude vanishes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeGreens {
    pub lattice: LatticeSpec,
    pub speed_c: f64,
}

impl LatticeGreens {
    pub fn site_of(&self, z: f64) -> Result<usize> {
        let lat = &self.lattice;
        let x = (z + 0.5 * lat.length()) / lat.spacing;
        let n = x.round();
        if !(n >= 0.0 && n <= (lat.n_sites + 1) as f64) {
            return Err(Error::SiteIndex {
                site: n as i64,
                n_sites: lat.n_sites,
            });
        }
        Ok(n as usize)
    }

    fn wall(&self, n: usize) -> bool {
        n == 0 || n == self.lattice.n_sites + 1
    }
}

impl GreensProvider for LatticeGreens {
    fn eval(&self, z: f64, zp: f64, omega: f64) -> Result<Complex64> {
        let (n, np) = (self.site_of(z)?, self.site_of(zp)?);
        if self.wall(n) || self.wall(np) {
            return Ok(Complex64::new(0.0, 0.0));
        }
        Ok(lattice::lattice_g0(&self.lattice, n, np, omega)? * self.speed_c)
    }
    fn derivative(&self, z: f64, zp: f64, omega: f64) -> Result<Complex64> {
        let (n, np) = (self.site_of(z)?, self.site_of(zp)?);
        if self.wall(n) || self.wall(np) {
            return Ok(Complex64::new(0.0, 0.0));
        }
        Ok(lattice::lattice_g0_derivative(&self.lattice, n, np, omega)? * self.speed_c)
    }
    fn omega_scale(&self) -> f64 {
        self.lattice.omega_c
    }
    fn name(&self) -> String {
        format!("lattice({})", self.lattice.n_sites)
    }
}

/// Provider selection by name, as used on the command line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProviderKind {
    Pole,
    Truncated { n_modes: usize },
    Long,
    SingleMode,
    Lattice { n_sites: usize, hopping: Option<f64> },
}

impl ProviderKind {
    /// Build a provider for `wg`. A lattice without explicit hopping gets the value
    /// whose band-bottom effective mass matches the waveguide, `t = c^2/(2 omega_c a^2)`.
    pub fn build(&self, wg: &WaveguideSpec) -> Result<Box<dyn GreensProvider>> {
        Ok(match *self {
            ProviderKind::Pole => Box::new(PoleGreens(*wg)),
            ProviderKind::Truncated { n_modes } => {
                if n_modes < 1 {
                    return Err(Error::Argument("n_modes must be at least 1".into()));
                }
                Box::new(TruncatedGreens::new(*wg, n_modes))
            }
            ProviderKind::Long => Box::new(LongGreens(*wg)),
            ProviderKind::SingleMode => Box::new(SingleModeGreens(*wg)),
            ProviderKind::Lattice { n_sites, hopping } => {
                let a = wg.length / (n_sites as f64 + 1.0);
                let t = hopping.unwrap_or_else(|| lattice::hopping_for_mass(wg.omega_c, wg.speed_c, a));
                let lattice = LatticeSpec::new(n_sites, t, a, wg.omega_c)?.with_eta(wg.eta)?;
                Box::new(LatticeGreens {
                    lattice,
                    speed_c: wg.speed_c,
                })
            }
        })
    }
}

impl fmt::Display for ProviderKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProviderKind::Pole => write!(f, "pole"),
            ProviderKind::Truncated { n_modes } => write!(f, "truncated:{n_modes}"),
            ProviderKind::Long => write!(f, "long"),
            ProviderKind::SingleMode => write!(f, "single-mode"),
            ProviderKind::Lattice { n_sites, .. } => write!(f, "lattice:{n_sites}"),
        }
    }
}

impl std::str::FromStr for ProviderKind {
    type Err = Error;

    /// `pole`, `long`, `single-mode`, `truncated:N`, `lattice:N`.
    fn from_str(s: &str) -> Result<Self> {
        let (head, arg) = match s.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (s, None),
        };
        let count = |arg: Option<&str>, default: usize| -> Result<usize> {
            arg.map_or(Ok(default), |a| {
                a.parse()
                    .map_err(|_| Error::Argument(format!("bad count `{a}` in provider `{s}`")))
            })
        };
        match head {
            "pole" => Ok(ProviderKind::Pole),
            "long" => Ok(ProviderKind::Long),
            "single-mode" | "single" => Ok(ProviderKind::SingleMode),
            "truncated" => Ok(ProviderKind::Truncated {
                n_modes: count(arg, 1000)?,
            }),
            "lattice" => Ok(ProviderKind::Lattice {
                n_sites: count(arg, 200)?,
                hopping: None,
            }),
            _ => Err(Error::Argument(format!(
                "unknown provider `{s}` (expected pole, truncated:N, long, single-mode, lattice:N)"
            ))),
        }
    }
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ghz;

    #[test]
    fn parse_provider_names() {
        assert_eq!("pole".parse::<ProviderKind>().unwrap(), ProviderKind::Pole);
        assert_eq!(
            "truncated:500".parse::<ProviderKind>().unwrap(),
            ProviderKind::Truncated { n_modes: 500 }
        );
        assert!("lattice:x".parse::<ProviderKind>().is_err());
        assert!("hexagon".parse::<ProviderKind>().is_err());
    }

    #[test]
    fn lattice_provider_zero_at_walls() {
        let wg = WaveguideSpec::new(ghz(6.5), 0.1).unwrap();
        let p = ProviderKind::Lattice { n_sites: 40, hopping: None }.build(&wg).unwrap();
        let v = p.eval(-0.05, 0.01, 0.95 * wg.omega_c).unwrap();
        assert_eq!(v, Complex64::new(0.0, 0.0));
        assert!(p.eval(0.0, 0.0, 0.95 * wg.omega_c).unwrap().re < 0.0);
    }

    #[test]
    fn default_derivative_is_central_difference() {
        let wg = WaveguideSpec::new(ghz(6.5), 0.3).unwrap();
        let p = PoleGreens(wg);
        let d = p.derivative(0.0, 0.0, 0.9 * wg.omega_c).unwrap();
        let h = DERIVATIVE_STEP * wg.omega_c;
        let manual = central_difference(&p, 0.0, 0.0, 0.9 * wg.omega_c, h).unwrap();
        assert_eq!(d, manual);
    }
}
