//! Green's-function toolkit for superconducting qubits in a finite rectangular
//! waveguide below and above its cutoff.
//!
//! Every physical routine is expressed through the bare waveguide propagator
//! `c*G0(z, z'; omega)`, supplied by a [`GreensProvider`]. Swapping the provider switches
//! between the exact closed form, truncated mode sums, the long-guide and single-mode
//! limits, and a tight-binding cavity array.

// `!(x > 0.0)` is used on purpose so NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod boundstate;
pub mod config;
pub mod dynamics;
pub mod error;
pub mod greens;
pub mod interaction;
pub mod model;
pub mod purcell;
pub mod quad;
pub mod scattering;

pub use config::{from_config, to_config, ConfigDocument};
pub use error::{Error, Result};
pub use greens::{GreensProvider, ProviderKind};
pub use model::{PortSpec, QubitSpec, SystemSpec, WaveguideSpec};
