//! Single-photon transport through a coupled-resonator waveguide whose
//! central cavity couples to the collective mode of an atomic ensemble.
//!
//! - [`model`]: parameters, dispersion, collective coupling, polariton basis.
//! - [`scattering`]: transmission/reflection amplitudes and polariton
//!   occupations, by closed form and by a direct solve of the node equations.
//! - [`boundstates`]: the two out-of-band photon-atom bound states.
//! - [`lattice`]: finite-lattice oracle (sparse Hamiltonian, bound-state
//!   eigenpairs, wavepacket propagation) that never uses the closed forms.

#[cfg(test)]
#[macro_use]
mod test_util;

pub mod boundstates;
pub mod error;
pub mod lattice;
pub mod model;
pub mod scattering;

pub use error::{Error, Result};
pub use model::{HoppingSign, ModelParams, PolaritonBasis};
