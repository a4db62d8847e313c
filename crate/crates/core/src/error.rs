use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("wavenumber {k} outside [0, pi]")]
    WavenumberOutOfRange { k: f64 },

    #[error("singular node system at k = {k}")]
    SingularSystem { k: f64 },

    #[error("grid point {index}: {source}")]
    AtGridPoint {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("effective potential has a pole at the atomic resonance E = Omega = {omega_a}")]
    ResonancePole { omega_a: f64 },

    #[error("energy {energy} is not outside the band (|beta| = {beta_abs} >= 1)")]
    InconsistentEnergy { energy: f64, beta_abs: f64 },

    #[error("energy {energy} does not solve the {branch} bound-state equation (residual {residual:e})")]
    NotABoundEnergy {
        energy: f64,
        branch: &'static str,
        residual: f64,
    },

    #[error("root finding failed: {0}")]
    RootFinding(String),

    #[error("invalid wavepacket: {0}")]
    InvalidWavepacket(String),

    #[error("integrator failure: {0}")]
    IntegratorFailure(String),
}
