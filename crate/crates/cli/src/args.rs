use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "wqed",
    version,
    about = "Single-photon transport through a coupled-resonator waveguide with an atomic-ensemble node"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Transmission/reflection spectrum over a wavenumber grid.
    Spectrum(ParamArgs),
    /// Polariton occupations |u_A|^2, |u_B|^2 over a wavenumber grid.
    Occupations(ParamArgs),
    /// The two out-of-band bound states.
    Bound(ParamArgs),
    /// Run the verification suite and print a pass/fail table.
    Verify,
    /// Emit the data behind one of the reference figures.
    Figure {
        #[arg(value_enum)]
        id: FigureId,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Propagate a wavepacket on the finite lattice and measure transmission.
    Wavepacket {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        packet: PacketArgs,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FigureId {
    Fig5d,
    Fig7,
    Fig9,
}

/// Model and output options. Values are kept as text so that flags and
/// config-file entries are parsed and reported the same way.
#[derive(Debug, Clone, Default, Args)]
pub struct ParamArgs {
    /// Flat `key = value` file; flags override its entries.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Cavity frequency.
    #[arg(long = "omega", allow_hyphen_values = true)]
    pub omega: Option<String>,
    /// Hopping constant; all energies are reported in units of it.
    #[arg(long = "g")]
    pub g: Option<String>,
    /// Atomic level spacing.
    #[arg(long = "Omega", allow_hyphen_values = true)]
    pub omega_a: Option<String>,
    /// Collective coupling (excludes --n-atoms and --zeta-file).
    #[arg(long = "G")]
    pub coupling: Option<String>,
    /// Number of atoms with unit relative coupling; G = xi * sqrt(N).
    #[arg(long = "n-atoms")]
    pub n_atoms: Option<String>,
    /// Single-atom coupling.
    #[arg(long = "xi")]
    pub xi: Option<String>,
    /// One complex relative coupling per line as `re im`.
    #[arg(long = "zeta-file", value_name = "PATH")]
    pub zeta_file: Option<String>,
    #[arg(long = "k-min")]
    pub k_min: Option<String>,
    #[arg(long = "k-max")]
    pub k_max: Option<String>,
    #[arg(long = "k-count")]
    pub k_count: Option<String>,
    /// Dispersion convention for reported wavenumbers: plus or minus.
    #[arg(long = "convention")]
    pub convention: Option<String>,
    /// Output file; stdout when absent.
    #[arg(long = "out", value_name = "PATH")]
    pub out: Option<String>,
    /// csv or json.
    #[arg(long = "format")]
    pub format: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Args)]
pub struct PacketArgs {
    /// Carrier wavenumber (in the selected convention).
    #[arg(long, default_value_t = std::f64::consts::FRAC_PI_2)]
    pub k0: f64,
    /// Gaussian width in sites.
    #[arg(long, default_value_t = 40.0)]
    pub sigma: f64,
    /// Launch center (negative).
    #[arg(long, default_value_t = -400, allow_hyphen_values = true)]
    pub j0: i64,
    #[arg(long = "t-final", default_value_t = 1500.0)]
    pub t_final: f64,
    #[arg(long, default_value_t = 0.02)]
    pub dt: f64,
    /// Lattice half-width L.
    #[arg(long = "half-width", default_value_t = 2000)]
    pub half_width: usize,
    /// Use hard walls instead of absorbing boundaries.
    #[arg(long = "hard-wall")]
    pub hard_wall: bool,
    #[arg(long = "j-cut", default_value_t = 50)]
    pub j_cut: i64,
    /// Record |u_j|^2 every this many steps.
    #[arg(long = "snapshot-every")]
    pub snapshot_every: Option<usize>,
    /// CSV file for the `t,j,prob` snapshot records.
    #[arg(long = "snapshot-out", value_name = "PATH")]
    pub snapshot_out: Option<PathBuf>,
}
