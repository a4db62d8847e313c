//! Finite-lattice oracle.
//!
//! Sites `j = -L..=L` plus one atomic mode span the single-excitation sector.
//! The Hamiltonian is a tridiagonal chain (on-site `omega`, hopping `+g`)
//! bordered by the atom, which couples only to site 0 with strength `G`.
//! Nothing in this module uses the closed-form scattering or bound-state
//! results; it exists to check them.
//!
//! Eigenvalues are located by bisection on the inertia of `H - x`. Eliminating
//! the atom (a Schur complement) leaves a tridiagonal matrix whose negative
//! pivot count is a Sturm sequence, so a count costs `O(L)`. Eigenvectors come
//! from inverse iteration on the same reduced system.
//!
//! Time evolution uses Crank-Nicolson, which is unitary for a Hermitian
//! Hamiltonian and conserves `<H>` exactly; its linear solve is again
//! tridiagonal after eliminating the atom.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::ModelParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    HardWall,
    /// Quadratic imaginary potential ramp over the outermost sites.
    Absorbing,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeConfig {
    /// Sites run over `-half_width..=half_width`.
    pub half_width: usize,
    pub boundary: Boundary,
    pub absorber_width: usize,
    /// Imaginary potential at the wall, in units of `g`.
    pub absorber_strength: f64,
}

impl LatticeConfig {
    pub const DEFAULT_ABSORBER_WIDTH: usize = 200;
    pub const DEFAULT_ABSORBER_STRENGTH: f64 = 0.5;

    pub fn hard_wall(half_width: usize) -> Self {
        LatticeConfig {
            half_width,
            boundary: Boundary::HardWall,
            absorber_width: 0,
            absorber_strength: 0.0,
        }
    }

    pub fn absorbing(half_width: usize) -> Self {
        LatticeConfig {
            half_width,
            boundary: Boundary::Absorbing,
            absorber_width: Self::DEFAULT_ABSORBER_WIDTH,
            absorber_strength: Self::DEFAULT_ABSORBER_STRENGTH,
        }
    }

    /// `2L + 1` sites plus the atom.
    pub fn dimension(&self) -> usize {
        2 * self.half_width + 2
    }
}

/// Sparse single-excitation Hamiltonian. Index `j + L` holds site `j`; the
/// last index holds the atom.
#[derive(Debug, Clone)]
pub struct LatticeHamiltonian {
    half_width: usize,
    omega: f64,
    g: f64,
    omega_a: f64,
    coupling: f64,
    /// Absorbing potential `W_j >= 0` per site (`H` carries `-i W_j`).
    absorption: Vec<f64>,
}

pub fn build_hamiltonian(params: &ModelParams, config: &LatticeConfig) -> Result<LatticeHamiltonian> {
    params.validate()?;
    if config.half_width < 1 {
        return Err(Error::InvalidInput("lattice half-width must be >= 1".into()));
    }
    let n_sites = 2 * config.half_width + 1;
    let mut absorption = vec![0.0; n_sites];
    if config.boundary == Boundary::Absorbing && config.absorber_width > 0 {
        let width = config.absorber_width;
        if width >= config.half_width {
            return Err(Error::InvalidInput(format!(
                "absorber width {width} must be smaller than the half-width {}",
                config.half_width
            )));
        }
        if !(config.absorber_strength >= 0.0 && config.absorber_strength.is_finite()) {
            return Err(Error::InvalidInput("absorber strength must be >= 0".into()));
        }
        for depth in 1..=width {
            let w = config.absorber_strength * params.g * (depth as f64 / width as f64).powi(2);
            absorption[width - depth] = w;
            absorption[n_sites - 1 - (width - depth)] = w;
        }
    }
    Ok(LatticeHamiltonian {
        half_width: config.half_width,
        omega: params.omega,
        g: params.g,
        omega_a: params.omega_a,
        coupling: params.coupling,
        absorption,
    })
}

impl LatticeHamiltonian {
    pub fn half_width(&self) -> usize {
        self.half_width
    }

    pub fn n_sites(&self) -> usize {
        2 * self.half_width + 1
    }

    pub fn dimension(&self) -> usize {
        self.n_sites() + 1
    }

    pub fn site_index(&self, j: i64) -> usize {
        debug_assert!(j.unsigned_abs() as usize <= self.half_width);
        (j + self.half_width as i64) as usize
    }

    pub fn atom_index(&self) -> usize {
        self.n_sites()
    }

    fn node(&self) -> usize {
        self.half_width
    }

    pub fn is_hermitian(&self) -> bool {
        self.absorption.iter().all(|&w| w == 0.0)
    }

    /// `out = H v`.
    pub fn apply(&self, v: &[Complex64], out: &mut [Complex64]) {
        let n = self.n_sites();
        assert!(v.len() == n + 1 && out.len() == n + 1);
        let g = self.g;
        for i in 0..n {
            let mut acc = Complex64::new(self.omega, -self.absorption[i]) * v[i];
            if i > 0 {
                acc += g * v[i - 1];
            }
            if i + 1 < n {
                acc += g * v[i + 1];
            }
            out[i] = acc;
        }
        out[self.node()] += self.coupling * v[n];
        out[n] = self.omega_a * v[n] + self.coupling * v[self.node()];
    }

    /// `Re <v|H|v> / <v|v>`.
    pub fn expectation(&self, v: &[Complex64]) -> f64 {
        let mut hv = vec![Complex64::new(0.0, 0.0); v.len()];
        self.apply(v, &mut hv);
        let num: Complex64 = v.iter().zip(&hv).map(|(a, b)| a.conj() * b).sum();
        let den: f64 = v.iter().map(|a| a.norm_sqr()).sum();
        num.re / den
    }

    /// Dense real part, row-major. Only intended for small test lattices.
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let dim = self.dimension();
        let mut m = vec![vec![0.0; dim]; dim];
        let n = self.n_sites();
        for (i, row) in m.iter_mut().enumerate().take(n) {
            row[i] = self.omega;
            if i > 0 {
                row[i - 1] = self.g;
            }
            if i + 1 < n {
                row[i + 1] = self.g;
            }
        }
        m[self.node()][n] = self.coupling;
        m[n][self.node()] = self.coupling;
        m[n][n] = self.omega_a;
        m
    }

    /// Number of eigenvalues strictly below `x` (Hermitian part only).
    ///
    /// By Sylvester's law the inertia of `H - x` equals the sign of the atom
    /// pivot `Omega - x` plus the inertia of the Schur complement, which is
    /// the chain with `-G^2 / (Omega - x)` added on site 0.
    pub fn count_below(&self, x: f64) -> usize {
        let mut atom_pivot = self.omega_a - x;
        if atom_pivot == 0.0 {
            atom_pivot = -f64::EPSILON * x.abs().max(1.0);
        }
        let shift = self.coupling * self.coupling / atom_pivot;
        let tiny = f64::MIN_POSITIVE.sqrt();
        let g2 = self.g * self.g;
        let mut count = usize::from(atom_pivot < 0.0);
        let mut q = 1.0;
        for i in 0..self.n_sites() {
            let mut d = self.omega - x;
            if i == self.node() {
                d -= shift;
            }
            q = if i == 0 { d } else { d - g2 / q };
            if q == 0.0 {
                q = -tiny;
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// Gershgorin interval containing the spectrum.
    fn spectral_bounds(&self) -> (f64, f64) {
        let c = self.coupling;
        let site_r = 2.0 * self.g + c;
        let lo = (self.omega - site_r).min(self.omega_a - c);
        let hi = (self.omega + site_r).max(self.omega_a + c);
        (lo, hi)
    }

    /// The `index`-th smallest eigenvalue (0-based), by bisection on
    /// [`count_below`](Self::count_below) within `[lo, hi]`.
    fn eigenvalue_by_index(&self, index: usize, mut lo: f64, mut hi: f64) -> f64 {
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > index {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// All eigenvalues in ascending order. `O(dim^2)`; meant for modest sizes.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let (lo, hi) = self.spectral_bounds();
        (0..self.dimension())
            .map(|i| self.eigenvalue_by_index(i, lo - 1.0, hi + 1.0))
            .collect()
    }

    /// Eigenvalues strictly outside `[lo_edge, hi_edge]`, descending.
    pub fn eigenvalues_outside(&self, lo_edge: f64, hi_edge: f64) -> Vec<f64> {
        let (lo, hi) = self.spectral_bounds();
        let dim = self.dimension();
        let below = self.count_below(lo_edge);
        let through_top = dim - self.count_below_or_at(hi_edge);
        let mut out: Vec<f64> = (dim - through_top..dim)
            .rev()
            .map(|i| self.eigenvalue_by_index(i, hi_edge, hi + 1.0))
            .collect();
        out.extend((0..below).rev().map(|i| self.eigenvalue_by_index(i, lo - 1.0, lo_edge)));
        out
    }

    fn count_below_or_at(&self, x: f64) -> usize {
        self.count_below(x.next_up())
    }

    /// Normalized eigenvector for a (converged) eigenvalue `energy`, by
    /// inverse iteration. Sign fixed so that site 0 (or the atom, if site 0
    /// vanishes) is non-negative.
    pub fn eigenvector(&self, energy: f64) -> Vec<f64> {
        let n = self.n_sites();
        let node = self.node();
        let mut atom_pivot = self.omega_a - energy;
        if atom_pivot == 0.0 {
            atom_pivot = f64::EPSILON * energy.abs().max(1.0);
        }
        let shift = self.coupling * self.coupling / atom_pivot;

        let mut v: Vec<f64> = (0..n).map(|i| 1.0 + 0.5 * (1.3 * i as f64).sin()).collect();
        let mut atom = 0.0;
        for _ in 0..4 {
            let mut diag = vec![self.omega - energy; n];
            diag[node] -= shift;
            let off = vec![self.g; n - 1];
            // (H - E)(y, z) = (v, 0) with z = -G y_0 / (Omega - E).
            let y = solve_tridiagonal(&off, &diag, &off, &v);
            atom = -self.coupling * y[node] / atom_pivot;
            let norm = (y.iter().map(|a| a * a).sum::<f64>() + atom * atom).sqrt();
            v = y.into_iter().map(|a| a / norm).collect();
            atom /= norm;
        }
        let flip = if v[node] < 0.0 || (v[node] == 0.0 && atom < 0.0) { -1.0 } else { 1.0 };
        let mut out: Vec<f64> = v.into_iter().map(|a| flip * a).collect();
        out.push(flip * atom);
        out
    }
}

/// Solves a real tridiagonal system with partial pivoting (the LAPACK `gtsv`
/// scheme). Exactly zero pivots are nudged to rounding size, which is what
/// inverse iteration wants.
fn solve_tridiagonal(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut d = diag.to_vec();
    let mut dl = sub.to_vec();
    let mut du = sup.to_vec();
    let mut b = rhs.to_vec();
    let scale = d.iter().chain(sub).map(|a| a.abs()).fold(0.0, f64::max).max(1.0);
    let nudge = |x: f64| if x == 0.0 { f64::EPSILON * scale } else { x };

    for i in 0..n.saturating_sub(1) {
        if d[i].abs() >= dl[i].abs() {
            d[i] = nudge(d[i]);
            let fact = dl[i] / d[i];
            d[i + 1] -= fact * du[i];
            b[i + 1] -= fact * b[i];
            dl[i] = 0.0;
        } else {
            let fact = d[i] / dl[i];
            d[i] = dl[i];
            let temp = d[i + 1];
            d[i + 1] = du[i] - fact * temp;
            if i + 2 < n {
                dl[i] = du[i + 1];
                du[i + 1] = -fact * dl[i];
            } else {
                dl[i] = 0.0;
            }
            du[i] = temp;
            let tb = b[i];
            b[i] = b[i + 1];
            b[i + 1] = tb - fact * b[i + 1];
        }
    }
    d[n - 1] = nudge(d[n - 1]);
    b[n - 1] /= d[n - 1];
    if n > 1 {
        b[n - 2] = (b[n - 2] - du[n - 2] * b[n - 1]) / d[n - 2];
    }
    for i in (0..n.saturating_sub(2)).rev() {
        b[i] = (b[i] - du[i] * b[i + 1] - dl[i] * b[i + 2]) / d[i];
    }
    b
}

#[derive(Debug, Clone, PartialEq)]
pub struct Eigenpair {
    pub energy: f64,
    /// Sites `-L..=L` followed by the atomic amplitude.
    pub vector: Vec<f64>,
}

impl Eigenpair {
    pub fn half_width(&self) -> usize {
        (self.vector.len() - 2) / 2
    }

    pub fn site(&self, j: i64) -> f64 {
        self.vector[(j + self.half_width() as i64) as usize]
    }

    pub fn atom(&self) -> f64 {
        self.vector[self.vector.len() - 1]
    }
}

/// Eigenpairs with energy strictly outside the band `[omega - 2g, omega + 2g]`,
/// highest first. With `G = 0` the atom decouples and no photon is bound, so
/// the result is empty.
pub fn bound_states_numeric(params: &ModelParams, config: &LatticeConfig) -> Result<Vec<Eigenpair>> {
    if config.boundary != Boundary::HardWall {
        return Err(Error::InvalidInput(
            "bound-state diagonalization needs a hard-wall lattice".into(),
        ));
    }
    let h = build_hamiltonian(params, config)?;
    if params.coupling == 0.0 {
        return Ok(Vec::new());
    }
    Ok(h
        .eigenvalues_outside(params.band_bottom(), params.band_top())
        .into_iter()
        .map(|energy| Eigenpair {
            energy,
            vector: h.eigenvector(energy),
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WavepacketSpec {
    /// Carrier wavenumber in `(0, pi)`, `Plus` convention.
    pub k0: f64,
    /// Gaussian width in sites.
    pub sigma: f64,
    /// Launch center, left of the node.
    pub j0: i64,
    pub t_final: f64,
    pub dt: f64,
    /// Sites with `j > j_cut` count as transmitted, `j < -j_cut` as reflected.
    pub j_cut: i64,
    /// Record `|u_j|^2` every this many steps (and at the end).
    pub snapshot_every: Option<usize>,
}

impl WavepacketSpec {
    pub const DEFAULT_DT: f64 = 0.02;
    pub const DEFAULT_J_CUT: i64 = 50;
    /// Largest initial weight allowed at `j >= -j_cut`.
    pub const MAX_INITIAL_OVERLAP: f64 = 1e-8;

    pub fn new(k0: f64, sigma: f64, j0: i64, t_final: f64) -> Self {
        WavepacketSpec {
            k0,
            sigma,
            j0,
            t_final,
            dt: Self::DEFAULT_DT,
            j_cut: Self::DEFAULT_J_CUT,
            snapshot_every: None,
        }
    }

    fn validate(&self, h: &LatticeHamiltonian, config: &LatticeConfig) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidWavepacket(msg));
        if !(self.k0 > 0.0 && self.k0 < PI) {
            return bad(format!("k0 = {} must lie in (0, pi)", self.k0));
        }
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return bad(format!("sigma = {} must be > 0", self.sigma));
        }
        if !(self.dt > 0.0 && self.t_final > 0.0 && self.t_final.is_finite()) {
            return bad("dt and t_final must be > 0".into());
        }
        if self.j_cut < 0 {
            return bad("j_cut must be >= 0".into());
        }
        if self.j0 >= 0 || (self.j0.unsigned_abs() as f64) <= 4.0 * self.sigma {
            return bad(format!(
                "launch center j0 = {} must satisfy j0 < 0 and |j0| > 4 sigma = {}",
                self.j0,
                4.0 * self.sigma
            ));
        }
        let edge_gap = self.k0.min(PI - self.k0);
        if edge_gap < 1.5 / self.sigma {
            return bad(format!(
                "momentum spread 1/(2 sigma) too large for k0 = {} (distance {edge_gap} from band edge)",
                self.k0
            ));
        }
        let absorber = if config.boundary == Boundary::Absorbing {
            config.absorber_width as f64
        } else {
            0.0
        };
        let left_tail = self.j0 as f64 - 5.0 * self.sigma;
        if left_tail <= -(h.half_width as f64) + absorber {
            return bad(format!(
                "packet tail at j = {left_tail} reaches the lattice boundary region"
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub t: f64,
    /// `|u_j|^2` for `j = -L..=L`.
    pub density: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WavepacketOutcome {
    /// Weight right of `j_cut` plus weight absorbed on the right.
    pub transmission: f64,
    /// Weight left of `-j_cut` plus weight absorbed on the left.
    pub reflection: f64,
    pub right_on_lattice: f64,
    pub left_on_lattice: f64,
    pub absorbed_right: f64,
    pub absorbed_left: f64,
    /// Weight on `|j| <= j_cut` and in the atom at `t_final`.
    pub residual: f64,
    /// `|transmission + reflection + residual - 1|`.
    pub norm_drift: f64,
    /// `|<H>(t_final) - <H>(0)|`; only meaningful without absorbers.
    pub energy_drift: Option<f64>,
    pub steps: usize,
    pub snapshots: Vec<Snapshot>,
}

/// Largest tolerated accounting error over one run.
pub const NORM_DRIFT_LIMIT: f64 = 1e-10;

/// Crank-Nicolson stepper. The atom is eliminated from
/// `(1 + i dt/2 (H - omega))` and the remaining complex-symmetric tridiagonal
/// system is pre-factored once.
struct CrankNicolson<'a> {
    h: &'a LatticeHamiltonian,
    half_dt: f64,
    offdiag: Complex64,
    atom_diag: Complex64,
    node_coupling: Complex64,
    /// Thomas factors: `c'_i` and `1 / (d_i - e c'_{i-1})`.
    upper: Vec<Complex64>,
    inv_pivot: Vec<Complex64>,
    scratch: Vec<Complex64>,
}

impl<'a> CrankNicolson<'a> {
    fn new(h: &'a LatticeHamiltonian, dt: f64) -> Self {
        let n = h.n_sites();
        let a = 0.5 * dt;
        let i = Complex64::new(0.0, 1.0);
        let offdiag = i * a * h.g;
        let atom_diag = Complex64::new(1.0, a * (h.omega_a - h.omega));
        let node_coupling = i * a * h.coupling;
        let mut diag: Vec<Complex64> = h
            .absorption
            .iter()
            .map(|&w| Complex64::new(1.0 + a * w, 0.0))
            .collect();
        diag[h.node()] -= node_coupling * node_coupling / atom_diag;

        let mut upper = vec![Complex64::new(0.0, 0.0); n];
        let mut inv_pivot = vec![Complex64::new(0.0, 0.0); n];
        for k in 0..n {
            let pivot = if k == 0 { diag[0] } else { diag[k] - offdiag * upper[k - 1] };
            inv_pivot[k] = 1.0 / pivot;
            upper[k] = offdiag * inv_pivot[k];
        }
        CrankNicolson {
            h,
            half_dt: a,
            offdiag,
            atom_diag,
            node_coupling,
            upper,
            inv_pivot,
            scratch: vec![Complex64::new(0.0, 0.0); n + 1],
        }
    }

    /// Advances `u` by one step in place.
    fn step(&mut self, u: &mut [Complex64]) {
        let h = self.h;
        let n = h.n_sites();
        let node = h.node();
        let a = self.half_dt;
        let mi = Complex64::new(0.0, -a);
        let b = &mut self.scratch;

        // b = (1 - i a (H - omega)) u
        for k in 0..n {
            let mut hv = Complex64::new(0.0, -h.absorption[k]) * u[k];
            if k > 0 {
                hv += h.g * u[k - 1];
            }
            if k + 1 < n {
                hv += h.g * u[k + 1];
            }
            b[k] = u[k] + mi * hv;
        }
        b[node] += mi * h.coupling * u[n];
        b[n] = u[n] + mi * ((h.omega_a - h.omega) * u[n] + h.coupling * u[node]);

        // Eliminate the atom, then forward/back substitution.
        let atom_rhs = b[n];
        b[node] -= self.node_coupling * atom_rhs / self.atom_diag;
        let e = self.offdiag;
        u[0] = b[0] * self.inv_pivot[0];
        for k in 1..n {
            u[k] = (b[k] - e * u[k - 1]) * self.inv_pivot[k];
        }
        for k in (0..n - 1).rev() {
            let next = u[k + 1];
            u[k] -= self.upper[k] * next;
        }
        u[n] = (atom_rhs - self.node_coupling * u[node]) / self.atom_diag;
    }
}

/// Gaussian packet at energy `E(k0)`. With `+g` hopping the group velocity of
/// `e^{ikj}` is `-2g sin k`, so the right-moving packet carries `e^{-i k0 j}`.
fn initial_packet(h: &LatticeHamiltonian, spec: &WavepacketSpec) -> Vec<Complex64> {
    let l = h.half_width as i64;
    let mut u: Vec<Complex64> = (-l..=l)
        .map(|j| {
            let x = (j - spec.j0) as f64;
            Complex64::from_polar((-x * x / (4.0 * spec.sigma * spec.sigma)).exp(), -spec.k0 * j as f64)
        })
        .collect();
    u.push(Complex64::new(0.0, 0.0));
    let norm = u.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    u.iter_mut().for_each(|a| *a /= norm);
    u
}

/// Launches a Gaussian packet from the left and measures how much of it ends
/// up beyond the node.
pub fn propagate_wavepacket(
    params: &ModelParams,
    config: &LatticeConfig,
    spec: &WavepacketSpec,
) -> Result<WavepacketOutcome> {
    let h = build_hamiltonian(params, config)?;
    spec.validate(&h, config)?;
    let l = h.half_width as i64;
    let j_cut = spec.j_cut.min(l);
    let mut u = initial_packet(&h, spec);

    let overlap: f64 = u[h.site_index(-j_cut)..h.n_sites()]
        .iter()
        .map(|a| a.norm_sqr())
        .sum();
    if overlap > WavepacketSpec::MAX_INITIAL_OVERLAP {
        return Err(Error::InvalidWavepacket(format!(
            "initial weight {overlap:e} at j >= -{j_cut} overlaps the node"
        )));
    }

    let steps = (spec.t_final / spec.dt).ceil().max(1.0) as usize;
    let dt = spec.t_final / steps as f64;
    let hermitian = h.is_hermitian();
    let energy0 = hermitian.then(|| h.expectation(&u));

    // Absorber sites, split by side of the node.
    let absorbing: Vec<usize> = (0..h.n_sites()).filter(|&k| h.absorption[k] > 0.0).collect();
    let node = h.node();
    let mut absorbed_left = 0.0;
    let mut absorbed_right = 0.0;
    let mut previous = vec![Complex64::new(0.0, 0.0); absorbing.len()];

    let mut cn = CrankNicolson::new(&h, dt);
    let mut snapshots = Vec::new();
    let density = |u: &[Complex64]| u[..h.n_sites()].iter().map(|a| a.norm_sqr()).collect();
    if spec.snapshot_every.is_some() {
        snapshots.push(Snapshot { t: 0.0, density: density(&u) });
    }
    for step in 1..=steps {
        for (slot, &k) in previous.iter_mut().zip(&absorbing) {
            *slot = u[k];
        }
        cn.step(&mut u);
        // Norm lost in one step is exactly 2 dt <u_mid|W|u_mid>.
        for (&old, &k) in previous.iter().zip(&absorbing) {
            let mid = 0.5 * (old + u[k]);
            let loss = 2.0 * dt * h.absorption[k] * mid.norm_sqr();
            if k < node {
                absorbed_left += loss;
            } else {
                absorbed_right += loss;
            }
        }
        if let Some(every) = spec.snapshot_every {
            if every > 0 && (step % every == 0 || step == steps) {
                snapshots.push(Snapshot {
                    t: step as f64 * dt,
                    density: density(&u),
                });
            }
        }
    }

    let weight = |range: std::ops::Range<usize>| -> f64 { u[range].iter().map(|a| a.norm_sqr()).sum() };
    let left_on_lattice = weight(0..h.site_index(-j_cut));
    let right_on_lattice = weight(h.site_index(j_cut) + 1..h.n_sites());
    let residual = weight(h.site_index(-j_cut)..h.site_index(j_cut) + 1) + u[h.n_sites()].norm_sqr();
    let transmission = right_on_lattice + absorbed_right;
    let reflection = left_on_lattice + absorbed_left;
    let norm_drift = (transmission + reflection + residual - 1.0).abs();
    if !(norm_drift <= NORM_DRIFT_LIMIT) {
        return Err(Error::IntegratorFailure(format!(
            "norm accounting off by {norm_drift:e} after {steps} steps"
        )));
    }
    let energy_drift = energy0.map(|e0| (h.expectation(&u) - e0).abs());

    Ok(WavepacketOutcome {
        transmission,
        reflection,
        right_on_lattice,
        left_on_lattice,
        absorbed_right,
        absorbed_left,
        residual,
        norm_drift,
        energy_drift,
        steps,
        snapshots,
    })
}

/// Numerical transmission at each `k`, reusing `template` for everything but
/// the carrier wavenumber. Runs are independent and execute in parallel.
pub fn transmission_curve_numeric(
    params: &ModelParams,
    config: &LatticeConfig,
    k_list: &[f64],
    template: &WavepacketSpec,
) -> Result<Vec<(f64, f64)>> {
    k_list
        .par_iter()
        .enumerate()
        .map(|(index, &k0)| {
            let spec = WavepacketSpec { k0, ..*template };
            propagate_wavepacket(params, config, &spec)
                .map(|out| (k0, out.transmission))
                .map_err(|e| Error::AtGridPoint {
                    index,
                    source: Box::new(e),
                })
        })
        .collect()
}
