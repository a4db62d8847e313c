//! Photon-atom bound states outside the band.
//!
//! A bound state has cavity amplitudes `u_j = u0 * beta^|j|` with real
//! `|beta| < 1`. Off the node the lattice equation gives
//! `E - omega = g (beta + 1/beta)`; at the node, eliminating the atomic
//! amplitude gives `G^2 / (E - Omega) = g (1/beta - beta)`. Together they
//! reduce to the two real transcendental equations
//!
//! ```text
//! upper:  E = Omega + G^2 / sqrt((E - omega)^2 - 4 g^2),  E > omega + 2g,  0 < beta < 1
//! lower:  E = Omega - G^2 / sqrt((E - omega)^2 - 4 g^2),  E < omega - 2g, -1 < beta < 0
//! ```
//!
//! Each has exactly one root for `G > 0`. The lower state has a staggered
//! envelope (`beta < 0`).
//!
//! Roots are found in terms of the distance `x > 0` from the nearest band
//! edge, where `(E - omega)^2 - 4g^2 = x (x + 4g)` holds without cancellation.
//! This keeps weakly bound states, which hug the band edge, resolvable.

use std::fmt;

use crate::error::{Error, Result};
use crate::model::ModelParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    /// Above the band, `E > omega + 2g`.
    Upper,
    /// Below the band, `E < omega - 2g`.
    Lower,
}

impl Branch {
    pub fn as_str(self) -> &'static str {
        match self {
            Branch::Upper => "upper",
            Branch::Lower => "lower",
        }
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One bound level: its energy and its distance from the adjacent band edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundLevel {
    pub branch: Branch,
    pub energy: f64,
    /// `|energy - edge|`, resolved beyond what `energy` itself can carry.
    pub edge_offset: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundSpectrum {
    /// `G = 0`: the atom is decoupled and no photon is bound.
    NoBoundState,
    Pair { upper: BoundLevel, lower: BoundLevel },
}

impl BoundSpectrum {
    pub fn levels(&self) -> Vec<BoundLevel> {
        match *self {
            BoundSpectrum::NoBoundState => Vec::new(),
            BoundSpectrum::Pair { upper, lower } => vec![upper, lower],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundState {
    pub energy: f64,
    /// Per-site decay factor of the cavity envelope.
    pub beta: f64,
    pub u0: f64,
    /// Atomic-excitation amplitude.
    pub u_e: f64,
    pub branch: Branch,
    /// `sum_j |u_j|^2 + |u_e|^2`, summed term by term.
    pub norm_check: f64,
}

impl BoundState {
    pub fn amplitude(&self, j: i64) -> f64 {
        self.u0 * self.beta.powi(j.unsigned_abs().min(i32::MAX as u64) as i32)
    }

    /// e-folding length of the envelope, in sites.
    pub fn localization_length(&self) -> f64 {
        -1.0 / self.beta.abs().ln()
    }

    /// Cavity amplitudes for `j = -range..=range`.
    pub fn profile(&self, range: i64) -> Vec<(i64, f64)> {
        (-range..=range).map(|j| (j, self.amplitude(j))).collect()
    }
}

/// `x + a - G^2 / sqrt(x (x + 4g))`, increasing in `x`. Its root is the edge
/// offset of the level; `a` is the signed distance from the atomic level to
/// the edge, measured away from the band.
struct EdgeEquation {
    a: f64,
    g: f64,
    coupling_sq: f64,
}

impl EdgeEquation {
    fn new(params: &ModelParams, branch: Branch) -> Self {
        let a = match branch {
            Branch::Upper => params.band_top() - params.omega_a,
            Branch::Lower => params.omega_a - params.band_bottom(),
        };
        EdgeEquation {
            a,
            g: params.g,
            coupling_sq: params.coupling * params.coupling,
        }
    }

    fn value(&self, x: f64) -> f64 {
        x + self.a - self.coupling_sq / (x * (x + 4.0 * self.g)).sqrt()
    }

    fn derivative(&self, x: f64) -> f64 {
        let q = x * (x + 4.0 * self.g);
        1.0 + self.coupling_sq * (x + 2.0 * self.g) / (q * q.sqrt())
    }

    fn scale(&self) -> f64 {
        1.0 + self.a.abs() + self.coupling_sq
    }

    fn solve(&self) -> Result<f64> {
        // Bracket: start at 1e-9 g above the edge and shrink toward it, since
        // the residual only tends to -inf at the edge itself.
        let mut lo = 1e-9 * self.g;
        while self.value(lo) >= 0.0 {
            lo *= 1e-3;
            if lo < 1e-300 {
                return Err(Error::RootFinding(
                    "bound level indistinguishable from the band edge".into(),
                ));
            }
        }
        let mut hi = (-self.a).max(0.0) + self.coupling_sq + 2.0 * self.g;
        while self.value(hi) <= 0.0 {
            hi *= 2.0;
            if !hi.is_finite() {
                return Err(Error::RootFinding("no sign change while widening bracket".into()));
            }
        }

        for _ in 0..400 {
            let mid = if hi > 4.0 * lo { (lo * hi).sqrt() } else { 0.5 * (lo + hi) };
            if mid <= lo || mid >= hi {
                break;
            }
            if self.value(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }

        // Safeguarded Newton polish from the better bracket end.
        let mut x = if self.value(lo).abs() < self.value(hi).abs() { lo } else { hi };
        for _ in 0..8 {
            let f = self.value(x);
            if f == 0.0 {
                break;
            }
            let step = x - f / self.derivative(x);
            if !(step > 0.0) || !step.is_finite() || self.value(step).abs() >= f.abs() {
                break;
            }
            x = step;
        }

        let residual = self.value(x).abs();
        if residual > 1e-12 * self.scale() {
            return Err(Error::RootFinding(format!(
                "residual {residual:e} after bisection and polish"
            )));
        }
        Ok(x)
    }
}

fn level(params: &ModelParams, branch: Branch) -> Result<BoundLevel> {
    let x = EdgeEquation::new(params, branch).solve()?;
    let energy = match branch {
        Branch::Upper => params.band_top() + x,
        Branch::Lower => params.band_bottom() - x,
    };
    Ok(BoundLevel {
        branch,
        energy,
        edge_offset: x,
    })
}

/// The two bound energies, or [`BoundSpectrum::NoBoundState`] when `G = 0`.
pub fn bound_energies(params: &ModelParams) -> Result<BoundSpectrum> {
    params.validate()?;
    if params.coupling == 0.0 {
        return Ok(BoundSpectrum::NoBoundState);
    }
    Ok(BoundSpectrum::Pair {
        upper: level(params, Branch::Upper)?,
        lower: level(params, Branch::Lower)?,
    })
}

/// Residual of the branch's transcendental equation at energy `e`.
pub fn transcendental_residual(params: &ModelParams, e: f64, branch: Branch) -> f64 {
    let w = e - params.omega;
    let root = (w * w - 4.0 * params.g * params.g).sqrt();
    let shift = params.coupling * params.coupling / root;
    match branch {
        Branch::Upper => e - params.omega_a - shift,
        Branch::Lower => e - params.omega_a + shift,
    }
}

/// Envelope data shared by both constructors: `beta`, `1 - |beta|` and the
/// branch sign.
struct Envelope {
    beta: f64,
    one_minus_abs_beta: f64,
}

impl Envelope {
    /// From the edge offset `x`: with `q = 1 + x/2g`, `|beta| = q - sqrt(q^2 - 1)`.
    fn from_offset(g: f64, x: f64, branch: Branch) -> Self {
        let h = x / (2.0 * g);
        let root = (x / g + h * h).sqrt();
        let abs_beta = 1.0 / (1.0 + h + root);
        let beta = match branch {
            Branch::Upper => abs_beta,
            Branch::Lower => -abs_beta,
        };
        Envelope {
            beta,
            one_minus_abs_beta: (h + root) * abs_beta,
        }
    }
}

fn assemble(params: &ModelParams, energy: f64, env: Envelope, branch: Branch) -> Result<BoundState> {
    let beta = env.beta;
    if !(beta.abs() < 1.0) || env.one_minus_abs_beta <= 0.0 {
        return Err(Error::InconsistentEnergy {
            energy,
            beta_abs: beta.abs(),
        });
    }
    let detuning = energy - params.omega_a;
    let atom_per_u0 = params.coupling / detuning;
    let one_minus_b2 = env.one_minus_abs_beta * (1.0 + beta.abs());
    let site_sum = (1.0 + beta * beta) / one_minus_b2;
    let u0 = 1.0 / (site_sum + atom_per_u0 * atom_per_u0).sqrt();
    let u_e = atom_per_u0 * u0;

    Ok(BoundState {
        energy,
        beta,
        u0,
        u_e,
        branch,
        norm_check: summed_norm(u0, u_e, env.one_minus_abs_beta, one_minus_b2),
    })
}

/// Adds `|u_j|^2` site by site (compensated), then closes with the geometric
/// remainder once the terms drop below rounding or after a fixed number of
/// sites.
fn summed_norm(u0: f64, u_e: f64, one_minus_abs_beta: f64, one_minus_b2: f64) -> f64 {
    let log_b2 = 2.0 * (-one_minus_abs_beta).ln_1p();
    let head = u_e * u_e + u0 * u0;
    let (mut sum, mut carry) = (head, 0.0);
    let mut last = u0 * u0;
    let mut j = 0u32;
    while j < 1_000_000 {
        j += 1;
        last = u0 * u0 * (log_b2 * j as f64).exp();
        let y = 2.0 * last - carry;
        let t = sum + y;
        carry = (t - sum) - y;
        sum = t;
        if last < 1e-18 * sum {
            break;
        }
    }
    let b2 = log_b2.exp();
    sum + 2.0 * last * b2 / one_minus_b2
}

/// Normalized bound state for an energy already known to solve the branch's
/// equation.
pub fn bound_wavefunction(params: &ModelParams, energy: f64, branch: Branch) -> Result<BoundState> {
    params.validate()?;
    let w = (energy - params.omega) / params.g;
    let x = match branch {
        Branch::Upper => (w - 2.0) * params.g,
        Branch::Lower => (-w - 2.0) * params.g,
    };
    if !(x > 0.0) {
        return Err(Error::InconsistentEnergy {
            energy,
            beta_abs: if w.abs() <= 2.0 { 1.0 } else { f64::NAN },
        });
    }
    let residual = transcendental_residual(params, energy, branch);
    let scale = 1.0 + energy.abs() + params.omega_a.abs() + params.coupling.powi(2);
    if !(residual.abs() < 1e-10 * scale) {
        return Err(Error::NotABoundEnergy {
            energy,
            branch: branch.as_str(),
            residual,
        });
    }
    assemble(params, energy, Envelope::from_offset(params.g, x, branch), branch)
}

/// Normalized bound state for a level returned by [`bound_energies`], using
/// its edge offset rather than the rounded energy.
pub fn bound_state(params: &ModelParams, level: &BoundLevel) -> Result<BoundState> {
    assemble(
        params,
        level.energy,
        Envelope::from_offset(params.g, level.edge_offset, level.branch),
        level.branch,
    )
}

/// Both bound states, upper first; empty when `G = 0`.
pub fn bound_states(params: &ModelParams) -> Result<Vec<BoundState>> {
    bound_energies(params)?
        .levels()
        .iter()
        .map(|l| bound_state(params, l))
        .collect()
}

/// Energy-dependent node potential `-G^2 / (E - Omega)` felt by the photon
/// once the atom is eliminated.
pub fn effective_potential(params: &ModelParams, e: f64) -> Result<f64> {
    let detuning = e - params.omega_a;
    if detuning.abs() <= f64::EPSILON * params.omega_a.abs().max(1.0) {
        return Err(Error::ResonancePole {
            omega_a: params.omega_a,
        });
    }
    Ok(-params.coupling * params.coupling / detuning)
}
