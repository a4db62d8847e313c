//! Physical parameters of the waveguide and its node, the lattice dispersion,
//! the collective coupling of an atomic ensemble, and the dressed (polariton)
//! basis of the node.
//!
//! Energies are in the same unit as the hopping `g`; the CLI normalizes to
//! `g = 1`. Wavenumbers are in units of the inverse lattice constant.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Which sign the hopping term carries in the dispersion relation.
///
/// `Plus` gives `E(k) = omega + 2g cos k` and is the convention used by every
/// computation in this crate. `Minus` gives `E(k) = omega - 2g cos k`; it is the
/// same physics viewed through `k -> pi - k` and is offered for reporting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HoppingSign {
    #[default]
    Plus,
    Minus,
}

impl HoppingSign {
    /// Maps a wavenumber given in this convention to the internal (`Plus`) one.
    /// The map is an involution, so it also converts back.
    pub fn to_internal(self, k: f64) -> f64 {
        match self {
            HoppingSign::Plus => k,
            HoppingSign::Minus => PI - k,
        }
    }

    pub fn from_internal(self, k: f64) -> f64 {
        self.to_internal(k)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    /// Bare cavity frequency.
    pub omega: f64,
    /// Hopping magnitude between neighboring cavities, > 0.
    pub g: f64,
    /// Atomic level spacing of the (effective two-level) ensemble.
    pub omega_a: f64,
    /// Collective coupling between the ensemble mode and cavity 0, >= 0.
    pub coupling: f64,
    pub hopping_sign: HoppingSign,
}

impl ModelParams {
    pub fn new(omega: f64, g: f64, omega_a: f64, coupling: f64) -> Result<Self> {
        let params = ModelParams {
            omega,
            g,
            omega_a,
            coupling,
            hopping_sign: HoppingSign::Plus,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn with_sign(mut self, sign: HoppingSign) -> Self {
        self.hopping_sign = sign;
        self
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("omega", self.omega),
            ("g", self.g),
            ("Omega", self.omega_a),
            ("G", self.coupling),
        ] {
            if !v.is_finite() {
                return Err(Error::InvalidInput(format!("{name} must be finite, got {v}")));
            }
        }
        if self.g <= 0.0 {
            return Err(Error::InvalidInput(format!("g must be > 0, got {}", self.g)));
        }
        if self.coupling < 0.0 {
            return Err(Error::InvalidInput(format!(
                "G must be >= 0, got {}",
                self.coupling
            )));
        }
        Ok(())
    }

    pub fn band_bottom(&self) -> f64 {
        self.omega - 2.0 * self.g
    }

    pub fn band_top(&self) -> f64 {
        self.omega + 2.0 * self.g
    }

    /// True when `e` lies strictly inside the open band.
    pub fn in_band(&self, e: f64) -> bool {
        e > self.band_bottom() && e < self.band_top()
    }

    /// Energy of wavenumber `k` in the internal (`Plus`) convention.
    pub(crate) fn energy_plus(&self, k: f64) -> f64 {
        self.omega + 2.0 * self.g * k.cos()
    }
}

/// Dressed quantities of the node: cavity 0 hybridized with the collective
/// atomic mode through the 2x2 block `[[Omega, G], [G, omega]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolaritonBasis {
    /// `Omega - omega`.
    pub detuning: f64,
    /// `sqrt(detuning^2 + 4 G^2)`; the dressed splitting.
    pub splitting: f64,
    /// Mixing angle in `[0, pi/2]`.
    pub theta: f64,
    pub omega_plus: f64,
    pub omega_minus: f64,
    /// Coupling of polariton A to the neighbouring cavities, `g sin(theta)`.
    pub xi_a: f64,
    /// Coupling of polariton B to the neighbouring cavities, `g cos(theta)`.
    pub xi_b: f64,
}

/// Collective coupling `xi * sqrt(sum |zeta_l|^2)` of an ensemble whose atoms
/// couple with relative weights `zeta`.
pub fn effective_coupling(xi: f64, zeta: &[Complex64]) -> Result<f64> {
    if zeta.is_empty() {
        return Err(Error::InvalidInput("zeta list is empty".into()));
    }
    if !(xi.is_finite() && xi >= 0.0) {
        return Err(Error::InvalidInput(format!("xi must be >= 0, got {xi}")));
    }
    if let Some((l, z)) = zeta
        .iter()
        .enumerate()
        .find(|(_, z)| !(z.re.is_finite() && z.im.is_finite()) || z.norm() > 1.0 + 1e-12)
    {
        return Err(Error::InvalidInput(format!(
            "zeta[{l}] = {z} must be finite with |zeta| <= 1"
        )));
    }
    let weight: f64 = zeta.iter().map(|z| z.norm_sqr()).sum();
    Ok(xi * weight.sqrt())
}

/// Lattice dispersion in the convention carried by `params`.
pub fn dispersion(params: &ModelParams, k: f64) -> Result<f64> {
    if !(0.0..=PI).contains(&k) {
        return Err(Error::WavenumberOutOfRange { k });
    }
    let band = 2.0 * params.g * k.cos();
    Ok(match params.hopping_sign {
        HoppingSign::Plus => params.omega + band,
        HoppingSign::Minus => params.omega - band,
    })
}

/// Small-`k` and band-center expansions of the `Minus` dispersion
/// `omega - 2g cos k`, returned as `(quadratic, linear)`.
///
/// The quadratic form `omega - 2g + g k^2` expands about `k = 0`. The linear
/// form `omega + 2g (k - pi/2)` expands about the band center `k = pi/2`,
/// where the group velocity is maximal. Only used for consistency checks.
pub fn dispersion_limits(params: &ModelParams, k: f64) -> (f64, f64) {
    let g = params.g;
    let quadratic = params.omega - 2.0 * g + g * k * k;
    let linear = params.omega + 2.0 * g * (k - FRAC_PI_2);
    (quadratic, linear)
}

pub fn polariton_basis(params: &ModelParams) -> PolaritonBasis {
    let detuning = params.omega_a - params.omega;
    let two_g = 2.0 * params.coupling;
    let splitting = detuning.hypot(two_g);
    // cos(2 theta) = detuning / splitting, sin(2 theta) = 2G / splitting.
    // atan2 picks theta = 0 or pi/2 continuously when G = 0.
    let theta = 0.5 * two_g.atan2(detuning);

    let trace = params.omega_a + params.omega;
    let det = diff_of_products(params.omega_a, params.omega, params.coupling, params.coupling);
    // Evaluate the larger-magnitude eigenvalue directly and recover the other
    // from the determinant to avoid cancellation.
    let (omega_plus, omega_minus) = if trace >= 0.0 {
        let plus = 0.5 * (trace + splitting);
        let minus = if plus != 0.0 { det / plus } else { 0.5 * (trace - splitting) };
        (plus, minus)
    } else {
        let minus = 0.5 * (trace - splitting);
        let plus = if minus != 0.0 { det / minus } else { 0.5 * (trace + splitting) };
        (plus, minus)
    };

    let (sin, cos) = theta.sin_cos();
    PolaritonBasis {
        detuning,
        splitting,
        theta,
        omega_plus,
        omega_minus,
        xi_a: params.g * sin,
        xi_b: params.g * cos,
    }
}

/// `a*b - c*d` to within about one rounding (Kahan's fma scheme), so that a
/// nearly singular node block still yields an accurate small eigenvalue.
fn diff_of_products(a: f64, b: f64, c: f64, d: f64) -> f64 {
    let cd = c * d;
    let err = (-c).mul_add(d, cd);
    a.mul_add(b, -cd) + err
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(omega: f64, omega_a: f64, coupling: f64) -> ModelParams {
        ModelParams::new(omega, 1.0, omega_a, coupling).unwrap()
    }

    /// Eigenvalues of `[[a, c], [c, b]]` from the characteristic polynomial
    /// `x^2 - (a+b) x + (ab - c^2)`, using the cancellation-free root pair.
    fn char_poly_eigs(a: f64, b: f64, c: f64) -> (f64, f64) {
        let t = a + b;
        let d = a * b - c * c;
        let disc = (t * t - 4.0 * d).max(0.0).sqrt();
        let q = -0.5 * (-t - t.signum() * disc);
        let (r1, r2) = if q != 0.0 { (q, d / q) } else { (0.0, 0.0) };
        (r1.max(r2), r1.min(r2))
    }

    #[test]
    fn effective_coupling_examples() {
        let one = Complex64::new(1.0, 0.0);
        assert_eq!(effective_coupling(1.0, &[one; 4]).unwrap(), 2.0);
        assert_eq!(effective_coupling(3.0, &[one]).unwrap(), 3.0);
        let z = [Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)];
        assert_close!(effective_coupling(1.0, &z).unwrap(), 1.0, 1e-15);
    }

    #[test]
    fn effective_coupling_sqrt_n_scaling() {
        let one = Complex64::new(1.0, 0.0);
        let g1 = effective_coupling(0.7, &[one]).unwrap();
        for n in [1usize, 4, 9, 16] {
            let gn = effective_coupling(0.7, &vec![one; n]).unwrap();
            assert_close!(gn / g1, (n as f64).sqrt(), 1e-14);
        }
    }

    #[test]
    fn effective_coupling_rejects_bad_input() {
        assert!(matches!(effective_coupling(1.0, &[]), Err(Error::InvalidInput(_))));
        let big = [Complex64::new(1.0, 1.0)];
        assert!(effective_coupling(1.0, &big).is_err());
    }

    #[test]
    fn dispersion_examples() {
        let p = params(3.0, 0.0, 0.0);
        let m = p.with_sign(HoppingSign::Minus);
        assert_close!(dispersion(&p, FRAC_PI_2).unwrap(), 3.0, 1e-15);
        assert_close!(dispersion(&m, FRAC_PI_2).unwrap(), 3.0, 1e-15);
        assert_eq!(dispersion(&m, 0.0).unwrap(), 1.0);
        assert_close!(dispersion(&p, 2.0 * PI / 3.0).unwrap(), 2.0, 1e-15);
        assert!(dispersion(&p, -0.1).is_err());
        assert!(dispersion(&p, PI + 1e-9).is_err());
    }

    #[test]
    fn dispersion_is_monotone_and_covers_band() {
        for sign in [HoppingSign::Plus, HoppingSign::Minus] {
            let p = params(3.0, 0.0, 0.0).with_sign(sign);
            let n = 2000;
            let vals: Vec<f64> = (0..=n)
                .map(|i| dispersion(&p, PI * i as f64 / n as f64).unwrap())
                .collect();
            let increasing = vals.windows(2).all(|w| w[1] > w[0]);
            let decreasing = vals.windows(2).all(|w| w[1] < w[0]);
            assert!(increasing || decreasing);
            let lo = vals.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            assert_close!(lo, p.band_bottom(), 1e-14);
            assert_close!(hi, p.band_top(), 1e-14);
        }
    }

    #[test]
    fn conventions_agree_under_reflection() {
        let p = params(3.0, 0.0, 0.0);
        let m = p.with_sign(HoppingSign::Minus);
        for i in 0..=20 {
            let k = PI * i as f64 / 20.0;
            let internal = HoppingSign::Minus.to_internal(k);
            assert_close!(dispersion(&m, k).unwrap(), dispersion(&p, internal).unwrap(), 1e-14);
        }
    }

    #[test]
    fn dispersion_limit_expansions() {
        let p = params(3.0, 0.0, 0.0).with_sign(HoppingSign::Minus);
        let (q0, _) = dispersion_limits(&p, 0.0);
        assert_eq!(q0, 1.0);
        let (q, _) = dispersion_limits(&p, 0.1);
        assert_close!(q, 1.01, 1e-15);
        assert!((q - dispersion(&p, 0.1).unwrap()).abs() < 1e-4);

        // Linear remainder about the band center is O((k - pi/2)^3).
        let mut prev = f64::INFINITY;
        for h in [0.2, 0.1, 0.05, 0.025] {
            let k = FRAC_PI_2 + h;
            let (_, lin) = dispersion_limits(&p, k);
            let err = (lin - dispersion(&p, k).unwrap()).abs();
            assert!(err < prev);
            assert!(err <= h * h * h / 3.0 + 1e-15, "h={h} err={err}");
            prev = err;
        }
        let (_, lin) = dispersion_limits(&p, FRAC_PI_2);
        assert_close!(lin, 3.0, 1e-15);
    }

    #[test]
    fn polariton_degenerate_case() {
        let b = polariton_basis(&params(5.0, 5.0, 3.0));
        assert_close!(b.theta, std::f64::consts::FRAC_PI_4, 1e-15);
        assert_close!(b.omega_plus, 8.0, 1e-14);
        assert_close!(b.omega_minus, 2.0, 1e-14);
        assert_close!(b.xi_a, 1.0 / 2f64.sqrt(), 1e-15);
        assert_close!(b.xi_b, 1.0 / 2f64.sqrt(), 1e-15);
    }

    #[test]
    fn polariton_examples_match_two_by_two() {
        let b = polariton_basis(&params(5.0, 8.0, 3.0));
        assert_close!(b.splitting, 45f64.sqrt(), 1e-14);
        let (hi, lo) = char_poly_eigs(8.0, 5.0, 3.0);
        assert_close!(b.omega_plus, hi, 1e-13);
        assert_close!(b.omega_minus, lo, 1e-13);
        assert_close!(b.omega_plus, 9.8541, 1e-4);
        assert_close!(b.omega_minus, 3.1459, 1e-4);
        assert_close!(b.theta, 0.55357, 1e-5);

        // trace 20, det 66: 10 +- sqrt(34)
        let b = polariton_basis(&params(15.0, 5.0, 3.0));
        assert_close!(b.omega_plus, 10.0 + 34f64.sqrt(), 1e-13);
        assert_close!(b.omega_minus, 10.0 - 34f64.sqrt(), 1e-13);
        assert_close!(b.omega_plus, 15.83095, 1e-5);
    }

    #[test]
    fn theta_matches_printed_arctan_form() {
        for (w, wa, c) in [(5.0, 8.0, 3.0), (15.0, 5.0, 3.0), (3.0, 2.0, 3.0), (0.0, 1.0, 0.2)] {
            let b = polariton_basis(&params(w, wa, c));
            let printed = ((b.splitting - b.detuning) / (b.splitting + b.detuning)).sqrt().atan();
            assert_close!(b.theta, printed, 1e-13);
        }
    }

    #[test]
    fn theta_continuity_at_zero_coupling() {
        assert_eq!(polariton_basis(&params(5.0, 8.0, 0.0)).theta, 0.0);
        assert_close!(polariton_basis(&params(8.0, 5.0, 0.0)).theta, FRAC_PI_2, 1e-15);
        let just_above = polariton_basis(&params(8.0, 5.0, 1e-9)).theta;
        assert_close!(just_above, FRAC_PI_2, 1e-9);
    }

    #[test]
    fn params_validation() {
        assert!(ModelParams::new(0.0, 0.0, 0.0, 0.0).is_err());
        assert!(ModelParams::new(0.0, 1.0, 0.0, -1.0).is_err());
        assert!(ModelParams::new(f64::NAN, 1.0, 0.0, 0.0).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn basis_invariants(w in -20.0..20.0f64, wa in -20.0..20.0f64, c in 0.0..8.0f64, g in 0.1..3.0f64) {
                let p = ModelParams::new(w, g, wa, c).unwrap();
                let b = polariton_basis(&p);
                let scale = 1.0 + w.abs() + wa.abs() + c;
                prop_assert!((b.omega_plus + b.omega_minus - (w + wa)).abs() <= 1e-12 * scale);
                prop_assert!((b.omega_plus - b.omega_minus - b.splitting).abs() <= 1e-12 * scale);
                prop_assert!(b.splitting >= b.detuning.abs());
                prop_assert!((b.xi_a.powi(2) + b.xi_b.powi(2) - g * g).abs() <= 1e-13 * g * g);
                prop_assert!((0.0..=FRAC_PI_2).contains(&b.theta));
                if c > 0.0 {
                    let check = (b.omega_plus - wa) * (b.omega_plus - w);
                    prop_assert!((check - c * c).abs() <= 1e-11 * scale * scale);
                }
                let (hi, lo) = char_poly_eigs(wa, w, c);
                prop_assert!((b.omega_plus - hi).abs() <= 1e-12 * hi.abs().max(1e-300) + 1e-300);
                prop_assert!((b.omega_minus - lo).abs() <= 1e-12 * lo.abs() + 1e-14 * scale);
            }
        }
    }
}
