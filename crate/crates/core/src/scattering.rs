//! Single-photon scattering off the dressed node.
//!
//! Two independent routes are provided. [`transmission_amplitude`] and
//! [`occupations`] evaluate the closed forms obtained by eliminating the
//! polariton amplitudes. [`solve_node_system`] substitutes the plane-wave
//! ansatz into the four discrete equations around site 0 and solves the
//! resulting 4x4 complex system directly, without touching the closed forms.
//!
//! Everything here uses the `Plus` dispersion `E = omega + 2g cos k`.

use std::f64::consts::PI;

use nalgebra::{Matrix4, Vector4};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{polariton_basis, ModelParams, PolaritonBasis};

/// `|sin k|` below this counts as a band edge.
pub const BAND_EDGE_TOL: f64 = 1e-14;

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transmission {
    pub s: Complex64,
    /// Set when `k` sits on a band edge; `s` is then 0.
    pub band_edge: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatteringSolution {
    pub k: f64,
    pub energy: f64,
    pub s: Complex64,
    pub r: Complex64,
    pub u_a: Complex64,
    pub u_b: Complex64,
    /// Cavity-0 amplitude `sin(theta) u_A - cos(theta) u_B`.
    pub u0: Complex64,
    pub transmission: f64,
    pub reflection: f64,
    pub band_edge: bool,
}

impl ScatteringSolution {
    fn band_edge(k: f64, energy: f64) -> Self {
        let zero = Complex64::new(0.0, 0.0);
        ScatteringSolution {
            k,
            energy,
            s: zero,
            r: Complex64::new(-1.0, 0.0),
            u_a: zero,
            u_b: zero,
            u0: zero,
            transmission: 0.0,
            reflection: 1.0,
            band_edge: true,
        }
    }

    fn from_amplitudes(
        k: f64,
        energy: f64,
        basis: &PolaritonBasis,
        s: Complex64,
        r: Complex64,
        u_a: Complex64,
        u_b: Complex64,
    ) -> Self {
        let (sin, cos) = basis.theta.sin_cos();
        ScatteringSolution {
            k,
            energy,
            s,
            r,
            u_a,
            u_b,
            u0: sin * u_a - cos * u_b,
            transmission: s.norm_sqr(),
            reflection: r.norm_sqr(),
            band_edge: false,
        }
    }
}

fn check_k(k: f64) -> Result<bool> {
    if !(0.0..=PI).contains(&k) {
        return Err(Error::WavenumberOutOfRange { k });
    }
    Ok(k.sin().abs() < BAND_EDGE_TOL)
}

/// Closed-form transmission amplitude
///
/// `s = -2ig (E - Omega) sin k / [(E - Omega+)(E - Omega-) - 2g e^{ik} (E - Omega)]`.
///
/// The denominator equals `-2ig sin k (E - Omega) - G^2` once the dispersion
/// is substituted, so it only vanishes for a decoupled node (`G = 0`) at
/// `E = Omega`; the decoupled chain transmits perfectly and `s = 1` is
/// returned for `G = 0`.
pub fn transmission_amplitude(
    params: &ModelParams,
    basis: &PolaritonBasis,
    k: f64,
) -> Result<Transmission> {
    if check_k(k)? {
        return Ok(Transmission {
            s: Complex64::new(0.0, 0.0),
            band_edge: true,
        });
    }
    if params.coupling == 0.0 {
        return Ok(Transmission {
            s: Complex64::new(1.0, 0.0),
            band_edge: false,
        });
    }
    let e = params.energy_plus(k);
    let g = params.g;
    let numerator = -2.0 * I * g * (e - params.omega_a) * k.sin();
    let denominator = Complex64::from((e - basis.omega_plus) * (e - basis.omega_minus))
        - 2.0 * g * Complex64::from_polar(1.0, k) * (e - params.omega_a);
    Ok(Transmission {
        s: numerator / denominator,
        band_edge: false,
    })
}

/// Polariton amplitudes `(u_A, u_B)` at site 0.
///
/// Uses `s / (E - Omega) = -2ig sin k / D`, so the result stays finite at the
/// Fano point where the textbook quotient is 0/0.
pub fn occupations(
    params: &ModelParams,
    basis: &PolaritonBasis,
    k: f64,
) -> Result<(Complex64, Complex64)> {
    if check_k(k)? {
        return Ok((Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)));
    }
    let (sin, cos) = basis.theta.sin_cos();
    if params.coupling == 0.0 {
        // Only cavity 0 is excited, with u0 = s = 1.
        return Ok((Complex64::from(sin), Complex64::from(-cos)));
    }
    let e = params.energy_plus(k);
    let g = params.g;
    let denominator = Complex64::from((e - basis.omega_plus) * (e - basis.omega_minus))
        - 2.0 * g * Complex64::from_polar(1.0, k) * (e - params.omega_a);
    let s_per_detuning = -2.0 * I * g * k.sin() / denominator;
    let u_a = (e - basis.omega_minus) * (basis.xi_a / g) * s_per_detuning;
    let u_b = -(e - basis.omega_plus) * (basis.xi_b / g) * s_per_detuning;
    Ok((u_a, u_b))
}

/// Closed-form solution at one wavenumber: `s`, `r = s - 1` and the
/// polariton amplitudes.
pub fn closed_form_solution(
    params: &ModelParams,
    basis: &PolaritonBasis,
    k: f64,
) -> Result<ScatteringSolution> {
    let t = transmission_amplitude(params, basis, k)?;
    let e = params.energy_plus(k);
    if t.band_edge {
        return Ok(ScatteringSolution::band_edge(k, e));
    }
    let (u_a, u_b) = occupations(params, basis, k)?;
    Ok(ScatteringSolution::from_amplitudes(
        k,
        e,
        basis,
        t.s,
        t.s - 1.0,
        u_a,
        u_b,
    ))
}

/// Direct solve of the node equations for `(r, s, u_A, u_B)`.
///
/// With `u_j = e^{ikj} + r e^{-ikj}` for `j <= -1` and `u_j = s e^{ikj}` for
/// `j >= 1`, the equations at `j = -1`, `j = 1` and for the two polaritons
/// become linear in the four unknowns. The system is solved by LU with
/// partial pivoting.
pub fn solve_node_system(
    params: &ModelParams,
    basis: &PolaritonBasis,
    k: f64,
) -> Result<ScatteringSolution> {
    let e = params.energy_plus(k);
    if check_k(k)? {
        return Ok(ScatteringSolution::band_edge(k, e));
    }
    let g = params.g;
    let w = e - params.omega;
    let (xa, xb) = (basis.xi_a, basis.xi_b);
    let p1 = Complex64::from_polar(1.0, k);
    let m1 = p1.conj();
    let p2 = p1 * p1;
    let m2 = m1 * m1;
    let zero = Complex64::new(0.0, 0.0);
    let c = Complex64::from;

    // Unknowns ordered (r, s, u_A, u_B).
    #[rustfmt::skip]
    let a = Matrix4::new(
        // (E-w) u_{-1} - g u_{-2} - xi_A u_A + xi_B u_B = 0
        w * p1 - g * p2, zero,            c(-xa),                     c(xb),
        // (E-w) u_1 - g u_2 - xi_A u_A + xi_B u_B = 0
        zero,            w * p1 - g * p2, c(-xa),                     c(xb),
        // (E-W+) u_A - xi_A (u_{-1} + u_1) = 0
        -xa * p1,        -xa * p1,        c(e - basis.omega_plus),    zero,
        // (E-W-) u_B + xi_B (u_{-1} + u_1) = 0
        xb * p1,         xb * p1,         zero,                       c(e - basis.omega_minus),
    );
    let rhs = Vector4::new(-(w * m1 - g * m2), zero, xa * m1, -xb * m1);

    let x = a
        .lu()
        .solve(&rhs)
        .filter(|x| x.iter().all(|v| v.re.is_finite() && v.im.is_finite()))
        .ok_or(Error::SingularSystem { k })?;
    Ok(ScatteringSolution::from_amplitudes(
        k, e, basis, x[1], x[0], x[2], x[3],
    ))
}

/// Residuals of the four node equations for a full amplitude set, using the
/// plane-wave forms of `u_{-2}, u_{-1}, u_1, u_2`.
pub fn node_equation_residuals(
    params: &ModelParams,
    basis: &PolaritonBasis,
    sol: &ScatteringSolution,
) -> [f64; 4] {
    let k = sol.k;
    let g = params.g;
    let e = params.energy_plus(k);
    let left = |j: f64| Complex64::from_polar(1.0, k * j) + sol.r * Complex64::from_polar(1.0, -k * j);
    let right = |j: f64| sol.s * Complex64::from_polar(1.0, k * j);
    let (um2, um1, u1, u2) = (left(-2.0), left(-1.0), right(1.0), right(2.0));
    let node = basis.xi_a * sol.u_a - basis.xi_b * sol.u_b;
    [
        ((e - params.omega) * um1 - g * um2 - node).norm(),
        ((e - params.omega) * u1 - g * u2 - node).norm(),
        ((e - basis.omega_plus) * sol.u_a - basis.xi_a * (um1 + u1)).norm(),
        ((e - basis.omega_minus) * sol.u_b + basis.xi_b * (um1 + u1)).norm(),
    ]
}

/// Direct-solve sweep over a strictly increasing grid inside `(0, pi)`.
pub fn transmission_spectrum(
    params: &ModelParams,
    k_grid: &[f64],
) -> Result<Vec<ScatteringSolution>> {
    params.validate()?;
    for (index, &k) in k_grid.iter().enumerate() {
        if !(k > 0.0 && k < PI) {
            return Err(Error::AtGridPoint {
                index,
                source: Box::new(Error::WavenumberOutOfRange { k }),
            });
        }
    }
    if let Some(index) = k_grid.windows(2).position(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput(format!(
            "k grid must be strictly increasing (index {})",
            index + 1
        )));
    }
    let basis = polariton_basis(params);
    k_grid
        .par_iter()
        .enumerate()
        .map(|(index, &k)| {
            solve_node_system(params, &basis, k).map_err(|e| Error::AtGridPoint {
                index,
                source: Box::new(e),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn setup(omega: f64, omega_a: f64, coupling: f64) -> (ModelParams, PolaritonBasis) {
        let p = ModelParams::new(omega, 1.0, omega_a, coupling).unwrap();
        (p, polariton_basis(&p))
    }

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn decoupled_node_transmits_perfectly() {
        let (p, b) = setup(3.0, 2.5, 0.0);
        for k in [0.1, 1.0, FRAC_PI_2, 2.5] {
            let t = transmission_amplitude(&p, &b, k).unwrap();
            assert_eq!(t.s, Complex64::new(1.0, 0.0));
            let d = solve_node_system(&p, &b, k).unwrap();
            assert!(close(d.s, Complex64::new(1.0, 0.0), 1e-12));
            assert!(d.r.norm() < 1e-12);
        }
    }

    #[test]
    fn hand_evaluated_amplitude() {
        let (p, b) = setup(5.0, 8.0, 3.0);
        let s = transmission_amplitude(&p, &b, FRAC_PI_2).unwrap().s;
        let expected = Complex64::new(0.0, 6.0) / Complex64::new(-9.0, 6.0);
        assert!(close(s, expected, 1e-14));
        assert!((s.re - 0.30769).abs() < 1e-5 && (s.im + 0.46154).abs() < 1e-5);
        assert!((s.norm_sqr() - 36.0 / 117.0).abs() < 1e-14);

        let d = solve_node_system(&p, &b, FRAC_PI_2).unwrap();
        assert!(close(d.s, expected, 1e-12));
    }

    #[test]
    fn fano_zero_when_level_in_band() {
        let (p, b) = setup(3.0, 2.0, 3.0);
        let k = 2.0 * PI / 3.0;
        let t = transmission_amplitude(&p, &b, k).unwrap();
        assert!(t.s.norm_sqr() < 1e-20);
        let d = solve_node_system(&p, &b, k).unwrap();
        assert!(d.s.norm() < 1e-12);
        assert!(close(d.r, Complex64::new(-1.0, 0.0), 1e-12));
    }

    #[test]
    fn occupations_at_hand_point() {
        let (p, b) = setup(5.0, 8.0, 3.0);
        let s = transmission_amplitude(&p, &b, FRAC_PI_2).unwrap().s;
        let (u_a, u_b) = occupations(&p, &b, FRAC_PI_2).unwrap();
        // (E - W-)/(E - W) * sin(theta) with E = 5, W = 8.
        let factor = (5.0 - b.omega_minus) / (5.0 - 8.0) * b.theta.sin();
        assert!((factor + 0.32492).abs() < 1e-5);
        assert!(close(u_a, factor * s, 1e-14));
        assert!((u_a.norm_sqr() - 0.03249).abs() < 1e-4);

        let d = solve_node_system(&p, &b, FRAC_PI_2).unwrap();
        assert!(close(d.u_a, u_a, 1e-12));
        assert!(close(d.u_b, u_b, 1e-12));
    }

    #[test]
    fn decoupled_occupations() {
        let (p, b) = setup(3.0, 4.5, 0.0);
        let (u_a, u_b) = occupations(&p, &b, 1.1).unwrap();
        assert_eq!(u_a.norm(), 0.0);
        assert!(close(u_b, Complex64::new(-1.0, 0.0), 1e-15));
    }

    #[test]
    fn occupations_finite_at_resonance() {
        let (p, b) = setup(3.0, 2.0, 3.0);
        let k = 2.0 * PI / 3.0;
        let (u_a, u_b) = occupations(&p, &b, k).unwrap();
        assert!(u_a.norm().is_finite() && u_b.norm().is_finite());
        let d = solve_node_system(&p, &b, k).unwrap();
        assert!(close(d.u_a, u_a, 1e-12) && close(d.u_b, u_b, 1e-12));
    }

    #[test]
    fn polariton_a_dominates_when_its_level_is_in_band() {
        let (p, b) = setup(15.0, 5.0, 3.0);
        for k in [FRAC_PI_4, FRAC_PI_2, 3.0 * FRAC_PI_4] {
            let (u_a, u_b) = occupations(&p, &b, k).unwrap();
            assert!(u_a.norm_sqr() > 10.0 * u_b.norm_sqr(), "k={k}");
        }
    }

    #[test]
    fn band_edges_are_flagged() {
        let (p, b) = setup(3.0, 2.0, 3.0);
        for k in [0.0, PI] {
            let t = transmission_amplitude(&p, &b, k).unwrap();
            assert!(t.band_edge);
            assert_eq!(t.s.norm(), 0.0);
            assert!(solve_node_system(&p, &b, k).unwrap().band_edge);
        }
        assert!(transmission_amplitude(&p, &b, -0.5).is_err());
    }

    #[test]
    fn transmission_vanishes_toward_band_edges() {
        let (p, b) = setup(5.0, 8.0, 3.0);
        let mut prev = f64::INFINITY;
        for eps in [1e-2, 1e-3, 1e-4, 1e-5] {
            let lo = transmission_amplitude(&p, &b, eps).unwrap().s.norm();
            let hi = transmission_amplitude(&p, &b, PI - eps).unwrap().s.norm();
            assert!(lo.max(hi) < prev);
            prev = lo.max(hi);
        }
        assert!(prev < 1e-4);
    }

    #[test]
    fn direct_solve_at_band_center_decoupled() {
        for omega_a in [-3.0, 0.3, 7.0] {
            let (p, b) = setup(0.0, omega_a, 0.0);
            let d = solve_node_system(&p, &b, FRAC_PI_2).unwrap();
            assert!(close(d.s, Complex64::new(1.0, 0.0), 1e-12));
            assert!(d.r.norm() < 1e-12);
        }
    }

    #[test]
    fn spectrum_validation_and_sweep() {
        let (p, _) = setup(3.0, 2.0, 0.0);
        let sols = transmission_spectrum(&p, &[0.5, 1.5, 2.5]).unwrap();
        for s in &sols {
            assert!((s.transmission - 1.0).abs() < 1e-12);
        }
        assert!(matches!(
            transmission_spectrum(&p, &[0.5, 3.5]),
            Err(Error::AtGridPoint { index: 1, .. })
        ));
        assert!(transmission_spectrum(&p, &[0.5, 0.5]).is_err());

        let (p, _) = setup(5.0, 8.0, 3.0);
        let n = 1001;
        let grid: Vec<f64> = (0..n)
            .map(|i| 0.01 * PI + 0.98 * PI * i as f64 / (n - 1) as f64)
            .collect();
        let sols = transmission_spectrum(&p, &grid).unwrap();
        let worst = sols
            .iter()
            .map(|s| (s.s.re - s.s.norm_sqr()).abs())
            .fold(0.0, f64::max);
        assert!(worst < 1e-12, "{worst}");
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(2000))]

            #[test]
            fn closed_form_and_direct_agree(
                w in -10.0..10.0f64, wa in -10.0..10.0f64, c in 0.0..6.0f64,
                k in 0.01 * PI..0.99 * PI,
            ) {
                let (p, b) = setup(w, wa, c);
                let cf = closed_form_solution(&p, &b, k).unwrap();
                let d = solve_node_system(&p, &b, k).unwrap();
                prop_assert!((cf.s.re - cf.s.norm_sqr()).abs() < 1e-12);
                prop_assert!((cf.transmission + cf.reflection - 1.0).abs() < 1e-12);
                prop_assert!(close(cf.s, d.s, 1e-12));
                prop_assert!(close(cf.r, d.r, 1e-12));
                prop_assert!(close(cf.u_a, d.u_a, 1e-12));
                prop_assert!(close(cf.u_b, d.u_b, 1e-12));
                for res in node_equation_residuals(&p, &b, &d) {
                    prop_assert!(res < 1e-12);
                }
                for res in node_equation_residuals(&p, &b, &cf) {
                    prop_assert!(res < 1e-12);
                }
            }
        }
    }
}
