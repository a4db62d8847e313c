//! Data behind the reference figures. All three use `G = 3`, `g = 1`.

use wqed_core::boundstates::bound_states;
use wqed_core::{HoppingSign, ModelParams};

use crate::commands::solve_grid;
use crate::error::CliError;
use crate::output::{Fig5dRow, Fig7Row, Fig9Row};

pub const FIGURE_COUPLING: f64 = 3.0;

/// `(label, omega, Omega)` for the a-, b- and c-lines.
pub const LINE_SETS: [(&str, f64, f64); 3] = [("a", 3.0, 2.0), ("b", 5.0, 8.0), ("c", 15.0, 5.0)];

/// Parameters of the bound-state figure.
pub const FIG9_SET: (f64, f64) = (15.0, 5.0);
pub const FIG9_RANGE: i64 = 30;

pub fn line_params(sign: HoppingSign) -> [ModelParams; 3] {
    LINE_SETS.map(|(_, omega, omega_a)| {
        ModelParams::new(omega, 1.0, omega_a, FIGURE_COUPLING)
            .expect("figure parameters are valid")
            .with_sign(sign)
    })
}

pub fn fig9_params() -> ModelParams {
    ModelParams::new(FIG9_SET.0, 1.0, FIG9_SET.1, FIGURE_COUPLING).expect("figure parameters are valid")
}

pub fn fig5d(ks: &[f64], sign: HoppingSign) -> Result<Vec<Fig5dRow>, CliError> {
    let [a, b, c] = line_params(sign).map(|p| solve_grid(&p, ks));
    let (a, b, c) = (a?, b?, c?);
    Ok(ks
        .iter()
        .enumerate()
        .map(|(i, &k)| Fig5dRow {
            k,
            t_a: a[i].transmission,
            t_b: b[i].transmission,
            t_c: c[i].transmission,
        })
        .collect())
}

pub fn fig7(ks: &[f64], sign: HoppingSign) -> Result<Vec<Fig7Row>, CliError> {
    let [a, b, c] = line_params(sign).map(|p| solve_grid(&p, ks));
    let (a, b, c) = (a?, b?, c?);
    Ok(ks
        .iter()
        .enumerate()
        .map(|(i, &k)| Fig7Row {
            k,
            u_a2_a: a[i].u_a.norm_sqr(),
            u_b2_a: a[i].u_b.norm_sqr(),
            u_a2_b: b[i].u_a.norm_sqr(),
            u_b2_b: b[i].u_b.norm_sqr(),
            u_a2_c: c[i].u_a.norm_sqr(),
            u_b2_c: c[i].u_b.norm_sqr(),
        })
        .collect())
}

/// Both bound-state energies and normalized `|u_j|` for `|j| <= 30`.
pub fn fig9() -> Result<Vec<Fig9Row>, CliError> {
    let states = bound_states(&fig9_params()).map_err(|e| CliError::from_core("boundstates", e))?;
    let [upper, lower] = states.as_slice() else {
        return Err(CliError::validation("figure fig9 expects two bound states"));
    };
    Ok((-FIG9_RANGE..=FIG9_RANGE)
        .map(|j| Fig9Row {
            j,
            e_b1: upper.energy,
            e_b2: lower.energy,
            abs_u1: upper.amplitude(j).abs(),
            abs_u2: lower.amplitude(j).abs(),
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fig9_energies_lie_outside_band() {
        let rows = fig9().unwrap();
        assert_eq!(rows.len(), 61);
        assert!(rows[0].e_b1 > 17.0 && rows[0].e_b2 < 13.0);
        let center = &rows[30];
        assert_eq!(center.j, 0);
        assert!(rows.iter().all(|r| r.abs_u1 <= center.abs_u1 && r.abs_u2 <= center.abs_u2));
    }

    #[test]
    fn fig5d_b_line_mid_band() {
        let rows = fig5d(&[std::f64::consts::FRAC_PI_2], HoppingSign::Plus).unwrap();
        assert!((rows[0].t_b - 36.0 / 117.0).abs() < 1e-14);
    }
}
