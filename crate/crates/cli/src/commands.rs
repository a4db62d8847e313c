//! Table builders for the sweep commands. Wavenumbers are taken and reported
//! in the configured convention and mapped to the internal one for the
//! library calls.

use rayon::prelude::*;
use wqed_core::boundstates::bound_states;
use wqed_core::lattice::{propagate_wavepacket, LatticeConfig, WavepacketSpec};
use wqed_core::model::polariton_basis;
use wqed_core::scattering::{closed_form_solution, ScatteringSolution};
use wqed_core::{Error, ModelParams};

use crate::args::PacketArgs;
use crate::error::CliError;
use crate::output::{BoundRow, OccupationRow, SnapshotRow, SpectrumRow, WavepacketRow};

/// Closed-form solutions at each reported wavenumber, in grid order.
pub fn solve_grid(params: &ModelParams, ks: &[f64]) -> Result<Vec<ScatteringSolution>, CliError> {
    let basis = polariton_basis(params);
    let sign = params.hopping_sign;
    ks.par_iter()
        .enumerate()
        .map(|(index, &k)| {
            closed_form_solution(params, &basis, sign.to_internal(k)).map_err(|e| Error::AtGridPoint {
                index,
                source: Box::new(e),
            })
        })
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| CliError::from_core("scattering", e))
}

pub fn spectrum(params: &ModelParams, ks: &[f64]) -> Result<Vec<SpectrumRow>, CliError> {
    Ok(solve_grid(params, ks)?
        .into_iter()
        .zip(ks)
        .map(|(sol, &k)| SpectrumRow {
            k,
            energy: sol.energy,
            transmission: sol.transmission,
            reflection: sol.reflection,
            re_s: sol.s.re,
            im_s: sol.s.im,
            u_a2: sol.u_a.norm_sqr(),
            u_b2: sol.u_b.norm_sqr(),
        })
        .collect())
}

pub fn occupations(params: &ModelParams, ks: &[f64]) -> Result<Vec<OccupationRow>, CliError> {
    Ok(solve_grid(params, ks)?
        .into_iter()
        .zip(ks)
        .map(|(sol, &k)| OccupationRow {
            k,
            energy: sol.energy,
            u_a2: sol.u_a.norm_sqr(),
            u_b2: sol.u_b.norm_sqr(),
            re_u_a: sol.u_a.re,
            im_u_a: sol.u_a.im,
            re_u_b: sol.u_b.re,
            im_u_b: sol.u_b.im,
        })
        .collect())
}

/// Bound states, upper level first; empty for a decoupled node.
pub fn bound(params: &ModelParams) -> Result<Vec<BoundRow>, CliError> {
    let states = bound_states(params).map_err(|e| CliError::from_core("boundstates", e))?;
    Ok(states
        .into_iter()
        .map(|s| BoundRow {
            branch: s.branch.as_str().to_string(),
            energy: s.energy,
            beta: s.beta,
            localization_length: s.localization_length(),
            u0: s.u0,
            u_e: s.u_e,
            norm: s.norm_check,
        })
        .collect())
}

pub fn wavepacket(
    params: &ModelParams,
    packet: &PacketArgs,
) -> Result<(WavepacketRow, Vec<SnapshotRow>), CliError> {
    let config = if packet.hard_wall {
        LatticeConfig::hard_wall(packet.half_width)
    } else {
        LatticeConfig::absorbing(packet.half_width)
    };
    let k0 = params.hopping_sign.to_internal(packet.k0);
    let spec = WavepacketSpec {
        dt: packet.dt,
        j_cut: packet.j_cut,
        snapshot_every: packet.snapshot_every,
        ..WavepacketSpec::new(k0, packet.sigma, packet.j0, packet.t_final)
    };
    let out = propagate_wavepacket(params, &config, &spec).map_err(|e| CliError::from_core("lattice", e))?;
    let closed = solve_grid(params, &[packet.k0])?.remove(0);
    let row = WavepacketRow {
        k0: packet.k0,
        energy: closed.energy,
        t_num: out.transmission,
        r_num: out.reflection,
        t_closed: closed.transmission,
        absorbed_left: out.absorbed_left,
        absorbed_right: out.absorbed_right,
        residual: out.residual,
        norm_drift: out.norm_drift,
        steps: out.steps,
    };
    let half = config.half_width as i64;
    let snapshots = out
        .snapshots
        .iter()
        .flat_map(|snap| {
            snap.density.iter().enumerate().map(move |(i, &prob)| SnapshotRow {
                t: snap.t,
                j: i as i64 - half,
                prob,
            })
        })
        .collect();
    Ok((row, snapshots))
}

#[cfg(test)]
mod tests {
    use super::*;
    use wqed_core::HoppingSign;

    #[test]
    fn minus_convention_mirrors_wavenumbers() {
        let plus = ModelParams::new(5.0, 1.0, 8.0, 3.0).unwrap();
        let minus = plus.with_sign(HoppingSign::Minus);
        let ks = [0.3, 1.0, 2.0];
        let a = spectrum(&plus, &ks).unwrap();
        let mirrored: Vec<f64> = ks.iter().map(|k| std::f64::consts::PI - k).collect();
        let b = spectrum(&minus, &mirrored).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x.transmission - y.transmission).abs() < 1e-14);
            assert!((x.energy - y.energy).abs() < 1e-14);
        }
    }

    #[test]
    fn decoupled_bound_table_is_empty() {
        let p = ModelParams::new(5.0, 1.0, 8.0, 0.0).unwrap();
        assert!(bound(&p).unwrap().is_empty());
        let p = ModelParams::new(15.0, 1.0, 5.0, 3.0).unwrap();
        let rows = bound(&p).unwrap();
        assert_eq!(rows.len(), 2);
        assert!(rows[0].energy > 17.0 && rows[1].energy < 13.0);
    }
}
