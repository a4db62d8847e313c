//! Verification suite: ten checks of the closed forms against independent
//! oracles, each with a pinned tolerance.

use std::f64::consts::{FRAC_PI_2, PI};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wqed_core::boundstates::{bound_energies, bound_states, BoundSpectrum};
use wqed_core::lattice::{bound_states_numeric, propagate_wavepacket, LatticeConfig, WavepacketSpec};
use wqed_core::model::polariton_basis;
use wqed_core::scattering::{
    closed_form_solution, node_equation_residuals, solve_node_system, transmission_amplitude,
};
use wqed_core::{HoppingSign, ModelParams};

use crate::commands::solve_grid;
use crate::figures::{fig5d, fig7, fig9, fig9_params, line_params};
use crate::output::csv_bytes;
use crate::settings::GridSpec;

pub const DRAWS: usize = 10_000;
pub const PARAMETER_SETS: usize = 100;
pub const AMPLITUDE_TOL: f64 = 1e-12;
pub const FANO_T_TOL: f64 = 1e-20;
pub const EIGEN_REL_TOL: f64 = 1e-12;
pub const BOUND_ENERGY_TOL: f64 = 1e-8;
pub const OVERLAP_TOL: f64 = 1e-8;
pub const LATTICE_HALF_WIDTH: usize = 200;
pub const WAVEPACKET_T_TOL: f64 = 0.02;
pub const FANO_T_NUM_MAX: f64 = 0.01;

#[derive(Debug, Clone)]
pub struct CheckResult {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl CheckResult {
    pub fn line(&self) -> String {
        format!(
            "[{}] {:>2} {:<28} {} ({:.2} s)",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.detail,
            self.seconds
        )
    }
}

type Outcome = (bool, String);

pub struct Check {
    pub id: u8,
    pub name: &'static str,
    run: fn() -> Outcome,
}

impl Check {
    pub fn run(&self) -> CheckResult {
        let start = Instant::now();
        let (passed, detail) = (self.run)();
        CheckResult {
            id: self.id,
            name: self.name,
            passed,
            detail,
            seconds: start.elapsed().as_secs_f64(),
        }
    }
}

pub const CHECKS: [Check; 10] = [
    Check { id: 1, name: "flux conservation", run: flux_conservation },
    Check { id: 2, name: "closed form vs direct solve", run: closed_vs_direct },
    Check { id: 3, name: "Fano zero", run: fano_zero },
    Check { id: 4, name: "decoupling identity", run: decoupling },
    Check { id: 5, name: "polariton eigenvalues", run: polariton_eigen },
    Check { id: 6, name: "bound states vs lattice", run: bound_vs_lattice },
    Check { id: 7, name: "bound-state count and order", run: bound_count },
    Check { id: 8, name: "wavepacket transmission", run: wavepacket_transmission },
    Check { id: 9, name: "figure shapes", run: figure_shapes },
    Check { id: 10, name: "determinism", run: determinism },
];

pub fn check(id: u8) -> &'static Check {
    &CHECKS[usize::from(id) - 1]
}

pub fn run_all() -> Vec<CheckResult> {
    CHECKS.iter().map(Check::run).collect()
}

fn params(omega: f64, omega_a: f64, coupling: f64) -> ModelParams {
    ModelParams::new(omega, 1.0, omega_a, coupling).expect("drawn parameters are valid")
}

/// `(params, k)` with `omega, Omega, G` uniform in `[0, 6]` and `k` uniform in
/// `(0.01 pi, 0.99 pi)`.
fn draws(seed: u64) -> Vec<(ModelParams, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..DRAWS)
        .map(|_| {
            let p = params(rng.gen_range(0.0..=6.0), rng.gen_range(0.0..=6.0), rng.gen_range(0.0..=6.0));
            (p, rng.gen_range(0.01 * PI..0.99 * PI))
        })
        .collect()
}

fn flux_conservation() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for (p, k) in draws(1) {
        let s = match transmission_amplitude(&p, &polariton_basis(&p), k) {
            Ok(t) => t.s,
            Err(e) => return (false, format!("{p:?} k={k}: {e}")),
        };
        worst = worst.max((s.re - s.norm_sqr()).abs());
    }
    let secs = start.elapsed().as_secs_f64();
    (
        worst < AMPLITUDE_TOL && secs < 1.0,
        format!("max |Re s - |s|^2| = {worst:.1e} over {DRAWS} draws in {secs:.3} s"),
    )
}

fn closed_vs_direct() -> Outcome {
    let (mut diff, mut residual) = (0.0f64, 0.0f64);
    for (p, k) in draws(1) {
        let basis = polariton_basis(&p);
        let (closed, direct) = match (closed_form_solution(&p, &basis, k), solve_node_system(&p, &basis, k)) {
            (Ok(c), Ok(d)) => (c, d),
            (Err(e), _) | (_, Err(e)) => return (false, format!("{p:?} k={k}: {e}")),
        };
        diff = diff.max((closed.s - direct.s).norm());
        for sol in [&closed, &direct] {
            let r = node_equation_residuals(&p, &basis, sol);
            residual = residual.max(r.into_iter().fold(0.0, f64::max));
        }
    }
    (
        diff < AMPLITUDE_TOL && residual < AMPLITUDE_TOL,
        format!("max |s_closed - s_direct| = {diff:.1e}, max residual = {residual:.1e}"),
    )
}

fn fano_zero() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut t_max, mut r_dev) = (0.0f64, 0.0f64);
    for _ in 0..PARAMETER_SETS {
        let omega = rng.gen_range(0.0..=6.0);
        let coupling = rng.gen_range(0.1..=6.0);
        let omega_a = omega + 2.0 * rng.gen_range(0.01 * PI..0.99 * PI).cos();
        let p = params(omega, omega_a, coupling);
        let k_star = ((omega_a - omega) / 2.0).acos();
        let basis = polariton_basis(&p);
        match (transmission_amplitude(&p, &basis, k_star), solve_node_system(&p, &basis, k_star)) {
            (Ok(t), Ok(sol)) => {
                t_max = t_max.max(t.s.norm_sqr());
                r_dev = r_dev.max((sol.r + 1.0).norm());
            }
            (Err(e), _) | (_, Err(e)) => return (false, format!("{p:?}: {e}")),
        }
    }
    (
        t_max < FANO_T_TOL && r_dev < AMPLITUDE_TOL,
        format!("max T(E = Omega) = {t_max:.1e}, max |r + 1| = {r_dev:.1e}"),
    )
}

fn decoupling() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let ks = GridSpec::default().points();
    let mut worst = 0.0f64;
    for _ in 0..PARAMETER_SETS {
        let p = params(rng.gen_range(0.0..=6.0), rng.gen_range(0.0..=6.0), 0.0);
        let basis = polariton_basis(&p);
        for &k in &ks {
            match (transmission_amplitude(&p, &basis, k), solve_node_system(&p, &basis, k)) {
                (Ok(t), Ok(sol)) => {
                    worst = worst.max((t.s - 1.0).norm()).max((sol.s - 1.0).norm());
                }
                (Err(e), _) | (_, Err(e)) => return (false, format!("{p:?} k={k}: {e}")),
            }
        }
    }
    (
        worst < AMPLITUDE_TOL,
        format!("max |s - 1| = {worst:.1e} (closed form and direct solve)"),
    )
}

/// Eigenvalues of `[[Omega, G], [G, omega]]` from the quadratic formula,
/// polished by Newton steps on the characteristic polynomial.
fn reference_eigenvalues(omega_a: f64, omega: f64, coupling: f64) -> [f64; 2] {
    let trace = omega_a + omega;
    let cc = coupling * coupling;
    let det = omega_a.mul_add(omega, -cc) + (-coupling).mul_add(coupling, cc);
    let disc = ((omega_a - omega).powi(2) + 4.0 * cc).sqrt();
    [0.5 * (trace + disc), 0.5 * (trace - disc)].map(|mut x| {
        for _ in 0..3 {
            let slope = 2.0 * x - trace;
            if slope == 0.0 {
                break;
            }
            x -= x.mul_add(x - trace, det) / slope;
        }
        x
    })
}

fn polariton_eigen() -> Outcome {
    let mut worst = 0.0f64;
    for (p, _) in draws(5) {
        let b = polariton_basis(&p);
        let reference = reference_eigenvalues(p.omega_a, p.omega, p.coupling);
        for (got, want) in [b.omega_plus, b.omega_minus].into_iter().zip(reference) {
            let err = if want == 0.0 {
                got.abs()
            } else {
                ((got - want) / want).abs()
            };
            worst = worst.max(err);
        }
    }
    (
        worst < EIGEN_REL_TOL,
        format!("max relative error = {worst:.1e} over {DRAWS} draws"),
    )
}

/// Energy difference and overlap between analytic and lattice bound states.
fn compare_with_lattice(p: &ModelParams) -> Result<(f64, f64), String> {
    let analytic = bound_states(p).map_err(|e| e.to_string())?;
    let numeric = bound_states_numeric(p, &LatticeConfig::hard_wall(LATTICE_HALF_WIDTH)).map_err(|e| e.to_string())?;
    if numeric.len() != analytic.len() || analytic.len() != 2 {
        return Err(format!("{p:?}: {} lattice vs {} analytic levels", numeric.len(), analytic.len()));
    }
    let l = LATTICE_HALF_WIDTH as i64;
    let (mut de, mut defect) = (0.0f64, 0.0f64);
    for (n, a) in numeric.iter().zip(&analytic) {
        de = de.max((n.energy - a.energy).abs());
        let overlap: f64 = (-l..=l).map(|j| n.site(j) * a.amplitude(j)).sum::<f64>() + n.atom() * a.u_e;
        defect = defect.max(1.0 - overlap.abs());
    }
    Ok((de, defect))
}

fn bound_vs_lattice() -> Outcome {
    let start = Instant::now();
    let (mut de, mut defect) = match compare_with_lattice(&fig9_params()) {
        Ok(v) => v,
        Err(e) => return (false, e),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut accepted = 0;
    while accepted < PARAMETER_SETS {
        let p = params(rng.gen_range(0.0..=6.0), rng.gen_range(0.0..=6.0), rng.gen_range(0.5..=6.0));
        // Levels that reach the walls of the finite lattice are not comparable.
        match bound_states(&p) {
            Ok(states) if states.iter().all(|s| s.beta.abs() <= 0.95) => {}
            Ok(_) => continue,
            Err(e) => return (false, format!("{p:?}: {e}")),
        }
        match compare_with_lattice(&p) {
            Ok((a, b)) => {
                de = de.max(a);
                defect = defect.max(b);
            }
            Err(e) => return (false, e),
        }
        accepted += 1;
    }
    let secs = start.elapsed().as_secs_f64();
    (
        de < BOUND_ENERGY_TOL && defect < OVERLAP_TOL && secs < 10.0,
        format!("max |dE| = {de:.1e}, max 1 - overlap = {defect:.1e}, {secs:.2} s"),
    )
}

fn bound_count() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for i in 0..PARAMETER_SETS {
        // Log-uniform couplings reach deep into the weak-coupling regime.
        let coupling = 10f64.powf(rng.gen_range(-6.0..=0.78));
        let p = params(rng.gen_range(0.0..=6.0), rng.gen_range(0.0..=6.0), coupling);
        match bound_energies(&p) {
            // Very weakly bound levels sit closer to the edge than an f64
            // energy can resolve; the solved edge offset still places them.
            Ok(BoundSpectrum::Pair { upper, lower })
                if upper.edge_offset > 0.0
                    && lower.edge_offset > 0.0
                    && upper.energy >= p.band_top()
                    && lower.energy <= p.band_bottom() => {}
            other => return (false, format!("set {i} {p:?}: {other:?}")),
        }
        let decoupled = ModelParams { coupling: 0.0, ..p };
        match (bound_energies(&decoupled), bound_states_numeric(&decoupled, &LatticeConfig::hard_wall(50))) {
            (Ok(BoundSpectrum::NoBoundState), Ok(v)) if v.is_empty() => {}
            (a, b) => return (false, format!("G = 0 {decoupled:?}: {a:?} / {} lattice levels", b.map_or(0, |v| v.len()))),
        }
    }
    let grid: Vec<f64> = (1..=50).map(|i| 0.12 * i as f64).collect();
    for base in [fig9_params(), line_params(HoppingSign::Plus)[1]] {
        let mut prev: Option<(f64, f64)> = None;
        for &coupling in &grid {
            let p = ModelParams { coupling, ..base };
            let Ok(BoundSpectrum::Pair { upper, lower }) = bound_energies(&p) else {
                return (false, format!("G = {coupling}: expected two levels"));
            };
            if let Some((u, l)) = prev {
                if !(upper.energy > u && lower.energy < l) {
                    return (false, format!("not monotone at G = {coupling} for {base:?}"));
                }
            }
            prev = Some((upper.energy, lower.energy));
        }
    }
    (
        true,
        format!("{PARAMETER_SETS} sets with 2 levels, none at G = 0, monotone on 50-point G grid"),
    )
}

fn wavepacket_transmission() -> Outcome {
    let run = |p: ModelParams, spec: WavepacketSpec, l: usize| {
        let start = Instant::now();
        propagate_wavepacket(&p, &LatticeConfig::absorbing(l), &spec)
            .map(|out| (out.transmission, start.elapsed().as_secs_f64()))
            .map_err(|e| e.to_string())
    };
    let b_line = run(params(5.0, 8.0, 3.0), WavepacketSpec::new(FRAC_PI_2, 40.0, -400, 1500.0), 2000);
    let fano = run(params(3.0, 2.0, 3.0), WavepacketSpec::new(2.0 * PI / 3.0, 40.0, -400, 1200.0), 1800);
    match (b_line, fano) {
        (Ok((t_b, s_b)), Ok((t_f, s_f))) => {
            let exact = 36.0 / 117.0;
            (
                (t_b - exact).abs() < WAVEPACKET_T_TOL && t_f < FANO_T_NUM_MAX && s_b < 60.0 && s_f < 60.0,
                format!("T_num = {t_b:.5} vs {exact:.5} ({s_b:.1} s); Fano T_num = {t_f:.1e} ({s_f:.1} s)"),
            )
        }
        (Err(e), _) | (_, Err(e)) => (false, e),
    }
}

fn sign_changes(values: &[f64]) -> usize {
    values.windows(2).filter(|w| w[0] * w[1] < 0.0).count()
}

fn figure_shapes() -> Outcome {
    let ks = GridSpec::default().points();
    let sets = line_params(HoppingSign::Plus);
    let mut im_changes = [0usize; 3];
    for (slot, p) in im_changes.iter_mut().zip(&sets) {
        match solve_grid(p, &ks) {
            Ok(sols) => *slot = sign_changes(&sols.iter().map(|s| s.s.im).collect::<Vec<_>>()),
            Err(e) => return (false, e.to_string()),
        }
    }
    let (t_rows, u_rows) = match (fig5d(&ks, HoppingSign::Plus), fig7(&ks, HoppingSign::Plus)) {
        (Ok(t), Ok(u)) => (t, u),
        (Err(e), _) | (_, Err(e)) => return (false, e.to_string()),
    };
    let mean = |f: fn(&crate::output::Fig5dRow) -> f64| t_rows.iter().map(f).sum::<f64>() / t_rows.len() as f64;
    let (mean_a, mean_b, mean_c) = (mean(|r| r.t_a), mean(|r| r.t_b), mean(|r| r.t_c));
    let t_min_a = t_rows.iter().map(|r| r.t_a).fold(f64::INFINITY, f64::min);
    let mid = &fig5d(&[FRAC_PI_2], HoppingSign::Plus).expect("mid-band point")[0];

    let a_zero = im_changes[0] == 1 && t_min_a < 1e-4;
    let bc_no_zero = im_changes[1] == 0 && im_changes[2] == 0;
    let suppressed = mean_a < mean_b && mean_a < mean_c;
    let mid_band = mid.t_b > mid.t_a && mid.t_c > mid.t_a;

    let c_dominant = u_rows.iter().all(|r| r.u_a2_c > r.u_b2_c);
    let max = |f: fn(&crate::output::Fig7Row) -> f64| u_rows.iter().map(f).fold(0.0, f64::max);
    let ratio = max(|r| r.u_a2_a) / max(|r| r.u_b2_a);
    let comparable = (0.1..=10.0).contains(&ratio);

    (
        a_zero && bc_no_zero && suppressed && mid_band && c_dominant && comparable,
        format!(
            "Im s sign changes a/b/c = {im_changes:?}, min T_a = {t_min_a:.1e}, mean T = {mean_a:.3}/{mean_b:.3}/{mean_c:.3}, \
             |uA|^2 > |uB|^2 (c): {c_dominant}, max ratio (a) = {ratio:.2}"
        ),
    )
}

fn render_figures() -> Result<Vec<Vec<u8>>, String> {
    let ks = GridSpec::default().points();
    let f5 = fig5d(&ks, HoppingSign::Plus).map_err(|e| e.to_string())?;
    let f7 = fig7(&ks, HoppingSign::Plus).map_err(|e| e.to_string())?;
    let f9 = fig9().map_err(|e| e.to_string())?;
    [csv_bytes(&f5), csv_bytes(&f7), csv_bytes(&f9)]
        .into_iter()
        .map(|r| r.map_err(|e| e.to_string()))
        .collect()
}

fn determinism() -> Outcome {
    match (render_figures(), render_figures()) {
        (Ok(a), Ok(b)) => {
            let bytes: usize = a.iter().map(Vec::len).sum();
            (a == b, format!("fig5d/fig7/fig9 CSV identical across runs ({bytes} bytes)"))
        }
        (Err(e), _) | (_, Err(e)) => (false, e),
    }
}
