//! Timing probe for the heavy numerical paths; not part of the test suite.

use std::sync::Arc;
use std::time::Instant;

use nb_cli::driver::{mesh_policy, DiskExperiment};
use nb_core::asymptotics::{ChartQuadrature, TestFunctionParams};
use nb_core::geometry::{boundary_chart, Domain};
use nb_core::radial;

fn main() {
    let t = Instant::now();
    let profile = Arc::new(radial::shoot_ground_state(1e-10, 25.0).unwrap());
    println!(
        "shoot: {:.2?}  amplitude {}  theta {}",
        t.elapsed(),
        profile.amplitude,
        profile.theta
    );
    let t = Instant::now();
    let i_w = radial::energy_i(&profile);
    let gamma = radial::gamma_constant(&profile);
    println!("I(w) = {i_w}, gamma = {gamma} in {:.2?}", t.elapsed());
    let t = Instant::now();
    let res = radial::pohozaev_checks(&profile);
    println!("pohozaev {res:?} in {:.2?}", t.elapsed());

    let args: Vec<String> = std::env::args().collect();
    let d: f64 = args.get(1).map(|s| s.parse().unwrap()).unwrap_or(0.05);

    let t = Instant::now();
    let exp = DiskExperiment::prepare(d).unwrap();
    println!(
        "mesh at d={d}: {} nodes (policy {:?}) in {:.2?}",
        exp.mesh.node_count(),
        mesh_policy(d),
        t.elapsed()
    );
    let t = Instant::now();
    let init = exp.bump_init(&profile, d).unwrap();
    println!("bump init in {:.2?}, max {}", t.elapsed(), init.max());
    let t = Instant::now();
    let report = exp.solve(d, &init).unwrap();
    println!(
        "solve: {:.2?}  m_d {}  iters {}  grad {:.2e}  conv {}  peak ({}, {}) bdry {}",
        t.elapsed(),
        report.m_d,
        report.iterations,
        report.grad_norm,
        report.converged,
        report.peak_x,
        report.peak_y,
        report.peak_on_boundary
    );
    println!("m_d/d = {}  (half I = {})", report.m_d / d, 0.5 * i_w);

    let domain = Domain::unit_disk();
    let chart = boundary_chart(&domain, [0.0, 1.0], 0.55).unwrap();
    let k = TestFunctionParams::default_k(&chart);
    for dq in [0.005, 0.000625] {
        let t = Instant::now();
        let params = TestFunctionParams::new(chart.clone(), profile.clone(), dq, k).unwrap();
        let quad = ChartQuadrature::new(&params);
        let t0 = quad.t0().unwrap();
        println!(
            "chart quad d={dq}: level/d {}  t0 {}  in {:.2?}",
            quad.level_over_d(t0),
            t0,
            t.elapsed()
        );
    }

    if args.iter().any(|a| a == "--entry") {
        let t = Instant::now();
        let entry = nb_cli::driver::run_sweep_entry(d, &profile).unwrap();
        println!(
            "entry at d={d} in {:.2?}:\n  {:?}\n  nonconstant {}  patch {}  tail pts {}",
            t.elapsed(),
            entry.row,
            entry.nonconstant,
            entry.concentration.patch_radius,
            entry.concentration.tail_points
        );
    }
    if args.iter().any(|a| a == "--fit") {
        let t = Instant::now();
        let report = nb_core::asymptotics::expansion_fit(
            &[0.005, 0.0025, 0.00125, 0.000625],
            &chart,
            &profile,
            k,
            0.5 * i_w,
            gamma,
        )
        .unwrap();
        println!(
            "expansion fit in {:.2?}: gamma_coeff {} (gamma {})  flat {}  beta {}  loglog {}",
            t.elapsed(),
            report.fitted_gamma_coeff,
            gamma,
            report.flat_fitted_coeff,
            report.fitted_beta,
            report.t0_loglog_slope
        );
        for row in &report.rows {
            println!(
                "  d {:.6}: M/d {:.8}  t0 {:.8}  flat {:.8} / {:.8}",
                row.d, row.m_test_over_d, row.t0, row.flat_level_over_d, row.flat_t0
            );
        }
    }
}
