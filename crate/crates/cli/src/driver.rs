//! Shared per-d experiment driver for the disk: mesh policy, spike-seeded
//! solve, and the full diagnostic row used by the sweep command and the
//! acceptance suite.

use std::sync::Arc;

use nb_core::asymptotics::{
    self, ConcentrationMetrics, TestFunctionParams,
};
use nb_core::fem::{self, AssembledOperators, Field};
use nb_core::geometry::{boundary_chart, build_disk_mesh, Domain, Mesh, StraighteningChart};
use nb_core::ground_state::{
    self, count_local_maxima, scaled_energy_budget, SolveOptions, SolveReport,
};
use nb_core::io::SweepRow;
use nb_core::radial::RadialProfile;
use nb_core::symmetry;

use crate::{numerical, AppError};

/// Canonical spike location on the disk. Curvature is constant, so the tie
/// between boundary points is broken to the top of the disk; this aligns the
/// peak with the mesh mirror axis and the §5 normalization.
pub const SPIKE_POINT: [f64; 2] = [0.0, 1.0];

/// Chart radius used for test functions on the unit disk; the boundary is a
/// graph and the straightening stays injective out to about 0.55.
pub const DISK_CHART_RADIUS: f64 = 0.55;

/// Coarse background size: 10·h covers the spike zone; the cap keeps coarse
/// d values from producing absurdly coarse far fields.
pub fn mesh_policy(d: f64) -> (f64, u32) {
    let h_fine = d.sqrt() / 6.0;
    let h_base = (2.0 / 3.0 * d.sqrt()).min(0.2);
    let levels = (h_base / h_fine).log2().ceil().max(0.0) as u32;
    (h_base, levels)
}

pub struct DiskExperiment {
    pub domain: Domain,
    pub mesh: Arc<Mesh>,
    pub ops: AssembledOperators,
    pub chart: StraighteningChart,
    pub k: f64,
}

impl DiskExperiment {
    /// Mesh + operators + chart for one d per the sweep policy.
    pub fn prepare(d: f64) -> Result<DiskExperiment, AppError> {
        if !(d > 0.0) {
            return Err(crate::usage(format!("d must be positive, got {d}")));
        }
        let domain = Domain::unit_disk();
        let (h_base, levels) = mesh_policy(d);
        let mesh = Arc::new(
            build_disk_mesh(1.0, h_base, Some((SPIKE_POINT, levels))).map_err(numerical)?,
        );
        let ops = fem::assemble(&mesh).map_err(numerical)?;
        let chart = boundary_chart(&domain, SPIKE_POINT, DISK_CHART_RADIUS).map_err(numerical)?;
        let k = TestFunctionParams::default_k(&chart);
        Ok(DiskExperiment { domain, mesh, ops, chart, k })
    }

    /// Transplanted-profile initial field at the spike point.
    pub fn bump_init(&self, profile: &Arc<RadialProfile>, d: f64) -> Result<Field, AppError> {
        let params = TestFunctionParams::new(self.chart.clone(), profile.clone(), d, self.k)
            .map_err(numerical)?;
        asymptotics::build_test_function(&params, &self.mesh).map_err(numerical)
    }

    pub fn solve(&self, d: f64, init: &Field) -> Result<SolveReport, AppError> {
        let domain = self.domain.clone();
        ground_state::solve_ground_state(
            &self.ops,
            d,
            init,
            move |p| domain.distance_to_boundary(p),
            &SolveOptions::default(),
        )
        .map_err(numerical)
    }
}

pub struct SweepEntry {
    pub row: SweepRow,
    pub report: SolveReport,
    pub concentration: ConcentrationMetrics,
    pub nonconstant: bool,
}

/// Full diagnostic pass at one d: solve from the curvature bump, then the
/// concentration, budget and symmetry metrics.
pub fn run_sweep_entry(d: f64, profile: &Arc<RadialProfile>) -> Result<SweepEntry, AppError> {
    let exp = DiskExperiment::prepare(d)?;
    let init = exp.bump_init(profile, d)?;
    let (m_test, _) = ground_state::max_over_ray(&exp.ops, &init, d).map_err(numerical)?;
    let (t0, _) = asymptotics::ray_maximizer_t0(&exp.ops, &init, d).map_err(numerical)?;
    let report = exp.solve(d, &init)?;
    if !report.converged {
        return Err(AppError::Numerical(format!(
            "solve at d = {d} did not converge (grad_norm {:.3e} after {} iterations)",
            report.grad_norm, report.iterations
        )));
    }
    let u = &report.field;
    let nonconstant = u.max() - u.min() > 0.1 * u.max().abs();

    let peak_chart = boundary_chart(
        &exp.domain,
        nearest_boundary_point(&exp.domain, [report.peak_x, report.peak_y]),
        0.5,
    )
    .map_err(numerical)?;
    let concentration =
        asymptotics::concentration_report(&report, profile, &peak_chart, 5.0)
            .map_err(numerical)?;
    let budget = scaled_energy_budget(&exp.ops, &report);

    let (refl, angular, vertical, maxima) = if nonconstant {
        let sym = symmetry::symmetry_report(u, [report.peak_x, report.peak_y], d)
            .map_err(numerical)?;
        (sym.reflection_residual, sym.angular_min, sym.vertical_min, sym.maxima_count)
    } else {
        let (count, _) = count_local_maxima(u, 0.5);
        (0.0, f64::NAN, f64::NAN, count)
    };

    Ok(SweepEntry {
        row: SweepRow {
            d,
            m_d: report.m_d,
            m_test,
            t0,
            dist_over_sqrtd: concentration.dist_over_sqrt_d,
            profile_sup_err: concentration.profile_sup_err,
            mu1: concentration.mu1,
            budget,
            refl_residual: refl,
            angular_min: angular,
            vertical_min: vertical,
            maxima_count: maxima,
        },
        report,
        concentration,
        nonconstant,
    })
}

fn nearest_boundary_point(domain: &Domain, p: [f64; 2]) -> [f64; 2] {
    domain.project(p).1
}

/// Worker-count cap from NB_THREADS (defaults to machine parallelism).
pub fn configure_threads() {
    if let Ok(v) = std::env::var("NB_THREADS") {
        if let Ok(n) = v.trim().parse::<usize>() {
            if n >= 1 {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
        }
    }
}
