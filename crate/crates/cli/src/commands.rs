//! The four commands (`profile`, `solve`, `sweep`, `moser`) plus `rerun`.
//! Every command echoes its resolved arguments to `config.json` in the
//! output directory; re-running from that echo reproduces every output file
//! byte for byte.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Subcommand};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use nb_core::asymptotics::{self, TestFunctionParams};
use nb_core::geometry::{boundary_chart, Domain};
use nb_core::io;
use nb_core::moser;
use nb_core::radial::{self, RadialProfile};

use crate::driver::{self, DiskExperiment};
use crate::svg;
use crate::{numerical, usage, AppError};

#[derive(Debug, Clone, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Compute the limit profile by radial shooting and its constants.
    Profile(ProfileArgs),
    /// Solve one ground state on the disk.
    Solve(SolveArgs),
    /// Sweep d: solves with full diagnostics plus the expansion fits.
    Sweep(SweepArgs),
    /// Sharpness sweep for the borderline exponential functional.
    Moser(MoserArgs),
    /// Re-execute a command from a config.json echo.
    Rerun(RerunArgs),
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ProfileArgs {
    /// bisection tolerance on the shooting amplitude
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    /// outer radius of the radial grid
    #[arg(long, default_value_t = 30.0)]
    pub rmax: f64,
    #[arg(long, default_value = "nb-out")]
    pub out: PathBuf,
    /// echoed for reproducibility; no command currently draws random numbers
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct SolveArgs {
    #[arg(long, default_value = "disk")]
    pub domain: String,
    #[arg(long)]
    pub d: f64,
    /// target element size (refined to √d/6 near the spike point)
    #[arg(long, default_value_t = 0.0)]
    pub h: f64,
    /// initial field: curvature-bump | constant
    #[arg(long, default_value = "curvature-bump")]
    pub init: String,
    #[arg(long, default_value = "nb-out")]
    pub out: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct SweepArgs {
    /// comma-separated decreasing d values to solve
    #[arg(long, value_name = "LIST", default_value = "0.1,0.05,0.025,0.0125")]
    pub d_list: String,
    /// comma-separated d values for the mesh-free expansion fits
    #[arg(long, value_name = "LIST", default_value = "0.005,0.0025,0.00125,0.000625")]
    pub expansion_d_list: String,
    /// also write SVG plots
    #[arg(long, default_value_t = false)]
    pub plots: bool,
    #[arg(long, default_value = "nb-out")]
    pub out: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct MoserArgs {
    /// comma-separated exponents
    #[arg(long, value_name = "LIST")]
    pub alphas: String,
    /// comma-separated concentration scales (decreasing, ≥ 4 decades)
    #[arg(long, value_name = "LIST")]
    pub eps_list: String,
    #[arg(long, default_value_t = moser::DEFAULT_DELTA)]
    pub delta: f64,
    #[arg(long, default_value = "nb-out")]
    pub out: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct RerunArgs {
    /// path to a config.json written by a previous run
    #[arg(long)]
    pub config: PathBuf,
    /// optional replacement output directory
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn dispatch(cmd: Command) -> Result<(), AppError> {
    match cmd {
        Command::Profile(a) => cmd_profile(&a),
        Command::Solve(a) => cmd_solve(&a),
        Command::Sweep(a) => cmd_sweep(&a),
        Command::Moser(a) => cmd_moser(&a),
        Command::Rerun(a) => cmd_rerun(&a),
    }
}

fn ensure_out(dir: &Path) -> Result<(), AppError> {
    std::fs::create_dir_all(dir)
        .map_err(|e| usage(format!("cannot create output directory {}: {e}", dir.display())))
}

fn echo_config(dir: &Path, cmd: &Command) -> Result<(), AppError> {
    io::write_json(&dir.join("config.json"), cmd).map_err(numerical)
}

fn parse_list(name: &str, text: &str) -> Result<Vec<f64>, AppError> {
    if text.trim().is_empty() {
        return Err(usage(format!("{name} must not be empty")));
    }
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| usage(format!("{name}: cannot parse '{t}' as a number")))
        })
        .collect()
}

#[derive(Serialize)]
struct ProfileSummary {
    amplitude: f64,
    #[serde(rename = "I_w")]
    i_w: f64,
    gamma: f64,
    theta: f64,
}

fn compute_profile(tol: f64, rmax: f64) -> Result<RadialProfile, AppError> {
    if rmax < 20.0 {
        return Err(usage(format!(
            "rmax = {rmax} is below 20; the shooting bracket needs room to classify trajectories"
        )));
    }
    if !(tol > 0.0 && tol < 1e-2) {
        return Err(usage(format!("tol must lie in (0, 1e-2), got {tol}")));
    }
    radial::shoot_ground_state(tol, rmax).map_err(numerical)
}

pub fn cmd_profile(args: &ProfileArgs) -> Result<(), AppError> {
    ensure_out(&args.out)?;
    echo_config(&args.out, &Command::Profile(args.clone()))?;
    let profile = compute_profile(args.tol, args.rmax)?;
    io::write_profile(&args.out.join("profile.txt"), &profile).map_err(numerical)?;
    let summary = ProfileSummary {
        amplitude: profile.amplitude,
        i_w: radial::energy_i(&profile),
        gamma: radial::gamma_constant(&profile),
        theta: profile.theta,
    };
    io::write_json(&args.out.join("profile.json"), &summary).map_err(numerical)?;
    println!(
        "{}",
        serde_json::to_string(&summary).expect("summary serializes")
    );
    Ok(())
}

pub fn cmd_solve(args: &SolveArgs) -> Result<(), AppError> {
    if args.domain != "disk" {
        return Err(usage(format!(
            "only the disk domain is supported, got '{}'",
            args.domain
        )));
    }
    if !(args.d > 0.0) {
        return Err(usage(format!("d must be positive, got {}", args.d)));
    }
    if args.h < 0.0 {
        return Err(usage("h must be nonnegative"));
    }
    match args.init.as_str() {
        "curvature-bump" | "constant" => {}
        other => return Err(usage(format!("unknown init preset '{other}'"))),
    }
    ensure_out(&args.out)?;
    echo_config(&args.out, &Command::Solve(args.clone()))?;

    let d = args.d;
    let exp = if args.h > 0.0 {
        // honor the requested background size, still refining the spike zone
        let h_fine = d.sqrt() / 6.0;
        let levels = (args.h / h_fine).log2().ceil().max(0.0) as u32;
        let mesh = Arc::new(
            nb_core::geometry::build_disk_mesh(1.0, args.h, Some((driver::SPIKE_POINT, levels)))
                .map_err(numerical)?,
        );
        let ops = nb_core::fem::assemble(&mesh).map_err(numerical)?;
        let domain = Domain::unit_disk();
        let chart = boundary_chart(&domain, driver::SPIKE_POINT, driver::DISK_CHART_RADIUS)
            .map_err(numerical)?;
        let k = TestFunctionParams::default_k(&chart);
        DiskExperiment { domain, mesh, ops, chart, k }
    } else {
        DiskExperiment::prepare(d)?
    };

    let init_field = match args.init.as_str() {
        "constant" => nb_core::fem::Field::constant(exp.mesh.clone(), (2.0_f64.ln()).sqrt()),
        _ => {
            let profile = Arc::new(compute_profile(1e-10, 30.0)?);
            exp.bump_init(&profile, d)?
        }
    };
    let report = exp.solve(d, &init_field)?;
    io::write_mesh(&args.out.join("solve.mesh"), &exp.mesh).map_err(numerical)?;
    io::write_field(&args.out.join("solve.field"), &report.field).map_err(numerical)?;
    io::write_json(&args.out.join("solve.json"), &report).map_err(numerical)?;
    println!(
        "{}",
        serde_json::to_string(&report).expect("report serializes")
    );
    if !report.converged {
        return Err(AppError::Numerical(format!(
            "solve did not converge: grad_norm {:.3e} after {} iterations",
            report.grad_norm, report.iterations
        )));
    }
    Ok(())
}

#[derive(Serialize)]
struct SweepSummary {
    half_i_w: f64,
    gamma: f64,
    phi2_at_0: f64,
    fitted_gamma_coeff: f64,
    fitted_gamma_over_gamma: f64,
    flat_fitted_coeff: f64,
    fitted_beta: f64,
    t0_loglog_slope: f64,
    /// per-solve chain: m_d/(½I(w)·d), both the d and √d normalizations
    chain_ratio_d: Vec<f64>,
    chain_ratio_sqrt_d: Vec<f64>,
}

pub fn cmd_sweep(args: &SweepArgs) -> Result<(), AppError> {
    let d_list = parse_list("d-list", &args.d_list)?;
    if d_list.is_empty() {
        return Err(usage("d-list must not be empty"));
    }
    if d_list.iter().any(|&d| !(d > 0.0)) {
        return Err(usage("every d must be positive"));
    }
    let expansion_list = parse_list("expansion-d-list", &args.expansion_d_list)?;
    ensure_out(&args.out)?;
    echo_config(&args.out, &Command::Sweep(args.clone()))?;
    driver::configure_threads();

    let profile = Arc::new(compute_profile(1e-10, 30.0)?);
    let half_iw = 0.5 * radial::energy_i(&profile);
    let gamma = radial::gamma_constant(&profile);

    // solve entries are independent; aggregation is in d-order
    let entries: Vec<Result<driver::SweepEntry, AppError>> = d_list
        .par_iter()
        .map(|&d| driver::run_sweep_entry(d, &profile))
        .collect();
    let mut rows = Vec::with_capacity(entries.len());
    for e in entries {
        rows.push(e?);
    }
    io::write_sweep_csv(
        &args.out.join("sweep.csv"),
        &rows.iter().map(|e| e.row.clone()).collect::<Vec<_>>(),
    )
    .map_err(numerical)?;

    let domain = Domain::unit_disk();
    let chart = boundary_chart(&domain, driver::SPIKE_POINT, driver::DISK_CHART_RADIUS)
        .map_err(numerical)?;
    let k = TestFunctionParams::default_k(&chart);
    let expansion = asymptotics::expansion_fit(&expansion_list, &chart, &profile, k, half_iw, gamma)
        .map_err(numerical)?;
    io::write_expansion_csv(&args.out.join("expansion.csv"), &expansion.rows)
        .map_err(numerical)?;
    let summary = SweepSummary {
        half_i_w: half_iw,
        gamma,
        phi2_at_0: expansion.phi2_at_0,
        fitted_gamma_coeff: expansion.fitted_gamma_coeff,
        fitted_gamma_over_gamma: expansion.fitted_gamma_coeff
            / (expansion.phi2_at_0 * gamma).max(1e-300),
        flat_fitted_coeff: expansion.flat_fitted_coeff,
        fitted_beta: expansion.fitted_beta,
        t0_loglog_slope: expansion.t0_loglog_slope,
        chain_ratio_d: rows.iter().map(|e| e.row.m_d / (half_iw * e.row.d)).collect(),
        chain_ratio_sqrt_d: rows
            .iter()
            .map(|e| e.row.m_d / (half_iw * e.row.d.sqrt()))
            .collect(),
    };
    io::write_json(&args.out.join("expansion.json"), &summary).map_err(numerical)?;

    if args.plots {
        let plot_dir = args.out.join("plots");
        ensure_out(&plot_dir)?;
        let pts: Vec<(f64, f64)> =
            rows.iter().map(|e| (e.row.d, e.row.m_d / e.row.d)).collect();
        svg::line_plot(
            &plot_dir.join("level_over_d.svg"),
            "m_d / d against d",
            &pts,
            Some(half_iw),
        )
        .map_err(numerical)?;
        // overlay: limit profile against the rescaled solved state at the
        // smallest d, sampled along the inward normal from the peak
        if let Some(entry) = rows.last() {
            let d = entry.row.d;
            // sample along the inward normal, staying inside the disk
            let reach = 8.0_f64.min(1.8 / d.sqrt());
            let mut prof_pts = Vec::new();
            let mut solved_pts = Vec::new();
            for i in 0..=200 {
                let rz = reach * i as f64 / 200.0;
                prof_pts.push((rz, profile.eval(rz)));
                let x = [
                    entry.report.peak_x * (1.0 - rz * d.sqrt()),
                    entry.report.peak_y * (1.0 - rz * d.sqrt()),
                ];
                solved_pts.push((rz, entry.report.field.eval(x)));
            }
            svg::overlay_plot(
                &plot_dir.join("profile_overlay.svg"),
                "limit profile vs rescaled ground state (inward normal)",
                &prof_pts,
                &solved_pts,
            )
            .map_err(numerical)?;
        }
    }
    println!(
        "{}",
        serde_json::to_string(&summary).expect("summary serializes")
    );
    Ok(())
}

pub fn cmd_moser(args: &MoserArgs) -> Result<(), AppError> {
    let alphas = parse_list("alphas", &args.alphas)?;
    let eps_list = parse_list("eps-list", &args.eps_list)?;
    if alphas.is_empty() || eps_list.is_empty() {
        return Err(usage("alphas and eps-list must not be empty"));
    }
    ensure_out(&args.out)?;
    echo_config(&args.out, &Command::Moser(args.clone()))?;
    let table = moser::sharpness_sweep(&alphas, &eps_list, args.delta)
        .map_err(|e| match e {
            moser::MoserError::InvalidParameter(m) => usage(m),
            other => numerical(other),
        })?;
    // CSV: alpha,eps,value,classification
    let mut out = String::from("alpha,eps,value,classification\n");
    for row in &table.rows {
        for (eps, value) in table.eps_list.iter().zip(&row.values) {
            let class = match row.classification {
                moser::GrowthClass::Bounded => "bounded",
                moser::GrowthClass::Diverging => "diverging",
                moser::GrowthClass::Indeterminate => "indeterminate",
            };
            out.push_str(&format!("{:.16e},{:.16e},{:.16e},{}\n", row.alpha, eps, value, class));
        }
    }
    std::fs::write(args.out.join("moser.csv"), out)
        .map_err(|e| numerical(format!("writing moser.csv: {e}")))?;
    io::write_json(&args.out.join("moser.json"), &table).map_err(numerical)?;
    println!(
        "{}",
        serde_json::to_string(&table.rows.iter().map(|r| (r.alpha, r.classification)).collect::<Vec<_>>())
            .expect("table serializes")
    );
    Ok(())
}

pub fn cmd_rerun(args: &RerunArgs) -> Result<(), AppError> {
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| usage(format!("cannot read {}: {e}", args.config.display())))?;
    let mut cmd: Command = serde_json::from_str(&text)
        .map_err(|e| usage(format!("{} is not a valid config echo: {e}", args.config.display())))?;
    if let Some(out) = &args.out {
        match &mut cmd {
            Command::Profile(a) => a.out = out.clone(),
            Command::Solve(a) => a.out = out.clone(),
            Command::Sweep(a) => a.out = out.clone(),
            Command::Moser(a) => a.out = out.clone(),
            Command::Rerun(_) => return Err(usage("cannot rerun a rerun config")),
        }
    }
    if matches!(cmd, Command::Rerun(_)) {
        return Err(usage("cannot rerun a rerun config"));
    }
    dispatch(cmd)
}
