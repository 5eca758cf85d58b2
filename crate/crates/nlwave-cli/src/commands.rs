//! Command execution: maps a parsed configuration onto the library
//! operations and writes the artifact files (CSV tables, JSON summaries,
//! snapshots, the config echo and a version-stamped metadata record).

use crate::config::{Command, InitialSpec, KernelSpec, RunConfig};
use nlwave::diagnostics::{
    nash_moser_params, optimize_pmin, probe_suite, NonlinearEstimate, ProbeKind, ProbeReport,
};
use nlwave::dynamics::{EvolutionParams, State, S0};
use nlwave::experiments::{
    lattice_crosscheck, linearized_growth_fit, longtime_sweep, run_simulation, SweepConfig,
};
use nlwave::field::Field;
use nlwave::grid::Grid;
use nlwave::kernel::{builtin_kernel, Kernel, Tabulated};
use nlwave::snapshot::{fmt_f64, write_state};
use serde::Serialize;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

/// Failure modes mapped to exit codes: configuration problems exit 1,
/// runtime/blow-up problems exit 2.
#[derive(Debug)]
pub enum RunError {
    Config(String),
    Runtime(String),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 1,
            RunError::Runtime(_) => 2,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            RunError::Config(m) | RunError::Runtime(m) => m,
        }
    }
}

fn config_err(e: impl std::fmt::Display) -> RunError {
    RunError::Config(e.to_string())
}

fn runtime_err(e: impl std::fmt::Display) -> RunError {
    RunError::Runtime(e.to_string())
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<(), RunError> {
    std::fs::write(dir.join(name), contents)
        .map_err(|e| RunError::Runtime(format!("writing {name}: {e}")))
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

#[derive(Serialize)]
struct Metadata<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    config: String,
}

fn load_kernel(cfg: &RunConfig) -> Result<Kernel, RunError> {
    match &cfg.kernel {
        KernelSpec::Builtin(name) => builtin_kernel(name).map_err(config_err),
        KernelSpec::File(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| RunError::Config(format!("reading kernel file {path}: {e}")))?;
            let name = Path::new(path)
                .file_stem()
                .and_then(|s| s.to_str())
                .unwrap_or("custom")
                .to_string();
            Ok(Kernel::new(Tabulated::from_csv(name, &text).map_err(config_err)?))
        }
    }
}

fn build_grid(cfg: &RunConfig) -> Result<Grid, RunError> {
    Grid::new(cfg.half_length, cfg.n_points).map_err(config_err)
}

fn initial_state(cfg: &RunConfig, grid: &Grid) -> Result<State, RunError> {
    match &cfg.initial {
        InitialSpec::Gaussian => {
            let a = cfg.amplitude;
            Ok(State::new(
                Field::from_fn(grid, move |x| a * (-x * x).exp()),
                Field::zeros(grid),
                0.0,
            )
            .expect("same grid"))
        }
        InitialSpec::Sine => {
            let a = cfg.amplitude;
            let l = grid.half_length();
            Ok(State::new(
                Field::from_fn(grid, move |x| a * (std::f64::consts::PI * x / l).sin()),
                Field::zeros(grid),
                0.0,
            )
            .expect("same grid"))
        }
        InitialSpec::Zero => Ok(State::new(Field::zeros(grid), Field::zeros(grid), 0.0)
            .expect("same grid")),
        InitialSpec::File(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| RunError::Config(format!("reading initial file {path}: {e}")))?;
            let st = nlwave::snapshot::read_snapshot(&text).map_err(config_err)?;
            if st.u.grid() != grid {
                return Err(RunError::Config(format!(
                    "initial file grid (L={}, N={}) does not match the configured grid",
                    st.u.grid().half_length(),
                    st.u.grid().n_points()
                )));
            }
            Ok(st)
        }
    }
}

/// Executes the configured command, writing artifacts into `out_dir`.
pub fn execute(cfg: &RunConfig) -> Result<(), RunError> {
    let out = PathBuf::from(&cfg.out_dir);
    std::fs::create_dir_all(&out)
        .map_err(|e| RunError::Runtime(format!("creating {}: {e}", out.display())))?;

    write_file(&out, "config_echo.cfg", &cfg.echo())?;
    let meta = Metadata {
        tool: "nlwave",
        version: env!("CARGO_PKG_VERSION"),
        command: cfg.command.name(),
        config: cfg.echo(),
    };
    write_file(&out, "metadata.json", &to_json(&meta))?;

    let result = match cfg.command {
        Command::ValidateKernel => cmd_validate_kernel(cfg, &out),
        Command::Simulate => cmd_simulate(cfg, &out),
        Command::Sweep => cmd_sweep(cfg, &out),
        Command::Linearized => cmd_linearized(cfg, &out),
        Command::Probes => cmd_probes(cfg, &out),
        Command::Crosscheck => cmd_crosscheck(cfg, &out),
        Command::NashMoser => cmd_nashmoser(cfg, &out),
    };
    if let Err(e) = &result {
        #[derive(Serialize)]
        struct ErrorRecord<'a> {
            error: &'a str,
            exit_code: i32,
        }
        let _ = write_file(
            &out,
            "error.json",
            &to_json(&ErrorRecord {
                error: e.message(),
                exit_code: e.exit_code(),
            }),
        );
    }
    result
}

fn cmd_validate_kernel(cfg: &RunConfig, out: &Path) -> Result<(), RunError> {
    let kernel = load_kernel(cfg)?;
    let grid = build_grid(cfg)?;
    let report = kernel.validate(&grid).map_err(config_err)?;
    write_file(out, "validation.json", &to_json(&report))
}

fn cmd_simulate(cfg: &RunConfig, out: &Path) -> Result<(), RunError> {
    let kernel = load_kernel(cfg)?;
    let grid = build_grid(cfg)?;
    kernel.validate(&grid).map_err(config_err)?;
    let initial = initial_state(cfg, &grid)?;
    let prm = EvolutionParams::new(kernel.clone(), cfg.epsilon, cfg.power, cfg.sobolev_index)
        .map_err(config_err)?;
    let dt = cfg
        .dt
        .unwrap_or_else(|| nlwave::experiments::default_dt(&grid, &kernel, cfg.epsilon, cfg.power));
    let (report, snapshots) = run_simulation(
        &initial,
        &prm,
        &cfg.integrator,
        cfg.t_end,
        dt,
        cfg.sample_every,
        cfg.escape_factor,
        &cfg.snapshots,
    )
    .map_err(runtime_err)?;

    let mut csv = String::from("t,Xs_norm,Hs_u,Hs_v,hamiltonian,Es,escaped\n");
    for row in &report.rows {
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{}",
            fmt_f64(row.t),
            fmt_f64(row.xs_norm),
            fmt_f64(row.hs_u),
            fmt_f64(row.hs_v),
            fmt_f64(row.hamiltonian),
            fmt_f64(row.es),
            row.escaped as u8
        );
    }
    write_file(out, "diagnostics.csv", &csv)?;
    for (i, st) in snapshots.iter().enumerate() {
        write_file(out, &format!("snapshot_{i:03}.csv"), &write_state(st))?;
    }

    #[derive(Serialize)]
    struct Summary {
        dt: f64,
        steps_sampled: usize,
        escaped_at: Option<f64>,
        blowup_at: Option<f64>,
        final_t: f64,
        final_xs_norm: f64,
    }
    let last = report.rows.last().expect("at least the initial row");
    write_file(
        out,
        "summary.json",
        &to_json(&Summary {
            dt,
            steps_sampled: report.rows.len(),
            escaped_at: report.escaped_at,
            blowup_at: report.blowup_at,
            final_t: last.t,
            final_xs_norm: last.xs_norm,
        }),
    )?;
    if let Some(t) = report.blowup_at {
        return Err(RunError::Runtime(format!(
            "blow-up detected at t = {t}; summary and diagnostics written"
        )));
    }
    Ok(())
}

fn cmd_sweep(cfg: &RunConfig, out: &Path) -> Result<(), RunError> {
    let kernel = load_kernel(cfg)?;
    let grid = build_grid(cfg)?;
    kernel.validate(&grid).map_err(config_err)?;
    let initial = initial_state(cfg, &grid)?;
    let sweep_cfg = SweepConfig {
        kernel,
        power: cfg.power,
        sobolev_index: cfg.sobolev_index,
        epsilon_list: cfg.epsilon_list.clone(),
        t_cap: cfg.t_cap,
        escape_factor: cfg.escape_factor,
        integrator: cfg.integrator.clone(),
        dt: cfg.dt,
    };
    let results = longtime_sweep(&initial, &sweep_cfg).map_err(runtime_err)?;
    let mut csv = String::from("epsilon,p,s,T_esc,product,cap_hit\n");
    for r in &results {
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{}",
            fmt_f64(r.epsilon),
            r.p,
            fmt_f64(r.s),
            fmt_f64(r.t_esc),
            fmt_f64(r.product),
            r.cap_hit as u8
        );
    }
    write_file(out, "sweep.csv", &csv)?;
    write_file(out, "sweep.json", &to_json(&results))
}

fn cmd_linearized(cfg: &RunConfig, out: &Path) -> Result<(), RunError> {
    let kernel = load_kernel(cfg)?;
    let grid = build_grid(cfg)?;
    let w = match initial_state(cfg, &grid)? {
        st => st.u,
    };
    let dt = cfg.dt.unwrap_or(2e-3);
    let fits = linearized_growth_fit(
        &w,
        &kernel,
        cfg.sobolev_index,
        cfg.power,
        &cfg.epsilon_list,
        cfg.t_end,
        dt,
        cfg.seed,
    )
    .map_err(runtime_err)?;
    let mut csv = String::from("epsilon,slope\n");
    for f in &fits {
        let _ = writeln!(csv, "{},{}", fmt_f64(f.epsilon), fmt_f64(f.slope));
    }
    write_file(out, "growth.csv", &csv)?;

    #[derive(Serialize)]
    struct Growth {
        fits: Vec<nlwave::experiments::GrowthFit>,
        /// slope ratios of consecutive epsilon entries
        ratios: Vec<f64>,
    }
    let ratios = fits
        .windows(2)
        .map(|w| w[0].slope / w[1].slope)
        .collect();
    write_file(out, "growth.json", &to_json(&Growth { fits, ratios }))
}

fn cmd_probes(cfg: &RunConfig, out: &Path) -> Result<(), RunError> {
    let kernel = load_kernel(cfg)?;
    let grid = build_grid(cfg)?;
    let kinds = [
        ProbeKind::Moser,
        ProbeKind::Kato,
        ProbeKind::Nonlinear(NonlinearEstimate::Term),
        ProbeKind::Nonlinear(NonlinearEstimate::Jacobian),
        ProbeKind::Nonlinear(NonlinearEstimate::Hessian),
    ];
    let mut reports: Vec<ProbeReport> = Vec::new();
    for kind in kinds {
        reports.push(
            probe_suite(
                kind,
                &grid,
                cfg.sobolev_index,
                S0,
                1.0,
                cfg.power,
                &kernel,
                cfg.samples,
                cfg.seed,
            )
            .map_err(runtime_err)?,
        );
    }
    write_file(out, "probes.json", &to_json(&reports))
}

fn cmd_crosscheck(cfg: &RunConfig, out: &Path) -> Result<(), RunError> {
    let grid = build_grid(cfg)?;
    let initial = initial_state(cfg, &grid)?;
    let dt = cfg.dt.unwrap_or(4e-3);
    let mut rows = Vec::new();
    for step in [dt, dt / 2.0] {
        let dev = lattice_crosscheck(
            &initial.u,
            &initial.v,
            cfg.power,
            cfg.epsilon,
            cfg.t_end,
            step,
        )
        .map_err(runtime_err)?;
        rows.push((step, dev));
    }
    let mut csv = String::from("dt,max_deviation\n");
    for (step, dev) in &rows {
        let _ = writeln!(csv, "{},{}", fmt_f64(*step), fmt_f64(*dev));
    }
    write_file(out, "crosscheck.csv", &csv)?;

    #[derive(Serialize)]
    struct Crosscheck {
        dt: Vec<f64>,
        max_deviation: Vec<f64>,
        refinement_ratio: f64,
    }
    write_file(
        out,
        "crosscheck.json",
        &to_json(&Crosscheck {
            dt: rows.iter().map(|r| r.0).collect(),
            max_deviation: rows.iter().map(|r| r.1).collect(),
            refinement_ratio: rows[0].1 / rows[1].1.max(1e-300),
        }),
    )
}

fn cmd_nashmoser(_cfg: &RunConfig, out: &Path) -> Result<(), RunError> {
    let (d_star, p_star) = optimize_pmin();
    #[derive(Serialize)]
    struct Optimum {
        #[serde(rename = "D_star")]
        d_star: f64,
        #[serde(rename = "P_star")]
        p_star: f64,
        at_optimum: nlwave::diagnostics::NashMoserParams,
    }
    let params = nash_moser_params(d_star).map_err(runtime_err)?;
    write_file(
        out,
        "nashmoser.json",
        &to_json(&Optimum {
            d_star,
            p_star,
            at_optimum: params,
        }),
    )
}
