//! `magspec`: computes the spectral constants, band functions, half-space
//! bottom, helical-ball geometry, effective-energy minimization, trial-state
//! energies and model-operator sweeps behind the two-term eigenvalue
//! expansion `Θ₀h + γ̂ h^{4/3}`, emitting reproducible CSV/JSON.

mod config;
mod emit;

use clap::{Args, Parser, Subcommand};
use config::FileConfig;
use emit::{write_output, Cell, Table};
use magspec_core::asymptotics::{self, EnergyVariant, Regime};
use magspec_core::geometry;
use magspec_core::grid::{Bc, Grid1D};
use magspec_core::halfspace;
use magspec_core::model1d::{self, SpectralConstants};
use magspec_core::model3d::{self, ModelParams};
use magspec_core::quasimode;
use serde::Serialize;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "magspec", version, about, max_term_width = 100)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Output path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Emit the primary output as JSON instead of CSV.
    #[arg(long)]
    json: bool,
    /// Key-value config file; flags override file entries.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the spectral constants (Θ₀, ξ₀, δ₀, ν̂₀, ρ₀) as JSON.
    #[command(allow_negative_numbers = true)]
    Constants {
        #[command(flatten)]
        common: Common,
        /// Interior nodes of the de Gennes grid.
        #[arg(long)]
        grid_n: Option<usize>,
        /// Interior nodes of the Montgomery grid.
        #[arg(long)]
        mont_n: Option<usize>,
        /// Half-line cut of the de Gennes grid.
        #[arg(long)]
        grid_l: Option<f64>,
        /// Half-width of the Montgomery grid.
        #[arg(long)]
        mont_l: Option<f64>,
    },
    /// Sample a 1D band function (de Gennes μ(ξ) or Montgomery μ^Mon(ρ)).
    ///
    /// CSV columns: param, value, residual, status.
    #[command(allow_negative_numbers = true)]
    Band {
        #[command(flatten)]
        common: Common,
        /// Which band: degennes | montgomery.
        #[arg(long, default_value = "degennes")]
        model: String,
        #[arg(long)]
        from: Option<f64>,
        #[arg(long)]
        to: Option<f64>,
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Sweep the half-space bottom σ(ν).
    ///
    /// CSV columns: nu, value, residual, l1, l2, status (status is "ok",
    /// "ok-low-nu-caution" for ν < 0.05, or an error message).
    #[command(allow_negative_numbers = true)]
    Sigma {
        #[command(flatten)]
        common: Common,
        /// Comma-separated ν values in (0, π/2].
        #[arg(long)]
        nu_list: Option<String>,
        #[arg(long)]
        tol: Option<f64>,
        /// Grid spacing (matched across the sweep).
        #[arg(long)]
        dx: Option<f64>,
    },
    /// Helical-ball geometry table and effective-energy summary.
    ///
    /// CSV columns: x3, branch, kappa_nB, b_dot_t, kappa_g, gamma_tilde
    /// (one block of rows per x3-chart branch).
    #[command(allow_negative_numbers = true)]
    Helical {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        tau: Option<f64>,
        /// Samples per chart branch.
        #[arg(long)]
        samples: Option<usize>,
        /// Angular-factor variant: linear | squared.
        #[arg(long)]
        variant: Option<String>,
        /// Path for the JSON minimization summary (stdout when omitted).
        #[arg(long)]
        summary_out: Option<PathBuf>,
    },
    /// Two-term eigenvalue expansion over an h-list.
    ///
    /// CSV columns: h, two_term_lambda, status.
    #[command(allow_negative_numbers = true)]
    Asympt {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        tau: Option<f64>,
        #[arg(long)]
        variant: Option<String>,
        /// Comma-separated h values.
        #[arg(long)]
        h_list: Option<String>,
    },
    /// Trial-state energy sweep at a boundary frame (θ, κ, γ).
    ///
    /// CSV columns: h, norm_sq, energy, corrected_ratio, status.
    #[command(allow_negative_numbers = true)]
    Quasimode {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        theta: Option<f64>,
        #[arg(long)]
        kappa: Option<f64>,
        #[arg(long)]
        gamma: Option<f64>,
        #[arg(long)]
        h_list: Option<String>,
        /// Quadrature step in both rescaled directions.
        #[arg(long)]
        step: Option<f64>,
    },
    /// Model-operator eigenvalue sweep over (η, ζ) × h.
    ///
    /// CSV columns: eta, zeta, h, h_lambda1, status.
    #[command(allow_negative_numbers = true)]
    Model3d {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        gamma: Option<f64>,
        #[arg(long)]
        theta: Option<f64>,
        #[arg(long)]
        eta_list: Option<String>,
        #[arg(long)]
        zeta_list: Option<String>,
        #[arg(long)]
        h_list: Option<String>,
        /// Nodes per r/s axis.
        #[arg(long)]
        nr: Option<usize>,
        /// Nodes along t.
        #[arg(long)]
        nt: Option<usize>,
        #[arg(long)]
        tol: Option<f64>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(RunError::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(2)
        }
        Err(RunError::Computation(msg)) => {
            eprintln!("computation failed: {msg}");
            ExitCode::from(1)
        }
    }
}

enum RunError {
    Usage(String),
    Computation(String),
}

impl From<magspec_core::Error> for RunError {
    fn from(e: magspec_core::Error) -> Self {
        RunError::Computation(e.to_string())
    }
}

impl From<std::io::Error> for RunError {
    fn from(e: std::io::Error) -> Self {
        RunError::Computation(format!("io: {e}"))
    }
}

fn file_config(common: &Common) -> Result<FileConfig, RunError> {
    match &common.config {
        Some(p) => FileConfig::load(p).map_err(RunError::Usage),
        None => Ok(FileConfig::empty()),
    }
}

fn usage<T>(r: Result<T, String>) -> Result<T, RunError> {
    r.map_err(RunError::Usage)
}

fn default_constants() -> Result<SpectralConstants, RunError> {
    Ok(SpectralConstants::compute_default()?)
}

fn run(cli: Cli) -> Result<(), RunError> {
    match cli.command {
        Command::Constants { common, grid_n, mont_n, grid_l, mont_l } => {
            let f = file_config(&common)?;
            let grid_n = usage(f.resolve(grid_n, "grid-n", 4000))?;
            let mont_n = usage(f.resolve(mont_n, "mont-n", 4000))?;
            let grid_l = usage(f.resolve(grid_l, "grid-l", 20.0))?;
            let mont_l = usage(f.resolve(mont_l, "mont-l", 10.0))?;
            #[derive(Serialize)]
            struct Config {
                grid_n: usize,
                mont_n: usize,
                grid_l: f64,
                mont_l: f64,
            }
            let cfg = Config { grid_n, mont_n, grid_l, mont_l };
            let dg = Grid1D::new(0.0, grid_l, grid_n, Bc::Neumann, Bc::Dirichlet)?;
            let mont = Grid1D::new(-mont_l, mont_l, mont_n, Bc::Dirichlet, Bc::Dirichlet)?;
            let c = model1d::compute_constants(&dg, &mont)?;
            let doc = serde_json::json!({
                "command": "constants",
                "config": serde_json::to_value(&cfg).unwrap(),
                "theta0": c.theta0,
                "xi0": c.xi0,
                "delta0": c.delta0,
                "nu0_hat": c.nu0_hat,
                "rho0": c.rho0,
                "mont_curvature": c.mont_curvature,
                "degennes_grid": {
                    "a": c.degennes_meta.a, "b": c.degennes_meta.b,
                    "n": c.degennes_meta.n, "refined_n": c.degennes_meta.refined_n,
                    "spacing": c.degennes_meta.spacing,
                },
                "montgomery_grid": {
                    "a": c.montgomery_meta.a, "b": c.montgomery_meta.b,
                    "n": c.montgomery_meta.n, "refined_n": c.montgomery_meta.refined_n,
                    "spacing": c.montgomery_meta.spacing,
                },
                "max_residual": c.max_residual,
            });
            write_output(common.out.as_deref(), &format!("{:#}\n", doc))?;
            Ok(())
        }

        Command::Band { common, model, from, to, samples } => {
            let f = file_config(&common)?;
            let (d_from, d_to) = if model == "montgomery" { (-1.0, 2.0) } else { (0.0, 1.6) };
            let from = usage(f.resolve(from, "from", d_from))?;
            let to = usage(f.resolve(to, "to", d_to))?;
            let samples = usage(f.resolve(samples, "samples", 50))?;
            if samples < 2 {
                return Err(RunError::Usage("need at least 2 samples".into()));
            }
            if !(from < to) {
                return Err(RunError::Usage(format!("need from < to, got {from} >= {to}")));
            }
            #[derive(Serialize)]
            struct Config {
                model: String,
                from: f64,
                to: f64,
                samples: usize,
            }
            let cfg = Config { model: model.clone(), from, to, samples };
            let mut table = Table::new(&["param", "value", "residual", "status"]);
            for k in 0..samples {
                let x = from + (to - from) * k as f64 / (samples - 1) as f64;
                let sample = match model.as_str() {
                    "degennes" => model1d::degennes_mu(x, &model1d::default_degennes_grid()),
                    "montgomery" => {
                        model1d::montgomery_mu(x, &model1d::default_montgomery_grid())
                    }
                    other => {
                        return Err(RunError::Usage(format!(
                            "unknown model '{other}' (expected degennes | montgomery)"
                        )))
                    }
                };
                match sample {
                    Ok(s) => table.rows.push(vec![
                        Cell::Num(x),
                        Cell::Num(s.value),
                        Cell::Num(s.residual),
                        Cell::Text("ok".into()),
                    ]),
                    Err(e) => table.rows.push(vec![
                        Cell::Num(x),
                        Cell::Text(String::new()),
                        Cell::Text(String::new()),
                        Cell::Text(e.to_string()),
                    ]),
                }
            }
            emit_table(&common, "band", &table, &serde_json::to_value(&cfg).unwrap())
        }

        Command::Sigma { common, nu_list, tol, dx } => {
            let f = file_config(&common)?;
            let nus = usage(f.resolve_list(&nu_list, "nu-list", &[0.2, 0.4, 0.7, 1.0, 1.3]))?;
            let tol = usage(f.resolve(tol, "tol", 1e-3))?;
            let dx = usage(f.resolve(dx, "dx", 0.1))?;
            if nus.is_empty() {
                return Err(RunError::Usage("nu-list is empty".into()));
            }
            if !(dx > 0.0 && dx < 1.0) {
                return Err(RunError::Usage(format!("dx must be in (0, 1), got {dx}")));
            }
            #[derive(Serialize)]
            struct Config {
                nu_list: Vec<f64>,
                tol: f64,
                dx: f64,
            }
            let cfg = Config { nu_list: nus.clone(), tol, dx };
            let mut table = Table::new(&["nu", "value", "residual", "l1", "l2", "status"]);
            let mut failed = false;
            for s in halfspace::sigma_sweep_with_spacing(&nus, tol, dx) {
                match s {
                    Ok(s) => table.rows.push(vec![
                        Cell::Num(s.nu),
                        Cell::Num(s.value),
                        Cell::Num(s.residual),
                        Cell::Num(s.box_used.l1),
                        Cell::Num(s.box_used.l2),
                        Cell::Text(
                            if s.low_nu_caution { "ok-low-nu-caution" } else { "ok" }.into(),
                        ),
                    ]),
                    Err(e) => {
                        failed = true;
                        table.rows.push(vec![
                            Cell::Text(String::new()),
                            Cell::Text(String::new()),
                            Cell::Text(String::new()),
                            Cell::Text(String::new()),
                            Cell::Text(String::new()),
                            Cell::Text(e.to_string()),
                        ]);
                    }
                }
            }
            emit_table(&common, "sigma", &table, &serde_json::to_value(&cfg).unwrap())?;
            if failed {
                return Err(RunError::Computation("one or more sigma samples failed".into()));
            }
            Ok(())
        }

        Command::Helical { common, tau, samples, variant, summary_out } => {
            let f = file_config(&common)?;
            let tau = usage(f.resolve(tau, "tau", 1.0))?;
            let samples = usage(f.resolve(samples, "samples", 200))?;
            let variant_name = match &variant {
                Some(v) => v.clone(),
                None => "linear".to_string(),
            };
            let variant = parse_variant(&variant_name)?;
            if samples < 2 {
                return Err(RunError::Usage("need at least 2 samples per branch".into()));
            }
            #[derive(Serialize)]
            struct Config {
                tau: f64,
                samples: usize,
                variant: String,
            }
            let cfg = Config { tau, samples, variant: variant_name.clone() };
            let constants = default_constants()?;
            let mut table =
                Table::new(&["x3", "branch", "kappa_nB", "b_dot_t", "kappa_g", "gamma_tilde"]);
            for branch in [geometry::Branch::C1, geometry::Branch::C2] {
                for k in 0..samples {
                    let x3 = -0.99 + 1.98 * k as f64 / (samples - 1) as f64;
                    let kn = geometry::kappa_nb(x3, tau);
                    let bt = geometry::b_dot_t(x3, tau);
                    let kg = geometry::geodesic_curvature(branch, x3, tau)?;
                    let gt = asymptotics::gamma_tilde(kn, bt, &constants, variant)?;
                    table.rows.push(vec![
                        Cell::Num(x3),
                        Cell::Text(format!("{branch:?}").to_lowercase()),
                        Cell::Num(kn),
                        Cell::Num(bt),
                        Cell::Num(kg),
                        Cell::Num(gt),
                    ]);
                }
            }
            emit_table(&common, "helical", &table, &serde_json::to_value(&cfg).unwrap())?;

            let rep = asymptotics::minimize_over_gamma(tau, &constants, variant, samples.max(2000))?;
            let summary = serde_json::json!({
                "command": "helical-summary",
                "config": serde_json::to_value(&cfg).unwrap(),
                "tau0": rep.tau0,
                "regime": match rep.regime {
                    Regime::SubThreshold => "sub-threshold",
                    Regime::SuperThreshold => "super-threshold",
                },
                "gamma_hat": rep.gamma_hat,
                "argmin": rep.argmin,
            });
            write_output(summary_out.as_deref(), &format!("{:#}\n", summary))?;
            Ok(())
        }

        Command::Asympt { common, tau, variant, h_list } => {
            let f = file_config(&common)?;
            let tau = usage(f.resolve(tau, "tau", 1.0))?;
            let variant_name = variant.unwrap_or_else(|| "linear".to_string());
            let variant = parse_variant(&variant_name)?;
            let hs = usage(f.resolve_list(&h_list, "h-list", &[1e-1, 3e-2, 1e-2, 3e-3, 1e-3]))?;
            if hs.is_empty() {
                return Err(RunError::Usage("h-list is empty".into()));
            }
            #[derive(Serialize)]
            struct Config {
                tau: f64,
                variant: String,
                h_list: Vec<f64>,
            }
            let cfg = Config { tau, variant: variant_name, h_list: hs.clone() };
            let constants = default_constants()?;
            let rep = asymptotics::minimize_over_gamma(tau, &constants, variant, 4000)?;
            let mut table = Table::new(&["h", "two_term_lambda", "status"]);
            for &h in &hs {
                if h <= 0.0 {
                    return Err(RunError::Usage(format!("h must be positive, got {h}")));
                }
                let v = asymptotics::two_term_eigenvalue(h, rep.gamma_hat, &constants);
                table.rows.push(vec![Cell::Num(h), Cell::Num(v), Cell::Text("ok".into())]);
            }
            emit_table(&common, "asympt", &table, &serde_json::to_value(&cfg).unwrap())
        }

        Command::Quasimode { common, theta, kappa, gamma, h_list, step } => {
            let f = file_config(&common)?;
            let theta = usage(f.resolve(theta, "theta", -std::f64::consts::FRAC_PI_4))?;
            let kappa = usage(f.resolve(kappa, "kappa", 0.0))?;
            let gamma = usage(f.resolve(gamma, "gamma", std::f64::consts::SQRT_2))?;
            let step = usage(f.resolve(step, "step", 0.02))?;
            let hs = usage(f.resolve_list(&h_list, "h-list", &[1e-1, 3e-2, 1e-2, 3e-3]))?;
            if hs.is_empty() {
                return Err(RunError::Usage("h-list is empty".into()));
            }
            #[derive(Serialize)]
            struct Config {
                theta: f64,
                kappa: f64,
                gamma: f64,
                step: f64,
                h_list: Vec<f64>,
            }
            let cfg = Config { theta, kappa, gamma, step, h_list: hs.clone() };
            let constants = default_constants()?;
            let grid = model1d::default_degennes_grid();
            let chain = quasimode::build_phi_chain(&grid)?;
            let mont = model1d::default_montgomery_grid();
            let (rho0, _, _) = model1d::find_montgomery_min(&mont, 1e-9)?;
            let psi0 = model1d::montgomery_ground_state(rho0, &mont)?;
            let mut table =
                Table::new(&["h", "norm_sq", "energy", "corrected_ratio", "status"]);
            let mut failed = false;
            for &h in &hs {
                let run = (|| -> magspec_core::Result<(f64, f64, f64)> {
                    let p = quasimode::QuasimodeParams::new(theta, kappa, gamma, h)?;
                    let (ra, ta) = quasimode::default_trial_axes(&p, step, step);
                    let v = quasimode::assemble_v(&p, &chain, &constants, &psi0, &ra, &ta)?;
                    let q = quasimode::energy_qm00(&v, &constants)?;
                    let n2 = v.norm_sq();
                    let ratio = (q / n2 - constants.theta0 * h) / h.powf(4.0 / 3.0);
                    Ok((n2, q, ratio))
                })();
                match run {
                    Ok((n2, q, ratio)) => table.rows.push(vec![
                        Cell::Num(h),
                        Cell::Num(n2),
                        Cell::Num(q),
                        Cell::Num(ratio),
                        Cell::Text("ok".into()),
                    ]),
                    Err(e) => {
                        failed = true;
                        table.rows.push(vec![
                            Cell::Num(h),
                            Cell::Text(String::new()),
                            Cell::Text(String::new()),
                            Cell::Text(String::new()),
                            Cell::Text(e.to_string()),
                        ]);
                    }
                }
            }
            emit_table(&common, "quasimode", &table, &serde_json::to_value(&cfg).unwrap())?;
            if failed {
                return Err(RunError::Computation("one or more quasimode cells failed".into()));
            }
            Ok(())
        }

        Command::Model3d { common, gamma, theta, eta_list, zeta_list, h_list, nr, nt, tol } => {
            let f = file_config(&common)?;
            let gamma = usage(f.resolve(gamma, "gamma", 1.0))?;
            let theta = usage(f.resolve(theta, "theta", 0.3))?;
            let etas = usage(f.resolve_list(&eta_list, "eta-list", &[0.0]))?;
            let zetas = usage(f.resolve_list(&zeta_list, "zeta-list", &[0.0]))?;
            let hs = usage(f.resolve_list(&h_list, "h-list", &[5e-2, 2e-2, 1e-2]))?;
            let nr = usage(f.resolve(nr, "nr", 96))?;
            let nt = usage(f.resolve(nt, "nt", 64))?;
            let tol = usage(f.resolve(tol, "tol", 3e-5))?;
            if hs.is_empty() || etas.is_empty() || zetas.is_empty() {
                return Err(RunError::Usage("h-list, eta-list and zeta-list must be non-empty".into()));
            }
            #[derive(Serialize)]
            struct Config {
                gamma: f64,
                theta: f64,
                eta_list: Vec<f64>,
                zeta_list: Vec<f64>,
                h_list: Vec<f64>,
                nr: usize,
                nt: usize,
                tol: f64,
            }
            let cfg = Config {
                gamma,
                theta,
                eta_list: etas.clone(),
                zeta_list: zetas.clone(),
                h_list: hs.clone(),
                nr,
                nt,
                tol,
            };
            let mut base = ModelParams::new(gamma, theta, 0.0, 0.0, hs[0])?;
            base.boxg.nr = nr;
            base.boxg.ns = nr;
            base.boxg.nt = nt;
            let cells = model3d::eta_zeta_sweep(&base, &etas, &zetas, &hs, tol);
            let mut table = Table::new(&["eta", "zeta", "h", "h_lambda1", "status"]);
            let mut failed = false;
            for c in cells {
                match c.h_lambda {
                    Ok(v) => table.rows.push(vec![
                        Cell::Num(c.eta),
                        Cell::Num(c.zeta),
                        Cell::Num(c.h),
                        Cell::Num(v),
                        Cell::Text("ok".into()),
                    ]),
                    Err(e) => {
                        failed = true;
                        table.rows.push(vec![
                            Cell::Num(c.eta),
                            Cell::Num(c.zeta),
                            Cell::Num(c.h),
                            Cell::Text(String::new()),
                            Cell::Text(e),
                        ]);
                    }
                }
            }
            emit_table(&common, "model3d", &table, &serde_json::to_value(&cfg).unwrap())?;
            if failed {
                return Err(RunError::Computation("one or more sweep cells failed".into()));
            }
            Ok(())
        }
    }
}

fn parse_variant(name: &str) -> Result<EnergyVariant, RunError> {
    match name {
        "linear" => Ok(EnergyVariant::LinearBt),
        "squared" => Ok(EnergyVariant::SquaredBt),
        other => Err(RunError::Usage(format!(
            "unknown variant '{other}' (expected linear | squared)"
        ))),
    }
}

fn emit_table(
    common: &Common,
    command: &str,
    table: &Table,
    config: &serde_json::Value,
) -> Result<(), RunError> {
    if common.json {
        let doc = table.to_json(command, config);
        write_output(common.out.as_deref(), &format!("{:#}\n", doc))?;
    } else {
        let mut echo = String::new();
        if let serde_json::Value::Object(map) = config {
            let parts: Vec<String> = map.iter().map(|(k, v)| format!("{k}={v}")).collect();
            echo = parts.join(" ");
        }
        write_output(common.out.as_deref(), &table.to_csv(command, &echo))?;
    }
    Ok(())
}
