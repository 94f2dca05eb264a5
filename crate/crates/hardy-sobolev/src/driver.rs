//! Config-driven runs: flat key–value configuration, regime classification,
//! coupling-strength sweeps, and file emission.
//!
//! A run is described by a plain text file of `key = value` lines (`#`
//! starts a comment) and a command. Commands `constants`, `validate`, and
//! `regime` report derived quantities; `solve-ground`, `solve-mp`, and
//! `sweep` run the solvers and write their outputs (`result.json`,
//! `trace.csv`, `profile_u.dat`, `profile_v.dat`, `sweep.csv`,
//! `regime.json`) into the configured directory.
//!
//! Failures map to distinct process exit codes so scripted callers can
//! branch without parsing messages: 2 unreadable config, 3 malformed config
//! or unknown key/command, 4 missing key, 5 out-of-range value, 6 violated
//! structural hypothesis, 7 solver failure, 8 output I/O failure.
//!
//! Every run is deterministic given its config: the only randomness is the
//! multistart perturbation stream, which is seeded from the `seed` key.

use crate::analytic::{
    critical_exponent, hardy_constant, validate_weight, CouplingRegime, CouplingWeight,
    ParamError, SystemParams,
};
use crate::energy::{EnergyError, SystemFunctional};
use crate::grid::{self, write_field, FieldIoError, GridError, RadialGrid};
use crate::solve::{
    ground_state, mountain_pass, multistart_ground_state, Classification, SolveError,
    SolveResult, SolverConfig, TraceRow,
};
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use thiserror::Error;

/// Every key a config file may set.
pub const CONFIG_KEYS: [&str; 25] = [
    "N",
    "lambda1",
    "lambda2",
    "s1",
    "s2",
    "s3",
    "alpha",
    "beta",
    "nu",
    "nu_list",
    "h0",
    "h_p",
    "h_q",
    "r_min",
    "r_max",
    "grid_n",
    "max_iters",
    "step0",
    "grad_tol",
    "energy_tol",
    "path_points",
    "deform_rounds",
    "seed",
    "out_dir",
    "command",
];

/// Configuration syntax and completeness failures.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("config line {line}: expected `key = value`, got `{text}`")]
    Syntax { line: usize, text: String },
    #[error("unknown config key `{key}` (line {line})")]
    UnknownKey { key: String, line: usize },
    #[error("missing required config key `{key}`")]
    MissingKey { key: String },
    #[error(
        "unknown command `{command}`; expected constants, validate, solve-ground, solve-mp, \
         sweep, or regime"
    )]
    UnknownCommand { command: String },
}

/// Any failure of a config-driven run, with its process exit code.
#[derive(Debug, Error)]
pub enum RunError {
    #[error("cannot read config {path}: {source}")]
    Unreadable {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("config key `{key}`: {msg}")]
    BadValue { key: String, msg: String },
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Energy(#[from] EnergyError),
    #[error(transparent)]
    Hypothesis(#[from] ParamError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error("cannot write {path}: {source}")]
    OutputIo {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Field(#[from] FieldIoError),
}

impl RunError {
    /// The process exit code for this failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Unreadable { .. } => 2,
            RunError::Config(ConfigError::MissingKey { .. }) => 4,
            RunError::Config(_) => 3,
            RunError::BadValue { .. } | RunError::Grid(_) | RunError::Energy(_) => 5,
            RunError::Hypothesis(_) => 6,
            RunError::Solve(inner) => match inner {
                SolveError::BadSetting { .. } | SolveError::BadConcentrationWindow { .. } => 5,
                SolveError::NoSaddleWindow { .. } | SolveError::Param(_) => 6,
                SolveError::BadStart(_) => 7,
            },
            RunError::OutputIo { .. } | RunError::Field(_) => 8,
        }
    }
}

/// A parsed configuration: validated keys, raw string values.
#[derive(Debug, Clone, Default)]
pub struct Config {
    values: BTreeMap<String, String>,
}

impl Config {
    /// Parse config text. Rejects malformed lines and unknown keys; on
    /// repeated keys the last assignment wins.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut values = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(ConfigError::Syntax {
                    line: idx + 1,
                    text: raw.trim().to_string(),
                });
            };
            let key = key.trim();
            if !CONFIG_KEYS.contains(&key) {
                return Err(ConfigError::UnknownKey {
                    key: key.to_string(),
                    line: idx + 1,
                });
            }
            values.insert(key.to_string(), value.trim().to_string());
        }
        Ok(Self { values })
    }

    /// Read and parse a config file.
    pub fn from_file(path: &Path) -> Result<Self, RunError> {
        let text = std::fs::read_to_string(path).map_err(|source| RunError::Unreadable {
            path: path.display().to_string(),
            source,
        })?;
        Ok(Self::parse(&text)?)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    fn require(&self, key: &str) -> Result<&str, ConfigError> {
        self.get(key).ok_or_else(|| ConfigError::MissingKey {
            key: key.to_string(),
        })
    }

    fn parse_with<T: std::str::FromStr>(&self, key: &str, raw: &str) -> Result<T, RunError>
    where
        T::Err: std::fmt::Display,
    {
        raw.parse().map_err(|e: T::Err| RunError::BadValue {
            key: key.to_string(),
            msg: format!("cannot parse `{raw}`: {e}"),
        })
    }

    fn req<T: std::str::FromStr>(&self, key: &str) -> Result<T, RunError>
    where
        T::Err: std::fmt::Display,
    {
        self.parse_with(key, self.require(key)?)
    }

    fn opt<T: std::str::FromStr>(&self, key: &str, default: T) -> Result<T, RunError>
    where
        T::Err: std::fmt::Display,
    {
        match self.get(key) {
            Some(raw) => self.parse_with(key, raw),
            None => Ok(default),
        }
    }

    /// The comma-separated `nu_list` key: at least two strictly increasing
    /// nonnegative values.
    fn nu_list(&self) -> Result<Vec<f64>, RunError> {
        let raw = self.require("nu_list")?;
        let bad = |msg: String| RunError::BadValue {
            key: "nu_list".to_string(),
            msg,
        };
        let nus: Vec<f64> = raw
            .split(',')
            .map(|tok| {
                tok.trim()
                    .parse()
                    .map_err(|e| bad(format!("cannot parse `{}`: {e}", tok.trim())))
            })
            .collect::<Result<_, _>>()?;
        if nus.len() < 2 {
            return Err(bad(format!("need at least 2 values, got {}", nus.len())));
        }
        if nus.windows(2).any(|p| p[1] <= p[0]) || nus[0] < 0.0 {
            return Err(bad("values must be nonnegative and strictly increasing".into()));
        }
        Ok(nus)
    }
}

/// The runnable commands.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Constants,
    Validate,
    SolveGround,
    SolveMp,
    Sweep,
    Regime,
}

impl Command {
    pub fn parse(name: &str) -> Result<Self, ConfigError> {
        match name {
            "constants" => Ok(Command::Constants),
            "validate" => Ok(Command::Validate),
            "solve-ground" => Ok(Command::SolveGround),
            "solve-mp" => Ok(Command::SolveMp),
            "sweep" => Ok(Command::Sweep),
            "regime" => Ok(Command::Regime),
            other => Err(ConfigError::UnknownCommand {
                command: other.to_string(),
            }),
        }
    }
}

fn build_params(cfg: &Config) -> Result<SystemParams, RunError> {
    let n_dim: u32 = cfg.req("N")?;
    let h0 = cfg.opt("h0", 1.0)?;
    let h_p = cfg.opt("h_p", 1.0)?;
    let h_q = cfg.opt("h_q", f64::from(n_dim) + 1.0)?;
    let weight = CouplingWeight::new(h0, h_p, h_q)?;
    Ok(SystemParams::new(
        n_dim,
        cfg.req("lambda1")?,
        cfg.req("lambda2")?,
        cfg.req("s1")?,
        cfg.req("s2")?,
        cfg.req("s3")?,
        cfg.req("alpha")?,
        cfg.req("beta")?,
        cfg.opt("nu", 0.0)?,
        weight,
    )?)
}

fn build_grid(cfg: &Config, n_dim: u32) -> Result<RadialGrid, RunError> {
    Ok(RadialGrid::new(
        n_dim,
        cfg.opt("r_min", grid::DEFAULT_R_MIN)?,
        cfg.opt("r_max", grid::DEFAULT_R_MAX)?,
        cfg.opt("grid_n", grid::DEFAULT_POINTS)?,
    )?)
}

fn build_solver(cfg: &Config, command: Command) -> Result<SolverConfig, RunError> {
    let defaults = SolverConfig::default();
    // Path deformation wants gentler steps than descent: a full-length step
    // can throw interior nodes across the barrier in one move.
    let step0_default = if command == Command::SolveMp { 0.1 } else { defaults.step0 };
    let solver = SolverConfig {
        max_iters: cfg.opt("max_iters", defaults.max_iters)?,
        step0: cfg.opt("step0", step0_default)?,
        grad_tol: cfg.opt("grad_tol", defaults.grad_tol)?,
        energy_tol: cfg.opt("energy_tol", defaults.energy_tol)?,
        path_points: cfg.opt("path_points", defaults.path_points)?,
        deform_rounds: cfg.opt("deform_rounds", defaults.deform_rounds)?,
        ..defaults
    };
    solver.validate().map_err(RunError::from)?;
    Ok(solver)
}

fn out_dir(cfg: &Config) -> Result<PathBuf, RunError> {
    let dir = PathBuf::from(cfg.require("out_dir")?);
    std::fs::create_dir_all(&dir).map_err(|source| RunError::OutputIo {
        path: dir.display().to_string(),
        source,
    })?;
    Ok(dir)
}

/// Which scalar level sits higher.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LevelOrder {
    C1Greater,
    C2Greater,
    Equal,
}

/// Which semitrivial is the small-coupling ground state, when the power
/// geometry pins one down.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SmallNuGround {
    /// `(z1, 0)` — the first component survives.
    First,
    /// `(0, z2)` — the second component survives.
    Second,
    /// Equal levels with both powers at least 2: both semitrivials minimize.
    Either,
}

/// Which well is the higher one inside the saddle window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SaddleWindow {
    /// `alpha >= 2` and `c2 < c1 < 2 c2`.
    FirstHigher,
    /// `beta >= 2` and `c1 < c2 < 2 c1`.
    SecondHigher,
}

/// What the parameter position implies for existence and type of ground and
/// bound states, computed purely from closed forms.
#[derive(Debug, Clone, Serialize)]
pub struct RegimeReport {
    /// Scalar level of the first semitrivial.
    pub c1: f64,
    /// Scalar level of the second semitrivial.
    pub c2: f64,
    pub order: LevelOrder,
    /// Coupling power sum strictly below 1.
    pub subcritical: bool,
    /// Leftover singularity strength of the coupling term.
    pub tau: f64,
    /// Normalizing weight exponent.
    pub sigma: f64,
    /// A coupled ground state exists once the coupling is strong enough
    /// (true for every admissible parameter set).
    pub ground_state_large_nu: bool,
    /// A coupled ground state exists for every positive coupling strength:
    /// the power opposite the lower well is below 2.
    pub ground_state_any_nu: bool,
    /// Borderline: that opposite power equals 2 exactly, so only
    /// sufficiently strong coupling is guaranteed to produce a ground state.
    pub ground_state_needs_large_nu: bool,
    /// Both coupling powers below 2 (ground state at any coupling strength
    /// regardless of the level ordering).
    pub powers_subquadratic: bool,
    /// For weak coupling the ground state degenerates to a semitrivial;
    /// which one is forced by the power-vs-level geometry.
    pub small_nu_semitrivial: Option<SmallNuGround>,
    /// Level geometry admitting a mountain-pass bound state between the
    /// semitrivial wells at weak coupling.
    pub saddle_window: Option<SaddleWindow>,
}

/// Evaluate every regime inequality from the closed-form levels and the
/// coupling powers. Pure: identical params give identical reports, and the
/// ordering follows the levels themselves, not the raw parameters.
pub fn classify_regime(params: &SystemParams) -> RegimeReport {
    let (c1, c2) = params
        .semitrivial_levels()
        .expect("validated params have finite level data");
    let e = params.exponents();
    let (alpha, beta) = (params.alpha, params.beta);
    let order = if c1 > c2 {
        LevelOrder::C1Greater
    } else if c1 < c2 {
        LevelOrder::C2Greater
    } else {
        LevelOrder::Equal
    };
    let ground_state_any_nu = (c1 <= c2 && beta < 2.0) || (c1 >= c2 && alpha < 2.0);
    let ground_state_needs_large_nu =
        !ground_state_any_nu && ((c1 <= c2 && beta == 2.0) || (c1 >= c2 && alpha == 2.0));
    let small_nu_semitrivial = match order {
        LevelOrder::C1Greater if alpha >= 2.0 => Some(SmallNuGround::Second),
        LevelOrder::C2Greater if beta >= 2.0 => Some(SmallNuGround::First),
        LevelOrder::Equal if alpha >= 2.0 && beta >= 2.0 => Some(SmallNuGround::Either),
        _ => None,
    };
    let saddle_window = if alpha >= 2.0 && c2 < c1 && c1 < 2.0 * c2 {
        Some(SaddleWindow::FirstHigher)
    } else if beta >= 2.0 && c1 < c2 && c2 < 2.0 * c1 {
        Some(SaddleWindow::SecondHigher)
    } else {
        None
    };
    RegimeReport {
        c1,
        c2,
        order,
        subcritical: matches!(e.regime, CouplingRegime::Subcritical),
        tau: e.tau,
        sigma: e.sigma,
        ground_state_large_nu: true,
        ground_state_any_nu,
        ground_state_needs_large_nu,
        powers_subquadratic: alpha.max(beta) < 2.0,
        small_nu_semitrivial,
        saddle_window,
    }
}

/// One row of a coupling-strength sweep.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub nu: f64,
    /// Best multistart energy at this coupling strength.
    pub energy: f64,
    /// `min(c1, c2) - energy`: positive once coupling genuinely helps.
    pub gap: f64,
    pub classification: Classification,
    pub nehari_residual: f64,
    pub grad_norm: f64,
    pub iters: usize,
}

/// Multistart ground-state search across a strictly increasing list of
/// coupling strengths. Individual `Failed` classifications are recorded as
/// rows, not errors.
pub fn nu_sweep(
    grid: &RadialGrid,
    params: &SystemParams,
    nus: &[f64],
    cfg: &SolverConfig,
    seed: u64,
) -> Result<Vec<SweepRow>, RunError> {
    if nus.len() < 2 || nus.windows(2).any(|p| p[1] <= p[0]) || nus[0] < 0.0 {
        return Err(RunError::BadValue {
            key: "nu_list".to_string(),
            msg: "need at least 2 nonnegative, strictly increasing values".to_string(),
        });
    }
    let (c1, c2) = params.semitrivial_levels()?;
    let floor = c1.min(c2);
    let mut rows = Vec::with_capacity(nus.len());
    for &nu in nus {
        let fun = SystemFunctional::new(grid.clone(), params.with_nu(nu)?)?;
        let outcome = multistart_ground_state(&fun, cfg, seed)?;
        let best = outcome.best();
        rows.push(SweepRow {
            nu,
            energy: best.energy,
            gap: floor - best.energy,
            classification: best.classification,
            nehari_residual: best.nehari_residual,
            grad_norm: best.grad_norm,
            iters: best.iters,
        });
    }
    Ok(rows)
}

fn write_text(path: &Path, text: &str) -> Result<(), RunError> {
    std::fs::write(path, text).map_err(|source| RunError::OutputIo {
        path: path.display().to_string(),
        source,
    })
}

/// `result.json`: the flat solve record plus the levels it is measured
/// against (energy also normalized by the lower level).
fn write_result_json(
    path: &Path,
    result: &SolveResult,
    c1: f64,
    c2: f64,
) -> Result<(), RunError> {
    let floor = c1.min(c2);
    let record = serde_json::json!({
        "nu": result.nu,
        "energy": result.energy,
        "energy_normalized": result.energy / floor,
        "gap": floor - result.energy,
        "c1": c1,
        "c2": c2,
        "nehari_residual": result.nehari_residual,
        "grad_norm": result.grad_norm,
        "iters": result.iters,
        "classification": result.classification.to_string(),
    });
    let text = serde_json::to_string_pretty(&record).expect("plain record serializes");
    write_text(path, &(text + "\n"))
}

fn write_trace_csv(path: &Path, trace: &[TraceRow]) -> Result<(), RunError> {
    let mut text = String::from("iter,energy,grad_norm\n");
    for row in trace {
        let _ = writeln!(text, "{},{:.16e},{:.16e}", row.iter, row.energy, row.grad_norm);
    }
    write_text(path, &text)
}

fn write_sweep_csv(path: &Path, rows: &[SweepRow]) -> Result<(), RunError> {
    let mut text = String::from("nu,energy,gap,classification,nehari_residual,grad_norm,iters\n");
    for row in rows {
        let _ = writeln!(
            text,
            "{:.16e},{:.16e},{:.16e},{},{:.16e},{:.16e},{}",
            row.nu,
            row.energy,
            row.gap,
            row.classification,
            row.nehari_residual,
            row.grad_norm,
            row.iters
        );
    }
    write_text(path, &text)
}

fn write_solve_outputs(
    dir: &Path,
    grid: &RadialGrid,
    result: &SolveResult,
    c1: f64,
    c2: f64,
) -> Result<(), RunError> {
    write_result_json(&dir.join("result.json"), result, c1, c2)?;
    write_trace_csv(&dir.join("trace.csv"), &result.trace)?;
    write_field(&dir.join("profile_u.dat"), grid, &result.state.u)?;
    write_field(&dir.join("profile_v.dat"), grid, &result.state.v)?;
    Ok(())
}

fn print_constants(params: &SystemParams) -> Result<(), RunError> {
    let n = params.n_dim;
    let e = params.exponents();
    let (c1, c2) = params.semitrivial_levels()?;
    println!("Lambda_N            = {:.15e}", hardy_constant(n)?);
    println!("crit_exponent_1     = {:.15e}", critical_exponent(n, params.s1)?);
    println!("crit_exponent_2     = {:.15e}", critical_exponent(n, params.s2)?);
    println!(
        "best_constant_1     = {:.15e}",
        crate::analytic::best_constant(n, params.lambda1, params.s1)?
    );
    println!(
        "best_constant_2     = {:.15e}",
        crate::analytic::best_constant(n, params.lambda2, params.s2)?
    );
    println!("level_1             = {c1:.15e}");
    println!("level_2             = {c2:.15e}");
    println!("tau                 = {:.15e}", e.tau);
    println!("holder_exponent     = {:.15e}", e.holder);
    println!("sigma               = {:.15e}", e.sigma);
    Ok(())
}

fn print_validation(params: &SystemParams) {
    let e = params.exponents();
    let regime = match e.regime {
        CouplingRegime::Subcritical => "subcritical",
        CouplingRegime::Critical => "critical",
    };
    println!(
        "parameters admissible: N = {}, lambda = ({}, {}), s = ({}, {}, {}), alpha = {}, beta = {}, nu = {}",
        params.n_dim,
        params.lambda1,
        params.lambda2,
        params.s1,
        params.s2,
        params.s3,
        params.alpha,
        params.beta,
        params.nu
    );
    println!(
        "coupling: power sum = {:.6} ({regime}), tau = {:.6}, sigma = {:.6}",
        e.power_sum, e.tau, e.sigma
    );
    let report = validate_weight(params.n_dim, e, &params.weight);
    println!(
        "weight: integrable = {}, vanishes at origin/infinity = {}/{}, sigma_below_two = {}",
        report.integrable, report.vanishes_at_origin, report.vanishes_at_infinity,
        report.sigma_below_two
    );
    for note in &report.notes {
        println!("note: {note}");
    }
    println!(
        "weight hypotheses {}",
        if report.admissible() { "hold" } else { "do not all hold (see notes)" }
    );
}

/// Run one command against a parsed config. CLI subcommands call this
/// directly; [`run_config`] reads the command from the config itself.
pub fn run_with_command(cfg: &Config, command: Command) -> Result<(), RunError> {
    let params = build_params(cfg)?;
    match command {
        Command::Constants => print_constants(&params)?,
        Command::Validate => print_validation(&params),
        Command::Regime => {
            let report = classify_regime(&params);
            let text =
                serde_json::to_string_pretty(&report).expect("plain record serializes");
            let dir = out_dir(cfg)?;
            write_text(&dir.join("regime.json"), &(text.clone() + "\n"))?;
            println!("{text}");
        }
        Command::SolveGround => {
            let grid = build_grid(cfg, params.n_dim)?;
            let solver = build_solver(cfg, command)?;
            let seed: u64 = cfg.opt("seed", 0)?;
            let dir = out_dir(cfg)?;
            let (c1, c2) = params.semitrivial_levels()?;
            let fun = SystemFunctional::new(grid, params)?;
            let outcome = multistart_ground_state(&fun, &solver, seed)?;
            let best = outcome.best();
            write_solve_outputs(&dir, fun.grid(), best, c1, c2)?;
            println!(
                "ground state: nu = {}, energy = {:.12e}, classification = {}, iters = {}",
                best.nu, best.energy, best.classification, best.iters
            );
        }
        Command::SolveMp => {
            let grid = build_grid(cfg, params.n_dim)?;
            let solver = build_solver(cfg, command)?;
            let dir = out_dir(cfg)?;
            let (c1, c2) = params.semitrivial_levels()?;
            let fun = SystemFunctional::new(grid, params)?;
            let result = mountain_pass(&fun, &solver)?;
            write_solve_outputs(&dir, fun.grid(), &result, c1, c2)?;
            println!(
                "mountain pass: nu = {}, level = {:.12e}, classification = {}, rounds = {}",
                result.nu, result.energy, result.classification, result.iters
            );
        }
        Command::Sweep => {
            let grid = build_grid(cfg, params.n_dim)?;
            let solver = build_solver(cfg, command)?;
            let seed: u64 = cfg.opt("seed", 0)?;
            let nus = cfg.nu_list()?;
            let dir = out_dir(cfg)?;
            let rows = nu_sweep(&grid, &params, &nus, &solver, seed)?;
            write_sweep_csv(&dir.join("sweep.csv"), &rows)?;
            for row in &rows {
                println!(
                    "nu = {:.6e}: energy = {:.12e}, gap = {:+.6e}, {}",
                    row.nu, row.energy, row.gap, row.classification
                );
            }
        }
    }
    Ok(())
}

/// Read a config file and run the command named by its `command` key.
pub fn run_config(path: &Path) -> Result<(), RunError> {
    let cfg = Config::from_file(path)?;
    let command = Command::parse(cfg.require("command")?)?;
    run_with_command(&cfg, command)
}

/// Convenience for tests and examples: a single ground-state descent (not
/// multistart) driven by config-style primitives.
pub fn single_ground_state(
    fun: &SystemFunctional,
    init: &crate::energy::StatePair,
    cfg: &SolverConfig,
) -> Result<SolveResult, RunError> {
    Ok(ground_state(fun, init, cfg)?)
}
