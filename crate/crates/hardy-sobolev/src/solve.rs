//! Ground-state search on the Nehari manifold, semitrivial constructors,
//! the mountain-pass path solver, and concentration diagnostics.
//!
//! The ground-state search is projected gradient descent of the truncated
//! functional: take a preconditioned negative-gradient step, clip negative
//! samples to zero, scale back onto the Nehari manifold, and accept by an
//! Armijo test on the projected energy. Search directions come from an
//! energy-metric (Sobolev) preconditioner: in the variables
//! `phi = r^((N-2)/2) u`, `y = ln r` the Hardy-shifted norm becomes
//! `int (phi')^2 + (Lambda - lambda) phi^2 dy`, a constant-coefficient
//! tridiagonal form, so dualizing a raw partial-derivative vector costs one
//! Thomas solve. Plain quadrature-metric descent stalls badly here — the
//! critical terms make the L2 and energy geometries wildly inequivalent
//! across a log-radial mesh.
//!
//! The first and last mesh nodes are clamped to zero throughout. The
//! discrete quadratic form on the full node set has spurious low-energy
//! modes supported on the window ends (truncation artifacts); the clamped
//! subspace removes them without touching genuinely decaying states.
//!
//! The mountain-pass solver discretizes the segment
//! `t -> (sqrt(1-t) z1, sqrt(t) z2)` between the two semitrivials,
//! Nehari-projects every node, and deforms interior nodes with damped
//! preconditioned steps accepted only when the node energy does not
//! increase. That acceptance rule is what keeps the path from being torn
//! apart by unbounded descent into the two endpoint basins: the running
//! path maximum is non-increasing, and its limit estimates the level of the
//! saddle separating the semitrivial wells.

use crate::analytic::{self, ParamError, ProfileParams};
use crate::energy::{EnergyError, StatePair, SystemFunctional};
use crate::grid::RadialGrid;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::fmt;
use thiserror::Error;

/// Relative component-norm threshold below which a component counts as
/// vanished for classification.
const CLASSIFY_TOL: f64 = 1e-6;
/// Armijo halvings before a line search gives up.
const LINE_SEARCH_STEPS: usize = 40;
/// Consecutive sub-`energy_tol` decreases that count as convergence.
const STALL_LIMIT: usize = 10;
/// Local descent steps refining the mountain-pass maximum node.
const REFINE_STEPS: usize = 20;

/// Tunable knobs of the descent and path solvers.
#[derive(Debug, Clone, Copy)]
pub struct SolverConfig {
    /// Hard iteration cap of the descent loop.
    pub max_iters: usize,
    /// Initial (and maximal) step length.
    pub step0: f64,
    /// Armijo sufficient-decrease constant, in `(0, 1)`.
    pub armijo_c: f64,
    /// Backtracking shrink factor, in `(0, 1)`.
    pub armijo_shrink: f64,
    /// Stop when the dual gradient norm falls below
    /// `grad_tol * (1 + |energy|)`.
    pub grad_tol: f64,
    /// Stop after [`STALL_LIMIT`] consecutive energy decreases below
    /// `energy_tol * (1 + |energy|)`.
    pub energy_tol: f64,
    /// Nodes on the mountain-pass path (endpoints included).
    pub path_points: usize,
    /// Deformation sweeps over the mountain-pass path.
    pub deform_rounds: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            max_iters: 2000,
            step0: 1.0,
            armijo_c: 1e-4,
            armijo_shrink: 0.5,
            grad_tol: 1e-8,
            energy_tol: 1e-12,
            path_points: 41,
            deform_rounds: 6,
        }
    }
}

impl SolverConfig {
    /// Check every knob against its admissible range.
    pub fn validate(&self) -> Result<(), SolveError> {
        let bad = |name: &'static str, requirement: &'static str, got: f64| {
            Err(SolveError::BadSetting {
                name,
                requirement,
                got,
            })
        };
        if self.max_iters == 0 {
            return bad("max_iters", "at least 1", 0.0);
        }
        if !(self.step0 > 0.0) || !self.step0.is_finite() {
            return bad("step0", "positive and finite", self.step0);
        }
        if !(self.armijo_c > 0.0 && self.armijo_c < 1.0) {
            return bad("armijo_c", "inside (0, 1)", self.armijo_c);
        }
        if !(self.armijo_shrink > 0.0 && self.armijo_shrink < 1.0) {
            return bad("armijo_shrink", "inside (0, 1)", self.armijo_shrink);
        }
        if !(self.grad_tol >= 1e-12) {
            return bad("grad_tol", "at least 1e-12", self.grad_tol);
        }
        if !(self.energy_tol >= 1e-12) {
            return bad("energy_tol", "at least 1e-12", self.energy_tol);
        }
        if self.path_points < 3 {
            return bad("path_points", "at least 3", self.path_points as f64);
        }
        if self.deform_rounds == 0 {
            return bad("deform_rounds", "at least 1", 0.0);
        }
        Ok(())
    }
}

/// Which component of the returned state carries mass.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    /// Both components above the relative threshold.
    Coupled,
    /// Second component vanished.
    SemitrivialU,
    /// First component vanished.
    SemitrivialV,
    /// Iteration budget exhausted with tolerances unmet, or the
    /// mountain-pass maximum collapsed onto an endpoint.
    Failed,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Classification::Coupled => "Coupled",
            Classification::SemitrivialU => "SemitrivialU",
            Classification::SemitrivialV => "SemitrivialV",
            Classification::Failed => "Failed",
        })
    }
}

/// One progress row: for descent, per iteration; for the mountain pass, per
/// deformation round (with `energy` the running path maximum).
#[derive(Debug, Clone, Copy)]
pub struct TraceRow {
    pub iter: usize,
    pub energy: f64,
    pub grad_norm: f64,
}

/// Outcome of a solve.
#[derive(Debug, Clone)]
pub struct SolveResult {
    /// Final (nonnegative) state.
    pub state: StatePair,
    /// Energy at the final state.
    pub energy: f64,
    /// Nehari residual of the final state, relative to its squared norm.
    pub nehari_residual: f64,
    /// Dual (preconditioned) gradient norm at the final state.
    pub grad_norm: f64,
    pub classification: Classification,
    pub trace: Vec<TraceRow>,
    /// Coupling strength the solve ran at.
    pub nu: f64,
    /// Iterations (descent) or deformation rounds (mountain pass) consumed.
    pub iters: usize,
}

/// Fractions of the two critical integrals carried by the window ends.
#[derive(Debug, Clone, Copy)]
pub struct ConcentrationReport {
    /// Fraction of `int |u|^p1 / r^s1` with `r < r_lo`.
    pub rho_0_u: f64,
    /// Fraction with `r > r_hi`.
    pub rho_inf_u: f64,
    pub rho_0_v: f64,
    pub rho_inf_v: f64,
}

/// Component selector for semitrivial states.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    First,
    Second,
}

/// Solver failure modes.
#[derive(Debug, Error)]
pub enum SolveError {
    #[error("solver setting {name} must be {requirement}, got {got}")]
    BadSetting {
        name: &'static str,
        requirement: &'static str,
        got: f64,
    },
    #[error(
        "no mountain-pass geometry: need alpha >= 2 with c2 < c1 < 2*c2, or beta >= 2 with \
         c1 < c2 < 2*c1 (here c1 = {c1:.6}, c2 = {c2:.6}, alpha = {alpha}, beta = {beta})"
    )]
    NoSaddleWindow {
        c1: f64,
        c2: f64,
        alpha: f64,
        beta: f64,
    },
    #[error("concentration window must satisfy r_lo < r_hi and overlap the grid, got [{r_lo}, {r_hi}]")]
    BadConcentrationWindow { r_lo: f64, r_hi: f64 },
    #[error("initial state rejected: {0}")]
    BadStart(#[from] EnergyError),
    #[error(transparent)]
    Param(#[from] ParamError),
}

/// Energy-metric preconditioner for one component: Thomas-factored
/// tridiagonal solve of `(-d^2/dy^2 + Lambda - lambda) phi = rhs` on the
/// zero-boundary subspace, conjugated by `u = phi / r^((N-2)/2)`.
struct SobolevPreconditioner {
    /// `r^((N-2)/2)` on the nodes.
    rpow: Vec<f64>,
    dy: f64,
    /// Forward-eliminated superdiagonal ratios.
    cp: Vec<f64>,
    /// Inverse pivots of the forward elimination.
    inv_piv: Vec<f64>,
    /// Subdiagonal (needed in the right-hand-side sweep).
    off: Vec<f64>,
}

impl SobolevPreconditioner {
    fn new(grid: &RadialGrid, lambda: f64) -> Self {
        let n = grid.len();
        let shift = analytic::hardy_constant(grid.n_dim()).expect("grid dimension is valid")
            - lambda;
        let inv_dy2 = 1.0 / (grid.dy * grid.dy);
        let mut diag = vec![2.0 * inv_dy2 + shift; n];
        let mut off = vec![-inv_dy2; n - 1];
        // Zero-boundary subspace: identity end rows, end couplings cut.
        diag[0] = 1.0;
        diag[n - 1] = 1.0;
        off[0] = 0.0;
        off[n - 2] = 0.0;
        let mut cp = vec![0.0; n - 1];
        let mut inv_piv = vec![0.0; n];
        cp[0] = off[0] / diag[0];
        inv_piv[0] = 1.0 / diag[0];
        for i in 1..n {
            let pivot = diag[i] - off[i - 1] * cp[i - 1];
            if i < n - 1 {
                cp[i] = off[i] / pivot;
            }
            inv_piv[i] = 1.0 / pivot;
        }
        let half = (f64::from(grid.n_dim()) - 2.0) / 2.0;
        let rpow = grid.r.iter().map(|&r| r.powf(half)).collect();
        Self {
            rpow,
            dy: grid.dy,
            cp,
            inv_piv,
            off,
        }
    }

    /// Turn a raw partial-derivative vector (`dE/du_k`, quadrature weights
    /// included) into a descent direction in the energy metric.
    fn apply(&self, raw: &[f64]) -> Vec<f64> {
        let n = raw.len();
        let mut rhs: Vec<f64> = raw
            .iter()
            .zip(&self.rpow)
            .map(|(d, rp)| d / rp / self.dy)
            .collect();
        rhs[0] = 0.0;
        rhs[n - 1] = 0.0;
        let mut dp = vec![0.0; n];
        dp[0] = rhs[0] * self.inv_piv[0];
        for i in 1..n {
            dp[i] = (rhs[i] - self.off[i - 1] * dp[i - 1]) * self.inv_piv[i];
        }
        let mut phi = dp;
        for i in (0..n - 1).rev() {
            phi[i] -= self.cp[i] * phi[i + 1];
        }
        for (p, rp) in phi.iter_mut().zip(&self.rpow) {
            *p /= rp;
        }
        phi
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Raw partial derivatives `dE/du_k`: the gradient representation times the
/// quadrature weights.
fn raw_partials(fun: &SystemFunctional, g: &StatePair) -> (Vec<f64>, Vec<f64>) {
    let grid = fun.grid();
    let s = grid.sphere();
    let du = g.u.iter().zip(&grid.w).map(|(x, w)| x * s * w).collect();
    let dv = g.v.iter().zip(&grid.w).map(|(x, w)| x * s * w).collect();
    (du, dv)
}

fn clip_step(x: &[f64], dir: &[f64], step: f64) -> Vec<f64> {
    x.iter()
        .zip(dir)
        .map(|(xk, dk)| (xk - step * dk).max(0.0))
        .collect()
}

/// Classify by relative component norms; `Failed` overrides are applied by
/// the callers.
fn classify(fun: &SystemFunctional, s: &StatePair) -> (Classification, f64, f64) {
    let p = fun.params();
    let nu2 = fun.lambda_norm_sq(&s.u, p.lambda1).max(0.0);
    let nv2 = fun.lambda_norm_sq(&s.v, p.lambda2).max(0.0);
    let total = (nu2 + nv2).sqrt();
    let cls = if total == 0.0 {
        Classification::Failed
    } else if nu2.sqrt() < CLASSIFY_TOL * total {
        Classification::SemitrivialV
    } else if nv2.sqrt() < CLASSIFY_TOL * total {
        Classification::SemitrivialU
    } else {
        Classification::Coupled
    };
    (cls, nu2.sqrt(), nv2.sqrt())
}

fn relative_residual(fun: &SystemFunctional, s: &StatePair) -> f64 {
    let psi = fun
        .nehari_residual(s)
        .expect("projected states are nonzero");
    psi / fun.pair_norm_sq(s)
}

/// The semitrivial state on the given side: the exact scalar extremal with
/// concentration scale `mu`, sampled on the grid, end-clamped, and scaled
/// onto the Nehari manifold (so its residual is zero to projection
/// tolerance, not just to grid tolerance).
pub fn semitrivial(
    fun: &SystemFunctional,
    side: Side,
    mu: f64,
) -> Result<StatePair, SolveError> {
    let p = fun.params();
    let (lambda, s) = match side {
        Side::First => (p.lambda1, p.s1),
        Side::Second => (p.lambda2, p.s2),
    };
    let profile = ProfileParams::new(p.n_dim, lambda, s, mu)?;
    let mut z = fun.grid().sample_profile(&profile);
    let n = z.len();
    z[0] = 0.0;
    z[n - 1] = 0.0;
    let state = match side {
        Side::First => StatePair::new(z, vec![0.0; n]),
        Side::Second => StatePair::new(vec![0.0; n], z),
    };
    Ok(fun.project(&state)?.projected)
}

/// Minimize the truncated energy over the Nehari manifold by projected,
/// preconditioned descent from `init` (clipped to the nonnegative cone).
///
/// Stops at the first of: dual gradient norm below
/// `grad_tol * (1 + |energy|)`; [`STALL_LIMIT`] consecutive energy decreases
/// below `energy_tol * (1 + |energy|)`; an exhausted line search (the
/// discrete energy landscape has no further descent at round-off scale); or
/// `max_iters`. Only the last case with tolerances still unmet is marked
/// `Failed`.
pub fn ground_state(
    fun: &SystemFunctional,
    init: &StatePair,
    cfg: &SolverConfig,
) -> Result<SolveResult, SolveError> {
    cfg.validate()?;
    let grid = fun.grid();
    let p = fun.params();
    let pc_u = SobolevPreconditioner::new(grid, p.lambda1);
    let pc_v = SobolevPreconditioner::new(grid, p.lambda2);

    let n = grid.len();
    let mut start = StatePair::new(
        init.u.iter().map(|x| x.max(0.0)).collect(),
        init.v.iter().map(|x| x.max(0.0)).collect(),
    );
    start.u[0] = 0.0;
    start.u[n - 1] = 0.0;
    start.v[0] = 0.0;
    start.v[n - 1] = 0.0;
    let mut state = fun.project(&start)?.projected;
    let mut energy = fun.energy_truncated(&state);

    let mut trace = Vec::new();
    let mut step = cfg.step0;
    let mut stall = 0usize;
    let mut theta = f64::INFINITY;
    let mut within_tol = false;
    let mut iters = 0usize;

    for it in 0..cfg.max_iters {
        iters = it;
        let grad = fun.gradient_truncated(&state);
        let (du_raw, dv_raw) = raw_partials(fun, &grad);
        let dir_u = pc_u.apply(&du_raw);
        let dir_v = pc_v.apply(&dv_raw);
        // The dual-norm square of the derivative: raw partials paired with
        // their preconditioned representative.
        let slope = (dot(&du_raw, &dir_u) + dot(&dv_raw, &dir_v)).max(0.0);
        theta = slope.sqrt();
        trace.push(TraceRow {
            iter: it,
            energy,
            grad_norm: theta,
        });
        if theta <= cfg.grad_tol * (1.0 + energy.abs()) {
            within_tol = true;
            break;
        }
        // Armijo backtracking on the projected energy, warm-started from
        // twice the last accepted step.
        let mut gamma = (step * 2.0).min(cfg.step0);
        let mut accepted = None;
        for _ in 0..LINE_SEARCH_STEPS {
            let trial = StatePair::new(
                clip_step(&state.u, &dir_u, gamma),
                clip_step(&state.v, &dir_v, gamma),
            );
            if let Ok(proj) = fun.project(&trial) {
                let trial_energy = fun.energy_truncated(&proj.projected);
                if trial_energy <= energy - cfg.armijo_c * gamma * slope {
                    accepted = Some((proj.projected, trial_energy));
                    break;
                }
            }
            gamma *= cfg.armijo_shrink;
        }
        let Some((next, next_energy)) = accepted else {
            // No admissible decrease at any step length: the discrete
            // landscape is flat to round-off along this direction.
            within_tol = true;
            break;
        };
        step = gamma;
        let drop = energy - next_energy;
        state = next;
        energy = next_energy;
        if drop <= cfg.energy_tol * (1.0 + energy.abs()) {
            stall += 1;
            if stall >= STALL_LIMIT {
                within_tol = true;
                break;
            }
        } else {
            stall = 0;
        }
    }

    let (mut classification, _, _) = classify(fun, &state);
    if !within_tol && theta > cfg.grad_tol * (1.0 + energy.abs()) {
        classification = Classification::Failed;
    }
    Ok(SolveResult {
        nehari_residual: relative_residual(fun, &state),
        grad_norm: theta,
        energy,
        state,
        classification,
        trace,
        nu: p.nu,
        iters,
    })
}

/// Outcome of a batch of descent runs from the canonical starts.
#[derive(Debug, Clone)]
pub struct MultistartOutcome {
    /// Every run, in start order.
    pub runs: Vec<SolveResult>,
    /// Index of the lowest-energy run.
    pub best: usize,
}

impl MultistartOutcome {
    pub fn best(&self) -> &SolveResult {
        &self.runs[self.best]
    }
}

/// Run [`ground_state`] from the canonical start set — each semitrivial,
/// three fixed mixtures `(c z1, (1-c) z2)` with `c` in `{1/4, 1/2, 3/4}`,
/// and two seeded random mixtures with perturbed concentration scales — and
/// keep the minimum. A single start cannot certify a global minimum over
/// the manifold; a spread of starts across both basins is the cheapest
/// effective substitute.
pub fn multistart_ground_state(
    fun: &SystemFunctional,
    cfg: &SolverConfig,
    seed: u64,
) -> Result<MultistartOutcome, SolveError> {
    cfg.validate()?;
    let p = fun.params();
    let grid = fun.grid();
    let n = grid.len();
    let z1 = grid.sample_profile(&ProfileParams::new(p.n_dim, p.lambda1, p.s1, 1.0)?);
    let z2 = grid.sample_profile(&ProfileParams::new(p.n_dim, p.lambda2, p.s2, 1.0)?);
    let zero = vec![0.0; n];
    let mix = |c: f64, a: &[f64], b: &[f64]| {
        StatePair::new(
            a.iter().map(|x| c * x).collect(),
            b.iter().map(|x| (1.0 - c) * x).collect(),
        )
    };
    let mut starts = vec![
        StatePair::new(z1.clone(), zero.clone()),
        StatePair::new(zero.clone(), z2.clone()),
        mix(0.25, &z1, &z2),
        mix(0.5, &z1, &z2),
        mix(0.75, &z1, &z2),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..2 {
        let c = rng.gen_range(0.1..0.9);
        let mu_u = rng.gen_range(-0.7..0.7f64).exp();
        let mu_v = rng.gen_range(-0.7..0.7f64).exp();
        let a = grid.sample_profile(&ProfileParams::new(p.n_dim, p.lambda1, p.s1, mu_u)?);
        let b = grid.sample_profile(&ProfileParams::new(p.n_dim, p.lambda2, p.s2, mu_v)?);
        starts.push(mix(c, &a, &b));
    }
    let mut runs = Vec::with_capacity(starts.len());
    for start in &starts {
        runs.push(ground_state(fun, start, cfg)?);
    }
    let best = runs
        .iter()
        .enumerate()
        .min_by(|(_, a), (_, b)| a.energy.total_cmp(&b.energy))
        .map(|(i, _)| i)
        .expect("at least one start");
    Ok(MultistartOutcome { runs, best })
}

/// Search for the saddle between the two semitrivial wells.
///
/// Requires the level geometry that makes the two semitrivials sit at
/// comparable heights with the higher one inside the window of the lower:
/// `alpha >= 2` with `c2 < c1 < 2 c2`, or `beta >= 2` with
/// `c1 < c2 < 2 c1`. The returned trace has one row per deformation round
/// (round index, running path maximum, dual gradient norm at the maximal
/// node); the path maximum is non-increasing by construction.
pub fn mountain_pass(fun: &SystemFunctional, cfg: &SolverConfig) -> Result<SolveResult, SolveError> {
    cfg.validate()?;
    let p = fun.params();
    let (c1, c2) = p.semitrivial_levels()?;
    let window_first = p.alpha >= 2.0 && c2 < c1 && c1 < 2.0 * c2;
    let window_second = p.beta >= 2.0 && c1 < c2 && c2 < 2.0 * c1;
    if !(window_first || window_second) {
        return Err(SolveError::NoSaddleWindow {
            c1,
            c2,
            alpha: p.alpha,
            beta: p.beta,
        });
    }

    let grid = fun.grid();
    let n = grid.len();
    let mut z1 = grid.sample_profile(&ProfileParams::new(p.n_dim, p.lambda1, p.s1, 1.0)?);
    let mut z2 = grid.sample_profile(&ProfileParams::new(p.n_dim, p.lambda2, p.s2, 1.0)?);
    z1[0] = 0.0;
    z1[n - 1] = 0.0;
    z2[0] = 0.0;
    z2[n - 1] = 0.0;

    let count = cfg.path_points;
    let mut path = Vec::with_capacity(count);
    let mut levels = Vec::with_capacity(count);
    for i in 0..count {
        let t = i as f64 / (count - 1) as f64;
        let node = StatePair::new(
            z1.iter().map(|x| (1.0 - t).max(0.0).sqrt() * x).collect(),
            z2.iter().map(|x| t.sqrt() * x).collect(),
        );
        let projected = fun.project(&node)?.projected;
        levels.push(fun.energy_truncated(&projected));
        path.push(projected);
    }

    let pc_u = SobolevPreconditioner::new(grid, p.lambda1);
    let pc_v = SobolevPreconditioner::new(grid, p.lambda2);
    let dual_norm_and_grad = |s: &StatePair| {
        let grad = fun.gradient_truncated(s);
        let (du, dv) = raw_partials(fun, &grad);
        let slope = (dot(&du, &pc_u.apply(&du)) + dot(&dv, &pc_v.apply(&dv))).max(0.0);
        (slope.sqrt(), grad)
    };
    let argmax = |levels: &[f64]| {
        levels
            .iter()
            .enumerate()
            .max_by(|(_, a), (_, b)| a.total_cmp(b))
            .map(|(i, _)| i)
            .expect("path is nonempty")
    };

    let mut trace = Vec::with_capacity(cfg.deform_rounds + 1);
    let push_row = |round: usize, levels: &[f64], path: &[StatePair], trace: &mut Vec<TraceRow>| {
        let i = argmax(levels);
        let (gn, _) = dual_norm_and_grad(&path[i]);
        trace.push(TraceRow {
            iter: round,
            energy: levels[i],
            grad_norm: gn,
        });
    };
    push_row(0, &levels, &path, &mut trace);

    // Damped deformation: one fixed candidate step per interior node per
    // round, accepted only if the node energy does not increase. Unbounded
    // per-node descent would drain every node into an endpoint basin and
    // disconnect the discrete path; monotone damping preserves the barrier.
    for round in 0..cfg.deform_rounds {
        let step = cfg.step0 / (1.0 + round as f64);
        for i in 1..count - 1 {
            let grad = fun.gradient_truncated(&path[i]);
            let (du, dv) = raw_partials(fun, &grad);
            let trial = StatePair::new(
                clip_step(&path[i].u, &pc_u.apply(&du), step),
                clip_step(&path[i].v, &pc_v.apply(&dv), step),
            );
            if let Ok(proj) = fun.project(&trial) {
                let e = fun.energy_truncated(&proj.projected);
                if e <= levels[i] {
                    path[i] = proj.projected;
                    levels[i] = e;
                }
            }
        }
        push_row(round + 1, &levels, &path, &mut trace);
    }

    let peak = argmax(&levels);
    if peak == 0 || peak == count - 1 {
        let state = path.swap_remove(peak);
        let (gn, _) = dual_norm_and_grad(&state);
        return Ok(SolveResult {
            nehari_residual: relative_residual(fun, &state),
            energy: levels[if peak == 0 { 0 } else { count - 1 }],
            grad_norm: gn,
            state,
            classification: Classification::Failed,
            trace,
            nu: p.nu,
            iters: cfg.deform_rounds,
        });
    }

    // Local refinement of the maximal node: greedy on the dual gradient
    // norm, since the saddle is a maximum along the path but a minimum
    // transversally — energy alone cannot guide the last stretch.
    let mut state = path.swap_remove(peak);
    let (mut gn, mut grad) = dual_norm_and_grad(&state);
    let mut gamma = cfg.step0;
    for _ in 0..REFINE_STEPS {
        let (du, dv) = raw_partials(fun, &grad);
        let trial = StatePair::new(
            clip_step(&state.u, &pc_u.apply(&du), gamma),
            clip_step(&state.v, &pc_v.apply(&dv), gamma),
        );
        match fun.project(&trial) {
            Ok(proj) => {
                let (gn_trial, grad_trial) = dual_norm_and_grad(&proj.projected);
                if gn_trial < gn {
                    state = proj.projected;
                    gn = gn_trial;
                    grad = grad_trial;
                } else {
                    gamma *= 0.5;
                }
            }
            Err(_) => gamma *= 0.5,
        }
    }

    let (classification, _, _) = classify(fun, &state);
    Ok(SolveResult {
        nehari_residual: relative_residual(fun, &state),
        energy: fun.energy_truncated(&state),
        grad_norm: gn,
        state,
        classification,
        trace,
        nu: p.nu,
        iters: cfg.deform_rounds,
    })
}

/// Fractions of each critical integral carried below `r_lo` and above
/// `r_hi` — the discrete diagnostics for concentration at the origin and
/// escape to infinity. Zero components report zero fractions.
pub fn concentration_report(
    fun: &SystemFunctional,
    s: &StatePair,
    r_lo: f64,
    r_hi: f64,
) -> Result<ConcentrationReport, SolveError> {
    let grid = fun.grid();
    if !(r_lo < r_hi) || r_hi <= grid.r_min() || r_lo >= grid.r_max() {
        return Err(SolveError::BadConcentrationWindow { r_lo, r_hi });
    }
    let p = fun.params();
    let e = p.exponents();
    let mut totals = [0.0f64; 2];
    let mut below = [0.0f64; 2];
    let mut above = [0.0f64; 2];
    for k in 0..grid.len() {
        let r = grid.r[k];
        let w = grid.w[k];
        let du = s.u[k].abs().powf(e.crit1) * r.powf(-p.s1) * w;
        let dv = s.v[k].abs().powf(e.crit2) * r.powf(-p.s2) * w;
        for (i, d) in [du, dv].into_iter().enumerate() {
            totals[i] += d;
            if r < r_lo {
                below[i] += d;
            } else if r > r_hi {
                above[i] += d;
            }
        }
    }
    let frac = |part: f64, total: f64| if total > 0.0 { part / total } else { 0.0 };
    Ok(ConcentrationReport {
        rho_0_u: frac(below[0], totals[0]),
        rho_inf_u: frac(above[0], totals[0]),
        rho_0_v: frac(below[1], totals[1]),
        rho_inf_v: frac(above[1], totals[1]),
    })
}
