//! Log-radial discretization of radial functions on `R^N`.
//!
//! Functions are sampled on a geometric mesh `r_k = r_min * exp(k * dy)`.
//! In the log variable `y = ln r` the radial measure `r^(N-1) dr` becomes
//! `r^N dy`, so integrals are plain trapezoid sums with the Jacobian folded
//! into the quadrature weights, and first derivatives are centered
//! differences in `y` divided by `r` (one-sided second-order stencils at the
//! ends). This resolves both the power-law blow-up of the extremal profiles
//! at the origin and their polynomial tails at infinity on one uniform mesh.
//!
//! Fields are plain `&[f64]` sample vectors; a field and its grid travel
//! together by convention, and every operation checks the length.

use crate::analytic::{self, ParamError, ProfileParams};
use std::fmt::Write as _;
use std::io::{BufRead, BufReader, Write as _};
use std::path::Path;
use thiserror::Error;

/// Fewest mesh points that keep the end stencils meaningful.
pub const MIN_POINTS: usize = 16;
/// Default mesh size.
pub const DEFAULT_POINTS: usize = 4096;
/// Default inner radius. The window is deliberately huge: on a log mesh the
/// extra decades cost nothing, and they push the domain-truncation error of
/// the slowly decaying extremal profiles far below the stencil error, which
/// is what makes mesh-refinement studies show their true second-order rate.
pub const DEFAULT_R_MIN: f64 = 1e-17;
/// Default outer radius.
pub const DEFAULT_R_MAX: f64 = 1e17;

/// Mesh construction failure.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GridError {
    #[error("dimension must be an integer >= 3, got N = {0}")]
    DimensionTooSmall(u32),
    #[error("need at least {min} grid points, got {got}")]
    TooFewPoints { got: usize, min: usize },
    #[error("radial window must satisfy 0 < r_min < r_max, got [{r_min}, {r_max}]")]
    BadWindow { r_min: f64, r_max: f64 },
}

/// Field serialization / deserialization failure.
#[derive(Debug, Error)]
pub enum FieldIoError {
    #[error("cannot access {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {msg}")]
    Malformed {
        path: String,
        line: usize,
        msg: String,
    },
    #[error("field has {got} samples but the grid has {expected}")]
    LengthMismatch { got: usize, expected: usize },
}

/// Log-uniform radial mesh with trapezoidal quadrature data.
#[derive(Debug, Clone)]
pub struct RadialGrid {
    n_dim: u32,
    r_min: f64,
    r_max: f64,
    /// Log-step between consecutive radii.
    pub dy: f64,
    /// Node radii, strictly increasing.
    pub r: Vec<f64>,
    /// Quadrature weights against the radial measure: `sum w_k f(r_k)`
    /// approximates `int f(r) r^(N-1) dr` (the unit-sphere area is kept
    /// separate, see [`RadialGrid::sphere`]).
    pub w: Vec<f64>,
    sphere: f64,
}

impl RadialGrid {
    /// Build an `n`-point log-uniform mesh on `[r_min, r_max]`.
    pub fn new(n_dim: u32, r_min: f64, r_max: f64, n: usize) -> Result<Self, GridError> {
        if n_dim < analytic::MIN_DIMENSION {
            return Err(GridError::DimensionTooSmall(n_dim));
        }
        if n < MIN_POINTS {
            return Err(GridError::TooFewPoints {
                got: n,
                min: MIN_POINTS,
            });
        }
        if !(r_min > 0.0 && r_min < r_max && r_max.is_finite()) {
            return Err(GridError::BadWindow { r_min, r_max });
        }
        let dy = (r_max / r_min).ln() / (n - 1) as f64;
        let r: Vec<f64> = (0..n).map(|k| r_min * (dy * k as f64).exp()).collect();
        let nd = f64::from(n_dim);
        let w: Vec<f64> = r
            .iter()
            .enumerate()
            .map(|(k, &rk)| {
                let c = if k == 0 || k == n - 1 { 0.5 } else { 1.0 };
                c * rk.powf(nd) * dy
            })
            .collect();
        let sphere = analytic::sphere_area(n_dim).expect("dimension already checked");
        Ok(Self {
            n_dim,
            r_min,
            r_max,
            dy,
            r,
            w,
            sphere,
        })
    }

    /// The default mesh: [`DEFAULT_POINTS`] points on
    /// `[`[`DEFAULT_R_MIN`]`, `[`DEFAULT_R_MAX`]`]`.
    pub fn with_defaults(n_dim: u32) -> Result<Self, GridError> {
        Self::new(n_dim, DEFAULT_R_MIN, DEFAULT_R_MAX, DEFAULT_POINTS)
    }

    pub fn n_dim(&self) -> u32 {
        self.n_dim
    }

    pub fn r_min(&self) -> f64 {
        self.r_min
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    /// Number of mesh points.
    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Area of the unit sphere in `R^N` (kept out of the weights).
    pub fn sphere(&self) -> f64 {
        self.sphere
    }

    fn check_len(&self, u: &[f64]) {
        assert_eq!(
            u.len(),
            self.r.len(),
            "field has {} samples but the grid has {}",
            u.len(),
            self.r.len()
        );
    }

    /// Full-space integral of a radial integrand sampled on the nodes:
    /// `sphere * sum w_k f_k`.
    pub fn integrate(&self, f: &[f64]) -> f64 {
        self.check_len(f);
        self.sphere * f.iter().zip(&self.w).map(|(fk, wk)| fk * wk).sum::<f64>()
    }

    /// Weighted Lebesgue norm `( int |u|^p / r^s )^(1/p)`.
    pub fn weighted_lp(&self, u: &[f64], p: f64, s: f64) -> f64 {
        self.check_len(u);
        let total: f64 = u
            .iter()
            .zip(self.r.iter().zip(&self.w))
            .map(|(uk, (rk, wk))| uk.abs().powf(p) * rk.powf(-s) * wk)
            .sum();
        (self.sphere * total).powf(1.0 / p)
    }

    /// First derivative `du/dr`: centered differences in `y = ln r` divided
    /// by `r`, with one-sided second-order stencils at the ends.
    pub fn deriv(&self, u: &[f64]) -> Vec<f64> {
        self.check_len(u);
        let n = u.len();
        let two_dy = 2.0 * self.dy;
        let mut d = vec![0.0; n];
        for k in 1..n - 1 {
            d[k] = (u[k + 1] - u[k - 1]) / two_dy;
        }
        d[0] = (-3.0 * u[0] + 4.0 * u[1] - u[2]) / two_dy;
        d[n - 1] = (3.0 * u[n - 1] - 4.0 * u[n - 2] + u[n - 3]) / two_dy;
        for (dk, rk) in d.iter_mut().zip(&self.r) {
            *dk /= rk;
        }
        d
    }

    /// Dirichlet energy `int |du/dr|^2` over the full space.
    pub fn dirichlet(&self, u: &[f64]) -> f64 {
        let d = self.deriv(u);
        self.integrate(&d.iter().map(|x| x * x).collect::<Vec<_>>())
    }

    /// Inverse-square moment `int u^2 / r^2` (the Hardy term).
    pub fn hardy_integral(&self, u: &[f64]) -> f64 {
        self.check_len(u);
        self.sphere
            * u.iter()
                .zip(self.r.iter().zip(&self.w))
                .map(|(uk, (rk, wk))| uk * uk / (rk * rk) * wk)
                .sum::<f64>()
    }

    /// Squared Hardy-shifted norm `int |du/dr|^2 - lambda int u^2/r^2`,
    /// the quadratic form whose minimizers the closed-form profiles are.
    pub fn lambda_norm_sq(&self, u: &[f64], lambda: f64) -> Result<f64, ParamError> {
        let limit = analytic::hardy_constant(self.n_dim)?;
        if !(0.0..limit).contains(&lambda) {
            return Err(ParamError::LambdaOutOfRange {
                value: lambda,
                limit,
            });
        }
        Ok(self.dirichlet(u) - lambda * self.hardy_integral(u))
    }

    /// Sample an arbitrary radial function on the nodes.
    pub fn sample<F: Fn(f64) -> f64>(&self, f: F) -> Vec<f64> {
        self.r.iter().map(|&rk| f(rk)).collect()
    }

    /// Sample an exact extremal profile on the nodes.
    pub fn sample_profile(&self, p: &ProfileParams) -> Vec<f64> {
        self.r
            .iter()
            .map(|&rk| p.eval(rk).expect("grid radii are positive"))
            .collect()
    }
}

/// Write a field as plain text: header `# N=<N> n=<n>`, then one
/// `r value` pair per line in scientific notation with 17 significant
/// digits (lossless for `f64`).
pub fn write_field(path: &Path, grid: &RadialGrid, u: &[f64]) -> Result<(), FieldIoError> {
    if u.len() != grid.len() {
        return Err(FieldIoError::LengthMismatch {
            got: u.len(),
            expected: grid.len(),
        });
    }
    let mut text = String::new();
    let _ = writeln!(text, "# N={} n={}", grid.n_dim(), grid.len());
    for (rk, uk) in grid.r.iter().zip(u) {
        let _ = writeln!(text, "{rk:.16e} {uk:.16e}");
    }
    let mut file = std::fs::File::create(path).map_err(|source| FieldIoError::Io {
        path: path.display().to_string(),
        source,
    })?;
    file.write_all(text.as_bytes()).map_err(|source| FieldIoError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// A field read back from the text format.
#[derive(Debug, Clone)]
pub struct FieldData {
    pub n_dim: u32,
    pub r: Vec<f64>,
    pub values: Vec<f64>,
}

/// Read a field written by [`write_field`]; samples are recovered exactly.
pub fn read_field(path: &Path) -> Result<FieldData, FieldIoError> {
    let display = path.display().to_string();
    let file = std::fs::File::open(path).map_err(|source| FieldIoError::Io {
        path: display.clone(),
        source,
    })?;
    let malformed = |line: usize, msg: String| FieldIoError::Malformed {
        path: display.clone(),
        line,
        msg,
    };
    let mut lines = BufReader::new(file).lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| malformed(1, "empty file".into()))?;
    let header = header.map_err(|source| FieldIoError::Io {
        path: display.clone(),
        source,
    })?;
    let parsed: Option<(u32, usize)> = header
        .strip_prefix("# N=")
        .and_then(|rest| rest.split_once(" n="))
        .and_then(|(n_dim, n)| Some((n_dim.parse().ok()?, n.parse().ok()?)));
    let (n_dim, n) =
        parsed.ok_or_else(|| malformed(1, format!("expected `# N=<N> n=<n>`, got `{header}`")))?;
    let mut r = Vec::with_capacity(n);
    let mut values = Vec::with_capacity(n);
    for (idx, line) in lines {
        let line = line.map_err(|source| FieldIoError::Io {
            path: display.clone(),
            source,
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let parse = |tok: Option<&str>, what: &str| -> Result<f64, FieldIoError> {
            tok.ok_or_else(|| malformed(idx + 1, format!("missing {what}")))?
                .parse()
                .map_err(|e| malformed(idx + 1, format!("bad {what}: {e}")))
        };
        r.push(parse(parts.next(), "radius")?);
        values.push(parse(parts.next(), "value")?);
    }
    if r.len() != n {
        return Err(malformed(
            n + 2,
            format!("header promises {n} samples, found {}", r.len()),
        ));
    }
    Ok(FieldData { n_dim, r, values })
}
