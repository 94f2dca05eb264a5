//! The energy functional of the coupled system, its truncated variant,
//! gradients, and the Nehari-manifold machinery.
//!
//! For a pair `(u, v)` of radial fields the energy is
//!
//! ```text
//! E(u,v) = 1/2 ||(u,v)||_D^2 - ||u||_{p1,s1}^{p1} / p1
//!                            - ||v||_{p2,s2}^{p2} / p2
//!                            - nu * int h |u|^alpha |v|^beta / r^s3,
//! ```
//!
//! where `||(u,v)||_D^2` is the sum of the two Hardy-shifted norms and
//! `p1, p2` are the critical Hardy–Sobolev exponents. The truncated variant
//! replaces `|u|, |v|` by the positive parts `u+, v+` in every superquadratic
//! term, so its critical points are nonnegative.
//!
//! The gradient is assembled variationally — it is the exact derivative of
//! the *discrete* energy, so that the quadrature pairing of the gradient
//! with any test pair equals the directional derivative of the evaluated
//! energy. Descent methods then never fight discretization mismatch.
//!
//! Nehari projection: every direction with some superquadratic mass meets
//! the manifold `{Psi = 0}` at exactly one positive scale `t`, the root of
//! the strictly increasing map `t -> t^(p1-2) A + t^(p2-2) B + nu (alpha +
//! beta) t^(alpha+beta-2) C`. The root is found by bracketing from `t = 1`
//! and safeguarded Newton.

use crate::analytic::{CouplingRegime, SystemParams};
use crate::grid::RadialGrid;
use serde::Serialize;
use thiserror::Error;

/// A pair of radial fields sampled on a shared grid.
#[derive(Debug, Clone, PartialEq)]
pub struct StatePair {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

impl StatePair {
    /// Bundle two equally long sample vectors.
    pub fn new(u: Vec<f64>, v: Vec<f64>) -> Self {
        assert_eq!(u.len(), v.len(), "component sample counts differ");
        Self { u, v }
    }

    /// The zero state on an `n`-point grid.
    pub fn zeros(n: usize) -> Self {
        Self {
            u: vec![0.0; n],
            v: vec![0.0; n],
        }
    }

    /// Number of samples per component.
    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }

    /// Both components scaled by `t`.
    pub fn scaled(&self, t: f64) -> Self {
        Self {
            u: self.u.iter().map(|x| t * x).collect(),
            v: self.v.iter().map(|x| t * x).collect(),
        }
    }

    /// True if every sample of both components is exactly zero.
    pub fn is_zero(&self) -> bool {
        self.u.iter().all(|&x| x == 0.0) && self.v.iter().all(|&x| x == 0.0)
    }
}

/// Every integral making up the energy, plus the assembled total.
///
/// `dirichlet_*` and `hardy_*` are the raw (unweighted) integrals; the total
/// combines them as
/// `1/2 (dirichlet_u + dirichlet_v) - 1/2 lambda1 hardy_u - 1/2 lambda2 hardy_v
///  - crit_u / p1 - crit_v / p2 - nu * coupling`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyBreakdown {
    /// `int |du/dr|^2`.
    pub dirichlet_u: f64,
    pub dirichlet_v: f64,
    /// `int u^2 / r^2`.
    pub hardy_u: f64,
    pub hardy_v: f64,
    /// `int |u|^p1 / r^s1` (positive part instead of modulus when truncated).
    pub crit_u: f64,
    pub crit_v: f64,
    /// `int h |u|^alpha |v|^beta / r^s3`.
    pub coupling: f64,
    pub total: f64,
}

/// Result of scaling a state onto the Nehari manifold.
#[derive(Debug, Clone)]
pub struct NehariProjection {
    /// The unique positive scale placing the ray on the manifold.
    pub t: f64,
    /// The scaled state `(t u, t v)`.
    pub projected: StatePair,
    /// Nehari residual of the projected state (zero up to the root-finding
    /// tolerance, well below `1e-10` relative to the squared norm).
    pub residual: f64,
}

/// Generalized-Hölder comparison of the coupling term on a concrete state.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct HolderReport {
    /// The coupling integral on the state.
    pub coupling: f64,
    /// The product bound `||h/r^tau||_P * crit_u^(alpha/p1) * crit_v^(beta/p2)`.
    pub bound: f64,
    /// `coupling / bound`; lies in `(0, 1]` for nonzero states, `0` when the
    /// state makes both sides vanish.
    pub slack: f64,
    /// Whether the inequality holds (up to round-off).
    pub holds: bool,
}

/// Failure modes of energy evaluation and Nehari projection.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum EnergyError {
    #[error("grid is for dimension {grid} but the parameters are for {params}")]
    DimensionMismatch { grid: u32, params: u32 },
    #[error("state is identically zero; the Nehari constraint is undefined there")]
    ZeroState,
    #[error("every superquadratic term vanishes along this direction; no Nehari scale exists")]
    DegenerateDirection,
    #[error("squared norm of the state is not positive ({value:.3e}); cannot project")]
    NonpositiveNorm { value: f64 },
    #[error("Nehari projection stalled at relative defect {defect:.3e} after {iters} iterations")]
    ProjectionStalled { defect: f64, iters: usize },
    #[error(
        "state is off the Nehari manifold (relative residual {rel:.3e}, tolerance {tol:.0e})"
    )]
    OffManifold { rel: f64, tol: f64 },
    #[error("the generalized Hölder comparison needs a subcritical power sum; this coupling is critical")]
    CriticalRegime,
}

/// Relative Nehari-residual tolerance below which a state counts as lying on
/// the manifold for the constrained-form identities.
pub const ON_MANIFOLD_TOL: f64 = 1e-8;

/// Relative defect tolerance of the Nehari projection root-finder.
const PROJECT_TOL: f64 = 1e-13;

/// The discrete energy functional with its grid and parameters bound,
/// singular weights precomputed on the nodes.
#[derive(Debug, Clone)]
pub struct SystemFunctional {
    grid: RadialGrid,
    params: SystemParams,
    /// `r^-2` on the nodes.
    w_hardy: Vec<f64>,
    /// `r^-s1`.
    w_crit1: Vec<f64>,
    /// `r^-s2`.
    w_crit2: Vec<f64>,
    /// `h(r) r^-s3`.
    w_couple: Vec<f64>,
    /// `||h/r^tau||_P` for the Hölder comparison; absent in the critical
    /// regime (where the natural comparison is a sup-norm, not an integral).
    holder_norm: Option<f64>,
}

impl SystemFunctional {
    /// Bind parameters to a grid and precompute the singular weights.
    pub fn new(grid: RadialGrid, params: SystemParams) -> Result<Self, EnergyError> {
        if grid.n_dim() != params.n_dim {
            return Err(EnergyError::DimensionMismatch {
                grid: grid.n_dim(),
                params: params.n_dim,
            });
        }
        let e = *params.exponents();
        let w_hardy: Vec<f64> = grid.r.iter().map(|&r| r.powi(-2)).collect();
        let w_crit1: Vec<f64> = grid.r.iter().map(|&r| r.powf(-params.s1)).collect();
        let w_crit2: Vec<f64> = grid.r.iter().map(|&r| r.powf(-params.s2)).collect();
        let w_couple: Vec<f64> = grid
            .r
            .iter()
            .map(|&r| params.weight.eval(e.sigma, r) * r.powf(-params.s3))
            .collect();
        let holder_norm = match e.regime {
            CouplingRegime::Critical => None,
            CouplingRegime::Subcritical => {
                // ( int (h / r^tau)^P )^(1/P), evaluated in log space since
                // P can make the integrand's dynamic range enormous.
                let w = &params.weight;
                let total: f64 = grid
                    .r
                    .iter()
                    .zip(&grid.w)
                    .map(|(&r, &wk)| {
                        let ln_h = w.h0.ln() + (e.sigma + w.p) * r.ln()
                            - (w.p + w.q) * r.ln_1p();
                        (e.holder * (ln_h - e.tau * r.ln())).exp() * wk
                    })
                    .sum();
                Some((grid.sphere() * total).powf(1.0 / e.holder))
            }
        };
        Ok(Self {
            grid,
            params,
            w_hardy,
            w_crit1,
            w_crit2,
            w_couple,
            holder_norm,
        })
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    pub fn params(&self) -> &SystemParams {
        &self.params
    }

    fn check_state(&self, s: &StatePair) {
        assert_eq!(
            s.len(),
            self.grid.len(),
            "state has {} samples but the grid has {}",
            s.len(),
            self.grid.len()
        );
    }

    /// First difference in the log variable (not yet divided by `r`).
    fn dy(&self, u: &[f64]) -> Vec<f64> {
        let n = u.len();
        let two_dy = 2.0 * self.grid.dy;
        let mut t = vec![0.0; n];
        for k in 1..n - 1 {
            t[k] = (u[k + 1] - u[k - 1]) / two_dy;
        }
        t[0] = (-3.0 * u[0] + 4.0 * u[1] - u[2]) / two_dy;
        t[n - 1] = (3.0 * u[n - 1] - 4.0 * u[n - 2] + u[n - 3]) / two_dy;
        t
    }

    /// Exact adjoint of [`Self::dy`] under the plain (unweighted) dot
    /// product: `sum_k dy(u)_k m_k == sum_k u_k dyT(m)_k` for all `u`, `m`.
    fn dy_transpose(&self, m: &[f64]) -> Vec<f64> {
        let n = m.len();
        let two_dy = 2.0 * self.grid.dy;
        let mut out = vec![0.0; n];
        for k in 1..n - 1 {
            out[k - 1] -= m[k] / two_dy;
            out[k + 1] += m[k] / two_dy;
        }
        out[0] += -3.0 * m[0] / two_dy;
        out[1] += 4.0 * m[0] / two_dy;
        out[2] += -m[0] / two_dy;
        out[n - 1] += 3.0 * m[n - 1] / two_dy;
        out[n - 2] += -4.0 * m[n - 1] / two_dy;
        out[n - 3] += m[n - 1] / two_dy;
        out
    }

    /// Discrete weak Laplacian: the field `L u` whose quadrature pairing
    /// with any test field equals `int (du/dr)(d delta/dr)` exactly.
    fn lap(&self, u: &[f64]) -> Vec<f64> {
        let g = &self.grid;
        let t = self.dy(u);
        let m: Vec<f64> = t
            .iter()
            .zip(g.r.iter().zip(&g.w))
            .map(|(tk, (rk, wk))| wk * tk / (rk * rk))
            .collect();
        let mut out = self.dy_transpose(&m);
        for (ok, wk) in out.iter_mut().zip(&g.w) {
            *ok /= wk;
        }
        out
    }

    /// Hardy-shifted squared norm of one component against a given `lambda`.
    pub fn lambda_norm_sq(&self, u: &[f64], lambda: f64) -> f64 {
        self.grid.dirichlet(u) - lambda * self.grid.hardy_integral(u)
    }

    /// `||(u,v)||_D^2`, the sum of the two Hardy-shifted squared norms.
    pub fn pair_norm_sq(&self, s: &StatePair) -> f64 {
        self.check_state(s);
        self.lambda_norm_sq(&s.u, self.params.lambda1)
            + self.lambda_norm_sq(&s.v, self.params.lambda2)
    }

    /// The three superquadratic integrals `(A, B, C)`: the two critical
    /// terms and the coupling term. `truncate` selects positive parts
    /// instead of moduli.
    fn parts(&self, s: &StatePair, truncate: bool) -> (f64, f64, f64) {
        let g = &self.grid;
        let e = self.params.exponents();
        let (alpha, beta) = (self.params.alpha, self.params.beta);
        let (mut a, mut b, mut c) = (0.0, 0.0, 0.0);
        for k in 0..g.len() {
            let (au, av) = if truncate {
                (s.u[k].max(0.0), s.v[k].max(0.0))
            } else {
                (s.u[k].abs(), s.v[k].abs())
            };
            let wk = g.w[k];
            a += au.powf(e.crit1) * self.w_crit1[k] * wk;
            b += av.powf(e.crit2) * self.w_crit2[k] * wk;
            if au > 0.0 && av > 0.0 {
                c += au.powf(alpha) * av.powf(beta) * self.w_couple[k] * wk;
            }
        }
        (g.sphere() * a, g.sphere() * b, g.sphere() * c)
    }

    fn assemble_breakdown(&self, s: &StatePair, truncate: bool) -> EnergyBreakdown {
        self.check_state(s);
        let p = &self.params;
        let e = p.exponents();
        let (crit_u, crit_v, coupling) = self.parts(s, truncate);
        let b = EnergyBreakdown {
            dirichlet_u: self.grid.dirichlet(&s.u),
            dirichlet_v: self.grid.dirichlet(&s.v),
            hardy_u: self.grid.hardy_integral(&s.u),
            hardy_v: self.grid.hardy_integral(&s.v),
            crit_u,
            crit_v,
            coupling,
            total: 0.0,
        };
        let total = 0.5 * (b.dirichlet_u + b.dirichlet_v)
            - 0.5 * p.lambda1 * b.hardy_u
            - 0.5 * p.lambda2 * b.hardy_v
            - crit_u / e.crit1
            - crit_v / e.crit2
            - p.nu * coupling;
        EnergyBreakdown { total, ..b }
    }

    /// All energy terms of the plain functional (moduli in the
    /// superquadratic terms).
    pub fn breakdown(&self, s: &StatePair) -> EnergyBreakdown {
        self.assemble_breakdown(s, false)
    }

    /// All energy terms of the truncated functional (positive parts in the
    /// superquadratic terms). Identical to [`Self::breakdown`] on
    /// nonnegative states.
    pub fn breakdown_truncated(&self, s: &StatePair) -> EnergyBreakdown {
        self.assemble_breakdown(s, true)
    }

    /// Total energy of the plain functional.
    pub fn energy(&self, s: &StatePair) -> f64 {
        self.breakdown(s).total
    }

    /// Total energy of the truncated functional.
    pub fn energy_truncated(&self, s: &StatePair) -> f64 {
        self.breakdown_truncated(s).total
    }

    fn assemble_gradient(&self, s: &StatePair, truncate: bool) -> StatePair {
        self.check_state(s);
        let p = &self.params;
        let e = p.exponents();
        let (alpha, beta, nu) = (p.alpha, p.beta, p.nu);
        let mut gu = self.lap(&s.u);
        let mut gv = self.lap(&s.v);
        for k in 0..s.len() {
            let (u, v) = (s.u[k], s.v[k]);
            let (au, av) = if truncate {
                (u.max(0.0), v.max(0.0))
            } else {
                (u.abs(), v.abs())
            };
            // d(-|u|^p / p) = -|u|^(p-2) u; for the truncation the negative
            // range is flat, so the factor is -(u+)^(p-1).
            let crit_u = if truncate {
                au.powf(e.crit1 - 1.0)
            } else {
                au.powf(e.crit1 - 2.0) * u
            };
            let crit_v = if truncate {
                av.powf(e.crit2 - 1.0)
            } else {
                av.powf(e.crit2 - 2.0) * v
            };
            // |u|^(alpha-2) u extends by 0 at u = 0 (alpha > 1), so mask the
            // zero set rather than evaluate 0^(negative).
            let couple_u = if au > 0.0 && av > 0.0 {
                let signed = if truncate { au } else { u };
                au.powf(alpha - 2.0) * signed * av.powf(beta)
            } else {
                0.0
            };
            let couple_v = if au > 0.0 && av > 0.0 {
                let signed = if truncate { av } else { v };
                av.powf(beta - 2.0) * signed * au.powf(alpha)
            } else {
                0.0
            };
            gu[k] -= p.lambda1 * u * self.w_hardy[k]
                + crit_u * self.w_crit1[k]
                + nu * alpha * couple_u * self.w_couple[k];
            gv[k] -= p.lambda2 * v * self.w_hardy[k]
                + crit_v * self.w_crit2[k]
                + nu * beta * couple_v * self.w_couple[k];
        }
        StatePair::new(gu, gv)
    }

    /// Quadrature representation of the derivative of [`Self::energy`]: the
    /// pairing of the result with any test pair equals the directional
    /// derivative of the evaluated energy.
    pub fn gradient(&self, s: &StatePair) -> StatePair {
        self.assemble_gradient(s, false)
    }

    /// Same for the truncated functional.
    pub fn gradient_truncated(&self, s: &StatePair) -> StatePair {
        self.assemble_gradient(s, true)
    }

    /// The quadrature pairing `int (g_u d_u + g_v d_v)` under which the
    /// gradient represents the derivative.
    pub fn quadrature_pairing(&self, g: &StatePair, d: &StatePair) -> f64 {
        self.check_state(g);
        self.check_state(d);
        let acc: f64 = self
            .grid
            .w
            .iter()
            .enumerate()
            .map(|(k, wk)| (g.u[k] * d.u[k] + g.v[k] * d.v[k]) * wk)
            .sum();
        self.grid.sphere() * acc
    }

    /// Nehari residual `Psi = ||(u,v)||_D^2 - A - B - nu (alpha+beta) C`,
    /// the derivative of the energy along the state's own ray.
    pub fn nehari_residual(&self, s: &StatePair) -> Result<f64, EnergyError> {
        self.check_state(s);
        if s.is_zero() {
            return Err(EnergyError::ZeroState);
        }
        let p = &self.params;
        let d = self.pair_norm_sq(s);
        let (a, b, c) = self.parts(s, false);
        Ok(d - a - b - p.nu * (p.alpha + p.beta) * c)
    }

    /// Sign of the constraint's own derivative along the ray,
    /// `2 D - p1 A - p2 B - nu (alpha+beta)^2 C`; strictly negative at
    /// Nehari points, which makes the manifold a natural constraint.
    pub fn nehari_ray_slope(&self, s: &StatePair) -> Result<f64, EnergyError> {
        self.check_state(s);
        if s.is_zero() {
            return Err(EnergyError::ZeroState);
        }
        let p = &self.params;
        let e = p.exponents();
        let d = self.pair_norm_sq(s);
        let (a, b, c) = self.parts(s, false);
        let ab = p.alpha + p.beta;
        Ok(2.0 * d - e.crit1 * a - e.crit2 * b - p.nu * ab * ab * c)
    }

    /// Scale a direction onto the Nehari manifold: the unique `t > 0` with
    /// `t^2 D = t^p1 A + t^p2 B + nu (alpha+beta) t^(alpha+beta) C`.
    pub fn project(&self, s: &StatePair) -> Result<NehariProjection, EnergyError> {
        self.check_state(s);
        let p = &self.params;
        let e = p.exponents();
        let d = self.pair_norm_sq(s);
        let (a, b, c) = self.parts(s, false);
        let nab = p.nu * (p.alpha + p.beta);
        let mass = a + b + nab * c;
        if !mass.is_finite() || mass <= 0.0 {
            return Err(EnergyError::DegenerateDirection);
        }
        if !d.is_finite() || d <= 0.0 {
            return Err(EnergyError::NonpositiveNorm { value: d });
        }
        let (e1, e2, e3) = (e.crit1 - 2.0, e.crit2 - 2.0, p.alpha + p.beta - 2.0);
        let phi = |t: f64| t.powf(e1) * a + t.powf(e2) * b + nab * t.powf(e3) * c;
        let dphi = |t: f64| {
            e1 * t.powf(e1 - 1.0) * a + e2 * t.powf(e2 - 1.0) * b
                + nab * e3 * t.powf(e3 - 1.0) * c
        };
        // phi is strictly increasing from 0 to infinity, so a bracket around
        // the root always exists; grow one geometrically from t = 1.
        let (mut lo, mut hi) = (1.0f64, 1.0f64);
        for _ in 0..3000 {
            if phi(lo) <= d {
                break;
            }
            lo *= 0.5;
        }
        for _ in 0..3000 {
            if phi(hi) >= d {
                break;
            }
            hi *= 2.0;
        }
        if phi(lo) > d || phi(hi) < d {
            return Err(EnergyError::ProjectionStalled {
                defect: f64::INFINITY,
                iters: 0,
            });
        }
        let mut t = (lo * hi).sqrt();
        let mut defect = f64::INFINITY;
        for _ in 0..200 {
            let val = phi(t);
            defect = (val - d).abs();
            if defect <= PROJECT_TOL * d.abs() {
                let projected = s.scaled(t);
                let residual = self
                    .nehari_residual(&projected)
                    .expect("projected state is nonzero");
                return Ok(NehariProjection {
                    t,
                    projected,
                    residual,
                });
            }
            if val > d {
                hi = t;
            } else {
                lo = t;
            }
            let dp = dphi(t);
            let newton = if dp.is_finite() && dp > 0.0 {
                t - (val - d) / dp
            } else {
                0.0
            };
            t = if newton > lo && newton < hi {
                newton
            } else {
                (lo * hi).sqrt()
            };
        }
        Err(EnergyError::ProjectionStalled {
            defect: defect / d.abs(),
            iters: 200,
        })
    }

    /// The three algebraically equivalent expressions of the energy on the
    /// Nehari manifold:
    /// the direct value, the norm-dominant form
    /// `(1/2 - 1/(alpha+beta)) D - (1/p1 - 1/(alpha+beta)) A - (1/p2 - 1/(alpha+beta)) B`,
    /// and the term-positive form
    /// `(1/2 - 1/p1) A + (1/2 - 1/p2) B + nu ((alpha+beta)/2 - 1) C`.
    /// They differ by multiples of the residual, so the state must lie on
    /// the manifold up to [`ON_MANIFOLD_TOL`].
    pub fn constrained_forms(&self, s: &StatePair) -> Result<(f64, f64, f64), EnergyError> {
        self.check_state(s);
        if s.is_zero() {
            return Err(EnergyError::ZeroState);
        }
        let p = &self.params;
        let e = p.exponents();
        let d = self.pair_norm_sq(s);
        let (a, b, c) = self.parts(s, false);
        let ab = p.alpha + p.beta;
        let psi = d - a - b - p.nu * ab * c;
        let rel = psi.abs() / d.abs();
        if rel > ON_MANIFOLD_TOL {
            return Err(EnergyError::OffManifold {
                rel,
                tol: ON_MANIFOLD_TOL,
            });
        }
        let form1 = 0.5 * d - a / e.crit1 - b / e.crit2 - p.nu * c;
        let form2 = (0.5 - 1.0 / ab) * d
            - (1.0 / e.crit1 - 1.0 / ab) * a
            - (1.0 / e.crit2 - 1.0 / ab) * b;
        let form3 = (0.5 - 1.0 / e.crit1) * a + (0.5 - 1.0 / e.crit2) * b
            + p.nu * (0.5 * ab - 1.0) * c;
        Ok((form1, form2, form3))
    }

    /// Compare the coupling integral against its generalized-Hölder bound
    /// `||h/r^tau||_P * crit_u^(alpha/p1) * crit_v^(beta/p2)` on a concrete
    /// state. Only defined for subcritical coupling.
    pub fn holder_bound_check(&self, s: &StatePair) -> Result<HolderReport, EnergyError> {
        self.check_state(s);
        let norm = self.holder_norm.ok_or(EnergyError::CriticalRegime)?;
        let p = &self.params;
        let e = p.exponents();
        let (a, b, c) = self.parts(s, false);
        let bound = norm * a.powf(p.alpha / e.crit1) * b.powf(p.beta / e.crit2);
        let (slack, holds) = if bound > 0.0 {
            (c / bound, c <= bound * (1.0 + 1e-12))
        } else {
            (0.0, c == 0.0)
        };
        Ok(HolderReport {
            coupling: c,
            bound,
            slack,
            holds,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::{critical_level, CouplingWeight, ProfileParams, SystemParams};
    use crate::grid::RadialGrid;

    fn rel_err(got: f64, want: f64) -> f64 {
        (got - want).abs() / want.abs()
    }

    /// A small admissible system in dimension 3 with equal singularities.
    fn test_system(nu: f64) -> SystemParams {
        let w = CouplingWeight::new(1.0, 1.0, 4.0).unwrap();
        SystemParams::new(3, 0.05, 0.125, 0.5, 0.5, 0.5, 2.2, 2.2, nu, w).unwrap()
    }

    fn test_functional(nu: f64, n: usize) -> SystemFunctional {
        let grid = RadialGrid::new(3, 1e-8, 1e8, n).unwrap();
        SystemFunctional::new(grid, test_system(nu)).unwrap()
    }

    /// Smooth log-Gaussian bump, comfortably inside every test window.
    fn bump(g: &RadialGrid, amp: f64, center: f64, width: f64) -> Vec<f64> {
        g.sample(|r| amp * (-(r.ln() - center).powi(2) / (2.0 * width * width)).exp())
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let grid = RadialGrid::new(4, 1e-6, 1e6, 64).unwrap();
        assert!(matches!(
            SystemFunctional::new(grid, test_system(0.5)),
            Err(EnergyError::DimensionMismatch { grid: 4, params: 3 })
        ));
    }

    #[test]
    fn difference_stencils_are_exact_adjoints() {
        let f = test_functional(0.5, 97);
        let g = f.grid();
        let u = bump(g, 1.3, 0.4, 1.1);
        let m = bump(g, 0.7, -0.9, 0.8);
        let lhs: f64 = f.dy(&u).iter().zip(&m).map(|(a, b)| a * b).sum();
        let rhs: f64 = u.iter().zip(f.dy_transpose(&m)).map(|(a, b)| a * b).sum();
        assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(1.0));
    }

    #[test]
    fn zero_and_decoupled_energies() {
        let f = test_functional(0.0, 128);
        let zero = StatePair::zeros(128);
        assert_eq!(f.energy(&zero), 0.0);

        // With nu = 0 the energy splits into the two scalar energies.
        let g = f.grid();
        let u = bump(g, 1.0, 0.2, 1.0);
        let v = bump(g, 0.8, -0.5, 1.3);
        let n = g.len();
        let both = f.energy(&StatePair::new(u.clone(), v.clone()));
        let only_u = f.energy(&StatePair::new(u, vec![0.0; n]));
        let only_v = f.energy(&StatePair::new(vec![0.0; n], v));
        assert!((both - only_u - only_v).abs() < 1e-12 * both.abs().max(1.0));
    }

    #[test]
    fn semitrivial_profile_attains_the_scalar_level() {
        // On (z1, 0) the energy reduces to the scalar critical level.
        let params = test_system(0.7);
        let grid = RadialGrid::with_defaults(3).unwrap();
        let f = SystemFunctional::new(grid, params).unwrap();
        let z = f
            .grid()
            .sample_profile(&ProfileParams::new(3, 0.05, 0.5, 1.0).unwrap());
        let state = StatePair::new(z, vec![0.0; f.grid().len()]);
        let b = f.breakdown(&state);
        let level = critical_level(3, 0.05, 0.5).unwrap();
        assert_eq!(b.coupling, 0.0);
        assert!(rel_err(b.total, level) < 1e-2, "{} vs {level}", b.total);
        // The same state is (numerically) already on the Nehari manifold.
        let psi = f.nehari_residual(&state).unwrap();
        assert!(psi.abs() < 1e-2 * f.pair_norm_sq(&state));
    }

    #[test]
    fn truncation_matches_on_nonnegative_and_cuts_negative() {
        let f = test_functional(0.9, 200);
        let g = f.grid();
        let pos = StatePair::new(bump(g, 1.1, 0.0, 1.0), bump(g, 0.6, 0.8, 0.9));
        assert_eq!(f.breakdown(&pos), f.breakdown_truncated(&pos));

        // Entirely nonpositive first component: its critical term and the
        // coupling vanish under truncation.
        let neg = StatePair::new(
            pos.u.iter().map(|x| -x).collect(),
            pos.v.clone(),
        );
        let bt = f.breakdown_truncated(&neg);
        assert_eq!(bt.crit_u, 0.0);
        assert_eq!(bt.coupling, 0.0);
        // Mixed sign: truncation strictly shrinks the critical term.
        let mixed = StatePair::new(
            g.r.iter()
                .zip(&pos.u)
                .map(|(&r, &x)| if r < 1.0 { -x } else { x })
                .collect(),
            pos.v.clone(),
        );
        let plain = f.breakdown(&mixed);
        let trunc = f.breakdown_truncated(&mixed);
        assert!(trunc.crit_u < plain.crit_u);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let f = test_functional(0.8, 512);
        let g = f.grid();
        let state = StatePair::new(bump(g, 1.0, 0.3, 1.0), bump(g, 1.2, -0.8, 1.2));
        let dir = StatePair::new(bump(g, 0.9, 1.1, 0.9), bump(g, 0.7, -0.2, 1.1));
        let eps = 1e-5;

        for (grad, energy) in [
            (
                f.gradient(&state),
                Box::new(|s: &StatePair| f.energy(s)) as Box<dyn Fn(&StatePair) -> f64>,
            ),
            (
                f.gradient_truncated(&state),
                Box::new(|s: &StatePair| f.energy_truncated(s)),
            ),
        ] {
            let pairing = f.quadrature_pairing(&grad, &dir);
            let plus = StatePair::new(
                state.u.iter().zip(&dir.u).map(|(a, b)| a + eps * b).collect(),
                state.v.iter().zip(&dir.v).map(|(a, b)| a + eps * b).collect(),
            );
            let minus = StatePair::new(
                state.u.iter().zip(&dir.u).map(|(a, b)| a - eps * b).collect(),
                state.v.iter().zip(&dir.v).map(|(a, b)| a - eps * b).collect(),
            );
            let fd = (energy(&plus) - energy(&minus)) / (2.0 * eps);
            assert!(
                rel_err(pairing, fd) < 1e-6,
                "pairing {pairing} vs finite difference {fd}"
            );
        }
        // Mixed-sign state against the plain functional.
        let signed = StatePair::new(
            state.u.iter().zip(&dir.u).map(|(a, b)| a - 0.8 * b).collect(),
            state.v.clone(),
        );
        let grad = f.gradient(&signed);
        let pairing = f.quadrature_pairing(&grad, &dir);
        let at = |e: f64| {
            StatePair::new(
                signed.u.iter().zip(&dir.u).map(|(a, b)| a + e * b).collect(),
                signed.v.iter().zip(&dir.v).map(|(a, b)| a + e * b).collect(),
            )
        };
        let fd = (f.energy(&at(eps)) - f.energy(&at(-eps))) / (2.0 * eps);
        assert!(rel_err(pairing, fd) < 1e-6, "{pairing} vs {fd}");

        // Zero state has zero gradient.
        let gz = f.gradient(&StatePair::zeros(g.len()));
        assert!(gz.u.iter().chain(&gz.v).all(|&x| x == 0.0));
    }

    #[test]
    fn nehari_residual_changes_sign_along_rays() {
        let f = test_functional(0.5, 256);
        let g = f.grid();
        let s = StatePair::new(bump(g, 1.0, 0.0, 1.0), bump(g, 0.9, 0.5, 1.1));
        assert!(f.nehari_residual(&s.scaled(1e-3)).unwrap() > 0.0);
        assert!(f.nehari_residual(&s.scaled(1e3)).unwrap() < 0.0);
        assert!(matches!(
            f.nehari_residual(&StatePair::zeros(g.len())),
            Err(EnergyError::ZeroState)
        ));
    }

    #[test]
    fn projection_lands_on_the_manifold_and_is_idempotent() {
        let f = test_functional(0.5, 256);
        let g = f.grid();
        let s = StatePair::new(bump(g, 2.0, 0.1, 1.0), bump(g, 0.4, -0.3, 0.8));
        let proj = f.project(&s).unwrap();
        let d = f.pair_norm_sq(&proj.projected);
        assert!(proj.residual.abs() <= 1e-10 * d);
        let again = f.project(&proj.projected).unwrap();
        assert!((again.t - 1.0).abs() <= 1e-10);

        // Homogeneity: scaling the input scales t inversely (two-term case).
        let f0 = test_functional(0.0, 256);
        let t1 = f0.project(&s).unwrap().t;
        let t3 = f0.project(&s.scaled(3.0)).unwrap().t;
        assert!(rel_err(t3 * 3.0, t1) < 1e-9);

        // Degenerate direction: no superquadratic mass anywhere.
        assert!(matches!(
            f.project(&StatePair::zeros(g.len())),
            Err(EnergyError::DegenerateDirection)
        ));
    }

    #[test]
    fn ray_slope_is_negative_at_projected_states() {
        let f = test_functional(0.6, 256);
        let g = f.grid();
        for (cu, cv) in [(1.0, 1.0), (2.0, 0.3), (0.2, 1.7)] {
            let s = StatePair::new(bump(g, cu, 0.2, 1.0), bump(g, cv, -0.4, 1.2));
            let proj = f.project(&s).unwrap();
            assert!(f.nehari_ray_slope(&proj.projected).unwrap() < 0.0);
        }
    }

    #[test]
    fn constrained_forms_agree_on_the_manifold() {
        let f = test_functional(0.5, 256);
        let g = f.grid();
        let s = StatePair::new(bump(g, 1.0, 0.0, 1.0), bump(g, 0.8, 0.6, 0.9));
        let proj = f.project(&s).unwrap();
        let (f1, f2, f3) = f.constrained_forms(&proj.projected).unwrap();
        assert!(f1 > 0.0 && f2 > 0.0 && f3 > 0.0);
        assert!(rel_err(f2, f1) < 1e-10);
        assert!(rel_err(f3, f1) < 1e-10);
        // Far off the manifold the identities are meaningless: rejected.
        assert!(matches!(
            f.constrained_forms(&proj.projected.scaled(2.0)),
            Err(EnergyError::OffManifold { .. })
        ));
    }

    #[test]
    fn holder_bound_holds_with_slack() {
        let f = test_functional(1.0, 256);
        let g = f.grid();
        let s = StatePair::new(bump(g, 1.0, 0.0, 1.0), bump(g, 1.0, 0.2, 1.0));
        let rep = f.holder_bound_check(&s).unwrap();
        assert!(rep.holds);
        assert!(rep.slack > 0.0 && rep.slack <= 1.0);

        // One vanishing component: both sides zero, inequality intact.
        let semi = StatePair::new(s.u.clone(), vec![0.0; g.len()]);
        let rep = f.holder_bound_check(&semi).unwrap();
        assert!(rep.holds);
        assert_eq!(rep.coupling, 0.0);

        // Critical coupling has no integral comparison norm.
        let w = CouplingWeight::new(1.0, 1.0, 4.0).unwrap();
        let critical =
            SystemParams::new(3, 0.05, 0.125, 0.5, 0.5, 0.5, 2.5, 2.5, 1.0, w).unwrap();
        let fc = SystemFunctional::new(RadialGrid::new(3, 1e-8, 1e8, 256).unwrap(), critical)
            .unwrap();
        assert!(matches!(
            fc.holder_bound_check(&s),
            Err(EnergyError::CriticalRegime)
        ));
    }
}
