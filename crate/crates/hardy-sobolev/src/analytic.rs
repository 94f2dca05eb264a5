//! Closed-form quantities for the scalar Hardy–Sobolev problem and the
//! coupling calculus of the two-component system.
//!
//! Everything in this module is exact (no discretization):
//!
//! * the best constant in the Hardy inequality and the critical
//!   Hardy–Sobolev exponents,
//! * the explicit radial extremal profiles of the scalar equation, their
//!   best constants and least energy levels (evaluated through log-Gamma
//!   so that exponents close to the singular order 2 do not overflow),
//! * the derived coupling exponents (`tau`, the Hölder exponent, `sigma`)
//!   of the cross term, admissibility checks for the built-in coupling
//!   weight family, and
//! * the scalar threshold [`sigma_inf`] that controls when a balanced
//!   rescaling can beat the decoupled energy levels.
//!
//! All functions are pure; parameter validation happens at the boundaries
//! and returns [`ParamError`] with a message naming the offending quantity.

use serde::Serialize;
use statrs::function::gamma::ln_gamma;
use std::f64::consts::PI;
use thiserror::Error;

/// Smallest admissible space dimension.
pub const MIN_DIMENSION: u32 = 3;

/// Validation failure for analytic parameters.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParamError {
    #[error("dimension must be an integer >= 3, got N = {0}")]
    DimensionTooSmall(u32),
    #[error("lambda must satisfy 0 <= lambda < (N-2)^2/4 = {limit}, got lambda = {value}")]
    LambdaOutOfRange { value: f64, limit: f64 },
    #[error("singularity order s must lie in [0, 2), got s = {0}")]
    SingularityOrderOutOfRange(f64),
    #[error("{name} must be positive, got {value}")]
    NotPositive { name: &'static str, value: f64 },
    #[error("{name} must be nonnegative, got {value}")]
    Negative { name: &'static str, value: f64 },
    #[error("coupling power {name} must exceed 1, got {value}")]
    CouplingPowerTooSmall { name: &'static str, value: f64 },
    #[error("critical exponent {name} must exceed 2, got {value}")]
    ExponentNotAboveTwo { name: &'static str, value: f64 },
    #[error(
        "hypothesis violated: alpha/2*_{{s1}} + beta/2*_{{s2}} <= 1 fails \
         (the sum is {sum})"
    )]
    SupercriticalCoupling { sum: f64 },
    #[error(
        "hypothesis violated: s3 >= s1*alpha/2*_{{s1}} + s2*beta/2*_{{s2}} fails \
         (s3 = {s3} is below the required {required})"
    )]
    CouplingSingularityTooWeak { s3: f64, required: f64 },
    #[error("radius must be positive, got r = {0}")]
    NonPositiveRadius(f64),
}

fn check_dimension(n_dim: u32) -> Result<f64, ParamError> {
    if n_dim < MIN_DIMENSION {
        return Err(ParamError::DimensionTooSmall(n_dim));
    }
    Ok(f64::from(n_dim))
}

fn check_singularity_order(s: f64) -> Result<(), ParamError> {
    if !(0.0..2.0).contains(&s) || !s.is_finite() {
        return Err(ParamError::SingularityOrderOutOfRange(s));
    }
    Ok(())
}

fn check_lambda(n_dim: u32, lambda: f64) -> Result<f64, ParamError> {
    let limit = hardy_constant(n_dim)?;
    if !(0.0..limit).contains(&lambda) || !lambda.is_finite() {
        return Err(ParamError::LambdaOutOfRange {
            value: lambda,
            limit,
        });
    }
    Ok(limit)
}

/// Best constant `(N-2)^2/4` in the Hardy inequality on `R^N`.
pub fn hardy_constant(n_dim: u32) -> Result<f64, ParamError> {
    let nd = check_dimension(n_dim)?;
    Ok((nd - 2.0) * (nd - 2.0) / 4.0)
}

/// Critical Hardy–Sobolev exponent `2(N-s)/(N-2)` for singularity order
/// `s` in `[0, 2)`.
pub fn critical_exponent(n_dim: u32, s: f64) -> Result<f64, ParamError> {
    let nd = check_dimension(n_dim)?;
    check_singularity_order(s)?;
    Ok(2.0 * (nd - s) / (nd - 2.0))
}

/// Power-law rate of the extremal profile at the origin: the profile blows
/// up like `r^(-rate)` as `r -> 0`, with `rate = sqrt(L) - sqrt(L - lambda)`
/// and `L` the Hardy constant. Zero exactly when `lambda = 0`.
pub fn origin_rate(n_dim: u32, lambda: f64) -> Result<f64, ParamError> {
    let limit = check_lambda(n_dim, lambda)?;
    Ok(limit.sqrt() - (limit - lambda).sqrt())
}

/// Amplitude constant `2 (L - lambda) (N - s) / sqrt(L)` of the extremal
/// profile, where `L` is the Hardy constant.
pub fn profile_amplitude(n_dim: u32, lambda: f64, s: f64) -> Result<f64, ParamError> {
    let nd = f64::from(n_dim);
    let limit = check_lambda(n_dim, lambda)?;
    check_singularity_order(s)?;
    Ok(2.0 * (limit - lambda) * (nd - s) / limit.sqrt())
}

/// Parameters of one exact radial minimizer of the scalar problem: the
/// one-parameter family obtained by scaling the canonical profile by
/// `mu > 0` while preserving its energy.
#[derive(Debug, Clone, Copy)]
pub struct ProfileParams {
    pub n_dim: u32,
    pub lambda: f64,
    pub s: f64,
    pub mu: f64,
    /// Blow-up rate at the origin (see [`origin_rate`]).
    pub origin_rate: f64,
    /// Amplitude constant (see [`profile_amplitude`]).
    pub amplitude: f64,
}

impl ProfileParams {
    /// Validate the scalar parameters and precompute the derived constants.
    pub fn new(n_dim: u32, lambda: f64, s: f64, mu: f64) -> Result<Self, ParamError> {
        if !(mu > 0.0) || !mu.is_finite() {
            return Err(ParamError::NotPositive {
                name: "mu",
                value: mu,
            });
        }
        Ok(Self {
            n_dim,
            lambda,
            s,
            mu,
            origin_rate: origin_rate(n_dim, lambda)?,
            amplitude: profile_amplitude(n_dim, lambda, s)?,
        })
    }

    /// Evaluate the profile at radius `r > 0`.
    ///
    /// The canonical profile is
    /// `z(rho) = A^k / (rho^a (1 + rho^b)^m)` with `a` the origin rate,
    /// `k = (N-2)/(2(2-s))`, `b = (2-s)(1 - 2a/(N-2))` and `m = (N-2)/(2-s)`;
    /// the scaled member is `mu^(-(N-2)/2) z(r/mu)`. Evaluation runs in log
    /// space so extreme radii underflow gracefully to zero instead of
    /// producing NaNs.
    pub fn eval(&self, r: f64) -> Result<f64, ParamError> {
        if !(r > 0.0) {
            return Err(ParamError::NonPositiveRadius(r));
        }
        let nd = f64::from(self.n_dim);
        let rho = r / self.mu;
        let k = (nd - 2.0) / (2.0 * (2.0 - self.s));
        let b = (2.0 - self.s) * (1.0 - 2.0 * self.origin_rate / (nd - 2.0));
        let m = (nd - 2.0) / (2.0 - self.s);
        let ln_z = k * self.amplitude.ln() - self.origin_rate * rho.ln() - m * rho.powf(b).ln_1p();
        let ln_scale = -(nd - 2.0) / 2.0 * self.mu.ln();
        Ok((ln_z + ln_scale).exp())
    }
}

/// Area of the unit sphere in `R^N`: `2 pi^(N/2) / Gamma(N/2)`.
pub fn sphere_area(n_dim: u32) -> Result<f64, ParamError> {
    let nd = check_dimension(n_dim)?;
    Ok((2f64.ln() + (nd / 2.0) * PI.ln() - ln_gamma(nd / 2.0)).exp())
}

/// Best constant of the weighted Sobolev embedding with Hardy term: the
/// sharp constant `S(lambda, s)` such that
/// `S * (weighted critical norm)^2 <= (Dirichlet - lambda * Hardy)` over
/// radial functions. Evaluated in log space (single exponentiation) so the
/// Gamma factors stay finite even for `s` close to 2.
pub fn best_constant(n_dim: u32, lambda: f64, s: f64) -> Result<f64, ParamError> {
    let nd = f64::from(n_dim);
    let limit = check_lambda(n_dim, lambda)?;
    check_singularity_order(s)?;
    let x = (nd - s) / (2.0 - s);
    let log_bracket = ((nd - 2.0) / (2.0 * (2.0 - s) * (limit - lambda).sqrt())).ln()
        + 2f64.ln()
        + (nd / 2.0) * PI.ln()
        - ln_gamma(nd / 2.0)
        + 2.0 * ln_gamma(x)
        - ln_gamma(2.0 * x);
    Ok(4.0 * (limit - lambda) * (nd - s) / (nd - 2.0) * (log_bracket / x).exp())
}

/// Least energy level of the scalar problem:
/// `(2-s)/(2(N-s)) * S(lambda,s)^((N-s)/(2-s))`.
///
/// Computed in log space; for `s` extremely close to 2 the level can exceed
/// the double-precision range, in which case infinity is returned.
pub fn critical_level(n_dim: u32, lambda: f64, s: f64) -> Result<f64, ParamError> {
    let nd = f64::from(n_dim);
    let s_const = best_constant(n_dim, lambda, s)?;
    let x = (nd - s) / (2.0 - s);
    Ok((((2.0 - s) / (2.0 * (nd - s))).ln() + x * s_const.ln()).exp())
}

/// Whether the coupling powers saturate the critical balance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CouplingRegime {
    Subcritical,
    Critical,
}

/// Exponent bookkeeping for the cross term `h |u|^alpha |v|^beta / r^s3`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CouplingExponents {
    /// Critical exponent on the first component, `2(N-s1)/(N-2)`.
    pub crit1: f64,
    /// Critical exponent on the second component, `2(N-s2)/(N-2)`.
    pub crit2: f64,
    /// `alpha/crit1 + beta/crit2`; at most 1 for admissible parameters.
    pub power_sum: f64,
    /// Critical iff `power_sum == 1` (then the Hölder exponent degenerates).
    pub regime: CouplingRegime,
    /// Leftover singularity strength `s3 - (s1*alpha/crit1 + s2*beta/crit2)`,
    /// always nonnegative for admissible parameters.
    pub tau: f64,
    /// Conjugate Hölder exponent `1 / (1 - power_sum)`; infinity in the
    /// critical regime.
    pub holder: f64,
    /// Exponent normalizing the weight: `tau * holder` when subcritical, the
    /// raw `tau` when critical (where the comparison is a sup-norm).
    pub sigma: f64,
}

/// Tolerance deciding when `power_sum` counts as exactly critical.
const CRITICAL_TOL: f64 = 1e-12;

/// Derive the coupling exponents from the raw parameters, enforcing the
/// admissibility hypotheses (`alpha, beta > 1`, subcritical-or-critical
/// power sum, nonnegative leftover singularity).
pub fn coupling_exponents(
    n_dim: u32,
    s1: f64,
    s2: f64,
    s3: f64,
    alpha: f64,
    beta: f64,
) -> Result<CouplingExponents, ParamError> {
    let crit1 = critical_exponent(n_dim, s1)?;
    let crit2 = critical_exponent(n_dim, s2)?;
    check_singularity_order(s3)?;
    if !(alpha > 1.0) {
        return Err(ParamError::CouplingPowerTooSmall {
            name: "alpha",
            value: alpha,
        });
    }
    if !(beta > 1.0) {
        return Err(ParamError::CouplingPowerTooSmall {
            name: "beta",
            value: beta,
        });
    }
    let power_sum = alpha / crit1 + beta / crit2;
    if power_sum > 1.0 + CRITICAL_TOL {
        return Err(ParamError::SupercriticalCoupling { sum: power_sum });
    }
    let required = s1 * alpha / crit1 + s2 * beta / crit2;
    let mut tau = s3 - required;
    if tau < 0.0 {
        // Forgive pure round-off when the caller intends exact equality.
        if tau > -CRITICAL_TOL {
            tau = 0.0;
        } else {
            return Err(ParamError::CouplingSingularityTooWeak { s3, required });
        }
    }
    let critical = (power_sum - 1.0).abs() <= CRITICAL_TOL;
    let (regime, holder, sigma) = if critical {
        (CouplingRegime::Critical, f64::INFINITY, tau)
    } else {
        let holder = 1.0 / (1.0 - power_sum);
        (CouplingRegime::Subcritical, holder, tau * holder)
    };
    Ok(CouplingExponents {
        crit1,
        crit2,
        power_sum,
        regime,
        tau,
        holder,
        sigma,
    })
}

/// The built-in three-parameter coupling weight family
/// `h(r) = h0 * r^(sigma + p) / (1 + r)^(p + q)`, chosen so that
/// `h(r)/r^sigma` is continuous with zero limits at the origin and at
/// infinity for every positive `p`, `q`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CouplingWeight {
    pub h0: f64,
    pub p: f64,
    pub q: f64,
}

impl CouplingWeight {
    /// Validate the family parameters (`h0, p, q > 0`).
    pub fn new(h0: f64, p: f64, q: f64) -> Result<Self, ParamError> {
        for (name, value) in [("h0", h0), ("h_p", p), ("h_q", q)] {
            if !(value > 0.0) || !value.is_finite() {
                return Err(ParamError::NotPositive { name, value });
            }
        }
        Ok(Self { h0, p, q })
    }

    /// Evaluate `h(r)` for the normalizing exponent `sigma` (from
    /// [`CouplingExponents::sigma`]) at radius `r >= 0`.
    pub fn eval(&self, sigma: f64, r: f64) -> f64 {
        self.h0 * r.powf(sigma + self.p) / (1.0 + r).powf(self.p + self.q)
    }
}

/// Admissibility report for a coupling weight; informational, never a hard
/// failure (callers decide what to do with violated hypotheses).
#[derive(Debug, Clone, Serialize)]
pub struct WeightReport {
    /// `h(r)/r^sigma -> 0` as `r -> 0` (true for the whole family).
    pub vanishes_at_origin: bool,
    /// `h(r)/r^sigma -> 0` as `r -> infinity` (true for the whole family).
    pub vanishes_at_infinity: bool,
    /// Subcritical regime: the comparison integral
    /// `int_0^inf (h/r^tau)^P r^(N-1) dr` (with `P` the Hölder exponent) is
    /// finite; critical regime: `h/r^tau` is bounded.
    pub integrable: bool,
    /// The normalizing exponent satisfies `sigma < 2`, as the weight-class
    /// hypothesis requires.
    pub sigma_below_two: bool,
    /// Whether the weight is radially non-increasing on `(0, inf)`. The
    /// family rises like `r^(sigma+p)` near the origin, so this is always
    /// false; recorded for information only.
    pub monotone_nonincreasing: bool,
    pub notes: Vec<String>,
}

impl WeightReport {
    /// True when every hypothesis actually needed by the energy estimates
    /// holds (vanishing limits, integrability, `sigma < 2`); the
    /// monotonicity flag is informational and not included.
    pub fn admissible(&self) -> bool {
        self.vanishes_at_origin
            && self.vanishes_at_infinity
            && self.integrable
            && self.sigma_below_two
    }
}

/// Check the weight family against the hypotheses used by the coupling
/// estimates, by exact exponent comparison (no quadrature).
pub fn validate_weight(
    n_dim: u32,
    exps: &CouplingExponents,
    weight: &CouplingWeight,
) -> WeightReport {
    let nd = f64::from(n_dim);
    let mut notes = Vec::new();
    let integrable = match exps.regime {
        CouplingRegime::Subcritical => {
            // Integrand ~ r^(N-1+Pp+sigma(P-1)) at 0: always integrable.
            // Integrand ~ r^(N-1+sigma(P-1)-Pq) at infinity: need
            // P q > N + sigma (P - 1).
            let needed = (nd + exps.sigma * (exps.holder - 1.0)) / exps.holder;
            let ok = weight.q > needed;
            if !ok {
                notes.push(format!(
                    "weight decays too slowly: the comparison integral needs \
                     h_q > {needed:.6}, got h_q = {}",
                    weight.q
                ));
            }
            ok
        }
        CouplingRegime::Critical => {
            // The comparison degenerates to a sup-norm of h/r^sigma, which
            // is bounded for the family (rises like r^p near 0, decays like
            // r^-q at infinity).
            notes.push(
                "critical coupling: the comparison uses the sup-norm of h/r^sigma, \
                 finite for this family"
                    .to_string(),
            );
            true
        }
    };
    let sigma_below_two = exps.sigma < 2.0;
    if !sigma_below_two {
        notes.push(format!(
            "sigma = {:.6} >= 2 violates the weight-class hypothesis; \
             small-coupling thresholds are unreliable for these parameters",
            exps.sigma
        ));
    }
    notes.push(format!(
        "h rises like r^{:.6} near the origin, so it is not radially \
         non-increasing; recorded for information only",
        exps.sigma + weight.p
    ));
    WeightReport {
        vanishes_at_origin: true,
        vanishes_at_infinity: true,
        integrable,
        sigma_below_two,
        monotone_nonincreasing: false,
        notes,
    }
}

/// Threshold of the scalar comparison function
/// `f(x) = cu x^(2/crit1) + cv x^(2/crit2) - (cu + cv) x - cm nu x^e`,
/// `e = alpha/crit1 + beta/crit2`: returns the infimum of
/// `{x > 0 : f(x) < 0}`, i.e. the largest ray `(0, x]` on which the
/// decoupled side still dominates.
///
/// `f` is positive near 0 (the coupling exponent `e` beats the smallest
/// concave power because `alpha, beta > 1`) and eventually negative (the
/// linear term dominates), so a sign change always exists; it is located by
/// a geometric scan over `(1e-12, 1e6]` refined by bisection to an absolute
/// width of `1e-12`. The returned point is never inside the set; everything
/// above it by more than the bisection width (within the scan bracket) is.
/// Returns infinity if no sign change is found on the window.
#[allow(clippy::too_many_arguments)]
pub fn sigma_inf(
    coef_u: f64,
    coef_v: f64,
    coef_mix: f64,
    crit1: f64,
    crit2: f64,
    alpha: f64,
    beta: f64,
    nu: f64,
) -> Result<f64, ParamError> {
    for (name, value) in [
        ("coef_u", coef_u),
        ("coef_v", coef_v),
        ("coef_mix", coef_mix),
    ] {
        if !(value > 0.0) || !value.is_finite() {
            return Err(ParamError::NotPositive { name, value });
        }
    }
    for (name, value) in [("crit1", crit1), ("crit2", crit2)] {
        if !(value > 2.0) {
            return Err(ParamError::ExponentNotAboveTwo { name, value });
        }
    }
    for (name, value) in [("alpha", alpha), ("beta", beta)] {
        if !(value > 1.0) {
            return Err(ParamError::CouplingPowerTooSmall { name, value });
        }
    }
    if nu < 0.0 {
        return Err(ParamError::Negative {
            name: "nu",
            value: nu,
        });
    }
    let a = 2.0 / crit1;
    let b = 2.0 / crit2;
    let e = alpha / crit1 + beta / crit2;
    let f = |x: f64| {
        coef_u * x.powf(a) + coef_v * x.powf(b) - (coef_u + coef_v) * x - coef_mix * nu * x.powf(e)
    };

    const SCAN_LO: f64 = 1e-12;
    const SCAN_HI: f64 = 1e6;
    const SCAN_POINTS: usize = 4000;
    let ratio = (SCAN_HI / SCAN_LO).ln() / (SCAN_POINTS - 1) as f64;
    let mut lo = f64::NAN;
    let mut hi = f64::NAN;
    let mut prev = SCAN_LO;
    for k in 0..SCAN_POINTS {
        let x = SCAN_LO * (ratio * k as f64).exp();
        if f(x) <= 0.0 {
            if k == 0 {
                // Extremely strong coupling: the set reaches below the scan
                // window. The comparison function is still positive for
                // sufficiently small x, so bisect down from here.
                prev = 1e-300;
                if f(prev) <= 0.0 {
                    return Ok(0.0);
                }
            }
            lo = prev;
            hi = x;
            break;
        }
        prev = x;
    }
    if !lo.is_finite() {
        return Ok(f64::INFINITY);
    }
    for _ in 0..300 {
        if hi - lo <= 1e-12 {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if f(mid) <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(lo)
}

/// Complete, validated parameter set of the coupled system.
#[derive(Debug, Clone)]
pub struct SystemParams {
    pub n_dim: u32,
    pub lambda1: f64,
    pub lambda2: f64,
    pub s1: f64,
    pub s2: f64,
    pub s3: f64,
    pub alpha: f64,
    pub beta: f64,
    /// Coupling strength; `0` is allowed (decoupled system) so that sweeps
    /// can include the baseline row.
    pub nu: f64,
    pub weight: CouplingWeight,
    exps: CouplingExponents,
}

impl SystemParams {
    /// Validate every hypothesis the variational setup needs: `N >= 3`,
    /// `0 < lambda_i < (N-2)^2/4`, `s_i` in `(0, 2)`, `alpha, beta > 1`,
    /// power sum at most 1, nonnegative leftover singularity, `nu >= 0`.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        n_dim: u32,
        lambda1: f64,
        lambda2: f64,
        s1: f64,
        s2: f64,
        s3: f64,
        alpha: f64,
        beta: f64,
        nu: f64,
        weight: CouplingWeight,
    ) -> Result<Self, ParamError> {
        for (name, value) in [
            ("lambda1", lambda1),
            ("lambda2", lambda2),
            ("s1", s1),
            ("s2", s2),
            ("s3", s3),
        ] {
            if !(value > 0.0) {
                return Err(ParamError::NotPositive { name, value });
            }
        }
        check_lambda(n_dim, lambda1)?;
        check_lambda(n_dim, lambda2)?;
        if nu < 0.0 || !nu.is_finite() {
            return Err(ParamError::Negative {
                name: "nu",
                value: nu,
            });
        }
        let exps = coupling_exponents(n_dim, s1, s2, s3, alpha, beta)?;
        Ok(Self {
            n_dim,
            lambda1,
            lambda2,
            s1,
            s2,
            s3,
            alpha,
            beta,
            nu,
            weight,
            exps,
        })
    }

    /// The derived coupling exponents (cached at construction).
    pub fn exponents(&self) -> &CouplingExponents {
        &self.exps
    }

    /// Same parameters with a different coupling strength.
    pub fn with_nu(&self, nu: f64) -> Result<Self, ParamError> {
        Self::new(
            self.n_dim,
            self.lambda1,
            self.lambda2,
            self.s1,
            self.s2,
            self.s3,
            self.alpha,
            self.beta,
            nu,
            self.weight,
        )
    }

    /// Least energy levels `(c1, c2)` of the two decoupled scalar problems.
    pub fn semitrivial_levels(&self) -> Result<(f64, f64), ParamError> {
        Ok((
            critical_level(self.n_dim, self.lambda1, self.s1)?,
            critical_level(self.n_dim, self.lambda2, self.s2)?,
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel_err(got: f64, want: f64) -> f64 {
        (got - want).abs() / want.abs()
    }

    #[test]
    fn hardy_constant_values() {
        assert_eq!(hardy_constant(3).unwrap(), 0.25);
        assert_eq!(hardy_constant(4).unwrap(), 1.0);
        assert_eq!(hardy_constant(10).unwrap(), 16.0);
        assert!(matches!(
            hardy_constant(2),
            Err(ParamError::DimensionTooSmall(2))
        ));
    }

    #[test]
    fn critical_exponent_values() {
        assert_eq!(critical_exponent(3, 0.0).unwrap(), 6.0);
        assert_eq!(critical_exponent(3, 1.0).unwrap(), 4.0);
        assert_eq!(critical_exponent(4, 1.0).unwrap(), 3.0);
        assert!(critical_exponent(4, 2.0).is_err());
        assert!(critical_exponent(4, -0.1).is_err());
    }

    #[test]
    fn origin_rate_values() {
        // At lambda = 0 the rate vanishes and the profile is bounded at 0.
        assert_eq!(origin_rate(4, 0.0).unwrap(), 0.0);
        // sqrt(1) - sqrt(1 - 0.75) = 0.5.
        assert!((origin_rate(4, 0.75).unwrap() - 0.5).abs() < 1e-15);
        assert!(origin_rate(4, 1.0).is_err()); // at the Hardy threshold
    }

    #[test]
    fn profile_canonical_value() {
        // N=4, lambda=0, s=1: amplitude = 2*1*3/1 = 6, origin rate 0,
        // z(1) = 6 / (1+1)^2 = 1.5 (direct evaluation of the closed form,
        // confirmed independently by substituting into the radial equation).
        let p = ProfileParams::new(4, 0.0, 1.0, 1.0).unwrap();
        assert!((p.amplitude - 6.0).abs() < 1e-15);
        assert!(rel_err(p.eval(1.0).unwrap(), 1.5) < 1e-14);
        // Scaling: z_mu(r) = mu^(-1) z(r/mu) at N=4.
        let p2 = ProfileParams::new(4, 0.0, 1.0, 2.0).unwrap();
        assert!(rel_err(p2.eval(2.0).unwrap(), 0.5 * 1.5) < 1e-14);
        assert!(p.eval(0.0).is_err());
        assert!(p.eval(-1.0).is_err());
    }

    #[test]
    fn profile_positive_and_decreasing_for_positive_lambda() {
        let p = ProfileParams::new(3, 0.1, 0.5, 1.0).unwrap();
        let mut prev = f64::INFINITY;
        for k in 0..200 {
            let r = 1e-8 * 10f64.powf(16.0 * k as f64 / 199.0);
            let z = p.eval(r).unwrap();
            assert!(z > 0.0);
            assert!(z < prev);
            prev = z;
        }
    }

    #[test]
    fn sphere_area_values() {
        // 4 pi in R^3, 2 pi^2 in R^4.
        assert!(rel_err(sphere_area(3).unwrap(), 4.0 * PI) < 1e-14);
        assert!(rel_err(sphere_area(4).unwrap(), 2.0 * PI * PI) < 1e-14);
    }

    #[test]
    fn best_constant_classical_values() {
        // Classical Sobolev constant in R^3: 3 pi (sqrt(pi)/4)^(2/3).
        let want3 = 3.0 * PI * (PI.sqrt() / 4.0).powf(2.0 / 3.0);
        assert!(rel_err(best_constant(3, 0.0, 0.0).unwrap(), want3) < 1e-12);
        assert!(rel_err(best_constant(3, 0.0, 0.0).unwrap(), 5.477904089531332) < 1e-13);
        // N=4, s=1: 6 (pi^2/15)^(1/3).
        let want41 = 6.0 * (PI * PI / 15.0).powf(1.0 / 3.0);
        assert!(rel_err(best_constant(4, 0.0, 1.0).unwrap(), want41) < 1e-12);
        assert!(rel_err(best_constant(4, 0.0, 1.0).unwrap(), 5.218600831868914) < 1e-13);
        // Hardy-shift identity at s=0 (frozen sample).
        assert!(rel_err(best_constant(3, 0.1875, 0.0).unwrap(), 2.173907678575735) < 1e-13);
        assert!(best_constant(3, 0.25, 0.0).is_err());
    }

    #[test]
    fn critical_level_values() {
        // N=4, lambda=0, s=1: (1/6) S^3 = 12 pi^2 / 5.
        let want = 12.0 * PI * PI / 5.0;
        assert!(rel_err(critical_level(4, 0.0, 1.0).unwrap(), want) < 1e-12);
        assert!(rel_err(critical_level(4, 0.0, 1.0).unwrap(), 23.687050562614445) < 1e-13);
        // Level drops to zero as lambda approaches the Hardy constant.
        let near = critical_level(3, 0.25 - 1e-9, 0.5).unwrap();
        assert!(near < 1e-3);
        // And is strictly decreasing in lambda.
        let l1 = critical_level(3, 0.05, 0.5).unwrap();
        let l2 = critical_level(3, 0.10, 0.5).unwrap();
        assert!(l2 < l1);
    }

    #[test]
    fn coupling_exponents_worked_example() {
        // N=4: crit1 = 3, crit2 = 3.5; alpha/crit1 + beta/crit2 = 0.8;
        // tau = 0.9 - (1*1.2/3 + 0.5*1.4/3.5) = 0.3; holder = 5; sigma = 1.5.
        let e = coupling_exponents(4, 1.0, 0.5, 0.9, 1.2, 1.4).unwrap();
        assert!((e.crit1 - 3.0).abs() < 1e-15);
        assert!((e.crit2 - 3.5).abs() < 1e-15);
        assert!((e.power_sum - 0.8).abs() < 1e-15);
        assert_eq!(e.regime, CouplingRegime::Subcritical);
        assert!((e.tau - 0.3).abs() < 1e-14);
        assert!((e.holder - 5.0).abs() < 1e-12);
        assert!((e.sigma - 1.5).abs() < 1e-12);
    }

    #[test]
    fn coupling_exponents_critical_and_edge_cases() {
        // alpha/3 + beta/3 = 1 exactly: critical regime, infinite Hölder
        // exponent, sigma stored as the raw tau.
        let e = coupling_exponents(4, 1.0, 1.0, 1.0, 1.5, 1.5).unwrap();
        assert_eq!(e.regime, CouplingRegime::Critical);
        assert!(e.holder.is_infinite());
        assert!((e.tau - 0.0).abs() < 1e-15);
        assert_eq!(e.sigma, e.tau);

        // s3 equal to the balance point gives tau = 0 exactly.
        let e = coupling_exponents(4, 1.0, 0.5, 0.6, 1.2, 1.4).unwrap();
        assert_eq!(e.tau, 0.0);

        // Supercritical power sum is rejected, naming the inequality.
        let err = coupling_exponents(4, 1.0, 1.0, 1.0, 2.2, 2.2).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("alpha/2*_{s1} + beta/2*_{s2} <= 1"), "{msg}");

        // s3 below the balance point is rejected.
        assert!(matches!(
            coupling_exponents(4, 1.0, 0.5, 0.5, 1.2, 1.4),
            Err(ParamError::CouplingSingularityTooWeak { .. })
        ));
    }

    #[test]
    fn weight_family_shape() {
        let w = CouplingWeight::new(1.0, 1.0, 5.0).unwrap();
        assert_eq!(w.eval(0.5, 0.0), 0.0);
        assert!(w.eval(0.5, 1e9) < 1e-20);
        assert!(w.eval(0.5, 1.0) > 0.0);
        assert!(CouplingWeight::new(0.0, 1.0, 1.0).is_err());
        assert!(CouplingWeight::new(1.0, -1.0, 1.0).is_err());
    }

    #[test]
    fn weight_validation() {
        let e = coupling_exponents(4, 1.0, 0.5, 0.9, 1.2, 1.4).unwrap();
        // holder = 5, sigma = 1.5, N = 4: need q > (4 + 1.5*4)/5 = 2.
        let ok = validate_weight(4, &e, &CouplingWeight::new(1.0, 1.0, 5.0).unwrap());
        assert!(ok.integrable && ok.admissible());
        let slow = validate_weight(4, &e, &CouplingWeight::new(1.0, 1.0, 0.5).unwrap());
        assert!(!slow.integrable && !slow.admissible());
        // The family is never radially non-increasing; reported, not fatal.
        assert!(!ok.monotone_nonincreasing);
        assert!(ok.vanishes_at_origin && ok.vanishes_at_infinity);

        // Critical regime: only boundedness is required, which always holds.
        let ec = coupling_exponents(4, 1.0, 1.0, 1.0, 1.5, 1.5).unwrap();
        let rc = validate_weight(4, &ec, &CouplingWeight::new(1.0, 1.0, 1.0).unwrap());
        assert!(rc.integrable);
    }

    #[test]
    fn sigma_inf_closed_form_family() {
        // cu = cv = cm = 1, crit = 3 on both sides, alpha = beta = 1.5:
        // the comparison reduces to 2 x^(2/3) < (2 + nu) x, whose threshold
        // is (2/(2+nu))^3.
        for nu in [1e-3, 1e-2, 1e-1, 1.0] {
            let got = sigma_inf(1.0, 1.0, 1.0, 3.0, 3.0, 1.5, 1.5, nu).unwrap();
            let want = (2.0 / (2.0 + nu)).powi(3);
            assert!(
                (got - want).abs() < 1e-10,
                "nu={nu}: got {got}, want {want}"
            );
        }
        // Decoupled limit: threshold exactly 1, approached monotonically
        // from below as nu decreases.
        let at_zero = sigma_inf(2.0, 3.0, 1.0, 3.0, 3.5, 1.2, 1.4, 0.0).unwrap();
        assert!((at_zero - 1.0).abs() < 1e-10);
        let mut prev = 0.0;
        for k in 1..=6 {
            let nu = 10f64.powi(-k);
            let v = sigma_inf(1.0, 1.0, 1.0, 3.0, 3.0, 1.5, 1.5, nu).unwrap();
            assert!(v > prev && v < 1.0);
            prev = v;
        }
        assert!((prev - 1.0).abs() < 1e-4);
    }

    #[test]
    fn sigma_inf_matches_frozen_scan_brackets() {
        // Brackets from a 10^7-point geometric scan over (1e-12, 1e6],
        // computed once with an independent implementation and frozen:
        // [largest x with f >= 0, smallest x with f < 0].
        let cases = [
            (1.3, 0.8, 2.0, 3.0, 3.5, 1.2, 1.4, 0.25, 5.232882364378506e-1, 5.232904052908097e-1),
            (0.7, 1.9, 1.1, 4.0, 5.0, 1.6, 2.0, 0.6, 6.534196362147228e-1, 6.534223444183721e-1),
            (1.0, 1.0, 1.0, 3.0, 3.0, 1.5, 1.5, 0.1, 8.638357901856871e-1, 8.638393704932104e-1),
            (
                2.5,
                0.4,
                0.9,
                10.0 / 3.0,
                8.0 / 3.0,
                1.3,
                1.1,
                2.0,
                1.979356080873516e-1,
                1.979364284635783e-1,
            ),
        ];
        for (cu, cv, cm, p1, p2, al, be, nu, lo, hi) in cases {
            let got = sigma_inf(cu, cv, cm, p1, p2, al, be, nu).unwrap();
            assert!(
                (lo - 1e-10..=hi + 1e-10).contains(&got),
                "sigma_inf({cu},{cv},{cm},{p1},{p2},{al},{be},{nu}) = {got} \
                 outside scan bracket [{lo}, {hi}]"
            );
        }
    }

    #[test]
    fn sigma_inf_rejects_bad_inputs() {
        assert!(sigma_inf(0.0, 1.0, 1.0, 3.0, 3.0, 1.5, 1.5, 0.1).is_err());
        assert!(sigma_inf(1.0, 1.0, 1.0, 2.0, 3.0, 1.5, 1.5, 0.1).is_err());
        assert!(sigma_inf(1.0, 1.0, 1.0, 3.0, 3.0, 1.0, 1.5, 0.1).is_err());
        assert!(sigma_inf(1.0, 1.0, 1.0, 3.0, 3.0, 1.5, 1.5, -0.1).is_err());
    }

    #[test]
    fn system_params_validation() {
        let w = CouplingWeight::new(1.0, 1.0, 6.0).unwrap();
        let p = SystemParams::new(4, 0.5, 0.5, 1.0, 1.0, 1.0, 1.4, 1.4, 10.0, w).unwrap();
        assert_eq!(p.exponents().regime, CouplingRegime::Subcritical);
        let (c1, c2) = p.semitrivial_levels().unwrap();
        assert!((c1 - c2).abs() < 1e-15); // identical scalar problems

        // The system (unlike the scalar formulas) requires lambda > 0.
        assert!(SystemParams::new(4, 0.0, 0.5, 1.0, 1.0, 1.0, 1.4, 1.4, 1.0, w).is_err());
        // Supercritical powers are rejected with the named inequality.
        let err =
            SystemParams::new(4, 0.5, 0.5, 1.0, 1.0, 1.0, 2.2, 2.2, 1.0, w).unwrap_err();
        assert!(err.to_string().contains("alpha/2*_{s1} + beta/2*_{s2} <= 1"));
        // Negative coupling strength is rejected.
        assert!(SystemParams::new(4, 0.5, 0.5, 1.0, 1.0, 1.0, 1.4, 1.4, -1.0, w).is_err());
    }

    #[test]
    fn best_constant_monotone_and_limit() {
        // Strict decrease in lambda and s on a 10x10 grid, both dimensions.
        for n in [3u32, 4] {
            let l = hardy_constant(n).unwrap();
            let lambdas: Vec<f64> = (1..=10).map(|k| 0.09 * k as f64 * l).collect();
            let orders: Vec<f64> = (0..10).map(|k| 0.1 + 0.2 * k as f64).collect();
            for (i, &lam) in lambdas.iter().enumerate() {
                for (j, &s) in orders.iter().enumerate() {
                    let v = best_constant(n, lam, s).unwrap();
                    if i > 0 {
                        assert!(v < best_constant(n, lambdas[i - 1], s).unwrap());
                    }
                    if j > 0 {
                        assert!(v < best_constant(n, lam, orders[j - 1]).unwrap());
                    }
                }
            }
        }
        // s -> 2 limit equals the Hardy constant (N = 3).
        let l3 = hardy_constant(3).unwrap();
        let mut prev = f64::INFINITY;
        for k in 2..=8 {
            let v = best_constant(3, 0.0, 2.0 - 10f64.powi(-k)).unwrap();
            assert!(v < prev);
            prev = v;
        }
        assert!(rel_err(prev, l3) < 0.02);
    }
}
