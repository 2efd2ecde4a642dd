//! Finite-time LIL confidence radii and the parameter maps built on them.
//!
//! Every radius here is a bound on the deviation of an empirical mean of `t`
//! samples from a sigma-sub-Gaussian distribution. Logs are natural.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which inner logarithm the radius uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum BoundVariant {
    /// `log(log((1+eps) t) / delta)`; needs `eps > 0` and `delta < log(1+eps)/e`.
    Strict,
    /// `log(log((1+eps) t + 2) / delta)`; defined for every `delta` in `(0, 1)` and `eps >= 0`.
    #[default]
    PlusTwo,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LilParams {
    pub eps: f64,
    pub delta: f64,
    pub scale: f64,
    #[serde(default)]
    pub variant: BoundVariant,
}

impl LilParams {
    pub fn new(eps: f64, delta: f64, scale: f64, variant: BoundVariant) -> Self {
        Self { eps, delta, scale, variant }
    }

    /// Largest admissible `delta` for the strict variant: `log(1+eps)/e`.
    pub fn strict_delta_limit(eps: f64) -> f64 {
        eps.ln_1p() / std::f64::consts::E
    }

    pub fn validate(&self) -> Result<()> {
        validate_params(self)
    }

    /// Radius without validation. Callers must have validated `self` and `t >= 1`.
    #[inline]
    pub(crate) fn radius_unchecked(&self, t: u64) -> f64 {
        let t = t as f64;
        let grown = (1.0 + self.eps) * t;
        let inner = match self.variant {
            BoundVariant::Strict => grown.ln(),
            BoundVariant::PlusTwo => (grown + 2.0).ln(),
        };
        let log_term = (inner / self.delta).ln();
        (1.0 + self.eps.sqrt())
            * (2.0 * self.scale * self.scale * (1.0 + self.eps) * log_term / t).sqrt()
    }
}

/// Reports the first invariant `p` violates, if any.
pub fn validate_params(p: &LilParams) -> Result<()> {
    if !(p.scale.is_finite() && p.scale > 0.0) {
        return Err(Error::InvalidParams(format!("scale = {} must be positive", p.scale)));
    }
    if !(p.eps.is_finite() && p.eps >= 0.0) {
        return Err(Error::InvalidParams(format!("eps = {} must be >= 0", p.eps)));
    }
    if !(p.delta > 0.0 && p.delta < 1.0) {
        return Err(Error::InvalidParams(format!("delta = {} must lie in (0, 1)", p.delta)));
    }
    if p.variant == BoundVariant::Strict {
        if p.eps <= 0.0 {
            return Err(Error::InvalidParams("strict bound needs eps > 0".into()));
        }
        let limit = LilParams::strict_delta_limit(p.eps);
        if p.delta >= limit {
            return Err(Error::InvalidParams(format!(
                "strict bound needs delta in (0, {limit:.5}) at eps = {}, got {}",
                p.eps, p.delta
            )));
        }
    }
    Ok(())
}

fn check_count(t: u64) -> Result<()> {
    if t == 0 {
        return Err(Error::InvalidParams("sample count must be >= 1".into()));
    }
    Ok(())
}

/// Deviation radius of an empirical mean after `t` samples:
/// `(1+sqrt(eps)) * sqrt(2 sigma^2 (1+eps) log(log((1+eps) t) / delta) / t)`,
/// with `+2` inside the inner log for [`BoundVariant::PlusTwo`].
#[allow(clippy::neg_cmp_op_on_partial_ord)] // NaN must be rejected too
pub fn lil_radius(t: u64, p: &LilParams) -> Result<f64> {
    check_count(t)?;
    p.validate()?;
    if p.variant == BoundVariant::Strict {
        let inner = ((1.0 + p.eps) * t as f64).ln();
        if !(inner / p.delta > 1.0) {
            return Err(Error::InvalidParams(format!(
                "log log term undefined at t = {t}, eps = {}, delta = {}",
                p.eps, p.delta
            )));
        }
    }
    Ok(p.radius_unchecked(t))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UcbParams {
    pub lil: LilParams,
    pub beta: f64,
    pub a: f64,
}

impl UcbParams {
    pub fn validate(&self) -> Result<()> {
        self.lil.validate()?;
        if !(self.beta.is_finite() && self.beta > 0.0) {
            return Err(Error::InvalidParams(format!("beta = {} must be positive", self.beta)));
        }
        if !(self.a.is_finite() && self.a > 0.0) {
            return Err(Error::InvalidParams(format!("a = {} must be positive", self.a)));
        }
        Ok(())
    }

    #[inline]
    pub(crate) fn index_unchecked(&self, mean: f64, t: u64) -> f64 {
        mean + (1.0 + self.beta) * self.lil.radius_unchecked(t)
    }
}

/// `mean + (1 + beta) * lil_radius(t)`.
pub fn ucb_index(mean: f64, t: u64, up: &UcbParams) -> Result<f64> {
    if !(up.beta.is_finite() && up.beta >= 0.0) {
        return Err(Error::InvalidParams(format!("beta = {} must be >= 0", up.beta)));
    }
    Ok(mean + (1.0 + up.beta) * lil_radius(t, &up.lil)?)
}

/// Radius used by the LIL stopping rule, union-bounded over `n` arms.
/// Always uses the `+2` inner log; `p.variant` is ignored.
pub fn ls_radius(t: u64, n: usize, p: &LilParams) -> Result<f64> {
    check_count(t)?;
    if n < 2 {
        return Err(Error::InvalidParams(format!("stopping rule needs n >= 2 arms, got {n}")));
    }
    LilParams { variant: BoundVariant::PlusTwo, ..*p }.validate()?;
    Ok(ls_radius_unchecked(t, n, p))
}

#[inline]
pub(crate) fn ls_radius_unchecked(t: u64, n: usize, p: &LilParams) -> f64 {
    let tf = t as f64;
    let inner = ((1.0 + p.eps) * tf + 2.0).ln();
    let log_term = (2.0 * n as f64 * inner / p.delta).ln();
    (1.0 + p.eps.sqrt()) * (2.0 * p.scale * p.scale * (1.0 + p.eps) * log_term / tf).sqrt()
}

/// `rho(eps) = (2+eps)/eps * (1/log(1+eps))^(1+eps)`.
pub fn rho(eps: f64) -> Result<f64> {
    if !(eps.is_finite() && eps > 0.0) {
        return Err(Error::InvalidParams(format!("rho needs eps > 0, got {eps}")));
    }
    Ok((2.0 + eps) / eps * (1.0 / eps.ln_1p()).powf(1.0 + eps))
}

/// Failure probability of the finite LIL bound for one walk:
/// `(2+eps)/eps * (delta / log(1+eps))^(1+eps)`.
pub fn lil_failure_probability(eps: f64, delta: f64) -> Result<f64> {
    LilParams::new(eps, delta, 1.0, BoundVariant::Strict).validate()?;
    Ok((2.0 + eps) / eps * (delta / eps.ln_1p()).powf(1.0 + eps))
}

/// Smallest stopping parameter `a` for which lil'UCB's guarantee holds at
/// confidence `delta` and exploration `beta`.
#[allow(clippy::neg_cmp_op_on_partial_ord)] // NaN must be rejected too
pub fn min_exploration_a(delta: f64, beta: f64) -> Result<f64> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidParams(format!("delta = {delta} must lie in (0, 1)")));
    }
    if !(beta.is_finite() && beta > 0.0) {
        return Err(Error::InvalidParams(format!("beta = {beta} must be positive")));
    }
    let ratio = ((2.0 + beta) / beta).powi(2);
    let log_inv = (1.0 / delta).ln();
    let denom = 1.0 - delta - (delta.sqrt() * log_inv).sqrt();
    if !(denom > 0.0) {
        return Err(Error::Infeasible(format!(
            "no admissible a at delta = {delta}: denominator {denom:.4} <= 0"
        )));
    }
    let numer = 1.0 + (2.0 * (ratio / delta).ln()).ln() / log_inv;
    Ok(numer / denom * ratio)
}

/// Overall failure probability of lil'UCB: `sqrt(rho delta) + 4 rho delta / (1 - rho delta)`.
pub fn theorem_failure_bound(delta: f64, eps: f64) -> Result<f64> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidParams(format!("delta = {delta} must lie in (0, 1)")));
    }
    let rd = rho(eps)? * delta;
    if rd >= 1.0 {
        return Err(Error::VacuousBound { rho_delta: rd });
    }
    Ok(rd.sqrt() + 4.0 * rd / (1.0 - rd))
}

fn check_nu(nu: f64) -> Result<()> {
    if !(nu > 0.0 && nu < 1.0) {
        return Err(Error::InvalidParams(format!("input confidence nu = {nu} must lie in (0, 1)")));
    }
    Ok(())
}

/// Confidence handed to lil'UCB with theory parameters for input confidence `nu`:
/// `(nu eps / (5 (2 + eps)))^(1 / (1 + eps))`.
pub fn map_confidence_theory(nu: f64, eps: f64) -> Result<f64> {
    check_nu(nu)?;
    if !(eps.is_finite() && eps > 0.0) {
        return Err(Error::InvalidParams(format!("eps = {eps} must be positive")));
    }
    Ok((nu * eps / (5.0 * (2.0 + eps))).powf(1.0 / (1.0 + eps)))
}

/// Confidence handed to the heuristic lil'UCB preset: `nu / 5`.
pub fn map_confidence_heuristic(nu: f64) -> Result<f64> {
    check_nu(nu)?;
    Ok(nu / 5.0)
}
