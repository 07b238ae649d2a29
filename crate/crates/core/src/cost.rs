//! Failure and repacking probabilities and the log-survival edge costs built
//! from them.
//!
//! Every cost is `-ln` of a product of survival probabilities, so costs are
//! nonnegative and add along a path. A probability of 1 yields `+∞`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CostError {
    #[error("probability {0} is outside [0, 1]")]
    Probability(f64),
    #[error("{name} must be positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error("offered load must be a nonnegative finite number, got {0}")]
    Load(f64),
}

/// Moments of an element's failure inter-arrival time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FailureStats {
    pub mu_f: f64,
    pub var_f: f64,
}

/// Moments of a lightpath holding time for one source-destination pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HoldingStats {
    pub mu_h: f64,
    pub var_h: f64,
}

/// Chebyshev-type upper bound on the probability that the element fails
/// before the lightpath departs.
///
/// Returns 1 when the element is broken or full, and also when the expected
/// failure time does not exceed the expected holding time.
pub fn tchebycheff_failure_probability(
    fs: FailureStats,
    hs: HoldingStats,
    broken_or_full: bool,
) -> f64 {
    if broken_or_full {
        return 1.0;
    }
    if fs.mu_f.is_infinite() {
        return 0.0;
    }
    let gap = fs.mu_f - hs.mu_h;
    if !(gap > 0.0) {
        return 1.0;
    }
    let g2 = gap * gap;
    let bound = fs.var_f / (2.0 * g2) * (1.0 + 3.0 * hs.var_h / g2);
    bound.clamp(0.0, 1.0)
}

/// Probability that an exponential failure with mean `mu_f` arrives before
/// an exponential holding period with mean `mu_h` ends.
pub fn exact_failure_probability_exponential(mu_f: f64, mu_h: f64) -> Result<f64, CostError> {
    if !(mu_f > 0.0) {
        return Err(CostError::NonPositive {
            name: "mean failure inter-arrival",
            value: mu_f,
        });
    }
    if !(mu_h > 0.0) || mu_h.is_infinite() {
        return Err(CostError::NonPositive {
            name: "mean holding time",
            value: mu_h,
        });
    }
    if mu_f.is_infinite() {
        return Ok(0.0);
    }
    Ok(mu_h / (mu_f + mu_h))
}

fn check_probability(p: f64) -> Result<f64, CostError> {
    if (0.0..=1.0).contains(&p) {
        Ok(p)
    } else {
        Err(CostError::Probability(p))
    }
}

/// `-ln(1 - p)`, `+∞` at `p = 1`.
fn survival_cost(p: f64) -> f64 {
    -(-p).ln_1p()
}

/// `-ln(1 - p)` for a probability `p`.
pub fn element_cost(p: f64) -> Result<f64, CostError> {
    Ok(survival_cost(check_probability(p)?))
}

/// Cost of a link together with its head router:
/// `-ln[(1 - p_link)(1 - q_router)]`.
pub fn combined_link_cost(p_link: f64, q_router: f64) -> Result<f64, CostError> {
    Ok(element_cost(p_link)? + element_cost(q_router)?)
}

/// Erlang-B blocking probability of `n` servers offered `rho` Erlangs.
pub fn erlang_b(n: u32, rho: f64) -> Result<f64, CostError> {
    if !(rho >= 0.0) || rho.is_infinite() {
        return Err(CostError::Load(rho));
    }
    let mut e = 1.0;
    for k in 1..=n {
        e = rho * e / (k as f64 + rho * e);
    }
    Ok(e)
}

/// Probability that a lightpath holding one of `x` busy units out of a pool of
/// `x0` is moved to make room for others.
///
/// Evaluated as `E(x0, ρ) / (x · E(x, ρ))` clamped to `[0, 1]`, which is
/// exactly `1/x` for a full pool, small for lightly used pools, and saturates
/// once `x` exceeds the pool size. The ratio of Erlang-B values is built as a
/// product of recursion steps so it stays finite where both terms underflow.
pub fn repacking_probability(x: u32, x0: u32, rho: f64) -> Result<f64, CostError> {
    if !(rho >= 0.0) || rho.is_infinite() {
        return Err(CostError::Load(rho));
    }
    if x == 0 {
        return Ok(0.0);
    }
    let inv_x = 1.0 / x as f64;
    if x == x0 {
        return Ok(inv_x);
    }
    if rho == 0.0 {
        // limit ρ → 0⁺
        return Ok(if x < x0 { 0.0 } else { 1.0 });
    }
    // E(k)/E(k-1) = ρ / (k + ρ E(k-1))
    let lo = x.min(x0);
    let hi = x.max(x0);
    let mut e = erlang_b(lo, rho)?;
    let mut ratio = 1.0;
    for k in lo + 1..=hi {
        let step = rho / (k as f64 + rho * e);
        ratio *= step;
        e *= step;
    }
    // ratio = E(hi) / E(lo)
    let value = if x < x0 { ratio * inv_x } else { inv_x / ratio };
    Ok(value.clamp(0.0, 1.0))
}

/// Cost of the channel edge at one wavelength on a link in the layered graph.
pub fn spn_channel_edge_cost(f_link: f64, r_link: f64, has_free_channel: bool) -> f64 {
    if !has_free_channel {
        return f64::INFINITY;
    }
    survival_cost(f_link) + survival_cost(r_link)
}

/// Cost of a wavelength-converting edge inside a router.
pub fn spn_converter_edge_cost(
    f_router: f64,
    r_router: f64,
    has_free_converter: bool,
    node_failed: bool,
) -> f64 {
    if node_failed || !has_free_converter {
        return f64::INFINITY;
    }
    survival_cost(f_router) + survival_cost(r_router)
}

/// Cost of passing through a router without changing wavelength.
pub fn spn_passthrough_edge_cost(f_router: f64, node_failed: bool) -> f64 {
    if node_failed {
        return f64::INFINITY;
    }
    survival_cost(f_router)
}

/// How the failure probability of an element is evaluated from its moments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum FailureBound {
    /// Moment-based upper bound, valid for any inter-arrival distribution.
    #[default]
    Tchebycheff,
    /// Exact value assuming exponential failure and holding times.
    Exponential,
}

impl std::str::FromStr for FailureBound {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "tchebycheff" | "chebyshev" => Ok(FailureBound::Tchebycheff),
            "exponential" => Ok(FailureBound::Exponential),
            other => Err(format!("unknown failure bound `{other}`")),
        }
    }
}

impl FailureBound {
    pub fn as_str(self) -> &'static str {
        match self {
            FailureBound::Tchebycheff => "tchebycheff",
            FailureBound::Exponential => "exponential",
        }
    }
}

/// Tunables shared by every cost evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostModel {
    pub failure_bound: FailureBound,
    /// Repacking probabilities above this are treated as certain.
    pub repack_threshold: f64,
}

impl Default for CostModel {
    fn default() -> Self {
        CostModel {
            failure_bound: FailureBound::Tchebycheff,
            repack_threshold: 0.5,
        }
    }
}

impl CostModel {
    pub fn failure_probability(&self, fs: FailureStats, hs: HoldingStats, broken: bool) -> f64 {
        if broken {
            return 1.0;
        }
        match self.failure_bound {
            FailureBound::Tchebycheff => tchebycheff_failure_probability(fs, hs, false),
            FailureBound::Exponential => {
                exact_failure_probability_exponential(fs.mu_f, hs.mu_h).unwrap_or(1.0)
            }
        }
    }

    /// Maps repacking probabilities above the threshold to 1.
    pub fn thresholded(&self, r: f64) -> f64 {
        if r > self.repack_threshold {
            1.0
        } else {
            r
        }
    }

    pub fn channel_edge_cost(&self, f_link: f64, r_link: f64, free: bool) -> f64 {
        spn_channel_edge_cost(f_link, self.thresholded(r_link), free)
    }

    pub fn converter_edge_cost(&self, f: f64, r: f64, free: bool, failed: bool) -> f64 {
        spn_converter_edge_cost(f, self.thresholded(r), free, failed)
    }
}
