//! Small-expiry asymptotics: the leading excess `tau * I`, the predicted
//! implied-volatility explosion profile, and the structural regime
//! classifier (flat smile, explosion, or degenerate zero).

use std::fmt;

use crate::error::{Error, Result};
use crate::implied_vol::iv_limit_value;
use crate::models::{Activity, ModelSpec, Support, Variation};
use crate::quadrature::{slope_call, slope_put, SlopeEstimate};

/// Small-expiry regime of the implied volatility at a fixed strike.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RegimeTag {
    /// Triplet (0, 0, 0): constant stock, zero smile.
    TrivialZero,
    /// No jumps, positive Gaussian part: flat smile at `sigma`.
    BlackScholesFinite { sigma: f64 },
    /// Positive moneyness-relevant slope: implied volatility explodes like
    /// `|ln(K/S0)| / sqrt(-2 tau ln(tau I))`.
    Explosion { slope: f64 },
    /// One-sided finite-variation jumps with the strike outside the
    /// reachable support: price pinned at intrinsic, zero smile.
    DegenerateZero,
    /// Excess is o(tau); no implied-volatility limit is claimed.
    InconclusiveOTau,
}

impl fmt::Display for RegimeTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RegimeTag::TrivialZero => write!(f, "trivial-zero"),
            RegimeTag::BlackScholesFinite { sigma } => {
                write!(f, "black-scholes-finite({sigma})")
            }
            RegimeTag::Explosion { slope } => write!(f, "explosion({slope})"),
            RegimeTag::DegenerateZero => write!(f, "degenerate-zero"),
            RegimeTag::InconclusiveOTau => write!(f, "inconclusive-o-tau"),
        }
    }
}

/// Quantities the classifier actually inspected.
#[derive(Debug, Clone, Copy)]
pub struct Evidence {
    /// Gaussian coefficient of the triplet.
    pub sigma: f64,
    /// Drift of the zero-truncation representation, when defined; bounds the
    /// support of `X_tau` for one-sided jump measures.
    pub natural_drift: Option<f64>,
    pub support: Support,
    /// The moneyness-relevant slope (`I_c` out-of-the-money, `I_p` in).
    pub slope: SlopeEstimate,
    /// log-moneyness ln(K/S0)
    pub k: f64,
}

/// Classifier verdict: exactly one tag, plus its evidence.
#[derive(Debug, Clone, Copy)]
pub struct Regime {
    pub tag: RegimeTag,
    pub evidence: Evidence,
}

/// The moneyness-relevant slope: `I_c` for `K > S0`, `I_p` for `K < S0`.
/// Always finite: the relevant integrand vanishes near the origin.
fn relevant_slope(model: &ModelSpec, s0: f64, strike: f64) -> Result<SlopeEstimate> {
    if strike > s0 {
        slope_call(model, s0, strike)
    } else {
        slope_put(model, s0, strike)
    }
}

/// Leading small-expiry excess over intrinsic: `tau * I_c` out-of-the-money,
/// `tau * I_p` in-the-money.
pub fn asymptotic_excess(model: &ModelSpec, s0: f64, strike: f64, tau: f64) -> Result<f64> {
    if !(tau > 0.0) {
        return Err(Error::Domain(format!("need tau > 0, got {tau}")));
    }
    Ok(tau * relevant_slope(model, s0, strike)?.value)
}

/// Predicted implied volatility near expiry when the relevant slope is
/// positive: `|ln(K/S0)| / sqrt(-2 tau ln(tau I))`.
pub fn predicted_iv(model: &ModelSpec, s0: f64, strike: f64, tau: f64) -> Result<f64> {
    if !(tau > 0.0) {
        return Err(Error::Domain(format!("need tau > 0, got {tau}")));
    }
    let slope = relevant_slope(model, s0, strike)?;
    if slope.value <= 0.0 {
        return Err(Error::NotApplicable(
            "relevant slope is zero; no explosion profile applies".into(),
        ));
    }
    let excess = tau * slope.value;
    if excess >= 1.0 {
        return Err(Error::Domain(format!(
            "tau * I = {excess} >= 1: asymptotic formula regime invalid"
        )));
    }
    iv_limit_value(excess, s0, strike, tau)
}

/// Structural regime classification at horizon `tau_ref` (used only by the
/// degenerate support test; default 1).
///
/// Decided from model structure — Gaussian coefficient, support side,
/// variation, slopes — never from sampled prices.
pub fn classify(model: &ModelSpec, s0: f64, strike: f64, tau_ref: f64) -> Result<Regime> {
    model.validate().map_err(Error::InvalidModel)?;
    if !(tau_ref > 0.0) {
        return Err(Error::Domain(format!("need tau_ref > 0, got {tau_ref}")));
    }
    let sigma = model.gaussian_sigma();
    let support = model.support();
    let natural_drift = model.natural_drift();
    let slope = relevant_slope(model, s0, strike)?; // also rejects K = S0
    let k = (strike / s0).ln();
    let evidence = Evidence {
        sigma,
        natural_drift,
        support,
        slope,
        k,
    };
    let tag = if matches!(support, Support::Empty) {
        if sigma == 0.0 {
            RegimeTag::TrivialZero
        } else {
            RegimeTag::BlackScholesFinite { sigma }
        }
    } else if slope.value > 0.0 {
        RegimeTag::Explosion { slope: slope.value }
    } else if is_degenerate_zero(model, k, tau_ref) {
        RegimeTag::DegenerateZero
    } else {
        RegimeTag::InconclusiveOTau
    };
    Ok(Regime { tag, evidence })
}

/// The degenerate support test: sigma = 0, jump measure of finite variation,
/// infinite activity or (finite activity with 0 in the support closure),
/// one-sided jumps, and the strike on the unreachable side of the natural
/// drift at horizon `tau_ref`.
fn is_degenerate_zero(model: &ModelSpec, k: f64, tau_ref: f64) -> bool {
    if model.gaussian_sigma() != 0.0 {
        return false;
    }
    let triplet = match model.triplet() {
        Ok(t) => t,
        Err(_) => return false,
    };
    if triplet.variation != Variation::Finite {
        return false;
    }
    // our finite-activity densities are positive on their whole support
    // side, so 0 is always in the support closure; infinite activity
    // qualifies outright
    let activity_ok = match triplet.activity {
        Activity::Infinite => true,
        Activity::Finite { lambda } => lambda > 0.0,
    };
    if !activity_ok {
        return false;
    }
    let b0 = match model.natural_drift() {
        Some(b) => b,
        None => return false,
    };
    match triplet.support {
        Support::PositiveOnly => k < b0 * tau_ref,
        Support::NegativeOnly => k > b0 * tau_ref,
        _ => false,
    }
}
