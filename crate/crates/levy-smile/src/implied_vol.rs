//! Black-Scholes forward pricing and implied-volatility inversion, plus the
//! small-expiry limit functional `|ln(K/S0)| / sqrt(-2 tau ln(excess))`.

use crate::error::{Error, Result};

/// Standard normal CDF via the complementary error function.
pub fn norm_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

fn norm_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// An implied-volatility solution.
#[derive(Debug, Clone, Copy)]
pub struct IVPoint {
    pub tau: f64,
    /// Implied volatility; 0 exactly when the input price is intrinsic.
    pub sigma: f64,
    pub converged: bool,
    pub iterations: u32,
}

/// Black-Scholes call with zero rates: `S0 Phi(d1) - K Phi(d2)`,
/// `d1 = ln(S0/K)/(theta sqrt(tau)) + theta sqrt(tau)/2`, `d2 = d1 - theta sqrt(tau)`.
/// `theta = 0` returns intrinsic.
pub fn bs_call(s0: f64, strike: f64, tau: f64, theta: f64) -> f64 {
    debug_assert!(s0 > 0.0 && strike > 0.0 && tau > 0.0 && theta >= 0.0);
    if theta == 0.0 {
        return (s0 - strike).max(0.0);
    }
    let v = theta * tau.sqrt();
    let d1 = (s0 / strike).ln() / v + 0.5 * v;
    let d2 = d1 - v;
    s0 * norm_cdf(d1) - strike * norm_cdf(d2)
}

/// Black-Scholes vega `S0 phi(d1) sqrt(tau)`.
pub fn bs_vega(s0: f64, strike: f64, tau: f64, theta: f64) -> f64 {
    if theta == 0.0 {
        return 0.0;
    }
    let v = theta * tau.sqrt();
    let d1 = (s0 / strike).ln() / v + 0.5 * v;
    s0 * norm_pdf(d1) * tau.sqrt()
}

/// Inverts `bs_call` in `theta`. The price must sit strictly inside the
/// arbitrage bounds `(S0 - K)^+ <= price < S0`; intrinsic maps to exactly 0.
///
/// Bracketed bisection refined by safeguarded Newton steps (vega vanishes at
/// both extremes of `theta` for K != S0, so pure Newton is unsafe).
pub fn implied_vol(price: f64, s0: f64, strike: f64, tau: f64) -> Result<IVPoint> {
    if !(s0 > 0.0) || !(strike > 0.0) || !(tau > 0.0) {
        return Err(Error::Domain(format!(
            "need S0, K, tau > 0; got S0 = {s0}, K = {strike}, tau = {tau}"
        )));
    }
    let intrinsic = (s0 - strike).max(0.0);
    if price < intrinsic {
        return Err(Error::ArbitrageViolation { price, intrinsic });
    }
    if price >= s0 {
        return Err(Error::UpperBoundViolation { price, spot: s0 });
    }
    if price == intrinsic {
        return Ok(IVPoint {
            tau,
            sigma: 0.0,
            converged: true,
            iterations: 0,
        });
    }
    let tol = 1e-12 * s0;

    // bracket: double the upper bound until the price is enclosed
    let mut lo = 0.0f64;
    let mut hi = 1.0f64;
    let mut doublings = 0;
    while bs_call(s0, strike, tau, hi) < price {
        hi *= 2.0;
        doublings += 1;
        if doublings > 10 {
            return Err(Error::NumericFailure(format!(
                "implied vol bracket exceeded theta = {hi}"
            )));
        }
    }

    // converge in theta, not just in price residual: where vega is below 1
    // a residual-only stop would leave theta errors above the residual scale
    let mut theta = 0.5 * (lo + hi);
    let mut iterations = 0u32;
    let mut converged = false;
    for _ in 0..200 {
        iterations += 1;
        let f = bs_call(s0, strike, tau, theta) - price;
        if f == 0.0 {
            converged = true;
            break;
        }
        if f > 0.0 {
            hi = theta;
        } else {
            lo = theta;
        }
        let vega = bs_vega(s0, strike, tau, theta);
        let newton = theta - f / vega;
        let next = if vega > 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        let step = (next - theta).abs();
        theta = next;
        if f.abs() <= tol && step <= 1e-12 * (1.0 + theta) {
            converged = true;
            break;
        }
        if hi - lo < f64::EPSILON * hi.max(1.0) {
            converged = (bs_call(s0, strike, tau, theta) - price).abs() <= tol;
            break;
        }
    }
    if !theta.is_finite() {
        return Err(Error::NumericFailure("implied vol iterate non-finite".into()));
    }
    Ok(IVPoint {
        tau,
        sigma: theta,
        converged,
        iterations,
    })
}

/// Small-expiry implied-volatility limit functional
/// `|ln(K/S0)| / sqrt(-2 tau ln(excess))`, valid for excess in (0, 1).
pub fn iv_limit_value(excess: f64, s0: f64, strike: f64, tau: f64) -> Result<f64> {
    if !(s0 > 0.0) || !(strike > 0.0) || !(tau > 0.0) {
        return Err(Error::Domain(format!(
            "need S0, K, tau > 0; got S0 = {s0}, K = {strike}, tau = {tau}"
        )));
    }
    if strike == s0 {
        return Err(Error::Domain("at-the-money (K = S0) is excluded".into()));
    }
    if excess >= 1.0 {
        return Err(Error::Domain(format!(
            "excess = {excess} >= 1: formula regime invalid"
        )));
    }
    if excess <= 0.0 {
        return Err(Error::Domain(format!(
            "excess = {excess} <= 0: degenerate branch (Sigma -> 0) handled by caller"
        )));
    }
    Ok((strike / s0).ln().abs() / (-2.0 * tau * excess.ln()).sqrt())
}
