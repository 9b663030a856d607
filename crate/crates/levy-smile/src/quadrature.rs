//! Adaptive Gauss-Kronrod integration of payoff functions against the Levy
//! density, in particular the small-expiry slopes
//! `I_c = ∫ (S0 e^x - K)^+ nu(dx)` and `I_p = ∫ (K - S0 e^x)^+ nu(dx)`.
//!
//! The integrands are smooth away from the payoff kink at `k = ln(K/S0)`, so
//! the kink is always placed at a panel boundary; the density singularity at
//! the origin is either outside the integration domain or (for finite
//! activity) only touched at a panel boundary, where the Kronrod nodes never
//! sample.

use crate::error::{Error, Result};
use crate::models::{Activity, ModelSpec, Support};

/// Tolerances for adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct QuadTol {
    pub abs: f64,
    pub rel: f64,
    pub max_subdiv: usize,
}

impl Default for QuadTol {
    fn default() -> Self {
        QuadTol {
            abs: 1e-12,
            rel: 1e-9,
            max_subdiv: 2000,
        }
    }
}

/// Integration domain for [`integrate_payoff`]: a half-line or interval.
/// Domains whose closure contains the origin are rejected for
/// infinite-activity models, where the density is not locally integrable
/// against a generic bounded payoff.
#[derive(Debug, Clone, Copy)]
pub enum Domain {
    /// `[a, +infinity)`
    Above(f64),
    /// `(-infinity, b]`
    Below(f64),
    /// `[a, b]`
    Interval(f64, f64),
}

/// One slope integral with its absolute error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlopeEstimate {
    pub value: f64,
    pub err: f64,
}

/// Both asymptotic slopes at log-moneyness `k = ln(K/S0)`.
///
/// For infinite-activity measures the integral on the side whose kink lies
/// across the origin diverges (`nu` has infinite mass near 0 and the payoff
/// is bounded away from 0 there); that side is reported as `None` rather than
/// a number.
#[derive(Debug, Clone, Copy)]
pub struct SlopeResult {
    pub i_c: Option<SlopeEstimate>,
    pub i_p: Option<SlopeEstimate>,
    /// log-moneyness ln(K/S0)
    pub k: f64,
}

// 15-point Kronrod / 7-point Gauss pair (QUADPACK qk15 constants).
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// One Gauss-Kronrod panel: returns (kronrod value, error estimate).
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<(f64, f64)> {
    let hl = 0.5 * (b - a);
    let c = 0.5 * (a + b);
    let fc = f(c);
    let mut resk = WGK[7] * fc;
    let mut resg = WG[3] * fc;
    let mut resabs = WGK[7] * fc.abs();
    let mut fv = [0.0f64; 15];
    fv[7] = fc;
    for j in 0..7 {
        let x = hl * XGK[j];
        let f1 = f(c - x);
        let f2 = f(c + x);
        fv[j] = f1;
        fv[14 - j] = f2;
        resk += WGK[j] * (f1 + f2);
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            resg += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = resk * 0.5;
    let mut resasc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        resasc += WGK[j] * ((fv[j] - mean).abs() + (fv[14 - j] - mean).abs());
    }
    let value = resk * hl;
    if !value.is_finite() {
        return Err(Error::NumericFailure(format!(
            "non-finite integrand on panel [{a}, {b}]"
        )));
    }
    let resasc = resasc * hl.abs();
    let mut err = ((resk - resg) * hl).abs();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * 1.0f64.min((200.0 * err / resasc).powf(1.5));
    }
    let eps = f64::EPSILON * 50.0 * resabs * hl.abs();
    Ok((value, err.max(eps)))
}

/// Adaptive bisection over `[a, b]` until the summed error estimate is below
/// `max(tol.abs, tol.rel * |value|)`. Hitting the subdivision cap yields an
/// integration-failure error carrying the partial estimate.
pub fn adaptive<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: &QuadTol) -> Result<(f64, f64)> {
    if a == b {
        return Ok((0.0, 0.0));
    }
    let mut panels: Vec<(f64, f64, f64, f64)> = Vec::with_capacity(64);
    let (v, e) = gk15(f, a, b)?;
    panels.push((a, b, v, e));
    for _ in 0..tol.max_subdiv {
        let value: f64 = panels.iter().map(|p| p.2).sum();
        let err: f64 = panels.iter().map(|p| p.3).sum();
        if err <= tol.abs.max(tol.rel * value.abs()) {
            return Ok((value, err));
        }
        let (worst, _) = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .expect("non-empty panel list");
        let (lo, hi, _, _) = panels.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        panels.push({
            let (v, e) = gk15(f, lo, mid)?;
            (lo, mid, v, e)
        });
        panels.push({
            let (v, e) = gk15(f, mid, hi)?;
            (mid, hi, v, e)
        });
    }
    let value: f64 = panels.iter().map(|p| p.2).sum();
    let err: f64 = panels.iter().map(|p| p.3).sum();
    Err(Error::IntegrationFailure {
        partial: value,
        err,
        message: format!("no convergence on [{a}, {b}] after {} subdivisions", tol.max_subdiv),
    })
}

/// Integrates `f(x) nu(dx)` over the domain, truncating unbounded tails where
/// the (payoff-weighted) density is negligible. The domain must avoid a
/// neighborhood of the origin unless the measure has finite activity.
pub fn integrate_payoff<F: Fn(f64) -> f64>(
    f: &F,
    model: &ModelSpec,
    domain: Domain,
) -> Result<(f64, f64)> {
    model.validate().map_err(Error::InvalidModel)?;
    if matches!(model.support(), Support::Empty) {
        return Ok((0.0, 0.0));
    }
    let (down, up) = model.jump_extent();
    let (lo, hi) = match domain {
        Domain::Above(a) => (a, (a.max(0.0) + up.max(1.0)).max(a)),
        Domain::Below(b) => ((b.min(0.0) - down.max(1.0)).min(b), b),
        Domain::Interval(a, b) => {
            if a > b {
                return Err(Error::Domain(format!("empty interval [{a}, {b}]")));
            }
            (a, b)
        }
    };
    let touches_origin = lo <= 0.0 && hi >= 0.0;
    if touches_origin && matches!(model.activity(), Activity::Infinite) {
        return Err(Error::Domain(
            "domain touches the origin; nu is not locally finite there (infinite activity)".into(),
        ));
    }
    let g = |x: f64| f(x) * model.levy_density(x).unwrap_or(f64::NAN);
    let tol = QuadTol::default();
    if touches_origin && lo < 0.0 && hi > 0.0 {
        // split so the origin sits on a panel boundary, never at a node
        let (v1, e1) = adaptive(&g, lo, 0.0, &tol)?;
        let (v2, e2) = adaptive(&g, 0.0, hi, &tol)?;
        Ok((v1 + v2, e1 + e2))
    } else {
        adaptive(&g, lo, hi, &tol)
    }
}

fn check_strikes(s0: f64, strike: f64) -> Result<f64> {
    if !(s0 > 0.0) || !(strike > 0.0) {
        return Err(Error::Domain(format!(
            "need S0 > 0 and K > 0, got S0 = {s0}, K = {strike}"
        )));
    }
    if s0 == strike {
        return Err(Error::Domain("at-the-money (K = S0) is excluded".into()));
    }
    Ok((strike / s0).ln())
}

/// Call slope `I_c = ∫_k^∞ (S0 e^x - K) nu(dx)`, `k = ln(K/S0)`.
///
/// Diverges when `k < 0` (in-the-money) and the measure has infinite
/// activity; that case is a domain error.
pub fn slope_call(model: &ModelSpec, s0: f64, strike: f64) -> Result<SlopeEstimate> {
    let k = check_strikes(s0, strike)?;
    model.validate().map_err(Error::InvalidModel)?;
    match model.support() {
        Support::Empty => return Ok(SlopeEstimate { value: 0.0, err: 0.0 }),
        Support::NegativeOnly if k >= 0.0 => {
            return Ok(SlopeEstimate { value: 0.0, err: 0.0 })
        }
        _ => {}
    }
    if k < 0.0 && matches!(model.activity(), Activity::Infinite) {
        return Err(Error::Domain(
            "call slope diverges: K < S0 puts the payoff kink across the origin \
             and nu has infinite mass near 0"
                .into(),
        ));
    }
    let payoff = move |x: f64| (s0 * x.exp() - strike).max(0.0);
    let (_, up) = model.jump_extent();
    let hi = up.max(1.0).max(k + 1.0);
    let tol = QuadTol::default();
    let g = |x: f64| payoff(x) * model.levy_density(x).unwrap_or(f64::NAN);
    let (value, err) = if k < 0.0 {
        let (v1, e1) = adaptive(&g, k, 0.0, &tol)?;
        let (v2, e2) = adaptive(&g, 0.0, hi, &tol)?;
        (v1 + v2, e1 + e2)
    } else {
        adaptive(&g, k, hi, &tol)?
    };
    Ok(SlopeEstimate { value: value.max(0.0), err })
}

/// Put slope `I_p = ∫_{-∞}^k (K - S0 e^x) nu(dx)`, `k = ln(K/S0)`.
///
/// Diverges when `k > 0` (K above spot) and the measure has infinite
/// activity; that case is a domain error.
pub fn slope_put(model: &ModelSpec, s0: f64, strike: f64) -> Result<SlopeEstimate> {
    let k = check_strikes(s0, strike)?;
    model.validate().map_err(Error::InvalidModel)?;
    match model.support() {
        Support::Empty => return Ok(SlopeEstimate { value: 0.0, err: 0.0 }),
        Support::PositiveOnly if k <= 0.0 => {
            return Ok(SlopeEstimate { value: 0.0, err: 0.0 })
        }
        _ => {}
    }
    if k > 0.0 && matches!(model.activity(), Activity::Infinite) {
        return Err(Error::Domain(
            "put slope diverges: K > S0 puts the payoff kink across the origin \
             and nu has infinite mass near 0"
                .into(),
        ));
    }
    let payoff = move |x: f64| (strike - s0 * x.exp()).max(0.0);
    let (down, _) = model.jump_extent();
    let lo = k.min(0.0) - down.max(1.0);
    let tol = QuadTol::default();
    let g = |x: f64| payoff(x) * model.levy_density(x).unwrap_or(f64::NAN);
    let (value, err) = if k > 0.0 {
        let (v1, e1) = adaptive(&g, lo, 0.0, &tol)?;
        let (v2, e2) = adaptive(&g, 0.0, k, &tol)?;
        (v1 + v2, e1 + e2)
    } else {
        adaptive(&g, lo, k, &tol)?
    };
    Ok(SlopeEstimate { value: value.max(0.0), err })
}

/// Both slopes; a divergent side (infinite activity with the kink across the
/// origin) comes back as `None`.
pub fn slopes(model: &ModelSpec, s0: f64, strike: f64) -> Result<SlopeResult> {
    let k = check_strikes(s0, strike)?;
    let side = |r: Result<SlopeEstimate>| match r {
        Ok(e) => Ok(Some(e)),
        Err(Error::Domain(msg)) if msg.contains("diverges") => Ok(None),
        Err(e) => Err(e),
    };
    Ok(SlopeResult {
        i_c: side(slope_call(model, s0, strike))?,
        i_p: side(slope_put(model, s0, strike))?,
        k,
    })
}
