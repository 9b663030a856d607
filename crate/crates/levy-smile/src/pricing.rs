//! European call pricing: a Fourier-cosine expansion engine driven by the
//! characteristic exponent, and a seeded Monte-Carlo engine as an independent
//! oracle. Zero rates throughout, so puts follow from parity
//! `C - P = S0 - K`.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Gamma, InverseGaussian, Normal, Poisson};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::models::{Activity, ModelSpec};

pub const DEFAULT_N_TERMS: usize = 1 << 14;
pub const DEFAULT_RANGE_WIDTH: f64 = 12.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    FourierCosine,
    MonteCarlo,
}

/// A price with its error estimate: truncation bound for the cosine engine,
/// standard error for Monte-Carlo.
#[derive(Debug, Clone, Copy)]
pub struct PriceQuote {
    pub value: f64,
    pub method: Method,
    pub err: f64,
    /// cosine terms or simulated paths
    pub n: u64,
}

/// `e^z - 1` without cancellation for small `|z|`.
fn cexpm1(z: Complex64) -> Complex64 {
    if z.norm() < 1e-3 {
        z * (1.0 + z * (0.5 + z * (1.0 / 6.0 + z * (1.0 / 24.0))))
    } else {
        z.exp() - 1.0
    }
}

#[derive(Clone, Copy)]
enum Payoff {
    Call,
    Put,
}

/// Cosine coefficient `chi_k = ∫_c^d e^y cos(u_k (y - a)) dy`.
fn chi(u: f64, a: f64, c: f64, d: f64) -> f64 {
    let uc = u * (c - a);
    let ud = u * (d - a);
    (ud.cos() * d.exp() - uc.cos() * c.exp() + u * (ud.sin() * d.exp() - uc.sin() * c.exp()))
        / (1.0 + u * u)
}

/// Cosine coefficient `phi_k = ∫_c^d cos(u_k (y - a)) dy`.
fn phi(u: f64, a: f64, c: f64, d: f64) -> f64 {
    if u == 0.0 {
        d - c
    } else {
        ((u * (d - a)).sin() - (u * (c - a)).sin()) / u
    }
}

/// Cosine-series expectation of the payoff of `ln(S_tau/K)` given its
/// characteristic function on the truncation range `[a, b]`.
///
/// Returns the value plus a self-convergence error estimate (distance to the
/// half-resolution sum, plus a fixed floating-point floor).
fn cos_sum<C: Fn(f64) -> Complex64>(
    cf: &C,
    strike: f64,
    a: f64,
    b: f64,
    n_terms: usize,
    payoff: Payoff,
) -> Result<(f64, f64)> {
    // payoff support inside the range: calls pay on y > 0, puts on y < 0
    let (c, d) = match payoff {
        Payoff::Call => (a.max(0.0), b),
        Payoff::Put => (a, b.min(0.0)),
    };
    if c >= d {
        // payoff region entirely outside the density range
        return Ok((0.0, 1e-13 * strike));
    }
    let width = b - a;
    let mut sum = 0.0f64;
    let mut half_sum = 0.0f64;
    for k in 0..n_terms {
        let u = k as f64 * std::f64::consts::PI / width;
        let coeff = match payoff {
            Payoff::Call => chi(u, a, c, d) - phi(u, a, c, d),
            Payoff::Put => phi(u, a, c, d) - chi(u, a, c, d),
        };
        let weight = if k == 0 { 0.5 } else { 1.0 };
        let f = (cf(u) * Complex64::new(0.0, -u * a).exp()).re;
        let term = weight * f * coeff;
        sum += term;
        if k < n_terms / 2 {
            half_sum += term;
        }
    }
    let scale = 2.0 / width * strike;
    let value = scale * sum;
    if !value.is_finite() {
        return Err(Error::NumericFailure(
            "non-finite cosine-series value".into(),
        ));
    }
    let err = (scale * (sum - half_sum)).abs() + 1e-13 * strike;
    Ok((value, err))
}

/// Truncation range for the density of `ln(S_tau/K)`, from the cumulants of
/// `X_tau` widened by the jump-tail extents.
fn cos_range(model: &ModelSpec, kbar: f64, tau: f64, range_width: f64) -> (f64, f64) {
    let (c1, c2, c4) = model.cumulants(tau);
    let center = kbar + c1;
    let spread = (c2 + c4.sqrt()).sqrt();
    let (down, up) = model.jump_extent();
    // the call coefficients carry a factor e^b, so cancellation noise grows
    // with the upper edge; keep b as tight as the payoff-weighted tails
    // allow (the capped width still leaves the clipped mass far below the
    // reported error floor)
    let a = center - range_width * spread - down;
    let b = center + range_width.min(UP_RANGE_WIDTH_CAP) * spread + UP_EXTENT_SCALE * up;
    (a, b)
}

const UP_RANGE_WIDTH_CAP: f64 = 8.0;
const UP_EXTENT_SCALE: f64 = 0.75;

fn fourier_price(
    model: &ModelSpec,
    s0: f64,
    strike: f64,
    tau: f64,
    n_terms: usize,
    range_width: f64,
    payoff: Payoff,
) -> Result<PriceQuote> {
    model.validate().map_err(Error::InvalidModel)?;
    if !(s0 > 0.0) || !(strike > 0.0) {
        return Err(Error::Domain(format!(
            "need S0 > 0 and K > 0, got S0 = {s0}, K = {strike}"
        )));
    }
    if tau < 0.0 {
        return Err(Error::Domain(format!("negative expiry tau = {tau}")));
    }
    let intrinsic = match payoff {
        Payoff::Call => (s0 - strike).max(0.0),
        Payoff::Put => (strike - s0).max(0.0),
    };
    if tau == 0.0 {
        return Ok(PriceQuote {
            value: intrinsic,
            method: Method::FourierCosine,
            err: 0.0,
            n: 0,
        });
    }
    if n_terms < 16 || !range_width.is_finite() || range_width <= 0.0 {
        return Err(Error::Domain(format!(
            "need n_terms >= 16 and range_width > 0, got {n_terms}, {range_width}"
        )));
    }
    let kbar = (s0 / strike).ln();

    // sigma = 0 finite-activity: the law of X_tau has an atom of mass
    // e^{-lambda tau} at the no-jump point b0 tau. The cosine series handles
    // atoms poorly, so price the no-jump branch exactly and expand only the
    // jump-conditioned remainder.
    let atom = match (model.gaussian_sigma(), model.activity()) {
        (sigma, Activity::Finite { lambda }) if sigma == 0.0 && lambda > 0.0 => Some(lambda),
        _ => None,
    };
    let (value, err) = if let Some(lambda) = atom {
        let b0 = model
            .natural_drift()
            .expect("finite activity always has a natural drift");
        let w0 = (-lambda * tau).exp();
        let s_nojump = s0 * (b0 * tau).exp();
        let det = match payoff {
            Payoff::Call => (s_nojump - strike).max(0.0),
            Payoff::Put => (strike - s_nojump).max(0.0),
        };
        let jump_mass = -(-lambda * tau).exp_m1();
        if jump_mass == 0.0 {
            (det, 1e-13 * strike)
        } else {
            // CF of ln(S_tau/K) conditioned on >= 1 jump
            let cf = |u: f64| {
                let uc = Complex64::new(u, 0.0);
                let z = tau * model.raw_exponent(uc) + lambda * tau;
                let shift = Complex64::new(0.0, u * (kbar + b0 * tau)).exp();
                shift * (-lambda * tau).exp() * cexpm1(z) / jump_mass
            };
            // conditional spread is at least one jump wide regardless of tau
            let (k2, k4) = model.raw_cumulants_24();
            let t_eff = tau + 1.0 / lambda;
            let spread = (k2 * t_eff + (k4 * t_eff).sqrt()).sqrt();
            let (down, up) = model.jump_extent();
            let center = kbar + b0 * tau;
            let a = center - range_width * spread - down;
            let b = center
                + range_width.min(UP_RANGE_WIDTH_CAP) * spread
                + UP_EXTENT_SCALE * up;
            let (vc, ec) = cos_sum(&cf, strike, a, b, n_terms, payoff)?;
            (w0 * det + jump_mass * vc, jump_mass * ec + 1e-13 * strike)
        }
    } else {
        let cf = |u: f64| {
            let uc = Complex64::new(u, 0.0);
            (tau * model.char_exponent_unchecked(uc) + Complex64::new(0.0, u * kbar)).exp()
        };
        let (a, b) = cos_range(model, kbar, tau, range_width);
        cos_sum(&cf, strike, a, b, n_terms, payoff)?
    };
    Ok(PriceQuote {
        value: value.max(0.0),
        method: Method::FourierCosine,
        err,
        n: n_terms as u64,
    })
}

/// Fourier-cosine call price. `tau = 0` returns intrinsic exactly.
pub fn price_call_fourier(
    model: &ModelSpec,
    s0: f64,
    strike: f64,
    tau: f64,
    n_terms: usize,
    range_width: f64,
) -> Result<PriceQuote> {
    fourier_price(model, s0, strike, tau, n_terms, range_width, Payoff::Call)
}

/// Fourier-cosine put price, expanded independently (not via parity); used to
/// cross-check parity and to read in-the-money call excess accurately.
pub fn price_put_fourier(
    model: &ModelSpec,
    s0: f64,
    strike: f64,
    tau: f64,
    n_terms: usize,
    range_width: f64,
) -> Result<PriceQuote> {
    fourier_price(model, s0, strike, tau, n_terms, range_width, Payoff::Put)
}

/// Put price from a call price under zero rates: `P = C - S0 + K`.
pub fn put_from_call(call: f64, s0: f64, strike: f64) -> f64 {
    call - s0 + strike
}

/// Draws one increment `X_tau` by exact sampling. CGMY is not supported
/// (exact tempered-stable increment sampling is out of scope).
fn sample_increment(model: &ModelSpec, tau: f64, rng: &mut ChaCha8Rng) -> Result<f64> {
    let std_normal = Normal::new(0.0, 1.0).expect("unit normal");
    let x = match *model {
        ModelSpec::BlackScholes { sigma } => {
            -0.5 * sigma * sigma * tau + sigma * tau.sqrt() * std_normal.sample(rng)
        }
        ModelSpec::Merton {
            sigma,
            lambda,
            mu_j,
            delta_j,
        } => {
            let drift = -model.laplace_raw(1.0) * tau;
            let n = Poisson::new(lambda * tau)
                .map_err(|e| Error::Domain(format!("Poisson(lambda tau): {e}")))?
                .sample(rng);
            // the sum of n normal jumps is itself normal
            let jumps = n * mu_j + delta_j * n.sqrt() * std_normal.sample(rng);
            drift + sigma * tau.sqrt() * std_normal.sample(rng) + jumps
        }
        ModelSpec::Kou {
            sigma,
            lambda,
            p,
            eta1,
            eta2,
        } => {
            let drift = -model.laplace_raw(1.0) * tau;
            let n = Poisson::new(lambda * tau)
                .map_err(|e| Error::Domain(format!("Poisson(lambda tau): {e}")))?
                .sample(rng) as u64;
            let up = Exp::new(eta1).map_err(|e| Error::Domain(format!("Exp(eta1): {e}")))?;
            let down = Exp::new(eta2).map_err(|e| Error::Domain(format!("Exp(eta2): {e}")))?;
            let mut jumps = 0.0;
            for _ in 0..n {
                let uniform: f64 = rand::Rng::gen(rng);
                jumps += if uniform < p {
                    up.sample(rng)
                } else {
                    -down.sample(rng)
                };
            }
            drift + sigma * tau.sqrt() * std_normal.sample(rng) + jumps
        }
        ModelSpec::VarianceGamma {
            theta,
            sigma,
            kappa,
        } => {
            let drift = -model.laplace_raw(1.0) * tau;
            let g = Gamma::new(tau / kappa, kappa)
                .map_err(|e| Error::Domain(format!("Gamma subordinator: {e}")))?
                .sample(rng);
            drift + theta * g + sigma * g.sqrt() * std_normal.sample(rng)
        }
        ModelSpec::Nig { alpha, beta, delta } => {
            let drift = -model.laplace_raw(1.0) * tau;
            let gb = (alpha * alpha - beta * beta).sqrt();
            let subordinator = InverseGaussian::new(delta * tau / gb, (delta * tau).powi(2))
                .map_err(|e| Error::Domain(format!("IG subordinator: {e}")))?
                .sample(rng);
            drift + beta * subordinator + subordinator.sqrt() * std_normal.sample(rng)
        }
        ModelSpec::Cgmy { .. } => {
            return Err(Error::Capability(
                "exact Monte-Carlo increment sampling is not available for CGMY".into(),
            ))
        }
    };
    Ok(x)
}

const MC_BLOCK: u64 = 1 << 16;

/// Monte-Carlo mean and standard error of `f(X_tau)` over `n_paths` exact
/// increments.
///
/// Deterministic given the seed: path block `b` uses ChaCha8 stream `b` of
/// the seed, blocks are simulated in parallel and combined in index order, so
/// parallel and serial runs agree bit for bit.
pub fn mc_expectation<F>(
    model: &ModelSpec,
    tau: f64,
    n_paths: u64,
    seed: u64,
    f: F,
) -> Result<(f64, f64)>
where
    F: Fn(f64) -> f64 + Sync,
{
    model.validate().map_err(Error::InvalidModel)?;
    if !(tau > 0.0) || n_paths == 0 {
        return Err(Error::Domain(format!(
            "need tau > 0 and n_paths > 0, got tau = {tau}, n_paths = {n_paths}"
        )));
    }
    // reject unsupported models before spawning work
    sample_increment(model, tau, &mut ChaCha8Rng::seed_from_u64(seed))?;

    let n_blocks = n_paths.div_ceil(MC_BLOCK);
    let block_stats: Vec<Result<(f64, f64)>> = (0..n_blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b);
            let lo = b * MC_BLOCK;
            let hi = ((b + 1) * MC_BLOCK).min(n_paths);
            let mut sum = 0.0f64;
            let mut sum_sq = 0.0f64;
            for _ in lo..hi {
                let y = f(sample_increment(model, tau, &mut rng)?);
                sum += y;
                sum_sq += y * y;
            }
            Ok((sum, sum_sq))
        })
        .collect();
    let mut sum = 0.0f64;
    let mut sum_sq = 0.0f64;
    for s in block_stats {
        let (a, b) = s?;
        sum += a;
        sum_sq += b;
    }
    let n = n_paths as f64;
    let mean = sum / n;
    let var = (sum_sq / n - mean * mean).max(0.0);
    let stderr = (var / n).sqrt();
    if !mean.is_finite() {
        return Err(Error::NumericFailure("non-finite Monte-Carlo mean".into()));
    }
    Ok((mean, stderr))
}

/// Monte-Carlo call price by exact increment sampling; CGMY is refused with
/// a capability error.
pub fn price_call_mc(
    model: &ModelSpec,
    s0: f64,
    strike: f64,
    tau: f64,
    n_paths: u64,
    seed: u64,
) -> Result<PriceQuote> {
    if !(s0 > 0.0) || !(strike > 0.0) {
        return Err(Error::Domain(format!(
            "need S0 > 0 and K > 0, got S0 = {s0}, K = {strike}"
        )));
    }
    let (mean, stderr) = mc_expectation(model, tau, n_paths, seed, |x| {
        (s0 * x.exp() - strike).max(0.0)
    })?;
    Ok(PriceQuote {
        value: mean,
        method: Method::MonteCarlo,
        err: stderr,
        n: n_paths,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::implied_vol::bs_call;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn kou() -> ModelSpec {
        ModelSpec::Kou {
            sigma: 0.1,
            lambda: 1.0,
            p: 0.5,
            eta1: 10.0,
            eta2: 5.0,
        }
    }

    fn all_mc_models() -> Vec<ModelSpec> {
        vec![
            ModelSpec::BlackScholes { sigma: 0.2 },
            ModelSpec::Merton {
                sigma: 0.1,
                lambda: 0.5,
                mu_j: 0.0,
                delta_j: 0.3,
            },
            kou(),
            ModelSpec::VarianceGamma {
                theta: -0.14,
                sigma: 0.2,
                kappa: 0.2,
            },
            ModelSpec::Nig {
                alpha: 8.0,
                beta: -3.0,
                delta: 0.2,
            },
        ]
    }

    #[test]
    fn black_scholes_matches_closed_form() {
        let m = ModelSpec::BlackScholes { sigma: 0.2 };
        for (strike, tau) in [(100.0, 1.0), (110.0, 0.5), (80.0, 0.25), (120.0, 2.0)] {
            let q = price_call_fourier(&m, 100.0, strike, tau, DEFAULT_N_TERMS, 12.0).unwrap();
            let want = bs_call(100.0, strike, tau, 0.2);
            assert_relative_eq!(q.value, want, max_relative = 1e-10);
        }
        let q = price_call_fourier(&m, 100.0, 100.0, 1.0, DEFAULT_N_TERMS, 12.0).unwrap();
        assert_relative_eq!(q.value, 7.9656, max_relative = 1e-4);
    }

    #[test]
    fn zero_expiry_is_intrinsic() {
        let q = price_call_fourier(&kou(), 100.0, 90.0, 0.0, DEFAULT_N_TERMS, 12.0).unwrap();
        assert_eq!(q.value, 10.0);
        assert_eq!(q.err, 0.0);
        let q = price_put_fourier(&kou(), 100.0, 110.0, 0.0, DEFAULT_N_TERMS, 12.0).unwrap();
        assert_eq!(q.value, 10.0);
    }

    #[test]
    fn small_expiry_otm_price_nonnegative_and_tiny() {
        for m in all_mc_models() {
            let q = price_call_fourier(&m, 100.0, 115.0, 1e-8, 1 << 16, 12.0).unwrap();
            assert!(q.value >= 0.0, "{m:?}");
            assert!(q.value < 1e-4, "{m:?}: {}", q.value);
        }
    }

    #[test]
    fn kou_small_expiry_excess_matches_slope() {
        let slope = crate::quadrature::slope_call(&kou(), 100.0, 110.0).unwrap();
        let tau = 1e-4;
        let q = price_call_fourier(&kou(), 100.0, 110.0, tau, 1 << 15, 12.0).unwrap();
        let ratio = q.value / (tau * slope.value);
        assert!((ratio - 1.0).abs() < 0.02, "ratio = {ratio}");
    }

    #[test]
    fn put_call_parity_independent_expansions() {
        for m in [
            kou(),
            ModelSpec::VarianceGamma {
                theta: -0.14,
                sigma: 0.2,
                kappa: 0.2,
            },
            ModelSpec::Cgmy {
                c: 1.0,
                g: 5.0,
                m: 8.0,
                y: 0.8,
            },
        ] {
            for (strike, tau) in [(90.0, 0.5), (110.0, 0.1), (100.0, 1.0)] {
                let c = price_call_fourier(&m, 100.0, strike, tau, 1 << 15, 12.0).unwrap();
                let p = price_put_fourier(&m, 100.0, strike, tau, 1 << 15, 12.0).unwrap();
                let parity = put_from_call(c.value, 100.0, strike);
                assert_abs_diff_eq!(p.value, parity, epsilon = 1e-8);
            }
        }
    }

    #[test]
    fn price_bounds_and_tau_monotonicity() {
        for m in all_mc_models() {
            for strike in [85.0, 110.0] {
                let mut last = 0.0;
                for tau in [0.01, 0.05, 0.25, 1.0] {
                    let q =
                        price_call_fourier(&m, 100.0, strike, tau, DEFAULT_N_TERMS, 12.0).unwrap();
                    let intrinsic = (100.0f64 - strike).max(0.0);
                    assert!(q.value >= intrinsic - q.err, "{m:?} tau={tau}");
                    assert!(q.value <= 100.0, "{m:?} tau={tau}");
                    assert!(q.value >= last - 1e-10, "{m:?}: not monotone at tau={tau}");
                    last = q.value;
                }
            }
        }
    }

    #[test]
    fn fourier_self_convergence() {
        for m in all_mc_models() {
            let q1 = price_call_fourier(&m, 100.0, 110.0, 0.1, 1 << 13, 12.0).unwrap();
            let q2 = price_call_fourier(&m, 100.0, 110.0, 0.1, 1 << 14, 12.0).unwrap();
            assert!(
                (q2.value - q1.value).abs() <= q1.err,
                "{m:?}: doubled-resolution shift {} exceeds err {}",
                (q2.value - q1.value).abs(),
                q1.err
            );
        }
    }

    #[test]
    fn degenerate_one_sided_price_is_intrinsic() {
        // positive jumps only, sigma = 0: supp X_tau = [b0 tau, inf); any
        // strike below the support floor makes the call pay S0 - K surely
        let m = ModelSpec::Kou {
            sigma: 0.0,
            lambda: 1.0,
            p: 1.0,
            eta1: 10.0,
            eta2: 5.0,
        };
        let s0 = 100.0;
        let strike = s0 * (-0.15f64).exp(); // ln(K/S0) = -0.15 < b0 = -1/9
        for tau in [0.01, 0.1, 1.0] {
            let q = price_call_fourier(&m, s0, strike, tau, 1 << 18, 12.0).unwrap();
            assert_abs_diff_eq!(q.value, s0 - strike, epsilon = 1e-8);
        }
    }

    #[test]
    fn mc_martingale_mean() {
        for m in all_mc_models() {
            for tau in [0.01, 1.0] {
                let (mean, stderr) =
                    mc_expectation(&m, tau, 200_000, 7, |x| 100.0 * x.exp()).unwrap();
                assert!(
                    (mean - 100.0).abs() <= 4.0 * stderr,
                    "{m:?} tau={tau}: mean {mean} stderr {stderr}"
                );
            }
        }
    }

    #[test]
    fn mc_agrees_with_fourier() {
        for m in all_mc_models() {
            for (strike, tau) in [(90.0, 0.1), (110.0, 0.5)] {
                let f = price_call_fourier(&m, 100.0, strike, tau, DEFAULT_N_TERMS, 12.0).unwrap();
                let mc = price_call_mc(&m, 100.0, strike, tau, 400_000, 42).unwrap();
                assert!(
                    (f.value - mc.value).abs() <= 3.0 * mc.err + f.err,
                    "{m:?} K={strike} tau={tau}: fourier {} mc {} stderr {}",
                    f.value,
                    mc.value,
                    mc.err
                );
            }
        }
    }

    #[test]
    fn mc_deterministic_given_seed() {
        let a = price_call_mc(&kou(), 100.0, 110.0, 0.1, 150_000, 123).unwrap();
        let b = price_call_mc(&kou(), 100.0, 110.0, 0.1, 150_000, 123).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        assert_eq!(a.err.to_bits(), b.err.to_bits());
        let c = price_call_mc(&kou(), 100.0, 110.0, 0.1, 150_000, 124).unwrap();
        assert_ne!(a.value.to_bits(), c.value.to_bits());
    }

    #[test]
    fn cgmy_mc_is_refused() {
        let m = ModelSpec::Cgmy {
            c: 1.0,
            g: 5.0,
            m: 8.0,
            y: 0.8,
        };
        assert!(matches!(
            price_call_mc(&m, 100.0, 110.0, 0.1, 1000, 1),
            Err(Error::Capability(_))
        ));
    }

    #[test]
    fn negative_expiry_rejected() {
        assert!(price_call_fourier(&kou(), 100.0, 110.0, -0.1, 1 << 10, 12.0).is_err());
    }
}
