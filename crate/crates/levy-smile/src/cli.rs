//! Command-line surface: six subcommands emitting deterministic CSV plus a
//! one-line summary on stdout.
//!
//! Exit codes: 0 success, 2 configuration/domain error, 3 numeric failure,
//! 4 capability refusal.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::asymptotics::{classify, predicted_iv};
use crate::config::{Overrides, RunConfig};
use crate::error::{Error, Result};
use crate::implied_vol::implied_vol;
use crate::models::Support;
use crate::pricing::{price_call_fourier, price_call_mc, price_put_fourier};
use crate::quadrature::{integrate_payoff, slope_call, slope_put, slopes, Domain};

#[derive(Parser)]
#[command(
    name = "levy-smile",
    version,
    about = "Exponential-Levy option prices, small-expiry slopes and implied-volatility diagnostics"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// TOML configuration file (model, market, grid, engine blocks)
    #[arg(long)]
    config: PathBuf,
    /// Spot override
    #[arg(long)]
    s0: Option<f64>,
    /// Strike override
    #[arg(long)]
    strike: Option<f64>,
    /// Largest expiry of the geometric grid
    #[arg(long)]
    tau_max: Option<f64>,
    /// Ratio between consecutive grid expiries (> 1)
    #[arg(long)]
    tau_ratio: Option<f64>,
    /// Number of grid expiries
    #[arg(long)]
    tau_count: Option<u32>,
    /// Cosine terms for the Fourier engine
    #[arg(long)]
    n_terms: Option<usize>,
    /// Monte-Carlo paths
    #[arg(long)]
    n_paths: Option<u64>,
    /// Monte-Carlo seed
    #[arg(long)]
    seed: Option<u64>,
    /// CSV output path (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Fourier-cosine and Monte-Carlo call prices down the expiry grid
    Price(CommonArgs),
    /// Small-expiry slopes I_c and I_p at the configured strike
    Slope(CommonArgs),
    /// Measured vs predicted implied volatility down the expiry grid
    IvCurve(CommonArgs),
    /// Excess-over-intrinsic against tau * slope down the expiry grid
    VerifySlope(CommonArgs),
    /// Monte-Carlo rate E[f(X_tau)]/tau against the jump-measure integral
    Rate {
        #[command(flatten)]
        common: CommonArgs,
        /// Payoff descriptor: "call", "put", or "indicator:a:b" (0 outside [a, b])
        #[arg(long)]
        payoff: String,
    },
    /// Structural small-expiry regime of the configured strike
    Classify {
        #[command(flatten)]
        common: CommonArgs,
        /// Horizon for the degenerate support test
        #[arg(long, default_value_t = 1.0)]
        tau_ref: f64,
    },
}

impl CommonArgs {
    fn load(&self) -> Result<RunConfig> {
        let over = Overrides {
            s0: self.s0,
            strike: self.strike,
            tau_max: self.tau_max,
            tau_ratio: self.tau_ratio,
            tau_count: self.tau_count,
            n_terms: self.n_terms,
            n_paths: self.n_paths,
            seed: self.seed,
        };
        RunConfig::load(&self.config, &over, self.out.clone())
    }
}

/// 17 significant digits: lossless f64 round-trip for downstream tooling.
fn cell(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt_cell(x: Option<f64>) -> String {
    x.map(cell).unwrap_or_default()
}

fn emit(cfg: &RunConfig, csv: &str, summary: &str) -> Result<()> {
    match &cfg.out {
        Some(path) => std::fs::write(path, csv)
            .map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display())))?,
        None => print!("{csv}"),
    }
    println!("{summary}");
    Ok(())
}

fn cmd_price(cfg: &RunConfig) -> Result<()> {
    let mut csv = String::from("tau,fourier_value,fourier_err,mc_value,mc_stderr\n");
    let mut last = (0.0, 0.0);
    for tau in cfg.taus() {
        let f = price_call_fourier(
            &cfg.model,
            cfg.s0,
            cfg.strike,
            tau,
            cfg.n_terms,
            cfg.range_width,
        )?;
        let mc = match price_call_mc(&cfg.model, cfg.s0, cfg.strike, tau, cfg.n_paths, cfg.seed) {
            Ok(q) => (Some(q.value), Some(q.err)),
            Err(Error::Capability(_)) => (None, None),
            Err(e) => return Err(e),
        };
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            cell(tau),
            cell(f.value),
            cell(f.err),
            opt_cell(mc.0),
            opt_cell(mc.1)
        ));
        last = (tau, f.value);
    }
    emit(
        cfg,
        &csv,
        &format!("price: {} expiries, smallest tau={} value={}", cfg.tau_count, cell(last.0), cell(last.1)),
    )
}

fn cmd_slope(cfg: &RunConfig) -> Result<()> {
    let r = slopes(&cfg.model, cfg.s0, cfg.strike)?;
    let mut csv = String::from("k,i_c,err_c,i_p,err_p\n");
    csv.push_str(&format!(
        "{},{},{},{},{}\n",
        cell(r.k),
        opt_cell(r.i_c.map(|e| e.value)),
        opt_cell(r.i_c.map(|e| e.err)),
        opt_cell(r.i_p.map(|e| e.value)),
        opt_cell(r.i_p.map(|e| e.err)),
    ));
    let describe = |side: Option<crate::quadrature::SlopeEstimate>| match side {
        Some(e) => cell(e.value),
        None => "divergent".into(),
    };
    emit(
        cfg,
        &csv,
        &format!("slope: I_c={} I_p={}", describe(r.i_c), describe(r.i_p)),
    )
}

/// Excess over intrinsic, read off the out-of-the-money side: the call price
/// itself when K > S0, the (independently expanded) put price when K < S0.
fn excess(cfg: &RunConfig, tau: f64) -> Result<f64> {
    let q = if cfg.strike > cfg.s0 {
        price_call_fourier(
            &cfg.model,
            cfg.s0,
            cfg.strike,
            tau,
            cfg.n_terms,
            cfg.range_width,
        )?
    } else {
        price_put_fourier(
            &cfg.model,
            cfg.s0,
            cfg.strike,
            tau,
            cfg.n_terms,
            cfg.range_width,
        )?
    };
    Ok(q.value)
}

fn relevant_slope(cfg: &RunConfig) -> Result<crate::quadrature::SlopeEstimate> {
    if cfg.strike > cfg.s0 {
        slope_call(&cfg.model, cfg.s0, cfg.strike)
    } else {
        slope_put(&cfg.model, cfg.s0, cfg.strike)
    }
}

fn cmd_verify_slope(cfg: &RunConfig) -> Result<()> {
    let slope = relevant_slope(cfg)?;
    if slope.value <= 0.0 {
        return Err(Error::NotApplicable(
            "the moneyness-relevant slope is zero: the excess is o(tau) and the \
             ratio experiment has no limit to verify"
                .into(),
        ));
    }
    let mut csv = String::from("tau,excess,excess_over_tau,slope,ratio\n");
    let mut final_ratio = f64::NAN;
    for tau in cfg.taus() {
        let e = excess(cfg, tau)?;
        let ratio = e / (tau * slope.value);
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            cell(tau),
            cell(e),
            cell(e / tau),
            cell(slope.value),
            cell(ratio)
        ));
        final_ratio = ratio;
    }
    emit(cfg, &csv, &format!("verify-slope: final ratio {}", cell(final_ratio)))
}

fn cmd_iv_curve(cfg: &RunConfig) -> Result<()> {
    let intrinsic = (cfg.s0 - cfg.strike).max(0.0);
    let mut csv = String::from("tau,sigma_measured,sigma_predicted,ratio\n");
    let mut last = f64::NAN;
    for tau in cfg.taus() {
        let call = price_call_fourier(
            &cfg.model,
            cfg.s0,
            cfg.strike,
            tau,
            cfg.n_terms,
            cfg.range_width,
        )?;
        // engine jitter below intrinsic reads as a zero-vol quote
        let price = call.value.max(intrinsic);
        let measured = implied_vol(price, cfg.s0, cfg.strike, tau)?.sigma;
        let predicted = predicted_iv(&cfg.model, cfg.s0, cfg.strike, tau).ok();
        let ratio = predicted.map(|p| measured / p);
        csv.push_str(&format!(
            "{},{},{},{}\n",
            cell(tau),
            cell(measured),
            opt_cell(predicted),
            opt_cell(ratio)
        ));
        last = measured;
    }
    emit(cfg, &csv, &format!("iv-curve: smallest-tau sigma {}", cell(last)))
}

enum RatePayoff {
    Call,
    Put,
    Indicator { a: f64, b: f64 },
}

fn parse_payoff(desc: &str) -> Result<RatePayoff> {
    match desc {
        "call" => Ok(RatePayoff::Call),
        "put" => Ok(RatePayoff::Put),
        other => {
            let mut it = other.split(':');
            if it.next() != Some("indicator") {
                return Err(Error::Config(format!(
                    "unknown payoff descriptor {desc:?}; expected \"call\", \"put\" or \"indicator:a:b\""
                )));
            }
            let mut num = |name: &str| -> Result<f64> {
                it.next()
                    .ok_or_else(|| Error::Config(format!("indicator descriptor missing {name}")))?
                    .parse()
                    .map_err(|e| Error::Config(format!("indicator bound {name}: {e}")))
            };
            let a = num("a")?;
            let b = num("b")?;
            if it.next().is_some() {
                return Err(Error::Config(format!("trailing fields in descriptor {desc:?}")));
            }
            if !(a < b) {
                return Err(Error::Config(format!(
                    "indicator needs a < b, got [{a}, {b}] (empty payoffs are rejected)"
                )));
            }
            if a <= 0.0 && b >= 0.0 {
                return Err(Error::Config(format!(
                    "indicator support [{a}, {b}] touches the origin"
                )));
            }
            Ok(RatePayoff::Indicator { a, b })
        }
    }
}

fn cmd_rate(cfg: &RunConfig, desc: &str) -> Result<()> {
    let payoff = parse_payoff(desc)?;
    let kbar = (cfg.strike / cfg.s0).ln();
    let (f, domain): (Box<dyn Fn(f64) -> f64 + Sync>, Domain) = match payoff {
        RatePayoff::Call => {
            let (s0, strike) = (cfg.s0, cfg.strike);
            if strike == s0 {
                return Err(Error::Domain(
                    "at-the-money call payoff does not vanish near the origin".into(),
                ));
            }
            (
                Box::new(move |x: f64| (s0 * x.exp() - strike).max(0.0)),
                Domain::Above(kbar),
            )
        }
        RatePayoff::Put => {
            let (s0, strike) = (cfg.s0, cfg.strike);
            if strike == s0 {
                return Err(Error::Domain(
                    "at-the-money put payoff does not vanish near the origin".into(),
                ));
            }
            (
                Box::new(move |x: f64| (strike - s0 * x.exp()).max(0.0)),
                Domain::Below(kbar),
            )
        }
        RatePayoff::Indicator { a, b } => (
            Box::new(move |x: f64| if x >= a && x <= b { 1.0 } else { 0.0 }),
            Domain::Interval(a, b),
        ),
    };
    let (nu_value, _) = integrate_payoff(&f, &cfg.model, domain)?;
    let mut csv = String::from("tau,empirical_rate,nu_integral,ratio,mc_stderr_rate\n");
    let mut final_ratio = f64::NAN;
    for tau in cfg.taus() {
        let (mean, stderr) =
            crate::pricing::mc_expectation(&cfg.model, tau, cfg.n_paths, cfg.seed, &f)?;
        let rate = mean / tau;
        let ratio = if nu_value != 0.0 { rate / nu_value } else { f64::NAN };
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            cell(tau),
            cell(rate),
            cell(nu_value),
            cell(ratio),
            cell(stderr / tau)
        ));
        final_ratio = ratio;
    }
    emit(cfg, &csv, &format!("rate: final ratio {}", cell(final_ratio)))
}

fn support_name(s: Support) -> &'static str {
    match s {
        Support::Empty => "empty",
        Support::PositiveOnly => "positive-only",
        Support::NegativeOnly => "negative-only",
        Support::TwoSided => "two-sided",
    }
}

fn cmd_classify(cfg: &RunConfig, tau_ref: f64) -> Result<()> {
    let r = classify(&cfg.model, cfg.s0, cfg.strike, tau_ref)?;
    println!("regime: {}", r.tag);
    println!("sigma: {}", cell(r.evidence.sigma));
    println!(
        "natural_drift: {}",
        r.evidence
            .natural_drift
            .map(cell)
            .unwrap_or_else(|| "undefined".into())
    );
    println!("support: {}", support_name(r.evidence.support));
    println!(
        "relevant_slope: {} (err {})",
        cell(r.evidence.slope.value),
        cell(r.evidence.slope.err)
    );
    println!("log_moneyness: {}", cell(r.evidence.k));
    Ok(())
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Capability(_) => 4,
        Error::NumericFailure(_) | Error::IntegrationFailure { .. } => 3,
        _ => 2,
    }
}

/// Parses `args` and runs the selected command; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            // clap prints its own help/version output
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let result = (|| -> Result<()> {
        match &cli.command {
            Command::Price(c) => cmd_price(&c.load()?),
            Command::Slope(c) => cmd_slope(&c.load()?),
            Command::IvCurve(c) => cmd_iv_curve(&c.load()?),
            Command::VerifySlope(c) => cmd_verify_slope(&c.load()?),
            Command::Rate { common, payoff } => cmd_rate(&common.load()?, payoff),
            Command::Classify { common, tau_ref } => cmd_classify(&common.load()?, *tau_ref),
        }
    })();
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
