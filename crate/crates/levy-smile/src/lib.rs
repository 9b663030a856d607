//! Exponential-Levy call pricing near expiry.
//!
//! The stock is `S_tau = S0 * exp(X_tau)` with `X` a Levy process whose drift
//! is pinned by the zero-rate martingale condition `E[exp(X_tau)] = 1`. The
//! crate provides:
//!
//! - six parametric models (Black-Scholes, Merton, Kou, Variance Gamma, NIG,
//!   CGMY) with validated parameters and closed-form characteristic exponents
//!   ([`models`]);
//! - adaptive quadrature of payoff functions against the Levy density, in
//!   particular the small-expiry slopes `I_c = ∫ (S0 e^x - K)^+ nu(dx)` and
//!   `I_p = ∫ (K - S0 e^x)^+ nu(dx)` ([`quadrature`]);
//! - a Fourier-cosine pricing engine plus a seeded Monte-Carlo oracle
//!   ([`pricing`]);
//! - Black-Scholes implied volatility with arbitrage-bound bracketing and
//!   the small-expiry limit functional of the smile ([`implied_vol`]);
//! - the small-expiry regime classifier: flat smile, implied-volatility
//!   explosion, or degenerate zero ([`asymptotics`]);
//! - a CLI surface with deterministic CSV output ([`config`], [`cli`]).

pub mod asymptotics;
pub mod cli;
pub mod config;
pub mod error;
pub mod implied_vol;
pub mod models;
pub mod pricing;
pub mod quadrature;

pub use error::Error;
pub use models::ModelSpec;
