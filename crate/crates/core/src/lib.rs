//! Link-level simulator and closed-form evaluator for 2-user uplink
//! rate-splitting multiple access (RSMA) with randomly deployed users.
//!
//! A base station sits at the center of a disc of radius `R`; `K` users are
//! dropped uniformly on the disc and fade independently (Rayleigh). Each slot
//! schedules two users (greedy, CDF-based, or random selection), splits one
//! user's message into two SIC stages, and allocates power either to protect
//! a primary user's QoS (CPA) or to equalize the pair's rates on the MAC
//! sum-capacity line (FPA).
//!
//! The crate provides both sides of the comparison:
//!
//! * [`montecarlo`] — a seeded, block-parallel trial engine estimating outage
//!   probability, ergodic rate, Jain fairness, rate CDFs and admission
//!   frequencies for any scheme/strategy combination;
//! * [`outage`] — the matching closed-form outage expressions (series plus
//!   Gauss-Chebyshev quadrature) and their high-SNR polynomial limits,
//!   together with diversity-order slope fitting.
//!
//! Both sides share the primitives in [`numerics`], the stochastic geometry
//! in [`channel`], and the joint gain CDF of the CDF-scheduled pair in
//! [`cus_cdf`].

pub mod channel;
pub mod cus_cdf;
pub mod error;
pub mod montecarlo;
pub mod numerics;
pub mod outage;
pub mod power_alloc;
pub mod scheduling;

pub use channel::{ChannelRealization, QuadOrders, SystemConfig, TargetRates};
pub use cus_cdf::AnalyticContext;
pub use error::Error;
pub use montecarlo::EstimateResult;
pub use power_alloc::{StrategyKind, TransmissionOutcome};
pub use scheduling::{ScheduledPair, Scheme};
