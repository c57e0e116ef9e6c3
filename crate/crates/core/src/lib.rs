//! Link-level performance model for high quantum-bit-rate QKD over optical fiber.
//!
//! The model follows a coherent one-way (COW) QKD link sharing the fiber with
//! classical WDM channels. Per link length it accounts for:
//!
//! - chromatic-dispersion broadening of Gaussian pulses, optionally
//!   pre-compensated by a dispersion compensating fiber (DCF) ahead of the
//!   quantum attenuator ([`dispersion`]);
//! - spontaneous Raman scattering, linear crosstalk, dark counts and
//!   after-pulses at the quantum receiver ([`noise`]);
//! - QBER and the raw / sifted / secret key-rate chain ([`metrics`]);
//! - the optimal mean photon number, the highest repetition rate the ISI
//!   budget allows, DCF sizing and link reach ([`optimize`]).
//!
//! Configuration files, fiber presets and length sweeps live in [`config`],
//! [`presets`] and [`sweep`]; the `qkd-linksim` binary wraps them.
//!
//! ```
//! use qkd_linksim::{evaluate_point, presets, LinkScenario};
//!
//! let fiber = presets::fiber("EX2000").unwrap();
//! let scenario = LinkScenario::new(fiber, 100.0);
//! let report = evaluate_point(&scenario).unwrap();
//! assert!(report.r_sec > 0.0);
//! assert!(report.f_rep_ghz < 10.0); // dispersion already binds at 100 km
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod dispersion;
pub mod error;
pub mod link;
pub mod metrics;
pub mod noise;
pub mod optimize;
pub mod phys;
pub mod presets;
pub mod solve;
pub mod special;
pub mod sweep;

pub use error::{ConfigError, ModelError};
pub use link::{
    ClassicalChannelSpec, DetectorSpec, FiberSpec, LinkScenario, PrecompSpec, ProtocolSpec,
};
pub use metrics::{DetectionBudget, KeyRateReport};
pub use noise::NoiseBudget;
pub use optimize::{evaluate_point, optimize_mu, reach, OptimizationResult};

pub type Result<T, E = ModelError> = std::result::Result<T, E>;
