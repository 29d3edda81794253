//! Reservoir-variable treatment of dissipative mechanical systems.
//!
//! A one-dimensional system `q' = p`, `p' = F(q) - D(q, p)` loses energy to the
//! dissipative force `D`. Adjoining a reservoir variable `w` that accumulates the
//! work done by `D` (so `w' = D(q, p) p`) makes the augmented quantity
//! `K = p^2/2 + V(q) + w` an exact invariant of the flow: the energy leaving the
//! mechanical degrees of freedom is booked into `w` instead of being lost.
//!
//! This crate builds on that observation:
//!
//! - [`system`] defines the augmented model: states, built-in systems (damped
//!   harmonic oscillator, Duffing, Van der Pol), the invariant `K`, and the
//!   continuous right-hand sides.
//! - [`integrators`] provides one-step maps: a discrete gradient scheme that
//!   preserves `K` to solver tolerance ([`moddg_step`]), optionally sharpened by
//!   state-dependent effective-step corrections ([`DeltaVariant`]); a leapfrog
//!   driven by the `K`-gradient ([`pqplf_step`]); and classical RK4
//!   ([`erk4_step`]).
//! - [`exact`] holds the closed-form underdamped oscillator solution, including
//!   the exact reservoir trajectory, used as the oracle for every error
//!   measurement.
//! - [`analysis`] measures local/global errors on a fixed base time grid, fits
//!   empirical convergence orders by log-log regression, and tracks `K`-drift
//!   and energy-loss ratios along trajectories.
//!
//! ```
//! use resgrad::{moddg_step, DeltaVariant, State, StepperConfig, SystemSpec};
//!
//! let sys = SystemSpec::by_name("dho").unwrap();
//! let cfg = StepperConfig::new(0.01);
//! let mut s = State::new(0.0, 2.3, -3.1, 0.0);
//! let k0 = sys.k_energy(&s);
//! for _ in 0..1000 {
//!     s = moddg_step(&s, &sys, &cfg, &DeltaVariant::none()).unwrap().state;
//! }
//! assert!((sys.k_energy(&s) - k0).abs() < 1e-12);
//! ```

pub mod analysis;
pub mod error;
pub mod exact;
pub mod integrators;
pub mod system;

pub use analysis::{
    empirical_order, energy_loss_deviation, energy_loss_ratio, global_error_series,
    k_drift_series, local_error_series, local_error_table, run_order_experiment, ErrorSeries,
    LocalErrorTable, OrderExperiment, OrderOutcome, RegressionResult, Variable,
};
pub use error::{Error, Result};
pub use exact::DhoExactSolution;
pub use integrators::{
    delta_coefficients, derivative_tower, effective_step, erk4_step, integrate, moddg_step,
    pqplf_step, DeltaCoefficients, DeltaTag, DeltaVariant, Scheme, StepResult, StepperConfig,
};
pub use system::{
    builtin_systems, DampedOscillatorParams, DuffingParams, State, SystemSpec, VanDerPolParams,
};
