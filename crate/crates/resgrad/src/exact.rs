//! Closed-form reference solution for the underdamped harmonic oscillator,
//! including the exact reservoir trajectory.
//!
//! With `omega = sqrt(k - b^2/4)` the coordinate is
//! `q(t) = exp(-b t / 2) (A cos(omega t) + B sin(omega t))`, `p = dq/dt`, and
//! the reservoir is recovered from conservation of `K` rather than by
//! quadrature: `w(t) = K0 - H(q(t), p(t))`, which is exact by construction and
//! free of integration error.

use crate::error::{Error, Result};
use crate::system::{DampedOscillatorParams, State};

/// Exact underdamped damped-oscillator solution for given initial conditions.
#[derive(Debug, Clone, Copy)]
pub struct DhoExactSolution {
    params: DampedOscillatorParams,
    q0: f64,
    p0: f64,
    w0: f64,
    omega: f64,
    /// Cosine-mode amplitude, `A = q0`.
    amp_cos: f64,
    /// Sine-mode amplitude, `B = (p0 + b q0 / 2) / omega`.
    amp_sin: f64,
    /// Sine coefficient of the momentum, `-omega A - b B / 2`; the cosine
    /// coefficient reduces to `p0` exactly.
    mom_sin: f64,
    /// Initial mechanical energy `H(q0, p0) = p0^2/2 + k q0^2/2`.
    k0: f64,
}

impl DhoExactSolution {
    /// Build the solution through `(q0, p0)` with `w(0) = 0`.
    ///
    /// Fails for critically damped or overdamped parameters (`b^2 >= 4k`).
    pub fn new(params: DampedOscillatorParams, q0: f64, p0: f64) -> Result<Self> {
        Self::with_reservoir(params, q0, p0, 0.0)
    }

    /// Same as [`new`](Self::new) but with a nonzero initial reservoir value;
    /// `w(t) = w0 + K0 - H(t)`.
    pub fn with_reservoir(
        params: DampedOscillatorParams,
        q0: f64,
        p0: f64,
        w0: f64,
    ) -> Result<Self> {
        if !params.is_underdamped() {
            return Err(Error::Overdamped {
                b: params.b,
                k: params.k,
            });
        }
        let omega = (params.k - 0.25 * params.b * params.b).sqrt();
        let amp_sin = (p0 + 0.5 * params.b * q0) / omega;
        Ok(DhoExactSolution {
            params,
            q0,
            p0,
            w0,
            omega,
            amp_cos: q0,
            amp_sin,
            mom_sin: -omega * q0 - 0.5 * params.b * amp_sin,
            k0: 0.5 * p0 * p0 + 0.5 * params.k * q0 * q0,
        })
    }

    /// Build from an augmented state (uses `s.q`, `s.p`, `s.w`).
    pub fn from_state(params: DampedOscillatorParams, s: &State) -> Result<Self> {
        Self::with_reservoir(params, s.q, s.p, s.w)
    }

    pub fn params(&self) -> DampedOscillatorParams {
        self.params
    }

    /// The anchoring initial conditions `(q0, p0)`.
    pub fn initial_conditions(&self) -> (f64, f64) {
        (self.q0, self.p0)
    }

    /// Damped angular frequency `sqrt(k - b^2/4)`.
    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// Initial mechanical energy; the conserved `K` equals `k0 + w0`.
    pub fn k0(&self) -> f64 {
        self.k0
    }

    pub fn position(&self, t: f64) -> f64 {
        let decay = (-0.5 * self.params.b * t).exp();
        let (s, c) = (self.omega * t).sin_cos();
        decay * (self.amp_cos * c + self.amp_sin * s)
    }

    pub fn momentum(&self, t: f64) -> f64 {
        let decay = (-0.5 * self.params.b * t).exp();
        let (s, c) = (self.omega * t).sin_cos();
        // d/dt of the position; its cosine coefficient omega B - b A / 2
        // collapses to p0, which also makes momentum(0) == p0 bit-exact.
        decay * (self.p0 * c + self.mom_sin * s)
    }

    /// Reservoir value `w(t) = w0 + K0 - H(q(t), p(t))`; monotone
    /// non-decreasing for `b >= 0` and exactly zero at `t = 0` when `w0 = 0`.
    pub fn reservoir(&self, t: f64) -> f64 {
        let q = self.position(t);
        let p = self.momentum(t);
        self.w0 + self.k0 - (0.5 * p * p + 0.5 * self.params.k * q * q)
    }

    /// The exact augmented state at time `t`.
    pub fn state_at(&self, t: f64) -> State {
        let q = self.position(t);
        let p = self.momentum(t);
        let w = self.w0 + self.k0 - (0.5 * p * p + 0.5 * self.params.k * q * q);
        State { t, q, p, w }
    }
}
