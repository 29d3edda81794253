//! Augmented dissipative system model: states, built-in systems, the conserved
//! quantity `K`, and continuous-time right-hand sides.
//!
//! Every built-in system is a one-dimensional mechanical system with potential
//! `V(q)`, force `F(q) = -V'(q)` and a dissipative force `D(q, p)`. The
//! reservoir `w` accumulates the work done by `D`, so
//! `K(q, p, w) = p^2/2 + V(q) + w` is conserved along solutions.

use crate::error::{Error, Result};

/// Augmented phase point `(t, q, p, w)`.
///
/// `w` is the reservoir value: the work done by dissipative forces up to time
/// `t`. A freshly initialized trajectory starts with `w = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct State {
    pub t: f64,
    pub q: f64,
    pub p: f64,
    pub w: f64,
}

impl State {
    pub fn new(t: f64, q: f64, p: f64, w: f64) -> Self {
        State { t, q, p, w }
    }

    /// All four components are finite (NaN/Inf anywhere is a hard error state).
    pub fn is_finite(&self) -> bool {
        self.t.is_finite() && self.q.is_finite() && self.p.is_finite() && self.w.is_finite()
    }
}

/// Damped harmonic oscillator parameters: `V = k q^2 / 2`, `D = b p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DampedOscillatorParams {
    /// Damping constant, `b >= 0`.
    pub b: f64,
    /// Stiffness, `k > 0`.
    pub k: f64,
}

impl Default for DampedOscillatorParams {
    fn default() -> Self {
        DampedOscillatorParams { b: 0.1, k: 1.0 }
    }
}

impl DampedOscillatorParams {
    pub fn new(b: f64, k: f64) -> Result<Self> {
        if !(b.is_finite() && b >= 0.0) {
            return Err(Error::InvalidParameter(format!("b must be >= 0, got {b}")));
        }
        if !(k.is_finite() && k > 0.0) {
            return Err(Error::InvalidParameter(format!("k must be > 0, got {k}")));
        }
        Ok(DampedOscillatorParams { b, k })
    }

    /// Oscillatory regime check, `b^2 < 4k`; the closed-form exact solution
    /// exists only here.
    pub fn is_underdamped(&self) -> bool {
        self.b * self.b < 4.0 * self.k
    }
}

/// Duffing oscillator parameters: `V = alpha q^2 / 2 + beta q^4 / 4`, `D = b p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DuffingParams {
    pub alpha: f64,
    pub beta: f64,
    pub b: f64,
}

impl Default for DuffingParams {
    fn default() -> Self {
        DuffingParams {
            alpha: 1.0,
            beta: 1.0,
            b: 0.1,
        }
    }
}

/// Van der Pol oscillator parameters: `V = q^2 / 2`, `D = mu (q^2 - 1) p`.
///
/// The "dissipation" injects energy for `|q| < 1`, which is exactly what the
/// reservoir bookkeeping is built to absorb: `w` simply decreases there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VanDerPolParams {
    pub mu: f64,
}

impl Default for VanDerPolParams {
    fn default() -> Self {
        VanDerPolParams { mu: 1.0 }
    }
}

/// A dissipative mechanical system: potential, force, dissipation, and their
/// discrete counterparts used by the gradient scheme.
///
/// The discrete dissipation is the endpoint average
/// `Dbar(q, q+, p, p+) = (D(q, p) + D(q+, p+)) / 2`, which reduces to
/// `D(q, p)` whenever both endpoints coincide. The potential quotient
/// `(V(q+) - V(q)) / (q+ - q)` is evaluated in reduced polynomial form, so it
/// extends continuously to `V'(q)` on the diagonal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SystemSpec {
    DampedHarmonicOscillator(DampedOscillatorParams),
    Duffing(DuffingParams),
    VanDerPol(VanDerPolParams),
}

impl SystemSpec {
    /// Look up a built-in system by name with default parameters.
    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "dho" => Ok(SystemSpec::DampedHarmonicOscillator(
                DampedOscillatorParams::default(),
            )),
            "duffing" => Ok(SystemSpec::Duffing(DuffingParams::default())),
            "vdp" => Ok(SystemSpec::VanDerPol(VanDerPolParams::default())),
            other => Err(Error::UnknownSystem(other.to_string())),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            SystemSpec::DampedHarmonicOscillator(_) => "dho",
            SystemSpec::Duffing(_) => "duffing",
            SystemSpec::VanDerPol(_) => "vdp",
        }
    }

    /// Oscillator parameters, if this is the damped harmonic oscillator.
    ///
    /// The effective-step coefficients and the leapfrog half-step solve are
    /// specific to `V = k q^2 / 2`, `D = b p`; callers use this to reject other
    /// systems.
    pub fn dho_params(&self) -> Option<DampedOscillatorParams> {
        match self {
            SystemSpec::DampedHarmonicOscillator(p) => Some(*p),
            _ => None,
        }
    }

    pub fn potential(&self, q: f64) -> f64 {
        match self {
            SystemSpec::DampedHarmonicOscillator(p) => 0.5 * p.k * q * q,
            SystemSpec::Duffing(p) => 0.5 * p.alpha * q * q + 0.25 * p.beta * q.powi(4),
            SystemSpec::VanDerPol(_) => 0.5 * q * q,
        }
    }

    /// `V'(q)`.
    pub fn potential_derivative(&self, q: f64) -> f64 {
        match self {
            SystemSpec::DampedHarmonicOscillator(p) => p.k * q,
            SystemSpec::Duffing(p) => p.alpha * q + p.beta * q * q * q,
            SystemSpec::VanDerPol(_) => q,
        }
    }

    /// `F(q) = -V'(q)`.
    pub fn force(&self, q: f64) -> f64 {
        -self.potential_derivative(q)
    }

    pub fn dissipation(&self, q: f64, p: f64) -> f64 {
        match self {
            SystemSpec::DampedHarmonicOscillator(par) => par.b * p,
            SystemSpec::Duffing(par) => par.b * p,
            SystemSpec::VanDerPol(par) => par.mu * (q * q - 1.0) * p,
        }
    }

    /// Endpoint-average discrete dissipation `Dbar`.
    pub fn discrete_dissipation(&self, q: f64, q1: f64, p: f64, p1: f64) -> f64 {
        0.5 * (self.dissipation(q, p) + self.dissipation(q1, p1))
    }

    /// Difference quotient `(V(q1) - V(q)) / (q1 - q)` in division-free
    /// polynomial form, e.g. `k (q + q1) / 2` for the quadratic potential.
    ///
    /// The reduced form agrees with the literal quotient algebraically, stays
    /// free of the `0/0` cancellation that destabilizes the implicit solver
    /// near turning points, and evaluates to `V'(q)` at `q1 = q`, which is the
    /// analytic limit of the quotient.
    pub fn potential_quotient(&self, q: f64, q1: f64) -> f64 {
        let sum = q + q1;
        match self {
            SystemSpec::DampedHarmonicOscillator(p) => 0.5 * p.k * sum,
            SystemSpec::Duffing(p) => {
                0.5 * p.alpha * sum + 0.25 * p.beta * (q * q + q1 * q1) * sum
            }
            SystemSpec::VanDerPol(_) => 0.5 * sum,
        }
    }

    /// Conservative energy `H = p^2/2 + V(q)`; ignores `w`.
    pub fn hamiltonian(&self, s: &State) -> f64 {
        0.5 * s.p * s.p + self.potential(s.q)
    }

    /// The conserved quantity `K = H + w`, additive in `w`.
    pub fn k_energy(&self, s: &State) -> f64 {
        self.hamiltonian(s) + s.w
    }

    /// Continuous right-hand sides `(dq, dp, dw) = (p, F - D, D p)`.
    pub fn continuous_rhs(&self, s: &State) -> (f64, f64, f64) {
        let d = self.dissipation(s.q, s.p);
        (s.p, self.force(s.q) - d, d * s.p)
    }

    /// Gradient of `K` in `(q, p)`: `(V'(q) + D(q, p), p)`.
    ///
    /// The reservoir contributes `dw/dq = D` and `dw/dp = 0`, restoring the
    /// full force through differentiation alone.
    pub fn k_gradient(&self, s: &State) -> (f64, f64) {
        (
            self.potential_derivative(s.q) + self.dissipation(s.q, s.p),
            s.p,
        )
    }
}

/// The built-in system catalog with default parameters.
pub fn builtin_systems() -> Vec<SystemSpec> {
    vec![
        SystemSpec::DampedHarmonicOscillator(DampedOscillatorParams::default()),
        SystemSpec::Duffing(DuffingParams::default()),
        SystemSpec::VanDerPol(VanDerPolParams::default()),
    ]
}
