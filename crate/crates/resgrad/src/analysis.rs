//! Error measurement and empirical-order estimation.
//!
//! Local errors follow a base-grid protocol: a base grid `t_i = i h0` is fixed
//! once, and for every measurement step `h` the integrator is re-seeded with
//! the exact state at each `t_i` and advanced a single step of size `h`. The
//! recorded quantity is the increment-function defect
//! `T = (x_exact(t_i + h) - x_numeric) / h`, so runs with different `h` are
//! comparable point by point on the same grid. For a scheme of order `p` the
//! maxima obey `max |T| <= c h^p`, and an ordinary least-squares fit of
//! `log max |T|` against `log h` estimates `p` as the slope. The estimate is a
//! local statement about the measured `h` range; slopes are reported together
//! with their range and never extrapolated.

use crate::error::{Error, Result};
use crate::exact::DhoExactSolution;
use crate::integrators::{Scheme, StepperConfig, DEFAULT_FP_MAX_ITER, DEFAULT_FP_TOL};
use crate::system::{State, SystemSpec};

/// Which component of the augmented state an error series tracks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variable {
    Q,
    P,
    W,
}

impl Variable {
    pub fn label(&self) -> &'static str {
        match self {
            Variable::Q => "q",
            Variable::P => "p",
            Variable::W => "w",
        }
    }

    fn pick(&self, s: &State) -> f64 {
        match self {
            Variable::Q => s.q,
            Variable::P => s.p,
            Variable::W => s.w,
        }
    }
}

/// The measurement steps used for the order experiments.
pub const REFERENCE_H_SET: [f64; 6] = [0.036, 0.03, 0.028, 0.02, 0.017, 0.01];

/// Base-grid step for the order experiments.
pub const REFERENCE_H0: f64 = 0.001;

/// Reference initial conditions `(q, p, w) = (2.3, -3.1, 0)`.
pub fn reference_initial_state() -> State {
    State::new(0.0, 2.3, -3.1, 0.0)
}

/// Configuration of one empirical-order measurement.
#[derive(Debug, Clone)]
pub struct OrderExperiment {
    /// Base grid step `h0 > 0`.
    pub h0: f64,
    /// Measurement steps; at least two distinct positive values.
    pub h_set: Vec<f64>,
    /// Measurement horizon; must exceed every measurement step.
    pub t_end: f64,
    /// Initial state (also the anchor of the exact oracle).
    pub ics: State,
    /// Integrator under measurement.
    pub scheme: Scheme,
    pub fp_tol: f64,
    pub fp_max_iter: u32,
}

impl OrderExperiment {
    /// The reference protocol: `h0 = 0.001`, the standard step set,
    /// `t_end = 20`, initial conditions `(2.3, -3.1, 0)`.
    pub fn reference(scheme: Scheme) -> Self {
        OrderExperiment {
            h0: REFERENCE_H0,
            h_set: REFERENCE_H_SET.to_vec(),
            t_end: 20.0,
            ics: reference_initial_state(),
            scheme,
            fp_tol: DEFAULT_FP_TOL,
            fp_max_iter: DEFAULT_FP_MAX_ITER,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.h0.is_finite() || self.h0 <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "h0 must be positive, got {}",
                self.h0
            )));
        }
        if self.h_set.iter().any(|&h| !h.is_finite() || h <= 0.0) {
            return Err(Error::InvalidParameter(
                "every h in h-set must be positive".to_string(),
            ));
        }
        let mut distinct = self.h_set.to_vec();
        distinct.sort_by(f64::total_cmp);
        distinct.dedup();
        if distinct.len() < 2 {
            return Err(Error::InvalidParameter(
                "h-set needs at least 2 distinct values".to_string(),
            ));
        }
        let h_max = distinct.last().copied().unwrap_or(0.0);
        if !self.t_end.is_finite() || self.t_end <= h_max {
            return Err(Error::InvalidParameter(format!(
                "t_end = {} must exceed the largest measurement step {h_max}",
                self.t_end
            )));
        }
        Ok(())
    }

    fn stepper_config(&self, h: f64) -> StepperConfig {
        StepperConfig {
            h,
            fp_tol: self.fp_tol,
            fp_max_iter: self.fp_max_iter,
        }
    }
}

/// Per-point local errors of one variable plus their maximum magnitude.
#[derive(Debug, Clone)]
pub struct ErrorSeries {
    pub variable: Variable,
    pub values: Vec<f64>,
    pub max_abs: f64,
}

impl ErrorSeries {
    fn from_values(variable: Variable, values: Vec<f64>) -> Self {
        let max_abs = values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        ErrorSeries {
            variable,
            values,
            max_abs,
        }
    }
}

/// Local errors of all three variables on the base grid, for one step size.
#[derive(Debug, Clone)]
pub struct LocalErrorTable {
    /// Base-grid seed times `t_i`.
    pub times: Vec<f64>,
    pub t_q: Vec<f64>,
    pub t_p: Vec<f64>,
    pub t_w: Vec<f64>,
}

impl LocalErrorTable {
    pub fn series(&self, variable: Variable) -> ErrorSeries {
        let values = match variable {
            Variable::Q => self.t_q.clone(),
            Variable::P => self.t_p.clone(),
            Variable::W => self.t_w.clone(),
        };
        ErrorSeries::from_values(variable, values)
    }

    pub fn max_abs(&self, variable: Variable) -> f64 {
        let values = match variable {
            Variable::Q => &self.t_q,
            Variable::P => &self.t_p,
            Variable::W => &self.t_w,
        };
        values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }
}

/// Local errors for one measurement step `h` over the experiment's base grid.
///
/// Each base-grid point is seeded with the exact state at `t_i`; one step of
/// size `h` is taken and `T = (x_exact(t_i + h) - x_numeric) / h` recorded for
/// all three variables. Stepper failures are tagged with the seed time.
pub fn local_error_table(
    sys: &SystemSpec,
    sol: &DhoExactSolution,
    exp: &OrderExperiment,
    h: f64,
) -> Result<LocalErrorTable> {
    let cfg = exp.stepper_config(h);
    let n = (exp.t_end / exp.h0 + 1e-9).floor() as usize;
    let mut table = LocalErrorTable {
        times: Vec::with_capacity(n + 1),
        t_q: Vec::with_capacity(n + 1),
        t_p: Vec::with_capacity(n + 1),
        t_w: Vec::with_capacity(n + 1),
    };
    for i in 0..=n {
        let t = i as f64 * exp.h0;
        let seed = sol.state_at(t);
        let stepped = exp
            .scheme
            .step(&seed, sys, &cfg)
            .map_err(|e| e.at_time(t))?;
        let target = sol.state_at(t + h);
        table.times.push(t);
        table.t_q.push((target.q - stepped.state.q) / h);
        table.t_p.push((target.p - stepped.state.p) / h);
        table.t_w.push((target.w - stepped.state.w) / h);
    }
    Ok(table)
}

/// Local-error series of a single variable; see [`local_error_table`].
pub fn local_error_series(
    sys: &SystemSpec,
    sol: &DhoExactSolution,
    exp: &OrderExperiment,
    h: f64,
    variable: Variable,
) -> Result<ErrorSeries> {
    Ok(local_error_table(sys, sol, exp, h)?.series(variable))
}

/// Global errors `e_i = x_i - x_exact(t_0 + i h)` of a single trajectory run
/// from `ics` with step `h` up to `t_end`.
pub fn global_error_series(
    scheme: &Scheme,
    sys: &SystemSpec,
    sol: &DhoExactSolution,
    ics: State,
    cfg: &StepperConfig,
    t_end: f64,
    variable: Variable,
) -> Result<ErrorSeries> {
    let steps = (t_end / cfg.h + 1e-9).floor() as usize;
    let trajectory = crate::integrators::integrate(scheme, sys, cfg, ics, steps)?;
    let values = trajectory
        .iter()
        .enumerate()
        .map(|(i, s)| {
            // The oracle is anchored at elapsed time zero.
            let exact = sol.state_at(i as f64 * cfg.h);
            variable.pick(s) - variable.pick(&exact)
        })
        .collect();
    Ok(ErrorSeries::from_values(variable, values))
}

/// Least-squares fit of `log max|T|` against `log h`.
#[derive(Debug, Clone)]
pub struct RegressionResult {
    /// Empirical order `p_e`.
    pub slope: f64,
    /// `log c` in the error bound.
    pub intercept: f64,
    /// The fitted `(log h, log max|T|)` pairs.
    pub points: Vec<(f64, f64)>,
    /// Root-mean-square of the fit residuals.
    pub residual_rms: f64,
}

/// Fit `(h, max_abs)` pairs on log-log axes.
pub fn log_log_fit(pairs: &[(f64, f64)]) -> Result<RegressionResult> {
    if pairs.len() < 2 {
        return Err(Error::InvalidParameter(
            "regression needs at least 2 points".to_string(),
        ));
    }
    let mut distinct: Vec<f64> = pairs.iter().map(|&(h, _)| h).collect();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() < 2 {
        return Err(Error::InvalidParameter(
            "regression needs at least 2 distinct h values".to_string(),
        ));
    }
    for &(h, max_abs) in pairs {
        if !h.is_finite() || h <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "step sizes must be positive, got {h}"
            )));
        }
        if max_abs == 0.0 {
            return Err(Error::DegenerateData { h });
        }
    }
    let points: Vec<(f64, f64)> = pairs
        .iter()
        .map(|&(h, m)| (h.ln(), m.ln()))
        .collect();
    let n = points.len() as f64;
    let sx: f64 = points.iter().map(|p| p.0).sum();
    let sy: f64 = points.iter().map(|p| p.1).sum();
    let sxx: f64 = points.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = points.iter().map(|p| p.0 * p.1).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    let intercept = (sy - slope * sx) / n;
    let ss: f64 = points
        .iter()
        .map(|&(x, y)| {
            let r = y - (intercept + slope * x);
            r * r
        })
        .sum();
    let residual_rms = (ss / n).sqrt();
    Ok(RegressionResult {
        slope,
        intercept,
        points,
        residual_rms,
    })
}

/// Empirical order from per-`h` error series: ordinary least squares of
/// `log max|T|` against `log h`; the slope is `p_e`.
pub fn empirical_order(series_per_h: &[(f64, ErrorSeries)]) -> Result<RegressionResult> {
    let pairs: Vec<(f64, f64)> = series_per_h
        .iter()
        .map(|(h, series)| (*h, series.max_abs))
        .collect();
    log_log_fit(&pairs)
}

/// Per-point deviation of `K` from its initial value along a trajectory.
pub fn k_drift_series(trajectory: &[State], sys: &SystemSpec) -> Vec<f64> {
    let Some(first) = trajectory.first() else {
        return Vec::new();
    };
    let k0 = sys.k_energy(first);
    trajectory.iter().map(|s| sys.k_energy(s) - k0).collect()
}

/// Energy loss ratios `R_i = E_{i+1} / E_i` of the conservative energy
/// `E = p^2/2 + V(q)` along a trajectory (`n - 1` values for `n` states).
pub fn energy_loss_ratio(trajectory: &[State], sys: &SystemSpec) -> Result<Vec<f64>> {
    if trajectory.len() < 2 {
        return Err(Error::InvalidParameter(
            "energy loss ratio needs at least 2 trajectory points".to_string(),
        ));
    }
    let energies: Vec<f64> = trajectory.iter().map(|s| sys.hamiltonian(s)).collect();
    if let Some(index) = energies.iter().position(|&e| e == 0.0) {
        return Err(Error::ZeroEnergy { index });
    }
    Ok(energies.windows(2).map(|w| w[1] / w[0]).collect())
}

/// Per-step deviation `|R_i - R_i^exact|` of the energy loss ratio from the
/// closed-form solution sampled at the trajectory's own times.
pub fn energy_loss_deviation(
    trajectory: &[State],
    sys: &SystemSpec,
    sol: &DhoExactSolution,
) -> Result<Vec<f64>> {
    let numeric = energy_loss_ratio(trajectory, sys)?;
    let exact_states: Vec<State> = trajectory.iter().map(|s| sol.state_at(s.t)).collect();
    let exact = energy_loss_ratio(&exact_states, sys)?;
    Ok(numeric
        .iter()
        .zip(exact.iter())
        .map(|(r, re)| (r - re).abs())
        .collect())
}

/// Full order experiment: per-`h` local error tables plus the three
/// per-variable regressions.
#[derive(Debug, Clone)]
pub struct OrderOutcome {
    pub per_h: Vec<(f64, LocalErrorTable)>,
    pub q: RegressionResult,
    pub p: RegressionResult,
    pub w: RegressionResult,
}

impl OrderOutcome {
    pub fn regression(&self, variable: Variable) -> &RegressionResult {
        match variable {
            Variable::Q => &self.q,
            Variable::P => &self.p,
            Variable::W => &self.w,
        }
    }
}

/// Run an order experiment against the closed-form oscillator oracle.
///
/// Requires the damped harmonic oscillator (the only built-in system with an
/// exact solution) in the underdamped regime.
pub fn run_order_experiment(sys: &SystemSpec, exp: &OrderExperiment) -> Result<OrderOutcome> {
    exp.validate()?;
    let params = sys.dho_params().ok_or_else(|| Error::UnsupportedSystem {
        scheme: "order measurement",
        system: sys.name(),
    })?;
    let sol = DhoExactSolution::from_state(params, &exp.ics)?;
    let mut per_h = Vec::with_capacity(exp.h_set.len());
    for &h in &exp.h_set {
        let table = local_error_table(sys, &sol, exp, h)?;
        per_h.push((h, table));
    }
    let fit = |variable: Variable| -> Result<RegressionResult> {
        let pairs: Vec<(f64, f64)> = per_h
            .iter()
            .map(|(h, table)| (*h, table.max_abs(variable)))
            .collect();
        log_log_fit(&pairs)
    };
    Ok(OrderOutcome {
        q: fit(Variable::Q)?,
        p: fit(Variable::P)?,
        w: fit(Variable::W)?,
        per_h,
    })
}
