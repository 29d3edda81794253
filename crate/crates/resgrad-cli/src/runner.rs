//! Command execution and CSV emission.
//!
//! All numeric cells are rendered with 17 significant digits in scientific
//! notation with a `.` decimal separator, so identical configs produce
//! byte-identical output.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};
use resgrad::{
    energy_loss_deviation, energy_loss_ratio, integrate, k_drift_series, run_order_experiment,
    DhoExactSolution, OrderExperiment, State, StepperConfig, SystemSpec, Variable,
};

use crate::config::{CommandKind, RunConfig};

fn fmt(x: f64) -> String {
    format!("{:.16e}", x)
}

fn writer(path: &Path) -> Result<BufWriter<File>> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)
                .with_context(|| format!("cannot create directory {}", parent.display()))?;
        }
    }
    let file =
        File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    Ok(BufWriter::new(file))
}

fn step_count(t_end: f64, h: f64) -> usize {
    (t_end / h + 1e-9).floor() as usize
}

fn stepper_config(config: &RunConfig) -> StepperConfig {
    StepperConfig {
        h: config.h,
        fp_tol: config.fp_tol,
        fp_max_iter: config.fp_max_iter,
    }
}

/// Execute the configured command.
pub fn run(config: &RunConfig) -> Result<()> {
    match config.command {
        CommandKind::Simulate => simulate(config),
        CommandKind::Order => order(config),
        CommandKind::Compare => compare(config),
        CommandKind::Exact => exact(config),
    }
}

/// Write a `step,t,q,p,w,K,E,R` table. The ratio column carries the energy
/// ratio of the step ending at the row; row 0 gets the neutral value 1.
fn write_trajectory_csv(path: &Path, sys: &SystemSpec, trajectory: &[State]) -> Result<()> {
    let ratios = energy_loss_ratio(trajectory, sys).map_err(|e| anyhow::anyhow!("{e}"))?;
    let mut out = writer(path)?;
    writeln!(out, "step,t,q,p,w,K,E,R")?;
    for (i, s) in trajectory.iter().enumerate() {
        let r = if i == 0 { 1.0 } else { ratios[i - 1] };
        writeln!(
            out,
            "{i},{},{},{},{},{},{},{}",
            fmt(s.t),
            fmt(s.q),
            fmt(s.p),
            fmt(s.w),
            fmt(sys.k_energy(s)),
            fmt(sys.hamiltonian(s)),
            fmt(r)
        )?;
    }
    out.flush()?;
    Ok(())
}

fn simulate(config: &RunConfig) -> Result<()> {
    if config.integrators.len() != 1 {
        bail!(
            "simulate expects exactly one --integrator, got {}",
            config.integrators.len()
        );
    }
    let scheme = config.integrators[0];
    let cfg = stepper_config(config);
    let steps = step_count(config.t_end, config.h);
    let trajectory = integrate(&scheme, &config.system, &cfg, config.ics, steps)
        .map_err(|e| anyhow::anyhow!("{e}"))?;
    write_trajectory_csv(&config.out, &config.system, &trajectory)?;
    println!(
        "simulate: {} steps of {} with h = {} -> {}",
        steps,
        scheme.label(),
        config.h,
        config.out.display()
    );
    Ok(())
}

fn exact(config: &RunConfig) -> Result<()> {
    let params = config
        .system
        .dho_params()
        .ok_or_else(|| anyhow::anyhow!("exact requires --system dho"))?;
    let sol =
        DhoExactSolution::from_state(params, &config.ics).map_err(|e| anyhow::anyhow!("{e}"))?;
    let steps = step_count(config.t_end, config.h);
    let trajectory: Vec<State> = (0..=steps)
        .map(|i| sol.state_at(i as f64 * config.h))
        .collect();
    write_trajectory_csv(&config.out, &config.system, &trajectory)?;
    println!(
        "exact: {} samples at h = {} -> {}",
        steps + 1,
        config.h,
        config.out.display()
    );
    Ok(())
}

fn order(config: &RunConfig) -> Result<()> {
    fs::create_dir_all(&config.out)
        .with_context(|| format!("cannot create directory {}", config.out.display()))?;
    for scheme in &config.integrators {
        let exp = OrderExperiment {
            h0: config.h0,
            h_set: config.h_set.clone(),
            t_end: config.t_end,
            ics: config.ics,
            scheme: *scheme,
            fp_tol: config.fp_tol,
            fp_max_iter: config.fp_max_iter,
        };
        let outcome =
            run_order_experiment(&config.system, &exp).map_err(|e| anyhow::anyhow!("{e}"))?;
        let label = scheme.label();
        for (h, table) in &outcome.per_h {
            let path = config.out.join(format!("errors_{label}_h{h}.csv"));
            let mut out = writer(&path)?;
            writeln!(out, "i,t,T_q,T_p,T_w")?;
            for i in 0..table.times.len() {
                writeln!(
                    out,
                    "{i},{},{},{},{}",
                    fmt(table.times[i]),
                    fmt(table.t_q[i]),
                    fmt(table.t_p[i]),
                    fmt(table.t_w[i])
                )?;
            }
            out.flush()?;
        }
        let summary_path = config.out.join(format!("summary_{label}.csv"));
        let mut out = writer(&summary_path)?;
        writeln!(out, "variable,slope,intercept,residual_rms")?;
        for variable in [Variable::Q, Variable::P, Variable::W] {
            let reg = outcome.regression(variable);
            writeln!(
                out,
                "{},{},{},{}",
                variable.label(),
                fmt(reg.slope),
                fmt(reg.intercept),
                fmt(reg.residual_rms)
            )?;
        }
        out.flush()?;
        let h_min = config.h_set.iter().copied().fold(f64::INFINITY, f64::min);
        let h_max = config.h_set.iter().copied().fold(0.0_f64, f64::max);
        println!(
            "order [{label}]: slope_q = {:.5}, slope_p = {:.5}, slope_w = {:.5} (h in [{h_min}, {h_max}]) -> {}",
            outcome.q.slope,
            outcome.p.slope,
            outcome.w.slope,
            summary_path.display()
        );
    }
    Ok(())
}

fn compare(config: &RunConfig) -> Result<()> {
    let params = config
        .system
        .dho_params()
        .ok_or_else(|| anyhow::anyhow!("compare requires --system dho (it measures against the closed-form solution)"))?;
    let sol =
        DhoExactSolution::from_state(params, &config.ics).map_err(|e| anyhow::anyhow!("{e}"))?;
    let cfg = stepper_config(config);
    let steps = step_count(config.t_end, config.h);

    struct SchemeColumns {
        label: String,
        t_q: Vec<f64>,
        t_p: Vec<f64>,
        k_drift: Vec<f64>,
        d_r: Vec<f64>,
    }

    let mut columns = Vec::new();
    for scheme in &config.integrators {
        let trajectory = integrate(scheme, &config.system, &cfg, config.ics, steps)
            .map_err(|e| anyhow::anyhow!("{e}"))?;
        let k_drift = k_drift_series(&trajectory, &config.system);
        let d_r = energy_loss_deviation(&trajectory, &config.system, &sol)
            .map_err(|e| anyhow::anyhow!("{e}"))?;
        // Local errors on the run's own grid: base step = measurement step.
        let exp = OrderExperiment {
            h0: config.h,
            h_set: vec![config.h, config.h * 0.5],
            t_end: config.t_end,
            ics: config.ics,
            scheme: *scheme,
            fp_tol: config.fp_tol,
            fp_max_iter: config.fp_max_iter,
        };
        let table = resgrad::local_error_table(&config.system, &sol, &exp, config.h)
            .map_err(|e| anyhow::anyhow!("{e}"))?;
        columns.push(SchemeColumns {
            label: scheme.label(),
            t_q: table.t_q,
            t_p: table.t_p,
            k_drift,
            d_r,
        });
    }

    let mut out = writer(&config.out)?;
    let mut header = String::from("step,t");
    for c in &columns {
        header.push_str(&format!(
            ",q_{label},p_{label},Kdrift_{label},dR_{label}",
            label = c.label
        ));
    }
    writeln!(out, "{header}")?;
    for i in 0..=steps {
        let mut row = format!("{i},{}", fmt(i as f64 * config.h));
        for c in &columns {
            let d_r = if i == 0 { 0.0 } else { c.d_r[i - 1] };
            row.push_str(&format!(
                ",{},{},{},{}",
                fmt(c.t_q[i]),
                fmt(c.t_p[i]),
                fmt(c.k_drift[i]),
                fmt(d_r)
            ));
        }
        writeln!(out, "{row}")?;
    }
    out.flush()?;

    for c in &columns {
        let max_drift = c.k_drift.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        println!("compare [{}]: max |K drift| = {:.3e}", c.label, max_drift);
    }
    println!("compare: {} rows -> {}", steps + 1, config.out.display());
    Ok(())
}
