//! Acceptance suite: one test per verification criterion, each printing a
//! PASS/FAIL line (run with `--nocapture` to see the lines for passing tests).
//!
//! Criterion 3b documents a structural limitation and is expected to stay red:
//! the correction series multiplies a single shared effective step, and no
//! single per-step factor can cancel the third-order error of both the
//! coordinate and the momentum component at once (that would require the state
//! to be an eigenvector of the squared system matrix). The q-matched flavor
//! therefore raises the q-error order to ~3 while its p-errors remain second
//! order. Splitting the correction per equation would fix the p-order but
//! break the exact preservation of K that criteria 1, 2 and 4 pin down.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use resgrad::{
    delta_coefficients, integrate, k_drift_series, moddg_step, pqplf_step, run_order_experiment,
    DampedOscillatorParams, DeltaTag, DeltaVariant, DhoExactSolution, OrderExperiment,
    OrderOutcome, Scheme, State, StepperConfig, SystemSpec,
};

const REFERENCE_B: f64 = 0.1;
const REFERENCE_K: f64 = 1.0;

fn reference_params() -> DampedOscillatorParams {
    DampedOscillatorParams {
        b: REFERENCE_B,
        k: REFERENCE_K,
    }
}

fn paper_sys() -> SystemSpec {
    SystemSpec::DampedHarmonicOscillator(reference_params())
}

fn reference_ics() -> State {
    State::new(0.0, 2.3, -3.1, 0.0)
}

fn order_outcome(scheme: Scheme) -> OrderOutcome {
    let exp = OrderExperiment::reference(scheme);
    run_order_experiment(&paper_sys(), &exp).unwrap()
}

fn max_abs(values: &[f64]) -> f64 {
    values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
}

fn check(line: &str, ok: bool) {
    println!("{}: {line}", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "{line}");
}

/// Criterion 1: K-preservation over 10,000 steps for every correction flavor.
#[test]
fn criterion_1_k_preservation_over_long_run() {
    let sys = paper_sys();
    let cfg = StepperConfig {
        h: 0.01,
        fp_tol: 1e-14,
        fp_max_iter: 500,
    };
    let k0 = sys.k_energy(&reference_ics());
    for tag in [
        DeltaTag::None,
        DeltaTag::Q3,
        DeltaTag::Q4,
        DeltaTag::P3,
        DeltaTag::P4,
    ] {
        let variant = DeltaVariant::new(tag);
        let mut s = reference_ics();
        let mut worst = 0.0_f64;
        for _ in 0..10_000 {
            s = moddg_step(&s, &sys, &cfg, &variant).unwrap().state;
            worst = worst.max((sys.k_energy(&s) - k0).abs());
        }
        check(
            &format!("criterion 1 [{tag:?}]: max |K - K0| = {worst:.3e} <= 1e-10"),
            worst <= 1e-10,
        );
    }
}

/// Criterion 2: the base scheme matches the independently solved 2x2 linear
/// system (quadratic potential, endpoint-average dissipation) per step.
#[test]
fn criterion_2_closed_form_oracle_equivalence() {
    let sys = paper_sys();
    let params = reference_params();
    let mut rng = StdRng::seed_from_u64(0x0c2);
    let mut worst = 0.0_f64;
    for h in [0.1, 0.01] {
        let cfg = StepperConfig::new(h);
        for _ in 0..1000 {
            let s = State::new(
                0.0,
                rng.gen_range(-3.0..3.0),
                rng.gen_range(-3.0..3.0),
                rng.gen_range(-1.0..1.0),
            );
            let out = moddg_step(&s, &sys, &cfg, &DeltaVariant::none())
                .unwrap()
                .state;
            // Independent oracle: Cramer solve of
            //   q+ - (h/2) p+           = q + (h/2) p
            //   (hk/2) q+ + (1+hb/2) p+ = (1-hb/2) p - (hk/2) q
            // then w+ = w + (hb/4)(p+p+)^2.
            let (b, k) = (params.b, params.k);
            let det = 1.0 + 0.5 * h * b + 0.25 * h * h * k;
            let r1 = s.q + 0.5 * h * s.p;
            let r2 = (1.0 - 0.5 * h * b) * s.p - 0.5 * h * k * s.q;
            let q1 = ((1.0 + 0.5 * h * b) * r1 + 0.5 * h * r2) / det;
            let p1 = (-0.5 * h * k * r1 + r2) / det;
            let w1 = s.w + 0.25 * h * b * (s.p + p1) * (s.p + p1);
            worst = worst
                .max((out.q - q1).abs())
                .max((out.p - p1).abs())
                .max((out.w - w1).abs());
        }
    }
    check(
        &format!("criterion 2: max per-step deviation from linear solve = {worst:.3e} <= 1e-12"),
        worst <= 1e-12,
    );
}

/// Criterion 3a: empirical orders of the uncorrected scheme and the two
/// comparison integrators on the reference protocol.
#[test]
fn criterion_3a_empirical_orders_base_erk4_pqplf() {
    let base = order_outcome(Scheme::ModDg(DeltaVariant::none()));
    let erk4 = order_outcome(Scheme::Erk4);
    let pqplf = order_outcome(Scheme::PqpLf);
    check(
        &format!(
            "criterion 3a: base slope_q = {:.4} in [1.8, 2.2]",
            base.q.slope
        ),
        (1.8..=2.2).contains(&base.q.slope),
    );
    check(
        &format!(
            "criterion 3a: erk4 slope_q = {:.4} in [3.8, 4.2]",
            erk4.q.slope
        ),
        (3.8..=4.2).contains(&erk4.q.slope),
    );
    check(
        &format!(
            "criterion 3a: pqplf slope_q = {:.4} in [1.8, 2.2]",
            pqplf.q.slope
        ),
        (1.8..=2.2).contains(&pqplf.q.slope),
    );
}

/// Criterion 3b: empirical orders of the q-matched third-order flavor.
///
/// The p-error band is asserted as specified and is expected to fail: with a
/// single shared effective step the q-matched correction cannot raise the
/// momentum order (see the module comment). Measured p-slopes sit at ~2.0.
#[test]
fn criterion_3b_empirical_orders_q3() {
    let q3 = order_outcome(Scheme::ModDg(DeltaVariant::new(DeltaTag::Q3)));
    println!(
        "criterion 3b measured: slope_q = {:.5}, slope_p = {:.5}, slope_w = {:.5} over h in [0.01, 0.036]",
        q3.q.slope, q3.p.slope, q3.w.slope
    );
    check(
        &format!("criterion 3b: q3 slope_q = {:.4} in [2.8, 3.2]", q3.q.slope),
        (2.8..=3.2).contains(&q3.q.slope),
    );
    check(
        &format!("criterion 3b: q3 slope_w = {:.4} in [1.7, 2.3]", q3.w.slope),
        (1.7..=2.3).contains(&q3.w.slope),
    );
    check(
        &format!(
            "criterion 3b: q3 slope_p = {:.4} in [2.8, 3.2] (unattainable with a shared \
             effective step; kept red as an executable record)",
            q3.p.slope
        ),
        (2.8..=3.2).contains(&q3.p.slope),
    );
}

/// Criterion 3c: the p-matched flavors, asserted through the substitute
/// properties (the fourth-order flavor keeps at least the third-order
/// flavor's momentum order and stays at slope >= 3).
#[test]
fn criterion_3c_empirical_orders_p_variants() {
    let p3 = order_outcome(Scheme::ModDg(DeltaVariant::new(DeltaTag::P3)));
    let p4 = order_outcome(Scheme::ModDg(DeltaVariant::new(DeltaTag::P4)));
    println!(
        "criterion 3c measured: p3 slope_p = {:.5}, p4 slope_p = {:.5}",
        p3.p.slope, p4.p.slope
    );
    check(
        &format!(
            "criterion 3c: p4 slope_p = {:.4} >= p3 slope_p - 0.2 = {:.4}",
            p4.p.slope,
            p3.p.slope - 0.2
        ),
        p4.p.slope >= p3.p.slope - 0.2,
    );
    check(
        &format!("criterion 3c: p4 slope_p = {:.4} >= 3.0", p4.p.slope),
        p4.p.slope >= 3.0,
    );
}

/// Criterion 4: K-drift ordering of the three schemes over t in [0, 50].
#[test]
fn criterion_4_k_drift_ordering() {
    let sys = paper_sys();
    let cfg = StepperConfig::new(0.01);
    let steps = 5000;
    let drift = |scheme: Scheme| -> f64 {
        let traj = integrate(&scheme, &sys, &cfg, reference_ics(), steps).unwrap();
        max_abs(&k_drift_series(&traj, &sys))
    };
    let moddg = drift(Scheme::ModDg(DeltaVariant::none()));
    let erk4 = drift(Scheme::Erk4);
    let pqplf = drift(Scheme::PqpLf);
    println!(
        "criterion 4 measured: moddg = {moddg:.3e}, erk4 = {erk4:.3e}, pqplf = {pqplf:.3e}"
    );
    check(
        &format!("criterion 4: moddg K-drift {moddg:.3e} <= 1e-10"),
        moddg <= 1e-10,
    );
    check(
        &format!("criterion 4: moddg {moddg:.3e} < erk4 {erk4:.3e}"),
        moddg < erk4,
    );
    check(
        &format!("criterion 4: pqplf {pqplf:.3e} > erk4 {erk4:.3e}"),
        pqplf > erk4,
    );
}

/// Criterion 5: raising the correction order does not change the local
/// q-error magnitude (within a factor of 3 at equal h), while shrinking h
/// within a fixed flavor does shrink the error.
#[test]
fn criterion_5_q3_q4_error_magnitudes() {
    let q3 = order_outcome(Scheme::ModDg(DeltaVariant::new(DeltaTag::Q3)));
    let q4 = order_outcome(Scheme::ModDg(DeltaVariant::new(DeltaTag::Q4)));
    let maxes =
        |o: &OrderOutcome| -> Vec<(f64, f64)> {
            o.per_h
                .iter()
                .map(|(h, t)| (*h, t.max_abs(resgrad::Variable::Q)))
                .collect()
        };
    let m3 = maxes(&q3);
    let m4 = maxes(&q4);
    for ((h, a), (_, b)) in m3.iter().zip(m4.iter()) {
        let ratio = (a / b).max(b / a);
        check(
            &format!("criterion 5: q3 vs q4 max |T_q| ratio at h = {h} is {ratio:.2} < 3"),
            ratio < 3.0,
        );
    }
    for (label, m) in [("q3", &m3), ("q4", &m4)] {
        let at = |h: f64| m.iter().find(|(hh, _)| *hh == h).unwrap().1;
        check(
            &format!(
                "criterion 5: {label} max |T_q| at h=0.01 ({:.3e}) < at h=0.036 ({:.3e})",
                at(0.01),
                at(0.036)
            ),
            at(0.01) < at(0.036),
        );
    }
}

/// Criterion 6: reduction checks at b = 0.
#[test]
fn criterion_6_conservative_reductions() {
    let params = DampedOscillatorParams { b: 0.0, k: 1.0 };
    let sys = SystemSpec::DampedHarmonicOscillator(params);
    let cfg = StepperConfig::new(0.05);

    // pqplf against the standard leapfrog, step by step along a trajectory.
    let mut s = State::new(0.0, 2.3, -3.1, 0.0);
    let mut worst_rel = 0.0_f64;
    for _ in 0..1000 {
        let out = pqplf_step(&s, &sys, &cfg).unwrap().state;
        let h = cfg.h;
        let p_half = s.p - 0.5 * h * params.k * s.q;
        let q1 = s.q + h * p_half;
        let p1 = p_half - 0.5 * h * params.k * q1;
        let rel = ((out.q - q1) / q1.abs().max(1.0))
            .abs()
            .max(((out.p - p1) / p1.abs().max(1.0)).abs());
        worst_rel = worst_rel.max(rel);
        s = out;
    }
    check(
        &format!("criterion 6: pqplf vs standard leapfrog at b=0, per-step relative deviation {worst_rel:.3e} <= 1e-15"),
        worst_rel <= 1e-15,
    );

    // moddg conserves H = K exactly (to solver tolerance) without damping.
    let traj = integrate(
        &Scheme::ModDg(DeltaVariant::none()),
        &sys,
        &cfg,
        State::new(0.0, 2.3, -3.1, 0.0),
        1000,
    )
    .unwrap();
    let h0 = sys.hamiltonian(&traj[0]);
    let worst = traj
        .iter()
        .map(|s| (sys.hamiltonian(s) - h0).abs().max(s.w.abs()))
        .fold(0.0_f64, f64::max);
    check(
        &format!("criterion 6: moddg at b=0 conserves H, max |H - H0| and |w| = {worst:.3e} <= 1e-12"),
        worst <= 1e-12,
    );
}

/// Criterion 7: the closed-form oracle satisfies the equations of motion and
/// conserves K.
#[test]
fn criterion_7_exact_solution_oracle() {
    let sol = DhoExactSolution::new(reference_params(), 2.3, -3.1).unwrap();
    let delta = 1e-3;
    let d1 = |f: &dyn Fn(f64) -> f64, t: f64| {
        (f(t - 2.0 * delta) - 8.0 * f(t - delta) + 8.0 * f(t + delta) - f(t + 2.0 * delta))
            / (12.0 * delta)
    };
    let mut worst_residual = 0.0_f64;
    let mut worst_k = 0.0_f64;
    for i in 0..1000 {
        let t = 0.05 * i as f64 + 0.025;
        let q = sol.position(t);
        let p = sol.momentum(t);
        let rq = d1(&|t| sol.position(t), t) - p;
        let rp = d1(&|t| sol.momentum(t), t) + REFERENCE_K * q + REFERENCE_B * p;
        worst_residual = worst_residual.max(rq.abs()).max(rp.abs());
        let s = sol.state_at(t);
        let k = 0.5 * s.p * s.p + 0.5 * REFERENCE_K * s.q * s.q + s.w;
        worst_k = worst_k.max(((k - 7.45) / 7.45).abs());
    }
    check(
        &format!("criterion 7: max ODE residual via finite differences = {worst_residual:.3e} <= 1e-8"),
        worst_residual <= 1e-8,
    );
    check(
        &format!("criterion 7: max relative K deviation along oracle = {worst_k:.3e} <= 1e-12"),
        worst_k <= 1e-12,
    );
}

/// Criterion 8: the correction coefficients' derivative tower agrees with
/// finite differences of the oracle, and the fourth q-coefficient vanishes
/// identically without damping.
#[test]
fn criterion_8_delta_coefficient_oracle() {
    let params = reference_params();
    let mut rng = StdRng::seed_from_u64(0x0c8);
    let delta = 0.02;
    let mut worst = 0.0_f64;
    let mut checked = 0;
    while checked < 100 {
        let q: f64 = rng.gen_range(-3.0..3.0);
        let p: f64 = rng.gen_range(-3.0..3.0);
        if p.abs() <= 0.1 || (q + params.b * p).abs() <= 0.1 {
            continue;
        }
        checked += 1;
        let sol = DhoExactSolution::new(params, q, p).unwrap();
        let f = |i: i32| sol.momentum(i as f64 * delta);
        let fd = [
            (-f(-2) + 16.0 * f(-1) - 30.0 * f(0) + 16.0 * f(1) - f(2)) / (12.0 * delta * delta),
            (f(-3) - 8.0 * f(-2) + 13.0 * f(-1) - 13.0 * f(1) + 8.0 * f(2) - f(3))
                / (8.0 * delta.powi(3)),
            (-f(-3) + 12.0 * f(-2) - 39.0 * f(-1) + 56.0 * f(0) - 39.0 * f(1) + 12.0 * f(2)
                - f(3))
                / (6.0 * delta.powi(4)),
        ];
        let tower = resgrad::derivative_tower(q, p, &params);
        let scale = (q * q + p * p).sqrt();
        for (n, fd_value) in fd.iter().enumerate() {
            let analytic = tower[n + 2].1;
            let rel = (analytic - fd_value).abs() / analytic.abs().max(1e-6 * scale);
            worst = worst.max(rel);
        }
    }
    check(
        &format!("criterion 8: derivative tower vs finite differences, worst relative deviation = {worst:.3e} <= 1e-6"),
        worst <= 1e-6,
    );

    let conservative = DampedOscillatorParams { b: 0.0, k: 1.0 };
    let mut all_zero = true;
    for (q, p) in [(1.0, 0.5), (-2.3, 3.1), (0.0, 1e-3), (7.7, -0.2), (0.3, 42.0)] {
        let c = delta_coefficients(q, p, &conservative, &DeltaVariant::new(DeltaTag::Q4));
        all_zero &= c.d4 == 0.0;
    }
    check(
        "criterion 8: d4 of the q-matched flavor is exactly 0 at b = 0",
        all_zero,
    );
}
