#!/usr/bin/env python3
"""Smoke test for the resgrad_py extension module.

Builds nothing itself; expects the cdylib from

    cargo build -p resgrad-py --release

and copies it next to a temp directory under the importable name.
Run from anywhere: python3 python/smoke_test.py
"""

import math
import shutil
import sys
import tempfile
from pathlib import Path

REPO_ROOT = Path(__file__).resolve().parent.parent


def import_module():
    candidates = []
    target = REPO_ROOT / "target"
    for profile in ("release", "debug"):
        candidates.append(target / profile / "libresgrad_py.so")
        candidates.append(target / profile / "resgrad_py.so")
    lib = next((c for c in candidates if c.exists()), None)
    if lib is None:
        sys.exit(
            "libresgrad_py.so not found; build it first:\n"
            "    cargo build -p resgrad-py --release"
        )
    stage = Path(tempfile.mkdtemp(prefix="resgrad_py_"))
    shutil.copy2(lib, stage / "resgrad_py.so")
    sys.path.insert(0, str(stage))
    import resgrad_py

    return resgrad_py


def main():
    rg = import_module()
    checks = 0

    def ok(label, cond):
        nonlocal checks
        checks += 1
        if not cond:
            sys.exit(f"FAIL: {label}")
        print(f"PASS: {label}")

    sys_dho = rg.System.dho(b=0.1, k=1.0)
    state = rg.State(q=2.3, p=-3.1, w=0.0)
    ok("k_energy of reference state is 7.45",
       abs(sys_dho.k_energy(state) - 7.45) < 1e-12)

    dq, dp, dw = sys_dho.continuous_rhs(state)
    ok("continuous rhs matches the equations of motion",
       abs(dq + 3.1) < 1e-15 and abs(dp + 1.99) < 1e-14 and abs(dw - 0.961) < 1e-14)

    # One implicit step preserves K; a long run keeps the drift tiny.
    cfg = rg.StepperConfig(h=0.01)
    out = rg.moddg_step(state, sys_dho, cfg)
    ok("single moddg step preserves K",
       abs(sys_dho.k_energy(out.state) - 7.45) < 1e-12)
    ok("moddg reports its solver effort",
       0 < out.fp_iterations <= 500 and out.delta_factor == 1.0)

    traj = rg.run_trajectory("moddg:q3", sys_dho, cfg, state, 2000)
    ok("trajectory includes the initial state", len(traj) == 2001)
    drift = max(abs(sys_dho.k_energy(s) - 7.45) for s in traj)
    ok(f"K drift over 2000 corrected steps is {drift:.2e} <= 1e-10", drift <= 1e-10)

    # Explicit comparison schemes.
    cons = rg.System.dho(b=0.0, k=1.0)
    unit = rg.State(q=1.0, p=0.0)
    rk = rg.erk4_step(unit, cons, rg.StepperConfig(h=0.1))
    ok("erk4 matches cos(h) to fifth order",
       abs(rk.state.q - math.cos(0.1)) < 1e-7)
    lf = rg.pqplf_step(unit, cons, rg.StepperConfig(h=0.1))
    ok("pqplf reproduces the leapfrog substeps",
       abs(lf.state.q - 0.995) < 1e-15 and abs(lf.state.p + 0.09975) < 1e-15)

    # Closed-form oracle.
    exact = rg.DhoExact(q0=2.3, p0=-3.1, b=0.1, k=1.0)
    s0 = exact.state_at(0.0)
    ok("exact solution reproduces the initial conditions",
       s0.q == 2.3 and s0.p == -3.1 and s0.w == 0.0)
    ks = [sys_dho.k_energy(exact.state_at(0.37 * i)) for i in range(50)]
    ok("exact solution conserves K", max(abs(k - 7.45) for k in ks) < 1e-11)

    # Empirical order of RK4 on a reduced protocol.
    sq, sp, sw = rg.order_slopes("erk4", sys_dho, [0.04, 0.02, 0.01], t_end=5.0)
    ok(f"erk4 empirical order ({sq:.3f}, {sp:.3f}, {sw:.3f}) is ~4",
       all(3.7 <= s <= 4.3 for s in (sq, sp, sw)))

    # Errors surface as Python exceptions.
    try:
        rg.moddg_step(state, rg.System.vdp(mu=1.0), cfg, variant="q3")
    except ValueError as e:
        ok(f"corrections on the wrong system raise ValueError ({e})", True)
    else:
        ok("corrections on the wrong system raise ValueError", False)

    print(f"\nresgrad_py smoke test: all {checks} checks passed")


if __name__ == "__main__":
    main()
