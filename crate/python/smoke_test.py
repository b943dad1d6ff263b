"""Smoke test for the heatctl extension module.

Build and install first:  pip install --no-build-isolation -e crates/py
Run with:  python python/smoke_test.py  (or pytest python/)
"""

import json
import math

import heatctl


def test_params_and_guard():
    p = heatctl.ControlParams(2.0, 6.0, 3, 3, 10)
    assert (p.T, p.T_star, p.N, p.M, p.l) == (2.0, 6.0, 3, 3, 10)
    assert p.guard_satisfied()
    bad = heatctl.ControlParams(2.0, None, 6, 3, 2)
    assert bad.T_star == 6.0
    try:
        bad.check_guard()
    except ValueError as e:
        assert "l >= 2(N+2)/T" in str(e)
    else:
        raise AssertionError("guard violation not raised")


def test_basis_and_spectra():
    assert heatctl.hermite(1, 0.7) == 1.4
    psi0 = heatctl.psi_scaled(2.0, 0, 0.0)
    assert abs(psi0 - 4.0 ** -0.25 * math.pi ** -0.25) < 1e-15
    assert abs(heatctl.psi_hat(2.0, 1, 0.3).real) == 0.0
    for p in range(4):
        z = heatctl.z_terminal(p, 40, 2.0, 0.7)
        phi = heatctl.phi_l(p, 40, 2.0, 0.7)
        assert abs(z + math.sqrt(2.0 / math.pi) * phi) < 1e-12
    assert heatctl.delta_moment_residual(2, 10, [0.0, 0.0, 1.0]) < 1e-12


def test_budget_and_control():
    p = heatctl.ControlParams(2.0, 6.0, 3, 3, 10)
    b = heatctl.error_budget(p)
    assert abs(b.total - 2.458819) < 1e-6 and b.frozen
    u = heatctl.synthesize_example(p)
    assert len(u.g_pm) == 4 and len(u.g_pm[0]) == 4
    assert u.eval(0.5, 1.9) == 0.0
    back = heatctl.SynthesizedControl.from_json(u.to_json())
    assert back.eval(0.5, 0.05) == u.eval(0.5, 0.05)


def test_run_example():
    r = heatctl.run_example(heatctl.ControlParams(), grid_n=256)
    assert r.passed
    assert r.measured_error <= r.budget.total + 1e-3
    assert json.loads(r.to_json())["params"]["N"] == 3


def test_counterexample():
    rows = heatctl.counterexample(2.0, 6)
    norms = [r[2] for r in rows]
    assert all(b > a for a, b in zip(norms, norms[1:]))
    ratio = rows[2][3] / rows[1][3]
    assert abs(ratio - 2.0 ** 0.25) < 1e-9


if __name__ == "__main__":
    for name, fn in list(globals().items()):
        if name.startswith("test_"):
            fn()
            print("ok", name)
