"""Smoke test for the `trapped` extension module.

Build and install with `pip install --no-build-isolation -e crates/python`,
then run `python python/smoke_test.py`.
"""

import math
import tempfile

import trapped


def main():
    g = trapped.Grid(math.pi / 2, 24, 48)
    assert len(g) == 24 * 48

    # w^2 generates a zero mean curvature graph over the hemisphere.
    q = trapped.Field.holomorphic(g, [0, 0, 1])
    assert q.weak_el_residual() < 1e-10
    assert q.el_operator().max_abs() < 1e-4
    imm = q.immersion()
    assert imm["mean_curvature_residual"] < 1e-5
    assert imm["mt_residual"] < 1e-10

    # Complex coefficients and the imaginary part are accepted.
    trapped.Field.holomorphic(g, [0, 0.5j, 1 - 2j], part="im")

    eig = trapped.buckling_eigenvalue(g)
    assert abs(eig["beta1"] - 6.0) < 1e-8, eig
    assert abs(trapped.cap_buckling_shooting(math.pi / 2) - 6.0) < 1e-8

    phi = trapped.Field.bump(g, [1.0, 0.3, 0.0, 0.0])
    f = q + 0.2 * phi
    r = trapped.theorem1_check(q, f, eig["beta1"])
    assert r["area_x"]["total"] <= r["area_y"]["total"] + 1e-8
    assert abs(r["gap"] - r["quarter_energy"]) < 1e-8
    d = trapped.dirichlet_principle_check(q, f, eig["beta1"], {"slack": 1e-9})
    assert d["slack"] >= -1e-9

    sol = trapped.solve_clamped(q)
    assert (sol - q).max_abs() < 1e-10

    for field in [trapped.Field.constant(g, 1.0), trapped.Field.linear(g, [0, 0, 1])]:
        assert abs(field.area()["total"]) < 1e-10
        assert field.immersion()["fully_degenerate"]

    try:
        trapped.Grid(math.pi, 24, 48)
    except ValueError:
        pass
    else:
        raise AssertionError("theta0 = pi must be rejected")

    with tempfile.TemporaryDirectory() as out:
        report = trapped.run("eigen", [f'out_dir="{out}"', "nr=16", "ntheta=32"])
        assert report["passed"], report["failures"]

    print("smoke test passed: beta1(hemisphere) = %.12f" % eig["beta1"])


if __name__ == "__main__":
    main()
