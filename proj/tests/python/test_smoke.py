import json
import math

import pytest

import eigenflow as ef


def test_version_is_semver():
    assert len(ef.__version__.split(".")) == 3


def test_domain_geometry():
    disk = ef.ball((0.0, 0.0), 1.0)
    assert disk.dim == 2
    assert disk.inside((0.3, 0.4))
    assert not disk.inside((1.2, 0.0))
    assert disk.enclosing_radius() == pytest.approx(1.0)
    assert disk.inscribed_radius() == pytest.approx(1.0)
    assert disk.exterior_distance((2.0, 0.0)) == pytest.approx(1.0)
    assert disk.project((2.0, 0.0)) == pytest.approx((1.0, 0.0))

    lens = ef.ball_intersection([(-0.5, 0.0), (0.5, 0.0)], [1.0, 1.0])
    assert lens.inscribed_radius() == pytest.approx(0.5)

    egg = ef.ellipsoid((0.0, 0.0, 0.0), (2.0, 1.0, 0.5))
    assert egg.dim == 3
    assert egg.enclosing_radius() == pytest.approx(2.0)


def test_parabolic_keeps_affine_data_fixed():
    disk = ef.ball((0.0, 0.0), 1.0)

    def aff(x):
        return 0.5 * x[0] - 0.25 * x[1] + 0.1

    out = ef.solve_parabolic(
        disk, lambda x, t: aff(x), aff, epsilon=0.2, h=0.1, j=1, horizon=0.1, resolution=20
    )
    assert out["times"][0] == 0.0
    assert out["times"][-1] >= 0.1 - 1e-12
    last = out["values"][-1]
    for i in out["interior"]:
        assert last[i] == pytest.approx(aff(out["points"][i]), abs=1e-9)


def test_elliptic_recovers_affine_data():
    disk = ef.ball((0.0, 0.0), 1.0)
    out = ef.solve_elliptic(
        disk, lambda x: x[0], epsilon=0.2, h=0.1, j=1, resolution=20, tol=1e-9
    )
    assert out["converged"]
    for i in out["interior"]:
        assert out["value"][i] == pytest.approx(out["points"][i][0], abs=1e-5)


def test_envelope_of_saddle_datum():
    disk = ef.ball((0.0, 0.0), 1.0)
    saddle = lambda x: x[0] * x[0] - x[1] * x[1]
    v = ef.boundary_envelope_value(disk, saddle, (0.5, 0.0), spacing=0.05)
    assert v == pytest.approx(2 * 0.25 - 1.0, abs=0.05)
    w = ef.boundary_envelope_value(disk, saddle, (0.0, 0.5), spacing=0.05, concave=True)
    assert w == pytest.approx(1.0 - 2 * 0.25, abs=0.05)


def test_interval_eigenvalue_near_pi_squared():
    segment = ef.ball((0.5,), 0.5)
    out = ef.estimate_principal_eigenvalue(segment, epsilon=0.05, h=0.02)
    assert out["converged"]
    assert out["mu"] == pytest.approx(math.pi**2, rel=0.2)


def test_incompatible_data_raises():
    disk = ef.ball((0.0, 0.0), 1.0)
    with pytest.raises(ValueError):
        ef.solve_parabolic(
            disk, lambda x, t: 0.0, lambda x: 1.0, epsilon=0.2, h=0.1, horizon=0.1
        )


def test_scenario_runs_and_writes_artifacts(tmp_path):
    out_dir = tmp_path / "heat"
    res = ef.run_scenario("heat1d", out_dir=str(out_dir), seed=1)
    assert res["exit_code"] == 0
    assert res["checks"] and all(c["passed"] for c in res["checks"])
    meta = json.loads((out_dir / "meta.json").read_text())
    assert meta["scenario"] == "heat1d"
    assert ef.scenario_names()[0] == "heat1d"
    assert res["message"] == ""
