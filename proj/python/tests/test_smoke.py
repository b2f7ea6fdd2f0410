import math
import pathlib

import numpy as np
import pytest

import fermat

SCENARIOS = pathlib.Path(__file__).resolve().parents[2] / "scenarios"


def test_flat_connect_is_a_segment():
    sc = fermat.flat(2)
    gs = fermat.connect(sc, np.array([0.0, 0.0]), np.array([1.0, 2.0]), seed_velocities=[np.array([1.0, 2.0])])
    assert len(gs) == 1
    assert gs[0].f_length == pytest.approx(math.sqrt(5.0), rel=1e-10)


def test_randers_properties():
    sc = fermat.flat(2, [0.5, 0.0])
    x, y = np.zeros(2), np.array([1.0, 0.0])
    assert fermat.fermat_F(sc, x, y) == pytest.approx((1 + math.sqrt(5)) / 2, rel=1e-14)
    assert fermat.fermat_F_minus(sc, x, y) == pytest.approx(fermat.fermat_F(sc, x, -y), rel=1e-14)
    g = fermat.fundamental_tensor(sc, x, np.array([0.3, -1.0]))
    assert np.all(np.linalg.eigvalsh(g) > 0)


def test_sphere_conjugate_instants_and_bridge():
    sc = fermat.sphere()
    g = fermat.integrate_geodesic(sc, np.array([0.0, 0.6]), np.array([1.0, 0.0]))
    v = 2.5 * math.pi / g.c_x
    g = fermat.integrate_geodesic(sc, np.array([0.0, 0.6]), np.array([v, 0.0]))
    r = fermat.conjugate_instants(g)
    assert r.mu == 2
    assert r.instants == pytest.approx([0.4, 0.8], abs=1e-6)
    cmp = fermat.index_equality_check(g)
    assert cmp["equal"] and cmp["mu_z"] == 2
    lift = fermat.lift_lightlike(g, 1.0)
    assert lift["causal_residual"] < 1e-8
    assert fermat.discrete_index(g, 200)["index"] == 2


def test_morse_and_lensing():
    m = fermat.morse(fermat.flat(2), np.zeros(2), np.array([1.0, 1.0]), l_max=5.0, seed_budget=16)
    assert m["counts"] == {0: 1}
    assert m["Q_coeffs"] == [0] and m["valid"]
    lens = fermat.lensing_count(fermat.lens(0.5, 1.0), np.array([-3.0, 0.0]), np.array([3.0, 0.0]), l_max=12.0)
    assert lens["count"] == 3 and lens["odd"]


def test_scenario_round_trip_and_errors():
    sc = fermat.load_scenario(str(SCENARIOS / "unit_sphere.json"))
    assert fermat.Scenario.from_json(sc.to_json()).to_json() == sc.to_json()
    with pytest.raises(fermat.InvalidScenario):
        fermat.Scenario.from_json('{"dimension": 2, "colour": 1}')
    with pytest.raises(fermat.DegenerateHypothesis):
        fermat.morse(sc, np.array([0.0, 0.6]), np.array([0.0, -1.0 / 0.6]), l_max=1.5 * math.pi, seed_budget=16)


def test_run_writes_report(tmp_path):
    code, files, _ = fermat.run(str(SCENARIOS / "flat_plane.json"), "connect", [0.0, 0.0], [1.0, 2.0], str(tmp_path))
    assert code == 0
    assert any(f.endswith("connect.jsonl") for f in files)
    code, _, msg = fermat.run(str(SCENARIOS / "flat_plane.json"), "morse", [0.0, 0.0], [1.0, 2.0], str(tmp_path))
    assert code == 2 and "l_max" in msg
