import math

import pytest

import dce


def test_presets():
    assert dce.presets() == ["fig1", "fig2", "fig3", "fig4a", "fig4b", "fig5a", "fig5b"]
    c = dce.preset("fig3")
    assert c["params"]["eta"] == 3.9821
    assert dce.normalize(c) == c


def test_bad_config_raises():
    c = dce.preset("fig1")
    c["colour"] = "red"
    with pytest.raises(dce.ValidationError):
        dce.normalize(c)
    with pytest.raises(dce.ValidationError):
        dce.normalize(dce.preset("fig1"), ["E9=1"])
    with pytest.raises(dce.Error):
        dce.preset("fig9")


def test_sweep_matches_closed_form_far_from_resonance():
    r = dce.run("fig1", ["grid.start=2.0", "grid.stop=2.4", "grid.points=5", "n_max=24"])
    assert r["config"]["n_max"] == 24
    rates = dce.read_csv(r["files"]["rates.csv"])
    assert len(rates["grid_value"]) == 5
    g = r["config"]["params"]["g1"]
    for E1, c in zip(rates["grid_value"], rates["C_abs_0"]):
        far = abs(dce.perturbation.c4_far(1.0, E1, g, 0))
        assert abs(c / far - 1) < 0.25


def test_short_evolution():
    r = dce.run("fig3", ["evolution.t_final=10", "evolution.samples=11", "n_max=12"])
    traj = dce.read_csv(r["files"]["trajectory.csv"])
    assert traj["t"][0] == 0.0
    assert traj["mean_n"][0] == 0.0
    assert traj["mandel_q"][0] is None
    for row in range(11):
        total = sum(traj[f"p_{m}"][row] for m in range(13))
        assert math.isclose(total, 1.0, abs_tol=1e-8)


def test_run_to(tmp_path):
    paths = dce.run_to("fig1", tmp_path / "out", ["command=perturbative"])
    assert paths
    for p in paths:
        assert (tmp_path / "out").joinpath(p.split("/")[-1]).exists()
    blocker = tmp_path / "file"
    blocker.write_text("x")
    with pytest.raises(dce.Error):
        dce.run_to("fig1", blocker / "sub", ["command=perturbative"])


def test_degenerate_point():
    E = dce.perturbation.degenerate_E1(1.0, 0.08, 0)
    assert 2.97 < E < 2.99
    with pytest.raises(dce.SingularityError):
        dce.perturbation.c4_far(1.0, 3.0, 0.08, 0)
