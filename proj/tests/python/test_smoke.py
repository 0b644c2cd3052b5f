import math

import pytest

import madesign as md


def test_eta_and_radius_reference_values():
    assert md.eta_for_horizon(0.05, 10000) == pytest.approx(0.02817118137696317, rel=1e-12)
    assert md.asymptotic_radius(0.0, 1, 0.028, 0.05) == pytest.approx(87.41952966717202, rel=1e-12)


def test_mix_bounds_each_arm():
    probs = md.mix(0.2, [0.0, 1.0, 0.0])
    assert sum(probs) == pytest.approx(1.0)
    assert min(probs) >= 0.2 / 3 - 1e-15
    with pytest.raises(ValueError):
        md.mix(0.0, [0.5, 0.5])


def test_schedule_and_ipw():
    clipped = md.DeltaSchedule("clipped_max", a=0.24, c=0.2)
    assert clipped(10**6) == 0.2
    assert md.evaluate_schedule(md.DeltaSchedule("power", a=0.24), 10**6) == pytest.approx(0.03630780547701013)
    assert md.ipw_step(1, 0.6, [0.2, 0.3, 0.5]) == pytest.approx((2.0, 4.0))
    with pytest.raises(md.InvariantError):
        md.ipw_step(0, 1.0, [0.0, 1.0])
    with pytest.raises(md.ParameterError):
        md.DeltaSchedule("power", a=-1.0)


def test_trajectory_track_and_stop():
    table = md.generate_table("bernoulli", [0.2, 0.8], 2000, seed=3)
    assert len(table) == 2000
    truth = md.true_ate_curve(table)
    assert abs(truth[-1] - 0.6) < 0.1
    schedule = md.DeltaSchedule("clipped_max", a=0.24, c=0.2)
    traj = md.run_trajectory(table, "thompson_beta", schedule, seed=1)
    assert traj == md.run_trajectory(table, "thompson_beta", schedule, seed=1)
    assert len(traj) == 2000
    assert all(min(p) >= 0.1 - 1e-15 for p in traj.probs)
    track = md.cs_track(traj, md.eta_for_horizon(0.05, 2000))
    assert len(track) == 2000
    assert all(r > 0 and math.isfinite(r) for r in track.radius)
    stop = md.stopping_time(track)
    assert stop is not None and 1 <= stop <= 2000
    assert track.to_csv().startswith("t,center,radius,S_hat,stopped_flag\n")


def test_presets_run_from_python():
    names = md.list_presets()
    for name in ("fig1", "race_low", "nonstat_b", "howard_compare"):
        assert name in names
    result = md.run_preset("fig1", seed=7, replicates=3, horizon=200)
    coverage, se = result["final"][("ate_0.6", "clipped_mad", "1-0")]["coverage"]
    assert 0.0 <= coverage <= 1.0
    assert result["metrics_csv"].startswith("setting,design,contrast,t,metric,mean,se\n")
    again = md.run_preset("fig1", seed=7, replicates=3, horizon=200, jobs=2)
    assert again["metrics_csv"] == result["metrics_csv"]
    race = md.run_preset("race_high", seed=1, replicates=3, horizon=500)
    assert "median_gap" in race


def test_run_preset_accepts_json_config():
    cfg = '{"preset": "normal", "replicates": 2, "horizon": 100}'
    result = md.run_preset(cfg, seed=1)
    assert result["preset"] == "normal"
    with pytest.raises(ValueError):
        md.run_preset('{"preset": "fig1", "alpha": 2.0}')
    with pytest.raises(ValueError):
        md.run_preset("no_such_preset_or_json")
