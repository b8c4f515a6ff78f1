import pytest

import seo_sim


def small_config():
    cfg = seo_sim.default_config()
    cfg["table"] = {
        "distance_bins": 8,
        "angle_bins": 7,
        "speed_bins": 5,
        "steer_bins": 3,
    }
    cfg["mode"] = "sensor-gate"
    cfg["filtered"] = False
    cfg["obstacle_count"] = 0
    cfg["seeds"] = [1, 2]
    return cfg


def test_default_config_shape():
    cfg = seo_sim.default_config()
    assert cfg["tau_s"] == pytest.approx(0.02)
    assert cfg["mode"] == "offload"
    ids = {m["id"] for m in cfg["models"]}
    assert {"detector_fast", "detector_slow", "state_estimator"} <= ids
    assert cfg["seeds"] == list(range(1, 26))


def test_discretize_helpers():
    assert seo_sim.discretize_period(0.04, 0.02) == 2
    assert seo_sim.discretize_deadline(0.079, 0.02) == 3
    assert seo_sim.discretize_deadline(0.080, 0.02) == 4


def test_bad_config_raises():
    with pytest.raises(Exception):
        seo_sim.Simulator({"tau_s": -1.0})


def test_episode_summary():
    sim = seo_sim.Simulator(small_config())
    assert sim.config["obstacle_count"] == 0

    s = sim.run_episode(1)
    assert s["status"] == "Completed"
    assert s["staleness_violations"] == 0
    assert s["min_clearance_m"] is None  # no obstacles on the road
    assert s["periods"] > 0
    assert s["final_time_s"] == pytest.approx(s["periods"] * 0.02)
    assert 0.0 < s["report"]["combined_gain"] <= 1.0


def test_episode_is_deterministic():
    sim = seo_sim.Simulator(small_config())
    assert sim.run_episode(7) == sim.run_episode(7)


def test_batch_aggregates_seeds():
    sim = seo_sim.Simulator(small_config())
    batch = sim.run_batch()
    assert [e["seed"] for e in batch["episodes"]] == [1, 2]
    assert batch["completed"] == 2
    gains = [e["report"]["combined_gain"] for e in batch["episodes"]]
    agg = batch["aggregate"]["combined_gain"]
    assert agg == pytest.approx(sum(gains) / len(gains))
