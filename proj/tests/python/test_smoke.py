import json

import pytest

import risuav

SMALL = json.dumps({"arrays": {"uav_rows": 2, "uav_cols": 2, "ris_rows": 2, "ris_cols": 2}})


def test_default_scenario_shape():
    s = risuav.Scenario()
    assert (s.num_uavs, s.num_users, s.num_slots, s.num_ris) == (2, 4, 4, 2)
    assert s.antennas == 64
    assert len(s.user_positions) == 4
    assert all(p[2] == 0.0 for p in s.user_positions)
    assert s.power_w == pytest.approx(risuav.dbm_to_watts(5.0))


def test_config_errors_raise():
    with pytest.raises(risuav.ConfigError, match="R ≤ N"):
        risuav.Scenario.from_json(json.dumps({"network": {"ris": 3}}))
    with pytest.raises(ValueError):
        risuav.run_experiment(risuav.Scenario.from_json(SMALL), mode="best")


def test_modes_listed():
    assert risuav.modes() == ["joint", "fixed-sched", "no-beam-ris", "no-deploy", "random", "no-ris"]


def test_random_run_and_csv_round_trip():
    s = risuav.Scenario.from_json(SMALL)
    results = risuav.run_experiment(s, mode="random", timeblocks=5)
    assert [r.timeblock for r in results] == list(range(5))
    rows = risuav.read_results(risuav.results_csv(results))
    assert len(rows) == 5
    for row, r in zip(rows, results):
        assert row["mode"] == "random"
        assert row["sum_rate"] == r.sum_rate
    again = risuav.run_experiment(s, mode="random", timeblocks=5)
    assert risuav.results_csv(again) == risuav.results_csv(results)


def test_joint_trace_is_monotone():
    s = risuav.Scenario.from_json(SMALL)
    (r,) = risuav.run_experiment(s, mode="joint", timeblocks=1)
    assert len(r.trace) == r.iterations + 1
    assert all(b >= a for a, b in zip(r.trace, r.trace[1:]))
    assert r.sum_rate == r.trace[-1]


def test_sweep_groups():
    s = risuav.Scenario.from_json(SMALL)
    groups = risuav.sweep(s, "num_ris", [0, 1, 2], mode="random", timeblocks=2)
    assert [v for v, _ in groups] == [0, 1, 2]
    rows = risuav.read_results(risuav.sweep_csv("num_ris", groups))
    assert len(rows) == 6
    assert {r["axis"] for r in rows} == {"num_ris"}
    assert s.with_axis("num_ris", 1).num_ris == 1


def test_oracle_and_sign_test():
    rep = risuav.oracle_check(instances=4, seed=5)
    assert rep.instances == 4
    assert rep.mismatches == 0
    t = risuav.paired_sign_test([1.0] * 9 + [0.0], [0.0] * 9 + [1.0])
    assert t.wins == 9
    assert t.p_value == pytest.approx(11 / 1024)


def test_blockage_probability_limits():
    assert risuav.no_blockage_probability(90.0) > 0.99
    assert risuav.no_blockage_probability(10.0) < risuav.no_blockage_probability(60.0)
