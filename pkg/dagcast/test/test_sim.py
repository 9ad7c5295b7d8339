#!/usr/bin/env python
# -*- coding: utf-8 -*-
import functools
import json
import time
from fractions import Fraction

import numpy as np
import pytest

import dagcast.graph as graph
import dagcast.sim as sim
from dagcast.capacity import static_table
from dagcast.connectivity import IidLinkProcess


def config(net, process=None, **kwargs):
    kwargs.setdefault("slots", 2000)
    kwargs.setdefault("seed", 1)
    return sim.SimConfig(net, process or static_table(net), **kwargs)


def iid(net, p):
    return IidLinkProcess.uniform(net.m, Fraction(p))


def test_no_arrivals(grid):
    report = sim.run(config(grid, lam=0.0))

    assert report.arrivals == 0
    assert set(report.series) == {0}
    assert report.delays == []
    assert report.mean_delay is None
    assert report.delivered_rate == 0


def test_deterministic_arrivals(grid):
    report = sim.run(config(grid, lam=0.25, slots=100,
                            arrival="deterministic"))
    assert report.arrivals == 25


def test_reproducible(grid):
    cfg = config(grid, iid(grid, "0.6"), policy="piprime", lam=0.15)
    first = json.dumps(sim.run(cfg).to_dict(), sort_keys=True)
    again = json.dumps(sim.run(cfg).to_dict(), sort_keys=True)
    other = json.dumps(sim.run(cfg.replace(seed=2)).to_dict(), sort_keys=True)

    assert first == again
    assert first != other


@pytest.mark.parametrize(
    "policy,process",
    (
        ("pistar", "0.6"),
        ("piprime", "0.6"),
        ("pistar", None),
        ("rand", None),
    ),
)
def test_invariants_every_slot(grid, policy, process):
    process = iid(grid, process) if process else static_table(grid)
    cfg = config(grid, process, policy=policy, lam=0.2,
                 check_level="every-slot",
                 lambda_design=0.3 if policy == "rand" else None)
    report = sim.run(cfg)

    assert report.checks == cfg.slots
    assert report.delivered_rate <= report.arrival_rate
    assert all(d >= 1 for d in report.delays)


def test_sampled_checks(grid):
    report = sim.run(config(grid, lam=0.2, check_level="sampled",
                            check_stride=100))
    assert report.checks == 20

    report = sim.run(config(grid, lam=0.2, check_level="off"))
    assert report.checks == 0


def test_zero_staleness_matches_pistar(grid):
    cfg = config(grid, lam=0.3, slots=3000)
    exact = sim.run(cfg)
    delayed = sim.run(cfg.replace(policy="piprime"))

    assert delayed.frontier.tolist() == exact.frontier.tolist()
    assert delayed.series == exact.series
    assert delayed.delays == exact.delays
    assert delayed.max_weight_gap == 0


def test_broken_transfer_is_caught(grid, monkeypatch):
    monkeypatch.setattr(sim, "transfer_amounts",
                        lambda net, R, act, view=None:
                        np.full(net.m, 5, dtype=np.int64))

    with pytest.raises(sim.InvariantViolation) as info:
        sim.run(config(grid, lam=1.0, arrival="deterministic",
                       check_level="every-slot"))

    assert info.value.slot == 0
    assert info.value.check in ("source", "in-neighbours")


def test_matchings_enumerated_once_per_configuration(grid, monkeypatch):
    calls = []
    enumerate_matchings = graph.enumerate_matchings

    def counting(net, on, limit=None):
        calls.append(on.bits)
        return enumerate_matchings(net, on, limit)

    monkeypatch.setattr(graph, "enumerate_matchings", counting)
    sim.run(config(grid, lam=0.3, slots=500))

    assert calls == [grid.full_mask().bits]


def test_mean_staleness(twolink):
    report = sim.run(config(twolink, iid(twolink, "0.5"), policy="piprime",
                            lam=0.1, slots=4000))
    assert report.mean_staleness.tolist() == pytest.approx([2, 2], abs=0.2)

    out = report.to_dict()
    assert sorted(out["mean_staleness"]) == ["r->a", "r->b"]
    assert "max_weight_gap" in out


def test_rand_incoming_rates(grid):
    cfg = config(grid, policy="rand", lam=0.2, lambda_design=0.3,
                 slots=20000)
    spec = sim._rand_spec(cfg)
    report = sim.run(cfg, rand_spec=spec)

    for v in range(1, grid.n):
        assert report.incoming_rates[v] == \
            pytest.approx(spec.target_rate(v), abs=0.015)


def test_short_run_has_no_verdict(grid):
    report = sim.run(config(grid, lam=0.1, slots=500))

    assert report.verdict is None
    assert report.stable is None
    assert "1000" in report.verdict_note
    assert report.to_dict()["stability"]["stable"] is None


def test_report_layout(grid):
    out = sim.run(config(grid, lam=0.1, p=0.5)).to_dict()

    assert out["schema"] == 1
    assert out["rng"] == "numpy-pcg64/1"
    assert out["p"] == 0.5
    assert len(out["frontier"]) == grid.n - 1
    assert len(out["series"]["slots"]) == len(out["series"]["sum_x"])
    assert out["stability"]["stable"] is True
    assert "mean_staleness" not in out


class TestSimConfig:

    def test_defaults(self, grid):
        cfg = config(grid, slots=5000)
        assert cfg.warmup == 500
        assert cfg.check_level == "sampled"
        assert cfg.update_prob == 1.0

    def test_replace(self, grid):
        cfg = config(grid, lam=0.1)
        other = cfg.replace(lam=0.2, seed=9)
        assert (other.lam, other.seed, other.slots) == (0.2, 9, cfg.slots)
        assert cfg.lam == 0.1

    @pytest.mark.parametrize(
        "field,changes",
        (
            ("slots", dict(slots=0)),
            ("slots", dict(slots=-3)),
            ("slots", dict(slots=1.5)),
            ("slots", dict(slots=True)),
            ("lambda", dict(lam=-0.1)),
            ("lambda", dict(lam=float("nan"))),
            ("lambda", dict(lam="0.1")),
            ("lambda", dict(lam=150)),
            ("arrival", dict(arrival="bursty")),
            ("warmup", dict(warmup=2000)),
            ("warmup", dict(warmup=-1)),
            ("seed", dict(seed=-1)),
            ("policy", dict(policy="greedy")),
            ("lambda_design", dict(policy="rand")),
            ("check_level", dict(check_level="always")),
            ("update_prob", dict(update_prob=0)),
            ("update_prob", dict(update_prob=1.5)),
        ),
    )
    def test_rejects(self, grid, field, changes):
        with pytest.raises(sim.SimConfigError) as info:
            config(grid, **changes)
        assert info.value.field == field

    def test_process_mismatch(self, grid, twolink):
        with pytest.raises(sim.SimConfigError) as info:
            sim.SimConfig(grid, static_table(twolink))
        assert info.value.field == "process"


class TestStabilityVerdict:

    def test_flat(self):
        verdict = sim.stability_verdict(np.ones(1000))
        assert verdict.stable
        assert verdict.slope == pytest.approx(0, abs=1e-9)

    def test_growing(self):
        verdict = sim.stability_verdict(np.arange(2000))
        assert not verdict.stable
        assert verdict.slope == pytest.approx(1)

    @pytest.mark.parametrize("theta,stable", ((0.01, True), (0.001, False)))
    def test_threshold(self, theta, stable):
        verdict = sim.stability_verdict(0.005 * np.arange(2000), theta=theta)
        assert verdict.stable == stable

    def test_capacity_scales_threshold(self):
        series = 0.02 * np.arange(2000)
        assert not sim.stability_verdict(series, c_max=1).stable
        assert sim.stability_verdict(series, c_max=3).stable

    def test_uses_slot_times(self):
        times = np.arange(0, 20000, 10)
        verdict = sim.stability_verdict(np.arange(2000), times=times)
        assert verdict.slope == pytest.approx(0.1)

    def test_too_short(self):
        with pytest.raises(sim.SeriesTooShort) as info:
            sim.stability_verdict(np.ones(999))
        assert info.value.required == 1000


def test_bracket(grid):
    cfg = config(grid, slots=5000)
    bracket = sim.bracket_capacity(cfg, [0.6, 0.1])

    assert (bracket.stable, bracket.unstable) == (0.1, 0.6)
    assert [lam for lam, _ in bracket.verdicts] == [0.1, 0.6]


class TestSweep:

    def test_empty(self):
        assert sim.sweep([]) == []

    def test_rows_follow_input_order(self, grid):
        cfgs = [config(grid, lam=lam, slots=1500, seed=3, p=1.0)
                for lam in (0.1, 0.05)]
        rows = sim.sweep(cfgs)

        assert [row["lambda"] for row in rows] == ["0.1", "0.05"]
        assert [row["seed"] for row in rows] == ["3", "3"]
        assert all(row["stable"] == "true" for row in rows)
        assert all(row["p"] == "1.0" for row in rows)

    def test_failed_row_is_kept(self, grid):
        cfgs = [config(grid, policy="rand", lambda_design=0.5, lam=0.1),
                config(grid, lam=0.1)]
        rows = sim.sweep(cfgs)

        assert rows[0]["stable"] == "error"
        assert rows[0]["delivered_rate"] == ""
        assert rows[1]["stable"] == "true"

    def test_unexpected_error_row_is_kept(self, grid, monkeypatch):
        run = sim.run

        def flaky(cfg):
            if cfg.lam == 0.2:
                raise ZeroDivisionError("float division by zero")
            return run(cfg)

        monkeypatch.setattr(sim, "run", flaky)
        rows = sim.sweep([config(grid, lam=lam) for lam in (0.05, 0.2, 0.1)])

        assert [r["lambda"] for r in rows] == ["0.05", "0.2", "0.1"]
        assert rows[1]["stable"] == "error"
        assert rows[1]["mean_delay"] == ""
        assert rows[0]["stable"] != "error"
        assert rows[2]["stable"] != "error"

    def test_workers_do_not_change_rows(self, grid):
        cfgs = [config(grid, lam=lam, slots=1200, run_index=i)
                for i, lam in enumerate((0.1, 0.2, 0.3))]
        assert sim.sweep(cfgs, workers=2) == sim.sweep(cfgs, workers=1)

    def test_write_csv(self, tmp_path):
        rows = [{"lambda": "0.1", "p": "", "policy": "pistar",
                 "mean_delay": "3.5", "delivered_rate": "0.1",
                 "stable": "true", "seed": "1"}]
        target = tmp_path / "rows.csv"
        sim.write_csv(rows, str(target))

        lines = target.read_text().splitlines()
        assert lines == ["lambda,p,policy,mean_delay,delivered_rate,"
                         "stable,seed", "0.1,,pistar,3.5,0.1,true,1"]


DELAY_SEEDS = (1, 2, 3)


@functools.lru_cache(maxsize=None)
def seed_delays(p, lam):
    """ Mean delay of the delayed-view policy on the grid, one per seed. """
    net = graph.grid_network()
    return np.array([sim.run(config(net, iid(net, p), policy="piprime",
                                    lam=lam, slots=40000,
                                    seed=seed)).mean_delay
                     for seed in DELAY_SEEDS])


def clearly_above(high, low, sigmas=3):
    """ high's mean exceeds low's by sigmas standard errors of the gap. """
    se = np.hypot(high.std(ddof=1), low.std(ddof=1)) / np.sqrt(len(high))
    return high.mean() - low.mean() > sigmas * se


@pytest.mark.slow
class TestLongRuns:

    """ Stability and delay behaviour of the policies on the 3x3 grid. """

    @pytest.mark.parametrize("lam,stable", ((0.34, True), (0.38, True),
                                            (0.44, False), (0.50, False)))
    @pytest.mark.parametrize("seed", (1, 2, 3))
    def test_pistar_static_grid(self, grid, lam, stable, seed):
        start = time.perf_counter()
        report = sim.run(config(grid, lam=lam, slots=200000, seed=seed))
        elapsed = time.perf_counter() - start

        assert report.stable is stable
        assert elapsed < 120, "200000 slots took %.0f s" % elapsed

    def test_bracket_near_capacity(self, grid):
        lambdas = [0.30 + 0.02 * i for i in range(10)]
        bracket = sim.bracket_capacity(config(grid, slots=100000), lambdas)

        assert bracket.stable >= 0.38 - 1e-9
        assert bracket.unstable <= 0.42 + 1e-9

    @pytest.mark.parametrize("p,lambdas", (("0.4", (0.02, 0.1, 0.2)),
                                           ("0.6", (0.02, 0.15, 0.25)),
                                           ("1", (0.05, 0.2, 0.35))))
    def test_delay_grows_with_rate(self, p, lambdas):
        delays = [seed_delays(p, lam) for lam in lambdas]
        for low, high in zip(delays, delays[1:]):
            assert clearly_above(high, low), (p, delays)

    def test_delay_shrinks_with_connectivity(self):
        delays = [seed_delays(p, 0.2) for p in ("0.4", "0.6", "1")]
        for worse, better in zip(delays, delays[1:]):
            assert clearly_above(worse, better), delays

    def test_delayed_policy_stable_below_capacity(self, grid):
        process = iid(grid, "0.6")
        lambdas = [0.20 + 0.02 * i for i in range(11)]
        bracket = sim.bracket_capacity(config(grid, process, slots=50000),
                                       lambdas)
        assert bracket.stable is not None

        report = sim.run(config(grid, process, policy="piprime",
                                lam=0.9 * bracket.stable, slots=100000))
        assert report.stable is True

    def test_rand_stable_below_design(self, grid):
        report = sim.run(config(grid, policy="rand", lam=0.3,
                                lambda_design=0.3, slots=100000))
        assert report.stable is True
