""" Slotted-time broadcast simulation.

Each slot runs, in order: arrivals at the source, the configuration draw,
the stale-view refresh (piprime only), virtual queues and weights from
the slot-start state, the activation, and a synchronous packet transfer.
A packet received in slot t can be forwarded from slot t + 1 on.
"""

import collections
import csv
import math
import multiprocessing
import sys

import numpy as np

from . import config, g, util
from .capacity import compute_capacity
from .connectivity import RngStream, sample_config, stationary_distribution
from .errors import ComputeError, DagcastError, InputError
from .graph import MatchingCache, is_activation
from .policy import (DelayedView, FrontierState, apply_transfers,
                     build_rand_policy, compute_virtual_queues,
                     compute_weights, construct_path,
                     lindley_check, pistar_activate, rand_activate,
                     stale_weights, transfer_amounts, delayed_view_update)

POLICIES = ("pistar", "piprime", "rand")
ARRIVALS = ("poisson", "deterministic")
CHECK_LEVELS = ("off", "sampled", "every-slot")
MIN_SERIES = 1000
MAX_POISSON_RATE = 100

Verdict = collections.namedtuple("Verdict", "stable slope theta threshold")
Bracket = collections.namedtuple("Bracket", "stable unstable verdicts")


class SimConfigError(InputError):
    fields = ("field",)


class SeriesTooShort(InputError):
    fields = ("length", "required")


class InvariantViolation(ComputeError):
    fields = ("slot", "node", "check")


class SimConfig:

    """ One simulation run. Unset knobs take their config defaults. """

    def __init__(self, net, process, policy="pistar", lam=0.0, slots=1000,
                 seed=0, run_index=0, warmup=None, arrival="poisson",
                 lambda_design=None, check_level=None, check_stride=None,
                 update_prob=None, series_points=None, p=None):
        self.net = net
        self.process = process
        self.policy = policy
        self.lam = lam
        self.slots = slots
        self.seed = seed
        self.run_index = run_index
        self.warmup = slots // 10 if warmup is None else warmup
        self.arrival = arrival
        self.lambda_design = lambda_design
        self.check_level = check_level or config.CHECK_LEVEL.get
        self.check_stride = check_stride or config.CHECK_STRIDE.get
        self.update_prob = config.UPDATE_PROB.get if update_prob is None \
            else update_prob
        self.series_points = series_points or config.SERIES_POINTS.get
        self.p = p
        self.validate()

    def validate(self):
        def fail(field, message):
            raise SimConfigError(message, field=field)

        if isinstance(self.slots, bool) or not isinstance(self.slots, int) \
                or self.slots < 1:
            fail("slots", util.F('bad slots') % (self.slots,))

        if not isinstance(self.lam, (int, float)) or isinstance(self.lam, bool) \
                or not math.isfinite(self.lam) or self.lam < 0:
            fail("lambda", "arrival rate must be a finite number >= 0, got %r"
                 % (self.lam,))

        if self.arrival not in ARRIVALS:
            fail("arrival", "arrival must be one of %s" % ", ".join(ARRIVALS))

        if self.arrival == "poisson" and self.lam > MAX_POISSON_RATE:
            fail("lambda", "Poisson rate %r exceeds %d packets/slot"
                 % (self.lam, MAX_POISSON_RATE))

        if isinstance(self.warmup, bool) or not isinstance(self.warmup, int) \
                or not 0 <= self.warmup < self.slots:
            fail("warmup", "warmup must satisfy 0 <= warmup < slots, got %r"
                 % (self.warmup,))

        if isinstance(self.seed, bool) or not isinstance(self.seed, int) \
                or self.seed < 0:
            fail("seed", "seed must be an integer >= 0, got %r" % (self.seed,))

        if self.policy not in POLICIES:
            fail("policy", "policy must be one of %s" % ", ".join(POLICIES))

        if self.policy == "rand" and self.lambda_design is None:
            fail("lambda_design", "the rand policy needs a design rate")

        if self.check_level not in CHECK_LEVELS:
            fail("check_level", "check level must be one of %s"
                 % ", ".join(CHECK_LEVELS))

        if not 0 < self.update_prob <= 1:
            fail("update_prob", "update_prob must lie in (0, 1], got %r"
                 % (self.update_prob,))

        if self.process.m != self.net.m:
            fail("process", "process has %d edges, network has %d"
                 % (self.process.m, self.net.m))

    def replace(self, **changes):
        """ Copy with some fields changed. """
        fields = dict(net=self.net, process=self.process, policy=self.policy,
                      lam=self.lam, slots=self.slots, seed=self.seed,
                      run_index=self.run_index, warmup=self.warmup,
                      arrival=self.arrival, lambda_design=self.lambda_design,
                      check_level=self.check_level,
                      check_stride=self.check_stride,
                      update_prob=self.update_prob,
                      series_points=self.series_points, p=self.p)
        fields.update(changes)
        return SimConfig(**fields)

    def __repr__(self):
        return "SimConfig(policy=%r, lam=%r, slots=%r, seed=%r)" % (
            self.policy, self.lam, self.slots, self.seed)


class SimReport:

    """ Outcome of one run. """

    def __init__(self, cfg, **fields):
        self.cfg = cfg
        self.series_slots = fields["series_slots"]
        self.series = fields["series"]
        self.delays = fields["delays"]
        self.arrivals = fields["arrivals"]
        self.frontier = fields["frontier"]
        self.incoming = fields["incoming"]
        self.checks = fields["checks"]
        self.max_weight_gap = fields.get("max_weight_gap")
        self.mean_staleness = fields.get("mean_staleness")
        self.verdict = fields.get("verdict")
        self.verdict_note = fields.get("verdict_note")

    @property
    def delivered_rate(self):
        """ min_j R_j(T) / T. """
        return float(self.frontier.min()) / self.cfg.slots

    @property
    def arrival_rate(self):
        return self.arrivals / self.cfg.slots

    @property
    def mean_delay(self):
        if not self.delays:
            return None
        return float(np.mean(self.delays))

    @property
    def incoming_rates(self):
        """ Allocated rate into each node per slot. """
        return self.incoming / self.cfg.slots

    @property
    def stable(self):
        return None if self.verdict is None else self.verdict.stable

    def to_dict(self):
        cfg = self.cfg
        out = {
            "schema": g.REPORT_SCHEMA,
            "rng": g.RNG_NAME,
            "policy": cfg.policy,
            "lambda": cfg.lam,
            "slots": cfg.slots,
            "warmup": cfg.warmup,
            "seed": cfg.seed,
            "run_index": cfg.run_index,
            "arrival": cfg.arrival,
            "arrivals": self.arrivals,
            "arrival_rate": self.arrival_rate,
            "delivered_rate": self.delivered_rate,
            "mean_delay": self.mean_delay,
            "delays": list(self.delays),
            "frontier": self.frontier.tolist(),
            "incoming_rates": {cfg.net.names[v]: float(rate) for v, rate in
                               enumerate(self.incoming_rates)},
            "series": {"slots": list(self.series_slots),
                       "sum_x": list(self.series)},
            "checks": self.checks,
            "stability": None,
        }

        if cfg.p is not None:
            out["p"] = cfg.p

        if cfg.policy == "rand":
            out["lambda_design"] = cfg.lambda_design

        if self.verdict is not None:
            out["stability"] = {"stable": bool(self.verdict.stable),
                                "slope": float(self.verdict.slope),
                                "theta": self.verdict.theta,
                                "threshold": self.verdict.threshold}
        elif self.verdict_note:
            out["stability"] = {"stable": None, "note": self.verdict_note}

        if cfg.policy == "piprime":
            out["max_weight_gap"] = self.max_weight_gap
            out["mean_staleness"] = {cfg.net.edge_name(e): float(s) for e, s
                                     in enumerate(self.mean_staleness)}

        return out


def stability_verdict(series, times=None, c_max=1, theta=None):
    """ Least-squares slope of the last half of series against
    threshold theta * c_max. """
    theta = config.STABILITY_THETA.get if theta is None else theta
    series = np.asarray(series, dtype=float)
    times = np.arange(len(series), dtype=float) if times is None \
        else np.asarray(times, dtype=float)

    if len(series) < MIN_SERIES:
        raise SeriesTooShort("stability needs %d points, got %d"
                             % (MIN_SERIES, len(series)),
                             length=len(series), required=MIN_SERIES)

    half = len(series) // 2
    slope = float(np.polyfit(times[half:], series[half:], 1)[0])
    threshold = theta * c_max
    return Verdict(slope < threshold, slope, theta, threshold)


def _poisson(lam, u):
    """ Inverse-CDF Poisson draw. """
    k = 0
    term = math.exp(-lam)
    total = term

    while u > total:
        k += 1
        term *= lam / k
        total += term

        if term == 0:
            break

    return k


def _arrivals(cfg, rng, t, lam_exact):
    if cfg.arrival == "deterministic":
        return math.floor((t + 1) * lam_exact) - math.floor(t * lam_exact)
    return _poisson(cfg.lam, rng.random())


def _check_slot(net, t, sigma, act, R, nxt, vq, moved):
    """ Raise InvariantViolation on the first broken slot invariant. """
    def fail(node, check, detail):
        raise InvariantViolation("slot %d, node %s: %s" % (t, net.names[node],
                                                            detail),
                                 slot=t, node=net.names[node], check=check)

    if not is_activation(net, sigma, act):
        fail(net.source, "activation", "activation %s is not feasible in %s"
             % (act.edges(), sigma.edges()))

    source = R.R[net.source]

    for j in range(net.n):
        if j == net.source:
            continue

        if vq.X[j] < 0:
            fail(j, "nonnegative", "virtual queue %d < 0" % vq.X[j])

        if nxt.R[j] < R.R[j]:
            fail(j, "monotone", "frontier went back")

        if nxt.R[j] > source:
            fail(j, "source", "frontier passed the source")

        if nxt.R[j] > min(R.R[i] for i in net.in_neighbors[j]):
            fail(j, "in-neighbours", "received a packet an in-neighbour "
                 "lacked at slot start")

        path = construct_path(net, vq, j)
        if R.R[j] != source - sum(int(vq.X[v]) for v in path[1:]):
            fail(j, "telescoping", "frontier differs from the path sum "
                 "along %s" % [net.names[v] for v in path])

    breach = lindley_check(net, vq, moved, compute_virtual_queues(net, nxt))

    if breach is not None:
        fail(breach.node, "lindley", "X = %d exceeds Lindley bound %d"
             % (breach.observed, breach.bound))


def _rand_spec(cfg):
    dist = stationary_distribution(cfg.process)
    cap = compute_capacity(cfg.net, dist)
    return build_rand_policy(cfg.net, dist, cfg.lambda_design, cap)


def run(cfg, rand_spec=None):
    """ Simulate cfg; identical configs give identical reports. """
    net = cfg.net
    rng = RngStream(cfg.seed, cfg.run_index)
    cache = MatchingCache(net)
    R = FrontierState.zeros(net.n)
    view = DelayedView(net.n) if cfg.policy == "piprime" else None
    spec = None

    if cfg.policy == "rand":
        spec = rand_spec or _rand_spec(cfg)

    lam_exact = util.to_fraction(cfg.lam, "lambda", SimConfigError)
    stride = max(1, cfg.slots // cfg.series_points)
    others = np.array([v for v in range(net.n) if v != net.source]
                      or [net.source])
    arrival_slot = []
    delays = []
    delivered = 0
    series_slots, series = [], []
    incoming = np.zeros(net.n)
    checks = 0
    max_gap = 0
    staleness = np.zeros(net.m)

    util.dbg("run %r on %r", cfg, net)

    for t in range(cfg.slots):
        a = _arrivals(cfg, rng, t, lam_exact)
        R.R[net.source] += a
        arrival_slot.extend([t] * a)

        sigma = sample_config(cfg.process, rng, t)

        if view is not None:
            staleness += view.staleness(net, t)
            delayed_view_update(net, view, sigma, R, t, rng, cfg.update_prob)

        vq = compute_virtual_queues(net, R)

        if t % stride == 0:
            series_slots.append(t)
            series.append(vq.total())

        if cfg.policy == "rand":
            act = rand_activate(spec, sigma, rng)

        else:
            W = compute_weights(net, vq, None, sigma)

            if view is not None:
                stale = stale_weights(net, sigma, view)
                if sigma.bits:
                    max_gap = max(max_gap, int(np.abs(stale - W).max()))
                W = stale

            act = pistar_activate(net, sigma, W, cache)

        moved = transfer_amounts(net, R, act, view)
        nxt = apply_transfers(net, R, moved)

        incoming += np.bincount(net.dst_index,
                                weights=net.capacities * act.vector(),
                                minlength=net.n)

        if cfg.check_level == "every-slot" or \
                cfg.check_level == "sampled" and t % cfg.check_stride == 0:
            _check_slot(net, t, sigma, act, R, nxt, vq, moved)
            checks += 1

        R = nxt
        reached = int(R.R[others].min())

        for idx in range(delivered, reached):
            if arrival_slot[idx] >= cfg.warmup:
                delays.append(t - arrival_slot[idx] + 1)

        delivered = reached

    report = SimReport(cfg, series_slots=series_slots, series=series,
                       delays=delays, arrivals=int(R.R[net.source]),
                       frontier=R.R[others], incoming=incoming, checks=checks,
                       max_weight_gap=max_gap if view is not None else None,
                       mean_staleness=staleness / cfg.slots
                       if view is not None else None)

    kept = [i for i, s in enumerate(series_slots) if s >= cfg.warmup]

    try:
        report.verdict = stability_verdict([series[i] for i in kept],
                                           [series_slots[i] for i in kept],
                                           c_max=net.c_max)
    except SeriesTooShort as e:
        report.verdict_note = e.message

    util.dbg("run done: %d arrivals, delivered rate %.4f, mean delay %s",
             report.arrivals, report.delivered_rate, report.mean_delay)
    return report


def bracket_capacity(cfg, lambdas):
    """ Run cfg over increasing rates; return the last stable and first
    unstable rate (None where not found). """
    stable = unstable = None
    verdicts = []

    for lam in sorted(lambdas):
        report = run(cfg.replace(lam=lam))
        verdicts.append((lam, report.verdict))

        if report.stable:
            stable = lam
        elif report.stable is False:
            unstable = lam
            break

    return Bracket(stable, unstable, verdicts)


def _row(cfg, report=None):
    def fmt(x):
        return "" if x is None else repr(float(x))

    stable = "error" if report is None else \
        {True: "true", False: "false", None: "unknown"}[report.stable]

    return {
        "lambda": repr(float(cfg.lam)),
        "p": fmt(cfg.p),
        "policy": cfg.policy,
        "mean_delay": fmt(report.mean_delay) if report else "",
        "delivered_rate": fmt(report.delivered_rate) if report else "",
        "stable": stable,
        "seed": str(cfg.seed),
    }


def _sweep_row(cfg):
    try:
        return _row(cfg, run(cfg))

    except DagcastError as e:
        util.dbg("sweep row %r failed: %s", cfg, e.message)
        return _row(cfg)

    except Exception as e:  # pylint: disable=broad-except
        util.dbg("sweep row %r failed: %s: %s", cfg, type(e).__name__, e)
        return _row(cfg)


def sweep(cfgs, workers=None):
    """ One CSV row per config, in input order; failed rows are kept with
    stable = "error". """
    cfgs = list(cfgs)
    workers = min(workers or config.WORKERS.get, max(len(cfgs), 1))

    if workers <= 1:
        rows = [_sweep_row(cfg) for cfg in cfgs]

    else:
        with multiprocessing.Pool(workers) as pool:
            rows = list(pool.imap(_sweep_row, cfgs))

    util.dbg("sweep: %d rows", len(rows))
    return rows


def write_csv(rows, path=None):
    """ Write sweep rows with the fixed column set to path or stdout. """
    def emit(fh):
        writer = csv.DictWriter(fh, fieldnames=g.SWEEP_COLUMNS,
                                lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)

    if path in (None, "-"):
        emit(sys.stdout)
        return

    with open(path, "w", newline="", encoding="utf-8") as fh:
        emit(fh)
