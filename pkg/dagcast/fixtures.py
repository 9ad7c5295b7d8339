""" Bundled reference instances and their expected values. """

import collections
import os

from . import paths, util
from .capacity import approx_capacity, capacity_bounds, compute_capacity, \
    compute_static_capacity
from .connectivity import load_process, stationary_distribution
from .errors import ComputeError, InputError
from .graph import load_network
from .sim import SimConfig, run

INDEX_FILE = "index.json"
TOLERANCE = 1e-6

Fixture = collections.namedtuple("Fixture", "name net process checks provenance")
Outcome = collections.namedtuple("Outcome", "fixture check expected observed "
                                            "passed")


class UnknownFixture(InputError):
    fields = ("name",)


class FixtureMismatch(ComputeError):
    fields = ("name", "check", "expected", "observed")


def index():
    """ All bundled fixtures, in index order. """
    raw = util.load_json(os.path.join(paths.get_fixture_dir(), INDEX_FILE))
    return [Fixture(item["name"], item["net"], item["process"],
                    item.get("checks", []), item.get("provenance", ""))
            for item in raw["fixtures"]]


def get_fixture(name):
    for fx in index():
        if fx.name == name:
            return fx

    raise UnknownFixture("no bundled fixture named %r" % name, name=name)


def load(fx):
    """ (Network, process) of a fixture. """
    net = load_network(paths.resolve_fixture_file(fx.net))
    process = load_process(paths.resolve_fixture_file(fx.process), net)
    return net, process


def _number(value):
    return float(util.to_fraction(value, "expected value"))


def _close(observed, expected):
    return abs(observed - expected) <= TOLERANCE


def evaluate(fx, check, net, process):
    """ Run one fixture check; return an Outcome. """
    kind = check["check"]

    if kind == "capacity":
        if check.get("static"):
            result = compute_static_capacity(net)
        else:
            result = compute_capacity(net, stationary_distribution(process),
                                      all_cuts=check.get("all_cuts", False),
                                      exact=check.get("exact", False))
        observed = result.lambda_star
        expected = _number(check["expect"])
        passed = _close(observed, expected)

        if check.get("exact"):
            passed = passed and result.lambda_exact == \
                util.to_fraction(check["expect"])

    elif kind == "bounds":
        bounds = capacity_bounds(net, _number(check["p"]))
        observed = [bounds.lower, bounds.upper]
        expected = [_number(x) for x in check["expect"]]
        passed = all(_close(o, e) for o, e in zip(observed, expected))

    elif kind == "approx":
        observed = approx_capacity(net, _number(check["p"])).value
        expected = _number(check["expect"])
        passed = _close(observed, expected)

    elif kind == "simulate":
        report = run(SimConfig(net, process, policy=check["policy"],
                               lam=check["lambda"], slots=check["slots"],
                               seed=check["seed"]))
        observed = {True: "stable", False: "unstable"}.get(report.stable,
                                                            "unknown")
        expected = check["expect"]
        passed = observed == expected

    else:
        raise InputError("unknown fixture check %r" % kind)

    label = kind + ("-static" if check.get("static") else "") + \
        ("-exact" if check.get("exact") else "") + \
        ("-all-cuts" if check.get("all_cuts") else "")
    return Outcome(fx.name, label, expected, observed, passed)


def run_fixture(fx):
    """ Outcomes of every check of fx. """
    net, process = load(fx)
    return [evaluate(fx, check, net, process) for check in fx.checks]


def require(outcomes):
    """ Raise FixtureMismatch for the first failed outcome. """
    for outcome in outcomes:
        if not outcome.passed:
            raise FixtureMismatch(
                "fixture %s: %s expected %s, got %s" % (
                    outcome.fixture, outcome.check, outcome.expected,
                    outcome.observed),
                name=outcome.fixture, check=outcome.check,
                expected=outcome.expected, observed=outcome.observed)
