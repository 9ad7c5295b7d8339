""" Broadcast capacity of a time-varying DAG.

The capacity LP is solved over explicit convex weights on the enumerated
activations of every configuration:

    max lambda
    s.t. lambda <= sum_sigma p(sigma) * u_v . beta_sigma   for every cut u_v
         beta_sigma = sum_k alpha_k s_k,  sum_k alpha_k <= 1,  alpha >= 0

Weight left over in a configuration goes to the empty activation.
"""

import collections
import itertools
from fractions import Fraction

import numpy as np
from scipy import sparse
from scipy.optimize import linprog

from . import config, util
from .connectivity import ConfigTable, edge_marginals, uniform_marginal
from .errors import InputError
from .graph import MatchingCache, all_proper_cuts, single_node_cut
from .simplex import LPNumericalFailure, maximize

TIGHT_TOLERANCE = 1e-9

ViolatedConstraint = collections.namedtuple(
    "ViolatedConstraint", "kind nodes edges lhs rhs")

Approximation = collections.namedtuple("Approximation", "value certificate")


class TooManyOddSets(InputError):
    fields = ("limit", "nodes")


class LPTooLarge(InputError):
    fields = ("rows", "columns", "limit")


class BoundsPremiseError(InputError):
    fields = ("marginals",)


class Bounds(tuple):

    """ (lower, upper), carrying the link probability and premise used. """

    def __new__(cls, lower, upper, p, premise, static):
        self = super().__new__(cls, (lower, upper))
        self.p = p
        self.premise = premise
        self.static = static
        return self

    @property
    def lower(self):
        return self[0]

    @property
    def upper(self):
        return self[1]


class CapacityResult:

    """ Optimum of the capacity LP.

    beta_star[i] is the activation distribution chosen in configuration
    configs[i], as (Activation, weight) pairs in canonical order.
    """

    def __init__(self, net, table, lambda_star, beta_star, solver,
                 lambda_exact=None, all_cuts=False, pivots=None):
        self.net = net
        self.configs = table.masks
        self.probs = table.exact
        self.lambda_star = lambda_star
        self.lambda_exact = lambda_exact
        self.beta_star = beta_star
        self.solver = solver
        self.all_cuts = all_cuts
        self.pivots = pivots
        self.node_rates = self._node_rates()
        low = min(self.node_rates.values()) if self.node_rates else 0.0
        self.tight_nodes = sorted(v for v, rate in self.node_rates.items()
                                  if rate - low <= TIGHT_TOLERANCE)

    def __repr__(self):
        return "CapacityResult(lambda_star=%r, tight_nodes=%r)" % (
            self.lambda_star, self.tight_nodes)

    def beta_vector(self, i):
        """ beta_sigma of configuration i as a float vector. """
        out = np.zeros(self.net.m)
        for act, weight in self.beta_star[i]:
            out += float(weight) * act.vector(dtype=float)
        return out

    def mean_beta(self):
        """ Time-averaged activation vector sum_sigma p(sigma) beta_sigma. """
        out = np.zeros(self.net.m)
        for i, p in enumerate(self.probs):
            out += float(p) * self.beta_vector(i)
        return out

    def distribution(self, mask):
        """ Activation distribution chosen for configuration mask. """
        for i, other in enumerate(self.configs):
            if other == mask:
                return self.beta_star[i]
        return None

    def _node_rates(self):
        mean = self.mean_beta() * self.net.capacities
        return {v: float(sum(mean[e] for e in self.net.in_edges[v]))
                for v in range(self.net.n) if v != self.net.source}

    def to_dict(self):
        out = {
            "lambda_star": round(float(self.lambda_star), 12),
            "tight_nodes": self.tight_nodes,
            "beta_star": {str(i): [[act.edges(), round(float(w), 12)]
                                   for act, w in dist]
                          for i, dist in enumerate(self.beta_star)},
            "configurations": {str(i): mask.edges()
                               for i, mask in enumerate(self.configs)},
            "solver": self.solver,
        }

        if self.lambda_exact is not None:
            out["lambda_exact"] = str(self.lambda_exact)

        if self.all_cuts:
            out["all_cuts"] = True

        return out


LinearProgram = collections.namedtuple(
    "LinearProgram", "c b shape rows cols vals columns")


def _cut_vectors(net, all_cuts):
    if all_cuts:
        cuts = [cut.vector for cut in all_proper_cuts(net)]
    else:
        cuts = [single_node_cut(net, v).vector for v in range(net.n)
                if v != net.source]

    return np.array(cuts, dtype=np.int64).reshape(len(cuts), net.m)


def _lp(net, table, cache, all_cuts, exact):
    """ Nonzeros of the capacity LP, one alpha column per nonempty
    activation and one budget row per configuration that has one. """
    cuts = _cut_vectors(net, all_cuts)
    limit = config.LP_COLUMN_LIMIT.get
    columns = []
    rows, cols, vals = [np.arange(len(cuts))], [np.zeros(len(cuts), int)], \
        [[1] * len(cuts)]
    row = len(cuts)

    for i, (mask, p) in enumerate(table):
        acts, incidence = cache.get(mask)
        count = len(acts) - 1

        # acts[0] is the empty activation
        if not count:
            continue

        if len(columns) + count > limit:
            raise LPTooLarge("capacity LP needs more than %d activation "
                             "columns" % limit, rows=len(cuts) + len(table),
                             columns=len(columns) + count, limit=limit)

        index = np.arange(len(columns) + 1, len(columns) + 1 + count)
        columns.extend((i, k) for k in range(1, len(acts)))
        gains = incidence[1:] @ cuts.T
        hit, cut = np.nonzero(gains)
        weight = Fraction(p) if exact else float(p)

        rows += [cut, np.full(count, row)]
        cols += [index[hit], index]
        vals += [[-weight * int(x) for x in gains[hit, cut]], [1] * count]
        row += 1

    num = Fraction if exact else float
    vals = np.array([num(v) for chunk in vals for v in chunk],
                    dtype=object if exact else float)
    return LinearProgram(
        c=[num(1)] + [num(0)] * len(columns),
        b=[num(0)] * len(cuts) + [num(1)] * (row - len(cuts)),
        shape=(row, 1 + len(columns)),
        rows=np.concatenate(rows).astype(np.intp),
        cols=np.concatenate(cols).astype(np.intp),
        vals=vals, columns=columns)


def _dense(lp, exact):
    A = np.zeros(lp.shape, dtype=object if exact else float)

    if exact:
        A[...] = Fraction(0)

    A[lp.rows, lp.cols] = lp.vals
    return A


def _solve_highs(lp):
    A = sparse.csr_matrix((lp.vals.astype(float), (lp.rows, lp.cols)),
                          shape=lp.shape)
    result = linprog(-np.asarray(lp.c, dtype=float), A_ub=A,
                     b_ub=np.asarray(lp.b, dtype=float), bounds=(0, None),
                     method="highs")

    if result.status != 0:
        raise LPNumericalFailure("HiGHS failed: %s" % result.message,
                                 status=result.message,
                                 max_coefficient=float(np.abs(lp.vals).max()),
                                 min_pivot=None)

    return np.clip(result.x, 0, None), float(-result.fun)


def compute_capacity(net, dist, all_cuts=False, exact=False, solver=None,
                     cache=None):
    """ Broadcast capacity of net under the configuration table dist.

    :param all_cuts: impose every proper cut instead of single-node cuts
    :param exact: solve over Fractions; the result carries lambda_exact
    :param solver: "simplex" or "highs", defaults to the lp_solver setting.
        Float problems too large for a dense tableau go to HiGHS.
    :raises LPTooLarge: too many columns, or an exact solve over the
        dense_lp_limit
    """
    if net.n < 2:
        raise InputError("capacity needs a node besides the source")

    if dist.m != net.m:
        raise InputError("configuration table has %d edges, network has %d"
                         % (dist.m, net.m))

    solver = "simplex" if exact else (solver or config.LP_SOLVER.get)
    if cache is None:
        cache = MatchingCache(net)
    lp = _lp(net, dist, cache, all_cuts, exact)
    size = lp.shape[0] * lp.shape[1]

    if solver == "simplex" and size > config.DENSE_LP_LIMIT.get:
        if exact:
            limit = config.DENSE_LP_LIMIT.get
            raise LPTooLarge("exact solve needs a %dx%d tableau, over the "
                             "limit of %d entries" % (lp.shape + (limit,)),
                             rows=lp.shape[0], columns=lp.shape[1],
                             limit=limit)
        solver = "highs"

    util.dbg("capacity LP: %d rows, %d columns, %d nonzeros, solver %s",
             lp.shape[0], lp.shape[1], len(lp.vals), solver)
    pivots = None
    columns = lp.columns

    if solver == "highs":
        x, objective = _solve_highs(lp)

    else:
        result = maximize(lp.c, _dense(lp, exact), lp.b, exact=exact)
        x, objective, pivots = result.x, result.objective, result.pivots

    zero = Fraction(0) if exact else 0.0
    one = Fraction(1) if exact else 1.0
    eps = 0 if exact else config.LP_TOLERANCE.get
    chosen = [[] for _ in range(len(dist))]

    for col, (i, k) in enumerate(columns, start=1):
        if x[col] > eps:
            chosen[i].append((k, x[col]))

    beta_star = []

    for i, (mask, _) in enumerate(dist):
        acts, _ = cache.get(mask)
        picked = chosen[i]
        leftover = one - sum((w for _, w in picked), zero)
        dist_i = [(acts[k], w) for k, w in picked]

        if leftover > eps or not dist_i:
            dist_i.insert(0, (acts[0], max(leftover, zero)))

        beta_star.append(dist_i)

    lambda_exact = objective if exact else None
    lambda_star = float(objective)
    util.dbg("capacity: lambda* = %s", objective)
    return CapacityResult(net, dist, lambda_star, beta_star, solver,
                          lambda_exact=lambda_exact, all_cuts=all_cuts,
                          pivots=pivots)


def static_table(net):
    """ The single all-ON configuration with probability 1. """
    return ConfigTable([(net.full_mask(), 1)], net.m)


def compute_static_capacity(net, **kwargs):
    """ Capacity of net with every link always ON. """
    return compute_capacity(net, static_table(net), **kwargs)


def _link_probability(p):
    try:
        value = float(p)
    except (TypeError, ValueError):
        raise InputError("link probability must be a number, got %r" % (p,))

    if not 0 < value <= 1:
        raise InputError("link probability must lie in (0, 1], got %r" % p)

    return value


def capacity_bounds(net, p, static=None):
    """ (p * static capacity, static capacity).

    p is either the common link ON probability, taken on trust, or a
    ConfigTable whose marginals are checked to be uniform.
    """
    if isinstance(p, ConfigTable):
        common = uniform_marginal(p)

        if common is None:
            raise BoundsPremiseError(
                "capacity bounds need every link ON with the same "
                "probability", marginals=[round(float(x), 12) for x in
                                          edge_marginals(p)])

        p, premise = _link_probability(common), "verified"

    else:
        p, premise = _link_probability(p), "assumed"

    static = static or compute_static_capacity(net)
    upper = static.lambda_star
    return Bounds(p * upper, upper, p, premise, static)


def approx_capacity(net, p, static=None):
    """ p * static capacity, certified by the static activation mix. """
    bounds = capacity_bounds(net, p, static)
    return Approximation(bounds.lower, list(bounds.static.beta_star[0]))


def restrict_certificate(certificate, on):
    """ beta(e) * 1{e in on} for a static activation mix. """
    out = np.zeros(on.m)

    for act, weight in certificate:
        out += float(weight) * act.vector(dtype=float)

    return out * on.vector(dtype=float)


def check_matching_polytope_membership(net, on, beta, tolerance=1e-9,
                                       limit=None):
    """ First violated matching-polytope inequality of beta, or None.

    Checks run in a fixed order: nonnegativity, zero weight outside the ON
    set, node degrees, then odd node sets by size and lexicographic order.
    Edges are read undirected.
    """
    if len(beta) != net.m:
        raise ValueError("beta has %d entries, network has %d edges"
                         % (len(beta), net.m))

    for e in range(net.m):
        if beta[e] < -tolerance:
            return ViolatedConstraint("nonnegativity", [], [e], beta[e], 0)

    for e in range(net.m):
        if e not in on and abs(beta[e]) > tolerance:
            return ViolatedConstraint("support", [], [e], beta[e], 0)

    for v in range(net.n):
        incident = sorted(net.in_edges[v] + net.out_edges[v])
        total = sum(beta[e] for e in incident)
        if total > 1 + tolerance:
            return ViolatedConstraint("degree", [v], incident, total, 1)

    limit = limit or config.ODD_SET_LIMIT.get

    if net.n > limit:
        raise TooManyOddSets("%d nodes exceed the odd-set limit of %d"
                             % (net.n, limit), limit=limit, nodes=net.n)

    for size in range(3, net.n + 1, 2):
        for nodes in itertools.combinations(range(net.n), size):
            inside = 0
            for v in nodes:
                inside |= 1 << v

            edges = [e for e in range(net.m)
                     if net.endpoint_bits[e] & ~inside == 0]
            total = sum(beta[e] for e in edges)
            rhs = (size - 1) // 2

            if edges and total > rhs + tolerance:
                return ViolatedConstraint("odd-set", list(nodes), edges,
                                          total, rhs)

    return None


def verify_result(result):
    """ Run the polytope oracle on every beta_sigma of a CapacityResult;
    return (config index, ViolatedConstraint) pairs that failed. """
    failed = []

    for i, mask in enumerate(result.configs):
        violation = check_matching_polytope_membership(
            result.net, mask, result.beta_vector(i))
        if violation is not None:
            failed.append((i, violation))

    return failed
