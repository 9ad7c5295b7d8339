""" In-order broadcast state, virtual queues and the activation rules.

Every node j holds packets 1..R[j]; the source counter R[r] is the number
of arrivals so far. A node only receives a packet once all of its
in-neighbours hold it, which makes the virtual queue

    X[j] = min over in-neighbours i of (R[i] - R[j])

the number of packets j could accept right now.
"""

import collections

import numpy as np

from .errors import InputError
from .graph import Activation, MatchingCache, topological_order

LindleyViolation = collections.namedtuple("LindleyViolation",
                                          "node observed bound")


class RateAboveCapacity(InputError):
    fields = ("rate", "lambda_star")


class UnknownConfiguration(InputError):
    fields = ("configuration",)


class FrontierState:

    """ Per-node count of in-order packets received. """

    __slots__ = ("R",)

    def __init__(self, R):
        self.R = np.array(R, dtype=np.int64)

    @classmethod
    def zeros(cls, n):
        return cls(np.zeros(n, dtype=np.int64))

    def copy(self):
        return FrontierState(self.R)

    def __getitem__(self, j):
        return int(self.R[j])

    def __eq__(self, other):
        return isinstance(other, FrontierState) and \
            np.array_equal(self.R, other.R)

    def __repr__(self):
        return "FrontierState(%s)" % self.R.tolist()


class VirtualQueues:

    """ X[j] and the in-neighbour istar[j] attaining it; -1 at the source. """

    __slots__ = ("X", "istar")

    def __init__(self, X, istar):
        self.X = X
        self.istar = istar

    def copy(self):
        return VirtualQueues(self.X.copy(), self.istar.copy())

    def total(self):
        return int(self.X.sum())

    def __repr__(self):
        return "VirtualQueues(X=%s, istar=%s)" % (self.X.tolist(),
                                                  self.istar.tolist())


_FAR = np.iinfo(np.int64).max // 4


def _lowest_in(net, known):
    """ Smallest known value over each node's in-neighbours, and the first
    in-neighbour holding it. known is one row of values, or one row per
    viewer; the source gets _FAR. """
    padded = np.concatenate(
        [known, np.full(known.shape[:-1] + (1,), _FAR, dtype=np.int64)],
        axis=-1)[..., net.in_table]
    first = padded.argmin(axis=-1)
    low = np.take_along_axis(padded, first[..., None], axis=-1)[..., 0]
    return low, net.in_table[np.arange(net.n), first]


def compute_virtual_queues(net, R):
    """ Virtual queues of every node; ties go to the smallest node id. """
    low, first = _lowest_in(net, R.R)
    X = low - R.R
    istar = first.astype(np.int64)
    X[net.source] = 0
    istar[net.source] = -1
    return VirtualQueues(X, istar)


def compute_K_sets(net, vq):
    """ K[j]: out-neighbours m with istar[m] == j. """
    K = [[] for _ in range(net.n)]

    for m in range(net.n):
        if vq.istar[m] >= 0:
            K[int(vq.istar[m])].append(m)

    return [tuple(k) for k in K]


def compute_weights(net, vq, K, sigma):
    """ W_ij = X_j - sum of X_k over K_j on ON edges, 0 on OFF edges.

    With K None the sets are read off vq.istar directly.
    """
    X = vq.X

    if K is None:
        kids = vq.istar >= 0
        fed = np.bincount(vq.istar[kids], weights=X[kids],
                          minlength=net.n).astype(np.int64)
    else:
        fed = np.array([X[list(k)].sum() if k else 0 for k in K],
                       dtype=np.int64)

    return (X - fed)[net.dst_index] * sigma.vector()


def pistar_activate(net, sigma, W, cache=None):
    """ Activation in sigma maximising sum of c_e * W_e.

    np.argmax returns the first maximiser, i.e. the canonical one.
    """
    if cache is None:
        cache = MatchingCache(net)
    acts, scaled = cache.scoring(sigma)
    scores = scaled @ W
    return acts[int(np.argmax(scores))]


def transfer_amounts(net, R, act, view=None):
    """ Packets moved over each edge of act from the slot-start state.

    The receiver's ceiling is its deficit to its in-neighbours, read from
    its own stale view when one is given.
    """
    low, _ = _lowest_in(net, R.R if view is None else view.known)

    if view is not None:
        low = np.diagonal(low)

    room = np.maximum(low - R.R, 0).tolist()
    moved = np.zeros(net.m, dtype=np.int64)

    for e in act:
        j = net.dst_index[e]
        step = min(int(net.capacities[e]), room[j])
        moved[e] = step
        room[j] -= step

    return moved


def schedule_packets(net, R, act, view=None):
    """ Frontier after serving act; the source counter never changes. """
    moved = transfer_amounts(net, R, act, view)
    return apply_transfers(net, R, moved)


def apply_transfers(net, R, moved):
    nxt = R.copy()
    np.add.at(nxt.R, net.dst_index, moved)
    return nxt


def lindley_check(net, prev, mu, nxt):
    """ First node breaking X_j' <= (X_j - served_j)^+ + fed_istar(j).

    mu holds the packets moved per edge between the two queue states;
    nothing may reach the source in between.
    """
    for j in range(net.n):
        if j == net.source:
            continue

        served = sum(int(mu[e]) for e in net.in_edges[j])
        i = int(prev.istar[j])
        fed = 0 if i == net.source else \
            sum(int(mu[e]) for e in net.in_edges[i])
        bound = max(int(prev.X[j]) - served, 0) + fed

        if nxt.X[j] > bound:
            return LindleyViolation(j, int(nxt.X[j]), bound)

    return None


def construct_path(net, vq, j):
    """ Nodes r, ..., j following istar pointers back from j. """
    j = net.node(j)

    if j == net.source:
        raise ValueError("path construction needs a non-source node")

    path = [j]

    while path[-1] != net.source:
        path.append(int(vq.istar[path[-1]]))

    return path[::-1]


class DelayedView:

    """ What every node last heard about every other node's frontier.

    known[v, u] is v's latest value of R[u]; stamp[v, u] is the slot that
    value was current at, -1 before any exchange.
    """

    def __init__(self, n):
        self.known = np.zeros((n, n), dtype=np.int64)
        self.stamp = np.full((n, n), -1, dtype=np.int64)

    def staleness(self, net, t):
        """ Slots since the receiver of each edge heard its sender. """
        return t - self.stamp[net.dst_index, net.src_index]


def delayed_view_update(net, view, sigma, R, t, rng=None, update_prob=1.0):
    """ Refresh view over the ON links of slot t.

    Both ends of a link exchange their own frontiers, then one more round
    over the same links passes on whatever newer entries each side holds,
    which carries two-hop values. With update_prob < 1 each ON link takes
    part with that probability, one draw per link.

    Frontiers never decrease, so the newest entry for a node is also the
    largest and merging views is an elementwise maximum.
    """
    known, stamp = view.known, view.stamp
    nodes = np.arange(net.n)
    known[nodes, nodes] = R.R
    stamp[nodes, nodes] = t

    links = sigma.edges()

    if update_prob < 1:
        links = [e for e in links if rng.random() < update_prob]

    links = np.array(links, dtype=np.intp)
    i, j = net.src_index[links], net.dst_index[links]
    known[j, i], stamp[j, i] = R.R[i], t
    known[i, j], stamp[i, j] = R.R[j], t

    heard, heard_at = known.copy(), stamp.copy()
    sender, receiver = np.concatenate([i, j]), np.concatenate([j, i])
    np.maximum.at(known, receiver, heard[sender])
    np.maximum.at(stamp, receiver, heard_at[sender])
    return view


def stale_weights(net, sigma, view):
    """ Edge weights each receiver computes from its own view.

    Row v of the view gives v's estimate of every deficit; its weight is
    its own estimated deficit minus those of the children it believes it
    holds back.
    """
    low, leader = _lowest_in(net, view.known)
    gap = low - view.known
    own = np.maximum(np.diagonal(gap), 0)
    mine = net.child_table & (leader == np.arange(net.n)[:, None])
    others = (np.maximum(gap, 0) * mine).sum(axis=1)
    return (own - others)[net.dst_index] * sigma.vector()


def piprime_activate(net, sigma, view, cache=None):
    """ Max-weight activation over weights computed from stale views. """
    return pistar_activate(net, sigma, stale_weights(net, sigma, view), cache)


class RandPolicySpec:

    """ Per-configuration activation mix plus per-node thinning.

    alphas maps configuration bits to (activations, cumulative weights);
    q[v] is the probability of keeping a selected edge into v.
    """

    def __init__(self, net, alphas, q, labels, lambda_design, lambda_star):
        self.net = net
        self.alphas = alphas
        self.q = q
        self.labels = labels
        self.lambda_design = lambda_design
        self.lambda_star = lambda_star

    @property
    def epsilon(self):
        return self.lambda_star - self.lambda_design

    def target_rate(self, v):
        """ Expected incoming rate the thinning aims node v at. """
        if v == self.net.source:
            return self.lambda_design
        return self.lambda_design + \
            self.epsilon * self.labels[v] / self.net.n

    def __repr__(self):
        return "RandPolicySpec(lambda=%r, q=%s)" % (self.lambda_design,
                                                    self.q.round(6).tolist())


def build_rand_policy(net, dist, lambda_design, cap):
    """ Randomised reference policy at rate lambda_design below capacity.

    Activations are mixed with the capacity optimum's weights. Node v with
    topological label l (the source has label 1) keeps each selected
    in-edge with probability q so its expected incoming rate is
    lambda + eps * l / n, eps = lambda* - lambda. Edges out of the source
    are thinned only through the label of their receiver.
    """
    lam = float(lambda_design)

    if lam < 0 or lam >= cap.lambda_star:
        raise RateAboveCapacity(
            "design rate %r must lie in [0, %r)" % (lam, cap.lambda_star),
            rate=lam, lambda_star=cap.lambda_star)

    eps = cap.lambda_star - lam
    labels = {v: pos + 1 for pos, v in enumerate(topological_order(net))}
    rates = cap.mean_beta() * net.capacities
    q = np.ones(net.n)

    for v in range(net.n):
        if v == net.source:
            continue

        supply = float(sum(rates[e] for e in net.in_edges[v]))
        target = lam + eps * labels[v] / net.n
        q[v] = min(max(target / supply, 0.0), 1.0) if supply > 0 else 1.0

    alphas = {}

    for mask, chosen in zip(dist.masks, cap.beta_star):
        acts = [act for act, _ in chosen]
        weights = np.array([float(w) for _, w in chosen])
        alphas[mask.bits] = (acts, np.cumsum(weights / weights.sum()))

    return RandPolicySpec(net, alphas, q, labels, lam, cap.lambda_star)


def rand_activate(spec, sigma, rng):
    """ Sample an activation for sigma, then thin it edge by edge. """
    entry = spec.alphas.get(sigma.bits)

    if entry is None:
        raise UnknownConfiguration("configuration %s was not in the design "
                                   "table" % sigma.edges(),
                                   configuration=sigma.edges())

    acts, cumulative = entry
    k = min(int(np.searchsorted(cumulative, rng.random(), side="right")),
            len(acts) - 1)
    kept = 0

    for e in acts[k]:
        if rng.random() < spec.q[spec.net.edges[e].dst]:
            kept |= 1 << e

    return Activation(kept, sigma.m)
