""" Stationary network-configuration processes and their sampling.

Three flavours share one sampling interface: an explicit table of
configurations, independent per-link ON/OFF, and a finite Markov chain
over configurations. The capacity solver reads only the stationary table;
the simulator reads only samples.
"""

from fractions import Fraction

import networkx as nx
import numpy as np

from . import config, util
from .errors import InputError
from .graph import EdgeMask

SUM_TOLERANCE = 1e-12
PROCESS_TYPES = ("table", "iid", "markov")


class ProcessFormatError(InputError):
    fields = ("key",)


class TableTooLarge(InputError):
    fields = ("limit", "size")


class NonErgodicChain(InputError):
    fields = ("reason",)


class RngStream:

    """ Seeded PCG64 stream owned by a single run.

    The stream is derived from (seed, run_index) through a SeedSequence so
    sweep rows get independent streams from one master seed.
    """

    def __init__(self, seed, run_index=0):
        self.seed = seed
        self.run_index = run_index
        entropy = np.random.SeedSequence([int(seed), int(run_index)])
        self.generator = np.random.Generator(np.random.PCG64(entropy))
        self._chains = {}

    def random(self, size=None):
        """ Uniform draw(s) on [0, 1). """
        return self.generator.random(size)

    def __repr__(self):
        return "RngStream(seed=%r, run_index=%r)" % (self.seed, self.run_index)


def _check_sum(total, what, key):
    if abs(float(total) - 1.0) > SUM_TOLERANCE:
        raise ProcessFormatError("%s sum to %s, not 1" % (what, float(total)),
                                 key=key)


class ConfigTable:

    """ Configurations with their stationary probabilities.

    Zero-probability rows are not part of the table; build tables with
    from_pairs to have them dropped.
    """

    def __init__(self, entries, m):
        entries = tuple((mask, Fraction(p)) for mask, p in entries)

        if not entries:
            raise ProcessFormatError("configuration table is empty",
                                     key="configs")

        seen = set()

        for mask, p in entries:
            if mask.m != m:
                raise ProcessFormatError("configuration has %d edges, "
                                         "network has %d" % (mask.m, m),
                                         key="configs")
            if p <= 0:
                raise ProcessFormatError("configuration %s has probability %s"
                                         % (mask.edges(), p), key="p")
            if mask.bits in seen:
                raise ProcessFormatError("configuration %s listed twice"
                                         % mask.edges(), key="configs")
            seen.add(mask.bits)

        _check_sum(sum(p for _, p in entries), "table probabilities", "p")

        self.m = m
        self.entries = entries
        self.masks = tuple(mask for mask, _ in entries)
        self.exact = tuple(p for _, p in entries)
        self.probs = np.array([float(p) for p in self.exact])
        self._cumulative = np.cumsum(self.probs)

    @classmethod
    def from_pairs(cls, pairs, m):
        """ Build a table, dropping zero-probability rows. """
        kept = []

        for mask, p in pairs:
            p = Fraction(p)
            if p < 0:
                raise ProcessFormatError("negative probability %s" % p,
                                         key="p")
            if p > 0:
                kept.append((mask, p))

        return cls(kept, m)

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __repr__(self):
        return "ConfigTable(%d configurations, m=%d)" % (len(self), self.m)

    def probability(self, mask):
        """ Stationary probability of mask, 0 when absent. """
        for other, p in self.entries:
            if other == mask:
                return p
        return Fraction(0)

    def index(self, mask):
        """ Position of mask in the table or None. """
        for i, other in enumerate(self.masks):
            if other == mask:
                return i
        return None

    def draw(self, u):
        i = int(np.searchsorted(self._cumulative, u, side="right"))
        return self.masks[min(i, len(self.masks) - 1)]


class IidLinkProcess:

    """ Each edge ON independently with its own probability in (0, 1]. """

    def __init__(self, probs):
        probs = tuple(Fraction(p) for p in probs)

        for e, p in enumerate(probs):
            if not 0 < p <= 1:
                raise ProcessFormatError("edge %d ON probability must lie in "
                                         "(0, 1], got %s" % (e, p), key="p")

        self.m = len(probs)
        self.exact = probs
        self.probs = np.array([float(p) for p in probs])

    @classmethod
    def uniform(cls, m, p):
        return cls([p] * m)

    @property
    def uniform_p(self):
        """ The common ON probability, None if the links differ. """
        if self.exact and all(p == self.exact[0] for p in self.exact):
            return self.exact[0]
        return None

    def __repr__(self):
        return "IidLinkProcess(m=%d)" % self.m


class MarkovConfigProcess:

    """ Finite Markov chain whose states are configurations. """

    def __init__(self, states, transition, initial=0):
        states = tuple(states)
        size = len(states)

        if not size:
            raise ProcessFormatError("Markov chain needs at least one state",
                                     key="states")

        if len({s.bits for s in states}) != size:
            raise ProcessFormatError("Markov states must be distinct",
                                     key="states")

        if len({s.m for s in states}) != 1:
            raise ProcessFormatError("Markov states differ in edge count",
                                     key="states")

        if len(transition) != size or any(len(row) != size
                                          for row in transition):
            raise ProcessFormatError("transition matrix must be %dx%d"
                                     % (size, size), key="transition")

        exact = tuple(tuple(Fraction(x) for x in row) for row in transition)

        for i, row in enumerate(exact):
            if any(x < 0 for x in row):
                raise ProcessFormatError("negative transition probability in "
                                         "row %d" % i, key="transition")
            _check_sum(sum(row), "transition row %d" % i, "transition")

        if isinstance(initial, bool) or not isinstance(initial, int) \
                or not 0 <= initial < size:
            raise ProcessFormatError("initial state %r out of range"
                                     % (initial,), key="initial")

        self.states = states
        self.m = states[0].m
        self.exact = exact
        self.transition = np.array([[float(x) for x in row] for row in exact])
        self.initial = initial
        self._cumulative = np.cumsum(self.transition, axis=1)

        if not nx.is_strongly_connected(self.support_graph()):
            raise NonErgodicChain("Markov chain is not irreducible",
                                  reason="reducible")

    def support_graph(self):
        """ Directed graph of the positive transitions. """
        graph = nx.DiGraph()
        graph.add_nodes_from(range(len(self.states)))
        rows, cols = np.nonzero(self.transition > 0)
        graph.add_edges_from(zip(rows.tolist(), cols.tolist()))
        return graph

    def step(self, state, u):
        i = int(np.searchsorted(self._cumulative[state], u, side="right"))
        return min(i, len(self.states) - 1)

    def __repr__(self):
        return "MarkovConfigProcess(%d states, m=%d)" % (len(self.states),
                                                          self.m)


def sample_config(process, rng, t):
    """ Realise the configuration of slot t.

    Markov processes keep their current state in rng; they must be sampled
    at consecutive slots starting from 0.
    """
    if isinstance(process, ConfigTable):
        return process.draw(rng.random())

    if isinstance(process, IidLinkProcess):
        return EdgeMask.from_flags(rng.random(process.m) < process.probs)

    if isinstance(process, MarkovConfigProcess):
        key = id(process)

        if t == 0:
            state = process.initial

        else:
            last = rng._chains.get(key)
            if last is None or last[0] != t - 1:
                raise ValueError("Markov process sampled out of order at "
                                 "slot %d" % t)
            state = process.step(last[1], rng.random())

        rng._chains[key] = (t, state)
        return process.states[state]

    raise TypeError("not a configuration process: %r" % (process,))


def _power_iteration(process):
    tolerance = config.POWER_TOLERANCE.get
    limit = config.POWER_MAX_ITER.get
    size = len(process.states)
    pi = np.full(size, 1.0 / size)

    for iteration in range(1, limit + 1):
        nxt = pi @ process.transition
        nxt /= nxt.sum()
        residual = float(np.abs(nxt - pi).sum())
        pi = nxt

        if residual < tolerance:
            util.dbg("power iteration converged after %d steps", iteration)
            return pi

    raise NonErgodicChain("power iteration did not reach %g within %d steps"
                          % (tolerance, limit), reason="no convergence")


def _as_fractions(weights):
    fracs = [Fraction(float(w)).limit_denominator(10 ** 12) for w in weights]
    total = sum(fracs)
    return [f / total for f in fracs]


def stationary_distribution(process, limit=None):
    """ The stationary distribution of process as a ConfigTable. """
    if isinstance(process, ConfigTable):
        return process

    if isinstance(process, IidLinkProcess):
        limit = limit or config.TABLE_LIMIT.get
        size = 1 << process.m

        if size > limit:
            raise TableTooLarge("product table has 2^%d entries, limit is %d"
                                % (process.m, limit), limit=limit, size=size)

        pairs = []

        for bits in range(size):
            p = Fraction(1)
            for e, pe in enumerate(process.exact):
                p *= pe if bits >> e & 1 else 1 - pe
                if not p:
                    break
            pairs.append((EdgeMask(bits, process.m), p))

        return ConfigTable.from_pairs(pairs, process.m)

    if isinstance(process, MarkovConfigProcess):
        if not nx.is_aperiodic(process.support_graph()):
            raise NonErgodicChain("Markov chain is periodic",
                                  reason="periodic")

        pi = _power_iteration(process)
        return ConfigTable.from_pairs(zip(process.states, _as_fractions(pi)),
                                      process.m)

    raise TypeError("not a configuration process: %r" % (process,))


def edge_marginals(table):
    """ Per-edge stationary ON probability. """
    out = np.zeros(table.m)

    for mask, p in table:
        out += float(p) * mask.vector(dtype=float)

    return out


def uniform_marginal(table, tolerance=1e-9):
    """ The common per-edge ON probability, None if edges differ. """
    marginals = edge_marginals(table)

    if not len(marginals):
        return None

    if float(marginals.max() - marginals.min()) > tolerance:
        return None

    return float(marginals.mean())


def _mask(net, refs, key):
    if refs == "all":
        return net.full_mask()

    if not isinstance(refs, list):
        raise ProcessFormatError("%s must be a list of edges or \"all\""
                                 % key, key=key)

    try:
        return net.mask(refs)

    except InputError as e:
        raise ProcessFormatError(e.message, key=key) from e


def _prob(value, key):
    return util.to_fraction(value, key, lambda msg: ProcessFormatError(
        msg, key=key))


def validate_process(raw, net):
    """ Parse a process document against net. """
    if not isinstance(raw, dict) or raw.get("type") not in PROCESS_TYPES:
        raise ProcessFormatError("process 'type' must be one of %s"
                                 % ", ".join(PROCESS_TYPES), key="type")

    kind = raw["type"]

    if kind == "table":
        util.reject_unknown_keys(raw, ("type", "configs"), "table process",
                                 error=ProcessFormatError)
        pairs = []

        for item in raw.get("configs") or []:
            util.reject_unknown_keys(item, ("on", "p"), "table row",
                                     error=ProcessFormatError)
            if "on" not in item or "p" not in item:
                raise ProcessFormatError("table rows need 'on' and 'p'",
                                         key="configs")
            pairs.append((_mask(net, item["on"], "on"), _prob(item["p"], "p")))

        return ConfigTable.from_pairs(pairs, net.m)

    if kind == "iid":
        util.reject_unknown_keys(raw, ("type", "p"), "iid process",
                                 error=ProcessFormatError)
        p = raw.get("p")

        if isinstance(p, dict):
            probs = [None] * net.m

            for ref, value in p.items():
                try:
                    e = net.edge(ref)
                except InputError as err:
                    raise ProcessFormatError(err.message, key="p") from err
                probs[e] = _prob(value, "p")

            if None in probs:
                missing = net.edge_name(probs.index(None))
                raise ProcessFormatError("no ON probability for edge %s"
                                         % missing, key="p")

            return IidLinkProcess(probs)

        return IidLinkProcess.uniform(net.m, _prob(p, "p"))

    util.reject_unknown_keys(raw, ("type", "states", "transition", "initial"),
                             "markov process", error=ProcessFormatError)
    states = [_mask(net, refs, "states") for refs in raw.get("states") or []]
    transition = [[_prob(x, "transition") for x in row]
                  for row in raw.get("transition") or []]
    return MarkovConfigProcess(states, transition, raw.get("initial", 0))


def load_process(path, net):
    """ Read and validate a process file against net. """
    return validate_process(util.load_json(path), net)


def process_to_raw(process, net):
    """ The process as a document accepted by validate_process. """
    def refs(mask):
        return [net.edge_name(e) for e in mask]

    if isinstance(process, ConfigTable):
        return {"type": "table", "configs": [
            {"on": refs(mask), "p": str(p)} for mask, p in process]}

    if isinstance(process, IidLinkProcess):
        if process.uniform_p is not None:
            return {"type": "iid", "p": str(process.uniform_p)}
        return {"type": "iid", "p": {net.edge_name(e): str(p)
                                     for e, p in enumerate(process.exact)}}

    return {"type": "markov", "states": [refs(s) for s in process.states],
            "transition": [[str(x) for x in row] for row in process.exact],
            "initial": process.initial}
