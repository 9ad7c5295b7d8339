""" Immutable network model: validation, neighbourhoods, cuts and the
enumeration of feasible link activations.

Node ids are dense ints given by the order of the "nodes" list; edges are
sorted by their (src, dst) id pair and addressed by their position in that
order. Edge subsets are int bit patterns, bit e standing for edge e, and
the canonical order of subsets is the order of those ints.
"""

import collections
import string

import networkx as nx
import numpy as np

from . import config, util
from .errors import InputError

Edge = collections.namedtuple('Edge', 'src dst cap')

NETWORK_KEYS = ("nodes", "source", "edges", "interference")
EDGE_KEYS = ("src", "dst", "cap")


class NetworkFormatError(InputError):
    fields = ("key",)


class CycleError(InputError):
    fields = ("back_edge",)


class UnreachableError(InputError):
    fields = ("node",)


class CapacityError(InputError):
    fields = ("edge", "cap")


class SourceCutError(InputError):
    fields = ("node",)


class TooManyMatchings(InputError):
    fields = ("limit",)


class TooManyCuts(InputError):
    fields = ("limit", "nodes")


class EdgeMask:

    """ Subset of the m edges of a network, held as an int bit pattern. """

    __slots__ = ("bits", "m")

    def __init__(self, bits, m):
        if not 0 <= bits < (1 << m):
            raise ValueError("bit pattern %r does not fit %d edges" % (bits, m))
        self.bits = bits
        self.m = m

    @classmethod
    def from_edges(cls, edges, m):
        bits = 0
        for e in edges:
            if not 0 <= e < m:
                raise ValueError("edge index %r out of range" % e)
            bits |= 1 << e
        return cls(bits, m)

    @classmethod
    def from_flags(cls, flags):
        """ Mask of the positions where flags is true. """
        flags = np.asarray(flags, dtype=bool)
        m = len(flags)

        if m < 63:
            return cls(int(np.left_shift(1, np.arange(m))[flags].sum()), m)

        return cls.from_edges(np.flatnonzero(flags).tolist(), m)

    @classmethod
    def full(cls, m):
        return cls((1 << m) - 1, m)

    @classmethod
    def empty(cls, m):
        return cls(0, m)

    def __iter__(self):
        return iter(util.bit_indices(self.bits))

    def __len__(self):
        return util.popcount(self.bits)

    def __contains__(self, e):
        return bool(self.bits >> e & 1)

    def __eq__(self, other):
        if not isinstance(other, EdgeMask):
            return NotImplemented
        return self.bits == other.bits and self.m == other.m

    def __hash__(self):
        return hash((self.bits, self.m))

    def __lt__(self, other):
        return self.bits < other.bits

    def issubset(self, other):
        return self.bits & ~other.bits == 0

    def edges(self):
        """ Set edge indices, ascending. """
        return util.bit_indices(self.bits)

    def vector(self, dtype=np.int64):
        """ 0/1 incidence vector of length m. """
        if self.m < 63:
            flags = (np.int64(self.bits) >> np.arange(self.m)) & 1
            return flags.astype(dtype)

        out = np.zeros(self.m, dtype=dtype)
        for e in self:
            out[e] = 1
        return out

    def __repr__(self):
        return "%s(%s)" % (type(self).__name__, self.edges())


class Activation(EdgeMask):

    """ An EdgeMask that is feasible under the network's interference
    model and lies inside the configuration it was built against. """

    __slots__ = ()


class Network:

    """ Directed acyclic network with integer capacities and a source.

    Build instances with build_network or validate_network; the
    constructor trusts its input.
    """

    def __init__(self, names, source, edges, interference="primary"):
        self.names = tuple(names)
        self.n = len(self.names)
        self.index = {name: i for i, name in enumerate(self.names)}
        self.source = source
        self.interference = interference
        self.edges = tuple(sorted(Edge(*e) for e in edges))
        self.m = len(self.edges)
        self.edge_index = {(e.src, e.dst): i for i, e in enumerate(self.edges)}
        self.capacities = np.array([e.cap for e in self.edges], dtype=np.int64)
        self.c_max = int(self.capacities.max()) if self.m else 0
        self.endpoint_bits = tuple((1 << e.src) | (1 << e.dst)
                                   for e in self.edges)

        in_edges = [[] for _ in range(self.n)]
        out_edges = [[] for _ in range(self.n)]

        for i, e in enumerate(self.edges):
            out_edges[e.src].append(i)
            in_edges[e.dst].append(i)

        self.in_edges = tuple(tuple(x) for x in in_edges)
        self.out_edges = tuple(tuple(x) for x in out_edges)
        self.in_neighbors = tuple(tuple(sorted(self.edges[i].src for i in x))
                                  for x in in_edges)
        self.out_neighbors = tuple(tuple(sorted(self.edges[i].dst for i in x))
                                   for x in out_edges)

        # per-slot arrays; in_table rows are padded with n
        self.src_index = np.array([e.src for e in self.edges], dtype=np.intp)
        self.dst_index = np.array([e.dst for e in self.edges], dtype=np.intp)
        width = max([len(x) for x in self.in_neighbors] + [1])
        self.in_table = np.full((self.n, width), self.n, dtype=np.intp)
        self.child_table = np.zeros((self.n, self.n), dtype=bool)

        for j, nbrs in enumerate(self.in_neighbors):
            if nbrs:
                self.in_table[j, :len(nbrs)] = nbrs
                self.child_table[list(nbrs), j] = True

    def __repr__(self):
        return "Network(n=%d, m=%d, source=%r)" % (
            self.n, self.m, self.names[self.source])

    def node(self, ref):
        """ Node id for a node name or id. """
        if isinstance(ref, str):
            try:
                return self.index[ref]
            except KeyError:
                raise NetworkFormatError("unknown node %r" % ref, key=ref)

        if isinstance(ref, int) and not isinstance(ref, bool) \
                and 0 <= ref < self.n:
            return ref

        raise NetworkFormatError("unknown node %r" % (ref,), key=ref)

    def edge(self, ref):
        """ Edge index for "src->dst", [src, dst] or an edge index. """
        if isinstance(ref, int) and not isinstance(ref, bool):
            if 0 <= ref < self.m:
                return ref
            raise NetworkFormatError("edge index %r out of range" % ref,
                                     key=ref)

        if isinstance(ref, str) and "->" in ref:
            ref = [part.strip() for part in ref.split("->", 1)]

        if isinstance(ref, (list, tuple)) and len(ref) == 2:
            pair = self.node(ref[0]), self.node(ref[1])
            if pair in self.edge_index:
                return self.edge_index[pair]

        raise NetworkFormatError("unknown edge %r" % (ref,), key=str(ref))

    def edge_name(self, e):
        edge = self.edges[e]
        return "%s->%s" % (self.names[edge.src], self.names[edge.dst])

    def mask(self, refs):
        """ EdgeMask holding the referenced edges. """
        return EdgeMask.from_edges((self.edge(r) for r in refs), self.m)

    def full_mask(self):
        return EdgeMask.full(self.m)

    def to_digraph(self):
        """ A fresh networkx view of the topology. """
        graph = nx.DiGraph()
        graph.add_nodes_from(range(self.n))
        graph.add_edges_from((e.src, e.dst, {"cap": e.cap})
                             for e in self.edges)
        return graph

    def to_raw(self):
        """ The network as a document accepted by validate_network. """
        return {
            "nodes": list(self.names),
            "source": self.names[self.source],
            "edges": [{"src": self.names[e.src], "dst": self.names[e.dst],
                       "cap": e.cap} for e in self.edges],
        }


class CutVector:

    """ Capacity vector of the edges leaving the node set U (r in U). """

    def __init__(self, net, members):
        members = frozenset(members)

        if net.source not in members:
            raise ValueError("a proper cut must contain the source")

        if len(members) >= net.n:
            raise ValueError("a proper cut must leave a node outside")

        self.members = members
        self.vector = np.array(
            [e.cap if e.src in members and e.dst not in members else 0
             for e in net.edges], dtype=np.int64)

    def dot(self, beta):
        return float(np.dot(self.vector, beta))

    def crossing(self):
        """ Indices of the edges crossing the cut. """
        return [int(e) for e in np.flatnonzero(self.vector)]

    def __repr__(self):
        return "CutVector(%s)" % sorted(self.members)


def primary_interference(net, bits):
    """ True if the edges in bits pairwise share no node (a matching). """
    used = 0

    for e in util.bit_indices(bits):
        ends = net.endpoint_bits[e]
        if used & ends:
            return False
        used |= ends

    return True


# Predicates must be hereditary: every subset of a feasible set is feasible.
INTERFERENCE = {"primary": primary_interference}


def build_network(names, source, edges, interference="primary"):
    """ Check the model assumptions and return a Network.

    edges holds (src, dst, cap) triples with node names or ids.
    """
    names = list(names)

    if not names:
        raise NetworkFormatError("a network needs at least one node",
                                 key="nodes")

    for name in names:
        if not isinstance(name, str) or not name.strip():
            raise NetworkFormatError("node names must be non-empty strings, "
                                     "got %r" % (name,), key="nodes")

    if len(set(names)) != len(names):
        dup = sorted(x for x in set(names) if names.count(x) > 1)[0]
        raise NetworkFormatError("duplicate node %r" % dup, key="nodes")

    if interference not in INTERFERENCE:
        raise NetworkFormatError("unsupported interference model %r"
                                 % (interference,), key="interference")

    index = {name: i for i, name in enumerate(names)}

    def lookup(ref, key):
        if isinstance(ref, str) and ref in index:
            return index[ref]
        if isinstance(ref, int) and not isinstance(ref, bool) \
                and 0 <= ref < len(names):
            return ref
        raise NetworkFormatError("unknown node %r" % (ref,), key=key)

    r = lookup(source, "source")
    resolved = []
    seen = set()

    for src, dst, cap in edges:
        u, v = lookup(src, "src"), lookup(dst, "dst")
        label = "%s->%s" % (names[u], names[v])

        if isinstance(cap, bool) or not isinstance(cap, int) or cap < 1:
            raise CapacityError("capacity of %s must be an integer >= 1, "
                                "got %r" % (label, cap), edge=label, cap=cap)

        if (u, v) in seen:
            raise NetworkFormatError("duplicate edge %s" % label, key="edges")

        if u == v:
            raise CycleError("self-loop at %s" % names[u],
                             back_edge=(names[u], names[v]))

        seen.add((u, v))
        resolved.append((u, v, cap))

    graph = nx.DiGraph()
    graph.add_nodes_from(range(len(names)))
    graph.add_edges_from((u, v) for u, v, _ in resolved)

    try:
        cycle = nx.find_cycle(graph, orientation="original")

    except nx.NetworkXNoCycle:
        pass

    else:
        u, v = cycle[-1][0], cycle[-1][1]
        raise CycleError("cycle closed by back edge %s->%s"
                         % (names[u], names[v]), back_edge=(names[u], names[v]))

    reachable = nx.descendants(graph, r) | {r}

    for v in range(len(names)):
        if v not in reachable:
            raise UnreachableError("node %s is not reachable from source %s"
                                   % (names[v], names[r]), node=names[v])

    net = Network(names, r, resolved, interference)
    util.dbg("network: %d nodes, %d edges, source %s", net.n, net.m, names[r])
    return net


def validate_network(raw):
    """ Parse a network document and return a valid Network. """
    util.reject_unknown_keys(raw, NETWORK_KEYS, "network",
                             error=NetworkFormatError)

    for key in ("nodes", "source", "edges"):
        if key not in raw:
            raise NetworkFormatError("network is missing %r" % key, key=key)

    if not isinstance(raw["nodes"], list) or not isinstance(raw["edges"], list):
        raise NetworkFormatError("'nodes' and 'edges' must be lists",
                                 key="nodes")

    edges = []

    for item in raw["edges"]:
        util.reject_unknown_keys(item, EDGE_KEYS, "edge",
                                 error=NetworkFormatError)

        if "src" not in item or "dst" not in item:
            raise NetworkFormatError("edge needs 'src' and 'dst': %r" % item,
                                     key="edges")

        edges.append((item["src"], item["dst"], item.get("cap", 1)))

    return build_network(raw["nodes"], raw["source"], edges,
                         raw.get("interference", "primary"))


def load_network(path):
    """ Read and validate a network file. """
    return validate_network(util.load_json(path))


def is_activation(net, on, act):
    """ True if act is feasible under interference and inside on. """
    feasible = INTERFERENCE[net.interference]
    return act.issubset(on) and feasible(net, act.bits)


def enumerate_matchings(net, on, limit=None):
    """ All feasible activations inside the ON set, empty one included,
    in canonical order.

    Written against the interference predicate, which must be
    hereditary, so the search extends feasible sets edge by edge.
    """
    if on.m != net.m:
        raise ValueError("mask has %d edges, network has %d" % (on.m, net.m))

    limit = limit or config.MATCH_LIMIT.get
    feasible = INTERFERENCE[net.interference]
    on_edges = on.edges()
    found = [0]

    def extend(start, bits):
        for pos in range(start, len(on_edges)):
            grown = bits | (1 << on_edges[pos])

            if feasible(net, grown):
                found.append(grown)

                if len(found) > limit:
                    raise TooManyMatchings(
                        "more than %d activations in configuration %s"
                        % (limit, on.edges()), limit=limit)

                extend(pos + 1, grown)

    extend(0, 0)
    found.sort()
    return [Activation(bits, net.m) for bits in found]


class MatchingCache:

    """ Per-configuration activation lists and incidence matrices, plus
    the incidence scaled by edge capacities for scoring. """

    def __init__(self, net, limit=None):
        self.net = net
        self.limit = limit
        self._store = {}
        self._scaled = {}

    def get(self, on):
        """ Return (activations, incidence matrix) for the ON set. """
        hit = self._store.get(on.bits)

        if hit is None:
            acts = enumerate_matchings(self.net, on, self.limit)
            incidence = np.array([a.vector() for a in acts], dtype=np.int64)
            hit = self._store[on.bits] = (acts, incidence)
            self._scaled[on.bits] = incidence * self.net.capacities
            util.dbg("%d activations for configuration %s", len(acts),
                     on.edges())

        return hit

    def scoring(self, on):
        """ (activations, capacity-scaled incidence) for the ON set. """
        acts, _ = self.get(on)
        return acts, self._scaled[on.bits]

    def __len__(self):
        return len(self._store)


def single_node_cut(net, j):
    """ Cut vector of U = V minus {j}: capacities of the in-edges of j. """
    j = net.node(j)

    if j == net.source:
        raise SourceCutError("the source %s has no single-node cut"
                             % net.names[j], node=net.names[j])

    return CutVector(net, set(range(net.n)) - {j})


def all_proper_cuts(net, limit=None):
    """ One cut vector per node set U with r in U and U != V.

    Sets are ordered by the bit pattern of their non-source members.
    """
    limit = limit or config.CUT_LIMIT.get

    if net.n > limit:
        raise TooManyCuts("%d nodes give 2^%d proper cuts; limit is %d nodes"
                          % (net.n, net.n - 1, limit), limit=limit,
                          nodes=net.n)

    others = [v for v in range(net.n) if v != net.source]
    cuts = []

    for pattern in range((1 << len(others)) - 1):
        members = {net.source}
        members.update(others[i] for i in util.bit_indices(pattern))
        cuts.append(CutVector(net, members))

    return cuts


def topological_order(net):
    """ Node ids with every edge pointing forward; smallest ready id first. """
    return list(nx.lexicographical_topological_sort(net.to_digraph()))


def _grid_names(count):
    letters = [x for x in string.ascii_lowercase if x != "r"]

    if count - 1 <= len(letters):
        return ["r"] + letters[:count - 1]

    return ["r"] + ["v%d" % i for i in range(1, count)]


def grid_network(rows=3, cols=3, cap=1):
    """ rows x cols grid with edges pointing right and down, source in the
    top-left corner. Nodes are named row by row: r, a, b, c, ... """
    names = _grid_names(rows * cols)
    edges = []

    for row in range(rows):
        for col in range(cols):
            here = row * cols + col
            if col + 1 < cols:
                edges.append((here, here + 1, cap))
            if row + 1 < rows:
                edges.append((here, here + cols, cap))

    return build_network(names, 0, edges)


def two_link_network():
    """ Source r with two point-to-point links r->a and r->b. """
    return build_network(["r", "a", "b"], "r", [("r", "a", 1), ("r", "b", 1)])
