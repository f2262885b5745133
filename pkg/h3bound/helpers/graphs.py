"""Trivalent n-graphs: half-edge structure, enumeration, girth and window checks.

Darts 0..6(n-1)-1 are grouped in triples by vertex (dart d sits at vertex
d // 3) and paired into edges by an involution. Edge ids follow the order of
each edge's lower dart.
"""

from __future__ import annotations

import itertools
import logging
import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from functools import cached_property
from typing import Any

import networkx as nx
import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from ..const import MAX_ENUM_RANK, MAX_ORACLE_RANK, MIN_RANK, TOL_CONSTRUCTION
from ..errors import DataError, GirthPreconditionError, GraphError, UnreducedPathError

_LOGGER = logging.getLogger(__name__)


def edge_count(n: int) -> int:
    """Number of edges of an n-graph.

    Raises:
        GraphError: n <= 1
    """
    if n <= 1:
        raise GraphError(f"n-graphs need n > 1, got {n}")
    return 3 * (n - 1)


def vertex_count(n: int) -> int:
    """Number of vertices of an n-graph."""
    return 2 * edge_count(n) // 3


# -------------------------------------------------------------------------
# Graph structure
# -------------------------------------------------------------------------


@dataclass(frozen=True)
class TrivalentGraph:
    """Connected trivalent multigraph (loops allowed) stored as a dart pairing."""

    pairing: tuple[int, ...]

    def __post_init__(self) -> None:
        """Validate the involution, trivalence and connectivity."""
        pairing = tuple(int(p) for p in self.pairing)
        object.__setattr__(self, "pairing", pairing)
        darts = len(pairing)
        if darts == 0 or darts % 6:
            raise GraphError(f"{darts} darts do not form a trivalent graph of rank >= 2")
        for d, p in enumerate(pairing):
            if not 0 <= p < darts or p == d or pairing[p] != d:
                raise GraphError(f"dart pairing is not a fixed-point-free involution at {d}")
        if not nx.is_connected(self.to_networkx()):
            raise GraphError("n-graphs are connected")

    @classmethod
    def from_edges(cls, edges: Iterable[tuple[int, int]]) -> TrivalentGraph:
        """Build from vertex pairs; a pair (v, v) is a loop."""
        edges = list(edges)
        num_vertices = 1 + max(max(e) for e in edges)
        used = [0] * num_vertices
        pairing = [-1] * (3 * num_vertices)
        for u, v in edges:
            du = 3 * u + used[u]
            used[u] += 1
            dv = 3 * v + used[v]
            used[v] += 1
            if used[u] > 3 or used[v] > 3:
                raise GraphError(f"vertex of degree > 3 in edge {(u, v)}")
            pairing[du], pairing[dv] = dv, du
        if any(count != 3 for count in used):
            raise GraphError("every vertex needs exactly three half-edges")
        return cls(tuple(pairing))

    @classmethod
    def theta(cls) -> TrivalentGraph:
        """Two vertices joined by three edges."""
        return cls.from_edges([(0, 1), (0, 1), (0, 1)])

    @classmethod
    def dumbbell(cls) -> TrivalentGraph:
        """Two loops joined by a bar."""
        return cls.from_edges([(0, 0), (0, 1), (1, 1)])

    @property
    def num_darts(self) -> int:
        """Number of half-edges."""
        return len(self.pairing)

    @property
    def num_vertices(self) -> int:
        """Number of vertices, 2(n-1)."""
        return self.num_darts // 3

    @property
    def num_edges(self) -> int:
        """Number of edges, 3(n-1)."""
        return self.num_darts // 2

    @property
    def rank(self) -> int:
        """Rank n of the free fundamental group."""
        return self.num_vertices // 2 + 1

    @property
    def euler_characteristic(self) -> int:
        """V - E, which equals 1 - n."""
        return self.num_vertices - self.num_edges

    @staticmethod
    def vertex_of(dart: int) -> int:
        """Vertex carrying a dart."""
        return dart // 3

    @cached_property
    def edge_darts(self) -> tuple[tuple[int, int], ...]:
        """(lower dart, upper dart) per edge id."""
        return tuple((d, p) for d, p in enumerate(self.pairing) if d < p)

    @cached_property
    def edge_of_dart(self) -> tuple[int, ...]:
        """Edge id of every dart."""
        out = [0] * self.num_darts
        for e, (d, p) in enumerate(self.edge_darts):
            out[d] = out[p] = e
        return tuple(out)

    def endpoints(self, edge: int) -> tuple[int, int]:
        """Vertices at the lower and upper dart of an edge."""
        d, p = self.edge_darts[edge]
        return self.vertex_of(d), self.vertex_of(p)

    @property
    def edges(self) -> list[tuple[int, int]]:
        """Endpoint pairs of all edges in id order."""
        return [self.endpoints(e) for e in range(self.num_edges)]

    def is_loop(self, edge: int) -> bool:
        """Return True for a one-edge loop."""
        u, v = self.endpoints(edge)
        return u == v

    def adjacency_matrix(self) -> np.ndarray:
        """Edge multiplicities, loops counted once on the diagonal."""
        adj = np.zeros((self.num_vertices, self.num_vertices), dtype=int)
        for u, v in self.edges:
            adj[u, v] += 1
            if u != v:
                adj[v, u] += 1
        return adj

    def to_networkx(self) -> nx.MultiGraph:
        """MultiGraph whose edge keys are edge ids."""
        graph = nx.MultiGraph()
        graph.add_nodes_from(range(len(self.pairing) // 3))
        for d, p in enumerate(self.pairing):
            if d < p:
                graph.add_edge(d // 3, p // 3)
        return graph

    def weighted_networkx(self, weights: LengthAssignment) -> nx.MultiGraph:
        """MultiGraph keyed by edge id with a `weight` attribute."""
        graph = nx.MultiGraph()
        graph.add_nodes_from(range(self.num_vertices))
        for e, (u, v) in enumerate(self.edges):
            graph.add_edge(u, v, key=e, weight=weights[e])
        return graph

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary representation."""
        return {"rank": self.rank, "pairing": list(self.pairing)}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> TrivalentGraph:
        """Create a graph from its dictionary representation."""
        try:
            if "pairing" in data:
                return cls(tuple(data["pairing"]))
            return cls.from_edges(tuple(e) for e in data["edges"])
        except (KeyError, TypeError, ValueError, GraphError) as err:
            raise DataError(f"malformed graph: {err}") from err


@dataclass(frozen=True)
class LengthAssignment:
    """Positive length per edge id."""

    lengths: tuple[float, ...]

    def __post_init__(self) -> None:
        """Validate positivity."""
        lengths = tuple(float(x) for x in self.lengths)
        if not all(x > 0.0 and math.isfinite(x) for x in lengths):
            raise GraphError("edge lengths must be positive and finite")
        object.__setattr__(self, "lengths", lengths)

    def __getitem__(self, edge: int) -> float:
        """Length of an edge."""
        return self.lengths[edge]

    def __len__(self) -> int:
        """Number of edges."""
        return len(self.lengths)

    @property
    def total(self) -> float:
        """Sum of all edge lengths."""
        return math.fsum(self.lengths)

    def scaled(self, factor: float) -> LengthAssignment:
        """Multiply every length by factor."""
        return LengthAssignment(tuple(factor * x for x in self.lengths))

    def for_graph(self, graph: TrivalentGraph) -> LengthAssignment:
        """Check that there is one length per edge of graph."""
        if len(self.lengths) != graph.num_edges:
            raise GraphError(f"{len(self.lengths)} lengths for {graph.num_edges} edges")
        return self


# -------------------------------------------------------------------------
# Directed edge paths
# -------------------------------------------------------------------------


@dataclass(frozen=True)
class DirectedEdgePath:
    """Sequence of (edge id, forward) steps; forward runs lower dart to upper dart."""

    steps: tuple[tuple[int, bool], ...]

    def __post_init__(self) -> None:
        """Normalize to tuples."""
        object.__setattr__(self, "steps", tuple((int(e), bool(f)) for e, f in self.steps))

    def __len__(self) -> int:
        """Combinatorial length."""
        return len(self.steps)

    @classmethod
    def from_darts(cls, graph: TrivalentGraph, darts: Sequence[int]) -> DirectedEdgePath:
        """Build from the dart each step leaves from."""
        steps = []
        for d in darts:
            e = graph.edge_of_dart[d]
            steps.append((e, graph.edge_darts[e][0] == d))
        return cls(tuple(steps))

    def start_darts(self, graph: TrivalentGraph) -> list[int]:
        """Dart each step leaves from."""
        return [graph.edge_darts[e][0 if forward else 1] for e, forward in self.steps]

    def validate(self, graph: TrivalentGraph) -> None:
        """Check edge ids and that consecutive steps share a vertex.

        Raises:
            GraphError: the steps do not form a path in graph
        """
        if not self.steps:
            raise GraphError("empty edge path")
        for e, _ in self.steps:
            if not 0 <= e < graph.num_edges:
                raise GraphError(f"edge id {e} out of range")
        darts = self.start_darts(graph)
        for prev, nxt in itertools.pairwise(darts):
            if graph.vertex_of(graph.pairing[prev]) != graph.vertex_of(nxt):
                raise GraphError("consecutive steps do not share a vertex")

    def is_closed(self, graph: TrivalentGraph) -> bool:
        """Return True if the path ends where it starts."""
        darts = self.start_darts(graph)
        return graph.vertex_of(graph.pairing[darts[-1]]) == graph.vertex_of(darts[0])

    def is_reduced(self, graph: TrivalentGraph, cyclic: bool | None = None) -> bool:
        """Return True if no step immediately retraces the previous one.

        For closed paths the wrap from the last step to the first is checked
        too unless cyclic is False.
        """
        darts = self.start_darts(graph)
        pairs = list(itertools.pairwise(darts))
        if cyclic is None:
            cyclic = self.is_closed(graph)
        if cyclic:
            pairs.append((darts[-1], darts[0]))
        return all(nxt != graph.pairing[prev] for prev, nxt in pairs)

    def lengths(self, weights: LengthAssignment) -> list[float]:
        """Edge length of every step."""
        return [weights[e] for e, _ in self.steps]

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary representation."""
        return {"steps": [[e, f] for e, f in self.steps]}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> DirectedEdgePath:
        """Create a path from its dictionary representation."""
        try:
            return cls(tuple((e, f) for e, f in data["steps"]))
        except (KeyError, TypeError, ValueError) as err:
            raise DataError(f"malformed path: {err}") from err


def _next_darts(graph: TrivalentGraph, dart: int) -> list[int]:
    """Darts a reduced path may leave from after traversing `dart`."""
    arrive = graph.pairing[dart]
    base = 3 * graph.vertex_of(arrive)
    return [base + i for i in range(3) if base + i != arrive]


def non_backtracking_matrix(graph: TrivalentGraph) -> np.ndarray:
    """Transition matrix on darts for reduced steps."""
    b = np.zeros((graph.num_darts, graph.num_darts))
    for d in range(graph.num_darts):
        b[d, _next_darts(graph, d)] = 1.0
    return b


def reduced_closed_paths(graph: TrivalentGraph, max_len: int) -> list[DirectedEdgePath]:
    """All cyclically reduced closed paths of length 1..max_len.

    Rotations and reversals are listed separately.
    """
    found: list[DirectedEdgePath] = []

    def extend(darts: list[int]) -> None:
        last = darts[-1]
        if graph.vertex_of(graph.pairing[last]) == graph.vertex_of(darts[0]) and darts[0] != graph.pairing[last]:
            found.append(DirectedEdgePath.from_darts(graph, darts))
        if len(darts) == max_len:
            return
        for nxt in _next_darts(graph, last):
            darts.append(nxt)
            extend(darts)
            darts.pop()

    for start in range(graph.num_darts):
        extend([start])
    return found


def random_reduced_closed_path(
    graph: TrivalentGraph, k: int, seed: int | np.random.Generator | None = None
) -> DirectedEdgePath:
    """Sample uniformly among cyclically reduced closed paths of length k.

    Uses powers of the non-backtracking matrix: the first dart is drawn with
    weight (B^k)[d, d], each later dart with weight B[prev, d] (B^r)[d, first].

    Raises:
        GraphError: k < 1 or no such path exists
    """
    if k < 1:
        raise GraphError(f"path length must be at least 1, got {k}")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    b = non_backtracking_matrix(graph)
    powers = [np.eye(graph.num_darts)]
    for _ in range(k):
        powers.append(powers[-1] @ b)
        # Rescale to keep large k finite; only ratios matter.
        powers[-1] /= max(1.0, powers[-1].max())
    diag = np.diag(powers[k]).copy()
    if diag.sum() <= 0.0:
        raise GraphError(f"no reduced closed path of length {k}")
    first = int(rng.choice(graph.num_darts, p=diag / diag.sum()))
    darts = [first]
    for step in range(1, k):
        weights = b[darts[-1]] * powers[k - step][:, first]
        darts.append(int(rng.choice(graph.num_darts, p=weights / weights.sum())))
    return DirectedEdgePath.from_darts(graph, darts)


# -------------------------------------------------------------------------
# Canonical form and enumeration
# -------------------------------------------------------------------------


def canonical_code(graph: TrivalentGraph) -> str:
    """Minimum column-by-column upper-triangular adjacency code over vertex orderings.

    Entry (i, j), i <= j, is the number of edges between the i-th and j-th
    vertex of the ordering, loops on the diagonal. Isomorphic graphs share codes.
    """
    adj = graph.adjacency_matrix().tolist()
    size = graph.num_vertices
    best: list[int] | None = None

    def extend(order: list[int], code: list[int]) -> None:
        nonlocal best
        if len(order) == size:
            if best is None or code < best:
                best = code
            return
        for v in range(size):
            if v in order:
                continue
            candidate = code + [adj[u][v] for u in order] + [adj[v][v]]
            if best is not None and candidate > best[: len(candidate)]:
                continue
            extend(order + [v], candidate)

    extend([], [])
    assert best is not None
    return "".join(str(x) for x in best)


def _with_edges(graph: TrivalentGraph, drop: Sequence[int], add: Iterable[tuple[int, int]]) -> TrivalentGraph:
    keep = [edge for e, edge in enumerate(graph.edges) if e not in drop]
    return TrivalentGraph.from_edges(keep + list(add))


def _grow(graph: TrivalentGraph) -> Iterable[TrivalentGraph]:
    """All rank + 1 graphs obtained by one subdivision move."""
    edges = graph.edges
    x, y = graph.num_vertices, graph.num_vertices + 1
    for e, f in itertools.combinations_with_replacement(range(len(edges)), 2):
        (a, b), (c, d) = edges[e], edges[f]
        if e == f:
            yield _with_edges(graph, [e], [(a, x), (x, y), (y, b), (x, y)])
        else:
            yield _with_edges(graph, [e, f], [(a, x), (x, b), (c, y), (y, d), (x, y)])
    for e, (a, b) in enumerate(edges):
        yield _with_edges(graph, [e], [(a, x), (x, b), (x, y), (y, y)])


class _IsomorphismBuckets:
    """Deduplicate graphs by Weisfeiler-Lehman hash, then exact isomorphism."""

    def __init__(self) -> None:
        self._buckets: dict[str, list[tuple[TrivalentGraph, nx.MultiGraph]]] = {}

    def add(self, graph: TrivalentGraph) -> bool:
        nxg = graph.to_networkx()
        key = nx.weisfeiler_lehman_graph_hash(nx.Graph(nxg))
        bucket = self._buckets.setdefault(key, [])
        if any(nx.is_isomorphic(nxg, other) for _, other in bucket):
            return False
        bucket.append((graph, nxg))
        return True

    def graphs(self) -> list[TrivalentGraph]:
        return [g for bucket in self._buckets.values() for g, _ in bucket]


def _sorted_by_code(graphs: Iterable[TrivalentGraph]) -> list[TrivalentGraph]:
    return [g for _, g in sorted(((canonical_code(g), g) for g in graphs), key=lambda t: t[0])]


def enumerate_n_graphs(n: int) -> list[TrivalentGraph]:
    """Every n-graph up to isomorphism, sorted by canonical code.

    Grows from the two 2-graphs by joining two subdivision points (possibly
    on the same edge) or by attaching a loop on a stalk.

    Raises:
        GraphError: n outside 2..5
    """
    if not MIN_RANK <= n <= MAX_ENUM_RANK:
        raise GraphError(f"enumeration supports {MIN_RANK} <= n <= {MAX_ENUM_RANK}, got {n}")
    layer = [TrivalentGraph.theta(), TrivalentGraph.dumbbell()]
    for rank in range(MIN_RANK + 1, n + 1):
        buckets = _IsomorphismBuckets()
        for graph in layer:
            for child in _grow(graph):
                buckets.add(child)
        layer = buckets.graphs()
        _LOGGER.debug("Enumerated %d graphs of rank %d", len(layer), rank)
    return _sorted_by_code(layer)


def enumerate_by_pairings(n: int) -> list[TrivalentGraph]:
    """Brute-force enumeration over every dart pairing on 2(n-1) labeled vertices."""
    if not MIN_RANK <= n <= MAX_ORACLE_RANK:
        raise GraphError(f"pairing enumeration supports {MIN_RANK} <= n <= {MAX_ORACLE_RANK}")
    darts = 6 * (n - 1)
    seen: dict[str, TrivalentGraph] = {}

    def matchings(free: list[int]) -> Iterable[list[tuple[int, int]]]:
        if not free:
            yield []
            return
        first, rest = free[0], free[1:]
        for i, partner in enumerate(rest):
            for tail in matchings(rest[:i] + rest[i + 1 :]):
                yield [(first, partner), *tail]

    for matching in matchings(list(range(darts))):
        pairing = [0] * darts
        for a, b in matching:
            pairing[a], pairing[b] = b, a
        try:
            graph = TrivalentGraph(tuple(pairing))
        except GraphError:
            continue
        seen.setdefault(canonical_code(graph), graph)
    return [seen[code] for code in sorted(seen)]


def catalog_lines(graphs: Iterable[TrivalentGraph]) -> list[str]:
    """One line per graph: canonical code and edge list."""
    return [f"{canonical_code(g)} {g.edges}" for g in graphs]


# -------------------------------------------------------------------------
# Cycles and girth
# -------------------------------------------------------------------------


@dataclass(frozen=True)
class GirthResult:
    """Shortest simple cycle: total length and its edge ids."""

    length: float
    cycle: tuple[int, ...]

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary representation."""
        return {"length": self.length, "cycle": list(self.cycle)}


def girth_length(graph: TrivalentGraph, weights: LengthAssignment) -> GirthResult:
    """Minimum total length over simple cycles, with a witness.

    For each edge, the shortest cycle through it is the edge plus a shortest
    path between its endpoints avoiding it.
    """
    weights.for_graph(graph)
    nxg = graph.weighted_networkx(weights)
    best = GirthResult(math.inf, ())
    for e, (u, v) in enumerate(graph.edges):
        if u == v:
            if weights[e] < best.length:
                best = GirthResult(weights[e], (e,))
            continue
        nxg.remove_edge(u, v, key=e)
        try:
            length, nodes = nx.single_source_dijkstra(nxg, u, v, weight="weight")
        except nx.NetworkXNoPath:
            length, nodes = math.inf, []
        finally:
            nxg.add_edge(u, v, key=e, weight=weights[e])
        if length + weights[e] < best.length:
            cycle = [e]
            for a, b in itertools.pairwise(nodes):
                parallel = [k for k in nxg[a][b] if k != e]
                cycle.append(min(parallel, key=lambda k: weights[k]))
            best = GirthResult(length + weights[e], tuple(cycle))
    return best


def simple_cycles(graph: TrivalentGraph) -> list[tuple[int, ...]]:
    """Every simple cycle as a sorted tuple of edge ids (loops and bigons included)."""
    incident: dict[int, list[tuple[int, int]]] = {v: [] for v in range(graph.num_vertices)}
    for e, (u, v) in enumerate(graph.edges):
        incident[u].append((e, v))
        if u != v:
            incident[v].append((e, u))
    cycles: set[tuple[int, ...]] = set()

    def walk(start: int, at: int, used: list[int], visited: set[int]) -> None:
        for e, other in incident[at]:
            if e in used:
                continue
            if other == start:
                cycles.add(tuple(sorted([*used, e])))
            elif other > start and other not in visited:
                visited.add(other)
                walk(start, other, [*used, e], visited)
                visited.remove(other)

    for start in range(graph.num_vertices):
        walk(start, start, [], {start})
    return sorted(cycles)


# -------------------------------------------------------------------------
# Long edges in windows
# -------------------------------------------------------------------------


@dataclass(frozen=True)
class WindowCheckResult:
    """Outcome of the long-edge window scan."""

    passed: bool
    threshold: float
    window_size: int
    window_start: int | None = None
    window: tuple[tuple[int, bool], ...] = ()

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary representation."""
        return {
            "passed": self.passed,
            "threshold": self.threshold,
            "window_size": self.window_size,
            "window_start": self.window_start,
            "window": [[e, f] for e, f in self.window],
        }


def cyclic_window_maxima(lengths: Sequence[float] | np.ndarray, size: int) -> np.ndarray:
    """Maximum of every cyclic window of `size` consecutive terms, one per start index."""
    arr = np.asarray(lengths, dtype=float)
    reps = -(-(len(arr) + size - 1) // len(arr))
    extended = np.tile(arr, reps)[: len(arr) + size - 1]
    return sliding_window_view(extended, size).max(axis=1)


def window_long_edge_check(
    graph: TrivalentGraph,
    weights: LengthAssignment,
    path: DirectedEdgePath,
    n: int,
    girth_bound: float,
) -> WindowCheckResult:
    """Check that every cyclic window of 3(n-1) steps has an edge >= girth_bound / 3(n-1).

    Raises:
        GraphError: path is not a closed path of graph
        UnreducedPathError: path backtracks
        GirthPreconditionError: the girth of weights is below girth_bound
    """
    weights.for_graph(graph)
    path.validate(graph)
    if not path.is_closed(graph):
        raise GraphError("window check needs a closed path")
    if not path.is_reduced(graph, cyclic=True):
        raise UnreducedPathError("window check needs a reduced path")
    girth = girth_length(graph, weights)
    if girth.length < girth_bound * (1.0 - TOL_CONSTRUCTION):
        raise GirthPreconditionError(
            f"girth {girth.length:.12g} is below the bound {girth_bound:.12g}"
        )
    size = edge_count(n)
    threshold = girth_bound / size
    maxima = cyclic_window_maxima(path.lengths(weights), size)
    bad = np.flatnonzero(maxima < threshold * (1.0 - TOL_CONSTRUCTION))
    if bad.size == 0:
        return WindowCheckResult(True, threshold, size)
    start = int(bad[0])
    window = tuple(path.steps[(start + j) % len(path)] for j in range(size))
    return WindowCheckResult(False, threshold, size, start, window)


def two_long_edges_check(sequence: Sequence[float], n: int, length: float) -> bool:
    """Every cyclic run of 2 * 3(n-1) terms holds at least two terms >= length.

    Guaranteed by the window check when the girth exceeds [3(n-1)]^2 * length.
    """
    size = 2 * edge_count(n)
    arr = np.asarray(sequence, dtype=float)
    if arr.size == 0:
        return False
    reps = -(-(len(arr) + size - 1) // len(arr))
    extended = np.tile(arr >= length * (1.0 - TOL_CONSTRUCTION), reps)[: len(arr) + size - 1]
    counts = sliding_window_view(extended, size).sum(axis=1)
    return bool(np.all(counts >= 2))
