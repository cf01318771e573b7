"""Decorated dual graphs of twisted nodal curves.

A nodal curve is modelled by its dual graph: one vertex per irreducible
component (decorated with the component's genus and the markings lying on
it), one edge per node.  Each edge carries the order of the cyclic
stabilizer at the node; an ordinary node has order 1.  Edges are stored
with an orientation (tail, head).  The orientation is bookkeeping for the
chain-complex maps built downstream: isomorphism and every numeric
invariant ignore it, and the head branch is the "+" branch wherever a
sign convention is needed.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

__all__ = [
    "GraphError",
    "DisconnectedGraph",
    "BadIndex",
    "UnsupportedGenus",
    "SizeLimitExceeded",
    "MultiIndexLengthMismatch",
    "Vertex",
    "Edge",
    "DualGraph",
    "dual_graph",
    "MultiIndex",
    "NodeType",
    "genus",
    "betti",
    "classify_node",
    "node_type_index",
    "bridges",
    "is_stable",
    "is_l_stable",
    "canonical_form",
    "enumerate_stable_graphs",
    "relabel",
    "flip_edge",
    "spanning_tree",
]

MAX_CANONICAL_VERTICES = 10
MAX_ENUMERATION_GENUS = 4
MAX_ENUMERATION_VERTICES = 8


class GraphError(ValueError):
    """Base class for dual-graph construction and query errors."""


class DisconnectedGraph(GraphError):
    pass


class BadIndex(GraphError):
    pass


class UnsupportedGenus(GraphError):
    pass


class SizeLimitExceeded(GraphError):
    pass


class MultiIndexLengthMismatch(GraphError):
    pass


@dataclass(frozen=True)
class Vertex:
    """An irreducible component: genus plus the markings lying on it."""

    genus: int
    legs: tuple[int, ...] = ()


@dataclass(frozen=True)
class Edge:
    """A node of the curve, oriented tail -> head, with stabilizer order."""

    tail: int
    head: int
    stabilizer: int = 1


@dataclass(frozen=True, eq=True)
class DualGraph:
    """A connected decorated dual graph.  Loops and parallel edges allowed."""

    vertices: tuple[Vertex, ...]
    edges: tuple[Edge, ...]

    def __hash__(self):
        # Graphs key several caches; hashing the full tuples every lookup
        # dominates otherwise.
        cached = self.__dict__.get("_hash")
        if cached is None:
            cached = hash((self.vertices, self.edges))
            object.__setattr__(self, "_hash", cached)
        return cached

    def __post_init__(self):
        if not self.vertices:
            raise GraphError("a dual graph needs at least one vertex")
        seen_legs = set()
        for i, v in enumerate(self.vertices):
            if v.genus < 0:
                raise GraphError(f"vertex {i}: negative genus {v.genus}")
            for leg in v.legs:
                if leg in seen_legs:
                    raise GraphError(f"marking {leg!r} appears twice")
                seen_legs.add(leg)
        n = len(self.vertices)
        for k, e in enumerate(self.edges):
            if not (0 <= e.tail < n and 0 <= e.head < n):
                raise BadIndex(f"edge {k}: endpoint out of range 0..{n - 1}")
            if e.stabilizer < 1:
                raise GraphError(f"edge {k}: stabilizer {e.stabilizer} < 1")
        if not _is_connected(n, [(e.tail, e.head) for e in self.edges]):
            raise DisconnectedGraph("underlying graph is not connected")

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def valence(self, v: int) -> int:
        """Number of branches at vertex v; a loop counts twice."""
        return sum((e.tail == v) + (e.head == v) for e in self.edges)

    def n_legs(self, v: int) -> int:
        return len(self.vertices[v].legs)

    def incidences(self, v: int) -> list[tuple[int, bool]]:
        """Branches at v as (edge index, is_head) pairs; loops yield both."""
        out = []
        for k, e in enumerate(self.edges):
            if e.head == v:
                out.append((k, True))
            if e.tail == v:
                out.append((k, False))
        return out

    def stabilizers(self) -> tuple[int, ...]:
        return tuple(e.stabilizer for e in self.edges)


def dual_graph(vertices, edges=()) -> DualGraph:
    """Build a DualGraph from plain data.

    ``vertices`` is a sequence whose items are either a bare genus or a
    (genus, legs) pair; ``edges`` items are (tail, head) or
    (tail, head, stabilizer) tuples.
    """
    vs = []
    for spec in vertices:
        if isinstance(spec, int):
            vs.append(Vertex(spec))
        else:
            g, legs = spec
            vs.append(Vertex(g, tuple(legs)))
    es = []
    for spec in edges:
        if len(spec) == 2:
            t, h = spec
            es.append(Edge(t, h))
        else:
            t, h, l = spec
            es.append(Edge(t, h, l))
    return DualGraph(tuple(vs), tuple(es))


def _is_connected(n: int, pairs) -> bool:
    adjacency = [[] for _ in range(n)]
    for t, h in pairs:
        adjacency[t].append(h)
        adjacency[h].append(t)
    seen = {0}
    stack = [0]
    while stack:
        v = stack.pop()
        for w in adjacency[v]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == n


@dataclass(frozen=True)
class MultiIndex:
    """Stability profile (l_0, ..., l_{floor(g/2)}), one entry per node type."""

    entries: tuple[int, ...]

    def __post_init__(self):
        if not self.entries:
            raise GraphError("empty multiindex")
        if any(l < 1 for l in self.entries):
            raise GraphError("multiindex entries must be >= 1")

    @classmethod
    def of(cls, entries) -> "MultiIndex":
        return cls(tuple(int(l) for l in entries))

    def __len__(self) -> int:
        return len(self.entries)

    def __getitem__(self, i: int) -> int:
        return self.entries[i]


@dataclass(frozen=True)
class NodeType:
    """Type of a node: nonseparating (index 0) or separating of index i.

    For a separating node the index is the smaller of the two side genera
    (>= 1 on unpointed stable graphs) and the side partition is recorded
    with the head side as "+".
    """

    separating: bool
    index: int
    plus_vertices: frozenset[int] | None = None
    minus_vertices: frozenset[int] | None = None
    plus_edges: frozenset[int] | None = None
    minus_edges: frozenset[int] | None = None


def betti(G: DualGraph) -> int:
    """First Betti number 1 - |V| + |E| of the (connected) graph."""
    return 1 - G.n_vertices + G.n_edges


def genus(G: DualGraph) -> int:
    """Arithmetic genus: b_1 plus the sum of the vertex genera."""
    return betti(G) + sum(v.genus for v in G.vertices)


def _reachable(G: DualGraph, start: int, skip_edge: int) -> set[int]:
    adjacency = [[] for _ in range(G.n_vertices)]
    for k, e in enumerate(G.edges):
        if k == skip_edge:
            continue
        adjacency[e.tail].append(e.head)
        adjacency[e.head].append(e.tail)
    seen = {start}
    stack = [start]
    while stack:
        v = stack.pop()
        for w in adjacency[v]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return seen


def classify_node(G: DualGraph, e: int) -> NodeType:
    """Classify edge e as nonseparating or separating of index min(g+, g-).

    The "+" side is the component of the head after removing e.  Flipping
    the orientation of e swaps the sides and keeps the index.
    """
    if not (0 <= e < G.n_edges):
        raise BadIndex(f"no edge {e}")
    edge = G.edges[e]
    if edge.tail == edge.head:
        return NodeType(separating=False, index=0)
    plus = _reachable(G, edge.head, e)
    if edge.tail in plus:
        return NodeType(separating=False, index=0)
    minus = set(range(G.n_vertices)) - plus
    eplus, eminus = set(), set()
    for k, f in enumerate(G.edges):
        if k == e:
            continue
        (eplus if f.tail in plus else eminus).add(k)
    g_plus = sum(G.vertices[v].genus for v in plus) + 1 - len(plus) + len(eplus)
    g_minus = sum(G.vertices[v].genus for v in minus) + 1 - len(minus) + len(eminus)
    return NodeType(
        separating=True,
        index=min(g_plus, g_minus),
        plus_vertices=frozenset(plus),
        minus_vertices=frozenset(minus),
        plus_edges=frozenset(eplus),
        minus_edges=frozenset(eminus),
    )


def node_type_index(G: DualGraph, e: int) -> int:
    return classify_node(G, e).index


def bridges(G: DualGraph) -> list[int]:
    """Edge indices of all bridges, found by lowpoint search.

    Independent of classify_node; the two must agree on which edges
    separate.
    """
    n = G.n_vertices
    adjacency = [[] for _ in range(n)]
    for k, e in enumerate(G.edges):
        if e.tail == e.head:
            continue
        adjacency[e.tail].append((e.head, k))
        adjacency[e.head].append((e.tail, k))
    order = [-1] * n
    low = [0] * n
    out: list[int] = []
    counter = itertools.count()
    # Iterative DFS; the parent edge *instance* is skipped, so parallel
    # edges correctly protect each other from being bridges.
    for root in range(n):
        if order[root] != -1:
            continue
        stack = [(root, -1, iter(adjacency[root]))]
        order[root] = low[root] = next(counter)
        while stack:
            v, via, it = stack[-1]
            advanced = False
            for w, k in it:
                if k == via:
                    continue
                if order[w] == -1:
                    order[w] = low[w] = next(counter)
                    stack.append((w, k, iter(adjacency[w])))
                    advanced = True
                    break
                low[v] = min(low[v], order[w])
            if not advanced:
                stack.pop()
                if stack:
                    parent = stack[-1][0]
                    low[parent] = min(low[parent], low[v])
                    if low[v] > order[parent]:
                        out.append(via)
    return sorted(out)


def is_stable(G: DualGraph) -> bool:
    """Every vertex satisfies 2g - 2 + valence + legs > 0 (loops count twice)."""
    return all(
        2 * v.genus - 2 + G.valence(i) + len(v.legs) > 0
        for i, v in enumerate(G.vertices)
    )


def is_l_stable(G: DualGraph, l: MultiIndex) -> bool:
    """Stable, and every node of type i has stabilizer order l_i."""
    g = genus(G)
    if len(l) != g // 2 + 1:
        raise MultiIndexLengthMismatch(
            f"multiindex has {len(l)} entries, genus {g} needs {g // 2 + 1}"
        )
    if not is_stable(G):
        return False
    return all(
        e.stabilizer == l[node_type_index(G, k)] for k, e in enumerate(G.edges)
    )


def relabel(G: DualGraph, perm) -> DualGraph:
    """Apply a vertex permutation: vertex v becomes perm[v]."""
    n = G.n_vertices
    if sorted(perm) != list(range(n)):
        raise BadIndex("not a permutation of the vertices")
    verts = [None] * n
    for v, target in enumerate(perm):
        verts[target] = G.vertices[v]
    edges = tuple(Edge(perm[e.tail], perm[e.head], e.stabilizer) for e in G.edges)
    return DualGraph(tuple(verts), edges)


def flip_edge(G: DualGraph, e: int) -> DualGraph:
    """Reverse the orientation of edge e (pure bookkeeping change)."""
    if not (0 <= e < G.n_edges):
        raise BadIndex(f"no edge {e}")
    edges = list(G.edges)
    old = edges[e]
    edges[e] = Edge(old.head, old.tail, old.stabilizer)
    return DualGraph(G.vertices, tuple(edges))


def spanning_tree(G: DualGraph) -> list[int]:
    """Edge indices of the first-found BFS spanning tree rooted at vertex 0."""
    incident = [[] for _ in range(G.n_vertices)]
    for k, e in enumerate(G.edges):
        incident[e.tail].append((e.head, k))
        incident[e.head].append((e.tail, k))
    seen = {0}
    tree: list[int] = []
    queue = [0]
    while queue:
        v = queue.pop(0)
        for w, k in incident[v]:
            if w not in seen:
                seen.add(w)
                tree.append(k)
                queue.append(w)
    return tree


def _vertex_keys(G: DualGraph) -> list[tuple[int, int, int, int]]:
    loops = [0] * G.n_vertices
    for e in G.edges:
        if e.tail == e.head:
            loops[e.tail] += 1
    return [
        (v.genus, len(v.legs), G.valence(i), loops[i])
        for i, v in enumerate(G.vertices)
    ]


def _class_permutations(keys):
    """All vertex permutations preserving the given per-vertex keys.

    Yields maps old index -> new index; the new index order sorts the
    classes by key.
    """
    order = sorted(range(len(keys)), key=lambda v: (keys[v], v))
    groups: list[list[int]] = []
    for v in order:
        if groups and keys[groups[-1][0]] == keys[v]:
            groups[-1].append(v)
        else:
            groups.append([v])
    slots = []
    start = 0
    for grp in groups:
        slots.append(range(start, start + len(grp)))
        start += len(grp)
    for assignment in itertools.product(
        *(itertools.permutations(slot) for slot in slots)
    ):
        perm = [0] * len(keys)
        for grp, placed in zip(groups, assignment):
            for v, target in zip(grp, placed):
                perm[v] = target
        yield perm


def canonical_form(G: DualGraph, max_vertices: int = MAX_CANONICAL_VERTICES) -> str:
    """Canonical label: equal strings exactly for isomorphic decorated graphs.

    Isomorphism preserves vertex genera, per-vertex leg counts, and edge
    stabilizers; edge orientations and marking identities are ignored.
    Computed by minimising the edge list over all class-preserving vertex
    permutations, so it is only meant for small graphs.
    """
    if G.n_vertices > max_vertices:
        raise SizeLimitExceeded(
            f"{G.n_vertices} vertices exceeds the canonical-form bound {max_vertices}"
        )
    keys = _vertex_keys(G)
    raw_edges = [(e.tail, e.head, e.stabilizer) for e in G.edges]
    best = None
    for perm in _class_permutations(keys):
        relabeled = sorted(
            (min(perm[t], perm[h]), max(perm[t], perm[h]), l)
            for t, h, l in raw_edges
        )
        if best is None or relabeled < best:
            best = relabeled
    # Class layout sorts by the full invariant key; projecting to (genus,
    # legs) is still sorted, so the vertex part is permutation-independent.
    vert_part = sorted((k[0], k[1]) for k in keys)
    return "V{};E{}".format(
        ",".join(f"{g}:{n}" for g, n in vert_part),
        ",".join(f"{u}-{v}:{l}" for u, v, l in best),
    )


def _weak_compositions(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _weak_compositions(total - first, parts - 1):
            yield (first,) + rest


def _degree_sequences(total: int, minima):
    """Degree vectors d >= minima with sum(d) == total."""
    n = len(minima)

    def rec(i, remaining):
        if i == n - 1:
            if remaining >= minima[i]:
                yield (remaining,)
            return
        tail_min = sum(minima[i + 1 :])
        for d in range(minima[i], remaining - tail_min + 1):
            for rest in rec(i + 1, remaining - d):
                yield (d,) + rest

    if total >= sum(minima):
        yield from rec(0, total)


def _realizations(degrees):
    """All loopy multigraphs (as sorted (i, j) edge tuples) with the given degrees."""
    n = len(degrees)

    def rec(remaining, i, acc):
        while i < n and remaining[i] == 0:
            i += 1
        if i == n:
            yield tuple(acc)
            return
        budget = remaining[i]
        for nloops in range(budget // 2 + 1):
            rest = budget - 2 * nloops

            def spread(j, left, picked):
                if j == n:
                    if left == 0:
                        yield picked
                    return
                cap = min(left, remaining[j])
                for c in range(cap + 1):
                    yield from spread(j + 1, left - c, picked + [(j, c)])

            for picked in spread(i + 1, rest, []):
                new_remaining = list(remaining)
                new_remaining[i] = 0
                edges_here = [(i, i)] * nloops
                for j, c in picked:
                    new_remaining[j] -= c
                    edges_here += [(i, j)] * c
                yield from rec(new_remaining, i + 1, acc + edges_here)

    yield from rec(list(degrees), 0, [])


def _enumerate_shapes(g: int, n_legs: int, max_vertices: int) -> list[DualGraph]:
    """Connected stable shapes (stabilizer 1) of genus g with n unlabeled legs."""
    shapes: dict[str, DualGraph] = {}
    nv_cap = min(max_vertices, max(1, 2 * g - 2 + n_legs))
    for nv in range(1, nv_cap + 1):
        for genera in itertools.product(range(g + 1), repeat=nv):
            total_genus = sum(genera)
            if total_genus > g:
                continue
            b1 = g - total_genus
            m = b1 + nv - 1
            for legs in _weak_compositions(n_legs, nv):
                minima = [
                    max(3 - 2 * genera[i] - legs[i], 1 if nv > 1 else 0)
                    for i in range(nv)
                ]
                for degrees in _degree_sequences(2 * m, minima):
                    for pairs in _realizations(degrees):
                        if not _is_connected(nv, pairs):
                            continue
                        marks = iter(range(1, n_legs + 1))
                        verts = tuple(
                            Vertex(genera[i], tuple(itertools.islice(marks, legs[i])))
                            for i in range(nv)
                        )
                        G = DualGraph(
                            verts, tuple(Edge(t, h) for t, h in pairs)
                        )
                        shapes.setdefault(canonical_form(G), G)
    return [shapes[k] for k in sorted(shapes)]


def _edge_classes(G: DualGraph) -> dict[tuple[int, int], list[int]]:
    classes: dict[tuple[int, int], list[int]] = {}
    for k, e in enumerate(G.edges):
        classes.setdefault((min(e.tail, e.head), max(e.tail, e.head)), []).append(k)
    return classes


def _shape_automorphisms(G: DualGraph) -> list[list[int]]:
    """Vertex permutations preserving genera, leg counts, and the edge multiset.

    Only permutations moving each vertex within its invariant class are
    candidates, but the permuted pair counts must be rechecked: the class
    keys do not see *which* neighbours a vertex has.
    """
    keys = _vertex_keys(G)
    pair_counts: dict[tuple[int, int], int] = {}
    for e in G.edges:
        key = (min(e.tail, e.head), max(e.tail, e.head))
        pair_counts[key] = pair_counts.get(key, 0) + 1
    groups: dict[tuple, list[int]] = {}
    for v, key in enumerate(keys):
        groups.setdefault(key, []).append(v)
    members = list(groups.values())
    autos = []
    for images in itertools.product(*(itertools.permutations(g) for g in members)):
        perm = [0] * len(keys)
        for grp, placed in zip(members, images):
            for v, target in zip(grp, placed):
                perm[v] = target
        if _renumber(pair_counts, perm) == pair_counts:
            autos.append(perm)
    return autos


def _renumber(pair_counts, perm):
    out: dict[tuple[int, int], int] = {}
    for (u, v), c in pair_counts.items():
        key = (min(perm[u], perm[v]), max(perm[u], perm[v]))
        out[key] = out.get(key, 0) + c
    return out


def _stabilizer_assignments(shape: DualGraph, choices) -> list[tuple[int, ...]]:
    """Stabilizer tuples, one per orbit of the shape's automorphisms.

    An automorphism may permute parallel edges arbitrarily, so the orbit
    key sorts the values within each parallel class and minimises over the
    vertex automorphisms.
    """
    classes = _edge_classes(shape)
    class_keys = sorted(classes)
    autos = _shape_automorphisms(shape)
    m = shape.n_edges
    out = []
    seen = set()
    for assign in itertools.product(choices, repeat=m):
        best = None
        for perm in autos:
            mapped: dict[tuple[int, int], list[int]] = {}
            for key in class_keys:
                u, v = key
                target = (min(perm[u], perm[v]), max(perm[u], perm[v]))
                mapped.setdefault(target, []).extend(
                    assign[k] for k in classes[key]
                )
            candidate = tuple(
                tuple(sorted(mapped[key])) for key in sorted(mapped)
            )
            if best is None or candidate < best:
                best = candidate
        if best not in seen:
            seen.add(best)
            out.append(assign)
    return out


def enumerate_stable_graphs(
    g: int,
    n_legs: int,
    stabilizer_choices,
    *,
    max_vertices: int = MAX_ENUMERATION_VERTICES,
    max_genus: int = MAX_ENUMERATION_GENUS,
) -> list[DualGraph]:
    """All stable decorated graphs of genus g with n legs, one per iso class.

    Every edge stabilizer is drawn from ``stabilizer_choices``.  Output
    order is deterministic (sorted canonical labels).
    """
    if g < 1 or (g == 1 and n_legs < 1):
        raise UnsupportedGenus(f"no stable graphs enumerated for (g, n) = ({g}, {n_legs})")
    if g > max_genus:
        raise UnsupportedGenus(f"genus {g} above the enumeration cap {max_genus}")
    choices = sorted(set(int(l) for l in stabilizer_choices))
    if not choices or choices[0] < 1:
        raise GraphError("stabilizer choices must be a non-empty set of positive integers")
    out: dict[str, DualGraph] = {}
    for shape in _enumerate_shapes(g, n_legs, max_vertices):
        for assign in _stabilizer_assignments(shape, choices):
            G = DualGraph(
                shape.vertices,
                tuple(
                    Edge(e.tail, e.head, l)
                    for e, l in zip(shape.edges, assign)
                ),
            )
            out.setdefault(canonical_form(G), G)
    return [out[k] for k in sorted(out)]
