"""Discrete Picard data on a twisted dual graph.

A line bundle class is tracked by an integer part per vertex and a
head-branch multiplicity per edge; the tail branch carries the inverse
character, i.e. multiplicity (l - mu) mod l.  Vertex degrees are exact
rationals with denominator dividing the incident stabilizer orders, and
all root counting happens through the boundary map

    prod_e Z/h_e  --->  (Z/r)^V,     h_e = gcd(l_e, r),

which sends the basis element at e to (r/h_e) ([head] - [tail]).  The
continuous part of the Picard group (component Jacobians and the gluing
torus) only ever contributes the factor r^(2*sum g_v + b_1) to r-torsion
and root counts, so the finite data above decides everything else.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd, lcm, prod

from .exactalg import (
    CyclicHom,
    hom_image_contains,
    kernel_size_by_smith,
    solve_congruence,
)
from .graphs import DualGraph, betti, classify_node, flip_edge, genus

__all__ = [
    "PicardError",
    "DomainTooLarge",
    "HypothesisViolated",
    "AugmentationNonzero",
    "NonIntegralTotal",
    "NotCoprime",
    "GraphMismatch",
    "RootMismatch",
    "LineBundleData",
    "line_bundle",
    "trivial_bundle",
    "omega_bundle",
    "vertex_degree",
    "total_degree",
    "tensor",
    "power",
    "rth_power",
    "flip_bundle_edge",
    "random_bundle",
    "delta_embed",
    "torsion_count",
    "RootCounter",
    "count_roots",
    "count_roots_by_fractions",
    "enumerate_discrete_roots",
    "construct_root",
    "root_count_criterion",
    "delta_image_member",
    "delta_image_lift",
    "split_coprime",
    "combine_coprime",
    "check_rootsnum_graph",
    "verify_rootsnum",
    "DEFAULT_MAX_DOMAIN",
]

DEFAULT_MAX_DOMAIN = 10**6


class PicardError(ValueError):
    pass


class DomainTooLarge(PicardError):
    pass


class HypothesisViolated(PicardError):
    pass


class AugmentationNonzero(PicardError):
    pass


class NonIntegralTotal(PicardError):
    pass


class NotCoprime(PicardError):
    pass


class GraphMismatch(PicardError):
    pass


class RootMismatch(PicardError):
    pass


class _Geometry:
    """Per-graph data shared by all degree computations.

    Degrees are handled as integers scaled by S, the lcm of the stabilizer
    orders, so the hot paths never touch rational arithmetic.
    """

    __slots__ = ("scale", "incidences", "stabs", "units")

    def __init__(self, G: DualGraph):
        self.scale = lcm(1, *(e.stabilizer for e in G.edges))
        self.incidences = tuple(tuple(G.incidences(v)) for v in range(G.n_vertices))
        self.stabs = tuple(e.stabilizer for e in G.edges)
        self.units = tuple(self.scale // l for l in self.stabs)


@lru_cache(maxsize=None)
def _geometry(G: DualGraph) -> _Geometry:
    return _Geometry(G)


@lru_cache(maxsize=None)
def _node_types(G: DualGraph):
    return tuple(classify_node(G, k) for k in range(G.n_edges))


@dataclass(frozen=True)
class LineBundleData:
    """Discrete line-bundle class: integer parts and branch multiplicities."""

    graph: DualGraph
    int_part: tuple[int, ...]
    mult: tuple[int, ...]

    def __post_init__(self):
        G = self.graph
        if len(self.int_part) != G.n_vertices:
            raise GraphMismatch("int_part length does not match the vertex count")
        if len(self.mult) != G.n_edges:
            raise GraphMismatch("mult length does not match the edge count")
        for k, (m, e) in enumerate(zip(self.mult, G.edges)):
            if not 0 <= m < e.stabilizer:
                raise PicardError(
                    f"edge {k}: multiplicity {m} not in [0, {e.stabilizer})"
                )

    def tail_mult(self, e: int) -> int:
        l = self.graph.edges[e].stabilizer
        return (l - self.mult[e]) % l


def line_bundle(G: DualGraph, int_part, mult) -> LineBundleData:
    return LineBundleData(G, tuple(int(a) for a in int_part), tuple(int(m) for m in mult))


def _scaled_degrees(L: LineBundleData, geo: _Geometry) -> tuple[int, ...]:
    """Vertex degrees times the common denominator, as plain integers.

    Memoized on the (frozen) bundle, outside its dataclass fields.
    """
    cached = L.__dict__.get("_scaled")
    if cached is not None:
        return cached
    S = geo.scale
    out = []
    for v in range(len(geo.incidences)):
        acc = S * L.int_part[v]
        for e, is_head in geo.incidences[v]:
            m = L.mult[e]
            if not is_head:
                m = (geo.stabs[e] - m) % geo.stabs[e]
            acc += geo.units[e] * m
        out.append(acc)
    result = tuple(out)
    object.__setattr__(L, "_scaled", result)
    return result


def _vertex_degree_raw(L: LineBundleData, v: int) -> Fraction:
    geo = _geometry(L.graph)
    S = geo.scale
    acc = S * L.int_part[v]
    for e, is_head in geo.incidences[v]:
        m = L.mult[e]
        if not is_head:
            m = (geo.stabs[e] - m) % geo.stabs[e]
        acc += geo.units[e] * m
    return Fraction(acc, S)


def vertex_degree(L: LineBundleData, v: int) -> Fraction:
    """Exact degree of the class on the component v."""
    if not 0 <= v < L.graph.n_vertices:
        raise GraphMismatch(f"no vertex {v}")
    return _vertex_degree_raw(L, v)


def total_degree(L: LineBundleData) -> int:
    """Sum of the vertex degrees; an integer for every constructible class.

    Opposite branches carry inverse characters, so each edge contributes
    mu/l + ((l-mu) mod l)/l, which is 1 for mu != 0 and 0 otherwise.
    """
    total = sum(L.int_part) + sum(1 for m in L.mult if m)
    geo = _geometry(L.graph)
    scaled = sum(_scaled_degrees(L, geo))
    if scaled != total * geo.scale:
        raise NonIntegralTotal(
            f"degree sum {Fraction(scaled, geo.scale)} is not the integer {total}"
        )
    return total


def omega_bundle(G: DualGraph, k: int = 1, h=None) -> LineBundleData:
    """k-th power of the dualizing class, twisted down by marking weights.

    The dualizing class is pulled back from the coarse curve, so every
    multiplicity vanishes and the degree on vertex v is
    k*(2 g_v - 2 + valence) minus the weights of the legs at v.
    """
    weights = dict(h) if h else {}
    unknown = set(weights) - {leg for v in G.vertices for leg in v.legs}
    if unknown:
        raise GraphMismatch(f"marking weights for unknown legs {sorted(unknown)}")
    int_part = tuple(
        k * (2 * v.genus - 2 + G.valence(i)) - sum(weights.get(leg, 0) for leg in v.legs)
        for i, v in enumerate(G.vertices)
    )
    return LineBundleData(G, int_part, (0,) * G.n_edges)


def trivial_bundle(G: DualGraph) -> LineBundleData:
    return LineBundleData(G, (0,) * G.n_vertices, (0,) * G.n_edges)


def tensor(L1: LineBundleData, L2: LineBundleData) -> LineBundleData:
    """Tensor product: degrees add, multiplicities add mod the stabilizer."""
    if L1.graph != L2.graph:
        raise GraphMismatch("tensor of bundles on different graphs")
    G = L1.graph
    mult = tuple(
        (a + b) % e.stabilizer for a, b, e in zip(L1.mult, L2.mult, G.edges)
    )
    return _from_degrees(
        G,
        [_vertex_degree_raw(L1, v) + _vertex_degree_raw(L2, v) for v in range(G.n_vertices)],
        mult,
    )


def power(L: LineBundleData, a: int) -> LineBundleData:
    """a-th tensor power for any integer a; degrees scale by a."""
    G = L.graph
    mult = tuple((a * m) % e.stabilizer for m, e in zip(L.mult, G.edges))
    return _from_degrees(
        G, [a * _vertex_degree_raw(L, v) for v in range(G.n_vertices)], mult
    )


def rth_power(L: LineBundleData, r: int) -> LineBundleData:
    if r < 1:
        raise PicardError(f"power {r} < 1")
    return power(L, r)


def _from_degrees(G: DualGraph, degrees, mult) -> LineBundleData:
    int_part = []
    for v in range(G.n_vertices):
        frac = Fraction(0)
        for e, is_head in G.incidences(v):
            l = G.edges[e].stabilizer
            m = mult[e] if is_head else (l - mult[e]) % l
            frac += Fraction(m, l)
        part = degrees[v] - frac
        if part.denominator != 1:
            raise PicardError(
                f"vertex {v}: degree {degrees[v]} is incompatible with the multiplicities"
            )
        int_part.append(int(part))
    return LineBundleData(G, tuple(int_part), tuple(mult))


def flip_bundle_edge(L: LineBundleData, e: int) -> LineBundleData:
    """Flip edge e of the underlying graph, inverting the stored branch."""
    G = flip_edge(L.graph, e)
    mult = list(L.mult)
    l = L.graph.edges[e].stabilizer
    mult[e] = (l - mult[e]) % l
    return LineBundleData(G, L.int_part, tuple(mult))


def random_bundle(G: DualGraph, rng: random.Random, r: int | None = None) -> LineBundleData:
    """Random discrete class; with r given, the total degree is padded to a
    multiple of r on vertex 0."""
    mult = tuple(rng.randrange(e.stabilizer) for e in G.edges)
    int_part = [rng.randrange(-3, 4) for _ in range(G.n_vertices)]
    L = LineBundleData(G, tuple(int_part), mult)
    if r is not None:
        excess = total_degree(L) % r
        int_part[0] -= excess
        L = LineBundleData(G, tuple(int_part), mult)
    return L


# ---------------------------------------------------------------------------
# Boundary map and torsion


def delta_embed(G: DualGraph, r: int) -> CyclicHom:
    """The boundary map prod_e Z/h_e -> (Z/r)^V, h_e = gcd(l_e, r).

    Edge e contributes (r/h_e) at its head and -(r/h_e) at its tail, so a
    loop gives a zero column.
    """
    if r < 1:
        raise PicardError(f"order {r} < 1")
    nv = G.n_vertices
    matrix = [[0] * G.n_edges for _ in range(nv)]
    moduli = []
    for k, e in enumerate(G.edges):
        h = gcd(e.stabilizer, r)
        moduli.append(h)
        w = r // h
        matrix[e.head][k] += w
        matrix[e.tail][k] -= w
    return CyclicHom.of(matrix, moduli, [r] * nv)


def torsion_count(G: DualGraph, r: int) -> int:
    """Number of r-torsion line-bundle classes on the twisted curve."""
    free = r ** (2 * sum(v.genus for v in G.vertices) + betti(G))
    return free * kernel_size_by_smith(delta_embed(G, r))


# ---------------------------------------------------------------------------
# Root counting


class RootCounter:
    """Shared enumeration machinery for r-th roots on a fixed graph.

    The per-edge solution sets of r*mu = m (mod l) are parameterised by
    x in prod_e Z/h_e, and a candidate is a root exactly when the vertex
    degree defect M x - t vanishes mod r, where M is the boundary map of
    delta_embed.  The sweep over the domain is tabulated once in two
    halves, after which any target costs one convolution lookup.
    """

    def __init__(self, G: DualGraph, r: int, max_domain: int = DEFAULT_MAX_DOMAIN):
        if r < 1:
            raise PicardError(f"order {r} < 1")
        self.graph = G
        self.r = r
        self.hs = [gcd(e.stabilizer, r) for e in G.edges]
        self.domain_size = prod(self.hs)
        if self.domain_size > max_domain:
            raise DomainTooLarge(
                f"solution domain {self.domain_size} exceeds the cap {max_domain}"
            )
        self.free_factor = r ** (2 * sum(v.genus for v in G.vertices) + betti(G))
        self._tables = None
        self._conv: dict[tuple[int, ...], int] | None = None

    # -- per-bundle congruence data ------------------------------------

    def base_solution(self, F: LineBundleData):
        """Per-edge base multiplicities mu0 of r*mu = mult_F (mod l), or None."""
        if F.graph != self.graph:
            raise GraphMismatch("bundle lives on a different graph")
        mu0 = []
        for m, e in zip(F.mult, self.graph.edges):
            sol = solve_congruence(self.r, m, e.stabilizer)
            if sol is None:
                return None
            mu0.append(sol[0])
        return mu0

    def vertex_targets(self, F: LineBundleData, mu0):
        """Defect vector t with acceptance condition M x = t (mod r), or None.

        At vertex v the root must have degree deg_v(F)/r; with the base
        multiplicities in place the remaining defect r*(deg_v(F)/r -
        frac_v(mu0)) has to be an integer hit by the sweep.
        """
        geo = _geometry(self.graph)
        S = geo.scale
        t = []
        for v in range(self.graph.n_vertices):
            # S * deg_v(F) and S * frac_v(mu0), exactly.
            deg_s = S * F.int_part[v]
            frac_s = 0
            for e, is_head in geo.incidences[v]:
                l = geo.stabs[e]
                unit = geo.units[e]
                m_f = F.mult[e] if is_head else (l - F.mult[e]) % l
                m_0 = mu0[e] % l if is_head else (l - mu0[e]) % l
                deg_s += unit * m_f
                frac_s += unit * m_0
            defect = deg_s - self.r * frac_s  # = S * r * T_v
            if defect % S:
                return None
            t.append((defect // S) % self.r)
        return tuple(t)

    # -- domain sweep ---------------------------------------------------

    def _build_tables(self):
        G, r = self.graph, self.r
        columns = []
        for k, e in enumerate(G.edges):
            w = r // self.hs[k]
            columns.append((e.head, e.tail, w))
        left, right = [], []
        size_l = size_r = 1
        for k in sorted(range(G.n_edges), key=lambda k: -self.hs[k]):
            if size_l <= size_r:
                left.append(k)
                size_l *= self.hs[k]
            else:
                right.append(k)
                size_r *= self.hs[k]

        def table(indices):
            out: dict[tuple[int, ...], int] = {}
            for xs in itertools.product(*(range(self.hs[k]) for k in indices)):
                s = [0] * G.n_vertices
                for k, x in zip(indices, xs):
                    head, tail, w = columns[k]
                    s[head] = (s[head] + w * x) % r
                    s[tail] = (s[tail] - w * x) % r
                key = tuple(s)
                out[key] = out.get(key, 0) + 1
            return out

        self._tables = (table(left), table(right))

    def solution_count(self, t) -> int:
        """Number of x in prod Z/h_e with M x = t (mod r)."""
        if self._tables is None:
            self._build_tables()
        table_l, table_r = self._tables
        if self._conv is None and len(table_l) * len(table_r) <= 10**5:
            conv: dict[tuple[int, ...], int] = {}
            for key_l, c_l in table_l.items():
                for key_r, c_r in table_r.items():
                    key = tuple((a + b) % self.r for a, b in zip(key_l, key_r))
                    conv[key] = conv.get(key, 0) + c_l * c_r
            self._conv = conv
        if self._conv is not None:
            return self._conv.get(tuple(t), 0)
        if len(table_l) > len(table_r):
            table_l, table_r = table_r, table_l
        total = 0
        for key, count in table_l.items():
            complement = tuple((a - b) % self.r for a, b in zip(t, key))
            total += count * table_r.get(complement, 0)
        return total

    # -- public counts ----------------------------------------------------

    def count(self, F: LineBundleData) -> int:
        mu0 = self.base_solution(F)
        if mu0 is None:
            return 0
        t = self.vertex_targets(F, mu0)
        if t is None:
            return 0
        return self.free_factor * self.solution_count(t)

    def solutions(self, F: LineBundleData):
        """All accepted multiplicity vectors, each yielding one discrete root."""
        mu0 = self.base_solution(F)
        if mu0 is None:
            return []
        t = self.vertex_targets(F, mu0)
        if t is None:
            return []
        G, r = self.graph, self.r
        hom = delta_embed(G, r)
        out = []
        for x in itertools.product(*(range(h) for h in self.hs)):
            if hom.apply(x) == t:
                mult = tuple(
                    (mu0[k] + (e.stabilizer // self.hs[k]) * x[k]) % e.stabilizer
                    for k, e in enumerate(G.edges)
                )
                out.append(mult)
        return out


def count_roots(
    G: DualGraph, F: LineBundleData, r: int, max_domain: int = DEFAULT_MAX_DOMAIN
) -> int:
    """Number of r-th roots of F; either 0 or the full torsion count."""
    return RootCounter(G, r, max_domain).count(F)


def count_roots_by_fractions(
    G: DualGraph, F: LineBundleData, r: int, max_domain: int = 10**4
) -> int:
    """Independent slow path: sweep candidate multiplicities and test the
    vertex degree conditions with exact rationals, no modular reduction."""
    if F.graph != G:
        raise GraphMismatch("bundle lives on a different graph")
    base = []
    for m, e in zip(F.mult, G.edges):
        sol = solve_congruence(r, m, e.stabilizer)
        if sol is None:
            return 0
        x0, step = sol
        base.append([x0 + step * i for i in range(e.stabilizer // step)])
    if prod(len(c) for c in base) > max_domain:
        raise DomainTooLarge("fraction sweep beyond its cap")
    degrees = [vertex_degree(F, v) for v in range(G.n_vertices)]
    accepted = 0
    for mult in itertools.product(*base):
        ok = True
        for v in range(G.n_vertices):
            frac = Fraction(0)
            for e, is_head in G.incidences(v):
                l = G.edges[e].stabilizer
                m = mult[e] % l if is_head else (l - mult[e]) % l
                frac += Fraction(m, l)
            if (Fraction(degrees[v], r) - frac).denominator != 1:
                ok = False
                break
        if ok:
            accepted += 1
    return r ** (2 * sum(v.genus for v in G.vertices) + betti(G)) * accepted


def enumerate_discrete_roots(
    G: DualGraph, F: LineBundleData, r: int, max_domain: int = DEFAULT_MAX_DOMAIN
) -> list[LineBundleData]:
    """All discrete r-th roots of F (multiplicities plus forced degrees)."""
    counter = RootCounter(G, r, max_domain)
    roots = []
    for mult in counter.solutions(F):
        degrees = [Fraction(vertex_degree(F, v), r) for v in range(G.n_vertices)]
        roots.append(_from_degrees(G, degrees, mult))
    return roots


def construct_root(
    G: DualGraph, F: LineBundleData, r: int, max_domain: int = DEFAULT_MAX_DOMAIN
) -> LineBundleData | None:
    """One discrete r-th root of F, or None when no root exists.

    Found by solving the defect equation on the boundary-map lattice, so
    no domain sweep is needed.
    """
    counter = RootCounter(G, r, max_domain)
    mu0 = counter.base_solution(F)
    if mu0 is None:
        return None
    t = counter.vertex_targets(F, mu0)
    if t is None:
        return None
    ok, x = hom_image_contains(delta_embed(G, r), t)
    if not ok:
        return None
    mult = tuple(
        (mu0[k] + (e.stabilizer // counter.hs[k]) * x[k]) % e.stabilizer
        for k, e in enumerate(G.edges)
    )
    degrees = [Fraction(vertex_degree(F, v), r) for v in range(G.n_vertices)]
    R = _from_degrees(G, degrees, mult)
    assert rth_power(R, r) == F
    return R


# ---------------------------------------------------------------------------
# Numerical criterion


def root_count_criterion(G: DualGraph, F: LineBundleData, r: int):
    """Edge-by-edge test for F to have the maximal number r^(2g) of roots.

    Requires the total degree of F to be a multiple of r.  A nonseparating
    edge must have stabilizer and both branch multiplicities divisible by
    r; a separating edge must have l_e * (side degree) divisible by r on
    both sides.  Returns (passed, witnesses) where each witness names a
    failing edge and the condition it broke.
    """
    if F.graph != G:
        raise GraphMismatch("bundle lives on a different graph")
    geo = _geometry(G)
    S = geo.scale
    scaled = _scaled_degrees(F, geo)
    if sum(scaled) % (S * r):
        raise HypothesisViolated(
            f"total degree {sum(scaled) // S} is not a multiple of {r}"
        )
    witnesses = []
    for k, node in enumerate(_node_types(G)):
        l = geo.stabs[k]
        if not node.separating:
            if l % r:
                witnesses.append((k, "stabilizer", l))
            if F.mult[k] % r:
                witnesses.append((k, "head multiplicity", F.mult[k]))
            if F.tail_mult(k) % r:
                witnesses.append((k, "tail multiplicity", F.tail_mult(k)))
        else:
            for side, vs in (("+", node.plus_vertices), ("-", node.minus_vertices)):
                d_scaled = sum(scaled[v] for v in vs)  # = S * side degree
                ld = l * d_scaled
                if ld % S:
                    raise PicardError(
                        f"edge {k}: side degree {Fraction(d_scaled, S)} not in (1/{l})Z"
                    )
                if (ld // S) % r:
                    witnesses.append((k, f"side {side} degree", Fraction(d_scaled, S)))
    return (not witnesses), witnesses


# ---------------------------------------------------------------------------
# Membership and constructive lifts in the image of the boundary map


def _check_lift_hypotheses(G: DualGraph, r: int, t):
    if len(t) != G.n_vertices:
        raise GraphMismatch("target length does not match the vertex count")
    for k, e in enumerate(G.edges):
        if not classify_node(G, k).separating and e.stabilizer % r:
            raise HypothesisViolated(
                f"nonseparating edge {k} has stabilizer {e.stabilizer}, not a multiple of {r}"
            )
    if sum(t) % r:
        raise AugmentationNonzero(f"augmentation {sum(t) % r} != 0 mod {r}")


def delta_image_member(G: DualGraph, r: int, t) -> bool:
    """Whether t in (Z/r)^V lies in the image of the boundary map.

    Assumes every nonseparating stabilizer is divisible by r; then
    membership only constrains the separating edges: the head-side sum of
    t must be a multiple of r/h_e.
    """
    _check_lift_hypotheses(G, r, t)
    for k, e in enumerate(G.edges):
        node = classify_node(G, k)
        if not node.separating:
            continue
        h = gcd(e.stabilizer, r)
        plus_sum = sum(t[v] for v in node.plus_vertices) % r
        if plus_sum % (r // h):
            return False
    return True


def delta_image_lift(G: DualGraph, r: int, t) -> tuple[int, ...] | None:
    """A preimage x in prod Z/h_e of t under the boundary map, or None.

    Peels separating edges one at a time: the edge value is forced by the
    head-side sum of t, both endpoints are adjusted, and the two sides are
    lifted independently.  Bridgeless pieces are solved directly on the
    lattice.
    """
    _check_lift_hypotheses(G, r, t)
    if not delta_image_member(G, r, t):
        return None
    x = [0] * G.n_edges

    def solve(vertex_ids, edge_ids, local_t):
        if not edge_ids:
            return
        bridge = None
        for k in sorted(edge_ids):
            node = classify_node(G, k)
            if node.separating:
                bridge = (k, node)
                break
        if bridge is None:
            _solve_bridgeless(vertex_ids, edge_ids, local_t)
            return
        k, node = bridge
        e = G.edges[k]
        h = gcd(e.stabilizer, r)
        w = r // h
        plus_sum = sum(local_t[v] for v in node.plus_vertices if v in vertex_ids) % r
        assert plus_sum % w == 0, "membership guaranteed the side sum is hit"
        x[k] = (plus_sum // w) % h
        adjusted = dict(local_t)
        adjusted[e.head] = (adjusted[e.head] - w * x[k]) % r
        adjusted[e.tail] = (adjusted[e.tail] + w * x[k]) % r
        for vs, es in (
            (node.plus_vertices, node.plus_edges),
            (node.minus_vertices, node.minus_edges),
        ):
            sub_v = vs & vertex_ids
            sub_e = es & edge_ids
            solve(sub_v, sub_e, {v: adjusted[v] for v in sub_v})

    def _solve_bridgeless(vertex_ids, edge_ids, local_t):
        verts = sorted(vertex_ids)
        pos = {v: i for i, v in enumerate(verts)}
        edge_list = sorted(edge_ids)
        matrix = [[0] * len(edge_list) for _ in verts]
        moduli = []
        for col, k in enumerate(edge_list):
            e = G.edges[k]
            h = gcd(e.stabilizer, r)
            moduli.append(h)
            w = r // h
            matrix[pos[e.head]][col] += w
            matrix[pos[e.tail]][col] -= w
        hom = CyclicHom.of(matrix, moduli, [r] * len(verts))
        target = tuple(local_t[v] % r for v in verts)
        ok, sol = hom_image_contains(hom, target)
        assert ok, "augmentation-zero targets are always hit on a bridgeless piece"
        for col, k in enumerate(edge_list):
            x[k] = sol[col]

    solve(
        set(range(G.n_vertices)),
        set(range(G.n_edges)),
        {v: t[v] % r for v in range(G.n_vertices)},
    )
    result = tuple(x)
    assert delta_embed(G, r).apply(result) == tuple(v % r for v in t)
    return result


# ---------------------------------------------------------------------------
# Coprime splitting


def split_coprime(L: LineBundleData, r1: int, r2: int):
    """Split an (r1*r2)-th root into the pair (L^r2, L^r1)."""
    if gcd(r1, r2) != 1:
        raise NotCoprime(f"{r1} and {r2} are not coprime")
    return rth_power(L, r2), rth_power(L, r1)


def combine_coprime(
    L1: LineBundleData, L2: LineBundleData, r1: int, r2: int
) -> LineBundleData:
    """Recombine an r1-th and an r2-th root of a common class.

    With h1*r1 + h2*r2 = 1 the combination is L1^h2 (x) L2^h1, the inverse
    of split_coprime on discrete classes.
    """
    if gcd(r1, r2) != 1:
        raise NotCoprime(f"{r1} and {r2} are not coprime")
    if L1.graph != L2.graph:
        raise GraphMismatch("roots live on different graphs")
    if rth_power(L1, r1) != rth_power(L2, r2):
        raise RootMismatch("the two roots do not power to a common class")
    h1, h2 = _bezout(r1, r2)
    return tensor(power(L1, h2), power(L2, h1))


def _bezout(a: int, b: int) -> tuple[int, int]:
    old_r, rr = a, b
    old_s, s = 1, 0
    old_t, tt = 0, 1
    while rr:
        q = old_r // rr
        old_r, rr = rr, old_r - q * rr
        old_s, s = s, old_s - q * s
        old_t, tt = tt, old_t - q * tt
    assert old_r == 1
    return old_s, old_t


# ---------------------------------------------------------------------------
# Sweep: criterion versus counted roots


@dataclass(frozen=True)
class RootsnumRecord:
    graph: DualGraph
    r: int
    bundle: LineBundleData
    criterion: bool
    count: int
    expected: int


def check_rootsnum_graph(
    G: DualGraph,
    r_values,
    *,
    n_random: int = 50,
    seed: int = 0,
    omega_powers=(1, 2),
    max_domain: int = DEFAULT_MAX_DOMAIN,
):
    """Criterion-versus-count checks for one graph; see verify_rootsnum.

    The random bundles are seeded from (seed, graph), so the result does
    not depend on how a family sweep is chunked.
    """
    rng = random.Random(f"{seed}:{G!r}")
    g = genus(G)
    bundles = [omega_bundle(G, k) for k in omega_powers]
    bundles.append(trivial_bundle(G))
    bundles += [random_bundle(G, rng) for _ in range(n_random)]
    discrepancies: list[RootsnumRecord] = []
    checked = 0
    for r in r_values:
        counter = RootCounter(G, r, max_domain)
        expected = r ** (2 * g)
        for F in bundles:
            if total_degree(F) % r:
                # No roots at all off the hypothesis; pad the degree to
                # keep the bundle in the sweep.
                if counter.count(F) != 0:
                    discrepancies.append(
                        RootsnumRecord(G, r, F, False, counter.count(F), 0)
                    )
                F = _pad_degree(F, r)
            count = counter.count(F)
            passed, _ = root_count_criterion(G, F, r)
            checked += 1
            if passed != (count == expected):
                discrepancies.append(RootsnumRecord(G, r, F, passed, count, expected))
    return discrepancies, checked


def _rootsnum_worker(args):
    G, r_values, n_random, seed, max_domain = args
    return check_rootsnum_graph(
        G, r_values, n_random=n_random, seed=seed, max_domain=max_domain
    )


def verify_rootsnum(
    graphs_to_check,
    r_values,
    *,
    n_random: int = 50,
    seed: int = 0,
    max_domain: int = DEFAULT_MAX_DOMAIN,
    jobs: int = 1,
):
    """Check criterion <=> maximal root count over a family of graphs.

    For every graph, every r, and every bundle (powers of the dualizing
    class, the trivial class, and random classes padded to total degree
    0 mod r) the edge criterion must hold exactly when the number of
    roots is r^(2g).  Returns (discrepancies, checked) where any
    discrepancy is a RootsnumRecord.  With jobs > 1 the graphs are
    distributed over a worker pool; results merge in input order.
    """
    r_values = tuple(r_values)
    if jobs > 1:
        import multiprocessing

        work = [(G, r_values, n_random, seed, max_domain) for G in graphs_to_check]
        with multiprocessing.Pool(jobs) as pool:
            results = pool.map(_rootsnum_worker, work, chunksize=64)
    else:
        results = [
            check_rootsnum_graph(
                G, r_values, n_random=n_random, seed=seed, max_domain=max_domain
            )
            for G in graphs_to_check
        ]
    discrepancies: list[RootsnumRecord] = []
    checked = 0
    for disc, n in results:
        discrepancies.extend(disc)
        checked += n
    return discrepancies, checked


def _pad_degree(F: LineBundleData, r: int) -> LineBundleData:
    int_part = list(F.int_part)
    int_part[0] -= total_degree(F) % r
    return LineBundleData(F.graph, tuple(int_part), F.mult)
