"""Contour machinery: regions, minimal edge cutsets, the family Gamma(I).

For an independent set I and a parity class, each component R of
(I restricted to that class)+ its external boundary generates one
cutset per component C of the complement of R: the edge set
gamma = nabla(C), with W the complement of C.  The interior is the
smaller of W and C (ties to W); gamma is enveloping when the interior
is W.  Gamma(I) keeps, among the enveloping cutsets of the regions,
those maximal under interior containment; their interiors are pairwise
disjoint and cover the even part of I.

Everything here only uses neighbor queries, vertex count and parity,
so it works for any bipartite graph object exposing the TorusGraph
query surface; the torus is the instance used throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import PreconditionError
from .hardcore import OccupancySet, is_independent
from .torus import (
    EVEN,
    ODD,
    TorusGraph,
    connected_components,
    closure,
    edge_boundary,
    external_boundary,
    internal_boundary,
    k_components,
)


@dataclass(frozen=True)
class Cutset:
    """One minimal edge cutset gamma = nabla(C) with its two sides."""

    edges: frozenset  # sorted vertex-index pairs
    W: frozenset  # complement of C (contains the generating region)
    C: frozenset  # the complement component that generated gamma
    R: frozenset  # the generating region
    enveloping: bool

    @property
    def size(self) -> int:
        return len(self.edges)

    @property
    def interior(self) -> frozenset:
        return self.W if self.enveloping else self.C

    def w_even(self, g) -> int:
        return sum(1 for v in self.W if g.parity(v) == EVEN)

    def w_odd(self, g) -> int:
        return sum(1 for v in self.W if g.parity(v) == ODD)


@dataclass
class ContourFamily:
    """Gamma(I) for one parity mode."""

    cutsets: list[Cutset]
    parity_mode: int  # EVEN or ODD: which class generated the regions


def occupied_regions(g: TorusGraph, I: OccupancySet, parity: int) -> list[set[int]]:
    """Components of (I restricted to the parity class) plus its boundary."""
    if not is_independent(g, I):
        raise PreconditionError("occupied_regions requires an independent set")
    cls = [v for v in I.indices() if g.parity(v) == parity]
    if not cls:
        return []
    plus = closure(g, cls)
    return connected_components(g, plus)


def cutsets_of_region(g: TorusGraph, R: set[int]) -> list[Cutset]:
    """One Cutset per component C of the complement of R."""
    R = frozenset(R)
    if not R:
        raise PreconditionError("region must be nonempty")
    # a region engulfing every vertex leaves nothing to cut off
    complement = set(g.vertices()) - R
    out = []
    for C in connected_components(g, complement):
        W = frozenset(set(g.vertices()) - C)
        edges = frozenset(edge_boundary(g, C))
        # interior = smaller of C and W; ties go to W
        enveloping = len(W) <= len(C)
        out.append(
            Cutset(edges=edges, W=W, C=frozenset(C), R=R, enveloping=enveloping)
        )
    return out


def classify_even_odd(g: TorusGraph, I: OccupancySet) -> set[int]:
    """The nonempty set of labels in {EVEN, ODD} that apply to I.

    A label applies when every region of that parity has an enveloping
    cutset among the cutsets of its complement components.
    """
    labels = set()
    for parity in (EVEN, ODD):
        regions = occupied_regions(g, I, parity)
        if all(
            any(c.enveloping for c in cutsets_of_region(g, R)) for R in regions
        ):
            labels.add(parity)
    return labels


def gamma_family(g: TorusGraph, I: OccupancySet, parity: int = EVEN) -> ContourFamily:
    """Gamma(I): per region the unique enveloping cutset, then the
    maximal ones under the interior-containment partial order."""
    if parity not in classify_even_odd(g, I):
        raise PreconditionError(
            f"independent set is not {'even' if parity == EVEN else 'odd'}"
        )
    envelopes = []
    for R in occupied_regions(g, I, parity):
        envs = [c for c in cutsets_of_region(g, R) if c.enveloping]
        if len(envs) != 1:
            raise PreconditionError(
                f"region has {len(envs)} enveloping cutsets, expected exactly 1"
            )
        envelopes.append(envs[0])
    kept = []
    for i, ci in enumerate(envelopes):
        keep = True
        for j, cj in enumerate(envelopes):
            if i == j:
                continue
            inter = ci.interior & cj.interior
            if inter and not (cj.interior <= ci.interior):
                keep = False
                break
        if keep:
            kept.append(ci)
    # distinct regions can in principle envelope through the same side;
    # such duplicates are one cutset
    seen = set()
    unique = []
    for c in kept:
        if c.edges not in seen:
            seen.add(c.edges)
            unique.append(c)
    return ContourFamily(cutsets=unique, parity_mode=parity)


# -- stated contour properties -------------------------------------------------


@dataclass
class PropertyReport:
    passed: dict[str, bool]
    witnesses: dict[str, object]

    def all_pass(self) -> bool:
        return all(self.passed.values())


def verify_contour_properties(
    g: TorusGraph, I: OccupancySet, gamma: Cutset, parity: int = EVEN
) -> PropertyReport:
    """Check the four structural properties of a family cutset.

    boundary_parity: inner boundary of W odd, outer boundary even;
    boundary_unoccupied: both boundary layers miss I;
    inner_boundary_sees_occupied: every inner-boundary vertex has an
    occupied W-neighbor;
    closure_identity: W's odd part is the outer boundary of its even
    part, and W's even part is exactly the even vertices all of whose
    neighbors lie in W's odd part.

    For parity=ODD the roles of the classes swap.
    """
    inner, outer = parity, 1 - parity  # occupied class inside W / on the moat
    W = set(gamma.W)
    occ = I.as_set()
    d_int = internal_boundary(g, W)
    d_ext = external_boundary(g, W)
    w_in = {v for v in W if g.parity(v) == inner}
    w_out = {v for v in W if g.parity(v) == outer}

    passed = {}
    witness = {}

    bad = {v for v in d_int if g.parity(v) != outer} | {
        v for v in d_ext if g.parity(v) != inner
    }
    passed["boundary_parity"] = not bad
    witness["boundary_parity"] = sorted(bad)[:4]

    bad = (d_int | d_ext) & occ
    passed["boundary_unoccupied"] = not bad
    witness["boundary_unoccupied"] = sorted(bad)[:4]

    bad = {
        x
        for x in d_int
        if not any(u in W and u in occ for u in g.neighbors(x))
    }
    passed["inner_boundary_sees_occupied"] = not bad
    witness["inner_boundary_sees_occupied"] = sorted(bad)[:4]

    lhs_ok = w_out == external_boundary(g, w_in)
    rhs = {
        y
        for y in range(g.n)
        if g.parity(y) == inner and all(u in w_out for u in g.neighbors(y))
    }
    passed["closure_identity"] = lhs_ok and (w_in == rhs)
    witness["closure_identity"] = {
        "w_out_vs_boundary": sorted(w_out ^ external_boundary(g, w_in))[:4],
        "w_in_vs_closed": sorted(w_in ^ rhs)[:4],
    }
    return PropertyReport(passed=passed, witnesses=witness)


def size_identity(g: TorusGraph, gamma: Cutset) -> tuple[int, int, bool]:
    """|gamma| against 2d(w_o - w_e); equality holds for family cutsets."""
    lhs = gamma.size
    rhs = 2 * g.d * (gamma.w_odd(g) - gamma.w_even(g))
    return lhs, rhs, lhs == rhs


def isoperimetry_check(g: TorusGraph, A: set[int]) -> tuple[int, float, bool]:
    """Edge-boundary lower bound on the torus (Bollobas-Leader form).

    For |A| <= L^d / 2:  |edge boundary of A| >= min over r = 1..d of
    2 |A|^{1-1/r} r L^{d/r - 1}.

    The bound is for the number of edges leaving A, not the number of
    vertices adjacent to A (the vertex form is false on small tori: on
    the 4x4 torus a 3x3 block minus a corner has only 7 external
    neighbours against a would-be bound of 8).
    """
    A = set(A)
    if 2 * len(A) > g.n:
        raise PreconditionError(f"|A| = {len(A)} exceeds L^d/2 = {g.n // 2}")
    boundary = len(edge_boundary(g, A))
    if not A:
        return boundary, 0.0, True
    a = len(A)
    bound = min(
        2 * a ** (1 - 1 / r) * r * float(g.L) ** (g.d / r - 1)
        for r in range(1, g.d + 1)
    )
    return boundary, bound, boundary >= bound - 1e-9


# -- the dual graph G_gamma ----------------------------------------------------


@dataclass
class DualGraph:
    """Adjacency structure on the edges of a cutset."""

    nodes: list[tuple[int, int]]
    adjacency: dict[tuple[int, int], set[tuple[int, int]]]

    def components(self) -> list[set[tuple[int, int]]]:
        remaining = set(self.nodes)
        comps = []
        while remaining:
            root = min(remaining)
            comp = {root}
            stack = [root]
            remaining.discard(root)
            while stack:
                e = stack.pop()
                for f in self.adjacency[e]:
                    if f in remaining:
                        remaining.discard(f)
                        comp.add(f)
                        stack.append(f)
            comps.append(comp)
        return comps

    def is_trivial(self) -> bool:
        return len(self.components()) <= 1


def _edge_direction(g: TorusGraph, e: tuple[int, int]) -> int:
    cu, cv = g.coords(e[0]), g.coords(e[1])
    for i in range(g.d):
        if cu[i] != cv[i]:
            return i
    raise PreconditionError(f"{e} is not an edge")


def dual_graph(g: TorusGraph, edges) -> DualGraph:
    """e ~ f iff they share exactly one endpoint and are not parallel,
    or their four endpoints span a 4-cycle of g."""
    nodes = sorted(tuple(sorted(e)) for e in edges)
    dirs = {e: _edge_direction(g, e) for e in nodes}
    adj: dict[tuple[int, int], set[tuple[int, int]]] = {e: set() for e in nodes}
    for i, e in enumerate(nodes):
        for f in nodes[i + 1 :]:
            shared = set(e) & set(f)
            linked = False
            if len(shared) == 1 and dirs[e] != dirs[f]:
                linked = True
            elif not shared:
                a, b = e
                c, dd = f
                if (g.adjacent(a, c) and g.adjacent(b, dd)) or (
                    g.adjacent(a, dd) and g.adjacent(b, c)
                ):
                    linked = True
            if linked:
                adj[e].add(f)
                adj[f].add(e)
    return DualGraph(nodes=nodes, adjacency=adj)


@dataclass
class TwoComponentReport:
    two_components: list[set[int]]
    dual_components: int
    inner_boundary_two_clustered: bool
    component_sizes: list[int]
    size_threshold: float  # L^{d-1} / 2d, for comparison only


def two_component_structure(g: TorusGraph, gamma: Cutset) -> TwoComponentReport:
    """2-components of the inner boundary of W versus G_gamma connectivity.

    When G_gamma is connected the inner boundary must be 2-clustered;
    otherwise the component sizes are reported against L^{d-1}/2d.
    """
    d_int = internal_boundary(g, set(gamma.W))
    comps = k_components(g, d_int, 2)
    dual = dual_graph(g, gamma.edges)
    n_dual = len(dual.components())
    return TwoComponentReport(
        two_components=comps,
        dual_components=n_dual,
        inner_boundary_two_clustered=len(comps) <= 1,
        component_sizes=sorted(len(c) for c in comps),
        size_threshold=float(g.L) ** (g.d - 1) / (2 * g.d),
    )


# -- profiles and dyadic buckets -----------------------------------------------


@dataclass(frozen=True)
class ProfileVector:
    """List of (cutset size, interior witness vertex) pairs."""

    entries: tuple[tuple[int, int], ...]


def profile_of(
    g: TorusGraph, family: ContourFamily, selector, witnesses
) -> ProfileVector:
    """Profile (|gamma_i|, v_i); each witness must lie in the even part
    of its cutset's interior (odd part for an odd-mode family)."""
    entries = []
    for gamma, v in zip(selector, witnesses):
        if v not in gamma.interior or g.parity(v) != family.parity_mode:
            raise PreconditionError(
                f"witness {v} is not in the interior's "
                f"{'even' if family.parity_mode == EVEN else 'odd'} part "
                f"of the cutset of size {gamma.size}"
            )
        entries.append((gamma.size, v))
    return ProfileVector(entries=tuple(entries))


def size_buckets(family: ContourFamily) -> dict[int, list[Cutset]]:
    """Dyadic bucketing: bucket i holds cutsets with 2^{i-1} <= size < 2^i."""
    out: dict[int, list[Cutset]] = {}
    for gamma in family.cutsets:
        i = gamma.size.bit_length()  # 2^{i-1} <= size < 2^i
        out.setdefault(i, []).append(gamma)
    return out
