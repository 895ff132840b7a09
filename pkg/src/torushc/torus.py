"""The even discrete torus T_{L,d} and its geometry.

Vertices are encoded as row-major integer indices
``index(v) = sum_i v_i * L**i`` so that occupancy vectors are compact
and parity/shift arithmetic is O(d).  All other modules operate on
indices; coordinate tuples are only a presentation format.
"""

from __future__ import annotations

from collections import deque
from typing import Iterable, Sequence

import numpy as np

from .errors import BudgetExceededError, PreconditionError

EVEN = 0
ODD = 1

# Largest vertex count we will materialize neighbor tables for.
DEFAULT_VERTEX_BUDGET = 10_000_000


class TorusGraph:
    """The torus {0,...,L-1}^d with mod-L adjacency per coordinate.

    L must be even so the bipartition into even/odd coordinate-sum
    classes exists.  For L >= 3 the graph is 2d-regular; for L = 2
    parallel edges collapse and T_{2,d} is the hypercube Q_d.
    Instances are immutable after construction and safe to share
    across workers.
    """

    def __init__(self, L: int, d: int, vertex_budget: int = DEFAULT_VERTEX_BUDGET):
        if L < 2 or L % 2 != 0:
            raise PreconditionError(f"L must be even and >= 2, got {L}")
        if d < 1:
            raise PreconditionError(f"d must be >= 1, got {d}")
        n = L**d
        if n > vertex_budget:
            raise BudgetExceededError(
                f"L^d = {n} exceeds the vertex budget of {vertex_budget}"
            )
        self.L = L
        self.d = d
        self.n = n
        self._powers = tuple(L**i for i in range(d))
        self._neighbors = self._build_neighbor_table()
        self._parity = self._build_parity_table()

    def _build_neighbor_table(self) -> list[tuple[int, ...]]:
        table = []
        for v in range(self.n):
            seen: list[int] = []
            for s in range(1, self.d + 1):
                for sign in (+1, -1):
                    u = self.shift(v, sign * s)
                    if u != v and u not in seen:
                        seen.append(u)
            table.append(tuple(seen))
        return table

    def _build_parity_table(self) -> np.ndarray:
        par = np.zeros(self.n, dtype=np.int8)
        for v in range(self.n):
            par[v] = sum(self.coords(v)) % 2
        return par

    # -- vertex encoding ----------------------------------------------------

    def coords(self, v: int) -> tuple[int, ...]:
        """Decode an index into a d-tuple of coordinates in [0, L)."""
        out = []
        for _ in range(self.d):
            v, r = divmod(v, self.L)
            out.append(r)
        return tuple(out)

    def index(self, coords: Sequence[int]) -> int:
        """Encode coordinates (reduced mod L) into a vertex index."""
        if len(coords) != self.d:
            raise PreconditionError(
                f"expected {self.d} coordinates, got {len(coords)}"
            )
        return sum((c % self.L) * p for c, p in zip(coords, self._powers))

    def vertices(self) -> range:
        return range(self.n)

    # -- adjacency and shifts -----------------------------------------------

    def neighbors(self, v: int) -> tuple[int, ...]:
        """The neighbors of v (2d of them for L >= 3; deduplicated for L = 2)."""
        return self._neighbors[v]

    def degree(self, v: int) -> int:
        return len(self._neighbors[v])

    def adjacent(self, u: int, v: int) -> bool:
        return v in self._neighbors[u]

    def shift(self, v: int, s: int) -> int:
        """Translate v by the signed unit vector e_s, coordinates mod L.

        s ranges over {+-1, ..., +-d}; negative s shifts backwards.
        """
        a = abs(s)
        if a < 1 or a > self.d:
            raise PreconditionError(f"direction {s} out of range for d={self.d}")
        p = self._powers[a - 1]
        c = (v // p) % self.L
        c2 = (c + (1 if s > 0 else -1)) % self.L
        return v + (c2 - c) * p

    def directions(self) -> list[int]:
        """All signed directions in canonical order +1, -1, +2, -2, ..."""
        out = []
        for a in range(1, self.d + 1):
            out.extend((a, -a))
        return out

    # -- parity ---------------------------------------------------------------

    def parity(self, v: int) -> int:
        """EVEN (0) if the coordinate sum of v is even, else ODD (1)."""
        return int(self._parity[v])

    @property
    def parity_vector(self) -> np.ndarray:
        """Per-vertex parity as an int8 array (read-only view)."""
        return self._parity

    def even_vertices(self) -> list[int]:
        return [v for v in range(self.n) if self._parity[v] == EVEN]

    def odd_vertices(self) -> list[int]:
        return [v for v in range(self.n) if self._parity[v] == ODD]

    # -- metric ---------------------------------------------------------------

    def distance(self, u: int, v: int) -> int:
        """Graph distance: per-coordinate wraparound distances summed."""
        cu, cv = self.coords(u), self.coords(v)
        return sum(
            min(abs(a - b), self.L - abs(a - b)) for a, b in zip(cu, cv)
        )

    def __repr__(self) -> str:
        return f"TorusGraph(L={self.L}, d={self.d})"


def build_torus(L: int, d: int, vertex_budget: int = DEFAULT_VERTEX_BUDGET) -> TorusGraph:
    """Construct T_{L,d}; rejects odd L and oversized instances."""
    return TorusGraph(L, d, vertex_budget=vertex_budget)


# -- boundary helpers shared by the contour machinery ------------------------


def external_boundary(g: TorusGraph, S: Iterable[int]) -> set[int]:
    """Vertices outside S adjacent to something in S."""
    sset = set(S)
    out: set[int] = set()
    for v in sset:
        for u in g.neighbors(v):
            if u not in sset:
                out.add(u)
    return out


def internal_boundary(g: TorusGraph, S: Iterable[int]) -> set[int]:
    """Vertices of S adjacent to something outside S."""
    sset = set(S)
    return {v for v in sset if any(u not in sset for u in g.neighbors(v))}


def closure(g: TorusGraph, S: Iterable[int]) -> set[int]:
    """S together with its external boundary (the X^+ operation)."""
    sset = set(S)
    return sset | external_boundary(g, sset)


def edge_boundary(g: TorusGraph, S: Iterable[int]) -> set[tuple[int, int]]:
    """Edges with exactly one end in S, as sorted index pairs."""
    sset = set(S)
    out: set[tuple[int, int]] = set()
    for v in sset:
        for u in g.neighbors(v):
            if u not in sset:
                out.add((min(u, v), max(u, v)))
    return out


def connected_components(g: TorusGraph, S: Iterable[int]) -> list[set[int]]:
    """Connected components of the subgraph induced by S, by BFS."""
    remaining = set(S)
    comps = []
    while remaining:
        root = min(remaining)
        comp = {root}
        queue = deque([root])
        remaining.discard(root)
        while queue:
            v = queue.popleft()
            for u in g.neighbors(v):
                if u in remaining:
                    remaining.discard(u)
                    comp.add(u)
                    queue.append(u)
        comps.append(comp)
    return comps


def k_components(g: TorusGraph, S: Iterable[int], k: int) -> list[set[int]]:
    """Partition S into maximal subsets chained by hops of distance <= k.

    The distance-<= k relation is evaluated on demand (S is typically a
    small boundary set), not materialized.
    """
    if k < 1:
        raise PreconditionError(f"k must be >= 1, got {k}")
    remaining = sorted(set(S))
    comps = []
    while remaining:
        root = remaining.pop(0)
        comp = {root}
        frontier = [root]
        while frontier:
            v = frontier.pop()
            close = [u for u in remaining if g.distance(u, v) <= k]
            for u in close:
                remaining.remove(u)
                comp.add(u)
                frontier.append(u)
        comps.append(comp)
    return comps
