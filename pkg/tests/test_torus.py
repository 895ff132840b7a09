"""Torus geometry: indexing, adjacency, parity, shifts, boundary helpers."""

import pytest

from torushc import build_torus
from torushc.errors import BudgetExceededError, PreconditionError
from torushc.torus import (
    closure,
    connected_components,
    edge_boundary,
    external_boundary,
    internal_boundary,
    k_components,
)


def test_basic_shape(t42):
    assert t42.n == 16
    assert all(t42.degree(v) == 4 for v in t42.vertices())
    assert len(t42.even_vertices()) == len(t42.odd_vertices()) == 8


def test_coords_index_roundtrip(t62):
    for v in t62.vertices():
        assert t62.index(t62.coords(v)) == v
    assert t62.index((1, 2)) == 1 + 2 * 6


def test_neighbor_symmetry(t42):
    for v in t42.vertices():
        for u in t42.neighbors(v):
            assert v in t42.neighbors(u)
            assert t42.adjacent(u, v) and t42.adjacent(v, u)


def test_l2_neighbor_dedup():
    # on L = 2 the +1 and -1 steps coincide, so the degree drops to d
    g = build_torus(2, 3)
    assert g.n == 8
    assert all(g.degree(v) == 3 for v in g.vertices())


def test_bipartite_parity(t62):
    for v in t62.vertices():
        assert t62.parity(v) == sum(t62.coords(v)) % 2
        for u in t62.neighbors(v):
            assert t62.parity(u) != t62.parity(v)


def test_shift_is_inverse_bijection(t42):
    for s in t42.directions():
        image = {t42.shift(v, s) for v in t42.vertices()}
        assert image == set(t42.vertices())
        for v in t42.vertices():
            assert t42.shift(t42.shift(v, s), -s) == v


def test_directions_order(t62):
    assert t62.directions() == [1, -1, 2, -2]


def test_distance(t42):
    assert t42.distance(t42.index((0, 0)), t42.index((3, 0))) == 1  # wraps
    assert t42.distance(t42.index((0, 0)), t42.index((2, 2))) == 4
    assert t42.distance(5, 5) == 0


def test_preconditions():
    with pytest.raises(PreconditionError):
        build_torus(3, 2)  # odd side
    with pytest.raises(PreconditionError):
        build_torus(0, 2)
    with pytest.raises(PreconditionError):
        build_torus(4, 0)


def test_vertex_budget():
    with pytest.raises(BudgetExceededError):
        build_torus(500, 3)  # 1.25e8 vertices


def test_boundary_helpers_single_vertex(t42):
    v = t42.index((0, 0))
    nbrs = set(t42.neighbors(v))
    assert external_boundary(t42, {v}) == nbrs
    assert internal_boundary(t42, {v}) == {v}
    assert closure(t42, {v}) == {v} | nbrs
    eb = edge_boundary(t42, {v})
    assert len(eb) == 4
    assert all(e == tuple(sorted(e)) for e in eb)


def test_boundary_of_whole_graph(t42):
    V = set(t42.vertices())
    assert external_boundary(t42, V) == set()
    assert edge_boundary(t42, V) == set()
    assert internal_boundary(t42, V) == set()


def test_connected_components(t42):
    a, b = t42.index((0, 0)), t42.index((2, 2))  # distance 4: separate
    comps = connected_components(t42, {a, b})
    assert sorted(map(sorted, comps)) == sorted([[a], [b]])
    path = {t42.index((0, 0)), t42.index((1, 0)), t42.index((1, 1))}
    assert connected_components(t42, path) == [path]


def test_k_components(t42):
    a, b = t42.index((0, 0)), t42.index((2, 0))  # distance 2
    assert len(k_components(t42, {a, b}, 1)) == 2
    assert len(k_components(t42, {a, b}, 2)) == 1
    with pytest.raises(PreconditionError):
        k_components(t42, {a}, 0)
