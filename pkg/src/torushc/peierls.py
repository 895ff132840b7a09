"""Shift map, approximations, direction choice and the flow nu.

Given a family cutset gamma with side W and a direction s, the free
sites are W^s = {x in the inner boundary of W : the s-predecessor of x
is outside W}.  Shifting I inside W by s gives
I0 = (I \\ W) ∪ sigma_s(I ∩ W), which has the same size as I, is
independent, and stays independent under adding any subset of W^s.

The flow nu(I, J) for J = I0 ∪ S, S ⊆ W^s, is

    lambda^{|J ∩ W^s|} * (lambda/(1+lambda)^2)^{|C ∩ J|}
      * ((1+2lambda)/(1+lambda)^2)^{|C \\ J|} * (1/(1+lambda))^{|D|}

with C = W^s ∩ A^O ∩ sigma_s(Q^E) and D = W^s \\ C, where A is an
approximation of gamma and Q^E, Q^O the undetermined vertices.  The
out-flow sums to exactly 1 over all S; the identity is verified in
rational arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from numbers import Rational

import numpy as np

from .cutsets import Cutset
from .errors import BudgetExceededError, PreconditionError
from .hardcore import OccupancySet, is_independent
from .torus import EVEN, ODD, TorusGraph, external_boundary, internal_boundary

FLOW_EXPANSION_BUDGET = 30
_LITERAL_EXPANSION_LIMIT = 12  # 2^k literal subset expansion below this


def beta(lam) -> float:
    """2 log(1+lambda) - log(1+2lambda); strictly positive for lambda > 0."""
    lam = float(lam)
    if lam <= 0:
        raise PreconditionError(f"activity must be positive, got {lam}")
    return 2 * math.log(1 + lam) - math.log(1 + 2 * lam)


def free_sites(g: TorusGraph, W, s: int) -> set[int]:
    """W^s: inner-boundary vertices of W whose s-predecessor is outside W."""
    W = set(W)
    return {x for x in internal_boundary(g, W) if g.shift(x, -s) not in W}


@dataclass
class ShiftResult:
    I0: OccupancySet
    free: set[int]
    direction: int


def interior_shift(
    g: TorusGraph, I: OccupancySet, gamma: Cutset, s: int
) -> ShiftResult:
    """I0 = (I \\ W) ∪ sigma_s(I ∩ W), with its free-site set.

    Verifies the shift invariants (size preserved, independence,
    disjointness from W^s, independence of I0 ∪ W^s) and aborts with a
    witness when they fail, which indicates a non-family cutset.
    """
    W = set(gamma.W)
    iset = I.as_set()
    shifted = {g.shift(v, s) for v in iset & W}
    i0set = (iset - W) | shifted
    I0 = OccupancySet.from_indices(g, i0set)
    ws = free_sites(g, W, s)

    if I0.size() != I.size():
        raise PreconditionError(
            f"shift lost vertices: |I0| = {I0.size()} != |I| = {I.size()}"
        )
    if not is_independent(g, I0):
        raise PreconditionError("shifted set is not independent")
    clash = i0set & ws
    if clash:
        raise PreconditionError(f"I0 meets W^s at {sorted(clash)[:4]}")
    if not is_independent(g, OccupancySet.from_indices(g, i0set | ws)):
        raise PreconditionError("I0 ∪ W^s is not independent")
    return ShiftResult(I0=I0, free=ws, direction=s)


# -- approximations ------------------------------------------------------------


@dataclass(frozen=True)
class Approximation:
    """A candidate (A^E, A^O) pair sandwiching (W^E, W^O)."""

    a_even: frozenset
    a_odd: frozenset

    @staticmethod
    def from_cutset(g: TorusGraph, gamma: Cutset) -> "Approximation":
        w_e = frozenset(v for v in gamma.W if g.parity(v) == EVEN)
        w_o = frozenset(v for v in gamma.W if g.parity(v) == ODD)
        return Approximation(a_even=w_e, a_odd=w_o)


def is_approximation(
    g: TorusGraph, A: Approximation, gamma: Cutset, report: bool = False
):
    """Check the three defining conditions against gamma's side W.

    containment: A^E ⊇ W^E and A^O ⊆ W^O;
    inner_degree: every x in A^E has >= 2d - sqrt(d) neighbors in A^O;
    outer_degree: every y in O \\ A^O has >= 2d - sqrt(d) neighbors in
    E \\ A^E.
    """
    w_e = {v for v in gamma.W if g.parity(v) == EVEN}
    w_o = {v for v in gamma.W if g.parity(v) == ODD}
    thresh = 2 * g.d - math.sqrt(g.d)

    containment = w_e <= A.a_even and A.a_odd <= w_o
    inner = all(
        sum(1 for u in g.neighbors(x) if u in A.a_odd) >= thresh
        for x in A.a_even
    )
    odd_outside = (v for v in range(g.n) if g.parity(v) == ODD and v not in A.a_odd)
    outer = all(
        sum(
            1
            for u in g.neighbors(y)
            if g.parity(u) == EVEN and u not in A.a_even
        )
        >= thresh
        for y in odd_outside
    )
    if report:
        return {
            "containment": containment,
            "inner_degree": inner,
            "outer_degree": outer,
        }
    return containment and inner and outer


def q_sets(g: TorusGraph, A: Approximation) -> tuple[set[int], set[int]]:
    """Q^E = A^E ∩ ext-boundary(O \\ A^O); Q^O = (O \\ A^O) ∩ ext-boundary(A^E)."""
    odd_outside = {v for v in range(g.n) if g.parity(v) == ODD and v not in A.a_odd}
    q_e = set(A.a_even) & external_boundary(g, odd_outside)
    q_o = odd_outside & external_boundary(g, A.a_even)
    return q_e, q_o


@dataclass
class DirectionChoice:
    s: int
    fallback: bool
    diagnostics: dict[int, dict]  # per direction: |W^s|, |sigma_s(Q^E) ∩ Q^O|


def choose_direction(g: TorusGraph, gamma: Cutset, A: Approximation) -> DirectionChoice:
    """Pick the shift direction for gamma.

    Prefers the smallest s (in the order +1, -1, +2, -2, ...) with
    |W^s| >= .8 (w_o - w_e) and |sigma_s(Q^E) ∩ Q^O| <= 5 |W^s| / sqrt(d);
    such an s is only guaranteed for large d, so when none qualifies
    the smallest s maximizing |W^s| is used and flagged.
    """
    w_gap = gamma.w_odd(g) - gamma.w_even(g)
    q_e, q_o = q_sets(g, A)
    diags: dict[int, dict] = {}
    qualified = None
    for s in g.directions():
        ws = free_sites(g, gamma.W, s)
        overlap = {g.shift(x, s) for x in q_e} & q_o
        ok = len(ws) >= 0.8 * w_gap and len(overlap) <= 5 * len(ws) / math.sqrt(g.d)
        diags[s] = {"free": len(ws), "overlap": len(overlap), "qualifies": ok}
        if ok and qualified is None:
            qualified = s
    if qualified is not None:
        return DirectionChoice(s=qualified, fallback=False, diagnostics=diags)
    best = max(g.directions(), key=lambda s: (diags[s]["free"], ))
    # smallest s among the maximizers, in canonical order
    for s in g.directions():
        if diags[s]["free"] == diags[best]["free"]:
            best = s
            break
    return DirectionChoice(s=best, fallback=True, diagnostics=diags)


# -- the flow ------------------------------------------------------------------


@dataclass(frozen=True)
class FlowTerm:
    value: Fraction | float
    exponents: tuple[int, int, int, int]  # |J ∩ W^s|, |C ∩ J|, |C \ J|, |D|


def _flow_sets(g: TorusGraph, gamma: Cutset, A: Approximation, s: int):
    ws = free_sites(g, gamma.W, s)
    q_e, _q_o = q_sets(g, A)
    c_set = ws & set(A.a_odd) & {g.shift(x, s) for x in q_e}
    d_set = ws - c_set
    return ws, c_set, d_set


def _nu_value(lam, n_ws: int, n_cj: int, n_cnotj: int, n_d: int):
    exact = isinstance(lam, Rational)
    lam = Fraction(lam) if exact else float(lam)
    return (
        lam**n_ws
        * (lam / (1 + lam) ** 2) ** n_cj
        * ((1 + 2 * lam) / (1 + lam) ** 2) ** n_cnotj
        * (1 / (1 + lam)) ** n_d
    )


def flow_nu(
    g: TorusGraph,
    lam,
    gamma: Cutset,
    A: Approximation,
    s: int,
    I0: OccupancySet,
    J: OccupancySet,
) -> FlowTerm:
    """nu(I, J) for J = I0 ∪ S with S ⊆ W^s; exact when lambda is rational."""
    if lam <= 0:
        raise PreconditionError(f"activity must be positive, got {lam}")
    ws, c_set, _d_set = _flow_sets(g, gamma, A, s)
    jset = J.as_set()
    i0set = I0.as_set()
    extra = jset - i0set
    if not i0set <= jset or not extra <= ws:
        offending = sorted((i0set - jset) | (extra - ws))
        raise PreconditionError(
            f"J is not of the form I0 ∪ S with S ⊆ W^s (offending {offending[:4]})"
        )
    n_ws = len(jset & ws)
    n_cj = len(c_set & jset)
    n_cnotj = len(c_set) - n_cj
    n_d = len(ws) - len(c_set)
    value = _nu_value(lam, n_ws, n_cj, n_cnotj, n_d)
    return FlowTerm(value=value, exponents=(n_ws, n_cj, n_cnotj, n_d))


def flow_out_sum(
    g: TorusGraph,
    lam,
    gamma: Cutset,
    A: Approximation,
    s: int,
    I0: OccupancySet,
    budget: int = FLOW_EXPANSION_BUDGET,
):
    """Sum of nu(I, I0 ∪ S) over all S ⊆ W^s; equals 1 exactly.

    Small W^s is expanded literally subset by subset; larger W^s is
    expanded by grouping subsets with equal (|S ∩ C|, |S ∩ D|), which
    enumerates the same 2^{|W^s|} terms exactly via binomial counts.
    """
    ws, c_set, d_set = _flow_sets(g, gamma, A, s)
    if len(ws) > budget:
        raise BudgetExceededError(
            f"|W^s| = {len(ws)} exceeds the expansion budget of {budget}"
        )
    i0set = I0.as_set()
    if len(ws) <= _LITERAL_EXPANSION_LIMIT:
        total = 0
        members = sorted(ws)
        for r in range(len(members) + 1):
            for S in combinations(members, r):
                J = OccupancySet.from_indices(g, i0set | set(S))
                total += flow_nu(g, lam, gamma, A, s, I0, J).value
        return total
    total = 0
    nc, nd = len(c_set), len(d_set)
    for a in range(nc + 1):
        for b in range(nd + 1):
            mult = math.comb(nc, a) * math.comb(nd, b)
            total += mult * _nu_value(lam, a + b, a, nc - a, nd)
    return total


# -- the coarse cutset witness U -------------------------------------------------


@dataclass
class CoarseWitness:
    U: set[int]
    target: set[int]
    covered: bool
    size_scale: float  # (w_o - w_e) * sqrt(log(2d) / 2d), informational


def coarse_witness_U(g: TorusGraph, gamma: Cutset) -> CoarseWitness:
    """Greedy cover witness for the primed inner boundaries.

    Target = {x in inner boundary of W with <= d neighbors in W^E}
    ∪ {x in inner boundary of C with <= d neighbors in C^O}.  U is
    chosen greedily from the target's neighborhood (largest marginal
    coverage, ties to the smallest vertex index) until N(U) covers the
    target.  |U| is reported against the asymptotic scale, never
    asserted.
    """
    W, C = set(gamma.W), set(gamma.C)
    w_e = {v for v in W if g.parity(v) == EVEN}
    c_o = {v for v in C if g.parity(v) == ODD}
    d_int_w = {
        x
        for x in internal_boundary(g, W)
        if sum(1 for u in g.neighbors(x) if u in w_e) <= g.d
    }
    d_int_c = {
        x
        for x in internal_boundary(g, C)
        if sum(1 for u in g.neighbors(x) if u in c_o) <= g.d
    }
    target = d_int_w | d_int_c
    # N(U) must contain the target, so candidates are neighbors of it
    candidates = sorted({u for x in target for u in g.neighbors(x)})
    uncovered = set(target)
    U: set[int] = set()
    while uncovered:
        best, best_gain = None, -1
        for u in candidates:
            if u in U:
                continue
            gain = sum(1 for x in g.neighbors(u) if x in uncovered)
            if gain > best_gain:
                best, best_gain = u, gain
        if best is None or best_gain == 0:
            break
        U.add(best)
        uncovered -= set(g.neighbors(best))
    covered = target <= {x for u in U for x in g.neighbors(u)}
    gap = gamma.w_odd(g) - gamma.w_even(g)
    scale = gap * math.sqrt(math.log(2 * g.d) / (2 * g.d)) if gap > 0 else 0.0
    return CoarseWitness(U=U, target=target, covered=covered, size_scale=scale)
