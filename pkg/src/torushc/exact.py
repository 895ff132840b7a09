"""Brute-force oracle for small instances.

Enumerates all independent sets, builds the exact stationary law and
Glauber transition matrix (rational when lambda is rational, float
mirror for matrix powers), and computes the total-variation mixing
time and the Dyer-Frieze-Jerrum conductance lower bound
tau >= pi(A) / (8 pi(M)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

import numpy as np
from scipy import sparse

from .errors import BudgetExceededError, PreconditionError
from .hardcore import OccupancySet
from .torus import TorusGraph

DEFAULT_STATE_CAP = 2_000_000
MIXING_STEP_CAP = 200_000


def enumerate_independent_sets(
    g: TorusGraph, cap: int = DEFAULT_STATE_CAP
) -> list[OccupancySet]:
    """All independent sets, sorted by (cardinality, lexicographic indices).

    Recursive backtracking over vertex indices with pruning by neighbor
    occupancy; refuses instances whose count would exceed the cap.
    """
    n = g.n
    nbrs = [g.neighbors(v) for v in range(n)]
    sets: list[tuple[int, ...]] = []
    blocked = bytearray(n)
    current: list[int] = []

    def extend(start: int):
        if len(sets) > cap:
            raise BudgetExceededError(
                f"independent-set count exceeds the cap of {cap} "
                f"(at least {len(sets)} found)"
            )
        sets.append(tuple(current))
        for v in range(start, n):
            if blocked[v]:
                continue
            current.append(v)
            touched = [v]
            blocked[v] += 1
            for u in nbrs[v]:
                blocked[u] += 1
                touched.append(u)
            extend(v + 1)
            current.pop()
            for u in touched:
                blocked[u] -= 1

    extend(0)
    sets.sort(key=lambda t: (len(t), t))
    return [OccupancySet.from_indices(g, t) for t in sets]


def partition_function(g: TorusGraph, lam, states=None):
    """Z(lambda) = sum over independent sets of lambda^{|I|}."""
    if lam <= 0:
        raise PreconditionError(f"activity must be positive, got {lam}")
    if states is None:
        states = enumerate_independent_sets(g)
    exact = isinstance(lam, Rational)
    lam = Fraction(lam) if exact else float(lam)
    return sum(lam ** I.size() for I in states)


def cycle_transfer_partition_function(L: int, lam):
    """Z for the cycle C_L via the 2x2 hard-core transfer matrix.

    Independent cross-check of the enumeration oracle for d = 1.
    """
    lam = Fraction(lam) if isinstance(lam, Rational) else float(lam)
    zero = 0 * lam
    m = [[1 + zero, 1 + zero], [lam, zero]]
    out = [[1 + zero, zero], [zero, 1 + zero]]
    for _ in range(L):
        out = [
            [
                out[0][0] * m[0][0] + out[0][1] * m[1][0],
                out[0][0] * m[0][1] + out[0][1] * m[1][1],
            ],
            [
                out[1][0] * m[0][0] + out[1][1] * m[1][0],
                out[1][0] * m[0][1] + out[1][1] * m[1][1],
            ],
        ]
    return out[0][0] + out[1][1]


@dataclass
class ExactModel:
    """Full enumeration of the state space with pi and the Glauber kernel.

    pi and the sparse transition structure are exact rationals when
    lambda is rational; P_float mirrors the kernel for matrix powers.
    """

    g: TorusGraph
    lam: Fraction | float
    states: list[OccupancySet]
    index: dict
    Z: Fraction | float
    pi: list
    transitions: list[dict]  # transitions[i][j] = P(i, j) for j != i
    holding: list
    P_float: sparse.csr_matrix

    @property
    def num_states(self) -> int:
        return len(self.states)

    def pi_float(self) -> np.ndarray:
        return np.array([float(p) for p in self.pi])


def build_exact_model(g: TorusGraph, lam, cap: int = DEFAULT_STATE_CAP) -> ExactModel:
    if lam <= 0:
        raise PreconditionError(f"activity must be positive, got {lam}")
    exact = isinstance(lam, Rational)
    lam = Fraction(lam) if exact else float(lam)
    one = Fraction(1) if exact else 1.0

    states = enumerate_independent_sets(g, cap=cap)
    index = {I.key(): i for i, I in enumerate(states)}
    weights = [lam ** I.size() for I in states]
    Z = sum(weights)
    pi = [w / Z for w in weights]

    n = g.n
    p_ins = lam / (n * (1 + lam))
    p_del = one / (n * (1 + lam))

    transitions: list[dict] = []
    holding = []
    rows, cols, vals = [], [], []
    for i, I in enumerate(states):
        iset = I.as_set()
        row: dict = {}
        for v in range(n):
            if v in iset:
                smaller = iset - {v}
                j = index[OccupancySet.from_indices(g, smaller).key()]
                row[j] = row.get(j, 0 * one) + p_del
            else:
                if not any(u in iset for u in g.neighbors(v)):
                    larger = iset | {v}
                    j = index[OccupancySet.from_indices(g, larger).key()]
                    row[j] = row.get(j, 0 * one) + p_ins
        hold = one - sum(row.values())
        transitions.append(row)
        holding.append(hold)
        for j, p in row.items():
            rows.append(i)
            cols.append(j)
            vals.append(float(p))
        rows.append(i)
        cols.append(i)
        vals.append(float(hold))

    P_float = sparse.csr_matrix(
        (vals, (rows, cols)), shape=(len(states), len(states))
    )
    return ExactModel(
        g=g, lam=lam, states=states, index=index, Z=Z, pi=pi,
        transitions=transitions, holding=holding, P_float=P_float,
    )


def stationary_distribution(m: ExactModel) -> list:
    """pi[I] = lambda^{|I|} / Z."""
    return list(m.pi)


def total_variation(p, q) -> float:
    """Half the L1 distance between two probability vectors."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape:
        raise PreconditionError("probability vectors differ in length")
    return 0.5 * float(np.abs(p - q).sum())


THRESHOLD = 1.0 / math.e


@dataclass
class MixingResult:
    tau: int
    window: int
    worst_tv: list[float]  # worst_tv[t] = max-over-starts TV at time t


def exact_mixing_time(
    m: ExactModel, step_cap: int = MIXING_STEP_CAP, min_window: int = 8
) -> MixingResult:
    """Smallest tau with worst-start TV <= 1/e for all t > tau.

    TV from a fixed start need not be monotone in t, so the "for all
    t > tau" quantifier is certified over a finite verification window
    of 4 * tau (at least min_window) beyond the last bad time.
    """
    S = m.num_states
    pi = m.pi_float()
    D = np.eye(S)
    Pt = m.P_float.T.tocsr()
    worst = [float(np.abs(D - pi).sum(axis=1).max() * 0.5)]
    last_bad = 0
    t = 0
    while True:
        window = max(4 * last_bad, min_window)
        if t >= last_bad + window:
            return MixingResult(tau=last_bad, window=window, worst_tv=worst)
        if t >= step_cap:
            raise BudgetExceededError(
                f"mixing time did not certify within {step_cap} steps "
                f"(worst TV now {worst[-1]:.4g})"
            )
        D = (Pt @ D.T).T  # row i of D stays the distribution from start i
        t += 1
        w = float(np.abs(D - pi).sum(axis=1).max() * 0.5)
        worst.append(w)
        if w > THRESHOLD:
            last_bad = t


def verify_bottleneck(m: ExactModel, A: set[int], M: set[int]):
    """Check the conductance preconditions; return a witness on failure.

    Requires pi(A) <= 1/2, A and M disjoint, and no transition from A
    straight to the outside of A ∪ M.
    """
    if A & M:
        return False, f"A and M intersect in state {min(A & M)}"
    piA = sum(m.pi[i] for i in A)
    if 2 * piA > 1:
        return False, f"pi(A) = {piA} exceeds 1/2"
    allowed = A | M
    for i in A:
        for j, p in m.transitions[i].items():
            if p != 0 and j not in allowed and j != i:
                return False, f"transition {i} -> {j} leaves A u M with P = {p}"
    return True, None


def conductance_lower_bound(m: ExactModel, A: set[int], M: set[int]):
    """pi(A) / (8 pi(M)); +inf when pi(M) = 0 < pi(A)."""
    ok, witness = verify_bottleneck(m, A, M)
    if not ok:
        raise PreconditionError(f"bottleneck precondition violated: {witness}")
    piA = sum(m.pi[i] for i in A)
    piM = sum(m.pi[i] for i in M)
    if piM == 0:
        return math.inf if piA > 0 else 0
    return piA / (8 * piM)


# -- entropy utilities --------------------------------------------------------


def entropy_H(x: float) -> float:
    """Binary entropy -x log2 x - (1-x) log2 (1-x), with H(0) = H(1) = 0."""
    if not 0 <= x <= 1:
        raise PreconditionError(f"entropy argument must be in [0, 1], got {x}")
    if x in (0, 1):
        return 0.0
    x = float(x)
    return -x * math.log2(x) - (1 - x) * math.log2(1 - x)


def weighted_binomial_bound_check(n: int, c: float, lam) -> tuple:
    """Compare sum_{|A| <= cn} lambda^{|A|} against 2^{n(H(c) + c log2 lambda)}.

    The bound is only claimed for c <= lambda/(1+lambda); the left side
    is an exact binomial sum over subsets of an n-set.
    """
    if n < 0 or n > 24:
        raise PreconditionError(f"n must be in [0, 24] for brute-force range, got {n}")
    if lam <= 0:
        raise PreconditionError(f"activity must be positive, got {lam}")
    if c > float(lam) / (1 + float(lam)):
        raise PreconditionError(
            f"c = {c} exceeds lambda/(1+lambda) = {float(lam)/(1+float(lam))}"
        )
    exact = isinstance(lam, Rational)
    lam_x = Fraction(lam) if exact else float(lam)
    kmax = math.floor(float(c) * n + 1e-12)
    lhs = sum(math.comb(n, k) * lam_x**k for k in range(kmax + 1))
    rhs = 2.0 ** (n * (entropy_H(c) + float(c) * math.log2(float(lam))))
    return lhs, rhs, float(lhs) <= rhs * (1 + 1e-12)
