"""Independent-set states, hard-core weights and balance classification.

An occupancy state is a boolean vector over vertex indices with cached
even/odd class counts.  Classification against the balance threshold
rho * L^d / 2 is done in exact rational arithmetic so boundary cases
never depend on floating point.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational

import numpy as np

from .errors import PreconditionError
from .torus import EVEN, TorusGraph

BALANCED = "Balanced"
EVEN_HEAVY = "EvenHeavy"
ODD_HEAVY = "OddHeavy"


@dataclass(frozen=True)
class OccupancySet:
    """An independent-set candidate: occupancy vector plus class counts."""

    occupied: np.ndarray  # bool, length g.n; treated as immutable
    count_even: int
    count_odd: int

    @staticmethod
    def from_indices(g: TorusGraph, indices) -> "OccupancySet":
        occ = np.zeros(g.n, dtype=bool)
        for v in indices:
            if not 0 <= v < g.n:
                raise PreconditionError(f"vertex index {v} out of range")
            occ[v] = True
        return OccupancySet.from_vector(g, occ)

    @staticmethod
    def from_vector(g: TorusGraph, occ: np.ndarray) -> "OccupancySet":
        occ = np.asarray(occ, dtype=bool)
        if occ.shape != (g.n,):
            raise PreconditionError(
                f"occupancy vector has length {occ.shape}, graph has {g.n} vertices"
            )
        ce = int(np.count_nonzero(occ & (g.parity_vector == EVEN)))
        co = int(np.count_nonzero(occ)) - ce
        return OccupancySet(occ, ce, co)

    @staticmethod
    def empty(g: TorusGraph) -> "OccupancySet":
        return OccupancySet(np.zeros(g.n, dtype=bool), 0, 0)

    def size(self) -> int:
        return self.count_even + self.count_odd

    def indices(self) -> tuple[int, ...]:
        return tuple(int(v) for v in np.flatnonzero(self.occupied))

    def as_set(self) -> set[int]:
        return set(self.indices())

    def key(self) -> bytes:
        """Hashable canonical key (for state dictionaries)."""
        return np.packbits(self.occupied).tobytes()

    def __eq__(self, other) -> bool:
        return isinstance(other, OccupancySet) and np.array_equal(
            self.occupied, other.occupied
        )

    def __hash__(self) -> int:
        return hash(self.key())


def is_independent(g: TorusGraph, I: OccupancySet) -> bool:
    """True iff no edge of g has both endpoints occupied."""
    occ = I.occupied
    if occ.shape != (g.n,):
        raise PreconditionError("occupancy vector size does not match graph")
    for v in np.flatnonzero(occ):
        for u in g.neighbors(int(v)):
            if occ[u]:
                return False
    return True


def weight(I: OccupancySet, lam) -> Fraction | float:
    """The hard-core weight lambda^{|I|}."""
    if lam <= 0:
        raise PreconditionError(f"activity must be positive, got {lam}")
    if isinstance(lam, Rational):
        return Fraction(lam) ** I.size()
    return float(lam) ** I.size()


def balance_statistic(I: OccupancySet) -> int:
    """| |I ∩ E| - |I ∩ O| |, a count-only statistic."""
    return abs(I.count_even - I.count_odd)


def classify(g: TorusGraph, I: OccupancySet, rho) -> str:
    """Balanced / EvenHeavy / OddHeavy at threshold rho * L^d / 2.

    Ties (difference exactly at threshold) go to Balanced.  The
    comparison is exact: rho is converted to a Fraction, so e.g. a
    fractional threshold on an odd count difference never misclassifies.
    """
    rho = Fraction(rho)
    if not 0 <= rho <= 1:
        raise PreconditionError(f"rho must be in [0, 1], got {rho}")
    threshold = rho * g.n / 2
    diff = I.count_even - I.count_odd
    if abs(diff) <= threshold:
        return BALANCED
    return EVEN_HEAVY if diff > 0 else ODD_HEAVY


# -- serialization ------------------------------------------------------------


def occupancy_to_json(g: TorusGraph, I: OccupancySet) -> dict:
    """Hex-encoded bit string with an (L, d) header."""
    return {
        "L": g.L,
        "d": g.d,
        "occupied_hex": np.packbits(I.occupied).tobytes().hex(),
    }


def occupancy_from_json(g: TorusGraph, obj: dict) -> OccupancySet:
    if obj.get("L") != g.L or obj.get("d") != g.d:
        raise PreconditionError(
            f"header (L={obj.get('L')}, d={obj.get('d')}) does not match "
            f"graph (L={g.L}, d={g.d})"
        )
    raw = bytes.fromhex(obj["occupied_hex"])
    bits = np.unpackbits(np.frombuffer(raw, dtype=np.uint8))[: g.n]
    return OccupancySet.from_vector(g, bits.astype(bool))


def dump_occupancy(g: TorusGraph, I: OccupancySet) -> str:
    return json.dumps(occupancy_to_json(g, I), sort_keys=True)


def load_occupancy(g: TorusGraph, text: str) -> OccupancySet:
    return occupancy_from_json(g, json.loads(text))
