"""Single-site Glauber dynamics for the hard-core model.

Transition kernel (N = number of vertices):

    P(I, J) = 0                        if |I △ J| > 1
    P(I, J) = (1/N) * lambda/(1+lambda)  if J = I ∪ {v}
    P(I, J) = (1/N) * 1/(1+lambda)       if J = I \\ {v}
    P(I, I) = 1 - sum of the above.

Dynamically: pick v uniformly, propose insertion with probability
lambda/(1+lambda) and deletion otherwise, reject insertions that break
independence.

Reproducibility: all randomness comes from numpy's Philox counter-based
generator keyed by (seed, replica_index).  Randoms are consumed in
fixed-size blocks, one block of vertex draws followed by one block of
proposal coins; step i within a block uses vertex[i] then coin[i].
Every step consumes the same random budget (no skip-ahead), so the
time scale is exact.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational

import numpy as np

from .errors import PreconditionError
from .hardcore import OccupancySet, balance_statistic, classify, is_independent
from .torus import TorusGraph

RNG_BLOCK = 1 << 15


@dataclass(frozen=True)
class ChainParams:
    """Activity, seed and step budget for one simulation run."""

    lam: float | Fraction
    seed: int
    steps: int

    def __post_init__(self):
        if self.lam <= 0:
            raise PreconditionError(f"activity must be positive, got {self.lam}")
        if self.steps < 0:
            raise PreconditionError(f"steps must be >= 0, got {self.steps}")


@dataclass
class Trajectory:
    """Recorded observables of one chain run, at strictly increasing steps."""

    initial: OccupancySet
    records: list[dict]
    final: OccupancySet


def replica_rng(seed: int, replica: int = 0) -> np.random.Generator:
    """Philox stream for one replica; streams are independent per replica."""
    return np.random.Generator(np.random.Philox(key=[seed & (2**64 - 1), replica]))


def transition_probability(
    g: TorusGraph, lam, I: OccupancySet, J: OccupancySet
) -> Fraction | float:
    """P(I, J) of the Glauber kernel; exact when lambda is rational."""
    if not is_independent(g, I) or not is_independent(g, J):
        raise PreconditionError("transition_probability requires independent sets")
    exact = isinstance(lam, Rational)
    lam = Fraction(lam) if exact else float(lam)
    one = Fraction(1) if exact else 1.0
    n = g.n
    p_ins = lam / (n * (1 + lam))
    p_del = one / (n * (1 + lam))
    delta = I.as_set() ^ J.as_set()
    if len(delta) > 1:
        return 0 * one
    if len(delta) == 1:
        return p_ins if J.size() > I.size() else p_del
    # holding: complement of all admissible moves out of I
    total = 0 * one
    iset = I.as_set()
    for v in range(n):
        if v in iset:
            total += p_del  # deletion always admissible
        else:
            if not any(u in iset for u in g.neighbors(v)):
                total += p_ins  # insertion admissible at unblocked v
    return one - total


def step(g: TorusGraph, lam, I: OccupancySet, rng: np.random.Generator) -> OccupancySet:
    """One Glauber update drawn from rng (vertex first, then coin)."""
    v = int(rng.integers(0, g.n))
    insert = rng.random() < float(lam) / (1.0 + float(lam))
    occ = I.occupied.copy()
    if insert:
        if not occ[v] and not any(occ[u] for u in g.neighbors(v)):
            occ[v] = True
    else:
        occ[v] = False
    return OccupancySet.from_vector(g, occ)


def move_locality(g: TorusGraph, I1: OccupancySet, I2: OccupancySet) -> float:
    """|I1 △ I2| / N: the minimum rho for which the move is rho-local."""
    return int(np.count_nonzero(I1.occupied ^ I2.occupied)) / g.n


DEFAULT_OBSERVABLES = ("size", "count_even", "count_odd", "balance", "class")


def simulate(
    g: TorusGraph,
    params: ChainParams,
    initial: OccupancySet,
    observables=DEFAULT_OBSERVABLES,
    record_every: int = 1,
    rho: float | Fraction = 0,
    replica: int = 0,
) -> Trajectory:
    """Run the chain for params.steps updates, recording observables.

    Deterministic given (params.seed, replica).  The state is evolved
    in place on plain Python structures; the per-step cost is O(d).
    """
    if not is_independent(g, initial):
        raise PreconditionError("initial state must be an independent set")
    if record_every < 1:
        raise PreconditionError("record_every must be >= 1")

    rng = replica_rng(params.seed, replica)
    n = g.n
    p_insert = float(params.lam) / (1.0 + float(params.lam))
    occ = bytearray(initial.occupied.tobytes())
    parity = g.parity_vector
    count = [initial.count_even, initial.count_odd]
    nbrs = [g.neighbors(v) for v in range(n)]

    records: list[dict] = []

    def record(t: int):
        ce, co = count
        rec = {"step": t, "size": ce + co, "count_even": ce, "count_odd": co,
               "balance": abs(ce - co)}
        if "class" in observables:
            snap = OccupancySet(
                np.frombuffer(bytes(occ), dtype=bool).copy(), ce, co
            )
            rec["class"] = classify(g, snap, rho)
        records.append({k: rec[k] for k in ("step",) + tuple(observables)})

    record(0)
    t = 0
    remaining = params.steps
    while remaining > 0:
        block = min(RNG_BLOCK, remaining)
        vs = rng.integers(0, n, size=block)
        coins = rng.random(size=block)
        for i in range(block):
            v = int(vs[i])
            if coins[i] < p_insert:
                if not occ[v]:
                    blocked = False
                    for u in nbrs[v]:
                        if occ[u]:
                            blocked = True
                            break
                    if not blocked:
                        occ[v] = 1
                        count[parity[v]] += 1
            elif occ[v]:
                occ[v] = 0
                count[parity[v]] -= 1
            t += 1
            if t % record_every == 0:
                record(t)
        remaining -= block

    final = OccupancySet(
        np.frombuffer(bytes(occ), dtype=bool).copy(), count[0], count[1]
    )
    return Trajectory(initial=initial, records=records, final=final)


# -- trajectory export --------------------------------------------------------

CSV_COLUMNS = ("step", "size", "count_even", "count_odd", "class")


def export_trajectory_csv(traj: Trajectory, path: str) -> None:
    """CSV with fixed column order (step, size, countE, countO, class)."""
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS, extrasaction="ignore")
        writer.writeheader()
        for rec in traj.records:
            writer.writerow({k: rec.get(k, "") for k in CSV_COLUMNS})


def export_params_json(g: TorusGraph, params: ChainParams, path: str, **extra) -> None:
    """JSON sidecar with the run parameters and seed."""
    obj = {
        "L": g.L,
        "d": g.d,
        "lambda": str(params.lam),
        "seed": params.seed,
        "steps": params.steps,
    }
    obj.update(extra)
    with open(path, "w") as fh:
        json.dump(obj, fh, sort_keys=True, indent=2)
