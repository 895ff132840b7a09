"""End-to-end experiment drivers behind the CLI.

All experiments are reproducible: exact modes emit rationals (the
rational string is authoritative, the decimal is a convenience), and
stochastic modes are fully determined by (seed, replica) Philox
streams.  Replicas fan out over a process pool when workers > 1.
"""

from __future__ import annotations

import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational

import numpy as np

from . import __version__
from .errors import PreconditionError
from .exact import (
    build_exact_model,
    conductance_lower_bound,
    exact_mixing_time,
    verify_bottleneck,
)
from .glauber import ChainParams, replica_rng, simulate
from .hardcore import BALANCED, EVEN_HEAVY, ODD_HEAVY, OccupancySet, classify
from .torus import EVEN, TorusGraph, build_torus


def parse_activity(text: str):
    """Parse lambda: "p/q" or integer strings become exact Fractions,
    anything else a float."""
    text = str(text).strip()
    try:
        return Fraction(text) if ("/" in text or text.lstrip("+-").isdigit()) else float(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise PreconditionError(f"cannot parse activity {text!r}: {exc}") from exc


@dataclass
class ExperimentConfig:
    mode: str
    L: int = 4
    d: int = 1
    lam: Fraction | float = Fraction(1)
    rho: Fraction | float = Fraction(0)
    seed: int = 0
    steps: int = 100_000
    replicas: int = 1
    record_every: int = 100
    burn_in: int | None = None
    out: str | None = None
    fmt: str = "json"
    workers: int = 1

    def __post_init__(self):
        if self.L % 2 != 0 or self.L < 2:
            raise PreconditionError(f"L must be even and >= 2, got {self.L}")
        if self.lam <= 0:
            raise PreconditionError(f"activity must be positive, got {self.lam}")

    def echo(self) -> dict:
        return {
            "mode": self.mode,
            "L": self.L,
            "d": self.d,
            "lambda": str(self.lam),
            "rho": str(self.rho),
            "seed": self.seed,
            "steps": self.steps,
            "replicas": self.replicas,
            "record_every": self.record_every,
            "burn_in": self.burn_in,
            "workers": self.workers,
        }


@dataclass
class ExperimentReport:
    config: dict
    results: dict
    tool_version: str = __version__
    wall_clock: float = 0.0

    def to_json(self) -> dict:
        return {
            "config": self.config,
            "results": self.results,
            "toolVersion": self.tool_version,
            "wallClock": self.wall_clock,
        }


def _rational_entry(x) -> dict:
    """Rational string (authoritative) plus decimal approximation."""
    if isinstance(x, Rational):
        return {"rational": str(Fraction(x)), "decimal": float(x)}
    return {"rational": None, "decimal": float(x)}


def default_burn_in(g: TorusGraph) -> int:
    """10 * N * log N; conventional, always reported in output."""
    return int(10 * g.n * max(1.0, math.log(g.n)))


def _class_indices(g: TorusGraph, model, rho) -> dict[str, set[int]]:
    out = {BALANCED: set(), EVEN_HEAVY: set(), ODD_HEAVY: set()}
    for i, I in enumerate(model.states):
        out[classify(g, I, rho)].add(i)
    return out


# -- balance -------------------------------------------------------------------


def _simulate_balance_replica(args):
    (L, d, lam, rho, seed, steps, burn_in, replica) = args
    g = build_torus(L, d)
    params = ChainParams(lam=lam, seed=seed, steps=burn_in + steps)
    traj = simulate(
        g,
        params,
        OccupancySet.empty(g),
        observables=("size", "count_even", "count_odd", "class"),
        record_every=max(1, (burn_in + steps) // 10_000),
        rho=rho,
        replica=replica,
    )
    recs = [r for r in traj.records if r["step"] > burn_in]
    total = len(recs)
    freq = {
        cls: sum(1 for r in recs if r["class"] == cls) / total
        for cls in (BALANCED, EVEN_HEAVY, ODD_HEAVY)
    }
    mean_size = sum(r["size"] for r in recs) / total
    return freq, mean_size


def run_balance_experiment(cfg: ExperimentConfig) -> ExperimentReport:
    """Exact or empirical class measure pi(balanced / even-heavy / odd-heavy)."""
    start = time.monotonic()
    g = build_torus(cfg.L, cfg.d)
    if cfg.mode == "exact":
        model = build_exact_model(g, cfg.lam)
        classes = _class_indices(g, model, cfg.rho)
        results = {
            "numStates": model.num_states,
            "Z": _rational_entry(model.Z),
            "pi": {
                cls: _rational_entry(sum(model.pi[i] for i in idx))
                for cls, idx in classes.items()
            },
        }
    else:
        burn_in = cfg.burn_in if cfg.burn_in is not None else default_burn_in(g)
        args = [
            (cfg.L, cfg.d, cfg.lam, cfg.rho, cfg.seed, cfg.steps, burn_in, r)
            for r in range(cfg.replicas)
        ]
        per_replica = _map_replicas(_simulate_balance_replica, args, cfg.workers)
        freqs = {cls: [f[0][cls] for f in per_replica] for cls in (BALANCED, EVEN_HEAVY, ODD_HEAVY)}
        results = {
            "burnIn": burn_in,
            "classFrequencies": {
                cls: {
                    "mean": float(np.mean(vals)),
                    "stderr": float(np.std(vals, ddof=1) / math.sqrt(len(vals)))
                    if len(vals) > 1
                    else None,
                }
                for cls, vals in freqs.items()
            },
            "meanSize": float(np.mean([f[1] for f in per_replica])),
        }
    return ExperimentReport(
        config=cfg.echo(), results=results, wall_clock=time.monotonic() - start
    )


# -- mixing --------------------------------------------------------------------


def run_mixing_experiment(cfg: ExperimentConfig) -> ExperimentReport:
    """Exact mixing time and the balanced-bottleneck conductance bound."""
    start = time.monotonic()
    g = build_torus(cfg.L, cfg.d)
    model = build_exact_model(g, cfg.lam)
    classes = _class_indices(g, model, cfg.rho)
    A, M = classes[EVEN_HEAVY], classes[BALANCED]
    ok, witness = verify_bottleneck(model, A, M)
    if not ok:
        raise PreconditionError(f"bottleneck precondition violated: {witness}")
    bound = conductance_lower_bound(model, A, M)
    mix = exact_mixing_time(model)
    results = {
        "numStates": model.num_states,
        "mixingTime": mix.tau,
        "certificationWindow": mix.window,
        "conductanceBound": _rational_entry(bound),
        "ratioTauOverBound": mix.tau / float(bound) if bound else None,
        "bottleneck": {
            "A": "EvenHeavy",
            "M": "Balanced",
            "piA": _rational_entry(sum(model.pi[i] for i in A)),
            "piM": _rational_entry(sum(model.pi[i] for i in M)),
        },
    }
    return ExperimentReport(
        config=cfg.echo(), results=results, wall_clock=time.monotonic() - start
    )


# -- escape --------------------------------------------------------------------


def _escape_replica(args):
    (L, d, lam, rho, seed, steps, replica) = args
    g = build_torus(L, d)
    rng = replica_rng(seed, replica)
    n = g.n
    p_insert = float(lam) / (1.0 + float(lam))
    occ = bytearray(n)
    parity = g.parity_vector
    count = [0, 0]
    for v in g.even_vertices():
        occ[v] = 1
    count[EVEN] = len(g.even_vertices())
    nbrs = [g.neighbors(v) for v in range(n)]
    threshold = float(Fraction(rho) * n / 2)

    block = 1 << 15
    t = 0
    while t < steps:
        size = min(block, steps - t)
        vs = rng.integers(0, n, size=size)
        coins = rng.random(size=size)
        for i in range(size):
            v = int(vs[i])
            if coins[i] < p_insert:
                if not occ[v] and not any(occ[u] for u in nbrs[v]):
                    occ[v] = 1
                    count[parity[v]] += 1
            elif occ[v]:
                occ[v] = 0
                count[parity[v]] -= 1
            t += 1
            if count[1] - count[0] > threshold:
                return t, False
    return steps, True


def run_escape_experiment(cfg: ExperimentConfig) -> ExperimentReport:
    """Hitting time of the odd-heavy class from the all-even ground state."""
    start = time.monotonic()
    args = [
        (cfg.L, cfg.d, cfg.lam, cfg.rho, cfg.seed, cfg.steps, r)
        for r in range(cfg.replicas)
    ]
    outcomes = _map_replicas(_escape_replica, args, cfg.workers)
    times = [t for t, _ in outcomes]
    censored = [c for _, c in outcomes]
    observed = [t for t, c in outcomes if not c]
    quartiles = (
        [float(q) for q in np.percentile(times, [25, 50, 75])] if times else []
    )
    results = {
        "hittingTimes": times,
        "censored": censored,
        "numCensored": sum(censored),
        "median": quartiles[1] if quartiles else None,
        "quartiles": quartiles,
        "observedCount": len(observed),
    }
    return ExperimentReport(
        config=cfg.echo(), results=results, wall_clock=time.monotonic() - start
    )


def _map_replicas(fn, args, workers: int):
    if workers > 1 and len(args) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, args))
    return [fn(a) for a in args]


# -- report output ---------------------------------------------------------------


def emit_report(report: ExperimentReport, path: str | None, fmt: str = "json") -> str:
    """Serialize a report; bit-stable apart from the wallClock field."""
    if fmt not in ("json", "csv"):
        raise PreconditionError(f"unknown format {fmt!r}")
    obj = report.to_json()
    if fmt == "json":
        text = json.dumps(obj, sort_keys=True, indent=2, default=str) + "\n"
    else:
        rows = ["key,value"]
        def flatten(prefix, value):
            if isinstance(value, dict):
                for k, v in sorted(value.items()):
                    flatten(f"{prefix}.{k}" if prefix else k, v)
            elif isinstance(value, list):
                rows.append(f"{prefix},\"{json.dumps(value)}\"")
            else:
                rows.append(f"{prefix},{value}")
        flatten("", {"config": obj["config"], "results": obj["results"]})
        text = "\n".join(rows) + "\n"
    if path:
        parent = os.path.dirname(path)
        if parent and not os.path.isdir(parent):
            raise PreconditionError(f"output directory does not exist: {parent}")
        with open(path, "w") as fh:
            fh.write(text)
    return text


# -- config files -----------------------------------------------------------------


def load_config_file(path: str) -> dict:
    """Flat key=value text; '#' starts a comment; keys mirror CLI flags."""
    out: dict[str, str] = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise PreconditionError(
                    f"{path}:{lineno}: expected key=value, got {line!r}"
                )
            key, value = line.split("=", 1)
            out[key.strip()] = value.strip()
    return out
