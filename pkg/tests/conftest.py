"""Shared fixtures: small tori, exact models, and a sampled state pool."""

from fractions import Fraction

import pytest

from torushc import build_torus
from torushc.cutsets import EVEN, classify_even_odd
from torushc.exact import build_exact_model, exact_mixing_time
from torushc.glauber import replica_rng, step
from torushc.hardcore import OccupancySet


@pytest.fixture(scope="session")
def c4():
    return build_torus(4, 1)


@pytest.fixture(scope="session")
def t42():
    return build_torus(4, 2)


@pytest.fixture(scope="session")
def t62():
    return build_torus(6, 2)


@pytest.fixture(scope="session")
def model_c4(c4):
    return build_exact_model(c4, Fraction(1))


@pytest.fixture(scope="session")
def t42_models(t42):
    """Exact models on T_{4,2} at the activities the suite reuses."""
    lams = [Fraction(1, 2), Fraction(1), Fraction(2), Fraction(4)]
    return {lam: build_exact_model(t42, lam) for lam in lams}


@pytest.fixture(scope="session")
def t42_mixing(t42_models):
    return {lam: exact_mixing_time(m) for lam, m in t42_models.items()}


def sample_even_pool(g, count, seed, gap_factor=3):
    """Glauber-sample `count` even independent sets at activity 1.

    A snapshot is kept when its even label applies (every even-occupied
    region has an enveloping cutset); snapshots are taken every
    gap_factor * N updates from a single seeded chain.
    """
    rng = replica_rng(seed, 0)
    state = OccupancySet.empty(g)
    gap = gap_factor * g.n
    out = []
    attempts = 0
    while len(out) < count:
        attempts += 1
        if attempts > 40 * count:
            raise RuntimeError("even-state sampling did not converge")
        for _ in range(gap):
            state = step(g, 1, state, rng)
        if EVEN in classify_even_odd(g, state):
            out.append(state)
    return out


@pytest.fixture(scope="session")
def even_pool(t42, t62):
    """500 sampled even independent sets: 250 on T_{4,2}, 250 on T_{6,2}."""
    pool = [(t42, I) for I in sample_even_pool(t42, 250, seed=42)]
    pool += [(t62, I) for I in sample_even_pool(t62, 250, seed=43)]
    return pool
