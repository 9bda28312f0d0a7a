"""Seeded random states, effects, channels and POVMs.

Every sampler takes a ``numpy.random.Generator``. Suites derive one generator
per trial with :func:`trial_rng`, so trial ``i`` sees the same stream no
matter which other trials run or in which order.
"""

from __future__ import annotations

import numpy as np

from . import operators as ops
from .channel import CqChannel


def trial_rng(seed: int, trial: int, stream: int = 0) -> np.random.Generator:
    """Generator for ``(seed, stream, trial)`` via ``SeedSequence`` spawn keys."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(stream, trial)))


def random_ket(d: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.normal(size=d) + 1j * rng.normal(size=d)
    return v / np.linalg.norm(v)


def random_pure_state(d: int, rng: np.random.Generator) -> np.ndarray:
    v = random_ket(d, rng)
    return np.outer(v, v.conj())


def random_density(d: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    """Normalized ``G G^dagger`` with a complex Gaussian ``d x rank`` matrix."""
    rank = d if rank is None else rank
    g = rng.normal(size=(d, rank)) + 1j * rng.normal(size=(d, rank))
    rho = g @ g.conj().T
    rho = rho / np.trace(rho).real
    return (rho + rho.conj().T) / 2


def random_hermitian(d: int, rng: np.random.Generator) -> np.ndarray:
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return (g + g.conj().T) / 2


def random_effect(d: int, rng: np.random.Generator) -> np.ndarray:
    """``0 <= X <= I``: eigenvalues of a random Hermitian mapped affinely onto a
    random sub-interval of [0, 1]."""
    w, v = np.linalg.eigh(random_hermitian(d, rng))
    lo, hi = np.sort(rng.uniform(size=2))
    span = w[-1] - w[0]
    u = lo + (hi - lo) * ((w - w[0]) / span if span > 0 else np.zeros(d))
    x = (v * u) @ v.conj().T
    return (x + x.conj().T) / 2


def random_distribution(a: int, rng: np.random.Generator) -> np.ndarray:
    return rng.dirichlet(np.ones(a))


def random_channel(a: int, d: int, rng: np.random.Generator) -> CqChannel:
    """Mix of pure and full-rank letter states."""
    states = [
        random_pure_state(d, rng) if rng.uniform() < 0.3 else random_density(d, rng)
        for _ in range(a)
    ]
    return CqChannel.from_states(states)


def random_commuting_channel(a: int, d: int, rng: np.random.Generator,
                             basis: np.ndarray | None = None) -> CqChannel:
    """Letter states diagonal in ``basis`` (a random unitary if omitted)."""
    if basis is None:
        basis = np.linalg.qr(rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d)))[0]
    states = [(basis * rng.dirichlet(np.ones(d))) @ basis.conj().T for _ in range(a)]
    return CqChannel.from_states([(s + s.conj().T) / 2 for s in states])


def random_povm(d: int, k: int, rng: np.random.Generator) -> list[np.ndarray]:
    """``S^{-1/2} G_y S^{-1/2}`` with random PSD ``G_y`` and ``S = sum_y G_y``."""
    gs = [random_density(d, rng, rank=int(rng.integers(1, d + 1))) for _ in range(k - 1)]
    gs.append(random_density(d, rng))  # full rank keeps S invertible
    total = sum(gs)
    inv_sqrt = ops.apply_function(total, lambda w: 1 / np.sqrt(w))
    return [(e + e.conj().T) / 2 for e in (inv_sqrt @ g @ inv_sqrt for g in gs)]
