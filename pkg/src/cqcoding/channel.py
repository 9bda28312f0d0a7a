"""Classical-quantum channels and their entropic quantities.

A channel maps each letter of a finite alphabet to a density operator on a
fixed d-dimensional space. All entropies and informations are in bits.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import operators as ops

PROB_TOL = 1e-10
SUPPORT_TOL = 1e-12
DEFAULT_MAX_ITER = 100_000


@dataclass(frozen=True, eq=False)
class CqChannel:
    """Letter ``x`` (index into ``labels``) goes to ``states[x]``."""

    labels: tuple[str, ...]
    states: tuple[np.ndarray, ...]

    def __post_init__(self):
        if len(self.labels) == 0:
            raise ValueError("channel needs at least one input letter")
        if len(self.labels) != len(self.states):
            raise ValueError("one state per label required")
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("labels must be distinct")
        states = tuple(ops.density(s) for s in self.states)
        dims = {s.shape[0] for s in states}
        if len(dims) != 1:
            raise ValueError(f"all states must share one dimension, got {sorted(dims)}")
        object.__setattr__(self, "states", states)

    @classmethod
    def from_states(cls, states, labels=None) -> "CqChannel":
        states = list(states)
        if labels is None:
            labels = [str(i) for i in range(len(states))]
        return cls(tuple(labels), tuple(states))

    @property
    def a(self) -> int:
        return len(self.labels)

    @property
    def d(self) -> int:
        return self.states[0].shape[0]

    @cached_property
    def decompositions(self) -> tuple[ops.SpectralDecomposition, ...]:
        """The globally fixed diagonalization of every ``W_x``."""
        return tuple(ops.eig_decompose(s) for s in self.states)

    @cached_property
    def entropies(self) -> np.ndarray:
        return np.array([ops.shannon_entropy(dec.eigenvalues) for dec in self.decompositions])

    def product_state(self, word, cap: int = ops.DEFAULT_DENSE_CAP) -> np.ndarray:
        """``W_{x^n} = W_{x_1} (x) ... (x) W_{x_n}``."""
        return ops.tensor(*(self.states[x] for x in word), cap=cap)

    def is_commuting(self, tol: float = 1e-9) -> bool:
        return all(
            np.max(np.abs(s @ t - t @ s)) <= tol
            for s, t in itertools.combinations(self.states, 2)
        )


def as_distribution(probs, size: int | None = None) -> np.ndarray:
    """Validate a probability vector (entries >= 0, sum 1 within 1e-10)."""
    p = np.asarray(probs, dtype=float)
    if p.ndim != 1:
        raise ValueError("distribution must be one-dimensional")
    if size is not None and p.shape[0] != size:
        raise ValueError(f"distribution has {p.shape[0]} entries, channel has {size} inputs")
    if np.any(p < 0):
        raise ValueError("probabilities must be non-negative")
    if abs(p.sum() - 1) > PROB_TOL:
        raise ValueError(f"probabilities sum to {p.sum()!r}, not 1")
    return p


def average_state(channel: CqChannel, probs) -> np.ndarray:
    p = as_distribution(probs, channel.a)
    return np.tensordot(p, np.array(channel.states), axes=1)


def conditional_entropy(channel: CqChannel, probs) -> float:
    p = as_distribution(probs, channel.a)
    return float(p @ channel.entropies)


def mutual_info(channel: CqChannel, probs) -> float:
    """Holevo quantity ``H(PW) - H(W|P)``."""
    return ops.von_neumann_entropy(average_state(channel, probs)) - conditional_entropy(
        channel, probs
    )


def _log_on_support(sigma: np.ndarray):
    w, v = np.linalg.eigh(sigma)
    keep = w > SUPPORT_TOL
    return w[keep], v[:, keep], v[:, ~keep]


def relative_entropy(rho, sigma) -> float:
    """``Tr rho (log rho - log sigma)``; ``inf`` if supp(rho) is not in supp(sigma)."""
    rho = ops.hermitian(rho)
    sigma = ops.hermitian(sigma)
    w, v, kernel = _log_on_support(sigma)
    if kernel.shape[1] and np.trace(kernel.conj().T @ rho @ kernel).real > 1e-10:
        return float("inf")
    diag = np.einsum("ij,ik,kj->j", v.conj(), rho, v).real
    cross = float(diag @ np.log2(w))
    return max(0.0, -ops.von_neumann_entropy(rho) - cross)


def _divergences(channel: CqChannel, avg: np.ndarray) -> np.ndarray:
    """``D(W_x || PW)`` for every letter, sharing one eigendecomposition of PW."""
    w, v, kernel = _log_on_support(avg)
    log_w = np.log2(w)
    out = np.empty(channel.a)
    for x, state in enumerate(channel.states):
        if kernel.shape[1] and np.trace(kernel.conj().T @ state @ kernel).real > 1e-10:
            out[x] = np.inf
            continue
        diag = np.einsum("ij,ik,kj->j", v.conj(), state, v).real
        out[x] = -channel.entropies[x] - diag @ log_w
    return out


@dataclass(frozen=True)
class CapacityResult:
    capacity: float
    maximizer: np.ndarray
    iterations: int
    gap_bound: float


class CapacityError(RuntimeError):
    """Iteration cap reached before the duality gap fell below ``tol``."""

    def __init__(self, best: CapacityResult, tol: float):
        self.best = best
        super().__init__(
            f"capacity iteration did not reach gap {tol:g} after {best.iterations} "
            f"iterations (gap {best.gap_bound:.3e}, I={best.capacity:.9f})"
        )


def capacity(channel: CqChannel, tol: float = 1e-9, max_iter: int = DEFAULT_MAX_ITER) -> CapacityResult:
    """Maximize ``I(P;W)`` with the multiplicative update ``P(x) <- P(x) 2^{D(W_x||PW)}``.

    The stopping certificate is ``max_x D(W_x||PW) - I(P;W) <= tol``, which
    bounds ``C(W) - I(P;W)`` from above at every ``P``.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    p = np.full(channel.a, 1.0 / channel.a)
    best = None
    for it in range(max_iter + 1):
        div = _divergences(channel, average_state(channel, p))
        info = float(p @ div)
        gap = max(0.0, float(np.max(div)) - info)
        best = CapacityResult(max(info, 0.0), p, it, gap)
        if gap <= tol:
            return best
        if it == max_iter:
            break
        # shift exponent by its max before exponentiating
        logits = np.log2(p, where=p > 0, out=np.full_like(p, -np.inf)) + div
        p = np.exp2(logits - np.max(logits))
        p /= p.sum()
    raise CapacityError(best, tol)


def simplex_grid(a: int, step: float) -> np.ndarray:
    """All points of the probability simplex on a lattice of spacing ``1/round(1/step)``."""
    m = int(round(1 / step))
    if m < 1:
        raise ValueError("step must be at most 1")
    pts = [
        c + (m - sum(c),)
        for c in itertools.product(range(m + 1), repeat=a - 1)
        if sum(c) <= m
    ]
    return np.array(pts, dtype=float) / m


def capacity_grid_oracle(channel: CqChannel, step: float) -> float:
    """Brute-force ``max I(P;W)`` over a simplex grid; only for ``a <= 3``."""
    if channel.a > 3:
        raise ValueError("grid oracle is limited to alphabets of size <= 3")
    grid = simplex_grid(channel.a, step)
    stack = np.array(channel.states)
    avgs = np.einsum("gx,xij->gij", grid, stack)
    eig = np.clip(np.linalg.eigvalsh(avgs), 0, None)
    with np.errstate(divide="ignore", invalid="ignore"):
        h = -np.sum(np.where(eig > 0, eig * np.log2(eig), 0.0), axis=1)
    info = h - grid @ channel.entropies
    return float(np.max(info))
