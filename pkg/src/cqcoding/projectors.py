"""Variance-typical projectors, conditional typical projectors and pinching.

A :class:`TypicalProjector` is stored as the set of eigen-index sequences it
contains together with the per-slot eigenbases, so traces and overlaps with
co-diagonal product states are computed combinatorially. Dense matrices are
built only on request and only below the dimension cap.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import operators as ops
from .channel import CqChannel, average_state
from .reports import Report
from .sequences import (
    DEFAULT_ENUM_CAP,
    WOLFOWITZ_K,
    EnumerationCapError,
    counts_are_typical,
    shannon_entropy,
    type_of,
)


@dataclass(frozen=True, eq=False)
class ProductEigenbasis:
    """One fixed diagonalization per tensor slot."""

    factors: tuple[ops.SpectralDecomposition, ...]

    @property
    def n(self) -> int:
        return len(self.factors)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(f.dim for f in self.factors)

    def unitary(self, cap: int = ops.DEFAULT_DENSE_CAP) -> np.ndarray:
        """Columns are the product eigenvectors, in row-major multi-index order."""
        return ops.tensor(*(f.eigenvectors for f in self.factors), cap=cap)

    def weights(self) -> np.ndarray:
        """Product of slot eigenvalues for every multi-index (row-major)."""
        out = np.ones(1)
        for f in self.factors:
            out = np.kron(out, f.eigenvalues)
        return out


def flat_index(seq, dims) -> int:
    idx = 0
    for j, d in zip(seq, dims):
        idx = idx * d + j
    return idx


@dataclass(frozen=True, eq=False)
class TypicalProjector:
    basis: ProductEigenbasis
    sequences: tuple[tuple[int, ...], ...]

    @property
    def trace(self) -> int:
        return len(self.sequences)

    @cached_property
    def member_set(self) -> frozenset:
        return frozenset(self.sequences)

    def flat_indices(self) -> np.ndarray:
        dims = self.basis.dims
        return np.array([flat_index(s, dims) for s in self.sequences], dtype=int)

    def mask(self) -> np.ndarray:
        """Diagonal of the projector in its own product eigenbasis."""
        m = np.zeros(int(np.prod(self.basis.dims)))
        m[self.flat_indices()] = 1.0
        return m

    def dense(self, cap: int = ops.DEFAULT_DENSE_CAP) -> np.ndarray:
        u = self.basis.unitary(cap)[:, self.flat_indices()]
        return u @ u.conj().T

    def overlap_with_weights(self) -> float:
        """``sum over members of prod_i R_i(j_i)`` using the basis eigenvalues."""
        return math.fsum(
            math.prod(float(f.eigenvalues[j]) for f, j in zip(self.basis.factors, s))
            for s in self.sequences
        )


@dataclass(frozen=True, eq=False)
class ShadowWitness:
    """``0 <= B <= I`` with ``Tr(rho B) >= eta`` for the state it shadows."""

    B: np.ndarray
    eta: float

    @classmethod
    def for_state(cls, B, rho, eta: float | None = None) -> "ShadowWitness":
        B = np.asarray(B)
        overlap = _trace_product(rho, B)
        if eta is None:
            eta = overlap
        if not (ops.operator_leq(np.zeros_like(B), B) and ops.operator_leq(B, _identity_like(B))):
            raise ValueError("shadow operator must satisfy 0 <= B <= I")
        if overlap < eta - ops.ORDER_TOL:
            raise ValueError(f"Tr(rho B) = {overlap:.6g} is below eta = {eta:.6g}")
        return cls(B, float(eta))


def _identity_like(a: np.ndarray) -> np.ndarray:
    return np.ones(a.shape[0]) if a.ndim == 1 else np.eye(a.shape[0])


def _trace_product(a, b) -> float:
    a, b = np.asarray(a), np.asarray(b)
    if a.ndim == 1 and b.ndim == 1:
        return float(np.sum(a.real * b.real))
    if a.ndim == 1:
        a = np.diag(a)
    if b.ndim == 1:
        b = np.diag(b)
    return float(np.einsum("ij,ji->", a, b).real)


def _clean_weights(weights) -> tuple[float, ...]:
    w = np.clip(np.asarray(weights, dtype=float), 0, None)
    return tuple(float(x) for x in w / w.sum())


def _typical_blocks(weights, length: int, delta: float, cap: int) -> list[tuple[int, ...]]:
    d = len(weights)
    if d**length > cap:
        raise EnumerationCapError(f"{d}^{length} index sequences exceed enumeration cap {cap}")
    return [
        s for s in itertools.product(range(d), repeat=length)
        if counts_are_typical(type_of(s, d).counts, weights, length, delta)
    ]


def _interleaved_projector(slot_factors, word, letter_weights, delta, cap) -> TypicalProjector:
    """Tensor product over letters ``x`` of typical projectors on the slots ``I_x``."""
    n = len(word)
    positions = {}
    for i, x in enumerate(word):
        positions.setdefault(x, []).append(i)
    letters = sorted(positions)
    blocks = [
        _typical_blocks(letter_weights[x], len(positions[x]), delta, cap) for x in letters
    ]
    sequences = []
    for combo in itertools.product(*blocks):
        seq = [0] * n
        for x, block in zip(letters, combo):
            for i, j in zip(positions[x], block):
                seq[i] = j
        sequences.append(tuple(seq))
    sequences.sort()
    return TypicalProjector(ProductEigenbasis(tuple(slot_factors)), tuple(sequences))


def typical_projector(dec: ops.SpectralDecomposition, n: int, delta: float,
                      cap: int = DEFAULT_ENUM_CAP) -> TypicalProjector:
    """``Pi^n_{rho,delta}``: product eigenprojectors whose index sequence is
    variance-typical for the eigenvalue list of ``rho``."""
    weights = _clean_weights(dec.eigenvalues)
    return _interleaved_projector([dec] * n, (0,) * n, {0: weights}, delta, cap)


def conditional_typical_projector(channel: CqChannel, word, delta: float,
                                  cap: int = DEFAULT_ENUM_CAP) -> TypicalProjector:
    """``Pi^n_{W,delta}(x^n)``; slot ``i`` uses the fixed eigenbasis of ``W_{x_i}``."""
    decs = channel.decompositions
    return _projector_from_letter_decompositions(decs, word, delta, cap)


def _projector_from_letter_decompositions(decs, word, delta, cap) -> TypicalProjector:
    weights = {x: _clean_weights(decs[x].eigenvalues) for x in set(word)}
    return _interleaved_projector([decs[x] for x in word], tuple(word), weights, delta, cap)


def overlap_with_tensor_power(proj: TypicalProjector, rho) -> float:
    """``Tr(rho^{(x)n} Pi)`` for a projector built from ``rho``'s own diagonalization."""
    dec = ops.eig_decompose(rho)
    if not all(f.same_as(dec) for f in proj.basis.factors):
        raise ValueError("projector basis does not match the fixed diagonalization of rho")
    return proj.overlap_with_weights()


def pinch(basis: ops.SpectralDecomposition, sigma) -> np.ndarray:
    """``sum_j pi_j sigma pi_j`` for the rank-1 eigenprojectors of ``basis``."""
    dec = ops.pinched_decomposition(basis, sigma)
    return dec.reconstruct()


def shadow_bound(Lambda, rho, lam: float, mu1: float, mu2: float,
                 witness: ShadowWitness, label: str = "lemma3") -> Report:
    """Verify the abstract shadow bound.

    Preconditions (each reported separately, prefixed ``pre_``):
    ``0 <= Lambda <= I``, ``[Lambda, rho] = 0``, ``Tr(rho Lambda) >= 1 - lam``,
    ``mu1 Lambda <= sqrt(Lambda) rho sqrt(Lambda) <= mu2 Lambda``.
    Conclusions: ``(1-lam)/mu2 <= Tr Lambda <= 1/mu1`` and
    ``Tr B >= (eta - lam)/mu2``. 1-D arrays are diagonal operators.
    """
    L = np.asarray(Lambda)
    R = np.asarray(rho)
    B = witness.B
    report = Report(label, f"lambda={lam:.12g};mu1={mu1:.12g};mu2={mu2:.12g};eta={witness.eta:.12g}")
    diagonal = L.ndim == 1 and R.ndim == 1
    eye = _identity_like(L)

    report.lower("pre_lambda_psd", 0.0, _min_eig(L))
    report.upper("pre_lambda_leq_identity", 0.0, -_min_eig(eye - L))
    if diagonal:
        report.upper("pre_commute", 0.0, 0.0)
        middle = L * R
    else:
        L, R = _as_dense(L), _as_dense(R)
        report.upper("pre_commute", ops.ORDER_TOL, float(np.max(np.abs(L @ R - R @ L))), tol=0)
        s = ops.sqrt_psd(L)
        middle = s @ R @ s
    report.lower("pre_overlap", 1 - lam, _trace_product(R, L))
    scale = max(mu2, 1e-300)
    report.lower("pre_mu1_order", 0.0, _min_eig(middle - mu1 * L) / scale, tol=ops.ORDER_TOL)
    report.lower("pre_mu2_order", 0.0, _min_eig(mu2 * L - middle) / scale, tol=ops.ORDER_TOL)

    tr_l = float(np.sum(L.real)) if L.ndim == 1 else float(np.trace(L).real)
    tr_b = float(np.sum(np.asarray(B).real)) if np.asarray(B).ndim == 1 else float(np.trace(B).real)
    lower = (1 - lam) / mu2
    upper = 1 / mu1
    report.lower("trace_lower", lower, tr_l, tol=1e-9 * max(1.0, abs(lower)))
    report.upper("trace_upper", upper, tr_l, tol=1e-9 * max(1.0, upper))
    shadow = (witness.eta - lam) / mu2
    report.lower("shadow", shadow, tr_b, tol=1e-9 * max(1.0, abs(shadow)))
    return report


def _as_dense(a: np.ndarray) -> np.ndarray:
    return np.diag(a) if a.ndim == 1 else a


def _min_eig(a: np.ndarray) -> float:
    a = np.asarray(a)
    if a.ndim == 1:
        return float(np.min(a.real))
    return ops.min_eigenvalue(a)


def _fmt_seq(seq) -> str:
    return ",".join(str(j) for j in seq)


def _sandwich(report: Report, proj: TypicalProjector, center: float, band: float):
    """Every member's log eigenvalue product lies in ``[-center - band, -center + band]``."""
    worst_lo, worst_hi = math.inf, math.inf
    wit_lo = wit_hi = ""
    for seq in proj.sequences:
        logp = math.fsum(
            math.log2(f.eigenvalues[j]) for f, j in zip(proj.basis.factors, seq)
        )
        lo = logp - (-center - band)
        hi = (-center + band) - logp
        if lo < worst_lo:
            worst_lo, wit_lo = lo, _fmt_seq(seq)
        if hi < worst_hi:
            worst_hi, wit_hi = hi, _fmt_seq(seq)
    if proj.sequences:
        report.lower("sandwich_lower", -center - band, -center - band + worst_lo, wit_lo)
        report.upper("sandwich_upper", -center + band, -center + band - worst_hi, wit_hi)
    else:
        report.lower("sandwich_lower", 0.0, 0.0, "empty projector")
        report.upper("sandwich_upper", 0.0, 0.0, "empty projector")


def _shadow_clause(report: Report, proj: TypicalProjector, lam: float, center: float,
                   band: float, cap: int):
    """Shadow clause ``Tr B >= (eta - lam) 2^{center - band}`` in the product eigenbasis.

    All operators are co-diagonal there, so the Lemma-3 verifier runs on
    diagonals with ``B = Pi``; the sweep over ``B`` = the ``k`` heaviest
    product eigenprojectors covers the extremal shadows for every ``eta``.
    """
    if int(np.prod(proj.basis.dims)) > cap:
        report.upper("shadow_sweep", 0.0, 0.0, "skipped: above dense cap")
        return
    weights = np.clip(proj.basis.weights(), 0, None)
    mask = proj.mask()
    mu1 = 2.0 ** (-center - band)
    mu2 = 2.0 ** (-center + band)
    witness = ShadowWitness.for_state(mask, weights)
    report.extend(shadow_bound(mask, weights, lam, mu1, mu2, witness, label=report.lemma + "/lemma3"))

    order = np.argsort(-weights, kind="stable")
    eta = np.cumsum(weights[order])
    k = np.arange(1, len(weights) + 1)
    need = (eta - lam) * 2.0 ** (center - band)
    slack = k - need
    i = int(np.argmin(slack))
    report.lower("shadow_sweep", float(need[i]), float(k[i]), f"k={k[i]};eta={eta[i]:.12g}",
                 tol=1e-9 * max(1.0, abs(float(need[i]))))


def lemma2_sandwich_check(rho, n: int, delta: float, cap: int = ops.DEFAULT_DENSE_CAP) -> Report:
    """Typical-projector lemma for ``rho``: overlap, eigenvalue sandwich, trace
    bounds (lower bound with exponent ``nH - K d delta sqrt n``) and shadow clause."""
    dec = ops.eig_decompose(ops.density(rho))
    d = dec.dim
    report = Report("lemma2", f"d={d};n={n};delta={delta}")
    proj = typical_projector(dec, n, delta)
    h = shannon_entropy(_clean_weights(dec.eigenvalues))
    band = WOLFOWITZ_K * d * delta * math.sqrt(n)
    lam = d / delta**2 if delta > 0 else math.inf

    report.lower("overlap", 1 - lam, proj.overlap_with_weights())
    _sandwich(report, proj, n * h, band)
    upper = 2.0 ** (n * h + band)
    report.upper("trace_upper", upper, proj.trace, tol=1e-9 * upper)
    lower = (1 - lam) * 2.0 ** (n * h - band)
    report.lower("trace_lower", lower, proj.trace, "vacuous" if lam >= 1 else "",
                 tol=1e-9 * max(1.0, abs(lower)))
    _shadow_clause(report, proj, lam, n * h, band, cap)
    return report


def lemma4_bounds_check(channel: CqChannel, word, delta: float,
                        cap: int = ops.DEFAULT_DENSE_CAP) -> Report:
    """Conditional typical projector lemma for ``W`` given ``x^n``."""
    a, d, n = channel.a, channel.d, len(word)
    report = Report("lemma4", f"a={a};d={d};word={_fmt_seq(word)};delta={delta}")
    proj = conditional_typical_projector(channel, word, delta)
    counts = type_of(word, a).counts
    nh = math.fsum(c * shannon_entropy(_clean_weights(dec.eigenvalues))
                   for c, dec in zip(counts, channel.decompositions))
    band = WOLFOWITZ_K * d * math.sqrt(a) * delta * math.sqrt(n)
    lam = a * d / delta**2 if delta > 0 else math.inf

    report.lower("overlap", 1 - lam, proj.overlap_with_weights())
    _sandwich(report, proj, nh, band)
    upper = 2.0 ** (nh + band)
    report.upper("trace_upper", upper, proj.trace, tol=1e-9 * upper)
    lower = (1 - lam) * 2.0 ** (nh - band)
    report.lower("trace_lower", lower, proj.trace, "vacuous" if lam >= 1 else "",
                 tol=1e-9 * max(1.0, abs(lower)))
    _shadow_clause(report, proj, lam, nh, band, cap)
    return report


def pinched_channel_decompositions(channel: CqChannel, basis: ops.SpectralDecomposition):
    """Diagonals ``q_{.|x}`` of every ``W_x`` in ``basis`` (basis order kept)."""
    return tuple(ops.pinched_decomposition(basis, s) for s in channel.states)


def weak_law_check(channel: CqChannel, probs, word, delta: float,
                   cap: int = ops.DEFAULT_DENSE_CAP) -> Report:
    """``Tr(W_{x^n} Pi^n_{PW, delta sqrt a}) >= 1 - a d / delta^2`` for ``x^n`` of type ``P``.

    Also checks the member-sequence inclusion of the pinched conditional
    projector ``Pi^n_{kappa W, delta}(x^n)`` (diagonal in the same basis) in
    ``Pi^n_{PW, delta sqrt a}`` and cross-checks the dense overlap against
    the combinatorial one.
    """
    a, d, n = channel.a, channel.d, len(word)
    p = np.asarray(probs, dtype=float)
    counts = np.asarray(type_of(word, a).counts, dtype=float)
    if np.max(np.abs(counts - n * p)) > 1e-9:
        raise ValueError(f"word type {counts.tolist()} is not exactly n*P = {(n * p).tolist()}")
    report = Report("weaklaw", f"a={a};d={d};word={_fmt_seq(word)};delta={delta}")
    avg_dec = ops.eig_decompose(average_state(channel, p))
    big = typical_projector(avg_dec, n, delta * math.sqrt(a))
    lam = a * d / delta**2 if delta > 0 else math.inf

    dense = big.dense(cap)
    overlap = float(np.einsum("ij,ji->", channel.product_state(word, cap), dense).real)
    report.lower("overlap", 1 - lam, overlap)

    pinched = pinched_channel_decompositions(channel, avg_dec)
    small = _projector_from_letter_decompositions(pinched, word, delta, DEFAULT_ENUM_CAP)
    # overlap of W_{x^n} with big, computed from the pinched letter weights
    combinatorial = math.fsum(
        math.prod(float(pinched[x].eigenvalues[j]) for x, j in zip(word, seq))
        for seq in big.sequences
    )
    report.upper("overlap_crosscheck", 1e-9, abs(combinatorial - overlap), tol=0)
    missing = [s for s in small.sequences if s not in big.member_set]
    report.upper("inclusion", 0.0, len(missing), _fmt_seq(missing[0]) if missing else "")
    inner = math.fsum(
        math.prod(float(pinched[x].eigenvalues[j]) for x, j in zip(word, seq))
        for seq in small.sequences
    )
    report.lower("inclusion_implies_overlap", inner, overlap)
    return report
