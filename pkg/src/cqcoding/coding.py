"""Block codes for cq-channels: greedy maximal codes, converse bounds, Holevo bound.

A code is a list of distinct codewords plus one PSD decoding operator per
codeword on the ``d^n``-dimensional output space; ``I - sum_m D_m`` is the
implicit "no decision" outcome.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from . import operators as ops
from .channel import CapacityResult, CqChannel, as_distribution, average_state, conditional_entropy, mutual_info
from .projectors import conditional_typical_projector, typical_projector
from .reports import Report
from .sequences import (
    DEFAULT_ENUM_CAP,
    WOLFOWITZ_K,
    EnumerationCapError,
    count_probability,
    counts_are_typical,
    number_of_types,
    type_of,
)

POVM_TOL = 1e-9
# eigenvalues in (SUPPORT_AMBIGUOUS, SUPPORT_TOL] make a support projector ill-defined
SUPPORT_TOL = 1e-9
SUPPORT_AMBIGUOUS = 1e-11


class InvalidCodeError(ValueError):
    pass


class InvalidPOVMError(ValueError):
    pass


@dataclass(eq=False)
class Code:
    n: int
    dim: int
    codewords: list[tuple[int, ...]] = field(default_factory=list)
    decoder: list[np.ndarray] = field(default_factory=list)

    def __post_init__(self):
        self.codewords = [tuple(int(x) for x in w) for w in self.codewords]
        if len(self.codewords) != len(self.decoder):
            raise InvalidCodeError("one decoding operator per codeword required")
        if len(set(self.codewords)) != len(self.codewords):
            raise InvalidCodeError("codewords must be distinct")
        for w in self.codewords:
            if len(w) != self.n:
                raise InvalidCodeError(f"codeword {w} does not have length {self.n}")
        total = np.zeros((self.dim, self.dim), dtype=complex)
        for m, D in enumerate(self.decoder):
            D = np.asarray(D)
            if D.shape != (self.dim, self.dim):
                raise InvalidCodeError(f"decoder {m} has shape {D.shape}, expected {(self.dim, self.dim)}")
            if np.max(np.abs(D - D.conj().T)) > POVM_TOL:
                raise InvalidCodeError(f"decoder {m} is not Hermitian")
            if ops.min_eigenvalue(D) < -POVM_TOL:
                raise InvalidCodeError(f"decoder {m} is not positive semidefinite")
            total += D
        if self.decoder and ops.min_eigenvalue(np.eye(self.dim) - total) < -POVM_TOL:
            raise InvalidCodeError("decoding operators sum to more than the identity")

    @property
    def size(self) -> int:
        return len(self.codewords)

    @property
    def log_size(self) -> float:
        return math.log2(self.size) if self.codewords else -math.inf

    @property
    def rate(self) -> float:
        return self.log_size / self.n if self.codewords else 0.0

    def subcode(self, indices) -> "Code":
        indices = list(indices)
        return Code(self.n, self.dim, [self.codewords[i] for i in indices],
                    [self.decoder[i] for i in indices])


@dataclass(frozen=True)
class GreedyParams:
    """Constants of the maximal-code construction, derived from ``lam, tau, a, d``."""

    lam: float
    tau: float
    a: int
    d: int

    def __post_init__(self):
        if not 0 < self.lam < 1:
            raise ValueError("lambda must lie in (0, 1)")
        if not 0 < self.tau <= 1:
            raise ValueError("tau must lie in (0, 1]")

    @property
    def delta(self) -> float:
        return math.sqrt(2 * self.a * self.d / self.lam)

    @property
    def candidate_delta(self) -> float:
        return math.sqrt(2 * self.a * self.d / self.tau)

    @property
    def eta(self) -> float:
        return min(1 - self.lam, self.lam**2 / 32)

    @property
    def delta0(self) -> float:
        return math.sqrt(4 * self.d / (self.eta * self.tau))


def error_probability(code: Code, channel: CqChannel) -> float:
    """Maximal error ``max_m 1 - Tr(W_{f(m)} D_m)``; 0 for the empty code."""
    if not code.codewords:
        return 0.0
    return max(
        1 - float(np.einsum("ij,ji->", channel.product_state(w, cap=code.dim), D).real)
        for w, D in zip(code.codewords, code.decoder)
    )


def _apply_kron(mats, X: np.ndarray) -> np.ndarray:
    """``(mats[0] (x) ... (x) mats[-1]) @ X`` without forming the Kronecker product."""
    dims = [m.shape[1] for m in mats]
    cols = X.shape[1]
    t = X.reshape(dims + [cols])
    for i, m in enumerate(mats):
        t = np.moveaxis(np.tensordot(m, t, axes=([1], [i])), 0, i)
    return t.reshape(-1, cols)


class _Candidate:
    """Dense data for one candidate word, in its own product eigenbasis."""

    def __init__(self, channel: CqChannel, word, delta: float, cap: int):
        self.word = word
        self.projector = conditional_typical_projector(channel, word, delta)
        self.adjoints = [channel.decompositions[x].eigenvectors.conj().T for x in word]
        self.weights = self.projector.basis.weights()
        self.mask = self.projector.mask()
        self.cap = cap

    def overlap(self, S: np.ndarray | None) -> float:
        """``Tr(W_{x^n} S Pi S)`` using ``W_{x^n}`` diagonal in the product basis."""
        if S is None:
            return float(self.weights @ self.mask)
        T = _apply_kron(self.adjoints, _apply_kron(self.adjoints, S).conj().T)
        return float(self.weights @ (np.abs(T) ** 2 @ self.mask))

    def decoding_operator(self, S: np.ndarray | None) -> np.ndarray:
        u = self.projector.basis.unitary(self.cap)[:, self.projector.flat_indices()]
        y = u if S is None else S @ u
        D = y @ y.conj().T
        return (D + D.conj().T) / 2


def _support_projector(D: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(D)
    if np.any((w > SUPPORT_AMBIGUOUS) & (w <= SUPPORT_TOL)):
        raise ValueError(
            f"support of decoding operator is ill-defined: eigenvalue in "
            f"({SUPPORT_AMBIGUOUS:g}, {SUPPORT_TOL:g}]"
        )
    keep = v[:, w > SUPPORT_TOL]
    return keep @ keep.conj().T


@dataclass
class GreedyResult:
    code: Code
    params: GreedyParams
    candidates: list[tuple[int, ...]]
    passes: int


def _candidate_words(channel: CqChannel, probs, n: int, params: GreedyParams,
                     accept_word, enum_cap: int):
    a = channel.a
    if a**n > enum_cap:
        raise EnumerationCapError(f"{a}^{n} words exceed enumeration cap {enum_cap}")
    words = [w for w in itertools.product(range(a), repeat=n) if accept_word is None or accept_word(w)]
    mass = math.fsum(count_probability(type_of(w, a).counts, probs) for w in words)
    if mass < params.tau - 1e-12:
        raise ValueError(f"P^n(A) = {mass:.6g} is below tau = {params.tau:g}")
    return [
        w for w in words
        if counts_are_typical(type_of(w, a).counts, probs, n, params.candidate_delta)
    ]


def greedy_code_build(channel: CqChannel, probs, n: int, lam: float, tau: float = 1.0,
                      accept_word=None, projector_history: bool = False,
                      cap: int = ops.DEFAULT_DENSE_CAP, enum_cap: int = DEFAULT_ENUM_CAP) -> GreedyResult:
    """Greedy maximal ``(n, lam)``-code.

    Candidates are the words of ``A`` (``accept_word``; all words if None)
    that are variance-typical for ``P`` with constant ``sqrt(2ad/tau)``,
    scanned lexicographically. A candidate ``x^n`` is added with
    ``D = sqrt(I - B) Pi^n_{W,delta}(x^n) sqrt(I - B)`` (``B`` = sum of the
    current decoder) when ``Tr(W_{x^n} D) >= 1 - lam``. Scanning repeats
    until a full pass adds nothing, so the result is non-extendible.

    With ``projector_history`` the running ``B`` is the sum of the support
    projectors of the accepted operators, so the stored operators have
    mutually orthogonal supports (see :func:`vn_decoder_variant`).
    """
    probs = as_distribution(probs, channel.a)
    params = GreedyParams(lam, tau, channel.a, channel.d)
    dim = channel.d**n
    if dim > cap:
        raise ops.DimensionCapError(f"output dimension {dim} exceeds dense cap {cap}")
    words = _candidate_words(channel, probs, n, params, accept_word, enum_cap)
    candidates = {w: _Candidate(channel, w, params.delta, cap) for w in words}

    codewords: list[tuple[int, ...]] = []
    decoder: list[np.ndarray] = []
    B = np.zeros((dim, dim), dtype=complex)
    S = None
    passes = 0
    while True:
        passes += 1
        added = False
        for w in words:
            if w in codewords:
                continue
            cand = candidates[w]
            if cand.overlap(S) >= 1 - lam:
                D = cand.decoding_operator(S)
                codewords.append(w)
                decoder.append(D)
                B = B + (_support_projector(D) if projector_history else D)
                S = ops.sqrt_psd(np.eye(dim) - B)
                added = True
        if not added:
            break
    return GreedyResult(Code(n, dim, codewords, decoder), params, words, passes)


def find_extension(code: Code, channel: CqChannel, probs, lam: float, tau: float = 1.0,
                   accept_word=None, enum_cap: int = DEFAULT_ENUM_CAP):
    """First candidate that could still be appended to ``code``, or None."""
    probs = as_distribution(probs, channel.a)
    params = GreedyParams(lam, tau, channel.a, channel.d)
    words = _candidate_words(channel, probs, code.n, params, accept_word, enum_cap)
    B = sum(code.decoder, np.zeros((code.dim, code.dim), dtype=complex))
    S = ops.sqrt_psd(np.eye(code.dim) - B) if code.codewords else None
    taken = set(code.codewords)
    for w in words:
        if w not in taken and _Candidate(channel, w, params.delta, code.dim).overlap(S) >= 1 - lam:
            return w
    return None


def vn_decoder_variant(code: Code) -> Code:
    """Replace every decoding operator by the projector onto its support.

    Requires mutually orthogonal supports, as produced by a greedy build with
    projector history; otherwise the projectors would not fit under ``I``.
    """
    projectors = [_support_projector(D) for D in code.decoder]
    if projectors:
        total = sum(projectors)
        if ops.min_eigenvalue(np.eye(code.dim) - total) < -POVM_TOL:
            raise ValueError("decoder supports overlap; build the code with projector history")
    return Code(code.n, code.dim, list(code.codewords), projectors)


def theorem2_size_bound(channel: CqChannel, probs, n: int, lam: float, tau: float = 1.0) -> float:
    """Lower bound on ``log2 |M|`` for the greedy maximal code, evaluated from
    the chain of inequalities behind the construction (not a fitted constant)."""
    probs = as_distribution(probs, channel.a)
    p = GreedyParams(lam, tau, channel.a, channel.d)
    a, d, K = channel.a, channel.d, WOLFOWITZ_K
    rn = math.sqrt(n)
    h_avg = ops.von_neumann_entropy(average_state(channel, probs))
    h_cond = conditional_entropy(channel, probs)
    shadow = n * h_avg - K * d * p.delta0 * rn + math.log2(p.eta * tau / 2 - d / p.delta0**2)
    per_codeword = n * h_cond + (K * d * math.sqrt(a) * p.delta + K * a * p.candidate_delta * math.log2(d)) * rn
    return shadow - per_codeword


def converse_delta(lam: float, a: int, d: int) -> float:
    return math.sqrt(32 * a * d) / (1 - lam)


def strong_converse_cc_bound(channel: CqChannel, probs, n: int, lam: float) -> float:
    """Upper bound on ``log2 |M|`` for constant-composition ``(n, lam)``-codes of type ``P``:
    ``log(4/(1-lam)) + n I(P;W) + 2 K d sqrt(a) delta sqrt(n)``, ``delta = sqrt(32ad)/(1-lam)``."""
    if not 0 < lam < 1:
        raise ValueError("lambda must lie in (0, 1)")
    a, d = channel.a, channel.d
    delta = converse_delta(lam, a, d)
    return (math.log2(4 / (1 - lam)) + n * mutual_info(channel, probs)
            + 2 * WOLFOWITZ_K * d * math.sqrt(a) * delta * math.sqrt(n))


def strong_converse_full_bound(channel: CqChannel, n: int, lam: float, cap: CapacityResult) -> float:
    """Upper bound on ``log2 |M|`` for any ``(n, lam)``-code.

    Type counting splits a code into at most ``C(n+a-1, a-1)`` constant-
    composition subcodes; each obeys the constant-composition bound, and
    ``I(P;W) <= C(W) <= capacity + gap_bound`` for every type.
    """
    if not 0 < lam < 1:
        raise ValueError("lambda must lie in (0, 1)")
    a, d = channel.a, channel.d
    delta = converse_delta(lam, a, d)
    return (math.log2(number_of_types(n, a)) + math.log2(4 / (1 - lam))
            + n * (cap.capacity + cap.gap_bound)
            + 2 * WOLFOWITZ_K * d * math.sqrt(a) * delta * math.sqrt(n))


def constant_composition_subcodes(code: Code, a: int) -> dict[tuple[int, ...], Code]:
    groups: dict[tuple[int, ...], list[int]] = {}
    for i, w in enumerate(code.codewords):
        groups.setdefault(type_of(w, a).counts, []).append(i)
    return {t: code.subcode(idx) for t, idx in sorted(groups.items())}


def largest_constant_composition_subcode(code: Code, a: int) -> Code:
    """Largest single-type subcode; ties go to the lexicographically first type."""
    subs = constant_composition_subcodes(code, a)
    if not subs:
        return code
    return max(subs.values(), key=lambda c: c.size)


def modified_decoder_check(code: Code, channel: CqChannel, lam: float,
                           cap: int = ops.DEFAULT_DENSE_CAP) -> Report:
    """Converse argument on a constant-composition code.

    With ``Pi = Pi^n_{PW, delta sqrt a}`` and ``D'_m = Pi D_m Pi`` checks
    ``Tr(W_{f(m)} D'_m) >= (1-lam)/2``,
    ``Tr D'_m >= (1-lam)/4 * 2^{nH(W|P) - K d sqrt(a) delta sqrt(n)}`` and
    ``sum_m Tr D'_m <= Tr Pi``.
    """
    a, d, n = channel.a, channel.d, code.n
    report = Report("converse", f"a={a};d={d};n={n};lambda={lam};M={code.size}")
    if not code.codewords:
        report.upper("vacuous", 0.0, 0.0, "empty code")
        return report
    counts = {type_of(w, a).counts for w in code.codewords}
    if len(counts) != 1:
        raise ValueError(f"code is not constant-composition: types {sorted(counts)}")
    P = np.asarray(next(iter(counts)), dtype=float) / n
    delta = converse_delta(lam, a, d)
    K, rn = WOLFOWITZ_K, math.sqrt(n)

    report.upper("code_error", lam, error_probability(code, channel))
    proj = typical_projector(ops.eig_decompose(average_state(channel, P)), n, delta * math.sqrt(a))
    Pi = proj.dense(cap)
    modified = [Pi @ D @ Pi for D in code.decoder]

    overlaps = [
        float(np.einsum("ij,ji->", channel.product_state(w, cap), Dm).real)
        for w, Dm in zip(code.codewords, modified)
    ]
    worst = int(np.argmin(overlaps))
    report.lower("modified_success", (1 - lam) / 2, overlaps[worst], f"m={worst}")

    traces = [float(np.trace(Dm).real) for Dm in modified]
    floor = (1 - lam) / 4 * 2.0 ** (n * conditional_entropy(channel, P) - K * d * math.sqrt(a) * delta * rn)
    worst = int(np.argmin(traces))
    report.lower("modified_trace_lower", floor, traces[worst], f"m={worst}", tol=1e-9 * max(1.0, floor))
    report.upper("modified_trace_sum", proj.trace, math.fsum(traces), tol=1e-9 * max(1.0, proj.trace))
    return report


def validate_povm(povm, dim: int | None = None) -> list[np.ndarray]:
    elements = [np.asarray(E, dtype=complex) for E in povm]
    if not elements:
        raise InvalidPOVMError("POVM needs at least one element")
    dim = elements[0].shape[0] if dim is None else dim
    total = np.zeros((dim, dim), dtype=complex)
    for y, E in enumerate(elements):
        if E.shape != (dim, dim):
            raise InvalidPOVMError(f"element {y} has shape {E.shape}, expected {(dim, dim)}")
        if np.max(np.abs(E - E.conj().T)) > POVM_TOL or ops.min_eigenvalue(E) < -POVM_TOL:
            raise InvalidPOVMError(f"element {y} is not positive semidefinite")
        total += E
    if np.max(np.abs(total - np.eye(dim))) > POVM_TOL:
        raise InvalidPOVMError("POVM elements do not sum to the identity")
    return elements


def induced_classical_channel(channel: CqChannel, povm) -> np.ndarray:
    """Stochastic matrix ``p(y|x) = Tr(W_x D_y)``, rows indexed by ``x``."""
    elements = validate_povm(povm, channel.d)
    return np.array([
        [float(np.einsum("ij,ji->", W, E).real) for E in elements]
        for W in channel.states
    ])


def classical_mutual_info(stochastic: np.ndarray, probs) -> float:
    """``I(P; V)`` of a classical channel via its diagonal cq-embedding."""
    rows = np.clip(np.asarray(stochastic, dtype=float), 0, None)
    rows = rows / rows.sum(axis=1, keepdims=True)
    embedded = CqChannel.from_states([np.diag(r) for r in rows])
    return mutual_info(embedded, probs)


def holevo_bound_check(channel: CqChannel, probs, povm) -> Report:
    """``I(P; D o W) <= I(P; W)`` for one measurement."""
    stochastic = induced_classical_channel(channel, povm)
    classical = classical_mutual_info(stochastic, probs)
    quantum = mutual_info(channel, probs)
    report = Report("holevo", f"a={channel.a};d={channel.d};outcomes={stochastic.shape[1]}")
    report.upper("information_bound", quantum, classical, f"gap={quantum - classical:.12g}")
    return report
