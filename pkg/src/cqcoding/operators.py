"""Dense Hermitian-operator substrate.

Operators are plain complex ``numpy`` arrays. The helpers :func:`hermitian`
and :func:`density` validate and normalize them; everything else is a pure
function. Logarithms are base 2 throughout.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np

HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-10
EIG_CLAMP_TOL = 1e-10
ORTHO_TOL = 1e-9
ORDER_TOL = 1e-9
# eigenvalues closer than this are treated as one degenerate eigenspace
DEGENERACY_TOL = 1e-9
# projected canonical vectors shorter than this are dropped in Gram-Schmidt
RESIDUAL_TOL = 1e-8
DEFAULT_DENSE_CAP = 4096


class EigenDecompositionError(RuntimeError):
    """The eigensolver failed; the offending matrix is attached."""

    def __init__(self, matrix: np.ndarray, reason: str):
        self.matrix = matrix
        with np.printoptions(precision=17, linewidth=200, threshold=100000):
            dump = repr(matrix)
        super().__init__(f"eigendecomposition failed ({reason}) for matrix:\n{dump}")


class DimensionCapError(ValueError):
    """A dense operator would exceed the configured dimension cap."""


def hermitian(matrix, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Return ``matrix`` as a symmetrized complex Hermitian array.

    Raises:
        ValueError: if the input is not square or deviates from its
            conjugate transpose by more than ``tol`` in any entry.
    """
    a = np.asarray(matrix, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
        raise ValueError(f"expected a non-empty square matrix, got shape {a.shape}")
    dev = np.max(np.abs(a - a.conj().T))
    if dev > tol:
        raise ValueError(f"matrix is not Hermitian (max deviation {dev:.3e})")
    return (a + a.conj().T) / 2


def density(matrix, tol: float = TRACE_TOL) -> np.ndarray:
    """Validate a density operator and clamp tiny negative eigenvalues to 0."""
    a = hermitian(matrix)
    tr = np.trace(a).real
    if abs(tr - 1) > tol:
        raise ValueError(f"density operator must have unit trace, got {tr!r}")
    w, v = np.linalg.eigh(a)
    if w[0] < -EIG_CLAMP_TOL:
        raise ValueError(f"density operator has negative eigenvalue {w[0]:.3e}")
    if w[0] < 0:
        a = (v * np.clip(w, 0, None)) @ v.conj().T
        a = (a + a.conj().T) / 2
    return a


def ket_to_density(ket) -> np.ndarray:
    """Rank-1 projector onto the normalized vector ``ket``."""
    v = np.asarray(ket, dtype=complex).ravel()
    norm = np.linalg.norm(v)
    if norm == 0:
        raise ValueError("zero vector cannot be normalized")
    v = v / norm
    return np.outer(v, v.conj())


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    """Fixed diagonalization ``A = sum_j eigenvalues[j] |v_j><v_j|``.

    ``eigenvectors[:, j]`` is ``v_j``. When produced by :func:`eig_decompose`
    the eigenvalues are sorted descending; :func:`pinched_decomposition`
    keeps the order of a given basis instead.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def dim(self) -> int:
        return self.eigenvectors.shape[0]

    @property
    def projectors(self) -> list[np.ndarray]:
        v = self.eigenvectors
        return [np.outer(v[:, j], v[:, j].conj()) for j in range(v.shape[1])]

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T

    def same_as(self, other: "SpectralDecomposition") -> bool:
        return np.array_equal(self.eigenvalues, other.eigenvalues) and np.array_equal(
            self.eigenvectors, other.eigenvectors
        )


def _canonical_eigenspace_basis(vecs: np.ndarray) -> np.ndarray:
    """Orthonormal basis of span(vecs) obtained from projected unit vectors.

    Canonical basis vectors are projected onto the span in index order and
    Gram-Schmidt orthonormalized (two passes); residuals below RESIDUAL_TOL
    are discarded. The result is independent of the basis ``vecs`` the
    solver happened to return for the eigenspace.
    """
    dim, k = vecs.shape
    proj = vecs @ vecs.conj().T
    out: list[np.ndarray] = []
    for i in range(dim):
        u = proj[:, i].copy()
        for _ in range(2):
            for b in out:
                u -= b * np.vdot(b, u)
        norm = np.linalg.norm(u)
        if norm < RESIDUAL_TOL:
            continue
        out.append(u / norm)
        if len(out) == k:
            break
    if len(out) != k:
        raise EigenDecompositionError(proj, f"could not fix a basis for a {k}-dim eigenspace")
    return np.column_stack(out)


def eig_decompose(matrix) -> SpectralDecomposition:
    """Deterministic spectral decomposition of a Hermitian matrix.

    Eigenvalues come out sorted descending. Eigenvalues within
    ``DEGENERACY_TOL`` of their neighbour form one eigenspace, whose
    eigenvalue is replaced by the cluster mean and whose basis is fixed by
    :func:`_canonical_eigenspace_basis`. The same rule also fixes the phase
    of non-degenerate eigenvectors.
    """
    a = hermitian(matrix)
    try:
        w, v = np.linalg.eigh(a)
    except np.linalg.LinAlgError as exc:
        raise EigenDecompositionError(a, str(exc)) from exc
    if not np.all(np.isfinite(w)):
        raise EigenDecompositionError(a, "non-finite eigenvalues")
    w = w[::-1]
    v = v[:, ::-1]
    values: list[np.ndarray] = []
    vectors: list[np.ndarray] = []
    start = 0
    for stop in range(1, len(w) + 1):
        if stop < len(w) and w[stop - 1] - w[stop] <= DEGENERACY_TOL:
            continue
        block = _canonical_eigenspace_basis(v[:, start:stop])
        values.append(np.full(stop - start, np.mean(w[start:stop])))
        vectors.append(block)
        start = stop
    return SpectralDecomposition(np.concatenate(values), np.hstack(vectors))


def pinched_decomposition(basis: SpectralDecomposition, sigma) -> SpectralDecomposition:
    """Diagonal of ``sigma`` in ``basis``, kept in the basis order."""
    v = basis.eigenvectors
    diag = np.einsum("ij,ik,kj->j", v.conj(), np.asarray(sigma, dtype=complex), v).real
    return SpectralDecomposition(diag, v)


def apply_function(matrix, func) -> np.ndarray:
    """Evaluate ``func`` on the spectrum of a Hermitian matrix."""
    w, v = np.linalg.eigh(hermitian(matrix))
    out = (v * func(w)) @ v.conj().T
    return (out + out.conj().T) / 2


def sqrt_psd(matrix) -> np.ndarray:
    """Matrix square root of a PSD operator, negative eigenvalues clamped to 0."""
    return apply_function(matrix, lambda w: np.sqrt(np.clip(w, 0, None)))


def sign_operator(matrix) -> np.ndarray:
    """``sign(A)``; the unique maximizer of ``Tr(AB)`` over ``-I <= B <= I``
    on the non-kernel part."""
    return apply_function(matrix, np.sign)


def tensor(*operators, cap: int = DEFAULT_DENSE_CAP) -> np.ndarray:
    """Kronecker product of one or more operators (vectors also accepted)."""
    dims = [np.asarray(op).shape[0] for op in operators]
    total = int(np.prod(dims, dtype=object))
    if total > cap:
        raise DimensionCapError(f"tensor product dimension {total} exceeds cap {cap}")
    return reduce(np.kron, [np.asarray(op, dtype=complex) for op in operators])


def tensor_power(op, n: int, cap: int = DEFAULT_DENSE_CAP) -> np.ndarray:
    if n == 0:
        return np.ones((1, 1), dtype=complex)
    return tensor(*([op] * n), cap=cap)


def trace_norm(matrix) -> float:
    """Sum of absolute eigenvalues of a Hermitian matrix."""
    return float(np.sum(np.abs(np.linalg.eigvalsh(hermitian(matrix)))))


def positive_negative_parts(matrix) -> tuple[np.ndarray, np.ndarray]:
    """Split ``A = A_plus - A_minus`` with orthogonally supported PSD parts."""
    w, v = np.linalg.eigh(hermitian(matrix))
    plus = (v * np.clip(w, 0, None)) @ v.conj().T
    minus = (v * np.clip(-w, 0, None)) @ v.conj().T
    return (plus + plus.conj().T) / 2, (minus + minus.conj().T) / 2


def shannon_entropy(probs) -> float:
    """Shannon entropy in bits with ``0 log 0 = 0``; tiny negatives ignored."""
    p = np.asarray(probs, dtype=float)
    p = p[p > 0]
    return float(-np.sum(p * np.log2(p)))


def von_neumann_entropy(rho) -> float:
    return shannon_entropy(np.linalg.eigvalsh(hermitian(rho)))


def min_eigenvalue(matrix) -> float:
    return float(np.linalg.eigvalsh(hermitian(matrix, tol=1e-8))[0])


def operator_leq(a, b, tol: float = ORDER_TOL) -> bool:
    """``a <= b`` in the operator order, i.e. ``min eig(b - a) >= -tol``.

    1-D inputs are read as diagonal operators.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    if a.ndim == 1 and b.ndim == 1:
        return bool(np.min(b.real - a.real) >= -tol)
    if a.ndim == 1:
        a = np.diag(a)
    if b.ndim == 1:
        b = np.diag(b)
    return min_eigenvalue(b - a) >= -tol


def is_projector(matrix, tol: float = ORTHO_TOL) -> bool:
    a = np.asarray(matrix, dtype=complex)
    return bool(
        np.max(np.abs(a @ a - a)) <= tol and np.max(np.abs(a - a.conj().T)) <= tol
    )
