"""Independent reference computations used only by the tests."""

import itertools
import math

import numpy as np


def eigenvalues_2x2(m):
    """Roots of the characteristic polynomial of a 2x2 Hermitian matrix."""
    a, b, c = m[0][0].real, m[0][1], m[1][1].real
    tr, det = a + c, a * c - abs(b) ** 2
    disc = math.sqrt(tr * tr - 4 * det)
    return (tr + disc) / 2, (tr - disc) / 2


def binary_entropy(p):
    return 0.0 if p in (0.0, 1.0) else -p * math.log2(p) - (1 - p) * math.log2(1 - p)


def classical_capacity(V, iters=20000, tol=1e-13):
    """Classical Blahut-Arimoto for a row-stochastic matrix ``V``."""
    V = np.asarray(V, dtype=float)
    p = np.full(V.shape[0], 1 / V.shape[0])
    for _ in range(iters):
        q = p @ V
        with np.errstate(divide="ignore", invalid="ignore"):
            D = np.where(V > 0, V * np.log2(V / q), 0.0).sum(axis=1)
        info = p @ D
        if D.max() - info < tol:
            break
        p = p * np.exp2(D - D.max())
        p /= p.sum()
    return float(info)


def classical_mutual_info(V, p):
    V = np.asarray(V, dtype=float)
    q = p @ V
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(V > 0, V * np.log2(V / q), 0.0)
    return float(p @ terms.sum(axis=1))


def brute_typical_words(P, n, delta):
    """Typical words by direct enumeration and per-word counting."""
    a = len(P)
    out = []
    for w in itertools.product(range(a), repeat=n):
        if all(
            abs(w.count(x) - n * P[x]) <= delta * math.sqrt(n) * math.sqrt(P[x] * (1 - P[x])) + 1e-9
            for x in range(a)
        ):
            out.append(w)
    return out


def word_probability(w, P):
    return math.prod(P[x] for x in w)
