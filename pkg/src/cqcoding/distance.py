"""Trace distance, pure-state fidelity and the gentle-measurement bound."""

from __future__ import annotations

import math

import numpy as np

from . import operators as ops
from .reports import Report

PURITY_TOL = 1e-9
CHECK_TOL = 1e-9


def trace_distance(rho, sigma) -> float:
    """``(1/2) ||rho - sigma||_1``."""
    rho, sigma = np.asarray(rho), np.asarray(sigma)
    if rho.shape != sigma.shape:
        raise ValueError(f"dimension mismatch: {rho.shape} vs {sigma.shape}")
    return 0.5 * ops.trace_norm(rho - sigma)


def is_pure(rho, tol: float = PURITY_TOL) -> bool:
    w = np.linalg.eigvalsh(ops.hermitian(rho))
    return bool(abs(w[-1] - 1) <= tol and np.all(np.abs(w[:-1]) <= tol))


def pure_fidelity(rho, sigma) -> float:
    """``Tr(rho sigma)`` with ``rho`` rank one."""
    if not is_pure(rho):
        raise ValueError("pure_fidelity needs a pure first argument")
    return float(np.einsum("ij,ji->", np.asarray(rho), np.asarray(sigma)).real)


def lemma_pure_state_check(rho, sigma) -> Report:
    """``1 - F = D^2`` for two pure states."""
    if not (is_pure(rho) and is_pure(sigma)):
        raise ValueError("both states must be pure")
    D = trace_distance(rho, sigma)
    F = pure_fidelity(rho, sigma)
    report = Report("pure_state", f"d={np.asarray(rho).shape[0]}")
    report.upper("identity", CHECK_TOL, abs(1 - F - D * D), tol=0)
    return report


def lemma_mixed_state_check(rho, sigma) -> Report:
    """``D >= 1 - F >= D^2`` for pure ``rho`` and arbitrary ``sigma``."""
    D = trace_distance(rho, sigma)
    F = pure_fidelity(rho, sigma)
    tr = float(np.trace(sigma).real)
    lemma = "mixed_state" if tr >= 1 - 1e-9 else "mixed_state_subnormalized"
    report = Report(lemma, f"d={np.asarray(rho).shape[0]};trace_sigma={tr:.12g}")
    report.lower("distance_geq_infidelity", 1 - F, D, tol=CHECK_TOL)
    report.lower("infidelity_geq_distance_squared", D * D, 1 - F, tol=CHECK_TOL)
    return report


def two_outcome_pinching(rho, sigma) -> np.ndarray:
    """``rho sigma rho + (I - rho) sigma (I - rho)`` for a pure ``rho``."""
    rho = np.asarray(rho)
    comp = np.eye(rho.shape[0]) - rho
    return rho @ sigma @ rho + comp @ sigma @ comp


def gentle_measurement_residual(rho, X) -> float:
    """``||rho - sqrt(X) rho sqrt(X)||_1`` for ``0 <= X <= I``."""
    X = ops.hermitian(X, tol=1e-9)
    w = np.linalg.eigvalsh(X)
    if w[0] < -ops.ORDER_TOL or w[-1] > 1 + ops.ORDER_TOL:
        raise ValueError(f"X must satisfy 0 <= X <= I (spectrum [{w[0]:.3e}, {w[-1]:.3e}])")
    s = ops.sqrt_psd(X)
    return ops.trace_norm(rho - s @ rho @ s)


def gentle_measurement_check(rho, X) -> Report:
    """Residual ``<= sqrt(8 lambda)`` with ``lambda = 1 - Tr(rho X)``; the ratio
    residual/bound is recorded in the witness column."""
    lam = min(1.0, max(0.0, 1 - float(np.einsum("ij,ji->", rho, X).real)))
    residual = gentle_measurement_residual(rho, X)
    bound = math.sqrt(8 * lam)
    ratio = residual / bound if bound > 0 else 0.0
    report = Report("gentle", f"d={np.asarray(rho).shape[0]};lambda={lam:.12g}")
    report.upper("residual", bound, residual, f"ratio={ratio:.12g}", tol=CHECK_TOL)
    return report
