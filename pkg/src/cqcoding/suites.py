"""Seeded Monte Carlo verification suites.

Each suite maps ``(seed, trial)`` to a list of :class:`Report` objects. Trial
``i`` draws from ``trial_rng(seed, i, stream)`` with a per-suite stream id,
so output is reproducible and independent of worker scheduling.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import coding, distance, projectors, sequences
from . import operators as ops
from . import sampling as sm
from .channel import CqChannel, capacity
from .reports import Report

DELTAS = (1.0, 2.0, 4.0)


def types_trial(rng: np.random.Generator) -> list[Report]:
    a = int(rng.integers(1, 4))
    P = tuple(sm.random_distribution(a, rng))
    n = int(rng.integers(1, 13))
    return [sequences.lemma1_bounds_check(sequences.TypicalSetSpec(P, n, delta)) for delta in DELTAS]


def projector_trial(rng: np.random.Generator, cap: int = ops.DEFAULT_DENSE_CAP) -> list[Report]:
    rho = sm.random_pure_state(2, rng) if rng.uniform() < 0.2 else sm.random_density(2, rng)
    n = int(rng.integers(1, 9))
    out = [projectors.lemma2_sandwich_check(rho, n, delta, cap) for delta in DELTAS]
    channel = sm.random_channel(2, 2, rng)
    n = int(rng.integers(1, 9))
    word = tuple(int(x) for x in rng.integers(0, 2, size=n))
    out += [projectors.lemma4_bounds_check(channel, word, delta, cap) for delta in DELTAS]
    return out


def shadow_trial(rng: np.random.Generator, d: int = 8) -> list[Report]:
    """Random commuting ``(Lambda, rho, B)``: diagonal and unitarily rotated."""
    lam_diag = rng.uniform(size=d) * (rng.uniform(size=d) < 0.8)
    if not lam_diag.any():
        lam_diag[0] = rng.uniform()
    rho_diag = rng.dirichlet(np.ones(d))
    b_diag = rng.uniform(size=d)
    support = lam_diag > 0
    mu1 = float(np.min(rho_diag[support]))
    mu2 = float(np.max(rho_diag[support]))
    lam = 1 - float(rho_diag @ lam_diag)
    out = [projectors.shadow_bound(lam_diag, rho_diag, lam, mu1, mu2,
                                   projectors.ShadowWitness.for_state(b_diag, rho_diag))]
    u = np.linalg.qr(rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d)))[0]

    def rotate(x):
        m = (u * x) @ u.conj().T
        return (m + m.conj().T) / 2

    rho = rotate(rho_diag)
    out.append(projectors.shadow_bound(rotate(lam_diag), rho, lam, mu1, mu2,
                                       projectors.ShadowWitness.for_state(rotate(b_diag), rho)))
    return out


def weaklaw_trial(rng: np.random.Generator, cap: int = ops.DEFAULT_DENSE_CAP) -> list[Report]:
    channel = sm.random_channel(2, 2, rng)
    n = int(rng.integers(1, 9))
    word = tuple(int(x) for x in rng.integers(0, 2, size=n))
    P = np.bincount(word, minlength=2) / n
    return [projectors.weak_law_check(channel, P, word, delta, cap) for delta in (2.0, 4.0)]


def fidelity_trial(rng: np.random.Generator) -> list[Report]:
    d = int(rng.integers(2, 4))
    out = [distance.lemma_pure_state_check(sm.random_pure_state(d, rng), sm.random_pure_state(d, rng))]
    d = int(rng.integers(2, 5))
    rho = sm.random_pure_state(d, rng)
    sigma = sm.random_density(d, rng, rank=int(rng.integers(1, d + 1)))
    out.append(distance.lemma_mixed_state_check(rho, sigma))
    # pinching monotonicity used in the mixed-state argument
    r = Report("mixed_state", f"d={d}")
    r.lower("pinching_monotone", ops.trace_norm(rho - distance.two_outcome_pinching(rho, sigma)),
            ops.trace_norm(rho - sigma))
    out.append(r)
    out.append(distance.lemma_mixed_state_check(rho, rng.uniform() * sigma))
    return out


def gentle_trial(rng: np.random.Generator) -> list[Report]:
    d = int(rng.integers(2, 7))
    rho = sm.random_pure_state(d, rng) if rng.uniform() < 0.3 else sm.random_density(d, rng)
    return [distance.gentle_measurement_check(rho, sm.random_effect(d, rng))]


def holevo_trial(rng: np.random.Generator, channel: CqChannel | None = None) -> list[Report]:
    if channel is None:
        channel = sm.random_channel(int(rng.integers(1, 5)), int(rng.integers(2, 5)), rng)
    povm = sm.random_povm(channel.d, int(rng.integers(1, 7)), rng)
    P = sm.random_distribution(channel.a, rng)
    out = [coding.holevo_bound_check(channel, P, povm)]

    a, d = channel.a, channel.d
    basis = np.linalg.qr(rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d)))[0]
    commuting = sm.random_commuting_channel(a, d, rng, basis)
    eigen_povm = [np.outer(basis[:, j], basis[:, j].conj()) for j in range(d)]
    report = coding.holevo_bound_check(commuting, P, eigen_povm)
    classical = report["information_bound"].achieved
    quantum = report["information_bound"].bound
    report.upper("equality_commuting", 1e-9, abs(quantum - classical), tol=0)
    out.append(report)
    return out


def coding_fleet_channels(count: int, seed: int) -> list[tuple[str, CqChannel]]:
    """The two named channels followed by ``count`` random qubit channels."""
    ket0 = np.array([1, 0])
    plus = np.array([1, 1]) / np.sqrt(2)
    fleet = [
        ("orthogonal_pure", CqChannel.from_states([np.diag([1.0, 0.0]), np.diag([0.0, 1.0])])),
        ("zero_plus", CqChannel.from_states([ops.ket_to_density(ket0), ops.ket_to_density(plus)])),
    ]
    fleet += [(f"random_{i}", sm.random_channel(2, 2, sm.trial_rng(seed, i, stream=7))) for i in range(count)]
    return fleet


def code_report(channel: CqChannel, probs, n: int, lam: float, tau: float = 1.0,
                cap: int = ops.DEFAULT_DENSE_CAP, cap_result=None) -> tuple[coding.Code, Report]:
    """Build a greedy code and run every sandwich check on it."""
    result = coding.greedy_code_build(channel, probs, n, lam, tau, cap=cap)
    code = result.code
    report = Report("coding", f"n={n};lambda={lam};tau={tau};M={code.size}")
    report.upper("error", lam, coding.error_probability(code, channel))
    worst = 0.0
    for w, D in zip(code.codewords, code.decoder):
        limit = projectors.conditional_typical_projector(channel, w, result.params.delta).trace
        worst = min(worst, limit - float(np.trace(D).real))
    report.lower("decoder_trace", 0.0, worst)
    extension = coding.find_extension(code, channel, probs, lam, tau)
    report.upper("non_extendible", 0.0, 0.0 if extension is None else 1.0,
                 "" if extension is None else ",".join(map(str, extension)))
    log_m = code.log_size
    lower = coding.theorem2_size_bound(channel, probs, n, lam, tau)
    if lower > 0:
        report.lower("theorem2_size", lower, log_m)
    else:
        report.lower("theorem2_size", lower, max(log_m, lower), "vacuous")
    if cap_result is None:
        cap_result = capacity(channel)
    full = coding.strong_converse_full_bound(channel, n, lam, cap_result)
    report.upper("converse_full", full, max(log_m, 0.0))
    for counts, sub in coding.constant_composition_subcodes(code, channel.a).items():
        P = np.asarray(counts, dtype=float) / n
        tag = "type=" + "/".join(map(str, counts))
        report.upper("converse_cc", coding.strong_converse_cc_bound(channel, P, n, lam), sub.log_size, tag)
        report.extend(coding.modified_decoder_check(sub, channel, lam, cap))
    return code, report


def coding_trial_for(channel: CqChannel, cap: int = ops.DEFAULT_DENSE_CAP,
                     ns=(4, 6, 8), lams=(0.3, 0.5)) -> list[Report]:
    cap_result = capacity(channel)
    out = []
    for n in ns:
        for lam in lams:
            out.append(code_report(channel, cap_result.maximizer, n, lam, 1.0, cap, cap_result)[1])
    return out


SUITES = {
    "types": (types_trial, 1),
    "projector": (projector_trial, 2),
    "shadow": (shadow_trial, 3),
    "weaklaw": (weaklaw_trial, 4),
    "fidelity": (fidelity_trial, 5),
    "gentle": (gentle_trial, 6),
    "holevo": (holevo_trial, 8),
}


def run_suite(name: str, trials: int, seed: int = 0, workers: int = 1, **kwargs) -> list[tuple[int, Report]]:
    """Run ``trials`` trials of suite ``name``; results come back in trial order."""
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {sorted(SUITES)}")
    func, stream = SUITES[name]

    def one(i):
        return func(sm.trial_rng(seed, i, stream), **kwargs)

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(one, range(trials)))
    else:
        results = [one(i) for i in range(trials)]
    return [(i, r) for i, reports in enumerate(results) for r in reports]


def run_coding_fleet(random_channels: int = 20, seed: int = 0, cap: int = ops.DEFAULT_DENSE_CAP,
                     workers: int = 1, ns=(4, 6, 8), lams=(0.3, 0.5)) -> list[tuple[int, Report]]:
    fleet = coding_fleet_channels(random_channels, seed)

    def one(item):
        return coding_trial_for(item[1], cap, ns, lams)

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(one, fleet))
    else:
        results = [one(item) for item in fleet]
    return [(i, r) for i, reports in enumerate(results) for r in reports]
