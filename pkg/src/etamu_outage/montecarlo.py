"""Exact-model SIR simulation, approximate-law sampling, and KL estimation.

Trials are partitioned into fixed 65536-trial chunks; chunk j of a run draws
from a fresh generator seeded by (seed, law, j).  The sample stream is
therefore bit-identical no matter how many workers process the chunks, and
independent runs with the same (seed, count, scenario, law) reproduce the
same values exactly.
"""

from __future__ import annotations

import hashlib
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import fading
from .moments import GammaFit, Scenario
from .specfun import DomainError

CHUNK_TRIALS = 65536

SOURCE_EXACT = "exact"
SOURCE_APPROX1 = "approx1_law"
SOURCE_APPROX2 = "approx2_law"
_LAW_TAG = {SOURCE_EXACT: 0, SOURCE_APPROX1: 1, SOURCE_APPROX2: 2}


class EstimationError(ArithmeticError):
    """The KL estimator could not produce a finite value."""


@dataclass(frozen=True)
class SirSamples:
    """A reproducibly seeded batch of linear-SIR realisations."""

    values: np.ndarray
    seed: int
    count: int
    source: str
    scenario_hash: str

    def __post_init__(self):
        if self.source not in _LAW_TAG:
            raise DomainError(f"unknown source {self.source!r}")
        if len(self.values) != self.count:
            raise DomainError("count does not match the number of values")


def scenario_hash(scenario: Scenario) -> str:
    """Stable short digest of the scenario's defining numbers."""
    u, v = scenario.user, scenario.interferer
    text = "|".join(
        repr(x) for x in (scenario.n_r, u.eta, u.mu, u.omega,
                          v.eta, v.mu, v.omega, scenario.energies)
    )
    return hashlib.sha256(text.encode()).hexdigest()[:16]


def _chunk_rng(seed: int, law: str, chunk_index: int) -> np.random.Generator:
    ss = np.random.SeedSequence([int(seed) & (2**64 - 1), _LAW_TAG[law], chunk_index])
    return np.random.default_rng(ss)


def _chunk_sizes(count: int) -> list[int]:
    full, rem = divmod(count, CHUNK_TRIALS)
    return [CHUNK_TRIALS] * full + ([rem] if rem else [])


def _run_chunks(chunk_fn, count: int, workers: int) -> np.ndarray:
    sizes = _chunk_sizes(count)
    if workers <= 1:
        parts = [chunk_fn(j, m) for j, m in enumerate(sizes)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(chunk_fn, range(len(sizes)), sizes))
    return np.concatenate(parts) if parts else np.empty(0)


def _exact_sir_chunk(scenario: Scenario, seed: int, j: int, m: int) -> np.ndarray:
    rng = _chunk_rng(seed, SOURCE_EXACT, j)
    n_r = scenario.n_r
    xu, yu = fading.sample_iq(scenario.user, rng, (m, n_r))
    num = np.sum(xu * xu + yu * yu, axis=1) ** 2
    den = np.zeros(m)
    for e in scenario.energies:
        ui, vi = fading.sample_iq(scenario.interferer, rng, (m, n_r))
        re = np.sum(xu * ui + yu * vi, axis=1)
        im = np.sum(xu * vi - yu * ui, axis=1)
        den += e * (re * re + im * im)
    return num / den


def simulate_exact_sir(scenario: Scenario, count: int, seed: int,
                       workers: int = 1) -> SirSamples:
    """Simulate the combiner SIR |c^H c|^2 / sum_i E_i |c^H c_i|^2."""
    if count < 1:
        raise DomainError(f"count must be >= 1, got {count}")
    values = _run_chunks(
        lambda j, m: _exact_sir_chunk(scenario, seed, j, m), count, workers)
    return SirSamples(values=values, seed=seed, count=count,
                      source=SOURCE_EXACT, scenario_hash=scenario_hash(scenario))


def sample_approx_law(scenario: Scenario, fit: GammaFit, law: str, count: int,
                      seed: int, workers: int = 1) -> SirSamples:
    """Sample one of the two approximate SIR laws.

    approx1_law: (sum of n_r user power draws) / Gamma(a, b)
    approx2_law: Gamma(p, q) / Gamma(a, b)
    """
    if law not in (SOURCE_APPROX1, SOURCE_APPROX2):
        raise DomainError(f"law must be approx1_law or approx2_law, got {law!r}")
    if count < 1:
        raise DomainError(f"count must be >= 1, got {count}")
    a, b = fit.aggregate_a, fit.aggregate_b

    def chunk(j, m):
        rng = _chunk_rng(seed, law, j)
        if law == SOURCE_APPROX1:
            y = fading.sample_power_sum(scenario.user, rng, m, n_sum=scenario.n_r)
        else:
            y = rng.gamma(fit.user_p, fit.user_q, m)
        x = rng.gamma(a, b, m)
        return y / x

    values = _run_chunks(chunk, count, workers)
    return SirSamples(values=values, seed=seed, count=count, source=law,
                      scenario_hash=scenario_hash(scenario))


_MOMENT_TAG = 3


def simulate_cross_moments(scenario: Scenario, i: int, count: int, seed: int,
                           workers: int = 1) -> dict:
    """MC estimates of the moments the gamma fits are built from.

    Returns means of E_i |c^H c_i|^2, its square, |c^H c|, and |c^H c|^2
    over `count` independent channel draws, for interferer i (1-based).
    """
    if not 1 <= i <= scenario.n_i:
        raise IndexError(f"interferer index {i} outside 1..{scenario.n_i}")
    e_i = scenario.energies[i - 1]
    n_r = scenario.n_r

    def chunk(j, m):
        ss = np.random.SeedSequence([int(seed) & (2**64 - 1), _MOMENT_TAG, j])
        rng = np.random.default_rng(ss)
        xu, yu = fading.sample_iq(scenario.user, rng, (m, n_r))
        ui, vi = fading.sample_iq(scenario.interferer, rng, (m, n_r))
        norm = np.sum(xu * xu + yu * yu, axis=1)
        re = np.sum(xu * ui + yu * vi, axis=1)
        im = np.sum(xu * vi - yu * ui, axis=1)
        cross = e_i * (re * re + im * im)
        return np.array([np.sum(cross), np.sum(cross ** 2),
                         np.sum(norm), np.sum(norm ** 2)])

    sizes = _chunk_sizes(count)
    if workers <= 1:
        parts = [chunk(j, m) for j, m in enumerate(sizes)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(chunk, range(len(sizes)), sizes))
    total = np.sum(parts, axis=0) / count
    return {"cross_m1": total[0], "cross_m2": total[1],
            "norm_m1": total[2], "norm_m2": total[3]}


def empirical_outage(samples: SirSamples, gamma0_grid) -> np.ndarray:
    """Fraction of SIR samples strictly below each target, per grid point."""
    grid = np.asarray(gamma0_grid, dtype=float)
    if samples.count < 1 or grid.size < 1:
        raise DomainError("empirical_outage needs non-empty samples and grid")
    ordered = np.sort(samples.values)
    return np.searchsorted(ordered, grid, side="left") / samples.count


def kl_divergence(p_samples: SirSamples, q_samples: SirSamples,
                  bins: int = 200) -> float:
    """Histogram KL estimate D(P || Q) between two SIR sample sets.

    Samples are histogrammed in the dB domain on a shared grid spanning the
    pooled 0.1%..99.9% quantile range (values outside are clipped into the
    edge bins), with one Laplace pseudo-count per bin.
    """
    if bins < 10:
        raise DomainError(f"bins must be >= 10, got {bins}")
    if p_samples.count < 1 or q_samples.count < 1:
        raise DomainError("kl_divergence needs non-empty sample sets")
    p_db = 10.0 * np.log10(p_samples.values)
    q_db = 10.0 * np.log10(q_samples.values)
    pooled = np.concatenate([p_db, q_db])
    lo, hi = np.quantile(pooled, [0.001, 0.999])
    if not hi > lo:
        raise EstimationError("degenerate pooled sample range")
    edges = np.linspace(lo, hi, bins + 1)
    p_hist, _ = np.histogram(np.clip(p_db, lo, hi), bins=edges)
    q_hist, _ = np.histogram(np.clip(q_db, lo, hi), bins=edges)
    p_hat = (p_hist + 1.0) / (p_samples.count + bins)
    q_hat = (q_hist + 1.0) / (q_samples.count + bins)
    kl = float(np.sum(p_hat * np.log(p_hat / q_hat)))
    if not math.isfinite(kl):
        raise EstimationError("KL estimate is not finite")
    return kl
