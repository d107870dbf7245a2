"""Gamma moment matching for the interference terms of the MRC combiner.

Each denominator term E_i |c^H c_i|^2 is approximated by |c^H c| z_i with
z_i ~ Gamma(a_i, b_i), matching first and second moments.  The z_i sum then
collapses to a single Gamma(a, b) by matching moments again, which is exact
when all (a_i, b_i) coincide (equal interferer energies).  A separate
Gamma(p, q) fit to the user's summed branch power drives the simpler
beta-prime outage form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fading import EtaMuParams
from .specfun import DomainError


class DegenerateFitError(ArithmeticError):
    """Moment matching produced a non-positive shape or scale."""


@dataclass(frozen=True)
class Scenario:
    """Receive setup: n_r antennas, one user population, n_i interferers.

    All interferers share the fading parameters; they differ only in their
    mean energies (linear scale, one per interferer).
    """

    n_r: int
    user: EtaMuParams
    interferer: EtaMuParams
    energies: tuple[float, ...]

    def __post_init__(self):
        if not (isinstance(self.n_r, (int, np.integer)) and self.n_r >= 1):
            raise DomainError(f"n_r must be a positive integer, got {self.n_r}")
        object.__setattr__(self, "energies", tuple(float(e) for e in self.energies))
        if len(self.energies) < 1:
            raise DomainError("at least one interferer energy is required")
        if any(not e > 0.0 for e in self.energies):
            raise DomainError("all interferer energies must be > 0 (linear scale)")

    @property
    def n_i(self) -> int:
        return len(self.energies)


@dataclass(frozen=True)
class GammaFit:
    """Per-interferer (a_i, b_i), their aggregate (a, b), and the user (p, q)."""

    per_interferer: tuple[tuple[float, float], ...]
    aggregate_a: float
    aggregate_b: float
    user_p: float
    user_q: float


def user_norm_moments(scenario: Scenario) -> tuple[float, float]:
    """First two moments of |c^H c| = sum of branch powers of the user."""
    u = scenario.user
    n = scenario.n_r
    ox, oy = u.omega_x, u.omega_y
    m1 = n * (ox + oy)
    m2 = n * (((u.mu + 1.0) / u.mu + n - 1.0) * (ox * ox + oy * oy) + 2.0 * n * ox * oy)
    return m1, m2


def _check_index(scenario: Scenario, i: int) -> int:
    if not 1 <= i <= scenario.n_i:
        raise IndexError(f"interferer index {i} outside 1..{scenario.n_i}")
    return i - 1


def cross_moment_1(scenario: Scenario, i: int) -> float:
    """E[E_i |c^H c_i|^2]; i is 1-based like the energy subscripts."""
    u, v = scenario.user, scenario.interferer
    e = scenario.energies[_check_index(scenario, i)]
    return e * scenario.n_r * (u.omega_x + u.omega_y) * (v.omega_x + v.omega_y)


def cross_moment_2(scenario: Scenario, i: int) -> float:
    """E[(E_i |c^H c_i|^2)^2], expanded term by term.

    Four groups, by which squared component powers pair up across the user
    and interferer populations.
    """
    u, v = scenario.user, scenario.interferer
    e = scenario.energies[_check_index(scenario, i)]
    n = scenario.n_r
    ku = (u.mu + 1.0) / u.mu
    ki = (v.mu + 1.0) / v.mu
    ax, ay = u.omega_x, u.omega_y
    gx, gy = v.omega_x, v.omega_y
    su2 = ax * ax + ay * ay
    si2 = gx * gx + gy * gy
    t1 = su2 * si2 * (3.0 * n * (n - 1.0) + n * ku * ki)
    t2 = su2 * (gx * gy) * (2.0 * n * (n - 1.0) + 2.0 * n * ku)
    t3 = si2 * (ax * ay) * (2.0 * n * (n - 1.0) + 2.0 * n * ki)
    t4 = (gx * gy * ax * ay) * (4.0 * n * n + 8.0 * n * (n - 1.0))
    return e * e * (t1 + t2 + t3 + t4)


def per_interferer_fit(scenario: Scenario, i: int) -> tuple[float, float]:
    """Gamma (a_i, b_i) matching the first two moments of E_i |c^H c_i|^2 / |c^H c|.

    b_i = (r2 - r1^2) / r1 and a_i = r1 / b_i with r1, r2 the cross-to-user
    moment ratios.  The numerator is a difference of two close numbers for
    weakly dispersive channels, so it is accumulated in extended precision.
    """
    m1, m2 = user_norm_moments(scenario)
    r1 = cross_moment_1(scenario, i) / m1
    r2 = cross_moment_2(scenario, i) / m2
    var = float(np.longdouble(r2) - np.longdouble(r1) * np.longdouble(r1))
    if not var > 0.0:
        raise DegenerateFitError(
            f"non-positive matched variance ({var}) for interferer {i}")
    b_i = var / r1
    a_i = r1 / b_i
    return a_i, b_i


def aggregate_fit(per: list[tuple[float, float]] | tuple[tuple[float, float], ...]) -> tuple[float, float]:
    """Collapse independent Gamma(a_i, b_i) terms to one Gamma(a, b).

    a = (sum a_i b_i)^2 / sum a_i b_i^2 and b = sum a_i b_i^2 / sum a_i b_i,
    preserving the first moment and the a b^2 combination.
    """
    per = list(per)
    if not per:
        raise DomainError("aggregate_fit needs at least one (a_i, b_i) pair")
    if any(a <= 0.0 or b <= 0.0 for a, b in per):
        raise DegenerateFitError("all per-interferer shapes and scales must be > 0")
    s1 = math.fsum(a * b for a, b in per)
    s2 = math.fsum(a * b * b for a, b in per)
    return s1 * s1 / s2, s2 / s1


def approx2_user_fit(scenario: Scenario) -> tuple[float, float]:
    """Gamma (p, q) matching the user's summed branch power.

    p = 2 mu n_r / (1 + eta^2), q = n_r (Ox + Oy) / p.
    """
    u = scenario.user
    p = 2.0 * u.mu * scenario.n_r / (1.0 + u.eta * u.eta)
    q = scenario.n_r * (u.omega_x + u.omega_y) / p
    return p, q


def build_gamma_fit(scenario: Scenario) -> GammaFit:
    """Run the full matching pipeline for a scenario."""
    per = tuple(per_interferer_fit(scenario, i) for i in range(1, scenario.n_i + 1))
    a, b = aggregate_fit(per)
    p, q = approx2_user_fit(scenario)
    return GammaFit(per_interferer=per, aggregate_a=a, aggregate_b=b,
                    user_p=p, user_q=q)
