"""Closed-form outage approximations and the matching SIR densities.

Both approximations model the combiner SIR as y/x with x ~ Gamma(a, b) from
the interference fit.  The first keeps the exact summed eta-mu law for y and
needs the Appell F2 function; the second also fits y with Gamma(p, q), which
reduces the SIR to a scaled beta-prime variable and a single Gauss 2F1.

Gamma-heavy prefactors are assembled in log space: (n_r mu)^{2 n_r mu} alone
overflows doubles for modest n_r * mu.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import specfun
from .moments import GammaFit, Scenario
from .specfun import DomainError

# how far outside [0, 1] a probability may land before it is a hard error
CLAMP_TOL = 1e-9

VALID_METHODS = ("approx1", "approx2", "monte_carlo")


class NumericalFailureError(ArithmeticError):
    """An outage evaluation left [0, 1] by more than the clamp tolerance."""


@dataclass(frozen=True)
class OutagePoint:
    gamma0_db: float
    gamma0_lin: float
    p_out: float
    method: str

    def __post_init__(self):
        if self.method not in VALID_METHODS:
            raise DomainError(f"unknown method {self.method!r}")
        if not 0.0 <= self.p_out <= 1.0:
            raise DomainError(f"p_out outside [0, 1]: {self.p_out}")
        if not math.isclose(self.gamma0_lin, 10.0 ** (self.gamma0_db / 10.0),
                            rel_tol=1e-12):
            raise DomainError("gamma0_lin does not match gamma0_db")


def _clamp_unit(p: float, context: str) -> float:
    if math.isnan(p) or p < -CLAMP_TOL or p > 1.0 + CLAMP_TOL:
        raise NumericalFailureError(f"{context}: probability {p} outside [0, 1]")
    return min(max(p, 0.0), 1.0)


def _user_geometry(scenario: Scenario):
    u = scenario.user
    nm = scenario.n_r * u.mu
    ybar = scenario.n_r * u.omega
    # the closed forms are derived for H >= 0; they depend on |H| only, which
    # also keeps them invariant under eta -> -eta like the density itself
    return nm, u.h, abs(u.cap_h), ybar


def outage_approx1(scenario: Scenario, fit: GammaFit, gamma0_lin: float) -> float:
    """Appell-F2 outage: exact user law against the fitted Gamma(a, b).

    P_out = 1 - A * Gamma(2nm + a) / (2nm(h+H) + R)^{2nm+a}
              * F2(2nm + a, 1, nm; a + 1, 2nm; w, z)

    with R = ybar/(b gamma0), w = R/(2nm(h+H)+R), z = 4nm H/(2nm(h+H)+R)
    and A = R^a/Gamma(a+1) * 2 sqrt(pi) nm^{2nm} h^{nm}/(Gamma(nm)Gamma(nm+1/2)).
    """
    if not gamma0_lin > 0.0:
        raise DomainError(f"gamma0_lin must be > 0, got {gamma0_lin}")
    nm, h, cap_h, ybar = _user_geometry(scenario)
    a, b = fit.aggregate_a, fit.aggregate_b
    big = 2.0 * nm + a
    r = ybar / (b * gamma0_lin)
    den = 2.0 * nm * (h + cap_h) + r
    w = r / den
    z = 4.0 * nm * cap_h / den
    ln_a = (
        a * math.log(r) - math.lgamma(a + 1.0)
        + math.log(2.0) + 0.5 * math.log(math.pi)
        + 2.0 * nm * math.log(nm) + nm * math.log(h)
        - math.lgamma(nm) - math.lgamma(nm + 0.5)
    )
    _, ln_f2 = specfun._appell_f2_log(big, 1.0, nm, a + 1.0, 2.0 * nm, w, z)
    p = 1.0 - math.exp(ln_a + math.lgamma(big) - big * math.log(den) + ln_f2)
    return _clamp_unit(p, "outage_approx1")


def outage_approx2(fit: GammaFit, gamma0_lin: float) -> float:
    """Beta-prime outage: Gamma(p, q) user against Gamma(a, b) interference.

    P_out = (a)_p ((b/q) g0)^p 2F1(p + a, p; p + 1; -(b/q) g0) / Gamma(p+1)
    with (a)_p = Gamma(a+p)/Gamma(a) for non-integer p.
    """
    if not gamma0_lin > 0.0:
        raise DomainError(f"gamma0_lin must be > 0, got {gamma0_lin}")
    a, b = fit.aggregate_a, fit.aggregate_b
    p, q = fit.user_p, fit.user_q
    zeta = (b / q) * gamma0_lin
    f = specfun.hyp2f1(p + a, p, p + 1.0, -zeta)
    if not f.value > 0.0:
        raise NumericalFailureError(f"outage_approx2: 2F1 returned {f.value}")
    ln_p = (
        math.lgamma(a + p) - math.lgamma(a) - math.lgamma(p + 1.0)
        + p * math.log(zeta) + math.log(f.value)
    )
    return _clamp_unit(math.exp(ln_p), "outage_approx2")


def sir_pdf_approx1(scenario: Scenario, fit: GammaFit, gamma: float) -> float:
    """Density of the first approximate SIR law (used for KL and plotting).

    f(g) = 2 sqrt(pi) nm^{2nm} h^{nm} Gamma(2nm+a)
           / (Gamma(nm) Gamma(nm+1/2) Gamma(a) b^a g)
           * (g/ybar)^{2nm} (2nm h g/ybar + 1/b)^{-2nm-a}
           * 2F1((2nm+a)/2, (2nm+a+1)/2; nm+1/2; X)

    where X = 4 nm^2 H^2 (g/ybar)^2 / (2nm h g/ybar + 1/b)^2 stays below
    eta^2 < 1 for every g.
    """
    if not gamma > 0.0:
        raise DomainError(f"gamma must be > 0, got {gamma}")
    nm, h, cap_h, ybar = _user_geometry(scenario)
    a, b = fit.aggregate_a, fit.aggregate_b
    big = 2.0 * nm + a
    t = gamma / ybar
    rate = 2.0 * nm * h * t + 1.0 / b
    x = (2.0 * nm * cap_h * t / rate) ** 2
    f = specfun.hyp2f1(0.5 * big, 0.5 * (big + 1.0), nm + 0.5, x)
    ln_f = (
        math.log(2.0) + 0.5 * math.log(math.pi)
        + 2.0 * nm * math.log(nm) + nm * math.log(h) + math.lgamma(big)
        - math.lgamma(nm) - math.lgamma(nm + 0.5) - math.lgamma(a)
        - a * math.log(b) - math.log(gamma)
        + 2.0 * nm * math.log(t) - big * math.log(rate)
        + math.log(f.value)
    )
    return math.exp(ln_f)


def sir_pdf_approx2(fit: GammaFit, gamma: float) -> float:
    """Scaled beta-prime density of the second approximate SIR law."""
    if not gamma > 0.0:
        raise DomainError(f"gamma must be > 0, got {gamma}")
    a, b = fit.aggregate_a, fit.aggregate_b
    p, q = fit.user_p, fit.user_q
    r = b / q
    ln_f = (
        math.lgamma(a + p) - math.lgamma(a) - math.lgamma(p)
        + p * math.log(r) + (p - 1.0) * math.log(gamma)
        - (a + p) * math.log1p(r * gamma)
    )
    return math.exp(ln_f)
