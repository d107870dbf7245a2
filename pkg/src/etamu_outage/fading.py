"""Format-2 eta-mu fading: parameters, complex-envelope sampling, power moments.

The in-phase/quadrature pair (x, y) has joint density

    f(x, y) = mu^{2 mu} |x y|^{2 mu - 1} / (Ox^mu Oy^mu Gamma(mu)^2)
              * exp(-mu (x^2/Ox + y^2/Oy)),

which factorises, so x = s * sqrt(g) with g ~ Gamma(mu, Ox/mu) and s an
independent random sign (and likewise for y with Oy).  That construction is
exact for every mu > 0, unlike stacking Gaussian clusters which only covers
half-integer 2*mu.

Component powers follow the Format-2 split Ox = (1-eta) Omega / 2,
Oy = (1+eta) Omega / 2 with |eta| < 1 strictly: at the endpoints one
component degenerates and the two-dimensional density no longer exists.
The auxiliary constants are h = 1/(1-eta^2) and H = eta/(1-eta^2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import specfun
from .specfun import DomainError


@dataclass(frozen=True)
class EtaMuParams:
    """One eta-mu fading population with its derived Format-2 constants."""

    eta: float
    mu: float
    omega: float
    omega_x: float
    omega_y: float
    h: float
    cap_h: float


@dataclass(frozen=True)
class ComplexSample:
    re: float
    im: float


def make_params(eta: float, mu: float, omega: float) -> EtaMuParams:
    """Validate (eta, mu, omega) and derive component powers and h, H."""
    if not abs(eta) < 1.0:
        raise DomainError(f"|eta| must be < 1 (Format 2, open interval), got {eta}")
    if not mu > 0.0:
        raise DomainError(f"mu must be > 0, got {mu}")
    if not omega > 0.0:
        raise DomainError(f"omega must be > 0, got {omega}")
    omega_x = (1.0 - eta) * omega / 2.0
    omega_y = (1.0 + eta) * omega / 2.0
    one_m = 1.0 - eta * eta
    return EtaMuParams(
        eta=eta, mu=mu, omega=omega,
        omega_x=omega_x, omega_y=omega_y,
        h=1.0 / one_m, cap_h=eta / one_m,
    )


def sample_iq(params: EtaMuParams, rng: np.random.Generator, size) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised draw of (x, y) component arrays with the joint density above.

    Draw order is fixed (x gammas, x signs, y gammas, y signs) so a given
    generator state always produces the same values.
    """
    mu = params.mu
    gx = rng.gamma(mu, params.omega_x / mu, size)
    sx = rng.integers(0, 2, size) * 2 - 1
    gy = rng.gamma(mu, params.omega_y / mu, size)
    sy = rng.integers(0, 2, size) * 2 - 1
    return sx * np.sqrt(gx), sy * np.sqrt(gy)


def sample_complex(params: EtaMuParams, rng: np.random.Generator) -> ComplexSample:
    """Draw one complex envelope sample x + jy."""
    x, y = sample_iq(params, rng, None)
    return ComplexSample(float(x), float(y))


def sample_power_sum(params: EtaMuParams, rng: np.random.Generator, size,
                     n_sum: int = 1) -> np.ndarray:
    """Sum of n_sum independent powers x^2 + y^2, drawn directly.

    Each power is Gamma(mu, Ox/mu) + Gamma(mu, Oy/mu); the sum of n_sum of
    them collapses to Gamma(n_sum*mu, Ox/mu) + Gamma(n_sum*mu, Oy/mu).
    """
    mu = params.mu
    k = n_sum * mu
    return rng.gamma(k, params.omega_x / mu, size) + rng.gamma(k, params.omega_y / mu, size)


def power_moment(params: EtaMuParams, order: int) -> float:
    """E[(x^2 + y^2)^order] for order 1 or 2."""
    ox, oy = params.omega_x, params.omega_y
    if order == 1:
        return ox + oy
    if order == 2:
        k = (params.mu + 1.0) / params.mu
        return k * (ox * ox + oy * oy) + 2.0 * ox * oy
    raise DomainError(f"power_moment supports order 1 or 2, got {order}")


def sum_power_pdf(y: float, params: EtaMuParams, n_r: int) -> float:
    """Density at y of the sum of n_r i.i.d. eta-mu power variables.

    Closed form with shape n_r*mu and mean ybar = n_r*(Ox+Oy):

        f(y) = 2 sqrt(pi) (n mu)^{2 n mu} h^{n mu}
               / (Gamma(n mu) Gamma(n mu + 1/2) ybar)
               * (y/ybar)^{2 n mu - 1} e^{-2 n mu h y / ybar}
               * 0F1(n mu + 1/2; (n mu H y / ybar)^2)

    Evaluated in log space; the 0F1 factor grows like e^{2 n mu |H| y/ybar}
    and would otherwise overflow long before the density's tail matters.
    """
    if not y > 0.0:
        raise DomainError(f"sum_power_pdf requires y > 0, got {y}")
    if not (isinstance(n_r, (int, np.integer)) and n_r >= 1):
        raise DomainError(f"n_r must be a positive integer, got {n_r}")
    nm = n_r * params.mu
    ybar = n_r * params.omega
    t = y / ybar
    arg = (nm * params.cap_h * t) ** 2
    ln_f = (
        math.log(2.0) + 0.5 * math.log(math.pi)
        + 2.0 * nm * math.log(nm) + nm * math.log(params.h)
        - math.lgamma(nm) - math.lgamma(nm + 0.5) - math.log(ybar)
        + (2.0 * nm - 1.0) * math.log(t) - 2.0 * nm * params.h * t
        + specfun._ln_hyp0f1_nonneg(nm + 0.5, arg)
    )
    return math.exp(ln_f)
