"""Hypergeometric building blocks for the outage closed forms.

Everything here is a pure function of scalars.  The evaluators hand back an
:class:`EvalResult` that records which strategy produced the number (plain
power series, a transformed series such as Kummer/Pfaff, or quadrature of an
integral representation) together with a conservative absolute error
estimate, so downstream code can audit how a value was obtained.

Series loops use Neumaier-compensated accumulation: the confluent series at
negative argument alternates with large terms and loses digits under naive
summation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate
from scipy.special import gammaln, gammasgn, jv

STRATEGY_SERIES = "series"
STRATEGY_TRANSFORMED = "transformed_series"
STRATEGY_QUADRATURE = "quadrature"

# stop once |term| < _REL_STOP * |sum| this many times in a row
_REL_STOP = 1e-14
_STOP_STREAK = 3

# double series switches to quadrature beyond this (convergence slows near 1)
F2_SERIES_THRESHOLD = 0.95
F2_SERIES_CAP = 10_000

_MAX_TERMS_1F1 = 20_000
_MAX_TERMS_2F1 = 200_000


class DomainError(ValueError):
    """Argument outside the operation's domain."""


class PoleError(DomainError):
    """A lower parameter hit a non-positive integer (pole of the series)."""


class UnsupportedDomainError(DomainError):
    """No available strategy converges for these parameters.

    ``attempted_strategies`` lists what was tried or ruled out.
    """

    def __init__(self, message, attempted_strategies=()):
        super().__init__(message)
        self.attempted_strategies = tuple(attempted_strategies)


@dataclass(frozen=True)
class EvalResult:
    """A special-function value plus how it was obtained."""

    value: float
    abs_error_estimate: float
    strategy: str

    def __post_init__(self):
        if not self.abs_error_estimate >= 0.0:
            raise ValueError("abs_error_estimate must be >= 0")


def _is_nonpositive_int(x: float, tol: float = 1e-9) -> bool:
    return x <= tol and abs(x - round(x)) < tol


def ln_gamma(x: float) -> float:
    """Natural log of the gamma function for x > 0."""
    if not x > 0.0:
        raise DomainError(f"ln_gamma requires x > 0, got {x}")
    return math.lgamma(x)


def pochhammer(a: float, n: int) -> float:
    """Rising factorial a (a+1) ... (a+n-1); 1 for n = 0."""
    if n < 0 or n != int(n):
        raise DomainError(f"pochhammer requires a non-negative integer n, got {n}")
    out = 1.0
    for k in range(int(n)):
        out *= a + k
    return out


class _NeumaierSum:
    """Compensated accumulator; exact enough for 1e-12-level series work."""

    __slots__ = ("s", "c")

    def __init__(self, init: float = 0.0):
        self.s = init
        self.c = 0.0

    def add(self, x: float) -> None:
        t = self.s + x
        if abs(self.s) >= abs(x):
            self.c += (self.s - t) + x
        else:
            self.c += (x - t) + self.s
        self.s = t

    @property
    def total(self) -> float:
        return self.s + self.c


def _sum_series(term_ratio, max_terms: int, rel_stop: float = _REL_STOP):
    """Sum t_0 + t_1 + ... with t_{k+1} = t_k * term_ratio(k), t_0 = 1.

    Returns (sum, tail_estimate, converged).  Stops after the term magnitude
    stays below rel_stop * |sum| for a few consecutive terms.
    """
    acc = _NeumaierSum(1.0)
    term = 1.0
    absmax = 1.0
    streak = 0
    ratio = 0.0
    for k in range(max_terms):
        ratio = term_ratio(k)
        term *= ratio
        acc.add(term)
        absmax = max(absmax, abs(term))
        if abs(term) < rel_stop * max(abs(acc.total), 1e-300):
            streak += 1
            if streak >= _STOP_STREAK:
                r = min(abs(ratio), 0.999)
                tail = abs(term) * r / (1.0 - r) + 1e-16 * absmax
                return acc.total, tail, True
        else:
            streak = 0
    r = min(abs(ratio), 0.999)
    tail = abs(term) * max(r / (1.0 - r), 1.0) + 1e-16 * absmax
    return acc.total, tail, False


# ---------------------------------------------------------------------------
# 0F1
# ---------------------------------------------------------------------------

# below this the alternating 0F1 series is safe in doubles; beyond, the
# Bessel-J connection avoids catastrophic cancellation
_0F1_NEG_SERIES_MIN = -25.0


def hyp0f1(b: float, z: float) -> EvalResult:
    """Confluent limit function 0F1(; b; z)."""
    if _is_nonpositive_int(b):
        raise PoleError(f"hyp0f1 pole: b = {b}")
    if z >= _0F1_NEG_SERIES_MIN and z <= 900.0:
        s, tail, ok = _sum_series(lambda k: z / ((b + k) * (k + 1)), _MAX_TERMS_1F1)
        return EvalResult(s, tail, STRATEGY_SERIES)
    if z > 900.0:
        # Kummer link keeps the large-argument growth inside exp()
        lnv = -2.0 * math.sqrt(z) + _ln_hyp1f1_pos(b - 0.5, 2.0 * b - 1.0, 4.0 * math.sqrt(z))
        v = math.exp(lnv)
        return EvalResult(v, 1e-12 * abs(v), STRATEGY_TRANSFORMED)
    # z < -25: 0F1(;b;z) = Gamma(b) (-z)^{(1-b)/2} J_{b-1}(2 sqrt(-z))
    nu = b - 1.0
    x = 2.0 * math.sqrt(-z)
    bess = jv(nu, x)
    scale = math.exp(math.lgamma(b) - nu * math.log(math.sqrt(-z)))
    v = scale * float(bess)
    return EvalResult(v, 1e-12 * (abs(v) + scale * 1e-3), STRATEGY_TRANSFORMED)


def _ln_hyp0f1_nonneg(b: float, z: float) -> float:
    """log 0F1(; b; z) for z >= 0, safe for arguments far beyond overflow."""
    if z < 0.0:
        raise DomainError("_ln_hyp0f1_nonneg requires z >= 0")
    if z <= 900.0:
        s, _, _ = _sum_series(lambda k: z / ((b + k) * (k + 1)), _MAX_TERMS_1F1)
        return math.log(s)
    return -2.0 * math.sqrt(z) + _ln_hyp1f1_pos(b - 0.5, 2.0 * b - 1.0, 4.0 * math.sqrt(z))


# ---------------------------------------------------------------------------
# 1F1
# ---------------------------------------------------------------------------

# direct series is fine up to here; above it the sum threatens overflow and
# the large-z asymptotic expansion is already fully converged
_1F1_ASYMPTOTIC_MIN = 600.0
# more negative arguments go through Kummer's transformation
_1F1_NEG_SERIES_MIN = -30.0


def _hyp1f1_series(a: float, b: float, z: float):
    return _sum_series(
        lambda k: (a + k) * z / ((b + k) * (k + 1)), _MAX_TERMS_1F1
    )


def _ln_hyp1f1_asymptotic(a: float, b: float, z: float) -> float:
    """log 1F1(a;b;z) for large positive z via the divergent expansion.

    1F1 ~ Gamma(b)/Gamma(a) e^z z^{a-b} sum_s (b-a)_s (1-a)_s / (s! z^s);
    truncated at the smallest term.
    """
    acc = _NeumaierSum(1.0)
    term = 1.0
    prev = math.inf
    for s in range(60):
        term *= (b - a + s) * (1.0 - a + s) / ((s + 1) * z)
        if abs(term) >= prev:
            break
        acc.add(term)
        prev = abs(term)
        if abs(term) < 1e-17 * abs(acc.total):
            break
    return math.lgamma(b) - math.lgamma(a) + z + (a - b) * math.log(z) + math.log(acc.total)


def _ln_hyp1f1_pos(a: float, b: float, z: float) -> float:
    """log 1F1(a;b;z) for z >= 0 and a, b > 0 (positive-term regime)."""
    if z <= _1F1_ASYMPTOTIC_MIN:
        s, _, _ = _hyp1f1_series(a, b, z)
        return math.log(s)
    return _ln_hyp1f1_asymptotic(a, b, z)


def _ln_hyp1f1(a: float, b: float, z: float) -> float:
    """log 1F1(a;b;z) for a, b > 0 and any real z (value is positive there)."""
    if z >= 0.0:
        return _ln_hyp1f1_pos(a, b, z)
    # Kummer: 1F1(a;b;z) = e^z 1F1(b-a;b;-z)
    return z + _ln_hyp1f1_pos(b - a, b, -z)


def hyp1f1(a: float, b: float, z: float) -> EvalResult:
    """Confluent hypergeometric function 1F1(a; b; z) (Kummer's M)."""
    if _is_nonpositive_int(b):
        raise PoleError(f"hyp1f1 pole: b = {b}")
    if _is_nonpositive_int(a) and a > -1e9:
        # polynomial of degree -a
        n = int(round(-a))
        acc = _NeumaierSum(1.0)
        term = 1.0
        for k in range(n):
            term *= (a + k) * z / ((b + k) * (k + 1))
            acc.add(term)
        return EvalResult(acc.total, 1e-15 * abs(acc.total) * (n + 1), STRATEGY_SERIES)
    if _1F1_NEG_SERIES_MIN <= z <= _1F1_ASYMPTOTIC_MIN:
        s, tail, ok = _hyp1f1_series(a, b, z)
        if ok:
            return EvalResult(s, tail, STRATEGY_SERIES)
    if z > _1F1_ASYMPTOTIC_MIN:
        lnv = _ln_hyp1f1_asymptotic(a, b, z)
        v = math.exp(lnv) if lnv < 709.0 else math.inf
        return EvalResult(v, 1e-11 * abs(v) if math.isfinite(v) else math.inf,
                          STRATEGY_TRANSFORMED)
    # large negative z: Kummer transformation avoids the cancellation
    if b - a > 0.0:
        lnv = z + _ln_hyp1f1_pos(b - a, b, -z)
        v = math.exp(lnv)
        return EvalResult(v, 1e-12 * abs(v), STRATEGY_TRANSFORMED)
    # outside the positive-term regime; raw series is the best on offer
    s2, tail2, _ = _hyp1f1_series(a, b, z)
    return EvalResult(s2, tail2, STRATEGY_SERIES)


# ---------------------------------------------------------------------------
# 2F1
# ---------------------------------------------------------------------------

_2F1_NEAR_ONE = 0.9


def _hyp2f1_series(a: float, b: float, c: float, z: float):
    return _sum_series(
        lambda k: (a + k) * (b + k) * z / ((c + k) * (k + 1)), _MAX_TERMS_2F1
    )


def _gamma_ratio(nums, dens):
    """Product of gammas over product of gammas, with signs, via gammaln."""
    lg = 0.0
    sign = 1.0
    for x in nums:
        lg += gammaln(x)
        sign *= gammasgn(x)
    for x in dens:
        lg -= gammaln(x)
        sign *= gammasgn(x)
    return sign * math.exp(lg)


def _hyp2f1_near_one(a: float, b: float, c: float, z: float):
    """Connection formula in powers of 1-z; needs c-a-b non-integer."""
    d = c - a - b
    u = 1.0 - z
    s1, t1, _ = _hyp2f1_series(a, b, 1.0 - d, u)
    s2, t2, _ = _hyp2f1_series(c - a, c - b, 1.0 + d, u)
    c1 = _gamma_ratio((c, d), (c - a, c - b))
    c2 = _gamma_ratio((c, -d), (a, b))
    v = c1 * s1 + c2 * u ** d * s2
    err = abs(c1) * t1 + abs(c2) * abs(u) ** d * t2 + 1e-15 * abs(v)
    return v, err


def hyp2f1(a: float, b: float, c: float, z: float) -> EvalResult:
    """Gauss hypergeometric function 2F1(a, b; c; z) for real z < 1.

    z < 0 is mapped into [0, 1) by the Pfaff transformation
    (1-z)^{-a} 2F1(a, c-b; c; z/(z-1)); arguments close to 1 use the
    1-z connection formula.
    """
    if _is_nonpositive_int(c):
        raise PoleError(f"hyp2f1 pole: c = {c}")
    if z >= 1.0:
        raise DomainError(f"hyp2f1 requires z < 1, got {z}")
    if z == 0.0:
        return EvalResult(1.0, 0.0, STRATEGY_SERIES)
    if z < 0.0:
        u = z / (z - 1.0)
        v, err = _hyp2f1_mapped(a, c - b, c, u)
        scale = (1.0 - z) ** (-a)
        return EvalResult(scale * v, scale * err, STRATEGY_TRANSFORMED)
    v, err, transformed = _hyp2f1_unit_interval(a, b, c, z)
    strat = STRATEGY_TRANSFORMED if transformed else STRATEGY_SERIES
    return EvalResult(v, err, strat)


def _hyp2f1_unit_interval(a, b, c, z):
    """2F1 on 0 <= z < 1; returns (value, err, used_transformation)."""
    if z <= _2F1_NEAR_ONE:
        s, tail, ok = _hyp2f1_series(a, b, c, z)
        if ok:
            return s, tail, False
    d = c - a - b
    if abs(d - round(d)) > 1e-8:
        v, err = _hyp2f1_near_one(a, b, c, z)
        return v, err, True
    # integer c-a-b: the connection formula degenerates; brute-force series
    s, tail, ok = _hyp2f1_series(a, b, c, z)
    if not ok:
        raise UnsupportedDomainError(
            f"hyp2f1 series not converged for z={z} with integer c-a-b",
            attempted_strategies=(STRATEGY_SERIES,),
        )
    return s, tail, False


def _hyp2f1_mapped(a, b, c, u):
    v, err, _ = _hyp2f1_unit_interval(a, b, c, u)
    return v, err


# ---------------------------------------------------------------------------
# Appell F2
# ---------------------------------------------------------------------------


def _geom_extent(ratio: float, power: float, logtol: float = 45.0, cap: int = F2_SERIES_CAP) -> int:
    """Smallest doubling extent m with m ln(1/r) - max(power,0) ln m > logtol."""
    if ratio <= 1e-12:
        return 16
    lr = -math.log(ratio)
    m = 16
    while m < cap and m * lr - max(power, 0.0) * math.log(m) < logtol:
        m *= 2
    return min(m, cap)


def _f2_series(a, b1, b2, c1, c2, w, z, rel_stop=_REL_STOP):
    """Double series sum_{m,n} (a)_{m+n} (b1)_m (b2)_n w^m z^n / ((c1)_m (c2)_n m! n!).

    Column-vectorised: the n-th column over all m is updated from column n-1
    by one elementwise recurrence.  Returns (value, tail_estimate, converged).
    """
    kpow = a + b1 - c1 + 2.0
    m_cap = _geom_extent(abs(w), kpow)
    for _ in range(3):
        value, tail, ok, row_tail_ok = _f2_series_once(
            a, b1, b2, c1, c2, w, z, m_cap, rel_stop
        )
        if row_tail_ok or m_cap >= F2_SERIES_CAP:
            return value, tail, ok and row_tail_ok
        m_cap = min(2 * m_cap, F2_SERIES_CAP)
    return value, tail, False


def _f2_series_once(a, b1, b2, c1, c2, w, z, m_cap, rel_stop):
    m_idx = np.arange(m_cap, dtype=np.float64)
    # leading column u_m = (a)_m (b1)_m w^m / ((c1)_m m!)
    ratios = (a + m_idx[:-1]) * (b1 + m_idx[:-1]) * w / ((c1 + m_idx[:-1]) * (m_idx[:-1] + 1.0))
    col = np.empty(m_cap)
    col[0] = 1.0
    np.cumprod(ratios, out=col[1:])
    col_sums = [float(np.sum(col))]
    running = col_sums[0]
    cabs = float(np.sum(np.abs(col)))
    prev_abs = max(cabs, 1e-300)
    last_row_abs = abs(col[-1])
    streak = 0
    converged = False
    for n in range(F2_SERIES_CAP):
        col = col * ((a + m_idx + n) * (b2 + n) * z / ((c2 + n) * (n + 1.0)))
        csum = float(np.sum(col))
        prev_abs = max(cabs, 1e-300)
        cabs = float(np.sum(np.abs(col)))
        col_sums.append(csum)
        running += csum
        last_row_abs += abs(col[-1])
        if cabs < rel_stop * max(abs(running), 1e-300):
            streak += 1
            if streak >= _STOP_STREAK:
                converged = True
                break
        else:
            streak = 0
    value = math.fsum(col_sums)
    r = min(cabs / prev_abs, 0.999)
    tail = cabs * r / (1.0 - r) + 1e-15 * abs(value)
    row_tail_ok = last_row_abs <= 1e-12 * max(abs(value), 1e-300)
    return value, tail, converged, row_tail_ok


def _f2_quad_log(a, b1, b2, c1, c2, w, z, abs_tol=1e-10):
    """log of the F2 integral representation, by adaptive quadrature.

    F2 = (1/Gamma(a)) * int_0^inf x^{a-1} e^{-x} 1F1(b1;c1;wx) 1F1(b2;c2;zx) dx,
    convergent for a > 0 when the positive parts of w and z sum below 1.
    The integrand is evaluated in log space and the half-line is mapped to
    (0,1) by x = x0 t/(1-t) with x0 at the integrand's mode.
    """
    rate = 1.0 - max(w, 0.0) - max(z, 0.0)

    def ln_g(x):
        if x <= 0.0:
            return -math.inf
        out = (a - 1.0) * math.log(x) - x
        out += _ln_hyp1f1(b1, c1, w * x)
        out += _ln_hyp1f1(b2, c2, z * x)
        return out

    hi = (a + 200.0) / max(rate, 1e-12)
    grid = np.geomspace(1e-6, max(hi, 10.0), 400)
    vals = np.array([ln_g(float(x)) for x in grid])
    i = int(np.argmax(vals))
    lo = grid[max(i - 1, 0)]
    hi2 = grid[min(i + 1, len(grid) - 1)]
    # golden-section polish of the mode
    gr = (math.sqrt(5.0) - 1.0) / 2.0
    x1 = hi2 - gr * (hi2 - lo)
    x2 = lo + gr * (hi2 - lo)
    f1, f2v = ln_g(x1), ln_g(x2)
    for _ in range(40):
        if f1 < f2v:
            lo = x1
            x1, f1 = x2, f2v
            x2 = lo + gr * (hi2 - lo)
            f2v = ln_g(x2)
        else:
            hi2 = x2
            x2, f2v = x1, f1
            x1 = hi2 - gr * (hi2 - lo)
            f1 = ln_g(x1)
    x0 = 0.5 * (lo + hi2)
    peak = ln_g(x0)

    def h(t):
        x = x0 * t / (1.0 - t)
        lg = ln_g(x)
        if not math.isfinite(lg):
            return 0.0
        return math.exp(lg - peak) * x0 / (1.0 - t) ** 2

    val, quad_err = integrate.quad(h, 0.0, 1.0, epsabs=1e-300, epsrel=1e-11, limit=400)
    if val <= 0.0:
        raise UnsupportedDomainError(
            "F2 quadrature produced a non-positive integral",
            attempted_strategies=(STRATEGY_QUADRATURE,),
        )
    log_f2 = peak + math.log(val) - math.lgamma(a)
    rel_err = quad_err / val + 1e-12
    return log_f2, rel_err


def _appell_f2_impl(a, b1, b2, c1, c2, w, z):
    """Shared core: returns (EvalResult, log_value_or_None)."""
    if _is_nonpositive_int(c1) or _is_nonpositive_int(c2):
        raise PoleError(f"appell_f2 pole: c1 = {c1}, c2 = {c2}")
    attempted = []
    if abs(w) + abs(z) <= F2_SERIES_THRESHOLD:
        value, tail, ok = _f2_series(a, b1, b2, c1, c2, w, z)
        if ok:
            log_v = math.log(value) if value > 0.0 else None
            return EvalResult(value, tail, STRATEGY_SERIES), log_v
        attempted.append(STRATEGY_SERIES)
    if a > 0.0 and max(w, 0.0) + max(z, 0.0) < 1.0:
        log_f2, rel_err = _f2_quad_log(a, b1, b2, c1, c2, w, z)
        value = math.exp(log_f2) if log_f2 < 709.0 else math.inf
        err = rel_err * value if math.isfinite(value) else math.inf
        return EvalResult(value, err, STRATEGY_QUADRATURE), log_f2
    attempted.append(STRATEGY_QUADRATURE)
    raise UnsupportedDomainError(
        f"appell_f2 unsupported for w={w}, z={z} (|w|+|z|={abs(w) + abs(z):.4f}); "
        "series needs |w|+|z| <= 0.95, the integral needs a > 0 and "
        "max(w,0)+max(z,0) < 1",
        attempted_strategies=tuple(attempted),
    )


def _appell_f2_log(a, b1, b2, c1, c2, w, z):
    """(EvalResult, log_value) for F2; the log stays usable when the value
    itself would overflow.  Requires the positive-value regime."""
    res, log_v = _appell_f2_impl(a, b1, b2, c1, c2, w, z)
    if log_v is None:
        raise UnsupportedDomainError(
            "F2 log requested for a non-positive series value",
            attempted_strategies=(res.strategy,),
        )
    return res, log_v


def appell_f2(a: float, b1: float, b2: float, c1: float, c2: float,
              w: float, z: float) -> EvalResult:
    """Appell double hypergeometric function F2(a, b1, b2; c1, c2; w, z).

    Strategy: the double power series inside |w|+|z| <= 0.95, otherwise the
    single-integral representation over (0, inf), which converges whenever
    a > 0 and the positive parts of w and z sum below 1.
    """
    res, _ = _appell_f2_impl(a, b1, b2, c1, c2, w, z)
    return res
