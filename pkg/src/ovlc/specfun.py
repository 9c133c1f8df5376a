"""Scalar special-function and adaptive-quadrature kernel.

Everything the statistical layers need and nothing more: the gamma
function on the positive axis, the modified Bessel function of the
second kind K_nu with real (fractional) order, a pole-guarded cosecant,
and adaptive Gauss-Kronrod integration with a declared change of
variables for semi-infinite upper limits.

All functions are pure and stateless; out-of-range results are raised
as typed errors rather than returned as silent infinities, and Bessel
underflow is surfaced through an explicit status flag.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

__all__ = [
    "SpecfunError",
    "DomainError",
    "RangeOverflowError",
    "PoleProximityError",
    "QuadratureError",
    "QuadratureSpec",
    "DEFAULT_QUADRATURE",
    "IntegralEstimate",
    "KEval",
    "gamma_fn",
    "bessel_k",
    "bessel_k_checked",
    "csc_guarded",
    "integrate",
    "integrate_adaptive_simpson",
]

_EPS = 2.220446049250313e-16
_MIN_NORMAL = 2.2250738585072014e-308
_MAXIT = 10000


class SpecfunError(Exception):
    """Base class for kernel failures."""


class DomainError(SpecfunError, ValueError):
    """Argument outside the supported domain."""


class RangeOverflowError(SpecfunError, OverflowError):
    """Result exceeds the representable double range (never silently inf)."""


class PoleProximityError(SpecfunError, ArithmeticError):
    """Evaluation point too close to a pole for a meaningful value."""


class QuadratureError(SpecfunError, RuntimeError):
    """Adaptive integration failed to converge; carries the best estimate."""

    def __init__(self, message: str, estimate: float, error_estimate: float):
        super().__init__(message)
        self.estimate = estimate
        self.error_estimate = error_estimate


# ---------------------------------------------------------------------------
# gamma


def gamma_fn(x: float) -> float:
    """Gamma function for strictly positive real arguments.

    Raises DomainError for x <= 0 and RangeOverflowError once the result
    leaves the double range (x > ~171.6).
    """
    if not x > 0.0:  # also rejects NaN
        raise DomainError(f"gamma_fn requires x > 0, got {x!r}")
    try:
        return math.gamma(x)
    except OverflowError as exc:
        raise RangeOverflowError(f"gamma_fn({x}) exceeds double range") from exc


# ---------------------------------------------------------------------------
# modified Bessel function of the second kind, real order


class KEval(NamedTuple):
    value: float
    underflow: bool


def _gamma1(mu: float) -> float:
    """(1/Gamma(1-mu) - 1/Gamma(1+mu)) / (2 mu), continuous through mu = 0.

    The difference quotient cancels catastrophically for small mu, so an
    even Taylor series takes over below 1e-3 (coefficients are the odd
    Taylor coefficients of 1/Gamma(1+z); truncation error < 1e-19 there).
    """
    if abs(mu) < 1e-3:
        mu2 = mu * mu
        return -0.5772156649015329 + mu2 * (0.042002635034095236 + mu2 * 0.042197734555544337)
    return (1.0 / math.gamma(1.0 - mu) - 1.0 / math.gamma(1.0 + mu)) / (2.0 * mu)


def _gamma2(mu: float) -> float:
    """(1/Gamma(1-mu) + 1/Gamma(1+mu)) / 2; no cancellation, direct."""
    return 0.5 * (1.0 / math.gamma(1.0 - mu) + 1.0 / math.gamma(1.0 + mu))


def _k_temme(mu: float, x: float) -> tuple[float, float]:
    """K_mu(x) and K_{mu+1}(x) for x <= 2, |mu| <= 1/2, by Temme's series.

    Uniformly valid through mu = 0, which is what makes near-integer
    orders safe after the argument reduction in bessel_k.
    """
    x2 = 0.5 * x
    mu2 = mu * mu
    pimu = math.pi * mu
    fact = 1.0 if abs(pimu) < _EPS else pimu / math.sin(pimu)
    d = -math.log(x2)
    e = mu * d
    fact2 = 1.0 if abs(e) < _EPS else math.sinh(e) / e
    ff = fact * (_gamma1(mu) * math.cosh(e) + _gamma2(mu) * fact2 * d)
    ksum = ff
    p = 0.5 * math.exp(e) * math.gamma(1.0 + mu)
    q = 0.5 * math.exp(-e) * math.gamma(1.0 - mu)
    c = 1.0
    d2 = x2 * x2
    ksum1 = p
    for i in range(1, _MAXIT + 1):
        ff = (i * ff + p + q) / (i * i - mu2)
        c *= d2 / i
        p /= i - mu
        q /= i + mu
        delta = c * ff
        ksum += delta
        ksum1 += c * (p - i * ff)
        if abs(delta) < abs(ksum) * _EPS:
            break
    else:
        raise SpecfunError("bessel_k series failed to converge")
    return ksum, ksum1 * (2.0 / x)


def _k_steed(mu: float, x: float) -> tuple[float, float]:
    """K_mu(x) and K_{mu+1}(x) for x > 2 via Steed's continued fraction."""
    mu2 = mu * mu
    b = 2.0 * (1.0 + x)
    d = 1.0 / b
    h = delh = d
    q1 = 0.0
    q2 = 1.0
    a1 = 0.25 - mu2
    q = c = a1
    a = -a1
    s = 1.0 + q * delh
    for i in range(2, _MAXIT + 1):
        a -= 2 * (i - 1)
        c = -a * c / i
        qnew = (q1 - b * q2) / a
        q1 = q2
        q2 = qnew
        q += c * qnew
        b += 2.0
        d = 1.0 / (b + a * d)
        delh = (b * d - 1.0) * delh
        h += delh
        dels = q * delh
        s += dels
        if abs(dels / s) < _EPS:
            break
    else:
        raise SpecfunError("bessel_k continued fraction failed to converge")
    h = a1 * h
    kmu = math.sqrt(math.pi / (2.0 * x)) * math.exp(-x) / s
    kmu1 = kmu * (mu + x + 0.5 - h) / x
    return kmu, kmu1


def bessel_k_checked(nu: float, x: float) -> KEval:
    """K_nu(x) with an explicit underflow flag.

    The order is symmetrised at entry (K_nu = K_{-nu}) and reduced to
    |mu| <= 1/2 plus an integer count of stable upward recurrences.
    Underflow to zero (deep in the exponential tail) is permitted and
    flagged; overflow raises.
    """
    if not x > 0.0:
        raise DomainError(f"bessel_k requires x > 0, got {x!r}")
    nu = abs(nu)
    if nu > 40.0:
        raise DomainError(f"bessel_k supports |nu| <= 40, got {nu!r}")
    n = int(math.floor(nu + 0.5))
    mu = nu - n
    kmu, kmu1 = _k_temme(mu, x) if x <= 2.0 else _k_steed(mu, x)
    for j in range(1, n):
        kmu, kmu1 = kmu1, kmu + (2.0 * (mu + j) / x) * kmu1
        if kmu1 > 1e306:
            raise RangeOverflowError(f"bessel_k({nu}, {x}) exceeds double range")
    value = kmu1 if n > 0 else kmu
    if math.isinf(value):
        raise RangeOverflowError(f"bessel_k({nu}, {x}) exceeds double range")
    return KEval(value, value < _MIN_NORMAL)


def bessel_k(nu: float, x: float) -> float:
    """K_nu(x); see bessel_k_checked for the status-carrying variant."""
    return bessel_k_checked(nu, x).value


# ---------------------------------------------------------------------------
# guarded cosecant


def csc_guarded(x: float, pole_epsilon: float = 1e-9) -> float:
    """1/sin(x), refusing evaluation within pole_epsilon of any multiple of pi."""
    if not pole_epsilon > 0.0:
        raise DomainError(f"pole_epsilon must be positive, got {pole_epsilon!r}")
    k = round(x / math.pi)
    if abs(x - k * math.pi) <= pole_epsilon:
        raise PoleProximityError(f"csc({x}) is within {pole_epsilon} of the pole at {k}*pi")
    return 1.0 / math.sin(x)


# ---------------------------------------------------------------------------
# adaptive Gauss-Kronrod quadrature


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerances and budget for adaptive integration."""

    abs_tolerance: float = 1e-10
    rel_tolerance: float = 1e-9
    max_subdivisions: int = 512
    infinite_tail_transform: bool = True

    def __post_init__(self):
        if not self.abs_tolerance > 0.0:
            raise DomainError("abs_tolerance must be strictly positive")
        if not self.rel_tolerance > 0.0:
            raise DomainError("rel_tolerance must be strictly positive")
        if self.max_subdivisions < 1:
            raise DomainError("max_subdivisions must be >= 1")


DEFAULT_QUADRATURE = QuadratureSpec()


class IntegralEstimate(NamedTuple):
    value: float
    error_estimate: float


# 15-point Kronrod extension of 7-point Gauss; nodes/weights on [-1, 1].
_XGK = (
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
)
_WGK = (
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
)
_WG = (
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
)


def _gk15(f: Callable[[float], float], a: float, b: float) -> tuple[float, float]:
    """One Gauss-Kronrod 7/15 panel: (integral, error estimate)."""
    center = 0.5 * (a + b)
    half = 0.5 * (b - a)
    fc = f(center)
    resk = _WGK[7] * fc
    resg = _WG[3] * fc
    resabs = _WGK[7] * abs(fc)
    fvals = [fc]
    for j in range(7):
        dx = _XGK[j] * half
        f1 = f(center - dx)
        f2 = f(center + dx)
        fvals.append(f1)
        fvals.append(f2)
        resk += _WGK[j] * (f1 + f2)
        resabs += _WGK[j] * (abs(f1) + abs(f2))
        if j % 2 == 1:
            resg += _WG[j // 2] * (f1 + f2)
    mean = 0.5 * resk
    resasc = _WGK[7] * abs(fc - mean)
    idx = 1
    for j in range(7):
        resasc += _WGK[j] * (abs(fvals[idx] - mean) + abs(fvals[idx + 1] - mean))
        idx += 2
    value = resk * half
    resasc *= abs(half)
    err = abs((resk - resg) * half)
    if resasc != 0.0 and err != 0.0:
        err = resasc * min(1.0, (200.0 * err / resasc) ** 1.5)
    err = max(err, 50.0 * _EPS * resabs * abs(half))
    if not math.isfinite(value):
        raise QuadratureError(f"integrand is not finite inside [{a}, {b}]", value, math.inf)
    return value, err


def integrate(
    f: Callable[[float], float],
    lower: float,
    upper: float,
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
) -> IntegralEstimate:
    """Adaptive Gauss-Kronrod integral of f over [lower, upper].

    ``upper`` may be ``math.inf``; the tail is then folded onto [0, 1)
    through x = lower + t/(1-t) (enabled by spec.infinite_tail_transform).
    Nodes never touch interval endpoints, so integrable endpoint
    singularities such as x**(p-1), p > 0, are admissible.

    Returns (value, error_estimate); raises QuadratureError carrying the
    best estimate if max_subdivisions is exhausted first.
    """
    if math.isnan(lower) or math.isnan(upper):
        raise DomainError("integration limits must not be NaN")
    if math.isinf(lower):
        raise DomainError("lower limit must be finite")
    if upper == lower:
        return IntegralEstimate(0.0, 0.0)
    if upper < lower:
        raise DomainError(f"upper limit {upper!r} below lower limit {lower!r}")
    if math.isinf(upper):
        if not spec.infinite_tail_transform:
            raise DomainError("infinite upper limit requires infinite_tail_transform")
        a = lower

        def g(t: float) -> float:
            w = 1.0 - t
            return f(a + t / w) / (w * w)

        return integrate(g, 0.0, 1.0, spec)

    val, err = _gk15(f, lower, upper)
    # heap of (-error, tiebreak, a, b, value, error); totals kept incrementally
    heap = [(-err, 0, lower, upper, val, err)]
    total_val = val
    total_err = err
    counter = 1
    width_floor = _EPS * max(abs(lower), abs(upper), 1.0)
    for _ in range(spec.max_subdivisions):
        if total_err <= max(spec.abs_tolerance, spec.rel_tolerance * abs(total_val)):
            return IntegralEstimate(total_val, total_err)
        if not heap:
            break
        _, _, a, b, val, err = heapq.heappop(heap)
        if (b - a) <= width_floor:
            continue  # cannot refine further; its error stays on the books
        mid = 0.5 * (a + b)
        val_l, err_l = _gk15(f, a, mid)
        val_r, err_r = _gk15(f, mid, b)
        total_val += val_l + val_r - val
        total_err += err_l + err_r - err
        heapq.heappush(heap, (-err_l, counter, a, mid, val_l, err_l))
        heapq.heappush(heap, (-err_r, counter + 1, mid, b, val_r, err_r))
        counter += 2
    if total_err <= max(spec.abs_tolerance, spec.rel_tolerance * abs(total_val)):
        return IntegralEstimate(total_val, total_err)
    raise QuadratureError(
        f"integral did not converge within {spec.max_subdivisions} subdivisions "
        f"(estimate {total_val!r}, error {total_err!r})",
        total_val,
        total_err,
    )


def integrate_adaptive_simpson(
    f: Callable[[float], float],
    lower: float,
    upper: float,
    tol: float = 1e-10,
    max_depth: int = 60,
) -> float:
    """Adaptive Simpson integration: an independent second rule.

    Deliberately shares no code with the Gauss-Kronrod path so the two
    can cross-check each other. Accepts ``math.inf`` as the upper limit
    through the same t/(1-t) fold; unlike the Kronrod nodes, Simpson
    samples the endpoints, so the folded integrand is taken as 0 at
    t = 1 (valid whenever f decays faster than 1/x^2).
    """
    if math.isinf(upper):
        a = lower

        def g(t: float) -> float:
            w = 1.0 - t
            if w == 0.0:
                return 0.0
            return f(a + t / w) / (w * w)

        return integrate_adaptive_simpson(g, 0.0, 1.0, tol=tol, max_depth=max_depth)

    def simpson(fa: float, fm: float, fb: float, h: float) -> float:
        return h / 6.0 * (fa + 4.0 * fm + fb)

    def recurse(a: float, b: float, fa: float, fm: float, fb: float, whole: float, eps: float, depth: int) -> float:
        m = 0.5 * (a + b)
        lm = 0.5 * (a + m)
        rm = 0.5 * (m + b)
        flm = f(lm)
        frm = f(rm)
        left = simpson(fa, flm, fm, m - a)
        right = simpson(fm, frm, fb, b - m)
        delta = left + right - whole
        if depth <= 0 or abs(delta) <= 15.0 * eps:
            return left + right + delta / 15.0
        half = 0.5 * eps
        return recurse(a, m, fa, flm, fm, left, half, depth - 1) + recurse(
            m, b, fm, frm, fb, right, half, depth - 1
        )

    if upper == lower:
        return 0.0
    m0 = 0.5 * (lower + upper)
    fa, fm, fb = f(lower), f(m0), f(upper)
    whole = simpson(fa, fm, fb, upper - lower)
    return recurse(lower, upper, fa, fm, fb, whole, tol, max_depth)
