"""Scalar special functions for truncated Poisson variables.

All functions are pure and work in double precision.  The Poisson tail
``q_tail(x, y) = P[Po(x) >= y]`` is the basic building block; everything
else (truncated means, the exponential tilt ``T_z`` and the Cramér rate
function of a sum of (ell+1)-truncated Poisson variables) is expressed
through it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "DomainError",
    "RateFnPoint",
    "X_MAX",
    "Y_MAX",
    "entropy",
    "poisson_pmf",
    "q_tail",
    "rate_fn",
    "rate_fn_boundary",
    "solve_tilt",
    "tilted_mean",
    "trunc_pois_mean",
    "trunc_pois_pmf",
]

X_MAX = 500.0
Y_MAX = 10**6

# relative size at which a summed Poisson term is considered negligible
_TERM_EPS = 1e-20
# exp() underflows below this
_LOG_UNDERFLOW = -745.0


class DomainError(ValueError):
    """Argument outside the domain on which a kernel is defined."""


@dataclass(frozen=True)
class RateFnPoint:
    z: float
    t_z: float
    value: float


def _check_x(x: float) -> None:
    if not (x >= 0.0) or x > X_MAX:
        raise DomainError(f"Poisson parameter must lie in [0, {X_MAX}], got {x!r}")


def _check_y(y: int) -> None:
    if int(y) != y or y < 1 or y > Y_MAX:
        raise DomainError(f"tail cutoff must be an integer in [1, {Y_MAX}], got {y!r}")


def _check_trunc(lam: float, ell: int) -> None:
    if not (lam > 0.0) or lam > X_MAX:
        raise DomainError(f"lambda must lie in (0, {X_MAX}], got {lam!r}")
    if int(ell) != ell or ell < 1:
        raise DomainError(f"ell must be an integer >= 1, got {ell!r}")


def _pmf(x: float, j: int) -> float:
    # e^{-x} x^j / j! by a running product; the product never underflows
    # before its peak because e^{-x} >= e^{-500}
    if x == 0.0:
        return 1.0 if j == 0 else 0.0
    if j > 2000 or -x + j * math.log(x) - math.lgamma(j + 1) < _LOG_UNDERFLOW:
        log_p = -x + j * math.log(x) - math.lgamma(j + 1)
        return math.exp(log_p) if log_p > _LOG_UNDERFLOW else 0.0
    term = math.exp(-x)
    for i in range(1, j + 1):
        term *= x / i
    return term


def poisson_pmf(x: float, j: int) -> float:
    """P[Po(x) = j]."""
    _check_x(x)
    if j < 0:
        return 0.0
    return _pmf(x, int(j))


def _q(x: float, y: int) -> float:
    if x == 0.0:
        return 0.0
    if x < y:
        # the tail is the smaller side: sum it directly, all terms positive
        term = _pmf(x, y)
        if term == 0.0:
            return 0.0
        total = term
        j = y
        while term > _TERM_EPS * total:
            j += 1
            term *= x / j
            total += term
        return total
    # y <= x: the head P[Po(x) <= y-1] is at most about one half, so
    # 1 - head loses no more than a couple of bits
    return 1.0 - _head(x, y)


def _head(x: float, y: int) -> float:
    # P[Po(x) <= y-1] summed downward from j = y-1; accurate for y <= x
    term = _pmf(x, y - 1)
    total = term
    j = y - 1
    while j > 0 and term > _TERM_EPS * total:
        term *= j / x
        j -= 1
        total += term
    return total


def _log_q(x: float, y: int) -> float:
    """ln Q(x, y), keeping full relative accuracy when Q is close to 1."""
    if x < y:
        return math.log(_q(x, y))
    return math.log1p(-_head(x, y))


def q_tail(x: float, y: int) -> float:
    """Return ``Q(x, y) = 1 - e^{-x} sum_{j<y} x^j/j!``, i.e. P[Po(x) >= y].

    Whichever of the head and the tail is the smaller probability mass is
    summed directly, so the result keeps full relative precision even when
    it is tiny (small x, large y) or close to one.
    """
    _check_x(x)
    _check_y(y)
    return _q(float(x), int(y))


def _mean(x: float, ell: int) -> float:
    # x Q(x, ell) / Q(x, ell+1) written as x + x P[Po(x)=ell] / Q(x, ell+1):
    # both pieces are positive, so no cancellation near x -> 0
    return x + x * _pmf(x, ell) / _q(x, ell + 1)


def tilted_mean(x: float, ell: int) -> float:
    """``x Q(x, ell) / Q(x, ell+1)``, the mean of Po(x) conditioned on >= ell+1.

    Strictly increasing in x, with limit ell+1 as x -> 0.
    """
    if not (x > 0.0) or x > X_MAX:
        raise DomainError(f"x must lie in (0, {X_MAX}], got {x!r}")
    if int(ell) != ell or ell < 1:
        raise DomainError(f"ell must be an integer >= 1, got {ell!r}")
    return _mean(float(x), int(ell))


def trunc_pois_mean(lam: float, ell: int) -> float:
    """Mean of a Poisson(lam) variable conditioned on being at least ell+1."""
    _check_trunc(lam, ell)
    return _mean(float(lam), int(ell))


def trunc_pois_pmf(j: int, lam: float, ell: int) -> float:
    """P[X = j] for X ~ Po(lam) conditioned on X >= ell+1."""
    _check_trunc(lam, ell)
    if j < ell + 1:
        return 0.0
    return _pmf(lam, int(j)) / _q(lam, ell + 1)


def solve_tilt(z: float, ell: int) -> float:
    """Return T with ``T Q(T, ell)/Q(T, ell+1) = z`` for z > ell+1.

    Plain bisection: the left-hand side is strictly increasing in T and
    tends to ell+1 as T -> 0, so the root is unique and a bracket always
    exists.  The bracket starts at [1e-9, max(z, 1)] and its lower end is
    shrunk geometrically when z is very close to ell+1.
    """
    if int(ell) != ell or ell < 1:
        raise DomainError(f"ell must be an integer >= 1, got {ell!r}")
    ell = int(ell)
    if not (z > ell + 1):
        raise DomainError(f"tilt equation needs z > ell+1 = {ell + 1}, got {z!r}")
    lo, hi = 1e-9, max(float(z), 1.0)
    if hi > X_MAX:
        raise DomainError(f"z = {z!r} needs a tilt beyond the kernel cap {X_MAX}")
    while _mean(lo, ell) > z:
        lo *= 1e-3
        if lo < 1e-290:
            raise DomainError(f"z = {z!r} is numerically indistinguishable from ell+1")
    # _mean(hi) > hi >= z, so [lo, hi] brackets the root
    for _ in range(2000):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if _mean(mid, ell) < z:
            lo = mid
        else:
            hi = mid
    return lo if abs(_mean(lo, ell) - z) <= abs(_mean(hi, ell) - z) else hi


def rate_fn_boundary(lam: float, ell: int) -> float:
    """Closed form of the rate function at z = ell+1.

    ``ln (ell+1)! - (ell+1) ln lam + lam + ln Q(lam, ell+1)``, which equals
    ``-ln P[X = ell+1]`` for the (ell+1)-truncated Poisson variable X.
    """
    _check_trunc(lam, ell)
    ell = int(ell)
    return (
        math.lgamma(ell + 2)
        - (ell + 1) * math.log(lam)
        + lam
        + math.log(_q(lam, ell + 1))
    )


def rate_fn(z: float, lam: float, ell: int) -> RateFnPoint:
    """Rate function of a sum of (ell+1)-truncated Po(lam) variables at z.

    For z > ell+1::

        I(z) = z (ln T_z - ln lam) - T_z + lam - ln Q(T_z, ell+1) + ln Q(lam, ell+1)

    with ``T_z = solve_tilt(z, ell)``.  At z == ell+1 the closed-form limit
    is returned with ``t_z = 0``.  The function is convex with its zero at
    the truncated mean; it is returned for every z >= ell+1, but it bounds
    lower-tail probabilities only for z up to that mean.
    """
    _check_trunc(lam, ell)
    ell = int(ell)
    if z < ell + 1:
        raise DomainError(f"rate function needs z >= ell+1 = {ell + 1}, got {z!r}")
    if z == ell + 1:
        return RateFnPoint(float(z), 0.0, rate_fn_boundary(lam, ell))
    t = solve_tilt(z, ell)
    value = (
        z * (math.log(t) - math.log(lam))
        - t
        + lam
        - math.log(_q(t, ell + 1))
        + math.log(_q(lam, ell + 1))
    )
    return RateFnPoint(float(z), t, value)


def entropy(x: float) -> float:
    """Natural-log binary entropy, extended by 0 at x = 0 and x = 1."""
    if not (0.0 <= x <= 1.0):
        raise DomainError(f"entropy needs 0 <= x <= 1, got {x!r}")
    if x == 0.0 or x == 1.0:
        return 0.0
    return -x * math.log(x) - (1.0 - x) * math.log1p(-x)
