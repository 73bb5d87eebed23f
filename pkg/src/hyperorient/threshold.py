"""Fixed-point equations for the ell-orientability threshold.

For k-uniform hypergraphs with edge density c the (ell+1)-core is governed
by the largest root of ``x = Q(x c k, ell)^{k-1}``; writing ``xi = x c k``
the core has ``Q(xi, ell+1) n`` vertices and average degree
``xi Q(xi, ell) / Q(xi, ell+1)``.  The orientability threshold is the
density at which that average degree reaches ``k ell``.

All root finding is bracketed (bisection or golden-section), relying on the
monotonicity of ``x -> x Q(x, ell)/Q(x, ell+1)`` and the unimodality of
``x -> x / Q(x, ell)^{k-1}``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .numeric import DomainError, X_MAX, _log_q, _mean, _pmf, _q

__all__ = [
    "CorePrediction",
    "OrientParams",
    "ThresholdResult",
    "c_star",
    "core_emergence",
    "core_prediction",
    "fixed_point_trajectory",
    "lambda_core_threshold",
    "solve_xi_star",
    "xi_gap",
]

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class OrientParams:
    k: int
    ell: int

    def __post_init__(self):
        if int(self.k) != self.k or self.k < 3:
            raise DomainError(f"edge size k must be an integer >= 3, got {self.k!r}")
        if int(self.ell) != self.ell or self.ell < 2:
            raise DomainError(f"capacity ell must be an integer >= 2, got {self.ell!r}")
        if self.k * self.ell > X_MAX:
            raise DomainError(
                f"k*ell = {self.k * self.ell} exceeds the supported maximum {int(X_MAX)}"
            )


@dataclass(frozen=True)
class ThresholdResult:
    k: int
    ell: int
    xi_star: float
    c_star: float
    # k*ell - xi_star, computed without cancellation
    gap: float
    residual_xi: float
    lambda_core: float
    core_argmin: float
    iterations: int


@dataclass(frozen=True)
class CorePrediction:
    k: int
    ell: int
    c: float
    exists: bool
    xi: float = 0.0
    x_bar: float = 0.0
    n_frac: float = 0.0
    m_per_n: float = 0.0
    density: float = 0.0
    iterations: int = 0


def _params(k, ell) -> OrientParams:
    return k if isinstance(k, OrientParams) else OrientParams(k, ell)


def _bisect_increasing(fn, target, lo, hi, max_iter=2000):
    """Root of an increasing function on [lo, hi]; returns (root, iterations)."""
    it = 0
    while it < max_iter:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        it += 1
        if fn(mid) < target:
            lo = mid
        else:
            hi = mid
    root = lo if abs(fn(lo) - target) <= abs(fn(hi) - target) else hi
    return root, it


def _solve_xi_star(p: OrientParams) -> tuple[float, int]:
    kl = float(p.k * p.ell)
    lo, hi = 1e-9, kl
    # the conditioned mean exceeds its argument, so hi = k*ell already
    # brackets; grow it anyway for safety
    while _mean(hi, p.ell) < kl:
        hi *= 2.0
    return _bisect_increasing(lambda x: _mean(x, p.ell), kl, lo, hi)


def solve_xi_star(k, ell=None) -> float:
    """Unique root of ``k ell = xi Q(xi, ell) / Q(xi, ell+1)``."""
    return _solve_xi_star(_params(k, ell))[0]


def xi_gap(xi: float, ell: int) -> float:
    """``xi Q(xi, ell)/Q(xi, ell+1) - xi`` evaluated without cancellation.

    At ``xi = xi_star`` this is ``k ell - xi_star``, which for large k*ell
    is far below the spacing of doubles near k*ell.
    """
    return xi * _pmf(xi, ell) / _q(xi, ell + 1)


def _core_fn(x: float, k: int, ell: int) -> float:
    return x / _q(x, ell) ** (k - 1)


def _core_slope_sign(x: float, k: int, ell: int) -> float:
    # sign of d/dx [x / Q(x,ell)^{k-1}] is the sign of Q - (k-1) x P[Po(x)=ell-1]
    return _q(x, ell) - (k - 1) * x * _pmf(x, ell - 1)


def core_emergence(k, ell=None) -> tuple[float, float]:
    """Return ``(argmin, min)`` of ``F(x) = x / Q(x, ell)^{k-1}`` over x > 0.

    The minimum is the average-degree threshold ``lambda_{k,ell+1}`` above
    which a non-empty (ell+1)-core appears.  F is unimodal: golden-section
    search narrows the bracket, then the first-order condition
    ``Q(x, ell) = (k-1) x P[Po(x) = ell-1]`` is bisected to full precision
    (function values alone cannot resolve the minimiser past ~1e-8).
    """
    p = _params(k, ell)
    lo, hi = 1e-6, max(1.0, float(p.ell))
    while _core_slope_sign(hi, p.k, p.ell) <= 0.0:
        hi *= 2.0
    while _core_slope_sign(lo, p.k, p.ell) >= 0.0:
        lo *= 0.5
    a, b = lo, hi
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = _core_fn(c, p.k, p.ell), _core_fn(d, p.k, p.ell)
    while b - a > 1e-6 * b:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = _core_fn(c, p.k, p.ell)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = _core_fn(d, p.k, p.ell)
    # widen slightly so the bracket certainly straddles the sign change
    a, b = max(a * (1 - 1e-4), lo), min(b * (1 + 1e-4), hi)
    while _core_slope_sign(a, p.k, p.ell) >= 0.0:
        a *= 0.99
    while _core_slope_sign(b, p.k, p.ell) <= 0.0:
        b *= 1.01
    x_min, _ = _bisect_increasing(lambda x: _core_slope_sign(x, p.k, p.ell), 0.0, a, b)
    return x_min, _core_fn(x_min, p.k, p.ell)


def lambda_core_threshold(k, ell=None) -> float:
    """``lambda_{k,ell+1} = min_{x>0} x / Q(x, ell)^{k-1}``."""
    return core_emergence(k, ell)[1]


def c_star(k, ell=None) -> ThresholdResult:
    """Orientability threshold ``c* = xi* / (k Q(xi*, ell)^{k-1})``."""
    p = _params(k, ell)
    xi, iterations = _solve_xi_star(p)
    kl = p.k * p.ell
    residual = abs(kl - _mean(xi, p.ell))
    if residual > 1e-10 * kl:
        raise ArithmeticError(f"xi* residual {residual:g} above tolerance for {p}")
    x_min, lam = core_emergence(p)
    gap = xi_gap(xi, p.ell)
    # c* = ell (1 - gap/(k ell)) / Q^{k-1}, written so that values within an
    # ulp of ell come out on the right side of it
    c = p.ell * math.exp(math.log1p(-gap / kl) - (p.k - 1) * _log_q(xi, p.ell))
    return ThresholdResult(
        k=p.k,
        ell=p.ell,
        xi_star=xi,
        c_star=c,
        gap=gap,
        residual_xi=residual,
        lambda_core=lam,
        core_argmin=x_min,
        iterations=iterations,
    )


def fixed_point_trajectory(k, ell, c: float, steps: int) -> list[float]:
    """First ``steps`` iterates of ``x <- Q(x c k, ell)^{k-1}`` from x = 1."""
    p = _params(k, ell)
    ck = c * p.k
    xs = [1.0]
    x = 1.0
    for _ in range(steps):
        x = _q(min(x * ck, X_MAX), p.ell) ** (p.k - 1)
        xs.append(x)
    return xs


def core_prediction(k, ell, c: float, max_iter: int = 1000) -> CorePrediction:
    """Predicted (ell+1)-core of a random k-graph with edge density c.

    ``x_bar`` is the largest root of ``x = Q(x c k, ell)^{k-1}``.  The
    fixed-point iteration from x = 1 decreases monotonically towards it
    (checked at every step); it converges slowly near the emergence point,
    so after at most ``max_iter`` steps the current iterate is used as the
    upper end of a bisection on the increasing branch of ``F``.
    """
    p = _params(k, ell)
    if not (c > 0.0):
        raise DomainError(f"edge density must be positive, got {c!r}")
    ck = c * p.k
    x_min, lam = core_emergence(p)
    if ck <= lam + 1e-12:
        return CorePrediction(p.k, p.ell, float(c), exists=False)
    if ck > X_MAX:
        raise DomainError(f"c*k = {ck} exceeds the kernel cap {X_MAX}")

    x = 1.0
    it = 0
    for it in range(1, max_iter + 1):
        nxt = _q(x * ck, p.ell) ** (p.k - 1)
        if nxt > x:
            raise ArithmeticError(f"fixed-point iteration increased at step {it}")
        if x - nxt <= 1e-15:
            x = nxt
            break
        x = nxt
    # the root xi = x_bar*ck solves F(xi) = ck on the increasing branch
    # [x_min, x*ck]; the iterate stays above the largest root throughout
    hi = max(x * ck, x_min)
    xi, _ = _bisect_increasing(lambda t: _core_fn(t, p.k, p.ell), ck, x_min, hi)
    x_bar = xi / ck
    resid = abs(x_bar - _q(xi, p.ell) ** (p.k - 1))
    if resid > 1e-12:
        raise ArithmeticError(f"largest-root residual {resid:g} above tolerance")
    probe = x_bar + 1e-6
    if probe <= 1.0 and _q(min(probe * ck, X_MAX), p.ell) ** (p.k - 1) > probe:
        raise ArithmeticError("a fixed point above x_bar exists")
    n_frac = _q(xi, p.ell + 1)
    density = _mean(xi, p.ell) / p.k
    return CorePrediction(
        k=p.k,
        ell=p.ell,
        c=float(c),
        exists=True,
        xi=xi,
        x_bar=x_bar,
        n_frac=n_frac,
        m_per_n=n_frac * density,
        density=density,
        iterations=it,
    )
