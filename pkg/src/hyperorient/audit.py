"""Numerical audit of the inequalities behind the orientability threshold.

Every check is an :class:`AuditRow`: a claim id, the (k, ell) pair, the
grid point, the computed value and the bound it is compared against.  A
row passes when ``value < bound`` for upper-bound claims and
``value > bound`` for lower-bound claims (``LOWER_BOUND_CLAIMS``).

The function audited most is

    f(beta, q) = (ell+1) H(beta) + ell (1-beta) ln(2^k - 1) - k ell H(q)
                 - (1-beta) I_{xi*}(k ell (1-q) / (1-beta)),

the exponent of the expected number of vertex sets of size beta*N and
degree share q in the core that are maximal ell-dense.  It is evaluated on
``beta <= q <= 1 - (ell+1)(1-beta)/(k ell)``, the admissible window
(for larger q the set cannot have the minimum degree ell+1).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .numeric import DomainError, entropy, rate_fn, rate_fn_boundary, solve_tilt
from .threshold import OrientParams, c_star

__all__ = [
    "AuditReport",
    "AuditRow",
    "LOWER_BOUND_CLAIMS",
    "df_dq",
    "e_kl",
    "f_critical_point",
    "f_diagonal_closed_form",
    "f_value",
    "fcrit_value",
    "first_moment_exponent",
    "h_value",
    "q_upper",
    "run_audit",
    "t_kl",
    "write_audit_csv",
    "xi_bounds_audit",
    "xi_lower_bound_derived",
    "xi_lower_bound_printed",
]

LOWER_BOUND_CLAIMS = frozenset({"gap_positive", "ekl_lower", "ekl_positive"})

# the grid of (k, ell) pairs audited by default
DEFAULT_K = range(3, 11)
DEFAULT_ELL = range(2, 11)
# tighter grid for the beta-dependent audits
BETA_K = range(3, 7)
BETA_ELL = range(2, 5)


@lru_cache(maxsize=None)
def _threshold(k: int, ell: int):
    return c_star(OrientParams(k, ell))


def _p(k, ell) -> OrientParams:
    return k if isinstance(k, OrientParams) else OrientParams(int(k), int(ell))


def q_upper(k: int, ell: int, beta: float) -> float:
    """Largest admissible degree share: ``1 - (ell+1)(1-beta)/(k ell)``."""
    return 1.0 - (ell + 1) * (1.0 - beta) / (k * ell)


def _check_window(p: OrientParams, beta: float, q: float, tol: float = 1e-12) -> None:
    if not 0.0 < beta < 1.0:
        raise DomainError(f"beta must lie in (0, 1), got {beta!r}")
    hi = q_upper(p.k, p.ell, beta)
    if not beta - tol <= q <= hi + tol:
        raise DomainError(f"q = {q!r} outside the admissible window [{beta}, {hi}]")


def _rate_at(p: OrientParams, z: float) -> float:
    xi = _threshold(p.k, p.ell).xi_star
    # z equals ell+1 on the upper window edge, up to rounding
    if z <= p.ell + 1 + 1e-12:
        return rate_fn_boundary(xi, p.ell)
    return rate_fn(z, xi, p.ell).value


def f_value(k, ell, beta: float, q: float) -> float:
    """Exponent f(beta, q) on the admissible window."""
    p = _p(k, ell)
    _check_window(p, beta, q)
    kl = p.k * p.ell
    z = kl * (1.0 - q) / (1.0 - beta)
    return (
        (p.ell + 1) * entropy(beta)
        + p.ell * (1.0 - beta) * math.log(2.0**p.k - 1.0)
        - kl * entropy(min(max(q, 0.0), 1.0))
        - (1.0 - beta) * _rate_at(p, z)
    )


def f_diagonal_closed_form(k, ell, beta: float) -> float:
    """f(beta, beta) = -(k ell - ell - 1) H(beta) + ell (1-beta) ln(2^k - 1)."""
    p = _p(k, ell)
    return -(p.k * p.ell - p.ell - 1) * entropy(beta) + p.ell * (1.0 - beta) * math.log(
        2.0**p.k - 1.0
    )


def _tilt(p: OrientParams, beta: float, q: float) -> float:
    # H_q: the tilt at z = k ell (1-q)/(1-beta)
    return solve_tilt(p.k * p.ell * (1.0 - q) / (1.0 - beta), p.ell)


def df_dq(k, ell, beta: float, q: float) -> float:
    """Closed-form partial derivative ``k ell (-ln((1-q)/q) + ln(H_q / xi*))``."""
    p = _p(k, ell)
    _check_window(p, beta, q)
    xi = _threshold(p.k, p.ell).xi_star
    return p.k * p.ell * (-math.log((1.0 - q) / q) + math.log(_tilt(p, beta, q) / xi))


def f_critical_point(k, ell, beta: float) -> float:
    """The q0 in the open window where df/dq = 0, by bisection.

    The derivative is positive at q = beta (for beta > 1/2) and tends to
    minus infinity at the upper window edge, where H_q -> 0.
    """
    p = _p(k, ell)
    lo = beta
    hi = q_upper(p.k, p.ell, beta)
    if not beta > 0.5:
        raise DomainError(f"critical point search needs beta > 1/2, got {beta!r}")
    # stay strictly inside: the tilt equation needs z > ell+1
    hi = hi - 1e-15 * max(1.0, hi)
    while df_dq(p, None, beta, hi) >= 0.0:
        hi = 0.5 * (hi + q_upper(p.k, p.ell, beta))
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if df_dq(p, None, beta, mid) > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def fcrit_value(k, ell, beta: float, q0: float) -> float:
    """Closed form of f(beta, q0) at a critical point q0."""
    p = _p(k, ell)
    t = _threshold(p.k, p.ell)
    kl = p.k * p.ell
    xi, gap = t.xi_star, t.gap
    return (
        (p.ell + 1) * entropy(beta)
        + kl * math.log(q0)
        + p.ell * (1.0 - beta) * math.log((2.0**p.k - 1.0) * (1.0 - q0) / q0)
        + (1.0 - beta) * math.log((1.0 - beta) * gap / (kl * q0 - xi * (1.0 - beta)))
    )


def h_value(k, ell, beta: float) -> float:
    """The beta-only bound h(beta): the critical-point closed form of f
    (see :func:`fcrit_value`) with q0 moved to the upper window edge.

    f(beta, q0) is increasing in q0 on the window, so this bounds f at every
    critical point; it is not f(beta, q_upper) itself.
    """
    p = _p(k, ell)
    if not 0.0 < beta < 1.0:
        raise DomainError(f"beta must lie in (0, 1), got {beta!r}")
    t = _threshold(p.k, p.ell)
    kl = p.k * p.ell
    l1 = p.ell + 1
    xi, gap = t.xi_star, t.gap
    # k ell - (1 + ell + xi)(1 - beta), with xi = k ell - gap
    denom = kl * beta + gap * (1.0 - beta) - l1 * (1.0 - beta)
    inner = p.ell * math.log((2.0**p.k - 1.0) * l1 / (kl - l1 * (1.0 - beta))) + math.log(
        gap / denom
    )
    return (
        -l1 * beta * math.log(beta)
        + (1.0 - beta) * inner
        + kl * math.log1p(-l1 * (1.0 - beta) / kl)
    )


def e_kl(k, ell=None) -> float:
    """Slope of ``x Q(x,ell) / (k ell Q(x,ell+1))`` at xi*, in closed form:
    ``1/xi* - (k ell - xi*)/xi* + (k ell - xi*)/(xi* k)``."""
    p = _p(k, ell)
    t = _threshold(p.k, p.ell)
    return (1.0 - t.gap + t.gap / p.k) / t.xi_star


def t_kl(k, ell=None) -> float:
    p = _p(k, ell)
    kl = p.k * p.ell
    return (1.0 - 0.36 / kl) ** p.ell / -math.expm1(-((kl - p.ell + 0.64) ** 2) / (2 * kl - 0.72))


def xi_lower_bound_printed(k, ell=None) -> float:
    """Upper bound on k ell - xi* as printed:
    ``e^{-k ell} k ell (k ell - 0.36)^ell / ell! / (1 - exp(-(k ell - ell + 0.64)^2/(2 k ell - 0.72)))``."""
    p = _p(k, ell)
    kl = p.k * p.ell
    log_num = -kl + math.log(kl) + p.ell * math.log(kl - 0.36) - math.lgamma(p.ell + 1)
    return math.exp(log_num) / -math.expm1(-((kl - p.ell + 0.64) ** 2) / (2 * kl - 0.72))


def xi_lower_bound_derived(k, ell=None) -> float:
    """The same bound with the Poisson point mass taken at k ell - 0.36,
    i.e. ``e^{-(k ell - 0.36)}`` in place of ``e^{-k ell}``."""
    return xi_lower_bound_printed(k, ell) * math.exp(0.36)


def first_moment_exponent(k: int, ell: int, u: float) -> float:
    """``(ell+1) H(u) + k ell u ln u``, exponent of the expected number of
    ell-dense sets with u n vertices."""
    if not 0.0 < u <= 0.6:
        raise DomainError(f"u must lie in (0, 0.6], got {u!r}")
    return (ell + 1) * entropy(u) + k * ell * u * math.log(u)


@dataclass(frozen=True)
class AuditRow:
    claim: str
    k: int
    ell: int
    point: str
    value: float
    bound: float

    @property
    def passed(self) -> bool:
        if not (math.isfinite(self.value) and math.isfinite(self.bound)):
            return False
        if self.claim in LOWER_BOUND_CLAIMS:
            return self.value > self.bound
        return self.value < self.bound

    @property
    def margin(self) -> float:
        """Distance to the bound, negative when the row fails."""
        d = self.bound - self.value
        return -d if self.claim in LOWER_BOUND_CLAIMS else d


@dataclass
class AuditReport:
    grid: str
    rows: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows)

    @property
    def first_violation(self):
        return next((r for r in self.rows if not r.passed), None)

    @property
    def max_value(self) -> float:
        return max((r.value for r in self.rows), default=float("nan"))

    def worst(self):
        return min(self.rows, key=lambda r: r.margin, default=None)

    def claims(self) -> dict:
        out: dict = {}
        for r in self.rows:
            out.setdefault(r.claim, []).append(r)
        return out

    def summary_rows(self) -> list:
        """Worst row per (claim, k, ell)."""
        best: dict = {}
        for r in self.rows:
            key = (r.claim, r.k, r.ell)
            if key not in best or r.margin < best[key].margin:
                best[key] = r
        return list(best.values())


def _gap_019_asserted(k: int, ell: int) -> bool:
    return (k == 3 and ell >= 4) or (k >= 4 and ell >= 2)


def xi_bounds_audit(k, ell=None) -> AuditReport:
    """Bounds on xi* and e_{k,ell} for one (k, ell)."""
    p = _p(k, ell)
    t = _threshold(p.k, p.ell)
    pt = f"xi*={t.xi_star!r}"
    rows = [
        AuditRow("gap_positive", p.k, p.ell, pt, t.gap, 0.0),
        AuditRow("gap_below_0.36", p.k, p.ell, pt, t.gap, 0.36),
    ]
    if _gap_019_asserted(p.k, p.ell):
        rows.append(AuditRow("gap_below_0.19", p.k, p.ell, pt, t.gap, 0.19))
    ekl = e_kl(p)
    rows.append(AuditRow("ekl_lower", p.k, p.ell, pt, ekl, 0.77 / t.xi_star))
    rows.append(AuditRow("ekl_positive", p.k, p.ell, pt, ekl, 0.0))
    rows.append(AuditRow("xi_lower_printed", p.k, p.ell, pt, t.gap, xi_lower_bound_printed(p)))
    rows.append(AuditRow("xi_lower_derived", p.k, p.ell, pt, t.gap, xi_lower_bound_derived(p)))
    kl = p.k * p.ell
    t_form = t_kl(p) * math.exp(-kl + (p.ell + 1) * math.log(kl) - math.lgamma(p.ell + 1))
    rows.append(AuditRow("xi_lower_t", p.k, p.ell, pt, t.gap, t_form))
    return AuditReport(f"k={p.k} ell={p.ell}", rows)


def beta_grid(step: float = 1e-3, lo: float = 0.6, hi: float = 0.999) -> np.ndarray:
    count = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return np.round(lo + step * np.arange(count), 12)


def beta_audit(k, ell, betas) -> list:
    """h(beta) < 0, f(beta, q_upper) < 0 and the f(beta, beta) closed form."""
    p = _p(k, ell)
    rows = []
    for b in betas:
        b = float(b)
        pt = f"beta={b:.6g}"
        rows.append(AuditRow("h_negative", p.k, p.ell, pt, h_value(p, None, b), 0.0))
        qu = q_upper(p.k, p.ell, b)
        rows.append(
            AuditRow("f_upper_edge_negative", p.k, p.ell, f"{pt} q={qu:.9g}", f_value(p, None, b, qu), 0.0)
        )
        diff = abs(f_value(p, None, b, b) - f_diagonal_closed_form(p, None, b))
        rows.append(AuditRow("f_diagonal_formula", p.k, p.ell, pt, diff, 1e-9))
    return rows


def f_grid_audit(k, ell, beta_step: float = 0.01, q_step: float = 0.01) -> list:
    """f < 0 on a coarse (beta, q) grid of the window plus at the critical point."""
    p = _p(k, ell)
    rows = []
    for b in beta_grid(beta_step, 0.6, 0.99):
        b = float(b)
        qu = q_upper(p.k, p.ell, b)
        qs = list(np.arange(b, qu, q_step)) + [qu]
        for q in qs:
            q = float(min(q, qu))
            rows.append(
                AuditRow("f_grid_negative", p.k, p.ell, f"beta={b:.6g} q={q:.9g}", f_value(p, None, b, q), 0.0)
            )
        q0 = f_critical_point(p, None, b)
        fc = f_value(p, None, b, q0)
        pt = f"beta={b:.6g} q0={q0:.12g}"
        rows.append(AuditRow("f_critical_negative", p.k, p.ell, pt, fc, 0.0))
        rows.append(AuditRow("fcrit_formula", p.k, p.ell, pt, abs(fc - fcrit_value(p, None, b, q0)), 1e-8))
    return rows


def misc_audit() -> list:
    """Single-point numerical statements used along the way."""
    rows = [AuditRow("f_0.6_0.6", 3, 2, "beta=0.6 q=0.6", f_value(3, 2, 0.6, 0.6), -0.24)]
    for k in range(4, 11):
        for ell in range(2, 11):
            rows.append(
                AuditRow("first_moment_0.6", k, ell, "u=0.6", first_moment_exponent(k, ell, 0.6), -0.44 + 1e-15)
            )
    for ell in range(3, 11):
        rows.append(AuditRow("first_moment_0.6", 3, ell, "u=0.6", first_moment_exponent(3, ell, 0.6), -0.04 + 1e-15))
    for k in range(3, 11):
        value = entropy(0.99) - math.log(2.0**k - 1.0) / k + 0.52
        rows.append(AuditRow("entropy_0.99_margin", k, 0, "beta=0.99", value, -0.072))
    return rows


def run_audit(
    ks=DEFAULT_K,
    ells=DEFAULT_ELL,
    beta_ks=BETA_K,
    beta_ells=BETA_ELL,
    beta_step: float = 1e-3,
    f_grid: bool = False,
) -> AuditReport:
    """All audits; ``f_grid`` adds the (slower) two-dimensional grid of f."""
    rows = []
    for k in ks:
        for ell in ells:
            rows.extend(xi_bounds_audit(k, ell).rows)
    betas = beta_grid(beta_step)
    for k in beta_ks:
        for ell in beta_ells:
            rows.extend(beta_audit(k, ell, betas))
            if f_grid:
                rows.extend(f_grid_audit(k, ell))
    rows.extend(misc_audit())
    grid = (
        f"xi: k in {list(ks)}, ell in {list(ells)}; beta in [0.6, 0.999] step {beta_step}"
        f" for k in {list(beta_ks)}, ell in {list(beta_ells)}"
    )
    return AuditReport(grid, rows)


def write_audit_csv(report: AuditReport, fh, full: bool = False) -> None:
    """CSV ``claim,k,ell,point,value,bound,pass``; the worst point per
    (claim, k, ell) unless ``full``."""
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["claim", "k", "ell", "point", "value", "bound", "pass"])
    for r in report.rows if full else report.summary_rows():
        w.writerow([r.claim, r.k, r.ell, r.point, repr(r.value), repr(r.bound), int(r.passed)])
