"""Monte Carlo scans of ell-orientability across edge densities.

A scan runs ``trials`` independent instances at every density c of a grid
and records, per instance, whether it is ell-orientable and the size of its
(ell+1)-core.  Every instance is generated from its own seed, derived from
(base seed, c, trial), so results do not depend on execution order or on
how trials are spread over worker processes.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from decimal import Decimal

from .core import Orientation, orient, peel_core
from .hypergraph import gen_binomial, gen_poisson_cloning, gen_uniform
from .rng import Seed, trial_seed

__all__ = [
    "CSV_HEADER",
    "ExperimentSpec",
    "MODELS",
    "NoCrossing",
    "PointSummary",
    "TrialRecord",
    "c_grid",
    "estimate_crossing",
    "format_record",
    "run_scan",
    "run_trial",
    "summarize",
    "wilson_interval",
]

MODELS = ("uniform", "binomial", "poisson-cloning")
CSV_HEADER = "k,ell,model,n,c,trial,seed,orientable,core_n,core_m,elapsed_ms"
_Z95 = 1.959963984540054


class NoCrossing(Exception):
    """The orientable fraction never crosses 1/2 on the grid."""


@dataclass(frozen=True)
class ExperimentSpec:
    k: int
    ell: int
    model: str
    n: int
    c_values: tuple
    trials: int
    seed: int = 0
    timing: bool = False

    def __post_init__(self):
        if int(self.k) != self.k or self.k < 3:
            raise ValueError(f"k must be an integer >= 3, got {self.k!r}")
        if int(self.ell) != self.ell or self.ell < 1:
            raise ValueError(f"ell must be an integer >= 1, got {self.ell!r}")
        if self.model not in MODELS:
            raise ValueError(f"model must be one of {', '.join(MODELS)}, got {self.model!r}")
        if int(self.n) != self.n or self.n < self.k:
            raise ValueError(f"n must be an integer >= k, got {self.n!r}")
        if int(self.trials) != self.trials or self.trials < 1:
            raise ValueError(f"trials must be a positive integer, got {self.trials!r}")
        if not self.c_values or any(not (c > 0) for c in self.c_values):
            raise ValueError("c values must be positive")
        if list(self.c_values) != sorted(self.c_values):
            raise ValueError("c values must be sorted ascending")
        if not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")


@dataclass(frozen=True)
class TrialRecord:
    k: int
    ell: int
    model: str
    n: int
    c: float
    trial: int
    seed: int
    orientable: bool
    core_n: int
    core_m: int
    elapsed_ms: float | None = None


def c_grid(c_min: float, c_max: float, c_step: float) -> tuple:
    """Evenly spaced densities from c_min to c_max inclusive, rounded to 10
    decimals so that the grid does not carry accumulated float error."""
    if not (c_step > 0) or c_max < c_min:
        raise ValueError("need c_step > 0 and c_max >= c_min")
    count = int(math.floor((c_max - c_min) / c_step + 1e-9)) + 1
    return tuple(round(c_min + i * c_step, 10) for i in range(count))


def edge_count(c: float, n: int) -> int:
    """m = floor(c n), computed on the decimal literal of c."""
    return int((Decimal(repr(float(c))) * n).to_integral_value(rounding="ROUND_FLOOR"))


def _generate(model: str, n: int, k: int, c: float, seed: Seed):
    if model == "uniform":
        return gen_uniform(n, edge_count(c, n), k, seed)
    # c n expected edges: p = c n / C(n, k) = c k / C(n-1, k-1)
    p = c * k / math.comb(n - 1, k - 1)
    if model == "binomial":
        return gen_binomial(n, p, k, seed)
    return gen_poisson_cloning(n, p, k, seed)


def run_trial(k: int, ell: int, model: str, n: int, c: float, trial: int, base_seed: int,
              timing: bool = False) -> TrialRecord:
    value = trial_seed(base_seed, c, trial)
    start = time.perf_counter()
    h = _generate(model, n, k, c, Seed(value, trial))
    core = peel_core(h, ell)
    result = orient(h, ell, core=core)
    elapsed = (time.perf_counter() - start) * 1e3
    orientable = isinstance(result, Orientation)
    if core.n and k * core.m < (ell + 1) * core.n:
        raise AssertionError("core has a vertex of degree <= ell")
    if orientable and core.m > ell * core.n:
        raise AssertionError("orientation reported for a core denser than ell")
    return TrialRecord(k, ell, model, n, c, trial, value, orientable, core.n, core.m,
                       elapsed if timing else None)


def _run_task(args) -> TrialRecord:
    return run_trial(*args)


def run_scan(spec: ExperimentSpec, jobs: int = 1):
    """Yield the records of a scan in (c, trial) order."""
    tasks = [
        (spec.k, spec.ell, spec.model, spec.n, c, t, spec.seed, spec.timing)
        for c in spec.c_values
        for t in range(spec.trials)
    ]
    if jobs <= 1:
        for task in tasks:
            yield _run_task(task)
        return
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        # map() returns results in submission order
        yield from pool.map(_run_task, tasks, chunksize=1)


def format_record(r: TrialRecord) -> str:
    elapsed = "NA" if r.elapsed_ms is None else f"{r.elapsed_ms:.3f}"
    return (
        f"{r.k},{r.ell},{r.model},{r.n},{r.c!r},{r.trial},{r.seed},"
        f"{int(r.orientable)},{r.core_n},{r.core_m},{elapsed}"
    )


def wilson_interval(successes: int, trials: int, z: float = _Z95) -> tuple[float, float]:
    if trials <= 0:
        return (0.0, 1.0)
    p = successes / trials
    denom = 1.0 + z * z / trials
    centre = (p + z * z / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / denom
    return (max(0.0, centre - half), min(1.0, centre + half))


@dataclass(frozen=True)
class PointSummary:
    c: float
    trials: int
    orientable: int
    fraction: float
    wilson_lo: float
    wilson_hi: float
    mean_core_n: float
    mean_core_m: float


def summarize(records) -> list:
    """One :class:`PointSummary` per c, in ascending c."""
    by_c: dict = {}
    for r in records:
        by_c.setdefault(r.c, []).append(r)
    out = []
    for c in sorted(by_c):
        rs = by_c[c]
        hits = sum(r.orientable for r in rs)
        lo, hi = wilson_interval(hits, len(rs))
        out.append(
            PointSummary(
                c, len(rs), hits, hits / len(rs), lo, hi,
                sum(r.core_n for r in rs) / len(rs),
                sum(r.core_m for r in rs) / len(rs),
            )
        )
    return out


def estimate_crossing(summary) -> float:
    """c at which the orientable fraction first falls through 1/2, by linear
    interpolation between the two grid points around the crossing."""
    pts = [(s.c, s.fraction) for s in summary]
    for (c0, f0), (c1, f1) in zip(pts, pts[1:]):
        if f0 >= 0.5 >= f1 and f0 != f1:
            return c0 + (f0 - 0.5) * (c1 - c0) / (f0 - f1)
    raise NoCrossing("orientable fraction does not cross 0.5 on the grid")
