"""Deterministic random streams.

Every generation call is driven by a :class:`Seed` ``(value, stream)``.
Both words are passed through the SplitMix64 finaliser and used as the
128-bit key of a Philox-4x64 counter-based generator (counter starting at
zero).  Only the raw 64-bit output of Philox is consumed; bounded integers,
uniforms and the Poisson / binomial variates below are derived from it by
fixed algorithms, so a seed reproduces the same draws on any platform and
any numpy release.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = ["RandomStream", "Seed", "as_seed", "splitmix64", "trial_seed"]

MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def splitmix64(x: int) -> int:
    """SplitMix64 output function applied to ``x + golden``."""
    z = (x + _GOLDEN) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


@dataclass(frozen=True)
class Seed:
    value: int
    stream: int = 0

    def __post_init__(self):
        for name in ("value", "stream"):
            v = getattr(self, name)
            if int(v) != v or not 0 <= v <= MASK64:
                raise ValueError(f"seed {name} must be an unsigned 64-bit integer, got {v!r}")


def as_seed(seed) -> Seed:
    if isinstance(seed, Seed):
        return seed
    if isinstance(seed, tuple):
        return Seed(*seed)
    return Seed(int(seed))


def trial_seed(base: int, c: float, trial: int) -> int:
    """64-bit seed of one Monte Carlo trial, keyed by (base, c, trial).

    ``c`` enters through its value rounded to 1e-9, so the same (c, trial)
    pair gets the same instance whatever grid it appears in.
    """
    c_key = int(round(c * 1e9)) & MASK64
    return splitmix64(base ^ splitmix64(c_key ^ splitmix64(trial)))


class RandomStream:
    """Sequential draws from the Philox stream of one seed."""

    def __init__(self, seed):
        seed = as_seed(seed)
        key = np.array(
            [splitmix64(seed.value), splitmix64(seed.stream ^ 0xD1B54A32D192ED03)],
            dtype=np.uint64,
        )
        self.seed = seed
        self._bits = np.random.Philox(key=key)

    def raw(self, size: int) -> np.ndarray:
        return self._bits.random_raw(size)

    def uniform(self, size: int) -> np.ndarray:
        """Doubles in [0, 1) with 53 random bits each."""
        return (self.raw(size) >> np.uint64(11)).astype(np.float64) * (1.0 / 9007199254740992.0)

    def uniform1(self) -> float:
        return float(self.uniform(1)[0])

    def _words32(self, size: int) -> np.ndarray:
        r = self.raw((size + 1) // 2)
        out = np.empty(2 * len(r), dtype=np.uint64)
        out[0::2] = r >> np.uint64(32)
        out[1::2] = r & np.uint64(0xFFFFFFFF)
        return out[:size]

    def below(self, bound: int, size: int) -> np.ndarray:
        """``size`` integers uniform on [0, bound) by Lemire's multiply-shift
        with rejection on 32-bit words (bound < 2**32)."""
        bound = int(bound)
        if not 1 <= bound < 2**32:
            raise ValueError(f"bound must lie in [1, 2**32), got {bound}")
        out = np.empty(size, dtype=np.int64)
        if size == 0:
            return out
        threshold = np.uint64((2**32) % bound)
        b = np.uint64(bound)
        todo = np.arange(size)
        while len(todo):
            prod = self._words32(len(todo)) * b
            ok = (prod & np.uint64(0xFFFFFFFF)) >= threshold
            out[todo[ok]] = (prod[ok] >> np.uint64(32)).astype(np.int64)
            todo = todo[~ok]
        return out

    def permutation(self, size: int) -> np.ndarray:
        """Uniform random permutation: stable argsort of 64-bit random keys."""
        return np.argsort(self.raw(size), kind="stable")

    def poisson(self, lam: float, size: int) -> np.ndarray:
        """Poisson(lam) variates by table inversion."""
        if lam < 0 or lam > 1000:
            raise ValueError(f"Poisson parameter must lie in [0, 1000], got {lam}")
        if lam == 0 or size == 0:
            return np.zeros(size, dtype=np.int64)
        probs = [math.exp(-lam)]
        cum = probs[0]
        j = 0
        while j < lam or probs[-1] > 1e-18 * cum:
            j += 1
            probs.append(probs[-1] * lam / j)
            cum += probs[-1]
        cdf = np.cumsum(np.array(probs))
        u = self.uniform(size)
        out = np.searchsorted(cdf, u, side="right").astype(np.int64)
        # u beyond the tabulated mass (probability ~1e-16): walk on
        for i in np.flatnonzero(out >= len(cdf)):
            x, p, acc = len(cdf) - 1, probs[-1], cdf[-1]
            while u[i] >= acc and p > 0.0:
                x += 1
                p *= lam / x
                acc += p
            out[i] = x
        return out

    def binomial(self, n: int, p: float) -> int:
        """One Binomial(n, p) variate, exact: inversion when min(p,1-p)*n < 10,
        otherwise the BTPE acceptance-rejection algorithm
        (Kachitvichyanukul & Schmeiser, 1988)."""
        if n < 0 or not 0.0 <= p <= 1.0:
            raise ValueError(f"invalid binomial parameters n={n}, p={p}")
        if n == 0 or p == 0.0:
            return 0
        if p == 1.0:
            return n
        r = min(p, 1.0 - p)
        if n * r < 10.0:
            y = self._binomial_inversion(n, r)
        else:
            y = self._binomial_btpe(n, r)
        return n - y if p > 0.5 else y

    def _binomial_inversion(self, n: int, p: float) -> int:
        q = 1.0 - p
        qn = math.exp(n * math.log1p(-p))
        mean = n * p
        bound = min(float(n), mean + 10.0 * math.sqrt(mean * q + 1.0))
        x = 0
        px = qn
        u = self.uniform1()
        while u > px:
            x += 1
            if x > bound:
                x = 0
                px = qn
                u = self.uniform1()
            else:
                u -= px
                px = ((n - x + 1) * p * px) / (x * q)
        return x

    def _binomial_btpe(self, n: int, p: float) -> int:
        q = 1.0 - p
        nf = float(n)
        fm = nf * p + p
        m = math.floor(fm)
        npq = nf * p * q
        p1 = math.floor(2.195 * math.sqrt(npq) - 4.6 * q) + 0.5
        xm = m + 0.5
        xl = xm - p1
        xr = xm + p1
        c = 0.134 + 20.5 / (15.3 + m)
        a = (fm - xl) / (fm - xl * p)
        lam_l = a * (1.0 + a / 2.0)
        a = (xr - fm) / (xr * q)
        lam_r = a * (1.0 + a / 2.0)
        p2 = p1 * (1.0 + 2.0 * c)
        p3 = p2 + c / lam_l
        p4 = p3 + c / lam_r

        while True:
            u = self.uniform1() * p4
            v = self.uniform1()
            if u <= p1:
                # triangular centre region: immediate acceptance
                return int(math.floor(xm - p1 * v + u))
            if u <= p2:
                x = xl + (u - p1) / c
                v = v * c + 1.0 - abs(m - x + 0.5) / p1
                if v > 1.0:
                    continue
                y = int(math.floor(x))
            elif u <= p3:
                y = int(math.floor(xl + math.log(v) / lam_l))
                if y < 0:
                    continue
                v = v * (u - p2) * lam_l
            else:
                y = int(math.floor(xr - math.log(v) / lam_r))
                if y > n:
                    continue
                v = v * (u - p3) * lam_r

            k = abs(y - m)
            if k <= 20 or k >= npq / 2 - 1:
                # explicit evaluation of f(y)/f(m)
                s = p / q
                aa = s * (nf + 1.0)
                f = 1.0
                if m < y:
                    for i in range(m + 1, y + 1):
                        f *= aa / i - s
                elif m > y:
                    for i in range(y + 1, m + 1):
                        f /= aa / i - s
                if v <= f:
                    return y
                continue

            # squeeze on log f(y)/f(m), then the Stirling-corrected bound
            rho = (k / npq) * ((k * (k / 3.0 + 0.625) + 0.1666666666666) / npq + 0.5)
            t = -k * k / (2.0 * npq)
            alpha = math.log(v)
            if alpha < t - rho:
                return y
            if alpha > t + rho:
                continue
            x1 = y + 1.0
            f1 = m + 1.0
            z = nf + 1.0 - m
            w = nf - y + 1.0
            bound = (
                xm * math.log(f1 / x1)
                + (nf - m + 0.5) * math.log(z / w)
                + (y - m) * math.log(w * p / (x1 * q))
                + _stirling_tail(f1)
                + _stirling_tail(z)
                + _stirling_tail(x1)
                + _stirling_tail(w)
            )
            if alpha <= bound:
                return y


def _stirling_tail(a: float) -> float:
    a2 = a * a
    return (13860.0 - (462.0 - (132.0 - (99.0 - 140.0 / a2) / a2) / a2) / a2) / a / 166320.0
