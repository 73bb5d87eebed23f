import math

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from hyperorient.numeric import (
    DomainError,
    entropy,
    poisson_pmf,
    q_tail,
    rate_fn,
    rate_fn_boundary,
    solve_tilt,
    tilted_mean,
    trunc_pois_mean,
    trunc_pois_pmf,
)

mpmath.mp.dps = 40


def mp_q(x, y):
    x = mpmath.mpf(x)
    if x == 0:
        return mpmath.mpf(0)
    # regularized lower incomplete gamma: P[Po(x) >= y] = P(y, x)
    return mpmath.gammainc(y, 0, x, regularized=True)


def mp_mean(x, ell):
    return mpmath.mpf(x) * mp_q(x, ell) / mp_q(x, ell + 1)


def test_q_tail_examples():
    assert q_tail(0.0, 3) == 0.0
    for x in (0.0, 0.3, 2.0, 17.5):
        assert q_tail(x, 1) == pytest.approx(-math.expm1(-x), rel=1e-15, abs=0)
    assert q_tail(6.0, 3) == pytest.approx(1 - 25 * math.exp(-6), rel=1e-14)
    assert abs(q_tail(6.0, 3) - 0.9380312) < 1e-7


@pytest.mark.parametrize(
    "x,y",
    [(1e-6, 3), (0.01, 1), (0.5, 2), (3.0, 7), (6.0, 3), (20.0, 2), (20.0, 60),
     (100.0, 80), (100.0, 130), (250.0, 250), (499.0, 3), (500.0, 600), (500.0, 900), (40.0, 10**6)],
)
def test_q_tail_matches_incomplete_gamma(x, y):
    ref = mp_q(x, y)
    got = q_tail(x, y)
    if ref < mpmath.mpf("1e-300"):
        assert got < 1e-290
    else:
        assert abs(got - ref) / ref < 1e-14


@settings(max_examples=200, deadline=None)
@given(st.floats(1e-3, 500.0), st.integers(1, 60))
def test_q_tail_relative_error_random(x, y):
    ref = mp_q(x, y)
    if ref > mpmath.mpf("1e-280"):
        assert abs(q_tail(x, y) - ref) / ref < 1e-14


def test_q_tail_domain():
    for bad in [(-1.0, 2), (1.0, 0), (501.0, 2), (1.0, 2.5)]:
        with pytest.raises(DomainError):
            q_tail(*bad)


def test_q_tail_monotone():
    xs = [0.1 * i for i in range(1, 200)]
    for y in (1, 3, 8):
        vals = [q_tail(x, y) for x in xs]
        assert all(a < b for a, b in zip(vals, vals[1:]))
        assert all(0 < v < 1 for v in vals)
    for x in (0.5, 5.0, 50.0):
        vals = [q_tail(x, y) for y in range(1, 40)]
        # values that round to 1.0 or underflow to 0 carry no order
        assert all(a > b for a, b in zip(vals, vals[1:]) if 0 < b and a < 1)


def test_poisson_pmf():
    for x, j in [(6.0, 3), (0.5, 0), (300.0, 280)]:
        ref = mpmath.exp(-x) * mpmath.mpf(x) ** j / mpmath.factorial(j)
        assert poisson_pmf(x, j) == pytest.approx(float(ref), rel=1e-13)


def test_trunc_pois_mean_examples():
    assert abs(trunc_pois_mean(1e-8, 2) - 3.0) < 1e-6
    assert trunc_pois_mean(6.0, 2) == pytest.approx(float(mp_mean(6, 2)), rel=1e-14)
    assert abs(trunc_pois_mean(6.0, 2) - 6.28539) < 5e-6
    assert trunc_pois_mean(5.0, 2) < trunc_pois_mean(6.0, 2)


def test_trunc_pois_mean_exceeds_cutoff():
    for ell in (1, 2, 5, 20):
        for lam in (1e-4, 0.3, 4.0, 80.0):
            assert trunc_pois_mean(lam, ell) > ell + 1


@pytest.mark.parametrize("ell", [1, 2, 5, 17, 50])
def test_tilted_mean_strictly_increasing(ell):
    xs = [1e-3 * 1.06**i for i in range(240) if 1e-3 * 1.06**i <= 500]
    vals = [tilted_mean(x, ell) for x in xs]
    assert all(a < b for a, b in zip(vals, vals[1:]))


@settings(max_examples=100, deadline=None)
@given(st.floats(1e-2, 499.0), st.floats(1e-4, 1.0), st.integers(1, 50))
def test_tilted_mean_increasing_random(x, dx, ell):
    assert tilted_mean(x, ell) < tilted_mean(min(x + dx, 500.0), ell) or x + dx > 500.0


def test_trunc_pois_pmf_sums_to_one():
    lam, ell = 6.0, 2
    assert trunc_pois_pmf(ell, lam, ell) == 0.0
    assert math.fsum(trunc_pois_pmf(j, lam, ell) for j in range(200)) == pytest.approx(1.0, abs=1e-14)


def test_solve_tilt_examples():
    for lam, ell in [(6.0, 2), (0.7, 3), (40.0, 5)]:
        assert solve_tilt(trunc_pois_mean(lam, ell), ell) == pytest.approx(lam, rel=1e-12)
    # z = 6, ell = 2 is the k=3, ell=2 threshold root
    ref = mpmath.findroot(lambda x: mp_mean(x, 2) - 6, 5.6)
    assert solve_tilt(6.0, 2) == pytest.approx(float(ref), rel=1e-13)
    t = solve_tilt(3.001, 2)
    assert 0 < t < 0.01


@settings(max_examples=100, deadline=None)
@given(st.floats(0.01, 400.0), st.integers(1, 10))
def test_solve_tilt_residual(excess, ell):
    z = ell + 1 + excess
    t = solve_tilt(z, ell)
    assert abs(tilted_mean(t, ell) - z) <= 1e-12 * z


def test_solve_tilt_domain():
    with pytest.raises(DomainError):
        solve_tilt(3.0, 2)
    with pytest.raises(DomainError):
        solve_tilt(2.5, 2)


def test_rate_fn_zero_at_mean():
    for lam, ell in [(6.0, 2), (2.0, 4), (15.0, 3)]:
        mu = trunc_pois_mean(lam, ell)
        assert abs(rate_fn(mu, lam, ell).value) < 1e-9


def test_rate_fn_positive_and_convex_spot():
    lam, ell = 6.0, 2
    i4, i5, i6 = (rate_fn(z, lam, ell).value for z in (4.0, 5.0, 6.0))
    assert i4 > 0
    assert i5 <= 0.5 * (i4 + i6)


def test_rate_fn_matches_mpmath_formula():
    lam, ell, z = 6.0, 2, 4.0
    t = mpmath.findroot(lambda x: mp_mean(x, ell) - z, 3.0)
    ref = (z * (mpmath.log(t) - mpmath.log(lam)) - t + lam
           - mpmath.log(mp_q(t, ell + 1)) + mpmath.log(mp_q(lam, ell + 1)))
    assert rate_fn(z, lam, ell).value == pytest.approx(float(ref), rel=1e-10)


def test_rate_fn_tracks_lower_tail_probability():
    # -ln P[sum of s draws <= s z] / s approaches I(z) from above as s grows
    lam, ell, z = 6.0, 2, 4.0
    pmf = [trunc_pois_pmf(j, lam, ell) for j in range(60)]
    rates = []
    for s in (25, 50, 100):
        dist = [1.0]
        for _ in range(s):
            new = [0.0] * (len(dist) + len(pmf) - 1)
            for a, pa in enumerate(dist):
                if pa:
                    for b, pb in enumerate(pmf):
                        new[a + b] += pa * pb
            dist = new[: int(s * z) + 1]
        rates.append(-math.log(sum(dist[: int(s * z) + 1])) / s)
    target = rate_fn(z, lam, ell).value
    assert rates[0] > rates[1] > rates[2] > target
    assert rates[2] - target < 0.05


def test_rate_fn_boundary_identity():
    for lam, ell in [(6.0, 2), (1.5, 3), (30.0, 6)]:
        expected = trunc_pois_pmf(ell + 1, lam, ell)
        assert math.exp(-rate_fn_boundary(lam, ell)) == pytest.approx(expected, rel=1e-12)


def test_rate_fn_boundary_value_at_6_2():
    ref = mpmath.log(6) - 3 * mpmath.log(6) + 6 + mpmath.log(mp_q(6, 3))
    assert rate_fn_boundary(6.0, 2) == pytest.approx(float(ref), abs=1e-13)


def test_rate_fn_continuous_at_boundary():
    lam, ell = 6.0, 2
    near = rate_fn(ell + 1 + 1e-6, lam, ell).value
    assert rate_fn(ell + 1, lam, ell).value == rate_fn_boundary(lam, ell)
    assert abs(near - rate_fn_boundary(lam, ell)) < 1e-4


def test_rate_fn_domain():
    with pytest.raises(DomainError):
        rate_fn(2.9, 6.0, 2)
    with pytest.raises(DomainError):
        rate_fn_boundary(0.0, 2)


def test_entropy():
    assert entropy(0.5) == pytest.approx(math.log(2), rel=1e-15)
    assert entropy(0.0) == 0.0 and entropy(1.0) == 0.0
    assert entropy(0.6) > 0.6
    with pytest.raises(DomainError):
        entropy(1.5)
