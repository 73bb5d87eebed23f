import io
import math

import mpmath
import pytest

from hyperorient.audit import (
    AuditRow,
    beta_audit,
    beta_grid,
    df_dq,
    e_kl,
    f_critical_point,
    f_diagonal_closed_form,
    f_value,
    fcrit_value,
    first_moment_exponent,
    h_value,
    q_upper,
    run_audit,
    write_audit_csv,
    xi_bounds_audit,
    xi_lower_bound_derived,
    xi_lower_bound_printed,
)
from hyperorient.numeric import DomainError, entropy, q_tail
from hyperorient.threshold import c_star

mpmath.mp.dps = 40
PAIRS = [(k, ell) for k in range(3, 7) for ell in range(2, 5)]


def mp_q(x, y):
    return mpmath.gammainc(y, 0, x, regularized=True)


def mp_f(k, ell, beta, q):
    """f(beta, q) from scratch in high precision."""
    kl = k * ell
    g = lambda x: x * mp_q(x, ell) / mp_q(x, ell + 1)
    xi = mpmath.findroot(lambda x: g(x) - kl, kl - 0.1)
    z = mpmath.mpf(kl) * (1 - q) / (1 - beta)
    t = mpmath.findroot(lambda x: g(x) - z, (mpmath.mpf("1e-3"), kl), solver="bisect")
    rate = z * (mpmath.log(t) - mpmath.log(xi)) - t + xi - mpmath.log(mp_q(t, ell + 1)) + mpmath.log(mp_q(xi, ell + 1))
    H = lambda x: -x * mpmath.log(x) - (1 - x) * mpmath.log(1 - x)
    return (ell + 1) * H(beta) + ell * (1 - beta) * mpmath.log(2**k - 1) - kl * H(q) - (1 - beta) * rate


def test_f_matches_high_precision():
    for k, ell, beta, q in [(3, 2, 0.7, 0.72), (4, 3, 0.8, 0.83), (5, 2, 0.65, 0.7)]:
        assert f_value(k, ell, beta, q) == pytest.approx(float(mp_f(k, ell, beta, mpmath.mpf(q))), abs=1e-10)


def test_f_window():
    with pytest.raises(DomainError):
        f_value(3, 2, 0.7, 0.69)
    with pytest.raises(DomainError):
        f_value(3, 2, 0.7, q_upper(3, 2, 0.7) + 1e-6)
    with pytest.raises(DomainError):
        f_value(3, 2, 1.0, 1.0)


@pytest.mark.parametrize("k,ell", PAIRS)
def test_f_diagonal_closed_form(k, ell):
    for beta in (0.6, 0.7, 0.85, 0.99):
        assert f_value(k, ell, beta, beta) == pytest.approx(f_diagonal_closed_form(k, ell, beta), abs=1e-9)


def test_f_06_06():
    assert f_value(3, 2, 0.6, 0.6) < -0.24
    # -1.8 + 0.8 ln 7 is the closed form's upper estimate using H(0.6) > 0.6
    assert f_diagonal_closed_form(3, 2, 0.6) < -1.8 + 0.8 * math.log(7)


@pytest.mark.parametrize("k,ell", [(3, 2), (4, 3), (6, 4)])
def test_df_dq_finite_difference(k, ell):
    for beta in (0.65, 0.8, 0.95):
        lo, hi = beta, q_upper(k, ell, beta)
        for frac in (0.2, 0.5, 0.8):
            q = lo + frac * (hi - lo)
            h = 1e-6
            fd = (f_value(k, ell, beta, q + h) - f_value(k, ell, beta, q - h)) / (2 * h)
            assert df_dq(k, ell, beta, q) == pytest.approx(fd, rel=1e-5, abs=1e-6)


@pytest.mark.parametrize("k,ell", PAIRS)
def test_fcrit_closed_form(k, ell):
    for beta in (0.62, 0.75, 0.9, 0.98):
        q0 = f_critical_point(k, ell, beta)
        assert beta < q0 < q_upper(k, ell, beta)
        assert abs(df_dq(k, ell, beta, q0)) < 1e-6
        assert f_value(k, ell, beta, q0) == pytest.approx(fcrit_value(k, ell, beta, q0), abs=1e-8)
        # critical point is the maximum over q
        for frac in (0.1, 0.5, 0.9):
            q = beta + frac * (q_upper(k, ell, beta) - beta)
            assert f_value(k, ell, beta, q) <= f_value(k, ell, beta, q0) + 1e-12


@pytest.mark.parametrize("k,ell", PAIRS)
def test_h_is_critical_form_at_upper_edge(k, ell):
    for beta in (0.6, 0.7, 0.9, 0.99):
        qu = q_upper(k, ell, beta)
        assert h_value(k, ell, beta) == pytest.approx(fcrit_value(k, ell, beta, qu), abs=1e-12)
        # and it bounds f at the critical point and at the edge
        assert h_value(k, ell, beta) >= f_value(k, ell, beta, f_critical_point(k, ell, beta)) - 1e-12
        assert h_value(k, ell, beta) >= f_value(k, ell, beta, qu) - 1e-12


@pytest.mark.parametrize("k,ell", PAIRS)
def test_h_limit_and_slope(k, ell):
    assert abs(h_value(k, ell, 1 - 1e-9)) < 1e-6
    slopes = [h_value(k, ell, 1 - eps) / eps for eps in (0.01, 0.02, 0.05, 0.1, 0.2, 0.3)]
    assert max(slopes) < -1e-3


@pytest.mark.parametrize("k,ell", [(3, 2), (4, 2), (5, 5), (10, 10)])
def test_e_kl_finite_difference(k, ell):
    t = c_star(k, ell)
    xi = mpmath.mpf(t.xi_star)
    g = lambda x: x * mp_q(x, ell) / (k * ell * mp_q(x, ell + 1))
    deriv = mpmath.diff(g, xi)
    assert e_kl(k, ell) == pytest.approx(float(deriv), rel=1e-7)
    assert e_kl(k, ell) > 0.77 / t.xi_star


def test_e_kl_double_precision_difference():
    t = c_star(3, 2)
    g = lambda x: x * q_tail(x, 2) / (6 * q_tail(x, 3))
    h = 1e-5
    fd = (g(t.xi_star + h) - g(t.xi_star - h)) / (2 * h)
    assert abs(e_kl(3, 2) - fd) < 1e-7


def test_xi_bounds_spot_claims():
    rep = xi_bounds_audit(3, 2)
    byc = {r.claim: r for r in rep.rows}
    assert byc["gap_below_0.36"].passed
    assert "gap_below_0.19" not in byc
    assert {r.claim: r for r in xi_bounds_audit(4, 2).rows}["gap_below_0.19"].passed


def test_xi_lower_bound_high_precision():
    # the printed bound, the derived bound and the true gap at (3, 2)
    k, ell = 3, 2
    kl = k * ell
    g = lambda x: x * mp_q(x, ell) / mp_q(x, ell + 1)
    gap = kl - mpmath.findroot(lambda x: g(x) - kl, 5.6)
    tail = 1 - mpmath.exp(-((kl - ell + mpmath.mpf("0.64")) ** 2) / (2 * kl - mpmath.mpf("0.72")))
    printed = mpmath.exp(-kl) * kl * (kl - mpmath.mpf("0.36")) ** ell / mpmath.factorial(ell) / tail
    assert xi_lower_bound_printed(k, ell) == pytest.approx(float(printed), rel=1e-12)
    assert xi_lower_bound_derived(k, ell) == pytest.approx(float(printed * mpmath.exp(0.36)), rel=1e-12)
    assert gap > printed
    assert gap < printed * mpmath.exp(mpmath.mpf("0.36"))


def test_first_moment_exponent():
    assert first_moment_exponent(3, 3, 0.6) <= -0.04
    val = first_moment_exponent(4, 2, 0.6)
    assert val == pytest.approx(3 * entropy(0.6) + 8 * 0.6 * math.log(0.6), rel=1e-15)
    vals = [first_moment_exponent(3, 2, u) for u in (1e-3, 1e-5, 1e-8)]
    assert all(v < 0 for v in vals)
    assert vals[0] < vals[1] < vals[2] and vals[2] > -1e-6
    with pytest.raises(DomainError):
        first_moment_exponent(3, 2, 0.7)


def test_audit_row_direction():
    assert AuditRow("gap_positive", 3, 2, "", 0.3, 0.0).passed
    assert not AuditRow("gap_below_0.36", 3, 2, "", 0.4, 0.36).passed
    assert AuditRow("h_negative", 3, 2, "", -1.0, 0.0).margin == 1.0
    assert not AuditRow("h_negative", 3, 2, "", float("nan"), 0.0).passed


def test_beta_audit_rows():
    rows = beta_audit(3, 2, beta_grid(0.1))
    assert len(rows) == 3 * 4
    assert all(r.passed for r in rows)


def test_audit_csv():
    rep = run_audit(ks=[3, 4], ells=[2], beta_ks=[3], beta_ells=[2], beta_step=0.05)
    buf = io.StringIO()
    write_audit_csv(rep, buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "claim,k,ell,point,value,bound,pass"
    assert len(lines) - 1 == len(rep.summary_rows())
    buf = io.StringIO()
    write_audit_csv(rep, buf, full=True)
    assert len(buf.getvalue().splitlines()) - 1 == len(rep.rows)
    # the printed lower bound on xi* is violated; surfaced as data
    assert not rep.passed
    assert rep.first_violation.claim in {"xi_lower_printed", "xi_lower_t", "first_moment_0.6"}
