import json
import math

import numpy as np
import pytest

from bergcone.certificates import (
    KIND_S,
    KIND_S1,
    KIND_T,
    OkikioluCertificate,
    closing_identities,
    find_certificate_S,
    find_certificate_Tplus,
    holder_bound_S_infty,
    okikiolu_generic_check,
    verify_certificate_S,
    verify_certificate_Tplus,
    windows_S,
    windows_Tplus,
)
from bergcone.cones import ConeDescriptor
from bergcone.decision import SParams, TParams, homogeneous_gamma_S
from bergcone.exceptions import CertificateError, DivergentIntegralError, PreconditionError
from bergcone.quadrature import QuadratureConfig

H = ConeDescriptor.halfline()
L3 = ConeDescriptor.lorentz(3)
BASE = SParams(alpha=0, beta=0, gamma=1, nu=1, mu=1, p=2, q=2)
P1 = SParams(alpha=0, beta=1, gamma=2, nu=1, mu=1, p=1, q=2)
P1_H = P1.replace(gamma=1.5)
FAST = QuadratureConfig(angular_nodes=8)


def test_windows_at_fixed_t():
    w = windows_S(H, BASE)
    lo, hi = w.u_interval(0.7)
    assert (lo, hi) == pytest.approx((0.0, 0.3))
    iv = w.intervals(0.7)
    assert iv["v_upper"][1:] == pytest.approx((0.2, 0.7))
    assert iv["v_lower"][1:] == pytest.approx((0.0, 0.5))
    assert gap_at(w, 0.7) == pytest.approx(0.2)
    assert w.satisfied(0.1, 0.3, 0.7)
    assert not w.satisfied(0.35, 0.55, 0.7)
    lo, hi = w.u_interval(0.51)
    assert lo < hi and gap_at(w, 0.51) == pytest.approx(0.01)


def gap_at(w, t):
    return w._ev(w.gap, t)


def test_certificate_example_halfline():
    c = find_certificate_S(H, BASE)
    assert c.kind == KIND_S
    assert 0.5 < c.t < 1
    assert 0 < c.v - c.u < 0.5
    assert windows_S(H, BASE).satisfied(c.u, c.v, c.t)
    assert c.slack > 0


def test_certificate_p1_lorentz():
    c = find_certificate_S(L3, P1)
    assert c.kind == KIND_S1 and c.omega == pytest.approx(-0.5)
    w = windows_S(L3, P1)
    assert w.satisfied(c.u, c.v, c.t)
    lo, hi = w.u_interval(0.5)
    assert lo < hi


def brute_force_feasible(win, step=0.01):
    for t in np.arange(step, 1, step):
        g = win._ev(win.gap, t)
        for u in np.arange(-3, 3, step):
            if win.satisfied(u, u + g, t):
                return True
    return False


def test_p1_windows_brute_force():
    assert brute_force_feasible(windows_S(L3, P1))


def test_tube_windows_brute_force():
    prm = TParams(0, 0, 1, 1, 1, 2, 2)
    assert brute_force_feasible(windows_Tplus(H, prm))
    c = find_certificate_Tplus(H, prm)
    assert c.kind == KIND_T and windows_Tplus(H, prm).satisfied(c.u, c.v, c.t)


def test_certificate_preconditions():
    with pytest.raises(PreconditionError):
        find_certificate_S(H, BASE.replace(gamma=2))
    with pytest.raises(PreconditionError):
        find_certificate_Tplus(H, TParams(0, 0, 1.5, 1, 1, 2, 2))


@pytest.mark.parametrize("prm", [BASE, BASE.replace(alpha=0.3, gamma=1.3), P1_H])
def test_closing_identities(prm):
    c = find_certificate_S(H, prm)
    for k, r in closing_identities(H, prm, c).items():
        assert abs(r) <= 1e-12, k


def test_verify_halfline_ratios_constant():
    c = find_certificate_S(H, BASE)
    samples = [np.array([y]) for y in (0.5, 1.0, 2.0, 5.0)]
    M1, M2, chk = verify_certificate_S(H, BASE, c, samples=samples, report=True)
    assert chk.spread1 < 0.01 and chk.spread2 < 0.01
    assert M1 > 0 and M2 > 0 and c.bound == pytest.approx(M1 * M2)


def test_verify_lorentz():
    prm = SParams(0.2, 0.1, 0.0, 2.0, 2.0, 2.0, 2.0)
    prm = prm.replace(gamma=homogeneous_gamma_S(L3, 0.2, 0.1, 2, 2, 2, 2))
    c = find_certificate_S(L3, prm)
    M1, M2 = verify_certificate_S(L3, prm, c, FAST)
    assert np.isfinite(M1 * M2)


def test_verify_p1_supremum_is_one():
    for cone, prm in ((H, P1_H), (L3, P1)):
        c = find_certificate_S(cone, prm)
        M1, M2, chk = verify_certificate_S(cone, prm, c, FAST, report=True)
        assert M1 == 1.0
        assert max(chk.ratios1) <= 1 + 1e-9


def test_perturbed_certificate_rejected():
    c = find_certificate_S(H, BASE)
    bad = OkikioluCertificate(c.kind, c.u + 2.0, c.v, c.t, c.omega, c.slack)
    with pytest.raises((DivergentIntegralError, CertificateError)):
        verify_certificate_S(H, BASE, bad)


def test_generic_check_rejects_bad_t():
    zero = lambda *a: 0.0
    for t in (0.0, 1.5, -0.2):
        with pytest.raises(PreconditionError):
            okikiolu_generic_check(H, zero, zero, zero, t, 2, 2)


def test_holder_bound_examples():
    # beta = 0, nu = 1, p = 2 forces gamma = alpha + 1/2
    prm = SParams(0.5, 0, 1.0, 1, 1, 2, math.inf)
    C = holder_bound_S_infty(H, prm)
    assert C > 0 and np.isfinite(C)
    prm = SParams(1.0, 0.5, 0, 2.0, 1, 2, math.inf)
    prm = prm.replace(gamma=homogeneous_gamma_S(L3, 1.0, 0.5, 2.0, 1, 2, math.inf))
    assert np.isfinite(holder_bound_S_infty(L3, prm, FAST))
    with pytest.raises(PreconditionError):
        holder_bound_S_infty(H, SParams(0, 0, 0.5, 1, 1, 2, math.inf))


def test_tube_verification_halfline():
    prm = TParams(0, 0, 1, 1, 1, 2, 2)
    c = find_certificate_Tplus(H, prm)
    M1, M2, chk = verify_certificate_Tplus(H, prm, c, report=True)
    assert chk.spread1 < 0.02 and chk.spread2 < 0.02
    for k, r in closing_identities(H, prm, c).items():
        assert abs(r) <= 1e-12, k


def test_certificate_roundtrip():
    c = find_certificate_S(H, BASE)
    assert OkikioluCertificate.from_dict(json.loads(c.to_json())).to_dict() == c.to_dict()
    verify_certificate_S(H, BASE, c)
    back = OkikioluCertificate.from_dict(json.loads(c.to_json()))
    assert back == c
