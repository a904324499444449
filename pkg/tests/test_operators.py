
import numpy as np
import pytest
from scipy import integrate

from bergcone.certificates import find_certificate_S, verify_certificate_S
from bergcone.cones import ConeDescriptor
from bergcone.decision import BOUNDED, SCOPE_ERROR, UNBOUNDED, SParams, TParams, homogeneous_gamma_S
from bergcone.operators import (
    apply_S,
    apply_Tplus,
    derive_homogeneous_gamma,
    dilation_probe,
    dilation_slope_predicted,
    necessity_probe_S,
    norm_lower_bound,
    norm_S_image,
    scan_phase_diagram,
)
from bergcone.testfunctions import (
    ConeBallIndicator,
    DetPower,
    Dilate,
    Mixture,
    TubeBoxIndicator,
    default_ball,
)

H = ConeDescriptor.halfline()
L3 = ConeDescriptor.lorentz(3)
P2 = ConeDescriptor.spd(2)
BASE = SParams(alpha=0, beta=0, gamma=1, nu=1, mu=1, p=2, q=2)


def test_apply_S_example():
    g = ConeBallIndicator([0.5], 0.5, nodes=16)
    val = apply_S(H, SParams(0, 0, 2, 1, 1, 2, 2), g, np.array([[1.0]]))
    assert float(np.squeeze(val)) == pytest.approx(0.5, rel=1e-12)


def test_apply_S_comparable_to_kernel_at_e():
    g = ConeBallIndicator([1.0], 1.0, nodes=16)
    prm = SParams(0.3, 0.2, 1.5, 1, 1, 2, 2)
    ys = np.geomspace(0.01, 100, 9)[:, None]
    vals = np.asarray(apply_S(H, prm, g, ys)).ravel()
    ref = ys[:, 0] ** prm.alpha * (ys[:, 0] + 1) ** -prm.gamma
    ratio = vals / ref
    assert ratio.max() / ratio.min() <= 16  # within [1/C, C] for C = 4


def test_apply_S_dilation_identity():
    # S(f_R)(y) = R^{-n + r(gamma - beta - alpha)} S f(R y)
    prm = SParams(0.2, 0.1, 1.7, 1, 1, 2, 2)
    f = default_ball(L3)
    y = np.array([[1.3, 0.2, -0.1]])
    for R in (0.5, 3.0):
        lhs = float(np.squeeze(apply_S(L3, prm, Dilate(f, R), y)))
        rhs = R ** (-3 + 2 * (prm.gamma - prm.beta - prm.alpha)) * float(
            np.squeeze(apply_S(L3, prm, f, R * y)))
        assert lhs == pytest.approx(rhs, rel=1e-10)


@pytest.mark.parametrize("cone", [H, L3, P2], ids=str)
def test_dilation_slope_zero_when_balanced(cone):
    prm = SParams(0.2, 0.1, 0.0, 2.0, 2.0, 2.0, 2.0)
    prm = prm.replace(gamma=homogeneous_gamma_S(cone, 0.2, 0.1, 2, 2, 2, 2))
    fit = dilation_probe(cone, prm, full=True)
    assert fit.slope == pytest.approx(0.0, abs=0.02)
    assert fit.norm_slope == pytest.approx(-cone.r * prm.nu / prm.p, abs=0.02)


def test_norm_prefactor_dilate_exact():
    # power integral of f_R scales exactly as R^{-n - r w}, w = nu - n/r
    f = default_ball(L3)
    nu, p = 2.0, 2.0
    base = f.norm(L3, p, nu)
    for R in (0.5, 2.0, 4.0):
        assert Dilate(f, R).norm(L3, p, nu) == pytest.approx(
            R ** (-L3.r * nu / p) * base, rel=1e-12)


def test_dilation_slope_shift_by_gamma():
    # raising gamma by 1 moves the exponent by +r on the half-line
    prm = BASE.replace(gamma=2.0)
    slope = dilation_probe(H, prm)
    assert dilation_slope_predicted(H, prm) == pytest.approx(1.0)
    assert slope == pytest.approx(1.0, abs=0.05)


def test_necessity_examples():
    assert necessity_probe_S(H, BASE).both_converge
    # mu at the lower threshold n/r - 1 - q alpha
    prm = SParams(0.3, 0.0, 0.0, 1.0, 0.0, 2.0, 2.0)
    prm = prm.replace(mu=1 - 1 - 2 * 0.3)
    prm = prm.replace(gamma=homogeneous_gamma_S(H, prm.alpha, prm.beta, prm.nu, prm.mu, 2, 2))
    rep = necessity_probe_S(H, prm)
    assert rep.direct_diverges
    # nu at the upper threshold p(beta + 1) + n/r - 1
    prm = SParams(0.5, 0.2, 0.0, 2 * 1.2, 1.0, 2.0, 2.0)
    prm = prm.replace(gamma=homogeneous_gamma_S(H, 0.5, 0.2, prm.nu, 1.0, 2, 2))
    assert necessity_probe_S(H, prm).adjoint_diverges


def test_apply_Tplus_matches_2d_oracle():
    prm = TParams(0, 0, 1, 1, 1, 2, 2)
    f = TubeBoxIndicator(np.array([0.0]), 0.5, ConeBallIndicator([1.0], 0.5, nodes=24), nodes=24)
    val = apply_Tplus(H, prm, f, np.array([1j]))
    ref, _ = integrate.dblquad(lambda y, x: 1 / (x**2 + (1 + y) ** 2), -0.5, 0.5, 0.5, 1.5)
    assert val == pytest.approx(ref, rel=0.01)


def test_apply_Tplus_translation_invariant():
    prm = TParams(0.3, 0.1, 1.2, 1, 1, 2, 2)
    f = TubeBoxIndicator(np.array([0.0]), 0.5, ConeBallIndicator([1.0], 0.5))
    g = TubeBoxIndicator(np.array([2.5]), 0.5, ConeBallIndicator([1.0], 0.5))
    a = apply_Tplus(H, prm, f, np.array([0.3 + 2j]))
    b = apply_Tplus(H, prm, g, np.array([2.8 + 2j]))
    assert a == pytest.approx(b, rel=1e-12)


def test_apply_Tplus_scaling():
    # T+(f(./R))(R z) = R^{n(1 + 1) + r(alpha + beta - gamma - n/r)} T+ f(z) on the half-plane
    prm = TParams(0.3, 0.1, 1.2, 1, 1, 2, 2)
    f = TubeBoxIndicator(np.array([0.0]), 0.5, ConeBallIndicator([1.0], 0.5))
    R = 2.0
    fR = TubeBoxIndicator(np.array([0.0]), 0.5 * R, ConeBallIndicator([R], 0.5 * R))
    z = np.array([0.4 + 1.5j])
    expo = 2 + prm.alpha + prm.beta - prm.gamma - 1
    assert apply_Tplus(H, prm, fR, R * z) == pytest.approx(R**expo * apply_Tplus(H, prm, f, z), rel=1e-10)


def test_norm_lower_bound_below_certificate():
    c = find_certificate_S(H, BASE)
    M1, M2 = verify_certificate_S(H, BASE, c)
    family = [Dilate(default_ball(H), R) for R in (0.3, 1.0, 3.0)]
    family.append(DetPower(1.5))
    family.append(Mixture([ConeBallIndicator([0.5], 0.2), ConeBallIndicator([2.0], 0.5)], [1.0, 0.3]))
    assert 0 < norm_lower_bound(H, BASE, family) <= 1.05 * M1 * M2
    assert norm_lower_bound(H, BASE, []) == 0.0


def test_norm_lower_bound_grows_when_unbalanced():
    prm = BASE.replace(gamma=2.0)
    vals = [norm_lower_bound(H, prm, [Dilate(default_ball(H), R)]) for R in (1.0, 8.0)]
    assert vals[1] / vals[0] >= 8 ** 0.5


def test_scan_halfline_region_shape():
    gammas = np.array([0.25, 0.75, 1.0, 1.25, 2.25])
    mus = np.array([-0.5, 0.5, 1.0, 1.5, 3.5])
    rep = scan_phase_diagram(H, dict(BASE.__dict__), "gamma", "mu", gammas, mus)
    assert rep.shape == (5, 5)
    for i, g in enumerate(gammas):
        for j, mu in enumerate(mus):
            hom = 0 + 0 + 1 - 0.5 + mu / 2
            ok = abs(g - hom) < 1e-9 and 0 < mu < 2 * g and 2 * (1 - g) < 1
            expect = BOUNDED if ok else UNBOUNDED
            if 1 / 2 + mu / 2 <= 0:
                expect = SCOPE_ERROR
            assert rep.statuses[i, j] == expect, (g, mu)
    # (0.75, 0.5), (1, 1), (1.25, 1.5), (2.25, 3.5); (0.25, -0.5) fails mu > 0
    assert (rep.statuses == BOUNDED).sum() == 4


def test_scan_projection_lorentz_boundary():
    qs = np.linspace(1.05, 6, 12)
    mus = np.linspace(0.6, 4, 9)
    base = dict(alpha=0, beta=0, gamma=0, nu=2.0, mu=1.0, p=2.0, q=2.0, s=2.0)

    def s_from_q(prm, cone):
        # keep the homogeneity nu/q = mu/s so only the q window matters
        return prm["mu"] * prm["q"] / prm["nu"]

    rep = scan_phase_diagram(L3, base, "q", "mu", qs, mus, op="Pplus", derive={"s": s_from_q})
    for i, q in enumerate(qs):
        for j, mu in enumerate(mus):
            s = mu * q / 2.0
            if not q <= s:
                assert rep.statuses[i, j] == SCOPE_ERROR
                continue
            inside = 1 + 0.5 / mu < q < 1 + 2.0 / 0.5
            assert (rep.statuses[i, j] == BOUNDED) == inside, (q, mu)


def test_scan_single_point_and_csv():
    rep = scan_phase_diagram(H, dict(BASE.__dict__), "gamma", "mu", [1.0], [1.0])
    assert rep.shape == (1, 1)
    lines = rep.to_csv().strip().splitlines()
    assert lines[0] == "axis1,axis2,status,violated,indicator"
    assert lines[1].startswith("1.0,1.0,Bounded")


def test_scan_threads_deterministic():
    args = (H, dict(BASE.__dict__), "nu", "mu", np.linspace(0, 3, 3), np.linspace(0, 3, 3))
    kw = dict(derive={"gamma": derive_homogeneous_gamma}, indicator=True)
    a = scan_phase_diagram(*args, **kw).to_csv()
    b = scan_phase_diagram(*args, workers=3, **kw).to_csv()
    assert a == b


def test_norm_image_invariant_mode_agrees():
    prm = SParams(0.2, 0.1, 0.0, 2.0, 2.0, 2.0, 2.0)
    prm = prm.replace(gamma=homogeneous_gamma_S(L3, 0.2, 0.1, 2, 2, 2, 2))
    g = default_ball(L3, nodes=4)
    a = norm_S_image(L3, prm, g, symmetric=True)
    b = norm_S_image(L3, prm, g, symmetric=False)
    assert a == pytest.approx(b, rel=1e-3)
