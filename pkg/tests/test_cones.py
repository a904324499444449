import math

import numpy as np
import pytest

from bergcone.cones import (
    ConeDescriptor,
    complex_determinant,
    contains,
    determinant,
    from_matrix,
    generalized_power,
    identity,
    principal_minor,
    principal_minors,
    shifted_determinant,
    to_matrix,
)
from bergcone.exceptions import DimensionError, NotInConeError

H = ConeDescriptor.halfline()
L3 = ConeDescriptor.lorentz(3)
P2 = ConeDescriptor.spd(2)
CONES = [H, L3, P2, ConeDescriptor.lorentz(4), ConeDescriptor.spd(3)]


def random_points(cone, m, seed=0):
    rng = np.random.default_rng(seed)
    if cone.kind == "halfline":
        return rng.uniform(0.1, 5, size=(m, 1))
    if cone.kind == "lorentz":
        x = rng.normal(size=(m, cone.n - 1))
        return np.column_stack([np.linalg.norm(x, axis=1) + rng.uniform(0.05, 2, m), x])
    a = rng.normal(size=(m, cone.r, cone.r))
    mats = a @ np.swapaxes(a, 1, 2) + 0.1 * np.eye(cone.r)
    return np.array([from_matrix(cone, M) for M in mats])


def test_descriptor_invariants():
    assert (H.n, H.r, H.d) == (1, 1, 0)
    assert (L3.n, L3.r, L3.d) == (3, 2, 1)
    assert (P2.n, P2.r, P2.d) == (3, 2, 1)
    for c in CONES:
        assert math.isclose((c.r - 1) * c.d / 2, c.n / c.r - 1)


def test_parse_roundtrip():
    for c in CONES:
        assert ConeDescriptor.parse(str(c)) == c
    with pytest.raises((ValueError, DimensionError)):
        ConeDescriptor.parse("ball:3")


def test_contains_examples():
    assert contains(L3, [2, 1, 0])
    assert not contains(L3, [1, 1, 0])
    assert not contains(P2, from_matrix(P2, [[1, 2], [2, 1]]))
    with pytest.raises(DimensionError):
        contains(L3, [1, 0])


def test_identity_examples():
    np.testing.assert_array_equal(identity(H), [1.0])
    np.testing.assert_array_equal(identity(L3), [1.0, 0.0, 0.0])
    np.testing.assert_array_equal(to_matrix(P2, identity(P2)), np.eye(2))
    for c in CONES:
        assert determinant(c, identity(c)) == pytest.approx(1.0)
        np.testing.assert_allclose(principal_minors(c, identity(c)), 1.0)


def test_determinant_examples():
    assert determinant(L3, [2, 1, 1]) == pytest.approx(2.0)
    assert determinant(H, [3.5]) == pytest.approx(3.5)
    assert determinant(P2, from_matrix(P2, [[2, 1], [1, 2]])) == pytest.approx(3.0)


def test_minor_examples():
    A = from_matrix(P2, [[2, 1], [1, 2]])
    assert principal_minor(P2, 1, A) == pytest.approx(2.0)
    assert principal_minor(L3, 2, [2, 1, 1]) == pytest.approx(2.0)
    # Lorentz frame: first minor y1 + y_n
    assert principal_minor(L3, 1, [2, 1, 1]) == pytest.approx(3.0)
    with pytest.raises((ValueError, DimensionError)):
        principal_minor(L3, 3, [2, 1, 1])


def test_generalized_power_examples():
    A = from_matrix(P2, [[2, 1], [1, 2]])
    assert generalized_power(P2, (1, 1), A) == pytest.approx(3.0)
    assert generalized_power(P2, (1, 0), A) == pytest.approx(2.0)
    for c in CONES:
        assert generalized_power(c, np.linspace(-1, 2, c.r), identity(c)) == pytest.approx(1.0)
    with pytest.raises(NotInConeError):
        generalized_power(L3, 1.0, [1, 1, 0])


def test_complex_determinant_examples():
    assert complex_determinant(H, np.array([1j]) / 1j) == pytest.approx(1.0)
    assert complex_determinant(L3, np.array([1j, 0, 0]) / 1j) == pytest.approx(1.0)
    assert abs(complex_determinant(H, np.array([1 + 1j]) / 1j)) == pytest.approx(math.sqrt(2))


@pytest.mark.parametrize("cone", CONES, ids=str)
def test_homogeneity(cone):
    pts = random_points(cone, 50)
    for lam in (0.3, 2.0, 7.5):
        np.testing.assert_allclose(determinant(cone, lam * pts),
                                   lam**cone.r * determinant(cone, pts), rtol=1e-12)


@pytest.mark.parametrize("cone", CONES, ids=str)
def test_monotone_under_addition(cone):
    a = random_points(cone, 100, seed=1)
    b = random_points(cone, 100, seed=2)
    assert np.all(determinant(cone, a + b) >= determinant(cone, a))


@pytest.mark.parametrize("cone", CONES, ids=str)
def test_scalar_power_matches_determinant(cone):
    pts = random_points(cone, 50, seed=3)
    for a in (-2.3, 0.7, 1.5):
        np.testing.assert_allclose(generalized_power(cone, a, pts),
                                   determinant(cone, pts) ** a, rtol=1e-12)


def test_spd2_matches_lorentz3():
    # (y11, y22, y12) -> ((y11 + y22)/2, (y11 - y22)/2, y12) preserves the determinant
    for y in random_points(P2, 3, seed=4):
        y11, y22, y12 = y
        lor = np.array([(y11 + y22) / 2, (y11 - y22) / 2, y12])
        assert determinant(L3, lor) == pytest.approx(determinant(P2, y), rel=1e-13)


@pytest.mark.parametrize("cone", CONES, ids=str)
def test_complex_determinant_on_imaginary_axis(cone):
    y = random_points(cone, 10, seed=5)
    np.testing.assert_allclose(complex_determinant(cone, 1j * y / 1j), determinant(cone, y), rtol=1e-12)


@pytest.mark.parametrize("cone", CONES, ids=str)
def test_shifted_determinant_accuracy(cone):
    y = random_points(cone, 40, seed=6)
    v = random_points(cone, 40, seed=7)
    np.testing.assert_allclose(shifted_determinant(cone, y, v), determinant(cone, y + v), rtol=1e-10)


def test_shifted_determinant_far_along_boundary():
    # y = R(1, 1 - eps, 0): naive evaluation of Delta(y + e) cancels to 0
    R, eps = 1e9, 1e-12
    y = np.array([R, R * (1 - eps), 0.0])
    dy = R**2 * eps * (2 - eps)
    exact = dy + 2 * (R - 0.0) + 1.0  # cross term 2 y1 for v = e
    assert shifted_determinant(L3, y, identity(L3), dy) == pytest.approx(exact, rel=1e-9)
