import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from reframe.groups import SU2, U1, compose, haar_grid, identity, inverse, random_element
from reframe.frames import su2_character

angles = st.floats(min_value=-20, max_value=20, allow_nan=False)


def test_u1_canonical_range():
    assert U1(-math.pi / 2).theta == pytest.approx(3 * math.pi / 2)
    assert U1(4 * math.pi).theta == pytest.approx(0.0)


def test_u1_compose_adds_phases():
    g = compose(U1(math.pi / 2), U1(math.pi / 2))
    assert g.same_as(U1(math.pi))


def test_u1_inverse():
    assert inverse(U1(1.0)).same_as(U1(2 * math.pi - 1.0))
    assert inverse(identity("u1")).same_as(identity("u1"))


def test_su2_half_turns_square_to_minus_identity():
    g = SU2.from_polar(math.pi, 0.0, 0.0)
    gg = compose(g, g)
    np.testing.assert_allclose(gg.matrix, -np.eye(2), atol=1e-14)
    assert gg.same_rotation(SU2.identity())
    assert not gg.same_as(SU2.identity())


def test_su2_euler_inverse_is_adjoint():
    g = SU2.from_euler(0.3, 1.1, 2.5)
    np.testing.assert_allclose(inverse(g).matrix, g.matrix.conj().T, atol=1e-15)


def test_mixed_groups_refused():
    with pytest.raises(TypeError):
        compose(U1(0.1), SU2.identity())


@given(angles, angles, angles)
def test_polar_roundtrip(w, t, p):
    g = SU2.from_polar(w, t, p)
    h = SU2.from_polar(*g.polar())
    assert h.same_as(g, atol=1e-10)


@given(angles, angles, angles)
def test_euler_roundtrip(a, b, c):
    g = SU2.from_euler(a, b, c)
    h = SU2.from_euler(*g.euler())
    assert h.same_as(g, atol=1e-10)


def test_associativity(rng):
    for _ in range(50):
        a, b, c = (random_element("su2", rng) for _ in range(3))
        assert compose(compose(a, b), c).same_as(compose(a, compose(b, c)), atol=1e-12)


def test_u1_grid_nodes_and_orthogonality():
    grid = haar_grid("u1", 2)
    assert len(grid) == 5
    np.testing.assert_allclose(grid.weights, 0.2)
    for k in range(-2, 3):
        s = np.sum(grid.weights * np.exp(1j * k * grid.angles))
        assert abs(s - (k == 0)) < 1e-15


@pytest.mark.parametrize("bl", [0, 1, 3, 7])
def test_grid_weights_normalised(bl):
    for group in ("u1", "su2"):
        assert abs(haar_grid(group, bl).weights.sum() - 1) < 1e-14


@pytest.mark.parametrize("scheme", ["polar", "euler"])
def test_su2_character_orthogonality(scheme):
    grid = haar_grid("su2", 2, scheme=scheme)
    for two_j in range(3):
        chi = [su2_character(two_j, g.polar()[0]) for g in grid.nodes]
        assert abs(np.dot(grid.weights, chi) - (two_j == 0)) < 1e-12


def test_so3_cover_misses_spin_half():
    grid = haar_grid("su2", 2, cover="so3")
    chi = [su2_character(1, g.polar()[0]) for g in grid.nodes]
    assert abs(np.dot(grid.weights, chi)) > 0.1
    assert not grid.exact_for(1, half_integer=True)


def test_left_invariance(rng):
    from reframe.hilbert import wigner_matrix

    grid = haar_grid("su2", 8)  # |D^2|^2 carries spins up to 4
    h = random_element("su2", rng)
    f = lambda g: wigner_matrix(4, g)[1, 3] * np.conj(wigner_matrix(4, g)[1, 3])
    a = sum(w * f(g) for w, g in zip(grid.weights, grid.nodes))
    b = sum(w * f(compose(h, g)) for w, g in zip(grid.weights, grid.nodes))
    assert abs(a - b) < 1e-11
    assert abs(a - 1 / 5) < 1e-11  # Schur orthogonality


def test_negative_bandlimit():
    with pytest.raises(ValueError):
        haar_grid("u1", -1)
