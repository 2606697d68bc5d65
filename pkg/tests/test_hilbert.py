import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from reframe.groups import SU2, U1, compose, identity, inverse, random_element
from reframe.hilbert import (
    PhysicalityError, ProductSpace, Space, check_density, fidelity, ket_to_density, partial_trace,
    random_density, rep_unitary, rep_unitaries, tensor, trace_distance, wigner_matrix,
)

SPACES = [Space.fock(3), Space.spin(0.5), Space.spin(1), Space.spin(1.5), Space.su2_regular(1)]


def test_fock_phase_rotation():
    np.testing.assert_allclose(rep_unitary(Space.fock(2), U1(math.pi)), np.diag([1, -1, 1]), atol=1e-15)


def test_spin_half_z_half_turn():
    u = rep_unitary(Space.spin(0.5), SU2.from_polar(math.pi, 0.0, 0.0))
    np.testing.assert_allclose(u, np.diag([1j, -1j]), atol=1e-15)


def test_spin_half_matches_defining_matrix(rng):
    for _ in range(10):
        g = random_element("su2", rng)
        np.testing.assert_allclose(wigner_matrix(1, g), g.matrix, atol=1e-13)


def test_euler_convention_spin_one():
    # e^{-i a Jz} e^{-i b Jy} e^{-i c Jz}: the (m=1, m'=1) entry is e^{-i(a+c)} cos^2(b/2)
    a, b, c = 0.4, 1.2, -0.7
    d = wigner_matrix(2, SU2.from_euler(a, b, c))
    assert abs(d[0, 0] - np.exp(-1j * (a + c)) * math.cos(b / 2) ** 2) < 1e-13


@pytest.mark.parametrize("space", SPACES, ids=lambda s: f"{s.group}-{s.dim}")
def test_identity_element(space):
    np.testing.assert_allclose(rep_unitary(space, identity(space.group)), np.eye(space.dim), atol=1e-13)


@pytest.mark.parametrize("space", SPACES, ids=lambda s: f"{s.group}-{s.dim}")
def test_homomorphism(space, rng):
    for _ in range(100):
        g, h = random_element(space.group, rng), random_element(space.group, rng)
        lhs = rep_unitary(space, g) @ rep_unitary(space, h)
        assert np.max(np.abs(lhs - rep_unitary(space, compose(g, h)))) < 1e-11
        assert np.max(np.abs(rep_unitary(space, inverse(g)) - rep_unitary(space, g).conj().T)) < 1e-12


def test_batched_matches_single(rng):
    for space in SPACES:
        els = [random_element(space.group, rng) for _ in range(5)]
        stack = rep_unitaries(space, els)
        for u, g in zip(stack, els):
            np.testing.assert_allclose(u, rep_unitary(space, g), atol=1e-13)


def test_product_representation(rng):
    a, b = Space.spin(0.5), Space.spin(1)
    prod = tensor(a, b)
    assert isinstance(prod, ProductSpace) and prod.dim == 6
    g = random_element("su2", rng)
    np.testing.assert_allclose(rep_unitary(prod, g), np.kron(rep_unitary(a, g), rep_unitary(b, g)), atol=1e-12)


def test_mixed_groups_rejected():
    with pytest.raises(TypeError):
        rep_unitary(Space.fock(1), SU2.identity())
    with pytest.raises(TypeError):
        ProductSpace((Space.fock(1), Space.spin(1)))


def test_partial_trace_product_and_bell(rng):
    ra, rb = random_density(2, rng), random_density(3, rng)
    np.testing.assert_allclose(partial_trace(np.kron(ra, rb), (2, 3), 0), ra, atol=1e-13)
    np.testing.assert_allclose(partial_trace(np.kron(ra, rb), (2, 3), 1), rb, atol=1e-13)
    bell = ket_to_density(np.array([1, 0, 0, 1]) / math.sqrt(2))
    np.testing.assert_allclose(partial_trace(bell, (2, 2), 1), np.eye(2) / 2, atol=1e-15)


@given(st.integers(min_value=0, max_value=2**31))
def test_partial_trace_preserves_trace(seed):
    rho = random_density(12, np.random.default_rng(seed))
    for keep in (0, 1, 2, (0, 2)):
        assert abs(np.trace(partial_trace(rho, (2, 3, 2), keep)) - 1) < 1e-13


def test_partial_trace_bad_dims():
    with pytest.raises(ValueError):
        partial_trace(np.eye(6) / 6, (2, 2), 0)


def test_fidelity_examples():
    assert fidelity(np.diag([1, 0]), np.diag([0.5, 0.5])) == pytest.approx(math.sqrt(0.5), abs=1e-10)
    assert fidelity(np.diag([1, 0]), np.diag([0, 1])) == pytest.approx(0.0, abs=1e-12)
    assert trace_distance(np.diag([1, 0]), np.diag([0, 1])) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        fidelity(np.eye(2) / 2, np.eye(3) / 3)


@given(st.integers(min_value=0, max_value=2**31))
def test_metric_ranges(seed):
    r = np.random.default_rng(seed)
    rho, sigma = random_density(3, r), random_density(3, r)
    assert fidelity(rho, rho) == pytest.approx(1.0, abs=1e-10)
    assert trace_distance(rho, rho) < 1e-12
    f, t = fidelity(rho, sigma), trace_distance(rho, sigma)
    assert 0 <= f <= 1 and 0 <= t <= 1
    # Fuchs-van de Graaf
    assert 1 - f <= t + 1e-12 and t <= math.sqrt(1 - f * f) + 1e-10


def test_check_density_rejects():
    with pytest.raises(PhysicalityError):
        check_density(np.diag([1.2, -0.2]))
    with pytest.raises(PhysicalityError):
        check_density(np.array([[0.5, 0.1], [0.0, 0.5]]))
    with pytest.raises(PhysicalityError):
        check_density(np.eye(2))


def test_sector_basis_m_order():
    np.testing.assert_allclose(Space.spin(1).basis_m(), [1, 0, -1])
    s = Space.su2_regular(1)
    assert s.dim == 10
    np.testing.assert_allclose(s.basis_m(), [0, 1, 1, 1, 0, 0, 0, -1, -1, -1])
