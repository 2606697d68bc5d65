"""Group elements of U(1) and SU(2) and Haar quadrature grids.

SU(2) elements are stored as 2x2 special-unitary matrices (the spin-1/2
representation in the basis m = +1/2, -1/2).  Polar and Euler angles are
views computed from the matrix, so there is no coordinate singularity in the
stored value.

Conventions::

    polar:  U(omega, theta, phi) = exp(i * omega * n.J)
            n = (sin(theta) cos(phi), sin(theta) sin(phi), cos(theta))
    euler:  U(alpha, beta, gamma) = exp(-i alpha Jz) exp(-i beta Jy) exp(-i gamma Jz)
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Union

import numpy as np

TWO_PI = 2.0 * math.pi

_SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
_SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)


def _wrap(angle: float, period: float = TWO_PI) -> float:
    out = math.fmod(angle, period)
    if out < 0:
        out += period
    if out >= period:
        out = 0.0
    return out


@dataclass(frozen=True)
class U1:
    """A phase rotation; ``theta`` is canonicalised to [0, 2pi)."""

    theta: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "theta", _wrap(float(self.theta)))

    group = "u1"

    def same_as(self, other: "U1", atol: float = 1e-12) -> bool:
        d = abs(self.theta - other.theta)
        return min(d, TWO_PI - d) <= atol


class SU2:
    """An element of SU(2), held as its 2x2 matrix."""

    __slots__ = ("_m",)
    group = "su2"

    def __init__(self, matrix):
        m = np.array(matrix, dtype=complex)
        if m.shape != (2, 2):
            raise ValueError("SU(2) matrix must be 2x2")
        if not np.allclose(m @ m.conj().T, np.eye(2), atol=1e-10):
            raise ValueError("matrix is not unitary")
        if abs(np.linalg.det(m) - 1.0) > 1e-10:
            raise ValueError("matrix does not have unit determinant")
        m.setflags(write=False)
        self._m = m

    @property
    def matrix(self) -> np.ndarray:
        return self._m

    @classmethod
    def identity(cls) -> "SU2":
        return cls(np.eye(2))

    @classmethod
    def from_polar(cls, omega: float, theta: float, phi: float) -> "SU2":
        n = (math.sin(theta) * math.cos(phi), math.sin(theta) * math.sin(phi), math.cos(theta))
        return cls.from_rotation_vector(omega * np.asarray(n))

    @classmethod
    def from_rotation_vector(cls, v) -> "SU2":
        """exp(i v.J) for the spin-1/2 generators J = sigma/2."""
        v = np.asarray(v, dtype=float)
        omega = float(np.linalg.norm(v))
        if omega == 0.0:
            return cls.identity()
        n = v / omega
        ns = n[0] * _SIGMA_X + n[1] * _SIGMA_Y + n[2] * _SIGMA_Z
        return cls(math.cos(omega / 2) * np.eye(2) + 1j * math.sin(omega / 2) * ns)

    @classmethod
    def from_euler(cls, alpha: float, beta: float, gamma: float) -> "SU2":
        rz_a = np.diag([np.exp(-0.5j * alpha), np.exp(0.5j * alpha)])
        c, s = math.cos(beta / 2), math.sin(beta / 2)
        ry = np.array([[c, -s], [s, c]], dtype=complex)
        rz_g = np.diag([np.exp(-0.5j * gamma), np.exp(0.5j * gamma)])
        return cls(rz_a @ ry @ rz_g)

    def rotation_vector(self) -> np.ndarray:
        """Vector omega*n with exp(i omega n.J) = self and omega in [0, 2pi]."""
        m = self._m
        c = 0.5 * (m[0, 0] + m[1, 1]).real
        # m = c I + i s n.sigma
        sv = np.array([m[0, 1].imag, m[0, 1].real, m[0, 0].imag])
        s = float(np.linalg.norm(sv))
        if s < 1e-300:
            if c > 0:
                return np.zeros(3)
            return np.array([0.0, 0.0, TWO_PI])
        omega = 2.0 * math.atan2(s, c)
        return omega * sv / s

    def polar(self, fold: bool = False) -> tuple[float, float, float]:
        """(omega, theta, phi).

        With ``fold`` the element is identified with its negative and omega is
        brought into [0, pi], the SO(3) range.
        """
        v = self.rotation_vector()
        omega = float(np.linalg.norm(v))
        if omega == 0.0:
            return 0.0, 0.0, 0.0
        n = v / omega
        if fold and omega > math.pi:
            omega = TWO_PI - omega
            n = -n
        theta = math.acos(max(-1.0, min(1.0, n[2])))
        phi = _wrap(math.atan2(n[1], n[0]))
        return omega, theta, phi

    def euler(self) -> tuple[float, float, float]:
        """(alpha, beta, gamma) with alpha in [0, 2pi), beta in [0, pi], gamma in [0, 4pi)."""
        m = self._m
        beta = 2.0 * math.atan2(abs(m[1, 0]), abs(m[0, 0]))
        if abs(m[1, 0]) < 1e-14:
            # only alpha + gamma is defined
            alpha, gamma = 0.0, -2.0 * float(np.angle(m[0, 0]))
        elif abs(m[0, 0]) < 1e-14:
            # only alpha - gamma is defined
            alpha, gamma = 2.0 * float(np.angle(m[1, 0])), 0.0
        else:
            s = -2.0 * float(np.angle(m[0, 0]))  # alpha + gamma
            d = 2.0 * float(np.angle(m[1, 0]))  # alpha - gamma
            alpha = 0.5 * (s + d)
            gamma = 0.5 * (s - d)
        # alpha -> alpha + 2pi flips the sign of the matrix; compensate with gamma
        a = _wrap(alpha, 2 * TWO_PI)
        if a >= TWO_PI:
            a -= TWO_PI
            gamma += TWO_PI
        return a, beta, _wrap(gamma, 2 * TWO_PI)

    def same_as(self, other: "SU2", atol: float = 1e-12) -> bool:
        return bool(np.max(np.abs(self._m - other._m)) <= atol)

    def same_rotation(self, other: "SU2", atol: float = 1e-12) -> bool:
        """Equality in SO(3), i.e. up to the sign of the SU(2) matrix."""
        return self.same_as(other, atol) or bool(np.max(np.abs(self._m + other._m)) <= atol)

    def __repr__(self):
        w, t, p = self.polar()
        return f"SU2(omega={w:.6g}, theta={t:.6g}, phi={p:.6g})"


GroupElement = Union[U1, SU2]


def group_of(g) -> str:
    if isinstance(g, U1):
        return "u1"
    if isinstance(g, SU2):
        return "su2"
    raise TypeError(f"not a group element: {g!r}")


def identity(group: str) -> GroupElement:
    if group == "u1":
        return U1(0.0)
    if group == "su2":
        return SU2.identity()
    raise ValueError(f"unknown group {group!r}")


def compose(g: GroupElement, h: GroupElement) -> GroupElement:
    """The product gh."""
    if isinstance(g, U1) and isinstance(h, U1):
        return U1(g.theta + h.theta)
    if isinstance(g, SU2) and isinstance(h, SU2):
        return SU2(g.matrix @ h.matrix)
    raise TypeError(f"cannot compose {type(g).__name__} with {type(h).__name__}")


def inverse(g: GroupElement) -> GroupElement:
    if isinstance(g, U1):
        return U1(-g.theta)
    if isinstance(g, SU2):
        return SU2(g.matrix.conj().T)
    raise TypeError(f"not a group element: {g!r}")


def random_element(group: str, rng: np.random.Generator) -> GroupElement:
    """Haar-random element (for tests and randomised checks)."""
    if group == "u1":
        return U1(rng.uniform(0, TWO_PI))
    if group == "su2":
        q = rng.normal(size=4)
        q /= np.linalg.norm(q)
        a, b = q[0] + 1j * q[1], q[2] + 1j * q[3]
        return SU2(np.array([[a, -b.conjugate()], [b, a.conjugate()]]))
    raise ValueError(f"unknown group {group!r}")


@dataclass(frozen=True)
class HaarGrid:
    """Quadrature nodes and weights for the normalised Haar measure.

    ``bandlimit`` is the largest |charge| (U(1)) or largest 2j (SU(2)) of the
    irrep matrix elements the rule integrates exactly.
    """

    group: str
    nodes: tuple
    weights: np.ndarray
    bandlimit: int
    scheme: str = "uniform"
    cover: str = "su2"
    angles: np.ndarray | None = field(default=None, repr=False, compare=False)
    matrices: np.ndarray | None = field(default=None, repr=False, compare=False)

    def __len__(self):
        return len(self.nodes)

    def shifted(self, h: GroupElement, side: str = "left") -> "HaarGrid":
        """Grid with nodes h*g_i (or g_i*h); same weights."""
        if side == "left":
            nodes = tuple(compose(h, g) for g in self.nodes)
        else:
            nodes = tuple(compose(g, h) for g in self.nodes)
        return _make_grid(self.group, nodes, self.weights, self.bandlimit, self.scheme, self.cover)

    def exact_for(self, bandlimit: int, half_integer: bool = False) -> bool:
        if bandlimit > self.bandlimit:
            return False
        if half_integer and self.group == "su2" and self.cover == "so3":
            return False
        return True


def _make_grid(group, nodes, weights, bandlimit, scheme, cover) -> HaarGrid:
    weights = np.asarray(weights, dtype=float)
    weights.setflags(write=False)
    if group == "u1":
        angles = np.array([g.theta for g in nodes])
        return HaarGrid(group, tuple(nodes), weights, bandlimit, scheme, cover, angles=angles)
    mats = np.array([g.matrix for g in nodes])
    return HaarGrid(group, tuple(nodes), weights, bandlimit, scheme, cover, matrices=mats)


@lru_cache(maxsize=64)
def haar_grid(group: str, bandlimit: int, *, scheme: str = "polar", cover: str = "su2",
              azimuth: str = "full") -> HaarGrid:
    """Product quadrature exact for irrep matrix elements up to ``bandlimit``.

    U(1): 2*bandlimit + 1 equally spaced phases.

    SU(2), ``scheme="polar"``: midpoint rule in the rotation angle against
    sin^2(omega/2), Gauss-Legendre in cos(theta), equally spaced phi.
    ``cover="so3"`` restricts omega to [0, pi), which is exact only for
    integrands invariant under U -> -U (integer total spin).
    ``scheme="euler"``: equally spaced alpha and gamma, Gauss-Legendre in
    cos(beta).

    ``azimuth="half"`` takes phi in [0, pi) instead of [0, 2pi); that set of
    axes does not cover the sphere, so the resulting rule is not invariant.
    """
    bandlimit = int(bandlimit)
    if bandlimit < 0:
        raise ValueError("bandlimit must be non-negative")
    if group == "u1":
        n = 2 * bandlimit + 1
        nodes = tuple(U1(TWO_PI * k / n) for k in range(n))
        return _make_grid("u1", nodes, np.full(n, 1.0 / n), bandlimit, "uniform", "u1")
    if group != "su2":
        raise ValueError(f"unknown group {group!r}")
    if cover not in ("su2", "so3"):
        raise ValueError(f"unknown cover {cover!r}")
    if scheme == "polar":
        return _polar_grid(bandlimit, cover, azimuth)
    if scheme == "euler":
        return _euler_grid(bandlimit, cover)
    raise ValueError(f"unknown scheme {scheme!r}")


def _polar_grid(bandlimit: int, cover: str, azimuth: str) -> HaarGrid:
    top_spin = bandlimit / 2.0
    n_omega = int(math.ceil(top_spin)) + 2
    n_theta = bandlimit // 2 + 1
    n_phi = bandlimit + 1
    n_phi += n_phi % 2  # antipodal symmetry of the axis set needs an even count
    omega_max = TWO_PI if cover == "su2" else math.pi
    omegas = (np.arange(n_omega) + 0.5) * omega_max / n_omega
    w_omega = np.sin(omegas / 2) ** 2
    x, w_theta = np.polynomial.legendre.leggauss(n_theta)
    thetas = np.arccos(x)
    if azimuth == "full":
        phis = TWO_PI * np.arange(n_phi) / n_phi
    elif azimuth == "half":
        phis = math.pi * np.arange(n_phi) / n_phi
    else:
        raise ValueError(f"unknown azimuth convention {azimuth!r}")
    nodes, weights = [], []
    for wo, om in zip(w_omega, omegas):
        for wt, th in zip(w_theta, thetas):
            for ph in phis:
                nodes.append(SU2.from_polar(om, th, ph))
                weights.append(wo * wt)
    weights = np.array(weights)
    weights /= weights.sum()
    return _make_grid("su2", nodes, weights, bandlimit, "polar", cover)


def _euler_grid(bandlimit: int, cover: str) -> HaarGrid:
    n_alpha = bandlimit + 1
    n_gamma = bandlimit + 1
    n_beta = bandlimit // 2 + 1
    gamma_max = 2 * TWO_PI if cover == "su2" else TWO_PI
    alphas = TWO_PI * np.arange(n_alpha) / n_alpha
    gammas = gamma_max * np.arange(n_gamma) / n_gamma
    x, w_beta = np.polynomial.legendre.leggauss(n_beta)
    betas = np.arccos(x)
    nodes, weights = [], []
    for a in alphas:
        for wb, b in zip(w_beta, betas):
            for g in gammas:
                nodes.append(SU2.from_euler(a, b, g))
                weights.append(wb)
    weights = np.array(weights)
    weights /= weights.sum()
    return _make_grid("su2", nodes, weights, bandlimit, "euler", cover)
