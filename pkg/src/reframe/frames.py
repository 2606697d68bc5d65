"""Reference-frame state families and their overlap functions.

Four families are supported:

``pe``            U(1) phase eigenstate with photon cutoff s
``u1-coherent``   U(1) coherent state with amplitude s = sqrt(<n>), truncated
``su2-fiducial``  SU(2) Cartesian frame on integer spins 0..s (regular rep)
``su2-coherent``  SU(2) spin coherent state (direction indicator) of spin j
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from math import comb

import numpy as np
from scipy.special import gammaln
from scipy.stats import poisson

from .groups import SU2, U1, GroupElement, compose, inverse
from .hilbert import Space, _two_j, rep_unitaries, rep_unitary

FAMILIES = ("pe", "u1-coherent", "su2-fiducial", "su2-coherent")

#: smallest retained Poisson mass accepted for truncated coherent states
MIN_COHERENT_MASS = 0.9999


class FrameError(ValueError):
    pass


def phase_eigenstate(s: int, g: U1 | float = 0.0) -> np.ndarray:
    """|s; g> = (s+1)^(-1/2) sum_k exp(i k g) |k>."""
    s = int(s)
    if s < 0:
        raise FrameError("cutoff must be non-negative")
    theta = g.theta if isinstance(g, U1) else float(g)
    k = np.arange(s + 1)
    return np.exp(1j * k * theta) / math.sqrt(s + 1)


def coherent_mass(amplitude: float, cutoff: int) -> float:
    """Poisson probability of at most ``cutoff`` photons at mean amplitude**2."""
    if amplitude == 0:
        return 1.0
    return float(poisson.cdf(cutoff, amplitude ** 2))


def coherent_cutoff(amplitude: float, mass: float = MIN_COHERENT_MASS) -> int:
    """Smallest photon cutoff retaining at least ``mass`` of the Poisson weight."""
    if amplitude == 0:
        return 0
    lam = amplitude ** 2
    tail = 1.0 - mass
    c = max(int(poisson.isf(tail, lam)) - 1, 0)
    while poisson.sf(c, lam) > tail:
        c += 1
    while c > 0 and poisson.sf(c - 1, lam) <= tail:
        c -= 1
    return c


def coherent_amplitudes(amplitude: float, cutoff: int) -> np.ndarray:
    """Unnormalised truncated coefficients exp(-s^2/2) s^k / sqrt(k!)."""
    k = np.arange(int(cutoff) + 1)
    if amplitude == 0:
        out = np.zeros(len(k))
        out[0] = 1.0
        return out
    return np.exp(-amplitude ** 2 / 2 + k * math.log(amplitude) - 0.5 * gammaln(k + 1))


def u1_coherent(amplitude: float, g: U1 | float = 0.0, cutoff: int | None = None, *,
                normalize: bool = True) -> np.ndarray:
    """Truncated coherent state of amplitude ``amplitude`` and phase ``g``.

    The default cutoff keeps 99.99% of the Poisson mass; an explicit cutoff
    keeping less is refused.
    """
    amplitude = float(amplitude)
    if amplitude < 0:
        raise FrameError("amplitude must be non-negative")
    if cutoff is None:
        cutoff = coherent_cutoff(amplitude)
    mass = coherent_mass(amplitude, cutoff)
    if mass < MIN_COHERENT_MASS:
        raise FrameError(f"cutoff {cutoff} keeps only {mass:.6f} of the photon-number distribution")
    theta = g.theta if isinstance(g, U1) else float(g)
    c = coherent_amplitudes(amplitude, cutoff)
    psi = c * np.exp(1j * np.arange(cutoff + 1) * theta)
    if normalize:
        psi = psi / np.linalg.norm(psi)
    return psi


def fiducial_dimension(s: int) -> int:
    """sum_{j<=s} (2j+1)^2 = (2s+1)(2s+3)(s+1)/3."""
    return comb(2 * int(s) + 3, 3)


def su2_fiducial(s: int, g: SU2 | None = None) -> np.ndarray:
    """Cartesian-frame state U(g)|s; e> on :meth:`Space.su2_regular`.

    Sector j carries sqrt(2j+1)/sqrt(D_s) times sum_m |j,m> x |phi_{j,m}>, with
    the multiplicity basis paired index-to-index with m.
    """
    s = int(s)
    if s < 0:
        raise FrameError("s must be a non-negative integer")
    space = Space.su2_regular(s)
    dim_s = fiducial_dimension(s)
    psi = np.zeros(space.dim, dtype=complex)
    for sector, sl in space.sector_slices():
        d = sector.irrep_dim
        psi[sl] = np.sqrt(d / dim_s) * np.eye(d).ravel()
    if g is not None:
        psi = rep_unitary(space, g) @ psi
    return psi


def su2_coherent(j: float, alpha: float = 0.0, beta: float = 0.0, gamma: float = 0.0) -> np.ndarray:
    """Spin coherent state U(alpha, beta, gamma)|j, j> in the basis m = j..-j."""
    two_j = _two_j(j)
    j = two_j / 2
    ms = j - np.arange(two_j + 1)
    c, s = math.cos(beta / 2), math.sin(beta / 2)
    amp = np.array([math.sqrt(comb(two_j, int(round(j + m)))) * c ** int(round(j + m))
                    * s ** int(round(j - m)) for m in ms])
    return np.exp(-1j * gamma * j) * amp * np.exp(-1j * alpha * ms)


def _difference(g, h):
    """g^{-1} h."""
    return compose(inverse(g), h)


def overlap_closed_form(family: str, s, g: GroupElement, h: GroupElement, *, cutoff: int | None = None):
    """Closed-form overlap between frame states of orientation g and h.

    ``pe``            |<s;g|s;h>|^2 (real), Fejer-kernel form
    ``u1-coherent``   <cutoff; g | s; h>_CS, phase eigenstate bra against the
                      coherent ket without renormalisation after truncation
    ``su2-fiducial``  <s;g|s;h>, a function of the rotation angle of g^-1 h
    ``su2-coherent``  <j;g|j;h> = exp(-i(alpha+gamma) j) cos^{2j}(beta/2) for g^-1 h
    """
    if family == "pe":
        s = int(s)
        delta = _difference(g, h).theta
        k = np.arange(-s, s + 1)
        return float(np.real(np.sum((s + 1 - np.abs(k)) * np.exp(1j * k * delta)))) / (s + 1) ** 2
    if family == "u1-coherent":
        if cutoff is None:
            cutoff = coherent_cutoff(float(s))
        delta = _difference(g, h).theta
        k = np.arange(cutoff + 1)
        c = coherent_amplitudes(float(s), cutoff)
        return complex(np.sum(c * np.exp(1j * k * delta)) / math.sqrt(cutoff + 1))
    if family == "su2-fiducial":
        s = int(s)
        omega = float(np.linalg.norm(_difference(g, h).rotation_vector()))
        m = np.arange(-s, s + 1)
        val = np.sum(np.exp(1j * m * omega) * ((1 + s) ** 2 - m ** 2)) / fiducial_dimension(s)
        return complex(val)
    if family == "su2-coherent":
        j = _two_j(s) / 2
        alpha, beta, gamma = _difference(g, h).euler()
        return complex(np.exp(-1j * (alpha + gamma) * j) * math.cos(beta / 2) ** int(round(2 * j)))
    raise FrameError(f"unknown frame family {family!r}")


def pe_overlap_trig(s: int, delta: float) -> float:
    """(1 - cos((s+1) d)) / ((s+1)^2 (1 - cos d)), the Fejer kernel in trigonometric form (d != 0)."""
    return (1 - math.cos((s + 1) * delta)) / ((s + 1) ** 2 * (1 - math.cos(delta)))


def su2_character(two_j: int, omega: float) -> float:
    """chi_j(omega) = sin((j + 1/2) omega) / sin(omega / 2)."""
    if abs(math.sin(omega / 2)) < 1e-12:
        return float(two_j + 1) * (1.0 if math.cos(omega / 2) > 0 else (-1.0) ** two_j)
    return math.sin((two_j + 1) * omega / 2) / math.sin(omega / 2)


@dataclass(frozen=True)
class FrameFamily:
    """A family of covariant frame states of a given size.

    ``size`` is the photon cutoff (``pe``), the coherent amplitude
    (``u1-coherent``), the maximum integer spin (``su2-fiducial``) or the
    total spin j (``su2-coherent``).  ``cutoff`` is the photon truncation of
    coherent states; it defaults to the 99.99% Poisson-mass cutoff.
    """

    kind: str
    size: float
    cutoff: int | None = None

    def __post_init__(self):
        if self.kind not in FAMILIES:
            raise FrameError(f"unknown frame family {self.kind!r}; expected one of {FAMILIES}")
        if self.kind == "u1-coherent":
            if self.cutoff is None:
                object.__setattr__(self, "cutoff", coherent_cutoff(float(self.size)))
            mass = coherent_mass(float(self.size), self.cutoff)
            if mass < MIN_COHERENT_MASS:
                raise FrameError(f"cutoff {self.cutoff} keeps only {mass:.6f} of the coherent state")
        elif self.kind == "su2-coherent":
            _two_j(self.size)
        else:
            if int(self.size) != self.size or self.size < 0:
                raise FrameError(f"{self.kind} size must be a non-negative integer")

    @property
    def group(self) -> str:
        return "u1" if self.kind in ("pe", "u1-coherent") else "su2"

    @property
    def space(self) -> Space:
        if self.kind == "pe":
            return Space.fock(int(self.size))
        if self.kind == "u1-coherent":
            return Space.fock(self.cutoff)
        if self.kind == "su2-fiducial":
            return Space.su2_regular(int(self.size))
        return Space.spin(self.size)

    @property
    def uniform_twirl(self) -> bool:
        """Whether G(|e><e|) = I/D on the frame space (maximum-likelihood states)."""
        return self.kind != "u1-coherent"

    @property
    def dimension(self) -> int:
        """D, the dimension spanned by the measurement projectors."""
        if self.kind == "pe":
            return int(self.size) + 1
        if self.kind == "u1-coherent":
            return self.cutoff + 1
        if self.kind == "su2-fiducial":
            return fiducial_dimension(int(self.size))
        return _two_j(self.size) + 1

    def measurement_family(self) -> "FrameFamily":
        """The maximum-likelihood family whose projectors measure this frame."""
        if self.kind == "u1-coherent":
            return FrameFamily("pe", self.cutoff)
        return self

    def fiducial(self) -> np.ndarray:
        if self.kind == "pe":
            return phase_eigenstate(int(self.size))
        if self.kind == "u1-coherent":
            return u1_coherent(float(self.size), 0.0, self.cutoff)
        if self.kind == "su2-fiducial":
            return su2_fiducial(int(self.size))
        return su2_coherent(self.size)

    def state(self, g: GroupElement) -> np.ndarray:
        """|psi(g)> = U(g)|psi(e)>."""
        if self.kind == "pe":
            return phase_eigenstate(int(self.size), g)
        if self.kind == "u1-coherent":
            return u1_coherent(float(self.size), g, self.cutoff)
        return rep_unitary(self.space, g) @ self.fiducial()

    def states(self, elements) -> np.ndarray:
        """Stacked |psi(g_i)> as rows of an (N, dim) array."""
        if self.group == "u1":
            theta = np.array([g.theta for g in elements])
            k = self.space.basis_charges()
            return np.exp(1j * theta[:, None] * k[None, :]) * self.fiducial()[None, :]
        return rep_unitaries(self.space, elements) @ self.fiducial()

    def measurement_state(self, g: GroupElement) -> np.ndarray:
        return self.measurement_family().state(g)

    def overlap_weight(self, g: GroupElement) -> float:
        """D |<g|psi(e)>|^2 from the closed forms, with <g| a measurement state."""
        e = U1(0.0) if self.group == "u1" else SU2.identity()
        if self.kind == "pe":
            return self.dimension * overlap_closed_form("pe", self.size, g, e)
        if self.kind == "u1-coherent":
            amp = overlap_closed_form("u1-coherent", self.size, g, e, cutoff=self.cutoff)
            # renormalise the truncated coherent state
            norm2 = float(np.sum(coherent_amplitudes(float(self.size), self.cutoff) ** 2))
            return self.dimension * abs(amp) ** 2 / norm2
        return self.dimension * abs(overlap_closed_form(self.kind, self.size, g, e)) ** 2

    def overlap_bandlimit(self) -> int:
        """Bandlimit of g -> |<g|psi(e)>|^2."""
        return self.space.conjugation_bandlimit()
