"""G-twirl, relational encoding and recovery, and the induced decoherence maps.

Channels are applied functionally: every integral over the group is a
weighted sum over the nodes of a :class:`HaarGrid` taken in node order.  A
grid is built on demand from the bandlimit of the integrand; a supplied grid
whose bandlimit is too small is refused, since the result would only be
approximate.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .frames import FrameError, FrameFamily
from .groups import GroupElement, HaarGrid, haar_grid, inverse
from .hilbert import (
    AnySpace,
    PhysicalityError,
    ProductSpace,
    Space,
    check_density,
    ket_to_density,
    rep_unitaries,
    rep_unitary,
)

_CHUNK = 64


class InsufficientGridError(ValueError):
    """The quadrature grid cannot integrate the requested integrand exactly."""


class UnsupportedDecomposition(NotImplementedError):
    """No explicit charge-sector decomposition is available for this space."""


def _factors(space: AnySpace) -> tuple[Space, ...]:
    return space.factors


def resolve_grid(group: str, bandlimit: int, grid: HaarGrid | None = None,
                 half_integer: bool = False) -> HaarGrid:
    """Return ``grid`` if it is exact for ``bandlimit``, else build one."""
    if grid is None:
        return haar_grid(group, bandlimit)
    if grid.group != group:
        raise TypeError(f"{grid.group} grid used for a {group} integrand")
    if not grid.exact_for(bandlimit, half_integer):
        raise InsufficientGridError(
            f"grid with bandlimit {grid.bandlimit} ({grid.cover}) cannot integrate bandlimit {bandlimit} exactly")
    return grid


def _as_operator(rho) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim == 1:
        return ket_to_density(rho)
    return rho


def _is_hermitian(rho: np.ndarray) -> bool:
    return bool(np.max(np.abs(rho - rho.conj().T), initial=0.0) <= 1e-10)


def _finish(out: np.ndarray, rho_in: np.ndarray, trace_preserving: bool = True) -> np.ndarray:
    """Re-validate a channel output when the input was a physical state."""
    if _is_hermitian(rho_in) and np.min(np.linalg.eigvalsh(rho_in)) > -1e-10:
        tr = np.trace(rho_in).real
        if abs(tr) > 0:
            check_density(out / tr, herm_tol=1e-10, trace_tol=1e-10 if trace_preserving else np.inf)
    return out


def _stacked_unitaries(space: AnySpace, nodes) -> np.ndarray:
    """(N, d, d) representation matrices on a single or product space."""
    out = None
    for f in _factors(space):
        u = rep_unitaries(f, nodes)
        if out is None:
            out = u
        else:
            n, a, _ = out.shape
            b = u.shape[1]
            out = np.einsum("nij,nkl->nikjl", out, u).reshape(n, a * b, a * b)
    return out


def conjugation_sum(rho: np.ndarray, space: AnySpace, nodes, weights, *, invert: bool = False,
                    node_weights: np.ndarray | None = None) -> np.ndarray:
    """sum_i w_i U(g_i) rho U(g_i)^dagger (with g_i^-1 if ``invert``)."""
    w = np.asarray(weights, dtype=float)
    if node_weights is not None:
        w = w * np.asarray(node_weights)
    if space.group == "u1":
        q = space.basis_charges() if isinstance(space, Space) else space.basis_charges()
        theta = np.array([g.theta for g in nodes])
        if invert:
            theta = -theta
        dq = q[:, None] - q[None, :]
        kernel = np.tensordot(w, np.exp(1j * theta[:, None, None] * dq[None]), axes=1)
        return kernel * rho
    out = np.zeros_like(rho, dtype=complex)
    nodes = list(nodes)
    for start in range(0, len(nodes), _CHUNK):
        chunk = nodes[start:start + _CHUNK]
        if invert:
            chunk = [inverse(g) for g in chunk]
        u = _stacked_unitaries(space, chunk)
        wc = w[start:start + _CHUNK]
        out += np.einsum("n,nij,jk,nlk->il", wc, u, rho, u.conj(), optimize=True)
    return out


# G-twirl ------------------------------------------------------------------

def twirl_bandlimit(space: AnySpace) -> int:
    return space.conjugation_bandlimit()


def g_twirl(rho, space: AnySpace, grid: HaarGrid | None = None) -> np.ndarray:
    """G-twirl by quadrature: integral of U(g) rho U(g)^dagger over the Haar measure."""
    rho = _as_operator(rho)
    if rho.shape != (space.dim, space.dim):
        raise ValueError(f"operator of shape {rho.shape} does not live on a space of dim {space.dim}")
    grid = resolve_grid(space.group, twirl_bandlimit(space), grid, space.mixed_parity())
    out = conjugation_sum(rho, space, grid.nodes, grid.weights)
    return _finish(out, rho)


def g_twirl_exact(rho, space: AnySpace) -> np.ndarray:
    """G-twirl from the charge-sector decomposition.

    U(1) (single or product Fock spaces): coherences between different total
    charges are removed.  SU(2) single systems: each sector is depolarised on
    its irrep factor and left alone on its multiplicity factor.
    """
    rho = _as_operator(rho)
    if space.group == "u1":
        q = space.basis_charges()
        return np.where(q[:, None] == q[None, :], rho, 0.0)
    if isinstance(space, ProductSpace) and len(space.factors) > 1:
        raise UnsupportedDecomposition("SU(2) tensor products need Clebsch-Gordan data; use g_twirl")
    space = space.factors[0]
    out = np.zeros_like(rho, dtype=complex)
    for sector, sl in space.sector_slices():
        d, m = sector.irrep_dim, sector.mult_dim
        block = rho[sl, sl].reshape(d, m, d, m)
        reduced = np.einsum("aiak->ik", block)
        out[sl, sl] = np.kron(np.eye(d) / d, reduced)
    return out


# encoding and recovery -------------------------------------------------------

def encode(rho_s, frame_state, space_s: AnySpace, space_r: AnySpace,
           grid: HaarGrid | None = None) -> np.ndarray:
    """E_{rho_R}(rho_S) = G_SR(rho_S x rho_R)."""
    rho_s = _as_operator(rho_s)
    rho_r = _as_operator(frame_state)
    joint = ProductSpace((space_s, space_r))
    return g_twirl(np.kron(rho_s, rho_r), joint, grid)


def _measurement(frame: FrameFamily, measurement: FrameFamily | None) -> FrameFamily:
    m = frame.measurement_family() if measurement is None else measurement
    if not m.uniform_twirl:
        raise FrameError(f"{m.kind} projectors do not resolve the identity; the recovery POVM would be incomplete")
    if m.space.dim != frame.space.dim:
        raise FrameError("measurement family does not act on the frame space")
    return m


def recover(sigma_sr, space_s: AnySpace, frame: FrameFamily, grid: HaarGrid | None = None, *,
            measurement: FrameFamily | None = None) -> np.ndarray:
    """R(sigma) = D int dmu(g) (U_S(g^-1) x <g|) sigma (U_S(g^-1)^dagger x |g>)."""
    m = _measurement(frame, measurement)
    sigma = _as_operator(sigma_sr)
    ds, dr = space_s.dim, m.space.dim
    if sigma.shape != (ds * dr, ds * dr):
        raise ValueError("sigma does not live on S x R")
    bl = space_s.conjugation_bandlimit() + m.space.conjugation_bandlimit()
    grid = resolve_grid(space_s.group, bl, grid, space_s.mixed_parity() or m.space.mixed_parity())
    t = sigma.reshape(ds, dr, ds, dr)
    out = np.zeros((ds, ds), dtype=complex)
    nodes = list(grid.nodes)
    for start in range(0, len(nodes), _CHUNK):
        chunk = nodes[start:start + _CHUNK]
        v = m.states(chunk)
        # <g|_R sigma |g>_R for every node
        x = np.einsum("nb,ibjc,nc->nij", v.conj(), t, v, optimize=True)
        inv = [inverse(g) for g in chunk]
        u = _stacked_unitaries(space_s, inv)
        wc = grid.weights[start:start + _CHUNK]
        out += np.einsum("n,nij,njk,nlk->il", wc, u, x, u.conj(), optimize=True)
    out *= m.dimension
    return _finish(out, sigma)


def recover_encode_kernel(rho_s, space_s: AnySpace, frame: FrameFamily, frame_state=None,
                          grid: HaarGrid | None = None, *,
                          measurement: FrameFamily | None = None) -> np.ndarray:
    """R(E_{rho_R}(rho_S)) = D int dmu(g) <g|rho_R|g> U_S(g^-1)[rho_S].

    ``frame_state`` defaults to the fiducial frame state |psi(e)>.
    """
    m = _measurement(frame, measurement)
    rho_s = _as_operator(rho_s)
    rho_r = _as_operator(frame.fiducial() if frame_state is None else frame_state)
    bl = space_s.conjugation_bandlimit() + m.space.conjugation_bandlimit()
    grid = resolve_grid(space_s.group, bl, grid, space_s.mixed_parity() or m.space.mixed_parity())
    v = m.states(grid.nodes)
    weights = np.einsum("ni,ij,nj->n", v.conj(), rho_r, v).real * m.dimension
    out = conjugation_sum(rho_s, space_s, grid.nodes, grid.weights, invert=True, node_weights=weights)
    return _finish(out, rho_s)


def decoherence_F(rho_s, space_s: AnySpace, frame: FrameFamily,
                  grid: HaarGrid | None = None) -> np.ndarray:
    """F(rho) = D int dmu(g) |<g|psi(e)>|^2 U_S(g^-1)[rho], from the closed-form overlaps."""
    rho_s = _as_operator(rho_s)
    bl = space_s.conjugation_bandlimit() + frame.overlap_bandlimit()
    half = space_s.mixed_parity() or frame.space.mixed_parity()
    grid = resolve_grid(space_s.group, bl, grid, half)
    weights = np.array([frame.overlap_weight(g) for g in grid.nodes])
    out = conjugation_sum(rho_s, space_s, grid.nodes, grid.weights, invert=True, node_weights=weights)
    return _finish(out, rho_s)


def rotate(rho, space: AnySpace, g: GroupElement) -> np.ndarray:
    """U(g) rho U(g)^dagger."""
    u = rep_unitary(space, g)
    return u @ _as_operator(rho) @ u.conj().T


# dephasing and the coset map ----------------------------------------------------

def dephase_z(rho, space_or_m) -> np.ndarray:
    """Remove coherences between different J_z eigenvalues.

    ``space_or_m`` is a single SU(2) :class:`Space` or the array of J_z
    eigenvalues of the basis vectors.
    """
    rho = _as_operator(rho)
    if isinstance(space_or_m, Space):
        m = space_or_m.basis_m()
    else:
        m = np.asarray(space_or_m, dtype=float)
    if len(m) != rho.shape[0]:
        raise ValueError("J_z labels do not match the operator dimension")
    return np.where(np.isclose(m[:, None], m[None, :], atol=1e-9), rho, 0.0)


def coset_beta_mixture(rho, space_s: Space, two_j_frame: int, n_nodes: int | None = None) -> np.ndarray:
    """(2j+1)/2 int sin(beta) d(beta) cos^{4j}(beta/2) R_y(-beta) rho R_y(-beta)^dagger.

    The middle factor of the spin-coherent decoherence map, evaluated with
    Gauss-Legendre quadrature in cos(beta).  The rule is exact on J_z-diagonal
    inputs, which is how :func:`coset_decoherence` uses it.
    """
    from .groups import SU2

    rho = _as_operator(rho)
    if n_nodes is None:
        n_nodes = two_j_frame + space_s.max_charge + 2
    x, w = np.polynomial.legendre.leggauss(n_nodes)
    betas = np.arccos(x)
    out = np.zeros_like(rho, dtype=complex)
    for wb, b in zip(w, betas):
        weight = (two_j_frame + 1) / 2 * wb * np.cos(b / 2) ** (2 * two_j_frame)
        # g^{-1} for g = R_y(beta)
        u = rep_unitary(space_s, SU2.from_euler(0.0, -b, 0.0))
        out += weight * (u @ rho @ u.conj().T)
    return out


def coset_decoherence(rho, space_s: Space, two_j_frame: int) -> np.ndarray:
    """D o (beta mixture) o D, the composed form of F for a spin-coherent frame."""
    return dephase_z(coset_beta_mixture(dephase_z(rho, space_s), space_s, two_j_frame), space_s)


# figures of merit --------------------------------------------------------------

def entanglement_fidelity(channel: Callable[[np.ndarray], np.ndarray], dim: int) -> float:
    """<Phi| (id x channel)(|Phi><Phi|) |Phi> for the maximally entangled |Phi>."""
    total = 0.0 + 0.0j
    for i in range(dim):
        for j in range(dim):
            e = np.zeros((dim, dim), dtype=complex)
            e[i, j] = 1.0
            total += channel(e)[i, j]
    return float(total.real) / dim ** 2


@dataclass(frozen=True)
class Channel:
    """A linear map on operators with its trace behaviour and dimensions."""

    name: str
    apply: Callable[[np.ndarray], np.ndarray]
    dim_in: int
    dim_out: int
    trace_preserving: bool = True

    def __call__(self, rho) -> np.ndarray:
        return self.apply(_as_operator(rho))

    def then(self, other: "Channel") -> "Channel":
        """``other`` applied after ``self``."""
        if other.dim_in != self.dim_out:
            raise ValueError("channel dimensions do not chain")
        return Channel(f"{other.name}.{self.name}", lambda r: other.apply(self.apply(r)), self.dim_in,
                       other.dim_out, self.trace_preserving and other.trace_preserving)

    def superoperator(self) -> np.ndarray:
        """Matrix S with vec(out) = S vec(in) (row-major vec); small spaces only."""
        if self.dim_in > 64:
            raise ValueError("superoperator materialisation is limited to dimension 64")
        cols = []
        for k in range(self.dim_in ** 2):
            e = np.zeros(self.dim_in ** 2, dtype=complex)
            e[k] = 1.0
            cols.append(self.apply(e.reshape(self.dim_in, self.dim_in)).ravel())
        return np.array(cols).T

    def entanglement_fidelity(self) -> float:
        if self.dim_in != self.dim_out:
            raise ValueError("entanglement fidelity needs equal input and output dimension")
        return entanglement_fidelity(self.apply, self.dim_in)


def decoherence_channel(space_s: AnySpace, frame: FrameFamily, grid: HaarGrid | None = None) -> Channel:
    return Channel(f"F[{frame.kind}:{frame.size}]", lambda r: decoherence_F(r, space_s, frame, grid),
                   space_s.dim, space_s.dim)


def kernel_channel(space_s: AnySpace, frame: FrameFamily, frame_state=None,
                   grid: HaarGrid | None = None) -> Channel:
    return Channel(f"RE[{frame.kind}:{frame.size}]",
                   lambda r: recover_encode_kernel(r, space_s, frame, frame_state, grid),
                   space_s.dim, space_s.dim)


__all__ = [
    "Channel", "InsufficientGridError", "PhysicalityError", "UnsupportedDecomposition",
    "coset_beta_mixture", "coset_decoherence", "decoherence_F", "decoherence_channel",
    "dephase_z", "encode", "entanglement_fidelity", "g_twirl", "g_twirl_exact",
    "kernel_channel", "recover", "recover_encode_kernel", "resolve_grid", "rotate",
]
