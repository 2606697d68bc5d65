"""Relational measurement and the change-of-frame procedure.

Frames A and B are measured jointly with the projectors

    Pi^{g,h} = |g><g|_A x |gh><gh|_B

where |g> are maximum-likelihood frame states.  Integrating over g gives the
effect E_h for the relative orientation h; the instrument M^h keeps the
post-measurement state and tracing out A leaves the system relative to B.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .channels import _as_operator, decoherence_F, encode, resolve_grid, rotate
from .frames import FrameError, FrameFamily
from .groups import GroupElement, HaarGrid, compose, group_of, inverse
from .hilbert import AnySpace, ProductSpace, Space, check_density, partial_trace

ORDERINGS = ("gh", "hg")


def _ml(frame: FrameFamily) -> FrameFamily:
    m = frame.measurement_family()
    if not m.uniform_twirl:
        raise FrameError(f"{frame.kind} frames have no maximum-likelihood projectors")
    return m


def _partner(g: GroupElement, h: GroupElement, ordering: str) -> GroupElement:
    if ordering == "gh":
        return compose(g, h)
    if ordering == "hg":
        return compose(h, g)
    raise ValueError(f"unknown projector ordering {ordering!r}")


def relational_vector(g: GroupElement, h: GroupElement, frame_a: FrameFamily, frame_b: FrameFamily,
                      ordering: str = "gh") -> np.ndarray:
    """|g>_A x |gh>_B."""
    ma, mb = _ml(frame_a), _ml(frame_b)
    return np.kron(ma.state(g), mb.state(_partner(g, h, ordering)))


def relational_projector(g: GroupElement, h: GroupElement, frame_a: FrameFamily, frame_b: FrameFamily,
                         ordering: str = "gh") -> np.ndarray:
    v = relational_vector(g, h, frame_a, frame_b, ordering)
    return np.outer(v, v.conj())


def _relational_vectors(nodes, h, frame_a, frame_b, ordering):
    ma, mb = _ml(frame_a), _ml(frame_b)
    va = ma.states(nodes)
    vb = mb.states([_partner(g, h, ordering) for g in nodes])
    return np.einsum("na,nb->nab", va, vb).reshape(len(nodes), -1), vb


def _ab_bandlimit(frame_a: FrameFamily, frame_b: FrameFamily) -> int:
    return _ml(frame_a).space.conjugation_bandlimit() + _ml(frame_b).space.conjugation_bandlimit()


def _half(frame_a, frame_b) -> bool:
    return frame_a.space.mixed_parity() or frame_b.space.mixed_parity()


def povm_effect(h: GroupElement, frame_a: FrameFamily, frame_b: FrameFamily, grid: HaarGrid | None = None,
                ordering: str = "gh") -> np.ndarray:
    """E_h = D_A D_B int dmu(g) Pi^{g,h}."""
    grid = resolve_grid(group_of(h), _ab_bandlimit(frame_a, frame_b), grid, _half(frame_a, frame_b))
    v, _ = _relational_vectors(grid.nodes, h, frame_a, frame_b, ordering)
    scale = _ml(frame_a).dimension * _ml(frame_b).dimension
    return scale * (v.T * grid.weights) @ v.conj()


def outcome_grid_bandlimit(frame_b: FrameFamily) -> int:
    """Bandlimit of h -> E_h."""
    return _ml(frame_b).space.conjugation_bandlimit()


def measurement_map(sigma, h: GroupElement, space_s: AnySpace, frame_a: FrameFamily, frame_b: FrameFamily,
                    grid: HaarGrid | None = None, ordering: str = "gh") -> np.ndarray:
    """M^h(sigma) on S x A x B: D_A D_B int dmu(g) Pi^{g,h} sigma Pi^{g,h}."""
    sigma = _as_operator(sigma)
    grid = resolve_grid(group_of(h), 2 * _ab_bandlimit(frame_a, frame_b), grid, _half(frame_a, frame_b))
    v, _ = _relational_vectors(grid.nodes, h, frame_a, frame_b, ordering)
    ds = space_s.dim
    dab = v.shape[1]
    t = sigma.reshape(ds, dab, ds, dab)
    x = np.einsum("nb,ibjc,nc->nij", v.conj(), t, v, optimize=True)
    scale = _ml(frame_a).dimension * _ml(frame_b).dimension
    out = np.einsum("n,nij,nb,nc->ibjc", grid.weights, x, v, v.conj(), optimize=True)
    return scale * out.reshape(ds * dab, ds * dab)


@dataclass(frozen=True)
class InstrumentOutcome:
    """Outcome density P(h) and the post-measurement state on S x B.

    ``post_state`` is None for a null outcome (P(h) = 0).
    """

    outcome_density: float
    post_state: np.ndarray | None
    raw: np.ndarray = field(repr=False)

    @property
    def null(self) -> bool:
        return self.post_state is None


NULL_THRESHOLD = 1e-14


def instrument(sigma_sab, h: GroupElement, space_s: AnySpace, frame_a: FrameFamily, frame_b: FrameFamily,
               grid: HaarGrid | None = None, ordering: str = "gh") -> InstrumentOutcome:
    """Tr_A M^h(sigma), with P(h) its trace."""
    sigma = _as_operator(sigma_sab)
    ma, mb = _ml(frame_a), _ml(frame_b)
    bl = ma.space.conjugation_bandlimit() + 2 * mb.space.conjugation_bandlimit()
    grid = resolve_grid(group_of(h), bl, grid, _half(frame_a, frame_b))
    v, vb = _relational_vectors(grid.nodes, h, frame_a, frame_b, ordering)
    ds, db = space_s.dim, mb.space.dim
    dab = v.shape[1]
    if sigma.shape != (ds * dab, ds * dab):
        raise ValueError("sigma does not live on S x A x B")
    t = sigma.reshape(ds, dab, ds, dab)
    x = np.einsum("nb,ibjc,nc->nij", v.conj(), t, v, optimize=True)
    raw = np.einsum("n,nij,nb,nc->ibjc", grid.weights, x, vb, vb.conj(), optimize=True)
    raw = ma.dimension * mb.dimension * raw.reshape(ds * db, ds * db)
    p = float(np.trace(raw).real)
    if p <= NULL_THRESHOLD:
        return InstrumentOutcome(p, None, raw)
    post = raw / p
    check_density(post, herm_tol=1e-10, trace_tol=1e-10)
    return InstrumentOutcome(p, post, raw)


def outcome_density(sigma_sab, h: GroupElement, space_s: AnySpace, frame_a: FrameFamily,
                    frame_b: FrameFamily, grid: HaarGrid | None = None) -> float:
    """P(h) = Tr[(I_S x E_h) sigma]."""
    sigma = _as_operator(sigma_sab)
    e = povm_effect(h, frame_a, frame_b, grid)
    ds = space_s.dim
    reduced = partial_trace(sigma, (ds, e.shape[0]), keep=1)
    return float(np.trace(e @ reduced).real)


# the full procedure --------------------------------------------------------

@dataclass(frozen=True)
class ProcedureSpec:
    """Inputs of a change of frame from A to B.

    ``rho_b`` defaults to the twirled fiducial projector I/D_B.  ``grid``
    overrides the quadrature used for every integral (it must be exact for
    each of them).
    """

    system: Space
    rho_s: np.ndarray
    frame_a: FrameFamily
    frame_b: FrameFamily
    a: GroupElement
    h: GroupElement
    rho_b: np.ndarray | None = None
    grid: HaarGrid | None = None

    def __post_init__(self):
        groups = {self.system.group, self.frame_a.group, self.frame_b.group, group_of(self.a), group_of(self.h)}
        if len(groups) != 1:
            raise TypeError(f"procedure mixes groups {sorted(groups)}")
        _ml(self.frame_a)
        _ml(self.frame_b)
        rho = _as_operator(self.rho_s)
        if rho.shape != (self.system.dim, self.system.dim):
            raise ValueError("rho_s does not live on the system space")
        check_density(rho)
        object.__setattr__(self, "rho_s", rho)
        if self.rho_b is not None:
            rb = _as_operator(self.rho_b)
            check_density(rb)
            object.__setattr__(self, "rho_b", rb)

    @property
    def space_b(self) -> Space:
        return _ml(self.frame_b).space

    def initial_b(self) -> np.ndarray:
        if self.rho_b is not None:
            return self.rho_b
        d = self.space_b.dim
        return np.eye(d, dtype=complex) / _ml(self.frame_b).dimension

    def initial_state(self) -> np.ndarray:
        """G_SA(rho_S x |psi(a)><psi(a)|_A) x rho_B."""
        sa = encode(self.rho_s, self.frame_a.state(self.a), self.system, self.frame_a.space, self._grid_for_encode())
        return np.kron(sa, self.initial_b())

    def _grid_for_encode(self):
        return self.grid


def change_frame(spec: ProcedureSpec) -> InstrumentOutcome:
    """Encode S into A, then measure the relative orientation h of A and B."""
    sigma = spec.initial_state()
    return instrument(sigma, spec.h, spec.system, spec.frame_a, spec.frame_b, spec.grid)


def decohered_system(spec: ProcedureSpec) -> np.ndarray:
    """rho_S' = F_A(U_S(a^-1)[rho_S])."""
    return decoherence_F(rotate(spec.rho_s, spec.system, inverse(spec.a)), spec.system, spec.frame_a, spec.grid)


def predicted_final_state(spec: ProcedureSpec) -> np.ndarray:
    """E_{|h>_B}(rho_S'), built from the closed-form overlaps only."""
    rho_p = decohered_system(spec)
    mb = _ml(spec.frame_b)
    return encode(rho_p, mb.state(spec.h), spec.system, mb.space, spec.grid)


def covariance_violation(sigma, h: GroupElement, f: GroupElement, space_s: AnySpace, frame_a: FrameFamily,
                         frame_b: FrameFamily, grid: HaarGrid | None = None, ordering: str = "gh") -> float:
    """max |U(f) M^h(U(f)^dagger sigma U(f)) U(f)^dagger - M^h(sigma)| over matrix entries."""
    joint = ProductSpace((space_s, frame_a.measurement_family().space, frame_b.measurement_family().space))
    sigma = _as_operator(sigma)
    rotated = rotate(sigma, joint, inverse(f))
    lhs = rotate(measurement_map(rotated, h, space_s, frame_a, frame_b, grid, ordering), joint, f)
    rhs = measurement_map(sigma, h, space_s, frame_a, frame_b, grid, ordering)
    return float(np.max(np.abs(lhs - rhs)))
