"""Hilbert spaces with charge-sector structure, representations and metrics.

A :class:`Space` is a direct sum of charge sectors, each an irrep subsystem
tensored with a multiplicity subsystem.  Basis ordering: sectors ascending in
charge; inside a sector the irrep index is major and the multiplicity index
minor.  For SU(2) the irrep index runs over m = j, j-1, ..., -j and the charge
is stored as the integer 2j.

Operators and kets are plain complex numpy arrays.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence, Union

import numpy as np

from .groups import SU2, U1, GroupElement, group_of


class PhysicalityError(ValueError):
    """A state or operator breaks a physicality invariant beyond tolerance."""


@dataclass(frozen=True)
class Sector:
    charge: int
    irrep_dim: int = 1
    mult_dim: int = 1

    def __post_init__(self):
        if self.mult_dim < 1 or self.irrep_dim < 1:
            raise ValueError("sector dimensions must be positive")

    @property
    def dim(self) -> int:
        return self.irrep_dim * self.mult_dim


@dataclass(frozen=True)
class Space:
    """A single system: ``group`` is ``"u1"`` or ``"su2"``."""

    group: str
    sectors: tuple[Sector, ...]

    def __post_init__(self):
        object.__setattr__(self, "sectors", tuple(self.sectors))
        if not self.sectors:
            raise ValueError("a space needs at least one sector")
        charges = [s.charge for s in self.sectors]
        if any(b <= a for a, b in zip(charges, charges[1:])):
            raise ValueError("sector charges must be strictly increasing")
        if self.group == "u1":
            if any(s.irrep_dim != 1 for s in self.sectors):
                raise ValueError("U(1) irreps are one-dimensional")
        elif self.group == "su2":
            for s in self.sectors:
                if s.charge < 0 or s.irrep_dim != s.charge + 1:
                    raise ValueError(f"SU(2) sector 2j={s.charge} must have irrep_dim 2j+1")
        else:
            raise ValueError(f"unknown group {self.group!r}")

    # constructors -------------------------------------------------------
    @classmethod
    def fock(cls, cutoff: int) -> "Space":
        """Single bosonic mode truncated at ``cutoff`` photons."""
        return cls("u1", tuple(Sector(k) for k in range(int(cutoff) + 1)))

    @classmethod
    def charges(cls, charges: Sequence[int]) -> "Space":
        return cls("u1", tuple(Sector(int(q)) for q in sorted(charges)))

    @classmethod
    def spin(cls, j: float) -> "Space":
        two_j = _two_j(j)
        return cls("su2", (Sector(two_j, two_j + 1, 1),))

    @classmethod
    def su2_regular(cls, s: int) -> "Space":
        """Integer spins 0..s, each with multiplicity equal to its dimension."""
        return cls("su2", tuple(Sector(2 * j, 2 * j + 1, 2 * j + 1) for j in range(int(s) + 1)))

    # structure ----------------------------------------------------------
    @property
    def dim(self) -> int:
        return sum(s.dim for s in self.sectors)

    @property
    def dims(self) -> tuple[int, ...]:
        return (self.dim,)

    @property
    def factors(self) -> tuple["Space", ...]:
        return (self,)

    @property
    def max_charge(self) -> int:
        return self.sectors[-1].charge

    def basis_charges(self) -> np.ndarray:
        """Charge (U(1)) or 2j (SU(2)) of every basis vector."""
        return np.concatenate([np.full(s.dim, s.charge) for s in self.sectors])

    def basis_m(self) -> np.ndarray:
        """J_z eigenvalue m of every basis vector (SU(2) only)."""
        if self.group != "su2":
            raise ValueError("basis_m is defined for SU(2) spaces")
        out = []
        for s in self.sectors:
            j = s.charge / 2
            ms = j - np.arange(s.irrep_dim)
            out.append(np.repeat(ms, s.mult_dim))
        return np.concatenate(out)

    def sector_slices(self) -> list[tuple[Sector, slice]]:
        out, start = [], 0
        for s in self.sectors:
            out.append((s, slice(start, start + s.dim)))
            start += s.dim
        return out

    def conjugation_bandlimit(self) -> int:
        """Bandlimit of g -> U(g) X U(g)^dagger for operators X on this space."""
        if self.group == "u1":
            return self.max_charge - self.sectors[0].charge
        return 2 * self.max_charge

    def vector_bandlimit(self) -> int:
        """Bandlimit of g -> U(g) v."""
        if self.group == "u1":
            return max(abs(self.max_charge), abs(self.sectors[0].charge))
        return self.max_charge

    def mixed_parity(self) -> bool:
        return self.group == "su2" and len({s.charge % 2 for s in self.sectors}) > 1


@dataclass(frozen=True)
class ProductSpace:
    """Tensor product of single systems sharing one symmetry group."""

    factors: tuple[Space, ...]

    def __post_init__(self):
        flat = []
        for f in self.factors:
            flat.extend(f.factors)
        object.__setattr__(self, "factors", tuple(flat))
        groups = {f.group for f in self.factors}
        if len(groups) != 1:
            raise TypeError("tensor factors must share a group")

    @property
    def group(self) -> str:
        return self.factors[0].group

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(f.dim for f in self.factors)

    @property
    def dim(self) -> int:
        return int(np.prod(self.dims))

    def conjugation_bandlimit(self) -> int:
        return sum(f.conjugation_bandlimit() for f in self.factors)

    def vector_bandlimit(self) -> int:
        return sum(f.vector_bandlimit() for f in self.factors)

    def mixed_parity(self) -> bool:
        return any(f.mixed_parity() for f in self.factors)

    def basis_charges(self) -> np.ndarray:
        """Total U(1) charge of every product basis vector."""
        if self.group != "u1":
            raise ValueError("total charge labels need Clebsch-Gordan data for SU(2)")
        total = np.zeros(1, dtype=int)
        for f in self.factors:
            total = (total[:, None] + f.basis_charges()[None, :]).ravel()
        return total


AnySpace = Union[Space, ProductSpace]


def _two_j(j: float) -> int:
    two_j = round(2 * float(j))
    if abs(two_j - 2 * float(j)) > 1e-12 or two_j < 0:
        raise ValueError(f"2j must be a non-negative integer, got j={j}")
    return int(two_j)


# spin matrices and representations ----------------------------------------

@lru_cache(maxsize=None)
def spin_matrices(two_j: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(Jx, Jy, Jz) for spin j = two_j/2 in the basis m = j, ..., -j."""
    j = two_j / 2
    m = j - np.arange(two_j + 1)
    jz = np.diag(m).astype(complex)
    # <m+1|J+|m> = sqrt(j(j+1) - m(m+1)); index of m+1 is one less than m
    jp = np.zeros((two_j + 1, two_j + 1), dtype=complex)
    for k in range(1, two_j + 1):
        mk = m[k]
        jp[k - 1, k] = np.sqrt(j * (j + 1) - mk * (mk + 1))
    jx = 0.5 * (jp + jp.conj().T)
    jy = -0.5j * (jp - jp.conj().T)
    for a in (jx, jy, jz):
        a.setflags(write=False)
    return jx, jy, jz


def wigner_matrix(two_j: int, g: SU2) -> np.ndarray:
    """Spin-j representation exp(i omega n.J) of ``g``."""
    return wigner_matrices(two_j, np.array([g.rotation_vector()]))[0]


def wigner_matrices(two_j: int, rotation_vectors: np.ndarray) -> np.ndarray:
    """Batched spin-j representation for an (N, 3) array of omega*n vectors."""
    rv = np.asarray(rotation_vectors, dtype=float)
    if two_j == 0:
        return np.ones((len(rv), 1, 1), dtype=complex)
    jx, jy, jz = spin_matrices(two_j)
    gen = rv[:, 0, None, None] * jx + rv[:, 1, None, None] * jy + rv[:, 2, None, None] * jz
    w, v = np.linalg.eigh(gen)
    return np.einsum("nij,nj,nkj->nik", v, np.exp(1j * w), v.conj())


def rotation_vectors(elements) -> np.ndarray:
    return np.array([g.rotation_vector() for g in elements])


def rep_unitary(space: AnySpace, g: GroupElement) -> np.ndarray:
    """Block-diagonal unitary U(g) on ``space`` (Kronecker product on products)."""
    if group_of(g) != space.group:
        raise TypeError(f"{space.group} space cannot carry a {group_of(g)} element")
    if isinstance(space, ProductSpace):
        out = np.ones((1, 1), dtype=complex)
        for f in space.factors:
            out = np.kron(out, rep_unitary(f, g))
        return out
    if space.group == "u1":
        return np.diag(np.exp(1j * space.basis_charges() * g.theta))
    return _su2_blocks(space, np.array([g.rotation_vector()]))[0]


def rep_unitaries(space: Space, elements) -> np.ndarray:
    """Stacked U(g_i) for a sequence of group elements on a single space."""
    if space.group == "u1":
        theta = np.array([g.theta for g in elements])
        phases = np.exp(1j * theta[:, None] * space.basis_charges()[None, :])
        return np.einsum("ni,ij->nij", phases, np.eye(space.dim))
    return _su2_blocks(space, rotation_vectors(elements))


def _su2_blocks(space: Space, rv: np.ndarray) -> np.ndarray:
    n = len(rv)
    out = np.zeros((n, space.dim, space.dim), dtype=complex)
    for sector, sl in space.sector_slices():
        d = wigner_matrices(sector.charge, rv)
        if sector.mult_dim == 1:
            out[:, sl, sl] = d
        else:
            eye = np.eye(sector.mult_dim)
            out[:, sl, sl] = np.einsum("nab,cd->nacbd", d, eye).reshape(n, sector.dim, sector.dim)
    return out


# tensor structure -----------------------------------------------------------

def tensor(a, b):
    """Tensor product of two spaces, or Kronecker product of two arrays."""
    if isinstance(a, (Space, ProductSpace)) and isinstance(b, (Space, ProductSpace)):
        return ProductSpace((a, b))
    return np.kron(np.asarray(a), np.asarray(b))


def partial_trace(rho: np.ndarray, dims: Sequence[int], keep) -> np.ndarray:
    """Trace out every factor not listed in ``keep``.

    ``dims`` declares the tensor factorisation; it must multiply to the
    matrix dimension.
    """
    rho = np.asarray(rho)
    dims = tuple(int(d) for d in dims)
    if int(np.prod(dims)) != rho.shape[0] or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"dims {dims} do not factor a {rho.shape} operator")
    if isinstance(keep, (int, np.integer)):
        keep = (int(keep),)
    keep = sorted(set(keep))
    n = len(dims)
    t = rho.reshape(dims + dims)
    letters = "abcdefghijklmnopqrstuvwxyz"
    row = list(letters[:n])
    col = list(letters[n:2 * n])
    for i in range(n):
        if i not in keep:
            col[i] = row[i]
    out = "".join(row[i] for i in keep) + "".join(col[i] for i in keep)
    res = np.einsum("".join(row) + "".join(col) + "->" + out, t)
    d = int(np.prod([dims[i] for i in keep])) if keep else 1
    return res.reshape(d, d)


def apply_local(rho: np.ndarray, ops: Sequence[np.ndarray], dims: Sequence[int]) -> np.ndarray:
    """(U_1 x ... x U_k) rho (U_1 x ... x U_k)^dagger without forming the Kronecker product."""
    dims = tuple(dims)
    k = len(dims)
    t = rho.reshape(dims + dims)
    for i, u in enumerate(ops):
        if u is None:
            continue
        t = np.moveaxis(np.tensordot(u, t, axes=([1], [i])), 0, i)
        t = np.moveaxis(np.tensordot(t, u.conj(), axes=([k + i], [1])), -1, k + i)
    return t.reshape(rho.shape)


# states ------------------------------------------------------------------

def ket_to_density(psi: np.ndarray) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex).ravel()
    return np.outer(psi, psi.conj())


def as_density(state) -> np.ndarray:
    state = np.asarray(state, dtype=complex)
    if state.ndim == 1:
        return ket_to_density(state)
    return state


def check_ket(psi: np.ndarray, atol: float = 1e-12) -> np.ndarray:
    norm = np.linalg.norm(psi)
    if abs(norm - 1) > atol:
        raise PhysicalityError(f"ket norm {norm!r} differs from 1")
    return psi


def check_density(rho: np.ndarray, *, herm_tol: float = 1e-12, trace_tol: float = 1e-12,
                  psd_tol: float = 1e-10, normalized: bool = True) -> np.ndarray:
    """Raise :class:`PhysicalityError` unless ``rho`` is a valid density operator."""
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise PhysicalityError(f"not a square matrix: shape {rho.shape}")
    herm = np.max(np.abs(rho - rho.conj().T)) if rho.size else 0.0
    if herm > herm_tol:
        raise PhysicalityError(f"not Hermitian (deviation {herm:.3g})")
    if normalized and abs(np.trace(rho) - 1) > trace_tol:
        raise PhysicalityError(f"trace {np.trace(rho).real:.15g} differs from 1")
    lo = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T)).min()
    if lo < -psd_tol:
        raise PhysicalityError(f"negative eigenvalue {lo:.3g}")
    return rho


def _psd_sqrt(rho: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(0.5 * (rho + rho.conj().T))
    w = np.clip(w, 0.0, None)
    return (v * np.sqrt(w)) @ v.conj().T


def fidelity(rho: np.ndarray, sigma: np.ndarray) -> float:
    """Uhlmann root fidelity  ||sqrt(rho) sqrt(sigma)||_1."""
    rho, sigma = as_density(rho), as_density(sigma)
    if rho.shape != sigma.shape:
        raise ValueError(f"dimension mismatch {rho.shape} vs {sigma.shape}")
    s = np.linalg.svd(_psd_sqrt(rho) @ _psd_sqrt(sigma), compute_uv=False)
    return float(min(1.0, s.sum()))


def trace_distance(rho: np.ndarray, sigma: np.ndarray) -> float:
    rho, sigma = as_density(rho), as_density(sigma)
    if rho.shape != sigma.shape:
        raise ValueError(f"dimension mismatch {rho.shape} vs {sigma.shape}")
    d = rho - sigma
    return float(0.5 * np.abs(np.linalg.eigvalsh(0.5 * (d + d.conj().T))).sum())


def purity(rho: np.ndarray) -> float:
    return float(np.real(np.trace(rho @ rho)))


def random_density(dim: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    """Random density matrix from the induced (Ginibre) measure."""
    rank = dim if rank is None else rank
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho)


def random_ket(dim: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)
