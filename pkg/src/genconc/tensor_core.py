"""Index arithmetic on ``(C^N)^{⊗M}`` and matrix-free permutation operators.

Vectors are flat complex arrays of length ``N**M`` in row-major order, so
site 0 is the slowest-varying tensor index. Every function accepts extra
leading batch axes: an array of shape ``(..., N**M)`` is treated as a stack
of vectors. Sites are 0-based throughout the Python API.

Two-copy vectors live on ``2L`` sites; sites ``0..L-1`` form the first copy
and site ``L + i`` is the partner of site ``i`` in the second copy.
"""
from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import CapError, ShapeError, ValidationError

DEFAULT_DENSE_CAP = 4096
NORM_TOL = 1e-10


class Kind(str, enum.Enum):
    DISTINGUISHABLE = "distinguishable"
    BOSON = "boson"
    FERMION = "fermion"


@dataclass(frozen=True)
class SystemShape:
    """Particle kind, particle count ``L`` and single-particle dimension ``N``."""

    kind: Kind
    L: int
    N: int

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind(self.kind))
        if int(self.L) != self.L or self.L < 1:
            raise ValidationError(f"L must be a positive integer, got {self.L!r}")
        if int(self.N) != self.N or self.N < 1:
            raise ValidationError(f"N must be a positive integer, got {self.N!r}")
        object.__setattr__(self, "L", int(self.L))
        object.__setattr__(self, "N", int(self.N))
        if self.kind is Kind.FERMION and self.N < self.L:
            raise ValidationError(
                f"fermionic shape needs N >= L (got L={self.L}, N={self.N})")

    @property
    def dim(self) -> int:
        return self.N ** self.L

    @property
    def two_copy_dim(self) -> int:
        return self.N ** (2 * self.L)

    @property
    def alpha(self) -> float:
        return alpha_factor(self.L)

    def check_dense_cap(self, cap: int = DEFAULT_DENSE_CAP) -> None:
        if self.two_copy_dim > cap:
            raise CapError(
                f"two-copy dimension {self.two_copy_dim} exceeds dense cap {cap}; "
                f"rerun with a cap of at least {self.two_copy_dim}")


def alpha_factor(L: int) -> float:
    """Fermionic normalization ``2**L / (L + 1)``."""
    return 2.0 ** L / (L + 1)


def num_sites(size: int, N: int) -> int:
    """Number of tensor factors ``M`` with ``N**M == size``."""
    if N == 1:
        if size != 1:
            raise ShapeError(f"size {size} is not a power of N=1")
        return 1
    M = int(round(math.log(size, N)))
    if N ** M != size:
        raise ShapeError(f"vector length {size} is not a power of N={N}")
    return M


def _as_tensor(v: np.ndarray, N: int, M: int) -> np.ndarray:
    v = np.asarray(v)
    if v.shape[-1] != N ** M:
        raise ShapeError(f"expected trailing dimension {N ** M} (= {N}^{M}), got {v.shape[-1]}")
    return v.reshape(v.shape[:-1] + (N,) * M)


def _transpose_sites(v: np.ndarray, N: int, M: int, axes: Sequence[int]) -> np.ndarray:
    t = _as_tensor(v, N, M)
    nb = t.ndim - M
    full = list(range(nb)) + [nb + a for a in axes]
    return np.ascontiguousarray(t.transpose(full)).reshape(v.shape)


def _check_perm(perm: Sequence[int]) -> tuple[int, ...]:
    perm = tuple(int(p) for p in perm)
    if sorted(perm) != list(range(len(perm))):
        raise ShapeError(f"{perm} is not a permutation of 0..{len(perm) - 1}")
    return perm


def permutation_sign(perm: Sequence[int]) -> int:
    perm = _check_perm(perm)
    sign = 1
    seen = [False] * len(perm)
    for start in range(len(perm)):
        if seen[start]:
            continue
        j, length = start, 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def apply_site_permutation(v: np.ndarray, N: int, perm: Sequence[int]) -> np.ndarray:
    """Move the tensor factor at site ``k`` to site ``perm[k]``.

    ``len(perm)`` fixes the number of sites. The map is a basis permutation,
    so norms are preserved exactly.
    """
    perm = _check_perm(perm)
    M = len(perm)
    inverse = [0] * M
    for k, p in enumerate(perm):
        inverse[p] = k
    return _transpose_sites(v, N, M, inverse)


def _check_sites(sites: Iterable[int], L: int) -> tuple[int, ...]:
    sites = tuple(sorted(set(int(s) for s in sites)))
    if any(s < 0 or s >= L for s in sites):
        raise ShapeError(f"site mask {sites} out of range 0..{L - 1}")
    return sites


def apply_copy_swap(v: np.ndarray, N: int, L: int, sites: Iterable[int]) -> np.ndarray:
    """Exchange factors ``i`` and ``L + i`` of a two-copy vector for each ``i`` in ``sites``."""
    sites = _check_sites(sites, L)
    axes = list(range(2 * L))
    for i in sites:
        axes[i], axes[L + i] = L + i, i
    return _transpose_sites(v, N, 2 * L, axes)


def apply_copy_exchange(v: np.ndarray, N: int, L: int) -> np.ndarray:
    """Swap the two copies as wholes (copy swap on every site)."""
    return apply_copy_swap(v, N, L, range(L))


def apply_pairwise_symmetrizer(v: np.ndarray, N: int, L: int, i: int) -> np.ndarray:
    """``(v + swap_{i,L+i} v) / 2``."""
    return 0.5 * (np.asarray(v) + apply_copy_swap(v, N, L, [i]))


def apply_product_symmetrizer(v: np.ndarray, N: int, L: int, method: str = "subsets") -> np.ndarray:
    """Product of all pairwise copy symmetrizers.

    ``method="subsets"`` expands the product as ``2**-L`` times the sum of
    copy swaps over all site subsets; ``method="pairwise"`` composes the
    ``L`` pairwise symmetrizers one after another.
    """
    v = np.asarray(v)
    if method == "pairwise":
        out = v
        for i in range(L):
            out = apply_pairwise_symmetrizer(out, N, L, i)
        return out
    if method != "subsets":
        raise ValueError(f"unknown method {method!r}")
    _as_tensor(v, N, 2 * L)
    acc = np.zeros(v.shape, dtype=np.result_type(v.dtype, np.float64))
    for mask in itertools.product((False, True), repeat=L):
        acc += apply_copy_swap(v, N, L, [i for i in range(L) if mask[i]])
    return acc / 2 ** L


def apply_total_symmetrizer(v: np.ndarray, N: int, sites: Sequence[int], parity: str = "sym",
                            M: int | None = None) -> np.ndarray:
    """(Anti)symmetrize ``v`` over the factors sitting at ``sites``.

    Returns ``(1/k!) sum_sigma sgn(sigma)^p P_sigma v`` where ``sigma`` runs
    over permutations of the ``k = len(sites)`` listed sites, ``p = 0`` for
    ``parity="sym"`` and ``p = 1`` for ``parity="asym"``.
    """
    v = np.asarray(v)
    if M is None:
        M = num_sites(v.shape[-1], N)
    sites = list(sites)
    if len(set(sites)) != len(sites) or any(s < 0 or s >= M for s in sites):
        raise ShapeError(f"invalid site list {sites} for {M} sites")
    if parity not in ("sym", "asym"):
        raise ValueError(f"parity must be 'sym' or 'asym', got {parity!r}")
    acc = np.zeros(v.shape, dtype=np.result_type(v.dtype, np.float64))
    for sigma in itertools.permutations(range(len(sites))):
        perm = list(range(M))
        for a, b in enumerate(sigma):
            perm[sites[a]] = sites[b]
        term = apply_site_permutation(v, N, perm)
        if parity == "asym" and permutation_sign(sigma) < 0:
            acc -= term
        else:
            acc += term
    return acc / math.factorial(len(sites))


def apply_pair_projector(v: np.ndarray, N: int, L: int, parity: str) -> np.ndarray:
    """Within-copy (anti)symmetrizer on both copies of a two-copy vector."""
    out = apply_total_symmetrizer(v, N, range(L), parity, M=2 * L)
    return apply_total_symmetrizer(out, N, range(L, 2 * L), parity, M=2 * L)


def partial_trace(rho: np.ndarray, N: int, L: int, keep: Iterable[int]) -> np.ndarray:
    """Reduced density matrix on the sites in ``keep`` (kept in ascending order)."""
    keep = _check_sites(keep, L)
    if not keep:
        raise ValidationError("keep mask is empty; the reduced state would be a scalar")
    rho = np.asarray(rho)
    if rho.shape != (N ** L, N ** L):
        raise ShapeError(f"expected a {N ** L}x{N ** L} matrix, got {rho.shape}")
    if len(keep) == L:
        return rho
    t = rho.reshape((N,) * (2 * L))
    traced = [i for i in range(L) if i not in keep]
    row = list(range(L))
    col = list(range(L, 2 * L))
    for i in traced:
        col[i] = row[i]
    out = [row[i] for i in keep] + [col[i] for i in keep]
    dk = N ** len(keep)
    return np.einsum(t, row + col, out).reshape(dk, dk)


def reduced_density(psi: np.ndarray, N: int, L: int, keep: Iterable[int]) -> np.ndarray:
    """``partial_trace(|psi><psi|, keep)`` without forming the full projector."""
    keep = _check_sites(keep, L)
    if not keep:
        raise ValidationError("keep mask is empty; the reduced state would be a scalar")
    rest = [i for i in range(L) if i not in keep]
    t = _as_tensor(psi, N, L).transpose(list(keep) + rest)
    mat = t.reshape(N ** len(keep), -1)
    return mat @ mat.conj().T


def purity(rho: np.ndarray) -> float:
    """``tr(rho^2)`` for Hermitian ``rho``."""
    rho = np.asarray(rho)
    return float(np.real(np.vdot(rho.conj().T, rho)))


def _pure_subset_purity(psi: np.ndarray, N: int, L: int, sites: tuple[int, ...]) -> np.ndarray:
    # tr(rho_S^2) for unnormalized, possibly batched vectors; the Gram matrix
    # on the smaller side of the cut gives the same spectrum.
    rest = [i for i in range(L) if i not in sites]
    t = _as_tensor(psi, N, L)
    nb = t.ndim - L
    t = t.transpose(list(range(nb)) + [nb + i for i in sites] + [nb + i for i in rest])
    mat = t.reshape(t.shape[:nb] + (N ** len(sites), N ** len(rest)))
    if mat.shape[-2] <= mat.shape[-1]:
        gram = mat @ np.swapaxes(mat.conj(), -1, -2)
    else:
        gram = np.swapaxes(mat.conj(), -1, -2) @ mat
    return np.sum(np.abs(gram) ** 2, axis=(-1, -2))


def subset_purities(state: np.ndarray, N: int, L: int) -> dict[tuple[int, ...], float]:
    """Map each site subset ``S`` to ``tr(rho_S^2)``.

    ``state`` may be a vector (pure) or a density matrix. The empty subset
    maps to ``(tr rho)^2``.
    """
    state = np.asarray(state)
    out: dict[tuple[int, ...], float] = {}
    is_vector = state.ndim == 1
    if is_vector:
        norm2 = float(np.vdot(state, state).real)
    else:
        norm2 = float(np.trace(state).real)
    for mask in itertools.product((False, True), repeat=L):
        S = tuple(i for i in range(L) if mask[i])
        if not S:
            out[S] = norm2 ** 2
        elif is_vector:
            out[S] = float(_pure_subset_purity(state, N, L, S))
        else:
            out[S] = purity(partial_trace(state, N, L, S))
    return out


def product_symmetrizer_expectation_pure(psi: np.ndarray, N: int, L: int) -> np.ndarray:
    """``<psi psi| P_d |psi psi>`` from subset purities (vectorized over batches).

    Works for unnormalized vectors; the result then scales as ``|psi|^4``.
    """
    psi = np.asarray(psi)
    norm4 = np.sum(np.abs(psi) ** 2, axis=-1) ** 2
    total = 2.0 * norm4
    for mask in itertools.product((False, True), repeat=L):
        S = tuple(i for i in range(L) if mask[i])
        if 0 < len(S) < L:
            total = total + _pure_subset_purity(psi, N, L, S)
    return total / 2 ** L


def normalized_pd_expectation_ext(psi: np.ndarray, N: int, L: int) -> np.longdouble:
    """``<psi psi| P_d |psi psi> / |psi|^4`` evaluated in ``np.longdouble``.

    Near coherent states ``1 - <P_d>`` is a difference of nearly equal numbers,
    and in double precision its square root is only good to about 1e-8.
    Dividing by the computed norm and carrying the sum in extended precision
    pushes that floor down by the extra mantissa bits (none on platforms where
    ``longdouble`` is plain double).
    """
    a = np.asarray(psi).astype(np.clongdouble)
    norm2 = np.sum(a.real ** 2 + a.imag ** 2)
    total = 2 * norm2 ** 2
    t = a.reshape((N,) * L)
    for mask in itertools.product((False, True), repeat=L):
        S = [i for i in range(L) if mask[i]]
        if 0 < len(S) < L:
            rest = [i for i in range(L) if not mask[i]]
            m = t.transpose(S + rest).reshape(N ** len(S), -1)
            g = m @ m.conj().T if m.shape[0] <= m.shape[1] else m.conj().T @ m
            total += np.sum(g.real ** 2 + g.imag ** 2)
    return total / (2 ** L * norm2 ** 2)


def materialize(apply: Callable[[np.ndarray], np.ndarray], dim: int,
                cap: int = DEFAULT_DENSE_CAP) -> np.ndarray:
    """Dense matrix of a linear map given matrix-free, column by column."""
    if dim > cap:
        raise CapError(f"dimension {dim} exceeds dense cap {cap}; "
                       f"rerun with a cap of at least {dim}")
    basis = np.eye(dim, dtype=complex)
    # rows of the batch are the basis vectors, so the result holds columns as rows
    return np.ascontiguousarray(apply(basis).T)
