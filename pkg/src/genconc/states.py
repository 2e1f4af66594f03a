"""Pure and mixed states of distinguishable particles, bosons and fermions.

Bosonic and fermionic states are always stored embedded in the full tensor
space ``(C^N)^{⊗L}``; the occupation and Slater coordinates are only used at
construction time.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .errors import KindError, ParameterError, ShapeError, ValidationError
from .tensor_core import (NORM_TOL, Kind, SystemShape, apply_site_permutation,
                          apply_total_symmetrizer, reduced_density)

SYMMETRY_TOL = 1e-10


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


def _parity(kind: Kind) -> str | None:
    return {Kind.BOSON: "sym", Kind.FERMION: "asym"}.get(kind)


def subspace_dimension(shape: SystemShape) -> int:
    if shape.kind is Kind.BOSON:
        return math.comb(shape.N + shape.L - 1, shape.L)
    if shape.kind is Kind.FERMION:
        return math.comb(shape.N, shape.L)
    return shape.dim


def project_to_kind(v: np.ndarray, shape: SystemShape) -> np.ndarray:
    """Orthogonal projection onto Sym^L / ∧^L (identity for distinguishable)."""
    parity = _parity(shape.kind)
    if parity is None:
        return np.asarray(v)
    return apply_total_symmetrizer(v, shape.N, range(shape.L), parity, M=shape.L)


@dataclass(frozen=True)
class SymmetryDiagnosis:
    kind: str
    symmetric_deviation: float
    antisymmetric_deviation: float

    @property
    def boson_compatible(self) -> bool:
        return self.symmetric_deviation <= SYMMETRY_TOL

    @property
    def fermion_compatible(self) -> bool:
        return self.antisymmetric_deviation <= SYMMETRY_TOL


def _adjacent_swaps(L: int):
    for i in range(L - 1):
        perm = list(range(L))
        perm[i], perm[i + 1] = i + 1, i
        yield perm


def symmetry_kind_check(amplitudes: np.ndarray, N: int, L: int,
                        tol: float = SYMMETRY_TOL) -> SymmetryDiagnosis:
    """Classify a vector by its behaviour under adjacent site transpositions.

    Adjacent transpositions generate the symmetric group, so symmetry or
    antisymmetry under all of them settles the question for every permutation.
    """
    v = np.asarray(amplitudes)
    sym = asym = 0.0
    for perm in _adjacent_swaps(L):
        w = apply_site_permutation(v, N, perm)
        sym = max(sym, float(np.linalg.norm(w - v)))
        asym = max(asym, float(np.linalg.norm(w + v)))
    if L == 1:
        kind = "distinguishable"
    elif sym <= tol:
        kind = "boson"
    elif asym <= tol:
        kind = "fermion"
    else:
        kind = "mixed-symmetry"
    return SymmetryDiagnosis(kind, sym, asym)


@dataclass(frozen=True)
class PureState:
    shape: SystemShape
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        amps = _frozen(self.amplitudes).reshape(-1)
        object.__setattr__(self, "amplitudes", amps)
        if amps.size != self.shape.dim:
            raise ShapeError(f"{amps.size} amplitudes for a space of dimension {self.shape.dim}")
        norm = np.linalg.norm(amps)
        if abs(norm - 1) > NORM_TOL:
            raise ValidationError(f"state not normalized (norm {norm:.17g})")
        diag = symmetry_kind_check(amps, self.shape.N, self.shape.L)
        if self.shape.kind is Kind.BOSON and not diag.boson_compatible:
            raise KindError(f"bosonic state not symmetric (deviation {diag.symmetric_deviation:.3g})")
        if self.shape.kind is Kind.FERMION and not diag.fermion_compatible:
            raise KindError(
                f"fermionic state not antisymmetric (deviation {diag.antisymmetric_deviation:.3g})")

    @property
    def N(self) -> int:
        return self.shape.N

    @property
    def L(self) -> int:
        return self.shape.L

    @property
    def kind(self) -> Kind:
        return self.shape.kind

    def density(self) -> "MixedState":
        return MixedState(self.shape, np.outer(self.amplitudes, self.amplitudes.conj()))

    def as_kind(self, kind: Kind | str) -> "PureState":
        """Same amplitudes, reinterpreted (and revalidated) as another kind."""
        return PureState(SystemShape(kind, self.L, self.N), self.amplitudes)


def support_deviation(matrix: np.ndarray, shape: SystemShape) -> float:
    """``|Q rho Q - rho|`` with ``Q`` the projector onto the kind's subspace."""
    if _parity(shape.kind) is None:
        return 0.0
    # Q is a real symmetric matrix, so acting on rows is right multiplication
    q_rho = project_to_kind(matrix.T, shape).T
    q_rho_q = project_to_kind(q_rho, shape)
    return float(np.linalg.norm(q_rho_q - matrix))


@dataclass(frozen=True)
class MixedState:
    shape: SystemShape
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        m = _frozen(self.matrix)
        object.__setattr__(self, "matrix", m)
        d = self.shape.dim
        if m.shape != (d, d):
            raise ShapeError(f"density matrix shape {m.shape}, expected {(d, d)}")
        herm = np.linalg.norm(m - m.conj().T)
        if herm > NORM_TOL:
            raise ValidationError(f"density matrix not Hermitian (defect {herm:.3g})")
        tr = np.trace(m)
        if abs(tr - 1) > NORM_TOL:
            raise ValidationError(f"density matrix trace {tr.real:.17g} != 1")
        lam_min = np.linalg.eigvalsh(0.5 * (m + m.conj().T))[0]
        if lam_min < -NORM_TOL:
            raise ValidationError(f"density matrix not positive (min eigenvalue {lam_min:.3g})")
        dev = support_deviation(m, self.shape)
        if dev > SYMMETRY_TOL:
            raise KindError(f"{self.shape.kind.value} density matrix has support outside "
                            f"its subspace (deviation {dev:.3g})")

    @property
    def N(self) -> int:
        return self.shape.N

    @property
    def L(self) -> int:
        return self.shape.L

    @property
    def kind(self) -> Kind:
        return self.shape.kind

    def eigh(self) -> tuple[np.ndarray, np.ndarray]:
        lam, vecs = np.linalg.eigh(0.5 * (self.matrix + self.matrix.conj().T))
        return lam, vecs


def _normalized(v: np.ndarray) -> np.ndarray:
    n = np.linalg.norm(v)
    if n == 0:
        raise ValidationError("amplitudes describe the zero vector")
    return v / n


def product_state(vectors: Sequence[np.ndarray]) -> PureState:
    """Tensor product of ``L`` normalized single-particle vectors."""
    vectors = [np.asarray(x, dtype=complex).reshape(-1) for x in vectors]
    if not vectors:
        raise ValidationError("need at least one factor")
    N = vectors[0].size
    out = np.ones(1, dtype=complex)
    for x in vectors:
        if x.size != N:
            raise ShapeError("factors have different dimensions")
        if abs(np.linalg.norm(x) - 1) > NORM_TOL:
            raise ValidationError(f"factor not normalized (norm {np.linalg.norm(x):.17g})")
        out = np.kron(out, x)
    return PureState(SystemShape(Kind.DISTINGUISHABLE, len(vectors), N), out)


def basis_ket(labels: Sequence[int], N: int) -> np.ndarray:
    v = np.zeros(N ** len(labels), dtype=complex)
    v[np.ravel_multi_index(tuple(labels), (N,) * len(labels))] = 1.0
    return v


def occupation_ket(counts: Sequence[int], N: int) -> np.ndarray:
    """Normalized symmetric basis vector with ``counts[i]`` particles in mode ``i``."""
    counts = [int(c) for c in counts]
    if len(counts) != N or any(c < 0 for c in counts):
        raise ValidationError(f"occupation vector {counts} invalid for N={N}")
    L = sum(counts)
    labels = [i for i, c in enumerate(counts) for _ in range(c)]
    sym = apply_total_symmetrizer(basis_ket(labels, N), N, range(L), "sym", M=L)
    coeff = math.sqrt(math.factorial(L) / math.prod(math.factorial(c) for c in counts))
    return coeff * sym


def slater_ket(indices: Sequence[int], N: int) -> np.ndarray:
    """``(1/sqrt(L!)) sum_sigma sgn(sigma) |i_sigma(1) ... i_sigma(L)>`` for 0-based indices."""
    indices = [int(i) for i in indices]
    if any(b <= a for a, b in zip(indices, indices[1:])):
        raise ValidationError(f"Slater index {indices} is not strictly increasing")
    if indices and (indices[0] < 0 or indices[-1] >= N):
        raise ValidationError(f"Slater index {indices} out of range for N={N}")
    L = len(indices)
    asym = apply_total_symmetrizer(basis_ket(indices, N), N, range(L), "asym", M=L)
    return math.sqrt(math.factorial(L)) * asym


def bosonic_state(L: int, N: int, amplitudes: Mapping[Sequence[int], complex]) -> PureState:
    """Bosonic state from occupation-number amplitudes, normalized globally."""
    if not amplitudes:
        raise ValidationError("amplitude map is empty")
    v = np.zeros(N ** L, dtype=complex)
    for counts, c in amplitudes.items():
        if sum(counts) != L:
            raise ValidationError(f"occupation {tuple(counts)} does not sum to L={L}")
        v += complex(c) * occupation_ket(counts, N)
    return PureState(SystemShape(Kind.BOSON, L, N), _normalized(v))


def slater_state(L: int, N: int, amplitudes: Mapping[Sequence[int], complex]) -> PureState:
    """Fermionic state from Slater-determinant amplitudes (0-based orbitals)."""
    shape = SystemShape(Kind.FERMION, L, N)
    if not amplitudes:
        raise ValidationError("amplitude map is empty")
    v = np.zeros(N ** L, dtype=complex)
    for idx, c in amplitudes.items():
        if len(idx) != L:
            raise ValidationError(f"Slater index {tuple(idx)} does not have length L={L}")
        v += complex(c) * slater_ket(idx, N)
    return PureState(shape, _normalized(v))


def condensate(phi: np.ndarray, L: int) -> PureState:
    """``|phi>^{⊗L}`` as a bosonic state."""
    phi = _normalized(np.asarray(phi, dtype=complex).reshape(-1))
    v = np.ones(1, dtype=complex)
    for _ in range(L):
        v = np.kron(v, phi)
    return PureState(SystemShape(Kind.BOSON, L, phi.size), v)


def slater_from_orbitals(orbitals: np.ndarray) -> PureState:
    """Normalized wedge product of the orthonormal columns of an ``N x L`` matrix."""
    orbitals = np.asarray(orbitals, dtype=complex)
    N, L = orbitals.shape
    gram = orbitals.conj().T @ orbitals
    if np.linalg.norm(gram - np.eye(L)) > NORM_TOL:
        raise ValidationError("orbitals are not orthonormal")
    v = np.ones(1, dtype=complex)
    for k in range(L):
        v = np.kron(v, orbitals[:, k])
    v = math.sqrt(math.factorial(L)) * apply_total_symmetrizer(v, N, range(L), "asym", M=L)
    return PureState(SystemShape(Kind.FERMION, L, N), v)


def _complex_gaussian(rng: np.random.Generator, size) -> np.ndarray:
    return rng.standard_normal(size) + 1j * rng.standard_normal(size)


def random_pure(shape: SystemShape, seed=None) -> PureState:
    """Haar-random pure state on the full space or on the embedded Sym^L / ∧^L.

    The projection of an isotropic complex Gaussian onto a subspace is an
    isotropic Gaussian there, so normalizing it gives the Haar measure.
    """
    rng = np.random.default_rng(seed)
    v = project_to_kind(_complex_gaussian(rng, shape.dim), shape)
    return PureState(shape, _normalized(v))


def random_unitary(N: int, rng: np.random.Generator) -> np.ndarray:
    """Haar unitary via QR with the phase fix of Mezzadri."""
    q, r = np.linalg.qr(_complex_gaussian(rng, (N, N)))
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_coherent(shape: SystemShape, seed=None) -> PureState:
    """Random product state, condensate or Slater determinant, depending on kind."""
    rng = np.random.default_rng(seed)
    if shape.kind is Kind.DISTINGUISHABLE:
        return product_state([_normalized(_complex_gaussian(rng, shape.N)) for _ in range(shape.L)])
    if shape.kind is Kind.BOSON:
        return condensate(_complex_gaussian(rng, shape.N), shape.L)
    return slater_from_orbitals(random_unitary(shape.N, rng)[:, :shape.L])


def random_mixed(shape: SystemShape, rank: int, seed=None) -> MixedState:
    """``sum_i w_i |psi_i><psi_i|`` with Haar ``psi_i`` and flat-Dirichlet weights."""
    sub = subspace_dimension(shape)
    if not 1 <= rank <= sub:
        raise ParameterError(f"rank {rank} outside 1..{sub} for {shape}")
    ss = np.random.SeedSequence(seed)
    weight_seed, *state_seeds = ss.spawn(rank + 1)
    w = np.random.default_rng(weight_seed).dirichlet(np.ones(rank))
    rho = np.zeros((shape.dim, shape.dim), dtype=complex)
    for wi, s in zip(w, state_seeds):
        psi = random_pure(shape, s).amplitudes
        rho += wi * np.outer(psi, psi.conj())
    rho = 0.5 * (rho + rho.conj().T)
    return MixedState(shape, rho / np.trace(rho).real)


def schmidt_coefficients(psi: PureState, site: int) -> np.ndarray:
    """Schmidt coefficients of ``psi`` across the cut (site | rest), nonincreasing."""
    if not 0 <= site < psi.L:
        raise ShapeError(f"site {site} out of range 0..{psi.L - 1}")
    rest = [i for i in range(psi.L) if i != site]
    t = psi.amplitudes.reshape((psi.N,) * psi.L).transpose([site] + rest)
    return np.linalg.svd(t.reshape(psi.N, -1), compute_uv=False)


def single_site_marginals(psi: PureState) -> list[np.ndarray]:
    return [reduced_density(psi.amplitudes, psi.N, psi.L, [i]) for i in range(psi.L)]


# Named states used across tests and demos.

def bell_state() -> PureState:
    """``(|00> + |11>)/sqrt(2)``."""
    v = np.zeros(4, dtype=complex)
    v[0] = v[3] = 1 / math.sqrt(2)
    return PureState(SystemShape(Kind.DISTINGUISHABLE, 2, 2), v)


def ghz_state(L: int = 3, N: int = 2) -> PureState:
    v = np.zeros(N ** L, dtype=complex)
    for k in range(N):
        v[np.ravel_multi_index((k,) * L, (N,) * L)] = 1 / math.sqrt(N)
    return PureState(SystemShape(Kind.DISTINGUISHABLE, L, N), v)


def w_state(L: int = 3, kind: Kind | str = Kind.DISTINGUISHABLE) -> PureState:
    v = np.zeros(2 ** L, dtype=complex)
    for k in range(L):
        labels = [0] * L
        labels[k] = 1
        v += basis_ket(labels, 2)
    return PureState(SystemShape(kind, L, 2), v / math.sqrt(L))


def werner_state(p: float) -> MixedState:
    """``p |Phi+><Phi+| + (1 - p) I/4`` on two qubits."""
    phi = bell_state().amplitudes
    rho = p * np.outer(phi, phi.conj()) + (1 - p) * np.eye(4) / 4
    return MixedState(SystemShape(Kind.DISTINGUISHABLE, 2, 2), rho)


def maximally_mixed(shape: SystemShape) -> MixedState:
    """Normalized projector onto the kind's subspace."""
    q = project_to_kind(np.eye(shape.dim, dtype=complex), shape)
    return MixedState(shape, q / np.trace(q).real)


def slater_mixture(L: int, N: int, index_sets: Sequence[Sequence[int]],
                   weights: Sequence[float]) -> MixedState:
    """Convex combination of Slater-determinant projectors."""
    w = np.asarray(weights, dtype=float)
    if np.any(w < 0) or abs(w.sum() - 1) > NORM_TOL:
        raise ValidationError("weights must be nonnegative and sum to 1")
    rho = np.zeros((N ** L, N ** L), dtype=complex)
    for wi, idx in zip(w, index_sets):
        v = slater_ket(idx, N)
        rho += wi * np.outer(v, v.conj())
    return MixedState(SystemShape(Kind.FERMION, L, N), rho)


def coherent_mixture(shape: SystemShape, count: int, seed=None) -> MixedState:
    """Random convex mixture of ``count`` random coherent states."""
    ss = np.random.SeedSequence(seed)
    weight_seed, *state_seeds = ss.spawn(count + 1)
    w = np.random.default_rng(weight_seed).dirichlet(np.ones(count))
    rho = np.zeros((shape.dim, shape.dim), dtype=complex)
    for wi, s in zip(w, state_seeds):
        psi = random_coherent(shape, s).amplitudes
        rho += wi * np.outer(psi, psi.conj())
    rho = 0.5 * (rho + rho.conj().T)
    return MixedState(shape, rho / np.trace(rho).real)


def mixed_from_ensemble(shape: SystemShape, weights: Sequence[float],
                        states: Sequence[PureState]) -> MixedState:
    rho = sum(w * np.outer(s.amplitudes, s.amplitudes.conj()) for w, s in zip(weights, states))
    return MixedState(shape, rho)


def all_slater_indices(L: int, N: int):
    return itertools.combinations(range(N), L)
