"""Two-copy operators P_d, P_b, P_f, P^-, V and Ṽ, their expectation values,
and dense health checks of their projector properties.

The bosonic and fermionic operators are defined as acting on
``Sym^L ⊗ Sym^L`` (resp. ``∧^L ⊗ ∧^L``). By default they are materialized in
that sense, as the compression ``Q (c P_d) Q`` with ``Q`` the within-copy
(anti)symmetrizer on both copies. ``form="literal"`` gives the bare operator
product ``c P_d Q`` on the full two-copy space instead, which is not Hermitian.
"""
from __future__ import annotations

import enum
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from typing import Iterable

import numpy as np

from .errors import KindError, ParameterError
from .states import (MixedState, PureState, basis_ket, slater_ket,
                     symmetry_kind_check)
from .tensor_core import (DEFAULT_DENSE_CAP, Kind, SystemShape, alpha_factor,
                          apply_copy_exchange, apply_pair_projector,
                          apply_product_symmetrizer, materialize,
                          product_symmetrizer_expectation_pure, purity)

HEALTH_TOL = 1e-10
DEFAULT_GRID = ((2, 2), (2, 3), (2, 4), (3, 2), (3, 3))


class Tag(str, enum.Enum):
    PD = "Pd"
    PB = "Pb"
    PF = "Pf"
    PMINUS = "Pminus"
    V = "V"
    VTILDE = "Vtilde"


@dataclass(frozen=True)
class ProjectorSpec:
    tag: Tag
    shape: SystemShape

    def __post_init__(self):
        object.__setattr__(self, "tag", Tag(self.tag))

    @property
    def alpha(self) -> float:
        if self.tag in (Tag.PF, Tag.VTILDE):
            return alpha_factor(self.shape.L)
        return 1.0

    @property
    def parity(self) -> str | None:
        """Within-copy restriction the operator is understood to act on."""
        if self.tag is Tag.PB:
            return "sym"
        if self.tag in (Tag.PF, Tag.VTILDE):
            return "asym"
        if self.tag in (Tag.PMINUS, Tag.V):
            return {Kind.BOSON: "sym", Kind.FERMION: "asym"}.get(self.shape.kind)
        return None


def apply_pminus(v: np.ndarray, N: int, L: int) -> np.ndarray:
    """Antisymmetrizer under exchange of the two copies."""
    return 0.5 * (np.asarray(v) - apply_copy_exchange(v, N, L))


def _bare(spec: ProjectorSpec, v: np.ndarray) -> np.ndarray:
    N, L = spec.shape.N, spec.shape.L
    tag = spec.tag
    if tag in (Tag.PD, Tag.PB, Tag.PF):
        return spec.alpha * apply_product_symmetrizer(v, N, L)
    if tag is Tag.PMINUS:
        return apply_pminus(v, N, L)
    c = spec.alpha
    return (v - c * apply_product_symmetrizer(v, N, L)
            - 2 * c * (1 - 2.0 ** -L) * apply_pminus(v, N, L))


def apply_projector(spec: ProjectorSpec, v: np.ndarray, form: str = "compressed") -> np.ndarray:
    """Matrix-free application of a two-copy operator to (a batch of) vectors."""
    if form not in ("compressed", "literal"):
        raise ParameterError(f"form must be 'compressed' or 'literal', got {form!r}")
    N, L = spec.shape.N, spec.shape.L
    parity = spec.parity
    if parity is None:
        return _bare(spec, v)
    w = _bare(spec, apply_pair_projector(v, N, L, parity))
    if form == "compressed":
        w = apply_pair_projector(w, N, L, parity)
    return w


def materialize_dense(spec: ProjectorSpec, cap: int = DEFAULT_DENSE_CAP,
                      form: str = "compressed") -> np.ndarray:
    """Explicit ``N^{2L} x N^{2L}`` matrix, refused beyond ``cap``."""
    spec.shape.check_dense_cap(cap)
    return materialize(lambda b: apply_projector(spec, b, form), spec.shape.two_copy_dim, cap)


def _two_copy(psi: np.ndarray) -> np.ndarray:
    return np.kron(psi, psi)


def expect_pd(psi: PureState, method: str = "purity", cap: int = DEFAULT_DENSE_CAP) -> float:
    """``<psi psi| P_d |psi psi>`` by subset purities, matrix-free or dense."""
    a = psi.amplitudes
    N, L = psi.N, psi.L
    if method == "purity":
        return float(product_symmetrizer_expectation_pure(a, N, L))
    spec = ProjectorSpec(Tag.PD, SystemShape(Kind.DISTINGUISHABLE, L, N))
    return _two_copy_expect(spec, a, method, cap)


def _two_copy_expect(spec: ProjectorSpec, a: np.ndarray, method: str, cap: int) -> float:
    w = _two_copy(a)
    if method == "two-copy":
        return float(np.vdot(w, apply_projector(spec, w)).real)
    if method == "dense":
        return float(np.vdot(w, materialize_dense(spec, cap) @ w).real)
    raise ParameterError(f"unknown method {method!r}")


def require_kind(psi: PureState, kind: Kind) -> None:
    """Raise :class:`KindError` unless ``psi`` has the exchange symmetry of ``kind``."""
    diag = symmetry_kind_check(psi.amplitudes, psi.N, psi.L)
    ok = diag.boson_compatible if kind is Kind.BOSON else diag.fermion_compatible
    if not ok:
        raise KindError(f"state is not a valid {kind.value} state (diagnosis: {diag.kind})")


def expect_pb(psi: PureState, method: str = "purity", cap: int = DEFAULT_DENSE_CAP) -> float:
    """Bosonic expectation; equals ``expect_pd`` on symmetric input."""
    require_kind(psi, Kind.BOSON)
    if method == "purity":
        return expect_pd(psi)
    spec = ProjectorSpec(Tag.PB, SystemShape(Kind.BOSON, psi.L, psi.N))
    return _two_copy_expect(spec, psi.amplitudes, method, cap)


def expect_pf(psi: PureState, method: str = "purity", cap: int = DEFAULT_DENSE_CAP) -> float:
    """``alpha <P_d>`` on antisymmetric input."""
    require_kind(psi, Kind.FERMION)
    if method == "purity":
        return alpha_factor(psi.L) * expect_pd(psi)
    spec = ProjectorSpec(Tag.PF, SystemShape(Kind.FERMION, psi.L, psi.N))
    return _two_copy_expect(spec, psi.amplitudes, method, cap)


def expect_pminus(rho: MixedState | PureState) -> float:
    """``tr((rho ⊗ rho) P^-) = (1 - tr rho^2) / 2``."""
    if isinstance(rho, PureState):
        return 0.0
    return 0.5 * (1.0 - purity(rho.matrix))


def two_copy_expectation(rho: MixedState, spec: ProjectorSpec, method: str = "two-copy",
                         cap: int = DEFAULT_DENSE_CAP) -> float:
    """``tr((rho ⊗ rho) W)`` without the purity shortcut.

    ``"two-copy"`` uses ``rho ⊗ rho = sum_kl lam_k lam_l |kl><kl|`` over the
    eigen-ensemble and applies ``W`` matrix-free; ``"dense"`` materializes
    both ``rho ⊗ rho`` and ``W``.
    """
    if method == "dense":
        m = materialize_dense(spec, cap)
        k = np.kron(rho.matrix, rho.matrix)
        return float(np.sum(k * m.T).real)
    if method != "two-copy":
        raise ParameterError(f"unknown method {method!r}")
    lam, vecs = rho.eigh()
    keep = lam > 1e-15
    lam, vecs = lam[keep], vecs[:, keep]
    r = lam.size
    pairs = np.einsum("ak,bl->klab", vecs, vecs).reshape(r * r, -1)
    weights = np.outer(lam, lam).reshape(-1)
    vals = np.einsum("ka,ka->k", pairs.conj(), apply_projector(spec, pairs))
    return float(np.sum(weights * vals.real))


@dataclass(frozen=True)
class HealthReport:
    tag: str
    kind: str
    L: int
    N: int
    alpha: float
    form: str
    idempotence_defect: float
    hermiticity_defect: float
    highest_weight_defect: float
    subspace_defect: float

    def passed(self, tol: float = HEALTH_TOL) -> bool:
        return max(self.idempotence_defect, self.hermiticity_defect,
                   self.highest_weight_defect, self.subspace_defect) <= tol

    def to_dict(self) -> dict:
        d = asdict(self)
        d["passed"] = self.passed()
        return d


_KIND_OF_TAG = {Tag.PD: Kind.DISTINGUISHABLE, Tag.PB: Kind.BOSON, Tag.PF: Kind.FERMION}


def highest_weight_vector(tag: Tag, L: int, N: int) -> np.ndarray:
    """``e_0^{⊗L}`` for P_d and P_b, the Slater determinant on ``e_0..e_{L-1}`` for P_f."""
    if Tag(tag) is Tag.PF:
        return slater_ket(range(L), N)
    return basis_ket([0] * L, N)


def projector_healthcheck(spec: ProjectorSpec, cap: int = DEFAULT_DENSE_CAP,
                          form: str = "compressed") -> HealthReport:
    if spec.tag not in _KIND_OF_TAG:
        raise ParameterError(f"health check defined for Pd, Pb, Pf only, not {spec.tag.value}")
    L, N = spec.shape.L, spec.shape.N
    m = materialize_dense(spec, cap, form)
    dim = m.shape[0]
    op = lambda a: np.linalg.norm(a, 2)
    hw = highest_weight_vector(spec.tag, L, N)
    ww = np.kron(hw, hw)
    if spec.parity is None:
        subspace = 0.0
    else:
        q = materialize(lambda b: apply_pair_projector(b, N, L, spec.parity), dim, cap)
        subspace = op((np.eye(dim) - q) @ m @ q)
    return HealthReport(
        tag=spec.tag.value, kind=_KIND_OF_TAG[spec.tag].value, L=L, N=N, alpha=spec.alpha,
        form=form,
        idempotence_defect=float(op(m @ m - m)),
        hermiticity_defect=float(op(m - m.conj().T)),
        highest_weight_defect=float(np.linalg.norm(m @ ww - ww)),
        subspace_defect=float(subspace),
    )


def healthcheck_grid(grid: Iterable[tuple[int, int]] = DEFAULT_GRID,
                     tags: Iterable[Tag | str] = (Tag.PD, Tag.PB, Tag.PF),
                     cap: int = DEFAULT_DENSE_CAP, form: str = "compressed",
                     workers: int | None = None) -> list[HealthReport]:
    """Health reports for every applicable (tag, L, N); P_f needs ``N >= L``."""
    specs = []
    for L, N in grid:
        for tag in tags:
            tag = Tag(tag)
            if tag is Tag.PF and N < L:
                continue
            specs.append(ProjectorSpec(tag, SystemShape(_KIND_OF_TAG[tag], L, N)))
    for s in specs:
        s.shape.check_dense_cap(cap)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda s: projector_healthcheck(s, cap, form), specs))
