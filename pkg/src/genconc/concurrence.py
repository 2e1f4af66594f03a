"""Generalized concurrence of pure states and the coherence test built on it."""
from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from .errors import IntegrityError, ShapeError
from .projectors import expect_pb, expect_pd, expect_pf, require_kind
from .states import PureState
from .tensor_core import (DEFAULT_DENSE_CAP, Kind, normalized_pd_expectation_ext,
                          reduced_density)

COHERENCE_TOL = 1e-7
CLIP_WINDOW = 1e-10

_METHOD_LABEL = {"purity": "purity-path", "two-copy": "two-copy-path", "dense": "dense-path"}


@dataclass(frozen=True)
class ConcurrenceResult:
    value: float
    kind: str
    expectation: float
    method: str

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class CoherenceVerdict:
    coherent: bool
    concurrence: float
    tolerance: float
    bipartition_values: list[float] = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)


def _root(radicand, shown) -> float:
    if radicand < -CLIP_WINDOW:
        raise IntegrityError(
            f"two-copy expectation {shown:.17g} exceeds 1; the normalization is broken")
    return float(np.sqrt(max(float(radicand), 0.0)))


def concurrence_from_expectation(expectation: float) -> float:
    """``sqrt(1 - expectation)``; tiny negative radicands are round-off."""
    return _root(1.0 - expectation, expectation)


def concurrence_pure(psi: PureState, method: str = "purity",
                     cap: int = DEFAULT_DENSE_CAP) -> ConcurrenceResult:
    """C_d, C_b or C_f of ``psi``, chosen by its kind.

    Bosonic and fermionic inputs have their exchange symmetry re-checked
    before evaluation; a violation raises :class:`KindError`. The purity path
    forms the radicand in extended precision, so coherent states come out
    well below 1e-8 instead of at the square root of double round-off.
    """
    if method == "purity":
        if psi.kind is not Kind.DISTINGUISHABLE:
            require_kind(psi, psi.kind)
        c = np.longdouble(2) ** psi.L / (psi.L + 1) if psi.kind is Kind.FERMION else 1
        e = c * normalized_pd_expectation_ext(psi.amplitudes, psi.N, psi.L)
        value = _root(1 - e, float(e))
        return ConcurrenceResult(value, psi.kind.value, float(e), _METHOD_LABEL[method])
    if psi.kind is Kind.BOSON:
        e = expect_pb(psi, method, cap)
    elif psi.kind is Kind.FERMION:
        e = expect_pf(psi, method, cap)
    else:
        e = expect_pd(psi, method, cap)
    return ConcurrenceResult(concurrence_from_expectation(e), psi.kind.value, e,
                             _METHOD_LABEL.get(method, method))


def bipartition_value(psi: PureState, site: int) -> float:
    """``1 - <psi psi| P+_{site,site'} |psi psi> = (1 - tr rho_site^2) / 2``.

    Zero exactly when ``site`` is unentangled from the rest.
    """
    if not 0 <= site < psi.L:
        raise ShapeError(f"site {site} out of range 0..{psi.L - 1}")
    rho = reduced_density(psi.amplitudes, psi.N, psi.L, [site])
    return float(0.5 * (1.0 - np.sum(np.abs(rho) ** 2)))


def bipartition_values(psi: PureState) -> list[float]:
    return [bipartition_value(psi, i) for i in range(psi.L)]


def is_coherent(psi: PureState, tol: float = COHERENCE_TOL) -> CoherenceVerdict:
    c = concurrence_pure(psi).value
    return CoherenceVerdict(c <= tol, c, tol, bipartition_values(psi))


def gell_mann(N: int) -> list[np.ndarray]:
    """Generalized Gell-Mann matrices, normalized to ``tr(X_a X_b) = 2 delta_ab``."""
    out = []
    for j in range(N):
        for k in range(j + 1, N):
            s = np.zeros((N, N), dtype=complex)
            s[j, k] = s[k, j] = 1
            a = np.zeros((N, N), dtype=complex)
            a[j, k], a[k, j] = -1j, 1j
            out += [s, a]
    for l in range(1, N):
        d = np.zeros((N, N), dtype=complex)
        d[:l, :l] = np.eye(l)
        d[l, l] = -l
        out.append(d * np.sqrt(2.0 / (l * (l + 1))))
    return out


def _apply_local(op: np.ndarray, site: int, psi: np.ndarray, N: int, L: int) -> np.ndarray:
    t = psi.reshape((N,) * L)
    t = np.moveaxis(np.tensordot(op, t, axes=([1], [site])), 0, site)
    return t.reshape(-1)


def invariant_variance(psi: PureState, generators: Sequence[np.ndarray] | None = None) -> float:
    """Summed variance of the local-group generators.

    Distinguishable particles get each generator on each site separately;
    bosons and fermions get the collective ``sum_i X^(i)``. Any basis of
    ``su(N)`` orthonormal under ``tr(X_a X_b) = 2 delta_ab`` gives the same value.
    """
    N, L = psi.N, psi.L
    gens = gell_mann(N) if generators is None else [np.asarray(g) for g in generators]
    v = psi.amplitudes
    total = 0.0
    for x in gens:
        local = [_apply_local(x, i, v, N, L) for i in range(L)]
        ops = local if psi.kind is Kind.DISTINGUISHABLE else [sum(local)]
        for xv in ops:
            mean = np.vdot(v, xv).real
            total += np.vdot(xv, xv).real - mean ** 2
    return float(total)
