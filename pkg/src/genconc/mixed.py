"""Mixed states: two-copy lower bounds and a convex-roof upper estimate."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .concurrence import concurrence_pure
from .errors import KindError, ParameterError, ShapeError
from .projectors import ProjectorSpec, Tag, expect_pminus, two_copy_expectation
from .states import MixedState, PureState, support_deviation
from .tensor_core import DEFAULT_DENSE_CAP, Kind, SystemShape, alpha_factor, subset_purities

SUPPORT_TOL = 1e-10


@dataclass(frozen=True)
class BoundReport:
    """``witness = tr(rho ⊗ rho W)``; ``detected`` iff the witness is positive."""

    witness: float
    lower_bound: float
    detected: bool
    kind: str
    bound_on: str
    method: str

    def to_dict(self) -> dict:
        return dict(witness=self.witness, lower_bound=self.lower_bound, detected=self.detected,
                    kind=self.kind, bound_on=self.bound_on, method=self.method)


def mean_subset_purity(rho: MixedState) -> float:
    """``tr((rho ⊗ rho) P_d) = 2^-L sum_S tr(rho_S^2)``, empty subset counting 1."""
    pur = subset_purities(rho.matrix, rho.N, rho.L)
    return float(sum(pur.values())) / 2 ** rho.L


def _witness(rho: MixedState, tag: Tag, method: str, cap: int) -> float:
    L = rho.L
    if method == "purity":
        c = alpha_factor(L) if tag is Tag.VTILDE else 1.0
        return (1.0 - c * mean_subset_purity(rho)
                - 2 * c * (1 - 2.0 ** -L) * expect_pminus(rho))
    return two_copy_expectation(rho, ProjectorSpec(tag, rho.shape), method, cap)


def _check_support(rho: MixedState, kind: Kind) -> None:
    if rho.kind is not kind:
        raise KindError(f"expected a {kind.value} density matrix, got {rho.kind.value}")
    dev = support_deviation(rho.matrix, rho.shape)
    if dev > SUPPORT_TOL:
        raise KindError(f"support leaves the {kind.value} subspace (deviation {dev:.3g})")


def mb_bound(rho: MixedState, method: str = "purity", cap: int = DEFAULT_DENSE_CAP) -> BoundReport:
    """Two-copy witness ``tr(rho ⊗ rho V)`` with
    ``V = 1 - P_d - 2 (1 - 2^-L) P^-``; ``C_d(rho)^2 >= witness``.

    States of any kind are accepted through their embedding.
    """
    w = _witness(rho, Tag.V, method, cap)
    return BoundReport(w, math.sqrt(max(w, 0.0)), w > 0, rho.kind.value, "C_d", method)


def mb_bound_bosonic(rho: MixedState, method: str = "purity",
                     cap: int = DEFAULT_DENSE_CAP) -> BoundReport:
    """Same witness on ``Sym^L ⊗ Sym^L``; bounds ``C_b`` because ``C_b(rho) >= C_d(rho)``."""
    _check_support(rho, Kind.BOSON)
    w = _witness(rho, Tag.V, method, cap)
    return BoundReport(w, math.sqrt(max(w, 0.0)), w > 0, rho.kind.value, "C_b", method)


def fermionic_root(witness: float, L: int) -> float:
    """Largest ``C >= 0`` with ``C^2 + 2 sqrt(alpha - 1) C <= witness``."""
    if witness <= 0:
        return 0.0
    a = math.sqrt(alpha_factor(L) - 1.0)
    return -a + math.sqrt(a * a + witness)


def fermionic_detection(rho: MixedState, method: str = "purity",
                        cap: int = DEFAULT_DENSE_CAP) -> BoundReport:
    """Witness ``tr(rho ⊗ rho Ṽ)`` with ``Ṽ = 1 - alpha P_d - 2 alpha (1 - 2^-L) P^-``
    on ``∧^L ⊗ ∧^L``. A positive value certifies ``C_f(rho) > 0``.

    ``lower_bound`` is the positive root of ``C^2 + 2 sqrt(alpha-1) C = witness``.
    """
    _check_support(rho, Kind.FERMION)
    w = _witness(rho, Tag.VTILDE, method, cap)
    return BoundReport(w, fermionic_root(w, rho.L), w > 0, rho.kind.value, "C_f", method)


def fermionic_lower_from_distinguishable(f_value: float, L: int) -> float:
    """Turn a lower bound on ``C_d(rho)`` into one on ``C_f(rho)``."""
    alpha = alpha_factor(L)
    return max(0.0, math.sqrt(alpha) * f_value - math.sqrt(alpha - 1.0))


def _proper_subsets(L: int):
    for mask in itertools.product((False, True), repeat=L):
        S = [i for i in range(L) if mask[i]]
        if 0 < len(S) < L:
            yield S


_SY = np.array([[0, -1j], [1j, 0]])


def wootters_oracle(rho: MixedState) -> float:
    """Half the Wootters concurrence of a two-qubit state.

    The factor 1/2 matches the pure-state normalization ``C_d = C_W / 2``.
    """
    if (rho.L, rho.N) != (2, 2):
        raise ShapeError("the Wootters formula needs two qubits")
    yy = np.kron(_SY, _SY)
    # the mu_i are the singular values of sqrt(rho) yy sqrt(rho)*, which avoids
    # square roots of round-off eigenvalues for rank-deficient rho
    lam, vecs = rho.eigh()
    root = (vecs * np.sqrt(np.clip(lam, 0, None))) @ vecs.conj().T
    mu = np.linalg.svd(root @ yy @ root.conj(), compute_uv=False)
    return max(0.0, mu[0] - mu[1] - mu[2] - mu[3]) / 2


@dataclass(frozen=True)
class Decomposition:
    weights: np.ndarray
    states: list[PureState]

    def density(self) -> np.ndarray:
        return sum(p * np.outer(s.amplitudes, s.amplitudes.conj())
                   for p, s in zip(self.weights, self.states))

    def reconstruction_error(self, rho: MixedState) -> float:
        return float(np.linalg.norm(self.density() - rho.matrix))

    def average_concurrence(self) -> float:
        return float(sum(p * concurrence_pure(s).value for p, s in zip(self.weights, self.states)))

    def to_dict(self) -> dict:
        return {
            "weights": [float(p) for p in self.weights],
            "states": [[[float(z.real), float(z.imag)] for z in s.amplitudes] for s in self.states],
        }


@dataclass(frozen=True)
class RoofEstimate:
    """Best ensemble average found; an upper bound on the convex roof, never a claim of optimality."""

    value: float
    decomposition: Decomposition
    restarts_used: int
    converged: bool
    restart_values: list[float] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"value": self.value, "restarts_used": self.restarts_used,
                "converged": self.converged, "restart_values": self.restart_values,
                "decomposition": self.decomposition.to_dict()}


class _RoofObjective:
    """``sum_j p_j C(psi_j)`` over decompositions ``psi~ = U B``.

    ``B`` holds the weighted eigenvectors of rho as rows and ``U`` is an
    ``m x r`` isometry, which covers every size-``m`` decomposition. Member
    terms are evaluated on unnormalized vectors:
    ``p C(psi) = sqrt(|psi~|^4 - c <psi~ psi~|P_d|psi~ psi~>)``.
    """

    def __init__(self, rho: MixedState, m: int):
        lam, vecs = rho.eigh()
        keep = lam > 1e-14
        self.lam, self.vecs = lam[keep], vecs[:, keep]
        self.r = self.lam.size
        self.m = m
        self.N, self.L = rho.N, rho.L
        self.c = alpha_factor(rho.L) if rho.kind is Kind.FERMION else 1.0
        self.B = np.sqrt(self.lam)[:, None] * self.vecs.T

    def _unpack(self, x: np.ndarray) -> np.ndarray:
        k = self.m * self.r
        return (x[:k] + 1j * x[k:]).reshape(self.m, self.r)

    def isometry(self, x: np.ndarray) -> np.ndarray:
        u, _, vh = np.linalg.svd(self._unpack(x), full_matrices=False)
        return u @ vh

    def members(self, U: np.ndarray) -> np.ndarray:
        return U @ self.B

    def _g(self, psi: np.ndarray, with_grad: bool = False):
        # g = |psi|^4 - c <psi psi|P_d|psi psi>, batched over rows, and dg/dpsi*
        N, L = self.N, self.L
        norm2 = np.sum(np.abs(psi) ** 2, axis=1)
        pd = 2.0 * norm2 ** 2
        grad_pd = 4.0 * norm2[:, None] * psi if with_grad else None
        t = psi.reshape((psi.shape[0],) + (N,) * L)
        for S in _proper_subsets(L):
            rest = [i for i in range(L) if i not in S]
            order = [0] + [1 + i for i in S] + [1 + i for i in rest]
            mat = t.transpose(order).reshape(psi.shape[0], N ** len(S), -1)
            red = mat @ np.swapaxes(mat.conj(), 1, 2)
            pd = pd + np.sum(np.abs(red) ** 2, axis=(1, 2))
            if with_grad:
                back = (red @ mat).reshape((psi.shape[0],) + (N,) * L)
                grad_pd = grad_pd + 2.0 * back.transpose(np.argsort(order)).reshape(psi.shape)
        scale = self.c / 2 ** L
        g = norm2 ** 2 - scale * pd
        if not with_grad:
            return g
        return g, 2.0 * norm2[:, None] * psi - scale * grad_pd

    def terms(self, U: np.ndarray) -> np.ndarray:
        return np.sqrt(np.maximum(self._g(self.members(U)), 0.0))

    def value(self, U: np.ndarray) -> float:
        return float(np.sum(self.terms(U)))

    def __call__(self, x: np.ndarray) -> float:
        return self.value(self.isometry(x))

    def value_and_grad(self, x: np.ndarray) -> tuple[float, np.ndarray]:
        """Objective and its gradient in the packed real coordinates."""
        X = self._unpack(x)
        w, s, vh = np.linalg.svd(X, full_matrices=False)
        U = w @ vh
        g, dg = self._g(self.members(U), with_grad=True)
        root = np.sqrt(np.maximum(g, 0.0))
        # Wirtinger derivative d f / d psi*; members at the kink contribute nothing
        coef = np.where(g > 1e-28, 0.5 / np.sqrt(np.maximum(g, 1e-28)), 0.0)
        G_U = (coef[:, None] * dg) @ self.B.conj().T
        # back through the polar factor X -> X (X^H X)^{-1/2}
        v = vh.conj().T
        P_inv = (v / s) @ vh
        A_hat = vh @ (U.conj().T @ G_U) @ v
        C = v @ (A_hat / (s[:, None] + s[None, :])) @ vh
        G_X = (G_U - U @ (U.conj().T @ G_U)) @ P_inv + U @ (C - C.conj().T)
        return float(np.sum(root)), 2.0 * np.concatenate([G_X.real.ravel(), G_X.imag.ravel()])

    def pack(self, U: np.ndarray) -> np.ndarray:
        return np.concatenate([U.real.ravel(), U.imag.ravel()])


def _givens_polish(obj: _RoofObjective, U: np.ndarray, sweeps: int, tol: float) -> np.ndarray:
    """Gradient-free sweeps of two-member rotations ``U <- G_jk(theta, phi) U``."""
    m = U.shape[0]
    best = obj.value(U)

    def rotated(U, j, k, t):
        theta, phi = t
        c, s = np.cos(theta), np.sin(theta) * np.exp(1j * phi)
        V = U.copy()
        V[j], V[k] = c * U[j] - s.conjugate() * U[k], s * U[j] + c * U[k]
        return V

    for _ in range(sweeps):
        start = best
        for j in range(m):
            for k in range(j + 1, m):
                res = minimize(lambda t: obj.value(rotated(U, j, k, t)), np.zeros(2),
                               method="Nelder-Mead",
                               options=dict(xatol=1e-10, fatol=tol * 1e-2, maxiter=100,
                                            initial_simplex=[[0, 0], [0.05, 0], [0, 0.5]]))
                if res.fun < best:
                    U, best = rotated(U, j, k, res.x), res.fun
        if start - best < tol:
            break
    return U


def _decomposition(obj: _RoofObjective, U: np.ndarray, shape: SystemShape) -> Decomposition:
    psi = obj.members(U)
    p = np.sum(np.abs(psi) ** 2, axis=1)
    keep = p > 1e-14
    weights = p[keep] / p[keep].sum()
    states = [PureState(shape, v / np.linalg.norm(v)) for v in psi[keep]]
    return Decomposition(weights, states)


def convex_roof_upper(rho: MixedState, ensemble_size: int | None = None, restarts: int = 32,
                      max_iters: int = 500, tol: float = 1e-8, seed=0) -> RoofEstimate:
    """Upper estimate of the convex-roof concurrence by search over decompositions.

    Each restart runs a quasi-Newton descent over the isometry manifold
    (polar parametrization, analytic gradients) and then a pairwise
    rotation polish. Restart 0 starts from the eigen-ensemble, the others from
    random isometries seeded by splitting ``seed``. The best restart wins,
    ties going to the lowest index.
    """
    obj = _RoofObjective(rho, 1)
    r = obj.r
    m = 2 * r if ensemble_size is None else int(ensemble_size)
    if m < r:
        raise ParameterError(f"ensemble size {m} below rank {r}")
    if restarts < 1 or max_iters < 1:
        raise ParameterError("restarts and max_iters must be positive")
    obj.m = m

    if r == 1:
        psi = PureState(rho.shape, obj.vecs[:, 0])
        dec = Decomposition(np.ones(1), [psi])
        v = concurrence_pure(psi).value
        return RoofEstimate(v, dec, 1, True, [v])

    children = np.random.SeedSequence(seed).spawn(restarts)
    best_val, best_U, best_conv = np.inf, None, False
    values = []
    for i, child in enumerate(children):
        if i == 0:
            X = np.zeros((m, r), dtype=complex)
            X[:r] = np.eye(r)
        else:
            g = np.random.default_rng(child)
            X = g.standard_normal((m, r)) + 1j * g.standard_normal((m, r))
        res = minimize(obj.value_and_grad, obj.pack(X), jac=True, method="L-BFGS-B",
                       options=dict(maxiter=max_iters, ftol=tol * 1e-2, gtol=1e-10))
        U = _givens_polish(obj, obj.isometry(res.x), sweeps=max(1, max_iters // 100), tol=tol)
        val = obj.value(U)
        values.append(val)
        if val < best_val:
            best_val, best_U, best_conv = val, U, bool(res.success)
    dec = _decomposition(obj, best_U, rho.shape)
    return RoofEstimate(dec.average_concurrence(), dec, restarts, best_conv, values)
