import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from genconc.errors import CapError, ShapeError, ValidationError
from genconc.tensor_core import (Kind, SystemShape, alpha_factor, apply_copy_exchange,
                                 apply_copy_swap, apply_pair_projector,
                                 apply_pairwise_symmetrizer, apply_product_symmetrizer,
                                 apply_site_permutation, apply_total_symmetrizer, materialize,
                                 partial_trace, permutation_sign,
                                 product_symmetrizer_expectation_pure, purity,
                                 reduced_density, subset_purities)

from oracles import (copy_swap_matrix, dense_copy_exchange, dense_pd, dense_symmetrizer,
                     loop_partial_trace, perm_matrix)

S2 = 1 / math.sqrt(2)


def rand_vec(rng, dim, batch=()):
    return rng.standard_normal(batch + (dim,)) + 1j * rng.standard_normal(batch + (dim,))


def ket(labels, N):
    v = np.zeros(N ** len(labels), dtype=complex)
    v[np.ravel_multi_index(labels, (N,) * len(labels))] = 1
    return v


# shapes

def test_alpha_values():
    assert alpha_factor(1) == 1.0
    assert alpha_factor(2) == pytest.approx(4 / 3, abs=1e-15)
    assert alpha_factor(3) == 2.0


def test_shape_validation():
    assert SystemShape("boson", 3, 2).dim == 8
    assert SystemShape(Kind.FERMION, 2, 4).two_copy_dim == 256
    with pytest.raises(ValidationError):
        SystemShape("fermion", 3, 2)
    with pytest.raises(ValidationError):
        SystemShape("distinguishable", 0, 2)
    with pytest.raises(ValueError):
        SystemShape("anyon", 2, 2)


def test_dense_cap_message_names_required_cap():
    with pytest.raises(CapError, match="at least 4096"):
        SystemShape("distinguishable", 3, 4).check_dense_cap(4000)


# permutations

@settings(max_examples=40, deadline=None)
@given(st.integers(2, 4), st.integers(1, 3), st.randoms(use_true_random=False))
def test_site_permutation_matches_dense(N, M, rnd):
    perm = list(range(M))
    rnd.shuffle(perm)
    v = rand_vec(np.random.default_rng(rnd.randint(0, 10**6)), N ** M)
    assert np.allclose(apply_site_permutation(v, N, perm), perm_matrix(N, M, perm) @ v, atol=1e-12)


def test_identity_and_involution():
    v = rand_vec(np.random.default_rng(0), 27)
    assert np.array_equal(apply_site_permutation(v, 3, [0, 1, 2]), v)
    w = apply_site_permutation(apply_site_permutation(v, 3, [1, 0, 2]), 3, [1, 0, 2])
    assert np.linalg.norm(w - v) <= 1e-12


def test_swap_negates_singlet():
    singlet = (ket((0, 1), 2) - ket((1, 0), 2)) * S2
    assert np.allclose(apply_site_permutation(singlet, 2, [1, 0]), -singlet, atol=1e-15)


def test_permutation_sign():
    assert permutation_sign([0, 1, 2]) == 1
    assert permutation_sign([1, 0, 2]) == -1
    assert permutation_sign([1, 2, 0]) == 1
    with pytest.raises(ValueError):
        permutation_sign([0, 0, 1])


# copy swaps

def test_copy_swap_examples():
    rng = np.random.default_rng(1)
    psi, phi = rand_vec(rng, 4), rand_vec(rng, 4)
    v = np.kron(psi, phi)
    assert np.array_equal(apply_copy_swap(v, 2, 2, []), v)
    assert np.allclose(apply_copy_swap(v, 2, 2, [0, 1]), np.kron(phi, psi), atol=1e-14)
    assert np.allclose(apply_copy_exchange(v, 2, 2), np.kron(phi, psi), atol=1e-14)
    w = apply_copy_swap(apply_copy_swap(v, 2, 2, [0]), 2, 2, [0])
    assert np.linalg.norm(w - v) <= 1e-12
    with pytest.raises(ShapeError):
        apply_copy_swap(v, 2, 2, [2])


@pytest.mark.parametrize("N,L", [(2, 1), (2, 2), (3, 2), (2, 3)])
def test_copy_swap_matches_dense(N, L):
    v = rand_vec(np.random.default_rng(2), N ** (2 * L))
    for i in range(L):
        assert np.allclose(apply_copy_swap(v, N, L, [i]), copy_swap_matrix(N, L, i) @ v, atol=1e-12)
    assert np.allclose(apply_copy_exchange(v, N, L), dense_copy_exchange(N, L) @ v, atol=1e-12)


def test_pairwise_symmetrizer_examples():
    v = ket((0, 1), 2)
    assert np.allclose(apply_pairwise_symmetrizer(v, 2, 1, 0), (ket((0, 1), 2) + ket((1, 0), 2)) / 2)
    rng = np.random.default_rng(3)
    a, b = rand_vec(rng, 4), rand_vec(rng, 4)
    # symmetric / antisymmetric under swapping site 0 of the two copies
    sym = np.kron(a, b) + apply_copy_swap(np.kron(a, b), 2, 2, [0])
    anti = np.kron(a, b) - apply_copy_swap(np.kron(a, b), 2, 2, [0])
    assert np.allclose(apply_pairwise_symmetrizer(sym, 2, 2, 0), sym, atol=1e-14)
    assert np.allclose(apply_pairwise_symmetrizer(anti, 2, 2, 0), 0, atol=1e-14)


@pytest.mark.parametrize("N,L", [(2, 1), (2, 2), (3, 2), (2, 3)])
def test_product_symmetrizer_matches_dense(N, L):
    v = rand_vec(np.random.default_rng(4), N ** (2 * L), (3,))
    ref = v @ dense_pd(N, L).T
    assert np.allclose(apply_product_symmetrizer(v, N, L), ref, atol=1e-12)
    assert np.allclose(apply_product_symmetrizer(v, N, L, method="pairwise"), ref, atol=1e-12)


def test_product_symmetrizer_l1_examples():
    singlet = (ket((0, 1), 2) - ket((1, 0), 2)) * S2
    assert np.allclose(apply_product_symmetrizer(singlet, 2, 1), 0, atol=1e-15)
    assert np.allclose(apply_product_symmetrizer(ket((0, 0), 2), 2, 1), ket((0, 0), 2))
    m = materialize(lambda b: apply_product_symmetrizer(b, 2, 1), 4)
    assert np.allclose(np.sort(np.linalg.eigvalsh(m)), [0, 1, 1, 1], atol=1e-14)


def test_bell_two_copy_expectation_dense():
    phi = (ket((0, 0), 2) + ket((1, 1), 2)) * S2
    w = np.kron(phi, phi)
    assert np.vdot(w, dense_pd(2, 2) @ w).real == pytest.approx(0.75, abs=1e-14)
    assert np.vdot(w, apply_product_symmetrizer(w, 2, 2)).real == pytest.approx(0.75, abs=1e-14)


# total (anti)symmetrizers

def test_total_symmetrizer_examples():
    assert np.allclose(apply_total_symmetrizer(ket((0, 0), 2), 2, [0, 1], "asym"), 0)
    assert np.allclose(apply_total_symmetrizer(ket((0, 1), 2), 2, [0, 1], "asym"),
                       (ket((0, 1), 2) - ket((1, 0), 2)) / 2)
    sym = (ket((0, 1), 2) + ket((1, 0), 2)) * S2
    assert np.allclose(apply_total_symmetrizer(sym, 2, [0, 1], "sym"), sym)


@pytest.mark.parametrize("N,L", [(2, 2), (3, 3), (4, 2)])
def test_total_symmetrizer_matches_dense(N, L):
    v = rand_vec(np.random.default_rng(5), N ** L)
    for parity, sign in (("sym", 1), ("asym", -1)):
        ref = dense_symmetrizer(N, L, sign) @ v
        assert np.allclose(apply_total_symmetrizer(v, N, range(L), parity), ref, atol=1e-12)


def test_pair_projector_is_idempotent():
    v = rand_vec(np.random.default_rng(6), 3 ** 4)
    once = apply_pair_projector(v, 3, 2, "asym")
    assert np.allclose(apply_pair_projector(once, 3, 2, "asym"), once, atol=1e-13)


# partial traces and purities

def test_partial_trace_examples():
    rng = np.random.default_rng(7)
    a = rand_vec(rng, 2)
    b = rand_vec(rng, 3)
    r1 = np.outer(a, a.conj()) / np.vdot(a, a)
    r2 = np.outer(b, b.conj()) / np.vdot(b, b)
    # sites need a common N, so pad the qubit into a qutrit
    r1p = np.zeros((3, 3), dtype=complex)
    r1p[:2, :2] = r1
    assert np.allclose(partial_trace(np.kron(r1p, r2), 3, 2, [0]), r1p, atol=1e-14)

    bell = (ket((0, 0), 2) + ket((1, 1), 2)) * S2
    assert np.allclose(partial_trace(np.outer(bell, bell), 2, 2, [0]), np.eye(2) / 2)

    ghz = (ket((0, 0, 0), 2) + ket((1, 1, 1), 2)) * S2
    assert np.allclose(partial_trace(np.outer(ghz, ghz), 2, 3, [0, 1]), np.diag([.5, 0, 0, .5]))
    with pytest.raises(ValidationError):
        partial_trace(np.outer(ghz, ghz), 2, 3, [])


@settings(max_examples=25, deadline=None)
@given(st.sampled_from([(2, 2), (2, 3), (3, 2)]), st.integers(0, 2**31))
def test_partial_trace_matches_loops(shape, seed):
    N, L = shape
    rng = np.random.default_rng(seed)
    x = rand_vec(rng, N ** L, (N ** L,))
    rho = x @ x.conj().T
    rho /= np.trace(rho)
    for r in range(1, L + 1):
        for keep in itertools.combinations(range(L), r):
            assert np.allclose(partial_trace(rho, N, L, keep), loop_partial_trace(rho, N, L, keep),
                               atol=1e-13)
    psi = x[0] / np.linalg.norm(x[0])
    assert np.allclose(reduced_density(psi, N, L, [0]),
                       loop_partial_trace(np.outer(psi, psi.conj()), N, L, [0]), atol=1e-13)


def test_purity_examples():
    v = rand_vec(np.random.default_rng(8), 4)
    v /= np.linalg.norm(v)
    assert purity(np.outer(v, v.conj())) == pytest.approx(1, abs=1e-14)
    assert purity(np.eye(6) / 6) == pytest.approx(1 / 6, abs=1e-15)
    bell = (ket((0, 0), 2) + ket((1, 1), 2)) * S2
    p = 0.8
    werner = p * np.outer(bell, bell) + (1 - p) * np.eye(4) / 4
    assert purity(werner) == pytest.approx(0.73, abs=1e-14)
    assert purity(werner) == pytest.approx(np.trace(werner @ werner).real, abs=1e-14)


@settings(max_examples=30, deadline=None)
@given(st.sampled_from([(2, 1), (2, 2), (3, 2), (2, 3)]), st.integers(0, 2**31))
def test_purity_identity_pure(shape, seed):
    N, L = shape
    psi = rand_vec(np.random.default_rng(seed), N ** L)
    psi /= np.linalg.norm(psi)
    dense = np.vdot(np.kron(psi, psi), dense_pd(N, L) @ np.kron(psi, psi)).real
    assert product_symmetrizer_expectation_pure(psi, N, L) == pytest.approx(dense, abs=1e-12)
    pur = subset_purities(psi, N, L)
    assert len(pur) == 2 ** L
    assert sum(pur.values()) / 2 ** L == pytest.approx(dense, abs=1e-12)


@pytest.mark.parametrize("N,L", [(2, 2), (3, 2)])
def test_purity_identity_mixed(N, L):
    x = rand_vec(np.random.default_rng(9), N ** L, (N ** L,))
    rho = x @ x.conj().T
    rho /= np.trace(rho)
    dense = np.trace(np.kron(rho, rho) @ dense_pd(N, L)).real
    pur = subset_purities(rho, N, L)
    assert pur[()] == pytest.approx(1.0)
    assert sum(pur.values()) / 2 ** L == pytest.approx(dense, abs=1e-12)


def test_expectation_batched_and_unnormalized():
    rng = np.random.default_rng(10)
    batch = rand_vec(rng, 9, (5,))
    together = product_symmetrizer_expectation_pure(batch, 3, 2)
    for row, val in zip(batch, together):
        assert product_symmetrizer_expectation_pure(row, 3, 2) == pytest.approx(val, rel=1e-13)
    v = batch[0]
    scaled = product_symmetrizer_expectation_pure(2 * v, 3, 2)
    assert scaled == pytest.approx(16 * product_symmetrizer_expectation_pure(v, 3, 2), rel=1e-13)


def test_materialize_cap():
    with pytest.raises(CapError):
        materialize(lambda b: b, 20, cap=10)
    assert np.array_equal(materialize(lambda b: b, 5), np.eye(5))


def test_extended_expectation_matches_double_path():
    from genconc.tensor_core import normalized_pd_expectation_ext
    rng = np.random.default_rng(12)
    for N, L in [(2, 2), (3, 3), (4, 2)]:
        v = rand_vec(rng, N ** L)
        ext = normalized_pd_expectation_ext(v, N, L)
        ref = product_symmetrizer_expectation_pure(v, N, L) / np.vdot(v, v).real ** 2
        assert float(ext) == pytest.approx(ref, abs=1e-14)
    # a product state sits at exactly 1 up to extended round-off
    e = rand_vec(rng, 3)
    prod = np.kron(np.kron(e, e), e)
    assert abs(1 - normalized_pd_expectation_ext(prod, 3, 3)) <= 1e-17
