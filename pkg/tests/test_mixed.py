import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from genconc.concurrence import concurrence_pure
from genconc.errors import KindError, ParameterError, ShapeError
from genconc.mixed import (convex_roof_upper, fermionic_detection,
                           fermionic_lower_from_distinguishable, fermionic_root,
                           mb_bound, mb_bound_bosonic, mean_subset_purity, wootters_oracle)
from genconc.states import (MixedState, bell_state, condensate, coherent_mixture,
                            ghz_state, maximally_mixed, random_mixed, random_pure,
                            slater_mixture, slater_state, w_state, werner_state)
from genconc.tensor_core import SystemShape, alpha_factor

from oracles import dense_mixed_expectation, dense_pd, dense_pminus, dense_symmetrizer

QUBITS = SystemShape("distinguishable", 2, 2)


def dense_v(N, L):
    return np.eye(N ** (2 * L)) - dense_pd(N, L) - 2 * (1 - 2.0 ** -L) * dense_pminus(N, L)


def dense_vtilde(N, L):
    a = alpha_factor(L)
    q1 = dense_symmetrizer(N, L, -1)
    q = np.kron(q1, q1)
    return q @ (np.eye(N ** (2 * L)) - a * dense_pd(N, L)
                - 2 * a * (1 - 2.0 ** -L) * dense_pminus(N, L)) @ q


def test_mb_examples():
    r = mb_bound(bell_state().density())
    assert r.witness == pytest.approx(0.25, abs=1e-14) and r.detected
    r = mb_bound(maximally_mixed(QUBITS))
    assert r.witness == pytest.approx(-1 / 8, abs=1e-14)
    assert not r.detected and r.lower_bound == 0.0
    r = mb_bound(werner_state(0.8))
    assert r.witness == pytest.approx(0.115, abs=1e-14)
    assert r.lower_bound == pytest.approx(0.33912, abs=1e-5)
    assert r.to_dict()["bound_on"] == "C_d"


@pytest.mark.parametrize("p", [0, 0.4, 0.6, 0.8, 1.0])
def test_werner_witness_matches_dense(p):
    rho = werner_state(p)
    ref = dense_mixed_expectation(rho.matrix, dense_v(2, 2))
    for method in ("purity", "two-copy", "dense"):
        assert mb_bound(rho, method).witness == pytest.approx(ref, abs=1e-12)


def test_mean_subset_purity_werner():
    # 1/4 (1 + 2 * 1/2 + 0.73) with single-site marginals I/2
    assert mean_subset_purity(werner_state(0.8)) == pytest.approx((1 + 1 + 0.73) / 4, abs=1e-14)


@settings(max_examples=20, deadline=None)
@given(st.sampled_from([("distinguishable", 2, 2), ("distinguishable", 3, 2),
                        ("distinguishable", 2, 3)]), st.integers(0, 2**31))
def test_pure_witness_is_concurrence_squared(spec, seed):
    psi = random_pure(SystemShape(*spec), seed)
    assert mb_bound(psi.density()).witness == pytest.approx(concurrence_pure(psi).value ** 2,
                                                            abs=1e-10)


@pytest.mark.parametrize("seed", range(3))
def test_mb_lower_bound_below_roof_oracle(seed):
    rho = random_mixed(QUBITS, 2, seed)
    assert mb_bound(rho).lower_bound <= wootters_oracle(rho) + 1e-12


def test_bosonic_examples():
    assert mb_bound_bosonic(condensate(np.array([0.6, 0.8]), 3).density()).witness == \
        pytest.approx(0, abs=1e-14)
    w = mb_bound_bosonic(w_state(3, "boson").density())
    assert w.witness == pytest.approx(1 / 3, abs=1e-14) and w.bound_on == "C_b"
    c = condensate(np.array([1, 0]), 3).amplitudes
    wv = w_state(3, "boson").amplitudes
    mix = MixedState(SystemShape("boson", 3, 2), 0.5 * np.outer(c, c) + 0.5 * np.outer(wv, wv))
    ref = dense_mixed_expectation(mix.matrix, dense_v(2, 3))
    assert mb_bound_bosonic(mix).witness == pytest.approx(ref, abs=1e-10)
    assert mb_bound_bosonic(mix, "dense").witness == pytest.approx(ref, abs=1e-10)
    with pytest.raises(KindError):
        mb_bound_bosonic(werner_state(0.5))


def test_fermionic_examples():
    sl = slater_state(2, 4, {(0, 2): 1})
    assert fermionic_detection(sl.density()).witness == pytest.approx(0, abs=1e-14)
    psi = slater_state(2, 4, {(0, 1): 1, (2, 3): 1})
    r = fermionic_detection(psi.density())
    assert r.witness == pytest.approx(1 / 6, abs=1e-13) and r.detected
    mix = slater_mixture(2, 4, [(0, 1), (2, 3)], [0.5, 0.5])
    ref = dense_mixed_expectation(mix.matrix, dense_vtilde(4, 2))
    r = fermionic_detection(mix)
    assert r.witness == pytest.approx(ref, abs=1e-12)
    assert r.witness <= 1e-10 and not r.detected
    assert fermionic_detection(mix, "dense").witness == pytest.approx(ref, abs=1e-12)
    with pytest.raises(KindError):
        fermionic_detection(werner_state(0.5))


@pytest.mark.parametrize("seed", range(3))
def test_fermionic_paths_agree_with_dense_oracle(seed):
    rho = random_mixed(SystemShape("fermion", 2, 4), 3, seed)
    ref = dense_mixed_expectation(rho.matrix, dense_vtilde(4, 2))
    for method in ("purity", "two-copy", "dense"):
        assert fermionic_detection(rho, method).witness == pytest.approx(ref, abs=1e-12)


def test_random_slater_mixtures_not_detected():
    for seed in range(30):
        rho = coherent_mixture(SystemShape("fermion", 2, 4), 3, seed)
        assert fermionic_detection(rho).witness <= 1e-10


def test_fermionic_root_solves_quadratic():
    for L in (2, 3):
        a = math.sqrt(alpha_factor(L) - 1)
        for w in (1e-3, 0.1, 0.5):
            c = fermionic_root(w, L)
            assert c ** 2 + 2 * a * c == pytest.approx(w, abs=1e-14)
        assert fermionic_root(-0.1, L) == 0.0


def test_fermionic_lower_examples():
    assert fermionic_lower_from_distinguishable(0.0, 2) == 0.0
    assert fermionic_lower_from_distinguishable(math.sqrt(3) / 2, 2) == \
        pytest.approx(1 - 1 / math.sqrt(3), abs=1e-15)
    a = alpha_factor(3)
    assert fermionic_lower_from_distinguishable(math.sqrt((a - 1) / a), 3) == \
        pytest.approx(0, abs=1e-15)


def test_wootters_oracle_examples():
    assert wootters_oracle(bell_state().density()) == pytest.approx(0.5, abs=1e-12)
    assert wootters_oracle(maximally_mixed(QUBITS)) == pytest.approx(0, abs=1e-12)
    for p in (0, 0.3, 0.5, 0.9):
        assert wootters_oracle(werner_state(p)) == pytest.approx(max(0, (3 * p - 1) / 4), abs=1e-12)
    with pytest.raises(ShapeError):
        wootters_oracle(ghz_state().density())


def test_wootters_oracle_matches_pure_concurrence():
    for seed in range(5):
        psi = random_pure(QUBITS, seed)
        assert wootters_oracle(psi.density()) == pytest.approx(concurrence_pure(psi).value, abs=1e-10)


def test_roof_pure_state_is_exact():
    psi = random_pure(SystemShape("distinguishable", 3, 2), 4)
    est = convex_roof_upper(psi.density(), restarts=1)
    assert est.value == pytest.approx(concurrence_pure(psi).value, abs=1e-9)
    assert est.restarts_used == 1


def test_roof_separable_default_settings():
    est = convex_roof_upper(maximally_mixed(QUBITS))
    assert est.value <= 1e-3


def test_roof_decomposition_valid():
    rho = random_mixed(SystemShape("fermion", 2, 4), 2, 9)
    est = convex_roof_upper(rho, restarts=2, max_iters=100)
    dec = est.decomposition
    assert dec.reconstruction_error(rho) <= 1e-8
    assert sum(dec.weights) == pytest.approx(1, abs=1e-12)
    assert all(s.kind.value == "fermion" for s in dec.states)
    assert est.value == pytest.approx(dec.average_concurrence(), abs=1e-12)
    d = est.to_dict()
    assert len(d["decomposition"]["weights"]) == len(dec.states)


@pytest.mark.parametrize("seed", range(2))
def test_roof_is_upper_bound_on_qubits(seed):
    rho = random_mixed(QUBITS, 2, seed)
    est = convex_roof_upper(rho, restarts=3, max_iters=200)
    assert est.value >= wootters_oracle(rho) - 1e-9
    assert est.value <= wootters_oracle(rho) * 1.02 + 1e-6


def test_roof_more_restarts_never_worse():
    rho = random_mixed(QUBITS, 3, 2)
    one = convex_roof_upper(rho, restarts=1, max_iters=100, seed=5)
    four = convex_roof_upper(rho, restarts=4, max_iters=100, seed=5)
    assert four.value <= one.value + 1e-12
    assert four.restart_values[0] == pytest.approx(one.restart_values[0], abs=1e-14)


def test_roof_parameter_errors():
    rho = werner_state(0.5)
    with pytest.raises(ParameterError):
        convex_roof_upper(rho, ensemble_size=2)
    with pytest.raises(ParameterError):
        convex_roof_upper(rho, restarts=0)
