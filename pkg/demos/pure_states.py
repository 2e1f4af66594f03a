"""Concurrence of a few named pure states, plus a look at coherent states.

Run with ``python3 demos/pure_states.py``.
"""
import numpy as np

from genconc import (SystemShape, alpha_factor, bell_state, concurrence_pure, ghz_state,
                     is_coherent, random_coherent, random_pure, slater_state, w_state)

# %% Named states. C_d for distinguishable particles, C_b and C_f otherwise.
named = {
    "Bell": bell_state(),
    "GHZ (L=3)": ghz_state(),
    "W as bosons": w_state(3, "boson"),
    "|12> + |34> fermions": slater_state(2, 4, {(0, 1): 1, (2, 3): 1}),
}
for name, psi in named.items():
    r = concurrence_pure(psi)
    print(f"{name:22s} kind={r.kind:15s} C={r.value:.6f}  <P>={r.expectation:.6f}")

# %% Product states, condensates and Slater determinants all sit at C = 0.
for kind, L, N in [("distinguishable", 3, 3), ("boson", 3, 3), ("fermion", 3, 5)]:
    vals = [concurrence_pure(random_coherent(SystemShape(kind, L, N), s)).value for s in range(200)]
    print(f"{kind:15s} coherent states: max C over 200 draws = {max(vals):.1e}")

# %% The three evaluation paths agree.
psi = random_pure(SystemShape("fermion", 2, 4), 3)
for method in ("purity", "two-copy", "dense"):
    print(f"{method:9s} C_f = {concurrence_pure(psi, method).value:.15f}")

# %% Fermions: alpha * C_d^2 - C_f^2 is pinned to alpha - 1.
# (N = 6: with three fermions in four modes every state is a single Slater
# determinant, so C_f would vanish identically.)
L = 3
a = alpha_factor(L)
for s in range(3):
    psi = random_pure(SystemShape("fermion", L, 6), s)
    cf = concurrence_pure(psi).value
    cd = concurrence_pure(psi.as_kind("distinguishable")).value
    print(f"C_f={cf:.4f} C_d={cd:.4f}  alpha C_d^2 - C_f^2 = {a * cd**2 - cf**2:.12f}"
          f"  (alpha - 1 = {a - 1})")

# %% Coherence reduces to single-site cuts.
v = is_coherent(bell_state())
print("Bell coherent?", v.coherent, "bipartition values", np.round(v.bipartition_values, 4))
