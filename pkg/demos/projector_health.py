"""Dense checks of the two-copy operators on small systems.

P_d and the fermionic P_f (restricted to antisymmetric copies and scaled by
alpha) are orthogonal projectors. The bosonic P_b, i.e. P_d restricted to
symmetric copies, is not idempotent; its spectrum shows why.

Run with ``python3 demos/projector_health.py``.
"""
import numpy as np

from genconc import ProjectorSpec, SystemShape, Tag, healthcheck_grid, materialize_dense
from genconc.projectors import projector_healthcheck

print(f"{'op':6} {'L':>2} {'N':>2} {'alpha':>6} {'idem':>9} {'herm':>9} {'hw':>9} {'sub':>9}")
for r in healthcheck_grid():
    print(f"{r.tag:6} {r.L:2d} {r.N:2d} {r.alpha:6.3f} {r.idempotence_defect:9.1e} "
          f"{r.hermiticity_defect:9.1e} {r.highest_weight_defect:9.1e} {r.subspace_defect:9.1e}")

# %% Spectrum of P_b at L = 2, N = 2: eigenvalues other than 0 and 1 appear.
m = materialize_dense(ProjectorSpec(Tag.PB, SystemShape("boson", 2, 2)))
ev = np.linalg.eigvalsh(m)
print("P_b eigenvalues:", sorted(set(np.round(ev, 6))))

# %% Without the restriction on the output side, alpha P_d Q is idempotent but
# oblique (not Hermitian).
lit = projector_healthcheck(ProjectorSpec(Tag.PF, SystemShape("fermion", 2, 4)), form="literal")
print(f"literal P_f: idempotence {lit.idempotence_defect:.1e}, hermiticity {lit.hermiticity_defect:.3f}")
