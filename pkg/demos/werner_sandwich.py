"""Werner states squeezed between the two-copy lower bound and the
convex-roof upper estimate, with the closed-form two-qubit value in between.

Run with ``python3 demos/werner_sandwich.py`` (about a minute).
"""
import math

from genconc import convex_roof_upper, mb_bound, wootters_oracle, werner_state

print(f"{'p':>4} {'witness':>9} {'lower':>8} {'exact':>8} {'roof':>8}")
for p in (0.0, 0.2, 0.4, 0.5, 0.6, 0.8, 1.0):
    rho = werner_state(p)
    b = mb_bound(rho)
    exact = wootters_oracle(rho)
    roof = convex_roof_upper(rho, restarts=8).value
    print(f"{p:4.1f} {b.witness:9.4f} {b.lower_bound:8.4f} {exact:8.4f} {roof:8.4f}")

# For Werner states the witness is -1/4 + tr(rho^2)/2, positive only for
# p > 1/sqrt(3), while entanglement starts at p = 1/3.
print(f"entangled from p = {1 / 3:.4f}, detected from p = {1 / math.sqrt(3):.4f}")
