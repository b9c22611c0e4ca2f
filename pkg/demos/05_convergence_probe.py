"""
How fast does s * sqrt(N(s)) settle?
====================================

Along a path the minimal sample size for power 1/2 grows like ``1 / s**2``,
and ``s * sqrt(N)`` tends to ``(z_alpha - z_beta) / sqrt(c)``. The probe
below follows the segment toward Beta(6, 4) for the V test.
"""

from pitmaneff import McConfig, TestId, builtin_path, convergence_probe

path = builtin_path("linear", p=6, q=4)
res = convergence_probe(path, TestId.V, 0.05, 0.5, [0.8, 0.4, 0.2, 0.1], McConfig(reps=20_000))
print(f"limit (z_a - z_b)/sqrt(c_V) = {res.limit:.3f}")
print("s,N,s_sqrt_N")
for pt in res.points:
    print(f"{pt.s},{pt.n},{pt.scaled:.4f}")
