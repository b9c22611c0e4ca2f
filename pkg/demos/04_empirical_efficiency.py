"""
Power-matched empirical relative efficiency
===========================================

Fix the sample size of V, note its simulated power, then find the smallest
sample size at which T reaches the same power. The ratio of the two sizes is
the empirical relative efficiency (ERE), to be set against the Pitman values.
"""

from pitmaneff import Alternative, McConfig, ResultsCache, builtin_path, matched_ere

cfg = McConfig(reps=20_000)
cache = ResultsCache()  # in memory; pass a file name to resume across runs

rows = [
    ("(6,4,0.5)", Alternative.from_pqe(6, 4, 0.5), 100),
    ("(3,1,0.2)", Alternative.from_pqe(3, 1, 0.2), 100),
    ("(0.6667,0.5,0.5)", Alternative.from_pqe(0.6667, 0.5, 0.5), 200),
]
print(f"{'alternative':18s} {'n_V':>5s} {'n_T':>5s} {'power':>6s} {'ERE':>6s} {'E^P':>6s}")
for label, alt, n in rows:
    r = matched_ere(alt, 0.05, n, cfg, cache=cache)
    print(f"{label:18s} {r.n_V:5d} {r.n_T:5d} {r.power_V.power:6.3f} {r.ere:6.3f} {r.pitman_linear_value:6.3f}")

# %%
# The three close alternatives from the previous demo: their EREs follow the
# linear-path values, not the common path value 5/12.
print()
for name, alt, n in [
    ("gamma4", Alternative.from_pqe(1.2, 1.0528, 1), 220),
    ("ell", Alternative.from_pqe(1.2, 1.1, 1), 500),
    ("gamma2", Alternative.from_pqe(1.2, 1.1045, 1), 550),
]:
    r = matched_ere(alt, 0.05, n, cfg, path=builtin_path(name), cache=cache)
    print(f"{name:7s} ERE = {r.ere:.3f}  E^P(linear) = {r.pitman_linear_value:.3f}  "
          f"e^P(path) = {r.pitman_path_value:.3f}")
