"""
Paths, slopes and Hellinger distances
=====================================

Pitman efficiency depends on the direction from which a path reaches the
null, so alternatives that are close to each other can sit on paths with
very different efficiencies.
"""

from pitmaneff import (
    NULL,
    Alternative,
    TestId,
    builtin_path,
    hellinger,
    path_slopes,
    pitman_linear,
    pitman_path,
)
from pitmaneff.pitman import PATH_NAMES

print(f"{'path':8s} {'mu_V(0)':>10s} {'mu_T(0)':>10s} {'e^P':>8s} {'closed':>8s}")
for name in PATH_NAMES:
    if name == "linear":
        continue
    path = builtin_path(name)
    sv, st = path_slopes(path, TestId.V), path_slopes(path, TestId.T)
    eff = pitman_path(path).efficiency
    print(f"{name:8s} {sv.mu_slope:10.6f} {st.mu_slope:10.6f} {eff:8.4f} {path.closed_form_efficiency:8.4f}")

# %%
# Three nearly indistinguishable alternatives on gamma2, ell and gamma4. All
# three paths are tangent at the null and share e^P = 5/12.
alts = {
    "gamma2": Alternative.from_pqe(1.2, 1.1045, 1),
    "ell": Alternative.from_pqe(1.2, 1.1, 1),
    "gamma4": Alternative.from_pqe(1.2, 1.0528, 1),
}
print()
for name, a in alts.items():
    print(f"H({name} point, null) = {hellinger(a, NULL):.3f}")
print(f"H(gamma2, ell)   = {hellinger(alts['gamma2'], alts['ell']):.3f}")
print(f"H(gamma4, ell)   = {hellinger(alts['gamma4'], alts['ell']):.3f}")

# %%
# Each point on a path, reached by its own straight segment, has its own
# linear-path efficiency; these differ although the path values coincide.
print()
for name, a in alts.items():
    print(f"{name:7s} linear-path E^P = {pitman_linear(a.p, a.q):.3f}   path e^P = 0.417")
