"""
Pitman efficiency along contamination segments
==============================================

For a beta alternative Beta(p, q) the segment ``(1 - s) U + s Beta(p, q)``
leaves the uniform null in a straight line, and the Pitman efficiency of the
second-moment test T relative to the mean test V along it has a closed form.
"""

import math

from pitmaneff import builtin_path, pitman_linear, pitman_path, tau

# The closed form at a handful of alternatives. (5, 4) sits on tau = 0, where
# T has no asymptotic power; (0.5, 0.5) has mean 1/2, where V has none.
for p, q in [(5, 4), (4, 3.15), (6, 4), (3, 1), (0.6667, 0.5), (0.55, 0.5), (0.5, 0.5)]:
    print(f"Beta({p:g}, {q:g}): tau = {tau(p, q):8.4f}   E^P = {pitman_linear(p, q):.3f}")

# %%
# Two straight lines in the (p, q) plane carry a constant efficiency.
print()
for q in (1.5, 2.0, 4.0):
    print(f"p - 2q + 1 = 0 at q={q}: {pitman_linear(2 * q - 1, q):.12f}  (5/12 = {5 / 12:.12f})")
for p in (0.6, 0.8, 0.95):
    print(f"2p - q - 1 = 0 at p={p}: {pitman_linear(p, 2 * p - 1):.12f}  (5/3)")

# %%
# The same number comes out of differentiating the centring functions of both
# tests along the path, which is how any other path is handled.
path = builtin_path("linear", p=3, q=1)
res = pitman_path(path)
print()
print(f"{path!r}: c_T = {res.c_T:.6f}, c_V = {res.c_V:.6f}, ratio = {res.efficiency:.9f}")
print(f"closed form                          = {path.closed_form_efficiency:.9f}")

# %%
# Near the null along the parabola gamma1(s; 6, 4) the linear-path value of
# each point tends to the path's own efficiency 15/16, but only at rate O(s).
print()
for s in (0.1, 0.01, 0.001, 1e-4):
    p1, q1 = 1 - s + 6 * s, 1 - s - 4 * s + 8 * s * s
    e = pitman_linear(p1, q1)
    print(f"s={s:<7g} E^P = {e:.6f}   gap = {e - 15 / 16:.2e}   gap/s = {(e - 15 / 16) / s:.3f}")
print(f"path value 15/16 = {15 / 16}, infinite case: {math.isinf(pitman_linear(0.5, 0.5))}")
