# %% [markdown]
# # Where the bound is attained
#
# The cosine reaches +1 or -1 exactly when the quadruple spans a
# Levi-Civita trapezoid: BQ is the parallel transport of AP along AB, or its
# reverse. The construction reflects P through the midpoint of AB.

# %%
import math

import numpy as np

from catk.cosq import QuadDistances, cosq_k
from catk.spaces import levi_civita_trapezoid, parallelogramoid
from catk.conditions import k_euler_equality_sides
from catk.modelspace import geodesic_midpoint, model_distance

# %%
rng = np.random.default_rng(5)
for K in (1.0, -1.0, 0.0):
    for orientation in (1, -1):
        pts = levi_civita_trapezoid(K, 0.7, 0.4, 0.5, rng.uniform(0, math.pi), orientation)
        print(K, orientation, cosq_k(K, QuadDistances.from_points(*pts)))

# %% [markdown]
# Quadrangles whose diagonals bisect each other make the Euler-type
# inequality an equality with g = 0.

# %%
A, B, C, D = parallelogramoid(-1, 1.2, 0.9, 1.0)
d = model_distance
g = d(geodesic_midpoint(A, C), geodesic_midpoint(B, D))
print("g =", g)
print(k_euler_equality_sides(-1, d(A, B), d(B, C), d(C, D), d(D, A), d(A, C), d(B, D), g))
