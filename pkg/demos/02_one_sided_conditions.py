# %% [markdown]
# # Upper and lower cosine conditions on finite spaces
#
# In a CAT(K) space every quadrilateral cosine lies in [-1, 1]. Away from
# geodesic spaces the upper bound and the lower bound can fail separately.
# This walk-through scans a few small spaces for both.

# %%
import math

import numpy as np

from catk.conditions import check_lower, check_metric, check_one_sided, check_upper
from catk.spaces import get_example, random_violating_semimetric, t_graph

# %% A four-point hyperbolic example: only the upper bound breaks
ex = get_example("exfpc_neg_a")
up, low = check_upper(-1, ex.space), check_lower(-1, ex.space)
print("upper:", up.verdict.value, "worst witness", up.witnesses[0])
print("lower:", low.verdict.value)

# %% A companion example where the roles swap
ex = get_example("exfpc_neg_b")
print(check_upper(-1, ex.space).verdict.value, check_lower(-1, ex.space).verdict.value)

# %% A tree-like T-graph on the sphere: both bounds fail
s = t_graph(math.pi / 4 + 0.1, math.pi / 2 + 0.2, p_offset=0.1)
up, low, verdict = check_one_sided(1, s)
print(verdict.value, up.witnesses[0].value, low.witnesses[0].value)

# %% [markdown]
# Breaking the triangle inequality breaks both bounds at once.

# %%
rng = np.random.default_rng(0)
bad = random_violating_semimetric(5, rng, 1.2)
print("metric:", check_metric(bad).holds)
print([r.verdict.value for r in check_one_sided(1, bad)[:2]])
