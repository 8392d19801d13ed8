# %% [markdown]
# # The quadrilateral cosine from six distances
#
# Two bound vectors AP and BQ in a metric space have no angle between them,
# but their six pairwise distances still pin down a comparison value. In a
# model space of constant curvature K that value is the cosine between AP and
# the parallel transport of BQ along AB.

# %%
import math

import numpy as np

from catk.cosq import QuadDistances, cosq_k, twelve_cases
from catk.modelspace import angle_and_transport_oracle, sample_model_points

# %% A unit square in the plane: the two opposite sides are parallel
r = math.sqrt(2)
print(cosq_k(0, QuadDistances(x=1, y=1, a=1, b=1, d=r, f=r)))

# %% On the sphere the formula matches a direct transport computation
A, P, B, Q = sample_model_points(1, 4, seed=3, diam_cap=math.pi / 2, dim=3)
q = QuadDistances.from_points(A, P, B, Q)
print("from distances :", cosq_k(1, q))
print("from transport :", angle_and_transport_oracle(A, P, B, Q))

# %% Same check on the hyperboloid
pts = sample_model_points(-1, 4, seed=3, dim=3)
print(cosq_k(-1, QuadDistances.from_points(*pts)) - angle_and_transport_oracle(*pts))

# %% [markdown]
# A four-point space gives twelve ordered pairs of bound vectors up to
# symmetry. `twelve_cases` evaluates all of them at once.

# %%
D = np.array([[0, 1, 2, 2.44],
              [1, 0, 2.44, 2.697],
              [2, 2.44, 0, 1],
              [2.44, 2.697, 1, 0]])
for label, value in twelve_cases(-1, D).as_dict().items():
    print(f"{label:>4}  {value: .4f}")
