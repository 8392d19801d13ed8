# %% [markdown]
# # Randomized property runs in the model spaces
#
# Each run draws seeded random configurations and reports the worst residual.
# A failing trial would be replayable from its `(seed, index)` pair.

# %%
from catk.trials import run_trials

# %% The cosine stays in [-1, 1] for quadruples of diameter at most pi/2
for K in (1.0, -1.0):
    r = run_trials("bound", K, 2000, seed=1)
    print(K, r.passed, r.max_residual)

# %% Halving both vectors leaves the spherical cosine unchanged
print(run_trials("halving", 1.0, 500, seed=2).to_dict())

# %% The Euler-type equality on convex quadrangles
for K in (1.0, -1.0):
    print(K, run_trials("euler-eq", K, 500, seed=3).max_residual)
