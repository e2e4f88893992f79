# ---
# jupyter:
#   jupytext:
#     formats: py:percent
#   kernelspec:
#     display_name: Python 3
#     language: python
#     name: python3
# ---

# %% [markdown]
# # Picking author groups by total weight
#
# Every new paper picks a group of `k` authors, and a group is picked with
# probability proportional to the sum of its members' weights. Enumerating all
# `C(n+1, k)` groups is hopeless for a large population, so the sampler draws
# one *anchor* proportionally to weight and fills the other `k - 1` seats
# uniformly. A group `H` can be reached through any of its members, and summing
# over those routes gives back exactly the weight-proportional law.

# %%
from itertools import combinations

from prefattach import engine
from prefattach.model import ab_config
from prefattach.rng import Streams

weights = [1, 2, 3, 5]
k = 2

# %% [markdown]
# ## The law, two ways
#
# `group_law` accumulates the anchor-plus-uniform probabilities; the direct
# formula divides each group's weight by the total over all groups.

# %%
law = engine.group_law(weights, k)
groups = list(combinations(range(len(weights)), k))
total = sum(sum(weights[i] for i in g) for g in groups)
for g in groups:
    direct = sum(weights[i] for i in g) / total
    print(g, f"{law[g]:.6f}", f"{direct:.6f}")

# %% [markdown]
# ## The sampler against the law
#
# 200k draws through the engine's scalar sampler, which uses a Fenwick tree
# for the anchor and partial Fisher-Yates for the rest.

# %%
state = engine.SimState.from_weights(weights)
streams = Streams(ab_config(0, seed=7))
draws = 200_000
counts = {}
for _ in range(draws):
    g = engine.sample_group(state, k, streams)
    counts[g] = counts.get(g, 0) + 1

for g in groups:
    print(g, f"empirical {counts.get(g, 0) / draws:.4f}   exact {law[g]:.4f}")

# %% [markdown]
# ## Who ends up on the paper
#
# The chance that researcher `i` is in the group has the closed form
# `(k-1)/n * (1 - w_i/S) + w_i/S`. The heavy researchers are favored, but
# everybody gets the uniform share from the `k - 1` free seats.

# %%
for i, w in enumerate(weights):
    p = engine.inclusion_probability(state, i, k)
    freq = sum(c for g, c in counts.items() if i in g) / draws
    print(f"i={i} w={w}  formula {p:.4f}  empirical {freq:.4f}")
