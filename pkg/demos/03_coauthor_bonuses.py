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
# # Coauthors and how bonuses are shared
#
# With several authors per paper the exponent is `(EX + EZ) / EY + 1`, where
# `Z` is the total bonus of a paper and `Y` the bonus of one author. Sharing a
# fixed total equally and paying every author in full give different
# exponents even for the same author count.

# %%
import math

import numpy as np

from prefattach.analysis import doubling_ratio_exponent
from prefattach.laws import Constant, DiscretePmf
from prefattach.limit_discrete import coefficient_decomposition, gamma_discrete, solve_recursion
from prefattach.model import AuthorCountLaw, EqualSplit, ExchangeableIid, FullBonus, ModelConfig, theoretical_moments

two = AuthorCountLaw(((2, 1.0),))
x0 = DiscretePmf(((1, 0.5), (2, 0.5)))
configs = {
    "full bonus of 2, 2 authors": ModelConfig(x0, two, FullBonus(Constant(2)), "discrete"),
    "equal split of 2, 2 authors": ModelConfig(x0, two, EqualSplit(Constant(2)), "discrete"),
    "iid bonuses, 1-4 authors": ModelConfig(
        DiscretePmf(((1, 0.6), (3, 0.4))),
        AuthorCountLaw(((1, 0.2), (2, 0.5), (4, 0.3))),
        ExchangeableIid(DiscretePmf(((0, 0.2), (1, 0.5), (2, 0.2), (5, 0.1)))),
        "discrete",
    ),
}

# %%
for name, cfg in configs.items():
    mom = theoretical_moments(cfg)
    lim = solve_recursion(cfg, 20_000)
    est = doubling_ratio_exponent(lim.x, (1000, 10_000)).value
    print(f"{name:30s} EX={mom.ex:.2f} EY={mom.ey:.2f} EZ={mom.ez:.2f}  "
          f"gamma={gamma_discrete(cfg):.4f}  doubling={est:.4f}")

# %% [markdown]
# A bonus of 2 makes the shares alternate between even and odd weights, and
# the doubling estimate for that case is still well short of its limit at
# `j = 10^4`.

# %% [markdown]
# ## Where the exponent comes from
#
# The recursion weights split as `a_i + b_i / j + O(j^-2)`. The leading part
# is the conditional law of a positive bonus, and the exponent is the ratio
# `-sum b_i / sum i a_i`.

# %%
cfg = configs["iid bonuses, 1-4 authors"]
d = coefficient_decomposition(cfg)
idx = np.arange(d.a.size)
print("a:", np.round(d.a, 4))
print("b:", np.round(d.b, 4))
print("ratio form:", -math.fsum(d.b) / math.fsum(idx * d.a), " closed form:", gamma_discrete(cfg))

# %%
j = 200
for i in idx[1:]:
    if d.a[i]:
        print(f"i={i}  w_(j,i)={d.w(j, i):.8f}  a+b/j+c={d.reconstruct(j, i):.8f}")
