"""
Do validity indices punish improper results?
============================================

Scores the proper two-cluster result on 0, 1, 10, 11 with every index, then
replaces it by improper variants (coincident prototypes, an uninformative
partition, the uniform partition) and checks that each index prefers the
proper result.
"""

import numpy as np

from axioclust.algorithms import AlgoConfig, fuzzy_c_means
from axioclust.categorization import Prototype
from axioclust.data import DataSet
from axioclust.validity import INDEX_NAMES, extreme_value_audit

data = DataSet(features=[[0.0], [1.0], [10.0], [11.0]])
model = Prototype([[0.5], [10.5]])
U = np.array([[1.0, 1, 0, 0], [0, 0, 1, 1]])

print(f"{'index':22s} {'proper':>10s} {'coincident':>11s} {'uninf.':>10s} {'uniform':>10s}  ok")
for name in INDEX_NAMES:
    rep = extreme_value_audit(name, data, model, U)
    v = rep.variant_values
    print(f"{name:22s} {rep.proper_value:10.4g} {v['coincident']:11.4g} "
          f"{v['uninformative']:10.4g} {v['absolute_uninformative']:10.4g}  {rep.conforming}")

# the same audit for a fuzzy result from FCM on noisier data
rng = np.random.default_rng(0)
X = np.concatenate([rng.normal(0, 1, (30, 2)), rng.normal(6, 1, (30, 2))])

R = fuzzy_c_means(DataSet(features=X), AlgoConfig(c=2, seed=1))
bad = [n for n in INDEX_NAMES
       if not extreme_value_audit(n, R.data, R.model, R.partition).conforming]
print("non-conforming on the fuzzy result:", bad or "none")
