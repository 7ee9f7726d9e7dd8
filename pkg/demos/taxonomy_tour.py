"""
Proper, overlapping and improper clusterings
============================================

Builds a few clustering results by hand on the four points 0, 1, 10, 11 and
asks the axiom checkers what they make of each one.
"""

import numpy as np

from axioclust.categorization import (
    ClusteringResult,
    Prototype,
    axiom_report,
    sq_euclidean,
)
from axioclust.data import DataSet, Partition, classify_partition, make_uninformative

data = DataSet(features=[[0.0], [1.0], [10.0], [11.0]])

# nearest-prototype assignment with prototypes at the two cluster means
good = ClusteringResult(data, Prototype([[0.5], [10.5]]),
                        Partition.from_labels([0, 0, 1, 1], 2), sq_euclidean())
print("two means      ->", axiom_report(good)["class"])

# a prototype halfway between two objects leaves object 1 without a strict winner
line = DataSet(features=[[0.0], [5.0], [10.0]])
tie = ClusteringResult(line, Prototype([[0.0], [10.0]]),
                       Partition.from_labels([0, 0, 1], 2), sq_euclidean())
rep = axiom_report(tie)
print("midpoint       ->", rep["class"], "boundary set", rep["boundary_set"])

# both prototypes on the same spot: nothing can separate the clusters
same = ClusteringResult(data, Prototype([[5.5], [5.5]]),
                        make_uninformative([0.5, 0.5], 4), sq_euclidean())
rep = axiom_report(same)
print("coincident     ->", rep["class"], rep["flags"])

# the partition matrix has its own taxonomy, independent of any model
for name, U in [("hard", np.eye(2)),
                ("tied column", np.array([[0.6, 0.5, 0.3], [0.4, 0.5, 0.7]])),
                ("pi = (.7, .3)", make_uninformative([0.7, 0.3], 3).U)]:
    pc = classify_partition(U, "soft")
    print(f"{name:14s} ->", pc.top, sorted(pc.flags))
