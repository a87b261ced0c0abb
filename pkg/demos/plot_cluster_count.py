"""
Choosing the number of feature clusters
=======================================

Features are points: each one is a row of the correlation-distance matrix.
k-means is run for every candidate K and the K whose silhouettes have the
best mean-to-spread ratio wins.
"""

import numpy as np

from tickcast.cluster import ClusterSearchConfig, select_k
from tickcast.geometry import correlation_matrix, distance_matrix

rng = np.random.default_rng(3)
base = rng.normal(size=(300, 3))
# nine features built from three latent factors, three noisy copies each
X = np.repeat(base, 3, axis=1) + 0.3 * rng.normal(size=(300, 9))

D = distance_matrix(correlation_matrix(X)).c
print("distance matrix\n", np.round(D, 2))

sel = select_k(D, ClusterSearchConfig(seed=0))
print("chosen K:", sel.k)
print("assignment:", sel.clustering.assignment)

###############################################################################
# The quality ratio for each restart (rows) and K = 2, 3, ... (columns).
np.set_printoptions(precision=2, suppress=True)
print(sel.q_grid)
