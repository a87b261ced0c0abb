"""
Two ways to rank features
=========================

A forest's summed impurity reductions and the weights of a linear model fitted
by gradient descent both give one number per feature. Here both are computed
on a toy window where only the first column drives the target.
"""

import numpy as np

from tickcast.forest import ForestConfig, fit_forest, mdi_importance
from tickcast.gd import GdConfig, gd_fit

rng = np.random.default_rng(0)
X = rng.normal(size=(200, 4))
y = 2.0 * X[:, 0] + 0.1 * rng.normal(size=200)

###############################################################################
# Raw MDI: reductions are summed per feature and averaged over trees, with no
# sample weighting and no normalisation.
forest = fit_forest(X, y, ForestConfig(n_trees=50, seed=1))
print("raw MDI       ", np.round(mdi_importance(forest), 4))
print("normalised MDI", np.round(mdi_importance(forest, weighted=True, normalize=True), 4))

###############################################################################
# Gradient descent on standardised columns: the weights recover the slope.
Z = (X - X.mean(0)) / X.std(0)
theta = gd_fit(Z, y, GdConfig(learning_rate=0.05, iterations=500))
print("GD weights    ", np.round(theta, 4))
