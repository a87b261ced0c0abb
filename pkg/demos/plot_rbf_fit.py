"""
A small RBF network
===================

Centres come from k-means on the inputs, the shared width is the mean
distance between centres, and the output weights are a least-squares solve.
"""

import numpy as np

from tickcast.rbf import activations, fit_rbfnn, predict, spread

rng = np.random.default_rng(1)
centres = np.array([[-1.0, 0.0], [1.0, 0.5], [0.0, -1.5]])
weights = np.array([1.0, -2.0, 0.5])

X = centres[rng.integers(0, 3, 500)] + 0.3 * rng.normal(size=(500, 2))
y = activations(X, centres, spread(centres)) @ weights + 0.01 * rng.normal(size=500)

model = fit_rbfnn(X, y, K=3, seed=0)
print("sigma:", round(model.sigma, 4), " ridge:", f"{model.ridge:.2e}")
print("centres:\n", np.round(model.centroids, 3))

X_new = centres[rng.integers(0, 3, 200)] + 0.3 * rng.normal(size=(200, 2))
y_new = activations(X_new, centres, spread(centres)) @ weights
rmse = np.sqrt(np.mean((predict(model, X_new) - y_new) ** 2))
print("held-out RMSE against the noiseless surface:", round(rmse, 5))
