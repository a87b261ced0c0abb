"""
Tick-by-tick forecasting on a synthetic book
============================================

An AR(1) mid-price with quotes a couple of ticks either side. Every event is
forecast from the trailing 100-event window by both pipelines; a selector
follows whichever has the lower recent error.
"""

import numpy as np

from tickcast import PipelineConfig, SyntheticSpec, gen_synthetic, run

series = gen_synthetic(SyntheticSpec(model="ar1", n_events=1000, phi=0.95, noise=0.01, seed=0))
print(len(series), "events, first quote", series[0])

result = run(series, PipelineConfig(feature_set="simple"))
rep = result.report

###############################################################################
# Per-fold test error for each pipeline. The noise level (0.01) is the best
# any one-step forecast can do on this series.
for m in rep.rows:
    print(f"fold {m.fold} {m.method:3s} test RMSE {m.rmse_test:.5f}  train RMSE {m.rmse_train:.5f}")

for name, m in rep.overall.items():
    print(f"{name:9s} overall RMSE {m.rmse_test:.5f}  RRMSE {m.rrmse_test:.2e}")

###############################################################################
# Regime statistics and the cluster counts used along the way.
active = np.array([r.active_method for r in result.trace])
print("regime changes:", rep.regime_changes, " mean run length:", round(rep.mean_events_between_changes, 1))
print("share of events led by MDI:", round(np.mean(active == "MDI"), 3))
print("K histogram:", rep.k_histogram)
