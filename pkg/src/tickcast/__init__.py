"""Online limit-order-book mid-price forecasting with competing feature-importance pipelines."""

__version__ = "0.1.0"

from .cluster import ClusterSearchConfig, Clustering, kmeans, quality, select_k, silhouette
from .data import SyntheticSpec, gen_synthetic, load_ticks, write_ticks
from .engine import (
    EventRecord,
    MetricsReport,
    PipelineConfig,
    bench,
    competitive_select,
    mse,
    rmse,
    rrmse,
    run,
    step,
)
from .features import FeatureMatrix, FeatureSet, KernelParams, build_matrix, extract_extended, extract_simple
from .forest import ForestConfig, fit_forest, impurity_reduction, mdi_importance, node_impurity
from .gd import GdConfig, gd_fit
from .geometry import ImportanceVector, apply_importance, correlation_matrix, distance_matrix
from .lob import FoldPlan, Tick, TickSeries, WindowPlan, fold_plan, make_windows, mid_price
from .rbf import RbfModel, activations, fit_rbfnn, predict, solve_weights, spread
from .report import emit, read_trace
