import json
import os
from collections import defaultdict

import numpy as np
import pytest

_criteria = defaultdict(list)
_durations = {}


def pytest_sessionstart(session):
    """Compile (or load cached) numba kernels once, before any test is timed."""
    from tickcast.cluster import ClusterSearchConfig, kmeans, select_k, silhouette
    from tickcast.forest import ForestConfig, fit_forest

    rng = np.random.default_rng(0)
    P = rng.normal(size=(6, 6))
    kmeans(P, 2, n_init=2)
    kmeans(P, 2, n_init=2, kmeans_plus_plus=True)
    silhouette(P, np.array([0, 0, 0, 1, 1, 1]))
    select_k(np.abs(P), ClusterSearchConfig(n_init=1))
    select_k(np.abs(P), ClusterSearchConfig(n_init=1, kmeans_plus_plus=True))
    fit_forest(P, P[:, 0], ForestConfig(n_trees=1))
    fit_forest(P, P[:, 0], ForestConfig(n_trees=1, bootstrap=False, feature_subsample=6))


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when in ("setup", "call"):
        _durations[item.nodeid] = _durations.get(item.nodeid, 0.0) + rep.duration
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        measured = "; ".join(str(v) for k, v in item.user_properties if k == "measured")
        for m in item.iter_markers("criterion"):
            _criteria[m.args[0]].append((item.name, rep.outcome, measured))


def pytest_sessionfinish(session, exitstatus):
    path = os.environ.get("TICKCAST_DURATIONS_FILE")
    if path:
        with open(path, "w") as fh:
            json.dump(_durations, fh)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_criteria):
        results = _criteria[n]
        ok = all(o == "passed" for _, o, _ in results)
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}")
        for name, o, measured in results:
            terminalreporter.write_line(f"    {name}: {o}" + (f"  [{measured}]" if measured else ""))
