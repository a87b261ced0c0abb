"""Flat ``key = value`` run configuration and synthetic-spec strings."""

from __future__ import annotations

import dataclasses
import os
from dataclasses import dataclass, field
from pathlib import Path

from .cluster import ClusterSearchConfig
from .data import SyntheticSpec
from .engine import PipelineConfig
from .errors import TickcastError
from .features import KernelParams
from .forest import ForestConfig
from .gd import GdConfig
from .lob import WindowPlan

FORMAT_VERSION = "1"
SEED_ENV = "TICKCAST_SEED"


class ConfigError(TickcastError, ValueError):
    pass


def _bool(v: str) -> bool:
    s = str(v).strip().lower()
    if s in ("1", "true", "yes", "on"):
        return True
    if s in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {v!r}")


def _opt(conv):
    def parse(v):
        return None if str(v).strip().lower() in ("", "none", "auto") else conv(v)
    return parse


# key -> (parser, default)
KEYS = {
    "format_version": (str, FORMAT_VERSION),
    "input": (_opt(str), None),
    "synthetic": (_opt(str), None),
    "out": (str, "out"),
    "plot": (_bool, False),
    "feature_set": (str, "simple"),
    "drop_raw": (_bool, False),
    "gamma": (float, 1.0),
    "c0": (float, 1.0),
    "degree": (int, 2),
    "window": (int, 100),
    "step": (int, 1),
    "folds": (int, 5),
    "horizon": (int, 1),
    "n_trees": (int, 50),
    "max_depth": (int, 5),
    "min_samples_split": (int, 4),
    "feature_subsample": (_opt(int), None),
    "bootstrap": (_bool, True),
    "learning_rate": (float, 0.01),
    "iterations": (int, 100),
    "normalize_gradient": (_bool, True),
    "divergence_factor": (float, 1e6),
    "max_clusters": (_opt(int), None),
    "n_init": (int, 10),
    "kmeans_max_iter": (int, 100),
    "tol": (float, 1e-8),
    "kmeans_plus_plus": (_bool, False),
    "ridge": (_opt(float), None),
    "rbf_n_init": (int, 10),
    "target_anchor": (str, "last_mid"),
    "selector_lookback": (int, 10),
    "seed": (int, 0),
}


@dataclass(frozen=True)
class RunConfig:
    values: dict = field(default_factory=dict)

    @classmethod
    def from_mapping(cls, mapping) -> "RunConfig":
        vals = {k: d for k, (_, d) in KEYS.items()}
        unknown = sorted(set(mapping) - set(KEYS))
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
        for k, raw in mapping.items():
            conv = KEYS[k][0]
            try:
                vals[k] = conv(raw) if isinstance(raw, str) else raw
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"bad value for {k}: {exc}") from None
        if vals["format_version"] != FORMAT_VERSION:
            raise ConfigError(f"unsupported format_version {vals['format_version']!r}")
        cfg = cls(vals)
        cfg.pipeline()  # validates every component
        return cfg

    def __getitem__(self, k):
        return self.values[k]

    def pipeline(self) -> PipelineConfig:
        v = self.values
        try:
            return PipelineConfig(
                feature_set=v["feature_set"],
                kernel=KernelParams(v["gamma"], v["c0"], v["degree"]),
                drop_raw=v["drop_raw"],
                window=WindowPlan(v["window"], v["step"]),
                folds=v["folds"],
                horizon=v["horizon"],
                forest=ForestConfig(v["n_trees"], v["max_depth"], v["min_samples_split"],
                                    v["feature_subsample"], v["bootstrap"], v["seed"]),
                gd=GdConfig(v["learning_rate"], v["iterations"], v["normalize_gradient"], None,
                            v["divergence_factor"]),
                cluster=ClusterSearchConfig(v["max_clusters"], v["n_init"], v["kmeans_max_iter"], v["tol"],
                                            v["seed"], v["kmeans_plus_plus"]),
                ridge=v["ridge"],
                rbf_n_init=v["rbf_n_init"],
                target_anchor=v["target_anchor"],
                selector_lookback=v["selector_lookback"],
                master_seed=v["seed"],
            )
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    def echo(self) -> dict:
        return dict(sorted(self.values.items()))


def parse_config_text(text: str) -> dict:
    out = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"config line {lineno}: expected key = value")
        k, v = line.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def load_config(path=None, overrides=None, environ=None) -> RunConfig:
    """Defaults < config file < ``TICKCAST_SEED`` < explicit overrides."""
    environ = os.environ if environ is None else environ
    mapping = parse_config_text(Path(path).read_text()) if path else {}
    if environ.get(SEED_ENV):
        mapping["seed"] = environ[SEED_ENV]
    mapping.update({k: v for k, v in (overrides or {}).items() if v is not None})
    return RunConfig.from_mapping(mapping)


_SPEC_ALIASES = {"n": "n_events", "sigma": "noise", "price": "base_price"}


def parse_synthetic(text: str) -> SyntheticSpec:
    """``model[:key=value,...]``, e.g. ``ar1:n=3000,phi=0.95,noise=0.01,seed=1``."""
    model, _, rest = text.partition(":")
    kwargs = {"model": model.strip()}
    types = {f.name: f.type for f in dataclasses.fields(SyntheticSpec)}
    for item in filter(None, (s.strip() for s in rest.split(","))):
        if "=" not in item:
            raise ConfigError(f"bad synthetic spec item {item!r}")
        k, v = (s.strip() for s in item.split("=", 1))
        k = _SPEC_ALIASES.get(k, k)
        if k not in types or k == "model":
            raise ConfigError(f"unknown synthetic spec key {k!r}")
        conv = {"int": int, "float": float, "str": str}[types[k]]
        try:
            kwargs[k] = conv(float(v)) if conv is int else conv(v)
        except ValueError:
            raise ConfigError(f"bad value for {k}: {v!r}") from None
    return SyntheticSpec(**kwargs)
