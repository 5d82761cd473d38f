"""Action valuation, per-game player ratings, volatility and development curves."""

from ._core import (
    Event,
    MissingArtifact,
    RegressionForest,
    ValidationError,
    VaepError,
    features,
    fit_ols,
    generate_events,
    labels,
    lag2_differences,
    read_events,
    rolling_mean,
    run_pipeline,
)

__all__ = [
    "Event",
    "MissingArtifact",
    "RegressionForest",
    "ValidationError",
    "VaepError",
    "features",
    "fit_ols",
    "generate_events",
    "labels",
    "lag2_differences",
    "read_events",
    "rolling_mean",
    "run_pipeline",
]
