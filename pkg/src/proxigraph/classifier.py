"""Near/Far proximity classifier.

A plain logistic model over the six standardized window features. The shipped
default coefficients come from scripts/train_default_model.py; no training
framework is needed at inference time, so the same model runs anywhere.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from enum import Enum
from importlib import resources

from .errors import ModelMismatch
from .features import FEATURE_NAMES, FeatureVector

NEAR_THRESHOLD_M_DEFAULT = 2.0


class ProximityClass(str, Enum):
    NEAR = "near"
    FAR = "far"


@dataclass(frozen=True)
class ProximityVerdict:
    proximity: ProximityClass
    confidence: float  # Near-probability in [0, 1]


@dataclass(frozen=True)
class LogisticModel:
    coefficients: tuple[float, ...]
    intercept: float
    feature_means: tuple[float, ...]
    feature_stds: tuple[float, ...]
    near_threshold_m: float = NEAR_THRESHOLD_M_DEFAULT

    def __post_init__(self):
        k = len(FEATURE_NAMES)
        for name, values in (
            ("coefficients", self.coefficients),
            ("feature_means", self.feature_means),
            ("feature_stds", self.feature_stds),
        ):
            if len(values) != k:
                raise ModelMismatch(f"{name} must have dimension {k}, got {len(values)}")

    def standardize(self, raw: tuple[float, ...]) -> tuple[float, ...]:
        return tuple(
            (x - m) / (s if s > 0 else 1.0)
            for x, m, s in zip(raw, self.feature_means, self.feature_stds)
        )

    def to_json(self) -> str:
        return json.dumps(
            {
                "feature_names": list(FEATURE_NAMES),
                "coefficients": list(self.coefficients),
                "intercept": self.intercept,
                "feature_means": list(self.feature_means),
                "feature_stds": list(self.feature_stds),
                "near_threshold_m": self.near_threshold_m,
            },
            indent=2,
        )

    @classmethod
    def from_json(cls, text: str) -> "LogisticModel":
        doc = json.loads(text)
        if doc.get("feature_names") != list(FEATURE_NAMES):
            raise ModelMismatch(f"model features {doc.get('feature_names')} != {list(FEATURE_NAMES)}")
        return cls(
            coefficients=tuple(doc["coefficients"]),
            intercept=float(doc["intercept"]),
            feature_means=tuple(doc["feature_means"]),
            feature_stds=tuple(doc["feature_stds"]),
            near_threshold_m=float(doc.get("near_threshold_m", NEAR_THRESHOLD_M_DEFAULT)),
        )


def logistic(z: float) -> float:
    if z >= 0:
        return 1.0 / (1.0 + math.exp(-z))
    e = math.exp(z)
    return e / (1.0 + e)


def classify_proximity(features: FeatureVector, model: LogisticModel) -> ProximityVerdict:
    """Near-probability of one window; Near iff confidence >= 0.5."""
    z = model.intercept
    for c, x in zip(model.coefficients, model.standardize(features.as_tuple())):
        z += c * x
    confidence = logistic(z)
    cls = ProximityClass.NEAR if confidence >= 0.5 else ProximityClass.FAR
    return ProximityVerdict(proximity=cls, confidence=confidence)


def load_default_model() -> LogisticModel:
    text = resources.files("proxigraph.data").joinpath("default_model.json").read_text()
    return LogisticModel.from_json(text)
