"""Classifier calibration against simulator ground truth.

Plain full-batch gradient descent on the logistic loss over standardized
features: 500 iterations at learning rate 0.1, weights initialized to zero.
The mean-RSSI coefficient is projected to stay non-negative so the shipped
model is monotone in signal strength by construction.
"""
from __future__ import annotations

import numpy as np

from ..classifier import LogisticModel, NEAR_THRESHOLD_M_DEFAULT
from ..errors import DegenerateTraining
from ..features import (
    FeatureVector,
    REFERENCE_TX_POWER_DEFAULT,
    SLIDE_MS_DEFAULT,
    WINDOW_MS_DEFAULT,
    extract_features,
    make_windows,
)
from .runner import ScenarioOutput

ITERATIONS_DEFAULT = 500
LEARNING_RATE_DEFAULT = 0.1


def loss_and_grad(
    weights: np.ndarray, intercept: float, features: np.ndarray, labels: np.ndarray
) -> tuple[float, np.ndarray, float]:
    """Mean negative log-likelihood and its analytic gradient."""
    z = features @ weights + intercept
    # log(1 + e^z) without overflow
    log1pexp = np.where(z > 30, z, np.log1p(np.exp(np.minimum(z, 30.0))))
    loss = float(np.mean(log1pexp - labels * z))
    p = 1.0 / (1.0 + np.exp(-np.clip(z, -500, 500)))
    residual = p - labels
    grad_w = features.T @ residual / len(labels)
    grad_b = float(np.mean(residual))
    return loss, grad_w, grad_b


def calibrate_classifier(
    labeled: list[tuple[FeatureVector, bool]],
    iterations: int = ITERATIONS_DEFAULT,
    learning_rate: float = LEARNING_RATE_DEFAULT,
    near_threshold_m: float = NEAR_THRESHOLD_M_DEFAULT,
    seed: int = 0,
) -> LogisticModel:
    if not labeled:
        raise DegenerateTraining("no training data")
    labels = np.asarray([1.0 if y else 0.0 for _, y in labeled])
    if labels.min() == labels.max():
        raise DegenerateTraining("training data contains a single class")

    raw = np.asarray([fv.as_tuple() for fv, _ in labeled], dtype=np.float64)
    order = np.random.default_rng(seed).permutation(len(raw))
    raw, labels = raw[order], labels[order]

    means = raw.mean(axis=0)
    stds = raw.std(axis=0)
    stds_safe = np.where(stds > 0, stds, 1.0)
    x = (raw - means) / stds_safe

    w = np.zeros(x.shape[1])
    b = 0.0
    for _ in range(iterations):
        _, grad_w, grad_b = loss_and_grad(w, b, x, labels)
        w -= learning_rate * grad_w
        b -= learning_rate * grad_b
        w[0] = max(w[0], 0.0)  # keep confidence monotone in mean RSSI

    return LogisticModel(
        coefficients=tuple(w),
        intercept=b,
        feature_means=tuple(means),
        feature_stds=tuple(stds_safe),
        near_threshold_m=near_threshold_m,
    )


def labeled_windows(
    output: ScenarioOutput,
    near_threshold_m: float = NEAR_THRESHOLD_M_DEFAULT,
    window_ms: int = WINDOW_MS_DEFAULT,
    slide_ms: int = SLIDE_MS_DEFAULT,
    reference_tx_power: int = REFERENCE_TX_POWER_DEFAULT,
) -> list[tuple[FeatureVector, bool]]:
    """Feature windows from every receiver stream, labelled Near when the
    ground-truth distance stays under the threshold for at least half of the
    window's ticks."""
    gt = output.ground_truth
    tick = gt.tick_ms
    out: list[tuple[FeatureVector, bool]] = []
    for rx_hash, stream in output.streams.items():
        rx = gt.index_of(rx_hash)
        windows = make_windows(stream.samples(), window_ms=window_ms, slide_ms=slide_ms)
        token_to_tx = {tok: idx for (idx, _epoch), tok in stream.token_table.items()}
        for window in windows:
            tx = token_to_tx[window.peer_token]
            lo = np.searchsorted(tick, window.window_start_ms, side="left")
            hi = np.searchsorted(tick, window.window_end_ms, side="left")
            if hi <= lo:
                continue
            delta = gt.positions[lo:hi, rx, :] - gt.positions[lo:hi, tx, :]
            dist = np.hypot(delta[:, 0], delta[:, 1])
            near = float(np.mean(dist < near_threshold_m)) >= 0.5
            out.append((extract_features(window, reference_tx_power), near))
    return out
