"""Aliasing prediction: the closed-form profile each tangency imprints
on the reconstruction near the probe point, and comparison metrics
against the reconstructed profile.

A tangency with amplitude c, gradient u0, sweep rate mu0 and grid index
k_star contributes c * Psi(u0 . xcheck; kappa*mu0, k_star) to the scaled
reconstruction difference at displacement x = x0 + eps*xcheck; multiple
tangencies add.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .geometry import SamplingScheme, TangencyDescriptor
from .reconstruction import AliasProfile
from .special_functions import DEFAULT_PSI_CONFIG, PsiEvalConfig, big_psi

__all__ = [
    "ProbeSpec",
    "PredictionConfig",
    "ComparisonMetrics",
    "predict_at",
    "predict_profile",
    "fill_prediction",
    "compare",
]


@dataclass(frozen=True)
class ProbeSpec:
    """Probe segment x = x0 + eps*h*theta for h in h_samples."""

    x0: tuple[float, float]
    theta: tuple[float, float]
    h_samples: np.ndarray

    def __post_init__(self) -> None:
        norm = math.hypot(*self.theta)
        if not math.isclose(norm, 1.0, abs_tol=1e-9):
            raise ValueError("theta must be a unit vector")
        object.__setattr__(self, "h_samples", np.asarray(self.h_samples, dtype=float))


@dataclass(frozen=True)
class PredictionConfig:
    descriptors: tuple[TangencyDescriptor, ...]
    scheme: SamplingScheme
    probe: ProbeSpec

    def __post_init__(self) -> None:
        object.__setattr__(self, "descriptors", tuple(self.descriptors))
        for t in self.descriptors:
            if not t.curvature_gap > 0:
                raise ValueError("descriptor with nonpositive curvature gap")
            if t.mu0 == 0.0:
                raise ValueError("descriptor with zero sweep rate")


@dataclass(frozen=True)
class ComparisonMetrics:
    """Sup mismatch between profile sides, against the prediction's
    peak-to-peak amplitude."""

    sup_mismatch: float
    peak_to_peak: float
    relative_mismatch: float
    sample_count: int
    degenerate: bool


def predict_at(
    descriptors: Sequence[TangencyDescriptor],
    x_check,
    scheme: SamplingScheme,
    psi_config: PsiEvalConfig = DEFAULT_PSI_CONFIG,
) -> float:
    """Sum of c_j * Psi(u0_j . xcheck; kappa*mu0_j, k_star_j)."""
    x_check = np.asarray(x_check, dtype=float)
    kappa = scheme.kappa
    total = 0.0
    for t in descriptors:
        h = float(np.asarray(t.u0) @ x_check)
        total += t.amplitude * big_psi(h, kappa * t.mu0, t.k_star, config=psi_config)
    return total


def predict_profile(
    config: PredictionConfig,
    psi_config: PsiEvalConfig = DEFAULT_PSI_CONFIG,
) -> np.ndarray:
    """Predicted profile values over the probe's h samples."""
    theta = np.asarray(config.probe.theta, dtype=float)
    return np.array(
        [
            predict_at(config.descriptors, h * theta, config.scheme, psi_config)
            for h in config.probe.h_samples
        ]
    )


def fill_prediction(
    profile: AliasProfile,
    descriptors: Sequence[TangencyDescriptor],
    scheme: SamplingScheme,
    psi_config: PsiEvalConfig = DEFAULT_PSI_CONFIG,
) -> AliasProfile:
    """Attach the predicted side to a reconstructed profile in place."""
    probe = ProbeSpec(profile.x0, profile.theta, profile.h)
    config = PredictionConfig(tuple(descriptors), scheme, probe)
    profile.predicted = predict_profile(config, psi_config)
    return profile


def compare(profile: AliasProfile) -> ComparisonMetrics:
    """Metrics of reconstructed-vs-predicted agreement."""
    if profile.predicted is None:
        raise ValueError("profile has no prediction attached")
    recon = np.asarray(profile.recon_scaled, dtype=float)
    pred = np.asarray(profile.predicted, dtype=float)
    if recon.shape != pred.shape:
        raise ValueError("profile sides sampled differently")
    sup = float(np.max(np.abs(recon - pred))) if recon.size else 0.0
    ptp = float(np.max(pred) - np.min(pred)) if pred.size else 0.0
    degenerate = not ptp > 0.0
    relative = math.inf if degenerate else sup / ptp
    return ComparisonMetrics(
        sup_mismatch=sup,
        peak_to_peak=ptp,
        relative_mismatch=relative,
        sample_count=int(recon.size),
        degenerate=degenerate,
    )
