"""SINR, Shannon rate, outage probability and the average system sum rate."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

THERMAL_NOISE_DBM_HZ = -174.0


class UndefinedSINRError(ValueError):
    """Raised when SINR has a zero denominator."""


@dataclass(frozen=True)
class LinkSample:
    """One evaluated downlink.

    ``macro_interf_w`` and ``femto_interf_w`` are the summed received powers
    of the co-band macro and femto interferers; ``x_prob`` and ``y_prob`` are
    the probabilities that each tier is actually transmitting.
    """

    user_id: int
    desired_w: float
    macro_interf_w: float
    femto_interf_w: float
    noise_w: float
    x_prob: float = 1.0
    y_prob: float = 1.0
    bandwidth_hz: float = 0.0

    def __post_init__(self):
        for name in ("desired_w", "macro_interf_w", "femto_interf_w", "noise_w", "bandwidth_hz"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        for name in ("x_prob", "y_prob"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")


@dataclass(frozen=True)
class UserClassRates:
    mue_rates: Sequence[float] = field(default_factory=tuple)
    inner_fue_rates: Sequence[float] = field(default_factory=tuple)
    edge_fue_rates: Sequence[float] = field(default_factory=tuple)

    def __post_init__(self):
        for rates in (self.mue_rates, self.inner_fue_rates, self.edge_fue_rates):
            if any(r < 0 for r in rates):
                raise ValueError("rates must be >= 0")


def noise_power(bandwidth_hz, noise_figure_db=9.0, density_dbm_hz=THERMAL_NOISE_DBM_HZ):
    """Thermal noise plus receiver noise figure over ``bandwidth_hz``, in watts."""
    return np.power(10.0, (density_dbm_hz + noise_figure_db - 30.0) / 10.0) * np.asarray(
        bandwidth_hz, dtype=float)


def sinr(sample: LinkSample) -> float:
    denom = (sample.x_prob * sample.macro_interf_w + sample.y_prob * sample.femto_interf_w
             + sample.noise_w)
    if denom <= 0:
        raise UndefinedSINRError(f"user {sample.user_id}: no noise and no interference")
    return sample.desired_w / denom


def capacity(bandwidth_hz, sinr_linear):
    """Shannon capacity W log2(1 + SINR) in bit/s."""
    if np.any(np.asarray(bandwidth_hz) < 0) or np.any(np.asarray(sinr_linear) < 0):
        raise ValueError("bandwidth and SINR must be >= 0")
    return bandwidth_hz * np.log2(1.0 + np.asarray(sinr_linear, dtype=float))


def user_rate(per_subcarrier_sinrs: Sequence[float], delta_b_hz: float) -> float:
    """Sum of per-subcarrier Shannon rates over the subcarriers a user holds."""
    if not delta_b_hz > 0:
        raise ValueError("delta_b_hz must be > 0")
    if len(per_subcarrier_sinrs) == 0:
        return 0.0
    return float(np.sum(capacity(delta_b_hz, np.asarray(per_subcarrier_sinrs, dtype=float))))


def outage_probability(mean_sinr_linear, zeta_linear):
    """P(SINR < zeta) for an exponentially distributed SINR with the given mean."""
    if np.any(np.asarray(mean_sinr_linear) <= 0):
        raise ValueError("mean SINR must be > 0")
    out = -np.expm1(-np.asarray(zeta_linear, dtype=float) / np.asarray(mean_sinr_linear,
                                                                       dtype=float))
    return float(out) if np.ndim(out) == 0 else out


def average_sum_rate(rates: UserClassRates) -> float:
    """Sum over the three user classes of the mean per-user rate.

    An empty class contributes nothing.
    """
    total = 0.0
    for cls_rates in (rates.mue_rates, rates.inner_fue_rates, rates.edge_fue_rates):
        if len(cls_rates):
            total += math.fsum(cls_rates) / len(cls_rates)
    return total
