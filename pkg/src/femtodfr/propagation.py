"""Path loss and link budget.

Macro links use the Okumura-Hata model, femto links the indoor model
``20 log10 f + N log10 d - 28``.  Losses are in dB, powers in watts; dBm only
appears in the conversion helpers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

PAPER = "paper"
STANDARD = "standard"
CONSTANT_MODES = (PAPER, STANDARD)


@dataclass(frozen=True)
class MacroLinkParams:
    f_c_mhz: float
    h_b_m: float
    h_m_m: float
    d_km: float
    shadowing_db: float = 0.0

    def __post_init__(self):
        for name in ("f_c_mhz", "h_b_m", "h_m_m", "d_km"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be > 0, got {getattr(self, name)!r}")


@dataclass(frozen=True)
class FemtoLinkParams:
    f_c_mhz: float
    d1_m: float
    decay_index: float = 30.0

    def __post_init__(self):
        for name in ("f_c_mhz", "d1_m", "decay_index"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be > 0, got {getattr(self, name)!r}")


def _check_mode(constant_mode: str) -> None:
    if constant_mode not in CONSTANT_MODES:
        raise ValueError(f"constant_mode must be one of {CONSTANT_MODES}, got {constant_mode!r}")


def hata_correction(f_c_mhz, h_m_m, constant_mode: str = PAPER):
    """Mobile antenna height correction a(h_m) in dB.

    ``paper`` uses a trailing constant of 8; ``standard`` uses 0.8, the usual
    small/medium city value.  Works elementwise on arrays.
    """
    _check_mode(constant_mode)
    if np.any(np.asarray(f_c_mhz) <= 0):
        raise ValueError("f_c_mhz must be > 0")
    log_f = np.log10(f_c_mhz)
    tail = 8.0 if constant_mode == PAPER else 0.8
    return 1.1 * (log_f - 0.7) * h_m_m - (1.56 * log_f - tail)


def hata_loss_db(f_c_mhz, h_b_m, h_m_m, d_km, shadowing_db=0.0, constant_mode: str = PAPER):
    """Vectorised Okumura-Hata loss; see :func:`hata_path_loss`."""
    log_f = np.log10(f_c_mhz)
    log_hb = np.log10(h_b_m)
    return (
        69.55
        + 26.16 * log_f
        - 13.82 * log_hb
        - hata_correction(f_c_mhz, h_m_m, constant_mode)
        + (44.9 - 6.55 * log_hb) * np.log10(d_km)
        + shadowing_db
    )


def hata_path_loss(p: MacroLinkParams, constant_mode: str = PAPER) -> float:
    return float(hata_loss_db(p.f_c_mhz, p.h_b_m, p.h_m_m, p.d_km, p.shadowing_db, constant_mode))


def indoor_loss_db(f_c_mhz, d1_m, decay_index=30.0):
    """Vectorised indoor femto loss; see :func:`femto_path_loss`."""
    return 20.0 * np.log10(f_c_mhz) + decay_index * np.log10(d1_m) - 28.0


def femto_path_loss(p: FemtoLinkParams) -> float:
    return float(indoor_loss_db(p.f_c_mhz, p.d1_m, p.decay_index))


def received_power(tx_power_w, loss_db):
    """P_rx = P_tx * 10^(-L/10), in watts."""
    if np.any(np.asarray(tx_power_w) <= 0):
        raise ValueError("tx_power_w must be > 0")
    out = tx_power_w * np.power(10.0, -np.asarray(loss_db, dtype=float) / 10.0)
    return float(out) if np.ndim(out) == 0 else out


def watts_to_dbm(p_w):
    return 10.0 * np.log10(p_w) + 30.0


def dbm_to_watts(p_dbm):
    return np.power(10.0, (np.asarray(p_dbm, dtype=float) - 30.0) / 10.0)


def db_to_linear(x_db):
    return np.power(10.0, np.asarray(x_db, dtype=float) / 10.0)


def linear_to_db(x):
    return 10.0 * np.log10(x)


def sample_shadowing(rng: np.random.Generator, sigma_db: float, size=None):
    """Zero-mean normal shadowing in dB; exactly zero when ``sigma_db`` is 0."""
    if sigma_db < 0:
        raise ValueError("shadowing sigma must be >= 0")
    if sigma_db == 0:
        return 0.0 if size is None else np.zeros(size)
    return rng.normal(0.0, sigma_db, size)


def macro_received_power(tx_power_w, f_c_mhz, h_b_m, h_m_m, d_m, shadowing_db=0.0,
                         constant_mode: str = PAPER, min_distance_m: float = 1.0):
    """Received power from a macro BS at ground distance ``d_m`` metres."""
    d_km = np.maximum(d_m, min_distance_m) / 1000.0
    return received_power(tx_power_w, hata_loss_db(f_c_mhz, h_b_m, h_m_m, d_km, shadowing_db,
                                                   constant_mode))


def femto_received_power(tx_power_w, f_c_mhz, d_m, decay_index=30.0, shadowing_db=0.0,
                         min_distance_m: float = 1.0):
    """Received power from a FAP at distance ``d_m`` metres (indoor model)."""
    loss = indoor_loss_db(f_c_mhz, np.maximum(d_m, min_distance_m), decay_index) + shadowing_db
    return received_power(tx_power_w, loss)

