"""73 GHz air-to-ground link model: path loss, link budget, fading and Shannon rate.

Functions accept scalars or numpy arrays. Fading is deterministic (``|g|^2 = 1``,
no shadowing) when no random generator is supplied; passing a
``numpy.random.Generator`` switches to stochastic draws.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

RICIAN = "rician"
RAYLEIGH = "rayleigh"


@dataclass(frozen=True)
class LinkParams:
    """Path-loss constants for one propagation condition (LoS or NLoS)."""

    alpha: float  # dB
    beta: float
    sigma: float  # shadowing std, dB
    fading: str = RICIAN
    k_factor: float = 0.0

    def __post_init__(self):
        if not self.beta > 0:
            raise ValueError(f"beta must be positive, got {self.beta}")
        if not self.sigma >= 0:
            raise ValueError(f"sigma must be non-negative, got {self.sigma}")
        if self.fading not in (RICIAN, RAYLEIGH):
            raise ValueError(f"fading must be {RICIAN!r} or {RAYLEIGH!r}, got {self.fading!r}")
        if not self.k_factor >= 0:
            raise ValueError(f"k_factor must be non-negative, got {self.k_factor}")


LOS_73GHZ = LinkParams(alpha=69.8, beta=2.0, sigma=3.1, fading=RICIAN, k_factor=2.0)
NLOS_73GHZ = LinkParams(alpha=82.7, beta=2.69, sigma=8.7, fading=RAYLEIGH)


@dataclass(frozen=True)
class RadioConfig:
    tx_power: float = 30.0  # dBm
    tx_gain: float = 0.0  # dBi
    rx_gain: float = 0.0  # dBi
    bandwidth: float = 100e6  # Hz
    noise_power: float = -94.0  # dBm; thermal floor over 100 MHz
    los: LinkParams = field(default=LOS_73GHZ)
    nlos: LinkParams = field(default=NLOS_73GHZ)

    def __post_init__(self):
        if not self.bandwidth > 0:
            raise ValueError(f"bandwidth must be positive, got {self.bandwidth}")


def dbm_to_mw(dbm):
    return np.power(10.0, np.asarray(dbm, dtype=float) / 10.0)


def path_loss_db(distance, params: LinkParams, shadowing=0.0):
    """``alpha + 10 beta log10(d) + shadowing`` in dB; ``distance`` in meters."""
    d = np.asarray(distance, dtype=float)
    if np.any(~(d > 0)):
        raise ValueError("path loss requires distance > 0")
    out = params.alpha + 10.0 * params.beta * np.log10(d) + shadowing
    return float(out) if np.ndim(out) == 0 else out


def sample_shadowing(params: LinkParams, rng: np.random.Generator | None, size=None):
    """Zero-mean Gaussian shadowing (dB) of std ``params.sigma``; zero without an rng."""
    if rng is None:
        return 0.0 if size is None else np.zeros(size)
    return rng.normal(0.0, params.sigma, size=size)


def received_power_dbm(cfg: RadioConfig, pl):
    out = cfg.tx_power + cfg.tx_gain + cfg.rx_gain - np.asarray(pl, dtype=float)
    return float(out) if np.ndim(out) == 0 else out


def sample_fading_power(params: LinkParams, rng: np.random.Generator | None, size=None):
    """Small-scale fading power ``|g|^2`` with unit mean.

    Rician links use the LoS/scatter split ``K/(K+1)`` and ``1/(K+1)``;
    Rayleigh links draw an exponential(1) variate.
    """
    if rng is None:
        return 1.0 if size is None else np.ones(size)
    if params.fading == RAYLEIGH:
        return rng.exponential(1.0, size=size)
    k = params.k_factor
    s = np.sqrt(0.5 / (k + 1.0))
    re = np.sqrt(k / (k + 1.0)) + s * rng.standard_normal(size)
    im = s * rng.standard_normal(size)
    return re * re + im * im


def throughput_bps(cfg: RadioConfig, p_rx_dbm, fading_power=1.0):
    """Shannon rate ``B log2(1 + P_rx |g|^2 / N)`` with powers converted to mW."""
    g = np.asarray(fading_power, dtype=float)
    if np.any(g < 0):
        raise ValueError("fading power must be non-negative")
    snr = dbm_to_mw(p_rx_dbm) * g / dbm_to_mw(cfg.noise_power)
    out = cfg.bandwidth * np.log2(1.0 + snr)
    return float(out) if np.ndim(out) == 0 else out


def link_rate(uav_pos, ue_pos, los: bool, cfg: RadioConfig, rng: np.random.Generator | None = None):
    """Rate (bit/s) of a single UAV-UE link at 3D positions ``uav_pos`` and ``ue_pos``.

    With ``rng`` set, shadowing and fading are drawn (shadowing first).
    """
    d = float(np.linalg.norm(np.asarray(uav_pos, dtype=float) - np.asarray(ue_pos, dtype=float)))
    params = cfg.los if los else cfg.nlos
    pl = path_loss_db(d, params, sample_shadowing(params, rng))
    return throughput_bps(cfg, received_power_dbm(cfg, pl), sample_fading_power(params, rng))


def deterministic_rate(cfg: RadioConfig, distance, los: bool = True):
    """Expected-path-loss rate with ``|g|^2 = 1``; vectorised over ``distance``."""
    params = cfg.los if los else cfg.nlos
    return throughput_bps(cfg, received_power_dbm(cfg, path_loss_db(distance, params)))


def max_distance_for_rate(cfg: RadioConfig, rate_bps: float, los: bool = True) -> float:
    """Largest 3D distance at which the deterministic rate still reaches ``rate_bps``."""
    params = cfg.los if los else cfg.nlos
    snr = 2.0 ** (rate_bps / cfg.bandwidth) - 1.0
    pl_max = cfg.tx_power + cfg.tx_gain + cfg.rx_gain - cfg.noise_power - 10.0 * np.log10(snr)
    return float(10.0 ** ((pl_max - params.alpha) / (10.0 * params.beta)))
