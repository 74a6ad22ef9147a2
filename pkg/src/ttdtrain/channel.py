"""Frequency-selective geometric multipath channel.

Clusters carry a power, an AoA and an AoD. Their complex gains are either
drawn independently per coherence sub-band, or synthesized per subcarrier
from a set of delayed rays.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .config import ConfigError, SystemConfig

DEFAULT_RAYS = 20
DEFAULT_DELAY_SPREAD = 10e-9


class ChannelMode(str, enum.Enum):
    IID_SUBBAND = "iid"
    RAY_BASED = "rays"


@dataclass(frozen=True)
class ClusterSet:
    """Cluster powers (linear, descending) with AoAs/AoDs in radians."""

    power: np.ndarray
    aoa: np.ndarray
    aod: np.ndarray

    def __post_init__(self):
        for name in ("power", "aoa", "aod"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))
        if not (self.power.shape == self.aoa.shape == self.aod.shape) or self.power.ndim != 1:
            raise ValueError("power, aoa and aod must be 1-D arrays of equal length")
        if np.any(np.diff(self.power) > 0):
            raise ValueError("cluster powers must be sorted strongest first")
        for name in ("aoa", "aod"):
            if np.any(np.abs(getattr(self, name)) >= np.pi / 2):
                raise ValueError(f"{name} must lie strictly inside (-pi/2, pi/2)")

    @property
    def n_clusters(self) -> int:
        return self.power.size


@dataclass(frozen=True)
class ChannelRealization:
    """One draw of the cluster gains.

    In IID_SUBBAND mode ``gains`` is ``L x K_c``. In RAY_BASED mode
    ``ray_gains`` and ``ray_delays`` are ``L x n_rays`` and per-subcarrier
    gains are evaluated on demand by :func:`cluster_gains`.
    """

    mode: ChannelMode
    k_c: int
    bwc: float
    gains: np.ndarray | None = None
    ray_gains: np.ndarray | None = None
    ray_delays: np.ndarray | None = None

    @property
    def n_clusters(self) -> int:
        src = self.gains if self.mode is ChannelMode.IID_SUBBAND else self.ray_gains
        return src.shape[0]


def _crandn(rng: np.random.Generator, shape) -> np.ndarray:
    """Unit-variance circularly-symmetric complex Gaussian samples."""
    z = rng.standard_normal((2, *np.atleast_1d(shape)))
    return (z[0] + 1j * z[1]) / math.sqrt(2.0)


def coherence_subbands(bw: float, delay_spread: float = DEFAULT_DELAY_SPREAD) -> int:
    """``K_c = ceil(BW / BWc)`` with ``BWc = 1/delay_spread``."""
    return max(1, math.ceil(round(bw * delay_spread, 9)))


def subband_index(m, m_tot: int, k_c: int):
    """Sub-band (1-based) holding subcarrier ``m`` (1-based): ``ceil(m*K_c/M_tot)``.

    Accepts scalars or integer arrays.
    """
    if k_c < 1:
        raise ValueError(f"k_c must be >= 1, got {k_c}")
    m_arr = np.asarray(m)
    if np.any(m_arr < 1) or np.any(m_arr > m_tot):
        raise ValueError(f"subcarrier index out of range 1..{m_tot}: {m}")
    # integer ceil division avoids float rounding at exact multiples
    k = -((-m_arr.astype(np.int64) * k_c) // m_tot)
    return int(k) if k.ndim == 0 else k


def subcarrier_frequency(m, cfg: SystemConfig):
    """Absolute frequency in Hz of subcarrier ``m`` (1-based)."""
    m_arr = np.asarray(m)
    if np.any(m_arr < 1) or np.any(m_arr > cfg.m_tot):
        raise ValueError(f"subcarrier index out of range 1..{cfg.m_tot}: {m}")
    f = cfg.fc - cfg.bw / 2 + (m_arr - 1) * cfg.subcarrier_spacing
    return float(f) if f.ndim == 0 else f


def baseband_frequency(m, cfg: SystemConfig):
    """``f_m - fc`` computed without cancelling the carrier."""
    m_arr = np.asarray(m)
    f = -cfg.bw / 2 + (m_arr - 1) * cfg.subcarrier_spacing
    return float(f) if f.ndim == 0 else f


def array_response(theta, n: int) -> np.ndarray:
    """Half-wavelength ULA response, unit norm.

    ``[a(theta)]_n = N^-1/2 exp(-j (n-1) pi sin(theta))``. For an array of
    angles the result has shape ``(len(theta), n)``.
    """
    theta = np.asarray(theta, dtype=float)
    phase = np.multiply.outer(np.sin(theta), np.arange(n)) * np.pi
    return np.exp(-1j * phase) / math.sqrt(n)


def draw_clusters(
    rng: np.random.Generator,
    n_clusters: int,
    relative_powers_db=None,
    aoa_limit: float = np.pi / 2,
    aod_limit: float = np.pi / 2,
) -> ClusterSet:
    """Draw cluster geometry with powers normalized to unit sum.

    Angles are i.i.d. uniform on ``(-limit, limit)``. ``relative_powers_db``
    defaults to 0 dB for every cluster.
    """
    if n_clusters < 1:
        raise ValueError("need at least one cluster")
    if relative_powers_db is None:
        relative_powers_db = np.zeros(n_clusters)
    rel = np.asarray(relative_powers_db, dtype=float)
    if rel.shape != (n_clusters,):
        raise ValueError(f"expected {n_clusters} relative powers, got {rel.shape}")
    power = np.sort(10.0 ** (rel / 10.0))[::-1]
    power = power / power.sum()
    aoa = _open_uniform(rng, aoa_limit, n_clusters)
    aod = _open_uniform(rng, aod_limit, n_clusters)
    return ClusterSet(power=power, aoa=aoa, aod=aod)


def _open_uniform(rng, limit, size):
    if not 0 < limit <= np.pi / 2:
        raise ValueError(f"angle limit must be in (0, pi/2], got {limit}")
    x = rng.uniform(-limit, limit, size)
    # uniform() is half-open; keep the endpoint itself out as well
    return np.where(x <= -np.pi / 2, np.nextafter(-np.pi / 2, 0.0), x)


def realize_channel_iid(
    rng: np.random.Generator,
    clusters: ClusterSet,
    k_c: int,
    bwc: float = 1 / DEFAULT_DELAY_SPREAD,
) -> ChannelRealization:
    """Independent ``CN(0, sigma_l^2)`` gain per cluster and sub-band."""
    if k_c < 1:
        raise ValueError(f"k_c must be >= 1, got {k_c}")
    gains = _crandn(rng, (clusters.n_clusters, k_c)) * np.sqrt(clusters.power)[:, None]
    return ChannelRealization(mode=ChannelMode.IID_SUBBAND, k_c=k_c, bwc=bwc, gains=gains)


def realize_channel_rays(
    rng: np.random.Generator,
    clusters: ClusterSet,
    cfg: SystemConfig,
    n_rays: int = DEFAULT_RAYS,
    delay_spread: float = DEFAULT_DELAY_SPREAD,
) -> ChannelRealization:
    """Equal-power rays with delays uniform on ``[0, delay_spread]``.

    Ray amplitudes are ``CN(0, sigma_l^2 / n_rays)``; phase is referenced to
    the carrier, so a ray at delay ``t`` contributes ``g exp(-j2pi(f_m-fc)t)``.
    """
    if n_rays < 1:
        raise ValueError(f"n_rays must be >= 1, got {n_rays}")
    if delay_spread < 0:
        raise ValueError(f"delay_spread must be >= 0, got {delay_spread}")
    shape = (clusters.n_clusters, n_rays)
    amps = _crandn(rng, shape) * np.sqrt(clusters.power / n_rays)[:, None]
    delays = rng.uniform(0.0, delay_spread, shape)
    bwc = 1.0 / delay_spread if delay_spread > 0 else math.inf
    k_c = coherence_subbands(cfg.bw, delay_spread) if delay_spread > 0 else 1
    return ChannelRealization(
        mode=ChannelMode.RAY_BASED, k_c=k_c, bwc=bwc, ray_gains=amps, ray_delays=delays
    )


def cluster_gains(real: ChannelRealization, m, cfg: SystemConfig) -> np.ndarray:
    """Cluster gains seen by subcarriers ``m``, shape ``L x len(m)``."""
    m = np.atleast_1d(np.asarray(m))
    if np.any(m < 1) or np.any(m > cfg.m_tot):
        raise ValueError(f"subcarrier index out of range 1..{cfg.m_tot}")
    if real.mode is ChannelMode.IID_SUBBAND:
        k = subband_index(m, cfg.m_tot, real.k_c)
        return real.gains[:, np.atleast_1d(k) - 1]
    fb = baseband_frequency(m, cfg)
    phase = np.exp(-2j * np.pi * real.ray_delays[:, :, None] * fb[None, None, :])
    return np.einsum("lr,lrm->lm", real.ray_gains, phase)


def channel_matrix(
    real: ChannelRealization,
    clusters: ClusterSet,
    index: int,
    cfg: SystemConfig,
) -> np.ndarray:
    """``H = sum_l G_l a_R(aoa_l) a_T(aod_l)^H``, shape ``N_R x N_T``.

    ``index`` is the sub-band ``k`` in IID mode and the subcarrier ``m`` in
    ray mode.
    """
    if real.mode is ChannelMode.IID_SUBBAND:
        if not 1 <= index <= real.k_c:
            raise IndexError(f"sub-band index {index} outside 1..{real.k_c}")
        g = real.gains[:, index - 1]
    else:
        if not 1 <= index <= cfg.m_tot:
            raise IndexError(f"subcarrier index {index} outside 1..{cfg.m_tot}")
        g = cluster_gains(real, [index], cfg)[:, 0]
    a_r = array_response(clusters.aoa, cfg.n_r)
    a_t = array_response(clusters.aod, cfg.n_t)
    return np.einsum("l,li,lj->ij", g, a_r, a_t.conj())


def check_diversity(real: ChannelRealization, cfg: SystemConfig) -> None:
    """Diversity beyond the number of independent sub-bands is meaningless."""
    if real.mode is ChannelMode.IID_SUBBAND and cfg.r > real.k_c:
        raise ConfigError(f"diversity r={cfg.r} exceeds K_c={real.k_c} sub-bands")
