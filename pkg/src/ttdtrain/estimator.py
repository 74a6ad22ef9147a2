"""Single-symbol received signal synthesis and AoA estimation.

The receiver sounds all ``D`` beams at once on disjoint subcarriers,
averages the ``R`` powers of each beam and correlates the resulting power
profile against a dictionary of beam gains on a fine angle grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .channel import (
    ChannelRealization,
    ClusterSet,
    array_response,
    check_diversity,
    cluster_gains,
)
from .codebook import BeamMap, ImpairmentDraw, TapDesign, awv_ideal, awv_impaired, beam_pointing
from .config import IntegrityError, SnrReference, SystemConfig

ADC_FULL_SCALE_RMS = 3.0


@dataclass(frozen=True)
class RxSymbol:
    """Received training symbol on the full subcarrier grid.

    ``grid[m-1]`` holds ``Y[m]``; subcarriers outside ``indices`` carry
    combined noise only and matter only to the time-domain ADC model.
    """

    indices: np.ndarray
    grid: np.ndarray
    noise_var: float

    @property
    def samples(self) -> np.ndarray:
        return self.grid[self.indices - 1]


@dataclass(frozen=True)
class Dictionary:
    matrix: np.ndarray
    grid: np.ndarray
    col_norms: np.ndarray

    @property
    def q(self) -> int:
        return self.grid.size


def noise_variance(
    snr_db: float,
    cfg: SystemConfig,
    total_power: float = 1.0,
    reference: SnrReference | str = SnrReference.ELEMENT,
) -> float:
    """Per-antenna, per-subcarrier noise variance for an SNR in dB."""
    if math.isinf(snr_db) and snr_db > 0:
        return 0.0
    sigma2 = total_power / 10.0 ** (snr_db / 10.0)
    if SnrReference(reference) is SnrReference.ELEMENT:
        sigma2 /= cfg.n_r * cfg.m_tot
    return sigma2


def _weights(awv, m, cfg):
    if isinstance(awv, TapDesign):
        return awv_ideal(awv, m, cfg)
    if isinstance(awv, ImpairmentDraw):
        return awv_impaired(awv, m, cfg)
    raise TypeError(f"expected TapDesign or ImpairmentDraw, got {type(awv).__name__}")


def synth_rx(
    rng: np.random.Generator,
    clusters: ClusterSet,
    real: ChannelRealization,
    awv: TapDesign | ImpairmentDraw,
    bmap: BeamMap,
    cfg: SystemConfig,
    noise_var: float,
    aod_error: float = 0.0,
) -> RxSymbol:
    """``Y[m] = M^-1/2 w[m]^H H[k(m)] v + w[m]^H n[m]`` for every sounded ``m``.

    The precoder is ``v = a_T(aod_1 + aod_error)``. Sounded subcarriers get
    an explicit ``N_R``-dimensional noise vector; the remaining subcarriers
    get the equivalent combined noise ``CN(0, ||w||^2 sigma_N^2)``.
    """
    check_diversity(real, cfg)
    idx = bmap.indices
    w = _weights(awv, idx, cfg)
    g = cluster_gains(real, idx, cfg)
    beam_gain = w.conj() @ array_response(clusters.aoa, cfg.n_r).T
    v = array_response(clusters.aod[0] + aod_error, cfg.n_t)
    tx_gain = array_response(clusters.aod, cfg.n_t).conj() @ v
    y = (beam_gain * g.T) @ tx_gain / math.sqrt(cfg.m_used)

    sigma = math.sqrt(noise_var / 2.0)
    n = sigma * rng.standard_normal((2, idx.size, cfg.n_r))
    y = y + np.einsum("mn,mn->m", w.conj(), n[0] + 1j * n[1])

    idle = cfg.m_tot - idx.size
    w_norm2 = float(np.mean(np.sum(np.abs(w) ** 2, axis=1)))
    z = math.sqrt(w_norm2) * sigma * rng.standard_normal((2, idle))
    grid = np.empty(cfg.m_tot, dtype=complex)
    mask = np.ones(cfg.m_tot, dtype=bool)
    mask[idx - 1] = False
    grid[mask] = z[0] + 1j * z[1]
    grid[idx - 1] = y
    return RxSymbol(indices=idx, grid=grid, noise_var=noise_var)


def quantize_uniform(x: np.ndarray, full_scale: float, bits: int) -> np.ndarray:
    """Mid-rise uniform quantizer on ``[-full_scale, full_scale]`` with clipping."""
    levels = 2**bits
    step = 2.0 * full_scale / levels
    code = np.clip(np.floor(x / step), -levels // 2, levels // 2 - 1)
    return (code + 0.5) * step


def _quantize_complex(x: np.ndarray, bits: int) -> np.ndarray:
    # each rail has full scale at 3x its RMS
    rail_rms = math.sqrt(np.mean(np.abs(x) ** 2) / 2.0)
    if rail_rms == 0.0:
        return x.copy()
    fs = ADC_FULL_SCALE_RMS * rail_rms
    return quantize_uniform(x.real, fs, bits) + 1j * quantize_uniform(x.imag, fs, bits)


def quantize_adc(sym: RxSymbol, cfg: SystemConfig, domain: str = "time") -> RxSymbol:
    """Apply ``cfg.adc_bits`` of I/Q quantization to the received symbol.

    ``domain="time"`` quantizes the OFDM time-domain waveform of the whole
    grid (unitary transforms); ``"frequency"`` quantizes the sounded ``Y[m]``
    directly. ``adc_bits == 0`` returns the symbol unchanged.
    """
    if cfg.adc_bits <= 0:
        return sym
    if domain == "time":
        x = np.fft.ifft(sym.grid, norm="ortho")
        grid = np.fft.fft(_quantize_complex(x, cfg.adc_bits), norm="ortho")
    elif domain == "frequency":
        grid = sym.grid.copy()
        grid[sym.indices - 1] = _quantize_complex(sym.samples, cfg.adc_bits)
    else:
        raise ValueError(f"unknown ADC domain {domain!r}")
    return replace(sym, grid=grid)


def angle_grid(q: int) -> np.ndarray:
    """Cell-centred grid ``-pi/2 + (2q-1) pi/(2Q)``, q = 1..Q."""
    return -np.pi / 2 + (2 * np.arange(1, q + 1) - 1) * np.pi / (2 * q)


def build_dictionary(bmap: BeamMap, cfg: SystemConfig) -> Dictionary:
    """``B[d, q] = |f_d^H a_R(xi_q)|^2`` using impairment-free beams."""
    grid = angle_grid(cfg.q)
    b = np.abs(bmap.beams.conj() @ array_response(grid, cfg.n_r).T) ** 2
    return Dictionary(matrix=b, grid=grid, col_norms=np.linalg.norm(b, axis=0))


def estimate_powers(sym: RxSymbol, bmap: BeamMap) -> np.ndarray:
    """Per-direction sample mean of ``|Y[m]|^2`` over ``M_d``."""
    missing = np.setdiff1d(bmap.sets.ravel(), sym.indices)
    if missing.size:
        raise IntegrityError(f"received symbol lacks subcarriers {missing[:8].tolist()}")
    y = sym.grid[bmap.sets - 1]
    if not np.all(np.isfinite(y)):
        raise IntegrityError("received symbol has non-finite samples")
    return np.mean(np.abs(y) ** 2, axis=1)


def estimate_aoa_super(p_hat: np.ndarray, dictionary: Dictionary) -> tuple[float, int]:
    """Grid angle whose normalized dictionary column best matches ``p_hat``.

    Returns ``(theta, q)`` with ``q`` the 0-based column; ties go to the
    lowest index.
    """
    score = (np.asarray(p_hat) @ dictionary.matrix) / dictionary.col_norms
    q = int(np.argmax(score))
    return float(dictionary.grid[q]), q


def estimate_aoa_coarse(p_hat: np.ndarray, n_dirs: int) -> float:
    """Pointing angle of the strongest beam (lowest index on ties)."""
    return beam_pointing(int(np.argmax(p_hat)) + 1, n_dirs)


def expected_powers(
    clusters: ClusterSet,
    bmap: BeamMap,
    cfg: SystemConfig,
    noise_var: float,
    aod_error: float = 0.0,
    dominant_only: bool = False,
) -> np.ndarray:
    """Analytic mean power per direction under i.i.d. cluster gains.

    ``p_d = (1/M) sum_l |f_d^H a_R|^2 |a_T^H v|^2 sigma_l^2 + N_R sigma_N^2``;
    ``dominant_only`` keeps only the strongest cluster.
    """
    n = 1 if dominant_only else clusters.n_clusters
    beam = np.abs(bmap.beams.conj() @ array_response(clusters.aoa[:n], cfg.n_r).T) ** 2
    v = array_response(clusters.aod[0] + aod_error, cfg.n_t)
    tx = np.abs(array_response(clusters.aod[:n], cfg.n_t).conj() @ v) ** 2
    return beam @ (tx * clusters.power[:n]) / cfg.m_used + cfg.n_r * noise_var
