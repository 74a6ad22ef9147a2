"""TTD tap design, subcarrier-to-beam mapping and array weight vectors."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .channel import baseband_frequency, subcarrier_frequency
from .config import ConfigError, SystemConfig


class Architecture(str, enum.Enum):
    """Where the true-time delay is applied: RF, or analog baseband."""

    RF = "rf"
    BB = "bb"


@dataclass(frozen=True)
class TapDesign:
    delays: np.ndarray
    phases: np.ndarray
    psi: float
    r: int

    @property
    def n_r(self) -> int:
        return self.delays.size

    @property
    def delay_step(self) -> float:
        return float(self.delays[1] - self.delays[0]) if self.n_r > 1 else 0.0


@dataclass(frozen=True)
class ImpairmentDraw:
    """One time-invariant realization of per-branch hardware errors.

    ``phases`` and ``delays`` are the perturbed taps actually applied by
    the hardware; ``nominal_delays`` are the design values, used by the BB
    architecture to compensate the carrier phase.
    """

    gains: np.ndarray
    phases: np.ndarray
    delays: np.ndarray
    nominal_delays: np.ndarray
    sigma_a_db: float
    sigma_p: float
    sigma_t: float
    architecture: Architecture


@dataclass(frozen=True)
class BeamMap:
    """Subcarrier sets ``M_d`` (rows, 1-based indices) and DFT beams ``f_d``."""

    sets: np.ndarray
    beams: np.ndarray

    @property
    def d(self) -> int:
        return self.sets.shape[0]

    @property
    def r(self) -> int:
        return self.sets.shape[1]

    @property
    def indices(self) -> np.ndarray:
        """All sounded subcarriers, sorted."""
        return np.sort(self.sets.ravel())


def _sgn(x: float) -> float:
    # sgn(0) = +1; the zero case occurs at fc=60 GHz, BW=2 GHz, R=4
    return 1.0 if x >= 0 else -1.0


def design_taps(cfg: SystemConfig) -> TapDesign:
    """Uniform delay and phase taps mapping every ``M_d`` onto beam ``f_d``.

    ``tau_n = (n-1) R/BW`` and ``phi_n = (n-1)(sgn(psi) pi - psi)`` where
    ``psi`` is ``2 pi R (fc - BW/2)/BW`` wrapped into ``(-pi, pi]``.
    """
    r = cfg.r
    # wrap the cycle count exactly before scaling by 2*pi
    cycles = r * (cfg.fc - cfg.bw / 2) / cfg.bw
    frac = cycles - math.floor(cycles + 0.5)
    psi = 2 * math.pi * frac
    if psi <= -math.pi:
        psi += 2 * math.pi
    n = np.arange(cfg.n_r)
    delays = n * (r / cfg.bw)
    phases = n * (_sgn(psi) * math.pi - psi)
    return TapDesign(delays=delays, phases=phases, psi=psi, r=r)


def dft_beams(d: int, n_r: int) -> np.ndarray:
    """``[f_d]_n = exp(-j 2 pi (n-1)(d-1-D/2)/D)``, shape ``D x N_R``."""
    dd = np.arange(d) - d / 2
    return np.exp(-2j * np.pi * np.outer(dd, np.arange(n_r)) / d)


def beam_map(cfg: SystemConfig) -> BeamMap:
    """Assign ``R`` subcarriers, one per diversity block, to each direction."""
    if cfg.m_tot % cfg.r:
        raise ConfigError(f"m_tot={cfg.m_tot} is not divisible by r={cfg.r}")
    step = cfg.m_tot // (cfg.d * cfg.r)
    block = cfg.m_tot // cfg.r
    if step < 1:
        raise ConfigError(f"d*r={cfg.d * cfg.r} exceeds m_tot={cfg.m_tot}")
    d = np.arange(cfg.d)[:, None]
    r = np.arange(cfg.r)[None, :]
    sets = 1 + d * step + r * block
    if sets.max() > cfg.m_tot or np.unique(sets).size != sets.size:
        raise ConfigError("subcarrier sets overflow or collide")
    return BeamMap(sets=sets, beams=dft_beams(cfg.d, cfg.n_r))


def beam_pointing(d, n_dirs: int):
    """Angle probed by beam ``d`` (1-based): ``arcsin(2(d-1-D/2)/D)``."""
    d_arr = np.asarray(d)
    if np.any(d_arr < 1) or np.any(d_arr > n_dirs):
        raise ValueError(f"direction index out of range 1..{n_dirs}: {d}")
    theta = np.arcsin(2.0 * (d_arr - 1 - n_dirs / 2) / n_dirs)
    return float(theta) if theta.ndim == 0 else theta


def awv_ideal(taps: TapDesign, m, cfg: SystemConfig) -> np.ndarray:
    """Impairment-free TTD weights ``exp[-j(2 pi f_m tau_n + phi_n)]``.

    Scalar ``m`` gives a length-``N_R`` vector; an array gives ``len(m) x N_R``.
    """
    f = np.asarray(subcarrier_frequency(m, cfg))
    phase = np.multiply.outer(2 * np.pi * f, taps.delays) + taps.phases
    return np.exp(-1j * phase)


def sample_impairments(
    rng: np.random.Generator,
    taps: TapDesign,
    sigma_a_db: float = 0.0,
    sigma_p: float = 0.0,
    sigma_t: float = 0.0,
    architecture: Architecture | str = Architecture.RF,
) -> ImpairmentDraw:
    """Draw log-normal gain, Gaussian phase and Gaussian delay errors.

    Three standard-normal vectors are consumed regardless of the sigmas, so
    the generator state after the call does not depend on them.
    """
    for name, value in (("sigma_a_db", sigma_a_db), ("sigma_p", sigma_p), ("sigma_t", sigma_t)):
        if not value >= 0:
            raise ValueError(f"{name} must be non-negative, got {value}")
    architecture = Architecture(architecture)
    z = rng.standard_normal((3, taps.n_r))
    gains = 10.0 ** (sigma_a_db * z[0] / 10.0)
    phases = taps.phases + sigma_p * z[1]
    delays = taps.delays + sigma_t * z[2]
    return ImpairmentDraw(
        gains=gains,
        phases=phases,
        delays=delays,
        nominal_delays=taps.delays,
        sigma_a_db=float(sigma_a_db),
        sigma_p=float(sigma_p),
        sigma_t=float(sigma_t),
        architecture=architecture,
    )


def no_impairments(taps: TapDesign, architecture=Architecture.RF) -> ImpairmentDraw:
    return sample_impairments(np.random.default_rng(0), taps, architecture=architecture)


def awv_impaired(imp: ImpairmentDraw, m, cfg: SystemConfig, compensate: bool = True) -> np.ndarray:
    """Weights realized by impaired hardware.

    RF: ``alpha_n exp[-j(2 pi f_m tau~_n + phi~_n)]``.
    BB: ``alpha_n exp[-j(2 pi (f_m - fc) tau~_n + phi~_n)]``, where with
    ``compensate`` the static carrier term ``2 pi fc tau_n`` of the nominal
    delays is folded into the phase shifters so ideal BB and RF weights agree.
    """
    if imp.architecture is Architecture.RF:
        f = np.asarray(subcarrier_frequency(m, cfg))
        phase = np.multiply.outer(2 * np.pi * f, imp.delays) + imp.phases
    else:
        fb = np.asarray(baseband_frequency(m, cfg))
        phase = np.multiply.outer(2 * np.pi * fb, imp.delays) + imp.phases
        if compensate:
            phase = phase + 2 * np.pi * cfg.fc * imp.nominal_delays
    return imp.gains * np.exp(-1j * phase)


def format_tap_table(taps: TapDesign) -> str:
    """Plain-text tap table: branch, delay in ps, phase in radians."""
    lines = [f"{'branch':>6} {'delay_ps':>12} {'phase_rad':>12}"]
    for n, (tau, phi) in enumerate(zip(taps.delays, taps.phases), start=1):
        lines.append(f"{n:>6d} {tau * 1e12:>12.3f} {phi:>12.6f}")
    return "\n".join(lines) + "\n"


def parse_tap_table(text: str) -> tuple[np.ndarray, np.ndarray]:
    """Inverse of :func:`format_tap_table`; returns delays (s) and phases (rad)."""
    rows = [ln.split() for ln in text.strip().splitlines()[1:] if ln.strip()]
    arr = np.array(rows, dtype=float)
    return arr[:, 1] * 1e-12, arr[:, 2]
