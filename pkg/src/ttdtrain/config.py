"""System parameters shared by every simulation stage."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace


class ConfigError(ValueError):
    """Raised when a configuration is internally inconsistent."""


class IntegrityError(ValueError):
    """Raised when a received symbol lacks a subcarrier the estimator needs."""


class SpacingMode(str, enum.Enum):
    """Subcarrier frequency grid.

    PAPER spreads ``M_tot`` subcarriers edge to edge, spacing ``BW/(M_tot-1)``.
    EXACT uses the OFDM spacing ``BW/M_tot``, under which the TTD codebook
    reproduces the DFT beams exactly.
    """

    PAPER = "paper"
    EXACT = "exact"


class SnrReference(str, enum.Enum):
    """Which noise power the SNR ``sum(sigma_l^2) / sigma_N^2`` refers to.

    SUBCARRIER: ``sigma_N^2`` is the per-antenna noise variance on one
    subcarrier of the received symbol, with the pilot scaled by ``M^-1/2``.

    ELEMENT: the SNR is measured at one antenna element over the whole
    sampled band (unitary OFDM), i.e. the per-subcarrier noise variance is
    ``sum(sigma_l^2) / (SNR * N_R * M_tot)``.
    """

    SUBCARRIER = "subcarrier"
    ELEMENT = "element"


@dataclass(frozen=True)
class SystemConfig:
    """Scalar system parameters.

    Defaults reproduce the 60 GHz / 2 GHz evaluation setup.
    """

    fc: float = 60e9
    bw: float = 2e9
    m_tot: int = 4096
    n_t: int = 128
    n_r: int = 16
    d: int = 32
    q: int = 1024
    r: int = 4
    adc_bits: int = 5
    spacing: SpacingMode = SpacingMode.EXACT

    def __post_init__(self):
        object.__setattr__(self, "spacing", SpacingMode(self.spacing))
        self.validate()

    def validate(self) -> None:
        for name in ("m_tot", "n_t", "n_r", "d", "q", "r"):
            value = getattr(self, name)
            if not isinstance(value, int) or isinstance(value, bool) or value < 1:
                raise ConfigError(f"{name} must be a positive integer, got {value!r}")
        if not (self.bw > 0 and math.isfinite(self.bw)):
            raise ConfigError(f"bw must be positive, got {self.bw!r}")
        if not (self.fc > 0 and math.isfinite(self.fc)):
            raise ConfigError(f"fc must be positive, got {self.fc!r}")
        if self.adc_bits < 0:
            raise ConfigError(f"adc_bits must be >= 0, got {self.adc_bits!r}")
        if self.m_tot % self.r:
            raise ConfigError(f"m_tot={self.m_tot} is not divisible by r={self.r}")
        if self.d * self.r > self.m_tot:
            raise ConfigError(f"d*r={self.d * self.r} exceeds m_tot={self.m_tot}")
        if self.q < self.d:
            raise ConfigError(f"q={self.q} must be at least d={self.d}")

    @property
    def m_used(self) -> int:
        """Number of sounded subcarriers ``M = D*R``."""
        return self.d * self.r

    @property
    def subcarrier_spacing(self) -> float:
        if self.spacing is SpacingMode.PAPER:
            return self.bw / (self.m_tot - 1) if self.m_tot > 1 else 0.0
        return self.bw / self.m_tot

    def with_(self, **changes) -> SystemConfig:
        return replace(self, **changes)
