"""Delay-tap requirements of the TTD array and the interleaving they imply."""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .config import SystemConfig

DEFAULT_F_CLK = 4e9
# range and resolution of the discrete-time SCA delay element
DEFAULT_CAPABILITY = (15e-9, 5e-12)
# hybrid (four 4-element sub-arrays) delay ranges by diversity order; no
# closed form exists for these, so they are table inputs
HYBRID_TAU_MAX = {2: 2e-9, 4: 6e-9}


class HwArchitecture(str, enum.Enum):
    ANALOG = "analog"
    HYBRID = "hybrid"


@dataclass(frozen=True)
class Capability:
    max_range: float = DEFAULT_CAPABILITY[0]
    min_resolution: float = DEFAULT_CAPABILITY[1]


@dataclass(frozen=True)
class HwReport:
    r: int
    delta_tau: float
    tau_max: float
    n_i: int
    f_clk: float
    architecture: HwArchitecture
    feasible: bool
    narrative: str


def delay_spec(cfg: SystemConfig) -> tuple[float, float]:
    """Tap resolution ``R/BW`` and total range ``(N_R-1) R/BW``."""
    delta_tau = cfg.r / cfg.bw
    return delta_tau, (cfg.n_r - 1) * delta_tau


def interleaving(tau_max: float, f_clk: float = DEFAULT_F_CLK) -> int:
    """Time-interleaved sampling phases needed to span ``tau_max``."""
    if f_clk <= 0:
        raise ValueError(f"f_clk must be positive, got {f_clk}")
    return int(round(tau_max * f_clk)) + 1


def feasibility(report: HwReport, capability: Capability = Capability()) -> tuple[bool, str]:
    """Whether the delay element covers the report's range and resolution.

    The narrative names the binding constraint(s).
    """
    return _check(report.delta_tau, report.tau_max, capability)


def _check(delta_tau, tau_max, capability):
    range_ok = tau_max <= capability.max_range * (1 + 1e-12)
    res_ok = delta_tau >= capability.min_resolution * (1 - 1e-12)
    if range_ok and res_ok:
        return True, "within delay range and resolution"
    reasons = []
    if not range_ok:
        reasons.append(f"range-bound: needs {tau_max * 1e9:g} ns > {capability.max_range * 1e9:g} ns")
    if not res_ok:
        reasons.append(
            f"resolution-bound: needs {delta_tau * 1e12:g} ps < {capability.min_resolution * 1e12:g} ps"
        )
    return False, "; ".join(reasons)


def analog_report(cfg: SystemConfig, f_clk: float = DEFAULT_F_CLK, capability: Capability = Capability()) -> HwReport:
    delta_tau, tau_max = delay_spec(cfg)
    ok, why = _check(delta_tau, tau_max, capability)
    return HwReport(cfg.r, delta_tau, tau_max, interleaving(tau_max, f_clk), f_clk, HwArchitecture.ANALOG, ok, why)


def hybrid_report(
    cfg: SystemConfig,
    tau_max: float | None = None,
    f_clk: float = DEFAULT_F_CLK,
    capability: Capability = Capability(),
) -> HwReport | None:
    """Hybrid-array row; ``None`` when no delay range is known for ``cfg.r``."""
    if tau_max is None:
        tau_max = HYBRID_TAU_MAX.get(cfg.r)
        if tau_max is None:
            return None
    delta_tau = cfg.r / cfg.bw
    ok, why = _check(delta_tau, tau_max, capability)
    return HwReport(cfg.r, delta_tau, tau_max, interleaving(tau_max, f_clk), f_clk, HwArchitecture.HYBRID, ok, why)


def table(cfg: SystemConfig, r_values=(1, 2, 4), f_clk: float = DEFAULT_F_CLK, capability: Capability = Capability()) -> str:
    """Aligned text table: R, R/BW, analog range/N_I, hybrid range/N_I, feasibility."""
    head = f"{'R':>3} {'R/BW[ns]':>9} {'tau_ANA[ns]':>12} {'N_I_ANA':>8} {'tau_HYB[ns]':>12} {'N_I_HYB':>8}  feasible (analog)"
    lines = [head]
    for r in r_values:
        c = cfg.with_(r=r)
        ana = analog_report(c, f_clk, capability)
        hyb = hybrid_report(c, f_clk=f_clk, capability=capability)
        h_tau = f"{hyb.tau_max * 1e9:g}" if hyb else "-"
        h_ni = f"{hyb.n_i}" if hyb else "-"
        verdict = "yes" if ana.feasible else f"no ({ana.narrative})"
        lines.append(
            f"{r:>3} {ana.delta_tau * 1e9:>9g} {ana.tau_max * 1e9:>12g} {ana.n_i:>8d} {h_tau:>12} {h_ni:>8}  {verdict}"
        )
    return "\n".join(lines) + "\n"
