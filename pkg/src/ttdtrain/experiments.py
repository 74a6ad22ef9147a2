"""Seeded Monte Carlo harness for AoA RMSE sweeps."""

from __future__ import annotations

import csv
import enum
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Sequence

import numpy as np

from .channel import (
    DEFAULT_DELAY_SPREAD,
    DEFAULT_RAYS,
    ChannelMode,
    ClusterSet,
    coherence_subbands,
    draw_clusters,
    realize_channel_iid,
    realize_channel_rays,
)
from .codebook import Architecture, beam_map, design_taps, sample_impairments
from .config import SnrReference, SystemConfig
from .estimator import (
    build_dictionary,
    estimate_aoa_coarse,
    estimate_aoa_super,
    estimate_powers,
    noise_variance,
    quantize_adc,
    synth_rx,
)

CSV_HEADER = (
    "param_name",
    "param_value",
    "algorithm",
    "architecture",
    "trials",
    "rmse_rad",
    "rmse_deg",
    "seed",
)


class SweepParam(str, enum.Enum):
    DIVERSITY_R = "diversity_r"
    SNR_DB = "snr_db"
    GAIN_SIGMA_DB = "gain_sigma_db"
    PHASE_SIGMA_RAD = "phase_sigma_rad"
    DELAY_SIGMA_S = "delay_sigma_s"


class Algorithm(str, enum.Enum):
    SUPER = "super"
    COARSE = "coarse"


@dataclass(frozen=True)
class Scenario:
    """Everything one trial needs besides its random generator."""

    system: SystemConfig = field(default_factory=SystemConfig)
    channel: ChannelMode = ChannelMode.RAY_BASED
    cluster_powers_db: tuple[float, ...] = (0.0, -10.0, -10.0)
    aoa_limit: float = np.pi / 3
    n_rays: int = DEFAULT_RAYS
    delay_spread: float = DEFAULT_DELAY_SPREAD
    k_c: int | None = None
    snr_db: float = 0.0
    snr_reference: SnrReference = SnrReference.ELEMENT
    sigma_a_db: float = 0.0
    sigma_p: float = 0.0
    sigma_t: float = 0.0
    architecture: Architecture = Architecture.BB
    adc_domain: str = "time"
    aod_error: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "channel", ChannelMode(self.channel))
        object.__setattr__(self, "snr_reference", SnrReference(self.snr_reference))
        object.__setattr__(self, "architecture", Architecture(self.architecture))
        object.__setattr__(self, "cluster_powers_db", tuple(float(x) for x in self.cluster_powers_db))

    @property
    def subbands(self) -> int:
        if self.k_c is not None:
            return self.k_c
        return coherence_subbands(self.system.bw, self.delay_spread)

    def with_param(self, param: SweepParam, value) -> Scenario:
        param = SweepParam(param)
        if param is SweepParam.DIVERSITY_R:
            return replace(self, system=self.system.with_(r=int(value)))
        name = {
            SweepParam.SNR_DB: "snr_db",
            SweepParam.GAIN_SIGMA_DB: "sigma_a_db",
            SweepParam.PHASE_SIGMA_RAD: "sigma_p",
            SweepParam.DELAY_SIGMA_S: "sigma_t",
        }[param]
        return replace(self, **{name: float(value)})


@dataclass(frozen=True)
class SweepSpec:
    param: SweepParam
    values: tuple
    scenario: Scenario = field(default_factory=Scenario)
    algorithms: tuple[Algorithm, ...] = (Algorithm.SUPER, Algorithm.COARSE)
    trials: int = 2000
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "param", SweepParam(self.param))
        object.__setattr__(self, "values", tuple(self.values))
        object.__setattr__(self, "algorithms", tuple(Algorithm(a) for a in self.algorithms))
        if not self.values:
            raise ValueError("sweep needs at least one value")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")


@dataclass(frozen=True)
class SweepRecord:
    param_name: str
    param_value: float
    algorithm: str
    architecture: str
    trials: int
    rmse_rad: float
    rmse_deg: float
    mean_abs_error: float
    seed: int


@dataclass(frozen=True)
class TrialResult:
    theta_super: float
    theta_coarse: float
    theta_true: float


@lru_cache(maxsize=32)
def _context(cfg: SystemConfig):
    bmap = beam_map(cfg)
    return design_taps(cfg), bmap, build_dictionary(bmap, cfg)


def run_trial(rng: np.random.Generator, scenario: Scenario, clusters: ClusterSet | None = None) -> TrialResult:
    """One independent draw of geometry, fading, hardware errors and noise.

    Both estimators see the same received symbol. Passing ``clusters`` pins
    the geometry instead of drawing it.
    """
    cfg = scenario.system
    taps, bmap, dictionary = _context(cfg)
    if clusters is None:
        n_clusters = len(scenario.cluster_powers_db)
        clusters = draw_clusters(rng, n_clusters, scenario.cluster_powers_db, aoa_limit=scenario.aoa_limit)
    if scenario.channel is ChannelMode.IID_SUBBAND:
        k_c = scenario.subbands
        real = realize_channel_iid(rng, clusters, k_c, bwc=cfg.bw / k_c)
    else:
        real = realize_channel_rays(rng, clusters, cfg, scenario.n_rays, scenario.delay_spread)
    imp = sample_impairments(
        rng, taps, scenario.sigma_a_db, scenario.sigma_p, scenario.sigma_t, scenario.architecture
    )
    noise_var = noise_variance(scenario.snr_db, cfg, float(clusters.power.sum()), scenario.snr_reference)
    sym = synth_rx(rng, clusters, real, imp, bmap, cfg, noise_var, scenario.aod_error)
    sym = quantize_adc(sym, cfg, scenario.adc_domain)
    p_hat = estimate_powers(sym, bmap)
    theta_super, _ = estimate_aoa_super(p_hat, dictionary)
    theta_coarse = estimate_aoa_coarse(p_hat, cfg.d)
    return TrialResult(theta_super, theta_coarse, float(clusters.aoa[0]))


def trial_rng(seed: int, value_index: int, trial_index: int) -> np.random.Generator:
    """Generator for one trial, a pure function of its coordinates."""
    return np.random.default_rng(np.random.SeedSequence([seed, value_index, trial_index]))


def rmse(errors: Sequence[float]) -> float:
    e = np.asarray(errors, dtype=float)
    if e.size == 0:
        raise ValueError("rmse of an empty error list")
    return float(np.sqrt(np.mean(e * e)))


def _run_chunk(job):
    scenario, seed, value_index, start, stop = job
    out = np.empty((stop - start, 3))
    for i, t in enumerate(range(start, stop)):
        res = run_trial(trial_rng(seed, value_index, t), scenario)
        out[i] = (res.theta_super, res.theta_coarse, res.theta_true)
    return out


def simulate(scenario: Scenario, trials: int, seed: int = 0, value_index: int = 0, threads: int = 1) -> np.ndarray:
    """Run ``trials`` trials; returns a ``trials x 3`` array (super, coarse, true)."""
    return _simulate_many([(scenario, value_index)], trials, seed, threads)[0]


def _simulate_many(points, trials, seed, threads):
    chunk = max(1, min(250, math.ceil(trials / max(1, threads))))
    jobs = [
        (scenario, seed, vi, start, min(start + chunk, trials))
        for scenario, vi in points
        for start in range(0, trials, chunk)
    ]
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(_run_chunk, jobs))
    else:
        parts = [_run_chunk(job) for job in jobs]
    per_point = len(jobs) // len(points)
    return [np.concatenate(parts[i * per_point : (i + 1) * per_point]) for i in range(len(points))]


def run_sweep(spec: SweepSpec, threads: int = 1) -> list[SweepRecord]:
    """RMSE per swept value and algorithm, ordered by value then algorithm."""
    points = [(spec.scenario.with_param(spec.param, v), i) for i, v in enumerate(spec.values)]
    results = _simulate_many(points, spec.trials, spec.seed, threads)
    records = []
    for (scenario, _), value, res in zip(points, spec.values, results):
        for alg in spec.algorithms:
            col = 0 if alg is Algorithm.SUPER else 1
            err = res[:, col] - res[:, 2]
            r = rmse(err)
            records.append(
                SweepRecord(
                    param_name=spec.param.value,
                    param_value=float(value),
                    algorithm=alg.value,
                    architecture=scenario.architecture.value,
                    trials=spec.trials,
                    rmse_rad=r,
                    rmse_deg=r * 180.0 / math.pi,
                    mean_abs_error=float(np.mean(np.abs(err))),
                    seed=spec.seed,
                )
            )
    return records


def records_to_csv(records: Sequence[SweepRecord]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for rec in records:
        writer.writerow(
            [
                rec.param_name,
                repr(rec.param_value),
                rec.algorithm,
                rec.architecture,
                rec.trials,
                repr(rec.rmse_rad),
                repr(rec.rmse_deg),
                rec.seed,
            ]
        )
    return buf.getvalue()


def write_csv(records: Sequence[SweepRecord], path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(records_to_csv(records))
