"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Monte Carlo criteria use 2000 trials at base seed 0 on the ray-based
channel, 5-bit time-domain ADC and exact subcarrier spacing. Scenarios
compared against each other share per-trial seeds (paired trials).
"""

import math
import time

import numpy as np

from ttdtrain.channel import draw_clusters, realize_channel_iid
from ttdtrain.codebook import awv_ideal, beam_map, design_taps
from ttdtrain.config import SystemConfig
from ttdtrain.estimator import estimate_powers, expected_powers, noise_variance, synth_rx
from ttdtrain.experiments import Scenario, SweepSpec, records_to_csv, rmse, run_sweep, simulate
from ttdtrain.hwspec import analog_report, hybrid_report

TRIALS = 2000
SEED = 0
Q = 1024
FLOOR = math.sqrt((math.pi / Q) ** 2 / 12)  # 8.86e-4 rad

_cache = {}


def rmse_pair(scenario):
    """(super RMSE, coarse RMSE) for a scenario, memoized across criteria."""
    if scenario not in _cache:
        res = simulate(scenario, TRIALS, seed=SEED)
        _cache[scenario] = (rmse(res[:, 0] - res[:, 2]), rmse(res[:, 1] - res[:, 2]))
    return _cache[scenario]


def base(**kw):
    return Scenario(snr_db=0.0, **kw)


def test_c01_codebook_identity(criterion):
    cfg = SystemConfig()
    start = time.perf_counter()
    taps, bmap = design_taps(cfg), beam_map(cfg)
    w = awv_ideal(taps, bmap.sets.ravel(), cfg).reshape(cfg.d, cfg.r, cfg.n_r)
    dev = float(np.abs(w - bmap.beams[:, None, :]).max())
    elapsed = time.perf_counter() - start
    criterion(
        "C1 codebook identity",
        dev < 1e-9 and elapsed < 1.0,
        f"max |w[m]-f_d| = {dev:.3e} (< 1e-9), {elapsed * 1e3:.1f} ms (< 1 s)",
    )


def test_c02_rmse_floor(criterion):
    sup, _ = rmse_pair(Scenario(snr_db=20.0))
    lo, hi = FLOOR, 2.7e-3
    criterion(
        "C2 high-SNR RMSE floor",
        lo <= sup <= hi,
        f"super RMSE at 20 dB = {sup:.3e} rad, required [{lo:.3e}, {hi:.1e}]",
    )


def test_c03_diversity_trend(criterion):
    sup, coarse = zip(*(rmse_pair(base(system=SystemConfig(r=r))) for r in (1, 2, 4)))
    steps = [1 - sup[i + 1] / sup[i] for i in range(2)]
    ok = all(s >= 0.05 for s in steps)
    criterion(
        "C3 diversity trend",
        ok,
        "super RMSE R=1,2,4 = " + ", ".join(f"{x:.4f}" for x in sup)
        + f"; improvements {steps[0]:.1%}, {steps[1]:.1%} (each >= 5%)"
        + "; coarse = " + ", ".join(f"{x:.4f}" for x in coarse),
    )


def test_c04_algorithm_ordering(criterion):
    sup, coarse = rmse_pair(base())
    criterion(
        "C4 super vs coarse",
        sup <= 0.5 * coarse,
        f"super {sup:.4f} rad vs coarse {coarse:.4f} rad, ratio {sup / coarse:.3f} (<= 0.5)",
    )


def test_c05_architecture_equivalence(criterion):
    kw = dict(sigma_a_db=2.0, sigma_p=0.3, sigma_t=0.0)
    rf = rmse_pair(base(architecture="rf", **kw))
    bb = rmse_pair(base(architecture="bb", **kw))
    diff = max(abs(a - b) for a, b in zip(rf, bb))
    criterion(
        "C5 RF/BB equivalence without delay error",
        diff <= 1e-12,
        f"RF {rf[0]:.6f}/{rf[1]:.6f}, BB {bb[0]:.6f}/{bb[1]:.6f} (super/coarse), max diff {diff:.1e}",
    )


def test_c06_delay_error_asymmetry(criterion):
    free_bb, _ = rmse_pair(base(architecture="bb"))
    free_rf, _ = rmse_pair(base(architecture="rf"))
    bb, _ = rmse_pair(base(architecture="bb", sigma_t=125e-12))
    rf, _ = rmse_pair(base(architecture="rf", sigma_t=5e-12))
    bb_ratio, rf_ratio = bb / free_bb, rf / free_rf
    criterion(
        "C6 delay-error asymmetry",
        bb_ratio <= 2.0 and rf_ratio >= 3.0,
        f"BB@125ps {bb:.4f} = {bb_ratio:.2f}x clean (<= 2x); RF@5ps {rf:.4f} = {rf_ratio:.2f}x clean (>= 3x)",
    )


def test_c07_gain_phase_onset(criterion):
    free, _ = rmse_pair(base())
    ratios = {
        "sigma_A=1dB": rmse_pair(base(sigma_a_db=1.0))[0] / free,
        "sigma_P=0.17": rmse_pair(base(sigma_p=0.17))[0] / free,
        "sigma_A=4dB": rmse_pair(base(sigma_a_db=4.0))[0] / free,
        "sigma_P=0.9": rmse_pair(base(sigma_p=0.9))[0] / free,
    }
    mild = [ratios["sigma_A=1dB"], ratios["sigma_P=0.17"]]
    severe = [ratios["sigma_A=4dB"], ratios["sigma_P=0.9"]]
    ok = all(r <= 1.5 for r in mild) and all(r >= 2.0 for r in severe)
    criterion(
        "C7 gain/phase degradation onset",
        ok,
        ", ".join(f"{k} {v:.2f}x" for k, v in ratios.items()) + " (mild <= 1.5x, severe >= 2x)",
    )


def test_c08_hardware_table(criterion):
    cfg = SystemConfig()
    analog = [analog_report(cfg.with_(r=r)) for r in (1, 2, 4)]
    got = [(round(a.delta_tau * 1e9, 9), round(a.tau_max * 1e9, 9), a.n_i) for a in analog]
    hybrid = [hybrid_report(cfg.with_(r=r)).n_i for r in (2, 4)]
    ok = got == [(0.5, 7.5, 31), (1.0, 15.0, 61), (2.0, 30.0, 121)] and hybrid == [9, 25]
    criterion("C8 hardware table", ok, f"analog {got}; hybrid N_I {hybrid}")


def test_c09_power_estimate_unbiased(criterion):
    cfg = SystemConfig()
    taps, bmap = design_taps(cfg), beam_map(cfg)
    rng = np.random.default_rng(SEED)
    clusters = draw_clusters(rng, 3, [0.0, -10.0, -10.0], aoa_limit=math.pi / 3)
    noise = noise_variance(0.0, cfg, float(clusters.power.sum()))
    p_hat = np.zeros(cfg.d)
    draws = 10_000
    for _ in range(draws):
        real = realize_channel_iid(rng, clusters, 20)
        p_hat += estimate_powers(synth_rx(rng, clusters, real, taps, bmap, cfg, noise), bmap)
    p = expected_powers(clusters, bmap, cfg, noise)
    worst = float(np.max(np.abs(p_hat / draws / p - 1)))
    criterion("C9 power estimate unbiased (IID)", worst <= 0.03, f"max relative error over d = {worst:.2%} (<= 3%)")


def test_c10_determinism(criterion):
    spec = SweepSpec("snr_db", (0.0, 10.0), Scenario(sigma_a_db=1.0, sigma_t=1e-11), trials=40, seed=SEED)
    a = records_to_csv(run_sweep(spec))
    b = records_to_csv(run_sweep(spec))
    c = records_to_csv(run_sweep(spec, threads=3))
    criterion("C10 determinism", a == b == c, f"{len(a)} CSV bytes identical across reruns and threads=1/3")

