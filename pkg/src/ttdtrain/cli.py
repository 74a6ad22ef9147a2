"""Command-line front end: ``ttdtrain {design,simulate,sweep,hwspec}``.

Exit codes: 0 success, 2 configuration error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import sys
from dataclasses import dataclass, fields

from . import hwspec
from .codebook import beam_map, design_taps, format_tap_table
from .config import ConfigError, SystemConfig
from .experiments import Scenario, SweepParam, SweepSpec, rmse, run_sweep, records_to_csv, simulate

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3

SWEEP_NAMES = {
    "r": SweepParam.DIVERSITY_R,
    "snr": SweepParam.SNR_DB,
    "sigma_a": SweepParam.GAIN_SIGMA_DB,
    "sigma_p": SweepParam.PHASE_SIGMA_RAD,
    "sigma_t": SweepParam.DELAY_SIGMA_S,
}


@dataclass
class RunConfig:
    """Run configuration; every physical key carries its unit."""

    fc_ghz: float = 60.0
    bw_ghz: float = 2.0
    m_tot: int = 4096
    n_t: int = 128
    n_r: int = 16
    d: int = 32
    q: int = 1024
    r: int = 4
    adc_bits: int = 5
    adc_domain: str = "time"
    spacing: str = "exact"
    channel: str = "rays"
    n_rays: int = 20
    delay_spread_ns: float = 10.0
    k_c: int | None = None
    cluster_powers_db: list = None
    aoa_limit_deg: float = 60.0
    snr_db: float = 0.0
    snr_reference: str = "element"
    sigma_a_db: float = 0.0
    sigma_p_rad: float = 0.0
    sigma_t_ps: float = 0.0
    arch: str = "bb"
    aod_error_deg: float = 0.0
    sweep: str | None = None
    values: list = None
    trials: int = 2000
    seed: int | None = None
    output: str = "sweep.csv"
    threads: int = 1

    def __post_init__(self):
        if self.cluster_powers_db is None:
            self.cluster_powers_db = [0.0, -10.0, -10.0]
        if self.values is None:
            self.values = []

    def system(self) -> SystemConfig:
        try:
            return self._system()
        except ConfigError:
            raise
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def _system(self) -> SystemConfig:
        return SystemConfig(
            fc=self.fc_ghz * 1e9,
            bw=self.bw_ghz * 1e9,
            m_tot=self.m_tot,
            n_t=self.n_t,
            n_r=self.n_r,
            d=self.d,
            q=self.q,
            r=self.r,
            adc_bits=self.adc_bits,
            spacing=self.spacing,
        )

    def scenario(self) -> Scenario:
        if not 0 < self.aoa_limit_deg <= 90:
            raise ConfigError(f"aoa_limit_deg must be in (0, 90], got {self.aoa_limit_deg}")
        if self.adc_domain not in ("time", "frequency"):
            raise ConfigError(f"adc_domain must be 'time' or 'frequency', got {self.adc_domain!r}")
        for key in ("sigma_a_db", "sigma_p_rad", "sigma_t_ps"):
            if getattr(self, key) < 0:
                raise ConfigError(f"{key} must be non-negative")
        try:
            return Scenario(
                system=self.system(),
                channel=self.channel,
                cluster_powers_db=tuple(self.cluster_powers_db),
                aoa_limit=math.radians(self.aoa_limit_deg),
                n_rays=self.n_rays,
                delay_spread=self.delay_spread_ns * 1e-9,
                k_c=self.k_c,
                snr_db=self.snr_db,
                snr_reference=self.snr_reference,
                sigma_a_db=self.sigma_a_db,
                sigma_p=self.sigma_p_rad,
                sigma_t=self.sigma_t_ps * 1e-12,
                architecture=self.arch,
                adc_domain=self.adc_domain,
                aod_error=math.radians(self.aod_error_deg),
            )
        except ConfigError:
            raise
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc


_TYPES = {f.name: f.type for f in fields(RunConfig)}


def _check_type(key, value):
    expected = _TYPES[key]
    ok = {
        "float": lambda v: isinstance(v, (int, float)) and not isinstance(v, bool),
        "int": lambda v: isinstance(v, int) and not isinstance(v, bool),
        "str": lambda v: isinstance(v, str),
        "list": lambda v: isinstance(v, list),
        "int | None": lambda v: v is None or (isinstance(v, int) and not isinstance(v, bool)),
        "str | None": lambda v: v is None or isinstance(v, str),
    }[expected](value)
    if not ok:
        raise ConfigError(f"config key {key!r}: expected {expected}, got {value!r}")


def load_config(path) -> RunConfig:
    """Read a JSON run configuration; unknown keys are rejected."""
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: malformed JSON ({exc})") from exc
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read config ({exc.strerror})") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: top level must be an object")
    for key, value in raw.items():
        if key not in _TYPES:
            raise ConfigError(f"unknown config key {key!r}")
        _check_type(key, value)
    return RunConfig(**raw)


def _float_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise ConfigError(f"bad value list {text!r}") from exc


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run configuration")
    common.add_argument("--seed", type=int)
    common.add_argument("--r", type=int, dest="r")
    common.add_argument("--snr-db", type=float, dest="snr_db")
    common.add_argument("--arch", choices=["rf", "bb"])
    common.add_argument("--channel", choices=["rays", "iid"])
    common.add_argument("--trials", type=int)
    common.add_argument("--threads", type=int)
    common.add_argument("--q", type=int, dest="q")
    common.add_argument("--adc-bits", type=int, dest="adc_bits")
    common.add_argument("--spacing", choices=["exact", "paper"])
    common.add_argument("--sigma-a-db", type=float, dest="sigma_a_db")
    common.add_argument("--sigma-p-rad", type=float, dest="sigma_p_rad")
    common.add_argument("--sigma-t-ps", type=float, dest="sigma_t_ps")
    common.add_argument("--output", "-o")

    parser = argparse.ArgumentParser(prog="ttdtrain", description="TTD single-shot beam training simulator")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("design", parents=[common], help="print delay/phase taps and subcarrier sets")
    sub.add_parser("simulate", parents=[common], help="RMSE at a single operating point")
    sw = sub.add_parser("sweep", parents=[common], help="RMSE sweep written as CSV")
    sw.add_argument("--sweep", choices=sorted(SWEEP_NAMES), dest="sweep")
    sw.add_argument("--values", help="comma-separated values (sigma_t in ps)")
    sw.add_argument("--values-ps", dest="values_ps", help="comma-separated delay sigmas in ps")
    hw = sub.add_parser("hwspec", parents=[common], help="delay-tap requirements table")
    hw.add_argument("--r-values", default="1,2,4", dest="r_values")
    hw.add_argument("--f-clk-ghz", type=float, default=4.0, dest="f_clk_ghz")
    return parser


def _resolve(args) -> RunConfig:
    rc = load_config(args.config) if args.config else RunConfig()
    for key in ("r", "snr_db", "arch", "channel", "trials", "threads", "q", "adc_bits", "spacing",
                "sigma_a_db", "sigma_p_rad", "sigma_t_ps", "output", "seed"):
        value = getattr(args, key, None)
        if value is not None:
            setattr(rc, key, value)
    if getattr(args, "sweep", None):
        rc.sweep = args.sweep
    if getattr(args, "values_ps", None):
        if rc.sweep not in (None, "sigma_t"):
            raise ConfigError("--values-ps only applies to --sweep sigma_t")
        rc.sweep = "sigma_t"
        rc.values = _float_list(args.values_ps)
    elif getattr(args, "values", None):
        rc.values = _float_list(args.values)
    if rc.seed is None:
        rc.seed = 0
    if rc.trials < 1:
        raise ConfigError("trials must be >= 1")
    if rc.threads < 1:
        raise ConfigError("threads must be >= 1")
    return rc


def cmd_design(rc: RunConfig, out) -> None:
    cfg = rc.system()
    taps = design_taps(cfg)
    bmap = beam_map(cfg)
    delta_tau, tau_max = hwspec.delay_spec(cfg)
    lines = [
        f"delta_tau_ns = {delta_tau * 1e9:g}",
        f"tau_max_ns = {tau_max * 1e9:g}",
        f"psi_rad = {taps.psi:.12g}",
        "",
        format_tap_table(taps),
        "direction subcarriers",
    ]
    for d, row in enumerate(bmap.sets, start=1):
        lines.append(f"{d:>9d} " + " ".join(str(m) for m in row))
    out.write("\n".join(lines) + "\n")


def cmd_simulate(rc: RunConfig, out) -> None:
    res = simulate(rc.scenario(), rc.trials, seed=rc.seed, threads=rc.threads)
    for name, col in (("super", 0), ("coarse", 1)):
        r = rmse(res[:, col] - res[:, 2])
        out.write(f"{name:>7}: rmse = {r:.6g} rad ({math.degrees(r):.6g} deg) over {rc.trials} trials\n")


def cmd_sweep(rc: RunConfig):
    if rc.sweep is None or not rc.values:
        raise ConfigError("sweep needs --sweep and --values (or 'sweep'/'values' in the config)")
    param = SWEEP_NAMES.get(rc.sweep)
    if param is None:
        raise ConfigError(f"unknown sweep {rc.sweep!r}; choose from {sorted(SWEEP_NAMES)}")
    values = rc.values
    if param is SweepParam.DELAY_SIGMA_S:
        values = [v * 1e-12 for v in values]
    elif param is SweepParam.DIVERSITY_R:
        if any(v != int(v) or v < 1 for v in values):
            raise ConfigError("diversity values must be positive integers")
        values = [int(v) for v in values]
        for v in values:
            rc.system().with_(r=v)
    if param in (SweepParam.GAIN_SIGMA_DB, SweepParam.PHASE_SIGMA_RAD, SweepParam.DELAY_SIGMA_S):
        if any(v < 0 for v in values):
            raise ConfigError("impairment sigmas must be non-negative")
    spec = SweepSpec(param=param, values=tuple(values), scenario=rc.scenario(), trials=rc.trials, seed=rc.seed)
    records = run_sweep(spec, threads=rc.threads)
    return records_to_csv(records), records


def cmd_hwspec(rc: RunConfig, r_values: str, f_clk_ghz: float) -> str:
    try:
        rs = [int(x) for x in r_values.split(",") if x.strip()]
    except ValueError as exc:
        raise ConfigError(f"bad --r-values {r_values!r}") from exc
    if f_clk_ghz <= 0:
        raise ConfigError("--f-clk-ghz must be positive")
    return hwspec.table(rc.system(), rs, f_clk=f_clk_ghz * 1e9)


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        rc = _resolve(args)
        if args.command == "sweep":
            text, records = cmd_sweep(rc)
            try:
                with open(rc.output, "w", encoding="utf-8", newline="") as fh:
                    fh.write(text)
            except OSError as exc:
                print(f"error: cannot write {rc.output}: {exc.strerror}", file=sys.stderr)
                return EXIT_IO
            for rec in records:
                print(f"{rec.param_name}={rec.param_value:g} {rec.algorithm:>6} {rec.architecture}: "
                      f"rmse {rec.rmse_rad:.6g} rad ({rec.rmse_deg:.4g} deg)")
            return EXIT_OK
        sink = io.StringIO()
        if args.command == "design":
            cmd_design(rc, sink)
        elif args.command == "simulate":
            cmd_simulate(rc, sink)
        elif args.command == "hwspec":
            sink.write(cmd_hwspec(rc, args.r_values, args.f_clk_ghz))
        text = sink.getvalue()
        if args.output:
            try:
                with open(args.output, "w", encoding="utf-8") as fh:
                    fh.write(text)
            except OSError as exc:
                print(f"error: cannot write {args.output}: {exc.strerror}", file=sys.stderr)
                return EXIT_IO
        else:
            sys.stdout.write(text)
        return EXIT_OK
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
