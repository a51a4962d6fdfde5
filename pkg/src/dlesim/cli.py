"""Command-line front end: exact / perturb / compare / sweep pipelines.

Configuration is a flat JSON document with ordinary frequencies in GHz;
the single GHz -> rad/ns conversion (factor 2*pi) happens at config load
and everything downstream works in angular units.  All commands are
deterministic: the same config produces byte-identical CSV output.

Exit codes: 0 success, 2 config error, 3 resonance guard tripped (partial
output written), 4 I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields, replace
from typing import Optional, Sequence

import numpy as np

from .closedform2q import ClosedFormParams, ResonanceError, closedform_state
from .engine import run_to_order
from .model import TWO_PI, CouplingSchedule, SystemParams
from .propagator import propagate, sample_times

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_GUARD = 3
EXIT_IO = 4


class ConfigError(ValueError):
    """Invalid or malformed run configuration; message names the field."""


@dataclass(frozen=True)
class RunConfig:
    """Flat run configuration; frequencies in GHz, times in ns."""

    omega0_ghz: float = 5.439
    omega_c_ghz: float = 4.343
    g_eff_ghz: float = 0.050
    switch_ratio: Optional[float] = None
    switch_freq_ghz: Optional[float] = None
    n_qubits: int = 2
    n_max: Optional[int] = None
    order: int = 2
    t_final_ns: float = 10.0
    sample_dt_ns: float = 0.01
    qubit_index: int = 0

    def __post_init__(self):
        if self.switch_ratio is not None and self.switch_freq_ghz is not None:
            raise ConfigError(
                "switch_ratio and switch_freq_ghz are mutually exclusive"
            )
        for name in ("omega0_ghz", "omega_c_ghz"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be > 0, got {getattr(self, name)}")
        if self.g_eff_ghz < 0:
            raise ConfigError(f"g_eff_ghz must be >= 0, got {self.g_eff_ghz}")
        if self.switch_ratio is not None and self.switch_ratio <= 0:
            raise ConfigError(f"switch_ratio must be > 0, got {self.switch_ratio}")
        if self.switch_freq_ghz is not None and self.switch_freq_ghz <= 0:
            raise ConfigError(
                f"switch_freq_ghz must be > 0, got {self.switch_freq_ghz}"
            )
        if self.n_qubits < 1:
            raise ConfigError(f"n_qubits must be >= 1, got {self.n_qubits}")
        if self.n_max is not None and self.n_max < 0:
            raise ConfigError(f"n_max must be >= 0, got {self.n_max}")
        if not 0 <= self.order <= 4:
            raise ConfigError(f"order must be in [0, 4], got {self.order}")
        if self.t_final_ns <= 0:
            raise ConfigError(f"t_final_ns must be > 0, got {self.t_final_ns}")
        if self.sample_dt_ns <= 0:
            raise ConfigError(f"sample_dt_ns must be > 0, got {self.sample_dt_ns}")
        if not 0 <= self.qubit_index < self.n_qubits:
            raise ConfigError(
                f"qubit_index must be in [0, {self.n_qubits - 1}], "
                f"got {self.qubit_index}"
            )

    @property
    def omega0(self) -> float:
        return TWO_PI * self.omega0_ghz

    @property
    def omega_c(self) -> float:
        return TWO_PI * self.omega_c_ghz

    @property
    def g_eff(self) -> float:
        return TWO_PI * self.g_eff_ghz

    @property
    def switching_frequency(self) -> float:
        if self.switch_freq_ghz is not None:
            return TWO_PI * self.switch_freq_ghz
        ratio = self.switch_ratio if self.switch_ratio is not None else 20.0
        return ratio * self.omega0

    def resolved_n_max(self, command: str) -> int:
        """Photon cutoff: explicit config value, or engine/propagator defaults."""
        if self.n_max is not None:
            return self.n_max
        if command == "perturb":
            return self.order
        return max(2, self.order)

    def system_params(self, command: str) -> SystemParams:
        return SystemParams(
            omega0=self.omega0,
            omega_c=self.omega_c,
            g_eff=self.g_eff,
            n_qubits=self.n_qubits,
            n_max=self.resolved_n_max(command),
        )

    def coupling_schedule(self) -> CouplingSchedule:
        return CouplingSchedule.from_switching_frequency(
            self.g_eff, self.switching_frequency
        )


_CONFIG_KEYS = {f.name for f in fields(RunConfig)}


def load_config(path: Optional[str], overrides: Optional[dict] = None) -> RunConfig:
    """Read a flat JSON config file and apply command-line overrides."""
    data: dict = {}
    if path is not None:
        with open(path, "r", encoding="utf-8") as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"config file {path} is not valid JSON: {exc}")
    if not isinstance(data, dict):
        raise ConfigError("config file must contain a flat JSON object")
    unknown = sorted(set(data) - _CONFIG_KEYS)
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    if overrides:
        if "switch_ratio" in overrides and overrides["switch_ratio"] is not None:
            data.pop("switch_freq_ghz", None)
        data.update({k: v for k, v in overrides.items() if v is not None})
    try:
        return RunConfig(**data)
    except TypeError as exc:
        raise ConfigError(str(exc))


def _format(value: Optional[float]) -> str:
    return "" if value is None else repr(float(value))


def write_csv(path: str, header: Sequence[str], rows: Sequence[Sequence]) -> None:
    lines = [",".join(header)]
    lines.extend(",".join(_format(v) for v in row) for row in rows)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def cmd_exact(config: RunConfig, out_path: str) -> int:
    """Exact propagation; columns t_ns, p_excite, photon_exp, norm."""
    params = config.system_params("exact")
    traj = propagate(
        params, config.coupling_schedule(), config.t_final_ns, config.sample_dt_ns
    )
    p_exc = traj.excitation_probabilities(config.qubit_index)
    photons = traj.photon_expectations()
    norms = traj.norms()
    rows = list(zip(traj.times, p_exc, photons, norms))
    write_csv(out_path, ("t_ns", "p_excite", "photon_exp", "norm"), rows)
    return EXIT_OK


def cmd_perturb(config: RunConfig, out_path: str) -> int:
    """Perturbative pipeline; columns t_ns, p_excite, norm_truncated."""
    params = config.system_params("perturb")
    solution = run_to_order(
        params, config.coupling_schedule(), config.order, config.t_final_ns
    )
    times = sample_times(config.t_final_ns, config.sample_dt_ns)
    rows = []
    for t in times:
        amps = solution.amplitudes(float(t))
        weights = np.abs(amps) ** 2
        mask = solution.space.bit_table[:, config.qubit_index].astype(bool)
        rows.append((t, float(weights[mask].sum()), float(np.sqrt(weights.sum()))))
    write_csv(out_path, ("t_ns", "p_excite", "norm_truncated"), rows)
    return EXIT_OK


def _closedform_column(
    config: RunConfig, times: np.ndarray
) -> tuple[Optional[np.ndarray], bool]:
    """Closed-form probabilities when the oracle applies, else (None, guard_hit)."""
    eligible = (
        config.n_qubits == 2
        and config.resolved_n_max("compare") >= 1
        and config.order >= 2
    )
    if not eligible:
        return None, False
    cf_params = ClosedFormParams(
        omega0=config.omega0,
        omega_c=config.omega_c,
        g_eff=config.g_eff,
        t_period=TWO_PI / config.switching_frequency,
    )
    try:
        column = np.array(
            [
                closedform_state(float(t), cf_params).excitation_probability(
                    config.qubit_index
                )
                for t in times
            ]
        )
    except ResonanceError as exc:
        print(f"closed-form column skipped: {exc}", file=sys.stderr)
        return None, True
    return column, False


def cmd_compare(config: RunConfig, out_path: str) -> int:
    """Exact vs perturbative vs closed form; summary of sup and RMS differences."""
    params = config.system_params("compare")
    schedule = config.coupling_schedule()
    traj = propagate(params, schedule, config.t_final_ns, config.sample_dt_ns)
    p_exact = traj.excitation_probabilities(config.qubit_index)
    solution = run_to_order(params, schedule, config.order, config.t_final_ns)
    p_pert = np.array(
        [
            solution.excitation_probability(config.qubit_index, float(t))
            for t in traj.times
        ]
    )
    p_cf, guard_hit = _closedform_column(config, traj.times)

    diff_pert = np.abs(p_exact - p_pert)
    rows = []
    for i, t in enumerate(traj.times):
        if p_cf is None:
            rows.append((t, p_exact[i], p_pert[i], None, diff_pert[i], None))
        else:
            rows.append(
                (
                    t,
                    p_exact[i],
                    p_pert[i],
                    p_cf[i],
                    diff_pert[i],
                    abs(p_exact[i] - p_cf[i]),
                )
            )
    write_csv(
        out_path,
        ("t_ns", "p_exact", "p_pert", "p_closedform", "abs_diff_pert", "abs_diff_cf"),
        rows,
    )
    sup = float(diff_pert.max())
    rms = float(np.sqrt(np.mean(diff_pert**2)))
    summary = f"sup|p_exact - p_pert| = {sup:.6e}, rms = {rms:.6e}"
    if p_cf is not None:
        diff_cf = np.abs(p_exact - p_cf)
        summary += (
            f"; sup|p_exact - p_closedform| = {float(diff_cf.max()):.6e}, "
            f"rms = {float(np.sqrt(np.mean(diff_cf**2))):.6e}"
        )
    print(summary)
    return EXIT_GUARD if guard_hit else EXIT_OK


def _sweep_point(args: tuple[RunConfig, float]) -> tuple[float, float, float]:
    """One sweep row: (ratio, sup |p_exact - p_pert|, max p_pert)."""
    config, ratio = args
    point = replace(config, switch_ratio=ratio, switch_freq_ghz=None)
    params = point.system_params("sweep")
    schedule = point.coupling_schedule()
    traj = propagate(params, schedule, point.t_final_ns, point.sample_dt_ns)
    p_exact = traj.excitation_probabilities(point.qubit_index)
    solution = run_to_order(params, schedule, point.order, point.t_final_ns)
    p_pert = np.array(
        [
            solution.excitation_probability(point.qubit_index, float(t))
            for t in traj.times
        ]
    )
    return (
        ratio,
        float(np.abs(p_exact - p_pert).max()),
        float(p_pert.max()),
    )


def cmd_sweep(
    config: RunConfig,
    out_path: str,
    ratio_min: float,
    ratio_max: float,
    points: int,
    max_workers: Optional[int] = None,
) -> int:
    """Sweep the switching ratio; rows computed independently, sorted by ratio."""
    if not 0 < ratio_min < ratio_max:
        raise ConfigError(
            f"need 0 < ratio_min < ratio_max, got {ratio_min}, {ratio_max}"
        )
    if points < 2:
        raise ConfigError(f"points must be >= 2, got {points}")
    ratios = [
        ratio_min + (ratio_max - ratio_min) * i / (points - 1) for i in range(points)
    ]
    tasks = [(config, r) for r in ratios]
    if max_workers == 1 or len(tasks) == 1:
        results = [_sweep_point(task) for task in tasks]
    else:
        with ProcessPoolExecutor(max_workers=max_workers) as pool:
            results = list(pool.map(_sweep_point, tasks))
    results.sort(key=lambda row: row[0])
    write_csv(out_path, ("switch_ratio", "sup_abs_diff", "max_p_pert"), results)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dlesim",
        description=(
            "Simulate N qubits coupled to a resonator with periodically "
            "switched coupling beyond the rotating-wave approximation."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("exact", "exact piecewise propagation"),
        ("perturb", "order-by-order perturbative pipeline"),
        ("compare", "exact vs perturbative vs closed form"),
        ("sweep", "switching-ratio sweep of the exact/perturbative difference"),
    ):
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("--config", help="flat JSON config file")
        cmd.add_argument("--out", required=True, help="output CSV path")
        cmd.add_argument("--switch-ratio", type=float, default=None)
        cmd.add_argument("--order", type=int, default=None)
        cmd.add_argument("--t-final-ns", type=float, default=None)
        cmd.add_argument("--nmax", type=int, default=None)
        if name == "sweep":
            cmd.add_argument("--points", type=int, default=21)
            cmd.add_argument("--ratio-min", type=float, default=4.0)
            cmd.add_argument("--ratio-max", type=float, default=24.0)
            cmd.add_argument("--workers", type=int, default=None)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    overrides = {
        "switch_ratio": args.switch_ratio,
        "order": args.order,
        "t_final_ns": args.t_final_ns,
        "n_max": args.nmax,
    }
    try:
        config = load_config(args.config, overrides)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    try:
        if args.command == "exact":
            return cmd_exact(config, args.out)
        if args.command == "perturb":
            return cmd_perturb(config, args.out)
        if args.command == "compare":
            return cmd_compare(config, args.out)
        return cmd_sweep(
            config,
            args.out,
            ratio_min=args.ratio_min,
            ratio_max=args.ratio_max,
            points=args.points,
            max_workers=args.workers,
        )
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
