"""
Human-readable reports and the sweep CSV.

Reports use 6 significant digits. The CSV keeps full precision (shortest
round-trip repr), '.' decimals and '\\n' line endings whatever the locale.
"""
import csv
from typing import Dict, Iterable, Optional

from .analytic import Metrics
from .simulator import SimResult, SweepRow

SWEEP_HEADER = [
    'u', 'rho_analytic', 'omega_analytic', 'rho_sim', 'rho_ci',
    'omega_sim', 'omega_ci', 'outage_freq', 'seed',
]


def _fmt(value: Optional[float]) -> str:
    return 'n/a' if value is None else f"{value:.6g}"


def _csv_value(value) -> str:
    if value is None:
        return ''
    if isinstance(value, int):
        return str(value)
    return repr(float(value))


def format_metrics(metrics: Metrics) -> str:
    lines = [
        f"mode: {metrics.mode.value}",
        f"rho: {_fmt(metrics.rho)}",
        f"omega: {_fmt(metrics.omega)}",
    ]
    if metrics.t_c is not None:
        lines.append(f"t_c: {_fmt(metrics.t_c)}")
    lines.extend(f"{name}: {_fmt(value)}" for name, value in metrics.aux.items())
    return '\n'.join(lines)


def format_sim_result(result: SimResult) -> str:
    lines = [
        f"mode: {result.mode.value}",
        f"rho_hat: {_fmt(result.rho_hat)} +/- {_fmt(result.ci_rho)}",
        f"omega_hat: {_fmt(result.omega_hat)} +/- {_fmt(result.ci_omega)}",
        f"mean_tau_c: {_fmt(result.mean_tau_c)}",
        f"mean_tau_d: {_fmt(result.mean_tau_d)}",
        f"outage_freq: {_fmt(result.outage_freq)}",
    ]
    if result.overshoot_mean is not None:
        lines.append(f"overshoot_mean: {_fmt(result.overshoot_mean)}")
    if result.discharge_freq is not None:
        lines.append(f"discharge_freq: {_fmt(result.discharge_freq)}")
    lines.append(f"cycles: {result.cycles}")
    lines.append(f"seed: {result.seed}")
    return '\n'.join(lines)


def format_power(power: float, rate: Optional[Dict[str, float]] = None) -> str:
    lines = [f"transmit_power: {_fmt(power)}"]
    if rate:
        lines.extend(f"{name}: {_fmt(value)}" for name, value in rate.items())
    return '\n'.join(lines)


def write_sweep_csv(rows: Iterable[SweepRow], stream) -> None:
    writer = csv.writer(stream, lineterminator='\n')
    writer.writerow(SWEEP_HEADER)
    for row in rows:
        writer.writerow([_csv_value(value) for value in (
            row.u,
            row.metrics.rho,
            row.metrics.omega,
            row.result.rho_hat,
            row.result.ci_rho,
            row.result.omega_hat,
            row.result.ci_omega,
            row.result.outage_freq,
            row.result.seed,
        )])
