"""
Seeded Monte Carlo simulation of the level-triggered harvest-then-consume
protocol.

Cycles run in fixed-size blocks over a single stream, so (config, seed)
fixes every output bit. Energy does not arrive while consuming: a cycle is a
harvest-only phase followed by a consume-only phase.
"""
import logging
import math
from dataclasses import dataclass, replace
from multiprocessing import Pool
from typing import Iterator, List, Optional, Sequence

import numpy as np
from django.db.models import TextChoices
from scipy import stats

from . import analytic
from .analytic import ESIMode, Metrics, ProtocolConfig
from .distributions import DistributionSpec, moments, sample, sample_residual
from .exceptions import ParameterDomainError
from .renewal import derive_constants
from .streams import RandomStream, make_stream, spawn_seeds

logger = logging.getLogger(__name__)

DEFAULT_CYCLES = 10_000
MIN_CYCLES = 100
CI_BATCHES = 100
BLOCK_SIZE = 1_000
# float64 cells in one (rows, width) draw; bounds peak memory for large thresholds
CELL_BUDGET = 2 ** 20


class ResidualMode(TextChoices):
    STATIONARY = 'stationary', 'Stationary residual A0'
    FRESH = 'fresh', 'Fresh start, A0 ~ A'


@dataclass(frozen=True)
class SimConfig:
    protocol: ProtocolConfig
    a_spec: DistributionSpec
    x_spec: DistributionSpec
    cycles: int = DEFAULT_CYCLES
    seed: int = 0
    residual_mode: ResidualMode = ResidualMode.STATIONARY

    def __post_init__(self):
        object.__setattr__(self, 'residual_mode', ResidualMode(self.residual_mode))
        if self.cycles < MIN_CYCLES:
            raise ParameterDomainError(f"cycles must be >= {MIN_CYCLES}, got {self.cycles}")
        if not 0 <= self.seed < 2 ** 64:
            raise ParameterDomainError(f"seed must be a 64-bit unsigned integer, got {self.seed}")


@dataclass(frozen=True)
class CycleRecord:
    tau_c: float
    tau_d: float
    energy_at_switch: float
    overshoot: Optional[float] = None
    outage: Optional[bool] = None


@dataclass
class CycleBatch:
    """Per-cycle realizations, one array entry per cycle"""
    tau_c: np.ndarray
    tau_d: np.ndarray
    energy_at_switch: np.ndarray
    overshoot: Optional[np.ndarray] = None
    outage: Optional[np.ndarray] = None
    discharged: Optional[np.ndarray] = None
    metrics: Optional[Metrics] = None

    def __len__(self):
        return len(self.tau_c)

    def records(self) -> Iterator[CycleRecord]:
        for i in range(len(self)):
            yield CycleRecord(
                tau_c=float(self.tau_c[i]),
                tau_d=float(self.tau_d[i]),
                energy_at_switch=float(self.energy_at_switch[i]),
                overshoot=None if self.overshoot is None else float(self.overshoot[i]),
                outage=None if self.outage is None else bool(self.outage[i]),
            )


@dataclass
class SimResult:
    mode: ESIMode
    rho_hat: float
    omega_hat: float
    mean_tau_c: float
    mean_tau_d: float
    outage_freq: Optional[float]
    ci_rho: float
    ci_omega: float
    seed: int
    cycles: int
    overshoot_mean: Optional[float] = None
    discharge_freq: Optional[float] = None


@dataclass
class SweepRow:
    u: float
    metrics: Metrics
    result: SimResult


def _width(expected: float, cv_sq: float) -> int:
    """Columns to draw so nearly every row completes without extension"""
    return int(math.ceil(expected + 4 * math.sqrt(expected * cv_sq) + 8))


def _packet_width(cfg: SimConfig, u: float) -> int:
    x = moments(cfg.x_spec)
    return _width(u / x.mean, x.variance / x.mean ** 2)


def _arrival_width(cfg: SimConfig, t_c: float) -> int:
    a = moments(cfg.a_spec)
    return _width(t_c / a.mean, a.variance / a.mean ** 2)


def _gaps(cfg: SimConfig, rng: RandomStream, shape) -> np.ndarray:
    gaps = sample(cfg.a_spec, rng, shape)
    if cfg.residual_mode == ResidualMode.STATIONARY:
        gaps[:, 0] = sample_residual(cfg.a_spec, rng, shape[0])
    return gaps


def _recharge_to_threshold(cfg: SimConfig, rng: RandomStream, rows: int, u: float, width: int):
    """First-passage time and energy when cumulative harvest reaches u"""
    energy = np.cumsum(sample(cfg.x_spec, rng, (rows, width)), axis=1)
    while not np.all(energy[:, -1] >= u):
        more = np.cumsum(sample(cfg.x_spec, rng, (rows, width)), axis=1) + energy[:, -1:]
        energy = np.hstack([energy, more])

    # at least one packet, so u = 0 still waits for an arrival
    crossing = np.argmax(energy >= u, axis=1)
    arrivals = np.cumsum(_gaps(cfg, rng, (rows, int(crossing.max()) + 1)), axis=1)
    index = np.arange(rows)
    return arrivals[index, crossing], energy[index, crossing]


def _harvest_for(cfg: SimConfig, rng: RandomStream, rows: int, t_c: float, width: int) -> np.ndarray:
    """Energy U(t_c) collected over a fixed harvest duration"""
    arrivals = np.cumsum(_gaps(cfg, rng, (rows, width)), axis=1)
    while not np.all(arrivals[:, -1] > t_c):
        more = np.cumsum(sample(cfg.a_spec, rng, (rows, width)), axis=1) + arrivals[:, -1:]
        arrivals = np.hstack([arrivals, more])
    packets = sample(cfg.x_spec, rng, arrivals.shape)
    return np.where(arrivals <= t_c, packets, 0.0).sum(axis=1)


def block_rows(width: int) -> int:
    """Cycles per block so one (rows, width) draw stays within CELL_BUDGET"""
    return max(1, min(BLOCK_SIZE, CELL_BUDGET // width))


def _blocks(cycles: int, width: int):
    size = block_rows(width)
    done = 0
    while done < cycles:
        rows = min(size, cycles - done)
        yield rows
        done += rows


def _require_mode(cfg: SimConfig, *modes: ESIMode):
    if cfg.protocol.mode not in modes:
        raise ParameterDomainError(
            f"configured mode {cfg.protocol.mode.value} does not match {', '.join(m.value for m in modes)}"
        )


def run_cycles(cfg: SimConfig) -> CycleBatch:
    """Simulate every cycle of ``cfg`` and keep the per-cycle realizations"""
    protocol = cfg.protocol
    rng = make_stream(cfg.seed)
    k = derive_constants(cfg.a_spec, cfg.x_spec)
    logger.info(
        f"Simulating {protocol.mode.value}: {cfg.cycles} cycles, seed={cfg.seed}, "
        f"residual={cfg.residual_mode.value}, A={cfg.a_spec}, X={cfg.x_spec}"
    )

    if protocol.mode == ESIMode.TWO_BIT:
        tau_c, energy = [], []
        width = _packet_width(cfg, protocol.u)
        for rows in _blocks(cfg.cycles, width):
            block_tau_c, block_energy = _recharge_to_threshold(cfg, rng, rows, protocol.u, width)
            tau_c.append(block_tau_c)
            energy.append(block_energy)
        energy = np.concatenate(energy)
        return CycleBatch(
            tau_c=np.concatenate(tau_c),
            tau_d=energy / protocol.p,
            energy_at_switch=energy,
            overshoot=energy - protocol.u,
        )

    if protocol.mode == ESIMode.ONE_BIT:
        metrics = analytic.one_bit_metrics(k, protocol.u, protocol.p, protocol.theta1)
        threshold = protocol.u
    elif protocol.mode == ESIMode.ZERO_BIT:
        metrics = analytic.zero_bit_duty_cycle(k, protocol.p, protocol.T, protocol.theta1)
        threshold = metrics.aux['consumed_energy']
    else:
        metrics = analytic.zero_bit_discharge_metrics(k, protocol.u, protocol.p, protocol.theta1, protocol.theta3)
        threshold = protocol.u

    t_c = metrics.t_c
    width = _arrival_width(cfg, t_c)
    energy = np.concatenate([_harvest_for(cfg, rng, rows, t_c, width) for rows in _blocks(cfg.cycles, width)])
    batch = CycleBatch(
        tau_c=np.full(cfg.cycles, t_c),
        tau_d=energy / protocol.p,
        energy_at_switch=energy,
        outage=energy <= threshold,
        metrics=metrics,
    )
    if protocol.mode != ESIMode.ONE_BIT:
        period = 1 / metrics.omega
        batch.discharged = batch.tau_d <= period - t_c
        # blind controller stays on for the whole consume phase
        batch.tau_d = np.full(cfg.cycles, period - t_c)
    return batch


def _batch_half_widths(tau_c: np.ndarray, tau_d: np.ndarray):
    """95% batch-means half-widths of the ratio estimators for rho and omega"""
    rho_batches, omega_batches = [], []
    for index in np.array_split(np.arange(len(tau_c)), CI_BATCHES):
        total = tau_c[index].sum() + tau_d[index].sum()
        rho_batches.append(tau_d[index].sum() / total)
        omega_batches.append(len(index) / total)
    scale = stats.t.ppf(0.975, CI_BATCHES - 1) / math.sqrt(CI_BATCHES)
    return (
        float(scale * np.std(rho_batches, ddof=1)),
        float(scale * np.std(omega_batches, ddof=1)),
    )


def summarize(cfg: SimConfig, batch: CycleBatch) -> SimResult:
    """Ratio-of-sums estimators of rho = E[tau_d]/E[T] and omega = 1/E[T]"""
    total_c, total_d = float(batch.tau_c.sum()), float(batch.tau_d.sum())
    if cfg.protocol.mode in (ESIMode.ZERO_BIT, ESIMode.ZERO_BIT_DISCHARGE):
        # deterministic split of a fixed period
        rho_hat, omega_hat = batch.metrics.rho, batch.metrics.omega
        ci_rho = ci_omega = 0.0
    else:
        rho_hat = total_d / (total_c + total_d)
        omega_hat = len(batch) / (total_c + total_d)
        ci_rho, ci_omega = _batch_half_widths(batch.tau_c, batch.tau_d)

    result = SimResult(
        mode=cfg.protocol.mode,
        rho_hat=rho_hat,
        omega_hat=omega_hat,
        mean_tau_c=total_c / len(batch),
        mean_tau_d=total_d / len(batch),
        outage_freq=None if batch.outage is None else float(batch.outage.mean()),
        ci_rho=ci_rho,
        ci_omega=ci_omega,
        seed=cfg.seed,
        cycles=len(batch),
        overshoot_mean=None if batch.overshoot is None else float(batch.overshoot.mean()),
        discharge_freq=None if batch.discharged is None else float(batch.discharged.mean()),
    )
    logger.debug(f"Simulation result: {result}")
    return result


def simulate_two_bit(cfg: SimConfig) -> SimResult:
    _require_mode(cfg, ESIMode.TWO_BIT)
    return summarize(cfg, run_cycles(cfg))


def simulate_one_bit(cfg: SimConfig) -> SimResult:
    _require_mode(cfg, ESIMode.ONE_BIT)
    return summarize(cfg, run_cycles(cfg))


def simulate_zero_bit(cfg: SimConfig) -> SimResult:
    _require_mode(cfg, ESIMode.ZERO_BIT, ESIMode.ZERO_BIT_DISCHARGE)
    return summarize(cfg, run_cycles(cfg))


def simulate(cfg: SimConfig) -> SimResult:
    """Dispatch on the configured ESI mode"""
    return summarize(cfg, run_cycles(cfg))


def _sweep_row(cfg: SimConfig) -> SweepRow:
    k = derive_constants(cfg.a_spec, cfg.x_spec)
    return SweepRow(u=cfg.protocol.u, metrics=analytic.analyze(k, cfg.protocol), result=simulate(cfg))


def sweep(base: SimConfig, u_grid: Sequence[float], workers: int = 1) -> List[SweepRow]:
    """Analytic and simulated metrics for each threshold, one derived seed per row"""
    grid = [float(u) for u in u_grid]
    if not grid:
        raise ParameterDomainError("sweep grid is empty")
    if any(later <= earlier for earlier, later in zip(grid, grid[1:])):
        raise ParameterDomainError(f"sweep grid must be strictly increasing, got {grid}")
    if base.protocol.mode == ESIMode.ZERO_BIT:
        raise ParameterDomainError("zero_bit has no threshold to sweep; vary protocol.T instead")

    configs = [
        replace(base, protocol=replace(base.protocol, u=u), seed=seed)
        for u, seed in zip(grid, spawn_seeds(base.seed, len(grid)))
    ]
    logger.info(f"Sweeping {len(grid)} thresholds from base seed {base.seed} with {workers} worker(s)")
    if workers > 1:
        with Pool(processes=workers) as pool:
            return pool.map(_sweep_row, configs)
    return [_sweep_row(cfg) for cfg in configs]
