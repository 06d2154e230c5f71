"""
Run orchestration behind the management commands: load a config file, apply
overrides, validate, dispatch, and emit reports or CSV.
"""
import io
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional

import toml
from django.conf import settings
from django.db.models import TextChoices

from . import analytic, link, reports, simulator
from .analytic import ProtocolConfig
from .distributions import DistributionSpec
from .exceptions import ConfigurationError, ProtocolError
from .link import LinkConfig
from .renewal import derive_constants
from .serializers import RunConfigSerializer

logger = logging.getLogger(__name__)


class Command(TextChoices):
    ANALYZE = 'analyze', 'Analytic metrics'
    SIMULATE = 'simulate', 'Monte Carlo simulation'
    SWEEP = 'sweep', 'Threshold sweep to CSV'
    POWER = 'power', 'Transmit power sizing'


@dataclass
class RunSpec:
    command: Command
    config_path: Path
    output_path: Optional[Path] = None
    overrides: List[str] = field(default_factory=list)
    seed: Optional[int] = None
    cycles: Optional[int] = None


@dataclass
class RunConfig:
    a_spec: Optional[DistributionSpec]
    x_spec: Optional[DistributionSpec]
    protocol: Optional[ProtocolConfig]
    link: Optional[LinkConfig]
    seed: int
    cycles: int
    residual_mode: simulator.ResidualMode
    workers: int
    u_grid: Optional[List[float]]


def _defaults() -> dict:
    configured = getattr(settings, 'HARVESTDUTY', {})
    return {
        'DEFAULT_SEED': configured.get('DEFAULT_SEED', 0),
        'DEFAULT_CYCLES': configured.get('DEFAULT_CYCLES', simulator.DEFAULT_CYCLES),
        'SWEEP_WORKERS': configured.get('SWEEP_WORKERS', 1),
    }


def load_config(path: Path) -> dict:
    """Parse a TOML model config"""
    try:
        return toml.load(str(path))
    except (OSError, toml.TomlDecodeError) as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc}")


def _parse_scalar(raw: str):
    try:
        return toml.loads(f"value = {raw}")['value']
    except toml.TomlDecodeError:
        return raw


def apply_overrides(data: dict, overrides: List[str]) -> dict:
    """Apply 'section.key=value' overrides in place"""
    for override in overrides:
        key, sep, raw = override.partition('=')
        path = [part.strip() for part in key.split('.')]
        if not sep or len(path) < 2 or not all(path):
            raise ConfigurationError(f"override {override!r} is not of the form section.key=value")
        node = data
        for part in path[:-1]:
            child = node.setdefault(part, {})
            if not isinstance(child, dict):
                raise ConfigurationError(f"override {override!r}: {part} is not a section")
            node = child
        node[path[-1]] = _parse_scalar(raw.strip())
    return data


def _flatten_errors(errors, prefix='') -> List[str]:
    if isinstance(errors, dict):
        lines = []
        for key, value in errors.items():
            name = prefix if key == 'non_field_errors' else f"{prefix}.{key}".lstrip('.')
            lines.extend(_flatten_errors(value, name))
        return lines
    if isinstance(errors, list):
        return [line for item in errors for line in _flatten_errors(item, prefix)]
    return [f"{prefix}: {errors}" if prefix else str(errors)]


def resolve(spec: RunSpec) -> RunConfig:
    """Config file + overrides + CLI flags, validated"""
    data = apply_overrides(load_config(spec.config_path), spec.overrides)
    sim = data.setdefault('sim', {})
    if not isinstance(sim, dict):
        raise ConfigurationError("config key 'sim' must be a section")
    if spec.seed is not None:
        sim['seed'] = spec.seed
    if spec.cycles is not None:
        sim['cycles'] = spec.cycles

    serializer = RunConfigSerializer(data=data)
    if not serializer.is_valid():
        raise ConfigurationError('invalid config: ' + '; '.join(_flatten_errors(serializer.errors)))
    valid = serializer.validated_data
    sim = valid.get('sim', {})
    defaults = _defaults()
    return RunConfig(
        a_spec=valid.get('arrival'),
        x_spec=valid.get('packet'),
        protocol=valid.get('protocol'),
        link=valid.get('link'),
        seed=sim.get('seed', defaults['DEFAULT_SEED']),
        cycles=sim.get('cycles', defaults['DEFAULT_CYCLES']),
        residual_mode=simulator.ResidualMode(sim.get('residual_mode', simulator.ResidualMode.STATIONARY)),
        workers=sim.get('workers', defaults['SWEEP_WORKERS']),
        u_grid=sim.get('u_grid'),
    )


def _require(config: RunConfig, *sections: str):
    names = {'arrival': config.a_spec, 'packet': config.x_spec, 'protocol': config.protocol, 'link': config.link}
    missing = [name for name in sections if names[name] is None]
    if missing:
        raise ConfigurationError(f"config is missing section(s): {', '.join(missing)}")


def _sim_config(config: RunConfig) -> simulator.SimConfig:
    return simulator.SimConfig(
        protocol=config.protocol,
        a_spec=config.a_spec,
        x_spec=config.x_spec,
        cycles=config.cycles,
        seed=config.seed,
        residual_mode=config.residual_mode,
    )


def _emit(text: str, spec: RunSpec, stdout):
    if spec.output_path:
        with open(spec.output_path, 'w', encoding='utf-8', newline='') as handle:
            handle.write(text)
    else:
        stdout.write(text)


def execute(spec: RunSpec, stdout) -> None:
    """Run one command; raises ProtocolError subclasses on failure"""
    command = Command(spec.command)
    config = resolve(spec)
    logger.info(f"Running {command.value} with seed={config.seed}, cycles={config.cycles}")

    if command == Command.POWER:
        _require(config, 'link')
        power = link.transmit_power(config.link)
        rate = None
        if config.a_spec and config.x_spec and config.link.symbol_duration and power > 0:
            k = derive_constants(config.a_spec, config.x_spec)
            symbol_rate, rho, aux = link.symbol_rate(k, power, config.link.symbol_duration)
            rate = {'symbol_rate': symbol_rate, 'rho': rho, **aux}
        _emit(reports.format_power(power, rate) + '\n', spec, stdout)
        return

    _require(config, 'arrival', 'packet', 'protocol')
    if command == Command.ANALYZE:
        k = derive_constants(config.a_spec, config.x_spec)
        _emit(reports.format_metrics(analytic.analyze(k, config.protocol)) + '\n', spec, stdout)
    elif command == Command.SIMULATE:
        result = simulator.simulate(_sim_config(config))
        _emit(reports.format_sim_result(result) + '\n', spec, stdout)
    else:
        if not config.u_grid:
            raise ConfigurationError("sweep needs sim.u_grid")
        rows = simulator.sweep(_sim_config(config), config.u_grid, workers=config.workers)
        buffer = io.StringIO()
        reports.write_sweep_csv(rows, buffer)
        _emit(buffer.getvalue(), spec, stdout)


def run(spec: RunSpec, stdout=None, stderr=None) -> int:
    """Run one command and return its exit status"""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        execute(spec, stdout)
    except ProtocolError as exc:
        logger.error(f"{spec.command} failed: {exc}")
        stderr.write(f"error: {exc}\n")
        return exc.exit_code
    return 0
