"""
Transmit-power sizing from an SNR-outage target, and the symbol rate it
implies.

Rayleigh fading is an exponential power gain, so fading reuses the
distribution families instead of a separate taxonomy.
"""
import logging
from dataclasses import dataclass
from typing import Dict, Optional, Tuple

from . import analytic
from .distributions import DistributionSpec, cdf, quantile
from .exceptions import InfinitePowerError, ParameterDomainError
from .renewal import RenewalConstants

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LinkConfig:
    zeta: float
    noise: float
    fading: DistributionSpec
    theta2: float
    symbol_duration: Optional[float] = None

    def __post_init__(self):
        if self.zeta < 0:
            raise ParameterDomainError(f"SNR threshold zeta must be >= 0, got {self.zeta}")
        if self.noise <= 0:
            raise ParameterDomainError(f"noise power must be > 0, got {self.noise}")
        if not 0 < self.theta2 < 1:
            raise ParameterDomainError(f"theta2 must lie in (0, 1), got {self.theta2}")
        if self.symbol_duration is not None and self.symbol_duration <= 0:
            raise ParameterDomainError(f"symbol_duration must be > 0, got {self.symbol_duration}")


def transmit_power(cfg: LinkConfig) -> float:
    """Constant power p with P(g p / N <= zeta) = theta2"""
    gain = quantile(cfg.fading, cfg.theta2)
    if gain <= 0:
        raise InfinitePowerError(
            f"fading gain quantile at theta2={cfg.theta2:g} is {gain:g}; no finite power meets the SNR target"
        )
    p = cfg.zeta * cfg.noise / gain
    logger.debug(f"Transmit power {p:g} for zeta={cfg.zeta:g}, N={cfg.noise:g}, fading={cfg.fading}")
    return p


def outage_probability(cfg: LinkConfig, p: float) -> float:
    """SNR-outage probability F_G(zeta N / p) at power p"""
    if p <= 0:
        raise ParameterDomainError(f"power must be > 0, got {p}")
    return cdf(cfg.fading, cfg.zeta * cfg.noise / p)


def symbol_rate(k: RenewalConstants, p: float, symbol_duration: float) -> Tuple[float, float, Dict[str, float]]:
    """
    Large-threshold symbol rate rho / T_s for symbol energy u = p T_s.

    Returns (rate, rho, aux); aux carries the exact two-bit cycle speed at
    that u so the asymptote can be compared against it.
    """
    if p <= 0 or symbol_duration <= 0:
        raise ParameterDomainError(f"symbol rate needs p > 0 and T_s > 0, got p={p}, T_s={symbol_duration}")
    u = p * symbol_duration
    rho = analytic.asymptotic_duty_cycle(k, p)
    exact = analytic.two_bit_metrics(k, u, p)
    return rho / symbol_duration, rho, {'u': u, 'omega_two_bit': exact.omega, 'rho_two_bit': exact.rho}
