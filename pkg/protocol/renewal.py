"""
Renewal-theoretic constants and recharge/discharge time distributions.

Energy, time and power are unitless reals; callers keep units consistent.
The recharge moments keep their constant terms C1 and C2, so they reduce to
the plain large-u asymptotes automatically.
"""
import logging
import math
from dataclasses import dataclass
from typing import Tuple

from .distributions import DistributionSpec, moments, std_normal_cdf
from .exceptions import DegenerateModelError, ParameterDomainError

logger = logging.getLogger(__name__)

# Below this multiple of the mean packet size the normal approximation of
# the recharge time is a heuristic at best
LARGE_U_FACTOR = 5.0


@dataclass(frozen=True)
class RenewalConstants:
    lam: float
    x_bar: float
    var_a: float
    var_x: float
    mu_a3: float
    gamma_sq: float
    c1: float
    c2: float
    c3: float

    @property
    def gamma(self) -> float:
        return math.sqrt(self.gamma_sq)

    @property
    def harvest_rate(self) -> float:
        """Mean harvested power lambda * X_bar"""
        return self.lam * self.x_bar


def derive_constants(a_spec: DistributionSpec, x_spec: DistributionSpec) -> RenewalConstants:
    """Constants of the recharge-time asymptotics from the exact moments of A and X"""
    a, x = moments(a_spec), moments(x_spec)
    if a.mean <= 0:
        raise DegenerateModelError(f"arrival distribution {a_spec} has zero mean")
    if x.mean <= 0:
        raise DegenerateModelError(f"packet distribution {x_spec} has zero mean")

    lam = 1 / a.mean
    x_bar = x.mean
    gamma_sq = x.variance / lam ** 2 + a.variance * x_bar ** 2
    c1 = lam * gamma_sq / (2 * x_bar ** 2)
    c2 = a.third_moment / (3 * a.mean) - ((a.mean ** 2 + a.variance) / (2 * a.mean)) ** 2
    c3 = (x.variance + x_bar ** 2) / (2 * x_bar)
    return RenewalConstants(
        lam=lam, x_bar=x_bar, var_a=a.variance, var_x=x.variance, mu_a3=a.third_moment,
        gamma_sq=gamma_sq, c1=c1, c2=c2, c3=c3,
    )


def large_u_warning(k: RenewalConstants, u: float) -> bool:
    """Log when u is too small for the normal recharge-time approximation"""
    if u < LARGE_U_FACTOR * k.x_bar:
        logger.warning(
            f"Threshold u={u:g} is below {LARGE_U_FACTOR:g} mean packet sizes ({k.x_bar:g}); "
            f"recharge-time asymptotics may be inaccurate"
        )
        return True
    return False


def recharge_moments(k: RenewalConstants, u: float) -> Tuple[float, float]:
    """Mean and variance of the recharge time tau_c for threshold u"""
    if u < 0:
        raise ParameterDomainError(f"threshold u must be >= 0, got {u}")
    mean = k.c1 + u / k.harvest_rate
    variance = k.c2 + k.gamma_sq * u / k.x_bar ** 3
    return mean, variance


def recharge_time_cdf(k: RenewalConstants, u: float, t: float) -> float:
    """P(tau_c <= t) under the central limit approximation"""
    large_u_warning(k, u)
    mean, variance = recharge_moments(k, u)
    if variance <= 0:
        return 1.0 if t >= mean else 0.0
    return std_normal_cdf((t - mean) / math.sqrt(variance))


def discharge_time_cdf(k: RenewalConstants, t_c: float, p: float, t_d: float) -> float:
    """P(tau_d <= t_d) after harvesting for a fixed t_c at consume power p"""
    if t_c <= 0 or p <= 0:
        raise ParameterDomainError(f"discharge CDF needs t_c > 0 and p > 0, got t_c={t_c}, p={p}")
    centre = p * t_d - k.harvest_rate * t_c
    if k.gamma_sq == 0:
        return 1.0 if centre >= 0 else 0.0
    return std_normal_cdf(centre / (k.gamma * k.lam ** 1.5 * math.sqrt(t_c)))


def one_bit_cycle_cdf(k: RenewalConstants, t_c: float, p: float, t: float) -> float:
    """P(T <= t) for the one-bit cycle T = t_c + tau_d"""
    return discharge_time_cdf(k, t_c, p, t - t_c)


def overshoot_mean(k: RenewalConstants) -> float:
    """Mean overshoot V of the threshold at the crossing instant"""
    return k.c3


def mean_energy_at_crossing(k: RenewalConstants, u: float) -> float:
    """E[U(tau_c)] = u + C3"""
    return u + k.c3
