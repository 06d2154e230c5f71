"""
Closed-form duty cycle and cycle speed of the level-triggered
harvest-then-consume protocol under two-bit, one-bit and zero-bit energy
state information.

Zero-bit feasibility note: the quadratic f(T) = K T^2 + L T + M is derived
here by clearing T^2 from (a + d)^2 > b + c, which gives
L = 2 a C1 - p gamma^2 z^2 / X_bar^3. The coefficient as commonly printed,
2 a C1 + p z^2 / X_bar^3, lacks the gamma^2 factor and has the opposite sign
on its second term; it is reported as ``L_printed`` for comparison only.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from django.db.models import TextChoices

from .distributions import std_normal_quantile
from .exceptions import InfeasibleParameterError, NoSolutionError, ParameterDomainError
from .renewal import RenewalConstants, large_u_warning, mean_energy_at_crossing, recharge_moments

logger = logging.getLogger(__name__)

RESIDUAL_TOLERANCE = 1e-9


class ESIMode(TextChoices):
    TWO_BIT = 'two_bit', 'Two-bit ESI'
    ONE_BIT = 'one_bit', 'One-bit ESI'
    ZERO_BIT = 'zero_bit', 'Zero-bit ESI'
    ZERO_BIT_DISCHARGE = 'zero_bit_discharge', 'Zero-bit ESI with discharge target'


def _check_probability(name: str, value: float):
    if not 0 < value < 1:
        raise ParameterDomainError(f"{name} must lie in (0, 1), got {value}")


@dataclass(frozen=True)
class ProtocolConfig:
    mode: ESIMode
    p: float
    u: float = 0.0
    theta1: float = 0.1
    theta3: float = 0.9
    T: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, 'mode', ESIMode(self.mode))
        if self.u < 0:
            raise ParameterDomainError(f"threshold u must be >= 0, got {self.u}")
        if self.p <= 0:
            raise ParameterDomainError(f"consume power p must be > 0, got {self.p}")
        _check_probability('theta1', self.theta1)
        _check_probability('theta3', self.theta3)
        if self.mode == ESIMode.ZERO_BIT and (self.T is None or self.T <= 0):
            raise ParameterDomainError(f"zero_bit mode needs a cycle period T > 0, got {self.T}")


@dataclass
class Metrics:
    mode: ESIMode
    rho: float
    omega: float
    t_c: Optional[float] = None
    aux: Dict[str, float] = field(default_factory=dict)


@dataclass(frozen=True)
class ZeroBitCoefficients:
    a: float
    b: float
    c: float
    d: float
    K: float
    L: float
    M: float
    t_c_min: float
    T_plus: float
    # sign of Phi^-1(1 - theta1); negative once theta1 > 0.5
    root_sign: float = 1.0

    def f(self, T: float) -> float:
        return self.K * T * T + self.L * T + self.M


@dataclass(frozen=True)
class FeasibilityReport:
    T: float
    t_c_min: float
    T_plus: float
    positive_duty: bool
    below_one: bool

    @property
    def feasible(self) -> bool:
        return self.positive_duty and self.below_one

    @property
    def violated(self) -> Optional[str]:
        if not self.positive_duty:
            return 't_c_min'
        if not self.below_one:
            return 'T_plus'
        return None


def asymptotic_duty_cycle(k: RenewalConstants, p: float) -> float:
    """Large-threshold duty cycle shared by every ESI mode"""
    return k.harvest_rate / (k.harvest_rate + p)


def asymptotic_cycle_speed(k: RenewalConstants, p: float, u: float) -> float:
    """omega ~ p rho / u for large u"""
    return p * asymptotic_duty_cycle(k, p) / u


def two_bit_bounds(k: RenewalConstants, p: float) -> Tuple[float, float]:
    """Large-u duty cycle limit and the fastest attainable cycle speed"""
    if p <= 0:
        raise ParameterDomainError(f"consume power p must be > 0, got {p}")
    return asymptotic_duty_cycle(k, p), p / (p * k.c1 + k.c3)


def two_bit_metrics(k: RenewalConstants, u: float, p: float) -> Metrics:
    """Duty cycle and cycle speed when the controller sees empty and above-threshold"""
    if p <= 0:
        raise ParameterDomainError(f"consume power p must be > 0, got {p}")
    large_u_warning(k, u)
    mean_tau_c, _ = recharge_moments(k, u)
    energy = mean_energy_at_crossing(k, u)
    mean_cycle = (1 / k.harvest_rate + 1 / p) * u + k.c1 + k.c3 / p
    rho = (u + k.c3) / ((1 + p / k.harvest_rate) * u + (p * k.c1 + k.c3))
    rho_limit, omega_max = two_bit_bounds(k, p)
    return Metrics(
        mode=ESIMode.TWO_BIT,
        rho=rho,
        omega=1 / mean_cycle,
        aux={
            'mean_cycle': mean_cycle,
            'mean_tau_c': mean_tau_c,
            'mean_tau_d': energy / p,
            'mean_energy_at_crossing': energy,
            'rho_limit': rho_limit,
            'omega_max': omega_max,
        },
    )


def opportunistic_metrics(k: RenewalConstants, p: float) -> Metrics:
    """
    Exact u = 0 analysis: every packet is consumed as soon as it lands.

    Differs from the u -> 0 limit of the two-bit formulas, which assume
    stationary residuals that only hold for large u; for small u neither is
    accurate.
    """
    if p <= 0:
        raise ParameterDomainError(f"consume power p must be > 0, got {p}")
    mean_cycle = k.c1 + k.x_bar / p
    return Metrics(
        mode=ESIMode.TWO_BIT,
        rho=1 / (1 + p * k.c1 / k.x_bar),
        omega=1 / mean_cycle,
        aux={'mean_cycle': mean_cycle, 'mean_tau_d': k.x_bar / p},
    )


def min_switch_time(k: RenewalConstants, theta1: float) -> float:
    """t_c at u = 0, the shortest wait that meets the energy-outage target"""
    _check_probability('theta1', theta1)
    return k.c1 + std_normal_quantile(1 - theta1) * math.sqrt(k.c2)


def one_bit_switch_time(k: RenewalConstants, u: float, theta1: float) -> float:
    """Fixed harvest duration t_c with P(U(t_c) <= u) = theta1"""
    _check_probability('theta1', theta1)
    large_u_warning(k, u)
    mean, variance = recharge_moments(k, u)
    t_c = mean + std_normal_quantile(1 - theta1) * math.sqrt(variance)
    if t_c <= 0:
        logger.warning(f"Switch time t_c={t_c:g} is not positive for u={u:g}, theta1={theta1:g}")
        raise InfeasibleParameterError(
            f"switch time t_c={t_c:g} <= 0 for u={u:g}, theta1={theta1:g}; lower theta1 or raise u",
            bound='switch_time',
        )
    return t_c


def one_bit_metrics(k: RenewalConstants, u: float, p: float, theta1: float) -> Metrics:
    """Duty cycle and cycle speed when the controller only sees an empty battery"""
    if p <= 0:
        raise ParameterDomainError(f"consume power p must be > 0, got {p}")
    t_c = one_bit_switch_time(k, u, theta1)
    t_c_min = min_switch_time(k, theta1)
    total_rate = p + k.harvest_rate
    rho = k.harvest_rate / total_rate
    aux = {
        't_c_min': t_c_min,
        'mean_tau_d': k.harvest_rate * t_c / p,
        'mean_cycle': total_rate * t_c / p,
    }
    if t_c_min > 0:
        aux['omega_bound'] = p / (total_rate * t_c_min)
    if u > 0:
        aux['omega_large_u'] = p * rho / u
    return Metrics(mode=ESIMode.ONE_BIT, rho=rho, omega=p / (total_rate * t_c), t_c=t_c, aux=aux)


def zero_bit_coefficients(k: RenewalConstants, p: float, T: float, theta1: float) -> ZeroBitCoefficients:
    """Coefficients of the zero-bit duty-cycle equation and its feasibility quadratic"""
    if T <= 0:
        raise ParameterDomainError(f"cycle period T must be > 0, got {T}")
    if p <= 0:
        raise ParameterDomainError(f"consume power p must be > 0, got {p}")
    _check_probability('theta1', theta1)
    z = std_normal_quantile(1 - theta1)
    a = p / k.harvest_rate
    beta = p * k.gamma_sq * z * z / k.x_bar ** 3
    kappa = k.c2 * z * z

    K = a * a
    L = 2 * a * k.c1 - beta
    M = k.c1 ** 2 - kappa
    discriminant = L * L - 4 * K * M
    if discriminant < 0:
        T_plus = 0.0
    else:
        T_plus = max((-L + math.sqrt(discriminant)) / (2 * K), 0.0)

    return ZeroBitCoefficients(
        a=a, b=beta / T, c=kappa / T ** 2, d=k.c1 / T,
        K=K, L=L, M=M,
        t_c_min=min_switch_time(k, theta1),
        T_plus=T_plus,
        root_sign=math.copysign(1.0, z),
    )


def zero_bit_feasibility(k: RenewalConstants, p: float, T: float, theta1: float) -> FeasibilityReport:
    """Check 0 < rho (T > t_c,min) and rho < 1 (f(T) > 0) for a cycle period T"""
    coeffs = zero_bit_coefficients(k, p, T, theta1)
    return FeasibilityReport(
        T=T,
        t_c_min=coeffs.t_c_min,
        T_plus=coeffs.T_plus,
        positive_duty=T > coeffs.t_c_min,
        below_one=coeffs.f(T) > 0,
    )


def zero_bit_residual(coeffs: ZeroBitCoefficients, rho: float) -> float:
    """1 - rho - d - sign(z) sqrt(c + b rho) - a rho; zero at the duty cycle"""
    radicand = coeffs.c + coeffs.b * rho
    if radicand < 0:
        return math.inf
    return 1 - rho - coeffs.d - coeffs.root_sign * math.sqrt(radicand) - coeffs.a * rho


def _squared_roots(coeffs: ZeroBitCoefficients) -> List[float]:
    """Real roots of (1 + a)^2 rho^2 - (2 (1 + a)(1 - d) + b) rho + (1 - d)^2 - c"""
    a, b, c, d = coeffs.a, coeffs.b, coeffs.c, coeffs.d
    centre = 2 * (1 + a) * (1 - d) + b
    discriminant = b * b + 4 * (1 + a) * ((1 + a) * c + b * (1 - d))
    if discriminant < 0:
        return []
    q = centre + math.copysign(math.sqrt(discriminant), centre)
    if q == 0:
        return [0.0]
    # second root from the product of the roots
    return [q / (2 * (1 + a) ** 2), 2 * ((1 - d) ** 2 - c) / q]


def zero_bit_duty_cycle(k: RenewalConstants, p: float, T: float, theta1: float) -> Metrics:
    """Duty cycle for a blind controller with fixed cycle period T"""
    coeffs = zero_bit_coefficients(k, p, T, theta1)
    report = zero_bit_feasibility(k, p, T, theta1)
    if report.violated == 't_c_min':
        logger.warning(f"Zero-bit period T={T:g} is not above t_c,min={report.t_c_min:g}")
        raise InfeasibleParameterError(
            f"cycle period T={T:g} <= t_c,min={report.t_c_min:g}; duty cycle would not be positive",
            bound='t_c_min',
        )
    if report.violated == 'T_plus':
        logger.warning(f"Zero-bit period T={T:g} fails f(T) > 0 (T_plus={report.T_plus:g})")
        raise InfeasibleParameterError(
            f"cycle period T={T:g} <= T_plus={report.T_plus:g}; duty cycle would not stay below 1",
            bound='T_plus',
        )

    a, b, c, d = coeffs.a, coeffs.b, coeffs.c, coeffs.d
    candidates = _squared_roots(coeffs)
    valid = [
        rho for rho in candidates
        if 0 < rho < 1 and abs(zero_bit_residual(coeffs, rho)) < RESIDUAL_TOLERANCE
    ]
    if not valid:
        raise NoSolutionError(
            f"neither root {candidates} satisfies the zero-bit duty-cycle equation at T={T:g}"
        )
    rho = min(valid, key=lambda value: abs(zero_bit_residual(coeffs, value)))

    z = std_normal_quantile(1 - theta1)
    T_lower = max(report.t_c_min, report.T_plus)
    aux = {
        'a': a, 'b': b, 'c': c, 'd': d,
        't_c_min': report.t_c_min,
        'T_plus': report.T_plus,
        'T_lower': T_lower,
        'T_simplified': k.lam ** 2 * k.gamma_sq * z * z / (p * k.x_bar),
        'L_printed': 2 * a * k.c1 + p * z * z / k.x_bar ** 3,
        'consumed_energy': p * rho * T,
        'residual': zero_bit_residual(coeffs, rho),
    }
    if T_lower > 0:
        aux['omega_bound'] = 1 / T_lower
    return Metrics(mode=ESIMode.ZERO_BIT, rho=rho, omega=1 / T, t_c=(1 - rho) * T, aux=aux)


def zero_bit_discharge_period(k: RenewalConstants, t_c: float, p: float, theta3: float) -> float:
    """Cycle period T giving P(battery fully discharged by T - t_c) = theta3"""
    if t_c <= 0 or p <= 0:
        raise ParameterDomainError(f"discharge period needs t_c > 0 and p > 0, got t_c={t_c}, p={p}")
    _check_probability('theta3', theta3)
    T = (1 + k.harvest_rate / p) * t_c + (k.gamma * k.lam ** 1.5 / p) * math.sqrt(t_c) * std_normal_quantile(theta3)
    if T <= t_c:
        logger.warning(f"Discharge period T={T:g} leaves no consume phase after t_c={t_c:g}")
        raise InfeasibleParameterError(
            f"discharge period T={T:g} <= t_c={t_c:g}; raise theta3",
            bound='discharge_period',
        )
    return T


def zero_bit_discharge_metrics(k: RenewalConstants, u: float, p: float,
                               theta1: float, theta3: float) -> Metrics:
    """Zero-bit variant whose period is sized so the battery empties with probability theta3"""
    t_c = one_bit_switch_time(k, u, theta1)
    T = zero_bit_discharge_period(k, t_c, p, theta3)
    rho_large_u = asymptotic_duty_cycle(k, p)
    aux = {'T': T, 'rho_large_u': rho_large_u}
    if u > 0:
        aux['omega_large_u'] = p * rho_large_u / u
    return Metrics(mode=ESIMode.ZERO_BIT_DISCHARGE, rho=1 - t_c / T, omega=1 / T, t_c=t_c, aux=aux)


def analyze(k: RenewalConstants, protocol: ProtocolConfig) -> Metrics:
    """Metrics for the configured ESI mode"""
    if protocol.mode == ESIMode.TWO_BIT:
        return two_bit_metrics(k, protocol.u, protocol.p)
    if protocol.mode == ESIMode.ONE_BIT:
        return one_bit_metrics(k, protocol.u, protocol.p, protocol.theta1)
    if protocol.mode == ESIMode.ZERO_BIT:
        return zero_bit_duty_cycle(k, protocol.p, protocol.T, protocol.theta1)
    return zero_bit_discharge_metrics(k, protocol.u, protocol.p, protocol.theta1, protocol.theta3)
