"""
Parametric distributions for energy inter-arrival times and packet sizes.

All families have closed-form first three raw moments, which the renewal
constants need. Supports are nonnegative.
"""
import math
from dataclasses import dataclass, field
from typing import Dict

import numpy as np
from django.db.models import TextChoices
from scipy import special, stats

from .exceptions import DegenerateModelError, ParameterDomainError
from .streams import RandomStream


class Family(TextChoices):
    DETERMINISTIC = 'deterministic', 'Deterministic'
    UNIFORM = 'uniform', 'Uniform'
    EXPONENTIAL = 'exponential', 'Exponential'
    GAMMA = 'gamma', 'Gamma'


# Named parameters each family takes, in config-file order
FAMILY_PARAMETERS: Dict[str, tuple] = {
    Family.DETERMINISTIC: ('value',),
    Family.UNIFORM: ('low', 'high'),
    Family.EXPONENTIAL: ('rate',),
    Family.GAMMA: ('shape', 'scale'),
}


@dataclass(frozen=True)
class DistributionSpec:
    """A nonnegative random variable: inter-arrival time A or packet size X"""
    family: Family
    params: Dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        try:
            family = Family(self.family)
        except ValueError:
            raise ParameterDomainError(f"Unknown distribution family: {self.family!r}")
        object.__setattr__(self, 'family', family)

        expected = FAMILY_PARAMETERS[family]
        missing = [name for name in expected if name not in self.params]
        extra = [name for name in self.params if name not in expected]
        if missing or extra:
            raise ParameterDomainError(
                f"{family.value} takes parameters {', '.join(expected)}; "
                f"missing {missing or 'none'}, unexpected {extra or 'none'}"
            )
        values = {name: float(self.params[name]) for name in expected}
        for name, value in values.items():
            if not math.isfinite(value):
                raise ParameterDomainError(f"{family.value} parameter {name} must be finite, got {value}")
        object.__setattr__(self, 'params', values)
        self._check_domain()

    def _check_domain(self):
        p = self.params
        if self.family == Family.DETERMINISTIC and p['value'] <= 0:
            raise ParameterDomainError(f"deterministic value must be > 0, got {p['value']}")
        if self.family == Family.UNIFORM and not 0 <= p['low'] < p['high']:
            raise ParameterDomainError(f"uniform needs 0 <= low < high, got low={p['low']}, high={p['high']}")
        if self.family == Family.EXPONENTIAL and p['rate'] <= 0:
            raise ParameterDomainError(f"exponential rate must be > 0, got {p['rate']}")
        if self.family == Family.GAMMA and (p['shape'] <= 0 or p['scale'] <= 0):
            raise ParameterDomainError(f"gamma needs shape > 0 and scale > 0, got {p}")

    @classmethod
    def deterministic(cls, value: float) -> 'DistributionSpec':
        return cls(Family.DETERMINISTIC, {'value': value})

    @classmethod
    def uniform(cls, low: float, high: float) -> 'DistributionSpec':
        return cls(Family.UNIFORM, {'low': low, 'high': high})

    @classmethod
    def exponential(cls, rate: float) -> 'DistributionSpec':
        return cls(Family.EXPONENTIAL, {'rate': rate})

    @classmethod
    def gamma(cls, shape: float, scale: float) -> 'DistributionSpec':
        return cls(Family.GAMMA, {'shape': shape, 'scale': scale})

    def __str__(self):
        args = ', '.join(f"{name}={value:g}" for name, value in self.params.items())
        return f"{self.family.value}({args})"


@dataclass(frozen=True)
class Moments:
    mean: float
    variance: float
    third_moment: float


def moments(spec: DistributionSpec) -> Moments:
    """Exact mean, variance and raw third moment E[Y^3]"""
    p = spec.params
    if spec.family == Family.DETERMINISTIC:
        v = p['value']
        return Moments(v, 0.0, v ** 3)
    if spec.family == Family.UNIFORM:
        a, b = p['low'], p['high']
        return Moments((a + b) / 2, (b - a) ** 2 / 12, (a + b) * (a * a + b * b) / 4)
    if spec.family == Family.EXPONENTIAL:
        r = p['rate']
        return Moments(1 / r, 1 / r ** 2, 6 / r ** 3)
    k, theta = p['shape'], p['scale']
    return Moments(k * theta, k * theta ** 2, k * (k + 1) * (k + 2) * theta ** 3)


def sample(spec: DistributionSpec, rng: RandomStream, size=None):
    """One variate, or an array of them when ``size`` is given"""
    p = spec.params
    if spec.family == Family.DETERMINISTIC:
        return p['value'] if size is None else np.full(size, p['value'])
    if spec.family == Family.UNIFORM:
        return rng.uniform(p['low'], p['high'], size)
    if spec.family == Family.EXPONENTIAL:
        return rng.exponential(1 / p['rate'], size)
    return rng.gamma(p['shape'], p['scale'], size)


def _frozen(spec: DistributionSpec):
    p = spec.params
    if spec.family == Family.UNIFORM:
        return stats.uniform(loc=p['low'], scale=p['high'] - p['low'])
    if spec.family == Family.EXPONENTIAL:
        return stats.expon(scale=1 / p['rate'])
    return stats.gamma(p['shape'], scale=p['scale'])


def _as_result(values):
    values = np.asarray(values, dtype=float)
    return float(values) if values.ndim == 0 else values


def cdf(spec: DistributionSpec, x):
    """Right-continuous CDF; accepts scalars or arrays"""
    if spec.family == Family.DETERMINISTIC:
        return _as_result(np.where(np.asarray(x, dtype=float) >= spec.params['value'], 1.0, 0.0))
    return _as_result(_frozen(spec).cdf(x))


def quantile(spec: DistributionSpec, q: float) -> float:
    """Left-continuous generalized inverse of ``cdf``"""
    if not 0 < q < 1:
        raise ParameterDomainError(f"quantile level must lie in (0, 1), got {q}")
    if spec.family == Family.DETERMINISTIC:
        return spec.params['value']
    return float(_frozen(spec).ppf(q))


def sample_residual(spec: DistributionSpec, rng: RandomStream, size=None):
    """
    Draw from the stationary residual density (1 - F(v)) / mean.

    Deterministic, uniform and exponential invert the residual CDF in closed
    form. Gamma uses the length-biased construction V = U * Y with
    Y ~ Gamma(shape + 1, scale), which has exactly that density.
    """
    p = spec.params
    if moments(spec).mean <= 0:
        raise DegenerateModelError(f"residual of {spec} is undefined for zero mean")

    if spec.family == Family.DETERMINISTIC:
        return rng.uniform(0.0, p['value'], size)
    if spec.family == Family.EXPONENTIAL:
        # memoryless
        return rng.exponential(1 / p['rate'], size)
    if spec.family == Family.GAMMA:
        return rng.uniform(0.0, 1.0, size) * rng.gamma(p['shape'] + 1, p['scale'], size)

    low, high = p['low'], p['high']
    width = high - low
    mean = (low + high) / 2
    target = rng.uniform(0.0, 1.0, size) * mean
    # Residual CDF is linear up to `low`, quadratic on [low, high]
    excess = np.maximum(target - low, 0.0)
    root = 2 * width * excess / (width + np.sqrt(np.maximum(width * width - 2 * width * excess, 0.0)))
    values = np.where(target <= low, target, low + root)
    return float(values) if size is None else values


def std_normal_cdf(x):
    """Standard normal CDF Phi"""
    return _as_result(special.ndtr(x))


def std_normal_quantile(q: float) -> float:
    """Inverse of the standard normal CDF"""
    if not 0 < q < 1:
        raise ParameterDomainError(f"normal quantile level must lie in (0, 1), got {q}")
    return float(special.ndtri(q))
