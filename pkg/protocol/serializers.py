"""
Serializers that validate a parsed model config file section by section
and turn each section into its domain type
"""
from rest_framework import serializers

from .analytic import ESIMode, ProtocolConfig
from .distributions import DistributionSpec, Family, FAMILY_PARAMETERS
from .exceptions import ParameterDomainError
from .link import LinkConfig
from .simulator import MIN_CYCLES, ResidualMode


class StrictSerializer(serializers.Serializer):
    """Serializer that rejects keys it does not declare"""

    def to_internal_value(self, data):
        if isinstance(data, dict):
            unknown = sorted(set(data) - set(self.fields))
            if unknown:
                raise serializers.ValidationError({key: ['Unknown key.'] for key in unknown})
        return super().to_internal_value(data)


class DistributionSerializer(StrictSerializer):
    """Serializer for a distribution section: family plus named parameters"""
    family = serializers.ChoiceField(choices=Family.choices)
    value = serializers.FloatField(required=False)
    low = serializers.FloatField(required=False)
    high = serializers.FloatField(required=False)
    rate = serializers.FloatField(required=False)
    shape = serializers.FloatField(required=False)
    scale = serializers.FloatField(required=False)

    def validate(self, attrs):
        family = attrs.pop('family')
        wanted = FAMILY_PARAMETERS[family]
        missing = [name for name in wanted if name not in attrs]
        if missing:
            raise serializers.ValidationError({name: [f'Required for {family}.'] for name in missing})
        extra = [name for name in attrs if name not in wanted]
        if extra:
            raise serializers.ValidationError({name: [f'Not a {family} parameter.'] for name in extra})
        try:
            return DistributionSpec(family, attrs)
        except ParameterDomainError as exc:
            raise serializers.ValidationError(str(exc))


class ProtocolSerializer(StrictSerializer):
    """Serializer for the [protocol] section"""
    mode = serializers.ChoiceField(choices=ESIMode.choices)
    u = serializers.FloatField(default=0.0, min_value=0.0, help_text="Energy threshold")
    p = serializers.FloatField(help_text="Constant consume power")
    theta1 = serializers.FloatField(default=0.1, help_text="Energy-outage target")
    theta3 = serializers.FloatField(default=0.9, help_text="Full-discharge target")
    T = serializers.FloatField(required=False, allow_null=True, default=None, help_text="Cycle period, zero-bit only")

    def validate(self, attrs):
        try:
            return ProtocolConfig(**attrs)
        except ParameterDomainError as exc:
            raise serializers.ValidationError(str(exc))


class LinkSerializer(StrictSerializer):
    """Serializer for the [link] section"""
    zeta = serializers.FloatField(min_value=0.0, help_text="SNR decoding threshold")
    noise = serializers.FloatField(help_text="Noise power N")
    fading = DistributionSerializer()
    theta2 = serializers.FloatField(help_text="SNR-outage target")
    symbol_duration = serializers.FloatField(required=False, help_text="Symbol duration T_s")

    def validate(self, attrs):
        try:
            return LinkConfig(**attrs)
        except ParameterDomainError as exc:
            raise serializers.ValidationError(str(exc))


class SimSerializer(StrictSerializer):
    """Serializer for the [sim] section; absent keys fall back to settings"""
    cycles = serializers.IntegerField(required=False, min_value=MIN_CYCLES)
    seed = serializers.IntegerField(required=False, min_value=0, max_value=2 ** 64 - 1)
    residual_mode = serializers.ChoiceField(choices=ResidualMode.choices, default=ResidualMode.STATIONARY)
    workers = serializers.IntegerField(required=False, min_value=1)
    u_grid = serializers.ListField(child=serializers.FloatField(min_value=0.0), required=False, allow_empty=False)


class RunConfigSerializer(StrictSerializer):
    """Serializer for a whole model config file"""
    arrival = DistributionSerializer(required=False)
    packet = DistributionSerializer(required=False)
    protocol = ProtocolSerializer(required=False)
    link = LinkSerializer(required=False)
    sim = SimSerializer(required=False)
