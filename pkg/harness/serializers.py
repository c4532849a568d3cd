from rest_framework import serializers

from common.decorators import handle_exceptions
from common.helper import load_data
from common.serializers import FiniteMeasureSpaceSerializer, FnSerializer
from common.utility import rng_for, sample_values
from functionals.serializers import EnergyFunctionalSerializer
from harness.instances import BUILTIN_INSTANCES, GRAPHS, FUNCTIONALS, InstanceSpec, load_instance
from harness.models import SuiteRun
from harness.suite import FORMATS, MAX_SEED, SUITE_CHECKS, SuiteConfig
from resolvent.serializers import SolverConfigSerializer


class InstanceDocumentSerializer(serializers.Serializer):
    """
    ``{"spaces": [...], "functions": [...], "functional": {..., "space": index}}``.

    The functional lives on ``spaces[functional.space]`` (the first space by
    default); functions name their space by index.
    """
    spaces = serializers.ListField(child=serializers.DictField(), allow_empty=False)
    functions = serializers.ListField(child=serializers.DictField(), required=False, default=list)
    functional = serializers.DictField()

    @handle_exceptions
    def create(self, validated_data):
        spaces = [load_data(FiniteMeasureSpaceSerializer, s) for s in validated_data['spaces']]
        functional = dict(validated_data['functional'])
        index = functional.pop('space', 0)
        if not isinstance(index, int) or not 0 <= index < len(spaces):
            raise serializers.ValidationError({'functional': f'No space with index {index!r}.'})
        space = spaces[index]
        return {
            'functional': load_data(EnergyFunctionalSerializer, functional, {'space': space}),
            'space': space,
            'functions': [load_data(FnSerializer, fn, {'spaces': spaces, 'space': space})
                          for fn in validated_data['functions']],
        }


class InstanceSpecSerializer(serializers.Serializer):
    """A generator spec such as ``{"nodes": 5, "mix": "convex"}``."""
    nodes = serializers.JSONField(default=2)
    edges = serializers.CharField(required=False)
    mix = serializers.JSONField(required=False)
    graph = serializers.ChoiceField(choices=GRAPHS, required=False)
    edge_probability = serializers.FloatField(default=0.5, min_value=0.0, max_value=1.0)
    weights = serializers.ListField(child=serializers.FloatField(), required=False)
    weight_range = serializers.ListField(child=serializers.FloatField(), required=False,
                                         min_length=2, max_length=2)
    nonconvex = serializers.BooleanField(default=False)
    indicator = serializers.BooleanField(default=False)
    functional = serializers.ChoiceField(choices=FUNCTIONALS, default='mixed')

    @handle_exceptions
    def create(self, validated_data):
        return InstanceSpec(**validated_data)

    def to_representation(self, instance):
        if isinstance(instance, InstanceSpec):
            return instance.to_dict()
        return super().to_representation(instance)


class SuiteConfigSerializer(serializers.Serializer):
    seed = serializers.IntegerField(default=0, min_value=0, max_value=MAX_SEED)
    n_samples = serializers.IntegerField(default=1000, min_value=0)
    tolerance = serializers.FloatField(required=False, allow_null=True)
    checks = serializers.ListField(child=serializers.ChoiceField(choices=SUITE_CHECKS),
                                   required=False, allow_null=True)
    instances = serializers.ListField(child=serializers.JSONField(), required=False,
                                      allow_null=True, allow_empty=False)
    family = serializers.JSONField(required=False, allow_null=True)
    negative_control = serializers.BooleanField(default=False)
    resolvent_samples = serializers.IntegerField(required=False, allow_null=True, min_value=0)
    resolvent_instances = serializers.IntegerField(required=False, allow_null=True, min_value=0)
    solver_tolerance = serializers.FloatField(required=False, allow_null=True)
    out = serializers.CharField(required=False, allow_null=True)
    format = serializers.ChoiceField(choices=FORMATS, default='json')

    @handle_exceptions
    def create(self, validated_data):
        return SuiteConfig(**validated_data)


class InstanceRequestSerializer(serializers.Serializer):
    """
    Base of the solver requests: an instance (built-in name, spec or document)
    and the starting function, drawn from ``seed`` when ``values`` is missing.
    """
    instance = serializers.JSONField()
    values = serializers.ListField(child=serializers.FloatField(), required=False)
    seed = serializers.IntegerField(default=0, min_value=0, max_value=MAX_SEED)
    solver = serializers.DictField(required=False, default=dict)

    def validate_instance(self, value):
        # file paths and JSON text only from the management commands
        if self.context.get('local') and isinstance(value, str):
            return value
        if isinstance(value, str) and value not in BUILTIN_INSTANCES:
            raise serializers.ValidationError(f'Unknown built-in instance {value!r}.')
        if not isinstance(value, (str, dict)):
            raise serializers.ValidationError('Expected a built-in name or a JSON object.')
        return value

    def build(self, validated_data):
        instance = load_instance(validated_data['instance'], validated_data['seed'])
        space = instance.space
        if 'values' in validated_data:
            if len(validated_data['values']) != len(space):
                raise serializers.ValidationError(
                    {'values': f'Expected {len(space)} values, got {len(validated_data["values"])}.'})
            f = space.function(validated_data['values'])
        elif instance.functions:
            f = instance.functions[0]
        else:
            f = space.function(sample_values(rng_for(validated_data['seed'], 'start'), len(space)))
        return {
            'instance': instance,
            'functional': instance.functional,
            'f': f,
            'solver': load_data(SolverConfigSerializer, validated_data['solver']),
        }


class ResolveRequestSerializer(InstanceRequestSerializer):
    """``{"instance": ..., "lambda": λ, "values": [...], "solver": {...}}``."""
    lam = serializers.FloatField()

    def to_internal_value(self, data):
        # "lambda" is a keyword
        if isinstance(data, dict) and 'lambda' in data:
            data = {**{k: v for k, v in data.items() if k != 'lambda'}, 'lam': data['lambda']}
        return super().to_internal_value(data)

    @handle_exceptions
    def create(self, validated_data):
        return {**self.build(validated_data), 'lam': validated_data['lam']}


class EvolveRequestSerializer(InstanceRequestSerializer):
    """``{"instance": ..., "t": horizon, "steps": n, "values": [...], "solver": {...}}``."""
    t = serializers.FloatField(min_value=0.0)
    steps = serializers.IntegerField(min_value=1)

    @handle_exceptions
    def create(self, validated_data):
        return {**self.build(validated_data), 't': validated_data['t'],
                'steps': validated_data['steps']}


class SuiteRunSerializer(serializers.ModelSerializer):
    class Meta:
        model = SuiteRun
        fields = ['id', 'command', 'seed', 'n_samples', 'config', 'report', 'violations',
                  'exit_code', 'created']
        read_only_fields = fields
