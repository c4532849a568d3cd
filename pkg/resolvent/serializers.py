from rest_framework import serializers

from common.decorators import handle_exceptions
from resolvent.solvers import STRATEGIES, SolverConfig


class SolverConfigSerializer(serializers.Serializer):
    tolerance = serializers.FloatField(required=False, min_value=0.0)
    max_iterations = serializers.IntegerField(required=False, min_value=1)
    strategy = serializers.ChoiceField(choices=STRATEGIES, default='auto')

    @handle_exceptions
    def create(self, validated_data):
        return SolverConfig(**validated_data)

    def to_representation(self, instance):
        if isinstance(instance, SolverConfig):
            return instance.to_dict()
        return super().to_representation(instance)
