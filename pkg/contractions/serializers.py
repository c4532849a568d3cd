from rest_framework import serializers

from common.decorators import handle_exceptions
from contractions.named import make_named
from contractions.piecewise import PiecewiseLinear


class PiecewiseLinearSerializer(serializers.Serializer):
    """
    A piecewise-linear map given either raw
    (``{"breakpoints": [...], "slopes": [...], "anchor": r}``) or by name
    (``{"kind": "clamp_sym", "params": {"alpha": 1}}``).
    """
    breakpoints = serializers.ListField(child=serializers.FloatField(), required=False)
    slopes = serializers.ListField(child=serializers.FloatField(), required=False)
    anchor = serializers.FloatField(required=False, default=0.0)
    kind = serializers.CharField(required=False)
    params = serializers.DictField(child=serializers.FloatField(allow_null=True),
                                   required=False)

    def validate(self, attrs):
        if 'kind' in attrs and 'slopes' in attrs:
            raise serializers.ValidationError('Give either a kind or slopes, not both.')
        if 'kind' not in attrs and 'slopes' not in attrs:
            raise serializers.ValidationError('A kind or a list of slopes is required.')
        return attrs

    @handle_exceptions
    def create(self, validated_data):
        if 'kind' in validated_data:
            return make_named(validated_data['kind'], **validated_data.get('params', {}))
        return PiecewiseLinear(validated_data.get('breakpoints', []),
                               validated_data['slopes'],
                               validated_data.get('anchor', 0.0))

    def to_representation(self, instance):
        if isinstance(instance, PiecewiseLinear):
            return instance.to_dict()
        return super().to_representation(instance)
