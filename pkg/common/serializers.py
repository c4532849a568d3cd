from rest_framework import serializers

from common.decorators import handle_exceptions
from common.measure import FiniteMeasureSpace


class FiniteMeasureSpaceSerializer(serializers.Serializer):
    """``{"points": [ids], "weights": [reals]}``; weights default to the counting measure."""
    points = serializers.ListField(child=serializers.JSONField(), allow_empty=False)
    weights = serializers.ListField(child=serializers.FloatField(), required=False)

    def validate(self, attrs):
        weights = attrs.get('weights')
        if weights is not None and len(weights) != len(attrs['points']):
            raise serializers.ValidationError('One weight per point is required.')
        return attrs

    @handle_exceptions
    def create(self, validated_data):
        points = [p if isinstance(p, (int, str)) else str(p) for p in validated_data['points']]
        return FiniteMeasureSpace(points, validated_data.get('weights'))

    def to_representation(self, instance):
        if isinstance(instance, FiniteMeasureSpace):
            return instance.to_dict()
        return super().to_representation(instance)


class FnSerializer(serializers.Serializer):
    """
    ``{"space": index, "values": [reals]}``; the index refers to
    ``context['spaces']``.  Without an index the function lives on
    ``context['space']``.
    """
    space = serializers.IntegerField(required=False, min_value=0)
    values = serializers.ListField(child=serializers.FloatField(), allow_empty=False)

    def validate(self, attrs):
        spaces = self.context.get('spaces')
        if 'space' in attrs:
            if not spaces or attrs['space'] >= len(spaces):
                raise serializers.ValidationError(f'No space with index {attrs["space"]}.')
            attrs['space'] = spaces[attrs['space']]
        elif self.context.get('space') is not None:
            attrs['space'] = self.context['space']
        else:
            raise serializers.ValidationError('The function does not name its space.')
        return attrs

    @handle_exceptions
    def create(self, validated_data):
        return validated_data['space'].function(validated_data['values'])

    def to_representation(self, instance):
        return instance.to_dict()
