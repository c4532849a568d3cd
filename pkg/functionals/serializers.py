from rest_framework import serializers

from common.decorators import handle_exceptions
from common.helper import load_data
from common.serializers import FnSerializer
from contractions.serializers import PiecewiseLinearSerializer
from functionals.edges import (EDGE_KINDS, HuberEdge, IntervalIndicator, PowerEdge,
                               PwlConvexEdge, QuadraticWeighted, TruncatedAbsEdge, shifted_edge)
from functionals.energies import (Edge, ZeroFunctional, f_shift, make_mixed_energy,
                                  make_quadratic_form)


class EdgeFunctionSerializer(serializers.Serializer):
    """
    One edge function, e.g. ``{"kind": "power", "p": 2}`` or
    ``{"kind": "pwl_convex", "knots": [1], "slopes": [0.5, 1]}``.
    """
    kind = serializers.ChoiceField(choices=sorted(EDGE_KINDS) + ['shifted'])
    p = serializers.FloatField(required=False)
    weight = serializers.FloatField(required=False, default=1.0)
    delta = serializers.FloatField(required=False)
    c = serializers.FloatField(required=False)
    w = serializers.FloatField(required=False)
    cap = serializers.FloatField(required=False, default=1.0)
    knots = serializers.ListField(child=serializers.FloatField(), required=False)
    slopes = serializers.ListField(child=serializers.FloatField(), required=False)
    pwl = serializers.DictField(required=False)
    base = serializers.DictField(required=False)

    required_params = {
        'power': ('p',),
        'huber': ('delta',),
        'interval_indicator': ('c',),
        'quadratic_weighted': ('w',),
        'shifted': ('base', 'c'),
    }

    def validate(self, attrs):
        missing = [name for name in self.required_params.get(attrs['kind'], ())
                   if name not in attrs]
        if missing:
            raise serializers.ValidationError(
                f'Edge kind {attrs["kind"]!r} needs {", ".join(missing)}.')
        if attrs['kind'] == 'pwl_convex' and 'pwl' not in attrs and 'slopes' not in attrs:
            raise serializers.ValidationError('pwl_convex needs "pwl" or "knots"/"slopes".')
        return attrs

    @handle_exceptions
    def create(self, validated_data):
        kind = validated_data['kind']
        if kind == 'power':
            return PowerEdge(validated_data['p'], validated_data['weight'])
        if kind == 'huber':
            return HuberEdge(validated_data['delta'], validated_data['weight'])
        if kind == 'interval_indicator':
            return IntervalIndicator(validated_data['c'])
        if kind == 'quadratic_weighted':
            return QuadraticWeighted(validated_data['w'])
        if kind == 'truncated_abs':
            return TruncatedAbsEdge(validated_data['cap'])
        if kind == 'pwl_convex':
            if 'pwl' in validated_data:
                return PwlConvexEdge(load_data(PiecewiseLinearSerializer, validated_data['pwl']))
            return PwlConvexEdge.from_half(validated_data.get('knots', []),
                                           validated_data['slopes'])
        return shifted_edge(load_data(EdgeFunctionSerializer, validated_data['base']),
                            validated_data['c'])


class EdgeSerializer(serializers.Serializer):
    source = serializers.IntegerField(min_value=0)
    target = serializers.IntegerField(min_value=0)
    b = serializers.DictField()

    def to_internal_value(self, data):
        # "from" is a keyword, so the JSON names are mapped by hand
        if isinstance(data, dict) and 'from' in data:
            data = {'source': data.get('from'), 'target': data.get('to'), 'b': data.get('b')}
        return super().to_internal_value(data)

    def create(self, validated_data):
        return Edge(validated_data['source'], validated_data['target'],
                    load_data(EdgeFunctionSerializer, validated_data['b']))


class EnergyFunctionalSerializer(serializers.Serializer):
    """
    An energy functional on ``context['space']``:

    * ``{"type": "zero"}``
    * ``{"type": "mixed", "edges": [{"from": i, "to": j, "b": {...}}]}``
    * ``{"type": "quadratic", "matrix": [[...]]}``
    * ``{"type": "fshift", "base": {...}, "center": [...]}``
    """
    type = serializers.ChoiceField(choices=['zero', 'mixed', 'quadratic', 'fshift'])
    edges = serializers.ListField(child=serializers.DictField(), required=False)
    matrix = serializers.ListField(child=serializers.ListField(child=serializers.FloatField()),
                                   required=False)
    base = serializers.DictField(required=False)
    center = serializers.ListField(child=serializers.FloatField(), required=False)
    allow_nonconvex = serializers.BooleanField(required=False, default=False)

    def validate(self, attrs):
        if self.context.get('space') is None:
            raise serializers.ValidationError('No measure space to build the functional on.')
        needs = {'mixed': ('edges',), 'quadratic': ('matrix',), 'fshift': ('base', 'center')}
        missing = [name for name in needs.get(attrs['type'], ()) if name not in attrs]
        if missing:
            raise serializers.ValidationError(
                f'Functional type {attrs["type"]!r} needs {", ".join(missing)}.')
        return attrs

    @handle_exceptions
    def create(self, validated_data):
        space = self.context['space']
        kind = validated_data['type']
        if kind == 'zero':
            return ZeroFunctional(space)
        if kind == 'mixed':
            edges = [load_data(EdgeSerializer, edge) for edge in validated_data['edges']]
            return make_mixed_energy(space, edges,
                                     allow_nonconvex=validated_data['allow_nonconvex'])
        if kind == 'quadratic':
            return make_quadratic_form(space, validated_data['matrix'])
        base = load_data(EnergyFunctionalSerializer, validated_data['base'], self.context)
        center = load_data(FnSerializer, {'values': validated_data['center']}, {'space': space})
        return f_shift(base, center)

    def to_representation(self, instance):
        return instance.to_dict()
