"""
Seeded generation and loading of test instances.

An instance is a functional on a finite measure space, together with any
functions its source document carried.  Sources are built-in names, generator
specs (dicts) or instance documents (dicts with a ``functional`` entry), the
latter two also as JSON text or as a path to a JSON file.
"""
import json
import logging
import os
from collections import namedtuple

import numpy as np

from common.exceptions import InvalidInstanceSpecError
from common.helper import load_data
from common.measure import FiniteMeasureSpace
from common.utility import rng_for
from functionals.edges import (HuberEdge, IntervalIndicator, PowerEdge, QuadraticWeighted,
                               TruncatedAbsEdge)
from functionals.energies import Edge, ZeroFunctional, make_mixed_energy, make_quadratic_form
from functionals.helper import CONVEX_EDGE_KINDS, random_edge_function

logger = logging.getLogger(__name__)

Instance = namedtuple('Instance', ['functional', 'space', 'functions', 'descriptor'])

# edge kinds whose proximal map is closed form; the solvers handle them fastest
CLOSED_PROX_KINDS = ('power1', 'power2', 'huber', 'interval_indicator', 'pwl_convex',
                     'quadratic_weighted')

MIX_ALIASES = {
    'convex': CONVEX_EDGE_KINDS,
    'closed_prox': CLOSED_PROX_KINDS,
}

# unit-parameter edge functions for specs naming a single edge kind
CANONICAL_EDGES = {
    'power1': lambda: PowerEdge(1.0),
    'power2': lambda: PowerEdge(2.0),
    'huber': lambda: HuberEdge(1.0),
    'quadratic_weighted': lambda: QuadraticWeighted(1.0),
    'interval_indicator': lambda: IntervalIndicator(0.0),
    'truncated_abs': lambda: TruncatedAbsEdge(1.0),
}

SPEC_FIELDS = ('nodes', 'edges', 'mix', 'graph', 'edge_probability', 'weights', 'weight_range',
               'nonconvex', 'indicator', 'functional',
               'name')
GRAPHS = ('path', 'complete', 'random')
FUNCTIONALS = ('mixed', 'quadratic', 'zero')

BUILTIN_INSTANCES = {
    'two_node_quadratic': {'nodes': 2, 'edges': 'power2'},
    'indicator_pair': {'nodes': 2, 'edges': 'interval_indicator', 'weights': [1.0, 3.0]},
    'negative_control': {'nodes': 2, 'edges': 'truncated_abs', 'nonconvex': True},
    'mixed_small': {'nodes': [2, 6], 'mix': 'closed_prox', 'weight_range': [0.5, 2.0],
                    'edge_probability': 0.6},
    'mixed_power': {'nodes': 5, 'mix': ['power', 'huber', 'interval_indicator']},
    'laplacian': {'nodes': 4, 'functional': 'quadratic', 'weight_range': [0.5, 2.0]},
}

ACCEPTANCE_MIXES = ('closed_prox', 'convex', ['power', 'huber', 'interval_indicator'],
                    ['pwl_convex', 'quadratic_weighted', 'interval_indicator'])

# twenty convex mixed energies on 2 to 10 points, each with an indicator edge
ACCEPTANCE_SUITE = tuple(
    {'nodes': 2 + k % 9, 'mix': ACCEPTANCE_MIXES[k % 4],
     'graph': 'complete' if k % 2 else 'random', 'edge_probability': 0.4,
     'weight_range': [0.5, 2.0], 'indicator': True}
    for k in range(20))

DEFAULT_SUITE = ('two_node_quadratic', 'indicator_pair', 'laplacian') + ACCEPTANCE_SUITE


class InstanceSpec:
    """
    Description of a generated instance.

    Args:
        nodes (int or [lo, hi]): Number of points, or an inclusive range to draw from.
        edges (str, optional): A single edge kind from ``CANONICAL_EDGES``
            with unit parameters on every edge.
        mix (str or list, optional): Edge kinds drawn per edge with random
            parameters (``random_edge_function``); ``convex`` and
            ``closed_prox`` name the standard mixes.
        graph (str, optional): ``path``, ``complete`` or ``random``; defaults to
            ``path`` for ``edges`` and ``random`` otherwise.
        edge_probability (float): Chance of each ordered pair in a random graph.
        weights (list, optional): Explicit point weights.
        weight_range ([lo, hi], optional): Weights drawn uniformly; counting
            measure when neither is given.
        nonconvex (bool): Allow (and plant) a truncated-absolute-value edge.
        indicator (bool): Plant an interval-indicator edge when the draw has none.
        functional (str): ``mixed``, ``quadratic`` (weighted graph Laplacian) or ``zero``.
        name (str, optional): Built-in name the spec came from.
    """

    def __init__(self, nodes=2, edges=None, mix=None, graph=None, edge_probability=0.5,
                 weights=None, weight_range=None, nonconvex=False, indicator=False,
                 functional='mixed', name=None):
        self.nodes = self._nodes(nodes)
        if edges is not None and mix is not None:
            raise InvalidInstanceSpecError('Give either "edges" or "mix", not both.')
        if edges is not None and edges not in CANONICAL_EDGES:
            raise InvalidInstanceSpecError(
                f'Unknown edge kind {edges!r}; expected one of {", ".join(CANONICAL_EDGES)}.')
        self.edges = edges
        self.mix = self._mix(mix) if mix is not None else None
        if edges is None and self.mix is None and functional == 'mixed':
            self.mix = list(CLOSED_PROX_KINDS)
        if graph is None:
            graph = 'path' if edges is not None else 'random'
        if graph not in GRAPHS:
            raise InvalidInstanceSpecError(f'Unknown graph {graph!r}.')
        self.graph = graph
        self.edge_probability = float(edge_probability)
        if not 0.0 <= self.edge_probability <= 1.0:
            raise InvalidInstanceSpecError('edge_probability must lie in [0, 1].')
        if weights is not None and weight_range is not None:
            raise InvalidInstanceSpecError('Give either "weights" or "weight_range", not both.')
        self.weights = None if weights is None else [float(w) for w in weights]
        self.weight_range = None if weight_range is None else self._range(weight_range)
        self.nonconvex = bool(nonconvex)
        uses_truncated = edges == 'truncated_abs' or 'truncated_abs' in (self.mix or ())
        if uses_truncated and not self.nonconvex:
            raise InvalidInstanceSpecError('truncated_abs edges need "nonconvex": true.')
        if functional not in FUNCTIONALS:
            raise InvalidInstanceSpecError(f'Unknown functional {functional!r}.')
        if self.nonconvex and functional != 'mixed':
            raise InvalidInstanceSpecError('Only mixed energies can be nonconvex.')
        self.indicator = bool(indicator)
        if self.indicator and functional != 'mixed':
            raise InvalidInstanceSpecError('Only mixed energies can carry indicator edges.')
        self.functional = functional
        self.name = name

    @staticmethod
    def _nodes(nodes):
        if isinstance(nodes, (list, tuple)):
            if len(nodes) != 2 or not all(isinstance(n, int) for n in nodes) \
                    or not 1 <= nodes[0] <= nodes[1]:
                raise InvalidInstanceSpecError(f'Node range must be [lo, hi] with 1 <= lo <= hi, '
                                               f'got {nodes!r}.')
            return [int(nodes[0]), int(nodes[1])]
        if isinstance(nodes, bool) or not isinstance(nodes, int) or nodes < 1:
            raise InvalidInstanceSpecError(f'nodes must be a positive integer, got {nodes!r}.')
        return int(nodes)

    @staticmethod
    def _mix(mix):
        if isinstance(mix, str):
            mix = MIX_ALIASES.get(mix, [mix])
        mix = list(mix)
        known = set(CONVEX_EDGE_KINDS) | {'truncated_abs'}
        unknown = [k for k in mix if k not in known]
        if unknown or not mix:
            raise InvalidInstanceSpecError(f'Unknown edge kinds in mix: {unknown or mix}.')
        return mix

    @staticmethod
    def _range(bounds):
        if len(bounds) != 2:
            raise InvalidInstanceSpecError(f'weight_range must be [lo, hi], got {bounds!r}.')
        lo, hi = (float(b) for b in bounds)
        if not 0 < lo <= hi:
            raise InvalidInstanceSpecError(f'weight_range must satisfy 0 < lo <= hi, got {bounds!r}.')
        return [lo, hi]

    def to_dict(self):
        data = {'nodes': self.nodes, 'graph': self.graph, 'functional': self.functional}
        for key in ('name', 'edges', 'mix', 'weights', 'weight_range'):
            if getattr(self, key) is not None:
                data[key] = getattr(self, key)
        if self.graph == 'random':
            data['edge_probability'] = self.edge_probability
        if self.nonconvex:
            data['nonconvex'] = True
        if self.indicator:
            data['indicator'] = True
        return data


def as_spec(spec):
    if isinstance(spec, InstanceSpec):
        return spec
    if isinstance(spec, str):
        if spec not in BUILTIN_INSTANCES:
            raise InvalidInstanceSpecError(f'Unknown built-in instance {spec!r}.')
        return InstanceSpec(name=spec, **BUILTIN_INSTANCES[spec])
    if isinstance(spec, dict):
        unknown = sorted(set(spec) - set(SPEC_FIELDS))
        if unknown:
            raise InvalidInstanceSpecError(f'Unknown instance spec fields: {", ".join(unknown)}.')
        return InstanceSpec(**spec)
    raise InvalidInstanceSpecError(f'Cannot read an instance spec from {spec!r}.')


def _pairs(spec, n, rng):
    if spec.graph == 'path':
        return [(x, x + 1) for x in range(n - 1)]
    if spec.graph == 'complete':
        return [(x, y) for x in range(n) for y in range(x + 1, n)]
    return [(x, y) for x in range(n) for y in range(n)
            if x != y and rng.random() < spec.edge_probability]


def _space(spec, n, rng):
    if spec.weights is not None:
        if len(spec.weights) != n:
            raise InvalidInstanceSpecError(f'{n} points but {len(spec.weights)} weights.')
        return FiniteMeasureSpace(range(n), spec.weights)
    if spec.weight_range is not None:
        return FiniteMeasureSpace(range(n), rng.uniform(*spec.weight_range, size=n))
    return FiniteMeasureSpace.counting(n)


def generate_instance(spec, seed=0):
    """
    Deterministic instance for ``(spec, seed)``.

    Args:
        spec (InstanceSpec, dict or str): Generator spec or built-in name.
        seed (int): Seed of the generator stream.

    Returns:
        Instance: Convex unless the spec sets ``nonconvex``.

    Raises:
        InvalidInstanceSpecError: If the spec is invalid.
    """
    spec = as_spec(spec)
    rng = rng_for(seed, 'instance')
    n = spec.nodes if isinstance(spec.nodes, int) else int(rng.integers(spec.nodes[0],
                                                                        spec.nodes[1] + 1))
    space = _space(spec, n, rng)
    pairs = _pairs(spec, n, rng)

    if spec.functional == 'zero':
        E = ZeroFunctional(space)
    elif spec.functional == 'quadratic':
        M = np.zeros((n, n))
        for x, y in pairs:
            w = float(rng.uniform(0.2, 2.0))
            M[x, x] += w
            M[y, y] += w
            M[x, y] -= w
            M[y, x] -= w
        E = make_quadratic_form(space, M)
    else:
        if spec.edges is not None:
            functions = [CANONICAL_EDGES[spec.edges]() for _ in pairs]
        else:
            functions = [random_edge_function(rng, spec.mix[int(rng.integers(len(spec.mix)))])
                         for _ in pairs]
        edges = [Edge(x, y, b) for (x, y), b in zip(pairs, functions)]
        if spec.nonconvex and not any(isinstance(e.function, TruncatedAbsEdge) for e in edges):
            if n < 2:
                raise InvalidInstanceSpecError('A nonconvex instance needs at least two points.')
            planted = TruncatedAbsEdge(float(rng.uniform(0.5, 2.0)))
            edges = [Edge(0, 1, planted)] + edges[1:] if edges else [Edge(0, 1, planted)]
        if spec.indicator and not any(isinstance(e.function, IntervalIndicator) for e in edges):
            if n < 2:
                raise InvalidInstanceSpecError('An indicator edge needs at least two points.')
            x, y = 0, 1
            # the planted nonconvex edge keeps its place
            if len(edges) > (1 if spec.nonconvex else 0):
                x, y = edges[-1].source, edges[-1].target
                edges = edges[:-1]
            edges = edges + [Edge(x, y, random_edge_function(rng, 'interval_indicator'))]
        E = make_mixed_energy(space, edges, allow_nonconvex=spec.nonconvex)

    descriptor = {'spec': spec.to_dict(), 'seed': seed, 'points': n, 'functional': E.type,
                  'convex': E.convex}
    logger.debug('generated instance %s', descriptor)
    return Instance(E, space, [], descriptor)


def load_instance(source, seed=0):
    """
    Instance from a built-in name, a spec, an instance document, JSON text or
    a path to a JSON file.

    Raises:
        InvalidInstanceSpecError: If the source cannot be read.
    """
    if isinstance(source, InstanceSpec):
        return generate_instance(source, seed)
    if isinstance(source, dict):
        if not isinstance(source.get('functional'), dict):
            return generate_instance(source, seed)
        # harness.serializers imports this module
        from harness.serializers import InstanceDocumentSerializer
        document = load_data(InstanceDocumentSerializer, source)
        return Instance(document['functional'], document['space'], document['functions'],
                        {'document': True, 'points': len(document['space']),
                         'functional': document['functional'].type,
                         'convex': document['functional'].convex})
    if not isinstance(source, str):
        raise InvalidInstanceSpecError(f'Cannot read an instance from {source!r}.')
    if source in BUILTIN_INSTANCES:
        return generate_instance(source, seed)
    if os.path.isfile(source):
        try:
            with open(source) as fh:
                data = json.load(fh)
        except (OSError, ValueError) as e:
            raise InvalidInstanceSpecError(f'Cannot read instance file {source!r}: {e}')
        return load_instance(data, seed)
    try:
        data = json.loads(source)
    except ValueError:
        raise InvalidInstanceSpecError(
            f'{source!r} is neither a built-in instance, a file nor a JSON spec.')
    if not isinstance(data, dict):
        raise InvalidInstanceSpecError('An instance spec must be a JSON object.')
    return load_instance(data, seed)
