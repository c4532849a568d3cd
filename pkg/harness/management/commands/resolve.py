import json

from common.helper import load_data
from harness.helper import resolve_document
from harness.management.base import LabCommand, comma_list
from harness.serializers import ResolveRequestSerializer
from harness.suite import EXIT_PASS, EXIT_VIOLATIONS
from resolvent.solvers import STRATEGIES, resolvent


class Command(LabCommand):
    help = 'Compute J_λ f, the minimizer of E(g) + ‖f - g‖²/(2λ), on one instance.'
    writes_report = False

    def add_lab_arguments(self, parser):
        parser.add_argument('--instance', default='two_node_quadratic',
                            help='Built-in name, JSON spec or path to a JSON instance.')
        parser.add_argument('--input', help='Comma separated values of f; drawn from --seed '
                                            'when missing.')
        parser.add_argument('--strategy', choices=STRATEGIES, default='auto')
        parser.add_argument('--max-iterations', type=int)
        parser.add_argument('--out', help='Write the result here instead of stdout.')
        self.add_problem_arguments(parser)

    def add_problem_arguments(self, parser):
        parser.add_argument('--lambda', dest='lam', type=float, required=True,
                            help='Step λ > 0.')

    def request(self, options):
        data = {
            'instance': options['instance'],
            'seed': options['seed'],
            'solver': {key: value for key, value in (('tolerance', options['tol']),
                                                     ('max_iterations', options['max_iterations']),
                                                     ('strategy', options['strategy']))
                       if value is not None},
        }
        values = comma_list(options['input'])
        if values is not None:
            data['values'] = values
        return data

    def solve(self, options):
        data = {**self.request(options), 'lambda': options['lam']}
        problem = load_data(ResolveRequestSerializer, data, {'local': True})
        result = resolvent(problem['functional'], problem['lam'], problem['f'], problem['solver'])
        return resolve_document(problem, result), result.converged

    def run(self, **options):
        document, converged = self.solve(options)
        text = json.dumps(document, indent=2) + '\n'
        if options['out']:
            with open(options['out'], 'w') as fh:
                fh.write(text)
        else:
            self.emit(text)
        return EXIT_PASS if converged else EXIT_VIOLATIONS
