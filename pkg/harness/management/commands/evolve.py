from common.helper import load_data
from harness.helper import evolve_document
from harness.management.commands.resolve import Command as ResolveCommand
from harness.serializers import EvolveRequestSerializer
from resolvent.evolution import evolve_path


class Command(ResolveCommand):
    help = 'Implicit Euler: apply J_{t/steps} to f steps times.'

    def add_problem_arguments(self, parser):
        parser.add_argument('--t', type=float, required=True, help='Horizon t >= 0.')
        parser.add_argument('--steps', type=int, required=True, help='Number of resolvent steps.')

    def solve(self, options):
        data = {**self.request(options), 't': options['t'], 'steps': options['steps']}
        problem = load_data(EvolveRequestSerializer, data, {'local': True})
        path = evolve_path(problem['functional'], problem['t'], problem['steps'], problem['f'],
                           problem['solver'])
        document = evolve_document(problem, path)
        return document, document['converged']
