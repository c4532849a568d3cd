from common.helper import load_data
from harness.instances import ACCEPTANCE_SUITE
from harness.management.base import LabCommand, comma_list
from harness.serializers import SuiteConfigSerializer
from harness.suite import SUITE_CHECKS, run_suite


class Command(LabCommand):
    help = 'Run the criteria, projection and resolvent sweeps over a set of instances.'

    defaults = {
        'samples': 1000,
        'instance': None,
        'family': None,
        'checks': None,
        'negative_control': False,
    }
    # full-scale positive run over the generated convex instances
    acceptance = {
        'samples': 10000,
        'resolvent_samples': 500,
        'resolvent_instances': 10,
    }

    def add_lab_arguments(self, parser):
        parser.add_argument('--samples', type=int, default=self.defaults['samples'],
                            help='Samples per check and instance.')
        parser.add_argument('--instance', action='append',
                            help='Built-in name, JSON spec or path to a JSON instance; '
                                 'may be repeated.')
        parser.add_argument('--checks', default=self.defaults['checks'],
                            help='Comma separated checks, or "all".')
        parser.add_argument('--family', default=self.defaults['family'],
                            help='Comma separated contraction kinds of the sweeps, "named" or "all".')
        parser.add_argument('--resolvent-samples', type=int,
                            help='Pairs per instance for the resolvent and projection checks.')
        parser.add_argument('--solver-tol', type=float, help='Resolvent optimality target.')
        parser.add_argument('--negative-control', action='store_true',
                            default=self.defaults['negative_control'],
                            help='The run is expected to find violations.')
        if self.acceptance:
            parser.add_argument('--acceptance', action='store_true',
                                help=f'{self.acceptance["samples"]} samples on each generated '
                                     f'convex instance and {self.acceptance["resolvent_samples"]} '
                                     f'resolvent pairs on the first '
                                     f'{self.acceptance["resolvent_instances"]}.')

    def suite_config(self, options):
        checks = options['checks']
        checks = list(SUITE_CHECKS) if checks == 'all' else comma_list(checks)
        data = {
            'seed': options['seed'],
            'n_samples': options['samples'],
            'tolerance': options['tol'],
            'checks': checks,
            'instances': options['instance'] or self.defaults['instance'],
            'family': options['family'],
            'negative_control': options['negative_control'],
            'resolvent_samples': options['resolvent_samples'],
            'solver_tolerance': options['solver_tol'],
            'out': options['out'],
            'format': options['format'],
        }
        if options.get('acceptance'):
            data.update({
                'n_samples': self.acceptance['samples'],
                'instances': options['instance'] or list(ACCEPTANCE_SUITE),
                'resolvent_samples': options['resolvent_samples']
                or self.acceptance['resolvent_samples'],
                'resolvent_instances': self.acceptance['resolvent_instances'],
            })
        return load_data(SuiteConfigSerializer, data)

    def run(self, **options):
        config = self.suite_config(options)
        result = run_suite(config)
        return self.finish(result.report, result.exit_code, options, config.to_dict(),
                           config.n_samples)
