from common.utility import lab_setting
from criteria.identities import IDENTITY_KINDS
from criteria.reports import Report
from criteria.residuals import Tolerance
from harness.management.base import LabCommand, comma_list
from harness.suite import exit_code, identity_sweep


class Command(LabCommand):
    help = 'Check the exact identities behind the criteria on random inputs.'

    def add_lab_arguments(self, parser):
        parser.add_argument('--samples', type=int, default=100, help='Inputs per identity kind.')
        parser.add_argument('--kinds', help='Comma separated identity kinds; all by default.')

    def run(self, **options):
        atol = lab_setting('IDENTITY_ATOL', options['tol'])
        report = Report(seed=options['seed'], tolerance=Tolerance(atol=atol, rtol=0.0))
        kinds = comma_list(options['kinds']) or list(IDENTITY_KINDS)
        identity_sweep(report, options['seed'], options['samples'], kinds, atol)
        config = {'samples': options['samples'], 'kinds': kinds, 'tolerance': atol}
        return self.finish(report, exit_code(report), options, config, options['samples'])
