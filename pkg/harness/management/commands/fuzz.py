from harness.management.commands.verify import Command as VerifyCommand


class Command(VerifyCommand):
    help = ('Negative-control sweep: by default the compatibility check with scaled '
            'contractions on the planted nonconvex instance, which must find violations.')

    defaults = {
        'samples': 10000,
        'instance': ['negative_control'],
        'family': 'scaled',
        'checks': 'compatibility',
        'negative_control': True,
    }
    acceptance = None

    def add_lab_arguments(self, parser):
        super().add_lab_arguments(parser)
        parser.add_argument('--positive', dest='negative_control', action='store_false',
                            help='Treat the sweep as a positive check.')
