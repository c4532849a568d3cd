"""
Shared plumbing of the lab's management commands.

A command implements ``run(**options)`` and returns its exit status.  Domain
and I/O errors end the command with status 2; any other nonzero status from
``run`` is passed on to the shell.
"""
import logging
import sys

from django.core.exceptions import ValidationError as DjangoValidationError
from django.core.management.base import BaseCommand, CommandError
from rest_framework.exceptions import ValidationError

from harness.helper import save_run
from harness.suite import EXIT_CONFIG_ERROR, FORMATS, write_report

logger = logging.getLogger(__name__)


def error_message(e):
    if isinstance(e, DjangoValidationError):
        return ' '.join(e.messages)
    if isinstance(e, ValidationError):
        return str(e.detail)
    return str(e)


def comma_list(value):
    return [item.strip() for item in value.split(',') if item.strip()] if value else None


class LabCommand(BaseCommand):
    requires_migrations_checks = False
    # commands that write a Report get --out/--format/--save
    writes_report = True

    def add_arguments(self, parser):
        parser.add_argument('--seed', type=int, default=0, help='Base seed of the run.')
        parser.add_argument('--tol', type=float, help='Absolute tolerance.')
        if self.writes_report:
            parser.add_argument('--out', help='Write the report here instead of stdout.')
            parser.add_argument('--format', choices=FORMATS, default='json')
            parser.add_argument('--save', action='store_true',
                                help='Store the report as a SuiteRun.')
        self.add_lab_arguments(parser)

    def add_lab_arguments(self, parser):
        pass

    def run(self, **options):
        raise NotImplementedError('subclasses of LabCommand must provide a run() method')

    def handle(self, *args, **options):
        try:
            code = self.run(**options)
        except (DjangoValidationError, ValidationError, OSError) as e:
            logger.error('%s failed: %s', self.command_name, error_message(e))
            raise CommandError(error_message(e), returncode=EXIT_CONFIG_ERROR)
        if code:
            sys.exit(code)

    @property
    def command_name(self):
        return self.__module__.rsplit('.', 1)[-1]

    def emit(self, text):
        if text:
            self.stdout.write(text, ending='')

    def finish(self, report, code, options, config=None, n_samples=0):
        """Write the report, store it when asked and return ``code``."""
        self.emit(write_report(report, options['out'], options['format']))
        if options['save']:
            run = save_run(self.command_name, report, code, config, n_samples)
            logger.info('saved run %d', run.pk)
        return code
