from harness.demo import run_demo
from harness.management.base import LabCommand
from harness.suite import exit_code


class Command(LabCommand):
    help = 'Run the worked examples with known answers.'

    def run(self, **options):
        report = run_demo()
        return self.finish(report, exit_code(report), options)
