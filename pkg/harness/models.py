from django.db import models


class SuiteRun(models.Model):
    """A saved verification report, written by the commands with ``--save``."""
    command = models.CharField(max_length=32)
    seed = models.BigIntegerField(null=True, blank=True)
    n_samples = models.PositiveIntegerField(default=0)
    config = models.JSONField(default=dict)
    report = models.JSONField(default=dict)
    violations = models.PositiveIntegerField(default=0)
    exit_code = models.PositiveSmallIntegerField(default=0)
    created = models.DateTimeField(auto_now_add=True)

    def __str__(self):
        return f'{self.command} seed={self.seed} ({self.violations} violations)'

    class Meta(object):
        ordering = ['-created']
