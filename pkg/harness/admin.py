from django.contrib import admin

from .models import SuiteRun


class SuiteRunAdmin(admin.ModelAdmin):
    list_display = ["command", "seed", "n_samples", "violations", "exit_code", "created"]
    list_filter = ["command", "exit_code"]
    search_fields = ["command"]
    readonly_fields = ["config", "report"]


admin.site.register(SuiteRun, SuiteRunAdmin)
