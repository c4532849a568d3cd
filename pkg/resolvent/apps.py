from django.apps import AppConfig


class ResolventConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'resolvent'
