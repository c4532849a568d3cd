from django.apps import AppConfig


class ContractionsConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'contractions'
