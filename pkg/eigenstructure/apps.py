from django.apps import AppConfig


class EigenstructureConfig(AppConfig):
    name = 'eigenstructure'
    verbose_name = 'Geometric control and eigenstructure assignment'
