from django.apps import AppConfig


class HilbertgeoConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'hilbertgeo'
    verbose_name = 'Hilbert geometry'
