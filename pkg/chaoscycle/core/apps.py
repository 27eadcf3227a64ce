from django.apps import AppConfig
from django.utils.translation import gettext_lazy as _


class CoreConfig(AppConfig):
    name = "chaoscycle.core"
    label = "chaos_core"
    verbose_name = _("Chaos cycle core")
