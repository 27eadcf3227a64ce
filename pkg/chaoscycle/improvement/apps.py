from django.apps import AppConfig
from django.utils.translation import gettext_lazy as _


class ImprovementConfig(AppConfig):
    name = "chaoscycle.improvement"
    verbose_name = _("Analysis and improvement")
