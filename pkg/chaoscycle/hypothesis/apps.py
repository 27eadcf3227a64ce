from django.apps import AppConfig
from django.utils.translation import gettext_lazy as _


class HypothesisConfig(AppConfig):
    name = "chaoscycle.hypothesis"
    verbose_name = _("Hypothesis")
