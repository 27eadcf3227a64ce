from django.contrib import admin
from django.utils.html import format_html
from django.utils.translation import gettext_lazy as _

from .models import CycleOutcomeChoice
from .models import CycleRun


@admin.register(CycleRun)
class CycleRunAdmin(admin.ModelAdmin):
    list_display = ("project", "colored_outcome", "improvement_loops", "input_tokens", "api_cost_usd", "created_at")
    list_filter = ("outcome", "created_at")
    search_fields = ("project", "instructions", "reason", "public_id")
    readonly_fields = ("public_id", "record", "ledger", "created_at")
    ordering = ("-created_at",)

    def colored_outcome(self, obj):
        color = "#D32F2F" if obj.outcome == CycleOutcomeChoice.ABORTED else "#388E3C"
        return format_html('<span style="color: {}; font-weight: bold;">{}</span>', color, obj.get_outcome_display())

    colored_outcome.short_description = _("Outcome")
    colored_outcome.admin_order_field = "outcome"
