"""
With these settings, tests run faster.
"""

from decimal import Decimal

from .base import *  # noqa: F403
from .base import BASE_DIR
from .base import env

# GENERAL
# ------------------------------------------------------------------------------
# https://docs.djangoproject.com/en/dev/ref/settings/#secret-key
SECRET_KEY = env(
    "DJANGO_SECRET_KEY",
    default="Q8nTz2LkVb5XcR1mWy7JpHd4GfS0aEuN3oKiB6lCtMvZ9qYrPwDxUjIhOgAe5sFk",
)
# https://docs.djangoproject.com/en/dev/ref/settings/#test-runner
TEST_RUNNER = "django.test.runner.DiscoverRunner"

# DATABASES
# ------------------------------------------------------------------------------
DATABASES = {"default": {"ENGINE": "django.db.backends.sqlite3", "NAME": ":memory:", "ATOMIC_REQUESTS": True}}

# PASSWORDS
# ------------------------------------------------------------------------------
# https://docs.djangoproject.com/en/dev/ref/settings/#password-hashers
PASSWORD_HASHERS = ["django.contrib.auth.hashers.MD5PasswordHasher"]

# Celery
# ------------------------------------------------------------------------------
# https://docs.celeryq.dev/en/stable/userguide/configuration.html#task-always-eager
CELERY_TASK_ALWAYS_EAGER = True
# https://docs.celeryq.dev/en/stable/userguide/configuration.html#task-eager-propagates
CELERY_TASK_EAGER_PROPAGATES = True

# Chaos cycles
# ------------------------------------------------------------------------------
# Tests never reach a live model; replay transcripts are passed explicitly.
CHAOS_ARTIFACT_ROOT = str(BASE_DIR / ".pytest_cycles")
CHAOS_LLM_BACKEND = "replay"
CHAOS_PRICE_IN = Decimal("0.0000025")
CHAOS_PRICE_OUT = Decimal("0.00001")
CHAOS_SEED = 0

# LOGGING
# ------------------------------------------------------------------------------
# caplog listens on the root logger
LOGGING["loggers"]["chaoscycle"]["propagate"] = True  # noqa: F405
