"""
WSGI config for the chaoscycle project.

Only the admin is served over HTTP; cycles run from management commands
or Celery workers.
"""

import os

from django.core.wsgi import get_wsgi_application

os.environ.setdefault("DJANGO_SETTINGS_MODULE", "config.settings.production")

application = get_wsgi_application()
