"""
WSGI config for the geokit project.

It exposes the WSGI callable as a module-level variable named ``application``.
Only the JSON compute API is served; the toolkit itself runs from manage.py.
"""

import os

from django.core.wsgi import get_wsgi_application

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'geokit.settings')

application = get_wsgi_application()
