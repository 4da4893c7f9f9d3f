"""Set up Django the way `manage.py test` does, so pytest can run the app's SimpleTestCase modules."""
import os

import django

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'geokit.settings')
django.setup()

from django.test.utils import setup_test_environment  # noqa: E402

setup_test_environment()
