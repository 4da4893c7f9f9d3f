"""
Django settings for the geokit project.

The project hosts one app, ``eigenstructure``: the numerical toolkit, its
management commands (compute, verify) and a small JSON API.

Values can be overridden from the environment or from a ``.env`` file next
to manage.py (loaded with python-dotenv). Command-line flags win over both.
"""

import os
from pathlib import Path

from dotenv import load_dotenv

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

load_dotenv(BASE_DIR / '.env') # Does not override variables already set


def env_float(name, default):
    value = os.environ.get(name)
    return default if value in (None, '') else float(value)


def env_int(name, default):
    value = os.environ.get(name)
    return default if value in (None, '') else int(value)


# SECURITY WARNING: keep the secret key used in production secret!
SECRET_KEY = os.environ.get('DJANGO_SECRET_KEY', 'geokit-development-key-change-me')

# SECURITY WARNING: don't run with debug turned on in production!
DEBUG = os.environ.get('DJANGO_DEBUG', 'True') == 'True'

ALLOWED_HOSTS = [host for host in os.environ.get('DJANGO_ALLOWED_HOSTS', '').split(',') if host]


# Application definition

INSTALLED_APPS = [
    'django.contrib.contenttypes',
    'django.contrib.auth',
    # Django REST Framework
    'rest_framework',
    # Our app
    'eigenstructure',
]

# JSON only: reports are machine-readable, no browsable API, no sessions
REST_FRAMEWORK = {
    'DEFAULT_PERMISSION_CLASSES': [
        'rest_framework.permissions.AllowAny',
    ],
    'DEFAULT_AUTHENTICATION_CLASSES': [],
    'UNAUTHENTICATED_USER': None,
    'DEFAULT_RENDERER_CLASSES': [
        'rest_framework.renderers.JSONRenderer',
    ],
    'DEFAULT_PARSER_CLASSES': [
        'rest_framework.parsers.JSONParser',
    ],
}

MIDDLEWARE = [
    'django.middleware.security.SecurityMiddleware',
    'django.middleware.common.CommonMiddleware',
]

ROOT_URLCONF = 'geokit.urls'

TEMPLATES = [
    {
        'BACKEND': 'django.template.backends.django.DjangoTemplates',
        'DIRS': [],
        'APP_DIRS': True,
        'OPTIONS': {},
    },
]

WSGI_APPLICATION = 'geokit.wsgi.application'

# Database
# The toolkit has no models; the entry keeps stock management commands working.

DATABASES = {
    'default': {
        'ENGINE': 'django.db.backends.sqlite3',
        'NAME': BASE_DIR / 'db.sqlite3',
    }
}

# Internationalization

LANGUAGE_CODE = 'en-us'

TIME_ZONE = 'UTC'

USE_I18N = True

USE_TZ = True

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'


# Toolkit settings, read through eigenstructure.conf.geokit_setting()

GEOKIT = {
    'TOL_REL': env_float('GEOKIT_TOL_REL', 1e-11), # Singular-value cut-off, relative to sigma_1
    'TOL_ABS': env_float('GEOKIT_TOL_ABS', 1e-8), # Residual bound for containment/identity checks
    'SEED': env_int('GEOKIT_SEED', 0),
    'TRIALS': env_int('GEOKIT_TRIALS', 100),
    'NMAX': env_int('GEOKIT_NMAX', 8),
    'JSON_INDENT': 2,
    'RETRY_BUDGET': 100, # Draws allowed when a controllable random system is requested
    'COND_WARN': 1e8, # Eigenvector condition number above which a warning is attached
    'WORKERS': env_int('GEOKIT_WORKERS', 1), # Thread pool size for verify
}


# Logging
# Reports go to stdout; log records go to stderr so the two never mix.

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '{asctime} {levelname} {name}: {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'stream': 'ext://sys.stderr',
            'formatter': 'verbose',
        },
    },
    'loggers': {
        'eigenstructure': {
            'handlers': ['console'],
            'level': os.environ.get('GEOKIT_LOG_LEVEL', 'WARNING'),
            'propagate': False,
        },
    },
}
