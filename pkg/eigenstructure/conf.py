# eigenstructure/conf.py
"""
Access to the GEOKIT settings block, with the toolkit defaults filling in
any key the project settings leave out.
"""
from django.conf import settings

from .linalg import Tol

DEFAULTS = {
    'TOL_REL': 1e-11,
    'TOL_ABS': 1e-8,
    'SEED': 0,
    'TRIALS': 100,
    'NMAX': 8,
    'JSON_INDENT': 2,
    'RETRY_BUDGET': 100,
    'COND_WARN': 1e8,
    'WORKERS': 1,
}


def geokit_setting(name):
    """
    Returns settings.GEOKIT[name], or the toolkit default.
    """
    overrides = getattr(settings, 'GEOKIT', {}) # The block is optional in settings.py
    if name not in DEFAULTS:
        raise KeyError(f"Unknown GEOKIT setting '{name}'.")
    return overrides.get(name, DEFAULTS[name])


def default_tol(rel=None, abs_=None):
    """
    Tolerances from explicit values, falling back to the settings.
    """
    return Tol(
        rel=geokit_setting('TOL_REL') if rel is None else rel,
        abs=geokit_setting('TOL_ABS') if abs_ is None else abs_,
    )
