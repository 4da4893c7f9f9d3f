# eigenstructure/tests/support.py
from pathlib import Path

from eigenstructure.sysmodel import load_system

FIXTURES = Path(__file__).resolve().parent / 'fixtures'


def fixture_path(name):
    return FIXTURES / f"{name}.json"


def fixture(name):
    """
    Loads one of the closed-form systems in tests/fixtures/.
    """
    return load_system(fixture_path(name))
