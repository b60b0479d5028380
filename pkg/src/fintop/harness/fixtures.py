"""The standard fixtures shipped with the package."""

from pathlib import Path

from fintop.errors import InputError
from fintop.harness.serialize import load_fixture

DATA_DIR = Path(__file__).resolve().parent.parent / "data"

STANDARD = {
    "FIX-A": "fix_a.json",
    "FIX-B": "fix_b.json",
    "FIX-C": "fix_c.json",
    "FIX-D": "fix_d.json",
}


def fixture_names():
    return list(STANDARD)


def fixture_path(name):
    key = name.upper()
    if not key.startswith("FIX-"):
        key = f"FIX-{key}"
    if key in STANDARD:
        return DATA_DIR / STANDARD[key]
    return None


def get_fixture(name_or_path):
    """Load a standard fixture by name (``FIX-A`` or ``A``) or any fixture file."""
    path = fixture_path(name_or_path)
    if path is None:
        path = Path(name_or_path)
        if not path.is_file():
            raise InputError(f"no fixture named {name_or_path!r}")
    return load_fixture(path)
