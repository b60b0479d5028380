"""Canonical string names for element values.

Elements are arbitrary hashable values built from strings, tuples and
frozensets.  ``canon`` gives each one a deterministic string so that output
and ordering never depend on hashing.
"""


def canon(x):
    if isinstance(x, str):
        return x
    if isinstance(x, tuple):
        return "(" + ",".join(canon(y) for y in x) + ")"
    if isinstance(x, frozenset):
        return "{" + ",".join(sorted(canon(y) for y in x)) + "}"
    if isinstance(x, int):
        return str(x)
    raise TypeError(f"cannot name element {x!r}")
