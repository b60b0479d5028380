"""Backend selection for the search kernels.

The compiled extension is used when it imports; setting the environment
variable ``FINTOP_PURE_PYTHON=1`` forces the pure-Python fallback.
"""

import os

from fintop import _kernels_py

if os.environ.get("FINTOP_PURE_PYTHON", "") not in ("", "0"):
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from fintop import _kernels as _impl  # type: ignore[attr-defined]
        BACKEND = "cython"
    except ImportError:
        _impl = _kernels_py
        BACKEND = "python"

closed_subsets = _impl.closed_subsets
solve_functional = _impl.solve_functional


def closure_masks(n, succ):
    """Transitive closure masks for :func:`closed_subsets`.

    ``succ[i]`` lists the indices that must accompany ``i``.  Returns
    ``(down, up)``.
    """
    down = [1 << i for i in range(n)]
    changed = True
    while changed:
        changed = False
        for i in range(n):
            m = down[i]
            for j in succ[i]:
                m |= down[j]
            if m != down[i]:
                down[i] = m
                changed = True
    up = [0] * n
    for i in range(n):
        m = down[i]
        j = 0
        while m:
            if m & 1:
                up[j] |= 1 << i
            m >>= 1
            j += 1
    return down, up


def bits(mask):
    """Indices of the set bits of ``mask`` in increasing order."""
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out
