"""Hot set-system kernels with a compiled core and a pure-Python fallback.

The Cython module is used when it imported and every mask fits one 64-bit
word; wider masks always go through the Python kernels. Set
``MIRRORGAME_PURE_PYTHON=1`` to force the fallback.
"""

from __future__ import annotations

import os

from mirrorgame._kernels import _pykernels as py

try:
    if os.environ.get("MIRRORGAME_PURE_PYTHON"):
        raise ImportError("pure python forced")
    from mirrorgame._kernels import _ckernels as compiled
except ImportError:
    compiled = None

BACKEND = "cython" if compiled is not None else "python"

_WORD = 1 << 64


def _fits(masks: list[int]) -> bool:
    return all(0 <= x < _WORD for x in masks)


def _impl(masks: list[int]):
    if compiled is not None and _fits(masks):
        return compiled
    return py


def gf2_rank(rows: list[int]) -> int:
    rows = list(rows)
    return _impl(rows).gf2_rank(rows)


def even_pairs(masks: list[int]) -> list[tuple[int, int]]:
    masks = list(masks)
    return _impl(masks).even_pairs(masks)


def is_oddtown(masks: list[int]) -> bool:
    masks = list(masks)
    return _impl(masks).is_oddtown(masks)
