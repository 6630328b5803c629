"""Kernel selection: compiled extension when available, else pure Python.

Set ``KARELFIX_PURE=1`` to force the fallback (used by the benchmark and
by tests that compare the two implementations).
"""

from __future__ import annotations

import os

from . import pure

if os.environ.get("KARELFIX_PURE"):
    _active = pure
else:
    try:
        from . import _fast as _active  # type: ignore[no-redef]
    except ImportError:
        _active = pure

COMPILED: bool = bool(getattr(_active, "COMPILED", False))
run = _active.run
levenshtein = _active.levenshtein


def implementations():
    """All available kernel modules, keyed by name (for the benchmark)."""
    impls = {"pure": pure}
    try:
        from . import _fast

        impls["compiled"] = _fast
    except ImportError:
        pass
    return impls
