"""Select the execution kernel: compiled when available, pure Python otherwise.

Set ``ABFORGE_PURE=1`` to force the pure-Python kernel.
"""
from __future__ import annotations

import os

from . import _kernel_py

PURE = _kernel_py.execute

if os.environ.get("ABFORGE_PURE") == "1":
    COMPILED = None
else:
    try:
        from ._kernel import execute as COMPILED
    except ImportError:  # extension not built
        COMPILED = None

execute = COMPILED if COMPILED is not None else PURE
BACKEND = "compiled" if COMPILED is not None else "python"
