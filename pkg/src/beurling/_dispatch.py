"""Backend selection: compiled extension if importable, NumPy fallback otherwise.

Set BEURLING_FORCE_PURE=1 to insist on the fallback (used by the benchmark
to compare both implementations in one process).
"""

import os

from . import _pure

if os.environ.get("BEURLING_FORCE_PURE") == "1":
    _native = None
else:
    try:
        from . import _native
    except ImportError:
        _native = None

HAVE_NATIVE = _native is not None
backend = _native if HAVE_NATIVE else _pure
BACKEND_NAME = "native" if HAVE_NATIVE else "pure"

count_words = backend.count_words
fill_words = backend.fill_words
march_n_from_psi = backend.march_n_from_psi
march_inverse = backend.march_inverse
