"""Backend selection for the hot kernels.

The compiled extension ``auerbach._kernels`` is used when it imports; the
numpy module ``auerbach._kernels_py`` is the fallback. Setting the
environment variable ``AUERBACH_PURE_PYTHON=1`` forces the fallback.
"""

from __future__ import annotations

import os

from . import _kernels_py

if os.environ.get("AUERBACH_PURE_PYTHON") == "1":
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        _impl = _kernels_py
        BACKEND = "python"

residual = _impl.residual
residual_jacobian = _impl.residual_jacobian
canonical_key = _impl.canonical_key
newton_core = _impl.newton_core
orbit_row_forms = _kernels_py.orbit_row_forms
signed_permutations = _kernels_py.signed_permutations

__all__ = [
    "BACKEND",
    "residual",
    "residual_jacobian",
    "canonical_key",
    "newton_core",
    "orbit_row_forms",
    "signed_permutations",
]
