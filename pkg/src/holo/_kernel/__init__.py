"""Hot numerical kernels with a compiled core and a pure-numpy fallback.

The compiled extension (_cy, built from _cy.pyx) is preferred when it
imports; otherwise the numpy implementation (_py) is used. Set
HOLO_KERNEL=python or HOLO_KERNEL=cython to force a backend; forcing
cython when the extension is unavailable raises immediately instead of
silently downgrading.

Both backends implement the same three functions with identical semantics;
see _py.py for the contracts. BACKEND names the one in use.
"""

import os as _os

_forced = _os.environ.get("HOLO_KERNEL", "").strip().lower()
if _forced not in ("", "cython", "python"):
    raise ImportError(f"HOLO_KERNEL must be 'cython' or 'python', got {_forced!r}")

if _forced == "python":
    from . import _py as _impl

    BACKEND = "python"
else:
    try:
        from . import _cy as _impl  # type: ignore[attr-defined]

        BACKEND = "cython"
    except ImportError:
        if _forced == "cython":
            raise
        from . import _py as _impl

        BACKEND = "python"

batch_unitary = _impl.batch_unitary
chain_expm_2x2 = _impl.chain_expm_2x2
chain_propagator = _impl.chain_propagator

__all__ = ["BACKEND", "batch_unitary", "chain_expm_2x2", "chain_propagator"]
