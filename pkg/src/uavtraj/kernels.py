"""Backend selection for the discrete-action kernels.

The compiled extension is preferred when present; set UAVTRAJ_PURE_PYTHON=1
to force the NumPy fallback. `BACKEND` names the implementation in use so
tests and benchmarks can report it.
"""

from __future__ import annotations

import os

if os.environ.get("UAVTRAJ_PURE_PYTHON"):
    from . import _kernels_py as _impl
else:
    try:
        from . import _kernels_cy as _impl  # type: ignore[no-redef]
    except ImportError:
        from . import _kernels_py as _impl  # type: ignore[no-redef]

BACKEND: str = _impl.BACKEND_NAME
quad_action = _impl.quad_action
quad_action_grad = _impl.quad_action_grad
precond_factor = _impl.precond_factor
precond_solve = _impl.precond_solve
