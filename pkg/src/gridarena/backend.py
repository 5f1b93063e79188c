"""Engine backend selection.

The compiled core (``gridarena._kernel``, Cython) is preferred; the pure
Python twin is the fallback. Set ``GRIDARENA_BACKEND=python`` or
``=native`` to force one — forcing ``native`` raises if the extension is
not built. Both expose the same names and, by contract, identical
behavior.
"""

import os

from gridarena import _kernel_py

_forced = os.environ.get("GRIDARENA_BACKEND", "").strip().lower()

if _forced == "python":
    kernel = _kernel_py
elif _forced == "native":
    from gridarena import _kernel as kernel  # type: ignore[no-redef]
else:
    try:
        from gridarena import _kernel as kernel  # type: ignore[no-redef]
    except ImportError:
        kernel = _kernel_py


def backend_name() -> str:
    """Either ``native`` (compiled extension) or ``python``."""
    return kernel.BACKEND_NAME


def get_kernel(name: str | None = None):
    """Return a kernel module by name, defaulting to the selected one."""
    if name is None:
        return kernel
    if name == "python":
        return _kernel_py
    if name == "native":
        from gridarena import _kernel
        return _kernel
    raise ValueError(f"unknown backend {name!r}")
