"""Backend selection for the split-operator hot kernels.

The compiled extension is used when available; setting the environment
variable ``SPINSHUTTLE_PURE_PYTHON=1`` (or a failed build) selects the
pure-numpy fallback.  ``use_backend`` switches at runtime, which the
benchmark uses to compare both on identical workloads.
"""

from __future__ import annotations

import os

from . import _kernels_py

_BACKENDS = {"pure": _kernels_py}
try:
    from . import _kernels as _kernels_ext
    _BACKENDS["compiled"] = _kernels_ext
except ImportError:
    _kernels_ext = None

_active = "pure"
potential_half_step = _kernels_py.potential_half_step
kinetic_soc_step = _kernels_py.kinetic_soc_step


def available_backends() -> tuple:
    return tuple(sorted(_BACKENDS))


def backend_name() -> str:
    return _active


def use_backend(name: str) -> str:
    """Select 'compiled' or 'pure'; returns the previously active name."""
    global _active, potential_half_step, kinetic_soc_step
    if name not in _BACKENDS:
        raise ValueError(f"unknown backend {name!r}; available: {available_backends()}")
    previous = _active
    mod = _BACKENDS[name]
    potential_half_step = mod.potential_half_step
    kinetic_soc_step = mod.kinetic_soc_step
    _active = name
    return previous


if _kernels_ext is not None and os.environ.get("SPINSHUTTLE_PURE_PYTHON", "") != "1":
    use_backend("compiled")
