"""Pure-numpy implementations of the split-operator hot kernels.

Same contracts as the compiled extension ``_kernels``; all operations are
in-place on contiguous complex128 arrays.
"""

import numpy as np


def potential_half_step(up, down, x, x0, harm_coeff, g_coeff):
    """Multiply both components by exp(-i*(harm*(x-x0)^2 + g*density))."""
    arg = harm_coeff * (x - x0) ** 2
    if g_coeff != 0.0:
        arg += g_coeff * (up.real ** 2 + up.imag ** 2 + down.real ** 2 + down.imag ** 2)
    phase = np.exp(-1j * arg)
    up *= phase
    down *= phase


def kinetic_soc_step(up_k, down_k, kin_phase, k, soc_coeff):
    """Momentum-space step: kin_phase * exp(-+i*soc*k) per spin component.

    ``kin_phase`` is the precomputed constant factor exp(-i*kin_coeff*k^2).
    """
    soc_phase = np.exp(-1j * (soc_coeff * k))
    up_k *= kin_phase * soc_phase
    down_k *= kin_phase * np.conj(soc_phase)
