"""Shot-sampling kernels: compiled extension with a pure-numpy fallback.

The compiled kernel is selected at import when available; both backends draw
identical counter-based random streams, so they are interchangeable up to
libm rounding.  ``BACKEND`` names the one in use.
"""

from . import numpy_backend

try:
    from . import _shotsim as _impl

    BACKEND = "compiled"
except ImportError:
    _impl = numpy_backend
    BACKEND = "numpy"

simulate_quadratures = _impl.simulate_quadratures
shot_uniforms = _impl.shot_uniforms

__all__ = ["BACKEND", "simulate_quadratures", "shot_uniforms", "numpy_backend"]
