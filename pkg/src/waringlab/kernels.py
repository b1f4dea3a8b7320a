"""Kernel backend selection.

The compiled extension ``waringlab._ckernels`` is used when it imports;
otherwise (or with ``WLAB_PURE_PYTHON=1`` in the environment) the numpy
implementations in ``waringlab._pykernels`` are used.  ``BACKEND`` names the
active choice.
"""
import os

from . import _pykernels as python_backend

compiled_backend = None
if not os.environ.get("WLAB_PURE_PYTHON"):
    try:
        from . import _ckernels as compiled_backend
    except ImportError:  # extension not built
        compiled_backend = None

_impl = compiled_backend if compiled_backend is not None else python_backend
BACKEND = "cython" if compiled_backend is not None else "python"

frac_phase = _impl.frac_phase
weyl_sum = _impl.weyl_sum
weyl_sum_many = _impl.weyl_sum_many
gauss_sum_direct = _impl.gauss_sum_direct
power_residue_histogram = _impl.power_residue_histogram
two_square_counts = _impl.two_square_counts
biquadrate_counts = _impl.biquadrate_counts
accumulate_shifted = _impl.accumulate_shifted
ntt_convolve = _impl.ntt_convolve

NTT_PRIMES = python_backend.NTT_PRIMES
NTT_MAX_LOG2 = python_backend.NTT_MAX_LOG2


def available_backends():
    """Map backend name -> module for every backend importable here."""
    out = {"python": python_backend}
    try:
        from . import _ckernels
    except ImportError:
        return out
    out["cython"] = _ckernels
    return out
