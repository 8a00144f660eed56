"""Backend selection for the hot loops.

The compiled extension is used when it imports; otherwise the numpy fallback.
Setting ``WAVEBRANCH_PURE=1`` forces the fallback.
"""
import os

if os.environ.get("WAVEBRANCH_PURE", "") not in ("", "0"):
    from wavebranch import _pykernels as impl
    BACKEND = "python"
else:
    try:
        from wavebranch import _ckernels as impl
        BACKEND = "cython"
    except ImportError:  # extension not built
        from wavebranch import _pykernels as impl
        BACKEND = "python"

horner = impl.horner
quad_power = impl.quad_power
shoot_profile = impl.shoot_profile
shoot_end = impl.shoot_end
sturm_count = impl.sturm_count
tridiag_lowest = impl.tridiag_lowest

__all__ = [
    "BACKEND",
    "horner",
    "quad_power",
    "shoot_profile",
    "shoot_end",
    "sturm_count",
    "tridiag_lowest",
]
