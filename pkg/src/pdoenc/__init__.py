"""Gate-level construction kit for block encodings of discretized
pseudo-differential operators, with desk-scale simulation and verification."""

__version__ = "0.1.0"

from .kernels import BACKEND as KERNEL_BACKEND  # noqa: F401
