"""Numerical certificates for unital operator spaces.

The compiled core lives in ``opcert._opcert``; this package re-exports it.
"""

from ._opcert import (  # noqa: F401
    InvalidInput,
    PreconditionError,
    Report,
    SolverConfig,
    SolverError,
    Space,
    __version__,
    ambient_system_check,
    catalog_names,
    certify_unitary,
    detect_cstar,
    detect_operator_system,
    hermitian_dims,
    recover_involution,
    recover_product,
    scalar_unitary_check,
)
