"""Gauss-skizze toolkit.

Traces, classifies, enumerates and deforms the bi-colored embedded forests
Re P = 0 / Im P = 0 attached to monic complex polynomials.
"""

from .backend import ACTIVE_BACKEND
from .poly import (
    CriticalData,
    Polynomial,
    RootSet,
    critical_data,
    find_roots,
    format_poly,
    from_roots,
    parse_poly,
    root_bound,
    trace_radius,
)

__all__ = [
    "ACTIVE_BACKEND",
    "CriticalData",
    "Polynomial",
    "RootSet",
    "critical_data",
    "find_roots",
    "format_poly",
    "from_roots",
    "parse_poly",
    "root_bound",
    "trace_radius",
]
