"""Cohomology of twisted symmetric powers of cotangent bundles of smooth
complete intersections, computed by exact linear algebra over prime fields.
"""

__version__ = "0.1.0"

from .complexes import ConsistencyError, Problem, ValidityError  # noqa: E402
from .cohomology import h0_surface_positive_twist, h_i, phi_kernel, plane_curve_oracle, psi_kernel  # noqa: E402

__all__ = [
    "__version__",
    "ConsistencyError",
    "Problem",
    "ValidityError",
    "h0_surface_positive_twist",
    "h_i",
    "phi_kernel",
    "plane_curve_oracle",
    "psi_kernel",
]
