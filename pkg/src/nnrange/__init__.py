"""Normalized numerical range of complex matrices.

The range F_N(A) = {x*Ax / ||Ax|| : ||x|| = 1, Ax != 0} is computed as the
image of the Davis-Wielandt shell under h(v) = (v1 + i v2)/sqrt(v3).
"""
from __future__ import annotations

from .core import f_n_map, g_map, h_map, is_normal, sample_unit_vectors
from .errors import *  # noqa: F401,F403
from .geometry import convex_hull_3d, polygon_union_boundary, quartic_real_roots, real_roots
from .normal import (critical_level, facet_flat_segment, flat_region_circles, hyperbolic_arc,
                     membership_normal, membership_normal_many, normal_boundary)
from .oracle import directional_extremes, hausdorff_cloud_to_curve, sample_cloud
from .resultant import boundary_residual, restrict_x, sylvester_resultant
from .shell import GaussQ, Spectrum, ellipsoid_coeffs, jnr_commuting, normal_shell, polytope_contains
from .twobytwo import (boundary_2x2, boundary_imag_tr, boundary_two_arcs, classify, ellipse_at,
                       ellipse_center, ellipse_family, membership_2x2, symmetry_axis)

__version__ = "0.1.0"
