"""Explicit biharmonic Steklov spectra on boxes, exact counting and Weyl checks."""

__version__ = "0.1.0"

from .specfun import EvalMode, SpecfunDomainError, h_fn, t_fn, theta_fn
from .spectrum import (BoxDomain, ProblemVariant, SteklovMode, SteklovProblem,
                       eigenfunction_eval, eigenvalue_cubed, mode_frequency,
                       neumann_to_steklov, profile_derivatives, profile_Y, profile_Z,
                       steklov_residual)
from .counting import (CountReport, bracket_check, count_direct, count_radius,
                       ellipsoid_octant_volume, kth_eigenvalue, octant_surface_estimate)
from .weyl import (corollary_check, remainder_report, unit_ball_volume,
                   weyl_constant_biharmonic, weyl_constant_harmonic, weyl_sweep)
