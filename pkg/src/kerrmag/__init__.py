"""Steady states, stability and magnonic nonreciprocity of a parametrically
driven cavity coupled to a magnonic cavity with Kerr magnons."""
from ._backend import BACKEND
from .params import (CONSTANTS, DriveConfig, SystemParams, drive_amplitude,
                     kerr_from_material, magnon_frequency_from_field)
from .stability import Stability, build_jacobian, classify, find_turning_points
from .steady_state import (QuinticPoly, RootTolerances, SteadyStateBranch, eval_abomega,
                           quintic_coefficients, recover_branch, solve_quintic,
                           steady_states)

__version__ = "0.1.0"
