"""Exact dbar-equation toolkit on truncated Gaussian sequence spaces."""
from .errors import *  # noqa: F401,F403
from .forms import Form, dbar, dbar_adjoint, inner_forms, norm_sq, parse_form, format_form
from .gaussian import WeightSequence
from .polyalg import PolyFn, parse_poly, format_poly
from .qi import QI
from .solver import AnsatzSpec, SolveReport, check_closed, solve_minimal

__version__ = "0.1.0"
