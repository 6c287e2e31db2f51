"""Lepagean regularization of first-order field Lagrangians.

A :class:`LepageanSystem` couples a Lagrangian on the first jet space of
``R^n x R^m`` with an antisymmetric 2-contact tensor ``g``.  From it the
package builds the regularity matrix, the generalized Legendre map and
Hamiltonian, the Hamilton p2-equations, and checks of their equivalence with
the Euler-Lagrange equations.
"""

from .chart import Chart, JetPoint
from .errors import *  # noqa: F401,F403
from .expr import Expr, to_text
from .gtensor import (
    ClosednessReport,
    GTensor,
    Violation,
    canonical_from_quadratic,
    closedness_check,
    dedonderize,
    random_constant,
    satellite,
)
from .hamilton import P2System, SectionPair, holonomy_gap, p2_system, prolong_section, residuals_on_section
from .io import load_problem, load_section, write_problem
from .lagrangian import (
    GeneralLagrangian,
    QuadraticLagrangian,
    dedonder,
    euler_lagrange_exprs,
    extract_quadratic,
    standard_regularity_report,
    velocity_hessian,
)
from .legendre import (
    LegendreMap,
    LepageanSystem,
    corollary1_check,
    dedonder_identities,
    invert_legendre,
    is_regular_at,
    krupka_matrix,
    legendre_map,
    regularity_matrix,
    regularize_affine,
)
from .parser import parse
from .poly import canonical, equals, simplify
from .presets import Preset, load_preset, run_preset_checks
from .verify import GridSection, equivalence_suite, grid_residual

__version__ = "0.1.0"
