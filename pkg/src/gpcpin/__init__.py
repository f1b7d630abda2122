"""Generalized Pauli constraint pinning analysis for fermionic occupation spectra."""
__version__ = "0.1.0"

from .catalog import (
    Catalog,
    CatalogError,
    CatalogLibrary,
    GPConstraint,
    Setting,
    builtin_pauli_catalog,
    canonicalize,
    load_catalog,
    save_catalog,
    shipped_catalogs,
)
from .lp import LPInfeasible, LPProblem, LPUnbounded, lp_max, polytope_problem
from .pinning import ConstraintResult, PinningReport, analyze, evaluate, l1_distance
from .qparam import (
    CollectivePauliSpec,
    NotEnforceable,
    QCertificate,
    minimal_spec,
    prefactor,
    q_report,
    s_value,
)
from .spectra import (
    Spectrum,
    SpectrumError,
    detect_degenerate_pairs,
    load_fixture,
    load_spectrum,
    make_spectrum,
    save_spectrum,
)
from .truncation import BoundInterval, TruncationPlan, auto_plan, bound, scan, truncate
