"""Ground-truth generator: random N-fermion states, 1-RDMs, spectra, vertex probes."""
from .extremal import ExtremalResult, ValidationReport, extremal_spectrum, objective_and_gradient, validate_catalog
from .fermions import (
    OneRDM,
    WaveFunction,
    determinants,
    natural_occupations,
    one_rdm,
    pinned_family,
    random_state,
    rotate_orbitals,
    sample_spectra,
)
from .jacobi import eigh_descending, jacobi_eigh

__all__ = [
    "ExtremalResult",
    "OneRDM",
    "ValidationReport",
    "WaveFunction",
    "determinants",
    "eigh_descending",
    "extremal_spectrum",
    "jacobi_eigh",
    "natural_occupations",
    "objective_and_gradient",
    "one_rdm",
    "pinned_family",
    "random_state",
    "rotate_orbitals",
    "sample_spectra",
    "validate_catalog",
]
