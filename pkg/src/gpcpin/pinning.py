"""Constraint saturations, l1 distances to facet hyperplanes, minimal distances."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .catalog import Catalog, GPConstraint, Setting, builtin_pauli_catalog
from .spectra import Spectrum

_SPLITTER = 134217729.0  # 2**27 + 1


def _split(a: float) -> tuple[float, float]:
    c = _SPLITTER * a
    hi = c - (c - a)
    return hi, a - hi


def two_product(a: float, b: float) -> tuple[float, float]:
    """Error-free product: ``a*b == p + e`` exactly (Dekker/Veltkamp)."""
    p = a * b
    ah, al = _split(a)
    bh, bl = _split(b)
    e = ((ah * bh - p) + ah * bl + al * bh) + al * bl
    return p, e


def _values(spectrum) -> tuple[np.ndarray, int | None]:
    if isinstance(spectrum, Spectrum):
        if spectrum.n_listed != spectrum.setting.dim:
            raise ValueError(
                f"spectrum lists {spectrum.n_listed} of d={spectrum.setting.dim} values; truncate it first"
            )
        return spectrum.values, spectrum.setting.dim
    return np.asarray(spectrum, dtype=float), None


def evaluate(constraint: GPConstraint, spectrum: Spectrum | Sequence[float]) -> float:
    """Saturation ``D(l) = k0 + sum_k k_k l_k``.

    Products are split error-free and the pieces summed with ``math.fsum``,
    so the result is the correctly rounded value of the exact sum for the
    given floating-point inputs.
    """
    lam, _ = _values(spectrum)
    if len(lam) != constraint.setting.dim:
        raise ValueError(f"dimension mismatch: spectrum has {len(lam)} values, constraint expects {constraint.setting.dim}")
    parts = []
    # descending index: the near-1 entries enter last
    for k in range(len(lam) - 1, -1, -1):
        kap = constraint.kappas[k]
        if kap:
            p, e = two_product(float(kap), float(lam[k]))
            parts.append(e)
            parts.append(p)
    parts.append(float(constraint.kappa0))
    return math.fsum(parts)


def l1_distance(constraint: GPConstraint, spectrum: Spectrum | Sequence[float]) -> float:
    """Signed l1 distance to the hyperplane ``D = 0``; negative when crossed."""
    return evaluate(constraint, spectrum) / constraint.kappa_max


def saturation_matrix(catalog: Catalog, samples: np.ndarray) -> np.ndarray:
    """Plain float saturations for a batch of spectra, shape (n_samples, n_constraints)."""
    samples = np.atleast_2d(np.asarray(samples, dtype=float))
    kap = np.array([c.kappas for c in catalog.gpcs], dtype=float)
    k0 = np.array([c.kappa0 for c in catalog.gpcs], dtype=float)
    return samples @ kap.T + k0


@dataclass(frozen=True)
class ConstraintResult:
    label: str
    saturation: float
    l1_distance: float
    kappa_max: int

    def as_dict(self):
        return {
            "label": self.label,
            "saturation": self.saturation,
            "l1_distance": self.l1_distance,
            "kappa_max": self.kappa_max,
        }


@dataclass(frozen=True)
class PinningReport:
    setting: Setting
    results: tuple[ConstraintResult, ...]
    d_min: float
    argmin_label: str
    pauli_d_min: float
    pauli_argmin_label: str
    include_builtin: bool = False

    def result(self, label: str) -> ConstraintResult:
        for r in self.results:
            if r.label == label:
                return r
        raise KeyError(label)

    def as_dict(self):
        return {
            "setting": [self.setting.n_particles, self.setting.dim],
            "d_min": self.d_min,
            "argmin": self.argmin_label,
            "pauli_d_min": self.pauli_d_min,
            "pauli_argmin": self.pauli_argmin_label,
            "include_builtin": self.include_builtin,
            "results": [r.as_dict() for r in self.results],
        }


def _results(catalog: Catalog, spectrum) -> list[ConstraintResult]:
    out = []
    for c in catalog.gpcs:
        sat = evaluate(c, spectrum)
        out.append(ConstraintResult(c.label, sat, sat / c.kappa_max, c.kappa_max))
    return out


def _argmin(results: list[ConstraintResult]) -> ConstraintResult:
    return min(results, key=lambda r: (r.l1_distance, r.label))


def analyze(catalog: Catalog, spectrum: Spectrum, include_builtin: bool = False) -> PinningReport:
    """Distances of ``spectrum`` to every constraint hyperplane of ``catalog``.

    ``d_min`` ranges over the catalog GPCs only unless ``include_builtin``
    adds the ordering and Pauli constraints.  ``pauli_d_min`` is always the
    minimum over the built-in Pauli catalog.
    """
    if spectrum.setting != catalog.setting:
        raise ValueError(f"spectrum setting {spectrum.setting} does not match catalog {catalog.setting}")
    if not catalog.gpcs:
        raise ValueError("empty catalog")
    results = _results(catalog, spectrum)
    pauli = _results(builtin_pauli_catalog(catalog.setting), spectrum)
    pool = results + pauli if include_builtin else results
    best = _argmin(pool)
    pbest = _argmin(pauli)
    results.sort(key=lambda r: (abs(r.l1_distance), r.label))
    return PinningReport(
        setting=catalog.setting,
        results=tuple(results),
        d_min=best.l1_distance,
        argmin_label=best.label,
        pauli_d_min=pbest.l1_distance,
        pauli_argmin_label=pbest.label,
        include_builtin=include_builtin,
    )
