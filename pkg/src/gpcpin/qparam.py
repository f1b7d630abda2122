"""Non-triviality of (quasi)pinning: collective Pauli constraints and the Q-parameter.

For a GPC ``D`` the pair ``(r, s)`` counts how many occupation numbers must
be pinned to 1 (leading) and 0 (trailing) before ``D = 0`` is forced on the
polytope.  The polytope then satisfies ``D <= c * S_{r,s}`` with

    S_{r,s}(l) = sum_{i<=r} (1 - l_i) + sum_{j>d-s} l_j

and ``Q = log10(c * S / D)`` measures how much closer the spectrum is to the
facet of ``D`` than Pauli saturation alone would imply.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .catalog import Catalog, GPConstraint
from .lp import LPUnbounded, LPProblem, lp_max, polytope_problem, polytope_rows
from .pinning import evaluate
from .spectra import Spectrum

logger = logging.getLogger(__name__)

ENFORCE_TOL = 1e-10
Q_TOL = 1e-14


class NotEnforceable(ValueError):
    """No Pauli pinning pattern forces saturation of the constraint."""


@dataclass(frozen=True, order=True)
class CollectivePauliSpec:
    r: int
    s: int

    def __post_init__(self):
        if self.r < 0 or self.s < 0:
            raise ValueError("r and s must be non-negative")

    def check(self, dim: int) -> None:
        if self.r + self.s > dim:
            raise ValueError(f"r+s={self.r + self.s} exceeds d={dim}")


def s_value(spectrum: Spectrum, spec: CollectivePauliSpec) -> float:
    """Collective Pauli constraint ``S_{r,s}`` of the spectrum.

    A partial spectrum is accepted when it lists the first ``d - s`` values;
    the trailing sum then comes from normalization.
    """
    d, n = spectrum.setting.dim, spectrum.setting.n_particles
    spec.check(d)
    lam = spectrum.values
    head = [1.0 - x for x in lam[: spec.r]]
    if not spec.s:
        return math.fsum(head)
    if spectrum.n_listed == d:
        return math.fsum(head + list(lam[d - spec.s :]))
    if d - spec.s > spectrum.n_listed:
        raise ValueError(f"S_{{{spec.r},{spec.s}}} needs the first {d - spec.s} values")
    return math.fsum(head) + (n - math.fsum(lam[: d - spec.s]))


def _enforces(constraint: GPConstraint, catalog: Catalog, r: int, s: int, tol: float) -> bool:
    res = lp_max(polytope_problem(catalog, constraint.kappas, constraint.kappa0, r=r, s=s))
    return res.value <= tol


def enforcing_pairs(constraint: GPConstraint, catalog: Catalog, tol: float = ENFORCE_TOL):
    """All ``(r, s)`` with ``r <= N``, ``s <= d - N`` that force ``D = 0``, as a dict."""
    st = catalog.setting
    return {
        (r, s): _enforces(constraint, catalog, r, s, tol)
        for r in range(st.n_particles + 1)
        for s in range(st.dim - st.n_particles + 1)
    }


@lru_cache(maxsize=1024)
def minimal_spec(constraint: GPConstraint, catalog: Catalog, tol: float = ENFORCE_TOL) -> CollectivePauliSpec:
    """Smallest ``(r, s)`` under the order ``(r + s, r)`` whose pinning forces ``D = 0``.

    Forcing is decided by maximizing ``D`` over the catalog polytope with
    ``l_1 = .. = l_r = 1`` and ``l_{d-s+1} = .. = l_d = 0``.
    """
    st = catalog.setting
    if constraint.setting != st:
        raise ValueError("constraint and catalog settings differ")
    pairs = sorted(
        ((r, s) for r in range(st.n_particles + 1) for s in range(st.dim - st.n_particles + 1)),
        key=lambda rs: (rs[0] + rs[1], rs[0]),
    )
    for r, s in pairs:
        if _enforces(constraint, catalog, r, s, tol):
            return CollectivePauliSpec(r, s)
    raise NotEnforceable(f"constraint {constraint.label!r}: saturation is never forced by Pauli pinning")


def _fractional_problem(constraint: GPConstraint, spec: CollectivePauliSpec, catalog: Catalog) -> LPProblem:
    # max D/S over the polytope, homogenized with y = t*l, t = 1/S (Charnes-Cooper)
    d = catalog.setting.dim
    a_ub, b_ub, a_eq, b_eq = polytope_rows(catalog)
    hom_ub = [list(row) + [-b] for row, b in zip(a_ub, b_ub)]
    hom_eq = [list(row) + [-b] for row, b in zip(a_eq, b_eq)]
    s_row = [0] * (d + 1)
    for i in range(spec.r):
        s_row[i] = -1
    for j in range(d - spec.s, d):
        s_row[j] = 1
    s_row[d] = spec.r
    hom_eq.append(s_row)
    objective = list(constraint.kappas) + [constraint.kappa0]
    return LPProblem(tuple(objective), tuple(map(tuple, hom_ub)), (0,) * len(hom_ub),
                     tuple(map(tuple, hom_eq)), (0,) * (len(hom_eq) - 1) + (1,))


@lru_cache(maxsize=1024)
def prefactor_exact(constraint: GPConstraint, spec: CollectivePauliSpec, catalog: Catalog) -> Fraction:
    if spec.r == 0 and spec.s == 0:
        # D <= 0 on the whole polytope: D <= c*S holds for any c
        return Fraction(1)
    spec.check(catalog.setting.dim)
    try:
        sol = lp_max(_fractional_problem(constraint, spec, catalog))
    except LPUnbounded:
        raise NotEnforceable(
            f"constraint {constraint.label!r}: sup D/S_{{{spec.r},{spec.s}}} is infinite; "
            "the pair does not enforce saturation (see minimal_spec)"
        ) from None
    return sol.exact_value


def prefactor(constraint: GPConstraint, spec: CollectivePauliSpec, catalog: Catalog) -> float:
    """Smallest ``c`` with ``D <= c * S_{r,s}`` on the catalog polytope."""
    return float(prefactor_exact(constraint, spec, catalog))


@dataclass(frozen=True)
class QCertificate:
    constraint_label: str
    spec: CollectivePauliSpec
    c: float
    s_value: float
    d_value: float
    q: float
    approx: bool = False

    @property
    def pinned(self) -> bool:
        return math.isinf(self.q) and self.q > 0

    @property
    def factor(self) -> float:
        return 10.0**self.q if math.isfinite(self.q) else self.q

    def as_dict(self):
        return {
            "label": self.constraint_label,
            "r": self.spec.r,
            "s": self.spec.s,
            "c": self.c,
            "s_value": self.s_value,
            "d_value": self.d_value,
            "q": self.q if math.isfinite(self.q) else None,
            "factor": self.factor if math.isfinite(self.q) else None,
            "pinned": self.pinned,
            "approx_flag": self.approx,
        }


def q_value(c: float, s: float, dval: float, q_tol: float = Q_TOL) -> float:
    if dval <= q_tol:
        return math.inf
    ratio = c * s / dval
    return math.log10(ratio) if ratio > 0 else -math.inf


@dataclass(frozen=True)
class QReport:
    catalog: Catalog
    certificates: tuple[QCertificate, ...]
    not_enforceable: tuple[str, ...]
    approx: bool

    @property
    def overall_q(self) -> float | None:
        finite = [c.q for c in self.certificates if math.isfinite(c.q)]
        return max(finite) if finite else None

    @property
    def pinned_labels(self) -> list[str]:
        return [c.constraint_label for c in self.certificates if c.pinned]

    def certificate(self, label: str) -> QCertificate:
        for c in self.certificates:
            if c.constraint_label == label:
                return c
        raise KeyError(label)

    def as_dict(self):
        st = self.catalog.setting
        return {
            "setting": [st.n_particles, st.dim],
            "overall_q": self.overall_q,
            "approx_flag": self.approx,
            "note": "outer-polytope approximation: c is an upper bound" if self.approx else None,
            "pinned": self.pinned_labels,
            "not_enforceable": list(self.not_enforceable),
            "certificates": [c.as_dict() for c in self.certificates],
        }


def q_report(catalog: Catalog, spectrum: Spectrum, q_tol: float = Q_TOL) -> QReport:
    """One certificate per enforceable GPC of ``catalog``, evaluated on ``spectrum``."""
    if spectrum.setting != catalog.setting:
        raise ValueError(f"spectrum setting {spectrum.setting} does not match catalog {catalog.setting}")
    approx = not catalog.complete
    certs, skipped = [], []
    for con in catalog.gpcs:
        try:
            spec = minimal_spec(con, catalog)
        except NotEnforceable:
            skipped.append(con.label)
            continue
        c = prefactor(con, spec, catalog)
        sv = s_value(spectrum, spec)
        dv = evaluate(con, spectrum)
        certs.append(QCertificate(con.label, spec, c, sv, dv, q_value(c, sv, dv, q_tol), approx))
    if approx:
        logger.info("catalog %s is not marked complete: prefactors are upper bounds", catalog.setting)
    return QReport(catalog, tuple(certs), tuple(skipped), approx)
