"""Spectrum truncation (N,d) -> (N',d'), truncation error and distance bounds."""
from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .catalog import CatalogLibrary, Setting
from .pinning import analyze
from .spectra import TOL_NORM, Spectrum

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TruncationPlan:
    """Drop ``r`` leading (near 1) and ``s`` trailing (near 0) occupation numbers."""

    r: int
    s: int
    original: Setting
    reduced: Setting
    epsilon: float
    tail_from_normalization: bool = False

    def as_dict(self):
        return {
            "r": self.r,
            "s": self.s,
            "original": [self.original.n_particles, self.original.dim],
            "reduced": [self.reduced.n_particles, self.reduced.dim],
            "epsilon": self.epsilon,
            "tail_from_normalization": self.tail_from_normalization,
        }


@dataclass(frozen=True)
class BoundInterval:
    """Two-sided bound on the full-setting D_min from a truncated analysis.

    The upper end follows from the triangle inequality alone.  The lower end
    additionally assumes the geometric prefactor c equals 1 (in general
    c <= 1), hence the flag.
    """

    lower: float
    upper: float
    dprime_min: float
    epsilon: float
    assumes_c_equal_1: bool = True

    @property
    def raw_lower(self) -> float:
        return self.dprime_min - self.epsilon

    @property
    def excludes_pinning(self) -> bool:
        return self.lower > 0

    def as_dict(self):
        return {
            "lower": self.lower,
            "upper": self.upper,
            "dprime_min": self.dprime_min,
            "epsilon": self.epsilon,
            "assumes_c_equal_1": self.assumes_c_equal_1,
        }


def _check_rs(spectrum: Spectrum, r: int, s: int) -> Setting:
    n, d = spectrum.setting.n_particles, spectrum.setting.dim
    if not (0 <= r < n):
        raise ValueError(f"r={r} out of range: need 0 <= r < N={n}")
    if not (0 <= s <= d - n):
        raise ValueError(f"s={s} out of range: need 0 <= s <= d-N={d - n}")
    reduced = Setting(n - r, d - r - s)
    if r + reduced.dim > spectrum.n_listed:
        raise ValueError(
            f"truncation to {reduced} with r={r} needs {r + reduced.dim} listed values, spectrum has {spectrum.n_listed}"
        )
    return reduced


def truncation_error(spectrum: Spectrum, r: int, s: int, tol: float = TOL_NORM) -> tuple[float, bool]:
    """epsilon' = sum_{j<=r} (1 - l_j) + sum_{k>d-s} l_k.

    When the spectrum does not list all d values the trailing sum is closed
    through normalization as ``N - sum_{j<=d-s} l_j``.  Returns the error and
    whether normalization was used.
    """
    reduced = _check_rs(spectrum, r, s)
    lam = spectrum.values
    n, d = spectrum.setting.n_particles, spectrum.setting.dim
    head = math.fsum(1.0 - x for x in lam[:r]) if r else 0.0
    keep_end = r + reduced.dim
    if spectrum.n_listed == d:
        tail = math.fsum(lam[keep_end:])
        return head + tail, False
    tail = n - math.fsum(lam[:keep_end])
    if tail < -tol:
        raise ValueError(f"inconsistent partial spectrum: tail weight {tail:.3g} < 0")
    return head + max(tail, 0.0), True


def epsilon_index_form(spectrum: Spectrum, reduced: Setting) -> float:
    """Truncation error written with a head count ``N-N'`` and tail index ``k = 0 .. d-d'-N+N'-1``.

    The tail holds ``d - d' - (N - N')`` entries, the number of dropped
    near-zero values.  Needs a fully listed spectrum.  Serves as a
    cross-check of the (r, s) form in :func:`truncation_error`.
    """
    n, d = spectrum.setting.n_particles, spectrum.setting.dim
    if spectrum.n_listed != d:
        raise ValueError("index form needs all d values")
    lam = spectrum.values
    head = [1.0 - lam[j - 1] for j in range(1, n - reduced.n_particles + 1)]
    tail = [lam[d - k - 1] for k in range(0, d - reduced.dim - n + reduced.n_particles)]
    return math.fsum(head + tail)


def truncate(spectrum: Spectrum, r: int, s: int) -> tuple[Spectrum, TruncationPlan]:
    """Keep ``l_{r+1} .. l_{d-s}`` as the spectrum of setting (N-r, d-r-s).

    The truncated vector is deliberately not renormalized; it may lie
    outside the reduced polytope.
    """
    reduced = _check_rs(spectrum, r, s)
    eps, from_norm = truncation_error(spectrum, r, s)
    if not from_norm:
        assert abs(eps - epsilon_index_form(spectrum, reduced)) <= 1e-15 * max(1.0, spectrum.setting.dim)
    kept = np.array(spectrum.values[r : r + reduced.dim])
    kept.setflags(write=False)
    meta = dict(spectrum.meta)
    meta.update({"truncated_from": [spectrum.setting.n_particles, spectrum.setting.dim], "r": r, "s": s})
    order = spectrum.order[r : r + reduced.dim] if spectrum.order else ()
    trunc = Spectrum(reduced, kept, False, meta, order)
    plan = TruncationPlan(r, s, spectrum.setting, reduced, eps, from_norm)
    return trunc, plan


def bound(dprime_min: float, epsilon: float) -> BoundInterval:
    """Interval ``[max(0, D'_min - eps), D'_min + eps]`` for the full D_min."""
    if epsilon < 0:
        raise ValueError("epsilon must be non-negative")
    return BoundInterval(max(0.0, dprime_min - epsilon), dprime_min + epsilon, dprime_min, epsilon)


def plan_for(spectrum: Spectrum, reduced: Setting) -> TruncationPlan:
    n, d = spectrum.setting.n_particles, spectrum.setting.dim
    r = n - reduced.n_particles
    s = d - reduced.dim - r
    if r < 0 or s < 0:
        raise ValueError(f"{reduced} is not a truncation of {spectrum.setting}")
    eps, from_norm = truncation_error(spectrum, r, s)
    return TruncationPlan(r, s, spectrum.setting, reduced, eps, from_norm)


def auto_plan(spectrum: Spectrum, available: Iterable[Setting]) -> TruncationPlan:
    """Pick the available reduced setting with the smallest truncation error.

    Ties prefer larger d', then larger N'.
    """
    available = list(available)
    if not available:
        raise ValueError("no available settings")
    plans = []
    for st in available:
        try:
            plans.append(plan_for(spectrum, st))
        except ValueError as exc:
            logger.debug("setting %s not usable: %s", st, exc)
    if not plans:
        raise ValueError(f"no available setting is a feasible truncation of {spectrum.setting} "
                         f"with {spectrum.n_listed} listed values")
    return min(plans, key=lambda p: (p.epsilon, -p.reduced.dim, -p.reduced.n_particles))


@dataclass(frozen=True)
class ScanRecord:
    setting: Setting
    plan: TruncationPlan
    dprime_min: float
    argmin_label: str
    interval: BoundInterval

    @property
    def epsilon(self) -> float:
        return self.plan.epsilon

    def as_dict(self):
        return {
            "setting": [self.setting.n_particles, self.setting.dim],
            "r": self.plan.r,
            "s": self.plan.s,
            "dprime_min": self.dprime_min,
            "argmin": self.argmin_label,
            "epsilon": self.epsilon,
            "lower": self.interval.lower,
            "upper": self.interval.upper,
        }


@dataclass
class ScanResult:
    records: list[ScanRecord] = field(default_factory=list)
    skipped: list[tuple[Setting, str]] = field(default_factory=list)

    def __iter__(self):
        return iter(self.records)

    def __len__(self):
        return len(self.records)

    def series(self) -> list[tuple[Setting, float, float]]:
        return [(r.setting, r.dprime_min, r.epsilon) for r in self.records]

    def inconsistent_pairs(self) -> list[tuple[Setting, Setting]]:
        """Pairs whose intervals ``[D'-eps, D'+eps]`` do not overlap.

        Every interval must contain the same full-setting D_min (under
        c = 1), so any pair listed here signals a catalog or data problem.
        """
        bad = []
        for a, b in itertools.combinations(self.records, 2):
            lo = max(a.dprime_min - a.epsilon, b.dprime_min - b.epsilon)
            hi = min(a.dprime_min + a.epsilon, b.dprime_min + b.epsilon)
            if lo > hi:
                bad.append((a.setting, b.setting))
        return bad

    def as_dict(self):
        return {
            "records": [r.as_dict() for r in self.records],
            "skipped": [{"setting": [s.n_particles, s.dim], "reason": why} for s, why in self.skipped],
            "inconsistent_pairs": [[[a.n_particles, a.dim], [b.n_particles, b.dim]] for a, b in self.inconsistent_pairs()],
        }

    def to_tsv(self) -> str:
        lines = ["n_prime\td_prime\tdprime_min\tepsilon"]
        for r in self.records:
            lines.append(
                f"{r.setting.n_particles}\t{r.setting.dim}\t{format(r.dprime_min, '.17g')}\t{format(r.epsilon, '.17g')}"
            )
        return "\n".join(lines) + "\n"


def _lookup(catalogs, setting):
    if isinstance(catalogs, CatalogLibrary):
        return catalogs.get(setting)
    if isinstance(catalogs, Mapping):
        return catalogs.get(setting)
    for c in catalogs:
        if c.setting == setting:
            return c
    return None


def scan(spectrum: Spectrum, settings: Sequence[Setting], catalogs, include_builtin: bool = False) -> ScanResult:
    """Truncate to each setting, analyze, and record ``(setting, D'_min, eps')``.

    Settings without a catalog or without a feasible truncation are skipped
    with a warning and listed in ``ScanResult.skipped``.
    """
    result = ScanResult()
    for st in settings:
        cat = _lookup(catalogs, st)
        if cat is None:
            logger.warning("no catalog for setting %s; skipped", st)
            result.skipped.append((st, "missing catalog"))
            continue
        try:
            plan = plan_for(spectrum, st)
        except ValueError as exc:
            logger.warning("setting %s skipped: %s", st, exc)
            result.skipped.append((st, str(exc)))
            continue
        trunc, plan = truncate(spectrum, plan.r, plan.s)
        rep = analyze(cat, trunc, include_builtin=include_builtin)
        result.records.append(ScanRecord(st, plan, rep.d_min, rep.argmin_label, bound(rep.d_min, plan.epsilon)))
    for a, b in result.inconsistent_pairs():
        logger.warning("bound intervals of %s and %s do not intersect", a, b)
    return result
