"""Constraint catalogs for a fixed setting (N, d).

A catalog holds the generalized Pauli constraints (GPCs) of one setting as
exact integer coefficient vectors.  The original Pauli constraints and the
ordering constraints are generated on demand by :func:`builtin_pauli_catalog`
and are never stored in catalog files.

Catalog file format::

    # comment
    #! complete
    gpc-catalog 1
    N d
    <label> k0 k1 ... kd

The ``#! complete`` pragma declares that the listed constraints describe the
whole polytope of the setting; without it the catalog is treated as an outer
approximation.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from functools import reduce
from pathlib import Path
from typing import Iterable, Sequence

FORMAT_TAG = "gpc-catalog 1"
COMPLETE_PRAGMA = "#! complete"
CATALOG_DIR_ENV = "GPCPIN_CATALOG_DIR"


class CatalogError(ValueError):
    """Malformed catalog data; ``line`` is the 1-based source line if known."""

    def __init__(self, message: str, line: int | None = None, path=None):
        self.line = line
        self.path = None if path is None else str(path)
        where = ""
        if path is not None:
            where += f"{path}"
        if line is not None:
            where += f":{line}"
        super().__init__(f"{where}: {message}" if where else message)


@dataclass(frozen=True, order=True)
class Setting:
    n_particles: int
    dim: int

    def __post_init__(self):
        if not isinstance(self.n_particles, int) or not isinstance(self.dim, int):
            raise TypeError("setting entries must be integers")
        if self.n_particles < 1 or self.dim < self.n_particles:
            raise ValueError(f"invalid setting ({self.n_particles},{self.dim}): need 1 <= N <= d")

    @classmethod
    def parse(cls, text: str) -> "Setting":
        """Parse ``"N,d"`` (also accepts ``"(N,d)"`` and ``"N d"``)."""
        parts = text.strip().strip("()").replace(",", " ").split()
        if len(parts) != 2:
            raise ValueError(f"cannot parse setting {text!r}")
        return cls(int(parts[0]), int(parts[1]))

    def hartree_fock(self) -> tuple[int, ...]:
        return (1,) * self.n_particles + (0,) * (self.dim - self.n_particles)

    def __str__(self):
        return f"({self.n_particles},{self.dim})"


@dataclass(frozen=True)
class GPConstraint:
    """Linear inequality ``kappa0 + sum_k kappas[k-1] * lambda_k >= 0``."""

    setting: Setting
    kappa0: int
    kappas: tuple[int, ...]
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "kappas", tuple(int(k) for k in self.kappas))
        object.__setattr__(self, "kappa0", int(self.kappa0))
        if len(self.kappas) != self.setting.dim:
            raise CatalogError(
                f"constraint {self.label!r} has {len(self.kappas)} coefficients, expected d={self.setting.dim}"
            )
        if self.kappa0 == 0 and not any(self.kappas):
            raise CatalogError(f"constraint {self.label!r} has all-zero coefficients")

    @property
    def coefficients(self) -> tuple[int, ...]:
        return (self.kappa0,) + self.kappas

    @property
    def kappa_max(self) -> int:
        # kappa0 is excluded: the l1 distance normalizes by max_{1<=j<=d} |kappa_j|
        return max(abs(k) for k in self.kappas)

    def value_at(self, point: Sequence[int]) -> int:
        """Exact value on an integer point such as the Hartree-Fock spectrum."""
        return self.kappa0 + sum(k * x for k, x in zip(self.kappas, point))

    def hartree_fock_value(self) -> int:
        return self.value_at(self.setting.hartree_fock())

    def scaled(self, factor: int) -> "GPConstraint":
        if factor <= 0:
            raise ValueError("scale factor must be a positive integer")
        return GPConstraint(self.setting, factor * self.kappa0, tuple(factor * k for k in self.kappas), self.label)

    def format_line(self) -> str:
        return " ".join([self.label] + [str(c) for c in self.coefficients])


def canonicalize(constraint: GPConstraint) -> GPConstraint:
    """Divide by the coefficient GCD and orient so the constraint holds at Hartree-Fock."""
    coeffs = constraint.coefficients
    g = reduce(math.gcd, (abs(c) for c in coeffs))
    if g == 0:
        raise CatalogError(f"constraint {constraint.label!r} has all-zero coefficients")
    coeffs = [c // g for c in coeffs]
    hf = coeffs[0] + sum(coeffs[1 : 1 + constraint.setting.n_particles])
    if hf < 0:
        coeffs = [-c for c in coeffs]
    return GPConstraint(constraint.setting, coeffs[0], tuple(coeffs[1:]), constraint.label)


@dataclass(frozen=True)
class Catalog:
    setting: Setting
    gpcs: tuple[GPConstraint, ...]
    complete: bool = False
    source: str | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "gpcs", tuple(self.gpcs))
        seen = set()
        for c in self.gpcs:
            if c.setting != self.setting:
                raise CatalogError(f"constraint {c.label!r} belongs to {c.setting}, catalog is {self.setting}")
            if c.label in seen:
                raise CatalogError(f"duplicate label {c.label!r}")
            seen.add(c.label)

    def __len__(self):
        return len(self.gpcs)

    def __iter__(self):
        return iter(self.gpcs)

    def __getitem__(self, label: str) -> GPConstraint:
        for c in self.gpcs:
            if c.label == label:
                return c
        raise KeyError(label)

    @property
    def labels(self) -> list[str]:
        return [c.label for c in self.gpcs]

    def replace(self, gpcs: Iterable[GPConstraint]) -> "Catalog":
        return Catalog(self.setting, tuple(gpcs), complete=False, source=self.source)


def builtin_pauli_catalog(setting: Setting) -> Catalog:
    """The d+1 original Pauli constraints ``1 >= l_1 >= ... >= l_d >= 0``."""
    d = setting.dim
    out = [GPConstraint(setting, 1, tuple(-1 if j == 0 else 0 for j in range(d)), "P0")]
    for i in range(d - 1):
        kap = [0] * d
        kap[i], kap[i + 1] = 1, -1
        out.append(GPConstraint(setting, 0, tuple(kap), f"O{i + 1}"))
    out.append(GPConstraint(setting, 0, tuple(1 if j == d - 1 else 0 for j in range(d)), f"P{d}"))
    return Catalog(setting, tuple(out), complete=False, source="builtin")


def _parse_int(token: str, lineno: int, path) -> int:
    try:
        return int(token)
    except ValueError:
        raise CatalogError(f"non-integer coefficient {token!r}", lineno, path) from None


def parse_catalog(text: str, path=None) -> Catalog:
    complete = False
    header_seen = False
    setting = None
    gpcs = []
    labels = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            if line.replace(" ", "") == COMPLETE_PRAGMA.replace(" ", ""):
                complete = True
            continue
        if not header_seen:
            if " ".join(line.split()) != FORMAT_TAG:
                raise CatalogError(f"expected header {FORMAT_TAG!r}, got {line!r}", lineno, path)
            header_seen = True
            continue
        if setting is None:
            parts = line.split()
            if len(parts) != 2:
                raise CatalogError("setting line must be 'N d'", lineno, path)
            try:
                setting = Setting(_parse_int(parts[0], lineno, path), _parse_int(parts[1], lineno, path))
            except ValueError as exc:
                if isinstance(exc, CatalogError):
                    raise
                raise CatalogError(str(exc), lineno, path) from None
            continue
        label, *tokens = line.split()
        if len(tokens) != setting.dim + 1:
            raise CatalogError(
                f"constraint {label!r} has {len(tokens)} coefficients, expected d+1={setting.dim + 1}", lineno, path
            )
        if label in labels:
            raise CatalogError(f"duplicate label {label!r}", lineno, path)
        coeffs = [_parse_int(t, lineno, path) for t in tokens]
        try:
            gpc = GPConstraint(setting, coeffs[0], tuple(coeffs[1:]), label)
        except CatalogError as exc:
            raise CatalogError(str(exc), lineno, path) from None
        if gpc.hartree_fock_value() < 0:
            raise CatalogError(f"constraint {label!r} is violated at the Hartree-Fock point", lineno, path)
        labels.add(label)
        gpcs.append(gpc)
    if not header_seen:
        raise CatalogError(f"missing header {FORMAT_TAG!r}", None, path)
    if setting is None:
        raise CatalogError("missing 'N d' setting line", None, path)
    return Catalog(setting, tuple(gpcs), complete=complete, source=None if path is None else str(path))


def load_catalog(path) -> Catalog:
    path = Path(path)
    return parse_catalog(path.read_text(encoding="utf-8"), path=path)


def format_catalog(catalog: Catalog, comment: str | None = None) -> str:
    lines = []
    if comment:
        lines += [f"# {c}" for c in comment.splitlines()]
    if catalog.complete:
        lines.append(COMPLETE_PRAGMA)
    lines.append(FORMAT_TAG)
    lines.append(f"{catalog.setting.n_particles} {catalog.setting.dim}")
    lines += [c.format_line() for c in catalog.gpcs]
    return "\n".join(lines) + "\n"


def save_catalog(catalog: Catalog, path, comment: str | None = None) -> None:
    Path(path).write_text(format_catalog(catalog, comment), encoding="utf-8")


def shipped_catalog_dir() -> Path:
    return Path(__file__).with_name("catalogs")


def default_catalog_dir() -> Path:
    env = os.environ.get(CATALOG_DIR_ENV)
    return Path(env) if env else shipped_catalog_dir()


class CatalogLibrary:
    """Catalogs of a directory indexed by setting.

    Every ``*.gpc`` file is read; the setting comes from its header, so the
    file name is free.  Two files declaring the same setting are an error.
    """

    def __init__(self, catalogs: Iterable[Catalog] = ()):
        self._by_setting: dict[Setting, Catalog] = {}
        for cat in catalogs:
            self.add(cat)

    def add(self, catalog: Catalog) -> None:
        if catalog.setting in self._by_setting:
            raise CatalogError(f"two catalogs for setting {catalog.setting}", path=catalog.source)
        self._by_setting[catalog.setting] = catalog

    @classmethod
    def from_dir(cls, directory=None) -> "CatalogLibrary":
        directory = default_catalog_dir() if directory is None else Path(directory)
        if not directory.is_dir():
            raise FileNotFoundError(f"catalog directory {directory} does not exist")
        return cls(load_catalog(p) for p in sorted(directory.glob("*.gpc")))

    def get(self, setting: Setting) -> Catalog | None:
        return self._by_setting.get(setting)

    def __contains__(self, setting):
        return setting in self._by_setting

    def __getitem__(self, setting: Setting) -> Catalog:
        try:
            return self._by_setting[setting]
        except KeyError:
            raise KeyError(f"no catalog for setting {setting}") from None

    @property
    def settings(self) -> list[Setting]:
        return sorted(self._by_setting)


def shipped_catalogs() -> CatalogLibrary:
    return CatalogLibrary.from_dir(shipped_catalog_dir())
