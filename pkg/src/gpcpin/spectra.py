"""Natural-occupation-number spectra: validation, file I/O, fixtures."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .catalog import Setting

logger = logging.getLogger(__name__)

TOL_ORDER = 1e-12
TOL_NORM = 1e-8
# ordering violations up to this size are repaired by re-sorting, larger ones are rejected
RESORT_LIMIT = 1e-9


class SpectrumError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Decreasingly ordered occupation numbers of an N-fermion state.

    ``values`` may hold fewer than ``setting.dim`` entries when ``partial`` is
    set; the unlisted weight is then ``tail_weight``.  ``order[i]`` is the
    input position of ``values[i]``.
    """

    setting: Setting
    values: np.ndarray
    partial: bool = False
    meta: dict = field(default_factory=dict)
    order: tuple[int, ...] = ()

    @property
    def n_listed(self) -> int:
        return len(self.values)

    @property
    def tail_weight(self) -> float:
        """Weight not carried by the listed entries, ``N - sum(values)``."""
        return self.setting.n_particles - math.fsum(self.values)

    def __len__(self):
        return len(self.values)

    def __getitem__(self, k):
        return self.values[k]


def make_spectrum(
    values: Sequence[float],
    setting: Setting,
    partial: bool = False,
    *,
    meta: dict | None = None,
    tol_order: float = TOL_ORDER,
    tol_norm: float = TOL_NORM,
    sort: bool = False,
) -> Spectrum:
    """Validate ``values`` and wrap them in a :class:`Spectrum`.

    With ``sort=True`` the values are sorted descending unconditionally (use
    for raw eigensolver output).  Otherwise small ordering defects up to
    ``RESORT_LIMIT`` are repaired with a warning and larger ones raise.
    """
    vals = np.array(values, dtype=float).ravel()
    n, d = setting.n_particles, setting.dim
    if vals.size == 0:
        raise SpectrumError("empty spectrum")
    if not np.all(np.isfinite(vals)):
        raise SpectrumError("spectrum contains non-finite values")
    if partial:
        if vals.size > d:
            raise SpectrumError(f"{vals.size} values listed for d={d}")
    elif vals.size != d:
        raise SpectrumError(f"expected d={d} values, got {vals.size} (set partial for truncated listings)")

    order = np.arange(vals.size)
    rises = np.diff(vals)
    worst = float(rises.max()) if rises.size else 0.0
    if sort or worst > tol_order:
        if not sort:
            bad = int(np.argmax(rises)) + 1
            if worst > RESORT_LIMIT:
                raise SpectrumError(
                    f"values not decreasing: entry {bad + 1} exceeds entry {bad} by {worst:.3g}"
                )
            logger.warning("spectrum re-sorted: ordering defect %.3g within %.0e", worst, RESORT_LIMIT)
        order = np.argsort(-vals, kind="stable")
        vals = vals[order]

    lo, hi = float(vals.min()), float(vals.max())
    if lo < -tol_order or hi > 1 + tol_order:
        raise SpectrumError(f"values must lie in [0,1]: found range [{lo:.17g}, {hi:.17g}]")

    total = math.fsum(vals)
    if partial:
        if n - total < -tol_norm:
            raise SpectrumError(f"listed values sum to {total:.17g} > N={n}: negative tail weight")
    elif abs(total - n) > tol_norm:
        raise SpectrumError(f"values sum to {total:.17g}, expected N={n} within {tol_norm:g}")

    vals.setflags(write=False)
    return Spectrum(setting, vals, bool(partial), dict(meta or {}), tuple(int(i) for i in order))


def parse_spectrum(
    text: str,
    setting: Setting | None = None,
    partial: bool | None = None,
    *,
    tol_order: float = TOL_ORDER,
    tol_norm: float = TOL_NORM,
    source=None,
) -> Spectrum:
    """Parse the text spectrum format.

    An optional ``N <int> d <int> partial <0|1>`` header may precede the
    values.  Explicit ``setting``/``partial`` arguments override it.
    """
    header = {}
    values = []
    comments = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            comments.append(line.lstrip("#").strip())
            continue
        if line[0] == "N" and not values:
            toks = line.split()
            try:
                header = {toks[i]: int(toks[i + 1]) for i in range(0, len(toks), 2)}
            except (IndexError, ValueError):
                raise SpectrumError(f"line {lineno}: malformed header {line!r}") from None
            if not {"N", "d"} <= header.keys():
                raise SpectrumError(f"line {lineno}: header needs N and d")
            continue
        try:
            values.append(float(line))
        except ValueError:
            raise SpectrumError(f"line {lineno}: not a number: {line!r}") from None
    if setting is None:
        if not header:
            raise SpectrumError("no setting given and no 'N .. d ..' header in file")
        setting = Setting(header["N"], header["d"])
    if partial is None:
        partial = bool(header.get("partial", 0))
    meta = {"comment": " ".join(comments)} if comments else {}
    if source is not None:
        meta["source"] = str(source)
    return make_spectrum(values, setting, partial, meta=meta, tol_order=tol_order, tol_norm=tol_norm)


def load_spectrum(path, setting: Setting | None = None, partial: bool | None = None, **tols) -> Spectrum:
    path = Path(path)
    return parse_spectrum(path.read_text(encoding="utf-8"), setting, partial, source=path.name, **tols)


def format_spectrum(spectrum: Spectrum) -> str:
    s = spectrum.setting
    lines = []
    if spectrum.meta.get("comment"):
        lines.append(f"# {spectrum.meta['comment']}")
    lines.append(f"N {s.n_particles} d {s.dim} partial {int(spectrum.partial)}")
    lines += [format(float(v), ".17g") for v in spectrum.values]
    return "\n".join(lines) + "\n"


def save_spectrum(spectrum: Spectrum, path) -> None:
    Path(path).write_text(format_spectrum(spectrum), encoding="utf-8")


def detect_degenerate_pairs(spectrum: Spectrum, tol: float) -> bool:
    """True iff ``|l_{2i-1} - l_{2i}| <= tol`` for every pair.

    For odd length the last entry has no partner and is ignored.  A true
    result means the GPC analysis is trivial for this state: on the
    doubly-degenerate hyperplane the GPCs reduce to the Pauli constraints.
    """
    v = spectrum.values
    m = len(v) // 2 * 2
    return bool(np.all(np.abs(v[0:m:2] - v[1:m:2]) <= tol))


def fixture_dir() -> Path:
    return Path(__file__).with_name("data")


FIXTURES = {
    "be_triplet_s5": "be_triplet_s5.txt",
    "be_triplet_s5_6dec": "be_triplet_s5_6dec.txt",
    **{f"be_triplet_{i}": f"be_triplet_{i}.txt" for i in range(1, 6)},
    "be_quintet": "be_quintet.txt",
    **{f"li_doublet_{i}": f"li_doublet_{i}.txt" for i in range(1, 4)},
    "li_quadruplet": "li_quadruplet.txt",
}


def load_fixture(name: str, **kwargs) -> Spectrum:
    """Load one of the shipped spectra by short name (see ``FIXTURES``)."""
    try:
        fname = FIXTURES[name]
    except KeyError:
        raise KeyError(f"unknown fixture {name!r}; choose from {sorted(FIXTURES)}") from None
    return load_spectrum(fixture_dir() / fname, **kwargs)
