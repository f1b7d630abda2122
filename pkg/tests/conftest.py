from fractions import Fraction
from itertools import combinations

import numpy as np
import pytest

from gpcpin.catalog import Setting, shipped_catalogs
from gpcpin.lp import polytope_rows
from gpcpin.spectra import fixture_dir, load_fixture


@pytest.fixture(scope="session")
def library():
    return shipped_catalogs()


@pytest.fixture(scope="session")
def bd_catalog(library):
    return library[Setting(3, 6)]


@pytest.fixture(scope="session")
def cat37(library):
    return library[Setting(3, 7)]


@pytest.fixture(scope="session")
def cat410(library):
    return library[Setting(4, 10)]


@pytest.fixture(scope="session")
def triplet_s5():
    return load_fixture("be_triplet_s5")


def fixture_fractions(name):
    """Exact rationals from the decimal digits of a shipped spectrum file."""
    text = (fixture_dir() / f"{name}.txt").read_text()
    return [Fraction(line.strip()) for line in text.splitlines() if line.strip() and line.strip()[0] in "0123456789"]


def vertices(a_ub, b_ub, a_eq, b_eq, n, tol=1e-9):
    """All vertices of ``{x >= 0 : A_ub x <= b_ub, A_eq x = b_eq}`` by brute force.

    Independent of the simplex code: every choice of ``n - m_eq`` inequality
    rows (including ``x >= 0``) is made tight together with the equalities,
    the square system is solved with numpy, and feasible points are kept.
    """
    a_ub = np.array([list(r) for r in a_ub] + [[-1 if j == i else 0 for j in range(n)] for i in range(n)], dtype=float)
    b_ub = np.array(list(b_ub) + [0] * n, dtype=float)
    a_eq = np.array(a_eq, dtype=float).reshape(-1, n)
    b_eq = np.array(b_eq, dtype=float)
    need = n - len(a_eq)
    idx = np.array(list(combinations(range(len(a_ub)), need)), dtype=int).reshape(-1, need)
    mats = np.concatenate([np.broadcast_to(a_eq, (len(idx),) + a_eq.shape), a_ub[idx]], axis=1)
    rhs = np.concatenate([np.broadcast_to(b_eq, (len(idx), len(b_eq))), b_ub[idx]], axis=1)
    ok = np.abs(np.linalg.det(mats)) > 1e-9
    sols = np.linalg.solve(mats[ok], rhs[ok][..., None])[..., 0]
    feas = np.all(sols @ a_ub.T <= b_ub + tol, axis=1)
    if len(a_eq):
        feas &= np.all(np.abs(sols @ a_eq.T - b_eq) <= tol, axis=1)
    pts = sols[feas]
    return np.unique(np.round(pts, 12), axis=0) if len(pts) else np.empty((0, n))


def enumerate_vertices(catalog, r=0, s=0):
    a_ub, b_ub, a_eq, b_eq = polytope_rows(catalog, r=r, s=s)
    return vertices(a_ub, b_ub, a_eq, b_eq, catalog.setting.dim)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
