import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import enumerate_vertices
from gpcpin.catalog import Catalog, GPConstraint, Setting
from gpcpin.oracle import sample_spectra
from gpcpin.pinning import saturation_matrix
from gpcpin.qparam import (
    CollectivePauliSpec,
    NotEnforceable,
    enforcing_pairs,
    minimal_spec,
    prefactor,
    prefactor_exact,
    q_report,
    q_value,
    s_value,
)
from gpcpin.spectra import load_fixture, make_spectrum


def s_row(d, r, s):
    row = np.zeros(d)
    row[:r] = -1
    row[d - s :] = 1
    return row, r


def test_s_value_examples(triplet_s5):
    assert s_value(triplet_s5, CollectivePauliSpec(2, 0)) == pytest.approx(5.537e-6, abs=5e-10)
    assert s_value(triplet_s5, CollectivePauliSpec(0, 1)) == pytest.approx(6.44e-11, abs=1e-13)
    hf = make_spectrum([1, 1, 1, 0, 0, 0], Setting(3, 6))
    for r in range(4):
        for s in range(4):
            assert s_value(hf, CollectivePauliSpec(r, s)) == 0


def test_s_value_partial_uses_normalization():
    sp = load_fixture("li_quadruplet")
    val = s_value(sp, CollectivePauliSpec(0, 962 - 12))
    assert val == pytest.approx(3 - math.fsum(sp.values[:12]), abs=1e-15)
    with pytest.raises(ValueError):
        s_value(sp, CollectivePauliSpec(0, 10))


def test_spec_validation():
    with pytest.raises(ValueError):
        CollectivePauliSpec(-1, 0)
    with pytest.raises(ValueError):
        CollectivePauliSpec(4, 4).check(7)


def brute_minimal(con, catalog):
    stt = catalog.setting
    pairs = sorted(
        ((r, s) for r in range(stt.n_particles + 1) for s in range(stt.dim - stt.n_particles + 1)),
        key=lambda rs: (rs[0] + rs[1], rs[0]),
    )
    k = np.array(con.kappas, dtype=float)
    for r, s in pairs:
        v = enumerate_vertices(catalog, r, s)
        if len(v) and float(np.max(v @ k)) + con.kappa0 <= 1e-10:
            return (r, s)
    return None


@pytest.mark.parametrize("name", ["bd_catalog", "cat37"])
def test_minimal_spec_vs_vertex_oracle(request, name):
    cat = request.getfixturevalue(name)
    for con in cat:
        spec = minimal_spec(con, cat)
        assert (spec.r, spec.s) == brute_minimal(con, cat), con.label


def test_known_minimal_specs(bd_catalog, cat37, cat410):
    assert minimal_spec(bd_catalog["D1"], bd_catalog) == CollectivePauliSpec(0, 1)
    assert [(minimal_spec(c, cat37).r, minimal_spec(c, cat37).s) for c in cat37] == [(0, 1), (0, 1), (0, 1), (1, 0)]
    assert minimal_spec(cat410["D27"], cat410) == CollectivePauliSpec(3, 0)


@pytest.mark.parametrize("name", ["bd_catalog", "cat37"])
def test_minimal_spec_monotone(request, name):
    cat = request.getfixturevalue(name)
    for con in cat:
        table = enforcing_pairs(con, cat)
        for (r, s), ok in table.items():
            if ok:
                assert all(table[(r2, s2)] for (r2, s2) in table if r2 >= r and s2 >= s)


def test_fully_pinned_decides():
    stt = Setting(3, 6)
    pos = GPConstraint(stt, 1, (0, 0, 0, -1, 0, 0), "X")
    cat = Catalog(stt, (pos,))
    assert not enforcing_pairs(pos, cat)[(3, 3)]
    with pytest.raises(NotEnforceable):
        minimal_spec(pos, cat)


def test_pauli_constraint_prefactor_one():
    stt = Setting(3, 6)
    x = GPConstraint(stt, 1, (-1, 0, 0, 0, 0, 0), "X")
    cat = Catalog(stt, (x,))
    spec = minimal_spec(x, cat)
    assert spec == CollectivePauliSpec(1, 0)
    assert prefactor_exact(x, spec, cat) == 1


def test_prefactor_needs_enforcing_spec(cat37):
    assert not enforcing_pairs(cat37["D3"], cat37)[(1, 0)]
    with pytest.raises(NotEnforceable):
        prefactor(cat37["D3"], CollectivePauliSpec(1, 0), cat37)


@pytest.mark.parametrize("name", ["bd_catalog", "cat37"])
def test_prefactor_vs_vertex_oracle(request, name):
    cat = request.getfixturevalue(name)
    verts = enumerate_vertices(cat)
    d = cat.setting.dim
    for con in cat:
        spec = minimal_spec(con, cat)
        if (spec.r, spec.s) == (0, 0):
            continue
        row, off = s_row(d, spec.r, spec.s)
        sv = verts @ row + off
        dv = verts @ np.array(con.kappas, dtype=float) + con.kappa0
        mask = sv > 1e-12
        assert prefactor(con, spec, cat) == pytest.approx(float(np.max(dv[mask] / sv[mask])), abs=1e-10)


@pytest.mark.parametrize("name", ["bd_catalog", "cat37"])
def test_certificate_soundness_on_samples(request, name):
    cat = request.getfixturevalue(name)
    samples = sample_spectra(cat.setting, 10_000, seed=99)
    sat = saturation_matrix(cat, samples)
    d = cat.setting.dim
    for j, con in enumerate(cat):
        spec = minimal_spec(con, cat)
        c = prefactor(con, spec, cat)
        row, off = s_row(d, spec.r, spec.s)
        gap = c * (samples @ row + off) - sat[:, j]
        assert gap.min() >= -1e-10, con.label


def test_triplet_s5_report(cat410, triplet_s5):
    rep = q_report(cat410, triplet_s5)
    cert = rep.certificate("D27")
    assert cert.approx and rep.approx
    assert prefactor_exact(cat410["D27"], cert.spec, cat410) == Fraction(8, 9)
    assert cert.q == pytest.approx(math.log10(cert.c * cert.s_value / cert.d_value), abs=1e-14)
    assert rep.overall_q == cert.q


def test_hartree_fock_all_pinned(cat37):
    hf = make_spectrum([1, 1, 1, 0, 0, 0, 0], Setting(3, 7))
    rep = q_report(cat37, hf)
    assert rep.pinned_labels == cat37.labels
    assert rep.overall_q is None


def test_q_value_sentinels():
    assert q_value(1.0, 1.0, 0.0) == math.inf
    assert q_value(1.0, 0.0, 1.0) == -math.inf
    assert q_value(2.0, 5.0, 1.0) == pytest.approx(1.0)


@settings(max_examples=10, deadline=None)
@given(st.integers(2, 9))
def test_q_rescale_invariance(cat37, k):
    sp = make_spectrum(sample_spectra(Setting(3, 7), 1, seed=k)[0], Setting(3, 7))
    scaled = Catalog(cat37.setting, tuple(c.scaled(k) for c in cat37), complete=True)
    a, b = q_report(cat37, sp), q_report(scaled, sp)
    for ca, cb in zip(a.certificates, b.certificates):
        assert ca.spec == cb.spec
        assert cb.c == pytest.approx(k * ca.c, rel=1e-15)
        assert cb.q == pytest.approx(ca.q, abs=1e-12)
