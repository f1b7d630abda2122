"""N-fermion pure states in a determinant basis and their one-particle RDMs.

Determinants are the N-subsets of ``{0..d-1}`` in lexicographic order,
orbitals ascending inside each.  ``|K> = a+_{k1} a+_{k2} ... a+_{kN} |0>``
with ``k1 < k2 < ...``, and the fermionic signs follow from that ordering.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ..catalog import Setting
from ..spectra import Spectrum, make_spectrum
from .jacobi import eigh_descending

MAX_DETERMINANTS = 2000
NORM_TOL = 1e-12
BOUND_TOL = 1e-10


@dataclass(frozen=True)
class _Tables:
    dets: tuple
    index: dict
    # one entry per nonzero <K| a+_q a_p |L>
    ket: np.ndarray
    bra: np.ndarray
    p: np.ndarray
    q: np.ndarray
    sign: np.ndarray
    # (n_terms, d*d) 0/1 matrix summing terms into flattened (p, q)
    scatter: np.ndarray


def n_determinants(setting: Setting) -> int:
    return math.comb(setting.dim, setting.n_particles)


@lru_cache(maxsize=32)
def _tables(setting: Setting) -> _Tables:
    if n_determinants(setting) > MAX_DETERMINANTS:
        raise ValueError(f"setting {setting} has {n_determinants(setting)} determinants (limit {MAX_DETERMINANTS})")
    dets = tuple(itertools.combinations(range(setting.dim), setting.n_particles))
    index = {det: i for i, det in enumerate(dets)}
    ket, bra, ps, qs, signs = [], [], [], [], []
    for li, occ in enumerate(dets):
        occ_set = set(occ)
        for pos, p in enumerate(occ):
            rest = occ[:pos] + occ[pos + 1 :]
            s_p = -1 if pos % 2 else 1
            for q in range(setting.dim):
                if q in occ_set and q != p:
                    continue
                n_before = sum(1 for o in rest if o < q)
                s_q = -1 if n_before % 2 else 1
                new = tuple(sorted(rest + (q,)))
                ket.append(li)
                bra.append(index[new])
                ps.append(p)
                qs.append(q)
                signs.append(s_p * s_q)
    ps, qs = np.array(ps), np.array(qs)
    scatter = np.zeros((len(ps), setting.dim**2))
    scatter[np.arange(len(ps)), ps * setting.dim + qs] = 1.0
    return _Tables(dets, index, np.array(ket), np.array(bra), ps, qs, np.array(signs, dtype=float), scatter)


def determinants(setting: Setting) -> tuple:
    return _tables(setting).dets


@dataclass(frozen=True, eq=False)
class WaveFunction:
    setting: Setting
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (n_determinants(self.setting),):
            raise ValueError(f"expected {n_determinants(self.setting)} amplitudes, got shape {amps.shape}")
        norm = float(np.vdot(amps, amps).real)
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state not normalized: <psi|psi> = {norm!r}")
        amps = amps.copy()
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def from_dict(cls, setting: Setting, coeffs: dict) -> "WaveFunction":
        """Build from ``{(orbitals...): amplitude}`` with 0-based orbital indices."""
        tabs = _tables(setting)
        amps = np.zeros(len(tabs.dets), dtype=complex)
        for occ, a in coeffs.items():
            amps[tabs.index[tuple(sorted(occ))]] = a
        return cls(setting, amps)


@dataclass(frozen=True, eq=False)
class OneRDM:
    """``matrix[p, q] = <psi| a+_q a_p |psi>``; Hermitian with trace N."""

    setting: Setting
    matrix: np.ndarray


def _normalize_rows(c):
    return c / np.linalg.norm(c, axis=-1, keepdims=True)


def _seed_rng(seed):
    if isinstance(seed, (tuple, list)):
        return np.random.default_rng([int(s) for s in seed])
    return np.random.default_rng(seed)


def random_amplitudes(setting: Setting, seed) -> np.ndarray:
    n = n_determinants(setting)
    if n > MAX_DETERMINANTS:
        raise ValueError(f"setting {setting} too large for the oracle ({n} determinants)")
    rng = _seed_rng(seed)
    z = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return z / np.linalg.norm(z)


def random_state(setting: Setting, seed) -> WaveFunction:
    """Uniformly distributed pure state; ``seed`` is an int or a tuple of ints."""
    return WaveFunction(setting, random_amplitudes(setting, seed))


def one_rdm_batch(setting: Setting, amplitudes: np.ndarray) -> np.ndarray:
    """One-particle RDMs for amplitude rows of shape (B, n_det) -> (B, d, d)."""
    t = _tables(setting)
    c = np.atleast_2d(amplitudes)
    d = setting.dim
    vals = t.sign * np.conj(c[:, t.bra]) * c[:, t.ket]
    return (vals @ t.scatter).reshape(c.shape[0], d, d)


def one_rdm(state: WaveFunction) -> OneRDM:
    norm = float(np.vdot(state.amplitudes, state.amplitudes).real)
    if abs(norm - 1.0) > NORM_TOL:
        raise ValueError("state not normalized")
    return OneRDM(state.setting, one_rdm_batch(state.setting, state.amplitudes)[0])


def occupations_batch(setting: Setting, rdms: np.ndarray, bound_tol: float = BOUND_TOL) -> np.ndarray:
    """Sorted (descending) eigenvalues of a batch of RDMs, clamped into [0, 1]."""
    w, _ = eigh_descending(rdms)
    lo, hi = w.min(), w.max()
    if lo < -bound_tol or hi > 1 + bound_tol:
        raise ValueError(f"occupation numbers outside [0,1] beyond {bound_tol:g}: range [{lo!r}, {hi!r}]")
    return np.clip(w, 0.0, 1.0)


def natural_occupations(rdm: OneRDM) -> Spectrum:
    """Natural occupation numbers of ``rdm`` via Jacobi diagonalization."""
    lam = occupations_batch(rdm.setting, rdm.matrix[None])[0]
    return make_spectrum(lam, rdm.setting, sort=True, tol_order=BOUND_TOL, tol_norm=BOUND_TOL,
                         meta={"source": "oracle"})


def sample_spectra(setting: Setting, samples: int, seed: int, chunk: int = 2048) -> np.ndarray:
    """Spectra of ``samples`` random states, shape (samples, d).

    Sample ``i`` is the spectrum of ``random_state(setting, (seed, i))``, so
    the drawn states do not depend on chunking.  Spectra from different
    chunk sizes can differ in the last bits because the batched eigensolver
    sweeps until every matrix of a chunk has converged.
    """
    out = np.empty((samples, setting.dim))
    for start in range(0, samples, chunk):
        stop = min(samples, start + chunk)
        amps = np.stack([random_amplitudes(setting, (seed, i)) for i in range(start, stop)])
        out[start:stop] = occupations_batch(setting, one_rdm_batch(setting, amps))
    return out


def pinned_family(alpha: complex, beta: complex, gamma: complex) -> WaveFunction:
    """``alpha|123> + beta|145> + gamma|246>`` in setting (3,6) (1-based orbitals).

    The RDM is diagonal with occupations ``(a+b, a+g, a, b+g, b, g)`` for
    ``a, b, g = |alpha|^2, |beta|^2, |gamma|^2``.  The Borland-Dennis
    constraint is saturated when these are already decreasing, that is
    ``a >= b + g`` and ``b >= g``.
    """
    norm = abs(alpha) ** 2 + abs(beta) ** 2 + abs(gamma) ** 2
    if abs(norm - 1.0) > NORM_TOL:
        raise ValueError(f"|alpha|^2+|beta|^2+|gamma|^2 = {norm!r}, expected 1")
    return WaveFunction.from_dict(Setting(3, 6), {(0, 1, 2): alpha, (0, 3, 4): beta, (1, 3, 5): gamma})


def rotate_orbitals(state: WaveFunction, u: np.ndarray) -> WaveFunction:
    """Apply the one-particle unitary ``u`` (a+_j -> sum_i u[i, j] a+_i) to ``state``."""
    dets = determinants(state.setting)
    u = np.asarray(u, dtype=complex)
    new = np.zeros(len(dets), dtype=complex)
    for j, occ_j in enumerate(dets):
        cj = state.amplitudes[j]
        if cj == 0:
            continue
        cols = list(occ_j)
        for i, occ_i in enumerate(dets):
            new[i] += np.linalg.det(u[np.ix_(list(occ_i), cols)]) * cj
    return WaveFunction(state.setting, _normalize_rows(new))
