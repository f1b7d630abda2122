"""Probing polytope vertices by minimizing linear forms of the spectrum.

Minimizing ``sum_k w_k l_k(psi)`` over normalized states reaches a vertex of
the occupation-number polytope.  The search is projected gradient descent
on the unit sphere of determinant amplitudes with an Armijo step rule; all
restarts run side by side as one batch.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from ..catalog import Catalog, Setting
from ..pinning import saturation_matrix
from ..spectra import Spectrum, make_spectrum
from .fermions import (
    BOUND_TOL,
    WaveFunction,
    _tables,
    n_determinants,
    occupations_batch,
    one_rdm_batch,
    random_amplitudes,
    sample_spectra,
)
from .jacobi import eigh_descending

logger = logging.getLogger(__name__)

VIOLATION_TOL = 1e-10


def objective_and_gradient(setting: Setting, weights, amplitudes):
    """``f = sum_k w_k l_k`` (descending spectrum) and its gradient.

    The gradient is returned in complex form ``g = 2 H c`` where ``H`` is
    the determinant-space matrix of the one-body operator
    ``sum_k w_k |v_k><v_k|`` built from the RDM eigenvectors; the real and
    imaginary parts are the derivatives with respect to ``Re c`` and
    ``Im c``.  Valid wherever the spectrum is non-degenerate (or degenerate
    with equal weights).
    """
    t = _tables(setting)
    c = np.atleast_2d(amplitudes)
    w = np.asarray(weights, dtype=float)
    lam, v = eigh_descending(one_rdm_batch(setting, c))
    f = lam @ w
    g_mat = np.einsum("bpk,k,bqk->bpq", np.conj(v), w, v)
    vals = t.sign * g_mat[:, t.p, t.q] * c[:, t.ket]
    hc = np.zeros_like(c)
    for b in range(c.shape[0]):
        hc[b] = np.bincount(t.bra, weights=vals[b].real, minlength=c.shape[1]) + 1j * np.bincount(
            t.bra, weights=vals[b].imag, minlength=c.shape[1]
        )
    return f, 2.0 * hc, lam


@dataclass
class ExtremalResult:
    objective: float
    spectrum: Spectrum
    state: WaveFunction
    restart_objectives: np.ndarray
    iterations: np.ndarray
    grad_norms: np.ndarray
    converged: np.ndarray

    def diagnostics(self) -> dict:
        return {
            "objective": self.objective,
            "restart_objectives": self.restart_objectives.tolist(),
            "iterations": self.iterations.tolist(),
            "grad_norms": self.grad_norms.tolist(),
            "converged": self.converged.tolist(),
        }


def extremal_spectrum(
    setting: Setting,
    weights,
    restarts: int = 32,
    seed: int = 0,
    *,
    constant: float = 0.0,
    max_iter: int = 3000,
    gtol: float = 1e-10,
    ftol: float = 1e-15,
) -> ExtremalResult:
    """Minimize ``constant + sum_k w_k l_k(psi)`` over normalized states.

    Restart ``i`` starts from ``random_state(setting, (seed, i))``.
    Non-convergence is reported in the diagnostics, never raised.
    """
    w = np.asarray(weights, dtype=float)
    if w.shape != (setting.dim,):
        raise ValueError(f"need {setting.dim} weights")
    c = np.stack([random_amplitudes(setting, (seed, i)) for i in range(restarts)])
    f, g, _ = objective_and_gradient(setting, w, c)
    step = np.full(restarts, 0.1)
    done = np.zeros(restarts, dtype=bool)
    iters = np.zeros(restarts, dtype=int)
    gnorm = np.full(restarts, np.inf)
    stall = np.zeros(restarts, dtype=int)
    for _ in range(max_iter):
        radial = np.real(np.sum(np.conj(c) * g, axis=1))
        gt = g - radial[:, None] * c
        gnorm = np.linalg.norm(gt, axis=1)
        done |= gnorm < gtol
        if done.all():
            break
        live = ~done
        iters[live] += 1
        trial = c - step[:, None] * gt
        trial /= np.linalg.norm(trial, axis=1, keepdims=True)
        f_new, g_new, _ = objective_and_gradient(setting, w, trial)
        ok = live & (f_new <= f - 1e-4 * step * gnorm**2)
        small = ok & (f - f_new < ftol)
        stall = np.where(small, stall + 1, np.where(ok, 0, stall))
        c[ok], f[ok], g[ok] = trial[ok], f_new[ok], g_new[ok]
        step = np.where(ok, np.minimum(step * 2.0, 10.0), np.where(live, step * 0.5, step))
        done |= live & (step < 1e-16)
        done |= stall >= 20
    best = int(np.argmin(f))
    lam = one_rdm_batch(setting, c[best : best + 1])
    spec = make_spectrum(occupations_batch(setting, lam)[0], setting, sort=True, tol_order=BOUND_TOL,
                         tol_norm=BOUND_TOL, meta={"source": "extremal"})
    return ExtremalResult(
        objective=float(f[best] + constant),
        spectrum=spec,
        state=WaveFunction(setting, c[best] / np.linalg.norm(c[best])),
        restart_objectives=f + constant,
        iterations=iters,
        grad_norms=gnorm,
        converged=gnorm < 1e-6,
    )


@dataclass
class ValidationReport:
    setting: Setting
    samples: int
    seed: int
    min_saturation: dict
    violations: dict
    probe_min: dict = field(default_factory=dict)
    max_trace_error: float = 0.0

    @property
    def n_violations(self) -> int:
        return sum(self.violations.values())

    @property
    def ok(self) -> bool:
        return self.n_violations == 0 and all(v >= -VIOLATION_TOL for v in self.probe_min.values())

    def as_dict(self):
        return {
            "setting": [self.setting.n_particles, self.setting.dim],
            "samples": self.samples,
            "seed": self.seed,
            "violation_tolerance": VIOLATION_TOL,
            "total_violations": self.n_violations,
            "ok": self.ok,
            "constraints": [
                {
                    "label": lab,
                    "min_saturation": self.min_saturation[lab],
                    "violations": self.violations[lab],
                    "probe_min": self.probe_min.get(lab),
                }
                for lab in self.min_saturation
            ],
        }


def validate_catalog(
    catalog: Catalog, samples: int = 10_000, seed: int = 0, *, probe: bool = True, probe_restarts: int = 8
) -> ValidationReport:
    """Check every catalog constraint against random states and extremal probes.

    A violation is a sampled saturation below ``-VIOLATION_TOL``.  The probe
    minimizes each constraint's own linear form; for a true facet the minimum
    is driven toward 0, a negative value disproves the constraint.
    """
    st = catalog.setting
    spectra = sample_spectra(st, samples, seed) if samples else np.empty((0, st.dim))
    sat = saturation_matrix(catalog, spectra) if samples else np.empty((0, len(catalog)))
    labels = catalog.labels
    mins = {lab: (float(sat[:, j].min()) if samples else float("nan")) for j, lab in enumerate(labels)}
    viol = {lab: int(np.sum(sat[:, j] < -VIOLATION_TOL)) for j, lab in enumerate(labels)}
    probes = {}
    if probe:
        for j, con in enumerate(catalog.gpcs):
            res = extremal_spectrum(st, con.kappas, restarts=probe_restarts, seed=seed + 1 + j,
                                    constant=con.kappa0, max_iter=1500)
            probes[con.label] = res.objective
    trace_err = float(np.max(np.abs(spectra.sum(axis=1) - st.n_particles))) if samples else 0.0
    for lab, n in viol.items():
        if n:
            logger.warning("constraint %s violated by %d of %d samples", lab, n, samples)
    return ValidationReport(st, samples, seed, mins, viol, probes, trace_err)
