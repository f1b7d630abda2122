"""Cyclic Jacobi diagonalization of (batches of) Hermitian matrices."""
from __future__ import annotations

import numpy as np

OFF_TOL = 1e-13
MAX_SWEEPS = 60


def _off_norm(a):
    d = a.shape[-1]
    off = a.copy()
    idx = np.arange(d)
    off[..., idx, idx] = 0
    return np.sqrt(np.sum(np.abs(off) ** 2, axis=(-2, -1)))


def jacobi_eigh(a, tol: float = OFF_TOL, max_sweeps: int = MAX_SWEEPS, hermitian_tol: float = 1e-12):
    """Eigenvalues and eigenvectors of Hermitian ``a`` (shape (..., n, n)).

    Each rotation zeroes one off-diagonal pair ``(p, q)``; pairs are visited
    in row-cyclic order until the off-diagonal Frobenius norm of every matrix
    in the batch is below ``tol * ||a||_F``.  Returns ``(w, v)`` with
    ``a = v diag(w) v^H``; eigenvalues are not sorted.
    """
    a = np.array(a, dtype=complex)
    single = a.ndim == 2
    if single:
        a = a[None]
    n = a.shape[-1]
    scale = np.sqrt(np.sum(np.abs(a) ** 2, axis=(-2, -1)))
    herm_err = np.sqrt(np.sum(np.abs(a - np.conj(np.swapaxes(a, -1, -2))) ** 2, axis=(-2, -1)))
    if np.any(herm_err > hermitian_tol * np.maximum(scale, 1.0)):
        raise np.linalg.LinAlgError("matrix is not Hermitian within tolerance")
    a = 0.5 * (a + np.conj(np.swapaxes(a, -1, -2)))
    v = np.broadcast_to(np.eye(n, dtype=complex), a.shape).copy()
    target = tol * np.maximum(scale, np.finfo(float).tiny)
    tiny = np.finfo(float).tiny

    for _ in range(max_sweeps):
        if np.all(_off_norm(a) <= target):
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[:, p, q]
                mag = np.abs(apq)
                active = mag > tiny
                if not np.any(active):
                    continue
                phase = np.where(active, apq / np.where(active, mag, 1.0), 1.0)
                app = a[:, p, p].real
                aqq = a[:, q, q].real
                tau = np.where(active, (aqq - app) / (2.0 * np.where(active, mag, 1.0)), 0.0)
                t = np.where(tau >= 0, 1.0, -1.0) / (np.abs(tau) + np.hypot(1.0, tau))
                t = np.where(active, t, 0.0)
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                se = (s * phase)[:, None]
                sc = (s * np.conj(phase))[:, None]
                c_ = c[:, None]
                # a <- J^H a J with J_pp = J_qq = c, J_pq = s e^{i phi}, J_qp = -s e^{-i phi}
                colp = a[:, :, p].copy()
                colq = a[:, :, q]
                a[:, :, p] = c_ * colp - sc * colq
                a[:, :, q] = se * colp + c_ * colq
                rowp = a[:, p, :].copy()
                rowq = a[:, q, :]
                a[:, p, :] = c_ * rowp - se * rowq
                a[:, q, :] = sc * rowp + c_ * rowq
                a[:, p, q] = 0
                a[:, q, p] = 0
                vp = v[:, :, p].copy()
                vq = v[:, :, q]
                v[:, :, p] = c_ * vp - sc * vq
                v[:, :, q] = se * vp + c_ * vq
    else:
        if np.any(_off_norm(a) > target):
            raise np.linalg.LinAlgError("Jacobi iteration did not converge")

    w = np.real(np.diagonal(a, axis1=-2, axis2=-1)).copy()
    if single:
        return w[0], v[0]
    return w, v


def eigh_descending(a, **kw):
    """Jacobi eigenpairs sorted by decreasing eigenvalue (stable for ties)."""
    w, v = jacobi_eigh(a, **kw)
    order = np.argsort(-w, axis=-1, kind="stable")
    w = np.take_along_axis(w, order, axis=-1)
    v = np.take_along_axis(v, order[..., None, :], axis=-1)
    return w, v
