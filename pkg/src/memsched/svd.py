"""Singular value decomposition by one-sided Jacobi rotations.

Hestenes' method: rotate pairs of columns of a working copy until all
pairs are mutually orthogonal, then read the singular values off as
column norms.  Self-contained and deterministic, which keeps experiment
outputs byte-reproducible.
"""

from __future__ import annotations

import numpy as np

_PAIR_TOL = 1e-14
_MAX_SWEEPS = 100


def svd(matrix) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Factor matrix = u @ diag(s) @ v.T with s non-negative, descending.

    Parameters
    ----------
    matrix : 2-D array of finite reals.

    Returns
    -------
    u : (m, k) orthonormal columns, k = min(m, n)
    s : (k,) singular values, descending
    v : (n, k) orthonormal columns
    """
    a = np.asarray(matrix, dtype=float)
    if a.ndim != 2 or min(a.shape) < 1:
        raise ValueError(f"need a 2-D matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")

    transpose = a.shape[0] < a.shape[1]
    w = (a.T if transpose else a).copy()
    m, n = w.shape
    v = np.eye(n)

    scale = float(np.linalg.norm(w))
    if scale == 0.0:
        u = np.eye(m, n)
        s = np.zeros(n)
        return (v, s, u) if transpose else (u, s, v)

    for _ in range(_MAX_SWEEPS):
        off = 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                wp = w[:, p]
                wq = w[:, q]
                app = float(wp @ wp)
                aqq = float(wq @ wq)
                apq = float(wp @ wq)
                denom = np.sqrt(app * aqq)
                if denom == 0.0 or abs(apq) <= _PAIR_TOL * denom:
                    continue
                off = max(off, abs(apq) / denom)
                tau = (aqq - app) / (2.0 * apq)
                t = np.sign(tau) / (abs(tau) + np.sqrt(1.0 + tau * tau))
                if tau == 0.0:
                    t = 1.0
                c = 1.0 / np.sqrt(1.0 + t * t)
                s_ = t * c
                new_p = c * wp - s_ * wq
                new_q = s_ * wp + c * wq
                w[:, p] = new_p
                w[:, q] = new_q
                vp = v[:, p].copy()
                v[:, p] = c * vp - s_ * v[:, q]
                v[:, q] = s_ * vp + c * v[:, q]
        if off == 0.0:
            break

    norms = np.linalg.norm(w, axis=0)
    order = np.argsort(-norms, kind="stable")
    norms = norms[order]
    w = w[:, order]
    v = v[:, order]

    # Columns whose norm has collapsed carry no signal; zero their
    # singular value and rebuild an orthonormal direction for u.
    tiny = max(m, n) * np.finfo(float).eps * norms[0]
    u = np.zeros((m, n))
    dead: list[int] = []
    s = np.zeros(n)
    for j in range(n):
        if norms[j] > tiny:
            s[j] = norms[j]
            u[:, j] = w[:, j] / norms[j]
        else:
            dead.append(j)
    for j in dead:
        u[:, j] = _complete_column(u, j, m)
    return (v, s, u) if transpose else (u, s, v)


def _complete_column(u: np.ndarray, j: int, m: int) -> np.ndarray:
    """Unit vector orthogonal to all current columns of u (Gram-Schmidt)."""
    for k in range(m):
        cand = np.zeros(m)
        cand[k] = 1.0
        cand -= u @ (u.T @ cand)
        cand -= u @ (u.T @ cand)
        norm = np.linalg.norm(cand)
        if norm > 0.5:
            return cand / norm
    raise RuntimeError("failed to complete orthonormal basis")


def reconstruct(u: np.ndarray, s: np.ndarray, v: np.ndarray, keep=None) -> np.ndarray:
    """Sum of the kept rank-1 terms s_k * u_k v_k^T (all terms by default)."""
    if keep is None:
        keep = range(len(s))
    idx = list(keep)
    if not idx:
        return np.zeros((u.shape[0], v.shape[0]))
    return (u[:, idx] * s[idx]) @ v[:, idx].T
