"""Thin and truncated SVD by one-sided Jacobi rotations.

Matrices are numpy arrays with rows = samples and columns = features.
The one-sided (Hestenes) method orthogonalizes the columns of ``x`` with
plane rotations; this is the cyclic Jacobi eigen-iteration on ``x.T @ x``
carried out without ever forming the Gram matrix, so singular values keep
full relative accuracy instead of losing half the digits to squaring.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NoConvergence, NonFiniteInput, RankOutOfRange

RANK_RTOL = 1e-12
MAX_SWEEPS = 60


@dataclass(frozen=True)
class SvdModel:
    v_k: np.ndarray  # p x k, orthonormal columns
    singular_values: np.ndarray  # length k, non-increasing

    @property
    def k(self) -> int:
        return self.v_k.shape[1]

    @property
    def p(self) -> int:
        return self.v_k.shape[0]


def _as_matrix(x) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] < 1 or x.shape[1] < 1:
        raise DimensionMismatch(f"expected a non-empty 2-D matrix, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise NonFiniteInput("matrix contains NaN or infinite entries")
    return x


def _jacobi_orthogonalize(w: np.ndarray, v: np.ndarray, tol: float, max_sweeps: int) -> None:
    """Rotate rows of ``w`` (columns of x) in place until mutually orthogonal.

    The same rotations are applied to the rows of ``v`` (columns of V).
    Rows whose squared norm falls to rounding level are left alone.
    """
    p = w.shape[0]
    norms = np.einsum("ij,ij->i", w, w)
    negligible = (np.finfo(np.float64).eps ** 2) * norms.sum()
    for _ in range(max_sweeps):
        rotated = False
        for j in range(p - 1):
            for k in range(j + 1, p):
                alpha, beta = norms[j], norms[k]
                if alpha <= negligible or beta <= negligible:
                    continue
                gamma = float(w[j] @ w[k])
                if abs(gamma) <= tol * np.sqrt(alpha * beta):
                    continue
                rotated = True
                zeta = (beta - alpha) / (2.0 * gamma)
                t = np.copysign(1.0, zeta) / (abs(zeta) + np.sqrt(1.0 + zeta * zeta))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = c * t
                wj, wk = w[j].copy(), w[k]
                w[j] = c * wj - s * wk
                w[k] = s * wj + c * wk
                vj, vk = v[j].copy(), v[k]
                v[j] = c * vj - s * vk
                v[k] = s * vj + c * vk
                norms[j] = float(w[j] @ w[j])
                norms[k] = float(w[k] @ w[k])
        if not rotated:
            return
    raise NoConvergence(f"Jacobi SVD did not converge in {max_sweeps} sweeps")


def svd_thin(x, max_sweeps: int = MAX_SWEEPS) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Compact SVD ``x = u @ diag(s) @ v.T`` keeping only the numerical rank.

    Singular values below ``1e-12 * s[0]`` count as zero and are dropped
    together with their singular vectors. Each column of ``v`` is signed so
    that its largest-magnitude entry is positive.
    """
    x = _as_matrix(x)
    if x.shape[0] < x.shape[1]:
        ut, s, vt = _svd_tall(x.T, max_sweeps)
        return _fix_signs(vt, ut, s)
    u, s, v = _svd_tall(x, max_sweeps)
    return _fix_signs(u, v, s)


def _svd_tall(x: np.ndarray, max_sweeps: int):
    n, p = x.shape
    w = x.T.copy()
    vt = np.eye(p)
    tol = max(n, p) * np.finfo(np.float64).eps
    _jacobi_orthogonalize(w, vt, tol, max_sweeps)

    sigma = np.sqrt(np.einsum("ij,ij->i", w, w))
    order = np.argsort(-sigma, kind="stable")
    sigma = sigma[order]
    w, vt = w[order], vt[order]

    rank = 0 if sigma[0] == 0.0 else int(np.count_nonzero(sigma >= RANK_RTOL * sigma[0]))
    sigma, w, vt = sigma[:rank], w[:rank], vt[:rank]
    u = (w / sigma[:, None]).T if rank else np.zeros((n, 0))
    return u, sigma, vt.T.copy()


def _fix_signs(u: np.ndarray, v: np.ndarray, s: np.ndarray):
    u, v = u.copy(), v.copy()
    for j in range(v.shape[1]):
        if v[np.argmax(np.abs(v[:, j])), j] < 0:
            v[:, j] = -v[:, j]
            u[:, j] = -u[:, j]
    return u, s, v


def truncate(u, s, v, k: int) -> SvdModel:
    s = np.asarray(s, dtype=np.float64)
    if not 1 <= k <= len(s):
        raise RankOutOfRange(f"rank {k} outside [1, {len(s)}]")
    return SvdModel(v_k=np.array(v[:, :k], dtype=np.float64), singular_values=s[:k].copy())


def fit_svd(x, k: int) -> SvdModel:
    u, s, v = svd_thin(x)
    return truncate(u, s, v, k)


def _check_columns(x, model: SvdModel) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim == 1:
        x = x[None, :]
    if x.shape[1] != model.p:
        raise DimensionMismatch(f"matrix has {x.shape[1]} columns, model expects {model.p}")
    return x


def project(x, model: SvdModel) -> np.ndarray:
    """Coordinates of the rows of ``x`` in the retained right-singular basis."""
    return _check_columns(x, model) @ model.v_k


def reconstruction_error(x, model: SvdModel) -> float:
    x = _check_columns(x, model)
    residual = x - (x @ model.v_k) @ model.v_k.T
    return float(np.linalg.norm(residual, "fro"))
