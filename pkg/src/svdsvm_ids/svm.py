"""Soft-margin kernel SVM trained by sequential minimal optimization.

The solver maximizes the dual

    W(alpha) = sum_i alpha_i - 1/2 sum_ij alpha_i alpha_j y_i y_j K(x_i, x_j)

subject to ``0 <= alpha_i <= C`` and ``sum_i alpha_i y_i = 0``. Internally it
works with the equivalent minimization of ``f(alpha) = -W(alpha)`` and its
gradient ``G = Q alpha - 1`` where ``Q_ij = y_i y_j K_ij``. Each step picks the
maximal KKT-violating pair and solves the two-variable subproblem in
closed form.
"""
from __future__ import annotations

import logging
from collections import OrderedDict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateLabels, DimensionMismatch
from .kernels import KernelSpec

logger = logging.getLogger(__name__)

# curvature floor for non-PSD kernels (sigmoid)
TAU = 1e-12


@dataclass(frozen=True)
class TrainConfig:
    penalty_c: float = 1.0
    kkt_tolerance: float = 1e-3
    max_passes: int | None = None  # None: max(100_000, 100 * n)
    seed: int = 0
    cache_rows: int = 4096

    def __post_init__(self):
        if not self.penalty_c > 0:
            raise ValueError("penalty_c must be positive")
        if not self.kkt_tolerance > 0:
            raise ValueError("kkt_tolerance must be positive")


@dataclass(frozen=True)
class BinarySvmModel:
    support_vectors: np.ndarray
    coefficients: np.ndarray  # alpha_i * y_i
    bias: float
    kernel: KernelSpec
    support_indices: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))
    converged: bool = True
    iterations: int = 0

    @property
    def n_support(self) -> int:
        return len(self.coefficients)

    def decision_function(self, x) -> np.ndarray:
        x = np.atleast_2d(np.asarray(x, dtype=np.float64))
        if x.shape[1] != self.support_vectors.shape[1]:
            raise DimensionMismatch(
                f"input has {x.shape[1]} features, model expects {self.support_vectors.shape[1]}")
        out = np.empty(x.shape[0])
        for start in range(0, x.shape[0], 2048):
            block = x[start:start + 2048]
            out[start:start + 2048] = self.kernel.gram(block, self.support_vectors) @ self.coefficients
        return out + self.bias


def decision_value(model: BinarySvmModel, x) -> float:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise DimensionMismatch("decision_value expects a single vector")
    if x.shape[0] != model.support_vectors.shape[1]:
        raise DimensionMismatch(
            f"input has {x.shape[0]} features, model expects {model.support_vectors.shape[1]}")
    total = sum(c * model.kernel(x, sv) for c, sv in zip(model.coefficients, model.support_vectors))
    return float(total + model.bias)


class _KernelRows:
    """On-demand kernel rows with a bounded LRU cache."""

    def __init__(self, x: np.ndarray, kernel: KernelSpec, capacity: int):
        self.x = x
        self.kernel = kernel
        self.capacity = max(2, capacity)
        self._cache: OrderedDict[int, np.ndarray] = OrderedDict()

    def __getitem__(self, i: int) -> np.ndarray:
        row = self._cache.get(i)
        if row is not None:
            self._cache.move_to_end(i)
            return row
        row = self.kernel.gram(self.x[i:i + 1], self.x)[0]
        self._cache[i] = row
        if len(self._cache) > self.capacity:
            self._cache.popitem(last=False)
        return row


def dual_objective(alpha: np.ndarray, y: np.ndarray, gram: np.ndarray) -> float:
    """The dual ``W(alpha)`` evaluated from an explicit Gram matrix."""
    ay = alpha * y
    return float(alpha.sum() - 0.5 * ay @ gram @ ay)


@dataclass
class SmoResult:
    alpha: np.ndarray
    bias: float
    iterations: int
    converged: bool
    objective_trace: list[float]


def smo_solve(x: np.ndarray, y: np.ndarray, kernel: KernelSpec, cfg: TrainConfig,
              trace: bool = False) -> SmoResult:
    n = len(y)
    C = cfg.penalty_c
    rows = _KernelRows(x, kernel, cfg.cache_rows)
    qd = kernel.diag(x)
    alpha = np.zeros(n)
    grad = -np.ones(n)
    max_iter = cfg.max_passes if cfg.max_passes is not None else max(100_000, 100 * n)
    pos = y > 0
    objective_trace: list[float] = []

    def objective() -> float:
        # W = e'a - 1/2 a'Qa and Qa = G + e
        return float(0.5 * alpha.sum() - 0.5 * alpha @ grad)

    converged = False
    it = 0
    while it < max_iter:
        m_val, M_val, i, j = _select_pair(alpha, grad, y, pos, C)
        if i < 0 or m_val - M_val <= cfg.kkt_tolerance:
            converged = True
            break
        it += 1

        ki, kj = rows[i], rows[j]
        ai_old, aj_old = alpha[i], alpha[j]
        if y[i] != y[j]:
            quad = qd[i] + qd[j] + 2.0 * y[i] * y[j] * ki[j]
            delta = (-grad[i] - grad[j]) / max(quad, TAU)
            diff = ai_old - aj_old
            alpha[i] += delta
            alpha[j] += delta
            if diff > 0:
                if alpha[j] < 0:
                    alpha[j] = 0.0
                    alpha[i] = diff
            elif alpha[i] < 0:
                alpha[i] = 0.0
                alpha[j] = -diff
            if diff > 0:
                if alpha[i] > C:
                    alpha[i] = C
                    alpha[j] = C - diff
            elif alpha[j] > C:
                alpha[j] = C
                alpha[i] = C + diff
        else:
            quad = qd[i] + qd[j] - 2.0 * y[i] * y[j] * ki[j]
            delta = (grad[i] - grad[j]) / max(quad, TAU)
            total = ai_old + aj_old
            alpha[i] -= delta
            alpha[j] += delta
            if total > C:
                if alpha[i] > C:
                    alpha[i] = C
                    alpha[j] = total - C
            elif alpha[j] < 0:
                alpha[j] = 0.0
                alpha[i] = total
            if total > C:
                if alpha[j] > C:
                    alpha[j] = C
                    alpha[i] = total - C
            elif alpha[i] < 0:
                alpha[i] = 0.0
                alpha[j] = total

        d_i = alpha[i] - ai_old
        d_j = alpha[j] - aj_old
        grad += y * (y[i] * d_i * ki + y[j] * d_j * kj)
        if trace:
            objective_trace.append(objective())

    if not converged:
        logger.warning("SMO stopped after %d iterations without meeting tolerance %g",
                       it, cfg.kkt_tolerance)
    bias = _bias(alpha, grad, y, pos, C)
    return SmoResult(alpha, bias, it, converged, objective_trace)


def _select_pair(alpha, grad, y, pos, C):
    """Maximal violating pair: i maximizes -y*G over I_up, j minimizes it over I_low."""
    neg_yg = -y * grad
    up = np.where(pos, alpha < C, alpha > 0)
    low = np.where(pos, alpha > 0, alpha < C)
    if not up.any() or not low.any():
        return 0.0, 0.0, -1, -1
    i = int(np.argmax(np.where(up, neg_yg, -np.inf)))
    j = int(np.argmin(np.where(low, neg_yg, np.inf)))
    return neg_yg[i], neg_yg[j], i, j


def _bias(alpha, grad, y, pos, C) -> float:
    """Average of y_i - sum_j alpha_j y_j K_ij over free vectors (y_i f(x_i) = 1)."""
    neg_yg = -y * grad
    free = (alpha > 0) & (alpha < C)
    if free.any():
        return float(neg_yg[free].mean())
    up = np.where(pos, alpha < C, alpha > 0)
    low = np.where(pos, alpha > 0, alpha < C)
    hi = neg_yg[up].max() if up.any() else neg_yg[low].min()
    lo = neg_yg[low].min() if low.any() else neg_yg[up].max()
    return float((hi + lo) / 2.0)


def _binary_labels(y) -> np.ndarray:
    y = np.asarray(y, dtype=np.float64).ravel()
    if not np.all(np.isin(y, (-1.0, 1.0))):
        raise ValueError("binary labels must be -1 or +1")
    if np.all(y == y[0]):
        raise DegenerateLabels("training labels contain a single class")
    return y


def smo_train_binary(x, y, kernel: KernelSpec, cfg: TrainConfig = TrainConfig()) -> BinarySvmModel:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] != np.asarray(y).size:
        raise DimensionMismatch("x must be 2-D with one row per label")
    if not np.all(np.isfinite(x)):
        raise ValueError("training rows must be finite")
    y = _binary_labels(y)
    result = smo_solve(x, y, kernel, cfg)
    sv = np.flatnonzero(result.alpha > 0)
    return BinarySvmModel(
        support_vectors=x[sv].copy(),
        coefficients=result.alpha[sv] * y[sv],
        bias=result.bias,
        kernel=kernel,
        support_indices=sv,
        converged=result.converged,
        iterations=result.iterations,
    )


@dataclass(frozen=True)
class SvmEnsemble:
    """One-vs-rest models, one per class seen in training, in canonical class order."""

    class_order: tuple
    models: tuple[BinarySvmModel, ...]

    @property
    def kernel(self) -> KernelSpec:
        return self.models[0].kernel

    def decision_matrix(self, x) -> np.ndarray:
        x = np.atleast_2d(np.asarray(x, dtype=np.float64))
        return np.column_stack([m.decision_function(x) for m in self.models])

    def predict(self, x) -> list:
        # argmax returns the first maximum: ties go to the earlier class
        scores = self.decision_matrix(x)
        return [self.class_order[k] for k in np.argmax(scores, axis=1)]


def train_ovr(x, labels, kernel: KernelSpec, cfg: TrainConfig = TrainConfig(),
              class_order=None, n_jobs: int = 1) -> SvmEnsemble:
    """Train one binary SVM per class present in ``labels`` (class vs rest).

    ``class_order`` fixes the canonical ordering of classes (defaults to the
    sorted distinct labels). Subproblems run on ``n_jobs`` threads; the
    result does not depend on scheduling.
    """
    x = np.asarray(x, dtype=np.float64)
    labels = list(labels)
    if len(labels) != x.shape[0]:
        raise DimensionMismatch("one label per row required")
    present = set(labels)
    order = [c for c in (class_order or sorted(present)) if c in present]
    if len(order) < 2:
        raise DegenerateLabels("need at least two distinct classes")

    def fit(cls):
        y = np.where([lab == cls for lab in labels], 1.0, -1.0)
        return smo_train_binary(x, y, kernel, cfg)

    if n_jobs > 1:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            models = list(pool.map(fit, order))
    else:
        models = [fit(c) for c in order]
    return SvmEnsemble(tuple(order), tuple(models))


def predict(ensemble: SvmEnsemble, x) -> object:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise DimensionMismatch("predict expects a single vector; use SvmEnsemble.predict for batches")
    return ensemble.predict(x[None, :])[0]
