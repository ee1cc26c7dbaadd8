"""Kernel functions: linear, polynomial, Gaussian RBF and sigmoid.

Every kernel offers a scalar evaluation (``__call__``) that is exactly
symmetric in its arguments, and a batched ``gram(a, b)`` over row sets.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch


def _pair(x, x2) -> tuple[np.ndarray, np.ndarray]:
    a = np.asarray(x, dtype=np.float64).ravel()
    b = np.asarray(x2, dtype=np.float64).ravel()
    if a.shape != b.shape:
        raise DimensionMismatch(f"vectors of length {a.size} and {b.size}")
    return a, b


def _rows(a, b) -> tuple[np.ndarray, np.ndarray]:
    a = np.atleast_2d(np.asarray(a, dtype=np.float64))
    b = np.atleast_2d(np.asarray(b, dtype=np.float64))
    if a.shape[1] != b.shape[1]:
        raise DimensionMismatch(f"row sets of width {a.shape[1]} and {b.shape[1]}")
    return a, b


class KernelSpec:
    name = ""

    def __call__(self, x, x2) -> float:
        raise NotImplementedError

    def gram(self, a, b) -> np.ndarray:
        raise NotImplementedError

    def diag(self, a) -> np.ndarray:
        a = np.atleast_2d(np.asarray(a, dtype=np.float64))
        return np.array([self(row, row) for row in a])

    def to_text(self) -> str:
        raise NotImplementedError


@dataclass(frozen=True)
class Linear(KernelSpec):
    name = "linear"

    def __call__(self, x, x2) -> float:
        a, b = _pair(x, x2)
        return float(a @ b)

    def gram(self, a, b) -> np.ndarray:
        a, b = _rows(a, b)
        return a @ b.T

    def diag(self, a) -> np.ndarray:
        a = np.atleast_2d(np.asarray(a, dtype=np.float64))
        return np.einsum("ij,ij->i", a, a)

    def to_text(self) -> str:
        return "linear"


@dataclass(frozen=True)
class Polynomial(KernelSpec):
    """``(1 + <x, x'>) ** degree``."""

    degree: int = 3
    name = "polynomial"

    def __post_init__(self):
        if int(self.degree) != self.degree or self.degree < 1:
            raise ValueError(f"polynomial degree must be a positive integer, got {self.degree}")

    def __call__(self, x, x2) -> float:
        a, b = _pair(x, x2)
        return float((1.0 + a @ b) ** self.degree)

    def gram(self, a, b) -> np.ndarray:
        a, b = _rows(a, b)
        return (1.0 + a @ b.T) ** self.degree

    def to_text(self) -> str:
        return f"polynomial degree={self.degree}"


@dataclass(frozen=True)
class Rbf(KernelSpec):
    """``exp(-||x - x'||**2 / (2 * sigma_sq))``.

    The width is carried as ``sigma_sq``; the ``c`` of the alternative
    ``exp(-||x - x'||**2 / c)`` form is ``2 * sigma_sq``.
    """

    sigma_sq: float = 1.0
    name = "rbf"

    def __post_init__(self):
        if not self.sigma_sq > 0 or not math.isfinite(self.sigma_sq):
            raise ValueError(f"sigma_sq must be positive, got {self.sigma_sq}")

    @classmethod
    def from_sigma(cls, sigma: float) -> "Rbf":
        if not sigma > 0:
            raise ValueError(f"sigma must be positive, got {sigma}")
        return cls(sigma_sq=sigma * sigma)

    @classmethod
    def default_for(cls, n_features: int) -> "Rbf":
        """Width heuristic for [0, 1]-scaled data: 2 * sigma_sq = n_features."""
        return cls(sigma_sq=n_features / 2.0)

    def __call__(self, x, x2) -> float:
        a, b = _pair(x, x2)
        d = a - b
        return math.exp(-float(d @ d) / (2.0 * self.sigma_sq))

    def gram(self, a, b) -> np.ndarray:
        a, b = _rows(a, b)
        sq = (np.einsum("ij,ij->i", a, a)[:, None]
              + np.einsum("ij,ij->i", b, b)[None, :]
              - 2.0 * (a @ b.T))
        np.maximum(sq, 0.0, out=sq)
        return np.exp(-sq / (2.0 * self.sigma_sq))

    def diag(self, a) -> np.ndarray:
        return np.ones(np.atleast_2d(a).shape[0])

    def to_text(self) -> str:
        return f"rbf sigma_sq={self.sigma_sq!r}"


@dataclass(frozen=True)
class Sigmoid(KernelSpec):
    """``tanh(kappa1 * <x, x'> + kappa2)``; not positive semidefinite in general."""

    kappa1: float = 1.0
    kappa2: float = 0.0
    name = "sigmoid"

    def __call__(self, x, x2) -> float:
        a, b = _pair(x, x2)
        return math.tanh(self.kappa1 * float(a @ b) + self.kappa2)

    def gram(self, a, b) -> np.ndarray:
        a, b = _rows(a, b)
        return np.tanh(self.kappa1 * (a @ b.T) + self.kappa2)

    def to_text(self) -> str:
        return f"sigmoid kappa1={self.kappa1!r} kappa2={self.kappa2!r}"


def kernel_eval(spec: KernelSpec, x, x2) -> float:
    return spec(x, x2)


def parse_kernel(text: str) -> KernelSpec:
    """Inverse of ``KernelSpec.to_text``."""
    name, *params = text.split()
    kv = dict(p.split("=", 1) for p in params)
    if name == "linear":
        return Linear()
    if name == "polynomial":
        return Polynomial(degree=int(kv.get("degree", 3)))
    if name == "rbf":
        return Rbf(sigma_sq=float(kv["sigma_sq"]))
    if name == "sigmoid":
        return Sigmoid(kappa1=float(kv.get("kappa1", 1.0)), kappa2=float(kv.get("kappa2", 0.0)))
    raise ValueError(f"unknown kernel {name!r}")
