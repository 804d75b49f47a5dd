"""Kernel classes: normalized Gram matrices, a cyclic Jacobi eigensolver,
the eigenvalue-tailsum complexity bound, and finite hypothesis tables for
the transductive lab built from random unit-ball kernel expansions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import ConfigurationError, NumericalError
from .ground_set import RngStream
from .transductive import TransductiveProblem

JACOBI_MAX_SWEEPS = 30
PSD_TOL = 1e-10


@dataclass(frozen=True)
class KernelSpec:
    """A built-in kernel, normalized so that sup_x k(x, x) <= 1.

    Kinds: "gaussian" (bandwidth), "linear", "polynomial" (degree, offset),
    "delta".  Linear and polynomial kernels are rescaled by the largest
    diagonal value at Gram-assembly time; gaussian and delta already have
    unit diagonal.
    """

    kind: str
    bandwidth: float = 1.0
    degree: int = 2
    offset: float = 0.0

    def __post_init__(self):
        if self.kind not in ("gaussian", "linear", "polynomial", "delta"):
            raise ConfigurationError(f"unknown kernel kind {self.kind!r}")
        if self.kind == "gaussian" and self.bandwidth <= 0:
            raise ConfigurationError("gaussian bandwidth must be positive")
        if self.kind == "polynomial" and self.degree < 1:
            raise ConfigurationError("polynomial degree must be >= 1")


@dataclass(frozen=True)
class EigenSpectrum:
    """Nonincreasing eigenvalues plus the final off-diagonal residual."""

    lambdas: np.ndarray
    residual: float

    def __post_init__(self):
        lam = np.asarray(self.lambdas, dtype=float)
        object.__setattr__(self, "lambdas", lam)
        if np.any(np.diff(lam) > 1e-14):
            raise ConfigurationError("eigenvalues must be nonincreasing")
        if lam.size and lam[-1] < -PSD_TOL:
            raise ConfigurationError(
                f"matrix is not PSD within tolerance: min eigenvalue {lam[-1]:.3g}"
            )

    @property
    def trace(self) -> float:
        return float(self.lambdas.sum())


def _raw_kernel_matrix(points: np.ndarray, spec: KernelSpec) -> np.ndarray:
    if spec.kind == "delta":
        return np.eye(points.shape[0])
    if spec.kind == "gaussian":
        sq = ((points[:, None, :] - points[None, :, :]) ** 2).sum(axis=2)
        return np.exp(-sq / (2.0 * spec.bandwidth**2))
    inner = points @ points.T
    if spec.kind == "linear":
        k = inner
    else:
        k = (inner + spec.offset) ** spec.degree
    top = np.abs(np.diag(k)).max()
    if top > 1.0:
        k = k / top
    return k


def gram_matrix(points, spec: KernelSpec) -> np.ndarray:
    """Normalized Gram matrix with entries k(X_i, X_j)/N; diagonal <= 1/N."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    if pts.ndim != 2 or pts.shape[0] < 1:
        raise ConfigurationError("points must form a nonempty 2-D array")
    if not np.all(np.isfinite(pts)):
        raise ConfigurationError("points must be finite")
    n = pts.shape[0]
    k = _raw_kernel_matrix(pts, spec)
    k = 0.5 * (k + k.T)
    return k / n


def eigen_spectrum(gram: np.ndarray, max_sweeps: int = JACOBI_MAX_SWEEPS) -> EigenSpectrum:
    """Full spectrum of a symmetric matrix via cyclic Jacobi rotations.

    Sweeps rotate away every off-diagonal pair in turn until the largest
    off-diagonal magnitude falls below 1e-12 times the trace scale.
    """
    a = np.array(gram, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ConfigurationError("gram must be square")
    if not np.allclose(a, a.T, atol=1e-12):
        raise ConfigurationError("gram must be symmetric")
    n = a.shape[0]
    if n == 1:
        return EigenSpectrum(lambdas=a[0].copy(), residual=0.0)
    scale = max(abs(np.trace(a)), 1.0e-30)
    tol = 1e-12 * scale
    for _ in range(max_sweeps):
        off = np.abs(a - np.diag(np.diag(a))).max()
        if off <= tol:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= tol / (n * n):
                    continue
                theta = 0.5 * (a[q, q] - a[p, p]) / apq
                t = math.copysign(1.0, theta) / (
                    abs(theta) + math.sqrt(theta * theta + 1.0)
                )
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                rot_p = c * a[:, p] - s * a[:, q]
                rot_q = s * a[:, p] + c * a[:, q]
                a[:, p], a[:, q] = rot_p, rot_q
                a[p, :], a[q, :] = c * a[p, :] - s * a[q, :], (
                    s * a[p, :] + c * a[q, :]
                )
    else:
        off = np.abs(a - np.diag(np.diag(a))).max()
        raise NumericalError(
            f"Jacobi did not converge in {max_sweeps} sweeps; residual {off:.3g}"
        )
    residual = float(np.abs(a - np.diag(np.diag(a))).max())
    lam = np.sort(np.diag(a))[::-1]
    lam = np.where(np.abs(lam) < PSD_TOL, np.maximum(lam, 0.0), lam)
    return EigenSpectrum(lambdas=lam, residual=residual)


def tailsum_bound(
    spectrum: EigenSpectrum, k: int, c_L: float = 1.0, inclusive: bool = False
) -> tuple[float, int]:
    """min over integer theta in [0, k] of
    c_L (theta/k + sqrt((1/k) sum of eigenvalues beyond theta)).

    By default the tailsum excludes the theta largest eigenvalues (so
    theta = N gives 0); `inclusive` switches to the convention that keeps
    the theta-th one.  Returns (value, minimizing theta).
    """
    if k < 1:
        raise ConfigurationError("k must be >= 1")
    if c_L <= 0:
        raise ConfigurationError("c_L must be positive")
    lam = spectrum.lambdas
    n = lam.size
    suffix = np.concatenate([np.cumsum(lam[::-1])[::-1], [0.0]])  # suffix[i] = sum lam[i:]
    best_val, best_theta = math.inf, 0
    for theta in range(min(k, n) + 1):
        start = theta if not inclusive else max(theta - 1, 0)
        tail = max(suffix[min(start, n)], 0.0)
        val = c_L * (theta / k + math.sqrt(tail / k))
        if val < best_val - 1e-15:
            best_val, best_theta = val, theta
    return best_val, best_theta


def kernel_hypothesis_table(
    points,
    labels,
    spec: KernelSpec,
    net_size: int,
    rng: RngStream,
    loss: str = "squared",
) -> TransductiveProblem:
    """A finite transductive problem from a random net in the unit ball.

    Generates net_size functions f = sum_i alpha_i k(., X_i) with RKHS
    norm alpha' (N K_N) alpha <= 1, always including the zero function,
    and evaluates the squared loss against the labels, clipped to [0, 1].
    """
    if net_size < 1:
        raise ConfigurationError("net_size must be >= 1")
    if loss != "squared":
        raise ConfigurationError(f"unsupported loss {loss!r}")
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    y = np.asarray(labels, dtype=float)
    n = pts.shape[0]
    if y.shape != (n,):
        raise ConfigurationError("labels must have one entry per point")
    kn = gram_matrix(pts, spec)
    norm_mat = n * kn  # quadratic form of the RKHS norm
    if np.abs(norm_mat).max() == 0.0:
        raise ConfigurationError("degenerate Gram matrix: all zeros")
    gen = rng.generator()
    alphas = [np.zeros(n)]
    while len(alphas) < net_size:
        direction = gen.standard_normal(n)
        q = float(direction @ norm_mat @ direction)
        if q <= 0.0:
            continue
        radius = math.sqrt(gen.uniform())
        alphas.append(direction * radius / math.sqrt(q))
    rows = []
    for alpha in alphas:
        f_vals = n * (kn @ alpha)  # f(X_i) = sum_j alpha_j k(X_i, X_j)
        rows.append(np.clip((f_vals - y) ** 2, 0.0, 1.0))
    return TransductiveProblem(np.array(rows))
