"""Eigenvalues of the data scatter matrix and the spectral proxy for opt(k) - opt(2k)."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .data import Dataset
from .errors import NumericError

# beyond this size cyclic Jacobi is too slow; LAPACK is used instead
JACOBI_MAX_DIM = 256


@dataclass(frozen=True)
class EigenSpectrum:
    lambdas: np.ndarray  # descending
    total_variance: float

    @property
    def prefix(self) -> np.ndarray:
        """``prefix[j]`` is the sum of the j largest eigenvalues; ``prefix[0] = 0``."""
        return np.concatenate(([0.0], np.cumsum(self.lambdas)))

    def Lambda(self, j: int) -> float:
        j = max(0, min(int(j), len(self.lambdas)))
        return float(self.prefix[j])


def symmetric_eigenvalues(A) -> np.ndarray:
    """Eigenvalues of a symmetric matrix, Jacobi for small sizes and LAPACK otherwise."""
    A = np.asarray(A, dtype=np.float64)
    if A.shape[0] <= JACOBI_MAX_DIM:
        return np.asarray(kernels.jacobi_eigenvalues(A))
    return np.linalg.eigvalsh(A)


def covariance_spectrum(dataset, form: str = "auto") -> EigenSpectrum:
    """Descending eigenvalues of ``Y Y^T`` (Y holding the points as columns).

    ``form="gram"`` diagonalizes the d x d matrix ``Y^T Y`` instead, which has
    the same nonzero spectrum; ``"auto"`` picks whichever side is smaller and
    ``"outer"`` always builds the n x n matrix.
    """
    X = dataset.points if isinstance(dataset, Dataset) else np.asarray(dataset, dtype=np.float64)
    if not np.all(np.isfinite(X)):
        raise NumericError("non-finite entries in dataset")
    n, d = X.shape
    if form == "auto":
        form = "gram" if d <= n else "outer"
    if form == "gram":
        M = X.T @ X
    elif form == "outer":
        M = X @ X.T
    else:
        raise ValueError(f"unknown spectrum form {form!r}")
    lam = symmetric_eigenvalues(M)
    lam = np.sort(np.maximum(lam, 0.0))[::-1]
    # keep only the min(n, d) meaningful values; the rest are zero up to rounding
    lam = lam[: min(n, d)]
    total = float(np.einsum("ij,ij->", X, X))
    return EigenSpectrum(lambdas=lam, total_variance=total)


def f_evd(spectrum: EigenSpectrum, k: int) -> float:
    """Sum of eigenvalues k .. 2k-1 (1-based), zero past the end of the spectrum."""
    if k < 1:
        raise ValueError("k must be >= 1")
    return spectrum.Lambda(2 * k - 1) - spectrum.Lambda(k - 1)


def evd_lower_bound(spectrum: EigenSpectrum, k: int) -> float:
    """Lower bound on the optimal k-means cost of zero-mean data."""
    return spectrum.total_variance - spectrum.Lambda(k - 1)
