"""Closest low-dimensional subspace to a finite family of complex vectors.

The solver works through the Gram matrix of the family, so the ambient
dimension only enters through inner products.  The returned spanning vectors
are unit-normalized eigen-combinations of the inputs; together they are an
orthonormal basis of the fitted subspace (padded with zero rows once the
spectrum runs out), and the summed eigenvalue tail is the exact residual.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import spectral

#: the optimum is flagged unique when eigenvalues n and n+1 are separated by
#: more than GAP_RTOL * max(lambda_1, 1)
GAP_RTOL = 1e-8


@dataclass(frozen=True)
class FitResult:
    """Outcome of a best-subspace fit.

    frame_vectors:  (n, D) rows spanning the fitted subspace; rows beyond the
                    effective rank are zero.
    error:          total squared distance of the inputs to the subspace.
    eigenvalues:    full Gram spectrum, non-increasing, clamped at zero.
    effective_rank: eigenvalue count above the rank tolerance.
    gap_ok:         eigenvalues n and n+1 are separated, so the optimal
                    subspace is unique.
    """

    frame_vectors: np.ndarray
    error: float
    eigenvalues: np.ndarray
    effective_rank: int
    gap_ok: bool


def _as_vector_rows(vectors) -> np.ndarray:
    a = np.atleast_2d(np.asarray(vectors, dtype=np.complex128))
    if a.ndim != 2 or a.shape[0] < 1:
        raise ValueError("expected a non-empty 2-d array of row vectors")
    if not np.all(np.isfinite(a)):
        raise ValueError("vector entries must be finite")
    return a


def best_subspace(vectors, n: int, *, rank_rel: float = spectral.RANK_RTOL,
                  gap_rel: float = GAP_RTOL) -> FitResult:
    """Fit the subspace of dimension at most ``n`` that minimizes the total
    squared residual of the given row vectors.

    Row i of the result is the i-th unit eigen-combination of the inputs:
    sigma_i^{-1} * sum_j y_ij a_j with y_i the i-th eigenvector of the Gram
    matrix adjoint(A) @ A.  Rows whose eigenvalue falls below the rank
    tolerance stay zero, and requesting n >= m reproduces an orthonormal
    basis of the full span padded with zeros.
    """
    a = _as_vector_rows(vectors)
    if n < 0:
        raise ValueError("subspace dimension must be >= 0")
    m = a.shape[0]
    eig = spectral.eigh_descending(spectral.gram_matrix(a.T))
    lam = np.maximum(eig.eigenvalues, 0.0)
    sigma = np.sqrt(lam)
    rank = int(np.sum(lam > rank_rel * float(lam[0])))
    frame = np.zeros((n, a.shape[1]), dtype=np.complex128)
    for i in range(min(n, rank)):
        frame[i] = (eig.eigenvectors[:, i] @ a) / sigma[i]
    error = float(np.sum(lam[n:]))
    if n == 0:
        gap_ok = True  # the zero subspace is the only candidate
    elif n > m:
        gap_ok = False
    else:
        gap_tail = float(lam[n]) if n < m else 0.0
        gap_ok = bool(float(lam[n - 1]) - gap_tail > gap_rel * max(float(lam[0]), 1.0))
    return FitResult(frame, error, lam, rank, gap_ok)


def _orthonormal_rows(basis: np.ndarray, rank_rel: float) -> np.ndarray:
    """Modified Gram-Schmidt over rows, dropping dependent or null ones."""
    kept: list[np.ndarray] = []
    for row in basis:
        scale = float(np.sqrt(np.sum(np.abs(row) ** 2)))
        if scale == 0.0:
            continue
        w = row.astype(np.complex128, copy=True)
        for u in kept:
            w = w - (w @ np.conj(u)) * u
        nrm = float(np.sqrt(np.sum(np.abs(w) ** 2)))
        if nrm <= rank_rel * scale:
            continue
        w = w / nrm
        for u in kept:  # second pass tightens orthogonality
            w = w - (w @ np.conj(u)) * u
        w = w / float(np.sqrt(np.sum(np.abs(w) ** 2)))
        kept.append(w)
    if not kept:
        return np.zeros((0, basis.shape[1] if basis.ndim == 2 else 0), dtype=np.complex128)
    return np.stack(kept)


def residual(vectors, basis, *, rank_rel: float = spectral.RANK_RTOL) -> float:
    """Total squared distance of the row ``vectors`` to span(basis rows).

    The basis is orthonormalized first (dependent and null rows dropped), and
    each vector's expansion in it is actually subtracted, so the value stays
    meaningful even for residuals near zero.  An empty basis gives the exact
    total energy of the inputs.
    """
    a = _as_vector_rows(vectors)
    b = np.asarray(basis, dtype=np.complex128)
    if b.size == 0:
        ortho = np.zeros((0, a.shape[1]), dtype=np.complex128)
    else:
        b = np.atleast_2d(b)
        if b.shape[1] != a.shape[1]:
            raise ValueError("basis and vectors must share the ambient dimension")
        if not np.all(np.isfinite(b)):
            raise ValueError("basis entries must be finite")
        ortho = _orthonormal_rows(b, rank_rel)
    if ortho.shape[0] == 0:
        return float(np.sum(np.abs(a) ** 2))
    coef = a @ ortho.conj().T
    resid = a - coef @ ortho
    return float(np.sum(np.abs(resid) ** 2))
