"""Deterministic dense Hermitian eigensolver and an SVD built on top of it.

The matrices that show up here are small (Gram matrices of at most a few
dozen signals), so a cyclic complex Jacobi iteration is accurate and more
than fast enough, and it keeps the numerics fully under our control.  The
point of owning the solver is reproducibility: eigenvalues come back sorted,
eigenvectors are canonicalized, and degenerate eigenspaces get one fixed
basis, so repeated runs and permuted inputs produce identical output.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import hypot, sqrt

import numpy as np

#: relative tolerance for accepting a matrix as Hermitian
HERMITIAN_RTOL = 1e-12
#: singular values at or below RANK_RTOL * max(sigma_1, 1) count as zero
RANK_RTOL = 1e-10
#: eigenvalues closer than TIE_RTOL * |lambda|_max are treated as degenerate
TIE_RTOL = 1e-12
#: off-diagonal Frobenius mass target of the Jacobi sweep, relative to ||H||_F
_OFF_RTOL = 1e-14
_MAX_SWEEPS = 100
#: inner products longer than this switch to compensated chunk accumulation
_CHUNK = 4096


@dataclass(frozen=True)
class EigenDecomposition:
    """Eigenvalues in non-increasing order with matching orthonormal columns."""

    eigenvalues: np.ndarray   # (m,) real
    eigenvectors: np.ndarray  # (m, m) complex; column i pairs with eigenvalues[i]


@dataclass(frozen=True)
class SvdResult:
    """Singular triples of a complex matrix, singular values non-increasing.

    left_vectors always carries min(rows, cols) orthonormal columns: the ones
    past the numerical rank are completed arbitrarily-but-deterministically,
    orthogonal to the column span of the input.
    """

    singular_values: np.ndarray  # (m,)
    left_vectors: np.ndarray     # (N, min(N, m)) orthonormal columns
    right_vectors: np.ndarray    # (m, m) orthonormal columns
    rank: int


def validate_hermitian(matrix, rtol: float = HERMITIAN_RTOL) -> np.ndarray:
    """Check Hermitian symmetry within ``rtol`` (relative to the largest
    entry) and return an exactly symmetrized complex copy.

    Raises ValueError for non-square shape, non-finite entries or an
    asymmetry beyond tolerance.
    """
    h = np.asarray(matrix, dtype=np.complex128)
    if h.ndim != 2 or h.shape[0] != h.shape[1] or h.shape[0] < 1:
        raise ValueError(f"expected a square matrix, got shape {h.shape}")
    if not np.all(np.isfinite(h)):
        raise ValueError("matrix entries must be finite")
    scale = float(np.max(np.abs(h)))
    asym = float(np.max(np.abs(h - h.conj().T)))
    if asym > rtol * scale:
        raise ValueError(
            f"matrix is not Hermitian: asymmetry {asym:.3e} exceeds "
            f"{rtol:g} * {scale:.3e}"
        )
    out = 0.5 * (h + h.conj().T)
    idx = np.arange(h.shape[0])
    out[idx, idx] = out[idx, idx].real
    return out


def _jacobi(hermitian: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Cyclic-by-rows complex Jacobi iteration.  Returns (values, vectors),
    unsorted; ``hermitian`` is not modified."""
    a = hermitian.copy()
    m = a.shape[0]
    vectors = np.eye(m, dtype=np.complex128)
    fro = float(np.sqrt(np.sum(np.abs(a) ** 2)))
    if m == 1 or fro == 0.0:
        return a.diagonal().real.copy(), vectors
    target = _OFF_RTOL * fro
    off_mask = ~np.eye(m, dtype=bool)
    for _ in range(_MAX_SWEEPS):
        # summed directly over the off-diagonal entries: the subtraction
        # ||A||_F^2 - sum(diag^2) would cancel to noise near convergence
        off2 = float(np.sum(np.abs(a[off_mask]) ** 2))
        if sqrt(off2) <= target:
            break
        for p in range(m - 1):
            for q in range(p + 1, m):
                g = a[p, q]
                r = abs(g)
                if r == 0.0:
                    continue
                phase = g / r
                tau = (a[q, q].real - a[p, p].real) / (2.0 * r)
                t = 1.0 / (abs(tau) + hypot(1.0, tau))  # hypot never overflows
                if tau < 0.0:
                    t = -t
                c = 1.0 / sqrt(1.0 + t * t)
                s = t * c
                sp = s * phase
                # unitary plane rotation: right-multiply, then left-multiply
                # by the adjoint; (p, q) is annihilated exactly
                col_p = a[:, p].copy()
                col_q = a[:, q].copy()
                a[:, p] = c * col_p - np.conj(sp) * col_q
                a[:, q] = s * col_p + c * np.conj(phase) * col_q
                row_p = a[p, :].copy()
                row_q = a[q, :].copy()
                a[p, :] = c * row_p - sp * row_q
                a[q, :] = s * row_p + c * phase * row_q
                a[p, q] = 0.0
                a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                vec_p = vectors[:, p].copy()
                vec_q = vectors[:, q].copy()
                vectors[:, p] = c * vec_p - np.conj(sp) * vec_q
                vectors[:, q] = s * vec_p + c * np.conj(phase) * vec_q
    return a.diagonal().real.copy(), vectors


def _phase_fixed(column: np.ndarray) -> np.ndarray:
    """Rotate a vector so its largest-modulus entry (first on ties) is real
    and non-negative."""
    idx = int(np.argmax(np.abs(column)))
    pivot = column[idx]
    mag = abs(pivot)
    if mag == 0.0:
        return column
    rotated = column * (pivot.conjugate() / mag)
    rotated[idx] = mag  # exact by construction, not just up to rounding
    return rotated


def _canonical_span_basis(block: np.ndarray) -> np.ndarray:
    """Replace an orthonormal basis of a degenerate eigenspace by the one
    obtained from projecting the canonical basis vectors onto the span and
    orthonormalizing them in index order.  Depends only on the span."""
    dim, width = block.shape
    accepted: list[np.ndarray] = []
    for i in range(dim):
        # coordinates of the projection of e_i in the given basis
        w = np.conj(block[i, :])
        for u in accepted:
            w = w - (w @ np.conj(u)) * u
        nrm = float(np.sqrt(np.sum(np.abs(w) ** 2)))
        if nrm <= 1e-8:
            continue
        w = w / nrm
        for u in accepted:
            w = w - (w @ np.conj(u)) * u
        w = w / float(np.sqrt(np.sum(np.abs(w) ** 2)))
        accepted.append(w)
        if len(accepted) == width:
            break
    if len(accepted) != width:  # pragma: no cover - dimension count forbids it
        raise RuntimeError("failed to canonicalize a degenerate eigenspace")
    return block @ np.stack(accepted, axis=1)


def _canonicalized(values: np.ndarray, vectors: np.ndarray) -> np.ndarray:
    """Apply the degenerate-block and phase conventions to sorted columns."""
    m = values.shape[0]
    lmax = float(np.max(np.abs(values))) if m else 0.0
    tol = TIE_RTOL * lmax
    out = vectors.copy()
    start = 0
    while start < m:
        stop = start + 1
        while stop < m and values[stop - 1] - values[stop] <= tol:
            stop += 1
        if stop - start > 1:
            out[:, start:stop] = _canonical_span_basis(out[:, start:stop])
        for j in range(start, stop):
            out[:, j] = _phase_fixed(out[:, j])
        start = stop
    return out


def eigh_descending(matrix) -> EigenDecomposition:
    """Eigendecomposition of a Hermitian matrix with a deterministic basis.

    Eigenvalues are sorted non-increasing; eigenvalues of a positive
    semi-definite input that undershoot zero by at most 1e-12 relative to the
    largest one are clamped to zero.  Each eigenvector is phase-normalized so
    its largest-modulus entry (first such entry on ties) is real and
    non-negative, and near-equal eigenvalues share one canonical basis of
    their joint eigenspace, so the output does not depend on iteration
    history.
    """
    h = validate_hermitian(matrix)
    values, vectors = _jacobi(h)
    order = np.argsort(-values, kind="stable")
    values = values[order]
    vectors = vectors[:, order]
    top = float(values[0])
    if top > 0.0:
        near_zero = (values < 0.0) & (values >= -1e-12 * top)
        values[near_zero] = 0.0
    vectors = _canonicalized(values, vectors)
    return EigenDecomposition(values, vectors)


def _neumaier(total: float, comp: float, term: float) -> tuple[float, float]:
    new = total + term
    if abs(total) >= abs(term):
        comp += (total - new) + term
    else:
        comp += (term - new) + total
    return new, comp


def compensated_dot(u, v) -> complex:
    """Inner product sum(u * conj(v)), compensated for long vectors.

    Short vectors go straight to the BLAS dot; longer ones are accumulated in
    4096-element chunks whose partial sums are combined with Neumaier
    compensation, which keeps cancellation error from growing with length.
    """
    uu = np.asarray(u, dtype=np.complex128).ravel()
    vv = np.asarray(v, dtype=np.complex128).ravel()
    if uu.shape != vv.shape:
        raise ValueError("vectors must have matching lengths")
    if uu.size <= _CHUNK:
        return complex(np.dot(uu, np.conj(vv)))
    re_total = re_comp = im_total = im_comp = 0.0
    for lo in range(0, uu.size, _CHUNK):
        part = complex(np.dot(uu[lo:lo + _CHUNK], np.conj(vv[lo:lo + _CHUNK])))
        re_total, re_comp = _neumaier(re_total, re_comp, part.real)
        im_total, im_comp = _neumaier(im_total, im_comp, part.imag)
    return complex(re_total + re_comp, im_total + im_comp)


def gram_matrix(columns) -> np.ndarray:
    """Hermitian Gram matrix ``M[i, j] = <a_j, a_i>`` of the columns a_k,
    i.e. the adjoint-times-matrix product, exactly symmetrized.

    Long columns are accumulated with :func:`compensated_dot` so eigenvalue
    tails stay trustworthy at tight tolerances.
    """
    a = np.asarray(columns, dtype=np.complex128)
    if a.ndim != 2:
        raise ValueError(f"expected a 2-d column matrix, got shape {a.shape}")
    width = a.shape[1]
    if a.shape[0] <= _CHUNK:
        m = a.conj().T @ a
    else:
        m = np.empty((width, width), dtype=np.complex128)
        for i in range(width):
            for j in range(i, width):
                val = compensated_dot(a[:, j], a[:, i])
                m[i, j] = val
                m[j, i] = val.conjugate()
    m = 0.5 * (m + m.conj().T)
    idx = np.arange(width)
    m[idx, idx] = m[idx, idx].real
    return m


def _complete_basis(existing: np.ndarray, rows: int, count: int) -> np.ndarray:
    """Deterministically extend orthonormal columns by ``count`` more,
    orthogonal to them: canonical basis vectors are projected out and
    re-orthonormalized in index order."""
    kept: list[np.ndarray] = [existing[:, i] for i in range(existing.shape[1])]
    added: list[np.ndarray] = []
    for i in range(rows):
        w = np.zeros(rows, dtype=np.complex128)
        w[i] = 1.0
        for u in kept:
            w = w - (w @ np.conj(u)) * u
        nrm = float(np.sqrt(np.sum(np.abs(w) ** 2)))
        if nrm <= 1e-8:
            continue
        w = w / nrm
        for u in kept:
            w = w - (w @ np.conj(u)) * u
        w = w / float(np.sqrt(np.sum(np.abs(w) ** 2)))
        kept.append(w)
        added.append(w)
        if len(added) == count:
            break
    if len(added) != count:  # pragma: no cover - dimension count forbids it
        raise RuntimeError("failed to complete an orthonormal basis")
    return np.stack(added, axis=1)


def svd(matrix) -> SvdResult:
    """Singular value decomposition through the Gram-matrix eigenproblem.

    Right singular vectors are the eigenvectors of adjoint(A) @ A, singular
    values the square roots of its (clamped) eigenvalues, and each left
    vector within the numerical rank is the matching unit combination of the
    columns of A; the remaining left vectors complete the set orthogonally.
    The rank counts singular values above RANK_RTOL * max(sigma_1, 1).
    """
    a = np.asarray(matrix, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
        raise ValueError(f"expected a non-empty 2-d matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix entries must be finite")
    rows, cols = a.shape
    eig = eigh_descending(gram_matrix(a))
    lam = np.maximum(eig.eigenvalues, 0.0)
    sigma = np.sqrt(lam)
    tol = RANK_RTOL * max(float(sigma[0]), 1.0)
    rank = min(int(np.sum(sigma > tol)), rows)
    keep = min(rows, cols)
    left = np.zeros((rows, keep), dtype=np.complex128)
    for i in range(rank):
        left[:, i] = (a @ eig.eigenvectors[:, i]) / sigma[i]
    if rank < keep:
        left[:, rank:] = _complete_basis(left[:, :rank], rows, keep - rank)
    return SvdResult(sigma, left, eig.eigenvectors, rank)
