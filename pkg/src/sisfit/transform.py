"""Unitary DFT on periodic grids and the frequency-fiber bookkeeping.

Signals live on a d-dimensional periodic grid with axis sizes N_j = P_j * Q_j,
flattened row-major (axis 0 slowest).  Translations by Q_j samples along axis
j generate the shift lattice, which has P = prod(P_j) distinct offsets.  In
frequency space the grid splits into P cosets ("fibers") of length
Q = prod(Q_j): the fiber at offset w collects the spectrum at w + k * P over
all multi-indices k, and a lattice shift acts on each fiber as multiplication
by a single unit scalar.  That reindexing, more than the transform itself, is
the load-bearing part of this module.

The transform is a mixed-radix Cooley-Tukey recursion over the factors of
each axis length with an O(n^2) direct summation at prime leaves; the direct
path doubles as the reference the fast path is tested against.  Both
directions carry the symmetric 1/sqrt(N) normalization, so the transform is
norm-preserving.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import sqrt

import numpy as np


@dataclass(frozen=True)
class GridSpec:
    """Periodic sample grid together with its translation lattice.

    axes:   per-axis sample counts N_j (row-major flattening, axis 0 slowest)
    phases: per-axis translate counts P_j; each must divide its axis size.
            The lattice step along axis j is steps[j] = N_j // P_j samples.
    """

    axes: tuple[int, ...]
    phases: tuple[int, ...]

    def __post_init__(self):
        axes = tuple(int(n) for n in np.atleast_1d(np.asarray(self.axes, dtype=object)))
        phases = tuple(int(p) for p in np.atleast_1d(np.asarray(self.phases, dtype=object)))
        object.__setattr__(self, "axes", axes)
        object.__setattr__(self, "phases", phases)
        if not axes or len(axes) != len(phases):
            raise ValueError("axes and phases must be non-empty and equally long")
        for n, p in zip(axes, phases):
            if n < 1 or p < 1:
                raise ValueError("axis sizes and phase counts must be positive")
            if n % p != 0:
                raise ValueError(f"phase count {p} does not divide axis size {n}")

    @property
    def ndim(self) -> int:
        return len(self.axes)

    @property
    def steps(self) -> tuple[int, ...]:
        """Lattice step in samples along each axis."""
        return tuple(n // p for n, p in zip(self.axes, self.phases))

    @property
    def size(self) -> int:
        """Total sample count N."""
        return int(np.prod(self.axes))

    @property
    def translate_count(self) -> int:
        """Number of distinct lattice translates P."""
        return int(np.prod(self.phases))

    @property
    def fiber_size(self) -> int:
        """Length Q of each frequency fiber."""
        return int(np.prod(self.steps))


@dataclass(frozen=True)
class SignalSet:
    """A family of m signals on a common grid, rows of an (m, N) array."""

    grid: GridSpec
    samples: np.ndarray

    def __post_init__(self):
        samples = np.atleast_2d(np.asarray(self.samples, dtype=np.complex128))
        if samples.ndim != 2 or samples.shape[0] < 1:
            raise ValueError("samples must form a non-empty 2-d array")
        if samples.shape[1] != self.grid.size:
            raise ValueError(
                f"signal length {samples.shape[1]} does not match the "
                f"grid size {self.grid.size}"
            )
        if not np.all(np.isfinite(samples)):
            raise ValueError("signal samples must be finite")
        object.__setattr__(self, "samples", samples)

    @property
    def count(self) -> int:
        return self.samples.shape[0]


@dataclass(frozen=True)
class FiberSet:
    """Spectra of a signal family regrouped by fiber.

    data has shape (P, Q, m); data[w, :, j] is the fiber of signal j at
    frequency offset w (row-major over the phase multi-index).
    """

    grid: GridSpec
    data: np.ndarray

    @property
    def count(self) -> int:
        return self.data.shape[2]


def _smallest_factor(n: int) -> int:
    if n % 2 == 0:
        return 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return f
        f += 2
    return n


@lru_cache(maxsize=None)
def _dft_matrix(n: int) -> np.ndarray:
    # the k*j products are reduced mod n in exact integer arithmetic before
    # the complex exponential, which keeps twiddles accurate for large n
    k = np.arange(n)
    mat = np.exp((-2j * np.pi / n) * ((k[:, None] * k[None, :]) % n))
    mat.flags.writeable = False
    return mat


def _fft_rows(x: np.ndarray) -> np.ndarray:
    """Unnormalized forward DFT along the last axis of a (batch, n) array."""
    batch, n = x.shape
    if n == 1:
        return x.copy()
    p = _smallest_factor(n)
    if p == n:
        return x @ _dft_matrix(n)
    q = n // p
    sub = _fft_rows(x.reshape(batch, q, p).transpose(0, 2, 1).reshape(batch * p, q))
    sub = sub.reshape(batch, p, q)
    r = np.arange(p)[:, None]
    s = np.arange(q)[None, :]
    sub = sub * np.exp((-2j * np.pi / n) * ((r * s) % n))
    out = np.einsum("tr,brs->bts", _dft_matrix(p), sub)
    return out.reshape(batch, n)


def _forward_rows_nd(rows: np.ndarray, axes: tuple[int, ...]) -> np.ndarray:
    batch = rows.shape[0]
    arr = rows.reshape((batch,) + axes)
    for ax, length in enumerate(axes):
        moved = np.moveaxis(arr, ax + 1, -1)
        shape = moved.shape
        moved = _fft_rows(moved.reshape(-1, length)).reshape(shape)
        arr = np.moveaxis(moved, -1, ax + 1)
    return arr.reshape(batch, -1)


def _dft_batch(rows: np.ndarray, grid: GridSpec, inverse: bool = False) -> np.ndarray:
    x = np.asarray(rows, dtype=np.complex128)
    scale = 1.0 / sqrt(grid.size)
    if inverse:
        return np.conj(_forward_rows_nd(np.conj(x), grid.axes)) * scale
    return _forward_rows_nd(x, grid.axes) * scale


def unitary_dft(signal, grid: GridSpec) -> np.ndarray:
    """Norm-preserving DFT of one length-N signal (row-major grid order)."""
    x = np.asarray(signal, dtype=np.complex128)
    if x.ndim != 1 or x.shape[0] != grid.size:
        raise ValueError(f"expected a vector of length {grid.size}, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError("signal entries must be finite")
    return _dft_batch(x[None, :], grid)[0]


def inverse_dft(spectrum, grid: GridSpec) -> np.ndarray:
    """Inverse of :func:`unitary_dft` (also norm-preserving)."""
    x = np.asarray(spectrum, dtype=np.complex128)
    if x.ndim != 1 or x.shape[0] != grid.size:
        raise ValueError(f"expected a vector of length {grid.size}, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError("spectrum entries must be finite")
    return _dft_batch(x[None, :], grid, inverse=True)[0]


def naive_dft(signal) -> np.ndarray:
    """Direct O(n^2) summation DFT, unnormalized.

    This is the reference implementation: the fast path reduces to it at
    prime lengths and is tested against it everywhere else.  Divide by
    sqrt(n) to compare with :func:`unitary_dft` on a 1-d grid.
    """
    x = np.asarray(signal, dtype=np.complex128)
    if x.ndim != 1 or x.shape[0] < 1:
        raise ValueError("expected a non-empty vector")
    return x @ _dft_matrix(x.shape[0])


def _to_fibers(rows: np.ndarray, grid: GridSpec) -> np.ndarray:
    """(batch, N) spectra -> (batch, P, Q) fiber stacks."""
    batch = rows.shape[0]
    d = grid.ndim
    split: list[int] = [batch]
    for n, p in zip(grid.axes, grid.phases):
        split.extend((n // p, p))  # frequency = k * P + w along each axis
    arr = rows.reshape(split)
    perm = [0] + [2 * j + 2 for j in range(d)] + [2 * j + 1 for j in range(d)]
    return arr.transpose(perm).reshape(batch, grid.translate_count, grid.fiber_size)


def _from_fibers(fibers: np.ndarray, grid: GridSpec) -> np.ndarray:
    """(batch, P, Q) fiber stacks -> (batch, N) spectra."""
    batch = fibers.shape[0]
    d = grid.ndim
    arr = fibers.reshape([batch] + list(grid.phases) + list(grid.steps))
    perm = [0]
    for j in range(d):
        perm.extend((1 + d + j, 1 + j))
    return arr.transpose(perm).reshape(batch, grid.size)


def fiberize(signals: SignalSet) -> FiberSet:
    """Transform a signal family and regroup the spectra by fiber.

    The result satisfies data[w, k, j] = spectrum_j at frequency w + k * P
    (multi-index arithmetic per axis, row-major flattening on both w and k),
    and the total energy over all fibers equals the signal energy.
    """
    spectrum = _dft_batch(signals.samples, signals.grid)
    stacked = _to_fibers(spectrum, signals.grid)  # (m, P, Q)
    return FiberSet(signals.grid, np.ascontiguousarray(stacked.transpose(1, 2, 0)))


def defiberize(fibers, grid: GridSpec) -> np.ndarray:
    """Rebuild one time-domain signal from its (P, Q) fiber stack."""
    arr = np.asarray(fibers, dtype=np.complex128)
    expected = (grid.translate_count, grid.fiber_size)
    if arr.shape != expected:
        raise ValueError(f"expected a fiber stack of shape {expected}, got {arr.shape}")
    spectrum = _from_fibers(arr[None], grid)
    return _dft_batch(spectrum, grid, inverse=True)[0]


def lattice_shift(signal, grid: GridSpec, offsets) -> np.ndarray:
    """Translate a signal by offsets[j] lattice steps along each axis.

    One lattice step along axis j moves the signal by steps[j] samples, so
    ``lattice_shift(x, grid, t)`` returns the signal y(i) = x(i - t * step)
    with periodic wraparound.
    """
    x = np.asarray(signal, dtype=np.complex128)
    if x.ndim != 1 or x.shape[0] != grid.size:
        raise ValueError(f"expected a vector of length {grid.size}, got shape {x.shape}")
    offs = tuple(int(t) for t in np.atleast_1d(np.asarray(offsets, dtype=object)))
    if len(offs) != grid.ndim:
        raise ValueError(f"expected {grid.ndim} offsets, got {len(offs)}")
    arr = x.reshape(grid.axes)
    shift = tuple(t * q for t, q in zip(offs, grid.steps))
    return np.roll(arr, shift, axis=tuple(range(grid.ndim))).reshape(-1)
