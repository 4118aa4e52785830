"""Tests for the unitary DFT, fiberization, and grid bookkeeping."""

from __future__ import annotations

import math

import numpy as np
import pytest

from sisfit.transform import (
    FiberSet,
    GridSpec,
    SignalSet,
    defiberize,
    fiberize,
    inverse_dft,
    lattice_shift,
    naive_dft,
    unitary_dft,
)


def random_signals(rng, grid, m):
    data = rng.standard_normal((m, grid.size)) + 1j * rng.standard_normal((m, grid.size))
    return SignalSet(grid, data)


class TestGridSpec:
    def test_basic_properties(self):
        g = GridSpec((12,), (4,))
        assert g.ndim == 1
        assert g.size == 12
        assert g.steps == (3,)
        assert g.translate_count == 4
        assert g.fiber_size == 3

    def test_two_dimensional(self):
        g = GridSpec((6, 10), (2, 5))
        assert g.ndim == 2
        assert g.size == 60
        assert g.steps == (3, 2)
        assert g.translate_count == 10
        assert g.fiber_size == 6

    def test_rejects_non_divisor(self):
        with pytest.raises(ValueError):
            GridSpec((10,), (3,))

    def test_rejects_mismatched_lengths(self):
        with pytest.raises(ValueError):
            GridSpec((4, 4), (2,))

    def test_rejects_non_positive(self):
        with pytest.raises(ValueError):
            GridSpec((0,), (1,))
        with pytest.raises(ValueError):
            GridSpec((4,), (-2,))

    def test_signalset_validates_length(self):
        g = GridSpec((4,), (2,))
        with pytest.raises(ValueError):
            SignalSet(g, np.zeros((1, 5)))

    def test_signalset_rejects_non_finite(self):
        g = GridSpec((4,), (2,))
        with pytest.raises(ValueError):
            SignalSet(g, np.array([[1.0, np.inf, 0.0, 0.0]]))


class TestUnitaryDft:
    def test_delta_is_flat(self):
        g = GridSpec((4,), (2,))
        x = np.zeros(4, dtype=complex)
        x[0] = 1.0
        np.testing.assert_allclose(unitary_dft(x, g), np.full(4, 0.5), atol=1e-15)

    def test_constant_is_delta(self):
        g = GridSpec((4,), (2,))
        out = unitary_dft(np.ones(4, dtype=complex), g)
        np.testing.assert_allclose(out, [2.0, 0.0, 0.0, 0.0], atol=1e-14)

    def test_matches_naive_oracle(self):
        rng = np.random.default_rng(0)
        for n in (1, 2, 3, 4, 6, 8, 12, 15, 16, 30):
            g = GridSpec((n,), (1,))
            x = rng.standard_normal(n) + 1j * rng.standard_normal(n)
            got = unitary_dft(x, g)
            want = naive_dft(x) / math.sqrt(n)
            np.testing.assert_allclose(got, want, atol=1e-12 * n)

    def test_matches_numpy_fft(self):
        rng = np.random.default_rng(1)
        for n in (5, 9, 16, 24, 36, 105):
            g = GridSpec((n,), (1,))
            x = rng.standard_normal(n) + 1j * rng.standard_normal(n)
            np.testing.assert_allclose(unitary_dft(x, g),
                                       np.fft.fft(x) / math.sqrt(n),
                                       atol=1e-11)

    def test_parseval(self):
        rng = np.random.default_rng(2)
        g = GridSpec((24,), (4,))
        x = rng.standard_normal(24) + 1j * rng.standard_normal(24)
        np.testing.assert_allclose(np.sum(np.abs(unitary_dft(x, g)) ** 2),
                                   np.sum(np.abs(x) ** 2), rtol=1e-13)

    def test_round_trip(self):
        rng = np.random.default_rng(3)
        g = GridSpec((30,), (5,))
        x = rng.standard_normal(30) + 1j * rng.standard_normal(30)
        np.testing.assert_allclose(inverse_dft(unitary_dft(x, g), g), x, atol=1e-13)

    def test_two_dimensional_matches_numpy(self):
        rng = np.random.default_rng(4)
        g = GridSpec((6, 8), (2, 4))
        x = rng.standard_normal(48) + 1j * rng.standard_normal(48)
        want = np.fft.fft2(x.reshape(6, 8)).ravel() / math.sqrt(48)
        np.testing.assert_allclose(unitary_dft(x, g), want, atol=1e-11)

    def test_linearity(self):
        rng = np.random.default_rng(5)
        g = GridSpec((12,), (3,))
        x = rng.standard_normal(12) + 1j * rng.standard_normal(12)
        y = rng.standard_normal(12) + 1j * rng.standard_normal(12)
        a = 2.0 - 1.5j
        np.testing.assert_allclose(unitary_dft(a * x + y, g),
                                   a * unitary_dft(x, g) + unitary_dft(y, g),
                                   atol=1e-12)


class TestFiberize:
    def test_layout_n4_p2(self):
        # spectrum (a, b, c, d) with P=2 splits into fibers (a, c) and (b, d)
        g = GridSpec((4,), (2,))
        x = np.zeros(4, dtype=complex)
        spec = np.array([1.0, 2.0, 3.0, 4.0], dtype=complex)
        x = inverse_dft(spec, g)
        fibers = fiberize(SignalSet(g, x[None, :]))
        assert fibers.data.shape == (2, 2, 1)
        np.testing.assert_allclose(fibers.data[0, :, 0], [1.0, 3.0], atol=1e-13)
        np.testing.assert_allclose(fibers.data[1, :, 0], [2.0, 4.0], atol=1e-13)

    def test_p_equals_n(self):
        # every fiber is a single spectral value
        g = GridSpec((4,), (4,))
        rng = np.random.default_rng(6)
        x = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        fibers = fiberize(SignalSet(g, x[None, :]))
        assert fibers.data.shape == (4, 1, 1)
        np.testing.assert_allclose(fibers.data[:, 0, 0], unitary_dft(x, g), atol=1e-13)

    def test_p_equals_one(self):
        g = GridSpec((6,), (1,))
        rng = np.random.default_rng(7)
        x = rng.standard_normal(6) + 1j * rng.standard_normal(6)
        fibers = fiberize(SignalSet(g, x[None, :]))
        assert fibers.data.shape == (1, 6, 1)
        np.testing.assert_allclose(fibers.data[0, :, 0], unitary_dft(x, g), atol=1e-13)

    def test_energy_preserved(self):
        rng = np.random.default_rng(8)
        g = GridSpec((12, 6), (3, 2))
        signals = random_signals(rng, g, 3)
        fibers = fiberize(signals)
        np.testing.assert_allclose(np.sum(np.abs(fibers.data) ** 2),
                                   np.sum(np.abs(signals.samples) ** 2),
                                   rtol=1e-13)

    def test_round_trip(self):
        rng = np.random.default_rng(9)
        g = GridSpec((8, 9), (4, 3))
        signals = random_signals(rng, g, 2)
        fibers = fiberize(signals)
        for i in range(2):
            back = defiberize(fibers.data[:, :, i], g)
            np.testing.assert_allclose(back, signals.samples[i], atol=1e-12)

    def test_lattice_shift_is_scalar_on_fibers(self):
        # shifting by one lattice step multiplies fiber w by a unit scalar
        # depending only on w — the key covariance behind everything else
        rng = np.random.default_rng(10)
        g = GridSpec((12,), (4,))
        x = rng.standard_normal(12) + 1j * rng.standard_normal(12)
        base = fiberize(SignalSet(g, x[None, :])).data[:, :, 0]
        shifted = fiberize(SignalSet(g, lattice_shift(x, g, (1,))[None, :])).data[:, :, 0]
        for w in range(4):
            expected = np.exp(-2j * np.pi * w / 4) * base[w]
            np.testing.assert_allclose(shifted[w], expected, atol=1e-12)

    def test_lattice_shift_two_dimensional(self):
        rng = np.random.default_rng(11)
        g = GridSpec((4, 6), (2, 3))
        x = rng.standard_normal(24) + 1j * rng.standard_normal(24)
        base = fiberize(SignalSet(g, x[None, :])).data[:, :, 0]
        shifted = fiberize(SignalSet(g, lattice_shift(x, g, (1, 2))[None, :])).data[:, :, 0]
        for w in range(6):
            w0, w1 = divmod(w, 3)  # row-major offset order
            phase = np.exp(-2j * np.pi * (w0 * 1 / 2 + w1 * 2 / 3))
            np.testing.assert_allclose(shifted[w], phase * base[w], atol=1e-12)

    def test_lattice_shift_moves_samples(self):
        g = GridSpec((8,), (4,))
        x = np.arange(8.0)
        got = lattice_shift(x, g, (1,))
        np.testing.assert_allclose(got, np.roll(x, 2))

    def test_fiberize_linearity(self):
        rng = np.random.default_rng(12)
        g = GridSpec((10,), (5,))
        x = rng.standard_normal(10) + 1j * rng.standard_normal(10)
        y = rng.standard_normal(10) + 1j * rng.standard_normal(10)
        fx = fiberize(SignalSet(g, x[None, :])).data
        fy = fiberize(SignalSet(g, y[None, :])).data
        fxy = fiberize(SignalSet(g, (x + 3j * y)[None, :])).data
        np.testing.assert_allclose(fxy, fx + 3j * fy, atol=1e-12)

    def test_defiberize_validates_shape(self):
        g = GridSpec((8,), (4,))
        with pytest.raises(ValueError):
            defiberize(np.zeros((2, 2), dtype=complex), g)

    def test_fiberset_count(self):
        g = GridSpec((4,), (2,))
        fibers = FiberSet(g, np.zeros((2, 2, 3), dtype=complex))
        assert fibers.count == 3
