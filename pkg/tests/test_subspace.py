"""Tests for single-space low-rank fitting and residuals."""

from __future__ import annotations

import numpy as np
import pytest

from sisfit.subspace import FitResult, best_subspace, residual


class TestBestSubspace:
    def test_orthonormal_pair_error_one(self):
        # the best 1-dim space through two orthonormal vectors misses
        # exactly one unit of energy, whichever direction wins
        a = np.eye(2, 3, dtype=complex)  # e_1, e_2 rows
        fit = best_subspace(a, 1)
        np.testing.assert_allclose(fit.error, 1.0, rtol=1e-14)
        assert not fit.gap_ok
        np.testing.assert_allclose(fit.eigenvalues, [1.0, 1.0], atol=1e-14)

    def test_contained_data_zero_error(self):
        rng = np.random.default_rng(0)
        base = rng.standard_normal(6) + 1j * rng.standard_normal(6)
        a = np.stack([base, 2.0 * base, -1j * base])
        fit = best_subspace(a, 1)
        assert fit.error <= 1e-12 * np.sum(np.abs(a) ** 2)
        assert fit.effective_rank == 1

    def test_error_matches_svd_tail(self):
        rng = np.random.default_rng(1)
        a = rng.standard_normal((4, 7)) + 1j * rng.standard_normal((4, 7))
        svals = np.linalg.svd(a, compute_uv=False)
        for n in range(5):
            fit = best_subspace(a, n)
            np.testing.assert_allclose(fit.error, np.sum(svals[n:] ** 2),
                                       rtol=1e-12, atol=1e-12)

    def test_frame_vectors_orthonormal(self):
        rng = np.random.default_rng(2)
        a = rng.standard_normal((3, 8)) + 1j * rng.standard_normal((3, 8))
        fit = best_subspace(a, 2)
        g = fit.frame_vectors @ fit.frame_vectors.conj().T
        np.testing.assert_allclose(g, np.eye(2), atol=1e-12)

    def test_residual_drops_to_error(self):
        rng = np.random.default_rng(3)
        a = rng.standard_normal((4, 6)) + 1j * rng.standard_normal((4, 6))
        fit = best_subspace(a, 2)
        np.testing.assert_allclose(residual(a, fit.frame_vectors), fit.error,
                                   rtol=1e-11, atol=1e-12)

    def test_beats_random_competitors(self):
        # no sampled 2-dim span does better than the fitted one
        rng = np.random.default_rng(4)
        a = rng.standard_normal((4, 6)) + 1j * rng.standard_normal((4, 6))
        fit = best_subspace(a, 2)
        best_seen = np.inf
        for _ in range(2000):
            basis = rng.standard_normal((2, 6)) + 1j * rng.standard_normal((2, 6))
            best_seen = min(best_seen, residual(a, basis))
        assert best_seen >= fit.error - 1e-10 * (1.0 + fit.error)

    def test_n_zero(self):
        a = np.array([[1.0, 2.0], [0.0, 1.0]], dtype=complex)
        fit = best_subspace(a, 0)
        assert fit.frame_vectors.shape == (0, 2)
        np.testing.assert_allclose(fit.error, np.sum(np.abs(a) ** 2))
        assert fit.gap_ok

    def test_n_beyond_count_pads_with_zeros(self):
        a = np.eye(2, 4, dtype=complex)
        fit = best_subspace(a, 5)
        assert fit.frame_vectors.shape == (5, 4)
        g = fit.frame_vectors[:2] @ fit.frame_vectors[:2].conj().T
        np.testing.assert_allclose(g, np.eye(2), atol=1e-13)
        np.testing.assert_allclose(fit.frame_vectors[2:], 0.0, atol=0.0)
        np.testing.assert_allclose(fit.error, 0.0, atol=1e-14)
        assert not fit.gap_ok

    def test_gap_detection(self):
        a = np.stack([2.0 * np.eye(1, 4)[0], np.eye(4)[1]]).astype(complex)
        fit = best_subspace(a, 1)
        assert fit.gap_ok  # eigenvalues 4 and 1are cleanly separated
        np.testing.assert_allclose(fit.eigenvalues, [4.0, 1.0], atol=1e-13)

    def test_rejects_negative_n(self):
        with pytest.raises(ValueError):
            best_subspace(np.eye(2, dtype=complex), -1)


class TestResidual:
    def test_empty_basis_gives_energy(self):
        a = np.array([[1.0, 1.0j], [2.0, 0.0]])
        got = residual(a, np.zeros((0, 2), dtype=complex))
        np.testing.assert_allclose(got, 6.0, rtol=1e-15)

    def test_contained_vectors_zero(self):
        rng = np.random.default_rng(5)
        basis = rng.standard_normal((2, 5)) + 1j * rng.standard_normal((2, 5))
        coef = rng.standard_normal((3, 2)) + 1j * rng.standard_normal((3, 2))
        a = coef @ basis
        np.testing.assert_allclose(residual(a, basis), 0.0, atol=1e-11)

    def test_matches_normal_equations(self):
        rng = np.random.default_rng(6)
        a = rng.standard_normal((3, 7)) + 1j * rng.standard_normal((3, 7))
        basis = rng.standard_normal((2, 7)) + 1j * rng.standard_normal((2, 7))
        total = 0.0
        for row in a:
            coef, *_ = np.linalg.lstsq(basis.T, row, rcond=None)
            total += np.sum(np.abs(row - basis.T @ coef) ** 2)
        np.testing.assert_allclose(residual(a, basis), total, rtol=1e-11)

    def test_rank_deficient_basis(self):
        # duplicated directions must not be double-counted
        v = np.array([1.0, 0.0, 0.0], dtype=complex)
        basis = np.stack([v, 2.0 * v])
        a = np.array([[3.0, 4.0, 0.0]], dtype=complex)
        np.testing.assert_allclose(residual(a, basis), 16.0, rtol=1e-13)

    def test_single_vector_input(self):
        basis = np.eye(1, 4, dtype=complex)
        got = residual(np.array([2.0, 1.0, 0.0, 0.0], dtype=complex), basis)
        np.testing.assert_allclose(got, 1.0, rtol=1e-14)

    def test_fitresult_frozen(self):
        fit = FitResult(np.zeros((0, 1), dtype=complex), 0.0, np.zeros(1), 0, True)
        with pytest.raises(AttributeError):
            fit.error = 1.0
