"""Minimum-norm complex/real interpolation: assembly, fit, predict, oracles."""

import numpy as np
import pytest

import frfit
from frfit.bench import f_rat
from frfit.errors import DuplicateFrequencyError, SymmetryViolationError
from frfit.interpolate import (
    TrainingSet,
    assemble_system,
    augmented_observations,
    fit,
    predict_widely_linear,
    rkhs_norm,
    validate_training,
)
from frfit.kernels import KernelParams, szego_pair

RNG = np.random.default_rng(99)


def random_symmetric_ts(n, wmin=0.1, wmax=2.0):
    w = np.sort(RNG.uniform(wmin, wmax, n))
    y = RNG.normal(size=n) + 1j * RNG.normal(size=n)
    return TrainingSet(w, y, symmetric=True)


class TestValidation:
    def test_accepts_plain_sample(self):
        ts = validate_training(TrainingSet([1.0], [2 + 3j]), symmetric=True)
        assert ts.symmetric

    def test_rejects_imaginary_at_zero(self):
        with pytest.raises(SymmetryViolationError):
            validate_training(TrainingSet([0.0], [1 + 0.5j]), symmetric=True)

    def test_zero_imag_allowed_without_symmetry(self):
        validate_training(TrainingSet([0.0], [1 + 0.5j]), symmetric=False)

    def test_conjugate_pair_consistency(self):
        good = TrainingSet([1.0, -1.0], [2 + 3j, 2 - 3j])
        validate_training(good, symmetric=True)
        bad = TrainingSet([1.0, -1.0], [2 + 3j, 2 + 3j])
        with pytest.raises(SymmetryViolationError) as err:
            validate_training(bad, symmetric=True)
        assert set(err.value.indices) == {0, 1}

    def test_duplicate_frequencies(self):
        with pytest.raises(DuplicateFrequencyError):
            validate_training(TrainingSet([1.0, 1.0], [1j, 1j]))

    def test_zero_row_flagged_for_removal(self):
        ts = validate_training(TrainingSet([0.0, 1.0], [2.0, 1 + 1j]), symmetric=True)
        su, pu, yt, dropped = augmented_observations(ts)
        assert dropped == [1]
        assert len(su) == 3
        assert yt[0] == 2.0


class TestAssembly:
    def test_single_point_circular(self):
        p = KernelParams(alpha=0.5, sigma2=2.0)
        pair = szego_pair(p, symmetric=False)
        ts = validate_training(TrainingSet([1.2], [1 + 2j]))
        matrix, rhs, basis = assemble_system(ts, pair)
        diag = 2.0 / (8.0 * np.pi * 0.5)
        assert matrix == pytest.approx(np.diag([diag, diag]))
        assert rhs == pytest.approx([1.0, 2.0])
        assert basis is None

    def test_zero_frequency_symmetric_is_one_by_one(self):
        pair = szego_pair(KernelParams(alpha=0.5))
        ts = validate_training(TrainingSet([0.0], [3.0]), symmetric=True)
        matrix, rhs, _ = assemble_system(ts, pair)
        assert matrix.shape == (1, 1)
        assert rhs == pytest.approx([3.0])

    def test_matrix_symmetric(self):
        pair = szego_pair(KernelParams(alpha=0.3))
        ts = random_symmetric_ts(8)
        matrix, _, _ = assemble_system(ts, pair)
        assert np.max(np.abs(matrix - matrix.T)) == 0.0


class TestFitPredict:
    def test_single_point_closed_form(self):
        p = KernelParams(alpha=0.5, sigma2=1.0)
        pair = szego_pair(p, symmetric=False)
        ts = validate_training(TrainingSet([0.8], [2 - 1j]))
        model = fit(ts, pair)
        s1 = 0.8j
        gamma = (2 - 1j) / pair.k(s1, s1)
        for s in [0.1j, 1.5j, 0.3 + 0.2j]:
            expected = gamma * pair.k(s, s1)
            assert model.predict(s) == pytest.approx(expected, rel=1e-12)

    def test_frat_exactness(self):
        w = np.linspace(0.0, 1.0, 20)
        ts = validate_training(TrainingSet(w, f_rat(w)), symmetric=True)
        model = fit(ts, szego_pair(KernelParams(alpha=0.1)))
        resid = np.abs(model.predict_at_omega(w) - ts.y)
        assert np.max(resid) <= 1e-8 * np.max(np.abs(ts.y))

    def test_symmetric_prediction_conjugate(self):
        w = np.linspace(0.0, 1.0, 15)
        ts = validate_training(TrainingSet(w, f_rat(w)), symmetric=True)
        model = fit(ts, szego_pair(KernelParams(alpha=0.1)))
        wtest = RNG.uniform(-1.5, 1.5, 50)
        g = model.predict(1j * wtest)
        g_conj = model.predict(-1j * wtest)
        err = np.abs(g_conj - np.conj(g))
        assert np.max(err / (1.0 + np.abs(g))) <= 1e-12

    def test_training_reproduction_at_zero(self):
        ts = validate_training(TrainingSet([0.0, 0.5], [3.0, 1 + 1j]), symmetric=True)
        model = fit(ts, szego_pair(KernelParams(alpha=0.4)))
        assert model.predict(0.0) == pytest.approx(3.0, rel=1e-10)
        assert model.degenerate_rows == [1]

    def test_mean_profiling_matches_bruteforce_gls(self):
        # beta from the fit equals the explicit normal-equations solution on
        # well-conditioned instances
        for trial in range(5):
            rng = np.random.default_rng(300 + trial)
            w = np.sort(rng.uniform(0.5, 4.0, 8))
            y = rng.normal(size=8) + 1j * rng.normal(size=8)
            ts = TrainingSet(w, y, symmetric=True)
            pair = szego_pair(KernelParams(alpha=0.08, sigma2=1.5))
            mean = frfit.rational_basis(np.array([-0.3 + 1.0j]))
            model = fit(ts, pair, mean)
            matrix, rhs, design = assemble_system(ts, pair, mean)
            kinv = np.linalg.pinv(matrix)
            beta_ref = np.linalg.solve(design.T @ kinv @ design, design.T @ kinv @ rhs)
            assert model.mean.beta == pytest.approx(beta_ref, rel=1e-8)

    def test_mean_model_still_interpolates(self):
        ts = random_symmetric_ts(7)
        pair = szego_pair(KernelParams(alpha=0.5))
        mean = frfit.rational_basis(np.array([-0.2 + 0.9j]))
        model = fit(ts, pair, mean)
        resid = np.abs(model.predict_at_omega(ts.omega) - ts.y)
        assert np.max(resid) <= 1e-8 * np.max(np.abs(ts.y))


class TestWidelyLinearOracle:
    def test_matches_augmented_solver(self):
        # Well-separated frequencies keep both routes away from the ill
        # conditioning that would amplify their (identical) exact solution.
        pair = szego_pair(KernelParams(alpha=0.7, sigma2=1.2))
        for trial in range(50):
            rng = np.random.default_rng(1000 + trial)
            n = int(rng.integers(1, 7))
            w = np.sort(rng.uniform(0.05, 3.0, n))
            while n > 1 and np.min(np.diff(w)) < 0.15:
                w = np.sort(rng.uniform(0.05, 3.0, n))
            y = rng.normal(size=n) + 1j * rng.normal(size=n)
            ts = TrainingSet(w, y, symmetric=True)
            model = fit(ts, pair)
            s = rng.uniform(0.05, 3.0) * 1j
            a = model.predict(s)
            b = predict_widely_linear(ts, pair, s)
            assert abs(a - b) <= 1e-8 * max(abs(a), 1e-12)

    def test_circular_reduces_to_simple_kriging(self):
        pair = szego_pair(KernelParams(alpha=0.5), symmetric=False)
        n = 4
        w = np.array([0.2, 0.7, 1.1, 2.2])
        y = RNG.normal(size=n) + 1j * RNG.normal(size=n)
        ts = TrainingSet(w, y)
        s = 0.9j
        sn = 1j * w
        K = pair.k(sn[:, None], sn[None, :])
        gamma = np.linalg.solve(K, y)
        expected = pair.k(s, sn) @ gamma
        assert predict_widely_linear(ts, pair, s) == pytest.approx(expected, rel=1e-10)

    def test_single_point(self):
        pair = szego_pair(KernelParams(alpha=1.0), symmetric=False)
        ts = TrainingSet([0.5], [2 + 2j])
        s = 1.5j
        expected = (2 + 2j) * pair.k(s, 0.5j) / pair.k(0.5j, 0.5j)
        assert predict_widely_linear(ts, pair, s) == pytest.approx(expected, rel=1e-12)


class TestRkhsNorm:
    def test_zero_data(self):
        ts = TrainingSet([0.3, 0.9], [0.0, 0.0], symmetric=True)
        model = fit(ts, szego_pair(KernelParams(alpha=0.5)))
        assert rkhs_norm(model) == 0.0

    def test_scaling(self):
        w = np.array([0.3, 0.9, 1.4])
        y = RNG.normal(size=3) + 1j * RNG.normal(size=3)
        pair = szego_pair(KernelParams(alpha=0.5))
        n1 = rkhs_norm(fit(TrainingSet(w, y, symmetric=True), pair))
        n3 = rkhs_norm(fit(TrainingSet(w, 3.0 * y, symmetric=True), pair))
        assert n3 == pytest.approx(3.0 * n1, rel=1e-10)

    def test_monotone_in_constraints(self):
        pair = szego_pair(KernelParams(alpha=0.5))
        for trial in range(10):
            rng = np.random.default_rng(500 + trial)
            w = np.sort(rng.uniform(0.1, 2.0, 6))
            y = rng.normal(size=6) + 1j * rng.normal(size=6)
            sub = fit(TrainingSet(w[:4], y[:4], symmetric=True), pair)
            full = fit(TrainingSet(w, y, symmetric=True), pair)
            assert rkhs_norm(full) >= rkhs_norm(sub) - 1e-10
