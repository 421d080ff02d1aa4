"""AAA, separate SE interpolation, and Chebyshev baselines."""

import numpy as np
import pytest

from frfit import interpolate
from frfit.baselines import (
    aaa_eval,
    aaa_fit,
    chebyshev_fit,
    chebyshev_nodes,
    se_equivalent_pair,
    separate_se_fit,
)
from frfit.bench import f_rat
from frfit.interpolate import TrainingSet

RNG = np.random.default_rng(55)


def frat_ts(n, wmin=0.0, wmax=1.0):
    w = np.linspace(wmin, wmax, n)
    return TrainingSet(w, f_rat(w))


class TestAAA:
    def test_interpolates_support(self):
        ts = frat_ts(20)
        model = aaa_fit(ts)
        for wj, fj in zip(model.support_omega, model.support_values):
            assert aaa_eval(model, wj) == fj

    def test_constant_function(self):
        ts = TrainingSet(np.linspace(0, 1, 10), np.full(10, 2.5 + 0.5j))
        model = aaa_fit(ts)
        assert model.converged
        assert model.m == 1
        w = np.linspace(0, 1, 57)
        assert np.max(np.abs(aaa_eval(model, w) - (2.5 + 0.5j))) < 1e-14

    def test_frat_machine_accuracy(self):
        ts = frat_ts(20)
        model = aaa_fit(ts)
        assert model.converged
        assert model.m <= 9
        w = np.linspace(0, 1, 201)
        resid = np.abs(aaa_eval(model, w) - f_rat(w))
        assert np.max(resid) <= 1e-10

    def test_support_subset_of_training(self):
        ts = frat_ts(15)
        model = aaa_fit(ts, m_max=6)
        assert model.m <= 6
        for wj in model.support_omega:
            assert wj in ts.omega

    def test_limit_at_infinity(self):
        # a function with a nonzero limit so the ratio test is meaningful
        w = np.linspace(0, 1, 12)
        y = 3.0 + f_rat(w)
        model = aaa_fit(TrainingSet(w, y), m_max=6)
        direct = np.sum(model.weights * model.support_values) / np.sum(model.weights)
        far = aaa_eval(model, 1e9)
        assert abs(far - direct) <= 1e-6 * abs(direct)

    def test_against_polynomial_reconstruction(self):
        # multiply out numerator and denominator on a 5-point instance
        w = np.array([0.0, 0.25, 0.5, 0.75, 1.0])
        y = f_rat(w)
        model = aaa_fit(TrainingSet(w, y), m_max=3)
        zs, fs, wts = model.support_omega, model.support_values, model.weights

        def reconstructed(x):
            num = 0.0
            den = 0.0
            for j in range(len(zs)):
                prod = np.prod([x - zs[k] for k in range(len(zs)) if k != j])
                num = num + wts[j] * fs[j] * prod
                den = den + wts[j] * prod
            return num / den

        for x in [0.1, 0.4, 0.6, 0.9]:
            assert aaa_eval(model, x) == pytest.approx(reconstructed(x), rel=1e-10)

    def test_nonconverged_flag(self):
        # data a rational approximation cannot nail with so few support points
        rng = np.random.default_rng(3)
        w = np.linspace(0, 1, 8)
        y = rng.normal(size=8) + 1j * rng.normal(size=8)
        model = aaa_fit(TrainingSet(w, y), tol=1e-13)
        resid = np.max(np.abs(aaa_eval(model, w) - y))
        assert model.converged or resid > 1e-13 * np.max(np.abs(y))


class TestSeparateSE:
    def test_training_exactness(self):
        w = np.linspace(0, 1, 12)
        ts = TrainingSet(w, f_rat(w))
        model = separate_se_fit(ts, seed=0)
        resid = np.abs(model.predict_at_omega(w) - ts.y)
        assert np.max(resid) <= 1e-8 * np.max(np.abs(ts.y))

    def test_complex_real_equivalent_view(self):
        # k = k_RR + k_II, c = k_RR - k_II reproduces the separate fits
        w = np.linspace(0, 1, 9)
        ts = TrainingSet(w, f_rat(w))
        model = separate_se_fit(ts, seed=1)
        pair = se_equivalent_pair(model)
        joint = interpolate.fit(ts, pair)
        wtest = np.linspace(0, 1, 41)
        a = joint.predict_at_omega(wtest)
        b = model.predict_at_omega(wtest)
        assert np.max(np.abs(a - b)) <= 1e-10 * max(1.0, np.max(np.abs(b)))

    def test_constant_data(self):
        w = np.linspace(0, 1, 10)
        const = 4.0 - 2.0j
        model = separate_se_fit(TrainingSet(w, np.full(10, const)), seed=0)
        interior = np.linspace(0.05, 0.95, 50)
        dev = np.abs(model.predict_at_omega(interior) - const)
        assert np.max(dev) <= 1e-6 * abs(const)

    def test_channel_independence(self):
        w = np.linspace(0, 2, 11)
        y = RNG.normal(size=11) + 1j * RNG.normal(size=11)
        direct = separate_se_fit(TrainingSet(w, y), seed=5)
        swapped = separate_se_fit(TrainingSet(w, y.imag + 1j * y.real), seed=5)
        wtest = np.linspace(0, 2, 31)
        a = direct.predict_at_omega(wtest)
        b = swapped.predict_at_omega(wtest)
        assert np.allclose(a.real, b.imag, atol=1e-12, rtol=0)
        assert np.allclose(a.imag, b.real, atol=1e-12, rtol=0)


class TestChebyshev:
    def test_nodes_n3(self):
        assert chebyshev_nodes(3, -1.0, 1.0) == pytest.approx([-1.0, 0.0, 1.0])

    def test_polynomial_reproduction(self):
        coeffs = [0.3 - 0.1j, 1.2 + 0.5j, -0.7j, 0.25]

        def poly(x):
            return sum(c * np.asarray(x) ** k for k, c in enumerate(coeffs))

        model = chebyshev_fit(poly, 6, -2.0, 3.0)
        x = np.linspace(-2, 3, 101)
        err = np.abs(model(x) - poly(x))
        assert np.max(err) <= 1e-12 * np.max(np.abs(poly(x)))

    def test_against_lagrange_oracle(self):
        n = 20
        model = chebyshev_fit(f_rat, n, 0.0, 1.0)
        nodes = model.nodes
        values = model.values

        def lagrange(x):
            total = 0.0
            for j in range(n):
                lj = np.prod([
                    (x - nodes[k]) / (nodes[j] - nodes[k]) for k in range(n) if k != j
                ])
                total = total + values[j] * lj
            return total

        for x in np.linspace(0.03, 0.97, 9):
            assert model(x) == pytest.approx(lagrange(x), rel=1e-10, abs=1e-10)

    def test_linear_in_data(self):
        f = f_rat

        def g(x):
            return np.sin(np.asarray(x)) + 1j * np.cos(np.asarray(x))

        a, b = 2.0, -0.7
        combo = chebyshev_fit(lambda x: a * f(x) + b * g(x), 9, 0.0, 1.0)
        mf = chebyshev_fit(f, 9, 0.0, 1.0)
        mg = chebyshev_fit(g, 9, 0.0, 1.0)
        x = np.linspace(0, 1, 33)
        lhs = combo(x)
        rhs = a * mf(x) + b * mg(x)
        assert np.max(np.abs(lhs - rhs)) <= 1e-12 * np.max(np.abs(lhs))

    def test_interpolates_at_nodes(self):
        model = chebyshev_fit(f_rat, 7, 0.0, 1.0)
        for x, v in zip(model.nodes, model.values):
            assert model(x) == v
