"""Acceptance criteria for the full pipeline, one test per criterion.

Each test prints a single PASS/FAIL line (run with ``pytest -s`` to see them
as they complete).  Criteria marked with runtime notes stay within their
budgets on a 2-core container.
"""

import numpy as np
import pytest

import frfit
from frfit import bench, hybrid, io
from frfit.baselines import separate_se_fit
from frfit.bench import Grid, convergence_study, f_rat, f_rat_beta
from frfit.cli import main
from frfit.hybrid import (
    LAMBDA_FACTOR,
    N_MULTISTART,
    SIGMA_ALPHA,
    fine_grid_size,
    hyperparam_bounds,
    kmax_rule,
)
from frfit.interpolate import TrainingSet, fit, predict_widely_linear, validate_training
from frfit.kernels import KernelParams, szego_pair

GRID01 = Grid(0.0, 1.0, 201)
CIRCUIT_SEED = 42


def _report(num, name, ok, detail):
    status = "PASS" if ok else "FAIL"
    print(f"ACCEPTANCE {num:02d} {name}: {status} ({detail})")
    assert ok, f"criterion {num} {name}: {detail}"


def _frat_ts(n):
    w = np.linspace(0.0, 1.0, n)
    return validate_training(TrainingSet(w, f_rat(w)), symmetric=True)


def _ml_szego_model(ts, seed=0):
    hp = frfit.optimize_hyperparams(ts, 0, rng=np.random.default_rng(seed))
    return frfit.fit_kernel_model(ts, hp), hp


@pytest.fixture(scope="module")
def circuit_setup():
    spec = bench.sample_random_circuit(1000, CIRCUIT_SEED, with_dominant=True)
    grid = Grid(bench.CIRCUIT_OMEGA_MIN, bench.CIRCUIT_OMEGA_MAX, 201)

    def reference(w):
        return bench.circuit_admittance(spec, 1j * np.asarray(w, dtype=float))

    return spec, grid, reference


def test_criterion_01_pseudo_kernel_benefit():
    # Runtime < 2 min.  Equidistant n in {5..30} on [0,1], 201-point grid.
    ns = [5, 10, 15, 20, 25, 30]
    pseudo = {r.n: r.rmse for r in convergence_study("szego", f_rat, ns, GRID01, seed=0)}
    circ = {r.n: r.rmse for r in convergence_study("szego-c0", f_rat, ns, GRID01, seed=0)}
    decay_ok = pseudo[30] <= pseudo[5] / 100 and circ[30] <= circ[5] / 100
    ratio20 = circ[20] / pseudo[20]
    _report(
        1,
        "pseudo-kernel-benefit",
        ratio20 >= 10.0 and decay_ok,
        f"ratio at n=20: {ratio20:.2f} (need >= 10); "
        f"decay pseudo {pseudo[5]:.2e}->{pseudo[30]:.2e}, "
        f"c0 {circ[5]:.2e}->{circ[30]:.2e}",
    )


def test_criterion_02_interpolation_exactness():
    models = []
    ts20 = _frat_ts(20)
    models.append(("frat20-fixed-alpha", ts20, fit(ts20, szego_pair(KernelParams(0.1)))))
    m, _ = _ml_szego_model(ts20)
    models.append(("frat20-ml", ts20, m))
    ts10 = _frat_ts(10)
    m10, _ = _ml_szego_model(ts10)
    models.append(("frat10-ml", ts10, m10))
    spec = bench.sample_random_circuit(1000, CIRCUIT_SEED, with_dominant=True)
    wc = np.linspace(1e4, 2.5e4, 50)
    tsc = validate_training(
        TrainingSet(wc, bench.circuit_admittance(spec, 1j * wc)), symmetric=True
    )
    mc, _ = _ml_szego_model(tsc)
    models.append(("circuit50-ml", tsc, mc))
    worst = ("", 0.0)
    for name, ts, model in models:
        assert model.cond < 1e10, f"{name} should be well conditioned for this check"
        resid = np.max(np.abs(model.predict_at_omega(ts.omega) - ts.y))
        rel = resid / np.max(np.abs(ts.y))
        if rel > worst[1]:
            worst = (name, rel)
    _report(2, "interpolation-exactness", worst[1] <= 1e-8,
            f"worst relative residual {worst[1]:.2e} at {worst[0]}")


def test_criterion_03_symmetry_enforcement():
    ts = _frat_ts(20)
    model, _ = _ml_szego_model(ts)
    rng = np.random.default_rng(17)
    w = rng.uniform(-2.0, 2.0, 100)
    g = model.predict(1j * w)
    g_conj = model.predict(-1j * w)
    err = np.max(np.abs(g_conj - np.conj(g)) / (1.0 + np.abs(g)))
    _report(3, "symmetry-enforcement", err <= 1e-12, f"max scaled error {err:.2e}")


def test_criterion_04_widely_linear_oracle():
    pair = szego_pair(KernelParams(alpha=0.7, sigma2=1.2))
    worst = 0.0
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
        worst = max(worst, abs(a - b) / max(abs(a), 1e-12))
    _report(4, "widely-linear-oracle", worst <= 1e-8, f"worst relative gap {worst:.2e}")


def test_criterion_05_aaa_machine_accuracy():
    rows = convergence_study("aaa", f_rat, list(range(5, 21)), GRID01, seed=0)
    bad = [(r.n, r.rmse) for r in rows if r.n >= 9 and not r.rmse <= 1e-10]
    detail = f"rmse(9)={dict((r.n, r.rmse) for r in rows)[9]:.2e}"
    _report(5, "aaa-machine-accuracy", not bad, detail if not bad else f"failures: {bad}")


def test_criterion_06_circuit_partial_fraction_oracle():
    # Runtime < 1 min.
    worst = 0.0
    for seed in range(10):
        spec = bench.sample_random_circuit(1000, seed)
        rng = np.random.default_rng(3000 + seed)
        s = 1j * rng.uniform(1e4, 2.5e4, 100)
        direct = bench.circuit_admittance(spec, s)
        pf = bench.circuit_admittance_from_partial_fractions(spec, s)
        worst = max(worst, float(np.max(np.abs(direct - pf) / np.abs(direct))))
    _report(6, "circuit-partial-fractions", worst <= 1e-10, f"worst relative {worst:.2e}")


def test_criterion_07_hybrid_beats_pure_kernel(circuit_setup):
    # Runtime < 10 min, dominated by the retuned leave-one-out folds.
    spec, grid, reference = circuit_setup

    def rmse_pair(n):
        w = np.linspace(grid.omega_min, grid.omega_max, n)
        ts = validate_training(TrainingSet(w, reference(w)), symmetric=True)
        m0, _ = _ml_szego_model(ts)
        r0 = bench.rmse(m0.predict_at_omega, reference, grid)
        mh, report = frfit.fit_hybrid(ts, seed=0)
        rh = bench.rmse(mh.predict_at_omega, reference, grid)
        return r0, rh, report.chosen_k

    r0_50, rh_50, k_50 = rmse_pair(50)
    ratios = {50: rh_50 / r0_50}
    if ratios[50] > 0.5:
        for n in (45, 40):
            r0, rh, _ = rmse_pair(n)
            ratios[n] = rh / r0
    ok = rh_50 <= r0_50 and min(ratios.values()) <= 0.5
    _report(
        7,
        "hybrid-beats-pure-kernel",
        ok,
        f"n=50: szego {r0_50:.3e}, hybrid {rh_50:.3e} (K={k_50}); ratios {ratios}",
    )


def test_criterion_08_alpha_estimation_study():
    # Runtime < 5 min.
    results = {}
    for beta in [0.05, 0.1, 0.15, 0.2, 0.25]:
        w = np.linspace(0.0, 1.0, 20)
        ts = validate_training(TrainingSet(w, f_rat_beta(w, beta)), symmetric=True)
        _, hp = _ml_szego_model(ts)
        results[beta] = hp.alpha
    ok = all(b / 2 <= a <= 2 * b for b, a in results.items())
    _report(8, "alpha-estimation", ok,
            ", ".join(f"beta={b}: alpha={a:.3f}" for b, a in results.items()))


def test_criterion_09_model_selection_constants():
    checks = [
        kmax_rule(20) == 5,
        kmax_rule(7) == 1,
        kmax_rule(23) == 5,
        fine_grid_size(20) == 201,
        LAMBDA_FACTOR == 0.2,
        SIGMA_ALPHA == 3.0,
        N_MULTISTART == 20,
    ]
    # lognormal prior: mu = sigma_alpha^2 + ln|Omega| (mode at |Omega|)
    span = 2.5
    mu = SIGMA_ALPHA**2 + np.log(span)
    v = hybrid.lognormal_prior_logpdf(1.3, span)
    expected = -np.log(1.3 * SIGMA_ALPHA * np.sqrt(2 * np.pi)) - (
        np.log(1.3) - mu
    ) ** 2 / (2 * SIGMA_ALPHA**2)
    checks.append(abs(v - expected) < 1e-12)
    # optimization box exactly as specified
    wmin, wmax = 1.0, 5.0
    span = wmax - wmin
    lo, hi = hyperparam_bounds(2, wmin, wmax)
    checks += [
        lo[0] == -15.0,
        hi[0] == 15.0,
        lo[1] == 1e-6 * span,
        hi[1] == span,
        np.all(lo[2::2] == -span),
        np.all(hi[2::2] == -1e-6 * span),
        np.all(lo[3::2] == max(1e-6 * span, wmin - span / 3.0)),
        np.all(hi[3::2] == wmax + span / 3.0),
    ]
    _report(9, "model-selection-constants", all(checks),
            f"{sum(checks)}/{len(checks)} constants verified")


def test_criterion_10_cli_determinism(tmp_path):
    csv = tmp_path / "frat.csv"
    ts = bench.equidistant_samples(f_rat, 10, 0.0, 1.0)
    io.atomic_write_text(str(csv), io.format_samples_csv(ts.omega, ts.y))
    fits = []
    for tag in ("a", "b"):
        out = tmp_path / f"fit-{tag}.json"
        assert main(["fit", str(csv), "--symmetric", "--hybrid", "--seed", "5",
                     "--out", str(out)]) == 0
        fits.append(out.read_bytes())
    convs = []
    for tag in ("a", "b"):
        out = tmp_path / f"conv-{tag}.csv"
        assert main(["convergence", "--method", "szego", "--target", "frat",
                     "--n", "5,8,11", "--seed", "5", "--out", str(out)]) == 0
        convs.append(out.read_bytes())
    ok = fits[0] == fits[1] and convs[0] == convs[1]
    _report(10, "cli-determinism", ok,
            f"fit bytes equal: {fits[0] == fits[1]}, convergence bytes equal: {convs[0] == convs[1]}")


def test_criterion_11_serialization_round_trip(tmp_path):
    grid = np.linspace(0.0, 1.0, 201)
    cases = []

    ts = _frat_ts(10)
    m, _ = _ml_szego_model(ts)
    cases.append(("szego-symmetric", m, "szego", True, None))

    ts_c = validate_training(TrainingSet(ts.omega, ts.y), symmetric=False)
    hp_c = frfit.optimize_hyperparams(
        ts_c, 0, rng=np.random.default_rng(0), symmetric=False
    )
    cases.append(
        ("szego-circular", frfit.fit_kernel_model(ts_c, hp_c, "szego", False),
         "szego", False, None)
    )

    hp_ss = frfit.optimize_hyperparams(
        ts, 0, rng=np.random.default_rng(0), kernel="stable-spline"
    )
    cases.append(
        ("stable-spline", frfit.fit_kernel_model(ts, hp_ss, "stable-spline", True),
         "stable-spline", True, None)
    )

    cases.append(("se-separate", separate_se_fit(ts_c, seed=0), "se-separate", False, None))

    mh, rep = frfit.fit_hybrid(_frat_ts(8), seed=2)
    cases.append(("hybrid", mh, "szego", True, rep))

    bad = []
    for name, model, kernel_name, symmetric, selection in cases:
        path = tmp_path / f"{name}.json"
        doc = io.model_to_dict(model, kernel_name, symmetric, seed=0, selection=selection)
        io.save_model(str(path), doc)
        loaded, *_ = io.load_model(str(path))
        a = model.predict_at_omega(grid)
        b = loaded.predict_at_omega(grid)
        if not np.array_equal(a, b):
            bad.append(name)
    _report(11, "serialization-round-trip", not bad,
            "bit-identical for all model classes" if not bad else f"mismatch: {bad}")
