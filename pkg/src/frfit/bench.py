"""Analytic benchmark systems, error metrics, and convergence-study drivers.

The random RLC circuit reproduces the experimental admittances used to
benchmark the interpolators; partial fractions give an independent oracle for
its values.  Randomness comes from numpy's PCG64 generator (``default_rng``)
seeded explicitly, with a fixed draw order (C, then L, then the resistance
perturbation), so fixtures reproduce across platforms.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, List, NamedTuple, Optional, Sequence

import numpy as np

from . import baselines, hybrid, interpolate
from .errors import EvaluationAtPoleError, NotUnderdampedError
from .kernels import KernelParams, szego_pair

DEFAULT_GRID_SIZE = 201

# Angular frequency window of the circuit studies (rad/s); the figure axes
# span 1e4..2.5e4 in omega.
CIRCUIT_OMEGA_MIN = 1.0e4
CIRCUIT_OMEGA_MAX = 2.5e4

# The two weakly damped branches appended for the dominant-pole variant.
# Capacitances are in microfarads: this places the extra resonances at
# omega = 1/sqrt(LC) of about 1.41e4 and 2.24e4 rad/s, inside the study
# window, with attenuation Re(p) = -R/(2L) = -50.
DOMINANT_BRANCHES = (
    (0.1, 1.0e-3, 5.0e-6),
    (0.1, 1.0e-3, 2.0e-6),
)


def f_rat(omega):
    """Third order rational test function with poles at -0.1 and -0.1 +- 0.5i."""
    return f_rat_beta(omega, 0.1)


def f_rat_beta(omega, beta: float):
    """Family of third order rational functions with pole real parts at -beta."""
    if not beta > 0:
        raise ValueError(f"beta must be positive, got {beta}")
    s = 1j * np.asarray(omega, dtype=float)
    return (
        1.0 / (s + beta)
        + 0.5 / (s + beta + 0.5j)
        + 0.5 / (s + beta - 0.5j)
    )


@dataclass(frozen=True)
class CircuitSpec:
    """Parallel connection of series RLC branches (SI units)."""

    R: np.ndarray
    L: np.ndarray
    C: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "R", np.atleast_1d(np.asarray(self.R, dtype=float)))
        object.__setattr__(self, "L", np.atleast_1d(np.asarray(self.L, dtype=float)))
        object.__setattr__(self, "C", np.atleast_1d(np.asarray(self.C, dtype=float)))
        if not (len(self.R) == len(self.L) == len(self.C)):
            raise ValueError("R, L, C must have equal length")
        if np.any(self.R <= 0) or np.any(self.L <= 0) or np.any(self.C <= 0):
            raise ValueError("R, L, C must all be positive")

    @property
    def n_branches(self) -> int:
        return len(self.R)

    def underdamped(self) -> np.ndarray:
        return 0.5 * self.R * np.sqrt(self.C / self.L) < 1.0


def sample_random_circuit(N: int, seed: int, with_dominant: bool = False) -> CircuitSpec:
    """Random circuit: C ~ U(1,20) uF, L ~ U(0.1,2) mH, R = L[mH](1+U(-0.2,0.2)) Ohm.

    With ``with_dominant``, two fixed weakly damped branches are appended
    (total N + 2 branches).
    """
    if N < 1:
        raise ValueError("N must be at least 1")
    rng = np.random.default_rng(seed)
    C = rng.uniform(1.0, 20.0, N) * 1e-6
    L = rng.uniform(0.1, 2.0, N) * 1e-3
    delta = rng.uniform(-0.2, 0.2, N)
    R = (L * 1e3) * (1.0 + delta)
    if with_dominant:
        for r_d, l_d, c_d in DOMINANT_BRANCHES:
            R = np.append(R, r_d)
            L = np.append(L, l_d)
            C = np.append(C, c_d)
    return CircuitSpec(R=R, L=L, C=C)


def circuit_admittance(spec: CircuitSpec, s):
    """Admittance Y(s) = sum_i s / (s^2 L_i + s R_i + 1/C_i)."""
    s = np.asarray(s, dtype=complex)
    scalar = s.ndim == 0
    sv = np.atleast_1d(s)[:, None]
    den = sv * sv * spec.L + sv * spec.R + 1.0 / spec.C
    if np.any(np.abs(den) < 1e-300):
        raise EvaluationAtPoleError("admittance evaluated at a branch pole")
    out = np.sum(sv / den, axis=-1)
    return complex(out[0]) if scalar else out


def circuit_partial_fractions(spec: CircuitSpec):
    """Poles and residues (a_i, c_i) of each underdamped branch.

    a_i = -R/(2L) + i sqrt(1/(LC) - (R/(2L))^2),  c_i = a_i / (L (a_i - conj(a_i))).
    The full admittance is sum_i c_i/(s - a_i) + conj(c_i)/(s - conj(a_i)).
    """
    ok = spec.underdamped()
    if not np.all(ok):
        raise NotUnderdampedError(int(np.nonzero(~ok)[0][0]))
    sigma = spec.R / (2.0 * spec.L)
    wd = np.sqrt(1.0 / (spec.L * spec.C) - sigma**2)
    a = -sigma + 1j * wd
    c = a / (spec.L * (a - np.conj(a)))
    return a, c


def circuit_admittance_from_partial_fractions(spec: CircuitSpec, s):
    """Independent admittance evaluation through the partial fraction form."""
    a, c = circuit_partial_fractions(spec)
    s = np.asarray(s, dtype=complex)
    scalar = s.ndim == 0
    sv = np.atleast_1d(s)[:, None]
    out = np.sum(c / (sv - a) + np.conj(c) / (sv - np.conj(a)), axis=-1)
    return complex(out[0]) if scalar else out


@dataclass(frozen=True)
class Grid:
    """Equidistant evaluation grid including both endpoints."""

    omega_min: float
    omega_max: float
    count: int = DEFAULT_GRID_SIZE

    def __post_init__(self):
        if self.count < 2:
            raise ValueError("grid needs at least 2 points")
        if not self.omega_max > self.omega_min:
            raise ValueError("omega_max must exceed omega_min")

    @property
    def points(self) -> np.ndarray:
        return np.linspace(self.omega_min, self.omega_max, self.count)


def rmse(predictor: Callable, reference: Callable, grid: Grid) -> float:
    """Root mean square of the complex residual modulus over the grid."""
    w = grid.points
    pred = np.asarray(predictor(w), dtype=complex)
    ref = np.asarray(reference(w), dtype=complex)
    return float(np.sqrt(np.mean(np.abs(pred - ref) ** 2)))


def equidistant_samples(reference: Callable, n: int, omega_min: float, omega_max: float):
    """Training set of n equidistant samples, endpoints included."""
    w = np.linspace(omega_min, omega_max, n) if n > 1 else np.array([omega_min])
    return interpolate.TrainingSet(w, np.asarray(reference(w), dtype=complex))


class ConvergenceRow(NamedTuple):
    n: int
    rmse: float
    note: Optional[str] = None


METHOD_NAMES = ("szego", "szego-c0", "szego-rat", "aaa", "se-separate", "chebyshev")


def _fit_predictor(method, ts, reference, grid, seed):
    if method == "szego" or method == "szego-c0":
        symmetric = method == "szego"
        ts = interpolate.validate_training(ts, symmetric=symmetric)
        hp = hybrid.optimize_hyperparams(
            ts, 0, rng=np.random.default_rng(seed), symmetric=symmetric
        )
        model = hybrid.fit_kernel_model(ts, hp, "szego", symmetric)
        return model.predict_at_omega
    if method == "szego-rat":
        model, _ = hybrid.fit_hybrid(ts, seed=seed)
        return model.predict_at_omega
    if method == "aaa":
        model = baselines.aaa_fit(ts)
        return model
    if method == "se-separate":
        model = baselines.separate_se_fit(ts, seed=seed)
        return model.predict_at_omega
    if method == "chebyshev":
        if reference is None:
            raise ValueError("chebyshev interpolation needs an evaluable reference")
        return baselines.chebyshev_fit(reference, ts.n, grid.omega_min, grid.omega_max)
    raise ValueError(f"unknown method {method!r}; expected one of {METHOD_NAMES}")


def convergence_study(
    method: str,
    reference: Callable,
    n_list: Sequence[int],
    grid: Grid,
    seed: int = 0,
) -> List[ConvergenceRow]:
    """RMSE of the named method for each training-set size in ``n_list``.

    Training points are equidistant over the grid window.  Failures yield a
    row with NaN and the error message instead of aborting the study.
    """
    children = np.random.SeedSequence(seed).spawn(len(n_list))
    rows: List[ConvergenceRow] = []
    for n, child in zip(n_list, children):
        sub_seed = int(child.generate_state(1)[0])
        try:
            ts = equidistant_samples(reference, n, grid.omega_min, grid.omega_max)
            predictor = _fit_predictor(method, ts, reference, grid, sub_seed)
            rows.append(ConvergenceRow(n, rmse(predictor, reference, grid)))
        except Exception as exc:  # noqa: BLE001 - recorded per row
            rows.append(ConvergenceRow(n, float("nan"), str(exc)))
    return rows


def szego_interpolant(ts, alpha: float, sigma2: float = 1.0, symmetric: bool = True):
    """Convenience: Szego interpolant at fixed hyperparameters."""
    ts = interpolate.validate_training(ts, symmetric=symmetric)
    pair = szego_pair(KernelParams(alpha=alpha, sigma2=sigma2), symmetric=symmetric)
    return interpolate.fit(ts, pair)
