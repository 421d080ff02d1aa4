"""Hybrid rational-mean Gaussian process model with adaptive pole selection.

The model combines Szego-kernel complex/real interpolation with a low-order
rational mean built from conjugate pole pairs.  Kernel hyperparameters and
poles maximize a penalized log-likelihood (lognormal prior on alpha) via
bound-constrained multistart optimization.  The number of pole pairs is chosen
by backward elimination followed by a leave-one-out criterion with retuning,
stabilized by an instability penalty on a fine frequency grid.
"""

from __future__ import annotations

import os
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from . import interpolate
from ._linalg import PSDSolver, gls
from ._optim import BAD_VALUE, minimize_bounded
from .errors import (
    BoundsEnlargedWarning,
    DegenerateLambdaWarning,
    DomainError,
    FoldFailedError,
    OptimizationFailedError,
)
from .interpolate import FittedModel, LinearMeanSpec, TrainingSet, augmented_observations
from .kernels import KernelParams, augmented_kernel, stable_spline_pair, szego_pair

# Model-selection constants.
SIGMA_ALPHA = 3.0           # lognormal prior spread for alpha
N_MULTISTART = 20           # local optimizations per hyperparameter search
LAMBDA_FACTOR = 0.2         # weight of the instability penalty, K=0 normalized
THETA1_MIN = -15.0          # bounds for theta1 = ln(sigma2 / 2 pi)
THETA1_MAX = 15.0
ALPHA_LOWER_FACTOR = 1e-6   # alpha in [1e-6 |Omega|, |Omega|]
POLE_RE_LOWER_FACTOR = 1.0  # Re(p) in [-|Omega|, -1e-6 |Omega|]
POLE_RE_UPPER_FACTOR = 1e-6
POLE_IM_MARGIN = 1.0 / 3.0  # Im(p) within [w_min - |Omega|/3, w_max + |Omega|/3]
POLE_INIT_RE_FACTOR = 1e-3  # initial poles at Re = -1e-3 |Omega|

# A truncated covariance direction may carry at most this fraction of the
# squared data (residual) mass; otherwise the Gaussian model assigns the data
# zero density and the hyperparameters are rejected.
DEGENERATE_MASS_TOL = 1e-10

TWO_PI = 2.0 * np.pi


def kmax_rule(n: int) -> int:
    """Maximum number of pole pairs: min(5, floor(n/4))."""
    if n < 1:
        raise ValueError("n must be at least 1")
    return min(5, n // 4)


def fine_grid_size(n: int) -> int:
    """Size of the instability-penalty grid: 10n + 1."""
    return 10 * n + 1


def _pole_sort_key(poles: np.ndarray):
    return [(float(np.imag(p)), float(np.real(p))) for p in poles]


@dataclass(frozen=True, eq=False)
class HyperParams:
    """Kernel hyperparameters and pole pairs in optimizer parameterization.

    theta1 = ln(sigma2 / 2 pi), theta2 = alpha; poles are the upper-half-plane
    representatives of conjugate pairs (Re < 0, Im > 0), kept sorted by
    (Im, Re) for determinism.
    """

    theta1: float
    theta2: float
    poles: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=complex))

    def __post_init__(self):
        poles = np.asarray(self.poles, dtype=complex).ravel()
        if len(poles):
            if np.any(np.real(poles) >= 0):
                raise ValueError("poles must be stable: Re(p) < 0")
            if np.any(np.imag(poles) <= 0):
                raise ValueError("poles must be upper-half-plane representatives: Im(p) > 0")
            order = np.lexsort((np.real(poles), np.imag(poles)))
            poles = poles[order]
        object.__setattr__(self, "poles", poles)
        if not self.theta2 > 0:
            raise ValueError("theta2 (alpha) must be positive")

    @property
    def alpha(self) -> float:
        return self.theta2

    @property
    def sigma2(self) -> float:
        return TWO_PI * np.exp(self.theta1)

    @property
    def num_pole_pairs(self) -> int:
        return len(self.poles)


def init_poles(K: int, omega_min: float, omega_max: float, K_max: int) -> np.ndarray:
    """Equidistant starting poles close to the frequency axis.

    p_k = -1e-3 |Omega| + i (w_min + (k - 1/2) |Omega| / K_max), k = 1..K.
    """
    if K == 0:
        return np.zeros(0, dtype=complex)
    if not omega_max > omega_min:
        raise ValueError("omega_max must exceed omega_min")
    span = omega_max - omega_min
    delta_im = span / K_max
    k = np.arange(1, K + 1)
    return -POLE_INIT_RE_FACTOR * span + 1j * (omega_min + (k - 0.5) * delta_im)


def hyperparam_bounds(K: int, omega_min: float, omega_max: float):
    """Optimization box for [theta1, theta2, Re p_1, Im p_1, ...]."""
    span = omega_max - omega_min
    if not span > 0:
        # Degenerate single-frequency input: fall back to the frequency scale.
        span = max(abs(omega_max), abs(omega_min), 1.0)
    lo = [THETA1_MIN, ALPHA_LOWER_FACTOR * span]
    hi = [THETA1_MAX, span]
    im_lo = max(ALPHA_LOWER_FACTOR * span, omega_min - span * POLE_IM_MARGIN)
    im_hi = omega_max + span * POLE_IM_MARGIN
    for _ in range(K):
        lo += [-POLE_RE_LOWER_FACTOR * span, im_lo]
        hi += [-POLE_RE_UPPER_FACTOR * span, im_hi]
    return np.array(lo), np.array(hi)


def rational_basis(poles) -> LinearMeanSpec:
    """Real-coefficient basis spanning rational means with the given pole pairs.

    For each pole pair (p, conj(p)) two basis functions are generated so that
    beta_(2i-1) + i beta_(2i) is the complex residue of pole p_i.
    """
    poles = np.asarray(poles, dtype=complex).ravel()
    basis = []
    for p in poles:
        def h_re(s, p=p):
            return 1.0 / (s - p) + 1.0 / (s - np.conj(p))

        def h_im(s, p=p):
            return 1j / (s - p) - 1j / (s - np.conj(p))

        basis.extend([h_re, h_im])
    return LinearMeanSpec(basis=basis, poles=poles)


def rational_mean_value(poles, beta, s):
    """Evaluate sum_i r_i/(s - p_i) + conj(r_i)/(s - conj(p_i)) from packed beta."""
    spec = rational_basis(poles)
    spec.beta = np.asarray(beta, dtype=float)
    return spec(s)


def lognormal_prior_logpdf(alpha: float, omega_span: float) -> float:
    """Log-density of the vague lognormal prior on alpha, mode at |Omega|."""
    if not alpha > 0:
        raise DomainError("alpha must be positive")
    if not omega_span > 0:
        raise DomainError("omega_span must be positive")
    mu = SIGMA_ALPHA**2 + np.log(omega_span)
    return float(
        -np.log(alpha * SIGMA_ALPHA * np.sqrt(TWO_PI))
        - (np.log(alpha) - mu) ** 2 / (2.0 * SIGMA_ALPHA**2)
    )


def _make_pair(alpha: float, sigma2: float, kernel: str, symmetric: bool):
    params = KernelParams(alpha=alpha, sigma2=sigma2)
    if kernel == "szego":
        return szego_pair(params, symmetric=symmetric)
    if kernel == "stable-spline":
        return stable_spline_pair(params, symmetric=symmetric)
    raise ValueError(f"unknown kernel {kernel!r}")


class _Objective:
    """Penalized log-likelihood of a training set, profiled over the mean.

    The augmented data vector is modeled as N(H beta, sigma2 * Ktilde(alpha));
    beta is profiled by GLS.  Hyperparameters whose covariance is numerically
    singular while the residual has mass on the truncated directions receive
    J = -inf (the degenerate Gaussian assigns such data zero density).
    """

    def __init__(self, ts: TrainingSet, kernel: str = "szego", symmetric: bool = True):
        self.ts = ts
        self.kernel = kernel
        self.symmetric = symmetric
        self.su, self.pu, self.yt, self.dropped = augmented_observations(ts)
        span = ts.omega_span
        self.span = span if span > 0 else max(float(np.max(np.abs(ts.omega))), 1.0)
        if kernel == "szego":
            # Cache the alpha-independent pieces of the Szego assembly: the
            # kernel is 1/(2 pi (2 alpha + d)) with fixed pairwise offsets d,
            # evaluated per sample pair and expanded into RE/IM blocks.
            s = 1j * ts.omega
            self._dk = s[:, None] + np.conj(s)[None, :]
            self._dc = s[:, None] + s[None, :]
        # Pole-coordinate gradient steps leave alpha unchanged, so the
        # factorization of Ktilde(alpha) is reused across those evaluations.
        self._solver_cache: dict = {}
        self._re_rows = self.pu == 0

    @staticmethod
    def unpack(x):
        theta1, alpha = x[0], x[1]
        rest = np.asarray(x[2:], dtype=float)
        poles = rest[0::2] + 1j * rest[1::2]
        return theta1, alpha, poles

    @staticmethod
    def pack(hp: HyperParams):
        x = [hp.theta1, hp.theta2]
        for p in hp.poles:
            x += [np.real(p), np.imag(p)]
        return np.array(x, dtype=float)

    def _kernel_matrix(self, alpha: float):
        if self.kernel != "szego":
            pair = _make_pair(alpha, 1.0, self.kernel, self.symmetric)
            kt = augmented_kernel(pair)
            return kt(self.su[:, None], self.pu[:, None], self.su[None, :], self.pu[None, :])
        kv = 1.0 / (TWO_PI * (2.0 * alpha + self._dk))
        if self.symmetric:
            cv = 1.0 / (TWO_PI * (2.0 * alpha + self._dc))
            plus, minus = kv + cv, kv - cv
        else:
            plus = minus = kv
        n = self.ts.n
        out = np.empty((2 * n, 2 * n))
        out[0::2, 0::2] = 0.5 * plus.real
        out[1::2, 1::2] = 0.5 * minus.real
        out[0::2, 1::2] = -0.5 * minus.imag
        out[1::2, 0::2] = 0.5 * plus.imag
        if self.dropped:
            out = np.delete(np.delete(out, self.dropped, axis=0), self.dropped, axis=1)
        return out

    def _design(self, poles):
        if len(poles) == 0:
            return None
        p = np.asarray(poles, dtype=complex)
        u = 1.0 / (self.su[:, None] - p[None, :])
        v = 1.0 / (self.su[:, None] - np.conj(p)[None, :])
        h_odd = u + v
        h_even = 1j * (u - v)
        re = self._re_rows[:, None]
        out = np.empty((len(self.su), 2 * len(p)))
        out[:, 0::2] = np.where(re, h_odd.real, h_odd.imag)
        out[:, 1::2] = np.where(re, h_even.real, h_even.imag)
        return out

    def _solver(self, alpha: float) -> PSDSolver:
        key = float(alpha)
        solver = self._solver_cache.get(key)
        if solver is None:
            solver = PSDSolver(self._kernel_matrix(alpha))
            if len(self._solver_cache) >= 8:
                self._solver_cache.pop(next(iter(self._solver_cache)))
            self._solver_cache[key] = solver
        return solver

    def _profile(self, alpha, poles):
        solver = self._solver(alpha)
        design = self._design(poles)
        beta, quad0 = gls(solver, design, self.yt)
        mass = 0.0
        if solver.truncated:
            resid = self.yt if design is None else self.yt - design @ beta
            mass = solver.discarded_fraction(resid)
        return solver, beta, quad0, mass

    def sigma2_gls(self, alpha, poles) -> float:
        """Closed-form scale estimate used to start the optimizer."""
        solver, _, quad0, mass = self._profile(alpha, poles)
        if mass > DEGENERATE_MASS_TOL or quad0 <= 0:
            return 1.0
        return quad0 / solver.rank

    def start_point(self, alpha, poles, alpha_min) -> np.ndarray:
        """Packed start vector for a drawn alpha.

        Draws landing where the covariance cannot carry the data (numerically
        singular with residual mass on dead directions, which happens for
        oversmoothing alpha) are halved back into the admissible range before
        the local optimization starts.
        """
        alpha = float(alpha)
        s2 = None
        for _ in range(80):
            solver, _, quad0, mass = self._profile(alpha, poles)
            if mass <= DEGENERATE_MASS_TOL:
                s2 = quad0 / solver.rank if quad0 > 0 else 1.0
                break
            if alpha * 0.5 < alpha_min:
                break
            alpha *= 0.5
        if s2 is None or not np.isfinite(s2):
            s2 = 1.0
        theta1 = float(np.clip(np.log(s2 / TWO_PI), THETA1_MIN, THETA1_MAX))
        coords = np.ravel([(np.real(p), np.imag(p)) for p in poles]) if len(poles) else []
        return np.concatenate(([theta1, alpha], coords))

    def value(self, x) -> Tuple[float, np.ndarray]:
        """Penalized log-likelihood J and the profiling beta at packed x.

        Hyperparameters whose covariance loses directions that still carry
        residual mass receive a large finite penalty growing with that mass,
        so local optimizers are steered back toward admissible regions.
        """
        theta1, alpha, poles = self.unpack(x)
        if alpha <= 0:
            return -np.inf, np.zeros(0)
        sigma2 = TWO_PI * np.exp(theta1)
        solver, beta, quad0, mass = self._profile(alpha, poles)
        if mass > DEGENERATE_MASS_TOL:
            penalty = 1e6 * (1.0 + np.log10(mass / DEGENERATE_MASS_TOL))
            return -penalty, beta
        n_eff = solver.rank
        loglik = -0.5 * (
            n_eff * np.log(TWO_PI * sigma2) + solver.logdet + quad0 / sigma2
        )
        return loglik + lognormal_prior_logpdf(alpha, self.span), beta

    def neg(self, x) -> float:
        return -self.value(x)[0]


def penalized_loglik(
    hp: HyperParams,
    ts: TrainingSet,
    kernel: str = "szego",
    symmetric: bool = True,
) -> Tuple[float, np.ndarray]:
    """Penalized log-likelihood and GLS mean coefficients at fixed hyperparameters."""
    obj = _Objective(ts, kernel=kernel, symmetric=symmetric)
    return obj.value(_Objective.pack(hp))


def _worker_count() -> int:
    """Parallelism cap: FRF_THREADS if positive, else the CPU count."""
    raw = os.environ.get("FRF_THREADS", "0")
    try:
        n = int(raw)
    except ValueError:
        n = 0
    if n <= 0:
        n = os.cpu_count() or 1
    return max(1, n)


def _limit_worker_blas():
    try:
        import threadpoolctl

        threadpoolctl.threadpool_limits(1)
    except Exception:  # noqa: BLE001 - best effort
        pass


def _parallel_map(fn, payloads):
    """Order-preserving map over independent tasks; serial when capped."""
    workers = min(_worker_count(), len(payloads))
    if workers <= 1:
        return [fn(p) for p in payloads]
    with ProcessPoolExecutor(max_workers=workers, initializer=_limit_worker_blas) as ex:
        return list(ex.map(fn, payloads))


def _opt_task(payload):
    omega, y, symmetric, kernel, x0, lo, hi = payload
    ts = TrainingSet(omega, y, symmetric=symmetric)
    obj = _Objective(ts, kernel=kernel, symmetric=symmetric)
    return minimize_bounded(obj.neg, x0, (lo, hi))


def _fold_task(payload):
    omega, y, symmetric, kernel, x0, lo, hi, drop_i, grid = payload
    ts = TrainingSet(omega, y, symmetric=symmetric)
    fold = ts.drop(drop_i)
    try:
        obj = _Objective(fold, kernel=kernel, symmetric=symmetric)
        x, f = minimize_bounded(obj.neg, x0, (lo, hi))
        if f >= BAD_VALUE:
            return drop_i, None, None, "fold optimization produced no finite value"
        model = fit_kernel_model(fold, _hp_from_x(x), kernel, symmetric)
        return (
            drop_i,
            complex(model.predict(1j * omega[drop_i])),
            model.predict(1j * grid),
            None,
        )
    except Exception as exc:  # noqa: BLE001 - reported with fold index
        return drop_i, None, None, f"{type(exc).__name__}: {exc}"


def _bounds_with_warm_start(K, ts, init: Optional[HyperParams]):
    lo, hi = hyperparam_bounds(K, float(np.min(ts.omega)), float(np.max(ts.omega)))
    if init is not None and len(init.poles):
        x0 = _Objective.pack(init)
        if np.any(x0[2:] < lo[2:]) or np.any(x0[2:] > hi[2:]):
            lo[2:] = np.minimum(lo[2:], x0[2:])
            hi[2:] = np.maximum(hi[2:], x0[2:])
            warnings.warn(
                "optimization bounds enlarged to contain warm-start poles",
                BoundsEnlargedWarning,
                stacklevel=3,
            )
    return lo, hi


def _hp_from_x(x) -> HyperParams:
    theta1, alpha, poles = _Objective.unpack(x)
    return HyperParams(theta1=float(theta1), theta2=float(alpha), poles=poles)


def optimize_hyperparams(
    ts: TrainingSet,
    K: int,
    init: Optional[HyperParams] = None,
    n_starts: int = N_MULTISTART,
    rng: Optional[np.random.Generator] = None,
    kernel: str = "szego",
    symmetric: bool = True,
) -> HyperParams:
    """Best local optimum of the penalized log-likelihood over a multistart.

    ``n_starts`` initial alpha values are drawn uniformly in
    [1e-6 |Omega|, |Omega|]; sigma2 starts at its GLS estimate; poles start at
    the warm start's poles when ``init`` is given, otherwise equidistant near
    the axis.  The warm start itself is appended as an extra start.
    """
    if rng is None:
        rng = np.random.default_rng(0)
    obj = _Objective(ts, kernel=kernel, symmetric=symmetric)
    lo, hi = _bounds_with_warm_start(K, ts, init)
    alpha_draws = rng.uniform(lo[1], hi[1], n_starts)
    base_poles = (
        init.poles if init is not None else init_poles(
            K, float(np.min(ts.omega)), float(np.max(ts.omega)), max(kmax_rule(ts.n), max(K, 1))
        )
    )
    starts = [obj.start_point(a, base_poles, lo[1]) for a in alpha_draws]
    if init is not None:
        starts.append(_Objective.pack(init))
    payloads = [
        (ts.omega, ts.y, symmetric, kernel, x0, lo, hi) for x0 in starts
    ]
    results = _parallel_map(_opt_task, payloads)
    best_i = min(range(len(results)), key=lambda i: (results[i][1], i))
    x, f = results[best_i]
    if x is None or f >= BAD_VALUE:
        raise OptimizationFailedError(
            f"no start produced a finite penalized log-likelihood (K={K})"
        )
    return _hp_from_x(x)


def fit_kernel_model(
    ts: TrainingSet,
    hp: HyperParams,
    kernel: str = "szego",
    symmetric: bool = True,
) -> FittedModel:
    """Interpolant at fixed hyperparameters (rational mean profiled by GLS)."""
    pair = _make_pair(hp.alpha, hp.sigma2, kernel, symmetric)
    mean = rational_basis(hp.poles) if len(hp.poles) else None
    return interpolate.fit(ts, pair, mean)


def backward_eliminate(
    ts: TrainingSet,
    K_max: int,
    rng: Optional[np.random.Generator] = None,
    n_starts: int = N_MULTISTART,
    kernel: str = "szego",
    symmetric: bool = True,
) -> Tuple[List[Tuple[int, HyperParams]], List[complex]]:
    """Optimized models for K = K_max..0 by backward pole elimination.

    Candidate subsets (one pole pair removed) are scored by the penalized
    log-likelihood with poles fixed and sigma2/beta re-profiled; the winning
    subset warm-starts the next full optimization.
    """
    if rng is None:
        rng = np.random.default_rng(0)
    obj = _Objective(ts, kernel=kernel, symmetric=symmetric)
    results = [(K_max, optimize_hyperparams(
        ts, K_max, rng=rng, n_starts=n_starts, kernel=kernel, symmetric=symmetric
    ))]
    trace: List[complex] = []
    for K in range(K_max - 1, -1, -1):
        prev = results[-1][1]
        best = None
        for j in range(len(prev.poles)):
            subset = np.delete(prev.poles, j)
            s2 = obj.sigma2_gls(prev.theta2, subset)
            theta1 = float(np.clip(np.log(s2 / TWO_PI), THETA1_MIN, THETA1_MAX))
            x = np.concatenate(
                ([theta1, prev.theta2], np.ravel([(p.real, p.imag) for p in subset]))
                if len(subset)
                else ([theta1, prev.theta2],)
            )
            J, _ = obj.value(x)
            key = (-J, _pole_sort_key(subset))
            if best is None or key < best[0]:
                best = (key, j, subset, theta1)
        _, j, subset, theta1 = best
        trace.append(complex(prev.poles[j]))
        warm = HyperParams(theta1=theta1, theta2=prev.theta2, poles=subset)
        hp = optimize_hyperparams(
            ts, K, init=warm, rng=rng, n_starts=n_starts, kernel=kernel, symmetric=symmetric
        )
        results.append((K, hp))
    return results, trace


def _loo_fold_models(ts, hp, kernel, symmetric):
    """Retuned leave-one-out models: one warm-started local optimization each."""
    for i in range(ts.n):
        fold = ts.drop(i)
        try:
            obj = _Objective(fold, kernel=kernel, symmetric=symmetric)
            lo, hi = _bounds_with_warm_start(len(hp.poles), fold, hp)
            x0 = _Objective.pack(hp)
            x, f = minimize_bounded(obj.neg, x0, (lo, hi))
            if f >= BAD_VALUE:
                raise OptimizationFailedError("fold optimization produced no finite value")
            yield i, fit_kernel_model(fold, _hp_from_x(x), kernel, symmetric)
        except Exception as exc:  # noqa: BLE001 - re-raised with fold index
            if isinstance(exc, FoldFailedError):
                raise
            raise FoldFailedError(i, exc) from exc


def loo_criterion(
    ts: TrainingSet,
    hp: HyperParams,
    kernel: str = "szego",
    symmetric: bool = True,
) -> float:
    """Mean squared leave-one-out prediction error with retuning."""
    if ts.n < 2:
        raise ValueError("leave-one-out requires at least 2 samples")
    acc = 0.0
    for i, model in _loo_fold_models(ts, hp, kernel, symmetric):
        pred = model.predict(1j * ts.omega[i])
        acc += abs(ts.y[i] - pred) ** 2
    return acc / ts.n


@dataclass
class PerKResult:
    """Selection diagnostics for one candidate pole count."""

    K: int
    hyperparams: HyperParams
    eps_loo: float
    eps_loo_stab: float
    instability: float
    note: Optional[str] = None


@dataclass
class SelectionReport:
    """Outcome of the stabilized leave-one-out model selection."""

    per_k: List[PerKResult]
    lambda_: float
    chosen_k: int
    elimination_trace: List[complex] = field(default_factory=list)
    notes: List[str] = field(default_factory=list)

    def chosen(self) -> PerKResult:
        for entry in self.per_k:
            if entry.K == self.chosen_k:
                return entry
        raise ValueError("chosen K not present in report")


def stabilized_criterion(
    ts: TrainingSet,
    all_hp: List[Tuple[int, HyperParams]],
    fine_grid_M: Optional[int] = None,
    kernel: str = "szego",
    symmetric: bool = True,
    elimination_trace: Optional[List[complex]] = None,
) -> SelectionReport:
    """Stabilized leave-one-out selection over the per-K models.

    eps_stab(K) = eps_loo(K) + lambda * (1/(nM)) sum_i sum_j
                  |f_n(i w_j) - f_(n-1,i)(i w_j)|^2
    on an equidistant M-point grid, with lambda = 0.2 eps_loo(0)/instability(0).
    Ties resolve to the smallest K.
    """
    n = ts.n
    M = fine_grid_M if fine_grid_M is not None else fine_grid_size(n)
    wmin, wmax = float(np.min(ts.omega)), float(np.max(ts.omega))
    grid_w = np.linspace(wmin, wmax, M)
    notes: List[str] = []
    entries: List[PerKResult] = []
    for K, hp in sorted(all_hp, key=lambda kv: kv[0]):
        try:
            full = fit_kernel_model(ts, hp, kernel, symmetric)
            full_grid = full.predict(1j * grid_w)
            x0 = _Objective.pack(hp)
            payloads = []
            for i in range(n):
                lo, hi = _bounds_with_warm_start(len(hp.poles), ts.drop(i), hp)
                payloads.append(
                    (ts.omega, ts.y, symmetric, kernel, x0, lo, hi, i, grid_w)
                )
            eps_acc = 0.0
            instab_acc = 0.0
            for i, pred, grid_pred, err in _parallel_map(_fold_task, payloads):
                if err is not None:
                    raise FoldFailedError(i, err)
                eps_acc += abs(ts.y[i] - pred) ** 2
                instab_acc += float(np.sum(np.abs(full_grid - grid_pred) ** 2))
            entries.append(
                PerKResult(K, hp, eps_acc / n, np.nan, instab_acc / (n * M))
            )
        except (FoldFailedError, OptimizationFailedError) as exc:
            notes.append(f"K={K} excluded: {exc}")
            entries.append(PerKResult(K, hp, np.nan, np.nan, np.nan, note=str(exc)))
    base = next((e for e in entries if e.K == 0), None)
    if base is None or not np.isfinite(base.eps_loo):
        raise OptimizationFailedError("the K=0 model is required for normalization")
    if base.instability > 0:
        lam = LAMBDA_FACTOR * base.eps_loo / base.instability
    else:
        warnings.warn(
            "K=0 instability term is zero; stabilization disabled",
            DegenerateLambdaWarning,
            stacklevel=2,
        )
        notes.append("degenerate lambda: K=0 instability term was zero")
        lam = 0.0
    for e in entries:
        if np.isfinite(e.eps_loo):
            e.eps_loo_stab = e.eps_loo + lam * e.instability
    finite = [e for e in entries if np.isfinite(e.eps_loo_stab)]
    chosen = min(finite, key=lambda e: (e.eps_loo_stab, e.K)).K
    return SelectionReport(
        per_k=entries,
        lambda_=lam,
        chosen_k=chosen,
        elimination_trace=list(elimination_trace or []),
        notes=notes,
    )


def fit_hybrid(
    ts: TrainingSet,
    seed: int = 0,
    n_starts: int = N_MULTISTART,
    kernel: str = "szego",
) -> Tuple[FittedModel, SelectionReport]:
    """Full hybrid pipeline: eliminate poles, select K, refit on all data."""
    ts = interpolate.validate_training(ts, symmetric=True)
    rng = np.random.default_rng(seed)
    K_max = kmax_rule(ts.n)
    if ts.n < 2:
        hp = optimize_hyperparams(ts, 0, rng=rng, n_starts=n_starts, kernel=kernel)
        model = fit_kernel_model(ts, hp, kernel, True)
        report = SelectionReport(
            per_k=[PerKResult(0, hp, np.nan, np.nan, np.nan)],
            lambda_=np.nan,
            chosen_k=0,
            notes=["n < 2: leave-one-out selection skipped"],
        )
        return model, report
    chain, trace = backward_eliminate(
        ts, K_max, rng=rng, n_starts=n_starts, kernel=kernel
    )
    report = stabilized_criterion(
        ts, chain, kernel=kernel, elimination_trace=trace
    )
    model = fit_kernel_model(ts, report.chosen().hyperparams, kernel, True)
    return model, report
