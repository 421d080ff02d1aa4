"""Bound-constrained local optimization with finite-difference gradients.

L-BFGS-B (projection-based box handling) drives all hyperparameter searches.
Variables are rescaled to the unit box so that mixed-magnitude parameters
(log-scales next to rad/s pole coordinates) are well conditioned.  Gradients
are central differences with relative step 1e-6 per coordinate and absolute
floor 1e-9.  Objectives returning non-finite values are clamped to a large
finite penalty so the line search can recover.
"""

from __future__ import annotations

import numpy as np
import scipy.optimize

from .errors import SingularSystemError

BAD_VALUE = 1e30
FD_REL_STEP = 1e-6
FD_ABS_FLOOR = 1e-9
MAX_ITER = 200
PGTOL = 1e-6
FTOL = 1e-10


class _Tracker:
    """Objective wrapper that clamps failures and remembers the best point."""

    def __init__(self, fun):
        self._fun = fun
        self.best_x = None
        self.best_f = np.inf

    def __call__(self, x):
        try:
            v = float(self._fun(x))
        except (np.linalg.LinAlgError, FloatingPointError, SingularSystemError):
            return BAD_VALUE
        if not np.isfinite(v):
            return BAD_VALUE
        if v < self.best_f:
            self.best_f = v
            self.best_x = np.array(x, dtype=float)
        return v


def _central_diff(fun, x):
    g = np.zeros_like(x)
    for i in range(len(x)):
        h = max(FD_REL_STEP * abs(x[i]), FD_ABS_FLOOR)
        xp = x.copy()
        xm = x.copy()
        xp[i] += h
        xm[i] -= h
        g[i] = (fun(xp) - fun(xm)) / (2.0 * h)
    return g


def minimize_bounded(fun, x0, bounds, maxiter: int = MAX_ITER, restarts: int = 1):
    """Local L-BFGS-B descent; returns the best point visited.

    The stopping rule approximates the relative projected-gradient test
    |pg|_inf < 1e-6 * (1 + |f|) by fixing the threshold per run from the best
    value seen so far.  Steep objective cliffs (hyperparameters rejected by
    the likelihood) can abort a line search early, so the descent restarts
    from the best visited point while that keeps improving, up to
    ``restarts`` extra runs.
    """
    lo = np.asarray(bounds[0], dtype=float)
    hi = np.asarray(bounds[1], dtype=float)
    width = hi - lo
    width[width <= 0] = 1.0

    def to_unit(x):
        return (np.asarray(x, dtype=float) - lo) / width

    def from_unit(u):
        return lo + np.clip(u, 0.0, 1.0) * width

    f = _Tracker(lambda u: fun(from_unit(u)))
    box = [(0.0, 1.0)] * len(lo)
    u0 = np.clip(to_unit(x0), 0.0, 1.0)
    f(u0)
    start = u0
    budget = maxiter
    for _ in range(restarts + 1):
        if budget <= 0:
            break
        before = f.best_f
        scale = abs(before) if before < BAD_VALUE else 0.0
        gtol = min(max(PGTOL * (1.0 + scale), PGTOL), 1e-3)
        res = scipy.optimize.minimize(
            f,
            start,
            jac=lambda u: _central_diff(f, u),
            method="L-BFGS-B",
            bounds=box,
            options={"maxiter": budget, "ftol": FTOL, "gtol": gtol},
        )
        budget -= max(res.nit, 1)
        if not (f.best_f < before - 1e-9 * (1.0 + abs(before))):
            break
        start = f.best_x
    return from_unit(f.best_x), f.best_f


def multistart_minimize(fun, starts, bounds, maxiter: int = MAX_ITER):
    """Best local optimum over the given start points.

    Returns (x_best, f_best, index_of_best_start); ties resolve to the
    earliest start for determinism.  f_best is BAD_VALUE if every start fails.
    """
    best_x, best_f, best_i = None, np.inf, -1
    for i, x0 in enumerate(starts):
        x, fx = minimize_bounded(fun, x0, bounds, maxiter=maxiter)
        if fx < best_f:
            best_x, best_f, best_i = x, fx, i
    return best_x, best_f, best_i
