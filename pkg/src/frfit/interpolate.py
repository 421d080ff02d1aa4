"""Minimum-norm interpolation of complex frequency data with a kernel pair.

The complex problem K g + C conj(g) = y is solved through its real augmented
formulation: each sample (w, y) contributes a real-channel and an
imaginary-channel observation at the augmented points (iw, RE) and (iw, IM).
An optional linear mean model is profiled by generalized least squares; the
kernel part then interpolates the residual.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field, replace
from typing import Callable, List, Optional, Sequence

import numpy as np

from ._linalg import PSDSolver, gls
from .errors import (
    DuplicateFrequencyError,
    IllConditionedWarning,
    SingularSystemError,
    SymmetryViolationError,
)
from .kernels import IM, RE, KernelPair, augmented_kernel

# Conjugate-pair consistency is checked to this relative tolerance; generated
# Hermitian-symmetric data match to ~1e-14.
SYMMETRY_RTOL = 1e-9

CONDITION_WARN_THRESHOLD = 1e12


@dataclass(frozen=True)
class ComplexSample:
    """One training observation: angular frequency (rad/s) and complex response."""

    omega: float
    y: complex


@dataclass(frozen=True)
class TrainingSet:
    """Ordered training observations, optionally validated for symmetry."""

    omega: np.ndarray
    y: np.ndarray
    symmetric: bool = False

    def __post_init__(self):
        object.__setattr__(self, "omega", np.atleast_1d(np.asarray(self.omega, dtype=float)))
        object.__setattr__(self, "y", np.atleast_1d(np.asarray(self.y, dtype=complex)))
        if self.omega.shape != self.y.shape:
            raise ValueError("omega and y must have the same length")
        if not (np.all(np.isfinite(self.omega)) and np.all(np.isfinite(self.y))):
            raise ValueError("training data must be finite")

    @classmethod
    def from_samples(cls, samples: Sequence[ComplexSample], symmetric: bool = False):
        return cls(
            omega=np.array([s.omega for s in samples], dtype=float),
            y=np.array([s.y for s in samples], dtype=complex),
            symmetric=symmetric,
        )

    @property
    def n(self) -> int:
        return len(self.omega)

    def drop(self, index: int) -> "TrainingSet":
        keep = np.arange(self.n) != index
        return TrainingSet(self.omega[keep], self.y[keep], symmetric=self.symmetric)

    @property
    def omega_span(self) -> float:
        return float(np.max(self.omega) - np.min(self.omega))


@dataclass
class LinearMeanSpec:
    """Linear mean model: complex basis functions with real coefficients.

    Each basis function must satisfy h(conj(s)) = conj(h(s)) so that the mean
    preserves Hermitian symmetry.  ``beta`` is populated by the fit.  When the
    basis comes from rational pole pairs, ``poles`` records them.
    """

    basis: List[Callable[[np.ndarray], np.ndarray]]
    beta: Optional[np.ndarray] = None
    poles: Optional[np.ndarray] = None

    @property
    def size(self) -> int:
        return len(self.basis)

    def __call__(self, s):
        if self.beta is None:
            raise ValueError("mean coefficients have not been fitted")
        s = np.asarray(s, dtype=complex)
        out = np.zeros(s.shape, dtype=complex)
        for b, h in zip(self.beta, self.basis):
            out = out + b * h(s)
        return out

    def design_matrix(self, s, part):
        """Real design matrix of the augmented basis at points (s, part)."""
        s = np.asarray(s, dtype=complex)
        part = np.asarray(part)
        cols = []
        for h in self.basis:
            v = h(s)
            cols.append(np.where(part == RE, np.real(v), np.imag(v)))
        if not cols:
            return np.zeros((len(s), 0))
        return np.column_stack(cols)


def validate_training(ts: TrainingSet, symmetric: bool = False) -> TrainingSet:
    """Check a training set and return it with the symmetry mode recorded.

    Rejects duplicate frequencies always.  In symmetric mode, additionally
    requires a real response at w = 0 and conjugate-consistent responses at
    any (w, -w) pair.
    """
    omega, y = ts.omega, ts.y
    uniq, inverse, counts = np.unique(omega, return_inverse=True, return_counts=True)
    if np.any(counts > 1):
        dup = [i for i in range(len(omega)) if counts[inverse[i]] > 1]
        raise DuplicateFrequencyError(dup)
    if symmetric:
        scale = np.max(np.abs(y)) if len(y) else 0.0
        at_zero = np.nonzero(omega == 0.0)[0]
        for i in at_zero:
            if abs(np.imag(y[i])) > SYMMETRY_RTOL * max(scale, 1e-300):
                raise SymmetryViolationError(
                    [int(i)], f"response at omega=0 must be real, got {y[i]}"
                )
        order = np.argsort(omega)
        lookup = {omega[i]: i for i in order}
        for i in range(len(omega)):
            j = lookup.get(-omega[i])
            if j is None or j == i:
                continue
            if abs(y[i] - np.conj(y[j])) > SYMMETRY_RTOL * max(scale, 1e-300):
                raise SymmetryViolationError(
                    [int(i), int(j)],
                    f"responses at omega={omega[i]} and {omega[j]} are not conjugate",
                )
    return TrainingSet(omega, y, symmetric=symmetric)


def augmented_observations(ts: TrainingSet):
    """Augmented points, channels, data vector and the dropped row indices.

    Rows are interleaved as [(iw_1, RE), (iw_1, IM), (iw_2, RE), ...].  In
    symmetric mode the imaginary-channel row at w = 0 carries a degenerate
    (zero-variance) observation and is removed.
    """
    n = ts.n
    s = 1j * ts.omega
    su = np.repeat(s, 2)
    pu = np.tile([RE, IM], n)
    yt = np.empty(2 * n)
    yt[0::2] = np.real(ts.y)
    yt[1::2] = np.imag(ts.y)
    dropped: List[int] = []
    if ts.symmetric:
        for i in np.nonzero(ts.omega == 0.0)[0]:
            dropped.append(2 * int(i) + 1)
    keep = np.ones(2 * n, dtype=bool)
    keep[dropped] = False
    return su[keep], pu[keep], yt[keep], dropped


def assemble_system(ts: TrainingSet, pair: KernelPair, mean: Optional[LinearMeanSpec] = None):
    """Assemble the real augmented system (matrix, rhs, basis matrix)."""
    kt = augmented_kernel(pair)
    su, pu, yt, _ = augmented_observations(ts)
    matrix = kt(su[:, None], pu[:, None], su[None, :], pu[None, :])
    basis = mean.design_matrix(su, pu) if mean is not None else None
    return matrix, yt, basis


@dataclass
class FittedModel:
    """Frozen kernel interpolant: predicts via stored augmented coefficients."""

    pair: KernelPair
    mean: Optional[LinearMeanSpec]
    training: TrainingSet
    coeffs: np.ndarray
    degenerate_rows: List[int] = field(default_factory=list)
    matrix: Optional[np.ndarray] = None
    cond: float = np.nan
    _aug_s: Optional[np.ndarray] = None
    _aug_part: Optional[np.ndarray] = None

    def predict(self, s):
        """Evaluate the interpolant at Laplace points (scalar or array)."""
        s = np.asarray(s, dtype=complex)
        scalar = s.ndim == 0
        sv = np.atleast_1d(s)
        kt = augmented_kernel(self.pair)
        re_rows = kt(sv[:, None], RE, self._aug_s[None, :], self._aug_part[None, :])
        im_rows = kt(sv[:, None], IM, self._aug_s[None, :], self._aug_part[None, :])
        out = re_rows @ self.coeffs + 1j * (im_rows @ self.coeffs)
        if self.mean is not None:
            out = out + self.mean(sv)
        return complex(out[0]) if scalar else out

    def predict_at_omega(self, omega):
        return self.predict(1j * np.asarray(omega, dtype=float))


def fit(
    ts: TrainingSet,
    pair: KernelPair,
    mean: Optional[LinearMeanSpec] = None,
    nugget: float = 0.0,
) -> FittedModel:
    """Minimum-norm interpolant of the training data (semi-norm with a mean).

    The mean coefficients are the generalized least squares estimate under the
    augmented kernel covariance; the kernel part interpolates the residual.
    ``nugget`` adds an optional diagonal for ingested noisy data (0 in all
    reproduction runs).
    """
    su, pu, yt, dropped = augmented_observations(ts)
    kt = augmented_kernel(pair)
    matrix = kt(su[:, None], pu[:, None], su[None, :], pu[None, :])
    if nugget:
        matrix = matrix + nugget * np.eye(len(matrix))
    solver = PSDSolver(matrix)
    if solver.cond > CONDITION_WARN_THRESHOLD:
        warnings.warn(
            f"augmented system condition estimate {solver.cond:.2e} exceeds 1e12",
            IllConditionedWarning,
            stacklevel=2,
        )
    fitted_mean = None
    rhs = yt
    if mean is not None and mean.size > 0:
        design = mean.design_matrix(su, pu)
        beta, _ = gls(solver, design, yt)
        fitted_mean = replace(mean, beta=beta)
        rhs = yt - design @ beta
    coeffs = solver.solve(rhs)
    return FittedModel(
        pair=pair,
        mean=fitted_mean,
        training=ts,
        coeffs=coeffs,
        degenerate_rows=dropped,
        matrix=matrix,
        cond=solver.cond,
        _aug_s=su,
        _aug_part=pu,
    )


def predict(model: FittedModel, s):
    """Evaluate a fitted model at Laplace points."""
    return model.predict(s)


def rkhs_norm(model: FittedModel) -> float:
    """Norm of the kernel part of the interpolant: sqrt(coeffs^T K coeffs)."""
    quad = float(model.coeffs @ model.matrix @ model.coeffs)
    return float(np.sqrt(max(quad, 0.0)))


def predict_widely_linear(ts: TrainingSet, pair: KernelPair, s):
    """Closed-form widely linear predictor (zero mean), used as an oracle.

    E(xi(s)|y) = (k_sn - c_sn K^{-*} C^H) P^{-*} y + (c_sn - k_sn K^{-1} C) P^{-1} y*
    with P = K^* - C^H K^{-1} C.  Requires K and P invertible; with the
    symmetry pseudo-kernel this excludes training sets containing w = 0.
    """
    s = np.asarray(s, dtype=complex)
    scalar = s.ndim == 0
    sv = np.atleast_1d(s)
    sn = 1j * ts.omega
    K = pair.k(sn[:, None], sn[None, :])
    C = pair.c(sn[:, None], sn[None, :])
    CH = np.conj(C).T
    y = ts.y
    ks = pair.k(sv[:, None], sn[None, :])
    cs = pair.c(sv[:, None], sn[None, :])
    try:
        Kinv_C = np.linalg.solve(K, C)
        Kconjinv_CH = np.linalg.solve(np.conj(K), CH)
        P = np.conj(K) - CH @ Kinv_C
        # X @ M^{-1} computed as solve(M^T, X^T)^T
        a = np.linalg.solve(np.conj(P).T, (ks - cs @ Kconjinv_CH).T).T
        b = np.linalg.solve(P.T, (cs - ks @ Kinv_C).T).T
    except np.linalg.LinAlgError as exc:
        raise SingularSystemError(f"widely linear solve failed: {exc}") from exc
    out = a @ y + b @ np.conj(y)
    return complex(out[0]) if scalar else out
