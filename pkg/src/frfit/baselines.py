"""Reference approximants: greedy barycentric rational interpolation (AAA),
separate real/imaginary squared-exponential interpolation, and polynomial
interpolation on Chebyshev nodes."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from ._linalg import PSDSolver
from ._optim import BAD_VALUE, multistart_minimize
from .errors import OptimizationFailedError
from .interpolate import TrainingSet
from .kernels import KernelPair, se_kernel


# ---------------------------------------------------------------------------
# AAA
# ---------------------------------------------------------------------------

@dataclass
class AAAModel:
    """Barycentric rational approximant r = n(w)/d(w) of type (m-1, m-1)."""

    support_omega: np.ndarray
    support_values: np.ndarray
    weights: np.ndarray
    converged: bool = True
    tol: float = 1e-13

    @property
    def m(self) -> int:
        return len(self.support_omega)

    def __call__(self, omega):
        return aaa_eval(self, omega)


def aaa_fit(ts: TrainingSet, tol: float = 1e-13, m_max: Optional[int] = None) -> AAAModel:
    """Greedy AAA fit: support points by largest residual, weights by SVD.

    Stops when the maximum residual over the remaining samples drops below
    ``tol * max|y|`` or the support reaches ``m_max``.  If every sample ends
    up in the support with the residual still above tolerance, the model is
    returned flagged as non-converged.
    """
    z = np.asarray(ts.omega, dtype=float)
    f = np.asarray(ts.y, dtype=complex)
    n = len(z)
    if n < 2:
        raise ValueError("AAA requires at least 2 samples")
    if m_max is None:
        m_max = n
    m_max = min(m_max, n)
    scale = np.max(np.abs(f))
    if scale == 0:
        return AAAModel(z[:1], f[:1], np.ones(1, dtype=complex), converged=True, tol=tol)

    in_support = np.zeros(n, dtype=bool)
    r = np.full(n, np.mean(f), dtype=complex)
    support: list[int] = []
    weights = np.ones(0, dtype=complex)
    converged = False
    while len(support) < m_max:
        resid = np.abs(f - r)
        resid[in_support] = 0.0
        j = int(np.argmax(resid))
        support.append(j)
        in_support[j] = True
        rest = ~in_support
        if not np.any(rest):
            # All samples in the support: no rows left for the least squares
            # problem; revert to the previous support and flag non-convergence.
            support.pop()
            in_support[j] = False
            break
        zs = z[support]
        fs = f[support]
        cauchy = 1.0 / (z[rest, None] - zs[None, :])
        loewner = (f[rest, None] - fs[None, :]) * cauchy
        _, _, vh = np.linalg.svd(loewner)
        weights = np.conj(vh[-1, :])
        num = cauchy @ (weights * fs)
        den = cauchy @ weights
        r = f.astype(complex).copy()
        r[rest] = num / den
        if np.max(np.abs(f - r)) <= tol * scale:
            converged = True
            break
    zs = z[support]
    fs = f[support]
    if len(weights) != len(support):
        weights = np.ones(len(support), dtype=complex)
    return AAAModel(zs, fs, weights, converged=converged, tol=tol)


def aaa_eval(model: AAAModel, omega):
    """Evaluate the barycentric form; support nodes return the stored values."""
    omega = np.asarray(omega, dtype=float)
    scalar = omega.ndim == 0
    w = np.atleast_1d(omega)
    with np.errstate(divide="ignore", invalid="ignore"):
        cauchy = 1.0 / (w[:, None] - model.support_omega[None, :])
        out = (cauchy @ (model.weights * model.support_values)) / (cauchy @ model.weights)
    for k, node in enumerate(model.support_omega):
        exact = w == node
        if np.any(exact):
            out[exact] = model.support_values[k]
    return complex(out[0]) if scalar else out


# ---------------------------------------------------------------------------
# Separate squared-exponential interpolation of real and imaginary parts
# ---------------------------------------------------------------------------

@dataclass
class _SEPart:
    lengthscale: float
    sigma2: float
    coeffs: np.ndarray
    omega: np.ndarray
    cond: float

    def predict(self, w):
        K = se_kernel(
            np.asarray(w, dtype=float)[:, None],
            self.omega[None, :],
            self.lengthscale,
            self.sigma2,
        )
        return K @ self.coeffs


@dataclass
class SeparateSEModel:
    """Two independent real SE-kernel interpolants for Re(y) and Im(y)."""

    re: _SEPart
    im: _SEPart
    training: TrainingSet = None

    @property
    def cond(self) -> float:
        return max(self.re.cond, self.im.cond)

    def predict_at_omega(self, omega):
        omega = np.asarray(omega, dtype=float)
        scalar = omega.ndim == 0
        w = np.atleast_1d(omega)
        out = self.re.predict(w) + 1j * self.im.predict(w)
        return complex(out[0]) if scalar else out

    def predict(self, s):
        s = np.asarray(s, dtype=complex)
        if np.any(np.abs(np.real(s)) > 0):
            raise ValueError("separate SE interpolation is defined on the frequency axis")
        return self.predict_at_omega(np.imag(s))


def _se_loglik(w, values, log_ell, log_s2):
    K0 = se_kernel(w[:, None], w[None, :], np.exp(log_ell), 1.0)
    solver = PSDSolver(K0)
    z = solver.whiten(values)
    if solver.truncated:
        mass = solver.discarded_fraction(values)
        if mass > 1e-10:
            return -1e6 * (1.0 + np.log10(mass / 1e-10)), None
    quad0 = float(np.dot(z, z))
    s2 = np.exp(log_s2)
    n_eff = solver.rank
    return (
        -0.5 * (n_eff * np.log(2 * np.pi * s2) + solver.logdet + quad0 / s2),
        quad0 / max(n_eff, 1),
    )


def _fit_se_part(w, values, span, n, starts_ell):
    lo = np.array([np.log(span / n), np.log(2 * np.pi) - 15.0])
    hi = np.array([np.log(span), np.log(2 * np.pi) + 15.0])

    def neg(x):
        v, _ = _se_loglik(w, values, x[0], x[1])
        return -v

    starts = []
    for le in starts_ell:
        _, s2 = _se_loglik(w, values, le, 0.0)
        if s2 is None or not np.isfinite(s2) or s2 <= 0:
            s2 = max(np.var(values), 1e-12)
        starts.append([le, float(np.clip(np.log(s2), lo[1], hi[1]))])
    x, f, _ = multistart_minimize(neg, starts, (lo, hi))
    if x is None or f >= BAD_VALUE:
        raise OptimizationFailedError("SE hyperparameter search failed")
    ell, s2 = float(np.exp(x[0])), float(np.exp(x[1]))
    K = se_kernel(w[:, None], w[None, :], ell, s2)
    solver = PSDSolver(K)
    return _SEPart(ell, s2, solver.solve(values), w, solver.cond)


def separate_se_fit(ts: TrainingSet, seed: int = 0, n_starts: int = 10) -> SeparateSEModel:
    """Independent SE-kernel maximum-likelihood fits for real and imaginary parts.

    Lengthscale starts are log-uniform in [|Omega|/n, |Omega|]; the same start
    list is used for both channels, so swapping channels swaps the fits.
    """
    w = ts.omega
    n = ts.n
    span = ts.omega_span
    if span <= 0:
        span = max(float(np.max(np.abs(w))), 1.0)
    rng = np.random.default_rng(seed)
    starts_ell = rng.uniform(np.log(span / max(n, 2)), np.log(span), n_starts)
    re_part = _fit_se_part(w, np.real(ts.y), span, max(n, 2), starts_ell)
    im_part = _fit_se_part(w, np.imag(ts.y), span, max(n, 2), starts_ell)
    return SeparateSEModel(re=re_part, im=im_part, training=ts)


# ---------------------------------------------------------------------------
# Polynomial interpolation on Chebyshev nodes
# ---------------------------------------------------------------------------

@dataclass
class ChebyshevModel:
    """Barycentric polynomial interpolant on Chebyshev points of the 2nd kind."""

    nodes: np.ndarray
    values: np.ndarray
    weights: np.ndarray = field(init=False)

    def __post_init__(self):
        n = len(self.nodes)
        w = np.ones(n)
        w[1::2] = -1.0
        if n > 1:
            w[0] *= 0.5
            w[-1] *= 0.5
        self.weights = w

    def __call__(self, omega):
        omega = np.asarray(omega, dtype=float)
        scalar = omega.ndim == 0
        x = np.atleast_1d(omega)
        with np.errstate(divide="ignore", invalid="ignore"):
            cauchy = self.weights[None, :] / (x[:, None] - self.nodes[None, :])
            out = (cauchy @ self.values) / np.sum(cauchy, axis=1)
        for k, node in enumerate(self.nodes):
            exact = x == node
            if np.any(exact):
                out[exact] = self.values[k]
        return complex(out[0]) if scalar else out


def chebyshev_nodes(n: int, omega_min: float, omega_max: float) -> np.ndarray:
    """Chebyshev points of the second kind, ascending, mapped to the interval."""
    if n < 1:
        raise ValueError("need at least one node")
    if n == 1:
        return np.array([0.5 * (omega_min + omega_max)])
    t = np.cos(np.pi * np.arange(n) / (n - 1))[::-1]
    return 0.5 * (omega_min + omega_max) + 0.5 * (omega_max - omega_min) * t


def chebyshev_fit(
    f_oracle: Callable, n: int, omega_min: float, omega_max: float
) -> ChebyshevModel:
    """Degree n-1 complex polynomial interpolant at Chebyshev nodes."""
    nodes = chebyshev_nodes(n, omega_min, omega_max)
    values = np.asarray([f_oracle(x) for x in nodes], dtype=complex)
    return ChebyshevModel(nodes=nodes, values=values)


def se_equivalent_pair(model: SeparateSEModel):
    """Complex/real kernel view of the separate-channel model.

    The separate fits correspond to a complex kernel k = k_RR + k_II and a
    pseudo-kernel c = k_RR - k_II, where k_RR and k_II are the per-channel SE
    kernels.  Used as a consistency oracle in the tests.
    """

    def _on_axis(s):
        return np.imag(np.asarray(s, dtype=complex))

    def k(s, s0):
        w, w0 = _on_axis(s), _on_axis(s0)
        return (
            se_kernel(w, w0, model.re.lengthscale, model.re.sigma2)
            + se_kernel(w, w0, model.im.lengthscale, model.im.sigma2)
        ).astype(complex)

    def c(s, s0):
        w, w0 = _on_axis(s), _on_axis(s0)
        return (
            se_kernel(w, w0, model.re.lengthscale, model.re.sigma2)
            - se_kernel(w, w0, model.im.lengthscale, model.im.sigma2)
        ).astype(complex)

    return KernelPair(k=k, c=c, params=None)
