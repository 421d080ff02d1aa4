"""Symmetric positive semidefinite solves with a rank-revealing fallback.

The augmented kernel matrices are PSD by construction but may be numerically
rank deficient (exactly so when a training point coincides with the conjugate
of another).  The solver tries a Cholesky factorization first and falls back
to an eigenvalue-truncated pseudo-inverse with relative threshold 1e-12.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg

from .errors import SingularCovarianceError

EIG_TRUNCATION = 1e-12


class PSDSolver:
    """Factorization of a symmetric PSD matrix supporting solves and whitening.

    Attributes
    ----------
    rank : int
        Number of retained directions (matrix dimension on the Cholesky path).
    logdet : float
        Log-determinant restricted to the retained directions.
    cond : float
        Condition estimate (squared diagonal ratio of the Cholesky factor, or
        eigenvalue ratio of the retained spectrum).
    discarded_fraction : callable
        Given a vector, fraction of its squared mass lying in discarded
        directions (0 on the Cholesky path).
    """

    def __init__(self, matrix: np.ndarray, truncation: float = EIG_TRUNCATION):
        matrix = np.asarray(matrix, dtype=float)
        self.n = matrix.shape[0]
        self._eigvecs = None
        try:
            self._chol = scipy.linalg.cholesky(matrix, lower=True, check_finite=False)
            d = np.diag(self._chol)
            self.rank = self.n
            self.logdet = 2.0 * float(np.sum(np.log(d)))
            self.cond = float((d.max() / d.min()) ** 2)
        except scipy.linalg.LinAlgError:
            self._chol = None
            w, v = scipy.linalg.eigh(matrix)
            wmax = w[-1] if self.n else 0.0
            if not np.isfinite(wmax) or wmax <= 0:
                raise SingularCovarianceError("matrix has no positive eigenvalues")
            keep = w > truncation * wmax
            if not np.any(keep):
                raise SingularCovarianceError("matrix truncated to rank 0")
            self._w = w[keep]
            self._eigvecs = v[:, keep]
            self._vdisc = v[:, ~keep]
            self.rank = int(np.sum(keep))
            self.logdet = float(np.sum(np.log(self._w)))
            self.cond = float(wmax / self._w[0])

    @property
    def truncated(self) -> bool:
        return self._chol is None

    def solve(self, b: np.ndarray) -> np.ndarray:
        """Solve A x = b (pseudo-inverse solution on the truncated path)."""
        if self._chol is not None:
            z = scipy.linalg.solve_triangular(self._chol, b, lower=True, check_finite=False)
            return scipy.linalg.solve_triangular(self._chol.T, z, lower=False, check_finite=False)
        z = self._eigvecs.T @ b
        return self._eigvecs @ (z / self._w[:, None] if z.ndim == 2 else z / self._w)

    def whiten(self, b: np.ndarray) -> np.ndarray:
        """Return W b with W^T W = A^+, so that ||W b||^2 = b^T A^+ b."""
        if self._chol is not None:
            return scipy.linalg.solve_triangular(self._chol, b, lower=True, check_finite=False)
        z = self._eigvecs.T @ b
        scale = np.sqrt(self._w)
        return z / scale[:, None] if z.ndim == 2 else z / scale

    def discarded_fraction(self, b: np.ndarray) -> float:
        """Fraction of ||b||^2 carried by directions dropped from the factorization."""
        if self._chol is not None or self._vdisc.shape[1] == 0:
            return 0.0
        total = float(np.dot(b, b))
        if total == 0.0:
            return 0.0
        zd = self._vdisc.T @ b
        return float(np.dot(zd, zd) / total)


def gls(solver: PSDSolver, design: np.ndarray, y: np.ndarray):
    """Generalized least squares under the covariance factored by ``solver``.

    Returns ``(beta, quad)`` where ``beta`` minimizes the whitened residual and
    ``quad = (y - H beta)^T A^+ (y - H beta)``.  With an empty design, beta is
    the empty vector and quad = y^T A^+ y.
    """
    zy = solver.whiten(y)
    if design is None or design.shape[1] == 0:
        beta = np.zeros(0)
        resid = zy
    else:
        zh = solver.whiten(design)
        # Normal equations are fine here (the whitened design is small and
        # slender); fall back to least squares if the basis degenerates.
        gram = zh.T @ zh
        rhs = zh.T @ zy
        try:
            c = scipy.linalg.cho_factor(gram, check_finite=False)
            beta = scipy.linalg.cho_solve(c, rhs, check_finite=False)
        except scipy.linalg.LinAlgError:
            beta, *_ = np.linalg.lstsq(zh, zy, rcond=None)
        resid = zy - zh @ beta
    return beta, float(np.dot(resid, resid))
