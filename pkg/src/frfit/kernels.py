"""Complex kernel / pseudo-kernel pairs for frequency response interpolation.

A pair ``(k, c)`` of a Hermitian positive definite kernel ``k`` and a symmetric
pseudo-kernel ``c`` defines a real Hilbert space of complex-valued functions.
The pair can be mapped to a single real-valued kernel on an augmented input
space ``(s, part)`` where ``part`` selects the real or imaginary channel; all
interpolation in this package runs through that real formulation.

Kernel evaluations are vectorized: arguments may be scalars or broadcastable
numpy arrays of Laplace points (complex, in rad/s).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import DomainError

# Channel labels for augmented points: real part first, imaginary part second.
RE = 0
IM = 1

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class KernelParams:
    """Hyperparameters of a kernel pair: pole shift alpha (rad/s) and scale sigma2."""

    alpha: float
    sigma2: float = 1.0

    def __post_init__(self):
        if not self.alpha > 0:
            raise DomainError(f"alpha must be positive, got {self.alpha}")
        if not self.sigma2 > 0:
            raise DomainError(f"sigma2 must be positive, got {self.sigma2}")


@dataclass(frozen=True)
class AugmentedPoint:
    """A Laplace point tagged with the channel (RE or IM) it observes."""

    s: complex
    part: int

    def __post_init__(self):
        if self.part not in (RE, IM):
            raise ValueError(f"part must be RE (0) or IM (1), got {self.part}")


@dataclass(frozen=True)
class KernelPair:
    """A complex kernel and pseudo-kernel, both sigma2-scaled and vectorized.

    ``k`` must be Hermitian (k(s, s0) = conj(k(s0, s))) and positive definite;
    ``c`` must be symmetric.  Both properties are checked by the test suite on
    random points, not at call time.
    """

    k: Callable[[np.ndarray, np.ndarray], np.ndarray]
    c: Callable[[np.ndarray, np.ndarray], np.ndarray]
    params: Optional[KernelParams] = None


def _check_halfplane(s, alpha):
    if np.any(np.real(s) <= -alpha):
        raise DomainError(
            f"Szego kernel requires Re(s) > -alpha = {-alpha}; "
            f"got min Re(s) = {np.min(np.real(s))}"
        )


def szego_k(s, s0, p: KernelParams):
    """Szego kernel of the Hardy space on the half-plane Re(s) > -alpha.

    Returns ``sigma2 / (2*pi*(2*alpha + s + conj(s0)))``.
    """
    s = np.asarray(s, dtype=complex)
    s0 = np.asarray(s0, dtype=complex)
    _check_halfplane(s, p.alpha)
    _check_halfplane(s0, p.alpha)
    return p.sigma2 / (TWO_PI * (2.0 * p.alpha + s + np.conj(s0)))


def szego_c(s, s0, p: KernelParams):
    """Pseudo-kernel paired with the Szego kernel by Hermitian symmetry.

    Equals ``szego_k(s, conj(s0), p)``, i.e. ``sigma2 / (2*pi*(2*alpha + s + s0))``.
    """
    s = np.asarray(s, dtype=complex)
    s0 = np.asarray(s0, dtype=complex)
    _check_halfplane(s, p.alpha)
    _check_halfplane(s0, p.alpha)
    return p.sigma2 / (TWO_PI * (2.0 * p.alpha + s + s0))


def stable_spline_k(w, w0, p: KernelParams):
    """Stable spline kernel evaluated on the frequency axis (s = i*w).

    Only on-axis evaluation is supported; ``w`` and ``w0`` are real angular
    frequencies.  Complex arguments are a rejected input.
    """
    w = np.asarray(w)
    w0 = np.asarray(w0)
    if np.iscomplexobj(w) or np.iscomplexobj(w0):
        raise DomainError("stable_spline_k is defined on the frequency axis only")
    a = p.alpha
    iw = 1j * w
    iw0 = 1j * w0
    outer = 0.5 / (3.0 * a + iw - iw0)
    inner = (
        1.0 / (2.0 * a + iw)
        + 1.0 / (2.0 * a - iw0)
        - 1.0 / (3.0 * (3.0 * a + iw))
        - 1.0 / (3.0 * (3.0 * a - iw0))
    )
    return p.sigma2 * outer * inner


def se_kernel(w, w0, lengthscale: float, sigma2: float):
    """Squared exponential kernel on real frequencies."""
    if not lengthscale > 0:
        raise DomainError(f"lengthscale must be positive, got {lengthscale}")
    if not sigma2 > 0:
        raise DomainError(f"sigma2 must be positive, got {sigma2}")
    w = np.asarray(w, dtype=float)
    w0 = np.asarray(w0, dtype=float)
    d = (w - w0) / lengthscale
    return sigma2 * np.exp(-0.5 * d * d)


def pseudo_from_symmetry(k):
    """Pseudo-kernel enforcing f(conj(s)) = conj(f(s)): c(s, s0) = k(s, conj(s0)).

    Valid whenever ``k`` is Hermitian and satisfies k(s, conj(s0)) = k(s0, conj(s)).
    """

    def c(s, s0):
        return k(s, np.conj(s0))

    return c


def zero_pseudo(s, s0):
    """The vanishing pseudo-kernel (circular case)."""
    return np.zeros(np.broadcast(np.asarray(s), np.asarray(s0)).shape, dtype=complex)


def szego_pair(p: KernelParams, symmetric: bool = True) -> KernelPair:
    """Szego kernel pair, with the symmetry pseudo-kernel or c = 0."""

    def k(s, s0):
        return szego_k(s, s0, p)

    c = pseudo_from_symmetry(k) if symmetric else zero_pseudo
    return KernelPair(k=k, c=c, params=p)


def stable_spline_pair(p: KernelParams, symmetric: bool = True) -> KernelPair:
    """Stable spline kernel pair (on-axis): arguments are i*w Laplace points."""

    def k(s, s0):
        s = np.asarray(s, dtype=complex)
        s0 = np.asarray(s0, dtype=complex)
        if np.any(np.abs(np.real(s)) > 0) or np.any(np.abs(np.real(s0)) > 0):
            raise DomainError("stable spline kernel is defined on the frequency axis only")
        return stable_spline_k(np.imag(s), np.imag(s0), p)

    # The pseudo-kernel k(s, conj(s0)) stays on-axis: conj(i*w0) = i*(-w0).
    c = pseudo_from_symmetry(k) if symmetric else zero_pseudo
    return KernelPair(k=k, c=c, params=p)


def augmented_kernel(pair: KernelPair):
    """Real kernel on the augmented input space (s, part).

    Returns a function ``kt(s, a, s0, a0)`` with broadcasting arguments, where
    ``a``/``a0`` are RE/IM channel selectors:

        kt((s,RE),(s0,RE)) = Re[k + c] / 2
        kt((s,IM),(s0,IM)) = Re[k - c] / 2
        kt((s,RE),(s0,IM)) = Im[-k + c] / 2
        kt((s,IM),(s0,RE)) = Im[k + c] / 2
    """

    def kt(s, a, s0, a0):
        s = np.asarray(s, dtype=complex)
        s0 = np.asarray(s0, dtype=complex)
        a = np.asarray(a)
        a0 = np.asarray(a0)
        kv = pair.k(s, s0)
        cv = pair.c(s, s0)
        out = np.where(
            (a == RE) & (a0 == RE),
            0.5 * np.real(kv + cv),
            np.where(
                (a == IM) & (a0 == IM),
                0.5 * np.real(kv - cv),
                np.where(
                    (a == RE) & (a0 == IM),
                    0.5 * np.imag(cv - kv),
                    0.5 * np.imag(kv + cv),
                ),
            ),
        )
        return out

    return kt


def pair_from_augmented(kt):
    """Reconstruct (k, c) from a real augmented kernel.

    Inverse of :func:`augmented_kernel`:

        k = (k_RR + k_II) + i (k_IR - k_RI)
        c = (k_RR - k_II) + i (k_IR + k_RI)
    """

    def k(s, s0):
        krr = kt(s, RE, s0, RE)
        kii = kt(s, IM, s0, IM)
        kri = kt(s, RE, s0, IM)
        kir = kt(s, IM, s0, RE)
        return (krr + kii) + 1j * (kir - kri)

    def c(s, s0):
        krr = kt(s, RE, s0, RE)
        kii = kt(s, IM, s0, IM)
        kri = kt(s, RE, s0, IM)
        kir = kt(s, IM, s0, RE)
        return (krr - kii) + 1j * (kir + kri)

    return k, c
