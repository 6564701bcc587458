"""Fock-space building blocks.

Special functions and matrix elements shared by the state constructors and
the Bell-measurement kernels. Every factorial-bearing quantity is evaluated
in log-space with the sign carried separately, so indices up to a few hundred
are safe.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln

from .errors import DomainError

N_MAX_FLOOR = 10
N_MAX_CEIL = 200


@dataclass(frozen=True)
class TruncationSpec:
    """Fock cutoff for a two-mode state.

    ``n_max`` is the largest photon number kept on the *input* squeezed state;
    ``tail_tol`` bounds the probability weight that the cutoff discards.
    """

    n_max: int
    tail_tol: float = 1e-12

    def __post_init__(self):
        if int(self.n_max) != self.n_max or self.n_max < 1:
            raise DomainError(f"n_max must be an integer >= 1, got {self.n_max!r}")
        if not self.tail_tol > 0:
            raise DomainError(f"tail_tol must be positive, got {self.tail_tol!r}")

    @classmethod
    def for_lambda(cls, lam: float, tail_tol: float = 1e-12) -> "TruncationSpec":
        """Smallest cutoff whose neglected squeezed-state weight is below ``tail_tol``.

        The result is clamped to ``[10, 200]``; a warning is issued when the
        upper clamp leaves more than ``tail_tol`` behind.
        """
        if not 0 <= lam < 1:
            raise DomainError(f"lambda must lie in [0, 1), got {lam!r}")
        if lam == 0:
            return cls(N_MAX_FLOOR, tail_tol)
        n = math.ceil(math.log(tail_tol * (1 - lam**2)) / (2 * math.log(lam)))
        n_max = min(max(n, N_MAX_FLOOR), N_MAX_CEIL)
        if n > N_MAX_CEIL:
            warnings.warn(
                f"cutoff clamped to {N_MAX_CEIL} for lambda={lam}; neglected weight "
                f"{squeezed_tail_weight(lam, n_max):.2e} exceeds tail_tol={tail_tol:.1e}",
                RuntimeWarning,
                stacklevel=2,
            )
        return cls(n_max, tail_tol)


def squeezed_tail_weight(lam: float, n_max: int) -> float:
    """Upper bound ``lam**(2(n_max+1)) / (1 - lam**2)`` on the discarded weight."""
    return lam ** (2 * (n_max + 1)) / (1 - lam**2)


@dataclass(frozen=True)
class BeamSplitterSpec:
    """Tap beam splitter of transmittance ``T``; reflectance is always ``1 - T``."""

    T: float
    R: float = field(init=False)

    def __post_init__(self):
        if not 0 <= self.T <= 1:
            raise DomainError(f"transmittance must lie in [0, 1], got {self.T!r}")
        object.__setattr__(self, "R", 1.0 - self.T)

    @property
    def theta(self) -> float:
        """Mixing angle with ``tan(theta) = sqrt(R / T)``."""
        return math.atan2(math.sqrt(self.R), math.sqrt(self.T))


def log_factorial(n):
    """``ln(n!)``, exact zero at n = 0, 1. Accepts scalars or integer arrays."""
    if np.ndim(n) == 0:
        if n < 0:
            raise DomainError(f"factorial of negative number {n!r}")
        return math.lgamma(n + 1)
    n = np.asarray(n)
    if np.any(n < 0):
        raise DomainError("factorial of negative number")
    return gammaln(n + 1.0)


def log_binomial(n: int, k: int) -> float:
    return log_factorial(n) - log_factorial(k) - log_factorial(n - k)


def associated_laguerre(n: int, k: int, u):
    """Generalized Laguerre polynomial ``L_n^(k)(u)`` by upward recurrence in n."""
    if n < 0 or k < 0:
        raise DomainError(f"need n, k >= 0, got n={n}, k={k}")
    u = np.asarray(u, dtype=float)
    prev = np.ones_like(u)
    if n == 0:
        return prev if prev.ndim else float(prev)
    cur = 1.0 + k - u
    for m in range(1, n):
        prev, cur = cur, ((2 * m + 1 + k - u) * cur - (m + k) * prev) / (m + 1)
    return cur if cur.ndim else float(cur)


def laguerre_functions(k: int, m_max: int, u) -> np.ndarray:
    """Normalized Laguerre functions for a fixed order ``k``.

    Returns an array ``phi`` of shape ``(m_max + 1,) + u.shape`` with

        phi[m] = sqrt(m! / (m+k)!) * u**(k/2) * exp(-u/2) * L_m^(k)(u),

    i.e. the modulus (up to sign) of the displacement matrix element
    ``<m+k|D(a)|m>`` at ``u = |a|**2``. Each entry is bounded by one, so the
    normalized recurrence never overflows.
    """
    u = np.asarray(u, dtype=float)
    out = np.empty((m_max + 1,) + u.shape)
    if k == 0:
        log_phi0 = -0.5 * u
    else:
        with np.errstate(divide="ignore"):
            log_phi0 = 0.5 * k * np.log(u) - 0.5 * u - 0.5 * math.lgamma(k + 1)
    out[0] = np.exp(log_phi0)
    if m_max == 0:
        return out
    out[1] = (1.0 + k - u) / math.sqrt(k + 1) * out[0]
    for m in range(1, m_max):
        a = (2 * m + 1 + k - u) / math.sqrt((m + 1) * (m + k + 1))
        b = math.sqrt(m * (m + k) / ((m + 1) * (m + k + 1)))
        out[m + 1] = a * out[m] - b * out[m - 1]
    return out


def displacement_matrix_element(m: int, n: int, alpha: complex) -> complex:
    """Fock matrix element ``<m|D(alpha)|n>`` of the displacement operator."""
    if m < 0 or n < 0:
        raise DomainError(f"Fock indices must be nonnegative, got ({m}, {n})")
    alpha = complex(alpha)
    if m < n:
        # <m|D(a)|n> = conj(<n|D(-a)|m>)
        return displacement_matrix_element(n, m, -alpha).conjugate()
    k = m - n
    u = abs(alpha) ** 2
    if alpha == 0:
        return complex(k == 0)
    lag = associated_laguerre(n, k, u)
    if lag == 0:
        return 0j
    log_mag = 0.5 * (log_factorial(n) - log_factorial(m)) + k * math.log(abs(alpha)) - 0.5 * u
    log_mag += math.log(abs(lag))
    phase = (alpha / abs(alpha)) ** k
    return math.copysign(1.0, lag) * math.exp(log_mag) * phase


def displacement_matrix(alpha, dim: int) -> np.ndarray:
    """Truncated displacement matrices for an array of amplitudes.

    ``alpha`` of shape ``S`` gives an array of shape ``S + (dim, dim)`` whose
    ``[..., r, c]`` entry is ``<r|D(alpha)|c>``.
    """
    alpha = np.asarray(alpha, dtype=complex)
    u = np.abs(alpha) ** 2
    unit = np.where(u > 0, alpha / np.where(u > 0, np.abs(alpha), 1.0), 1.0)
    out = np.zeros(alpha.shape + (dim, dim), dtype=complex)
    idx = np.arange(dim)
    for k in range(dim):
        phi = laguerre_functions(k, dim - 1 - k, u)  # (dim-k,) + S
        phi = np.moveaxis(phi, 0, -1)
        rows, cols = idx[k:], idx[: dim - k]
        out[..., rows, cols] = phi * (unit**k)[..., None]
        if k:
            out[..., cols, rows] = phi * ((-unit.conj()) ** k)[..., None]
    return out


def xi_coeff(n: int, k: int, spec: BeamSplitterSpec) -> float:
    """Amplitude for ``k`` of ``n`` photons to be reflected into a vacuum port.

    ``(-1)**k * sqrt(C(n, k)) * sqrt(T)**(n-k) * sqrt(R)**k``.
    """
    if not 0 <= k <= n:
        raise DomainError(f"need 0 <= k <= n, got n={n}, k={k}")
    sign = -1.0 if k % 2 else 1.0
    if (spec.T == 0 and n > k) or (spec.R == 0 and k > 0):
        return 0.0
    log_mag = 0.5 * log_binomial(n, k)
    if n > k:
        log_mag += 0.5 * (n - k) * math.log(spec.T)
    if k:
        log_mag += 0.5 * k * math.log(spec.R)
    return sign * math.exp(log_mag)


def xi_table(n_max: int, spec: BeamSplitterSpec) -> np.ndarray:
    """Lower-triangular array ``xi[n, k] = xi_coeff(n, k)`` for ``n <= n_max``."""
    xi = np.zeros((n_max + 1, n_max + 1))
    for n in range(n_max + 1):
        for k in range(n + 1):
            xi[n, k] = xi_coeff(n, k, spec)
    return xi


def bs_split_with_vacuum(n: int, spec: BeamSplitterSpec) -> list[tuple[int, float]]:
    """Expansion ``V|n>|0> = sum_k xi_nk |n-k>|k>`` as ``(k, xi_nk)`` pairs."""
    if n < 0:
        raise DomainError(f"photon number must be nonnegative, got {n}")
    return [(k, xi_coeff(n, k, spec)) for k in range(n + 1)]
