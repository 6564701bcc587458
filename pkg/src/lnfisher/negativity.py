"""Logarithmic negativity via partial transposition.

Dense route: transpose mode B, symmetrize, sum absolute eigenvalues.
Block route: every state built in this package commutes with
``N_A - N_B``, which makes the partial transpose block diagonal in the total
photon number ``m_a + m_b``; the blocks are at most ``n_max + 1`` wide, so
large cutoffs stay cheap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NumericError
from .states import DensityMatrixFock, SchmidtDiagonalState, TwoModeFockMixture


@dataclass(frozen=True)
class LnResult:
    value: float  # bits
    trace_norm: float
    min_pt_eigenvalue: float


def partial_transpose(rho: DensityMatrixFock) -> np.ndarray:
    """Transpose on mode B: ``[(ma,mb),(na,nb)] <- rho[(ma,nb),(na,mb)]``."""
    pt = rho.tensor().transpose(0, 3, 2, 1)
    n = rho.dim_a * rho.dim_b
    return pt.reshape(n, n)


def _eigvalsh(h: np.ndarray) -> np.ndarray:
    h = 0.5 * (h + h.conj().T)
    try:
        return np.linalg.eigvalsh(h)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"Hermitian eigensolver failed: {exc}") from exc


def trace_norm(h: np.ndarray) -> float:
    """Sum of absolute eigenvalues of a Hermitian matrix."""
    return float(np.abs(_eigvalsh(np.asarray(h))).sum())


def _conserves_number_difference(rho: DensityMatrixFock, tol: float = 1e-14) -> bool:
    ma, mb = np.divmod(np.arange(rho.dim_a * rho.dim_b), rho.dim_b)
    diff = ma - mb
    off = diff[:, None] != diff[None, :]
    return bool(np.abs(rho.matrix[off]).max(initial=0.0) <= tol)


def pt_blocks_dense(rho: DensityMatrixFock) -> list[np.ndarray]:
    """Partial transpose split into total-photon-number blocks.

    Only valid when ``rho`` commutes with ``N_A - N_B``.
    """
    pt = partial_transpose(rho)
    ma, mb = np.divmod(np.arange(rho.dim_a * rho.dim_b), rho.dim_b)
    total = ma + mb
    blocks = []
    for n in range(total.max() + 1):
        idx = np.flatnonzero(total == n)
        blocks.append(pt[np.ix_(idx, idx)])
    return blocks


def pt_blocks_mixture(mix: TwoModeFockMixture) -> list[np.ndarray]:
    """Total-photon-number blocks of the partial transpose, built from components.

    Component ``(i, j)`` with amplitudes ``a_n`` puts ``a_n a_n'`` at
    ``[(n-i, n'-j), (n'-i, n-j)]`` of the transposed matrix, inside block
    ``n + n' - i - j``. Blocks are indexed by ``m_a``.
    """
    d = mix.dim
    acc = np.zeros((2 * d - 1, d, d))
    for c in mix.components:
        n = np.arange(c.n0, c.n0 + c.amps.size)
        nn, mm = np.meshgrid(n, n, indexing="ij")  # row ket index n, column ket index n'
        np.add.at(acc, (nn + mm - c.i - c.j, nn - c.i, mm - c.i), np.outer(c.amps, c.amps))
    acc /= mix.norm
    blocks = []
    for b in range(2 * d - 1):
        lo, hi = max(0, b - d + 1), min(b, d - 1)
        blocks.append(acc[b, lo : hi + 1, lo : hi + 1])
    return blocks


def pt_blocks_schmidt(state: SchmidtDiagonalState) -> list[np.ndarray]:
    """Blocks for a pure Schmidt state: ``c_m c_n`` at ``[(m, n), (n, m)]``."""
    c = state.coeffs / math.sqrt(state.norm_sq)
    d = c.size
    blocks = []
    for b in range(2 * d - 1):
        lo, hi = max(0, b - d + 1), min(b, d - 1)
        ma = np.arange(lo, hi + 1)
        # row (ma, b - ma) couples to column (b - ma, ma)
        blk = np.zeros((ma.size, ma.size))
        blk[np.arange(ma.size), (b - ma) - lo] = c[ma] * c[b - ma]
        blocks.append(blk)
    return blocks


def _result_from_eigs(eigs: np.ndarray) -> LnResult:
    tn = float(np.abs(eigs).sum())
    if tn < 1 - 1e-10:
        raise NumericError(f"trace norm {tn!r} below one; state not normalized")
    return LnResult(math.log2(tn), tn, float(eigs.min()))


def log_negativity(state, method: str = "auto") -> LnResult:
    """Logarithmic negativity in bits.

    ``state`` may be a ``DensityMatrixFock``, a ``SchmidtDiagonalState`` or a
    ``TwoModeFockMixture``. ``method`` is ``"dense"``, ``"block"`` or
    ``"auto"`` (blocks whenever the number-difference structure allows).
    """
    if method not in ("auto", "dense", "block"):
        raise DomainError(f"unknown method {method!r}")
    if isinstance(state, TwoModeFockMixture):
        if method == "dense":
            from .states import to_density_matrix

            return log_negativity(to_density_matrix(state), "dense")
        blocks = pt_blocks_mixture(state)
    elif isinstance(state, SchmidtDiagonalState):
        if method == "dense":
            from .states import to_density_matrix

            return log_negativity(to_density_matrix(state), "dense")
        blocks = pt_blocks_schmidt(state)
    elif isinstance(state, DensityMatrixFock):
        structured = method != "dense" and _conserves_number_difference(state)
        if method == "block" and not structured:
            raise DomainError("state does not commute with N_A - N_B; block route unavailable")
        if not structured:
            return _result_from_eigs(_eigvalsh(partial_transpose(state)))
        blocks = pt_blocks_dense(state)
    else:
        raise TypeError(f"unsupported state type {type(state).__name__}")
    eigs = np.concatenate([_eigvalsh(b) for b in blocks if b.size])
    return _result_from_eigs(eigs)


def log_negativity_pure(state: SchmidtDiagonalState) -> float:
    """``2 log2(sum_n c_n)`` for a normalized Schmidt-diagonal state."""
    return 2 * math.log2(float(np.sum(state.coeffs)))


def closed_form_en(kind: str, lam: float, T: float = 1.0) -> float:
    """Logarithmic negativity of the squeezed (``"SQ"``) or PNR-subtracted (``"NG"``) state."""
    kind = kind.upper()
    if not 0 <= lam < 1:
        raise DomainError(f"lambda must lie in [0, 1), got {lam!r}")
    if kind == "SQ":
        return math.log2((1 + lam) / (1 - lam))
    if kind == "NG":
        if not 0 < T <= 1:
            raise DomainError(f"transmittance must lie in (0, 1], got {T!r}")
        x = lam * T
        if x >= 1:
            raise DomainError("lambda*T >= 1: negativity diverges")
        return math.log2((1 + x) ** 3 / ((1 + x * x) * (1 - x)))
    raise DomainError(f"unknown state kind {kind!r}")


def lambda_threshold_pure(T: float) -> float:
    """Largest ``lambda`` at which the subtracted state still beats the squeezed one."""
    if not 0 < T <= 1:
        raise DomainError(f"transmittance must lie in (0, 1], got {T!r}")
    disc = -7 * T * T + 18 * T - 7
    if disc < 0:
        raise DomainError(f"no crossing for T={T}: discriminant {disc:.3g} < 0")
    return (-1 + T + math.sqrt(disc)) / (2 * T * (2 - T))


def lambda_threshold_bisect(T: float, tol: float = 1e-13) -> float:
    """Crossing of the two closed-form negativities located by bisection.

    Independent check of ``lambda_threshold_pure``: the gap
    ``E_NG - E_SQ`` is positive at small lambda and negative near one.
    """
    def gap(lam):
        return closed_form_en("NG", lam, T) - closed_form_en("SQ", lam)

    lo, hi = 1e-6, 1 - 1e-12
    if T == 1 or gap(hi) > 0:
        raise DomainError(f"no sign change of the negativity gap for T={T}")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if gap(mid) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
