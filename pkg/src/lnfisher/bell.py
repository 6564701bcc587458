"""Entanglement-assisted QPSK channel read out by a CV Bell measurement.

Alice displaces beam A by ``beta_s = (x_s + i p_s)/sqrt(2)`` with
``x_s, p_s = +-sqrt(2) beta``; Bob measures ``(x, p)`` and decides on the
quadrant. With ``[x, p] = i/2`` and outcome ``zeta = x + i p`` the outcome
density of a state ``rho`` is

    P(x, p) = (1/pi) <w| rho |w>,  w_(ma, mb) = <mb| D(delta) |ma>,
    delta = beta_s - zeta,

up to a global phase that cancels. Displaced vacuum gives a Gaussian centred
on ``(x_s, p_s)/sqrt(2)`` with variance 1/2 per axis.

Schmidt-diagonal states and the on/off mixtures are phase covariant, so
their densities depend on ``|delta|**2`` only and are evaluated from
normalized Laguerre functions; arbitrary density matrices go through the
full displacement matrices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial.legendre import leggauss

from .errors import DomainError, NumericError
from .fock import displacement_matrix, laguerre_functions
from .states import DensityMatrixFock, SchmidtDiagonalState, TwoModeFockMixture

LN2 = math.log(2.0)
FISHER_SCALE = math.pi * LN2 / 8  # J0 * FISHER_SCALE = (1+lam)/(1-lam) for the squeezed state

# letter / quadrant index -> (sign of x, sign of p)
QPSK_SIGNS = ((1, 1), (-1, 1), (-1, -1), (1, -1))

_CHUNK = 8192


@dataclass(frozen=True)
class IntegratorConfig:
    """Tensor Gauss-Legendre rule on ``[0, L]**2`` in each quadrant.

    ``half_width=None`` grows ``L`` from ``start_width`` in ``width_step``
    increments until the four quadrants hold at least ``1 - mass_target``.
    """

    points: int = 160
    half_width: float | None = None
    start_width: float = 6.0
    width_step: float = 2.0
    max_width: float = 30.0
    mass_target: float = 1e-9
    mass_tol: float = 1e-8

    def __post_init__(self):
        if self.points < 2:
            raise DomainError("need at least two quadrature points per axis")
        if self.half_width is not None and self.half_width <= 0:
            raise DomainError("half_width must be positive")


@dataclass(frozen=True)
class DerivativeConfig:
    step: float = 1e-3
    levels: int = 2
    rtol: float = 1e-3

    def __post_init__(self):
        if not self.step > 0:
            raise DomainError("derivative step must be positive")
        if self.levels < 1:
            raise DomainError("need at least one Richardson level")


@dataclass(frozen=True)
class ChannelMatrix:
    """``p[k, l] = P(b_l | a_k)``; ``mass`` holds the per-row integrated totals."""

    p: np.ndarray
    beta: float
    half_width: float
    mass: np.ndarray = field(repr=False)


# --------------------------------------------------------------------------
# outcome densities


class _RadialKernel:
    """Density as a function of ``u = |delta|**2`` for phase-covariant states.

    Each group holds components sharing the Laguerre order ``k`` as a
    coefficient matrix against ``phi_m^(k)(u)``; the density is
    ``scale * sum of squared amplitudes``.
    """

    def __init__(self, groups: list[tuple[int, np.ndarray]], scale: float):
        self.groups = groups
        self.scale = scale

    def __call__(self, delta: np.ndarray) -> np.ndarray:
        u = np.abs(delta) ** 2
        flat = u.ravel()
        out = np.empty_like(flat)
        for start in range(0, flat.size, _CHUNK):
            uc = flat[start : start + _CHUNK]
            acc = np.zeros_like(uc)
            for k, coef in self.groups:
                phi = laguerre_functions(k, coef.shape[1] - 1, uc)
                amps = coef @ phi
                acc += np.einsum("ij,ij->j", amps, amps)
            out[start : start + _CHUNK] = acc
        return (self.scale * out).reshape(u.shape)


class _GeneralKernel:
    def __init__(self, rho: DensityMatrixFock):
        self.rho = rho.matrix
        self.da, self.db = rho.dim_a, rho.dim_b
        self.dim = max(self.da, self.db)

    def __call__(self, delta: np.ndarray) -> np.ndarray:
        flat = np.asarray(delta, dtype=complex).ravel()
        out = np.empty(flat.size)
        for start in range(0, flat.size, _CHUNK):
            d = displacement_matrix(flat[start : start + _CHUNK], self.dim)
            # w[(ma, mb)] = <mb|D|ma>
            w = d.transpose(0, 2, 1)[:, : self.da, : self.db].reshape(d.shape[0], -1)
            out[start : start + _CHUNK] = np.einsum("pi,ij,pj->p", w, self.rho, w.conj()).real
        return out.reshape(np.shape(delta)) / math.pi


def _schmidt_kernel(state: SchmidtDiagonalState) -> _RadialKernel:
    return _RadialKernel([(0, state.coeffs[None, :])], 1 / math.pi)


def _mixture_kernel(mix: TwoModeFockMixture) -> _RadialKernel:
    by_order: dict[int, list] = {}
    for c in mix.components:
        by_order.setdefault(abs(c.i - c.j), []).append(c)
    groups = []
    for k in sorted(by_order):
        comps = by_order[k]
        # amplitude index m = n - max(i, j) runs from 0
        width = max(c.amps.size for c in comps)
        coef = np.zeros((len(comps), width))
        for row, c in enumerate(comps):
            coef[row, : c.amps.size] = c.amps
        groups.append((k, coef))
    return _RadialKernel(groups, 1 / (math.pi * mix.norm))


def bell_kernel(state):
    """Callable mapping ``delta = beta_s - zeta`` to the outcome density."""
    if isinstance(state, SchmidtDiagonalState):
        return _schmidt_kernel(state)
    if isinstance(state, TwoModeFockMixture):
        return _mixture_kernel(state)
    if isinstance(state, DensityMatrixFock):
        return _GeneralKernel(state)
    raise TypeError(f"unsupported state type {type(state).__name__}")


def _delta(x_s, p_s, x, p):
    return (np.asarray(x_s) + 1j * np.asarray(p_s)) / math.sqrt(2) - (np.asarray(x) + 1j * np.asarray(p))


def bell_density_schmidt(state: SchmidtDiagonalState, x_s, p_s, x, p):
    """``(1/pi) exp(-u) (sum_n c_n L_n(u))**2`` with ``u = |beta_s - zeta|**2``."""
    return _schmidt_kernel(state)(_delta(x_s, p_s, x, p))


def bell_density_mixture(mix: TwoModeFockMixture, x_s, p_s, x, p):
    """Incoherent sum of the component densities, normalized by ``mix.norm``."""
    return _mixture_kernel(mix)(_delta(x_s, p_s, x, p))


def bell_density_general(rho: DensityMatrixFock, x_s, p_s, x, p):
    """Outcome density of an arbitrary two-mode density matrix."""
    return _GeneralKernel(rho)(_delta(x_s, p_s, x, p))


def bell_density(state, x_s, p_s, x, p):
    return bell_kernel(state)(_delta(x_s, p_s, x, p))


# --------------------------------------------------------------------------
# channel


def _quadrant_rule(points: int, half_width: float):
    t, w = leggauss(points)
    nodes = 0.5 * half_width * (t + 1)
    weights = 0.5 * half_width * w
    X, P = np.meshgrid(nodes, nodes, indexing="ij")
    W = np.outer(weights, weights)
    return X, P, W


def _row(kernel, beta: float, letter: int, points: int, half_width: float) -> np.ndarray:
    sx, sp = QPSK_SIGNS[letter]
    beta_s = complex(sx * beta, sp * beta)  # (x_s + i p_s)/sqrt(2) with x_s = +-sqrt(2) beta
    X, P, W = _quadrant_rule(points, half_width)
    row = np.empty(4)
    for l, (qx, qp) in enumerate(QPSK_SIGNS):
        dens = kernel(beta_s - (qx * X + 1j * qp * P))
        row[l] = np.sum(W * dens)
    return row


def _resolve_width(kernel, beta: float, cfg: IntegratorConfig) -> float:
    if cfg.half_width is not None:
        return cfg.half_width
    L = cfg.start_width
    while True:
        mass = _row(kernel, beta, 0, cfg.points, L).sum()
        if mass >= 1 - cfg.mass_target or L + cfg.width_step > cfg.max_width:
            return L
        L += cfg.width_step


def _checked_row(kernel, beta, letter, cfg: IntegratorConfig, half_width: float) -> np.ndarray:
    row = _row(kernel, beta, letter, cfg.points, half_width)
    mass = row.sum()
    if abs(mass - 1) > cfg.mass_tol:
        raise NumericError(
            f"integrated outcome mass {mass:.12f} deviates from 1 by more than "
            f"{cfg.mass_tol:g} (half width {half_width})"
        )
    return row


def channel_matrix(state, beta: float, cfg: IntegratorConfig | None = None, kernel=None) -> ChannelMatrix:
    """Quadrant-decision channel ``P(b_l | a_k)`` for signal amplitude ``beta``.

    Raises ``NumericError`` if any row's integrated mass misses 1 by more
    than ``cfg.mass_tol``.
    """
    if beta < 0:
        raise DomainError(f"signal amplitude must be nonnegative, got {beta!r}")
    cfg = cfg or IntegratorConfig()
    kernel = kernel or bell_kernel(state)
    L = _resolve_width(kernel, beta, cfg)
    rows = np.array([_checked_row(kernel, beta, k, cfg, L) for k in range(4)])
    return ChannelMatrix(rows, beta, L, rows.sum(axis=1))


def mutual_information(cm: ChannelMatrix | np.ndarray) -> float:
    """Mutual information in bits for equiprobable letters; ``0 log 0 = 0``."""
    p = np.asarray(cm.p if isinstance(cm, ChannelMatrix) else cm, dtype=float)
    prior = np.full(p.shape[0], 1 / p.shape[0])
    marginal = prior @ p
    total = 0.0
    for k in range(p.shape[0]):
        for l in range(p.shape[1]):
            if p[k, l] > 0:
                total += prior[k] * p[k, l] * math.log2(p[k, l] / marginal[l])
    return total


def fisher_information(
    state,
    dcfg: DerivativeConfig | None = None,
    icfg: IntegratorConfig | None = None,
    units: str = "bits",
) -> float:
    """Fisher information of the letter-``a0`` channel row at ``beta = 0``.

    ``units="bits"`` includes the ``1/ln 2`` factor under which the squeezed
    state gives ``8 (1+lam) / (pi ln2 (1-lam))``; ``"nats"`` omits it. The
    ``beta`` derivative is a central difference refined by Richardson
    extrapolation over ``dcfg.levels`` step halvings.
    """
    if units not in ("bits", "nats"):
        raise DomainError(f"units must be 'bits' or 'nats', got {units!r}")
    dcfg = dcfg or DerivativeConfig()
    icfg = icfg or IntegratorConfig()
    kernel = bell_kernel(state)
    L = _resolve_width(kernel, 0.0, icfg)
    p0 = _checked_row(kernel, 0.0, 0, icfg, L)
    if np.any(p0 <= 0):
        raise NumericError("zero baseline quadrant probability")

    def central(h):
        return (_checked_row(kernel, h, 0, icfg, L) - _checked_row(kernel, -h, 0, icfg, L)) / (2 * h)

    table = [[central(dcfg.step)]]
    for level in range(1, dcfg.levels + 1):
        row = [central(dcfg.step / 2**level)]
        for j in range(1, level + 1):
            prev = row[j - 1]
            row.append(prev + (prev - table[level - 1][j - 1]) / (4**j - 1))
        table.append(row)

    scale = 1 / LN2 if units == "bits" else 1.0

    def fisher(dp):
        return scale * float(np.sum(dp**2 / p0))

    best = fisher(table[-1][-1])
    previous = fisher(table[-2][-1])
    if abs(best - previous) > dcfg.rtol * abs(best):
        raise NumericError(f"Richardson estimates disagree: {previous!r} vs {best!r}")
    return best


def small_beta_limit(
    state, betas=(0.02, 0.01, 0.005), icfg: IntegratorConfig | None = None
) -> float:
    """``lim I_beta / beta**2`` by Richardson extrapolation over halving ``betas``.

    The ratio is even in ``beta``, so successive levels cancel ``beta**2``,
    ``beta**4``, ...
    """
    betas = list(betas)
    if any(not math.isclose(2 * b2, b1) for b1, b2 in zip(betas, betas[1:])):
        raise DomainError("betas must halve successively")
    icfg = icfg or IntegratorConfig()
    kernel = bell_kernel(state)
    col = [mutual_information(channel_matrix(state, b, icfg, kernel)) / b**2 for b in betas]
    power = 1
    while len(col) > 1:
        factor = 4**power
        col = [(factor * fine - coarse) / (factor - 1) for coarse, fine in zip(col, col[1:])]
        power += 1
    return col[0]

