"""Entangled two-mode states in a truncated Fock basis.

Covers the two-mode squeezed vacuum, its photon-subtracted descendants
(heralded by photon-number-resolving or on/off detectors on weakly tapped
copies of both beams) and two-level photon-number qubit states. The
``four_mode_tap_oracle`` rebuilds the tapped states from scratch with an
explicit beam-splitter unitary and detector POVM; it shares no formulas with
the closed-form constructors and is used to validate them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np
import scipy.linalg

from .errors import DomainError
from .fock import BeamSplitterSpec, TruncationSpec, xi_table


@dataclass(frozen=True)
class SchmidtDiagonalState:
    """Pure state ``sum_n c_n |n>_A |n>_B`` with real nonnegative ``c_n``."""

    coeffs: np.ndarray
    trunc: TruncationSpec

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=float)
        if c.ndim != 1 or c.size == 0:
            raise DomainError("coeffs must be a nonempty 1-d array")
        if np.any(c < 0):
            raise DomainError("Schmidt coefficients must be nonnegative")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def dim(self) -> int:
        return self.coeffs.size

    @property
    def norm_sq(self) -> float:
        return float(np.dot(self.coeffs, self.coeffs))


@dataclass(frozen=True)
class MixtureComponent:
    """Unnormalized ket ``sum_n amps[n - n0] |n - i>_A |n - j>_B``, ``n0 = max(i, j)``."""

    i: int
    j: int
    amps: np.ndarray

    @property
    def n0(self) -> int:
        return max(self.i, self.j)

    @property
    def weight(self) -> float:
        return float(np.dot(self.amps, self.amps))


@dataclass(frozen=True)
class TwoModeFockMixture:
    """Incoherent sum ``(1/norm) sum_ij |Phi_ij><Phi_ij|`` of offset kets."""

    components: tuple[MixtureComponent, ...]
    norm: float
    trunc: TruncationSpec

    @property
    def dim(self) -> int:
        # largest index reached on either mode is n_max - 1 since i, j >= 1
        return max(c.n0 + c.amps.size - min(c.i, c.j) for c in self.components)


@dataclass(frozen=True)
class DensityMatrixFock:
    """Dense two-mode density matrix, row index ``m_a * dim_b + m_b``."""

    matrix: np.ndarray
    dim_a: int
    dim_b: int

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        n = self.dim_a * self.dim_b
        if m.shape != (n, n):
            raise DomainError(f"matrix shape {m.shape} does not match dims {self.dim_a}x{self.dim_b}")
        object.__setattr__(self, "matrix", m)

    def tensor(self) -> np.ndarray:
        """View as ``rho[m_a, m_b, n_a, n_b]``."""
        return self.matrix.reshape(self.dim_a, self.dim_b, self.dim_a, self.dim_b)

    def embed(self, dim_a: int, dim_b: int) -> "DensityMatrixFock":
        """Zero-pad (or crop zero rows) to new Fock dimensions."""
        out = np.zeros((dim_a, dim_b, dim_a, dim_b), dtype=complex)
        da, db = min(dim_a, self.dim_a), min(dim_b, self.dim_b)
        src = self.tensor()
        dropped = np.abs(src).sum() - np.abs(src[:da, :db, :da, :db]).sum()
        if dropped > 1e-14:
            raise DomainError("cropping would discard nonzero entries")
        out[:da, :db, :da, :db] = src[:da, :db, :da, :db]
        return DensityMatrixFock(out.reshape(dim_a * dim_b, dim_a * dim_b), dim_a, dim_b)

    def check(self, herm_tol=1e-12, trace_tol=1e-10, psd_tol=1e-10) -> None:
        """Raise ``DomainError`` unless Hermitian, unit trace and PSD."""
        m = self.matrix
        herm = np.abs(m - m.conj().T).max()
        if herm > herm_tol:
            raise DomainError(f"not Hermitian (max deviation {herm:.2e})")
        tr = np.trace(m).real
        if abs(tr - 1) > trace_tol:
            raise DomainError(f"trace {tr!r} differs from 1")
        lo = np.linalg.eigvalsh(0.5 * (m + m.conj().T)).min()
        if lo < -psd_tol:
            raise DomainError(f"negative eigenvalue {lo:.2e}")


@dataclass(frozen=True)
class QubitEntangledState:
    """Photon-number qubit pair parametrized by ``|c0|``, the phase of ``c1`` and mixedness ``t``."""

    c0_abs: float
    phi: float = 0.0
    t: float = 1.0

    def __post_init__(self):
        if not 0 <= self.c0_abs <= 1:
            raise DomainError(f"|c0| must lie in [0, 1], got {self.c0_abs!r}")
        if not 0 <= self.t <= 1:
            raise DomainError(f"t must lie in [0, 1], got {self.t!r}")

    @property
    def c1_abs(self) -> float:
        return math.sqrt(max(0.0, 1.0 - self.c0_abs**2))

    @property
    def product(self) -> float:
        """``t |c0| |c1|``, the combination that fixes the negativity."""
        return self.t * self.c0_abs * self.c1_abs


@dataclass(frozen=True)
class PNR:
    """Photon-number-resolving detector projecting onto ``|count>``."""

    count: int = 1

    def __post_init__(self):
        if self.count not in (0, 1):
            raise DomainError(f"only PNR counts 0 and 1 are supported, got {self.count!r}")


@dataclass(frozen=True)
class OnOff:
    """Binary detector; the heralding outcome is a click, ``1 - |0><0|``."""


DetectorModel = Union[PNR, OnOff]
StateLike = Union[SchmidtDiagonalState, TwoModeFockMixture, DensityMatrixFock]


def _check_lambda(lam: float) -> None:
    if not 0 <= lam < 1:
        raise DomainError(f"lambda must lie in [0, 1), got {lam!r}")


def _check_tap(lam: float, spec: BeamSplitterSpec) -> None:
    _check_lambda(lam)
    if spec.T <= 0 or spec.T >= 1:
        raise DomainError(f"degenerate tap T={spec.T}: no photon can be subtracted")
    if lam == 0:
        raise DomainError("lambda = 0: photon subtraction from vacuum has zero probability")


def squeezed_amplitudes(lam: float, n_max: int) -> np.ndarray:
    """``sqrt(1 - lam**2) * lam**n`` for ``n = 0..n_max``."""
    return math.sqrt(1 - lam**2) * lam ** np.arange(n_max + 1, dtype=float)


def make_squeezed(lam: float, trunc: TruncationSpec | None = None) -> SchmidtDiagonalState:
    """Two-mode squeezed vacuum with ``lam = tanh(r)``; not renormalized after truncation."""
    _check_lambda(lam)
    trunc = trunc or TruncationSpec.for_lambda(lam)
    return SchmidtDiagonalState(squeezed_amplitudes(lam, trunc.n_max), trunc)


def pnr_detection_probability(lam: float, T: float) -> float:
    """Probability that both taps register exactly one photon."""
    R = 1 - T
    x = (lam * T) ** 2
    return (1 - lam**2) * x * (1 + x) / (1 - x) ** 3 * (R / T) ** 2


def onoff_detection_probability(lam: float, T: float) -> float:
    """Probability that both on/off taps click."""
    l2 = lam**2
    return l2 * (1 - T) ** 2 * (1 + l2 * T) / ((1 - l2 * T) * (1 - l2 * T**2))


def make_photon_subtracted_pure(
    lam: float, spec: BeamSplitterSpec, trunc: TruncationSpec | None = None
) -> tuple[SchmidtDiagonalState, float]:
    """State heralded by single-photon PNR clicks on both taps.

    Returns the normalized Schmidt state and the untruncated detection
    probability.
    """
    _check_tap(lam, spec)
    trunc = trunc or TruncationSpec.for_lambda(lam)
    alpha = squeezed_amplitudes(lam, trunc.n_max)
    xi = xi_table(trunc.n_max, spec)
    c = alpha[1:] * xi[1:, 1] ** 2
    c = c / np.linalg.norm(c)
    return SchmidtDiagonalState(c, trunc), pnr_detection_probability(lam, spec.T)


def make_photon_subtracted_mixed(
    lam: float,
    spec: BeamSplitterSpec,
    trunc: TruncationSpec | None = None,
    component_tol: float = 1e-10,
) -> TwoModeFockMixture:
    """State heralded by clicks of on/off detectors on both taps.

    Components ``(i, j)`` carry ``i`` photons lost from A and ``j`` from B;
    those lighter than ``component_tol`` times the total weight are dropped.
    """
    _check_tap(lam, spec)
    trunc = trunc or TruncationSpec.for_lambda(lam)
    n_max = trunc.n_max
    alpha = squeezed_amplitudes(lam, n_max)
    xi = xi_table(n_max, spec)
    xi2 = xi**2
    weights = xi2.T @ (alpha[:, None] ** 2 * xi2)  # [i, j] = sum_n alpha_n^2 xi_ni^2 xi_nj^2
    total = weights[1:, 1:].sum()
    if total <= 0:
        raise DomainError("heralding event has zero probability")
    comps = []
    for i in range(1, n_max + 1):
        for j in range(1, n_max + 1):
            if weights[i, j] <= component_tol * total:
                continue
            n0 = max(i, j)
            amps = alpha[n0:] * xi[n0:, i] * xi[n0:, j]
            comps.append(MixtureComponent(i, j, amps))
    norm = sum(c.weight for c in comps)
    return TwoModeFockMixture(tuple(comps), norm, trunc)


def to_density_matrix(state) -> DensityMatrixFock:
    """Dense density matrix of a Schmidt state or a component mixture."""
    if isinstance(state, DensityMatrixFock):
        return state
    if isinstance(state, SchmidtDiagonalState):
        d = state.dim
        psi = np.zeros(d * d)
        psi[np.arange(d) * (d + 1)] = state.coeffs
        rho = np.outer(psi, psi) / state.norm_sq
        return DensityMatrixFock(rho, d, d)
    if isinstance(state, TwoModeFockMixture):
        d = state.dim
        vecs = np.zeros((len(state.components), d * d))
        for row, c in enumerate(state.components):
            n = np.arange(c.n0, c.n0 + c.amps.size)
            vecs[row, (n - c.i) * d + (n - c.j)] = c.amps
        return DensityMatrixFock(vecs.T @ vecs / state.norm, d, d)
    raise TypeError(f"cannot build a density matrix from {type(state).__name__}")


def _tap_unitary(spec: BeamSplitterSpec, d: int) -> np.ndarray:
    """``exp(theta (a^dag c - a c^dag))`` on two modes truncated at ``d`` levels each.

    The generator conserves total photon number, so the result is exact on
    every input with at most ``d - 1`` photons in total.
    """
    a = np.diag(np.sqrt(np.arange(1, d)), 1)
    gen = np.kron(a.T, a) - np.kron(a, a.T)
    return scipy.linalg.expm(spec.theta * gen)


def four_mode_tap_oracle(
    lam: float, spec: BeamSplitterSpec, trunc: TruncationSpec | None, det: DetectorModel
) -> tuple[DensityMatrixFock, float]:
    """Brute-force conditional state after tapping both beams and detecting.

    Builds ``|psi>_ABCD`` on the full four-mode tensor product, applies the
    detector POVM to C and D, traces them out and normalizes. Returns the
    state on A, B and the (truncated) heralding probability.
    """
    _check_lambda(lam)
    if not 0 <= spec.T <= 1:
        raise DomainError(f"transmittance out of range: {spec.T}")
    trunc = trunc or TruncationSpec.for_lambda(lam)
    d = trunc.n_max + 1
    u = _tap_unitary(spec, d).reshape(d, d, d, d)[:, :, :, 0]  # [a, c, a_in], tap port in vacuum
    alpha = squeezed_amplitudes(lam, trunc.n_max)
    # psi[a, b, c, d'] = sum_n alpha_n U[a, c, n] U[b, d', n]
    psi = np.einsum("n,acn,bdn->abcd", alpha, u, u)
    if isinstance(det, PNR):
        k = det.count
        kets = psi[:, :, k, k].reshape(1, d * d)
    elif isinstance(det, OnOff):
        kets = psi[:, :, 1:, 1:].reshape(d * d, -1).T
    else:
        raise TypeError(f"unknown detector model {det!r}")
    p_det = float(np.sum(np.abs(kets) ** 2))
    if p_det <= 0:
        raise DomainError("heralding event has zero probability")
    rho = kets.T @ kets.conj() / p_det
    return DensityMatrixFock(rho, d, d), p_det


def make_qubit_state(q: QubitEntangledState, flipped: bool = False) -> DensityMatrixFock:
    """Mixture of an entangled photon-number qubit pair with its dephased diagonal.

    Unflipped: ``|xi> = c0|0,1> + c1|1,0>``; flipped: ``c0|0,0> + c1|1,1>``.
    """
    c0 = q.c0_abs
    c1 = q.c1_abs * np.exp(1j * q.phi)
    lo, hi = (0, 3) if flipped else (1, 2)  # flat indices of |0,x> and |1,y>
    ket = np.zeros(4, dtype=complex)
    ket[lo], ket[hi] = c0, c1
    rho = q.t * np.outer(ket, ket.conj())
    rho[lo, lo] += (1 - q.t) * c0**2
    rho[hi, hi] += (1 - q.t) * q.c1_abs**2
    return DensityMatrixFock(rho, 2, 2)


def local_flip(rho: DensityMatrixFock, mode: str = "B") -> DensityMatrixFock:
    """Swap Fock levels 0 and 1 on one mode; the support there must lie in ``{0, 1}``."""
    if mode not in ("A", "B"):
        raise DomainError(f"mode must be 'A' or 'B', got {mode!r}")
    t = rho.tensor()
    axis_dim = rho.dim_a if mode == "A" else rho.dim_b
    if axis_dim < 2:
        raise DomainError("flipped mode needs at least two levels")
    if mode == "A":
        outside = np.abs(t[2:]).sum() + np.abs(t[:, :, 2:]).sum()
    else:
        outside = np.abs(t[:, 2:]).sum() + np.abs(t[:, :, :, 2:]).sum()
    if outside > 1e-14:
        raise DomainError(f"mode {mode} has support outside levels {{0, 1}}")
    perm = np.arange(axis_dim)
    perm[[0, 1]] = [1, 0]
    if mode == "A":
        out = t[perm][:, :, perm]
    else:
        out = t[:, perm][:, :, :, perm]
    n = rho.dim_a * rho.dim_b
    return DensityMatrixFock(out.reshape(n, n), rho.dim_a, rho.dim_b)
