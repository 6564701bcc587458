"""Fisher information of photon-number qubit pairs in the QPSK channel.

The outcome density of ``rho_qubit`` depends on the coherence only through
``t |c0| |c1|`` and the phase ``phi``; averaging the Fisher information over
``phi`` leaves a function of the product alone. The flipped family
``c0|0,0> + c1|1,1>`` needs a local ``0 <-> 1`` flip on B before decoding to
recover the same curve.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .bell import DerivativeConfig, IntegratorConfig, fisher_information
from .errors import DomainError
from .states import QubitEntangledState, local_flip, make_qubit_state


@dataclass(frozen=True)
class QubitFisherResult:
    j_phi: list[tuple[float, float]]
    j_avg: float
    product: float


def qubit_fisher(
    q: QubitEntangledState,
    phi: float | None = None,
    dcfg: DerivativeConfig | None = None,
    icfg: IntegratorConfig | None = None,
    flipped: bool = False,
    decode_flip: bool = False,
) -> float:
    """``J0`` for one phase; ``phi`` overrides ``q.phi`` when given.

    ``flipped`` selects the ``|0,0>, |1,1>`` family; ``decode_flip`` applies
    the local flip on mode B before the Bell measurement.
    """
    if phi is not None:
        q = replace(q, phi=phi)
    rho = make_qubit_state(q, flipped=flipped)
    if decode_flip:
        rho = local_flip(rho, "B")
    return fisher_information(rho, dcfg, icfg)


def averaged_qubit_fisher(
    q: QubitEntangledState,
    n_phi: int = 32,
    dcfg: DerivativeConfig | None = None,
    icfg: IntegratorConfig | None = None,
    flipped: bool = False,
    decode_flip: bool = False,
) -> QubitFisherResult:
    """Average of ``J0(phi)`` over a uniform periodic grid (trapezoid rule)."""
    if n_phi < 8:
        raise DomainError(f"n_phi must be at least 8, got {n_phi}")
    phis = 2 * math.pi * np.arange(n_phi) / n_phi
    values = [(float(p), qubit_fisher(q, p, dcfg, icfg, flipped, decode_flip)) for p in phis]
    j_avg = float(np.mean([v for _, v in values]))
    return QubitFisherResult(values, j_avg, q.product)


def ln_qubit(q: QubitEntangledState) -> float:
    return math.log2(1 + 2 * q.product)


def flipped_fisher(
    q: QubitEntangledState,
    n_phi: int = 32,
    dcfg: DerivativeConfig | None = None,
    icfg: IntegratorConfig | None = None,
) -> float:
    """Phase-averaged ``J0`` of the flipped family decoded after a local flip."""
    return averaged_qubit_fisher(q, n_phi, dcfg, icfg, flipped=True, decode_flip=True).j_avg
