"""Closed-form Fisher informations and their link to the log-negativity.

For the squeezed state ``E_N = log2(FISHER_SCALE * J0)`` exactly; for the
PNR-subtracted state the same holds after multiplying by ``f(lam T)``, a
factor that stays near one. ``correlation_sweep`` tabulates both sides over
parameter grids (pure states from closed forms, on/off mixtures fully
numerically).
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .bell import FISHER_SCALE, LN2, DerivativeConfig, IntegratorConfig, fisher_information
from .errors import DomainError
from .fock import BeamSplitterSpec, TruncationSpec
from .negativity import closed_form_en, log_negativity
from .states import (
    make_photon_subtracted_mixed,
    make_photon_subtracted_pure,
    make_squeezed,
    onoff_detection_probability,
    pnr_detection_probability,
)

log = logging.getLogger(__name__)

SWEEP_COLUMNS = ("lambda", "T", "lambdaT", "J0", "EN", "EN_pred", "f", "rel_err", "P_det", "error")


def closed_form_fisher(kind: str, lam: float, T: float = 1.0) -> float:
    kind = kind.upper()
    if not 0 <= lam < 1:
        raise DomainError(f"lambda must lie in [0, 1), got {lam!r}")
    if kind == "SQ":
        return 8 / (math.pi * LN2) * (1 + lam) / (1 - lam)
    if kind == "NG":
        x = lam * T
        if not 0 < T <= 1:
            raise DomainError(f"transmittance must lie in (0, 1], got {T!r}")
        if x >= 1:
            raise DomainError("lambda*T >= 1: Fisher information diverges")
        poly = 3 * x * x + 4 * x + 4
        return poly**2 / (2 * math.pi * LN2 * (1 + x * x) ** 2) * (1 + x) / (1 - x)
    raise DomainError(f"unknown state kind {kind!r}")


def f_factor(lam_t: float) -> float:
    """Correction linking the subtracted-state Fisher information to its negativity."""
    if not 0 <= lam_t < 1:
        raise DomainError(f"lambda*T must lie in [0, 1), got {lam_t!r}")
    x = lam_t
    return 16 * (1 + x) ** 2 * (1 + x * x) / (3 * x * x + 4 * x + 4) ** 2


def en_from_fisher(J: float, f: float = 1.0) -> float:
    """Negativity predicted from a Fisher information; ``f = 1`` is the squeezed-state relation."""
    if J <= 0 or f <= 0:
        raise DomainError("J and f must be positive")
    return math.log2(f * FISHER_SCALE * J)


def _relative_error(en: float, pred: float) -> float:
    return abs(en - pred) / en if en > 0 else abs(en - pred)


def sweep_row(
    kind: str,
    lam: float,
    T: float,
    dcfg: DerivativeConfig | None = None,
    icfg: IntegratorConfig | None = None,
    tail_tol: float = 1e-12,
    component_tol: float = 1e-10,
    n_max: int | None = None,
    numeric: bool = False,
) -> dict:
    """One correlation-table row. Domain and numeric failures land in ``error``."""
    row = dict.fromkeys(SWEEP_COLUMNS, math.nan)
    row.update({"lambda": lam, "T": T, "lambdaT": lam * T, "error": ""})
    try:
        trunc = TruncationSpec(n_max, tail_tol) if n_max else TruncationSpec.for_lambda(lam, tail_tol)
        if kind == "sq":
            row["lambdaT"] = lam
            en = closed_form_en("SQ", lam)
            J = fisher_information(make_squeezed(lam, trunc), dcfg, icfg) if numeric else closed_form_fisher("SQ", lam)
            f = 1.0
            p_det = 1.0
        elif kind == "pure":
            if lam == 0:
                raise DomainError("photon subtraction from vacuum: detection probability is zero")
            en = closed_form_en("NG", lam, T)
            if numeric:
                state, _ = make_photon_subtracted_pure(lam, BeamSplitterSpec(T), trunc)
                J = fisher_information(state, dcfg, icfg)
            else:
                J = closed_form_fisher("NG", lam, T)
            f = f_factor(lam * T)
            p_det = pnr_detection_probability(lam, T)
        elif kind == "mixed":
            mix = make_photon_subtracted_mixed(lam, BeamSplitterSpec(T), trunc, component_tol)
            en = log_negativity(mix).value
            J = fisher_information(mix, dcfg, icfg)
            f = 1.0
            p_det = onoff_detection_probability(lam, T)
        else:
            raise DomainError(f"unknown sweep kind {kind!r}")
        pred = en_from_fisher(J, f)
        row.update(J0=J, EN=en, EN_pred=pred, f=f, rel_err=_relative_error(en, pred), P_det=p_det)
    except (DomainError, ArithmeticError) as exc:
        log.warning("row lambda=%g T=%g failed: %s", lam, T, exc)
        row["error"] = f"{type(exc).__name__}: {exc}"
    return row


def _row_star(args):
    return sweep_row(*args[0], **args[1])


def correlation_sweep(kind: str, lambdas, Ts, jobs: int = 1, **kwargs) -> list[dict]:
    """Rows for every ``(lambda, T)`` pair in grid order.

    ``kind`` is ``"sq"``, ``"pure"`` or ``"mixed"``; for ``"sq"`` the
    transmittance list is ignored. Rows are computed in a process pool when
    ``jobs > 1`` but always returned in grid order.
    """
    Ts = [1.0] if kind == "sq" else list(Ts)
    tasks = [((kind, float(lam), float(T)), kwargs) for T in Ts for lam in lambdas]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_row_star, tasks))
    return [_row_star(t) for t in tasks]


def default_lambda_grid(T: float, lam_t_max: float = 0.8, step: float = 0.1) -> np.ndarray:
    """``lambda = step, 2 step, ...`` kept while ``lambda T <= lam_t_max`` and ``lambda < 1``."""
    lams = np.round(np.arange(1, int(1 / step)) * step, 10)
    return lams[lams * T <= lam_t_max + 1e-12]
