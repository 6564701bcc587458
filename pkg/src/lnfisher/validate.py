"""Self-check suite behind ``lnfisher validate``.

Each check compares a pipeline result with an independent route (four-mode
brute force, closed forms, erf oracle, matrix exponential). ``inject`` lets
tests corrupt one ingredient to prove the corresponding check can fail.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg
from scipy.special import erf

from .bell import IntegratorConfig, channel_matrix, fisher_information
from .fock import BeamSplitterSpec, TruncationSpec, displacement_matrix
from .negativity import closed_form_en, lambda_threshold_bisect, lambda_threshold_pure, log_negativity
from .relations import closed_form_fisher
from .states import (
    OnOff,
    PNR,
    four_mode_tap_oracle,
    make_photon_subtracted_mixed,
    make_photon_subtracted_pure,
    make_squeezed,
    onoff_detection_probability,
    to_density_matrix,
)

INJECTIONS = ("wrong-ln2", "small-L")


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def _oracle_pnr(lam, T):
    spec = BeamSplitterSpec(T)
    trunc = TruncationSpec.for_lambda(lam)
    rho, p = four_mode_tap_oracle(lam, spec, trunc, PNR(1))
    state, _ = make_photon_subtracted_pure(lam, spec, trunc)
    diff = np.abs(to_density_matrix(state).embed(rho.dim_a, rho.dim_b).matrix - rho.matrix).max()
    ok = diff <= 1e-10
    return ok, f"max |drho| = {diff:.2e}"


def _oracle_onoff(lam, T):
    spec = BeamSplitterSpec(T)
    trunc = TruncationSpec.for_lambda(lam)
    rho, p = four_mode_tap_oracle(lam, spec, trunc, OnOff())
    mix = make_photon_subtracted_mixed(lam, spec, trunc, component_tol=0.0)
    diff = np.abs(to_density_matrix(mix).embed(rho.dim_a, rho.dim_b).matrix - rho.matrix).max()
    rel = abs(p - onoff_detection_probability(lam, T)) / p
    return diff <= 1e-10 and rel <= 1e-10, f"max |drho| = {diff:.2e}, P_det rel = {rel:.2e}"


def _ln_sq(lam):
    state = make_squeezed(lam, TruncationSpec.for_lambda(lam, 1e-18))
    got = log_negativity(to_density_matrix(state)).value
    want = closed_form_en("SQ", lam)
    return abs(got - want) <= 1e-6, f"{got:.9f} vs {want:.9f}"


def _ln_ng(lam, T):
    state, _ = make_photon_subtracted_pure(lam, BeamSplitterSpec(T), TruncationSpec.for_lambda(lam, 1e-18))
    got = log_negativity(state).value
    want = closed_form_en("NG", lam, T)
    return abs(got - want) <= 1e-6, f"{got:.9f} vs {want:.9f}"


def _threshold(T):
    a, b = lambda_threshold_pure(T), lambda_threshold_bisect(T)
    return abs(a - b) <= 1e-10, f"{a:.12f} vs {b:.12f}"


def _fisher(kind, lam, T, units):
    if kind == "SQ":
        state = make_squeezed(lam)
    else:
        state, _ = make_photon_subtracted_pure(lam, BeamSplitterSpec(T))
    got = fisher_information(state, units=units)
    want = closed_form_fisher(kind, lam, T)
    rel = abs(got - want) / want
    return rel <= 1e-4, f"{got:.6f} vs {want:.6f} (rel {rel:.1e})"


def _mass(icfg):
    states = {
        "SQ": make_squeezed(0.6),
        "NG-pure": make_photon_subtracted_pure(0.6, BeamSplitterSpec(0.9))[0],
        "NG-mixed": make_photon_subtracted_mixed(0.6, BeamSplitterSpec(0.8)),
    }
    worst = 0.0
    for state in states.values():
        for beta in (0.0, 0.5):
            cm = channel_matrix(state, beta, icfg)
            worst = max(worst, float(np.abs(cm.mass - 1).max()))
    return worst <= 1e-8, f"max |mass - 1| = {worst:.2e}"


def _erf_channel():
    lam, beta = 0.4, 0.1
    # probability errors scale like sqrt(tail weight); tighten the cutoff
    cm = channel_matrix(make_squeezed(lam, TruncationSpec.for_lambda(lam, 1e-22)), beta)
    s = (1 + lam) / (1 - lam)
    g = 0.5 * (1 + erf(math.sqrt(s) * beta))
    want = np.array([g * g, g * (1 - g), (1 - g) ** 2, g * (1 - g)])
    diff = np.abs(cm.p[0] - want).max()
    return diff <= 1e-9, f"max |dP| = {diff:.2e}"


def _displacement():
    n = 60
    a = np.diag(np.sqrt(np.arange(1, n)), 1)
    worst = 0.0
    for alpha in (0.3 + 0.4j, -1.2 + 0.9j, 2.0):
        ref = scipy.linalg.expm(alpha * a.T - np.conj(alpha) * a)[:11, :11]
        worst = max(worst, float(np.abs(displacement_matrix(alpha, 11) - ref).max()))
    return worst <= 1e-9, f"max |dD| = {worst:.2e}"


def run_checks(inject: frozenset[str] | set[str] = frozenset()) -> list[CheckResult]:
    """Run every check; exceptions count as failures with their message."""
    unknown = set(inject) - set(INJECTIONS)
    if unknown:
        raise ValueError(f"unknown injections {sorted(unknown)}")
    units = "nats" if "wrong-ln2" in inject else "bits"
    icfg = IntegratorConfig(half_width=1.0) if "small-L" in inject else IntegratorConfig()
    checks = [
        ("displacement-vs-expm", _displacement),
        ("oracle-pnr-0.4-0.9", lambda: _oracle_pnr(0.4, 0.9)),
        ("oracle-onoff-0.4-0.9", lambda: _oracle_onoff(0.4, 0.9)),
        ("ln-sq-0.4", lambda: _ln_sq(0.4)),
        ("ln-ng-0.4-0.9", lambda: _ln_ng(0.4, 0.9)),
        ("threshold-0.9", lambda: _threshold(0.9)),
        ("channel-erf-0.4", _erf_channel),
        ("fisher-sq-closed-form", lambda: _fisher("SQ", 0.4, 1.0, units)),
        ("fisher-ng-closed-form", lambda: _fisher("NG", 0.4, 0.9, units)),
        ("bell-mass", lambda: _mass(icfg)),
    ]
    results = []
    for name, fn in checks:
        try:
            ok, detail = fn()
        except Exception as exc:  # a crashing check is a failed check
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        results.append(CheckResult(name, bool(ok), detail))
    return results
