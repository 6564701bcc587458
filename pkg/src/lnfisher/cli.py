"""Command-line front end.

    lnfisher point --lambda 0.4 --transmittance 0.9 --kind ng-mixed
    lnfisher sweep-mixed --lambda-start 0.1 --lambda-stop 0.8 --lambda-count 8 \\
        --transmittance 0.7 --transmittance 0.9 --out fig4.csv
    lnfisher qubit --t 0.8 --c0 0.6
    lnfisher validate

Exit codes: 0 success, 1 validation failure, 2 domain error, 3 numeric error.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import logging
import math
import sys
from dataclasses import dataclass

import numpy as np

from .bell import DerivativeConfig, IntegratorConfig, channel_matrix, fisher_information, mutual_information
from .errors import DomainError, NumericError
from .fock import BeamSplitterSpec, TruncationSpec
from .negativity import closed_form_en, log_negativity
from .qubit import averaged_qubit_fisher, flipped_fisher, ln_qubit
from .relations import (
    SWEEP_COLUMNS,
    closed_form_fisher,
    correlation_sweep,
    en_from_fisher,
    f_factor,
)
from .states import (
    QubitEntangledState,
    make_photon_subtracted_mixed,
    make_photon_subtracted_pure,
    make_squeezed,
    make_qubit_state,
    onoff_detection_probability,
    pnr_detection_probability,
)
from .validate import INJECTIONS, run_checks

log = logging.getLogger(__name__)

COMMANDS = ("point", "sweep-pure", "sweep-mixed", "qubit", "validate")
EXIT_OK, EXIT_VALIDATION, EXIT_DOMAIN, EXIT_NUMERIC = 0, 1, 2, 3


@dataclass(frozen=True)
class RunConfig:
    command: str
    lam: float = 0.4
    lambda_start: float = 0.1
    lambda_stop: float = 0.8
    lambda_count: int = 8
    transmittance: tuple[float, ...] = (0.9,)
    kind: str = "sq"
    beta: float | None = None
    n_max: int | None = None
    tail_tol: float = 1e-12
    component_tol: float = 1e-10
    quad_points: int = 160
    half_width: float | None = None
    deriv_step: float = 1e-3
    t: float = 1.0
    c0: float = 1 / math.sqrt(2)
    phi_points: int = 32
    out: str | None = None
    format: str = "csv"
    jobs: int = 1

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise DomainError(f"unknown command {self.command!r}")
        if self.kind not in ("sq", "ng-pure", "ng-mixed"):
            raise DomainError(f"unknown kind {self.kind!r}")
        if self.format not in ("csv", "json"):
            raise DomainError(f"unknown format {self.format!r}")
        if self.lambda_count < 0:
            raise DomainError("lambda-count must be nonnegative")
        object.__setattr__(self, "transmittance", tuple(float(x) for x in self.transmittance))

    def lambdas(self) -> np.ndarray:
        return np.linspace(self.lambda_start, self.lambda_stop, self.lambda_count)

    def integrator(self) -> IntegratorConfig:
        return IntegratorConfig(points=self.quad_points, half_width=self.half_width)

    def derivative(self) -> DerivativeConfig:
        return DerivativeConfig(step=self.deriv_step)

    def truncation(self, lam: float) -> TruncationSpec:
        if self.n_max:
            return TruncationSpec(self.n_max, self.tail_tol)
        return TruncationSpec.for_lambda(lam, self.tail_tol)

    def to_argv(self) -> list[str]:
        """Canonical flag list; ``parse_config(cfg.to_argv()) == cfg``."""
        argv = [self.command]
        defaults = RunConfig(self.command)
        for f in dataclasses.fields(self):
            if f.name == "command":
                continue
            value = getattr(self, f.name)
            if value == getattr(defaults, f.name):
                continue
            flag = _FLAG_NAMES[f.name]
            if f.name == "transmittance":
                for v in value:
                    argv += [flag, repr(v)]
            else:
                argv += [flag, repr(value) if isinstance(value, float) else str(value)]
        return argv


_FLAG_NAMES = {
    "lam": "--lambda",
    "lambda_start": "--lambda-start",
    "lambda_stop": "--lambda-stop",
    "lambda_count": "--lambda-count",
    "transmittance": "--transmittance",
    "kind": "--kind",
    "beta": "--beta",
    "n_max": "--n-max",
    "tail_tol": "--tail-tol",
    "component_tol": "--component-tol",
    "quad_points": "--quad-points",
    "half_width": "--half-width",
    "deriv_step": "--deriv-step",
    "t": "--t",
    "c0": "--c0",
    "phi_points": "--phi-points",
    "out": "--out",
    "format": "--format",
    "jobs": "--jobs",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lnfisher",
        description="Logarithmic negativity vs. Fisher information of entanglement-assisted QPSK coding.",
    )
    parser.add_argument("command", choices=COMMANDS)
    # SUPPRESS keeps unset flags out of the namespace so a config file can fill them
    s = argparse.SUPPRESS
    parser.add_argument("--config", default=s, help="JSON file with RunConfig fields; flags override it")
    parser.add_argument("--lambda", dest="lam", type=float, default=s, help="squeezing parameter tanh(r)")
    parser.add_argument("--lambda-start", type=float, default=s)
    parser.add_argument("--lambda-stop", type=float, default=s)
    parser.add_argument("--lambda-count", type=int, default=s)
    parser.add_argument("--transmittance", type=float, action="append", default=s,
                        help="tap transmittance T (repeatable)")
    parser.add_argument("--kind", choices=("sq", "ng-pure", "ng-mixed"), default=s)
    parser.add_argument("--beta", type=float, default=s, help="signal amplitude for a mutual-information report")
    parser.add_argument("--n-max", type=int, default=s)
    parser.add_argument("--tail-tol", type=float, default=s)
    parser.add_argument("--component-tol", type=float, default=s)
    parser.add_argument("--quad-points", type=int, default=s)
    parser.add_argument("--half-width", type=float, default=s, help="fixed quadrant half width L")
    parser.add_argument("--deriv-step", type=float, default=s)
    parser.add_argument("--t", type=float, default=s, help="qubit mixedness")
    parser.add_argument("--c0", type=float, default=s, help="qubit |c0|")
    parser.add_argument("--phi-points", type=int, default=s)
    parser.add_argument("--out", default=s)
    parser.add_argument("--format", choices=("csv", "json"), default=s)
    parser.add_argument("--jobs", type=int, default=s)
    parser.add_argument("--print-config", action="store_true", help="echo the canonical flags and exit")
    parser.add_argument("--inject", action="append", choices=INJECTIONS, default=[], help=argparse.SUPPRESS)
    parser.add_argument("-v", "--verbose", action="store_true")
    return parser


def parse_config(argv) -> RunConfig:
    return _parse(argv)[0]


def _parse(argv):
    ns = vars(build_parser().parse_args(argv))
    extras = {k: ns.pop(k) for k in ("print_config", "inject", "verbose")}
    values = {}
    if "config" in ns:
        with open(ns.pop("config"), encoding="utf-8") as fh:
            values.update(json.load(fh))
    values.update(ns)
    if "transmittance" in values:
        values["transmittance"] = tuple(values["transmittance"])
    return RunConfig(**values), extras


def _fmt(value) -> str:
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return "nan"
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.9g}"
    return str(value)


def _json_value(value):
    if isinstance(value, (float, np.floating)):
        return None if math.isnan(value) else float(f"{float(value):.9g}")
    return value


def render_rows(rows: list[dict], fmt: str) -> str:
    if fmt == "json":
        return json.dumps([{k: _json_value(r[k]) for k in SWEEP_COLUMNS} for r in rows], indent=2) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SWEEP_COLUMNS)
    for r in rows:
        writer.writerow([_fmt(r[k]) for k in SWEEP_COLUMNS])
    return buf.getvalue()


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_point(cfg: RunConfig) -> dict:
    """Single-point report for one state kind."""
    lam = cfg.lam
    T = cfg.transmittance[0]
    trunc = cfg.truncation(lam)
    report = {"kind": cfg.kind, "lambda": lam}
    if cfg.kind == "sq":
        state = make_squeezed(lam, trunc)
        closed_j, closed_en, f, p_det = closed_form_fisher("SQ", lam), closed_form_en("SQ", lam), 1.0, 1.0
    elif cfg.kind == "ng-pure":
        state, p_det = make_photon_subtracted_pure(lam, BeamSplitterSpec(T), trunc)
        closed_j, closed_en, f = closed_form_fisher("NG", lam, T), closed_form_en("NG", lam, T), f_factor(lam * T)
    else:
        state = make_photon_subtracted_mixed(lam, BeamSplitterSpec(T), trunc, cfg.component_tol)
        closed_j = closed_en = None
        f = 1.0
        p_det = onoff_detection_probability(lam, T)
    if cfg.kind != "sq":
        report.update(T=T, lambdaT=lam * T)
    J = fisher_information(state, cfg.derivative(), cfg.integrator())
    en = log_negativity(state).value
    pred = en_from_fisher(J, f)
    report.update(
        J0=J,
        J0_closed=closed_j,
        EN=en,
        EN_closed=closed_en,
        f=f,
        EN_pred=pred,
        rel_err=abs(en - pred) / en if en > 0 else abs(en - pred),
        P_det=p_det,
    )
    if cfg.beta is not None:
        cm = channel_matrix(state, cfg.beta, cfg.integrator())
        mi = mutual_information(cm)
        report.update(beta=cfg.beta, mutual_information=mi)
    return report


def cmd_sweep(cfg: RunConfig) -> list[dict]:
    kind = "pure" if cfg.command == "sweep-pure" else "mixed"
    return correlation_sweep(
        kind,
        cfg.lambdas(),
        cfg.transmittance,
        jobs=cfg.jobs,
        dcfg=cfg.derivative(),
        icfg=cfg.integrator(),
        tail_tol=cfg.tail_tol,
        component_tol=cfg.component_tol,
        n_max=cfg.n_max,
    )


def cmd_qubit(cfg: RunConfig) -> dict:
    q = QubitEntangledState(cfg.c0, 0.0, cfg.t)
    res = averaged_qubit_fisher(q, cfg.phi_points, cfg.derivative(), cfg.integrator())
    return {
        "t": q.t,
        "c0": q.c0_abs,
        "product": q.product,
        "EN_closed": ln_qubit(q),
        "EN": log_negativity(make_qubit_state(q)).value,
        "J0_avg": res.j_avg,
        "J0_avg_flip_decoded": flipped_fisher(q, cfg.phi_points, cfg.derivative(), cfg.integrator()),
    }


def cmd_validate(inject=()) -> tuple[list, int]:
    results = run_checks(frozenset(inject))
    return results, EXIT_OK if all(r.passed for r in results) else EXIT_VALIDATION


def _print_report(report: dict, fmt: str, out: str | None) -> None:
    if fmt == "json":
        _emit(json.dumps({k: _json_value(v) for k, v in report.items()}, indent=2) + "\n", out)
    else:
        _emit("".join(f"{k}: {_fmt(v) if v is not None else '-'}\n" for k, v in report.items()), out)


def main(argv=None) -> int:
    try:
        cfg, extras = _parse(argv)
    except (DomainError, TypeError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    logging.basicConfig(level=logging.INFO if extras["verbose"] else logging.ERROR, format="%(levelname)s %(message)s")
    if extras["print_config"]:
        print(" ".join(cfg.to_argv()))
        return EXIT_OK
    try:
        if cfg.command == "point":
            _print_report(cmd_point(cfg), cfg.format, cfg.out)
        elif cfg.command == "qubit":
            _print_report(cmd_qubit(cfg), cfg.format, cfg.out)
        elif cfg.command == "validate":
            results, code = cmd_validate(extras["inject"])
            if cfg.format == "json":
                text = json.dumps([dataclasses.asdict(r) for r in results], indent=2) + "\n"
            else:
                text = "".join(f"{'PASS' if r.passed else 'FAIL'} {r.name}: {r.detail}\n" for r in results)
            _emit(text, cfg.out)
            return code
        else:
            rows = cmd_sweep(cfg)
            _emit(render_rows(rows, cfg.format), cfg.out)
            errors = [r["error"] for r in rows if r["error"]]
            if errors:
                return EXIT_DOMAIN if all(e.startswith("DomainError") for e in errors) else EXIT_NUMERIC
    except DomainError as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except (NumericError, ArithmeticError) as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
