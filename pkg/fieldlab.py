#!/usr/bin/env python3
"""
Finsler weak-field lab - command-line experiment runner

Turns the lab's operations into reproducible CSV/JSON artifacts.
Exit codes: 0 success, 1 verification or solver failure, 2 usage/config error.
"""

import argparse
import csv
import io
import json
import sys
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
import yaml

from analytic_field import COVECTOR_FAMILIES, covector_family
from config import config
from errors import DomainError, FieldLabError
from logger import FieldLogger, log_artifact, log_execution
from scalar_field import RadialProblem, energy_density_t00, radial_profile, strict_radial_phi, weak_radial
from seeding import sample_points
from two_field import MODES, superposition_defect, traveling_pulses
from variational_solver import ActionProblem, QuadraticDensity, StrictRadialDensity, solve_stationary
from vector_field import lorenz_gauge_residual, maxwell_residual, scalar_la
from verify_suites import IdentityVerifier, h4_family_residuals

logger = FieldLogger.get_logger("fieldlab")

PULSE_LENGTH = 20.0

# defaults <- YAML run file <- command-line flags
DEFAULTS: Dict[str, Dict[str, Any]] = {
    "verify": {"samples": 1000, "format": "csv"},
    "radial": {"sign": "upper", "c0": 0.0, "c1": 1.0, "rmin": 1.0, "rmax": 100.0, "nodes": 512, "format": "csv"},
    "twofield": {"amp": [0.2, 0.1, 0.05], "steps": 100, "grid": 200, "mode": "strict", "format": "csv"},
    "h4": {"samples": 1000, "format": "json"},
    "solve-radial": {
        "sign": "upper", "c0": 0.0, "c1": 1.0, "rmin": 1.0, "rmax": 10.0, "nodes": 201, "mode": "strict",
        "format": "csv",
    },
    "maxwell": {"field": "null-wave", "samples": 10, "format": "csv"},
}


class Table:
    """Rows under a fixed header, serialized as CSV or as JSON records"""

    def __init__(self, header: Sequence[str], rows: List[Sequence[Any]]):
        self.header = list(header)
        self.rows = [list(row) for row in rows]

    def to_csv(self) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(self.header)
        writer.writerows([[_cell(value) for value in row] for row in self.rows])
        return buffer.getvalue()

    def to_records(self) -> List[Dict[str, Any]]:
        return [dict(zip(self.header, row)) for row in self.rows]


def _cell(value: Any) -> Any:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return value


def _to_json(data: Any) -> str:
    return json.dumps(data, sort_keys=True, indent=2) + "\n"


def _seed(value: Any) -> int:
    if isinstance(value, int):
        return value
    return int(str(value), 0)


def emit(text: str, out: Optional[str]):
    """Write an artifact to ``out`` or stdout"""
    if out:
        with open(out, "w", encoding="utf-8", newline="") as f:
            f.write(text)
        log_artifact(out, len(text.encode("utf-8")))
    else:
        sys.stdout.write(text)


def render(table: Table, fmt: str) -> str:
    if fmt == "json":
        return _to_json(table.to_records())
    return table.to_csv()


def _positive(params: Dict[str, Any], key: str):
    if int(params[key]) < 1:
        raise DomainError(f"--{key} must be at least 1, got {params[key]}")


# commands

@log_execution
def cmd_verify(params: Dict[str, Any]) -> int:
    _positive(params, "samples")
    verifier = IdentityVerifier(samples=int(params["samples"]), seed=params["seed"])
    success = verifier.run_all_checks()
    report = verifier.generate_report()
    if params["format"] == "json":
        text = _to_json(report)
    else:
        rows = [[r["suite"], r["residual"], r["threshold"], r["pass"]] for r in report]
        text = Table(["suite", "residual", "threshold", "pass"], rows).to_csv()
    emit(text, params["out"])
    return 0 if success else 1


def _radial_problem(params: Dict[str, Any]) -> RadialProblem:
    return RadialProblem.from_sign_name(
        params["sign"], float(params["c0"]), float(params["c1"]), float(params["rmin"]), float(params["rmax"])
    )


@log_execution
def cmd_radial(params: Dict[str, Any]) -> int:
    _positive(params, "nodes")
    p = _radial_problem(params)
    nodes = int(params["nodes"])
    weak = radial_profile(p, nodes, strict=False)
    strict = radial_profile(p, nodes, strict=True)
    rows = [
        [r, pw, dw, ps, ds, energy_density_t00(p, r)]
        for r, pw, dw, ps, ds in zip(
            weak.r.tolist(), weak.phi.tolist(), weak.dphi.tolist(), strict.phi.tolist(), strict.dphi.tolist()
        )
    ]
    table = Table(["r", "phi_weak", "dphi_weak", "phi_strict", "dphi_strict", "t00"], rows)
    emit(render(table, params["format"]), params["out"])
    return 0


@log_execution
def cmd_twofield(params: Dict[str, Any]) -> int:
    if params["mode"] not in MODES:
        raise DomainError(f"--mode must be one of {MODES}, got {params['mode']!r}")
    _positive(params, "grid")
    grid, steps = int(params["grid"]), int(params["steps"])
    dt = config.CFL_LIMIT * PULSE_LENGTH / grid
    rows = []
    for amplitude in params["amp"]:
        amplitude = float(amplitude)
        a = traveling_pulses(amplitude, 0.0, length=PULSE_LENGTH, cells=grid, dt=dt)
        b = traveling_pulses(0.0, amplitude, length=PULSE_LENGTH, cells=grid, dt=dt)
        rows.append([amplitude, superposition_defect(a, b, steps, mode=params["mode"])])
    emit(render(Table(["amplitude", "defect"], rows), params["format"]), params["out"])
    return 0


@log_execution
def cmd_h4(params: Dict[str, Any]) -> int:
    _positive(params, "samples")
    residuals = h4_family_residuals(int(params["samples"]), params["seed"])
    if params["format"] == "json":
        text = _to_json(residuals)
    else:
        text = Table(["family", "residual"], sorted(residuals.items())).to_csv()
    emit(text, params["out"])
    return 0


@log_execution
def cmd_solve_radial(params: Dict[str, Any]) -> int:
    _positive(params, "nodes")
    p = _radial_problem(params)
    grid = np.linspace(p.r_min, p.r_max, int(params["nodes"]))
    if params["mode"] == "linear":
        density = QuadraticDensity()
        reference = [weak_radial(p, float(r))[0] for r in grid]
    elif params["mode"] == "strict":
        density = StrictRadialDensity(p.sign)
        reference = [strict_radial_phi(p, float(r)) for r in grid]
    else:
        raise DomainError(f"--mode must be one of {MODES}, got {params['mode']!r}")
    problem = ActionProblem(grid, density, reference[0], reference[-1])
    phi = solve_stationary(problem)
    rows = [[r, value, ref] for r, value, ref in zip(grid.tolist(), phi.tolist(), reference)]
    emit(render(Table(["r", "phi_discrete", "phi_reference"], rows), params["format"]), params["out"])
    return 0


@log_execution
def cmd_maxwell(params: Dict[str, Any]) -> int:
    _positive(params, "samples")
    A = covector_family(params["field"])
    rows = []
    for x in sample_points(int(params["samples"]), f"maxwell:{params['field']}", params["seed"]):
        residual = maxwell_residual(A, x)
        rows.append([*x.tolist(), *residual.tolist(), lorenz_gauge_residual(A, x), scalar_la(A, x)])
    header = ["x0", "x1", "x2", "x3", "maxwell0", "maxwell1", "maxwell2", "maxwell3", "lorenz", "la"]
    emit(render(Table(header, rows), params["format"]), params["out"])
    return 0


COMMANDS = {
    "verify": cmd_verify,
    "radial": cmd_radial,
    "twofield": cmd_twofield,
    "h4": cmd_h4,
    "solve-radial": cmd_solve_radial,
    "maxwell": cmd_maxwell,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', dest='run_file', help='YAML run file; flags override its values')
    common.add_argument('--seed', type=lambda s: int(s, 0), help='64-bit seed, decimal or hex (default 0x5EED)')
    common.add_argument('--out', help='Output path (default stdout)')
    common.add_argument('--format', choices=['csv', 'json'], help='Artifact format')

    radial = argparse.ArgumentParser(add_help=False)
    radial.add_argument('--sign', choices=['upper', 'lower'], help='Sign of the strict Lagrangian')
    radial.add_argument('--c0', type=float, help='Additive constant of phi')
    radial.add_argument('--c1', type=float, help='Charge constant of phi')
    radial.add_argument('--rmin', type=float, help='Inner radius')
    radial.add_argument('--rmax', type=float, help='Outer radius')
    radial.add_argument('--nodes', type=int, help='Number of radial nodes')

    parser = argparse.ArgumentParser(
        description='Finsler weak-field lab',
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  %(prog)s verify --format json
  %(prog)s radial --sign upper --c1 1 --rmin 1 --rmax 100 --nodes 512 --out radial.csv
  %(prog)s twofield --amp 0.2 0.1 0.05 --steps 100
  %(prog)s h4 --samples 1000 --seed 0x5EED
  %(prog)s solve-radial --mode strict --nodes 401
  %(prog)s maxwell --field quadratic --samples 20
        """,
    )
    sub = parser.add_subparsers(dest='command', required=True)

    verify = sub.add_parser('verify', parents=[common], help='Run every identity suite')
    verify.add_argument('--samples', type=int, help='Samples per suite')

    sub.add_parser('radial', parents=[common, radial], help='Weak and strict radial profiles')

    twofield = sub.add_parser('twofield', parents=[common], help='Superposition defect against amplitude')
    twofield.add_argument('--amp', type=float, nargs='+', help='Pulse amplitudes')
    twofield.add_argument('--steps', type=int, help='Leapfrog steps')
    twofield.add_argument('--grid', type=int, help='Spatial cells')
    twofield.add_argument('--mode', choices=list(MODES), help='Evolution equations')

    h4 = sub.add_parser('h4', parents=[common], help='H4 identity residuals')
    h4.add_argument('--samples', type=int, help='Random vectors')

    solve = sub.add_parser('solve-radial', parents=[common, radial], help='Discrete-action radial solution')
    solve.add_argument('--mode', choices=['linear', 'strict'], help='Density to extremize')

    maxwell = sub.add_parser('maxwell', parents=[common], help='Maxwell residuals of a covector family')
    maxwell.add_argument('--field', choices=sorted(COVECTOR_FAMILIES), help='Covector family')
    maxwell.add_argument('--samples', type=int, help='Sample points')

    return parser


def resolve_params(args: argparse.Namespace) -> Dict[str, Any]:
    """Merge command defaults, the YAML run file and explicit flags"""
    params = {"seed": config.DEFAULT_SEED, "out": None, **DEFAULTS[args.command]}
    params.update(config.load_run_file(args.run_file))
    params.update({k: v for k, v in vars(args).items() if v is not None and k not in ("command", "run_file")})
    params["seed"] = _seed(params["seed"])
    if params["format"] not in ("csv", "json"):
        raise DomainError(f"format must be csv or json, got {params['format']!r}")
    if isinstance(params.get("amp"), (int, float)):
        params["amp"] = [params["amp"]]
    return params


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)

    if not config.validate():
        return 2

    try:
        params = resolve_params(args)
    except (OSError, ValueError, yaml.YAMLError) as e:
        logger.error(f"Invalid run configuration: {e}")
        return 2

    try:
        return COMMANDS[args.command](params)
    except DomainError as e:
        logger.error(f"{e.code}: {e}")
        return 2
    except FieldLabError as e:
        logger.error(f"{e.code}: {e}")
        return 1


if __name__ == '__main__':
    sys.exit(main())
