"""Command-line entry point: ``hexopt run | sweep-eff | sweep-thickness | limits``."""

from __future__ import annotations

import argparse
import sys
import time
from decimal import Decimal

from .catalog import BUILTIN_SCENARIOS, ScenarioError, load_scenario, lookup_material, parse_grid
from .optimize import Infeasible
from .runner import (
    RunError,
    emit,
    run_effectiveness_sweep,
    run_scenario,
    run_thickness_sweep,
    verify_rows,
)
from .thermal import DomainError, NondimDesign, ReferenceScales, axial_conduction_parameter, effectiveness_limit


def _log(args, message: str) -> None:
    if not getattr(args, "quiet", False):
        print(f"hexopt: {message}", file=sys.stderr)


def _floats(text: str, option: str) -> list[float]:
    try:
        return [float(v) for v in parse_grid(text, option)]
    except ScenarioError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _add_output_options(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--scenario",
        required=True,
        help=f"scenario file or builtin name ({', '.join(BUILTIN_SCENARIOS)})",
    )
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", help="output path (default: stdout)")
    p.add_argument("--verify", action="store_true", help="re-evaluate every row from its design fields")
    p.add_argument("--jobs", type=int, default=1, help="worker processes for independent points")
    p.add_argument("-q", "--quiet", action="store_true", help="suppress progress messages on stderr")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hexopt",
        description="Maximum power-density sizing of counterflow parallel plate heat exchangers.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="optimize every material of a scenario")
    _add_output_options(p)

    p = sub.add_parser("sweep-eff", help="sweep the design effectiveness (material-specific thickness + fouling)")
    _add_output_options(p)
    p.add_argument("--grid", help="effectiveness grid, 'start:stop:step' or comma list (default 0.55:0.94:0.0325)")

    p = sub.add_parser("sweep-thickness", help="sweep the plate thickness at fixed fouling bound")
    _add_output_options(p)
    p.add_argument("--material", required=True, help="material name (comma separated for several)")
    p.add_argument("--t-grid", help="plate thicknesses in mm, comma list or 'start:stop:step'")
    p.add_argument("--eps-set", help="design effectiveness values, comma list")

    p = sub.add_parser("limits", help="print M and the high-NTU effectiveness limit for a wall")
    p.add_argument("--material", required=True)
    p.add_argument("--t", type=float, required=True, help="plate thickness [mm]")
    p.add_argument("--D", type=float, help="plate spacing [mm] (default: scenario baseline spacing)")
    p.add_argument("--scenario", default="table2", help="source of fluid and reference scales")
    p.add_argument("-q", "--quiet", action="store_true")
    return parser


def _cmd_limits(args) -> int:
    spec = load_scenario(args.scenario)
    try:
        material = lookup_material(args.material, spec.materials)
    except KeyError:
        material = lookup_material(args.material)
    t = float(Decimal(str(args.t)) * Decimal("1e-3"))
    D = spec.baseline.D if args.D is None else float(Decimal(str(args.D)) * Decimal("1e-3"))
    scales = ReferenceScales.from_fluid(spec.fluid, spec.t_ref, spec.reference_dp, spec.dp)
    design = NondimDesign(1.0, D / spec.t_ref, t / spec.t_ref)
    m = axial_conduction_parameter(design, spec.fluid, material, scales)
    limit = effectiveness_limit(m)
    print(f"material={material.name} t={t!r} m D={D!r} m")
    print(f"M={m:.6g}")
    print(f"eps_limit={limit:.6g}")
    print(f"reaches eps_d={spec.eps_d}: {'yes' if spec.eps_d < limit else 'no'}")
    return 0


def _run(args) -> int:
    spec = load_scenario(args.scenario)
    start = time.perf_counter()
    if args.command == "run":
        rows = run_scenario(spec, jobs=args.jobs)
    elif args.command == "sweep-eff":
        grid = _floats(args.grid, "--grid") if args.grid else None
        rows = run_effectiveness_sweep(spec, grid, jobs=args.jobs)
    else:
        t_grid = [v * 1e-3 for v in _floats(args.t_grid, "--t-grid")] if args.t_grid else None
        eps_set = _floats(args.eps_set, "--eps-set") if args.eps_set else None
        materials = [m.strip() for m in args.material.split(",") if m.strip()]
        rows = run_thickness_sweep(spec, t_grid, eps_set, materials, jobs=args.jobs)
    infeasible = sum(not r.feasible for r in rows)
    _log(args, f"{spec.name}: {len(rows)} rows ({infeasible} infeasible) in {time.perf_counter() - start:.2f} s")

    status = 0
    if args.verify:
        problems = verify_rows(rows, spec)
        for msg in problems:
            print(f"hexopt: verify: {msg}", file=sys.stderr)
        if problems:
            status = 1
        else:
            _log(args, f"verify: {len(rows) - infeasible} feasible rows reproduced")
    emit(rows, args.format, args.out)
    return status


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "limits":
            return _cmd_limits(args)
        return _run(args)
    except argparse.ArgumentTypeError as exc:
        parser.error(str(exc))
    except (ScenarioError, RunError, DomainError, Infeasible, KeyError, OSError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"hexopt: error: {msg}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
