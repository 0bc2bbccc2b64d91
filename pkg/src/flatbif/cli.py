"""Command-line frontend.

Emits CSV and JSON files for spectra, collapse data, index scans,
bifurcation reports, covering-tower ledgers, and validity checks.  All
output is deterministic: byte-identical across runs and thread counts.

Exit codes: 0 success (and true verdicts), 2 validation failure or false
verdict, 3 undecidable comparison at the configured precision, 4 grid too
coarse for jump isolation.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from . import ratmat as rm
from .bifurcation import index_at, scan
from .crystal import (CollapseFamily, CrystalGroup, collapse_map,
                      cone_membership, conjugate_group, find_invariant_subspace,
                      is_torsion_free, validate_group)
from .errors import (FlatbifError, GridTooCoarse, InvalidInput,
                     UndecidableComparison)
from .exactpi import set_default_precision
from .lattices import Lattice
from .scenario import (load_group_file, load_lattice_file, load_matrix_file,
                       load_scenario)
from .spectra import (bieberbach_spectrum, cheng_bound_check, flat_diameter,
                      sphere_spectrum, torus_spectrum)
from .towers import ProductMetricData, tower_simulate

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_UNDECIDABLE = 3
EXIT_GRID = 4


def _write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n",
                    encoding="utf-8")


def _write_csv(path: Path, rows: list[list[str]]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerows(rows)


def _emit(args, basename: str, json_obj, csv_rows=None) -> list[Path]:
    outdir = Path(args.output_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    written = []
    if args.format in ("json", "both"):
        p = outdir / f"{basename}.json"
        _write_json(p, json_obj)
        written.append(p)
    if csv_rows is not None and args.format in ("csv", "both"):
        p = outdir / f"{basename}.csv"
        _write_csv(p, csv_rows)
        written.append(p)
    for p in written:
        print(f"wrote {p}")
    return written


def _parse_lattice_arg(text: str) -> Lattice:
    if text.startswith("identity"):
        return Lattice.standard(int(text[len("identity"):]))
    return load_lattice_file(text)


# ---------------------------------------------------------------------------
# subcommands


def cmd_spectrum(args) -> int:
    if args.which == "torus":
        lat = _parse_lattice_arg(args.basis)
        slice_ = torus_spectrum(lat, args.cutoff)
    elif args.which == "sphere":
        slice_ = sphere_spectrum(args.dim, radius=args.radius,
                                 cutoff=args.cutoff,
                                 unit_volume=args.unit_volume)
    else:
        group = load_group_file(args.group)
        slice_ = bieberbach_spectrum(group, args.cutoff)
    _emit(args, f"spectrum_{args.which}", slice_.to_json(), slice_.to_csv_rows())
    return EXIT_OK


def cmd_collapse(args) -> int:
    group = load_group_file(args.group)
    if args.subspace == "auto":
        family = CollapseFamily(group, find_invariant_subspace(group))
    else:
        mat = load_matrix_file(args.subspace)
        family = CollapseFamily.from_subspace_basis(group, rm.columns(mat))
    t = rm.to_frac(args.t)
    a_t = collapse_map(family, t)
    conjugated = conjugate_group(group, a_t)
    payload = {
        "t": str(t),
        "dim_E": family.dim_e,
        "projection": rm.mat_to_strs(family.projection),
        "deformation_matrix": rm.mat_to_strs(a_t),
        "determinant": str(rm.det(a_t)),
        "cone_membership": cone_membership(group, a_t),
        "conjugated_group": conjugated.to_json(),
    }
    _emit(args, "collapse", payload)
    return EXIT_OK


def cmd_index_scan(args) -> int:
    config = load_scenario(args.scenario)
    set_default_precision(config.precision_bits)
    sc = config.scan
    if sc is None and (args.t_min is None or args.t_max is None):
        raise InvalidInput("scenario has no [scan] section; pass --t-min/--t-max")
    t_min = rm.to_frac(args.t_min) if args.t_min else sc.t_min
    t_max = rm.to_frac(args.t_max) if args.t_max else sc.t_max
    steps = args.steps or (sc.steps if sc else 64)
    ts = [t_min + (t_max - t_min) * j / steps for j in range(steps + 1)]
    grid = [(t, index_at(config.scenario, t).count) for t in ts]
    payload = {"grid": [[float(t), i] for t, i in grid]}
    rows = [["t", "index"]] + [[repr(float(t)), str(i)] for t, i in grid]
    _emit(args, "index_scan", payload, rows)
    return EXIT_OK


def cmd_bifurcate(args) -> int:
    config = load_scenario(args.scenario)
    set_default_precision(config.precision_bits)
    if config.scan is None:
        raise InvalidInput("scenario has no [scan] section")
    report = scan(config.scenario, config.scan.t_min, config.scan.t_max,
                  config.scan.steps, jobs=args.jobs,
                  refine_budget=config.scan.refine_budget)
    _emit(args, "scan", report.to_json())
    if args.format in ("csv", "both"):
        outdir = Path(args.output_dir)
        p = outdir / "scan_grid.csv"
        _write_csv(p, report.grid_csv_rows())
        print(f"wrote {p}")
    print(f"instants: {len(report.instants)}")
    for inst in report.instants:
        exact = inst.exact.exact_str() if inst.exact else "(interval only)"
        print(f"  t* in [{float(inst.t_lo):.12f}, {float(inst.t_hi):.12f}] "
              f"jump={inst.jump:+d} condition_a={inst.condition_a_ok} {exact}")
    return EXIT_OK


def cmd_tower(args) -> int:
    config = load_scenario(args.scenario)
    set_default_precision(config.precision_bits)
    if args.degrees:
        degrees = [int(x) for x in args.degrees.split(",") if x]
    elif config.tower is not None:
        degrees = list(config.tower.degrees)
    else:
        raise InvalidInput("scenario has no [tower] section; pass --degrees")
    scenario = config.scenario
    lam = config.tower.lam if config.tower is not None else 1
    data = ProductMetricData.build(
        scal_g=scenario.closed.scal,
        vol_g=scenario.closed.volume,
        dim_m=scenario.closed.dim,
        scal_h=0,
        vol_h=scenario.group.lattice.covolume() / scenario.group.order,
        dim_f=scenario.group.dim,
        lam=lam,
    )
    ledger = tower_simulate(data, degrees)
    _emit(args, "tower", ledger.to_json())
    print(f"{'level':>5} {'degree':>6} {'cum':>6} {'volume':>12} "
          f"{'A':>14} crossed")
    for idx, lv in enumerate(ledger.levels, start=1):
        print(f"{idx:>5} {lv.degree:>6} {lv.cumulative_degree:>6} "
              f"{float(lv.volume.evalf(20)):>12.4f} "
              f"{float(lv.a_value.evalf(20)):>14.4f} {lv.crossed}")
    if ledger.first_crossing is not None:
        print(f"threshold first crossed at level {ledger.first_crossing}")
    else:
        print("threshold not crossed in this chain")
    return EXIT_OK


def cmd_check(args) -> int:
    if args.which == "torsion":
        group = load_group_file(args.group)
        result = is_torsion_free(group)
        payload = {"torsion_free": result.torsion_free}
        if result.witness is not None:
            payload["witness"] = {
                "coset_index": result.witness.coset_index,
                "lattice_shift": rm.vec_to_strs(result.witness.lattice_shift),
                "fixed_point": rm.vec_to_strs(result.witness.fixed_point),
            }
        _emit(args, "check_torsion", payload)
        print(f"torsion_free: {result.torsion_free}")
        return EXIT_OK if result.torsion_free else EXIT_INVALID
    if args.which == "cone":
        group = load_group_file(args.group)
        matrix = load_matrix_file(args.matrix)
        member = cone_membership(group, matrix)
        _emit(args, "check_cone", {"cone_member": member,
                                   "matrix": rm.mat_to_strs(matrix)})
        print(f"cone_member: {member}")
        return EXIT_OK if member else EXIT_INVALID
    if args.which == "cheng":
        if args.group:
            group = load_group_file(args.group)
        elif args.lattice:
            group = CrystalGroup.torus(_parse_lattice_arg(args.lattice))
        else:
            raise InvalidInput("check cheng needs --group or --lattice")
        diam = flat_diameter(group, args.tolerance)
        cutoff = args.cutoff
        if cutoff is None:
            # generous default so the expanded list reaches j_max
            cutoff = 8 * (args.j_max + 1) ** 2 * group.dim * (group.dim + 4) \
                / max(diam.value ** 2, 1e-9) + 100.0
        spec = bieberbach_spectrum(group, cutoff)
        report = cheng_bound_check(spec, group.dim, diam, args.j_max)
        payload = report.to_json()
        payload["diameter"] = {
            "value": diam.value,
            "upper_bound_only": diam.upper_bound_only,
        }
        _emit(args, "check_cheng", payload)
        print(f"violations: {report.violations}, "
              f"inconclusive: {report.inconclusive}")
        return EXIT_OK if report.violations == 0 else EXIT_INVALID
    raise InvalidInput(f"unknown check {args.which!r}")


def cmd_validate(args) -> int:
    group = load_group_file(args.group)
    report = validate_group(group)
    payload = {
        "valid": report.ok,
        "failures": [
            {"kind": f.kind, "witness": list(f.witness), "detail": f.detail}
            for f in report.failures
        ],
    }
    _emit(args, "check_group", payload)
    print(f"valid: {report.ok}")
    for f in report.failures:
        print(f"  {f.kind} at {f.witness}: {f.detail}")
    return EXIT_OK if report.ok else EXIT_INVALID


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="flatbif",
        description="Spectra, index curves, and covering towers for "
                    "products with flat manifolds.")
    parser.add_argument("--precision-bits", type=int, default=128,
                        help="certified-comparison precision cap (>= 64)")
    parser.add_argument("--output-dir", default=".", help="output directory")
    parser.add_argument("--format", choices=("csv", "json", "both"),
                        default="both")
    sub = parser.add_subparsers(dest="command", required=True)

    spectrum = sub.add_parser("spectrum", help="emit a spectrum slice")
    spectrum_sub = spectrum.add_subparsers(dest="which", required=True)
    torus = spectrum_sub.add_parser("torus")
    torus.add_argument("--basis", required=True,
                       help="lattice JSON file or identityN shorthand")
    torus.add_argument("--cutoff", type=float, required=True)
    sphere = spectrum_sub.add_parser("sphere")
    sphere.add_argument("--dim", type=int, required=True)
    sphere.add_argument("--radius", default="1",
                        help="exact radius (rational or symbolic string)")
    sphere.add_argument("--unit-volume", action="store_true")
    sphere.add_argument("--cutoff", type=float, required=True)
    quotient = spectrum_sub.add_parser("quotient")
    quotient.add_argument("--group", required=True)
    quotient.add_argument("--cutoff", type=float, required=True)
    spectrum.set_defaults(func=cmd_spectrum)

    collapse = sub.add_parser("collapse", help="deformation matrix and "
                                               "conjugated group at t")
    collapse.add_argument("--group", required=True)
    collapse.add_argument("--subspace", default="auto",
                          help="'auto' or a matrix JSON file of subspace columns")
    collapse.add_argument("--t", required=True, help="rational parameter")
    collapse.set_defaults(func=cmd_collapse)

    iscan = sub.add_parser("index-scan", help="index curve on a grid")
    iscan.add_argument("--scenario", required=True)
    iscan.add_argument("--t-min", default=None)
    iscan.add_argument("--t-max", default=None)
    iscan.add_argument("--steps", type=int, default=None)
    iscan.set_defaults(func=cmd_index_scan)

    bif = sub.add_parser("bifurcate", help="full scan with certified instants")
    bif.add_argument("--scenario", required=True)
    bif.add_argument("--jobs", type=int, default=1,
                     help="grid evaluation threads (output is identical)")
    bif.set_defaults(func=cmd_bifurcate)

    tower = sub.add_parser("tower", help="covering-tower ledger")
    tower.add_argument("--scenario", required=True)
    tower.add_argument("--degrees", default=None,
                       help="comma-separated covering degrees")
    tower.set_defaults(func=cmd_tower)

    check = sub.add_parser("check", help="boolean verdicts with exit codes")
    check_sub = check.add_subparsers(dest="which", required=True)
    torsion = check_sub.add_parser("torsion")
    torsion.add_argument("--group", required=True)
    torsion.set_defaults(func=cmd_check)
    cone = check_sub.add_parser("cone")
    cone.add_argument("--group", required=True)
    cone.add_argument("--matrix", required=True)
    cone.set_defaults(func=cmd_check)
    cheng = check_sub.add_parser("cheng")
    cheng.add_argument("--group", default=None)
    cheng.add_argument("--lattice", default=None)
    cheng.add_argument("--j-max", type=int, default=10)
    cheng.add_argument("--cutoff", type=float, default=None)
    cheng.add_argument("--tolerance", type=float, default=1e-6)
    cheng.set_defaults(func=cmd_check)
    group_check = check_sub.add_parser("group")
    group_check.add_argument("--group", required=True)
    group_check.set_defaults(func=cmd_validate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        set_default_precision(args.precision_bits)
        return args.func(args)
    except GridTooCoarse as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GRID
    except UndecidableComparison as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNDECIDABLE
    except FlatbifError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (json.JSONDecodeError, KeyError, ValueError) as exc:
        print(f"error: invalid input file: {exc!r}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
