"""Command-line front end: ``shapejc {families,spectrum,dressed,verify,residual}``.

Exit codes: 0 success, 2 usage, 3 domain/contract error, 4 verification
failure, 5 numerical failure.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import sys

from . import algebra, dressed, grid
from .algebra import HarmonicOscillator, Morse, ScalingChain
from .errors import EigensolverFailure, ShapeJCError, UnsupportedFamily

EXIT_OK, EXIT_USAGE, EXIT_DOMAIN, EXIT_VERIFY, EXIT_NUMERIC = 0, 2, 3, 4, 5
DRESSED_THRESHOLD = 1e-9
ZERO_FLOOR = 1e-12

FAMILY_INFO = [
    {
        "name": "ho",
        "class": "HarmonicOscillator",
        "parameters": ["mass", "omega"],
        "grid_supported": True,
        "note": "translation chain, constant remainder hbar*omega",
    },
    {
        "name": "morse",
        "class": "Morse",
        "parameters": ["v0", "lambda", "mass"],
        "grid_supported": True,
        "note": "translation chain, finite bound spectrum",
    },
    {
        "name": "scaling",
        "class": "ScalingChain",
        "parameters": ["r1", "q"],
        "grid_supported": False,
        "note": "analytic-only",
    },
]
OPERATIONS = {"spectrum": "all", "dressed": "all", "verify": "grid", "residual": "grid"}


def real(x) -> float:
    """Round to 12 significant digits; magnitudes below 1e-12 print as 0."""
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"non-finite value {x!r} in output")
    if abs(x) < ZERO_FLOOR:
        return 0.0
    return float(f"{x:.12g}")


def fmt(x) -> str:
    return f"{real(x):.12g}"


class UsageError(Exception):
    pass


# --- argument handling ----------------------------------------------------


def _common(p, with_family=True):
    p.add_argument("--format", choices=("table", "json", "csv"), default="table")
    p.add_argument("--output", metavar="PATH", help="write to PATH instead of stdout")
    if not with_family:
        return
    g = p.add_argument_group("family")
    g.add_argument("--family", choices=("ho", "morse", "scaling"), required=True)
    g.add_argument("--hbar", type=float, default=1.0)
    g.add_argument("--mass", type=float)
    g.add_argument("--omega", type=float, help="oscillator frequency (ho)")
    g.add_argument("--v0", type=float, help="Morse depth")
    g.add_argument("--lambda", dest="lam", type=float, help="Morse range parameter")
    g.add_argument("--r1", type=float, help="first remainder (scaling)")
    g.add_argument("--q", type=float, help="scaling ratio (scaling)")
    p.add_argument("--omega-drive", type=float, default=0.0, help="drive strength Omega (default 0)")


def _grid_flags(p):
    p.add_argument("--x-min", type=float)
    p.add_argument("--x-max", type=float)
    p.add_argument("--n-points", type=int)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="shapejc",
        description="Generalized Jaynes-Cummings spectra for shape-invariant potentials.",
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("families", help="list supported potential families")
    _common(p, with_family=False)

    p = sub.add_parser("spectrum", help="closed-form dressed spectrum")
    _common(p)
    p.add_argument("--levels", type=int, default=3, help="number of dressed pairs (default 3)")

    p = sub.add_parser("dressed", help="dressed-basis H matrix and its diagonalization")
    _common(p)
    p.add_argument("--n-max", type=int, default=3)

    p = sub.add_parser("verify", help="finite-difference check of the two-channel spectrum")
    _common(p)
    _grid_flags(p)
    p.add_argument("--levels", type=int, default=5, help="analytic levels to match, ground included (default 5)")
    p.add_argument("--tolerance", type=float, default=1e-3)
    p.add_argument("--converge", action="store_true", help="also run the h, h/2, h/4 study")
    p.add_argument("--dump-states", metavar="PATH", help="CSV of the lowest eigenvectors")
    p.add_argument("--dump-count", type=int, default=3)

    p = sub.add_parser("residual", help="shape-invariance residual at two resolutions")
    _common(p)
    _grid_flags(p)
    p.add_argument("--break-remainder", action="store_true", help=argparse.SUPPRESS)
    return parser


_REQUIRED = {"ho": ("mass", "omega"), "morse": ("v0", "lam", "mass"), "scaling": ("r1", "q")}
_FLAG = {"lam": "--lambda"}


def family_from_args(args):
    missing = [_FLAG.get(k, "--" + k.replace("_", "-")) for k in _REQUIRED[args.family]
               if getattr(args, k) is None]
    if missing:
        raise UsageError(f"family {args.family!r} needs {', '.join(missing)}")
    if args.family == "ho":
        return HarmonicOscillator(args.mass, args.omega, args.hbar)
    if args.family == "morse":
        return Morse(args.v0, args.lam, args.mass, args.hbar)
    return ScalingChain(args.r1, args.q, args.hbar)


def _grid_from_args(args, family, n_levels, omega):
    flags = (args.x_min, args.x_max, args.n_points)
    if all(v is None for v in flags):
        return None
    base = grid.default_grid(family, n_levels, omega)
    return grid.GridSpec(
        base.x_min if args.x_min is None else args.x_min,
        base.x_max if args.x_max is None else args.x_max,
        base.n_points if args.n_points is None else args.n_points,
    )


def _family_json(family):
    return {k: real(v) if isinstance(v, float) else v for k, v in family.describe().items()}


def _dumps(obj):
    return json.dumps(obj, indent=2) + "\n"


def _table(header, rows):
    cells = [header] + [[str(c) for c in row] for row in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    lines = ["  ".join(c.rjust(w) for c, w in zip(r, widths)).rstrip() for r in cells]
    return "\n".join(lines) + "\n"


def _csv(header, rows):
    return "\n".join([",".join(header)] + [",".join(str(c) for c in r) for r in rows]) + "\n"


def _branch_code(branch):
    return 0 if branch is None else branch.sign


# --- commands -------------------------------------------------------------


def cmd_families(args):
    if args.format == "json":
        fams = [dict(info, operations=[op for op, need in OPERATIONS.items()
                                       if need == "all" or info["grid_supported"]])
                for info in FAMILY_INFO]
        return EXIT_OK, _dumps({"families": fams})
    rows = [[f["name"], " ".join(f["parameters"]), str(f["grid_supported"]).lower(), f["note"]]
            for f in FAMILY_INFO]
    header = ["name", "parameters", "grid_supported", "note"]
    if args.format == "csv":
        return EXIT_OK, _csv(header, [[r[0], r[1], r[2], r[3].replace(",", ";")] for r in rows])
    return EXIT_OK, _table(header, rows)


def cmd_spectrum(args):
    family = family_from_args(args)
    table = algebra.spectrum_table(family, args.omega_drive, args.levels)
    if args.format == "json":
        doc = {
            "family": _family_json(family),
            "hbar": real(family.hbar),
            "omega_drive": real(table.omega_drive),
            "ground": real(table.ground),
            "levels": [{"m": lev.m, "epsilon": real(lev.epsilon), "e_minus": real(lev.e_minus),
                        "e_plus": real(lev.e_plus)} for lev in table.levels],
        }
        return EXIT_OK, _dumps(doc)
    header = ["m", "e_minus", "e_plus", "epsilon"]
    rows = [[lev.m, fmt(lev.e_minus), fmt(lev.e_plus), fmt(lev.epsilon)] for lev in table.levels]
    if args.format == "csv":
        return EXIT_OK, _csv(header, [[-1, fmt(0), fmt(0), fmt(0)]] + rows)
    return EXIT_OK, f"ground: {fmt(table.ground)}\n" + _table(header, rows)


def cmd_dressed(args):
    family = family_from_args(args)
    blocks = dressed.h_blocks(family, args.omega_drive, args.n_max)
    spec = dressed.diagonalize_dressed(family, args.omega_drive, args.n_max)
    label_info = {row[0]: row for row in spec.table.labelled()}
    eig_rows = []
    for label, num, ana in zip(spec.labels, spec.eigenvalues, spec.analytic):
        _, m, branch, _ = label_info[label]
        eig_rows.append((label, m, branch, num, ana))
    ok = spec.max_deviation <= DRESSED_THRESHOLD
    code = EXIT_OK if ok else EXIT_VERIFY

    if args.format == "json":
        doc = {
            "family": _family_json(family),
            "hbar": real(family.hbar),
            "omega_drive": real(args.omega_drive),
            "n_max": args.n_max,
            "basis": list(dressed.DressedBasis(args.n_max).labels),
            "blocks": [{"states": name, "m": m, "matrix": [[real(v) for v in row] for row in blk]}
                       for name, m, blk in blocks],
            "eigenvalues": [{"label": lab, "m": m, "branch": None if b is None else str(b),
                             "numeric": real(num), "analytic": real(ana)}
                            for lab, m, b, num, ana in eig_rows],
            "max_deviation": real(spec.max_deviation),
            "passed": ok,
        }
        return code, _dumps(doc)
    if args.format == "csv":
        rows = [[-1 if m is None else m, _branch_code(b), fmt(num), fmt(ana)]
                for _, m, b, num, ana in eig_rows]
        return code, _csv(["m", "branch", "numeric", "analytic"], rows)
    out = io.StringIO()
    out.write("H blocks:\n")
    for name, m, blk in blocks:
        out.write(f"  [{name}] " + " | ".join(" ".join(fmt(v) for v in row) for row in blk) + "\n")
    out.write(_table(["label", "numeric", "analytic"], [[lab, fmt(num), fmt(ana)]
                                                         for lab, _, _, num, ana in eig_rows]))
    out.write(f"max deviation: {fmt(spec.max_deviation)}\n")
    return code, out.getvalue()


def cmd_verify(args):
    family = family_from_args(args)
    if not family.grid_supported:
        raise UnsupportedFamily(f"{args.family}: analytic-only family, no grid realization")
    g = _grid_from_args(args, family, args.levels, args.omega_drive)
    report = grid.verify_spectrum(family, args.omega_drive, g, args.levels)
    study = None
    if args.converge:
        study = grid.convergence_study(family, args.omega_drive, report.grid, args.levels)
    if args.dump_states:
        ham = grid.build_two_channel(family, args.omega_drive, report.grid)
        with open(args.dump_states, "w", newline="", encoding="utf-8") as fh:
            grid.write_states_csv(ham, fh, args.dump_count)
    ok = report.passes(args.tolerance)
    code = EXIT_OK if ok else EXIT_VERIFY

    conv_rows = []
    if study is not None:
        orders = [math.nan] + list(study.order)
        conv_rows = [(h, err, p) for (h, err), p in zip(study.rows, orders)]

    if args.format == "json":
        doc = {
            "family": _family_json(family),
            "hbar": real(family.hbar),
            "omega_drive": real(args.omega_drive),
            "grid": {"x_min": real(report.grid.x_min), "x_max": real(report.grid.x_max),
                     "n_points": report.grid.n_points, "h": real(report.grid.h)},
            "levels": [{"label": lev.label, "m": lev.m,
                        "branch": None if lev.branch is None else str(lev.branch),
                        "analytic": real(lev.analytic), "numeric": real(lev.numeric),
                        "abs_error": real(lev.abs_error), "rel_error": real(lev.rel_error)}
                       for lev in report.levels],
            "ground_leakage": real(report.ground_leakage),
            "convergence_ratio": real(report.convergence_ratio),
            "tolerance": real(args.tolerance),
            "passed": ok,
        }
        if study is not None:
            doc["convergence"] = [{"h": real(h), "max_rel_error": real(e),
                                   "order": None if math.isnan(p) else real(p)} for h, e, p in conv_rows]
        return code, _dumps(doc)
    rows = [[lev.label if args.format == "table" else -1 if lev.m is None else lev.m]
            + ([] if args.format == "table" else [_branch_code(lev.branch)])
            + [fmt(lev.analytic), fmt(lev.numeric), fmt(lev.abs_error), fmt(lev.rel_error)]
            for lev in report.levels]
    conv = [[fmt(h), fmt(e), "" if math.isnan(p) else fmt(p)] for h, e, p in conv_rows]
    if args.format == "csv":
        text = _csv(["m", "branch", "analytic", "numeric", "abs_error", "rel_error"], rows)
        if conv:
            text += "\n" + _csv(["h", "max_rel_error", "order"], conv)
        return code, text
    g = report.grid
    text = (f"grid: [{fmt(g.x_min)}, {fmt(g.x_max)}], n_points={g.n_points}, h={fmt(g.h)}\n"
            + _table(["level", "analytic", "numeric", "abs_error", "rel_error"], rows)
            + f"ground leakage: {fmt(report.ground_leakage)}\n"
            + f"convergence ratio: {fmt(report.convergence_ratio)}\n")
    if conv:
        text += _table(["h", "max_rel_error", "order"], conv)
    text += f"{'PASS' if ok else 'FAIL'} (tolerance {fmt(args.tolerance)})\n"
    return code, text


def cmd_residual(args):
    family = family_from_args(args)
    if not family.grid_supported:
        raise UnsupportedFamily(f"{args.family}: analytic-only family, no grid realization")
    g = _grid_from_args(args, family, 5, 0.0) or grid.default_grid(family)
    shift = 1.0 if args.break_remainder else 0.0
    grids = [g, g.refine()]
    res = [grid.shape_invariance_residual(family, gg, remainder_shift=shift) for gg in grids]
    ratio = res[0] / res[1] if res[1] > 0 else math.inf
    ok = 3.0 <= ratio <= 5.0
    code = EXIT_OK if ok else EXIT_VERIFY
    if args.format == "json":
        doc = {
            "family": _family_json(family),
            "hbar": real(family.hbar),
            "runs": [{"n_points": gg.n_points, "h": real(gg.h), "residual": real(r)}
                     for gg, r in zip(grids, res)],
            "ratio": real(ratio),
            "passed": ok,
        }
        return code, _dumps(doc)
    rows = [[gg.n_points, fmt(gg.h), fmt(r)] for gg, r in zip(grids, res)]
    if args.format == "csv":
        return code, _csv(["n_points", "h", "residual"], rows)
    return code, _table(["n_points", "h", "residual"], rows) + f"ratio: {fmt(ratio)}\n"


COMMANDS = {
    "families": cmd_families,
    "spectrum": cmd_spectrum,
    "dressed": cmd_dressed,
    "verify": cmd_verify,
    "residual": cmd_residual,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        code, text = COMMANDS[args.command](args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"shapejc: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except EigensolverFailure as exc:
        print(f"shapejc: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ShapeJCError as exc:
        print(f"shapejc: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except (ValueError, TypeError) as exc:
        parser.print_usage(sys.stderr)
        print(f"shapejc: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.output:
        with open(args.output, "w", newline="\n", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if code == EXIT_VERIFY:
        print("shapejc: verification failed", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
