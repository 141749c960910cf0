"""Command-line front end.

Every subcommand writes JSON (or the requested table format) to stdout or
``--out``.  Failures print ``{"error": ..., "type": ...}`` to stderr and exit
with status 1 (2 for usage errors).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import __version__, gf2poly
from .cbc import cbc_construct
from .discrepancy import (
    mc_mean_square_estimate,
    mean_square_by_dimension,
    mean_square_criterion,
    warnock_l2sq,
)
from .lattice import PointSet, PolyLatticeRule, generate_points
from .scramble import DEFAULT_DEPTH
from .sobol import load_direction_table, sobol_points
from .weights import PRESETS, WeightScheme, load_weights, preset

DIRS_HINT = "new-joe-kuo-6.21201 from https://web.maths.unsw.edu.au/~fkuo/sobol/"


class CliError(Exception):
    pass


def _emit(doc, out: str | None) -> None:
    text = doc if isinstance(doc, str) else json.dumps(doc, indent=2) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("PLR_THREADS", "1")))
    except ValueError:
        return 1


def _weights_doc(spec: str, w: WeightScheme):
    return spec if spec in PRESETS else w.to_json()


def _rule_weights(rule: PolyLatticeRule, override: str | None) -> WeightScheme:
    if override:
        return load_weights(override, rule.s)
    stored = rule.meta.get("weights")
    if stored is None:
        raise CliError("rule file records no weights; pass --weights")
    if isinstance(stored, str):
        return preset(stored, rule.s)
    return WeightScheme.from_json(stored)


def _parse_hex(text: str | None) -> int | None:
    return None if text is None else gf2poly.from_hex(text)


def cmd_irreducible(args) -> None:
    _emit(gf2poly.to_hex(gf2poly.find_irreducible(args.m)) + "\n", args.out)


def cmd_construct(args) -> None:
    w = load_weights(args.weights, args.s)
    res = cbc_construct(args.m, w, _parse_hex(args.p), args.mode)
    doc = res.rule.to_json()
    doc.update({"weights": _weights_doc(args.weights, w), "B": res.B, "mode": res.mode, "version": __version__})
    _emit(doc, args.out)


def _load_points(path: str) -> PointSet:
    return PointSet.load(path)


def cmd_points(args) -> None:
    if args.rule:
        ps = generate_points(PolyLatticeRule.load(args.rule))
    else:
        if args.dirs is None or args.m is None or args.s is None:
            raise CliError("give --rule, or --sobol with --dirs, --m and --s")
        ps = sobol_points(load_direction_table(args.dirs, min_dims=args.s), args.m, args.s)
    if args.format == "csv":
        _emit(ps.to_csv(), args.out)
    else:
        _emit(ps.to_json(), args.out)


def cmd_discrepancy(args) -> None:
    ps = _load_points(args.points)
    w = load_weights(args.weights, ps.s)
    if args.mc:
        mean, err = mc_mean_square_estimate(ps, w, args.mc, args.seed, args.depth)
        _emit({"mean": mean, "stderr": err, "replicates": args.mc, "seed": args.seed, "depth": args.depth}, args.out)
    elif args.mean_square:
        _emit({"B": mean_square_criterion(ps, w)}, args.out)
    else:
        _emit({"l2sq": warnock_l2sq(ps, w)}, args.out)


def cmd_meansquare(args) -> None:
    if args.rule:
        rule = PolyLatticeRule.load(args.rule)
        w = _rule_weights(rule, args.weights)
        ps = generate_points(rule)
    elif args.points and args.weights:
        ps = _load_points(args.points)
        w = load_weights(args.weights, ps.s)
    else:
        raise CliError("give --rule, or --points with --weights")
    _emit({"B": mean_square_criterion(ps, w)}, args.out)


def cmd_mc_verify(args) -> None:
    rule = PolyLatticeRule.load(args.rule)
    w = _rule_weights(rule, args.weights)
    ps = generate_points(rule)
    b = mean_square_criterion(ps, w)
    mean, err = mc_mean_square_estimate(ps, w, args.replicates, args.seed, args.depth)
    z = abs(mean - b) / err if err > 0 else (0.0 if mean == b else math.inf)
    doc = {"B": b, "mean": mean, "stderr": err, "z": z, "pass": z < args.sigmas, "replicates": args.replicates}
    _emit(doc, args.out)
    if not doc["pass"]:
        raise SystemExit(3)


def _parse_range(text: str) -> list[int]:
    if "-" in text:
        lo, hi = (int(t) for t in text.split("-", 1))
        return list(range(lo, hi + 1))
    return [int(t) for t in text.split(",")]


def _plr_column(name: str, m: int, s_max: int, mode: str):
    res = cbc_construct(m, preset(name, s_max), None, mode)
    return res.rule.p, res.B


def build_table(name: str, ms: list[int], ss: list[int], generators: str, dirs: str | None, mode: str = "auto") -> dict:
    if name not in PRESETS:
        raise CliError(f"unknown preset {name!r}")
    if not ms or min(ms) < 1 or max(ms) > 30:
        raise CliError("m range must lie in [1, 30]")
    if not ss or min(ss) < 1:
        raise CliError("s values must be positive")
    gens = ["sobol", "plr"] if generators == "both" else [generators]
    s_max = max(ss)
    table = None
    sha = None
    if "sobol" in gens:
        if dirs is None:
            raise CliError(f"Sobol' columns need --dirs ({DIRS_HINT})")
        table = load_direction_table(dirs, min_dims=s_max)
        sha = table.sha256
    # product-weight CBC is extensible in s, so one run at s_max serves every s
    with ThreadPoolExecutor(_threads()) as pool:
        plr = dict(zip(ms, pool.map(lambda m: _plr_column(name, m, s_max, mode), ms))) if "plr" in gens else {}
    w = preset(name, s_max)
    rows = []
    for m in ms:
        values = {}
        if table is not None:
            sob = mean_square_by_dimension(sobol_points(table, m, s_max), w)
            for s in ss:
                values[f"s={s} Sobol'"] = sob[s - 1]
        if m in plr:
            for s in ss:
                values[f"s={s} PLR"] = plr[m][1][s - 1]
        order = [f"s={s} {g}" for s in ss for g in ("Sobol'" if g == "sobol" else "PLR" for g in gens)]
        rows.append({"m": m, "values": {k: values[k] for k in order}, "cells": {k: f"{values[k]:.2E}" for k in order}})
    return {
        "weights": name,
        "generators": gens,
        "s": ss,
        "p": {str(m): gf2poly.to_hex(plr[m][0]) for m in plr},
        "dirs_sha256": sha,
        "version": __version__,
        "rows": rows,
    }


def render_table(doc: dict, fmt: str) -> str:
    columns = list(doc["rows"][0]["cells"]) if doc["rows"] else []
    if fmt == "json":
        return json.dumps(doc, indent=2) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["m", *columns])
        for row in doc["rows"]:
            writer.writerow([row["m"], *(row["cells"][c] for c in columns)])
        return buf.getvalue()
    if fmt == "markdown":
        lines = [
            f"weights: {doc['weights']}; p: {', '.join(f'm={m} {p}' for m, p in doc['p'].items())}; "
            f"direction file sha256: {doc['dirs_sha256']}",
            "",
            "| m | " + " | ".join(columns) + " |",
            "|---" * (len(columns) + 1) + "|",
        ]
        for row in doc["rows"]:
            lines.append(f"| {row['m']} | " + " | ".join(row["cells"][c] for c in columns) + " |")
        return "\n".join(lines) + "\n"
    raise CliError(f"unknown format {fmt!r}")


def cmd_tables(args) -> None:
    doc = build_table(args.weights, _parse_range(args.m), _parse_range(args.s), args.generators, args.dirs, args.mode)
    _emit(render_table(doc, args.format), args.out)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="polylat", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("irreducible", help="smallest irreducible polynomial of degree m")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_irreducible)

    p = sub.add_parser("construct", help="CBC construction of a rule")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--weights", required=True, help=f"preset ({', '.join(PRESETS)}) or weights JSON file")
    p.add_argument("--p", help="modulus as hex, default: smallest irreducible of degree m")
    p.add_argument("--mode", choices=("naive", "fast", "auto"), default="auto")
    p.add_argument("--out")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("points", help="write the points of a rule or a Sobol' set")
    p.add_argument("--rule")
    p.add_argument("--sobol", action="store_true")
    p.add_argument("--dirs")
    p.add_argument("--m", type=int)
    p.add_argument("--s", type=int)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out")
    p.set_defaults(func=cmd_points)

    p = sub.add_parser("discrepancy", help="weighted L2 discrepancy of a point file")
    p.add_argument("--points", required=True)
    p.add_argument("--weights", required=True)
    p.add_argument("--mean-square", action="store_true", help="closed-form mean square over scrambles")
    p.add_argument("--mc", type=int, metavar="R", help="Monte Carlo over R scrambles")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--depth", type=int, default=DEFAULT_DEPTH)
    p.add_argument("--out")
    p.set_defaults(func=cmd_discrepancy)

    p = sub.add_parser("meansquare", help="mean square criterion of a rule or point file")
    p.add_argument("--rule")
    p.add_argument("--points")
    p.add_argument("--weights")
    p.add_argument("--out")
    p.set_defaults(func=cmd_meansquare)

    p = sub.add_parser("mc-verify", help="compare the criterion with a scrambling Monte Carlo estimate")
    p.add_argument("--rule", required=True)
    p.add_argument("--weights")
    p.add_argument("--replicates", type=int, default=2000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--depth", type=int, default=DEFAULT_DEPTH)
    p.add_argument("--sigmas", type=float, default=4.0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_mc_verify)

    p = sub.add_parser("tables", help="criterion tables for the weight presets")
    p.add_argument("--weights", choices=PRESETS, required=True)
    p.add_argument("--m", default="4-15", help="range lo-hi or comma list")
    p.add_argument("--s", default="1,5,50,100")
    p.add_argument("--generators", choices=("plr", "sobol", "both"), default="plr")
    p.add_argument("--dirs", help=f"Joe-Kuo direction file ({DIRS_HINT})")
    p.add_argument("--mode", choices=("naive", "fast", "auto"), default="auto")
    p.add_argument("--format", choices=("csv", "json", "markdown"), default="markdown")
    p.add_argument("--out")
    p.set_defaults(func=cmd_tables)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except (CliError, ValueError, OSError, KeyError) as exc:
        sys.stderr.write(json.dumps({"error": str(exc), "type": type(exc).__name__}) + "\n")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
