"""Command-line front end: ``rentlens analyze|compare|gen|pack|partition``.

Exit codes: 0 success, 2 unreadable or invalid input, 3 analysis failure.
``RENTLENS_THREADS`` caps the worker threads used for partitioning; it never
changes results.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import fields

from .blif import parse_blif, write_blif
from .errors import ArchFileError, IncomparableInputs, ParseError, RentLensError
from .gnl import GenSpec, generate
from .packer import ArchSpec, PackConfig, SeedPolicy, pack, write_net
from .partition import PartitionConfig
from . import report as rp
from .rent import Region, analyze, prepack_fit, terminals_per_block
from .vprnet import parse_vpr_net

log = logging.getLogger("rentlens")

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_ANALYSIS = 3


class InputError(Exception):
    """Bad command-line input; maps to exit code 2."""


def _workers() -> int:
    raw = os.environ.get("RENTLENS_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        log.warning("ignoring RENTLENS_THREADS=%r", raw)
        return 1


def _read(path: str) -> bytes:
    try:
        with open(path, "rb") as fh:
            return fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror or exc}") from None


def _write(path: str, data) -> None:
    if isinstance(data, str):
        data = data.encode("utf-8")
    if path == "-":
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
        return
    with open(path, "wb") as fh:
        fh.write(data)


def read_arch(path: str | None) -> ArchSpec:
    """Read a ``key = value`` architecture file; missing keys take defaults."""
    if path is None:
        return ArchSpec()
    known = {f.name for f in fields(ArchSpec)}
    values = {}
    for no, line in enumerate(_read(path).decode("utf-8", "replace").splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, val = line.partition("=")
        if not sep:
            key, _, val = line.partition(" ")
        key, val = key.strip(), val.strip()
        if key not in known:
            raise ArchFileError(f"{path}:{no}: unknown key {key!r}")
        try:
            values[key] = int(val)
        except ValueError:
            raise ArchFileError(f"{path}:{no}: {key} needs an integer, got {val!r}") from None
    try:
        return ArchSpec(**values)
    except ValueError as exc:
        raise ArchFileError(f"{path}: {exc}") from None


def _partition_cfg(args) -> PartitionConfig:
    try:
        return PartitionConfig(
            balance_epsilon=args.epsilon,
            restarts=args.restarts,
            seed=args.seed,
            ignore_globals=args.ignore_globals,
        )
    except ValueError as exc:
        raise InputError(str(exc)) from None


def _run_analysis(blif_path, net_path, arch, cfg, args, workers):
    prepack = parse_blif(_read(blif_path))
    inputs = {"blif": os.path.basename(blif_path)}
    extra = dict(drop_top_depths=args.drop_top_depths, tol=args.tol, include_clocks=args.include_clocks)
    t = None
    if net_path is None:
        fit, pts, _ = prepack_fit(prepack, cfg, args.drop_top_depths, workers)
        fits, points, rep = {Region.PREPACK: fit}, {Region.PREPACK: pts}, None
        t = terminals_per_block(prepack, cfg.ignore_globals and not args.include_clocks)
    else:
        cm = parse_vpr_net(_read(net_path), prepack, cfg.ignore_globals)
        inputs["net"] = os.path.basename(net_path)
        rep = analyze(prepack, cm, arch, cfg, args.drop_top_depths, args.tol,
                      include_clocks=args.include_clocks, workers=workers)
        fits, points = rep.fits, rep.points
    doc = rp.build_document(prepack, rp.config_dict(cfg, arch, **extra), fits, points, rep, inputs, t)
    return doc, fits, points, prepack


def _summary(doc) -> str:
    lines = [f"design {doc['design']}"]
    for key, val in doc["metrics"].items():
        if isinstance(val, float):
            val = f"{val:.4f}"
        lines.append(f"  {key:<15} {val}")
    return "\n".join(lines) + "\n"


def cmd_analyze(args) -> int:
    arch = read_arch(args.arch)
    cfg = _partition_cfg(args)
    doc, fits, points, prepack = _run_analysis(args.blif, args.net, arch, cfg, args, _workers())
    if args.json:
        _write(args.json, rp.dumps(doc))
    if args.csv:
        _write(args.csv, rp.points_csv(points))
    if args.svg:
        _write(args.svg, rp.rent_plot_svg(points, fits, prepack.name))
    if args.json != "-":
        sys.stdout.write(_summary(doc))
    return EXIT_OK


def _load_report(path) -> dict:
    try:
        doc = json.loads(_read(path))
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise InputError(f"{path} is not a report: {exc}") from None
    if not isinstance(doc, dict) or "metrics" not in doc or "prepack_digest" not in doc:
        raise InputError(f"{path} is not a rentlens report")
    return doc


def cmd_compare(args) -> int:
    labels = tuple(args.labels) if args.labels else ("A", "B")
    if args.reports:
        docs = [_load_report(p) for p in args.reports]
    else:
        if not (args.a and args.b):
            raise InputError("compare needs --a BLIF NET and --b BLIF NET, or --reports A.json B.json")
        arch = read_arch(args.arch)
        cfg = _partition_cfg(args)
        docs = [_run_analysis(blif, net, arch, cfg, args, _workers())[0] for blif, net in (args.a, args.b)]
    if any("D_R" not in d["metrics"] for d in docs):
        raise InputError("both sides need a packed netlist (reports without D_R cannot be compared)")
    if docs[0]["prepack_digest"] != docs[1]["prepack_digest"]:
        raise IncomparableInputs("the two inputs come from different pre-packing netlists")
    rows = rp.compare_rows(docs[0], docs[1])
    sys.stdout.write(rp.format_compare(rows, labels))
    if args.json:
        out = {"labels": list(labels), "rows": [
            {"metric": k, labels[0]: a, labels[1]: b, "delta": d} for k, a, b, d in rows
        ]}
        _write(args.json, json.dumps(out, indent=2) + "\n")
    if args.svg:
        _write(args.svg, rp.compare_svg(docs[0], docs[1], labels))
    return EXIT_OK


def cmd_gen(args) -> int:
    try:
        spec = GenSpec(args.blocks, args.rent, args.t_block, args.seed, args.latch_fraction, args.name or "")
    except ValueError as exc:
        raise InputError(str(exc)) from None
    _write(args.out, write_blif(generate(spec)))
    return EXIT_OK


def cmd_pack(args) -> int:
    arch = read_arch(args.arch)
    try:
        cfg = PackConfig(args.pin_util, SeedPolicy[args.seed_policy], args.allow_unrelated, args.seed)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    netlist = parse_blif(_read(args.blif))
    cm = pack(netlist, arch, cfg)
    _write(args.out, write_net(cm, netlist, arch))
    n_clb = sum(1 for c in cm.clusters if c.kind == "clb")
    singles = sum(1 for c in cm.clusters if c.kind == "clb" and c.B == 1)
    sys.stderr.write(f"{n_clb} clusters, {singles} singletons, input limit {cfg.input_limit(arch)}\n")
    if cm.diagnostics:
        sys.stderr.write(f"{len(cm.diagnostics)} primitives exceed the input limit alone (singleton clusters)\n")
    return EXIT_OK


def cmd_partition(args) -> int:
    cfg = _partition_cfg(args)
    netlist = parse_blif(_read(args.blif))
    fit, pts, tree = prepack_fit(netlist, cfg, args.drop_top_depths, _workers())
    if args.points:
        _write(args.points, rp.points_csv({Region.PREPACK: pts}))
    sys.stdout.write(
        f"design {netlist.name}: {tree.B} blocks, root T={tree.T}, "
        f"{sum(1 for _ in tree.walk())} tree nodes\n  t={fit.t:.4f} r={fit.r:.4f} ({fit.n_points} points)\n"
    )
    return EXIT_OK


def _add_partition_args(p):
    p.add_argument("--seed", type=int, default=0, help="partitioner seed")
    p.add_argument("--restarts", type=int, default=10)
    p.add_argument("--epsilon", type=float, default=0.1, help="balance tolerance")
    p.add_argument("--ignore-globals", action=argparse.BooleanOptionalAction, default=True,
                   help="leave clock/global nets out of cut and terminal counts (default: on)")
    p.add_argument("--drop-top-depths", type=int, default=1)


def _add_analysis_args(p):
    _add_partition_args(p)
    p.add_argument("--arch", help="architecture key=value file")
    p.add_argument("--tol", type=float, default=0.05, help="RModerate band around D_R = 1")
    p.add_argument("--include-clocks", action="store_true", help="count clock pins in T_avg")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rentlens", description="Post-packing Rent analysis of FPGA netlists.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="Rent fits and packing density of one design")
    p.add_argument("--blif", required=True)
    p.add_argument("--net", help="packed .net file; without it only the pre-packing fit is reported")
    p.add_argument("--json", help="report path, '-' for stdout")
    p.add_argument("--csv", help="Rent points CSV")
    p.add_argument("--svg", help="Rent plot SVG")
    _add_analysis_args(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("compare", help="compare two packings of the same netlist")
    p.add_argument("--a", nargs=2, metavar=("BLIF", "NET"))
    p.add_argument("--b", nargs=2, metavar=("BLIF", "NET"))
    p.add_argument("--reports", nargs=2, metavar="JSON")
    p.add_argument("--labels", nargs=2)
    p.add_argument("--json")
    p.add_argument("--svg")
    _add_analysis_args(p)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("gen", help="generate a synthetic netlist with a target Rent exponent")
    p.add_argument("--blocks", type=int, required=True)
    p.add_argument("--rent", type=float, required=True)
    p.add_argument("--t-block", type=int, default=5)
    p.add_argument("--latch-fraction", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--name")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("pack", help="greedy seed-based packing")
    p.add_argument("--blif", required=True)
    p.add_argument("--pin-util", type=float, default=1.0)
    p.add_argument("--arch")
    p.add_argument("--seed-policy", choices=[s.name for s in SeedPolicy], default="MOST_PINS")
    p.add_argument("--allow-unrelated", action="store_true")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_pack)

    p = sub.add_parser("partition", help="recursive bipartition and pre-packing Rent fit")
    p.add_argument("--blif", required=True)
    p.add_argument("--points", help="write Rent points CSV")
    _add_partition_args(p)
    p.set_defaults(func=cmd_partition)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    logging.basicConfig(format="%(levelname)s: %(message)s", level=logging.INFO if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except (InputError, ParseError, IncomparableInputs) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INPUT
    except RentLensError as exc:
        sys.stderr.write(f"analysis error: {exc}\n")
        return EXIT_ANALYSIS


if __name__ == "__main__":
    sys.exit(main())
