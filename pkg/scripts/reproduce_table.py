#!/usr/bin/env python3
"""Table of packing metrics for the generated gnl_0.4 ... gnl_0.7 family.

For every target exponent a netlist is generated, packed at each pin
utilization, and analysed.  Columns mirror the usual packing comparison:
CLB count, mean used pins, inter/intra exponents and D_R.

    python scripts/reproduce_table.py --blocks 512 --utils 1.0 0.4 --csv table.csv
"""

import argparse
import csv
import logging
import sys
import time

from rentlens import ArchSpec, GenSpec, PackConfig, PartitionConfig, analyze, generate, pack

log = logging.getLogger("reproduce_table")

COLUMNS = ("design", "target_r", "pin_util", "clbs", "B_avg", "T_avg", "r_prepack",
           "r_inter", "r_intra", "D_R", "class", "seconds")


def run(args):
    arch = ArchSpec(args.capacity, args.inputs, args.outputs)
    cfg = PartitionConfig(restarts=args.restarts, seed=args.seed)
    rows = []
    for target in args.rents:
        nl = generate(GenSpec(args.blocks, target, seed=args.seed))
        for util in args.utils:
            start = time.perf_counter()
            cm = pack(nl, arch, PackConfig(util, rng_seed=args.seed))
            rep = analyze(nl, cm, arch, cfg, workers=args.workers)
            rows.append({
                "design": nl.name, "target_r": target, "pin_util": util, "clbs": rep.n_clusters,
                "B_avg": rep.B_avg, "T_avg": rep.T_avg, "r_prepack": rep.r_prepack,
                "r_inter": rep.r_inter, "r_intra": rep.r_intra, "D_R": rep.D_R,
                "class": rep.classification.value, "seconds": time.perf_counter() - start,
            })
            log.info("%s util %.2f: D_R %.4f", nl.name, util, rep.D_R)
    return rows


def fmt(v):
    if v is None:
        return "-"
    return f"{v:.4f}" if isinstance(v, float) else str(v)


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--blocks", type=int, default=512)
    p.add_argument("--rents", type=float, nargs="+", default=[0.4, 0.5, 0.6, 0.7])
    p.add_argument("--utils", type=float, nargs="+", default=[1.0, 0.4])
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--restarts", type=int, default=10)
    p.add_argument("--capacity", type=int, default=10)
    p.add_argument("--inputs", type=int, default=40)
    p.add_argument("--outputs", type=int, default=10)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--csv", help="also write the table as CSV")
    p.add_argument("-v", "--verbose", action="store_true")
    args = p.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")

    rows = run(args)
    widths = {c: max(len(c), *(len(fmt(r[c])) for r in rows)) for c in COLUMNS}
    print("  ".join(c.rjust(widths[c]) for c in COLUMNS))
    for r in rows:
        print("  ".join(fmt(r[c]).rjust(widths[c]) for c in COLUMNS))
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.DictWriter(fh, COLUMNS, lineterminator="\n")
            w.writeheader()
            w.writerows(rows)
    return 0


if __name__ == "__main__":
    sys.exit(main())
