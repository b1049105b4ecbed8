#!/usr/bin/env python3
"""How D_R moves between a loose and a tight pin-utilization target.

Packs one gnl_0.6-style netlist per seed at two targets and prints B_avg,
T_avg, B* and D_R for each, plus the decomposition

    D_R(hi) / D_R(lo) = (B_hi / B_lo) * (T_lo / T_hi) ** (1 / r)

which does not depend on t.  A ratio below 1 means the tighter target
packs denser relative to the pre-packing Rent law.
"""

import argparse
import sys

from rentlens import ArchSpec, GenSpec, PackConfig, PartitionConfig, SeedPolicy, analyze, generate, pack


def main(argv=None):
    p = argparse.ArgumentParser(description="D_R at two pin-utilization targets")
    p.add_argument("--blocks", type=int, default=512)
    p.add_argument("--rent", type=float, default=0.6)
    p.add_argument("--seeds", type=int, nargs="+", default=[1, 2, 3])
    p.add_argument("--hi", type=float, default=1.0)
    p.add_argument("--lo", type=float, default=0.4)
    p.add_argument("--seed-policy", choices=[s.name for s in SeedPolicy], default="MOST_PINS")
    p.add_argument("--allow-unrelated", action="store_true")
    p.add_argument("--restarts", type=int, default=10)
    args = p.parse_args(argv)

    arch = ArchSpec()
    policy = SeedPolicy[args.seed_policy]
    print(f"{'seed':>4} {'util':>5} {'B_avg':>7} {'T_avg':>7} {'B*':>7} {'D_R':>7} {'r':>6}   ratio")
    agree = 0
    for seed in args.seeds:
        nl = generate(GenSpec(args.blocks, args.rent, seed=seed))
        cfg = PartitionConfig(restarts=args.restarts, seed=seed)
        reps = {}
        for util in (args.hi, args.lo):
            cm = pack(nl, arch, PackConfig(util, policy, args.allow_unrelated, seed))
            reps[util] = rep = analyze(nl, cm, arch, cfg)
            print(f"{seed:>4} {util:>5.2f} {rep.B_avg:7.3f} {rep.T_avg:7.3f} {rep.B_star:7.3f} "
                  f"{rep.D_R:7.4f} {rep.r_prepack:6.3f}")
        hi, lo = reps[args.hi], reps[args.lo]
        b_part = hi.B_avg / lo.B_avg
        t_part = (lo.T_avg / hi.T_avg) ** (1 / hi.r_prepack)
        print(f"{'':>46}{hi.D_R / lo.D_R:.4f} = {b_part:.4f} (B) x {t_part:.4f} (T)")
        agree += hi.D_R > lo.D_R
    print(f"D_R({args.hi}) > D_R({args.lo}) in {agree}/{len(args.seeds)} seeds")
    return 0


if __name__ == "__main__":
    sys.exit(main())
