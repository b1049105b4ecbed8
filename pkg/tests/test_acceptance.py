"""Acceptance gate: one test per criterion, each run at its stated tolerance.

Every test records a ``PASS``/``FAIL`` line; the lines are printed in the
terminal summary of a pytest run, or directly when this file is executed as
a script.
"""

import json
import math
import random
import time
import warnings

import pytest

from rentlens.blif import parse_blif, write_blif
from rentlens.cli import main as cli_main
from rentlens.errors import ParseError
from rentlens.gnl import GenSpec, generate
from rentlens.netlist import block_stats
from rentlens.packer import ArchSpec, PackConfig, pack, write_net
from rentlens.partition import PartitionConfig, bipartition
from rentlens.rent import (
    Classification,
    Region,
    RentPoint,
    analyze,
    estimate_bstar,
    fit_rent,
    prepack_fit,
    rdensity,
    two_segment_fit,
)
from rentlens.vprnet import parse_vpr_net

from conftest import MINIMAL_BLIF, exhaustive_min_cut, hypergraph_netlist, random_hypergraph
from test_blif import LATCH_BLIF, SEED_CORPUS, signature
from test_rent import normal_equations, pts
from test_vprnet import NET, PREPACK

RESULTS = {}


def record(cid, title, passed, detail):
    RESULTS[cid] = f"[{'PASS' if passed else 'FAIL'}] {cid} {title}: {detail}"
    assert passed, RESULTS[cid]


def _density_run(seed, util, arch=ArchSpec()):
    nl = generate(GenSpec(512, 0.6, seed=seed))
    cm = pack(nl, arch, PackConfig(util, rng_seed=seed))
    return analyze(nl, cm, arch, PartitionConfig(seed=seed))


# -- 1 -------------------------------------------------------------------------

def test_c1_exponent_recovery():
    rows, ok = [], True
    for target in (0.4, 0.5, 0.6, 0.7):
        start = time.perf_counter()
        fit, _, _ = prepack_fit(generate(GenSpec(512, target, seed=1)), PartitionConfig())
        elapsed = time.perf_counter() - start
        ok &= abs(fit.r - target) <= 0.07 and elapsed < 60
        rows.append((target, fit.r, elapsed))
    fitted = [r for _, r, _ in rows]
    ok &= all(a < b for a, b in zip(fitted, fitted[1:]))
    detail = ", ".join(f"{t}->{r:.4f} ({s:.1f}s)" for t, r, s in rows)
    record("C1", "exponent recovery (+-0.07, monotone, <60 s)", ok, detail)


# -- 2 -------------------------------------------------------------------------

def test_c2_density_direction():
    rows = []
    for seed in (1, 2, 3):
        hi, lo = _density_run(seed, 1.0), _density_run(seed, 0.4)
        rows.append((seed, hi.D_R, lo.D_R, hi.T_avg, lo.T_avg))
    d_ok = all(h > l for _, h, l, _, _ in rows)
    t_ok = all(th >= tl for *_, th, tl in rows)
    detail = "; ".join(
        f"seed {s}: D_R {h:.4f} vs {l:.4f}, T_avg {th:.2f} vs {tl:.2f}" for s, h, l, th, tl in rows
    )
    record("C2", "density direction D_R(1.0) > D_R(0.4), T_avg(1.0) >= T_avg(0.4)", d_ok and t_ok, detail)


# -- 3 -------------------------------------------------------------------------

def test_c3_classification_replay():
    values = [0.1302, 0.2698, 0.4244, 0.6278, 0.3835, 0.2290, 0.1554]
    classes = [rdensity(v, 1.0, 0.05)[1] for v in values]
    ok = all(c is Classification.RSPARSE for c in classes)
    record("C3", "classification replay", ok, f"{sum(c is Classification.RSPARSE for c in classes)}/7 RSPARSE")


# -- 4 -------------------------------------------------------------------------

def test_c4_formula_identities():
    worst = 0.0
    b_grid = sorted({1, 2, 3, 5, 7, 10, 64, 100, 333, 1000, 4097, 10_000} | set(range(1, 10_001, 97)))
    for t in range(1, 9):
        for k in range(8):
            r = 0.3 + 0.1 * k
            for b in b_grid:
                worst = max(worst, abs(estimate_bstar(t * b ** r, t, r) - b) / b)
    bounds_ok = True
    for tol in (0.05, 0.1, 0.0, 0.2):
        bounds_ok &= rdensity(1 + tol, 1.0, tol)[1] is Classification.RMODERATE
        bounds_ok &= rdensity(1 - tol, 1.0, tol)[1] is Classification.RMODERATE
        bounds_ok &= rdensity(1 + tol + 1e-12, 1.0, tol)[1] is Classification.RDENSE
        bounds_ok &= rdensity(1 - tol - 1e-12, 1.0, tol)[1] is Classification.RSPARSE
    record("C4", "formula identities", worst < 1e-9 and bounds_ok,
           f"max rel error of B* round trip {worst:.2e}, boundaries {'exact' if bounds_ok else 'wrong'}")


# -- 5 -------------------------------------------------------------------------

def test_c5_fit_exactness():
    worst_r = worst_t = 0.0
    for t in (1.0, 2.5, 4.0, 7.3):
        for r in (0.3, 0.5, 0.7, 0.95):
            fit = fit_rent(pts([(b, t * b ** r) for b in (1, 2, 4, 8, 16, 32)]))
            worst_r = max(worst_r, abs(fit.r - r))
            worst_t = max(worst_t, abs(fit.t - t) / t)
    rng = random.Random(5)
    worst_oracle = 0.0
    for _ in range(200):
        bs = sorted(rng.sample(range(1, 5000), rng.randint(3, 12)))
        points = pts([(b, 3.0 * b ** 0.6 * math.exp(rng.gauss(0, 0.2))) for b in bs],
                     [rng.choice([0.5, 1.0, 2.0, 4.0, 8.0]) for _ in bs])
        fit = fit_rent(points)
        t, r = normal_equations(points)
        worst_oracle = max(worst_oracle, abs(fit.r - r), abs(fit.t - t) / t)
    ok = worst_r < 1e-9 and worst_t < 1e-9 and worst_oracle < 1e-9
    record("C5", "fit exactness", ok,
           f"noiseless |dr| {worst_r:.1e}, |dt|/t {worst_t:.1e}; noisy vs oracle {worst_oracle:.1e}")


# -- 6 -------------------------------------------------------------------------

def test_c6_partitioner_quality():
    hits, below = 0, 0
    for seed in range(100):
        nets = random_hypergraph(seed)
        _, _, cut = bipartition(hypergraph_netlist(10, nets), range(10), PartitionConfig(restarts=20, seed=seed))
        opt = exhaustive_min_cut(10, nets, 5)
        hits += cut == opt
        below += cut < opt
    record("C6", "partitioner quality (>= 95/100 optimal, never below)", hits >= 95 and below == 0,
           f"{hits}/100 optimal, {below} below the optimum")


# -- 7 -------------------------------------------------------------------------

def _mutate(rng, data):
    data = bytearray(data)
    for _ in range(rng.randint(1, 6)):
        pos = rng.randrange(max(1, len(data)))
        op = rng.choice(["flip", "insert", "delete", "dup"])
        if op == "flip" and data:
            data[pos] = rng.randrange(256)
        elif op == "insert":
            data[pos:pos] = rng.choice([b".", b"\\", b"\n", b"=", b" ", b".end", b".names", b"\x00", b"\xc3"])
        elif op == "delete":
            del data[pos:pos + rng.randint(1, 8)]
        else:
            data[pos:pos] = data[pos:pos + rng.randint(1, 20)]
    return bytes(data)


def test_c7_parser_correctness():
    counts_ok = block_stats(parse_blif(MINIMAL_BLIF)) == (4, 3, 3.0)
    counts_ok &= len(parse_blif(LATCH_BLIF).blocks) == 6
    prepack = parse_blif(PREPACK)
    (clb,) = parse_vpr_net(NET.encode(), prepack).of_kind("clb")
    counts_ok &= (clb.B, clb.used_pins()) == (2, 4)

    trips = 0
    for seed in range(50):
        nl = generate(GenSpec(16 + 10 * seed, 0.4 + 0.01 * seed, seed=seed, latch_fraction=0.1 * (seed % 3)))
        trips += signature(parse_blif(write_blif(nl))) == signature(nl)
        if seed % 10 == 0:
            cm = pack(nl, ArchSpec(), PackConfig(0.6))
            trips -= parse_vpr_net(write_net(cm, nl), nl) != cm

    rng = random.Random(7)
    stray = []
    for _ in range(500):
        data = _mutate(rng, rng.choice(SEED_CORPUS))
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            try:
                parse_blif(data)
            except ParseError:
                pass
            except Exception as exc:  # anything unstructured is a failure
                stray.append(type(exc).__name__)
        try:
            parse_vpr_net(_mutate(rng, NET.encode()), prepack)
        except ParseError:
            pass
        except Exception as exc:
            stray.append(type(exc).__name__)
    ok = counts_ok and trips == 50 and not stray
    record("C7", "parser correctness", ok,
           f"fixture counts {'exact' if counts_ok else 'wrong'}, {trips}/50 isomorphic round trips, "
           f"{len(stray)} unstructured errors in 1000 mutated inputs")


# -- 8 -------------------------------------------------------------------------

def test_c8_determinism(tmp_path, monkeypatch):
    blif, net = tmp_path / "d.blif", tmp_path / "d.net"
    assert cli_main(["gen", "--blocks", "512", "--rent", "0.6", "--seed", "8", "--out", str(blif)]) == 0
    assert cli_main(["pack", "--blif", str(blif), "--pin-util", "0.7", "--out", str(net)]) == 0
    outputs = []
    for threads in ("1", "1", "8"):
        monkeypatch.setenv("RENTLENS_THREADS", threads)
        out = tmp_path / f"r{len(outputs)}.json"
        assert cli_main(["analyze", "--blif", str(blif), "--net", str(net), "--seed", "3", "--json", str(out)]) == 0
        outputs.append(out.read_bytes())
    same = outputs[0] == outputs[1] == outputs[2]
    d_r = json.loads(outputs[0])["metrics"]["D_R"]
    record("C8", "determinism (repeat run, threads 1 vs 8)", same, f"byte-identical JSON: {same}, D_R {d_r:.6f}")


# -- 9 -------------------------------------------------------------------------

def test_c9_two_segment_structure():
    left = lambda b: 2 * b ** 0.9  # noqa: E731
    right = lambda b: left(64) * (b / 64) ** 0.5  # noqa: E731
    bs = [1, 2, 4, 8, 16, 32, 64, 128, 256, 512, 1024]
    fl, fr, bp = two_segment_fit(pts([(b, left(b) if b <= 64 else right(b)) for b in bs]))
    exact = abs(bp - 64) < 1e-6 * 64 and abs(fl.r - 0.9) < 1e-6 and abs(fr.r - 0.5) < 1e-6

    slopes = []
    for seed in (1, 2, 3):
        rep = _density_run(seed, 0.2)
        sl, sr, _ = two_segment_fit(rep.points[Region.INTER_CLB])
        slopes.append((sl.r, sr.r))
    rising = sum(r >= l for l, r in slopes)
    detail = (f"constructed breakpoint {bp:.6f}, slopes {fl.r:.6f}/{fr.r:.6f}; util 0.2 left/right "
              + ", ".join(f"{l:.3f}/{r:.3f}" for l, r in slopes) + f" ({rising}/3 right >= left)")
    record("C9", "two-segment structure", exact and rising >= 2, detail)


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
