"""Rent points, Rent fits and the packing-density metrics.

Points are harvested one per tree depth (geometric means of B and T over
the nodes at that depth, weighted by node count) and fitted by weighted
least squares in log-log space.  ``analyze`` runs the full pipeline on a
pre-packing netlist plus a clustering: pre-packing, intra-CLB and inter-CLB
Rent plots, the estimated cluster size ``B*`` from the pre-packing law and
the density ratio ``D_R = B_avg / B*``.
"""

from __future__ import annotations

import enum
import math
from collections import defaultdict
from dataclasses import dataclass, field
from statistics import fmean

from .errors import DegenerateAbscissa, DomainError, EmptyTree, InsufficientPoints
from .netlist import Netlist, induced_subnetlist
from .packer import ArchSpec
from .partition import PartitionConfig, PartitionNode, external_terminals, recursive_partition
from .vprnet import ClusterMap, cluster_averages, cluster_netlist

WEIGHTING = "depth-aggregated geometric means, weight = node count per depth"


class Region(enum.Enum):
    PREPACK = "PREPACK"
    INTRA_CLB = "INTRA_CLB"
    INTER_CLB = "INTER_CLB"


class Classification(enum.Enum):
    RDENSE = "RDENSE"
    RSPARSE = "RSPARSE"
    RMODERATE = "RMODERATE"


@dataclass(frozen=True)
class RentPoint:
    B: float
    T: float
    depth: int
    weight: float
    region: Region


@dataclass(frozen=True)
class RentFit:
    t: float
    r: float
    rss: float
    n_points: int

    def predict(self, B: float) -> float:
        return self.t * B ** self.r


@dataclass(frozen=True)
class DensityReport:
    t: float
    r_prepack: float
    r_intra: float | None
    r_inter: float | None
    B_avg: float
    T_avg: float
    B_star: float
    D_R: float
    D_B: float
    D_T: float
    classification: Classification
    breakpoint: tuple[float, float] | None = None
    n_clusters: int = 0
    tol: float = 0.05
    fits: dict = field(default_factory=dict, compare=False)
    points: dict = field(default_factory=dict, compare=False)


# -- points and fits -----------------------------------------------------------

def _geomean(values) -> float:
    # exp(log(x)) is not always x; keep uniform depths exact
    if all(v == values[0] for v in values):
        return float(values[0])
    return math.exp(fmean(math.log(v) for v in values))


def collect_points(tree, region: Region = Region.PREPACK) -> list[RentPoint]:
    """One point per depth, pooled over one tree or a list of trees."""
    trees = [tree] if isinstance(tree, PartitionNode) else list(tree)
    if not trees:
        raise EmptyTree("no partition tree given")
    by_depth: dict[int, list[tuple[int, int]]] = defaultdict(list)
    for root in trees:
        for node in root.walk():
            if node.T > 0 and node.B > 0:
                by_depth[node.depth].append((node.B, node.T))
    points = []
    for depth in sorted(by_depth):
        nodes = by_depth[depth]
        b = _geomean([x for x, _ in nodes])
        t = _geomean([y for _, y in nodes])
        points.append(RentPoint(b, t, depth, float(len(nodes)), region))
    return points


def _wls(xs, ys, ws):
    W = math.fsum(ws)
    xm = math.fsum(w * x for w, x in zip(ws, xs)) / W
    ym = math.fsum(w * y for w, y in zip(ws, ys)) / W
    sxx = math.fsum(w * (x - xm) ** 2 for w, x in zip(ws, xs))
    if sxx <= 1e-300 or all(x == xs[0] for x in xs):
        raise DegenerateAbscissa("all points share the same block count")
    sxy = math.fsum(w * (x - xm) * (y - ym) for w, x, y in zip(ws, xs, ys))
    slope = sxy / sxx
    icpt = ym - slope * xm
    rss = math.fsum(w * (y - icpt - slope * x) ** 2 for w, x, y in zip(ws, xs, ys))
    return icpt, slope, rss


def fit_rent(points, drop_top_depths: int = 0) -> RentFit:
    """Weighted least squares of log T on log B after dropping shallow depths."""
    depths = sorted({p.depth for p in points})
    dropped = set(depths[:max(0, drop_top_depths)])
    used = [p for p in points if p.depth not in dropped and p.B > 0 and p.T > 0]
    if len(used) < 2:
        raise InsufficientPoints(f"{len(used)} usable points, need at least 2")
    icpt, slope, rss = _wls([math.log(p.B) for p in used], [math.log(p.T) for p in used],
                            [p.weight for p in used])
    return RentFit(math.exp(icpt), slope, rss, len(used))


def two_segment_fit(points):
    """Best split of the points (ordered by B) into two Rent segments.

    Every split leaving at least two points on each side is tried; the one
    with the lowest summed weighted log-space RSS wins (first on ties).
    The breakpoint is where the two fitted lines cross, clamped to the gap
    between the segments.
    """
    pts = sorted(points, key=lambda p: (p.B, p.depth))
    if len(pts) < 4:
        raise InsufficientPoints(f"{len(pts)} points, a two-segment fit needs at least 4")
    best = None
    for i in range(2, len(pts) - 1):
        try:
            left = fit_rent(pts[:i])
            right = fit_rent(pts[i:])
        except DegenerateAbscissa:
            continue
        total = left.rss + right.rss
        if best is None or total < best[0] - 1e-15 * max(1.0, best[0]):
            best = (total, i, left, right)
    if best is None:
        raise InsufficientPoints("no split gives two fittable segments")
    _, i, left, right = best
    lo, hi = pts[i - 1].B, pts[i].B
    if left.r != right.r:
        cross = math.exp((math.log(right.t) - math.log(left.t)) / (left.r - right.r))
        bp = min(max(cross, lo), hi)
    else:
        bp = lo
    return left, right, bp


# -- density metrics -------------------------------------------------------------

def estimate_bstar(T_avg: float, t: float, r: float) -> float:
    """Cluster size the pre-packing Rent law predicts for ``T_avg`` terminals."""
    if not (T_avg > 0 and t > 0 and r > 0):
        raise DomainError(f"need T_avg, t, r > 0 (got {T_avg}, {t}, {r})")
    return (T_avg / t) ** (1.0 / r)


def classify(D_R: float, tol: float = 0.05) -> Classification:
    if D_R > 1 + tol:
        return Classification.RDENSE
    if D_R < 1 - tol:
        return Classification.RSPARSE
    return Classification.RMODERATE


def rdensity(B_avg: float, B_star: float, tol: float = 0.05):
    if not (B_avg > 0 and B_star > 0 and tol >= 0):
        raise DomainError(f"need B_avg, B_star > 0 and tol >= 0 (got {B_avg}, {B_star}, {tol})")
    d = B_avg / B_star
    return d, classify(d, tol)


def utilization_density(cm: ClusterMap, arch: ArchSpec, kind: str = "clb", include_clocks: bool = False):
    """Plain utilization: (mean fill / capacity, mean used pins / total pins)."""
    if arch.cluster_capacity <= 0 or arch.total_pins <= 0:
        raise DomainError("architecture capacities must be positive")
    b_avg, t_avg, _ = cluster_averages(cm, kind, include_clocks)
    return b_avg / arch.cluster_capacity, t_avg / arch.total_pins


# -- pipeline ------------------------------------------------------------------

def prepack_fit(netlist: Netlist, cfg: PartitionConfig, drop_top_depths: int = 1, workers: int = 1):
    """Partition the pre-packing netlist and fit it: ``(fit, points, tree)``."""
    tree = recursive_partition(netlist, cfg, workers=workers)
    points = collect_points(tree, Region.PREPACK)
    return fit_rent(points, drop_top_depths), points, tree


def terminals_per_block(netlist: Netlist, ignore_globals: bool = True) -> float:
    """Mean external terminals of a single logic primitive: the ``t`` of the Rent law."""
    logic = netlist.logic_ids
    if not logic:
        raise EmptyTree(f"netlist {netlist.name!r} has no logic blocks")
    return fmean(external_terminals(netlist, (b,), ignore_globals) for b in logic)


def intra_points(prepack: Netlist, cm: ClusterMap, cfg: PartitionConfig, kind: str = "clb", workers: int = 1):
    trees = []
    for c in cm.of_kind(kind):
        sub = induced_subnetlist(prepack, c.primitives)
        trees.append(recursive_partition(sub, cfg, workers=workers))
    return collect_points(trees, Region.INTRA_CLB) if trees else []


def inter_points(prepack: Netlist, cm: ClusterMap, cfg: PartitionConfig, workers: int = 1):
    if len(cm.logic_clusters) < 2:
        return []
    cnet, weights = cluster_netlist(prepack, cm)
    tree = recursive_partition(cnet, cfg, weights=weights, workers=workers)
    return collect_points(tree, Region.INTER_CLB)


def _try_fit(points, drop):
    try:
        return fit_rent(points, drop)
    except (InsufficientPoints, DegenerateAbscissa):
        return None


def analyze(prepack: Netlist, cm: ClusterMap, arch: ArchSpec, cfg: PartitionConfig,
            drop_top_depths: int = 1, tol: float = 0.05, kind: str = "clb",
            include_clocks: bool = False, workers: int = 1) -> DensityReport:
    """Full post-packing analysis of one packed design.

    ``t`` (mean terminals per primitive) and ``r_prepack`` always come from
    the pre-packing netlist, so a packing that leaves every primitive alone
    has ``D_R = 1`` exactly.  The
    intra-CLB fit pools the partition trees of every cluster by depth and
    keeps all depths; the inter-CLB fit partitions the cluster-level
    netlist with clusters weighted by primitive count and drops the same
    shallow depths as the pre-packing fit.
    """
    pre_fit, pre_pts, _ = prepack_fit(prepack, cfg, drop_top_depths, workers)
    b_avg, t_avg, n_clusters = cluster_averages(cm, kind, include_clocks)
    d_b, d_t = utilization_density(cm, arch, kind, include_clocks)

    in_pts = intra_points(prepack, cm, cfg, kind, workers)
    in_fit = _try_fit(in_pts, 0)
    out_pts = inter_points(prepack, cm, cfg, workers)
    out_fit = _try_fit(out_pts, drop_top_depths)
    breakpoint = None
    if len(out_pts) >= 4:
        try:
            left, _, bp = two_segment_fit(out_pts)
            breakpoint = (bp, left.predict(bp))
        except InsufficientPoints:
            pass

    t = terminals_per_block(prepack, cfg.ignore_globals and not include_clocks)
    b_star = estimate_bstar(t_avg, t, pre_fit.r)
    d_r, cls = rdensity(b_avg, b_star, tol)
    return DensityReport(
        t=t,
        r_prepack=pre_fit.r,
        r_intra=in_fit.r if in_fit else None,
        r_inter=out_fit.r if out_fit else None,
        B_avg=b_avg,
        T_avg=t_avg,
        B_star=b_star,
        D_R=d_r,
        D_B=d_b,
        D_T=d_t,
        classification=cls,
        breakpoint=breakpoint,
        n_clusters=n_clusters,
        tol=tol,
        fits={Region.PREPACK: pre_fit, Region.INTRA_CLB: in_fit, Region.INTER_CLB: out_fit},
        points={Region.PREPACK: pre_pts, Region.INTRA_CLB: in_pts, Region.INTER_CLB: out_pts},
    )
