"""Multilevel recursive min-cut bipartitioning.

Each bipartition coarsens the hypergraph by heavy-edge matching, splits the
coarsest level at random under the balance bound, and refines with
Fiduccia-Mattheyses passes on the way back up.  The best of ``restarts``
independent runs is kept.  Every tree node draws its random stream from
``(seed, path)`` so the tree does not depend on evaluation order or on the
number of worker threads.
"""

from __future__ import annotations

import heapq
import math
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .errors import EmptyNetlist, InfeasibleBalance, TooSmall
from .netlist import Netlist

COARSEST_SIZE = 64
MATCH_NET_LIMIT = 50
MAX_FM_PASSES = 16


@dataclass(frozen=True)
class PartitionConfig:
    balance_epsilon: float = 0.1
    restarts: int = 10
    seed: int = 0
    leaf_threshold: int = 1
    coarsen_ratio: float = 0.5
    ignore_globals: bool = True

    def __post_init__(self):
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if not 0 <= self.balance_epsilon < 0.5:
            raise ValueError("balance_epsilon must lie in [0, 0.5)")
        if not 0 < self.coarsen_ratio < 1:
            raise ValueError("coarsen_ratio must lie in (0, 1)")
        if self.leaf_threshold < 1:
            raise ValueError("leaf_threshold must be >= 1")


@dataclass(frozen=True)
class PartitionNode:
    depth: int
    block_ids: frozenset
    B: int
    T: int
    children: tuple = ()
    cut: int = 0
    path: str = field(default="", compare=False)

    @property
    def is_leaf(self) -> bool:
        return not self.children

    def walk(self):
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.children))


# -- terminal counting ---------------------------------------------------------

def external_terminals(netlist: Netlist, block_ids, ignore_globals: bool = True) -> int:
    """Count distinct countable nets with pins both inside and outside ``block_ids``.

    A boundary pin on an induced subnetlist counts as an outside pin.
    """
    inside = block_ids if isinstance(block_ids, (set, frozenset)) else set(block_ids)
    net_blocks = netlist.net_blocks
    nets = netlist.nets
    seen = set()
    count = 0
    for b in inside:
        for e in netlist.block_nets[b]:
            if e in seen:
                continue
            seen.add(e)
            if not netlist.countable(e, ignore_globals):
                continue
            if nets[e].boundary or any(m not in inside for m in net_blocks[e]):
                count += 1
    return count


# -- internal hypergraph -------------------------------------------------------

class _Hypergraph:
    __slots__ = ("weights", "nets", "net_weights", "node_nets", "total")

    def __init__(self, weights, nets, net_weights):
        self.weights = weights
        merged: dict[tuple, int] = {}
        for pins, w in zip(nets, net_weights):
            if len(pins) >= 2:
                merged[pins] = merged.get(pins, 0) + w
        self.nets = list(merged)
        self.net_weights = list(merged.values())
        self.node_nets = [[] for _ in weights]
        for e, pins in enumerate(self.nets):
            for v in pins:
                self.node_nets[v].append(e)
        self.total = sum(weights)


def _local_hypergraph(netlist: Netlist, nodes: list[int], weights, ignore_globals: bool) -> _Hypergraph:
    local = {b: i for i, b in enumerate(nodes)}
    seen = set()
    nets = []
    for b in nodes:
        for e in netlist.block_nets[b]:
            if e in seen:
                continue
            seen.add(e)
            if not netlist.countable(e, ignore_globals):
                continue
            pins = tuple(sorted(local[m] for m in netlist.net_blocks[e] if m in local))
            if len(pins) >= 2:
                nets.append((e, pins))
    nets.sort()
    return _Hypergraph([weights(b) for b in nodes], [p for _, p in nets], [1] * len(nets))


def _coarsen(hg: _Hypergraph, rng: random.Random, max_weight: int, ratio: float):
    n = len(hg.weights)
    order = list(range(n))
    rng.shuffle(order)
    match = [-1] * n
    target = ratio * n
    remaining = n
    for u in order:
        if remaining <= target:
            break
        if match[u] != -1:
            continue
        wu = hg.weights[u]
        rating: dict[int, float] = {}
        for e in hg.node_nets[u]:
            pins = hg.nets[e]
            if len(pins) > MATCH_NET_LIMIT:
                continue
            s = hg.net_weights[e] / (len(pins) - 1)
            for v in pins:
                if v != u and match[v] == -1 and wu + hg.weights[v] <= max_weight:
                    rating[v] = rating.get(v, 0.0) + s
        if rating:
            best = min(rating, key=lambda v: (-rating[v], v))
            match[u] = best
            match[best] = u
            remaining -= 1
    cmap = [-1] * n
    weights = []
    for u in range(n):
        if cmap[u] != -1:
            continue
        cmap[u] = len(weights)
        w = hg.weights[u]
        if match[u] != -1:
            cmap[match[u]] = len(weights)
            w += hg.weights[match[u]]
        weights.append(w)
    nets = [tuple(sorted({cmap[v] for v in pins})) for pins in hg.nets]
    return _Hypergraph(weights, nets, hg.net_weights), cmap


def _cut(hg: _Hypergraph, side) -> int:
    total = 0
    for pins, w in zip(hg.nets, hg.net_weights):
        s0 = side[pins[0]]
        if any(side[v] != s0 for v in pins):
            total += w
    return total


def _initial_split(hg: _Hypergraph, rng: random.Random, max_side: int) -> list[int]:
    order = list(range(len(hg.weights)))
    rng.shuffle(order)
    side = [0] * len(order)
    load = [0, 0]
    for v in order:
        s = 0 if load[0] <= load[1] else 1
        side[v] = s
        load[s] += hg.weights[v]
    if max(load) <= max_side:
        return side
    return _lpt_split(hg.weights)[0]


def _lpt_split(weights) -> tuple[list[int], int]:
    """Largest-first greedy split; returns (side, heavier side weight)."""
    side = [0] * len(weights)
    load = [0, 0]
    for v in sorted(range(len(weights)), key=lambda v: (-weights[v], v)):
        s = 0 if load[0] <= load[1] else 1
        side[v] = s
        load[s] += weights[v]
    return side, max(load)


def _fm(hg: _Hypergraph, side: list[int], max_side: int) -> list[int]:
    """Fiduccia-Mattheyses refinement, repeated until a pass gains nothing.

    Moves are picked by highest gain, ties to the lowest node index.  Inside
    a pass a side may exceed ``max_side`` by one heaviest node so that tight
    bounds still admit swaps; the pass is rolled back to its best prefix
    (lowest cut, then best balance) among prefixes within ``max_side``.
    """
    n = len(hg.weights)
    w = hg.weights
    nets = hg.nets
    nw = hg.net_weights
    node_nets = hg.node_nets
    side = list(side)
    min_w = min(w) if w else 1
    slack_side = max_side + (max(w) if w else 0)
    for _ in range(MAX_FM_PASSES):
        load = [0, 0]
        for v in range(n):
            load[side[v]] += w[v]
        cnt = []
        for pins in nets:
            c = [0, 0]
            for v in pins:
                c[side[v]] += 1
            cnt.append(c)
        cut = sum(we for c, we in zip(cnt, nw) if c[0] and c[1])
        gain = [0] * n
        for pins, c, we in zip(nets, cnt, nw):
            for v in pins:
                s = side[v]
                if c[s] == 1:
                    gain[v] += we
                if c[1 - s] == 0:
                    gain[v] -= we
        heaps = [[], []]
        for v in range(n):
            heaps[side[v]].append((-gain[v], v))
        heapq.heapify(heaps[0])
        heapq.heapify(heaps[1])
        locked = [False] * n
        moves = []
        start_imb = abs(load[0] - load[1])
        best = (cut, start_imb)
        best_len = 0
        cur = cut
        while True:
            choice = None
            for s in (0, 1):
                room = slack_side - load[1 - s]
                if room < min_w:
                    continue
                h = heaps[s]
                stash = []
                cand = None
                while h:
                    g, v = h[0]
                    if locked[v] or side[v] != s or -g != gain[v]:
                        heapq.heappop(h)
                        continue
                    if w[v] <= room:
                        cand = (-g, v)
                        break
                    stash.append(heapq.heappop(h))
                for item in stash:
                    heapq.heappush(h, item)
                if cand is not None and (
                    choice is None or cand[0] > choice[0] or (cand[0] == choice[0] and cand[1] < choice[1])
                ):
                    choice = (cand[0], cand[1], s)
            if choice is None:
                break
            g, u, f = choice
            t = 1 - f
            locked[u] = True
            touched = set()
            for e in node_nets[u]:
                c = cnt[e]
                we = nw[e]
                pins = nets[e]
                if c[t] == 0:
                    for v in pins:
                        if not locked[v]:
                            gain[v] += we
                            touched.add(v)
                elif c[t] == 1:
                    for v in pins:
                        if side[v] == t and not locked[v]:
                            gain[v] -= we
                            touched.add(v)
                c[f] -= 1
                c[t] += 1
                if c[f] == 0:
                    for v in pins:
                        if not locked[v]:
                            gain[v] -= we
                            touched.add(v)
                elif c[f] == 1:
                    for v in pins:
                        if side[v] == f and not locked[v]:
                            gain[v] += we
                            touched.add(v)
            side[u] = t
            load[f] -= w[u]
            load[t] += w[u]
            for v in touched:
                heapq.heappush(heaps[side[v]], (-gain[v], v))
            cur -= g
            moves.append(u)
            key = (cur, abs(load[0] - load[1]))
            if key < best and max(load) <= max_side:
                best = key
                best_len = len(moves)
        for u in moves[best_len:]:
            side[u] = 1 - side[u]
        if best_len == 0:
            break
    return side


def _side_bound(total: int, eps: float) -> int:
    return max(math.floor((1 + eps) * total / 2 + 1e-9), math.ceil(total / 2))


def _multilevel(hg: _Hypergraph, rng: random.Random, max_side: int, cfg: PartitionConfig) -> list[int]:
    levels = [hg]
    maps = []
    cap = max(max(hg.weights), hg.total // 8)
    while len(levels[-1].weights) > COARSEST_SIZE:
        coarse, cmap = _coarsen(levels[-1], rng, cap, cfg.coarsen_ratio)
        if len(coarse.weights) > 0.95 * len(levels[-1].weights):
            break
        levels.append(coarse)
        maps.append(cmap)
    side = _initial_split(levels[-1], rng, max_side)
    side = _fm(levels[-1], side, max_side)
    for lvl in range(len(maps) - 1, -1, -1):
        cmap = maps[lvl]
        side = [side[cmap[v]] for v in range(len(levels[lvl].weights))]
        side = _fm(levels[lvl], side, max_side)
    return side


def _best_split(hg: _Hypergraph, cfg: PartitionConfig, path: str, max_side: int):
    best = None
    for k in range(cfg.restarts):
        rng = random.Random(f"{cfg.seed}/{path}/{k}")
        side = _multilevel(hg, rng, max_side, cfg)
        load1 = sum(w for w, s in zip(hg.weights, side) if s)
        key = (_cut(hg, side), abs(hg.total - 2 * load1))
        if best is None or key < best[0]:
            best = (key, side)
    return best[1], best[0][0]


def bipartition(netlist: Netlist, block_ids, cfg: PartitionConfig, weights=None, path: str = ""):
    """Split ``block_ids`` into two balanced halves with a small cut.

    ``weights`` maps block id to weight (default 1 each).  Balance means
    ``|w(A) - w(B)| <= balance_epsilon * total``, relaxed only as far as
    integer weights force it.  Returns ``(A, B, cut)`` with ``A`` holding
    the lowest block id.
    """
    nodes = sorted(set(block_ids))
    if len(nodes) < 2:
        raise TooSmall(f"need at least 2 blocks to bipartition, got {len(nodes)}")
    wfun = (lambda b: 1) if weights is None else (lambda b: weights[b])
    hg = _local_hypergraph(netlist, nodes, wfun, cfg.ignore_globals)
    max_side = _side_bound(hg.total, cfg.balance_epsilon)
    heaviest = max(hg.weights)
    if heaviest > max_side:
        raise InfeasibleBalance(
            f"block weight {heaviest} exceeds the allowed side weight {max_side} of {hg.total}"
        )
    max_side = max(max_side, _lpt_split(hg.weights)[1])
    side, cut = _best_split(hg, cfg, path, max_side)
    return _orient(nodes, side, cut)


def _orient(nodes, side, cut):
    a = frozenset(b for b, s in zip(nodes, side) if s == side[0])
    b = frozenset(nodes) - a
    return a, b, cut


def _split_node(netlist, nodes, cfg, weights, path):
    """Bipartition inside recursion: never fails on weight granularity."""
    wfun = (lambda b: 1) if weights is None else (lambda b: weights[b])
    hg = _local_hypergraph(netlist, nodes, wfun, cfg.ignore_globals)
    max_side = max(_side_bound(hg.total, cfg.balance_epsilon), _lpt_split(hg.weights)[1])
    side, cut = _best_split(hg, cfg, path, max_side)
    return _orient(nodes, side, cut)


def recursive_partition(netlist: Netlist, cfg: PartitionConfig, weights=None, workers: int = 1) -> PartitionNode:
    """Build the full recursive bipartition tree over the logic blocks.

    Nodes are annotated with ``B`` (total weight, i.e. primitive count) and
    ``T`` (external terminals).  Recursion stops when ``B <= leaf_threshold``
    or a node holds a single block.  Each depth is processed as one batch,
    optionally spread over ``workers`` threads.
    """
    roots = list(netlist.logic_ids)
    if not roots:
        raise EmptyNetlist(f"netlist {netlist.name!r} has no logic blocks")
    wfun = (lambda b: 1) if weights is None else (lambda b: weights[b])

    def make(ids, depth, path):
        return {
            "ids": ids,
            "depth": depth,
            "path": path,
            "B": sum(wfun(b) for b in ids),
            "T": external_terminals(netlist, ids, cfg.ignore_globals),
            "children": (),
            "cut": 0,
        }

    def expand(rec):
        ids = rec["ids"]
        if rec["B"] <= cfg.leaf_threshold or len(ids) < 2:
            return None
        a, b, cut = _split_node(netlist, sorted(ids), cfg, weights, rec["path"])
        return cut, make(a, rec["depth"] + 1, rec["path"] + "0"), make(b, rec["depth"] + 1, rec["path"] + "1")

    root = make(frozenset(roots), 0, "")
    frontier = [root]
    pool = ThreadPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        while frontier:
            results = list(pool.map(expand, frontier)) if pool else [expand(r) for r in frontier]
            nxt = []
            for rec, res in zip(frontier, results):
                if res is None:
                    continue
                rec["cut"] = res[0]
                rec["children"] = (res[1], res[2])
                nxt.extend(res[1:])
            frontier = nxt
    finally:
        if pool:
            pool.shutdown()

    def freeze(rec):
        return PartitionNode(
            rec["depth"], rec["ids"], rec["B"], rec["T"],
            tuple(freeze(c) for c in rec["children"]), rec["cut"], rec["path"],
        )

    return freeze(root)
