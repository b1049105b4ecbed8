"""Synthetic netlists with a prescribed Rent exponent.

Construction is bottom-up.  Every group of blocks carries a list of open
terminals: output nets that still leave the group and input nets whose
driver is not decided yet.  Two groups are merged by pairing terminals of
one side with terminals of the other until the merged group has exactly
``round(t * B**r)`` terminals left:

* output of one side feeds an open input net of the other and stays open
  (one terminal fewer), or is closed off (two fewer);
* two open input nets, one from each side, are joined into one (one fewer).

A terminal takes part in at most one pairing per merge, so no two terminals
of the same group are ever unified later and every group of the hierarchy
keeps the terminal count it was built with.  What is left open at the top
becomes primary I/O.
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass

from .errors import InfeasibleSpec
from .netlist import BlockKind, Netlist, NetlistBuilder

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class GenSpec:
    n_blocks: int
    target_r: float
    t_block: int = 5
    seed: int = 0
    latch_fraction: float = 0.0
    name: str = ""

    def __post_init__(self):
        if self.n_blocks < 2:
            raise ValueError("n_blocks must be >= 2")
        if not 0 < self.target_r <= 1:
            raise ValueError("target_r must lie in (0, 1]")
        if self.t_block < 2:
            raise ValueError("t_block must be >= 2 (at least one input and one output)")
        if not 0 <= self.latch_fraction <= 1:
            raise ValueError("latch_fraction must lie in [0, 1]")

    @property
    def model_name(self) -> str:
        return self.name or f"gnl_{self.target_r:g}_n{self.n_blocks}_s{self.seed}"


class _Group:
    __slots__ = ("size", "pins", "outs", "ins")

    def __init__(self, size, pins, outs, ins):
        self.size = size
        self.pins = pins  # leaf terminal total, sets the group's t
        self.outs = outs  # block ids whose output net leaves the group
        self.ins = ins  # open input nets: lists of (block, port) sinks

    @property
    def terminals(self) -> int:
        return len(self.outs) + len(self.ins)


def _merge(a: _Group, b: _Group, r: float, rng: random.Random, drivers: dict) -> _Group:
    size = a.size + b.size
    pins = a.pins + b.pins
    target = round(pins / size * size ** r)
    have = a.terminals + b.terminals
    if target > have:
        raise InfeasibleSpec(f"group of {size} blocks needs {target} terminals but only {have} pins are open")
    need = have - target

    # terminals still unpaired in this merge, per side
    free = [
        (list(a.outs), list(range(len(a.ins)))),
        (list(b.outs), list(range(len(b.ins)))),
    ]
    for outs, ins in free:
        rng.shuffle(outs)
        rng.shuffle(ins)
    sides = (a, b)
    closed_outs = set()
    dead_ins = [set(), set()]
    while need > 0:
        moves = []
        for s in (0, 1):
            o = 1 - s
            if free[s][0] and free[o][1]:
                moves.append(("feed", s))
        if free[0][1] and free[1][1]:
            moves.append(("join", 0))
        if not moves:
            log.warning("merge of %d blocks stops %d terminals above target", size, need)
            break
        kind, s = moves[rng.randrange(len(moves))]
        o = 1 - s
        if kind == "feed":
            drv = free[s][0].pop()
            x = free[o][1].pop()
            for pin in sides[o].ins[x]:
                drivers[pin] = drv
            dead_ins[o].add(x)
            if need >= 2 and rng.random() < 0.5:
                closed_outs.add(drv)
                need -= 2
            else:
                need -= 1
        else:
            x = free[0][1].pop()
            y = free[1][1].pop()
            a.ins[x].extend(b.ins[y])
            dead_ins[1].add(y)
            need -= 1
    outs = [v for v in a.outs + b.outs if v not in closed_outs]
    ins = [net for i, net in enumerate(a.ins) if i not in dead_ins[0]]
    ins += [net for i, net in enumerate(b.ins) if i not in dead_ins[1]]
    return _Group(size, pins, outs, ins)


def generate(spec: GenSpec) -> Netlist:
    """Build a LUT (optionally LUT + latch) netlist following ``spec``."""
    rng = random.Random(f"gnl/{spec.seed}")
    n_inputs = spec.t_block - 1
    is_latch = [rng.random() < spec.latch_fraction for _ in range(spec.n_blocks)]
    drivers: dict[tuple[int, str], int | str] = {}
    groups = []
    for i in range(spec.n_blocks):
        ports = ["D"] if is_latch[i] else [f"in{k}" for k in range(n_inputs)]
        groups.append(_Group(1, len(ports) + 1, [i], [[(i, p)] for p in ports]))

    while len(groups) > 1:
        rng.shuffle(groups)
        merged = [_merge(groups[k], groups[k + 1], spec.target_r, rng, drivers) for k in range(0, len(groups) - 1, 2)]
        if len(groups) % 2:
            merged.append(groups[-1])
        groups = merged
    top = groups[0]

    b = NetlistBuilder(spec.model_name)
    pi_names = []
    for j, net in enumerate(top.ins):
        name = f"pi{j}"
        pi_names.append(name)
        for pin in net:
            drivers[pin] = name
    for name in pi_names:
        blk = b.add_block(name, BlockKind.PRIMARY_INPUT)
        b.drive(name, blk, "inpad")
    if any(is_latch):
        clk = b.add_block("clk", BlockKind.PRIMARY_INPUT)
        b.drive("clk", clk, "inpad")
        b.mark_global("clk")
    offset = len(b._blocks)
    for i in range(spec.n_blocks):
        if is_latch[i]:
            b.add_block(f"n{i}", BlockKind.LATCH, ("re", "clk", "0"))
        else:
            b.add_block(f"n{i}", BlockKind.LUT, ("1" * n_inputs + " 1",))
    for i in range(spec.n_blocks):
        blk = offset + i
        b.drive(f"n{i}", blk, "Q" if is_latch[i] else "out")
        ports = ["D"] if is_latch[i] else [f"in{k}" for k in range(n_inputs)]
        for p in ports:
            drv = drivers[(i, p)]
            b.sink(drv if isinstance(drv, str) else f"n{drv}", blk, p)
        if is_latch[i]:
            b.sink("clk", blk, "clk")
    for i in sorted(top.outs):
        blk = b.add_block(f"out:n{i}", BlockKind.PRIMARY_OUTPUT)
        b.sink(f"n{i}", blk, "outpad")
    return b.build()


def sweep(specs, cfg=None, workers: int = 1):
    """Generate each spec and measure its pre-packing Rent exponent.

    Returns a list of ``(spec, netlist, fitted_r)``.
    """
    from .partition import PartitionConfig
    from .rent import prepack_fit

    cfg = cfg or PartitionConfig()
    out = []
    for spec in specs:
        netlist = generate(spec)
        fit, _, _ = prepack_fit(netlist, cfg, workers=workers)
        out.append((spec, netlist, fit.r))
    return out
