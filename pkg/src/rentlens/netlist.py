"""Hypergraph netlist model shared by every other module.

A :class:`Netlist` is an immutable list of primitive blocks and multi-pin
nets.  Block ids and net ids are dense integers in list order.  Parsers and
the generator build netlists through :class:`NetlistBuilder`.
"""

from __future__ import annotations

import enum
import re
import warnings
from dataclasses import dataclass
from functools import cached_property

from .errors import EmptyNetlist, MultipleDrivers, UndrivenNet, UnknownBlock


class BlockKind(enum.Enum):
    PRIMARY_INPUT = "PRIMARY_INPUT"
    PRIMARY_OUTPUT = "PRIMARY_OUTPUT"
    LUT = "LUT"
    LATCH = "LATCH"
    BLACKBOX = "BLACKBOX"

    @property
    def is_logic(self) -> bool:
        return self in LOGIC_KINDS

    @property
    def is_io(self) -> bool:
        return not self.is_logic


LOGIC_KINDS = frozenset({BlockKind.LUT, BlockKind.LATCH, BlockKind.BLACKBOX})

Pin = tuple[int, str]


@dataclass(frozen=True)
class Block:
    id: int
    name: str
    kind: BlockKind
    pin_count: int
    # Opaque payload kept for writing BLIF back out: cover rows for a LUT,
    # (type, control, init) for a latch, (model,) for a subckt.
    attrs: tuple[str, ...] = ()


@dataclass(frozen=True)
class Net:
    id: int
    name: str
    driver: Pin | None
    sinks: tuple[Pin, ...]
    dangling: bool
    is_global: bool = False
    # True when the net was cut at the edge of an induced subnetlist; the
    # synthetic boundary pin stands in for everything outside.
    boundary: bool = False

    @property
    def pins(self) -> tuple[Pin, ...]:
        if self.driver is None:
            return self.sinks
        return (self.driver,) + self.sinks

    @property
    def total_pins(self) -> int:
        return len(self.sinks) + (self.driver is not None) + self.boundary


@dataclass(frozen=True)
class Netlist:
    name: str
    blocks: tuple[Block, ...]
    nets: tuple[Net, ...]

    @cached_property
    def net_blocks(self) -> tuple[tuple[int, ...], ...]:
        """Distinct block ids touched by each net, in pin order."""
        return tuple(tuple(dict.fromkeys(b for b, _ in net.pins)) for net in self.nets)

    @cached_property
    def block_nets(self) -> tuple[tuple[int, ...], ...]:
        acc: list[list[int]] = [[] for _ in self.blocks]
        for net_id, members in enumerate(self.net_blocks):
            for b in members:
                acc[b].append(net_id)
        return tuple(tuple(a) for a in acc)

    @cached_property
    def block_pins(self) -> tuple[tuple[tuple[str, int, bool], ...], ...]:
        """Per block: (port, net id, is_driver) sorted by port name."""
        acc: list[list[tuple[str, int, bool]]] = [[] for _ in self.blocks]
        for net in self.nets:
            if net.driver is not None:
                acc[net.driver[0]].append((net.driver[1], net.id, True))
            for b, port in net.sinks:
                acc[b].append((port, net.id, False))
        for a in acc:
            a.sort(key=lambda p: _port_key(p[0]))
        return tuple(tuple(a) for a in acc)

    @cached_property
    def logic_ids(self) -> tuple[int, ...]:
        return tuple(b.id for b in self.blocks if b.kind.is_logic)

    @cached_property
    def block_index(self) -> dict[str, int]:
        return {b.name: b.id for b in self.blocks}

    @cached_property
    def net_index(self) -> dict[str, int]:
        return {n.name: n.id for n in self.nets}

    def countable(self, net_id: int, ignore_globals: bool = True) -> bool:
        """Whether a net can ever contribute to a cut or terminal count."""
        net = self.nets[net_id]
        return not net.dangling and not (ignore_globals and net.is_global)


_PORT_RE = re.compile(r"^(.*?)(\d+)$")


def _port_key(port: str):
    m = _PORT_RE.match(port)
    if m:
        return (m.group(1), int(m.group(2)))
    return (port, -1)


class NetlistBuilder:
    """Incrementally assembles a :class:`Netlist`; nets are unified by name."""

    def __init__(self, name: str = "top"):
        self.name = name
        self._blocks: list[tuple[str, BlockKind, tuple[str, ...]]] = []
        self._net_ids: dict[str, int] = {}
        self._net_names: list[str] = []
        self._drivers: list[Pin | None] = []
        self._sinks: list[list[Pin]] = []
        self._globals: set[int] = set()
        self._boundary: set[int] = set()

    def add_block(self, name: str, kind: BlockKind, attrs=()) -> int:
        self._blocks.append((name, kind, tuple(attrs)))
        return len(self._blocks) - 1

    def net(self, name: str) -> int:
        idx = self._net_ids.get(name)
        if idx is None:
            idx = len(self._net_names)
            self._net_ids[name] = idx
            self._net_names.append(name)
            self._drivers.append(None)
            self._sinks.append([])
        return idx

    def has_driver(self, name: str) -> bool:
        idx = self._net_ids.get(name)
        return idx is not None and self._drivers[idx] is not None

    def drive(self, net_name: str, block: int, port: str, line=None) -> None:
        idx = self.net(net_name)
        if self._drivers[idx] is not None:
            raise MultipleDrivers(net_name, line)
        self._drivers[idx] = (block, port)

    def sink(self, net_name: str, block: int, port: str) -> None:
        self._sinks[self.net(net_name)].append((block, port))

    def mark_global(self, net_name: str) -> None:
        self._globals.add(self.net(net_name))

    def mark_boundary(self, net_name: str) -> None:
        self._boundary.add(self.net(net_name))

    def build(self, warn_undriven: bool = True) -> Netlist:
        nets = []
        attached: list[set[int]] = [set() for _ in self._blocks]
        for idx, name in enumerate(self._net_names):
            driver = self._drivers[idx]
            sinks = tuple(self._sinks[idx])
            boundary = idx in self._boundary
            if driver is None and not boundary and sinks and warn_undriven:
                warnings.warn(f"net {name!r} has no driver; marked dangling", UndrivenNet, stacklevel=2)
            total = len(sinks) + (driver is not None) + boundary
            dangling = total < 2 or (driver is None and not boundary)
            nets.append(Net(idx, name, driver, sinks, dangling, idx in self._globals, boundary))
            for b, _ in ((driver,) if driver else ()) + sinks:
                attached[b].add(idx)
        blocks = tuple(
            Block(i, name, kind, len(attached[i]), attrs)
            for i, (name, kind, attrs) in enumerate(self._blocks)
        )
        return Netlist(self.name, blocks, tuple(nets))


def validate(netlist: Netlist) -> None:
    """Assert the structural invariants; raises ``AssertionError`` on violation."""
    n = len(netlist.blocks)
    for i, b in enumerate(netlist.blocks):
        assert b.id == i, f"block id {b.id} at position {i}"
    for i, net in enumerate(netlist.nets):
        assert net.id == i, f"net id {net.id} at position {i}"
        for b, _ in net.pins:
            assert 0 <= b < n, f"net {net.name!r} references block {b}"
        if net.driver is not None:
            assert net.driver not in net.sinks, f"net {net.name!r} driver repeated as sink"
        assert net.dangling == (net.total_pins < 2 or (net.driver is None and not net.boundary))
    for b in netlist.blocks:
        pins = netlist.block_pins[b.id]
        if b.kind is BlockKind.PRIMARY_INPUT:
            assert len(pins) == 1 and pins[0][2], f"input {b.name!r} must drive exactly one net"
        elif b.kind is BlockKind.PRIMARY_OUTPUT:
            assert len(pins) == 1 and not pins[0][2], f"output {b.name!r} must sink exactly one net"


def block_stats(netlist: Netlist) -> tuple[int, int, float]:
    """Return ``(n_blocks, n_nets, t)`` where t is the mean pin count of logic blocks."""
    logic = [b.pin_count for b in netlist.blocks if b.kind.is_logic]
    if not logic:
        raise EmptyNetlist(f"netlist {netlist.name!r} has no logic blocks")
    return len(netlist.blocks), len(netlist.nets), sum(logic) / len(logic)


def induced_subnetlist(netlist: Netlist, block_ids) -> Netlist:
    """Restrict ``netlist`` to ``block_ids``.

    Blocks are renumbered in ascending original-id order.  A net that also
    touches blocks outside the set keeps only its inside pins and gets a
    boundary pin, so terminal counts of the subset are preserved.
    """
    keep = sorted(set(block_ids))
    for b in keep:
        if not isinstance(b, int) or not 0 <= b < len(netlist.blocks):
            raise UnknownBlock(b)
    remap = {old: new for new, old in enumerate(keep)}
    builder = NetlistBuilder(netlist.name)
    for old in keep:
        blk = netlist.blocks[old]
        builder.add_block(blk.name, blk.kind, blk.attrs)
    for net in netlist.nets:
        inside = [(remap[b], port) for b, port in net.pins if b in remap]
        if not inside:
            continue
        # dangling nets stay dangling; a boundary pin would make them countable
        outside = not net.dangling and (net.boundary or any(b not in remap for b, _ in net.pins))
        builder.net(net.name)
        if net.driver is not None and net.driver[0] in remap:
            builder.drive(net.name, remap[net.driver[0]], net.driver[1])
        for b, port in net.sinks:
            if b in remap:
                builder.sink(net.name, remap[b], port)
        if outside:
            builder.mark_boundary(net.name)
        if net.is_global:
            builder.mark_global(net.name)
    return builder.build(warn_undriven=False)


def boundary_pins(netlist: Netlist, ignore_globals: bool = True) -> int:
    """Number of countable nets carrying a synthetic boundary pin."""
    return sum(
        1 for net in netlist.nets
        if net.boundary and netlist.countable(net.id, ignore_globals)
    )
