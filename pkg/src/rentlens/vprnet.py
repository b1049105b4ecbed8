"""Reader for VPR packed netlists (``.net`` XML) and the cluster model.

Only the top two levels carry meaning here: the root ``<block>`` and its
cluster children (``clb[i]``, ``io[i]``, ...).  Pin usage of a cluster is
read from its own ``<inputs>/<outputs>/<clocks>`` port lists; primitives are
the named leaf ``<block>`` elements anywhere below it.  Intermediate mode
levels are walked but not modelled.
"""

from __future__ import annotations

import logging
import re
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from statistics import fmean

from .errors import EmptyCluster, NoSuchKind, UnknownPrimitive, XmlError
from .netlist import BlockKind, Netlist, NetlistBuilder

log = logging.getLogger(__name__)

IO_KIND = "io"
_INSTANCE_RE = re.compile(r"^\s*([^\[\s]+)\s*(?:\[\s*(\d+)\s*\])?\s*$")


@dataclass(frozen=True)
class Cluster:
    id: int
    name: str
    kind: str
    primitives: frozenset
    used_input_pins: int
    used_output_pins: int
    used_clock_pins: int = 0

    @property
    def B(self) -> int:
        return len(self.primitives)

    def used_pins(self, include_clocks: bool = False) -> int:
        return self.used_input_pins + self.used_output_pins + (self.used_clock_pins if include_clocks else 0)


@dataclass(frozen=True)
class ClusterMap:
    clusters: tuple[Cluster, ...]
    primitive_owner: dict = field(hash=False)
    diagnostics: tuple[str, ...] = field(default=(), compare=False)

    @classmethod
    def from_clusters(cls, clusters, diagnostics=()):
        clusters = tuple(clusters)
        owner = {}
        for c in clusters:
            for b in c.primitives:
                owner[b] = c.id
        return cls(clusters, owner, tuple(diagnostics))

    def of_kind(self, kind: str) -> list[Cluster]:
        return [c for c in self.clusters if c.kind == kind]

    @property
    def logic_clusters(self) -> list[Cluster]:
        return [c for c in self.clusters if c.kind != IO_KIND]


def _ports(elem, tag: str) -> list[str]:
    entries = []
    group = elem.find(tag)
    if group is None:
        return entries
    for port in group.findall("port"):
        entries.extend((port.text or "").split())
    return entries


def _leaves(elem):
    """Named blocks below ``elem`` that have no named children."""
    for child in elem.findall("block"):
        if child.get("name", "open") == "open":
            continue
        if any(k.get("name", "open") != "open" for k in child.findall("block")):
            yield from _leaves(child)
        else:
            yield child


def crossing_nets(netlist: Netlist, block_ids, ignore_globals: bool = True) -> set[int]:
    inside = block_ids if isinstance(block_ids, (set, frozenset)) else set(block_ids)
    out = set()
    for b in inside:
        for e in netlist.block_nets[b]:
            if e in out or not netlist.countable(e, ignore_globals):
                continue
            if netlist.nets[e].boundary or any(m not in inside for m in netlist.net_blocks[e]):
                out.add(e)
    return out


def parse_vpr_net(data, prepack: Netlist, ignore_globals: bool = True) -> ClusterMap:
    """Parse a packed ``.net`` file against its pre-packing netlist."""
    try:
        root = ET.fromstring(data)
    except ET.ParseError as exc:
        raise XmlError(f"malformed XML: {exc}") from None
    except (ValueError, TypeError) as exc:
        raise XmlError(f"unreadable XML input: {exc}") from None
    if root.tag != "block":
        raise XmlError(f"root element is <{root.tag}>, expected <block>")

    index = prepack.block_index
    clusters = []
    diagnostics = []
    seen_owner: dict[int, str] = {}
    for elem in root.findall("block"):
        name = elem.get("name")
        instance = elem.get("instance")
        if name is None or instance is None:
            raise XmlError("cluster <block> without name or instance attribute")
        if name == "open":
            continue
        m = _INSTANCE_RE.match(instance)
        if not m:
            raise XmlError(f"cannot read instance {instance!r}")
        kind = m.group(1)
        prims = set()
        for leaf in _leaves(elem):
            pname = leaf.get("name")
            if pname not in index:
                raise UnknownPrimitive(pname)
            bid = index[pname]
            if bid in seen_owner and seen_owner[bid] != name:
                raise XmlError(f"primitive {pname!r} appears in clusters {seen_owner[bid]!r} and {name!r}")
            seen_owner[bid] = name
            prims.add(bid)
        if not prims:
            raise EmptyCluster(name)
        ins = [e for e in _ports(elem, "inputs") if e != "open"]
        outs = [e for e in _ports(elem, "outputs") if e != "open"]
        clks = [e for e in _ports(elem, "clocks") if e != "open"]
        cl = Cluster(len(clusters), name, kind, frozenset(prims), len(ins), len(outs), len(clks))
        clusters.append(cl)
        if kind != IO_KIND:
            t_nets = len(crossing_nets(prepack, prims, ignore_globals))
            if t_nets != cl.used_input_pins + cl.used_output_pins:
                msg = (f"cluster {name!r}: {cl.used_input_pins + cl.used_output_pins} used pins "
                       f"but {t_nets} boundary-crossing nets in the pre-packing netlist")
                log.warning(msg)
                diagnostics.append(msg)

    missing = [b.name for b in prepack.blocks if b.kind.is_logic and b.id not in seen_owner]
    if missing:
        msg = f"{len(missing)} logic primitives not found in any cluster (first: {missing[0]!r})"
        log.warning(msg)
        diagnostics.append(msg)
    return ClusterMap.from_clusters(clusters, diagnostics)


def cluster_averages(cm: ClusterMap, kind_filter: str = "clb", include_clocks: bool = False):
    """Mean primitives and mean used pins over clusters of one kind."""
    chosen = cm.of_kind(kind_filter)
    if not chosen:
        raise NoSuchKind(f"no clusters of kind {kind_filter!r}")
    b_avg = fmean(c.B for c in chosen)
    t_avg = fmean(c.used_pins(include_clocks) for c in chosen)
    return b_avg, t_avg, len(chosen)


def cluster_netlist(prepack: Netlist, cm: ClusterMap):
    """Collapse each logic cluster to one block.

    Returns ``(netlist, weights)`` where ``weights[block id]`` is the number
    of primitives in that cluster.  I/O blocks are carried over unchanged
    and nets wholly inside one cluster disappear.
    """
    b = NetlistBuilder(prepack.name)
    new_id = {}
    weights = {}
    for blk in prepack.blocks:
        if blk.kind.is_io:
            new_id[blk.id] = b.add_block(blk.name, blk.kind)
    for c in cm.logic_clusters:
        cid = b.add_block(c.name, BlockKind.BLACKBOX, (c.kind,))
        weights[cid] = c.B
        for p in c.primitives:
            new_id[p] = cid
    for net in prepack.nets:
        if net.dangling or len({new_id[bk] for bk, _ in net.pins if bk in new_id}) < 2:
            continue
        if net.driver is not None and net.driver[0] in new_id:
            d = net.driver
            b.drive(net.name, new_id[d[0]], f"{prepack.blocks[d[0]].name}.{d[1]}")
        for bk, port in net.sinks:
            if bk in new_id:
                b.sink(net.name, new_id[bk], f"{prepack.blocks[bk].name}.{port}")
        if net.is_global:
            b.mark_global(net.name)
    return b.build(warn_undriven=False), weights
