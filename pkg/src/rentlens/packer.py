"""Seed-based greedy clustering with a target external-pin utilization.

A VPack/AAPack-style packer reduced to connectivity: clusters grow around a
seed by absorbing the unclustered primitive that shares the most nets with
the cluster, as long as capacity, output pins and the input-pin budget
``max(1, floor(target_ext_pin_util * cluster_inputs))`` allow it.
"""

from __future__ import annotations

import enum
import logging
import math
import random
import xml.etree.ElementTree as ET
from dataclasses import dataclass

from .netlist import BlockKind, Netlist
from .vprnet import IO_KIND, Cluster, ClusterMap

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class ArchSpec:
    cluster_capacity: int = 10
    cluster_inputs: int = 40
    cluster_outputs: int = 10
    clocks: int = 1

    def __post_init__(self):
        for name in ("cluster_capacity", "cluster_inputs", "cluster_outputs", "clocks"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")

    @property
    def total_pins(self) -> int:
        return self.cluster_inputs + self.cluster_outputs


class SeedPolicy(enum.Enum):
    MOST_PINS = "MOST_PINS"
    MOST_CRITICAL_NETS = "MOST_CRITICAL_NETS"


@dataclass(frozen=True)
class PackConfig:
    target_ext_pin_util: float = 1.0
    seed_policy: SeedPolicy = SeedPolicy.MOST_PINS
    allow_unrelated: bool = False
    rng_seed: int = 0

    def __post_init__(self):
        if not 0 <= self.target_ext_pin_util <= 1:
            raise ValueError("target_ext_pin_util must lie in [0, 1]")

    def input_limit(self, arch: ArchSpec) -> int:
        return max(1, math.floor(self.target_ext_pin_util * arch.cluster_inputs + 1e-9))


def cluster_io(netlist: Netlist, members) -> tuple[list[int], list[int], list[int]]:
    """External input nets, output nets and clock nets of a primitive set.

    Inputs are nets read inside but driven outside; outputs are nets driven
    inside that also reach outside (one per driving primitive); global nets
    read inside are clock pins.  Dangling nets use no pin.
    """
    members = members if isinstance(members, (set, frozenset)) else set(members)
    ins, outs, clks = {}, {}, {}
    nets = netlist.nets
    for m in sorted(members):
        for port, e, is_drv in netlist.block_pins[m]:
            net = nets[e]
            if net.dangling:
                continue
            if net.is_global:
                if not is_drv:
                    clks[e] = None
                continue
            if is_drv:
                if net.boundary or any(b not in members for b in netlist.net_blocks[e]):
                    outs[e] = None
            elif net.driver is None or net.driver[0] not in members:
                ins[e] = None
    return list(ins), list(outs), list(clks)


def pack(netlist: Netlist, arch: ArchSpec, cfg: PackConfig) -> ClusterMap:
    """Cluster the logic primitives of ``netlist``; I/O become singleton pseudo-clusters."""
    limit = cfg.input_limit(arch)
    rng = random.Random(f"pack/{cfg.rng_seed}")
    nets = netlist.nets
    logic = list(netlist.logic_ids)
    useful = [
        [e for e in netlist.block_nets[b] if not nets[e].dangling and not nets[e].is_global]
        for b in range(len(netlist.blocks))
    ]
    if cfg.seed_policy is SeedPolicy.MOST_PINS:
        score = {b: len(useful[b]) for b in logic}
    else:
        score = {b: sum(len(netlist.net_blocks[e]) for e in useful[b]) for b in logic}
    tiebreak = {b: rng.random() for b in logic}
    seed_order = sorted(logic, key=lambda b: (-score[b], tiebreak[b], b))

    unclustered = set(logic)
    groups: list[list[int]] = []
    diagnostics = []

    def fits(members):
        ins, outs, clks = cluster_io(netlist, members)
        return len(ins) <= limit and len(outs) <= arch.cluster_outputs and len(clks) <= arch.clocks

    pos = 0
    while unclustered:
        while seed_order[pos] not in unclustered:
            pos += 1
        seed = seed_order[pos]
        unclustered.discard(seed)
        members = {seed}
        if not fits(members):
            msg = f"primitive {netlist.blocks[seed].name!r} exceeds the pin limit alone; kept as a singleton cluster"
            log.info(msg)
            diagnostics.append(msg)
            groups.append([seed])
            continue
        while len(members) < arch.cluster_capacity:
            attraction: dict[int, int] = {}
            for m in members:
                for e in useful[m]:
                    for v in netlist.net_blocks[e]:
                        if v in unclustered:
                            attraction[v] = attraction.get(v, 0)
            for v in attraction:
                attraction[v] = sum(
                    1 for e in useful[v] if any(x in members for x in netlist.net_blocks[e])
                )
            chosen = None
            for v in sorted(attraction, key=lambda v: (-attraction[v], v)):
                if fits(members | {v}):
                    chosen = v
                    break
            if chosen is None and cfg.allow_unrelated:
                for v in sorted(unclustered):
                    if v not in attraction and fits(members | {v}):
                        chosen = v
                        break
            if chosen is None:
                break
            members.add(chosen)
            unclustered.discard(chosen)
        groups.append(sorted(members))

    clusters = []
    for g in groups:
        ins, outs, clks = cluster_io(netlist, g)
        clusters.append(Cluster(len(clusters), netlist.blocks[g[0]].name, "clb", frozenset(g),
                                len(ins), len(outs), len(clks)))
    for blk in netlist.blocks:
        if blk.kind.is_io:
            ins, outs, clks = cluster_io(netlist, {blk.id})
            clusters.append(Cluster(len(clusters), blk.name, IO_KIND, frozenset({blk.id}),
                                    len(ins), len(outs), len(clks)))
    if len(diagnostics) > 1:
        log.info("%d primitives exceed the input-pin limit of %d alone", len(diagnostics), limit)
    return ClusterMap.from_clusters(clusters, diagnostics)


def _port_group(parent, tag, port, entries, width):
    group = ET.SubElement(parent, tag)
    el = ET.SubElement(group, "port", name=port)
    el.text = " ".join(entries + ["open"] * max(0, width - len(entries)))


def write_net(cm: ClusterMap, netlist: Netlist, arch: ArchSpec | None = None) -> bytes:
    """Emit a VPR-like ``.net`` document for a clustering of ``netlist``."""
    arch = arch or ArchSpec()
    nets = netlist.nets
    names = lambda ids: [nets[e].name for e in ids]  # noqa: E731
    pis = [b for b in netlist.blocks if b.kind is BlockKind.PRIMARY_INPUT]
    pos = [b for b in netlist.blocks if b.kind is BlockKind.PRIMARY_OUTPUT]
    root = ET.Element("block", name=f"{netlist.name}.net", instance="FPGA_packed_netlist[0]")
    ET.SubElement(root, "inputs").text = " ".join(b.name for b in pis)
    ET.SubElement(root, "outputs").text = " ".join(b.name for b in pos)
    ET.SubElement(root, "clocks").text = " ".join(n.name for n in nets if n.is_global)
    counters: dict[str, int] = {}
    for c in cm.clusters:
        idx = counters.get(c.kind, 0)
        counters[c.kind] = idx + 1
        prims = sorted(c.primitives)
        ins, outs, clks = cluster_io(netlist, c.primitives)
        if c.kind == IO_KIND:
            blk = netlist.blocks[prims[0]]
            mode = "inpad" if blk.kind is BlockKind.PRIMARY_INPUT else "outpad"
            el = ET.SubElement(root, "block", name=blk.name, instance=f"io[{idx}]", mode=mode)
            _port_group(el, "inputs", "outpad", names(ins), 1)
            _port_group(el, "outputs", "inpad", names(outs), 1)
            _port_group(el, "clocks", "clk", names(clks), 1)
            ET.SubElement(el, "block", name=blk.name, instance=f"{mode}[0]")
            continue
        el = ET.SubElement(root, "block", name=c.name, instance=f"{c.kind}[{idx}]", mode="default")
        _port_group(el, "inputs", "I", names(ins), arch.cluster_inputs)
        _port_group(el, "outputs", "O", names(outs), arch.cluster_outputs)
        _port_group(el, "clocks", "clk", names(clks), arch.clocks)
        for k in range(max(arch.cluster_capacity, len(prims))):
            if k < len(prims):
                blk = netlist.blocks[prims[k]]
                ble = ET.SubElement(el, "block", name=blk.name, instance=f"ble[{k}]", mode="default")
                leaf = {BlockKind.LUT: "lut", BlockKind.LATCH: "ff"}.get(blk.kind, "blackbox")
                ET.SubElement(ble, "block", name=blk.name, instance=f"{leaf}[0]")
            else:
                ET.SubElement(el, "block", name="open", instance=f"ble[{k}]")
    ET.indent(root)
    return ET.tostring(root, encoding="utf-8", xml_declaration=True) + b"\n"
