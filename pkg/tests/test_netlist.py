import random
import warnings

import pytest
from hypothesis import given, settings, strategies as st

from rentlens.errors import EmptyNetlist, MultipleDrivers, UndrivenNet, UnknownBlock
from rentlens.netlist import (
    BlockKind,
    NetlistBuilder,
    block_stats,
    boundary_pins,
    induced_subnetlist,
    validate,
)
from rentlens.partition import external_terminals

from conftest import hypergraph_netlist


def test_chain_block_stats(chain):
    n_blocks, n_nets, t = block_stats(chain)
    assert (n_blocks, n_nets) == (4, 3)
    assert t == 2.0
    validate(chain)


def test_single_latch_has_three_pins():
    b = NetlistBuilder("l")
    d = b.add_block("d", BlockKind.PRIMARY_INPUT)
    clk = b.add_block("clk", BlockKind.PRIMARY_INPUT)
    q = b.add_block("q", BlockKind.LATCH)
    o = b.add_block("out:q", BlockKind.PRIMARY_OUTPUT)
    b.drive("d", d, "inpad")
    b.drive("clk", clk, "inpad")
    b.drive("q", q, "Q")
    b.sink("d", q, "D")
    b.sink("clk", q, "clk")
    b.sink("q", o, "outpad")
    b.mark_global("clk")
    nl = b.build()
    assert block_stats(nl)[2] == 3
    assert nl.nets[nl.net_index["clk"]].is_global


def test_block_stats_matches_incidence_recount():
    rng = random.Random(7)
    nets = [rng.sample(range(10), rng.randint(2, 4)) for _ in range(14)]
    nl = hypergraph_netlist(10, nets)
    incidence = [[0] * len(nets) for _ in range(10)]
    for j, pins in enumerate(nets):
        for v in pins:
            incidence[v][j] = 1
    expected = sum(sum(row) for row in incidence) / 10
    assert block_stats(nl)[2] == pytest.approx(expected, abs=0)


def test_block_stats_empty():
    with pytest.raises(EmptyNetlist):
        block_stats(NetlistBuilder("e").build())


def test_multiple_drivers_rejected():
    b = NetlistBuilder()
    x = b.add_block("x", BlockKind.LUT)
    y = b.add_block("y", BlockKind.LUT)
    b.drive("n", x, "out")
    with pytest.raises(MultipleDrivers):
        b.drive("n", y, "out")


def test_undriven_net_warns_and_dangles():
    b = NetlistBuilder()
    x = b.add_block("x", BlockKind.LUT)
    y = b.add_block("y", BlockKind.LUT)
    b.sink("n", x, "in0")
    b.sink("n", y, "in0")
    with pytest.warns(UndrivenNet):
        nl = b.build()
    assert nl.nets[0].dangling
    assert not nl.countable(0)


def test_induced_full_set_is_identity(chain):
    sub = induced_subnetlist(chain, range(len(chain.blocks)))
    assert sub == chain


def test_induced_empty_set(chain):
    sub = induced_subnetlist(chain, set())
    assert sub.blocks == () and sub.nets == ()


def test_induced_single_lut(chain):
    lut1 = chain.block_index["n1"]
    sub = induced_subnetlist(chain, {lut1})
    assert len(sub.blocks) == 1
    assert len(sub.nets) == 2
    assert all(net.boundary for net in sub.nets)
    assert boundary_pins(sub) == 2


def test_induced_unknown_block(chain):
    with pytest.raises(UnknownBlock):
        induced_subnetlist(chain, {99})


@st.composite
def hypergraphs(draw):
    n = draw(st.integers(2, 9))
    nets = draw(st.lists(
        st.lists(st.integers(0, n - 1), min_size=2, max_size=4, unique=True), min_size=1, max_size=12,
    ))
    subset = draw(st.sets(st.integers(0, n - 1), min_size=1))
    return n, nets, subset


@given(hypergraphs())
@settings(max_examples=60, deadline=None)
def test_induced_preserves_terminals(case):
    n, nets, subset = case
    nl = hypergraph_netlist(n, nets)
    validate(nl)
    sub = induced_subnetlist(nl, subset)
    validate(sub)
    # every subset block is logic, so the subnetlist's terminals are its boundary pins
    assert boundary_pins(sub) == external_terminals(nl, subset)
    assert sum(b.pin_count for b in sub.blocks) == sum(nl.blocks[i].pin_count for i in subset)


def test_undriven_suppressed_in_subnetlist(chain):
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        induced_subnetlist(chain, {chain.block_index["out:out"]})
