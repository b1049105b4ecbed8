import itertools
import random

import pytest

from rentlens.blif import parse_blif
from rentlens.netlist import BlockKind, NetlistBuilder

CHAIN_BLIF = """\
.model chain
.inputs a
.outputs out
.names a n1
1 1
.names n1 out
1 1
.end
"""

MINIMAL_BLIF = ".model c\n.inputs a b\n.outputs y\n.names a b y\n11 1\n.end\n"


def hypergraph_netlist(n, nets, name="h"):
    """Netlist of ``n`` blackbox nodes; each net is driven by its first node."""
    b = NetlistBuilder(name)
    for i in range(n):
        b.add_block(f"v{i}", BlockKind.BLACKBOX)
    for k, pins in enumerate(nets):
        b.drive(f"e{k}", pins[0], f"o{k}")
        for p in pins[1:]:
            b.sink(f"e{k}", p, f"i{k}")
    return b.build()


def random_hypergraph(seed, n=10, m=15):
    rng = random.Random(seed)
    return [rng.sample(range(n), rng.choice([2, 2, 2, 3, 3, 4])) for _ in range(m)]


def exhaustive_min_cut(n, nets, max_side):
    """Brute-force minimum cut over every split with both sides <= max_side."""
    best = None
    nodes = range(n)
    for size in range(n - max_side, max_side + 1):
        for combo in itertools.combinations(nodes, size):
            a = set(combo)
            cut = sum(1 for p in nets if any(x in a for x in p) and any(x not in a for x in p))
            if best is None or cut < best:
                best = cut
    return best


@pytest.fixture
def chain():
    return parse_blif(CHAIN_BLIF)


@pytest.fixture
def minimal():
    return parse_blif(MINIMAL_BLIF)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for cid in sorted(RESULTS, key=lambda c: int(c[1:])):
        terminalreporter.write_line(RESULTS[cid])
