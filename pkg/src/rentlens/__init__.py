"""Post-packing Rent analysis for FPGA netlists."""

__version__ = "0.1.0"

from .blif import parse_blif, write_blif  # noqa: E402
from .gnl import GenSpec, generate, sweep  # noqa: E402
from .netlist import Block, BlockKind, Net, Netlist, block_stats, induced_subnetlist  # noqa: E402
from .packer import ArchSpec, PackConfig, SeedPolicy, pack, write_net  # noqa: E402
from .partition import (  # noqa: E402
    PartitionConfig,
    PartitionNode,
    bipartition,
    external_terminals,
    recursive_partition,
)
from .rent import (  # noqa: E402
    Classification,
    DensityReport,
    Region,
    RentFit,
    RentPoint,
    analyze,
    collect_points,
    estimate_bstar,
    fit_rent,
    rdensity,
    terminals_per_block,
    two_segment_fit,
    utilization_density,
)
from .vprnet import Cluster, ClusterMap, cluster_averages, parse_vpr_net  # noqa: E402
