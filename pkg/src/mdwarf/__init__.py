"""Force-field desynchronization (DWARF / M-DWARF) and midpoint baselines on multi-hop radio topologies."""

from .forces import (
    coupling_k,
    repulsive_force,
    total_force_absorbed,
    total_force_simple,
    update_phase,
    wrap_phase_diff,
)
from .metrics import MetricsReport, convergence_period, desync_error, evaluate, fairness
from .node import PRESETS, FiringMessage, NodeState, ProtocolConfig
from .radio import RadioConfig, Trace, collision_rule, run_simulation
from .topology import Topology, gen_chain, gen_complete, gen_grid, gen_ring, gen_star, load_edge_list

__version__ = "0.1.0"
