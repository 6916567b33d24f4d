"""frtsim: message flooding over frame-based temporal proximity networks.

The package builds contact graphs from "t i j" trace files or from synthetic
mobility models (random waypoint, truncated Levy walk), simulates flooding to
obtain fastest-route trees, and computes delivery-delay statistics under four
time definitions, including a per-node contact clock that only advances while
the node is in contact.
"""

from .graph import (
    TemporalContactGraph,
    TraceParseError,
    UnknownNodeError,
    insert_empty_frames,
    parse_contact_stream,
)
from .metrics import (
    BoxStats,
    DelayRecord,
    Histogram,
    SummaryStats,
    arrival_probability_series,
    avg_out_degree_density,
    average_out_degrees,
    contact_probability_series,
    delay_record,
    delay_records,
    level_boxplot,
    linear_binned_pdf,
    log_binned_pdf,
    node_clock,
    summary,
)
from .mobility import (
    MobilityConfig,
    RwpParams,
    TlwParams,
    Trajectory,
    generate_contact_graph,
    sample_truncated_power_law,
    simulate,
    simulate_rwp,
    simulate_tlw,
    trajectories_to_contacts,
)
from .oracle import OracleSizeError, earliest_arrival_oracle
from .spreading import (
    FastestRouteTree,
    Message,
    PropagationMode,
    SweepSpec,
    TreeEntry,
    evenly_spaced_injection_frames,
    flood,
    level_counts,
    out_degrees,
    sweep,
)

__version__ = "0.1.0"
