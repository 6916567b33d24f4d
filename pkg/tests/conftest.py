import numpy as np
import pytest

from frtsim import TemporalContactGraph, parse_contact_stream

TOY_LINES = ["0 A B", "0 B C", "20 A B"]


@pytest.fixture
def toy_graph() -> TemporalContactGraph:
    return parse_contact_stream(TOY_LINES, 20)


def random_temporal_graph(
    rng: np.random.Generator,
    max_nodes: int = 12,
    max_frames: int = 60,
) -> TemporalContactGraph:
    """Small random temporal graph for property tests and the oracle suite."""
    n = int(rng.integers(2, max_nodes + 1))
    n_frames = int(rng.integers(1, max_frames + 1))
    p = float(rng.uniform(0.03, 0.3))
    records = []
    for f in range(n_frames):
        for i in range(n):
            for j in range(i + 1, n):
                if rng.random() < p:
                    records.append((f * 20, str(i), str(j)))
    return TemporalContactGraph.from_records(records, 20)
