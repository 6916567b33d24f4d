import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from frtsim import (
    TemporalContactGraph,
    TraceParseError,
    UnknownNodeError,
    insert_empty_frames,
    parse_contact_stream,
)

from .conftest import TOY_LINES


def test_empty_input():
    g = parse_contact_stream([], 20)
    assert g.node_count == 0
    assert g.n_frames == 0
    assert g.total_contacts == 0
    assert g.contact_density(20) == []


def test_toy_frame_binning(toy_graph):
    g = toy_graph
    assert g.node_count == 3
    assert g.labels == ("A", "B", "C")
    assert g.n_frames == 2
    ab = (g.id_of("A"), g.id_of("B"))
    bc = (g.id_of("B"), g.id_of("C"))
    assert g.edges_in_frame(0) == {ab, bc}
    assert g.edges_in_frame(1) == {ab}
    assert g.edges_in_frame(5) == frozenset()


def test_duplicate_records_collapse():
    g = parse_contact_stream(["0 A B", "5 B A", "19 A B"], 20)
    assert g.total_contacts == 1
    assert g.n_frames == 1


def test_unsorted_lines_comments_and_tabs():
    lines = ["# a comment", "", "40\tB\tA", "0 A B", "  # indented comment"]
    g = parse_contact_stream(lines, 20)
    assert g.n_frames == 3
    assert g.total_contacts == 2


def test_numeric_labels_sort_numerically():
    g = parse_contact_stream(["0 10 2", "0 2 3"], 20)
    assert g.labels == ("2", "3", "10")


@pytest.mark.parametrize(
    "line",
    ["x A B", "0 A", "0 A B C", "-5 A B", "nan A B"],
)
def test_malformed_lines(line):
    with pytest.raises(TraceParseError) as err:
        parse_contact_stream(["0 A B", line], 20)
    assert err.value.line_no == 2


def test_self_loop_policy(caplog):
    with pytest.raises(TraceParseError):
        parse_contact_stream(["0 A A"], 20)
    with caplog.at_level("WARNING"):
        g = parse_contact_stream(["0 A A", "0 A B"], 20, on_self_loop="skip")
    assert g.total_contacts == 1
    assert "self-loop" in caplog.text
    with pytest.raises(ValueError):
        parse_contact_stream([], 20, on_self_loop="maybe")


def test_bad_delta_t():
    with pytest.raises(ValueError):
        parse_contact_stream([], 0)


def test_first_contact_at_or_after(toy_graph):
    g = toy_graph
    assert g.first_contact_at_or_after(g.id_of("B"), 1) == 1
    assert g.first_contact_at_or_after(g.id_of("C"), 1) is None
    assert g.first_contact_at_or_after(g.id_of("C"), 0) == 0
    with pytest.raises(UnknownNodeError):
        g.id_of("Z")
    with pytest.raises(UnknownNodeError):
        g.first_contact_at_or_after(99, 0)
    with pytest.raises(ValueError):
        g.first_contact_at_or_after(0, -1)


def test_node_contact_frames(toy_graph):
    g = toy_graph
    assert g.node_contact_frames(g.id_of("A")).tolist() == [0, 1]
    assert g.node_contact_frames(g.id_of("B")).tolist() == [0, 1]
    assert g.node_contact_frames(g.id_of("C")).tolist() == [0]


def test_contact_density(toy_graph):
    assert toy_graph.contact_density(20) == [(0, 2), (20, 1)]
    assert toy_graph.contact_density(40) == [(0, 3)]
    with pytest.raises(ValueError):
        toy_graph.contact_density(30)
    with pytest.raises(ValueError):
        toy_graph.contact_density(0)


def test_density_includes_zero_windows():
    g = parse_contact_stream(["0 A B", "100 A B"], 20)
    counts = dict(g.contact_density(20))
    assert counts == {0: 1, 20: 0, 40: 0, 60: 0, 80: 0, 100: 1}
    assert sum(c for _, c in g.contact_density(20)) == g.total_contacts


def test_serialize_round_trip(toy_graph):
    lines = list(toy_graph.to_lines())
    assert lines == ["0 A B", "0 B C", "20 A B"]
    assert parse_contact_stream(lines, 20) == toy_graph


def test_describe(toy_graph):
    d = toy_graph.describe()
    assert d == {
        "nodes": 3,
        "contacts": 3,
        "frames_active": 2,
        "frames_span": 2,
        "delta_t": 20,
    }


label_strategy = st.text(
    alphabet=st.characters(whitelist_categories=("Lu", "Ll", "Nd")), min_size=1, max_size=4
)
record_strategy = st.tuples(
    st.integers(min_value=0, max_value=500), label_strategy, label_strategy
).filter(lambda r: r[1] != r[2])


@settings(max_examples=60, deadline=None)
@given(st.lists(record_strategy, max_size=40), st.integers(min_value=1, max_value=60))
def test_round_trip_property(records, delta_t):
    g = TemporalContactGraph.from_records(records, delta_t)
    again = parse_contact_stream(g.to_lines(), delta_t)
    assert again == g
    # Serialized timestamps are frame-aligned, so a second pass is stable too.
    assert list(again.to_lines()) == list(g.to_lines())


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=0, max_value=10**7), st.integers(min_value=1, max_value=600))
def test_frame_binning_bound(t, delta_t):
    g = TemporalContactGraph.from_records([(t, "a", "b")], delta_t)
    f = int(g.stored_frames[0])
    assert f * delta_t <= t < (f + 1) * delta_t


def test_first_contact_equals_min_frame(toy_graph):
    g = toy_graph
    for n in range(g.node_count):
        frames = g.node_contact_frames(n)
        assert g.first_contact_at_or_after(n, 0) == int(frames.min())


def test_insert_empty_frames(toy_graph):
    g2 = insert_empty_frames(toy_graph, [(1, 3)])
    assert g2.n_frames == 5
    assert g2.edges_in_frame(0) == toy_graph.edges_in_frame(0)
    assert g2.edges_in_frame(4) == toy_graph.edges_in_frame(1)
    assert g2.edges_in_frame(1) == frozenset()
    # Cumulative shifts.
    g3 = insert_empty_frames(toy_graph, [(1, 2), (1, 1)])
    assert g3.edges_in_frame(4) == toy_graph.edges_in_frame(1)
    with pytest.raises(ValueError):
        insert_empty_frames(toy_graph, [(0, 0)])
