import csv
import io

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from majsim.dynamics import parse_opinions
from majsim.exact import consensus_reachable_mask, decode
from majsim.graph import Graph, make_cycle, make_path, make_random_connected, make_star
from majsim.theory import (
    BlockedPath,
    BoundReport,
    consensus_bound,
    corollary_holds,
    exact_bound_report,
    find_blocked_path,
    first_unstable,
    reports_to_csv,
    validate_absorbed_state,
    verify_frozen,
)

O = parse_opinions


def test_bound_examples():
    assert consensus_bound(0.0, 7) == 1.0
    assert consensus_bound(0.5, 4) == -1.0
    for m in (1, 3, 10):
        assert consensus_bound(1 / (2 * m), m) == pytest.approx(1 / (2 * m), abs=1e-15)


def test_corollary_examples():
    assert corollary_holds(0.1, 5)
    assert corollary_holds(0.0, 9)
    assert consensus_bound(0.1, 3) == pytest.approx(0.46, abs=1e-12)
    assert corollary_holds(0.1, 3)
    assert corollary_holds(0.4, 3)  # above threshold: no claim


@given(p=st.floats(0, 1), m=st.integers(1, 200))
def test_bound_symmetric_and_minimal_at_half(p, m):
    assert consensus_bound(p, m) == pytest.approx(consensus_bound(1 - p, m), abs=1e-9)
    assert consensus_bound(p, m) >= consensus_bound(0.5, m) - 1e-12


def test_bound_report_vacuous_and_csv():
    rep = exact_bound_report(make_cycle(4), 0.5, "C4")
    assert rep.satisfied and rep.vacuous
    assert rep.exact_or_estimated == pytest.approx(0.75)
    rows = list(csv.DictReader(io.StringIO(reports_to_csv([rep]))))
    assert list(rows[0]) == ["graph_id", "n", "m", "p", "bound", "exact_or_estimate",
                             "method", "satisfied"]
    assert rows[0]["method"] == "exact" and rows[0]["m"] == "4"
    assert not exact_bound_report(make_path(3), 0.05).vacuous


def test_find_blocked_path_examples():
    assert find_blocked_path(make_cycle(4), O("++--")) == BlockedPath((0, 1, 2, 3), 1)
    assert find_blocked_path(make_cycle(6), O("++++++")) is None
    star = make_star(6)
    for c in range(64):
        assert find_blocked_path(star, decode(c, 6)) is None
    assert find_blocked_path(make_path(6), O("-++--+")) == BlockedPath((1, 2, 3, 4), 1)
    assert find_blocked_path(make_path(4), O("--++")) == BlockedPath((0, 1, 2, 3), -1)


def test_blocked_path_needs_low_degree():
    # path 0-1-2-3 with a pendant on vertex 1: deg(1) = 3 disqualifies the quadruple
    g = Graph.from_edges(5, [(0, 1), (1, 2), (2, 3), (1, 4)])
    assert find_blocked_path(g, O("++--+")) is None


def test_verify_frozen_examples():
    c4 = make_cycle(4)
    assert verify_frozen(c4, O("++--"), BlockedPath((0, 1, 2, 3), 1),
                         np.random.default_rng(0), 100_000)
    p6 = make_path(6)
    assert verify_frozen(p6, O("-++--+"), BlockedPath((1, 2, 3, 4), 1),
                         np.random.default_rng(1), 100_000)
    with pytest.raises(ValueError):
        verify_frozen(p6, O("-++--+"), BlockedPath((0, 1, 2, 3), 1),
                      np.random.default_rng(1), 10)


def test_validate_absorbed_examples():
    assert validate_absorbed_state(make_cycle(5), O("+++++"))
    assert validate_absorbed_state(make_cycle(5), O("++---"))
    assert not validate_absorbed_state(make_cycle(4), O("+-+-"))
    assert first_unstable(make_cycle(4), O("+-+-")) == 0
    assert first_unstable(make_cycle(4), O("++--")) is None


@pytest.mark.parametrize("graph", [
    make_cycle(7), make_path(8),
    Graph.from_edges(7, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (2, 5)]),
    make_random_connected(9, 1, 3),
])
def test_blocked_states_cannot_reach_consensus(graph):
    reach = consensus_reachable_mask(graph)
    for c in range(1 << graph.n):
        if find_blocked_path(graph, decode(c, graph.n)) is not None:
            assert not reach[c]
