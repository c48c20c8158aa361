import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from majsim.dynamics import is_absorbing, parse_opinions
from majsim.errors import CapacityError
from majsim.exact import (
    can_reach_consensus,
    consensus_hit_probabilities,
    consensus_hit_probabilities_dense,
    consensus_reachable_mask,
    decode,
    encode,
    enumerate_absorbing,
    exact_consensus_probability,
    initial_weights,
    transition_matrix,
    transitions,
)
from majsim.graph import make_complete, make_cycle, make_path, make_random_connected, make_star
from majsim.theory import consensus_bound


def code(text):
    return encode(parse_opinions(text))


def test_encode_decode_bijective():
    for n in (1, 4, 7):
        codes = [encode(decode(c, n)) for c in range(1 << n)]
        assert codes == list(range(1 << n))
    assert code("+--") == 0b001
    assert code("-++") == 0b110


def test_transitions_examples():
    c4 = make_cycle(4)
    assert transitions(c4, 0) == [(0, 1.0)]
    assert transitions(c4, 15) == [(15, 1.0)]
    assert transitions(c4, code("++--")) == [(code("++--"), 1.0)]
    # K2 (+,-): agent 0 or 1 chosen with prob 1/2 each, sole neighbour disagrees
    assert transitions(make_complete(2), code("+-")) == [(0b00, 0.5), (0b11, 0.5)]


def test_transitions_capacity():
    with pytest.raises(CapacityError):
        transitions(make_path(17), 0)
    with pytest.raises(CapacityError):
        consensus_hit_probabilities(make_path(17))


@pytest.mark.parametrize("graph", [make_cycle(5), make_star(5), make_random_connected(6, 3, 1)])
def test_kernel_rows_stochastic(graph):
    P = transition_matrix(graph)
    assert np.abs(P.sum(axis=1) - 1).max() < 1e-12
    assert (P >= 0).all()


def test_hit_probability_examples():
    h = consensus_hit_probabilities(make_cycle(4))
    assert h[0] == h[15] == 1.0
    assert h[code("++--")] == 0.0
    assert consensus_hit_probabilities(make_complete(3))[code("++-")] == 1.0


def test_cycle5_hand_computed_probability():
    # from ++-+- the three unstable vertices (2, 3, 4) each flip first with prob 1/3;
    # flipping 3 gives the frozen ++---, the other two lead on to consensus
    c5 = make_cycle(5)
    s = code("++-+-")
    h = consensus_hit_probabilities(c5)
    assert h[s] == pytest.approx(2 / 3, abs=1e-12)
    assert can_reach_consensus(c5, s)
    assert not can_reach_consensus(c5, code("++---"))
    assert h[code("++---")] == 0.0


def test_enumerate_absorbing_examples():
    for n in range(2, 8):
        assert list(enumerate_absorbing(make_complete(n))) == [0, (1 << n) - 1]
    c4 = sorted(enumerate_absorbing(make_cycle(4)))
    rotations = sorted(code(s) for s in ("++--", "-++-", "--++", "+--+"))
    assert c4 == sorted([0, 15] + rotations)
    assert list(enumerate_absorbing(make_path(2))) == [0, 3]


@pytest.mark.parametrize("graph", [
    make_cycle(6), make_path(7), make_star(6), make_random_connected(8, 4, 9),
])
def test_absorbing_matches_direct_check(graph):
    direct = [c for c in range(1 << graph.n) if is_absorbing(graph, decode(c, graph.n))]
    assert list(enumerate_absorbing(graph)) == direct


def test_exact_probability_examples():
    assert exact_consensus_probability(make_cycle(5), 1.0).p_consensus == 1.0
    assert exact_consensus_probability(make_cycle(5), 0.0).p_consensus == 1.0
    for n in range(2, 7):
        assert exact_consensus_probability(make_complete(n), 0.37).p_consensus == pytest.approx(1, abs=1e-9)
    res = exact_consensus_probability(make_cycle(4), 0.5)
    # four frozen rotations out of 16 equiprobable initial states
    assert res.p_consensus == pytest.approx(0.75, abs=1e-12)
    assert res.n_frozen_nonconsensus == 4


def test_exact_to_dict():
    d = exact_consensus_probability(make_cycle(4), 0.5).to_dict()
    assert d["n_absorbing"] == 6 and len(d["h"]) == 16
    big = exact_consensus_probability(make_path(13), 0.5).to_dict()
    assert "h" not in big


def test_initial_weights_sum_to_one():
    for p in (0.0, 0.2, 0.5, 1.0):
        w = initial_weights(6, p)
        assert w.sum() == pytest.approx(1.0, abs=1e-14)
    assert initial_weights(3, 1.0)[7] == 1.0


@pytest.mark.parametrize("graph", [
    make_cycle(7), make_path(8), make_star(5), make_random_connected(9, 5, 4),
    make_random_connected(10, 2, 11),
])
def test_sweep_solver_matches_dense(graph):
    assert np.abs(consensus_hit_probabilities(graph) - consensus_hit_probabilities_dense(graph)).max() < 1e-10


@pytest.mark.parametrize("graph", [make_cycle(8), make_path(7), make_random_connected(7, 3, 2)])
def test_reachability_consistency(graph):
    mask = consensus_reachable_mask(graph)
    h = consensus_hit_probabilities(graph)
    assert np.array_equal(mask, h > 0)
    for c in range(1 << graph.n):
        assert can_reach_consensus(graph, c) == mask[c]


def test_boundary_values():
    g = make_random_connected(9, 4, 21)
    h = consensus_hit_probabilities(g)
    absorbing = set(enumerate_absorbing(g).tolist())
    for c in absorbing:
        assert h[c] == (1.0 if c in (0, 511) else 0.0)
    assert ((h >= 0) & (h <= 1)).all()


@settings(max_examples=25, deadline=None)
@given(n=st.integers(3, 8), extra=st.integers(0, 4), seed=st.integers(0, 10**6),
       p=st.floats(0, 1))
def test_polarity_symmetry_and_lower_bound(n, extra, seed, p):
    extra = min(extra, n * (n - 1) // 2 - (n - 1))
    g = make_random_connected(n, extra, seed)
    a = exact_consensus_probability(g, p).p_consensus
    b = exact_consensus_probability(g, 1 - p).p_consensus
    assert a == pytest.approx(b, abs=1e-12)
    assert a >= consensus_bound(p, g.edge_count) - 1e-12
