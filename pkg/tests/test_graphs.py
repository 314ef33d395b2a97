from __future__ import annotations

import numpy as np
import pytest

from nashprox import (
    CommGraph,
    NoGeometricMixing,
    SampleCounter,
    complete_graph,
    consensus_apply,
    erdos_renyi_graph,
    grid_graph,
    max_mixing_deviation,
    mixing_params,
    path_graph,
    ring_graph,
    transition_matrix,
)


def test_complete_graph_weights_are_uniform():
    g = complete_graph(3)
    assert np.allclose(g.weights, np.full((3, 3), 1 / 3), atol=1e-15)


def test_path_graph_metropolis_weights_and_gap():
    g = path_graph(3)
    expected = np.array([[2 / 3, 1 / 3, 0.0],
                         [1 / 3, 1 / 3, 1 / 3],
                         [0.0, 1 / 3, 2 / 3]])
    assert np.allclose(g.weights, expected, atol=1e-15)
    assert mixing_params(g).beta == pytest.approx(2 / 3, abs=1e-12)


def test_ring_of_four_has_uniform_metropolis_weights():
    g = ring_graph(4)
    # every vertex has degree 2, so each neighbor weight is 1/3
    for i in range(4):
        row = g.weights[i]
        assert row[i] == pytest.approx(1 / 3)
        assert row.sum() == pytest.approx(1.0, abs=1e-15)


def test_mixing_params_reports_theta_one():
    mp = mixing_params(ring_graph(5))
    assert mp.theta == 1.0
    assert 0.0 < mp.beta < 1.0


def test_disconnected_weight_matrix_has_no_geometric_mixing():
    with pytest.raises(NoGeometricMixing):
        mixing_params(np.eye(2))


def test_weight_matrix_validation():
    with pytest.raises(ValueError):
        CommGraph(2, frozenset({(0, 1)}), np.array([[0.9, 0.1], [0.2, 0.8]]))


def test_consensus_step_on_complete_graph_averages_exactly():
    out = consensus_apply(complete_graph(3), np.array([1.0, 2.0, 3.0]), 1)
    assert np.allclose(out, [2.0, 2.0, 2.0], atol=1e-15)


def test_consensus_two_steps_on_path_graph():
    out = consensus_apply(path_graph(3), np.array([1.0, 0.0, 0.0]), 2)
    assert np.allclose(out, [5 / 9, 3 / 9, 1 / 9], atol=1e-12)


def test_consensus_zero_rounds_is_identity_and_counts_nothing():
    values = np.array([1.0, 2.0, 3.0])
    counter = SampleCounter()
    out = consensus_apply(path_graph(3), values, 0, counter=counter)
    assert np.array_equal(out, values)
    assert counter.comm_rounds == 0


def test_consensus_counts_each_round():
    counter = SampleCounter()
    consensus_apply(complete_graph(3), np.array([1.0, 2.0, 3.0]), 4, counter=counter)
    assert counter.comm_rounds == 4


def test_consensus_preserves_the_mean():
    rng = np.random.default_rng(2)
    g = grid_graph(2, 3)
    for _ in range(20):
        v = rng.normal(size=6) * 3.0
        out = consensus_apply(g, v, 3)
        assert abs(out.mean() - v.mean()) <= 1e-14 * max(1.0, abs(v.mean()))


def test_transition_matrix_composes_round_schedules():
    g = path_graph(3)
    a = g.weights
    # a single-index window applies tau_k = k + 1 rounds
    assert np.allclose(transition_matrix(g, 2, 2), np.linalg.matrix_power(a, 3), atol=1e-15)
    # a window from s to k applies tau_s + ... + tau_k rounds
    assert np.allclose(transition_matrix(g, 3, 1), np.linalg.matrix_power(a, 2 + 3 + 4), atol=1e-15)


def test_powers_of_the_weight_matrix_stay_symmetric_doubly_stochastic():
    g = ring_graph(6)
    a = np.linalg.matrix_power(g.weights, 7)
    assert np.allclose(a, a.T, atol=1e-12)
    assert np.allclose(a.sum(axis=1), np.ones(6), atol=1e-12)


@pytest.mark.parametrize("g", [
    complete_graph(5),
    ring_graph(6),
    path_graph(5),
    grid_graph(3, 3),
    erdos_renyi_graph(8, 0.5, seed=1),
])
def test_mixing_certificate_holds_for_fifty_rounds(g):
    mp = mixing_params(g)
    for k in range(1, 51):
        assert max_mixing_deviation(g, k) <= mp.theta * mp.beta ** k + 1e-12


def test_erdos_renyi_graphs_are_connected_and_deterministic():
    g1 = erdos_renyi_graph(8, 0.4, seed=3)
    g2 = erdos_renyi_graph(8, 0.4, seed=3)
    assert g1.edges == g2.edges
    assert np.array_equal(g1.weights, g2.weights)
    assert mixing_params(g1).beta < 1.0


def test_erdos_renyi_rejects_hopeless_density():
    with pytest.raises(ValueError):
        erdos_renyi_graph(8, 0.0, seed=0, max_tries=5)


def test_graph_family_sizes():
    with pytest.raises(ValueError):
        ring_graph(2)
    with pytest.raises(ValueError):
        path_graph(1)
    g = grid_graph(2, 2)
    assert g.n_nodes == 4
    assert len(g.edges) == 4
