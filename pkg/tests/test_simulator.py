import numpy as np
import pytest
import scipy.stats

from netsir import (EpidemicParams, ErlangSpec, Graph, erlang, estimate_lambda,
                    exact_lambda, load_edge_list, replica_infections,
                    simulate_sir, simulate_sir_isolation)
from netsir.simulator import replica_rng

TWO_NODE = load_edge_list("0 1")
RACE_P = EpidemicParams.build(2, 0.2, 0.5, [0])  # P(transmit) = 0.2/0.7


def star_graph(k):
    return load_edge_list("\n".join(f"0 {i}" for i in range(1, k + 1)))


class TestSingleRun:
    def test_edgeless_never_transmits(self):
        g = Graph(node_count=5, edges=frozenset())
        params = EpidemicParams.build(5, 0.3, 0.4, [2])
        for seed in range(20):
            out = simulate_sir(g, params, replica_rng(seed, 0))
            assert out.infections_after_t0 == 0
            assert out.final_removed == 1

    def test_all_infected_means_no_new_infections(self):
        params = EpidemicParams.build(2, 0.9, 0.1, [0, 1])
        out = simulate_sir(TWO_NODE, params, 3)
        assert out.infections_after_t0 == 0
        assert out.final_removed == 2

    def test_conservation_and_monotonicity(self):
        g = star_graph(6)
        params = EpidemicParams.build(7, 0.8, 0.3, [0])
        for seed in range(10):
            out = simulate_sir(g, params, replica_rng(seed, 0))
            rows = out.counts_series
            assert np.all(rows[:, 1] + rows[:, 2] + rows[:, 3] == 7)
            assert np.all(np.diff(rows[:, 1]) <= 0)   # sigma_S nonincreasing
            assert np.all(np.diff(rows[:, 3]) >= 0)   # sigma_R nondecreasing
            assert rows[-1, 2] == 0                   # terminal sigma_I
            assert np.all(np.diff(rows[:, 0]) >= 0)

    def test_determinism(self):
        g = star_graph(4)
        params = EpidemicParams.build(5, 0.5, 0.2, [0])
        a = simulate_sir(g, params, replica_rng(11, 0))
        b = simulate_sir(g, params, replica_rng(11, 0))
        assert a.event_log == b.event_log
        assert np.array_equal(a.counts_series, b.counts_series)

    def test_event_log_kinds(self):
        out = simulate_sir(TWO_NODE, EpidemicParams.build(2, 5.0, 0.1, [0]), 1)
        kinds = {k for _, _, k in out.event_log}
        assert kinds <= {"infect", "recover"}

    def test_wrong_entry_point_raises(self):
        iso = tuple(erlang(ErlangSpec(1, 1.0)) for _ in range(2))
        params = EpidemicParams.build(2, 0.2, 0.5, [0], isolation=iso)
        with pytest.raises(ValueError):
            simulate_sir(TWO_NODE, params, 0)
        with pytest.raises(ValueError):
            simulate_sir_isolation(TWO_NODE, RACE_P, 0)


class TestEstimateLambda:
    def test_edgeless_zero_mean_zero_stderr(self):
        g = Graph(node_count=3, edges=frozenset())
        params = EpidemicParams.build(3, 0.3, 0.4, [0])
        est = estimate_lambda(g, params, replicas=200, seed=1)
        assert est.mean == 0.0
        assert est.std_error == 0.0

    def test_two_node_race_closed_form(self):
        est = estimate_lambda(TWO_NODE, RACE_P, replicas=100_000, seed=42)
        assert abs(est.mean - 0.2 / 0.7) <= 3 * est.std_error

    def test_star_leaf_races(self):
        # leaves race independently against hub removal: k * beta/(beta+delta)
        g = star_graph(5)
        params = EpidemicParams.build(6, 0.1, 0.1, [0])
        est = estimate_lambda(g, params, replicas=100_000, seed=7)
        assert abs(est.mean - 2.5) <= 3 * est.std_error

    def test_deterministic_given_seed(self):
        a = replica_infections(TWO_NODE, RACE_P, 500, seed=9)
        b = replica_infections(TWO_NODE, RACE_P, 500, seed=9)
        assert np.array_equal(a, b)

    def test_parallel_matches_serial(self):
        a = replica_infections(TWO_NODE, RACE_P, 2000, seed=5, workers=1)
        b = replica_infections(TWO_NODE, RACE_P, 2000, seed=5, workers=2)
        assert np.array_equal(a, b)

    def test_replica_streams_differ(self):
        xs = replica_infections(TWO_NODE, RACE_P, 4000, seed=0)
        assert 0 < xs.mean() < 1


class TestIsolationModel:
    def test_edgeless_no_secondary(self):
        g = Graph(node_count=3, edges=frozenset())
        iso = tuple(erlang(ErlangSpec(2, 1.0)) for _ in range(3))
        params = EpidemicParams.build(3, 0.5, 0.3, [1], isolation=iso)
        out = simulate_sir_isolation(g, params, 4)
        assert out.infections_after_t0 == 0

    def test_single_phase_equals_merged_rate(self):
        # p=1 isolation with mean gamma is an extra exponential clock:
        # identical in law to plain SIR with recovery delta + 1/gamma
        gamma, delta, beta, n = 2.0, 0.3, 0.4, 4
        g = star_graph(3)
        iso = tuple(erlang(ErlangSpec(1, gamma)) for _ in range(n))
        p_iso = EpidemicParams.build(n, beta, delta, [0], isolation=iso)
        p_plain = EpidemicParams.build(n, beta, delta + 1 / gamma, [0])
        a = replica_infections(g, p_iso, 10_000, seed=21)
        b = replica_infections(g, p_plain, 10_000, seed=2100)
        ks = scipy.stats.ks_2samp(a, b)
        assert ks.pvalue > 1e-3

    def test_two_node_erlang_against_exact_oracle(self):
        iso = tuple(erlang(ErlangSpec(2, 1.5)) for _ in range(2))
        params = EpidemicParams.build(2, 0.4, 0.2, [0], isolation=iso)
        target = exact_lambda(TWO_NODE, params)
        est = estimate_lambda(TWO_NODE, params, replicas=100_000, seed=3)
        assert abs(est.mean - target) <= 4 * est.std_error

    def test_isolate_events_logged(self):
        # tiny delta, fast isolation: removals should be isolations
        iso = tuple(erlang(ErlangSpec(2, 0.5)) for _ in range(2))
        params = EpidemicParams.build(2, 0.2, 1e-6, [0], isolation=iso)
        out = simulate_sir_isolation(TWO_NODE, params, 8)
        kinds = {k for _, _, k in out.event_log}
        assert "isolate" in kinds

    def test_determinism_with_phases(self):
        iso = tuple(erlang(ErlangSpec(3, 1.0)) for _ in range(4))
        g = star_graph(3)
        params = EpidemicParams.build(4, 0.6, 0.2, [0], isolation=iso)
        a = simulate_sir_isolation(g, params, replica_rng(2, 0))
        b = simulate_sir_isolation(g, params, replica_rng(2, 0))
        assert a.event_log == b.event_log


class TestParamsValidation:
    def test_nonpositive_rates(self):
        with pytest.raises(ValueError):
            EpidemicParams.build(2, 0.0, 0.5, [0])

    def test_empty_infected(self):
        with pytest.raises(ValueError):
            EpidemicParams.build(2, 0.1, 0.5, [])

    def test_out_of_range_infected(self):
        params = EpidemicParams.build(2, 0.1, 0.5, [5])
        with pytest.raises(ValueError):
            simulate_sir(TWO_NODE, params, 0)

    def test_mixed_phase_counts_rejected(self):
        iso = (erlang(ErlangSpec(1, 1.0)), erlang(ErlangSpec(2, 1.0)))
        with pytest.raises(ValueError):
            EpidemicParams.build(2, 0.1, 0.5, [0], isolation=iso)
