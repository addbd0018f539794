"""Round planning and the exact / memory-driven / fidelity-driven drivers."""
import math

import numpy as np
import pytest

from ddqsim.circuit import Circuit, Gate, gen_ghz, gen_shor_period
from ddqsim.oracle import dense_fidelity, dense_simulate
from ddqsim.strategies import (FidelityDrivenConfig, MemoryDrivenConfig,
                               even_positions, marker_positions, plan_rounds,
                               simulate_exact, simulate_fidelity_driven,
                               simulate_memory_driven)

from conftest import random_circuit


# -- round planning -----------------------------------------------------------

def test_plan_rounds_known_values():
    assert plan_rounds(0.5, 0.9) == 6
    assert plan_rounds(0.99, 0.9) == 0
    assert plan_rounds(0.25, 0.5) == 2
    assert plan_rounds(1.0, 0.9) == 0
    assert plan_rounds(1.0, 1.0) == 0


def test_plan_rounds_count_law():
    for f_final in (0.3, 0.5, 0.8, 0.95):
        for f_round in (0.5, 0.9, 0.99):
            rounds = plan_rounds(f_final, f_round)
            # The budget is never exceeded and one more round would bust it.
            assert f_round ** rounds >= f_final - 1e-12
            assert f_round ** (rounds + 1) < f_final + 1e-12


def test_plan_rounds_rejects_bad_inputs():
    with pytest.raises(ValueError):
        plan_rounds(0.0, 0.9)
    with pytest.raises(ValueError):
        plan_rounds(0.5, 0.0)
    with pytest.raises(ValueError):
        plan_rounds(0.5, 1.0)


def test_even_positions_spread():
    assert even_positions(100, 3) == [25, 50, 75]
    assert even_positions(10, 0) == []
    # More rounds than interior gaps: positions dedup, never 0 or num_gates.
    got = even_positions(3, 7)
    assert got == [1, 2]
    for num_gates in (1, 5, 17):
        for rounds in (1, 2, 9):
            for p in even_positions(num_gates, rounds):
                assert 0 < p < num_gates


def test_marker_positions_capping():
    markers = [0, 3, 7, 12, 20]
    got, notes = marker_positions(markers, 20, 2)
    assert got == [3, 7]
    assert any("first 2" in n for n in notes)
    got, notes = marker_positions([4], 20, 3)
    assert got == [4]
    assert any("only 1" in n for n in notes)
    got, notes = marker_positions([5, 9], 20, 2)
    assert got == [5, 9]
    assert notes == []


# -- exact driver --------------------------------------------------------------

def test_exact_matches_oracle_and_reports_stats():
    circ = random_circuit(5, 40, seed=21)
    state, stats = simulate_exact(circ)
    assert np.allclose(state.to_dense(), dense_simulate(circ), atol=1e-10)
    assert stats.mode == "exact"
    assert stats.benchmark == circ.name
    assert stats.rounds == []
    assert stats.fidelity_lower_bound == 1.0
    assert stats.num_gates == 40
    assert len(stats.node_trace) == 40
    assert stats.max_dd_size == max(stats.node_trace)
    assert stats.final_dd_size == stats.node_trace[-1]
    assert stats.wall_time_seconds > 0


def test_exact_empty_circuit():
    state, stats = simulate_exact(Circuit(3, [], initial_state="101"))
    assert state.amplitude("101") == 1.0
    assert stats.max_dd_size == 3


# -- memory-driven driver -------------------------------------------------------

def test_memory_high_threshold_is_exact():
    circ = random_circuit(5, 40, seed=22)
    state_e, stats_e = simulate_exact(circ)
    state_m, stats_m = simulate_memory_driven(
        circ, MemoryDrivenConfig(threshold=10 ** 6, f_round=0.9))
    assert stats_m.rounds == []
    assert stats_m.fidelity_lower_bound == 1.0
    assert stats_m.final_threshold == 10 ** 6
    assert np.allclose(state_m.to_dense(), state_e.to_dense(), atol=1e-12)


def test_memory_tight_threshold_fires_and_certifies():
    circ = random_circuit(7, 60, seed=23)
    state_e, _ = simulate_exact(circ)
    cfg = MemoryDrivenConfig(threshold=12, f_round=0.98)
    state_m, stats_m = simulate_memory_driven(circ, cfg)
    assert len(stats_m.rounds) >= 1
    assert all(r.trigger == "threshold" for r in stats_m.rounds)
    # Every round fired on an oversized diagram and reported its own sizes.
    for r in stats_m.rounds:
        assert r.nodes_before > 12
        assert r.nodes_after <= r.nodes_before
        assert r.round_fidelity >= 0.98 - 1e-9
    bound = stats_m.fidelity_lower_bound
    assert bound == pytest.approx(
        math.prod(r.round_fidelity for r in stats_m.rounds), abs=1e-12)
    fid = dense_fidelity(state_e.to_dense(), state_m.to_dense())
    assert fid >= bound - 1e-9


def test_memory_round_fires_every_oversized_gate():
    circ = random_circuit(6, 50, seed=24)
    cfg = MemoryDrivenConfig(threshold=8, f_round=0.95)
    _, stats = simulate_memory_driven(circ, cfg)
    # The node trace records post-round sizes; any trace entry above the
    # threshold must carry a matching round record.
    fired = {r.after_gate for r in stats.rounds}
    for i, count in enumerate(stats.node_trace, start=1):
        if count > 8:
            assert i in fired


def test_memory_identity_rounds_keep_state_exact():
    circ = random_circuit(5, 30, seed=25)
    state_e, _ = simulate_exact(circ)
    state_m, stats = simulate_memory_driven(
        circ, MemoryDrivenConfig(threshold=1, f_round=1.0))
    assert len(stats.rounds) >= 1
    assert all(r.round_fidelity == 1.0 for r in stats.rounds)
    assert all(r.nodes_after == r.nodes_before for r in stats.rounds)
    assert stats.fidelity_lower_bound == 1.0
    assert np.allclose(state_m.to_dense(), state_e.to_dense(), atol=1e-10)


def test_memory_reduces_peak_size():
    circ = random_circuit(9, 120, seed=26)
    _, stats_e = simulate_exact(circ)
    _, stats_m = simulate_memory_driven(
        circ, MemoryDrivenConfig(threshold=30, f_round=0.9))
    assert stats_m.max_dd_size < stats_e.max_dd_size


def test_memory_config_validation():
    circ = gen_ghz(3)
    with pytest.raises(ValueError):
        simulate_memory_driven(circ, MemoryDrivenConfig(threshold=0, f_round=0.9))
    with pytest.raises(ValueError):
        simulate_memory_driven(circ, MemoryDrivenConfig(threshold=5, f_round=0.0))


# -- fidelity-driven driver ------------------------------------------------------

def test_fidelity_driven_meets_target():
    for seed in (31, 32, 33):
        circ = random_circuit(6, 60, seed=seed)
        state_e, _ = simulate_exact(circ)
        cfg = FidelityDrivenConfig(f_final=0.8, f_round=0.95)
        state_f, stats = simulate_fidelity_driven(circ, cfg)
        assert stats.planned_rounds == plan_rounds(0.8, 0.95)
        assert len(stats.rounds) <= stats.planned_rounds
        assert stats.fidelity_lower_bound >= 0.8 - 1e-12
        fid = dense_fidelity(state_e.to_dense(), state_f.to_dense())
        assert fid >= stats.fidelity_lower_bound - 1e-9
        assert fid >= 0.8 - 1e-9


def test_fidelity_driven_even_placement_positions():
    circ = random_circuit(5, 60, seed=34)
    cfg = FidelityDrivenConfig(f_final=0.5, f_round=0.9)
    _, stats = simulate_fidelity_driven(circ, cfg)
    want = even_positions(60, plan_rounds(0.5, 0.9))
    assert [r.after_gate for r in stats.rounds] == want
    assert all(r.trigger == "planned" for r in stats.rounds)


def test_fidelity_driven_full_target_is_exact():
    circ = random_circuit(5, 40, seed=35)
    state_e, _ = simulate_exact(circ)
    state_f, stats = simulate_fidelity_driven(
        circ, FidelityDrivenConfig(f_final=1.0, f_round=0.9))
    assert stats.planned_rounds == 0
    assert stats.rounds == []
    assert np.allclose(state_f.to_dense(), state_e.to_dense(), atol=1e-12)


def test_fidelity_driven_marker_placement():
    circ = gen_shor_period(15, 2)
    cfg = FidelityDrivenConfig(f_final=0.5, f_round=0.9, placement="markers")
    _, stats = simulate_fidelity_driven(circ, cfg)
    planned = plan_rounds(0.5, 0.9)
    fired = [r.after_gate for r in stats.rounds]
    assert fired == sorted(fired)
    assert len(fired) <= planned
    assert set(fired) <= set(circ.markers)
    assert all(r.trigger == "marker" for r in stats.rounds)
    # More markers exist than the budget allows; the cap leaves a note.
    assert any("barrier markers" in w for w in stats.warnings)


def test_fidelity_driven_ghz_rounds_remove_nothing():
    circ = gen_ghz(10)
    state_e, _ = simulate_exact(circ)
    state_f, stats = simulate_fidelity_driven(
        circ, FidelityDrivenConfig(f_final=0.5, f_round=0.9))
    assert len(stats.rounds) >= 1
    assert all(r.round_fidelity == pytest.approx(1.0, abs=1e-12)
               for r in stats.rounds)
    assert np.allclose(state_f.to_dense(), state_e.to_dense(), atol=1e-10)


def test_fidelity_config_validation():
    circ = gen_ghz(3)
    with pytest.raises(ValueError):
        simulate_fidelity_driven(circ, FidelityDrivenConfig(f_final=0.0, f_round=0.9))
    with pytest.raises(ValueError):
        simulate_fidelity_driven(
            circ, FidelityDrivenConfig(f_final=0.5, f_round=0.9, placement="odd"))
    with pytest.raises(ValueError):
        simulate_fidelity_driven(circ, FidelityDrivenConfig(f_final=0.5, f_round=1.0))


# -- determinism ----------------------------------------------------------------

def test_runs_are_deterministic():
    circ = random_circuit(6, 50, seed=36)
    cfg = MemoryDrivenConfig(threshold=20, f_round=0.95)
    state_a, stats_a = simulate_memory_driven(circ, cfg)
    state_b, stats_b = simulate_memory_driven(circ, cfg)
    da = stats_a.as_dict()
    db = stats_b.as_dict()
    da.pop("wall_time_seconds")
    db.pop("wall_time_seconds")
    assert da == db
    assert np.array_equal(state_a.to_dense(), state_b.to_dense())
