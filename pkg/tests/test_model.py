import dataclasses
import math

import numpy as np
import pytest
from scipy import stats

from agentuq import (
    Alphabet,
    ConfigurationError,
    Dist,
    EnumerationCapError,
    RandomSystemSpec,
    StructuralError,
    ValidationError,
    apply_react_constraint,
    enumerate_trajectories,
    generate_random_system,
    sample_trajectories,
    sample_trajectory,
    trajectory_log_prob,
)
from agentuq.scenario import builtin_deterministic_chain, builtin_mini_booking
from conftest import single_turn_system, uniform_chain_system


def test_dist_validation():
    alphabet = Alphabet("x", ("a", "b"))
    with pytest.raises(ValidationError):
        Dist(alphabet, (0.5, 0.6))
    with pytest.raises(ValidationError):
        Dist(alphabet, (-0.1, 1.1))
    with pytest.raises(ValidationError):
        Dist.from_mapping(alphabet, {"c": 1.0})
    with pytest.raises(ValidationError):
        Alphabet("x", ("a", "a"))


def test_sampling_is_deterministic_in_seed(mini):
    for seed in (0, 1, 17):
        t1 = sample_trajectory(mini, seed)
        t2 = sample_trajectory(mini, seed)
        assert t1 == t2


def test_point_mass_terminal_kernel_gives_one_turn():
    system = builtin_deterministic_chain()
    traj = sample_trajectory(system, 123)
    assert traj.length == 1
    assert traj.terminated_by == "terminal-action"
    assert traj.turns[0].action == "finish"


def test_mini_booking_replay_matches_recorded_log_prob(mini):
    traj = sample_trajectory(mini, 0)
    assert trajectory_log_prob(mini, traj) == pytest.approx(traj.log_prob(), abs=1e-12)


def test_replay_consistency_of_snapshots(mini):
    # recomputing the state chain via the update rule reproduces the snapshots
    for seed in range(20):
        traj = sample_trajectory(mini, seed)
        state = mini.initial_state(traj.task, traj.query)
        prev = traj.query
        for turn in traj.turns:
            state = mini.step_state(state, prev, turn.action)
            assert state == turn.state
            prev = turn.observation


def test_enumerate_deterministic_single_leaf():
    leaves = enumerate_trajectories(builtin_deterministic_chain())
    assert len(leaves) == 1
    assert leaves[0][1] == pytest.approx(1.0, abs=1e-12)


def test_enumerate_uniform_two_turn_sixteen_leaves():
    system = uniform_chain_system(2)
    leaves = enumerate_trajectories(system)
    assert len(leaves) == 16
    for _, p in leaves:
        assert p == pytest.approx(1 / 16, abs=1e-12)


def test_enumerate_mini_booking_mass(mini):
    leaves = enumerate_trajectories(mini)
    assert sum(p for _, p in leaves) == pytest.approx(1.0, abs=1e-9)
    keys = [t.events_key() for t, _ in leaves]
    assert len(set(keys)) == len(keys)


def test_log_prob_point_mass_system_is_zero():
    system = builtin_deterministic_chain()
    traj = sample_trajectory(system, 0)
    assert trajectory_log_prob(system, traj) == pytest.approx(0.0, abs=1e-12)


def test_log_prob_uniform_binary_path():
    system = uniform_chain_system(2)
    traj = sample_trajectory(system, 5)
    assert trajectory_log_prob(system, traj) == pytest.approx(math.log(1 / 16), abs=1e-12)


def test_log_prob_matches_enumeration_entry():
    system = generate_random_system(RandomSystemSpec(seed=42))
    leaves = {t.events_key(): p for t, p in enumerate_trajectories(system)}
    for seed in range(10):
        traj = sample_trajectory(system, seed)
        assert traj.events_key() in leaves
        assert math.exp(trajectory_log_prob(system, traj)) == pytest.approx(
            leaves[traj.events_key()], abs=1e-12
        )


def test_log_prob_structural_error_on_tampered_state(mini):
    traj = sample_trajectory(mini, 0)
    bad_state = dataclasses.replace(traj.turns[0].state, db_state="booked_econ"
                                    if traj.turns[0].state.db_state != "booked_econ"
                                    else "unbooked")
    bad_turn = dataclasses.replace(traj.turns[0], state=bad_state)
    bad = dataclasses.replace(traj, turns=(bad_turn,) + traj.turns[1:])
    with pytest.raises(StructuralError):
        trajectory_log_prob(mini, bad)


def test_log_prob_neg_inf_on_zero_mass_initial_pair():
    system = single_turn_system(
        {"q0": {"x": 1.0}, "q1": {"x": 1.0}}, {"q0": 1.0, "q1": 0.0}
    )
    traj = sample_trajectory(system, 0)
    bad = dataclasses.replace(traj, query="q1")
    state = system.initial_state("t0", "q1")
    state = system.step_state(state, "q1", "x")
    bad = dataclasses.replace(
        bad, turns=(dataclasses.replace(bad.turns[0], state=state),)
    )
    assert trajectory_log_prob(system, bad) == -math.inf


def test_unnormalized_row_rejected_before_sampling(mini):
    row = next(iter(mini.action_kernel.values()))
    object.__setattr__(row, "weights", tuple(w * 0.9 for w in row.weights))
    try:
        with pytest.raises(ValidationError, match="not normalized"):
            sample_trajectory(mini, 0)
    finally:
        object.__setattr__(row, "weights", tuple(w / 0.9 for w in row.weights))


def test_enumeration_cap_refusal():
    system = uniform_chain_system(4)
    with pytest.raises(EnumerationCapError) as err:
        enumerate_trajectories(system, cap=10)
    assert err.value.estimate == system.worst_case_leaf_count()
    assert "10" in str(err.value)


def test_enumeration_cap_env_override(monkeypatch):
    system = uniform_chain_system(2)
    monkeypatch.setenv("AGENTUQ_ENUM_CAP", "3")
    with pytest.raises(EnumerationCapError):
        enumerate_trajectories(system)
    monkeypatch.delenv("AGENTUQ_ENUM_CAP")
    assert len(enumerate_trajectories(system)) == 16


def test_sampling_matches_enumeration_frequencies():
    system = generate_random_system(
        RandomSystemSpec(n_actions=2, n_observations=3, n_tasks=1, t_max=2, seed=3)
    )
    leaves = enumerate_trajectories(system)
    index = {t.events_key(): i for i, (t, _) in enumerate(leaves)}
    counts = np.zeros(len(leaves))
    n = 100_000
    for traj in sample_trajectories(system, n, seed=11):
        counts[index[traj.events_key()]] += 1
    expected = np.array([p for _, p in leaves]) * n
    keep = expected > 0
    result = stats.chisquare(counts[keep], expected[keep])
    assert result.pvalue > 0.01


def test_react_sampled_trajectories_alternate(mini):
    constrained = apply_react_constraint(mini)
    thinking = {"think_and_guess"}
    for seed in range(30):
        traj = sample_trajectory(constrained, seed)
        flags = [t.action in thinking for t in traj.turns]
        assert flags[0] is False  # opening turn draws from the non-thinking side
        assert all(a != b for a, b in zip(flags, flags[1:]))


def test_react_enumerated_support_alternates(mini):
    constrained = apply_react_constraint(mini)
    thinking = {"think_and_guess"}
    leaves = enumerate_trajectories(constrained)
    assert sum(p for _, p in leaves) == pytest.approx(1.0, abs=1e-9)
    for traj, _ in leaves:
        flags = [t.action in thinking for t in traj.turns]
        assert flags[0] is False
        assert all(a != b for a, b in zip(flags, flags[1:]))


def test_react_idempotent_on_already_alternating_kernel(mini):
    constrained = apply_react_constraint(mini)
    twice = apply_react_constraint(constrained)
    before = {t.events_key(): p for t, p in enumerate_trajectories(constrained)}
    after = {t.events_key(): p for t, p in enumerate_trajectories(twice)}
    assert set(before) == set(after)
    tv = 0.5 * sum(abs(before[k] - after[k]) for k in before)
    assert tv == pytest.approx(0.0, abs=1e-12)


def test_react_requires_partition():
    system = uniform_chain_system(2)  # no thinking actions at all
    with pytest.raises(ConfigurationError):
        apply_react_constraint(system)


def test_react_zero_row_is_validation_error():
    guess = builtin_mini_booking("guess")
    with pytest.raises(ValidationError, match="context"):
        apply_react_constraint(guess)


def test_env_state_accessors(mini):
    traj = sample_trajectory(mini, 2)
    state0 = mini.initial_state(traj.task, traj.query)
    assert state0.initial_query == traj.query
    assert state0.turn_index == 0
    assert state0.last_action is None
    assert state0.last_observation == traj.query
    state1 = traj.turns[0].state
    assert state1.turn_index == 1
    assert state1.last_action == traj.turns[0].action
