from __future__ import annotations

import numpy as np
import pytest

from agentuq import (
    ActionCategory,
    ActionClassifier,
    AgentSystem,
    Alphabet,
    Dist,
    EvidentialityRule,
    RewardTable,
    builtin_mini_booking,
    builtin_uniform_binary_2turn,
)


@pytest.fixture(scope="session")
def mini():
    return builtin_mini_booking()


@pytest.fixture(scope="session")
def uniform2():
    return builtin_uniform_binary_2turn()


def uniform_chain_system(n_turns: int, query_probs=None, name="uniform-chain") -> AgentSystem:
    """Uniform binary actions/observations for a fixed number of turns."""
    actions = Alphabet("actions", ("a0", "a1"))
    observations = Alphabet("observations", ("no_obs", "h", "t"))
    tasks = Alphabet("tasks", ("t0",))
    db_states = Alphabet("db_states", ("d0",))
    classifier = ActionClassifier(
        taxonomy={a: ActionCategory.INFORMATION_GATHERING for a in actions},
        rules={a: EvidentialityRule("always") for a in actions},
    )
    query_probs = query_probs or {"h": 1.0}
    uniform_a = Dist.uniform(actions)
    uniform_o = Dist.uniform(observations, ("h", "t"))
    action_kernel = {}
    observation_kernel = {}
    for turn in range(n_turns):
        for obs in ("h", "t"):
            action_kernel[((str(turn),), obs)] = uniform_a
    for turn in range(1, n_turns + 1):
        for a in actions:
            observation_kernel[(a, (str(turn),))] = uniform_o
    system = AgentSystem(
        name=name,
        actions=actions,
        observations=observations,
        tasks=tasks,
        db_states=db_states,
        null_observation="no_obs",
        context_features=("turn_index",),
        action_kernel=action_kernel,
        observation_kernel=observation_kernel,
        update_entries={},
        initial_db={"t0": "d0"},
        initial_pairs=tuple(("t0", q, p) for q, p in query_probs.items()),
        terminal_actions=frozenset(),
        t_max=n_turns,
        reward_table=RewardTable(("terminal_action",), {("a0",): 1.0}),
        classifier=classifier,
    )
    system.validate()
    return system


def single_turn_system(
    answer_rows: dict[str, dict[str, float]],
    query_probs: dict[str, float],
    name="single-turn",
) -> AgentSystem:
    """One-task, one-turn system: all actions terminal and non-interactive.

    ``answer_rows`` maps each query to its action distribution.
    """
    action_labels = sorted({a for row in answer_rows.values() for a in row})
    actions = Alphabet("actions", tuple(action_labels))
    observations = Alphabet("observations", ("no_obs",) + tuple(sorted(query_probs)))
    tasks = Alphabet("tasks", ("t0",))
    db_states = Alphabet("db_states", ("d0",))
    classifier = ActionClassifier(
        taxonomy={a: ActionCategory.FINAL_REPORT for a in actions},
        rules={a: EvidentialityRule("always") for a in actions},
    )
    action_kernel = {
        (("t0",), q): Dist.from_mapping(actions, row) for q, row in answer_rows.items()
    }
    observation_kernel = {
        (a, ("t0",)): Dist.point_mass(observations, "no_obs") for a in actions
    }
    system = AgentSystem(
        name=name,
        actions=actions,
        observations=observations,
        tasks=tasks,
        db_states=db_states,
        null_observation="no_obs",
        context_features=("task",),
        action_kernel=action_kernel,
        observation_kernel=observation_kernel,
        update_entries={},
        initial_db={"t0": "d0"},
        initial_pairs=tuple(("t0", q, p) for q, p in sorted(query_probs.items())),
        terminal_actions=frozenset(actions.labels),
        t_max=1,
        reward_table=RewardTable(("terminal_action",), {(action_labels[0],): 1.0}),
        classifier=classifier,
    )
    system.validate()
    return system


def random_joint_table(rng: np.random.Generator, shape, axes=None):
    from agentuq import JointTable

    axes = axes or tuple(f"x{i}" for i in range(len(shape)))
    labels = tuple(tuple(f"{ax}{j}" for j in range(s)) for ax, s in zip(axes, shape))
    probs = rng.dirichlet(np.ones(int(np.prod(shape)))).reshape(shape)
    return JointTable(axes, labels, probs)
