"""Trajectory generation: seeded sampling, exhaustive enumeration, replay.

Sampling and enumeration are pure functions of (system, seed): identical
inputs produce identical outputs, and no shared state is mutated.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np

from .dist import Dist
from .errors import (
    ConfigurationError,
    EnumerationCapError,
    StructuralError,
    ValidationError,
)
from .system import AgentSystem, EnvState

DEFAULT_ENUM_CAP = 10**6
ENUM_CAP_ENV = "AGENTUQ_ENUM_CAP"

TERMINAL_ACTION = "terminal-action"
MAX_TURNS = "max-turns"


@dataclass(frozen=True)
class TurnEvent:
    """One completed turn: action, post-update state, observation, log-probs."""

    action: str
    state: EnvState
    observation: str
    action_log_prob: float
    observation_log_prob: float


@dataclass(frozen=True)
class Trajectory:
    """A realized trajectory with per-event log-probabilities."""

    task: str
    query: str
    initial_log_prob: float
    turns: tuple[TurnEvent, ...]
    terminated_by: str

    @property
    def length(self) -> int:
        return len(self.turns)

    def log_prob(self) -> float:
        """Sum of recorded per-event log-probabilities."""
        total = self.initial_log_prob
        for t in self.turns:
            total += t.action_log_prob + t.observation_log_prob
        return total

    def events_key(self) -> tuple:
        """Hashable identity: (task, query, ((action, observation), ...))."""
        return (self.task, self.query, tuple((t.action, t.observation) for t in self.turns))


def enumeration_cap(cap: int | None = None) -> int:
    if cap is not None:
        return cap
    env = os.environ.get(ENUM_CAP_ENV)
    return int(env) if env else DEFAULT_ENUM_CAP


def sample_trajectory(
    system: AgentSystem, seed: int, horizon: int | None = None
) -> Trajectory:
    """Draw one trajectory; deterministic in (system, seed)."""
    system.validate()
    rng = np.random.default_rng(seed)
    return _sample_with_rng(system, rng, horizon)


def sample_trajectories(
    system: AgentSystem, n: int, seed: int, horizon: int | None = None
) -> list[Trajectory]:
    """Draw n independent trajectories from one seeded stream."""
    system.validate()
    rng = np.random.default_rng(seed)
    return [_sample_with_rng(system, rng, horizon) for _ in range(n)]


def _draw(dist: Dist, rng: np.random.Generator) -> tuple[str, float]:
    label = dist.sample(float(rng.random()))
    return label, math.log(dist.prob(label))


def _sample_with_rng(
    system: AgentSystem, rng: np.random.Generator, horizon: int | None
) -> Trajectory:
    t_end = system.effective_horizon(horizon)
    pairs = system.initial_pairs
    u = float(rng.random())
    acc = 0.0
    task, query, p0 = pairs[-1]
    for ta, q, p in pairs:
        if p <= 0.0:
            continue
        acc += p
        task, query, p0 = ta, q, p
        if u < acc:
            break
    state = system.initial_state(task, query)
    prev_obs = query
    turns: list[TurnEvent] = []
    terminated_by = MAX_TURNS
    for turn in range(1, t_end + 1):
        row = system.action_row(state, prev_obs)
        action, logp_a = _draw(row, rng)
        state = system.step_state(state, prev_obs, action)
        obs_row = system.observation_row(action, state)
        obs, logp_o = _draw(obs_row, rng)
        turns.append(TurnEvent(action, state, obs, logp_a, logp_o))
        if action in system.terminal_actions:
            terminated_by = TERMINAL_ACTION
            break
        prev_obs = obs
    return Trajectory(task, query, math.log(p0), tuple(turns), terminated_by)


def enumerate_trajectories(
    system: AgentSystem, horizon: int | None = None, cap: int | None = None
) -> list[tuple[Trajectory, float]]:
    """Enumerate every positive-probability trajectory with its probability.

    Refuses upfront when the worst-case branching bound exceeds the cap
    (default 10**6, overridable via the AGENTUQ_ENUM_CAP environment
    variable), and aborts if the live leaf count ever passes the cap.
    """
    system.validate()
    cap = enumeration_cap(cap)
    estimate = system.worst_case_leaf_count(horizon)
    if estimate > cap:
        raise EnumerationCapError(estimate, cap)
    t_end = system.effective_horizon(horizon)

    leaves: list[tuple[Trajectory, float]] = []

    def expand(
        state: EnvState,
        prev_obs: str,
        turn: int,
        p: float,
        logp: float,
        turns: tuple[TurnEvent, ...],
        task: str,
        query: str,
        p0log: float,
    ) -> None:
        row = system.action_row(state, prev_obs)
        for action, pa in row.items():
            if pa <= 0.0:
                continue
            new_state = system.step_state(state, prev_obs, action)
            obs_row = system.observation_row(action, new_state)
            final = system.is_final_turn(action, turn, t_end)
            for obs, po in obs_row.items():
                if po <= 0.0:
                    continue
                event = TurnEvent(action, new_state, obs, math.log(pa), math.log(po))
                branch_p = p * pa * po
                if final:
                    reason = (
                        TERMINAL_ACTION
                        if action in system.terminal_actions
                        else MAX_TURNS
                    )
                    leaves.append(
                        (
                            Trajectory(task, query, p0log, turns + (event,), reason),
                            branch_p,
                        )
                    )
                    if len(leaves) > cap:
                        raise EnumerationCapError(len(leaves), cap)
                else:
                    expand(
                        new_state,
                        obs,
                        turn + 1,
                        branch_p,
                        logp + math.log(pa) + math.log(po),
                        turns + (event,),
                        task,
                        query,
                        p0log,
                    )

    for task, query, p in system.initial_pairs:
        if p <= 0.0:
            continue
        state = system.initial_state(task, query)
        expand(state, query, 1, p, math.log(p), (), task, query, math.log(p))
    return leaves


def trajectory_log_prob(system: AgentSystem, traj: Trajectory) -> float:
    """Recompute log P(trajectory) by replaying the kernels.

    Returns -inf when any realized event has probability zero. Raises
    StructuralError when the recorded states disagree with the update rule.
    """
    if traj.task not in system.tasks:
        raise ValidationError(f"trajectory task {traj.task!r} not in the task alphabet")
    if traj.query not in system.observations:
        raise ValidationError(f"trajectory query {traj.query!r} not in the observation alphabet")
    p0 = 0.0
    for task, query, p in system.initial_pairs:
        if task == traj.task and query == traj.query:
            p0 = p
            break
    if p0 <= 0.0:
        return -math.inf
    total = math.log(p0)
    state = system.initial_state(traj.task, traj.query)
    prev_obs = traj.query
    for i, turn in enumerate(traj.turns, 1):
        if turn.action not in system.actions:
            raise ValidationError(f"action {turn.action!r} not in the action alphabet")
        if turn.observation not in system.observations:
            raise ValidationError(
                f"observation {turn.observation!r} not in the observation alphabet"
            )
        row = system.action_row(state, prev_obs)
        pa = row.prob(turn.action)
        state = system.step_state(state, prev_obs, turn.action)
        if state != turn.state:
            raise StructuralError(
                f"turn {i}: recorded state disagrees with the update rule replay"
            )
        if pa <= 0.0:
            return -math.inf
        obs_row = system.observation_row(turn.action, state)
        po = obs_row.prob(turn.observation)
        if po <= 0.0:
            return -math.inf
        total += math.log(pa) + math.log(po)
        prev_obs = turn.observation
    return total


def apply_react_constraint(
    system: AgentSystem, cap: int | None = None
) -> AgentSystem:
    """Constrain action sampling to alternate thinking and non-thinking turns.

    A row is renormalized onto the thinking partition when the previous
    action was non-thinking, and onto the non-thinking partition otherwise
    (including at the first turn, where no previous action exists). The
    previous action's thinking flag is appended to the context features so
    the constrained kernel stays well keyed. Only reachable rows are built; a
    row left with zero mass is a validation error naming the offending
    context key.
    """
    if system.classifier is None:
        raise ConfigurationError(
            "react constraint needs a taxonomy with a thinking partition on the system"
        )
    thinking = {a for a in system.actions if system.classifier.is_thinking(a)}
    if not thinking or len(thinking) == len(system.actions.labels):
        raise ConfigurationError(
            "react constraint needs both thinking and non-thinking actions"
        )
    system.validate()
    cap = enumeration_cap(cap)
    if system.worst_case_leaf_count() > cap:
        raise EnumerationCapError(system.worst_case_leaf_count(), cap)

    features = system.context_features
    if "last_action_thinking" not in features:
        features = features + ("last_action_thinking",)

    base = system
    constrained_action: dict[tuple[tuple[str, ...], str], Dist] = {}
    constrained_obs: dict[tuple[str, tuple[str, ...]], Dist] = {}

    def ctx_of(state: EnvState) -> tuple[str, ...]:
        values = []
        for f in features:
            values.append(base.feature_value(state, f))
        return tuple(values)

    def masked_row(state: EnvState, prev_obs: str) -> Dist:
        key = (ctx_of(state), prev_obs)
        if key in constrained_action:
            return constrained_action[key]
        row = base.action_row(state, prev_obs)
        last = state.last_action
        prev_nonthinking = last is not None and not base.classifier.is_thinking(last)
        allowed = thinking if prev_nonthinking else set(base.actions.labels) - thinking
        try:
            new_row = row.restricted(allowed)
        except ValidationError:
            raise ValidationError(
                f"react constraint empties the action row for context {key[0]!r} "
                f"and observation {prev_obs!r}"
            ) from None
        constrained_action[key] = new_row
        return new_row

    def walk(state: EnvState, prev_obs: str, turn: int) -> None:
        row = masked_row(state, prev_obs)
        for action, pa in row.items():
            if pa <= 0.0:
                continue
            new_state = base.step_state(state, prev_obs, action)
            obs_row = base.observation_row(action, new_state)
            constrained_obs[(action, ctx_of(new_state))] = obs_row
            if system.is_final_turn(action, turn, base.t_max):
                continue
            for obs, po in obs_row.items():
                if po > 0.0:
                    walk(new_state, obs, turn + 1)

    for task, query, p in base.initial_pairs:
        if p > 0.0:
            walk(base.initial_state(task, query), query, 1)

    from dataclasses import replace

    return replace(
        base,
        name=base.name + "+react",
        context_features=features,
        action_kernel=constrained_action,
        observation_kernel=constrained_obs,
    )
