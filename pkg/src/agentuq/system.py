"""The stochastic agent system: environment states, kernels, and termination.

A system generates trajectories turn by turn: an action is drawn conditioned
on the previous environment state and observation, the environment state is
updated deterministically, then an observation is drawn conditioned on the
action and the new state. Kernels read the state through a finite context
projection (a tuple of named features) so the whole process stays exactly
enumerable while the full history is retained for conditioning.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Mapping, Sequence

from .classify import ActionClassifier
from .dist import Alphabet, Dist
from .errors import ConfigurationError, ValidationError

NONE_MARK = "<none>"

# Features the context projection and reward patterns may reference.
CONTEXT_FEATURES = (
    "task",
    "db_state",
    "last_action",
    "last_observation",
    "initial_query",
    "turn_index",
    "last_action_thinking",
)

REWARD_FEATURES = ("task", "initial_query", "terminal_action", "db_state")


@dataclass(frozen=True)
class EnvState:
    """Environment state: task id, hidden database symbol, and full history.

    ``history`` is a tuple of (action, observation) pairs. Pair 0 is
    ``(None, initial_query)``. The newest pair holds the just-taken action
    with its observation still pending (None) until the turn completes.
    """

    task: str
    db_state: str
    history: tuple[tuple[str | None, str | None], ...]

    @property
    def initial_query(self) -> str:
        return self.history[0][1]

    @property
    def turn_index(self) -> int:
        return sum(1 for a, _ in self.history if a is not None)

    @property
    def last_action(self) -> str | None:
        for a, _ in reversed(self.history):
            if a is not None:
                return a
        return None

    @property
    def last_observation(self) -> str:
        """Most recent completed observation (the initial query at the start)."""
        for _, o in reversed(self.history):
            if o is not None:
                return o
        raise ValidationError("state has no completed observation")

    def completed_events(self) -> tuple[tuple[str | None, str | None], ...]:
        return tuple((a, o) for a, o in self.history if o is not None)


@dataclass(frozen=True)
class RewardTable:
    """Reward as a pattern table over terminal-trajectory features.

    ``on`` names the features forming the lookup key; unmatched keys fall back
    to ``default``. Values are reals (scenarios typically use {0, 1}).
    """

    on: tuple[str, ...]
    table: Mapping[tuple[str, ...], float]
    default: float = 0.0

    def __post_init__(self):
        for f in self.on:
            if f not in REWARD_FEATURES:
                raise ValidationError(
                    f"unknown reward feature {f!r}; allowed: {REWARD_FEATURES}"
                )

    def key_for(self, task: str, query: str, terminal_action: str, final_db: str):
        values = {
            "task": task,
            "initial_query": query,
            "terminal_action": terminal_action,
            "db_state": final_db,
        }
        return tuple(values[f] for f in self.on)

    def value(self, task: str, query: str, terminal_action: str, final_db: str) -> float:
        return float(
            self.table.get(self.key_for(task, query, terminal_action, final_db), self.default)
        )


@dataclass(frozen=True)
class AgentSystem:
    """Full generative specification of a finite-state interactive agent.

    Kernels are exhaustive conditional tables keyed by context tuples produced
    by ``context_key``. Non-interactive actions must emit the designated null
    observation with probability one; terminal actions must be non-interactive.
    """

    name: str
    actions: Alphabet
    observations: Alphabet
    tasks: Alphabet
    db_states: Alphabet
    null_observation: str
    context_features: tuple[str, ...]
    # (context key, previous observation) -> Dist over actions
    action_kernel: Mapping[tuple[tuple[str, ...], str], Dist]
    # (action, context key of the post-action state) -> Dist over observations
    observation_kernel: Mapping[tuple[str, tuple[str, ...]], Dist]
    # (db_state, observation, action) -> next db_state; identity when absent
    update_entries: Mapping[tuple[str, str, str], str]
    initial_db: Mapping[str, str]
    initial_pairs: tuple[tuple[str, str, float], ...]
    terminal_actions: frozenset[str]
    t_max: int
    reward_table: RewardTable
    classifier: ActionClassifier | None = None

    # ----- context projection -----

    def feature_value(self, state: EnvState, feature: str) -> str:
        if feature == "task":
            return state.task
        if feature == "db_state":
            return state.db_state
        if feature == "last_action":
            return state.last_action if state.last_action is not None else NONE_MARK
        if feature == "last_observation":
            return state.last_observation
        if feature == "initial_query":
            return state.initial_query
        if feature == "turn_index":
            return str(state.turn_index)
        if feature == "last_action_thinking":
            if self.classifier is None:
                raise ConfigurationError(
                    "feature 'last_action_thinking' needs a taxonomy on the system"
                )
            last = state.last_action
            thinking = last is not None and self.classifier.is_thinking(last)
            return "thinking" if thinking else "other"
        raise ConfigurationError(f"unknown context feature {feature!r}")

    def context_key(self, state: EnvState) -> tuple[str, ...]:
        return tuple(self.feature_value(state, f) for f in self.context_features)

    # ----- generative steps -----

    def initial_state(self, task: str, query: str) -> EnvState:
        return EnvState(task, self.initial_db[task], ((None, query),))

    def step_state(self, state: EnvState, prev_obs: str, action: str) -> EnvState:
        """Deterministic update: record prev_obs, append the action, update db."""
        new_db = self.update_entries.get((state.db_state, prev_obs, action), state.db_state)
        last_a, last_o = state.history[-1]
        if last_o is None:
            history = state.history[:-1] + ((last_a, prev_obs), (action, None))
        else:
            history = state.history + ((action, None),)
        return EnvState(state.task, new_db, history)

    def action_row(self, state: EnvState, prev_obs: str) -> Dist:
        key = (self.context_key(state), prev_obs)
        try:
            return self.action_kernel[key]
        except KeyError:
            raise ValidationError(
                f"no action kernel row for context {key[0]!r} "
                f"and observation {prev_obs!r}"
            ) from None

    def observation_row(self, action: str, state_after: EnvState) -> Dist:
        key = (action, self.context_key(state_after))
        try:
            return self.observation_kernel[key]
        except KeyError:
            raise ValidationError(
                f"no observation kernel row for action {action!r} "
                f"and context {key[1]!r}"
            ) from None

    def is_final_turn(self, action: str, turn: int, horizon: int) -> bool:
        return action in self.terminal_actions or turn >= horizon

    def effective_horizon(self, horizon: int | None = None) -> int:
        if horizon is None:
            return self.t_max
        if horizon < 1:
            raise ValidationError(f"horizon must be >= 1, got {horizon}")
        return min(horizon, self.t_max)

    def reward_of(self, task: str, query: str, terminal_action: str, final_db: str) -> float:
        return self.reward_table.value(task, query, terminal_action, final_db)

    # ----- validation -----

    def validate(self) -> None:
        """Check static invariants; raises ValidationError on the first failure."""
        if self.t_max < 1:
            raise ValidationError(f"t_max must be >= 1, got {self.t_max}")
        if self.null_observation not in self.observations:
            raise ValidationError(
                f"null observation {self.null_observation!r} not in the observation alphabet"
            )
        for f in self.context_features:
            if f not in CONTEXT_FEATURES:
                raise ValidationError(f"unknown context feature {f!r}")
        for a in self.terminal_actions:
            if a not in self.actions:
                raise ValidationError(f"terminal action {a!r} not in the action alphabet")

        total = 0.0
        for task, query, p in self.initial_pairs:
            if task not in self.tasks:
                raise ValidationError(f"initial pair references unknown task {task!r}")
            if query not in self.observations:
                raise ValidationError(f"initial pair references unknown query {query!r}")
            if query == self.null_observation:
                raise ValidationError("the initial query may not be the null observation")
            if p < 0:
                raise ValidationError(f"negative initial probability for ({task}, {query})")
            total += p
        if abs(total - 1.0) > 1e-9:
            raise ValidationError(f"initial distribution sums to {total!r}, not 1")
        seen = set()
        for task, query, _ in self.initial_pairs:
            if (task, query) in seen:
                raise ValidationError(f"duplicate initial pair ({task!r}, {query!r})")
            seen.add((task, query))

        for task in self.tasks:
            if task not in self.initial_db:
                raise ValidationError(f"no initial db state declared for task {task!r}")
            if self.initial_db[task] not in self.db_states:
                raise ValidationError(
                    f"initial db state {self.initial_db[task]!r} not in the db alphabet"
                )

        for (ctx, obs), row in self.action_kernel.items():
            if obs not in self.observations:
                raise ValidationError(f"action kernel keyed on unknown observation {obs!r}")
            if row.alphabet != self.actions:
                raise ValidationError(
                    f"action kernel row for context {ctx!r} is not over the action alphabet"
                )
            total = sum(row.weights)
            if abs(total - 1.0) > 1e-9 or any(w < 0 for w in row.weights):
                raise ValidationError(
                    f"action kernel row for context {ctx!r}, observation {obs!r} "
                    f"is not normalized (mass {total!r})"
                )
        null_idx = self.observations.index(self.null_observation)
        for (action, ctx), row in self.observation_kernel.items():
            if action not in self.actions:
                raise ValidationError(f"observation kernel keyed on unknown action {action!r}")
            if row.alphabet != self.observations:
                raise ValidationError(
                    f"observation kernel row for action {action!r} is not over the "
                    "observation alphabet"
                )
            if self.classifier is not None and not self.classifier.is_interactive(action):
                if row.weights[null_idx] != 1.0:
                    raise ValidationError(
                        f"non-interactive action {action!r} must emit the null observation "
                        f"with probability 1 (context {ctx!r})"
                    )
        if self.classifier is not None:
            for a in self.terminal_actions:
                if self.classifier.is_interactive(a):
                    raise ValidationError(
                        f"terminal action {a!r} must be non-interactive"
                    )

        for (db, obs, act), new_db in self.update_entries.items():
            for sym, alph, what in (
                (db, self.db_states, "db state"),
                (obs, self.observations, "observation"),
                (act, self.actions, "action"),
                (new_db, self.db_states, "target db state"),
            ):
                if sym not in alph:
                    raise ValidationError(f"update rule references unknown {what} {sym!r}")

    def with_classifier(self, classifier: ActionClassifier) -> "AgentSystem":
        return replace(self, classifier=classifier)

    def worst_case_leaf_count(self, horizon: int | None = None) -> int:
        """Upper bound on enumerable trajectories (branching product)."""
        t = self.effective_horizon(horizon)
        return len(self.initial_pairs) * (len(self.actions) * len(self.observations)) ** t
