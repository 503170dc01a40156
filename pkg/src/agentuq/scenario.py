"""Declarative scenarios: file schema, built-in worlds, randomized generation.

The file format is versioned JSON with kernels as exhaustive conditional
tables (one record per context/observation row). Built-in scenarios are
constructed programmatically and round-trip through the same schema.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .classify import ActionCategory, ActionClassifier, EvidentialityRule
from .dist import Alphabet, Dist
from .errors import ConfigurationError, SchemaError, ValidationError
from .system import NONE_MARK, AgentSystem, RewardTable

SCHEMA_VERSION = 1


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------


def serialize_scenario(system: AgentSystem) -> dict:
    """Render a system (with its taxonomy and rules) as a schema-v1 document."""
    if system.classifier is None:
        raise ConfigurationError("only systems with an attached classifier serialize")

    def ctx_dict(ctx: tuple[str, ...]) -> dict:
        return dict(zip(system.context_features, ctx))

    action_rows = [
        {
            "context": ctx_dict(ctx),
            "observation": obs,
            "dist": {a: p for a, p in row.items() if p > 0.0},
        }
        for (ctx, obs), row in sorted(system.action_kernel.items())
    ]
    obs_rows = [
        {
            "action": action,
            "context": ctx_dict(ctx),
            "dist": {o: p for o, p in row.items() if p > 0.0},
        }
        for (action, ctx), row in sorted(system.observation_kernel.items())
    ]
    update_entries = [
        {"db": db, "observation": obs, "action": act, "next_db": nxt}
        for (db, obs, act), nxt in sorted(system.update_entries.items())
        if nxt != db
    ]
    return {
        "schema_version": SCHEMA_VERSION,
        "name": system.name,
        "alphabets": {
            "actions": list(system.actions.labels),
            "observations": list(system.observations.labels),
            "tasks": list(system.tasks.labels),
            "db_states": list(system.db_states.labels),
        },
        "null_observation": system.null_observation,
        "context_features": list(system.context_features),
        "initial": {
            "db_by_task": dict(sorted(system.initial_db.items())),
            "dist": [
                {"task": t, "query": q, "p": p}
                for t, q, p in sorted(system.initial_pairs)
            ],
        },
        "action_kernel": action_rows,
        "observation_kernel": obs_rows,
        "update_rule": {"default": "identity", "entries": update_entries},
        "terminal_actions": sorted(system.terminal_actions),
        "t_max": system.t_max,
        "taxonomy": {
            a: system.classifier.taxonomy[a].value for a in system.actions.labels
        },
        "evidentiality": {
            a: {
                "predicate": system.classifier.rules[a].predicate,
                "params": dict(system.classifier.rules[a].params),
            }
            for a in system.actions.labels
        },
        "reward": {
            "on": list(system.reward_table.on),
            "table": [
                {
                    "key": dict(zip(system.reward_table.on, key)),
                    "value": value,
                }
                for key, value in sorted(system.reward_table.table.items())
            ],
            "default": system.reward_table.default,
        },
    }


def save_scenario(system: AgentSystem, path: str | Path) -> None:
    Path(path).write_text(
        json.dumps(serialize_scenario(system), sort_keys=True, indent=2) + "\n"
    )


def _require(doc: dict, field: str, kind, path: str):
    if field not in doc:
        raise SchemaError(f"{path}.{field}" if path else field, "missing field")
    value = doc[field]
    if kind is not None and not isinstance(value, kind):
        raise SchemaError(
            f"{path}.{field}" if path else field,
            f"expected {kind.__name__ if not isinstance(kind, tuple) else '/'.join(k.__name__ for k in kind)}, "
            f"got {type(value).__name__}",
        )
    return value


def system_from_dict(doc: dict) -> AgentSystem:
    """Build and validate a system from a schema-v1 document."""
    version = _require(doc, "schema_version", int, "")
    if version != SCHEMA_VERSION:
        raise SchemaError("schema_version", f"unsupported version {version}")
    name = _require(doc, "name", str, "")
    alphabets = _require(doc, "alphabets", dict, "")
    try:
        actions = Alphabet("actions", _require(alphabets, "actions", list, "alphabets"))
        observations = Alphabet(
            "observations", _require(alphabets, "observations", list, "alphabets")
        )
        tasks = Alphabet("tasks", _require(alphabets, "tasks", list, "alphabets"))
        db_states = Alphabet(
            "db_states", _require(alphabets, "db_states", list, "alphabets")
        )
    except ValidationError as e:
        raise SchemaError("alphabets", str(e)) from None

    null_obs = _require(doc, "null_observation", str, "")
    if null_obs not in observations:
        raise SchemaError("null_observation", f"undeclared symbol {null_obs!r}")
    features = tuple(_require(doc, "context_features", list, ""))

    initial = _require(doc, "initial", dict, "")
    db_by_task = _require(initial, "db_by_task", dict, "initial")
    for t, db in db_by_task.items():
        if t not in tasks:
            raise SchemaError("initial.db_by_task", f"undeclared task {t!r}")
        if db not in db_states:
            raise SchemaError("initial.db_by_task", f"undeclared db state {db!r}")
    pairs = []
    for i, row in enumerate(_require(initial, "dist", list, "initial")):
        path = f"initial.dist[{i}]"
        t = _require(row, "task", str, path)
        q = _require(row, "query", str, path)
        p = float(_require(row, "p", (int, float), path))
        if t not in tasks:
            raise SchemaError(path, f"undeclared task {t!r}")
        if q not in observations:
            raise SchemaError(path, f"undeclared observation {q!r}")
        pairs.append((t, q, p))

    def parse_context(ctx: dict, path: str) -> tuple[str, ...]:
        if set(ctx) != set(features):
            raise SchemaError(
                path, f"context keys {sorted(ctx)} do not match features {sorted(features)}"
            )
        return tuple(str(ctx[f]) for f in features)

    action_kernel = {}
    for i, row in enumerate(_require(doc, "action_kernel", list, "")):
        path = f"action_kernel[{i}]"
        ctx = parse_context(_require(row, "context", dict, path), path)
        obs = _require(row, "observation", str, path)
        if obs not in observations:
            raise SchemaError(path, f"undeclared observation {obs!r}")
        dist = _require(row, "dist", dict, path)
        for a in dist:
            if a not in actions:
                raise SchemaError(path, f"undeclared action {a!r}")
        try:
            action_kernel[(ctx, obs)] = Dist.from_mapping(actions, dist)
        except ValidationError as e:
            raise SchemaError(
                path, f"invalid row for context {ctx!r}, observation {obs!r}: {e}"
            ) from None

    observation_kernel = {}
    for i, row in enumerate(_require(doc, "observation_kernel", list, "")):
        path = f"observation_kernel[{i}]"
        action = _require(row, "action", str, path)
        if action not in actions:
            raise SchemaError(path, f"undeclared action {action!r}")
        ctx = parse_context(_require(row, "context", dict, path), path)
        dist = _require(row, "dist", dict, path)
        for o in dist:
            if o not in observations:
                raise SchemaError(path, f"undeclared observation {o!r}")
        try:
            observation_kernel[(action, ctx)] = Dist.from_mapping(observations, dist)
        except ValidationError as e:
            raise SchemaError(
                path, f"invalid row for action {action!r}, context {ctx!r}: {e}"
            ) from None

    update_doc = _require(doc, "update_rule", dict, "")
    if update_doc.get("default", "identity") != "identity":
        raise SchemaError("update_rule.default", "only 'identity' is supported")
    update_entries = {}
    for i, row in enumerate(update_doc.get("entries", [])):
        path = f"update_rule.entries[{i}]"
        key = (
            _require(row, "db", str, path),
            _require(row, "observation", str, path),
            _require(row, "action", str, path),
        )
        update_entries[key] = _require(row, "next_db", str, path)

    terminal = _require(doc, "terminal_actions", list, "")
    for a in terminal:
        if a not in actions:
            raise SchemaError("terminal_actions", f"undeclared action {a!r}")

    taxonomy_doc = _require(doc, "taxonomy", dict, "")
    taxonomy = {}
    for a, cat in taxonomy_doc.items():
        if a not in actions:
            raise SchemaError("taxonomy", f"undeclared action {a!r}")
        try:
            taxonomy[a] = ActionCategory(cat)
        except ValueError:
            raise SchemaError("taxonomy", f"unknown category {cat!r} for action {a!r}") from None

    evid_doc = _require(doc, "evidentiality", dict, "")
    rules = {}
    for a, rule in evid_doc.items():
        if a not in actions:
            raise SchemaError("evidentiality", f"undeclared action {a!r}")
        rules[a] = EvidentialityRule(
            _require(rule, "predicate", str, f"evidentiality[{a!r}]"),
            rule.get("params", {}),
        )

    reward_doc = _require(doc, "reward", dict, "")
    on = tuple(_require(reward_doc, "on", list, "reward"))
    table = {}
    for i, row in enumerate(reward_doc.get("table", [])):
        path = f"reward.table[{i}]"
        key_doc = _require(row, "key", dict, path)
        if set(key_doc) != set(on):
            raise SchemaError(path, f"key fields {sorted(key_doc)} do not match 'on' {sorted(on)}")
        table[tuple(str(key_doc[f]) for f in on)] = float(
            _require(row, "value", (int, float), path)
        )
    try:
        reward = RewardTable(on, table, float(reward_doc.get("default", 0.0)))
    except ValidationError as e:
        raise SchemaError("reward.on", str(e)) from None

    classifier = ActionClassifier(taxonomy=taxonomy, rules=rules)
    try:
        classifier.validate_total(actions)
    except ConfigurationError as e:
        raise SchemaError("taxonomy", str(e)) from None

    system = AgentSystem(
        name=name,
        actions=actions,
        observations=observations,
        tasks=tasks,
        db_states=db_states,
        null_observation=null_obs,
        context_features=features,
        action_kernel=action_kernel,
        observation_kernel=observation_kernel,
        update_entries=update_entries,
        initial_db=dict(db_by_task),
        initial_pairs=tuple(pairs),
        terminal_actions=frozenset(terminal),
        t_max=int(_require(doc, "t_max", int, "")),
        reward_table=reward,
        classifier=classifier,
    )
    try:
        system.validate()
    except ValidationError as e:
        raise SchemaError("system", str(e)) from None
    return system


def load_scenario(path: str | Path) -> AgentSystem:
    """Parse, validate, and return the system described by a scenario file."""
    raw = Path(path).read_text()
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as e:
        raise SchemaError("file", f"not valid JSON: {e}") from None
    if not isinstance(doc, dict):
        raise SchemaError("file", "top level must be an object")
    return system_from_dict(doc)


# ---------------------------------------------------------------------------
# Built-in scenarios
# ---------------------------------------------------------------------------

_PREFS = ("econ", "biz")


def _usual_of(task: str) -> str:
    return task.removeprefix("usual_")


def _true_pref(task: str, query: str) -> str:
    return query.removeprefix("states_") if query.startswith("states_") else _usual_of(task)


def builtin_mini_booking(policy: str = "mixed") -> AgentSystem:
    """A two-preference booking world where clarification pays.

    Each user has a usual travel class (the task symbol) and occasionally
    wants the other one. Explicit queries state the wanted class; vague
    queries mean "my usual". The agent may clarify (the user restates the
    concrete want), think, or book outright; after clarifying it books the
    stated class, after an unclarified think it guesses. Booking the wanted
    class earns reward 1.

    ``policy`` picks the opening action kernel: "mixed" (clarifies rarely,
    guesses with a bias), "clarify" (always asks first), or "guess" (always
    thinks, then books uniformly).
    """
    if policy not in ("mixed", "clarify", "guess"):
        raise ConfigurationError(f"unknown mini-booking policy {policy!r}")
    actions = Alphabet(
        "actions", ("ask_preference", "think_and_guess", "book_econ", "book_biz")
    )
    queries = tuple(f"states_{p}" for p in _PREFS) + ("vague",)
    answers = tuple(f"answer_{p}" for p in _PREFS)
    observations = Alphabet("observations", queries + answers + ("no_obs",))
    tasks = Alphabet("tasks", tuple(f"usual_{p}" for p in _PREFS))
    db_states = Alphabet(
        "db_states", ("unbooked",) + tuple(f"booked_{p}" for p in _PREFS)
    )
    features = ("task", "initial_query", "last_action", "last_observation")

    start_rows = {
        "mixed": {
            "states_econ": {"book_econ": 0.8, "ask_preference": 0.2},
            "states_biz": {"book_biz": 0.8, "ask_preference": 0.2},
            "vague": {"ask_preference": 0.2, "think_and_guess": 0.8},
        },
        "clarify": {q: {"ask_preference": 1.0} for q in queries},
        "guess": {q: {"think_and_guess": 1.0} for q in queries},
    }[policy]
    guess_row = (
        {"book_econ": 0.9, "book_biz": 0.1}
        if policy == "mixed"
        else {"book_econ": 0.5, "book_biz": 0.5}
    )

    action_kernel = {}
    observation_kernel = {}
    for task in tasks:
        for q in queries:
            # opening turn: the query is both the context's last observation
            # and the conditioning observation
            action_kernel[((task, q, NONE_MARK, q), q)] = Dist.from_mapping(
                actions, start_rows[q]
            )
            # clarification: the user restates the concrete want; afterwards
            # the agent books it, with a small deliberation branch
            observation_kernel[("ask_preference", (task, q, "ask_preference", q))] = (
                Dist.point_mass(observations, f"answer_{_true_pref(task, q)}")
            )
            for pref in _PREFS:
                action_kernel[((task, q, "ask_preference", q), f"answer_{pref}")] = (
                    Dist.from_mapping(
                        actions, {f"book_{pref}": 0.9, "think_and_guess": 0.1}
                    )
                )
                # thinking right after a clarification keeps the answer in view
                action_kernel[((task, q, "think_and_guess", f"answer_{pref}"), "no_obs")] = (
                    Dist.point_mass(actions, f"book_{pref}")
                )
                observation_kernel[
                    ("think_and_guess", (task, q, "think_and_guess", f"answer_{pref}"))
                ] = Dist.point_mass(observations, "no_obs")
            # unclarified thinking ends in a guess
            action_kernel[((task, q, "think_and_guess", q), "no_obs")] = (
                Dist.from_mapping(actions, guess_row)
            )
            observation_kernel[("think_and_guess", (task, q, "think_and_guess", q))] = (
                Dist.point_mass(observations, "no_obs")
            )
            for pref in _PREFS:
                for last_obs in observations:
                    observation_kernel[
                        (f"book_{pref}", (task, q, f"book_{pref}", last_obs))
                    ] = Dist.point_mass(observations, "no_obs")

    update_entries = {
        (db, obs, f"book_{pref}"): f"booked_{pref}"
        for db in db_states
        for obs in observations
        for pref in _PREFS
    }

    reward_entries = {}
    for task in tasks:
        for q in queries:
            want =_true_pref(task, q)
            for pref in _PREFS:
                reward_entries[(task, q, f"book_{pref}")] = 1.0 if pref == want else 0.0

    classifier = ActionClassifier(
        taxonomy={
            "ask_preference": ActionCategory.CLARIFICATION,
            "think_and_guess": ActionCategory.THINKING,
            "book_econ": ActionCategory.STATE_CHANGING,
            "book_biz": ActionCategory.STATE_CHANGING,
        },
        rules={a: EvidentialityRule("always") for a in actions},
    )

    n_pairs = len(tasks) * len(queries)
    system = AgentSystem(
        name=f"mini-booking[{policy}]",
        actions=actions,
        observations=observations,
        tasks=tasks,
        db_states=db_states,
        null_observation="no_obs",
        context_features=features,
        action_kernel=action_kernel,
        observation_kernel=observation_kernel,
        update_entries=update_entries,
        initial_db={t: "unbooked" for t in tasks},
        initial_pairs=tuple(
            (t, q, 1.0 / n_pairs) for t in tasks for q in queries
        ),
        terminal_actions=frozenset({"book_econ", "book_biz"}),
        t_max=3,
        reward_table=RewardTable(("task", "initial_query", "terminal_action"), reward_entries),
        classifier=classifier,
    )
    system.validate()
    return system


def builtin_deterministic_chain() -> AgentSystem:
    """A single forced terminal action; every uncertainty total is zero."""
    actions = Alphabet("actions", ("finish",))
    observations = Alphabet("observations", ("query", "no_obs"))
    tasks = Alphabet("tasks", ("t0",))
    db_states = Alphabet("db_states", ("d0",))
    ctx = ("t0",)
    classifier = ActionClassifier(
        taxonomy={"finish": ActionCategory.FINAL_REPORT},
        rules={"finish": EvidentialityRule("always")},
    )
    system = AgentSystem(
        name="deterministic-chain",
        actions=actions,
        observations=observations,
        tasks=tasks,
        db_states=db_states,
        null_observation="no_obs",
        context_features=("task",),
        action_kernel={(ctx, "query"): Dist.point_mass(actions, "finish")},
        observation_kernel={("finish", ctx): Dist.point_mass(observations, "no_obs")},
        update_entries={},
        initial_db={"t0": "d0"},
        initial_pairs=(("t0", "query", 1.0),),
        terminal_actions=frozenset({"finish"}),
        t_max=1,
        reward_table=RewardTable(("terminal_action",), {("finish",): 1.0}),
        classifier=classifier,
    )
    system.validate()
    return system


def builtin_uniform_binary_2turn() -> AgentSystem:
    """Two turns of uniform binary probes and answers: 32 equiprobable leaves."""
    actions = Alphabet("actions", ("probe_a", "probe_b"))
    observations = Alphabet("observations", ("h", "t", "no_obs"))
    tasks = Alphabet("tasks", ("t0",))
    db_states = Alphabet("db_states", ("d0",))
    classifier = ActionClassifier(
        taxonomy={a: ActionCategory.INFORMATION_GATHERING for a in actions},
        rules={a: EvidentialityRule("always") for a in actions},
    )
    uniform_actions = Dist.uniform(actions)
    uniform_obs = Dist.uniform(observations, ("h", "t"))
    action_kernel = {}
    observation_kernel = {}
    for turn in ("0", "1"):
        for obs in ("h", "t"):
            action_kernel[((turn,), obs)] = uniform_actions
    for turn in ("1", "2"):
        for a in actions:
            observation_kernel[(a, (turn,))] = uniform_obs
    system = AgentSystem(
        name="uniform-binary-2turn",
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
        initial_pairs=(("t0", "h", 0.5), ("t0", "t", 0.5)),
        terminal_actions=frozenset(),
        t_max=2,
        reward_table=RewardTable(("terminal_action",), {}, default=0.0),
        classifier=classifier,
    )
    system.validate()
    return system


BUILTIN_SCENARIOS = {
    "mini-booking": builtin_mini_booking,
    "deterministic-chain": builtin_deterministic_chain,
    "uniform-binary-2turn": builtin_uniform_binary_2turn,
}


def builtin_scenario(name: str) -> AgentSystem:
    if name not in BUILTIN_SCENARIOS:
        raise ConfigurationError(
            f"unknown builtin scenario {name!r}; available: {sorted(BUILTIN_SCENARIOS)}"
        )
    return BUILTIN_SCENARIOS[name]()


# ---------------------------------------------------------------------------
# Randomized systems for property suites
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RandomSystemSpec:
    """Shape parameters for a randomized system; generation is pure in seed.

    ``concentration`` sharpens kernel rows: 1 gives flat-Dirichlet rows,
    large values approach deterministic kernels.
    """

    n_actions: int = 3
    n_observations: int = 3
    n_tasks: int = 2
    n_db_states: int = 2
    t_max: int = 2
    n_terminal: int = 1
    concentration: float = 1.0
    fraction_interactive: float = 0.5
    fraction_evidential: float = 0.5
    include_query_feature: bool = True
    seed: int = 0

    def __post_init__(self):
        if self.n_actions < 1 or self.n_tasks < 1 or self.n_db_states < 1:
            raise ValidationError("alphabet sizes must be >= 1")
        if self.n_observations < 2:
            raise ValidationError("need at least one non-null observation")
        if self.n_terminal < 1:
            raise ValidationError("infeasible spec: zero terminal actions")
        if self.n_terminal > self.n_actions:
            raise ValidationError("more terminal actions than actions")
        if self.t_max < 1:
            raise ValidationError("t_max must be >= 1")
        if self.concentration <= 0:
            raise ValidationError("concentration must be positive")
        for f in (self.fraction_interactive, self.fraction_evidential):
            if not (0.0 <= f <= 1.0):
                raise ValidationError("fractions must lie in [0, 1]")


def _sharp_row(rng: np.random.Generator, size: int, concentration: float) -> tuple[float, ...]:
    raw = rng.dirichlet(np.ones(size))
    w = raw**concentration
    total = w.sum()
    if not np.isfinite(total) or total <= 0.0:
        w = np.zeros(size)
        w[int(raw.argmax())] = 1.0
        total = 1.0
    return tuple(float(x) for x in (w / total))


def generate_random_system(spec: RandomSystemSpec) -> AgentSystem:
    """Build a valid, enumerable system deterministically from the spec's seed."""
    rng = np.random.default_rng(spec.seed)
    actions = Alphabet("actions", tuple(f"a{i}" for i in range(spec.n_actions)))
    obs_labels = ("null_obs",) + tuple(f"o{i}" for i in range(1, spec.n_observations))
    observations = Alphabet("observations", obs_labels)
    queries = obs_labels[1:]
    tasks = Alphabet("tasks", tuple(f"t{i}" for i in range(spec.n_tasks)))
    db_states = Alphabet("db_states", tuple(f"d{i}" for i in range(spec.n_db_states)))
    terminal = frozenset(actions.labels[-spec.n_terminal :])

    taxonomy = {}
    rules = {}
    for a in actions:
        if a in terminal:
            taxonomy[a] = (
                ActionCategory.STATE_CHANGING
                if rng.random() < 0.5
                else ActionCategory.FINAL_REPORT
            )
        elif rng.random() < spec.fraction_interactive:
            taxonomy[a] = (
                ActionCategory.INFORMATION_GATHERING
                if rng.random() < 0.5
                else ActionCategory.CLARIFICATION
            )
        else:
            taxonomy[a] = (
                ActionCategory.THINKING
                if rng.random() < 0.5
                else ActionCategory.STATE_CHANGING
            )
        if rng.random() < spec.fraction_evidential:
            if rng.random() < 0.5 and spec.n_db_states > 1:
                subset = [d for d in db_states if rng.random() < 0.7]
                if not subset:
                    subset = [db_states.labels[0]]
                rules[a] = EvidentialityRule("db_state_in", {"db_states": tuple(subset)})
            else:
                rules[a] = EvidentialityRule("always")
        else:
            rules[a] = EvidentialityRule("never")
    classifier = ActionClassifier(taxonomy=taxonomy, rules=rules)

    features = (
        ("db_state", "initial_query") if spec.include_query_feature else ("db_state",)
    )
    contexts = (
        [(d, q) for d in db_states for q in queries]
        if spec.include_query_feature
        else [(d,) for d in db_states]
    )

    action_kernel = {}
    for ctx in contexts:
        for obs in observations:
            action_kernel[(ctx, obs)] = Dist(
                actions, _sharp_row(rng, len(actions), spec.concentration)
            )
    observation_kernel = {}
    null_row = Dist.point_mass(observations, "null_obs")
    for a in actions:
        interactive = classifier.is_interactive(a)
        for ctx in contexts:
            if interactive:
                row = _sharp_row(rng, len(queries), spec.concentration)
                weights = (0.0,) + row
                observation_kernel[(a, ctx)] = Dist(observations, weights)
            else:
                observation_kernel[(a, ctx)] = null_row

    update_entries = {}
    for db in db_states:
        for obs in observations:
            for a in actions:
                update_entries[(db, obs, a)] = db_states.labels[
                    int(rng.integers(0, len(db_states)))
                ]

    initial_db = {
        t: db_states.labels[int(rng.integers(0, len(db_states)))] for t in tasks
    }
    flat = _sharp_row(rng, spec.n_tasks * len(queries), spec.concentration)
    initial_pairs = tuple(
        (t, q, flat[i * len(queries) + j])
        for i, t in enumerate(tasks)
        for j, q in enumerate(queries)
    )

    reward_entries = {}
    for a in sorted(terminal):
        for db in db_states:
            reward_entries[(a, db)] = float(rng.integers(0, 2))
    if len(set(reward_entries.values())) < 2:
        first = sorted(reward_entries)[0]
        reward_entries[first] = 1.0 - reward_entries[first]

    system = AgentSystem(
        name=f"random[seed={spec.seed}]",
        actions=actions,
        observations=observations,
        tasks=tasks,
        db_states=db_states,
        null_observation="null_obs",
        context_features=features,
        action_kernel=action_kernel,
        observation_kernel=observation_kernel,
        update_entries=update_entries,
        initial_db=initial_db,
        initial_pairs=initial_pairs,
        terminal_actions=terminal,
        t_max=spec.t_max,
        reward_table=RewardTable(("terminal_action", "db_state"), reward_entries),
        classifier=classifier,
    )
    system.validate()
    return system
