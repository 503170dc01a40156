"""Trajectory-level uncertainty totals under every supported aggregation scheme.

Expected mode (canonical) works on the enumerated prefix tree: per-turn terms
are conditional entropies and the reduction credit is expected conditional
mutual information between the turn's observation and the initial query given
the realized prefix with the query removed. Pointwise mode scores one realized
trajectory with surprisals and pointwise mutual information; it is a
diagnostic and carries no bound guarantee.

A turn's ending branches (terminal action, or the horizon cap) always
propagate their full uncertainty regardless of the classifier.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from typing import Mapping, Sequence

from .classify import ActionClassifier
from .dist import Dist
from .errors import (
    ConfigurationError,
    EnumerationCapError,
    ParameterError,
    UsageError,
    ValidationError,
)
from .measures import entropy_of_probs, mixture_mutual_information, to_bits
from .simulate import Trajectory, enumerate_trajectories, enumeration_cap
from .system import AgentSystem, EnvState

GATE_DENOMINATOR_FLOOR = 1e-12

DIRECTION_REDUCE = "reduce"
DIRECTION_PROPAGATE = "propagate"
DIRECTION_MIXED = "mixed"


@dataclass(frozen=True)
class TurnUncertainty:
    """Per-turn decomposition of the trajectory uncertainty.

    ``signed_contribution`` is the turn's term in the gated total:
    minus the information gain on reduction branches, the full
    action-plus-observation term on propagation branches.
    """

    index: int
    action_term: float
    observation_term: float
    direction: str
    in_reduction_set: bool
    info_gain: float
    signed_contribution: float
    gate_value: float | None

    def to_json_dict(self, scale: float = 1.0) -> dict:
        return {
            "index": self.index,
            "action_term": self.action_term * scale,
            "observation_term": self.observation_term * scale,
            "direction": self.direction,
            "in_reduction_set": self.in_reduction_set,
            "info_gain": self.info_gain * scale,
            "signed_contribution": self.signed_contribution * scale,
            "gate_value": self.gate_value,
        }


@dataclass(frozen=True)
class TrajectoryReport:
    """Totals, per-turn breakdown, extrema bounds, and reward for one analysis."""

    mode: str
    task_volatility: float
    query_uncertainty: float
    initial_uncertainty: float
    turns: tuple[TurnUncertainty, ...]
    totals: Mapping[str, float]
    lemma1_lower: float | None
    lemma1_upper: float | None
    reward: float

    def to_json_dict(self, units: str = "nats") -> dict:
        if units not in ("nats", "bits"):
            raise ParameterError(f"units must be 'nats' or 'bits', got {units!r}")
        scale = 1.0 if units == "nats" else to_bits(1.0)
        out = {
            "mode": self.mode,
            "units": units,
            "initial": {
                "total": self.initial_uncertainty * scale,
                "task_volatility": self.task_volatility * scale,
                "query_uncertainty": self.query_uncertainty * scale,
            },
            "turns": [t.to_json_dict(scale) for t in self.turns],
            "totals": {k: v * scale for k, v in sorted(self.totals.items())},
            "reward": self.reward,
        }
        if self.lemma1_lower is not None and self.lemma1_upper is not None:
            out["lemma1"] = {
                "lower": self.lemma1_lower * scale,
                "upper": self.lemma1_upper * scale,
            }
        return out


@dataclass(frozen=True)
class AggregatorSpec:
    """Names one aggregation scheme over per-turn uncertainty terms."""

    kind: str
    weights: tuple[float, ...] | None = None
    preset: str | None = None
    k: int | None = None
    mode: str = "expected"

    _KINDS = ("exact-total", "single-step", "sum-no-ambiguity", "max-step", "weighted", "gated")
    _PRESETS = ("length-normalized", "tail", "top-k")

    def __post_init__(self):
        if self.kind not in self._KINDS:
            raise ParameterError(f"unknown aggregator kind {self.kind!r}")
        if self.mode not in ("expected", "pointwise"):
            raise ParameterError(f"unknown mode {self.mode!r}")
        if self.kind == "weighted":
            if (self.weights is None) == (self.preset is None):
                raise ParameterError("weighted aggregator needs weights or a preset, not both")
            if self.preset is not None and self.preset not in self._PRESETS:
                raise ParameterError(f"unknown weighted preset {self.preset!r}")
            if self.preset == "top-k" and (self.k is None or self.k < 1):
                raise ParameterError("top-k preset needs k >= 1")
            if self.weights is not None:
                if any(w < 0 for w in self.weights):
                    raise ParameterError("weights must be non-negative")
                if abs(sum(self.weights) - 1.0) > 1e-9:
                    raise ParameterError(f"weights sum to {sum(self.weights)!r}, not 1")


def multistep(terms: Sequence[float], spec: AggregatorSpec) -> float:
    """Aggregate per-turn action-uncertainty terms under one scheme."""
    terms = [float(u) for u in terms]
    if not terms:
        raise ParameterError("multistep needs at least one per-turn term")
    if any(u < 0 or math.isnan(u) for u in terms):
        raise ParameterError("per-turn terms must be non-negative")
    if spec.kind == "sum-no-ambiguity":
        return sum(terms)
    if spec.kind == "max-step":
        return max(terms)
    if spec.kind == "weighted":
        if spec.weights is not None:
            if len(spec.weights) != len(terms):
                raise ParameterError(
                    f"{len(spec.weights)} weights supplied for {len(terms)} terms"
                )
            return sum(w * u for w, u in zip(spec.weights, terms))
        if spec.preset == "length-normalized":
            return sum(terms) / len(terms)
        if spec.preset == "tail":
            return terms[-1]
        if spec.preset == "top-k":
            if spec.k > len(terms):
                raise ParameterError(f"top-k preset with k={spec.k} exceeds {len(terms)} terms")
            top = sorted(terms, reverse=True)[: spec.k]
            return sum(top) / spec.k
    raise ParameterError(f"aggregator kind {spec.kind!r} is not a per-turn scheme")


def process_reward_analogs(step_probs: Sequence[float]) -> tuple[float, float]:
    """Product and minimum of step-wise probabilities (credit-aggregation analogs)."""
    probs = [float(p) for p in step_probs]
    if not probs:
        raise ParameterError("need at least one step probability")
    for p in probs:
        if not (0.0 < p <= 1.0):
            raise ParameterError(f"step probabilities must lie in (0, 1], got {p!r}")
    product = 1.0
    for p in probs:
        product *= p
    return product, min(probs)


# ---------------------------------------------------------------------------
# Expected-mode sweep over the prefix tree
# ---------------------------------------------------------------------------


@dataclass
class _Node:
    state: EnvState
    prev_obs: str
    p: float
    query: str
    cell: tuple


@dataclass
class _Sweep:
    initial_uncertainty: float
    task_volatility: float
    query_uncertainty: float
    turns: list[TurnUncertainty]
    expected_reward: float
    exact_total: float
    gated_total: float


def _expected_sweep(
    system: AgentSystem,
    classifier: ActionClassifier | None,
    horizon: int | None,
    cap: int | None = None,
) -> _Sweep:
    system.validate()
    if classifier is not None:
        classifier.validate_total(system.actions)
    cap = enumeration_cap(cap)
    estimate = system.worst_case_leaf_count(horizon)
    if estimate > cap:
        raise EnumerationCapError(estimate, cap)
    t_end = system.effective_horizon(horizon)

    h0 = 0.0
    task_mass: dict[str, float] = defaultdict(float)
    nodes: list[_Node] = []
    for task, query, p in system.initial_pairs:
        if p <= 0.0:
            continue
        h0 -= p * math.log(p)
        task_mass[task] += p
        nodes.append(
            _Node(
                system.initial_state(task, query),
                query,
                p,
                query,
                (task, system.initial_db[task]),
            )
        )
    task_volatility = entropy_of_probs(task_mass.values())

    turns: list[TurnUncertainty] = []
    expected_reward = 0.0
    obs_entropy_cache: dict[int, float] = {}

    for i in range(1, t_end + 1):
        if not nodes:
            break
        act_term = 0.0
        obs_term = 0.0
        prop_term = 0.0
        prop_mass = 0.0
        reduce_cells: dict[tuple, list[tuple[float, tuple[float, ...]]]] = {}
        prop_cellkeys: set[tuple] = set()
        next_nodes: list[_Node] = []

        for node in nodes:
            row = system.action_row(node.state, node.prev_obs)
            for action, pa in row.items():
                if pa <= 0.0:
                    continue
                surprisal = -math.log(pa)
                bp = node.p * pa
                act_term += bp * surprisal
                new_state = system.step_state(node.state, node.prev_obs, action)
                obs_row = system.observation_row(action, new_state)
                h_obs = obs_entropy_cache.get(id(obs_row))
                if h_obs is None:
                    h_obs = entropy_of_probs(obs_row.weights)
                    obs_entropy_cache[id(obs_row)] = h_obs
                obs_term += bp * h_obs
                final = system.is_final_turn(action, i, t_end)
                cellkey = node.cell + (action, new_state.db_state)
                if final:
                    expected_reward += bp * system.reward_of(
                        node.state.task, node.query, action, new_state.db_state
                    )
                reduces = (
                    not final
                    and classifier is not None
                    and classifier.reduces(action, node.state)
                )
                if reduces:
                    reduce_cells.setdefault(cellkey, []).append((bp, obs_row.weights))
                else:
                    prop_term += bp * (surprisal + h_obs)
                    prop_mass += bp
                    if not final and classifier is not None:
                        prop_cellkeys.add(cellkey)
                if not final:
                    for obs, po in obs_row.items():
                        if po <= 0.0:
                            continue
                        next_nodes.append(
                            _Node(new_state, obs, bp * po, node.query, cellkey + (obs,))
                        )

        mixed = prop_cellkeys & set(reduce_cells)
        if mixed:
            raise ConfigurationError(
                "classifier verdict differs within a query-excluding conditioning "
                f"cell: {sorted(mixed)[0]!r}"
            )

        info_gain = 0.0
        reduce_mass = 0.0
        for members in reduce_cells.values():
            cell_mass = sum(w for w, _ in members)
            reduce_mass += cell_mass
            info_gain += cell_mass * mixture_mutual_information(members)

        signed = prop_term - info_gain
        if reduce_mass > 0.0 and prop_mass > 0.0:
            direction = DIRECTION_MIXED
        elif reduce_mass > 0.0:
            direction = DIRECTION_REDUCE
        else:
            direction = DIRECTION_PROPAGATE
        gate_value = signed / act_term if act_term > GATE_DENOMINATOR_FLOOR else None
        turns.append(
            TurnUncertainty(
                index=i,
                action_term=act_term,
                observation_term=obs_term,
                direction=direction,
                in_reduction_set=direction == DIRECTION_REDUCE,
                info_gain=info_gain,
                signed_contribution=signed,
                gate_value=gate_value,
            )
        )
        if len(next_nodes) > cap:
            raise EnumerationCapError(len(next_nodes), cap)
        nodes = next_nodes

    exact = h0 + sum(t.action_term + t.observation_term for t in turns)
    gated = h0 + sum(t.signed_contribution for t in turns)
    return _Sweep(
        initial_uncertainty=h0,
        task_volatility=task_volatility,
        query_uncertainty=h0 - task_volatility,
        turns=turns,
        expected_reward=expected_reward,
        exact_total=exact,
        gated_total=gated,
    )


def _standard_totals(
    exact: float, action_terms: Sequence[float], top_k: int | None
) -> dict[str, float]:
    totals = {"exact": exact}
    if action_terms:
        totals["sum"] = multistep(action_terms, AggregatorSpec("sum-no-ambiguity"))
        totals["max"] = multistep(action_terms, AggregatorSpec("max-step"))
        totals["weighted.length-normalized"] = multistep(
            action_terms, AggregatorSpec("weighted", preset="length-normalized")
        )
        totals["weighted.tail"] = multistep(
            action_terms, AggregatorSpec("weighted", preset="tail")
        )
        if top_k is not None:
            totals[f"weighted.top-{top_k}"] = multistep(
                action_terms, AggregatorSpec("weighted", preset="top-k", k=top_k)
            )
    return totals


def expected_report(
    system: AgentSystem,
    classifier: ActionClassifier | None = None,
    horizon: int | None = None,
    include_extrema: bool = True,
    top_k: int | None = None,
    cap: int | None = None,
) -> TrajectoryReport:
    """Expected-mode report: conditional entropies and expected information gain."""
    sweep = _expected_sweep(system, classifier, horizon, cap)
    totals = _standard_totals(
        sweep.exact_total, [t.action_term for t in sweep.turns], top_k
    )
    if classifier is not None:
        totals["gated"] = sweep.gated_total
    lower = upper = None
    if include_extrema:
        lower, upper = gating_extrema(system, horizon=horizon, cap=cap)
    return TrajectoryReport(
        mode="expected",
        task_volatility=sweep.task_volatility,
        query_uncertainty=sweep.query_uncertainty,
        initial_uncertainty=sweep.initial_uncertainty,
        turns=tuple(sweep.turns),
        totals=totals,
        lemma1_lower=lower,
        lemma1_upper=upper,
        reward=sweep.expected_reward,
    )


def exact_total(system: AgentSystem, horizon: int | None = None, cap: int | None = None) -> float:
    """Chain-rule total: initial uncertainty plus all turn-level conditional entropies."""
    return _expected_sweep(system, None, horizon, cap).exact_total


def gated_total(
    system: AgentSystem,
    horizon: int | None = None,
    classifier: ActionClassifier | None = None,
    mode: str = "expected",
    trajectory: Trajectory | None = None,
    cap: int | None = None,
) -> TrajectoryReport:
    """Information-gated total. Expected mode is canonical; pointwise scores
    one realized trajectory and requires ``trajectory``."""
    classifier = classifier or system.classifier
    if classifier is None:
        raise ConfigurationError("gated total needs an action classifier")
    if mode == "expected":
        return expected_report(system, classifier, horizon, cap=cap)
    if mode == "pointwise":
        if trajectory is None:
            raise UsageError("pointwise mode needs a realized trajectory")
        return pointwise_report(system, trajectory, classifier)
    raise ParameterError(f"unknown mode {mode!r}")


def single_step(system: AgentSystem, question_ambiguity: bool) -> float:
    """Single-turn reduction: answer uncertainty given the query, plus the
    query's own uncertainty when ``question_ambiguity`` is set."""
    system.validate()
    if system.t_max != 1:
        pairs_ok = True
        for task, query, p in system.initial_pairs:
            if p <= 0.0:
                continue
            row = system.action_row(system.initial_state(task, query), query)
            if any(pa > 0.0 and a not in system.terminal_actions for a, pa in row.items()):
                pairs_ok = False
                break
        if not pairs_ok:
            raise UsageError("single-step reduction requires a one-turn system")
    query_mass: dict[str, float] = defaultdict(float)
    mix: dict[str, dict[str, float]] = defaultdict(lambda: defaultdict(float))
    for task, query, p in system.initial_pairs:
        if p <= 0.0:
            continue
        query_mass[query] += p
        row = system.action_row(system.initial_state(task, query), query)
        for a, pa in row.items():
            if pa > 0.0:
                mix[query][a] += p * pa
    h_answer = 0.0
    for query, mass in query_mass.items():
        h_answer += mass * entropy_of_probs([v / mass for v in mix[query].values()])
    if question_ambiguity:
        return entropy_of_probs(query_mass.values()) + h_answer
    return h_answer


# ---------------------------------------------------------------------------
# Analytic extrema via leaf grouping (independent of the forward sweep)
# ---------------------------------------------------------------------------


def _leaf_turn_groups(system: AgentSystem, leaves):
    """Group leaf mass by prefix and by query-excluding cell.

    Returns (initial mass by pair, per-prefix (action, obs) mass,
    per-intermediate-cell (query, obs) mass, set of final (prefix, action)
    branch keys). Works for exact probabilities and empirical weights alike.
    """
    init_mass: dict[tuple[str, str], float] = defaultdict(float)
    prefix_mass: dict[tuple, dict[tuple[str, str], float]] = defaultdict(
        lambda: defaultdict(float)
    )
    cell_mass: dict[tuple, dict[tuple[str, str], float]] = defaultdict(
        lambda: defaultdict(float)
    )
    final_branches: set[tuple] = set()
    for traj, p in leaves:
        if p <= 0.0:
            continue
        init_mass[(traj.task, traj.query)] += p
        prefix = (traj.task, traj.query)
        cell = (traj.task, system.initial_db[traj.task])
        last = len(traj.turns)
        for i, turn in enumerate(traj.turns, 1):
            prefix_mass[prefix][(turn.action, turn.observation)] += p
            cellkey = cell + (turn.action, turn.state.db_state)
            if i < last:
                cell_mass[cellkey][(traj.query, turn.observation)] += p
            else:
                final_branches.add((prefix, turn.action))
            prefix = prefix + ((turn.action, turn.observation),)
            cell = cellkey + (turn.observation,)
    return init_mass, prefix_mass, cell_mass, final_branches


def _cell_information(cells: Mapping[tuple, Mapping[tuple[str, str], float]]) -> float:
    """Sum of cell mass times in-cell mutual information between query and observation."""
    total = 0.0
    for mass in cells.values():
        queries = sorted({q for q, _ in mass})
        observations = sorted({o for _, o in mass})
        obs_index = {o: j for j, o in enumerate(observations)}
        members = []
        cell_total = 0.0
        for q in queries:
            row = [0.0] * len(observations)
            w = 0.0
            for (mq, o), m in mass.items():
                if mq == q:
                    row[obs_index[o]] += m
                    w += m
            if w > 0.0:
                members.append((w, [v / w for v in row]))
                cell_total += w
        total += cell_total * mixture_mutual_information(members)
    return total


def gating_extrema(
    system: AgentSystem,
    horizon: int | None = None,
    classifier: ActionClassifier | None = None,
    leaves=None,
    cap: int | None = None,
) -> tuple[float, float]:
    """Closed-form extrema of the gated total over all classifiers.

    The lower value assumes every non-ending turn reduces (its contribution is
    minus the expected in-cell mutual information with the initial query); the
    upper value assumes every turn propagates, which recovers the exact
    chain-rule total. Ending turns always contribute their full conditional
    action-and-observation entropy. ``classifier`` is accepted for signature
    symmetry only; the extrema do not depend on it.
    """
    del classifier
    if leaves is None:
        leaves = enumerate_trajectories(system, horizon=horizon, cap=cap)
    init_mass, prefix_mass, cell_mass, final_branches = _leaf_turn_groups(system, leaves)

    h0 = entropy_of_probs(init_mass.values())

    upper = h0
    for mass in prefix_mass.values():
        group_total = sum(mass.values())
        if group_total <= 0.0:
            continue
        upper += group_total * entropy_of_probs([m / group_total for m in mass.values()])

    info = _cell_information(cell_mass)

    final_term = 0.0
    for prefix, action in final_branches:
        mass = prefix_mass[prefix]
        group_total = sum(mass.values())
        branch = {o: m for (a, o), m in mass.items() if a == action}
        branch_total = sum(branch.values())
        if branch_total <= 0.0:
            continue
        final_term += branch_total * (-math.log(branch_total / group_total))
        final_term += branch_total * entropy_of_probs(
            [m / branch_total for m in branch.values()]
        )

    lower = h0 - info + final_term
    return lower, upper


def intermediate_information_total(system: AgentSystem, leaves) -> float:
    """Total expected information gain over all non-ending turns.

    Accepts exact enumeration output or empirically weighted samples.
    """
    _, _, cell_mass, _ = _leaf_turn_groups(system, leaves)
    total = sum(sum(m.values()) for m in cell_mass.values())
    if total <= 0.0:
        return 0.0
    return _cell_information(cell_mass)


# ---------------------------------------------------------------------------
# Pointwise mode (per realized trajectory)
# ---------------------------------------------------------------------------


def _pointwise_cell_members(
    system: AgentSystem, traj: Trajectory, turn_index: int
) -> tuple[list[tuple[str, float, Dist]], EnvState]:
    """Sibling queries sharing the trajectory's query-excluding cell at a turn.

    Returns (members, realized post-action state); each member is
    (query, weight through the turn's action, observation row at the turn).
    """
    members: list[tuple[str, float, Dist]] = []
    realized_state = None
    for task, query, p0 in system.initial_pairs:
        if task != traj.task or p0 <= 0.0:
            continue
        w = p0
        state = system.initial_state(task, query)
        prev = query
        ok = True
        post_state = None
        for j in range(1, turn_index + 1):
            turn = traj.turns[j - 1]
            row = system.action_row(state, prev)
            pa = row.prob(turn.action)
            if pa <= 0.0:
                ok = False
                break
            w *= pa
            post_state = system.step_state(state, prev, turn.action)
            if post_state.db_state != turn.state.db_state:
                ok = False
                break
            if j < turn_index:
                obs_row = system.observation_row(turn.action, post_state)
                po = obs_row.prob(turn.observation)
                if po <= 0.0:
                    ok = False
                    break
                w *= po
                state, prev = post_state, turn.observation
        if not ok or post_state is None:
            continue
        obs_row = system.observation_row(traj.turns[turn_index - 1].action, post_state)
        members.append((query, w, obs_row))
        if query == traj.query:
            realized_state = post_state
    if realized_state is None:
        raise ValidationError(
            "pointwise gating on a zero-probability event: the trajectory's own "
            f"prefix has no mass at turn {turn_index}"
        )
    return members, realized_state


def _pointwise_pmi(
    system: AgentSystem, traj: Trajectory, turn_index: int
) -> float:
    members, _ = _pointwise_cell_members(system, traj, turn_index)
    obs = traj.turns[turn_index - 1].observation
    total = sum(w for _, w, _ in members)
    mix = 0.0
    realized = None
    for query, w, row in members:
        p = row.prob(obs)
        mix += (w / total) * p
        if query == traj.query:
            realized = p
    if realized is None or realized <= 0.0 or mix <= 0.0:
        raise ValidationError(
            f"pointwise gating on a zero-probability event at turn {turn_index}"
        )
    return math.log(realized) - math.log(mix)


def pointwise_report(
    system: AgentSystem,
    traj: Trajectory,
    classifier: ActionClassifier | None = None,
    top_k: int | None = None,
) -> TrajectoryReport:
    """Score one realized trajectory with surprisals and pointwise information gain.

    Pointwise gains may be negative, so no extrema bounds are attached.
    """
    system.validate()
    classifier = classifier or system.classifier
    if classifier is None:
        raise ConfigurationError("pointwise report needs an action classifier")
    classifier.validate_total(system.actions)

    p0 = 0.0
    task_mass = 0.0
    for task, query, p in system.initial_pairs:
        if task == traj.task:
            task_mass += p
            if query == traj.query:
                p0 = p
    if p0 <= 0.0:
        raise ValidationError("trajectory's initial pair has zero probability")
    initial = -math.log(p0)
    task_vol = -math.log(task_mass)

    turns: list[TurnUncertainty] = []
    state = system.initial_state(traj.task, traj.query)
    prev = traj.query
    last = len(traj.turns)
    for i, turn in enumerate(traj.turns, 1):
        row = system.action_row(state, prev)
        pa = row.prob(turn.action)
        if pa <= 0.0:
            raise ValidationError(f"turn {i}: realized action has zero probability")
        decision_state = state
        state = system.step_state(state, prev, turn.action)
        obs_row = system.observation_row(turn.action, state)
        po = obs_row.prob(turn.observation)
        if po <= 0.0:
            raise ValidationError(f"turn {i}: realized observation has zero probability")
        act_term = -math.log(pa)
        obs_term = -math.log(po)
        final = i == last
        reduces = not final and classifier.reduces(turn.action, decision_state)
        if reduces:
            gain = _pointwise_pmi(system, traj, i)
            signed = -gain
            direction = DIRECTION_REDUCE
        else:
            gain = 0.0
            signed = act_term + obs_term
            direction = DIRECTION_PROPAGATE
        gate_value = signed / act_term if act_term > GATE_DENOMINATOR_FLOOR else None
        turns.append(
            TurnUncertainty(
                index=i,
                action_term=act_term,
                observation_term=obs_term,
                direction=direction,
                in_reduction_set=reduces,
                info_gain=gain,
                signed_contribution=signed,
                gate_value=gate_value,
            )
        )
        prev = turn.observation

    exact = initial + sum(t.action_term + t.observation_term for t in turns)
    totals = _standard_totals(exact, [t.action_term for t in turns], top_k)
    totals["gated"] = initial + sum(t.signed_contribution for t in turns)
    final_turn = traj.turns[-1]
    reward = system.reward_of(
        traj.task, traj.query, final_turn.action, final_turn.state.db_state
    )
    return TrajectoryReport(
        mode="pointwise",
        task_volatility=task_vol,
        query_uncertainty=initial - task_vol,
        initial_uncertainty=initial,
        turns=tuple(turns),
        totals=totals,
        lemma1_lower=None,
        lemma1_upper=None,
        reward=reward,
    )
