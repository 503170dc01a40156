"""Empirical checks: reward-conditional ordering, failure AUROC, Monte-Carlo
convergence of plug-in estimators, and the randomized bound suite.

Exact mode weights trajectories by their enumerated probabilities and is
seed-independent; sampled mode uses seeded rollouts weighted by empirical
frequency.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .aggregate import (
    expected_report,
    gating_extrema,
    intermediate_information_total,
    pointwise_report,
)
from .classify import (
    ActionClassifier,
    all_reducing_classifier,
    none_reducing_classifier,
)
from .errors import ParameterError, UsageError
from .measures import entropy_of_probs
from .scenario import RandomSystemSpec, generate_random_system
from .simulate import Trajectory, enumerate_trajectories, sample_trajectories
from .system import AgentSystem

Aggregator = str | Callable[[AgentSystem, Trajectory], float]

_TOTAL_ALIASES = {
    "average": "weighted.length-normalized",
    "length-normalized": "weighted.length-normalized",
    "tail": "weighted.tail",
}


def _score_fn(
    system: AgentSystem, aggregator: Aggregator, classifier: ActionClassifier | None
) -> Callable[[Trajectory], float]:
    if callable(aggregator):
        return lambda traj: float(aggregator(system, traj))
    key = _TOTAL_ALIASES.get(aggregator, aggregator)

    def score(traj: Trajectory) -> float:
        report = pointwise_report(system, traj, classifier)
        if key not in report.totals:
            raise ParameterError(
                f"unknown aggregator {aggregator!r}; totals: {sorted(report.totals)}"
            )
        return report.totals[key]

    return score


def _weighted_population(
    system: AgentSystem,
    aggregator: Aggregator,
    mode: str,
    n: int | None,
    seed: int | None,
    classifier: ActionClassifier | None,
    horizon: int | None,
) -> list[tuple[float, float, float]]:
    """(score, weight, reward) triples over unique trajectories."""
    if mode == "exact":
        weighted = enumerate_trajectories(system, horizon=horizon)
    elif mode == "sampled":
        if n is None or seed is None:
            raise UsageError("sampled mode needs a sample count and a seed")
        samples = sample_trajectories(system, n, seed, horizon=horizon)
        grouped: dict[tuple, list] = {}
        for traj in samples:
            grouped.setdefault(traj.events_key(), [traj, 0])[1] += 1
        weighted = [(traj, count / n) for traj, count in grouped.values()]
    else:
        raise ParameterError(f"unknown mode {mode!r}")
    score = _score_fn(system, aggregator, classifier)
    out = []
    for traj, w in weighted:
        if w <= 0.0:
            continue
        final = traj.turns[-1]
        reward = system.reward_of(traj.task, traj.query, final.action, final.state.db_state)
        out.append((score(traj), w, reward))
    return out


@dataclass(frozen=True)
class DesideratumResult:
    """Reward-conditional mean uncertainties and their ordering."""

    levels: tuple[float, ...]
    means: tuple[float, ...]
    ordering_satisfied: bool
    gap: float
    auroc: float | None
    n: int | None
    exact: bool


def desideratum_check(
    system: AgentSystem,
    aggregator: Aggregator = "gated",
    mode: str = "exact",
    n: int | None = None,
    seed: int | None = None,
    classifier: ActionClassifier | None = None,
    horizon: int | None = None,
) -> DesideratumResult:
    """Check that expected uncertainty strictly decreases in reward."""
    population = _weighted_population(system, aggregator, mode, n, seed, classifier, horizon)
    by_level: dict[float, list[tuple[float, float]]] = defaultdict(list)
    for score, w, reward in population:
        by_level[reward].append((score, w))
    levels = tuple(sorted(by_level))
    if len(levels) < 2:
        raise UsageError(
            f"degenerate input: rewards take {len(levels)} distinct value(s); need >= 2"
        )
    means = []
    for level in levels:
        rows = by_level[level]
        mass = sum(w for _, w in rows)
        means.append(sum(s * w for s, w in rows) / mass)
    diffs = [means[i] - means[i + 1] for i in range(len(means) - 1)]
    ordering = all(d > 0.0 for d in diffs)
    gap = min(diffs)
    auroc = None
    if len(levels) == 2:
        auroc = _auroc_from_population(population, failure_level=levels[0])
    return DesideratumResult(
        levels=levels,
        means=tuple(means),
        ordering_satisfied=ordering,
        gap=gap,
        auroc=auroc,
        n=n if mode == "sampled" else None,
        exact=mode == "exact",
    )


def _auroc_from_population(
    population: Sequence[tuple[float, float, float]], failure_level: float
) -> float:
    positives = [(s, w) for s, w, r in population if r == failure_level]
    negatives = [(s, w) for s, w, r in population if r != failure_level]
    wp = sum(w for _, w in positives)
    wn = sum(w for _, w in negatives)
    if wp <= 0.0 or wn <= 0.0:
        raise UsageError("AUROC needs both failing and succeeding mass")
    total = 0.0
    for sp, wpos in positives:
        below = sum(w for s, w in negatives if s < sp)
        ties = sum(w for s, w in negatives if s == sp)
        total += wpos * (below + 0.5 * ties)
    return total / (wp * wn)


def failure_auroc(
    system: AgentSystem,
    aggregator: Aggregator = "gated",
    mode: str = "exact",
    n: int | None = None,
    seed: int | None = None,
    classifier: ActionClassifier | None = None,
    horizon: int | None = None,
) -> float:
    """AUROC of uncertainty as a detector of the failing (lowest) reward level."""
    population = _weighted_population(system, aggregator, mode, n, seed, classifier, horizon)
    levels = sorted({r for _, _, r in population})
    if len(levels) != 2:
        raise UsageError(f"failure AUROC needs a binary reward, found levels {levels}")
    return _auroc_from_population(population, failure_level=levels[0])


# ---------------------------------------------------------------------------
# Monte-Carlo convergence of plug-in estimators
# ---------------------------------------------------------------------------

MC_QUANTITIES = ("entropy", "conditional-MI", "exact-total")


@dataclass(frozen=True)
class ConvergenceResult:
    """Plug-in estimates against the exact value across sample sizes."""

    estimator: str
    exact: float
    sizes: tuple[int, ...]
    estimates: tuple[tuple[float, ...], ...]
    median_abs_error: tuple[float, ...]
    band_pass: tuple[bool, ...]

    def __post_init__(self):
        if any(a >= b for a, b in zip(self.sizes, self.sizes[1:])):
            raise ParameterError("sample sizes must be strictly increasing")


def _plugin_value(system: AgentSystem, quantity: str, weighted_leaves) -> float:
    if quantity == "exact-total":
        return entropy_of_probs([w for _, w in weighted_leaves])
    if quantity == "entropy":
        mass: dict[tuple[str, str], float] = defaultdict(float)
        for traj, w in weighted_leaves:
            mass[(traj.task, traj.query)] += w
        return entropy_of_probs(mass.values())
    if quantity == "conditional-MI":
        return intermediate_information_total(system, weighted_leaves)
    raise ParameterError(f"unknown quantity {quantity!r}; choose from {MC_QUANTITIES}")


def mc_convergence(
    system: AgentSystem,
    quantity: str = "exact-total",
    sizes: Sequence[int] = (100, 1000, 10000, 100000),
    seed: int = 0,
    repeats: int = 30,
    band: float = 0.02,
    horizon: int | None = None,
) -> ConvergenceResult:
    """Estimate a quantity by plug-in on i.i.d. trajectory draws.

    Draws are taken from the enumerated trajectory distribution (multinomial
    counts), which has the same law as sequential rollouts and scales to
    large n. The per-size band flag records whether the median absolute
    error across repeats lies within the declared band.
    """
    leaves = enumerate_trajectories(system, horizon=horizon)
    probs = np.array([p for _, p in leaves])
    trajs = [t for t, _ in leaves]
    exact = _plugin_value(system, quantity, leaves)
    rng = np.random.default_rng(seed)
    estimates: list[tuple[float, ...]] = []
    for size in sizes:
        row = []
        for _ in range(repeats):
            counts = rng.multinomial(size, probs)
            weighted = [
                (trajs[i], counts[i] / size) for i in np.flatnonzero(counts)
            ]
            row.append(_plugin_value(system, quantity, weighted))
        estimates.append(tuple(row))
    med_err = tuple(
        float(np.median([abs(e - exact) for e in row])) for row in estimates
    )
    band_pass = [err <= band for err in med_err]
    return ConvergenceResult(
        estimator=f"plug-in[{quantity}]",
        exact=exact,
        sizes=tuple(int(s) for s in sizes),
        estimates=tuple(estimates),
        median_abs_error=med_err,
        band_pass=tuple(band_pass),
    )


# ---------------------------------------------------------------------------
# Randomized bound suite
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BoundViolation:
    kind: str
    spec: RandomSystemSpec
    detail: str


@dataclass(frozen=True)
class BoundSuiteResult:
    n_systems: int
    checks: int
    violations: tuple[BoundViolation, ...]

    @property
    def passed(self) -> bool:
        return not self.violations


def random_classifier(
    actions, rng: np.random.Generator, db_labels: Sequence[str] = ()
) -> ActionClassifier:
    """A random taxonomy and rule table over an action alphabet."""
    from .classify import ActionCategory, EvidentialityRule

    categories = list(ActionCategory)
    taxonomy = {}
    rules = {}
    for a in actions:
        taxonomy[a] = categories[int(rng.integers(0, len(categories)))]
        u = rng.random()
        if u < 0.4:
            rules[a] = EvidentialityRule("always")
        elif u < 0.7 or not db_labels:
            rules[a] = EvidentialityRule("never")
        else:
            subset = tuple(d for d in db_labels if rng.random() < 0.5)
            rules[a] = EvidentialityRule(
                "db_state_in", {"db_states": subset or (db_labels[0],)}
            )
    return ActionClassifier(taxonomy=taxonomy, rules=rules)


def _random_spec(rng: np.random.Generator, seed: int) -> RandomSystemSpec:
    return RandomSystemSpec(
        n_actions=int(rng.integers(2, 4)),
        n_observations=int(rng.integers(2, 5)),
        n_tasks=int(rng.integers(1, 3)),
        n_db_states=int(rng.integers(1, 3)),
        t_max=int(rng.integers(2, 4)),
        n_terminal=1,
        concentration=float(rng.choice((0.7, 1.0, 1.5))),
        fraction_interactive=0.5,
        fraction_evidential=0.5,
        include_query_feature=bool(rng.random() < 0.7),
        seed=seed,
    )


def bound_suite(
    n_systems: int = 1000, seed: int = 0, tolerance: float = 1e-9
) -> BoundSuiteResult:
    """Assert the gating inequality and both extremal equalities on random systems.

    For every randomized system and classifier: gated <= exact; the extrema
    sandwich the gated total; all-reducing gating meets the lower value and
    none-reducing gating meets the upper one. Violations record the system
    spec for replay.
    """
    master = np.random.default_rng(seed)
    violations: list[BoundViolation] = []
    checks = 0
    for _ in range(n_systems):
        child_seed = int(master.integers(0, 2**31 - 1))
        spec = _random_spec(master, child_seed)
        system = generate_random_system(spec)
        classifier = random_classifier(
            system.actions, master, db_labels=system.db_states.labels
        )
        leaves = enumerate_trajectories(system)
        lower, upper = gating_extrema(system, leaves=leaves)
        report = expected_report(system, classifier, include_extrema=False)
        gated = report.totals["gated"]
        exact = report.totals["exact"]
        gated_all = expected_report(
            system, all_reducing_classifier(system.actions), include_extrema=False
        ).totals["gated"]
        gated_none = expected_report(
            system, none_reducing_classifier(system.actions), include_extrema=False
        ).totals["gated"]

        cases = (
            ("gated<=exact", gated <= exact + tolerance, f"gated={gated} exact={exact}"),
            (
                "sandwich",
                lower - tolerance <= gated <= upper + tolerance,
                f"lower={lower} gated={gated} upper={upper}",
            ),
            (
                "all-reducing==lower",
                abs(gated_all - lower) <= tolerance,
                f"gated={gated_all} lower={lower}",
            ),
            (
                "none-reducing==upper",
                abs(gated_none - upper) <= tolerance,
                f"gated={gated_none} upper={upper}",
            ),
        )
        for kind, ok, detail in cases:
            checks += 1
            if not ok:
                violations.append(BoundViolation(kind, spec, detail))
    return BoundSuiteResult(
        n_systems=n_systems, checks=checks, violations=tuple(violations)
    )
