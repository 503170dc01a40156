"""Action taxonomy, interactivity, and evidentiality verdicts.

An action belongs to the uncertainty-reduction set when it is both
interactive (it invites user or tool feedback) and evidential (consistent
with the stored data), evaluated against the decision-time environment state.
Evidentiality is decided by scenario-authored predicates over the database
symbol; every predicate in the registry ignores the initial query so that
verdicts are well defined under query-excluding conditioning.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Mapping

from .errors import ConfigurationError

if TYPE_CHECKING:  # pragma: no cover
    from .system import EnvState


class ActionCategory(enum.Enum):
    INFORMATION_GATHERING = "information-gathering"
    CLARIFICATION = "clarification-or-confirmation"
    THINKING = "thinking"
    STATE_CHANGING = "state-changing-tool-call"
    FINAL_REPORT = "final-report"


# Interactivity is a fixed property of the category, not of the scenario.
CATEGORY_INTERACTIVE: dict[ActionCategory, bool] = {
    ActionCategory.INFORMATION_GATHERING: True,
    ActionCategory.CLARIFICATION: True,
    ActionCategory.THINKING: False,
    ActionCategory.STATE_CHANGING: False,
    ActionCategory.FINAL_REPORT: False,
}


@dataclass(frozen=True)
class ActionClass:
    """Taxonomy verdict for one action."""

    category: ActionCategory
    interactive: bool


@dataclass(frozen=True)
class EvidentialityRule:
    """A named predicate with parameters, evaluated on (action, state)."""

    predicate: str
    params: Mapping[str, object] = field(default_factory=dict)


def _pred_always(rule, action, state) -> bool:
    return True


def _pred_never(rule, action, state) -> bool:
    return False


def _pred_db_state_in(rule, action, state) -> bool:
    return state.db_state in set(rule.params.get("db_states", ()))


def _pred_db_state_not_in(rule, action, state) -> bool:
    return state.db_state not in set(rule.params.get("db_states", ()))


PREDICATES = {
    "always": _pred_always,
    "never": _pred_never,
    "db_state_in": _pred_db_state_in,
    "db_state_not_in": _pred_db_state_not_in,
}


def classify_action(action: str, taxonomy: Mapping[str, ActionCategory]) -> ActionClass:
    """Look up an action's category and derive its interactivity flag."""
    if action not in taxonomy:
        raise ConfigurationError(f"action {action!r} is not labeled in the taxonomy")
    category = taxonomy[action]
    return ActionClass(category, CATEGORY_INTERACTIVE[category])


def is_evidential(
    action: str, state: "EnvState", rules: Mapping[str, EvidentialityRule]
) -> bool:
    """Evaluate the scenario's evidentiality predicate for an action in a state."""
    if action not in rules:
        raise ConfigurationError(f"no evidentiality rule declared for action {action!r}")
    rule = rules[action]
    if rule.predicate not in PREDICATES:
        raise ConfigurationError(
            f"unknown evidentiality predicate {rule.predicate!r} for action {action!r}"
        )
    return PREDICATES[rule.predicate](rule, action, state)


def in_reduction_set(
    action: str,
    state: "EnvState",
    taxonomy: Mapping[str, ActionCategory],
    rules: Mapping[str, EvidentialityRule],
) -> bool:
    """Interactive AND evidential. Final-turn forcing is applied by aggregators."""
    cls = classify_action(action, taxonomy)
    return cls.interactive and is_evidential(action, state, rules)


@dataclass(frozen=True)
class ActionClassifier:
    """A taxonomy plus evidentiality rule table covering an action alphabet."""

    taxonomy: Mapping[str, ActionCategory]
    rules: Mapping[str, EvidentialityRule]

    def validate_total(self, actions) -> None:
        for a in actions:
            if a not in self.taxonomy:
                raise ConfigurationError(f"taxonomy does not cover action {a!r}")
            if a not in self.rules:
                raise ConfigurationError(
                    f"evidentiality rules do not cover action {a!r}"
                )

    def classify(self, action: str) -> ActionClass:
        return classify_action(action, self.taxonomy)

    def is_interactive(self, action: str) -> bool:
        return self.classify(action).interactive

    def is_thinking(self, action: str) -> bool:
        return self.classify(action).category is ActionCategory.THINKING

    def reduces(self, action: str, state: "EnvState") -> bool:
        return in_reduction_set(action, state, self.taxonomy, self.rules)


def uniform_classifier(actions, category: ActionCategory, evidential: bool) -> ActionClassifier:
    """Label every action identically; handy for forced-branch analyses."""
    rule = EvidentialityRule("always" if evidential else "never")
    return ActionClassifier(
        taxonomy={a: category for a in actions},
        rules={a: rule for a in actions},
    )


def all_reducing_classifier(actions) -> ActionClassifier:
    return uniform_classifier(actions, ActionCategory.CLARIFICATION, True)


def none_reducing_classifier(actions) -> ActionClassifier:
    return uniform_classifier(actions, ActionCategory.THINKING, False)


# Worked taxonomy for an airline assistant, used in tests and documentation.
AIRLINE_TAXONOMY: dict[str, ActionCategory] = {
    "get_reservation_details": ActionCategory.INFORMATION_GATHERING,
    "search_flights": ActionCategory.INFORMATION_GATHERING,
    "Could you provide your reservation number and last name?": ActionCategory.INFORMATION_GATHERING,
    "Do you want me to proceed with booking FQ8APE?": ActionCategory.CLARIFICATION,
    "plan_next_steps": ActionCategory.THINKING,
    "cancel_reservation": ActionCategory.STATE_CHANGING,
    "book_reservation": ActionCategory.STATE_CHANGING,
    "update_reservation_flights": ActionCategory.STATE_CHANGING,
    "Your reservation has been cancelled; your refund will be processed.": ActionCategory.FINAL_REPORT,
}
