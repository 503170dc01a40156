"""Finite alphabets, symbols, and probability vectors.

``Dist`` is the universal carrier for kernel rows and marginals: a vector of
non-negative weights over a named alphabet, validated to sum to one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping

from .errors import ValidationError

MASS_TOL = 1e-9


@dataclass(frozen=True)
class Symbol:
    """An atomic value of an alphabet: a small index plus a display label."""

    id: int
    label: str


class Alphabet:
    """An ordered, immutable set of unique labels."""

    __slots__ = ("name", "labels", "_index")

    def __init__(self, name: str, labels: Iterable[str]):
        labels = tuple(labels)
        if not labels:
            raise ValidationError(f"alphabet {name!r} must contain at least one label")
        if len(set(labels)) != len(labels):
            raise ValidationError(f"alphabet {name!r} has duplicate labels")
        self.name = name
        self.labels = labels
        self._index = {lab: i for i, lab in enumerate(labels)}

    def __len__(self) -> int:
        return len(self.labels)

    def __iter__(self) -> Iterator[str]:
        return iter(self.labels)

    def __contains__(self, label: object) -> bool:
        return label in self._index

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Alphabet)
            and self.name == other.name
            and self.labels == other.labels
        )

    def __hash__(self) -> int:
        return hash((self.name, self.labels))

    def __repr__(self) -> str:
        return f"Alphabet({self.name!r}, {list(self.labels)!r})"

    def index(self, label: str) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise ValidationError(
                f"label {label!r} not in alphabet {self.name!r}"
            ) from None

    def symbol(self, label: str) -> Symbol:
        return Symbol(self.index(label), label)

    @property
    def symbols(self) -> tuple[Symbol, ...]:
        return tuple(Symbol(i, lab) for i, lab in enumerate(self.labels))


@dataclass(frozen=True)
class Dist:
    """A probability vector over an alphabet.

    Weights are validated at construction: all non-negative and summing to one
    within ``MASS_TOL``.
    """

    alphabet: Alphabet
    weights: tuple[float, ...]

    def __post_init__(self):
        if len(self.weights) != len(self.alphabet):
            raise ValidationError(
                f"weight vector length {len(self.weights)} does not match "
                f"alphabet {self.alphabet.name!r} of size {len(self.alphabet)}"
            )
        total = 0.0
        for lab, w in zip(self.alphabet.labels, self.weights):
            if w < 0.0 or math.isnan(w):
                raise ValidationError(
                    f"negative or NaN weight {w!r} for {lab!r} in distribution "
                    f"over {self.alphabet.name!r}"
                )
            total += w
        if abs(total - 1.0) > MASS_TOL:
            raise ValidationError(
                f"distribution over {self.alphabet.name!r} sums to {total!r}, not 1"
            )

    @classmethod
    def from_mapping(cls, alphabet: Alphabet, probs: Mapping[str, float]) -> "Dist":
        for lab in probs:
            if lab not in alphabet:
                raise ValidationError(
                    f"label {lab!r} not in alphabet {alphabet.name!r}"
                )
        return cls(alphabet, tuple(float(probs.get(lab, 0.0)) for lab in alphabet))

    @classmethod
    def point_mass(cls, alphabet: Alphabet, label: str) -> "Dist":
        i = alphabet.index(label)
        return cls(alphabet, tuple(1.0 if j == i else 0.0 for j in range(len(alphabet))))

    @classmethod
    def uniform(cls, alphabet: Alphabet, support: Iterable[str] | None = None) -> "Dist":
        if support is None:
            n = len(alphabet)
            return cls(alphabet, (1.0 / n,) * n)
        idx = {alphabet.index(lab) for lab in support}
        if not idx:
            raise ValidationError("uniform distribution needs a non-empty support")
        p = 1.0 / len(idx)
        return cls(alphabet, tuple(p if j in idx else 0.0 for j in range(len(alphabet))))

    def prob(self, label: str) -> float:
        return self.weights[self.alphabet.index(label)]

    def items(self) -> Iterator[tuple[str, float]]:
        return iter(zip(self.alphabet.labels, self.weights))

    def support(self) -> tuple[str, ...]:
        return tuple(lab for lab, w in self.items() if w > 0.0)

    def sample(self, u: float) -> str:
        """Map a uniform draw u in [0, 1) onto a label by cumulative weight."""
        acc = 0.0
        last = self.alphabet.labels[0]
        for lab, w in self.items():
            if w <= 0.0:
                continue
            acc += w
            last = lab
            if u < acc:
                return lab
        return last

    def restricted(self, allowed: Iterable[str]) -> "Dist":
        """Renormalize onto a subset of labels; zero-mass subsets raise."""
        allowed = set(allowed)
        masked = [w if lab in allowed else 0.0 for lab, w in self.items()]
        total = sum(masked)
        if total <= 0.0:
            raise ValidationError("restriction leaves zero total mass")
        return Dist(self.alphabet, tuple(w / total for w in masked))

    def total_variation(self, other: "Dist") -> float:
        if self.alphabet != other.alphabet:
            raise ValidationError("total variation requires a shared alphabet")
        return 0.5 * sum(abs(a - b) for a, b in zip(self.weights, other.weights))
