"""Exact information-theoretic quantities over finite distributions.

All results are in nats. The convention 0*log(0) = 0 applies throughout;
``information_content`` on a zero-probability symbol returns ``math.inf`` as a
distinguished infinite-surprisal value rather than raising.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .dist import Dist, MASS_TOL
from .errors import ParameterError, ValidationError

LOG2 = math.log(2.0)


def entropy(d: Dist) -> float:
    """Shannon entropy H(d) = -sum p log p in nats."""
    h = 0.0
    for w in d.weights:
        if w > 0.0:
            h -= w * math.log(w)
    return h


def entropy_of_probs(probs: Sequence[float]) -> float:
    """Shannon entropy of a raw probability sequence (assumed normalized)."""
    h = 0.0
    for w in probs:
        if w > 0.0:
            h -= w * math.log(w)
    return h


def information_content(d: Dist, x: str) -> float:
    """Surprisal -log d(x); returns inf when d(x) = 0."""
    p = d.prob(x)
    if p <= 0.0:
        return math.inf
    return -math.log(p)


def kl_divergence(q: Dist, p: Dist) -> float:
    """Relative entropy D(q || p); requires support(q) within support(p)."""
    if q.alphabet != p.alphabet:
        raise ValidationError("KL divergence requires a shared alphabet")
    total = 0.0
    for lab, qw in q.items():
        if qw <= 0.0:
            continue
        pw = p.prob(lab)
        if pw <= 0.0:
            raise ValidationError(
                f"absolute continuity violated at symbol {lab!r}: q({lab})={qw}, p({lab})=0"
            )
        total += qw * math.log(qw / pw)
    return max(total, 0.0) if total > -1e-12 else total


def renyi_entropy(d: Dist, alpha: float) -> float:
    """Renyi entropy of order alpha: log(sum p^alpha) / (1 - alpha)."""
    if alpha <= 0.0 or alpha == 1.0 or math.isnan(alpha):
        raise ParameterError(f"Renyi order must be positive and != 1, got {alpha!r}")
    s = sum(w**alpha for w in d.weights if w > 0.0)
    return math.log(s) / (1.0 - alpha)


def max_entropy(d: Dist) -> float:
    """Hartley / order-0 limit: log of the number of positive-mass symbols.

    Exposed separately because the general Renyi formula is discontinuous at
    zero-mass symbols when alpha -> 0.
    """
    n = sum(1 for w in d.weights if w > 0.0)
    return math.log(n)


def tsallis_entropy(d: Dist, q: float) -> float:
    """Tsallis entropy (1 - sum p^q) / (q - 1); q -> 1 recovers Shannon."""
    if q == 1.0 or math.isnan(q):
        raise ParameterError("Tsallis index must differ from 1")
    s = sum(w**q for w in d.weights if w > 0.0)
    return (1.0 - s) / (q - 1.0)


def informational_energy(d: Dist) -> float:
    """Sum of squared probabilities; a certainty measure in [1/n, 1]."""
    return sum(w * w for w in d.weights)


def power_entropy(d: Dist) -> float:
    """Order-2 power entropy: 1 - sum p^2."""
    return 1.0 - informational_energy(d)


def onicescu_correlation(p: Dist, q: Dist) -> float:
    """Correlation coefficient sum_x p(x)q(x) / sqrt(IE(p) IE(q))."""
    if p.alphabet != q.alphabet:
        raise ValidationError("Onicescu correlation requires a shared alphabet")
    num = sum(a * b for a, b in zip(p.weights, q.weights))
    den = math.sqrt(informational_energy(p) * informational_energy(q))
    return num / den


@dataclass(frozen=True)
class MeasureSpec:
    """A named uncertainty measure with validated parameters.

    Kinds: information-content, shannon, relative (needs ``reference``),
    renyi (needs ``alpha`` > 0, != 1), tsallis (needs ``q`` != 1),
    informational-energy.
    """

    kind: str
    alpha: float | None = None
    q: float | None = None
    reference: Dist | None = None

    _KINDS = (
        "information-content",
        "shannon",
        "relative",
        "renyi",
        "tsallis",
        "informational-energy",
    )

    def __post_init__(self):
        if self.kind not in self._KINDS:
            raise ParameterError(f"unknown measure kind {self.kind!r}")
        if self.kind == "renyi":
            if self.alpha is None or self.alpha <= 0.0 or self.alpha == 1.0:
                raise ParameterError(
                    f"renyi measure needs alpha > 0, alpha != 1, got {self.alpha!r}"
                )
        if self.kind == "tsallis":
            if self.q is None or self.q == 1.0:
                raise ParameterError(f"tsallis measure needs q != 1, got {self.q!r}")
        if self.kind == "relative" and self.reference is None:
            raise ParameterError("relative measure needs a reference distribution")

    def apply(self, d: Dist) -> float:
        if self.kind == "shannon":
            return entropy(d)
        if self.kind == "renyi":
            return renyi_entropy(d, self.alpha)
        if self.kind == "tsallis":
            return tsallis_entropy(d, self.q)
        if self.kind == "informational-energy":
            return informational_energy(d)
        if self.kind == "relative":
            return kl_divergence(d, self.reference)
        raise ParameterError(
            "information-content is pointwise; use information_content(d, x)"
        )


class JointTable:
    """A dense joint probability table over named axes.

    ``probs`` is indexed by one symbol per axis; entries are non-negative and
    sum to one within tolerance. Axis labels give each coordinate a name.
    """

    __slots__ = ("axes", "labels", "probs")

    def __init__(
        self,
        axes: Sequence[str],
        labels: Sequence[Sequence[str]],
        probs: np.ndarray,
    ):
        axes = tuple(axes)
        labels = tuple(tuple(l) for l in labels)
        probs = np.asarray(probs, dtype=float)
        if len(set(axes)) != len(axes):
            raise ValidationError("joint table axes must be unique")
        if probs.ndim != len(axes):
            raise ValidationError(
                f"probs has {probs.ndim} dimensions but {len(axes)} axes were named"
            )
        if len(labels) != len(axes) or any(
            len(l) != s for l, s in zip(labels, probs.shape)
        ):
            raise ValidationError("axis labels do not match table shape")
        if np.any(probs < 0) or np.any(np.isnan(probs)):
            raise ValidationError("joint table entries must be non-negative")
        total = float(probs.sum())
        if abs(total - 1.0) > MASS_TOL:
            raise ValidationError(f"joint table mass is {total!r}, not 1")
        self.axes = axes
        self.labels = labels
        self.probs = probs

    @classmethod
    def from_counts(
        cls, axes: Sequence[str], labels: Sequence[Sequence[str]], counts: np.ndarray
    ) -> "JointTable":
        counts = np.asarray(counts, dtype=float)
        total = counts.sum()
        if total <= 0:
            raise ValidationError("counts must have positive total")
        return cls(axes, labels, counts / total)

    @classmethod
    def from_nested_mapping(
        cls,
        axes: Sequence[str],
        labels: Sequence[Sequence[str]],
        mass: Mapping[tuple, float],
    ) -> "JointTable":
        """Build a table from a sparse {(coord labels...): mass} mapping."""
        shape = tuple(len(l) for l in labels)
        arr = np.zeros(shape)
        idx = [{lab: i for i, lab in enumerate(l)} for l in labels]
        for key, m in mass.items():
            arr[tuple(ix[k] for ix, k in zip(idx, key))] += m
        return cls(axes, labels, arr / arr.sum())

    def _axis_numbers(self, names: Sequence[str]) -> tuple[int, ...]:
        out = []
        for n in names:
            if n not in self.axes:
                raise ValidationError(f"unknown axis {n!r}; have {list(self.axes)}")
            out.append(self.axes.index(n))
        return tuple(out)

    def marginal(self, keep: Sequence[str]) -> "JointTable":
        keep_nums = self._axis_numbers(keep)
        drop = tuple(i for i in range(len(self.axes)) if i not in keep_nums)
        marg = self.probs.sum(axis=drop) if drop else self.probs
        # reorder to the requested axis order
        current = [i for i in range(len(self.axes)) if i not in drop]
        order = [current.index(i) for i in keep_nums]
        marg = np.transpose(marg, order)
        return JointTable(
            tuple(keep),
            tuple(self.labels[i] for i in keep_nums),
            marg,
        )

    def entropy(self, axes: Sequence[str] | None = None) -> float:
        """Joint Shannon entropy of the named axes (all axes by default)."""
        table = self if axes is None else self.marginal(axes)
        p = table.probs.ravel()
        p = p[p > 0]
        return float(-(p * np.log(p)).sum())


def conditional_entropy(
    j: JointTable, target: str | Sequence[str], given: Sequence[str] = ()
) -> float:
    """H(target | given) = H(target, given) - H(given)."""
    targets = (target,) if isinstance(target, str) else tuple(target)
    given = tuple(given)
    overlap = set(targets) & set(given)
    if overlap:
        raise ValidationError(f"target and conditioning axes overlap: {sorted(overlap)}")
    h_joint = j.entropy(targets + given)
    h_given = j.entropy(given) if given else 0.0
    return h_joint - h_given


def mutual_information(
    j: JointTable, x: str, y: str, given: Sequence[str] = ()
) -> float:
    """Expected (conditional) mutual information I(x; y | given) in nats.

    Computed as H(x,z) + H(y,z) - H(z) - H(x,y,z), which is symmetric in
    (x, y) by construction. Tiny negative rounding is clamped to zero.
    """
    given = tuple(given)
    if x == y or x in given or y in given:
        raise ValidationError("mutual information axes must be disjoint")
    h_xz = j.entropy((x,) + given)
    h_yz = j.entropy((y,) + given)
    h_xyz = j.entropy((x, y) + given)
    h_z = j.entropy(given) if given else 0.0
    v = h_xz + h_yz - h_z - h_xyz
    if -1e-9 < v < 0.0:
        return 0.0
    return v


def pointwise_mutual_information(
    j: JointTable,
    x: str,
    x_value: str,
    y: str,
    y_value: str,
    given: Mapping[str, str] | None = None,
) -> float:
    """log p(x0, y0 | z0) - log p(x0 | z0) - log p(y0 | z0); may be negative."""
    given = dict(given or {})
    cond_axes = tuple(given)
    sub = j.marginal((x, y) + cond_axes)

    def mass_of(sel: dict[str, str]) -> float:
        arr = sub.probs
        # reduce axes from the last to keep indices stable
        for ai in range(len(sub.axes) - 1, -1, -1):
            name = sub.axes[ai]
            if name in sel:
                arr = np.take(arr, sub.labels[ai].index(sel[name]), axis=ai)
            else:
                arr = arr.sum(axis=ai)
        return float(arr)

    p_z = mass_of(given) if given else 1.0
    if p_z <= 0.0:
        raise ValidationError(f"conditioning event has zero probability: {given}")
    p_xyz = mass_of({**given, x: x_value, y: y_value})
    if p_xyz <= 0.0:
        raise ValidationError(
            f"joint event has zero probability: {x}={x_value}, {y}={y_value}, {given}"
        )
    p_xz = mass_of({**given, x: x_value})
    p_yz = mass_of({**given, y: y_value})
    return math.log(p_xyz / p_z) - math.log(p_xz / p_z) - math.log(p_yz / p_z)


def mixture_mutual_information(
    members: Sequence[tuple[float, Sequence[float]]],
) -> float:
    """I(O; M) for a mixture: members are (weight, conditional pmf of O).

    Weights need not be normalized. Equivalent to the weighted KL of each
    conditional against the mixture marginal; non-negative up to rounding.
    """
    total = sum(w for w, _ in members)
    if total <= 0.0:
        return 0.0
    n = len(members[0][1])
    mix = [0.0] * n
    for w, row in members:
        for i, p in enumerate(row):
            mix[i] += (w / total) * p
    info = 0.0
    for w, row in members:
        wn = w / total
        if wn <= 0.0:
            continue
        for p, m in zip(row, mix):
            if p > 0.0 and m > 0.0:
                info += wn * p * math.log(p / m)
    return max(info, 0.0) if info > -1e-9 else info


def to_bits(nats: float) -> float:
    return nats / LOG2
