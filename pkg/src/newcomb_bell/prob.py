"""Finite distributions and conditional probability tables.

Labels are arbitrary hashables (strings, ints, tuples such as ``(+1, -1)``).
Masses are floats; every constructed distribution is validated to be
nonnegative and to sum to one within :data:`TOL`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Hashable, Mapping, Sequence

from .errors import (
    DegenerateDistribution,
    InvalidMass,
    MissingValue,
    SupportMismatch,
    UnknownOutcome,
)

TOL = 1e-9

Label = Hashable


@dataclass(frozen=True)
class FiniteDistribution:
    support: tuple
    mass: tuple

    def __post_init__(self):
        support = tuple(self.support)
        mass = tuple(map(float, self.mass))
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "mass", mass)
        if len(support) != len(mass):
            raise SupportMismatch(
                f"support has {len(support)} labels but {len(mass)} masses"
            )
        if len(set(support)) != len(support):
            raise SupportMismatch(f"duplicate labels in support {support!r}")
        if not all(map(math.isfinite, mass)) or min(mass, default=0.0) < -TOL:
            raise InvalidMass(f"masses {mass!r} are not probabilities")
        total = math.fsum(mass)
        if abs(total - 1.0) > TOL:
            raise InvalidMass(f"masses sum to {total!r}, not 1")

    @classmethod
    def from_dict(cls, masses: Mapping[Label, float]) -> "FiniteDistribution":
        return cls(tuple(masses), tuple(masses.values()))

    @classmethod
    def point(cls, label: Label, support: Sequence[Label] | None = None):
        support = tuple(support) if support is not None else (label,)
        return cls(support, tuple(1.0 if s == label else 0.0 for s in support))

    @classmethod
    def uniform(cls, support: Sequence[Label]) -> "FiniteDistribution":
        support = tuple(support)
        return cls(support, (1.0 / len(support),) * len(support))

    def __getitem__(self, label: Label) -> float:
        try:
            return self.mass[self.support.index(label)]
        except ValueError:
            raise UnknownOutcome(f"{label!r} not in support") from None

    def __len__(self) -> int:
        return len(self.support)

    def __iter__(self):
        return iter(self.support)

    def items(self):
        return zip(self.support, self.mass)

    def as_dict(self) -> dict:
        return dict(zip(self.support, self.mass))

    def close_to(self, other: "FiniteDistribution", tol: float = TOL) -> bool:
        if set(self.support) != set(other.support):
            return False
        return all(abs(m - other[s]) <= tol for s, m in self.items())

    def max_abs_diff(self, other: "FiniteDistribution") -> float:
        if set(self.support) != set(other.support):
            raise SupportMismatch("supports differ")
        return max(abs(m - other[s]) for s, m in self.items())


def normalize(weights: Sequence[float], labels: Sequence[Label]) -> FiniteDistribution:
    """Scale nonnegative ``weights`` into a distribution over ``labels``."""
    weights = [float(w) for w in weights]
    if len(weights) != len(labels):
        raise SupportMismatch(
            f"{len(weights)} weights for {len(labels)} labels"
        )
    if any(w < 0 or not math.isfinite(w) for w in weights):
        raise InvalidMass(f"weights must be finite and nonnegative: {weights}")
    total = math.fsum(weights)
    if total <= 0:
        raise DegenerateDistribution("all weights are zero")
    return FiniteDistribution(tuple(labels), tuple(w / total for w in weights))


def mix(
    components: Sequence[FiniteDistribution], weights: FiniteDistribution
) -> FiniteDistribution:
    """Convex combination of ``components``.

    ``weights`` is a distribution over component indices ``0..len-1``.
    """
    if not components:
        raise DegenerateDistribution("nothing to mix")
    support = components[0].support
    for c in components[1:]:
        if set(c.support) != set(support):
            raise SupportMismatch(f"component support {c.support} != {support}")
    if set(weights.support) != set(range(len(components))):
        raise SupportMismatch("weights must be indexed by component position")
    acc = {s: [] for s in support}
    for k, comp in enumerate(components):
        w = weights[k]
        for s, m in comp.items():
            acc[s].append(w * m)
    return normalize([max(0.0, math.fsum(acc[s])) for s in support], support)


def expectation(dist: FiniteDistribution, value: Mapping[Label, float]) -> float:
    terms = []
    for s, m in dist.items():
        try:
            v = value[s]
        except KeyError:
            raise MissingValue(f"no value for {s!r}") from None
        terms.append(m * v)
    return math.fsum(terms)


@dataclass(frozen=True)
class ConditionalTable:
    """``P(outcome | condition)`` with one distribution per condition."""

    conditions: tuple
    rows: Mapping[Label, FiniteDistribution] = field(hash=False)

    def __post_init__(self):
        conditions = tuple(self.conditions)
        object.__setattr__(self, "conditions", conditions)
        object.__setattr__(self, "rows", dict(self.rows))
        if set(conditions) != set(self.rows) or len(set(conditions)) != len(
            conditions
        ):
            raise SupportMismatch(
                f"conditions {conditions} do not match rows {tuple(self.rows)}"
            )
        if not conditions:
            raise SupportMismatch("a conditional table needs at least one row")
        first = set(self.rows[conditions[0]].support)
        for c in conditions[1:]:
            if set(self.rows[c].support) != first:
                raise SupportMismatch(f"row {c!r} has a different outcome support")

    @classmethod
    def from_dict(cls, table: Mapping[Label, Mapping[Label, float]]):
        """Build from ``{condition: {outcome: p}}``."""
        return cls(
            tuple(table),
            {c: FiniteDistribution.from_dict(row) for c, row in table.items()},
        )

    @property
    def outcomes(self) -> tuple:
        return self.rows[self.conditions[0]].support

    def row(self, condition: Label) -> FiniteDistribution:
        return self.rows[condition]

    def prob(self, outcome: Label, condition: Label) -> float:
        return self.rows[condition][outcome]
