"""Evidential (BDT) and causal (CDT) expected utility over finite problems."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Hashable, Mapping, Optional

from .errors import (
    NoHypotheses,
    NoJointPrior,
    SupportMismatch,
    UnknownAction,
    UnknownOutcome,
)
from .prob import TOL, ConditionalTable, FiniteDistribution


class Theory(str, Enum):
    BDT = "bdt"
    CDT = "cdt"


@dataclass(frozen=True)
class DependencyHypothesisSet:
    """Causal hypotheses ``K`` with prior ``P(K)`` and tables ``P(O|A;K)``.

    ``joint_prior_given_action`` optionally carries the agent's evidential
    ``P(K|A)``; it is only used by :func:`evidential_decomposition_residual`,
    never by the causal probability.
    """

    prior: FiniteDistribution
    tables: Mapping[Hashable, ConditionalTable] = field(hash=False)
    outside_influence: bool = False
    joint_prior_given_action: Optional[ConditionalTable] = field(
        default=None, hash=False
    )

    def __post_init__(self):
        object.__setattr__(self, "tables", dict(self.tables))
        if set(self.tables) != set(self.prior.support):
            raise SupportMismatch("hypothesis tables do not match the prior support")
        jp = self.joint_prior_given_action
        if jp is not None and set(jp.outcomes) != set(self.prior.support):
            raise SupportMismatch("P(K|A) must range over the hypothesis labels")

    @property
    def labels(self) -> tuple:
        return self.prior.support


@dataclass(frozen=True)
class DecisionProblem:
    actions: tuple
    outcomes: tuple
    utility: Mapping[tuple, float] = field(hash=False)
    evidential: ConditionalTable
    hypotheses: Optional[DependencyHypothesisSet] = None

    def __post_init__(self):
        object.__setattr__(self, "actions", tuple(self.actions))
        object.__setattr__(self, "outcomes", tuple(self.outcomes))
        object.__setattr__(self, "utility", dict(self.utility))
        missing = [
            (a, o)
            for a in self.actions
            for o in self.outcomes
            if (a, o) not in self.utility
        ]
        if missing:
            raise SupportMismatch(f"utility undefined for {missing[:3]}")
        if set(self.evidential.conditions) != set(self.actions):
            raise SupportMismatch("evidential table conditions must equal the actions")
        if set(self.evidential.outcomes) != set(self.outcomes):
            raise SupportMismatch("evidential table outcomes must equal the outcomes")
        if self.hypotheses is not None:
            for k, table in self.hypotheses.tables.items():
                if set(table.conditions) != set(self.actions) or set(
                    table.outcomes
                ) != set(self.outcomes):
                    raise SupportMismatch(f"hypothesis {k!r} table has wrong supports")
            jp = self.hypotheses.joint_prior_given_action
            if jp is not None and set(jp.conditions) != set(self.actions):
                raise SupportMismatch("P(K|A) conditions must equal the actions")

    def with_utility(self, fn) -> "DecisionProblem":
        """Copy with every utility ``u`` replaced by ``fn(u)``."""
        return DecisionProblem(
            self.actions,
            self.outcomes,
            {k: fn(u) for k, u in self.utility.items()},
            self.evidential,
            self.hypotheses,
        )


@dataclass(frozen=True)
class Prescription:
    theory: Theory
    best_actions: frozenset
    values: Mapping[Hashable, float] = field(hash=False)

    @property
    def choice(self):
        """A single action: the lexicographically first of the ties."""
        return sorted(self.best_actions, key=str)[0]


@dataclass(frozen=True)
class ScreeningViolation:
    hypothesis: Hashable
    outcome: Hashable
    actions: tuple
    gap: float


def _check_action(problem: DecisionProblem, action) -> None:
    if action not in problem.actions:
        raise UnknownAction(f"{action!r} is not an action of this problem")


def _require_hypotheses(problem: DecisionProblem) -> DependencyHypothesisSet:
    if problem.hypotheses is None:
        raise NoHypotheses("causal expected utility needs a dependency hypothesis set")
    return problem.hypotheses


def evidential_eu(problem: DecisionProblem, action) -> float:
    _check_action(problem, action)
    row = problem.evidential.row(action)
    return math.fsum(row[o] * problem.utility[(action, o)] for o in problem.outcomes)


def causal_probability(hyps: DependencyHypothesisSet, action, outcome) -> float:
    """``sum_K P(K) P(outcome | action; K)`` with the unconditional prior."""
    terms = []
    for k, pk in hyps.prior.items():
        table = hyps.tables[k]
        if action not in table.rows:
            raise UnknownAction(f"{action!r} not covered by hypothesis {k!r}")
        row = table.row(action)
        if outcome not in row.support:
            raise UnknownOutcome(f"{outcome!r} not covered by hypothesis {k!r}")
        terms.append(pk * row[outcome])
    return math.fsum(terms)


def causal_eu(problem: DecisionProblem, action) -> float:
    hyps = _require_hypotheses(problem)
    _check_action(problem, action)
    return math.fsum(
        causal_probability(hyps, action, o) * problem.utility[(action, o)]
        for o in problem.outcomes
    )


def evidential_decomposition_residual(problem: DecisionProblem) -> float:
    """Largest gap between ``P(O|A)`` and ``sum_K P(K|A) P(O|A;K)``.

    Zero means the evidential table is exactly explained by the hypothesis
    tables under the supplied ``P(K|A)``.
    """
    hyps = _require_hypotheses(problem)
    jp = hyps.joint_prior_given_action
    if jp is None:
        raise NoJointPrior("no P(K|A) supplied for this hypothesis set")
    worst = 0.0
    for a in problem.actions:
        pk_given_a = jp.row(a)
        for o in problem.outcomes:
            decomposed = math.fsum(
                pk_given_a[k] * hyps.tables[k].prob(o, a) for k in hyps.labels
            )
            worst = max(worst, abs(problem.evidential.prob(o, a) - decomposed))
    return worst


def validate_screening(hyps: DependencyHypothesisSet, tol: float = TOL) -> list:
    """Pairs of actions whose outcome rows differ under a fixed hypothesis.

    Returns an empty list when every hypothesis screens the outcome off
    from the action. Violations are returned, not raised.
    """
    violations = []
    for k in hyps.labels:
        table = hyps.tables[k]
        acts = table.conditions
        for i, a1 in enumerate(acts):
            for a2 in acts[i + 1 :]:
                for o in table.outcomes:
                    gap = abs(table.prob(o, a1) - table.prob(o, a2))
                    if gap > tol:
                        violations.append(ScreeningViolation(k, o, (a1, a2), gap))
    return violations


def prescribe(problem: DecisionProblem, theory: Theory | str) -> Prescription:
    theory = Theory(theory)
    fn = evidential_eu if theory is Theory.BDT else causal_eu
    values = {a: fn(problem, a) for a in problem.actions}
    best = max(values.values())
    ties = frozenset(a for a, v in values.items() if best - v <= TOL)
    return Prescription(theory, ties, values)


def is_newcomb_type(problem: DecisionProblem) -> bool:
    _require_hypotheses(problem)
    return (
        prescribe(problem, Theory.BDT).best_actions
        != prescribe(problem, Theory.CDT).best_actions
    )
