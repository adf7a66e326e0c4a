"""Builders for the concrete decision problems.

Utilities are dollar amounts throughout. Each builder records where every
number it uses comes from in ``ScenarioSpec.notes``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from .decision import DecisionProblem, DependencyHypothesisSet
from .errors import InvalidProbability, SupportMismatch
from .prob import ConditionalTable, FiniteDistribution

MILLION = 1_000_000.0
THOUSAND = 1_000.0


@dataclass(frozen=True)
class ScenarioSpec:
    name: str
    problem: DecisionProblem
    notes: Mapping[str, str] = field(default_factory=dict, hash=False)


def _check_prob(name: str, p: float) -> float:
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise InvalidProbability(f"{name}={p!r} is outside [0, 1]")
    return p


def _constant_rows(actions, outcomes, dist: Mapping) -> ConditionalTable:
    row = FiniteDistribution(tuple(outcomes), tuple(dist[o] for o in outcomes))
    return ConditionalTable(tuple(actions), {a: row for a in actions})


def newcomb_classic(p_one: float, p_two: float, prior: float = 0.5) -> ScenarioSpec:
    """One box (``A1``) or both (``A2``); ``O1`` = the million is in box 1.

    ``p_one`` and ``p_two`` are the evidential ``P(O1|A1)`` and ``P(O1|A2)``.
    ``prior`` is the causalist's unconditional credence that the box is full.
    """
    p_one = _check_prob("p_one", p_one)
    p_two = _check_prob("p_two", p_two)
    prior = _check_prob("prior", prior)
    actions, outcomes = ("A1", "A2"), ("O1", "O2")
    utility = {
        ("A1", "O1"): MILLION,
        ("A1", "O2"): 0.0,
        ("A2", "O1"): MILLION + THOUSAND,
        ("A2", "O2"): THOUSAND,
    }
    evidential = ConditionalTable.from_dict(
        {"A1": {"O1": p_one, "O2": 1 - p_one}, "A2": {"O1": p_two, "O2": 1 - p_two}}
    )
    hyps = DependencyHypothesisSet(
        prior=FiniteDistribution(("full", "empty"), (prior, 1 - prior)),
        tables={
            "full": _constant_rows(actions, outcomes, {"O1": 1.0, "O2": 0.0}),
            "empty": _constant_rows(actions, outcomes, {"O1": 0.0, "O2": 1.0}),
        },
        outside_influence=True,
        joint_prior_given_action=ConditionalTable.from_dict(
            {
                "A1": {"full": p_one, "empty": 1 - p_one},
                "A2": {"full": p_two, "empty": 1 - p_two},
            }
        ),
    )
    notes = {
        "utility": "dollar payoffs: one box 1,000,000 or 0; both boxes 1,001,000 or 1,000",
        "p_one": "caller-supplied predictor reliability P(O1|A1)",
        "p_two": "caller-supplied P(O1|A2)",
        "prior": "caller-supplied causal credence that box 1 was filled",
        "hypotheses": "box contents fixed before the choice; rows constant across actions",
    }
    return ScenarioSpec("newcomb", DecisionProblem(actions, outcomes, utility, evidential, hyps), notes)


def newcomb_break_even_gap() -> float:
    """``P(O1|A1) - P(O1|A2)`` at which one- and two-boxing have equal EU."""
    # p1*1e6 = p2*1.001e6 + (1 - p2)*1e3  <=>  p1 - p2 = 1e3 / 1e6
    return THOUSAND / MILLION


def smoking_gene(p_gene: float = 0.5) -> ScenarioSpec:
    """Smoke (``S``) or not (``~S``); cancer ``C``/``~C``; gene ``G``/``~G``."""
    p_gene = _check_prob("p_gene", p_gene)
    actions, outcomes = ("S", "~S"), ("C", "~C")
    utility = {("S", "C"): -99.0, ("S", "~C"): 1.0, ("~S", "C"): -100.0, ("~S", "~C"): 0.0}
    evidential = ConditionalTable.from_dict(
        {"S": {"C": 0.2, "~C": 0.8}, "~S": {"C": 0.02, "~C": 0.98}}
    )
    hyps = DependencyHypothesisSet(
        prior=FiniteDistribution(("G", "~G"), (p_gene, 1 - p_gene)),
        tables={
            "G": _constant_rows(actions, outcomes, {"C": 1.0, "~C": 0.0}),
            "~G": _constant_rows(actions, outcomes, {"C": 0.0, "~C": 1.0}),
        },
        outside_influence=True,
        joint_prior_given_action=ConditionalTable.from_dict(
            {"S": {"G": 0.2, "~G": 0.8}, "~S": {"G": 0.02, "~G": 0.98}}
        ),
    )
    notes = {
        "evidential": "P(C|S)=0.2, P(C|~S)=0.02 from the smoking-gene table",
        "utility": "(-99, 1) if smoking, (-100, 0) if not, from the smoking-gene table",
        "joint_prior_given_action": "gene carried by 20% of smokers and 2% of nonsmokers",
        "hypotheses": "gene bearers always develop cancer, non-bearers never (idealised completion)",
        "p_gene": "free prior P(G); the CDT prescription does not depend on it",
    }
    return ScenarioSpec("smoking-gene", DecisionProblem(actions, outcomes, utility, evidential, hyps), notes)


def million_box(n_boxes: int, predictor_accuracy: float) -> ScenarioSpec:
    """Pick one of ``n_boxes`` closed boxes, optionally also the open $1000.

    The action space is reduced by symmetry: ``closed`` stands for "closed
    box k only" and ``closed+open`` for "closed box k and the open box", the
    same for every k. The outcome says whether the million sits in the picked
    box. The causal hypothesis is the location of the million, uniform over
    boxes, lumped into ``in-picked`` (prior 1/n) and ``elsewhere``. Runs in
    constant time for any ``n_boxes``; :func:`million_box_explicit` is the
    unreduced version for small n.
    """
    n_boxes = int(n_boxes)
    if n_boxes < 2:
        raise SupportMismatch("need at least two closed boxes")
    acc = _check_prob("predictor_accuracy", predictor_accuracy)
    actions, outcomes = ("closed", "closed+open"), ("in-picked", "elsewhere")
    utility = {
        ("closed", "in-picked"): MILLION,
        ("closed", "elsewhere"): 0.0,
        ("closed+open", "in-picked"): MILLION + THOUSAND,
        ("closed+open", "elsewhere"): THOUSAND,
    }
    p_hit = {"closed": acc, "closed+open": 1.0 / n_boxes}
    ev = {a: {"in-picked": p_hit[a], "elsewhere": 1 - p_hit[a]} for a in actions}
    hyps = DependencyHypothesisSet(
        prior=FiniteDistribution(("in-picked", "elsewhere"), (1.0 / n_boxes, 1 - 1.0 / n_boxes)),
        tables={
            "in-picked": _constant_rows(actions, outcomes, {"in-picked": 1.0, "elsewhere": 0.0}),
            "elsewhere": _constant_rows(actions, outcomes, {"in-picked": 0.0, "elsewhere": 1.0}),
        },
        outside_influence=True,
        joint_prior_given_action=ConditionalTable.from_dict(ev),
    )
    notes = {
        "utility": "1,000,000 in the matching closed box, plus 1,000 if the open box is taken",
        "n_boxes": "caller-supplied; a million in the original story",
        "predictor_accuracy": "caller-supplied P(million in picked box | closed box only)",
        "closed+open": "million placed uniformly at random, so P(hit) = 1/n",
        "prior": "causal credence uniform over the location of the million",
    }
    problem = DecisionProblem(actions, outcomes, utility, ConditionalTable.from_dict(ev), hyps)
    return ScenarioSpec("million-box", problem, notes)


def million_box_explicit(n_boxes: int, predictor_accuracy: float) -> ScenarioSpec:
    """Unreduced million-box problem with ``2 * n_boxes`` actions.

    Actions are ``(k, False)`` (closed box k only) and ``(k, True)`` (closed
    box k and the open box); outcomes and hypotheses are the location of the
    million. Size grows as n^2, so keep ``n_boxes`` small.
    """
    n = int(n_boxes)
    if n < 2:
        raise SupportMismatch("need at least two closed boxes")
    acc = _check_prob("predictor_accuracy", predictor_accuracy)
    boxes = tuple(range(n))
    actions = tuple((k, take_open) for take_open in (False, True) for k in boxes)
    utility = {
        ((k, t), loc): (MILLION if loc == k else 0.0) + (THOUSAND if t else 0.0)
        for (k, t) in actions
        for loc in boxes
    }

    def location_given(action):
        k, take_open = action
        if take_open:
            return {loc: 1.0 / n for loc in boxes}
        miss = (1 - acc) / (n - 1)
        return {loc: acc if loc == k else miss for loc in boxes}

    given = ConditionalTable.from_dict({a: location_given(a) for a in actions})
    hyps = DependencyHypothesisSet(
        prior=FiniteDistribution.uniform(boxes),
        tables={
            loc: _constant_rows(actions, boxes, {o: float(o == loc) for o in boxes})
            for loc in boxes
        },
        outside_influence=True,
        joint_prior_given_action=given,
    )
    problem = DecisionProblem(actions, boxes, utility, given, hyps)
    return ScenarioSpec("million-box-explicit", problem, {"utility": "as million_box"})


def million_box_break_even(n_boxes: int) -> float:
    """Predictor accuracy at which both options have equal evidential EU."""
    # acc*1e6 = 1e6/n + 1e3
    return 1.0 / n_boxes + THOUSAND / MILLION


def marble_game_payoffs() -> dict:
    """Payoffs keyed by (Alice's act, Bob's prediction)."""
    return {
        ("a1", "b1"): MILLION,
        ("a1", "b2"): 0.0,
        ("a2", "b1"): MILLION + THOUSAND,
        ("a2", "b2"): THOUSAND,
    }


SCENARIOS = {
    "newcomb": newcomb_classic,
    "smoking-gene": smoking_gene,
    "million-box": million_box,
}
