"""Hidden-variable models of two-party correlations and the CHSH functional.

Settings are colours (red/green) on each side; outcomes are ``+1``/``-1``.
A *joint model* is anything with a ``joint(a_setting, b_setting)`` method
returning a :class:`FiniteDistribution` over ``(a, b)`` pairs.
"""

from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Hashable, Mapping, Optional, Protocol, Sequence

import numpy as np

from .errors import InvalidCredence, SupportMismatch
from .prob import TOL, ConditionalTable, FiniteDistribution

SQRT2 = math.sqrt(2.0)
TSIRELSON = 2.0 * SQRT2
LHV_BOUND = 2.0

OUTCOMES = (1, -1)
OUTCOME_PAIRS = ((1, 1), (1, -1), (-1, 1), (-1, -1))


class Colour(str, Enum):
    RED = "r"
    GREEN = "g"


COLOURS = (Colour.RED, Colour.GREEN)
SETTING_PAIRS = tuple(itertools.product(COLOURS, COLOURS))
# sign of each correlator in F = <rr> + <rg> + <gr> - <gg>
CHSH_SIGNS = {
    (Colour.RED, Colour.RED): 1.0,
    (Colour.RED, Colour.GREEN): 1.0,
    (Colour.GREEN, Colour.RED): 1.0,
    (Colour.GREEN, Colour.GREEN): -1.0,
}


class JointModel(Protocol):
    def joint(self, a_setting, b_setting) -> FiniteDistribution: ...


@dataclass(frozen=True)
class LHVModel:
    """Hidden variable ``lam`` with prior and local response tables.

    ``response_a[lam]`` is a :class:`ConditionalTable` ``P(a | A; lam)``,
    likewise ``response_b``. When ``setting_dependent_prior`` is given it
    maps ``(A, B)`` to ``P(lam | A, B)``; :func:`lhv_joint` ignores it, while
    :func:`hv_joint` uses it.
    """

    hidden_prior: FiniteDistribution
    response_a: Mapping[Hashable, ConditionalTable] = field(hash=False)
    response_b: Mapping[Hashable, ConditionalTable] = field(hash=False)
    setting_dependent_prior: Optional[Mapping[tuple, FiniteDistribution]] = field(
        default=None, hash=False
    )

    def __post_init__(self):
        object.__setattr__(self, "response_a", dict(self.response_a))
        object.__setattr__(self, "response_b", dict(self.response_b))
        lams = set(self.hidden_prior.support)
        if set(self.response_a) != lams or set(self.response_b) != lams:
            raise SupportMismatch("response tables must cover every hidden value")
        if self.setting_dependent_prior is not None:
            for key, dist in self.setting_dependent_prior.items():
                if set(dist.support) != lams:
                    raise SupportMismatch(f"P(lam|{key}) has the wrong support")

    @property
    def a_settings(self) -> tuple:
        return self.response_a[self.hidden_prior.support[0]].conditions

    @property
    def b_settings(self) -> tuple:
        return self.response_b[self.hidden_prior.support[0]].conditions

    def joint(self, a_setting, b_setting) -> FiniteDistribution:
        return lhv_joint(self, a_setting, b_setting)


def _response_matrix(responses, lams, setting, outcomes) -> np.ndarray:
    return np.array([[responses[l].rows[setting][x] for x in outcomes] for l in lams])


def _factorized_joint(prior: FiniteDistribution, resp_a, resp_b, a_setting, b_setting):
    lams = prior.support
    a_out = resp_a[lams[0]].outcomes
    b_out = resp_b[lams[0]].outcomes
    pa = _response_matrix(resp_a, lams, a_setting, a_out)
    pb = _response_matrix(resp_b, lams, b_setting, b_out)
    table = np.einsum("l,li,lj->ij", np.asarray(prior.mass), pa, pb)
    support = tuple(itertools.product(a_out, b_out))
    mass = np.clip(table.ravel(), 0.0, None)
    return FiniteDistribution(support, (mass / mass.sum()).tolist())


def lhv_joint(model: LHVModel, a_setting, b_setting) -> FiniteDistribution:
    """``P(a,b|A,B) = sum_lam P(lam) P(a|A;lam) P(b|B;lam)``."""
    return _factorized_joint(
        model.hidden_prior, model.response_a, model.response_b, a_setting, b_setting
    )


def hv_joint(model: LHVModel, a_setting, b_setting) -> FiniteDistribution:
    """Like :func:`lhv_joint` but drawing ``lam`` from ``P(lam|A,B)`` when given."""
    prior = model.hidden_prior
    if model.setting_dependent_prior is not None:
        prior = model.setting_dependent_prior[(a_setting, b_setting)]
    return _factorized_joint(
        prior, model.response_a, model.response_b, a_setting, b_setting
    )


def two_agent_causal_joint(hyps: LHVModel, a_setting, b_setting) -> FiniteDistribution:
    """Causal probability of ``(a, b)`` when ``B`` cannot influence ``a``.

    ``hyps.hidden_prior`` is the prior over causal hypotheses ``K`` and the
    response tables give each side's outcome under each hypothesis. The
    formula is the LHV one; with a single trivial setting for B it reduces to
    the single-observer causal probability.
    """
    return _factorized_joint(
        hyps.hidden_prior, hyps.response_a, hyps.response_b, a_setting, b_setting
    )


def correlator_of(dist: FiniteDistribution) -> float:
    """``E[a*b]`` for a distribution over ``(a, b)`` with ``+-1`` entries."""
    return math.fsum(m * a * b for (a, b), m in dist.items())


def chsh_of_model(model: JointModel) -> float:
    """``<rr> + <rg> + <gr> - <gg>`` under ``model``."""
    return math.fsum(
        sign * correlator_of(model.joint(a, b)) for (a, b), sign in CHSH_SIGNS.items()
    )


@dataclass(frozen=True)
class DeterministicStrategy:
    """Preset marble values: Alice's red/green and Bob's red/green."""

    a_r: int
    a_g: int
    b_r: int
    b_g: int

    def __post_init__(self):
        for v in (self.a_r, self.a_g, self.b_r, self.b_g):
            if v not in (1, -1):
                raise SupportMismatch(f"marble values must be +1 or -1, got {v!r}")

    def a(self, colour: Colour) -> int:
        return self.a_r if Colour(colour) is Colour.RED else self.a_g

    def b(self, colour: Colour) -> int:
        return self.b_r if Colour(colour) is Colour.RED else self.b_g

    @property
    def f_value(self) -> int:
        return self.a_r * (self.b_r + self.b_g) + self.a_g * (self.b_r - self.b_g)

    def as_tuple(self) -> tuple:
        return (self.a_r, self.a_g, self.b_r, self.b_g)

    def as_lhv(self) -> LHVModel:
        return lhv_from_strategies({self: 1.0})


def enumerate_deterministic() -> list:
    """All 16 sign assignments, ``(+1,+1,+1,+1)`` first."""
    return [DeterministicStrategy(*s) for s in itertools.product(OUTCOMES, repeat=4)]


def lhv_chsh_max() -> float:
    return float(max(s.f_value for s in enumerate_deterministic()))


@functools.lru_cache(maxsize=None)
def _response_table(red: int, green: int) -> ConditionalTable:
    return ConditionalTable(
        COLOURS,
        {
            Colour.RED: FiniteDistribution.point(red, OUTCOMES),
            Colour.GREEN: FiniteDistribution.point(green, OUTCOMES),
        },
    )


def lhv_from_strategies(weights: Mapping[DeterministicStrategy, float]) -> LHVModel:
    """LHV model whose hidden variable is a deterministic strategy."""
    strategies = list(weights)
    prior = FiniteDistribution(
        tuple(s.as_tuple() for s in strategies), tuple(weights[s] for s in strategies)
    )
    resp_a = {
        s.as_tuple(): _response_table(s.a_r, s.a_g)
        for s in strategies
    }
    resp_b = {
        s.as_tuple(): _response_table(s.b_r, s.b_g)
        for s in strategies
    }
    return LHVModel(prior, resp_a, resp_b)


def random_lhv_model(rng: np.random.Generator, n_hidden: int | None = None) -> LHVModel:
    """LHV model with random prior and random stochastic local responses."""
    n = int(n_hidden if n_hidden is not None else rng.integers(1, 9))
    prior = rng.dirichlet(np.ones(n))
    prior = FiniteDistribution(tuple(range(n)), tuple(prior / prior.sum()))

    def table():
        rows = {}
        for c in COLOURS:
            p = float(rng.random())
            rows[c] = FiniteDistribution(OUTCOMES, (p, 1.0 - p))
        return ConditionalTable(COLOURS, rows)

    return LHVModel(prior, {l: table() for l in range(n)}, {l: table() for l in range(n)})


def check_statistical_independence(model: LHVModel, tol: float = TOL) -> bool:
    sdp = model.setting_dependent_prior
    if sdp is None:
        return True
    return all(dist.close_to(model.hidden_prior, tol) for dist in sdp.values())


def _marginal(dist: FiniteDistribution, side: int) -> dict:
    out = {}
    for pair, m in dist.items():
        out[pair[side]] = out.get(pair[side], 0.0) + m
    return out


def check_no_signalling(
    model: JointModel,
    a_settings: Sequence = COLOURS,
    b_settings: Sequence = COLOURS,
    tol: float = TOL,
) -> bool:
    """Each side's outcome marginal is unchanged by the other side's setting."""
    joints = {(a, b): model.joint(a, b) for a in a_settings for b in b_settings}

    def same(margs):
        ref = margs[0]
        return all(
            abs(m.get(k, 0.0) - ref.get(k, 0.0)) <= tol
            for m in margs[1:]
            for k in set(ref) | set(m)
        )

    for a in a_settings:
        if not same([_marginal(joints[(a, b)], 0) for b in b_settings]):
            return False
    for b in b_settings:
        if not same([_marginal(joints[(a, b)], 1) for a in a_settings]):
            return False
    return True


def superdeterministic_factory(target: JointModel) -> LHVModel:
    """Setting-aware marble factory reproducing ``target`` exactly.

    For every button pair the factory fills each box with a deterministic
    strategy drawn from a distribution chosen *for that pair*, so the hidden
    variable depends on the settings while each marble's value is local.
    ``hidden_prior`` is the average over the four setting pairs.
    """
    strategies = enumerate_deterministic()
    labels = tuple(s.as_tuple() for s in strategies)
    per_pair = {}
    for a_set, b_set in SETTING_PAIRS:
        dist = target.joint(a_set, b_set)
        w = dict.fromkeys(labels, 0.0)
        for (a, b), m in dist.items():
            # any strategy showing (a, b) at this pair; fill the rest with +1
            vals = {("a", a_set): a, ("b", b_set): b}
            s = DeterministicStrategy(
                vals.get(("a", Colour.RED), 1),
                vals.get(("a", Colour.GREEN), 1),
                vals.get(("b", Colour.RED), 1),
                vals.get(("b", Colour.GREEN), 1),
            )
            w[s.as_tuple()] += m
        per_pair[(a_set, b_set)] = FiniteDistribution(labels, tuple(w[l] for l in labels))
    avg = np.mean([per_pair[k].mass for k in SETTING_PAIRS], axis=0)
    base = lhv_from_strategies(dict(zip(strategies, avg / avg.sum())))
    return LHVModel(base.hidden_prior, base.response_a, base.response_b, per_pair)


@dataclass(frozen=True)
class SettingDependentHV:
    """Joint model view of an HV model that uses ``P(lam|A,B)``."""

    model: LHVModel

    def joint(self, a_setting, b_setting) -> FiniteDistribution:
        return hv_joint(self.model, a_setting, b_setting)


def _check_epsilon(epsilon: float) -> float:
    epsilon = float(epsilon)
    if not 0.0 <= epsilon <= 1.0:
        raise InvalidCredence(f"epsilon={epsilon!r} is outside [0, 1]")
    return epsilon


@dataclass(frozen=True)
class HypothesisMixture:
    """Credence ``epsilon`` on LHV-form causal hypotheses, the rest on
    hypotheses whose causal probabilities match ``quantum_component``."""

    epsilon: float
    lhv_component: JointModel
    quantum_component: JointModel

    def __post_init__(self):
        object.__setattr__(self, "epsilon", _check_epsilon(self.epsilon))

    def joint(self, a_setting, b_setting) -> FiniteDistribution:
        return mixture_causal_joint(self, a_setting, b_setting)


def mixture_causal_joint(mix: HypothesisMixture, a_setting, b_setting) -> FiniteDistribution:
    lhv = mix.lhv_component.joint(a_setting, b_setting)
    qm = mix.quantum_component.joint(a_setting, b_setting)
    if set(lhv.support) != set(qm.support):
        raise SupportMismatch("components disagree on the outcome pairs")
    eps = mix.epsilon
    return FiniteDistribution(
        lhv.support, tuple(eps * m + (1 - eps) * qm[s] for s, m in lhv.items())
    )


def mixture_chsh_bound(epsilon: float) -> float:
    """Upper bound ``2*eps + 2*sqrt(2)*(1 - eps)`` on the causal CHSH value."""
    eps = _check_epsilon(epsilon)
    return LHV_BOUND * eps + TSIRELSON * (1.0 - eps)


def break_even_epsilon(threshold: float) -> float:
    """Credence at which :func:`mixture_chsh_bound` equals ``threshold``.

    Outside ``[2, 2*sqrt(2)]`` the result falls outside ``[0, 1]``.
    """
    return (TSIRELSON - threshold) / (TSIRELSON - LHV_BOUND)
