import numpy as np

from newcomb_bell.decision import DecisionProblem, DependencyHypothesisSet
from newcomb_bell.prob import ConditionalTable, FiniteDistribution


def random_problem(rng, independent=True, n_actions=None, n_outcomes=None, n_hyp=None):
    """Problem whose evidential table is the mixture of hypothesis tables.

    With ``independent`` the joint prior P(K|A) equals P(K) for every action.
    """
    na = n_actions or rng.integers(2, 5)
    no = n_outcomes or rng.integers(2, 5)
    nk = n_hyp or rng.integers(1, 5)
    actions = tuple(f"a{i}" for i in range(na))
    outcomes = tuple(f"o{j}" for j in range(no))
    hyps = tuple(f"k{l}" for l in range(nk))
    prior = rng.dirichlet(np.ones(nk))
    tables = {
        k: ConditionalTable.from_dict(
            {a: dict(zip(outcomes, rng.dirichlet(np.ones(no)))) for a in actions}
        )
        for k in hyps
    }
    if independent:
        given = {a: dict(zip(hyps, prior)) for a in actions}
    else:
        given = {a: dict(zip(hyps, rng.dirichlet(np.ones(nk)))) for a in actions}
    evidential = {
        a: {o: sum(given[a][k] * tables[k].prob(o, a) for k in hyps) for o in outcomes}
        for a in actions
    }
    utility = {(a, o): float(rng.normal(0, 100)) for a in actions for o in outcomes}
    h = DependencyHypothesisSet(
        FiniteDistribution(hyps, prior), tables, False, ConditionalTable.from_dict(given)
    )
    return DecisionProblem(actions, outcomes, utility, ConditionalTable.from_dict(evidential), h)
