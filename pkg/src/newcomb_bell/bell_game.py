"""The marble-box (Bell) game: box fabrication, sessions, agents, tournaments.

A session has ``n_pairs`` box pairs. Alice and Charlie each press a red or
green button on every box; the host multiplies the two marble values, averages
the products per colour pair and forms ``F = <rr> + <rg> + <gr> - <gg>``. A
colour pair that never occurs contributes 0. Playing pays ``win_payout`` if
``F > threshold`` and ``lose_payout`` otherwise; declining pays
``decline_payout``.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from enum import Enum
from statistics import NormalDist
from typing import Optional, Sequence

import numpy as np

from .causal_models import (
    CHSH_SIGNS,
    COLOURS,
    LHV_BOUND,
    OUTCOME_PAIRS,
    SETTING_PAIRS,
    TSIRELSON,
    Colour,
    DeterministicStrategy,
    JointModel,
    LHVModel,
    chsh_of_model,
    correlator_of,
    mixture_chsh_bound,
    superdeterministic_factory,
)
from .decision import Theory
from .errors import InvalidConfig, InvalidCredence, SettingsMismatch
from .quantum import CHSHConfiguration, tsirelson_config

DEFAULT_SEED = 20120521
DEFAULT_PAIRS = 10_000
DEFAULT_THRESHOLD = 2.8
# beyond this many standard errors the win probability is taken as 0 or 1
CLAMP_SIGMAS = 6.0

CELL_ORDER = SETTING_PAIRS  # rr, rg, gr, gg


class Mechanism(str, Enum):
    LHV = "lhv"
    QUANTUM = "quantum"
    SUPERDETERMINISTIC = "superdeterministic"


class Semantics(str, Enum):
    EXPECTATION_RULE = "expectation"
    HYPOTHESIS_CONCENTRATION = "concentration"


class Decision(str, Enum):
    PLAY = "PLAY"
    DECLINE = "DECLINE"


def best_lhv_model() -> LHVModel:
    """The all-plus deterministic strategy, which attains F = 2."""
    return DeterministicStrategy(1, 1, 1, 1).as_lhv()


@dataclass(frozen=True)
class GameConfig:
    n_pairs: int = DEFAULT_PAIRS
    threshold: float = DEFAULT_THRESHOLD
    win_payout: float = 1_000_000.0
    decline_payout: float = 1_000.0
    lose_payout: float = 0.0
    mechanism: Mechanism = Mechanism.QUANTUM
    seed: int = DEFAULT_SEED
    lhv_model: LHVModel = field(default_factory=best_lhv_model, hash=False)
    quantum: CHSHConfiguration = field(default_factory=tsirelson_config, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "mechanism", Mechanism(self.mechanism))
        if int(self.n_pairs) < 1:
            raise InvalidConfig(f"n_pairs must be >= 1, got {self.n_pairs!r}")
        object.__setattr__(self, "n_pairs", int(self.n_pairs))
        if not -4.0 <= float(self.threshold) <= 4.0:
            raise InvalidConfig(f"threshold {self.threshold!r} outside [-4, 4]")
        if not 0 <= int(self.seed) < 2**64:
            raise InvalidConfig("seed must be a 64-bit unsigned integer")


@dataclass(frozen=True)
class Agent:
    """A BDT or CDT player.

    CDT agents carry ``epsilon``, their total credence in causal hypotheses of
    local-hidden-variable form, and a decision ``semantics``. BDT agents carry
    the ``evidential_model`` whose statistics they expect to observe; it
    defaults to the Tsirelson configuration.
    """

    theory: Theory
    epsilon: float = 0.0
    semantics: Semantics = Semantics.EXPECTATION_RULE
    evidential_model: Optional[JointModel] = field(default=None, hash=False, compare=False)
    label: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, "theory", Theory(self.theory))
        object.__setattr__(self, "semantics", Semantics(self.semantics))
        if not 0.0 <= float(self.epsilon) <= 1.0:
            raise InvalidCredence(f"epsilon={self.epsilon!r} is outside [0, 1]")
        if self.theory is Theory.BDT and self.evidential_model is None:
            object.__setattr__(self, "evidential_model", tsirelson_config())

    @property
    def name(self) -> str:
        if self.label:
            return self.label
        if self.theory is Theory.CDT:
            return f"cdt(eps={self.epsilon:g},{self.semantics.value})"
        return "bdt"


# -- fabrication -------------------------------------------------------------


def _colour_index(c) -> int:
    if isinstance(c, (int, np.integer)):
        if c not in (0, 1):
            raise SettingsMismatch(f"colour index must be 0 or 1, got {c!r}")
        return int(c)
    return 0 if Colour(c) is Colour.RED else 1


def settings_array(settings) -> np.ndarray:
    """``(N, 2)`` int array of colour indices (0 red, 1 green)."""
    arr = np.asarray(settings)
    if arr.size == 0:
        return np.zeros((0, 2), dtype=np.int8)
    if arr.dtype.kind in "iu":
        arr = arr.astype(np.int8)
        if arr.ndim != 2 or arr.shape[1] != 2 or not np.isin(arr, (0, 1)).all():
            raise SettingsMismatch("settings must be (N, 2) colour indices")
        return arr
    return np.array(
        [[_colour_index(a), _colour_index(b)] for a, b in settings], dtype=np.int8
    )


def _sample_joint_by_cell(joints, cell: np.ndarray, rng) -> np.ndarray:
    """Draw outcome pairs from ``joints[cell[i]]`` for each pair i."""
    pairs = np.array(OUTCOME_PAIRS, dtype=np.int8)
    cum = np.array([np.cumsum([j[p] for p in OUTCOME_PAIRS]) for j in joints])
    u = rng.random(len(cell))
    idx = (u[:, None] >= cum[cell, :3]).sum(axis=1)
    return pairs[idx]


def _fabricate_lhv(model: LHVModel, s: np.ndarray, rng) -> np.ndarray:
    lams = model.hidden_prior.support
    p = np.array(model.hidden_prior.mass)
    plus_a = np.array([[model.response_a[l].prob(1, c) for c in COLOURS] for l in lams])
    plus_b = np.array([[model.response_b[l].prob(1, c) for c in COLOURS] for l in lams])
    n = len(s)
    lam = rng.choice(len(lams), size=n, p=p / p.sum())
    ua, ub = rng.random(n), rng.random(n)
    a = np.where(ua < plus_a[lam, s[:, 0]], 1, -1)
    b = np.where(ub < plus_b[lam, s[:, 1]], 1, -1)
    return np.stack([a, b], axis=1).astype(np.int8)


def _fabricate_superdeterministic(target: JointModel, s: np.ndarray, rng) -> np.ndarray:
    # the factory picks each box's contents knowing which buttons will be pressed
    factory = superdeterministic_factory(target)
    labels = np.array(factory.hidden_prior.support, dtype=np.int8)  # (16, 4)
    cell = s[:, 0] * 2 + s[:, 1]
    out = np.empty((len(s), 2), dtype=np.int8)
    u = rng.random(len(s))
    for k, key in enumerate(SETTING_PAIRS):
        sel = cell == k
        cum = np.cumsum(factory.setting_dependent_prior[key].mass)
        lam = np.minimum(np.searchsorted(cum, u[sel], side="right"), len(cum) - 1)
        strategies = labels[lam]
        rows = np.arange(len(strategies))
        out[sel, 0] = strategies[rows, 0 + s[sel, 0]]  # a_r or a_g
        out[sel, 1] = strategies[rows, 2 + s[sel, 1]]  # b_r or b_g
    return out


def fabricate_boxes(config: GameConfig, settings, rng: np.random.Generator) -> np.ndarray:
    """Marble values ``(a, b)`` for each box pair under ``config.mechanism``."""
    s = settings_array(settings)
    if len(s) != config.n_pairs:
        raise SettingsMismatch(f"{len(s)} setting pairs for {config.n_pairs} boxes")
    if config.mechanism is Mechanism.LHV:
        return _fabricate_lhv(config.lhv_model, s, rng)
    if config.mechanism is Mechanism.SUPERDETERMINISTIC:
        return _fabricate_superdeterministic(config.quantum, s, rng)
    joints = [config.quantum.joint(a, b) for a, b in SETTING_PAIRS]
    return _sample_joint_by_cell(joints, s[:, 0] * 2 + s[:, 1], rng)


# -- statistic ---------------------------------------------------------------


def cell_summary(settings, products) -> tuple:
    """Per colour pair ``(counts, means)``; an empty cell has mean 0."""
    s = settings_array(settings)
    prod = np.asarray(products, dtype=np.int64)
    if len(s) != len(prod):
        raise SettingsMismatch(f"{len(s)} settings but {len(prod)} products")
    cell = s[:, 0].astype(np.int64) * 2 + s[:, 1] if len(s) else np.zeros(0, np.int64)
    counts = np.bincount(cell, minlength=4)
    sums = np.bincount(cell, weights=prod, minlength=4)
    means = {}
    cnts = {}
    for k, key in enumerate(CELL_ORDER):
        cnts[key] = int(counts[k])
        means[key] = float(sums[k] / counts[k]) if counts[k] else 0.0
    return cnts, means


def f_from_means(means) -> float:
    rr, rg, gr, gg = (means[k] for k in CELL_ORDER)
    return rr + rg + gr - gg


def chsh_statistic(settings, products) -> tuple:
    """``(cell_means, F)`` for one session's button presses and products."""
    _, means = cell_summary(settings, products)
    return means, f_from_means(means)


def standard_error(model: JointModel, n_pairs: int) -> float:
    """Standard error of the empirical F with about ``n_pairs / 4`` per cell."""
    per_cell = n_pairs / 4.0
    var = math.fsum(
        (1.0 - correlator_of(model.joint(a, b)) ** 2) / per_cell for a, b in CHSH_SIGNS
    )
    return math.sqrt(max(var, 0.0))


def win_probability(expected_f: float, se: float, threshold: float) -> float:
    """Normal approximation to ``P(F > threshold)``, clamped far in the tails."""
    if se <= 0.0:
        return 1.0 if expected_f > threshold else 0.0
    z = (expected_f - threshold) / se
    if z > CLAMP_SIGMAS:
        return 1.0
    if z < -CLAMP_SIGMAS:
        return 0.0
    return NormalDist().cdf(z)


# -- decisions ---------------------------------------------------------------


def _play_beats_decline(p_win: float, config: GameConfig) -> bool:
    play = p_win * config.win_payout + (1.0 - p_win) * config.lose_payout
    return play > config.decline_payout


def cdt_decision(agent: Agent, config: GameConfig) -> Decision:
    eps = agent.epsilon
    t = config.threshold
    if agent.semantics is Semantics.EXPECTATION_RULE:
        play = mixture_chsh_bound(eps) > t
    else:
        p_win = eps * float(LHV_BOUND > t) + (1.0 - eps) * float(TSIRELSON > t)
        play = _play_beats_decline(p_win, config)
    return Decision.PLAY if play else Decision.DECLINE


def bdt_decision(agent: Agent, config: GameConfig) -> Decision:
    model = agent.evidential_model
    p_win = win_probability(
        chsh_of_model(model), standard_error(model, config.n_pairs), config.threshold
    )
    return Decision.PLAY if _play_beats_decline(p_win, config) else Decision.DECLINE


def decide(agent: Agent, config: GameConfig) -> Decision:
    if agent.theory is Theory.CDT:
        return cdt_decision(agent, config)
    return bdt_decision(agent, config)


# -- sessions ----------------------------------------------------------------


@dataclass(frozen=True)
class SessionRecord:
    settings: np.ndarray = field(repr=False)
    products: np.ndarray = field(repr=False)
    cell_counts: dict
    cell_means: dict
    f_statistic: float
    decision: Decision
    payout: float
    won: bool = False

    def same_as(self, other: "SessionRecord") -> bool:
        return (
            np.array_equal(self.settings, other.settings)
            and np.array_equal(self.products, other.products)
            and self.cell_counts == other.cell_counts
            and self.cell_means == other.cell_means
            and self.f_statistic == other.f_statistic
            and self.decision == other.decision
            and self.payout == other.payout
        )

    def to_csv(self) -> str:
        """One row per box pair, then a summary row."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["pair_index", "alice_colour", "charlie_colour", "product"])
        colours = [c.value for c in COLOURS]
        for i, ((a, b), p) in enumerate(zip(self.settings, self.products)):
            w.writerow([i, colours[a], colours[b], int(p)])
        w.writerow(
            ["summary"]
            + [f"{_cell_name(k)}={fmt(self.cell_means[k])}" for k in CELL_ORDER]
            + [f"F={fmt(self.f_statistic)}", f"decision={self.decision.value}",
               f"payout={fmt(self.payout)}"]
        )
        return buf.getvalue()


def _cell_name(key) -> str:
    a, b = key
    return f"a{Colour(a).value}b{Colour(b).value}"


def fmt(x: float) -> str:
    return f"{x:.9f}"


def uniform_colours(n: int, rng: np.random.Generator) -> np.ndarray:
    return rng.integers(0, 2, size=n).astype(np.int8)


def play_session(
    config: GameConfig,
    agent: Agent,
    rng: np.random.Generator,
    alice_policy=uniform_colours,
    charlie_policy=uniform_colours,
) -> SessionRecord:
    decision = decide(agent, config)
    if decision is Decision.DECLINE:
        empty = np.zeros((0, 2), dtype=np.int8)
        counts, means = cell_summary(empty, np.zeros(0))
        return SessionRecord(
            empty, np.zeros(0, dtype=np.int8), counts, means, f_from_means(means),
            decision, float(config.decline_payout),
        )
    n = config.n_pairs
    settings = np.stack([alice_policy(n, rng), charlie_policy(n, rng)], axis=1)
    outcomes = fabricate_boxes(config, settings, rng)
    products = (outcomes[:, 0] * outcomes[:, 1]).astype(np.int8)
    counts, means = cell_summary(settings, products)
    f = f_from_means(means)
    win = f > config.threshold
    payout = config.win_payout if win else config.lose_payout
    return SessionRecord(
        settings, products, counts, means, f, decision, float(payout), bool(win)
    )


def session_rng(master_seed: int, agent_index: int, session_index: int) -> np.random.Generator:
    """Independent stream for one (agent, session), derived from the master seed."""
    ss = np.random.SeedSequence(int(master_seed), spawn_key=(agent_index, session_index))
    return np.random.default_rng(ss)


@dataclass
class BankrollLedger:
    payouts: dict = field(default_factory=dict)
    decisions: dict = field(default_factory=dict)
    wins: dict = field(default_factory=dict)
    f_values: dict = field(default_factory=dict)
    records: dict = field(default_factory=dict)

    def add(self, name: str, record: SessionRecord, keep_record: bool = False):
        self.payouts.setdefault(name, []).append(record.payout)
        self.decisions.setdefault(name, []).append(record.decision)
        self.wins.setdefault(name, []).append(record.won)
        self.f_values.setdefault(name, []).append(record.f_statistic)
        if keep_record:
            self.records.setdefault(name, []).append(record)

    def total(self, name: str) -> float:
        return math.fsum(self.payouts[name])

    def summary(self) -> dict:
        out = {}
        for name, pays in self.payouts.items():
            n = len(pays)
            plays = sum(d is Decision.PLAY for d in self.decisions[name])
            wins = sum(self.wins[name])
            out[name] = {
                "sessions": n,
                "plays": plays,
                "declines": n - plays,
                "wins": wins,
                "total": math.fsum(pays),
                "mean": math.fsum(pays) / n,
                "win_rate": wins / n,
            }
        return out


def _unique_names(agents: Sequence[Agent]) -> list:
    names, seen = [], {}
    for a in agents:
        base = a.name
        seen[base] = seen.get(base, 0) + 1
        names.append(base if seen[base] == 1 else f"{base}#{seen[base]}")
    return names


def run_tournament(
    config: GameConfig,
    agents: Sequence[Agent],
    n_sessions: int,
    seed: Optional[int] = None,
    keep_records: bool = False,
) -> BankrollLedger:
    """Play ``n_sessions`` independent sessions for every agent."""
    if int(n_sessions) < 1:
        raise InvalidConfig("n_sessions must be >= 1")
    master = config.seed if seed is None else int(seed)
    ledger = BankrollLedger()
    for i, (agent, name) in enumerate(zip(agents, _unique_names(agents))):
        for s in range(int(n_sessions)):
            rec = play_session(config, agent, session_rng(master, i, s))
            ledger.add(name, rec, keep_records)
    return ledger
