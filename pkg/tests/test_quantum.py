import math

import numpy as np
import pytest

from newcomb_bell.causal_models import (
    SETTING_PAIRS,
    Colour,
    check_no_signalling,
    chsh_of_model,
)
from newcomb_bell.errors import InvalidState
from newcomb_bell.quantum import (
    CHSHConfiguration,
    TwoQubitState,
    born_joint,
    correlator,
    phi_plus,
    tsirelson_config,
)

PAIRS = ((1, 1), (1, -1), (-1, 1), (-1, -1))
H = math.sqrt(2) / 2


def oracle_joint(amps, ta, tb):
    """Born probabilities from explicit eigenvectors, no matrix library.

    The +1 eigenvector of cos(t) Z + sin(t) X is (cos t/2, sin t/2) and the
    -1 eigenvector is (-sin t/2, cos t/2).
    """

    def vec(t, o):
        c, s = math.cos(t / 2), math.sin(t / 2)
        return (c, s) if o == 1 else (-s, c)

    out = {}
    for a, b in PAIRS:
        u, v = vec(ta, a), vec(tb, b)
        amp = sum(
            u[i] * v[j] * amps[2 * i + j] for i in range(2) for j in range(2)
        )
        out[(a, b)] = abs(amp) ** 2
    return out


def test_oracle_frozen_values():
    # hand check: <u0 u1|Phi+> = (cos(ta/2)cos(tb/2) + sin sin)/sqrt2 = cos((ta-tb)/2)/sqrt2
    o = oracle_joint(phi_plus().amplitudes, 0.0, math.pi / 4)
    assert o[(1, 1)] == pytest.approx((1 + H) / 4, abs=1e-15)
    assert o[(1, 1)] == pytest.approx(0.42677669529663687, abs=1e-15)
    assert o[(1, -1)] == pytest.approx(0.07322330470336313, abs=1e-15)


def test_phi_plus_same_angle():
    j = born_joint(phi_plus(), 0.0, 0.0)
    assert j[(1, 1)] == pytest.approx(0.5, abs=1e-12)
    assert j[(-1, -1)] == pytest.approx(0.5, abs=1e-12)
    assert j[(1, -1)] == pytest.approx(0.0, abs=1e-12)


def test_phi_plus_orthogonal():
    j = born_joint(phi_plus(), 0.0, math.pi / 2)
    for p in PAIRS:
        assert j[p] == pytest.approx(0.25, abs=1e-12)


def test_phi_plus_quarter_turn_table():
    j = born_joint(phi_plus(), 0.0, math.pi / 4)
    expected = {(1, 1): (1 + H) / 4, (1, -1): (1 - H) / 4, (-1, 1): (1 - H) / 4, (-1, -1): (1 + H) / 4}
    for p in PAIRS:
        assert j[p] == pytest.approx(expected[p], abs=1e-12)


def test_correlator_examples():
    assert correlator(phi_plus(), 0.3, 0.3) == pytest.approx(1.0, abs=1e-12)
    assert correlator(phi_plus(), 0.1, 0.1 + math.pi / 2) == pytest.approx(0.0, abs=1e-12)
    assert correlator(phi_plus(), 0.0, math.pi / 4) == pytest.approx(0.7071067811865476, abs=1e-12)


def test_correlator_closed_form_grid():
    angles = np.linspace(-math.pi, math.pi, 10)
    for ta in angles:
        for tb in angles:
            assert correlator(phi_plus(), ta, tb) == pytest.approx(math.cos(ta - tb), abs=1e-12)


def test_against_oracle_random_states():
    rng = np.random.default_rng(17)
    for _ in range(100):
        v = rng.normal(size=4) + 1j * rng.normal(size=4)
        state = TwoQubitState.normalized(v)
        ta, tb = rng.uniform(-math.pi, math.pi, size=2)
        j = born_joint(state, ta, tb)
        o = oracle_joint(state.amplitudes, ta, tb)
        assert all(m >= 0 for m in j.mass)
        assert abs(sum(j.mass) - 1) <= 1e-9
        for p in PAIRS:
            assert j[p] == pytest.approx(o[p], abs=1e-12)


def test_no_signalling_random():
    rng = np.random.default_rng(23)
    for _ in range(100):
        state = TwoQubitState.normalized(rng.normal(size=4) + 1j * rng.normal(size=4))
        cfg = CHSHConfiguration(state, dict(zip(("a_r", "a_g", "b_r", "b_g"), rng.uniform(-3, 3, 4))))
        assert check_no_signalling(cfg)


def test_invalid_state():
    with pytest.raises(InvalidState):
        TwoQubitState((1, 1, 0, 0))
    with pytest.raises(InvalidState):
        TwoQubitState((1, 0, 0))
    with pytest.raises(InvalidState):
        born_joint((1, 1, 1, 1), 0, 0)


class TestTsirelson:
    def test_value(self):
        assert chsh_of_model(tsirelson_config()) == pytest.approx(2.8284271247461903, abs=1e-9)

    def test_correlators(self):
        cfg = tsirelson_config()
        signs = {(Colour.RED, Colour.RED): 1, (Colour.RED, Colour.GREEN): 1,
                 (Colour.GREEN, Colour.RED): 1, (Colour.GREEN, Colour.GREEN): -1}
        for a, b in SETTING_PAIRS:
            o = oracle_joint(cfg.state.amplitudes, cfg.setting("a", a).angle, cfg.setting("b", b).angle)
            e = sum(x * y * m for (x, y), m in o.items())
            assert e == pytest.approx(signs[(a, b)] * H, abs=1e-12)
            assert correlator(cfg.state, cfg.setting("a", a), cfg.setting("b", b)) == pytest.approx(e, abs=1e-12)

    def test_no_signalling(self):
        assert check_no_signalling(tsirelson_config())

    def test_random_angles_never_exceed(self):
        rng = np.random.default_rng(31)
        # E = cos(ta - tb) on Phi+; evaluate F in closed form for speed, and
        # spot check against the Born engine
        angles = rng.uniform(-math.pi, math.pi, size=(10_000, 4))
        ar, ag, br, bg = angles.T
        f = np.cos(ar - br) + np.cos(ar - bg) + np.cos(ag - br) - np.cos(ag - bg)
        assert f.max() <= 2 * math.sqrt(2) + 1e-9
        for row in angles[:200]:
            cfg = CHSHConfiguration(phi_plus(), dict(zip(("a_r", "a_g", "b_r", "b_g"), row)))
            value = chsh_of_model(cfg)
            assert value <= 2 * math.sqrt(2) + 1e-9
            assert value == pytest.approx(
                math.cos(row[0] - row[2]) + math.cos(row[0] - row[3])
                + math.cos(row[1] - row[2]) - math.cos(row[1] - row[3]), abs=1e-12
            )
