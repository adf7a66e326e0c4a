"""Two-qubit Born-rule probabilities for +-1 spin measurements in the Z-X plane."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .causal_models import OUTCOME_PAIRS, Colour, correlator_of
from .errors import InvalidState
from .prob import FiniteDistribution

_Z = np.array([[1, 0], [0, -1]], dtype=complex)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_I = np.eye(2, dtype=complex)


@dataclass(frozen=True)
class TwoQubitState:
    """Pure state with amplitudes on ``|00>, |01>, |10>, |11>``."""

    amplitudes: tuple

    def __post_init__(self):
        amps = tuple(complex(a) for a in self.amplitudes)
        if len(amps) != 4:
            raise InvalidState("a two-qubit state needs exactly 4 amplitudes")
        norm = math.fsum(abs(a) ** 2 for a in amps)
        if abs(norm - 1.0) > 1e-12:
            raise InvalidState(f"state has squared norm {norm!r}")
        object.__setattr__(self, "amplitudes", amps)

    @property
    def vector(self) -> np.ndarray:
        return np.array(self.amplitudes, dtype=complex)

    @classmethod
    def normalized(cls, amplitudes) -> "TwoQubitState":
        v = np.asarray(amplitudes, dtype=complex)
        n = np.linalg.norm(v)
        if n == 0:
            raise InvalidState("zero vector")
        return cls(tuple(v / n))


def phi_plus() -> TwoQubitState:
    r = 1.0 / math.sqrt(2.0)
    return TwoQubitState((r, 0, 0, r))


@dataclass(frozen=True)
class MeasurementSetting:
    """Observable ``cos(angle) Z + sin(angle) X`` with eigenvalues +-1."""

    angle: float

    def __post_init__(self):
        if not math.isfinite(self.angle):
            raise InvalidState(f"angle must be finite, got {self.angle!r}")

    def observable(self) -> np.ndarray:
        return math.cos(self.angle) * _Z + math.sin(self.angle) * _X

    def projector(self, outcome: int) -> np.ndarray:
        return (_I + outcome * self.observable()) / 2.0


def _as_setting(s) -> MeasurementSetting:
    return s if isinstance(s, MeasurementSetting) else MeasurementSetting(float(s))


def born_joint(state: TwoQubitState, theta_a, theta_b) -> FiniteDistribution:
    """``P(a, b) = <psi| P_a(theta_a) (x) P_b(theta_b) |psi>``."""
    if not isinstance(state, TwoQubitState):
        state = TwoQubitState(tuple(state))
    sa, sb = _as_setting(theta_a), _as_setting(theta_b)
    psi = state.vector
    probs = []
    for a, b in OUTCOME_PAIRS:
        op = np.kron(sa.projector(a), sb.projector(b))
        probs.append(max(0.0, float(np.real(np.vdot(psi, op @ psi)))))
    total = math.fsum(probs)
    return FiniteDistribution(OUTCOME_PAIRS, tuple(p / total for p in probs))


def correlator(state: TwoQubitState, theta_a, theta_b) -> float:
    return correlator_of(born_joint(state, theta_a, theta_b))


@dataclass(frozen=True)
class CHSHConfiguration:
    """A state and one measurement angle per (side, colour).

    ``angles`` is keyed ``a_r``, ``a_g``, ``b_r``, ``b_g``. Acts as a joint
    model over colour settings.
    """

    state: TwoQubitState
    angles: Mapping[str, MeasurementSetting] = field(hash=False)

    def __post_init__(self):
        angles = {k: _as_setting(v) for k, v in dict(self.angles).items()}
        if set(angles) != {"a_r", "a_g", "b_r", "b_g"}:
            raise InvalidState(f"need angles a_r, a_g, b_r, b_g; got {sorted(angles)}")
        object.__setattr__(self, "angles", angles)

    def setting(self, side: str, colour) -> MeasurementSetting:
        return self.angles[f"{side}_{Colour(colour).value}"]

    def joint(self, a_setting, b_setting) -> FiniteDistribution:
        return born_joint(
            self.state, self.setting("a", a_setting), self.setting("b", b_setting)
        )


def tsirelson_config() -> CHSHConfiguration:
    """Phi+ with angles reaching the quantum maximum ``2*sqrt(2)``."""
    q = math.pi / 4
    return CHSHConfiguration(
        phi_plus(), {"a_r": 0.0, "a_g": 2 * q, "b_r": q, "b_g": -q}
    )
