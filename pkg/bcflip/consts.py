# SPDX-FileCopyrightText: 2026 The bcflip authors
#
# SPDX-License-Identifier: MIT

import dataclasses
import math
from typing import Optional

from . import enums


@dataclasses.dataclass(frozen=True)
class Tolerances:
    # Representation checks: hermiticity, unit trace, projector-ness.
    structural: float = 1e-10
    # Equalities between derived quantities.
    derived: float = 1e-9
    # Simulation against closed forms.
    simulation: float = 1e-6
    # Negative eigenvalues this small are rounding noise and get clamped.
    clamp: float = 1e-12


DEFAULT_TOLERANCES = Tolerances()

DEFAULT_MAX_AMPLITUDES = 2**24

# Largest P_n whose Alice attack fits the amplitude cap on one branch.
DEFAULT_MAX_ROUNDS = 7

CROSSING_ALPHA = 0.25
CHEATING_FLOOR = 9 / 16

BISECTION_ITERATIONS = 200
BISECTION_LOW = 1e-9
BISECTION_HIGH = 1 - 1e-9

# Parameter sweeps are inclusive of the stop value within this slack.
SWEEP_SLACK = 1e-12


@dataclasses.dataclass(frozen=True)
class GridPoint:
    family: enums.Family
    n: int = 1
    eps: Optional[float] = None
    alpha: Optional[float] = None
    beta: Optional[float] = None

    @property
    def label(self) -> str:
        if self.family == enums.Family.PN:
            return f"pn(n={self.n}, eps={self.eps:g})"
        if self.family == enums.Family.THREE:
            return f"three(alpha={self.alpha:.4f})"
        return f"five(alpha={self.alpha:.4f}, beta={self.beta:.4f})"


ATTACK_GRID = [
    GridPoint(enums.Family.PN, n=n, eps=eps)
    for n in range(1, 6)
    for eps in (0.2, 0.5, 0.8)
] + [
    GridPoint(enums.Family.THREE, alpha=math.pi / 3),
    GridPoint(enums.Family.THREE, alpha=math.pi / 2),
    GridPoint(enums.Family.FIVE, alpha=math.pi / 2, beta=math.pi / 2),
    GridPoint(enums.Family.FIVE, alpha=math.pi / 3, beta=2 * math.pi / 3),
]

SCHEDULE_N_MAX = 50
SCHEDULE_EPS_GRID = [i / 20 for i in range(1, 20)]
CLOSED_FORM_EPS_GRID = [i / 100 for i in range(1, 100)]
