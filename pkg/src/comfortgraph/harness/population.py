"""Preference archetypes for the simulated occupants.

The ten archetypes are the step-1/3 lattice points of the 3-class simplex, so
their onboarding answer distributions are pairwise well separated.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Archetype:
    index: int
    tilt: tuple[float, float, float]  # lattice point over (cooler, no preference, warmer)

    @property
    def onboarding(self) -> np.ndarray:
        """Answer distribution for the onboarding questionnaire."""
        return 0.04 + 0.88 * np.asarray(self.tilt)

    @property
    def sensitivity(self) -> float:
        """Scale on the AoI deviation of the comfort field, in [0.8, 1.0]."""
        return 0.9 + 0.1 * (self.tilt[0] - self.tilt[2])

    @property
    def heart_rate(self) -> tuple[float, float]:
        return 68.0 + 8.0 * self.tilt[0], 6.0

    @property
    def near_body_temp(self) -> tuple[float, float]:
        return 32.5 + 1.0 * (self.tilt[0] - self.tilt[2]), 0.8


ARCHETYPES = tuple(
    Archetype(i, (a / 3, b / 3, (3 - a - b) / 3))
    for i, (a, b) in enumerate((a, b) for a in range(3, -1, -1) for b in range(3 - a, -1, -1))
)
