"""Parameters of the perturbed two-oscillator constraint ``H(s1, s2) = E``."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ConstraintSystem:
    """``H = w1 s1 + w2 s2 + a s1^2 + b s2^2 + 2 c s1 s2`` at energy ``E``."""

    omega1: float
    omega2: float
    a: float
    b: float
    c: float
    E: float

    def __post_init__(self):
        if self.omega1 <= 0 or self.omega2 <= 0:
            raise ValueError("frequencies omega1, omega2 must be positive")
        if self.E <= 0:
            raise ValueError("energy level E must be positive")

    @property
    def is_positive_definite(self) -> bool:
        return self.a > 0 and self.a * self.b > self.c ** 2

    @property
    def is_unperturbed(self) -> bool:
        return self.a == 0 and self.b == 0 and self.c == 0

    def require_elliptic(self, allow_unperturbed: bool = True) -> None:
        if self.is_positive_definite or (allow_unperturbed and self.is_unperturbed):
            return
        raise ValueError(
            f"quadratic form [[a, c], [c, b]] = [[{self.a}, {self.c}], [{self.c}, {self.b}]] "
            "is not positive definite"
        )

    def energy(self, s1, s2):
        return (self.omega1 * s1 + self.omega2 * s2 + self.a * s1 ** 2
                + self.b * s2 ** 2 + 2 * self.c * s1 * s2)

    def frequencies(self, s1, s2):
        """``(dH/ds1, dH/ds2)``."""
        return (self.omega1 + 2 * self.a * s1 + 2 * self.c * s2,
                self.omega2 + 2 * self.b * s2 + 2 * self.c * s1)

    def swapped(self) -> ConstraintSystem:
        """Exchange the roles of the two oscillators."""
        return ConstraintSystem(self.omega2, self.omega1, self.b, self.a, self.c, self.E)

    def hamiltonian_vector_field(self, z: np.ndarray) -> np.ndarray:
        """Flow of ``{H, -}`` in canonical coordinates, ``z = (x1, p1, x2, p2)``.

        ``d/dt x_i = {H, x_i} = -dH/dp_i`` and ``d/dt p_i = dH/dx_i``.
        """
        z = np.asarray(z, dtype=float)
        x1, p1, x2, p2 = z[..., 0], z[..., 1], z[..., 2], z[..., 3]
        s1 = 0.5 * (x1 ** 2 + p1 ** 2)
        s2 = 0.5 * (x2 ** 2 + p2 ** 2)
        o1, o2 = self.frequencies(s1, s2)
        return np.stack([-o1 * p1, o1 * x1, -o2 * p2, o2 * x2], axis=-1)

    def to_dict(self) -> dict:
        return {"omega1": self.omega1, "omega2": self.omega2, "a": self.a,
                "b": self.b, "c": self.c, "E": self.E}
