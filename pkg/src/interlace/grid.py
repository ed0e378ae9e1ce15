"""Uniform real-line grids."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Grid:
    """Uniform discretization of [x_min, x_max] with n_points samples."""

    x_min: float
    x_max: float
    n_points: int

    def __post_init__(self):
        if not (math.isfinite(self.x_min) and math.isfinite(self.x_max)):
            raise ValueError("grid bounds must be finite")
        if not self.x_min < self.x_max:
            raise ValueError(f"x_min={self.x_min} must be below x_max={self.x_max}")
        if int(self.n_points) != self.n_points or self.n_points < 3:
            raise ValueError(f"n_points must be an integer >= 3, got {self.n_points}")
        object.__setattr__(self, "x_min", float(self.x_min))
        object.__setattr__(self, "x_max", float(self.x_max))
        object.__setattr__(self, "n_points", int(self.n_points))

    @classmethod
    def from_spacing(cls, x_min: float, x_max: float, h: float) -> "Grid":
        """Grid whose spacing is the largest value not exceeding h."""
        n = int(math.ceil((x_max - x_min) / h - 1e-9)) + 1
        return cls(x_min, x_max, max(n, 3))

    @property
    def h(self) -> float:
        return (self.x_max - self.x_min) / (self.n_points - 1)

    @property
    def width(self) -> float:
        return self.x_max - self.x_min

    @property
    def x(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.n_points)

    def is_symmetric(self, center: float = 0.0, tol: float = 1e-9) -> bool:
        """True if the sample set is mirror symmetric about `center`."""
        return abs((self.x_min + self.x_max) / 2 - center) <= tol * max(1.0, self.width)

    def to_dict(self) -> dict:
        return {"x_min": self.x_min, "x_max": self.x_max, "n_points": self.n_points}

    @classmethod
    def from_dict(cls, d: dict) -> "Grid":
        return cls(d["x_min"], d["x_max"], d["n_points"])
