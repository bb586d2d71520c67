"""Composite quadrature weights on uniform grids.

The integral operators are discretized Nystrom-style: the nodes at which a
function is stored are the quadrature nodes, so only weight vectors are needed.
"""
from __future__ import annotations

from enum import Enum
from typing import Union

import numpy as np

__all__ = ["Quadrature", "quadrature_weights", "integrate"]


class Quadrature(Enum):
    TRAPEZOID = "trapezoid"
    SIMPSON = "simpson"

    @classmethod
    def parse(cls, value: Union[str, "Quadrature"]) -> "Quadrature":
        if isinstance(value, Quadrature):
            return value
        key = str(value).strip().lower()
        for member in cls:
            if key in (member.value, member.name.lower()):
                return member
        raise ValueError(f"unknown quadrature rule {value!r}")


def quadrature_weights(grid_points: int, a: float, b: float, rule: Union[str, Quadrature]) -> np.ndarray:
    """Weights ``w`` with ``sum(w * f(t)) ~ integral of f over [a, b]``.

    Simpson's rule needs an odd number of points (an even number of panels).
    """
    rule = Quadrature.parse(rule)
    m = int(grid_points)
    if m < 2:
        raise ValueError("at least two grid points are required")
    h = (b - a) / (m - 1)
    if rule is Quadrature.TRAPEZOID:
        w = np.full(m, h)
        w[0] = w[-1] = h / 2.0
        return w
    if m % 2 == 0:
        raise ValueError(f"Simpson's rule needs an odd number of grid points, got {m}")
    w = np.empty(m)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    w[0] = w[-1] = 1.0
    return w * (h / 3.0)


def integrate(values: np.ndarray, a: float, b: float, rule: Union[str, Quadrature]) -> np.ndarray:
    """Integrate samples along axis 0."""
    values = np.asarray(values, dtype=float)
    w = quadrature_weights(values.shape[0], a, b, rule)
    return np.tensordot(w, values, axes=(0, 0))
