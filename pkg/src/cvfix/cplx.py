"""Complex scalars ordered componentwise.

``z1 <= z2`` here means ``Re z1 <= Re z2`` and ``Im z1 <= Im z2``.  The order
is partial: ``1+0j`` and ``0+1j`` are incomparable.  All comparisons are exact
on the float components; any tolerance belongs to the caller.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum
from numbers import Real
from typing import Union

__all__ = [
    "ComplexScalar",
    "OrderCase",
    "ZERO",
    "ONE_PLUS_I",
    "as_scalar",
    "partial_leq",
    "classify",
    "strict_less",
    "strictly_dominates",
]


@dataclass(frozen=True, slots=True)
class ComplexScalar:
    """An element of C with finite components.

    Supports the arithmetic the metric layer needs: ``+``, ``-``, products and
    quotients (complex or real), ``abs`` and polar form.
    """

    re: float
    im: float = 0.0

    def __post_init__(self) -> None:
        re, im = float(self.re), float(self.im)
        if not (math.isfinite(re) and math.isfinite(im)):
            raise ValueError(f"non-finite complex scalar ({self.re!r}, {self.im!r})")
        object.__setattr__(self, "re", re)
        object.__setattr__(self, "im", im)

    @classmethod
    def from_complex(cls, z: complex) -> "ComplexScalar":
        return cls(z.real, z.imag)

    @classmethod
    def from_polar(cls, modulus: float, angle: float) -> "ComplexScalar":
        return cls.from_complex(cmath.rect(modulus, angle))

    def __complex__(self) -> complex:
        return complex(self.re, self.im)

    def __abs__(self) -> float:
        return math.hypot(self.re, self.im)

    def polar(self) -> tuple[float, float]:
        return abs(self), math.atan2(self.im, self.re)

    def conjugate(self) -> "ComplexScalar":
        return ComplexScalar(self.re, -self.im)

    def __neg__(self) -> "ComplexScalar":
        return ComplexScalar(-self.re, -self.im)

    def __add__(self, other: "ScalarLike") -> "ComplexScalar":
        o = as_scalar(other)
        return ComplexScalar(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other: "ScalarLike") -> "ComplexScalar":
        o = as_scalar(other)
        return ComplexScalar(self.re - o.re, self.im - o.im)

    def __rsub__(self, other: "ScalarLike") -> "ComplexScalar":
        return as_scalar(other) - self

    def __mul__(self, other: "ScalarLike") -> "ComplexScalar":
        if isinstance(other, Real):
            # keeps a*z exact componentwise, which the scalar-monotonicity law relies on
            return ComplexScalar(self.re * other, self.im * other)
        o = as_scalar(other)
        return ComplexScalar(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other: "ScalarLike") -> "ComplexScalar":
        if isinstance(other, Real):
            return ComplexScalar(self.re / other, self.im / other)
        o = as_scalar(other)
        if o.re == 0.0 and o.im == 0.0:
            raise ZeroDivisionError("complex division by zero")
        return ComplexScalar.from_complex(complex(self) / complex(o))

    def __rtruediv__(self, other: "ScalarLike") -> "ComplexScalar":
        return as_scalar(other) / self

    def to_list(self) -> list[float]:
        """Serialized form ``[re, im]``."""
        return [self.re, self.im]

    def __repr__(self) -> str:
        return f"ComplexScalar({self.re!r}, {self.im!r})"


ScalarLike = Union[ComplexScalar, complex, float, int]

ZERO = ComplexScalar(0.0, 0.0)
ONE_PLUS_I = ComplexScalar(1.0, 1.0)


def as_scalar(z: ScalarLike) -> ComplexScalar:
    """Coerce a Python number, ``complex`` or ``[re, im]`` pair."""
    if isinstance(z, ComplexScalar):
        return z
    if isinstance(z, (list, tuple)) and len(z) == 2:
        return ComplexScalar(z[0], z[1])
    if isinstance(z, (complex, Real)):
        z = complex(z)
        return ComplexScalar(z.real, z.imag)
    raise TypeError(f"cannot interpret {z!r} as a complex scalar")


class OrderCase(Enum):
    C1 = "C1"  # equal
    C2 = "C2"  # Re strictly less, Im equal
    C3 = "C3"  # Re equal, Im strictly less
    C4 = "C4"  # both strictly less
    INCOMPARABLE = "INCOMPARABLE"


def partial_leq(z1: ScalarLike, z2: ScalarLike) -> bool:
    a, b = as_scalar(z1), as_scalar(z2)
    return a.re <= b.re and a.im <= b.im


def classify(z1: ScalarLike, z2: ScalarLike) -> OrderCase:
    """Which of the four ``z1 <= z2`` cases holds, or INCOMPARABLE.

    INCOMPARABLE is returned whenever ``partial_leq(z1, z2)`` is false, which
    includes the case ``z2 < z1``.
    """
    a, b = as_scalar(z1), as_scalar(z2)
    if not partial_leq(a, b):
        return OrderCase.INCOMPARABLE
    re_eq, im_eq = a.re == b.re, a.im == b.im
    if re_eq and im_eq:
        return OrderCase.C1
    if im_eq:
        return OrderCase.C2
    if re_eq:
        return OrderCase.C3
    return OrderCase.C4


def strict_less(z1: ScalarLike, z2: ScalarLike) -> bool:
    """``z1 <= z2`` and ``z1 != z2`` (cases C2, C3 or C4)."""
    return classify(z1, z2) in (OrderCase.C2, OrderCase.C3, OrderCase.C4)


def strictly_dominates(z1: ScalarLike, z2: ScalarLike) -> bool:
    """True iff both components of ``z1`` are strictly below those of ``z2``.

    Note the argument order: ``strictly_dominates(z1, z2)`` reads "z2 strictly
    dominates z1", i.e. case C4.
    """
    a, b = as_scalar(z1), as_scalar(z2)
    return a.re < b.re and a.im < b.im
