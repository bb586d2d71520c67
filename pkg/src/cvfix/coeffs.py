"""Coefficient mappings for the contraction conditions.

A :class:`CoefficientTriple` holds three functions ``lambda_i(x, y)`` on pairs
of complex scalars in the nonnegative cone, together with the form of
contraction they belong to:

* ``SUM_FORM`` requires ``lambda1 + 2*lambda2 + 2*lambda3 < 1`` and derives
  ``gamma = (lambda1 + lambda2 + lambda3) / (1 - lambda2 - lambda3)``;
* ``RATIONAL_FORM`` requires ``lambda1 + lambda2 + lambda3 < 1`` and derives
  ``gamma = lambda1 / (1 - lambda2 - lambda3)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from numbers import Real
from typing import Callable, Iterable, Sequence, Union

from .cplx import ZERO, ComplexScalar, ScalarLike, as_scalar, partial_leq

__all__ = [
    "Form",
    "CoefficientTriple",
    "GammaFunction",
    "InvariantViolation",
    "BoundReport",
    "GammaClassReport",
    "CLASS_EPS",
    "constant",
    "decaying",
    "constant_triple",
    "gamma_sum_form",
    "gamma_rational_form",
    "derive_gamma",
    "check_hypothesis_bound",
    "falsify_gamma_class",
]

CLASS_EPS = 1e-3

LambdaFn = Callable[[ComplexScalar, ComplexScalar], float]


class Form(Enum):
    SUM_FORM = "sum"
    RATIONAL_FORM = "rational"

    @classmethod
    def parse(cls, value: Union[str, "Form"]) -> "Form":
        if isinstance(value, Form):
            return value
        key = str(value).strip().lower()
        for member in cls:
            if key in (member.value, member.name.lower()):
                return member
        raise ValueError(f"unknown coefficient form {value!r}")


class InvariantViolation(ArithmeticError):
    """A derived quantity left its admissible range at a specific point."""


class _Constant:
    def __init__(self, value: float):
        self.value = float(value)

    def __call__(self, x: ComplexScalar, y: ComplexScalar) -> float:
        return self.value

    def __repr__(self) -> str:
        return f"constant({self.value!r})"


class _Decaying:
    def __init__(self, peak: float, scale: float):
        self.peak = float(peak)
        self.scale = float(scale)

    def __call__(self, x: ComplexScalar, y: ComplexScalar) -> float:
        return self.peak / (1.0 + self.scale * (abs(x) + abs(y)))

    def __repr__(self) -> str:
        return f"decaying({self.peak!r}, scale={self.scale!r})"


def constant(value: float) -> LambdaFn:
    return _Constant(value)


def decaying(peak: float, scale: float = 1.0) -> LambdaFn:
    """``peak / (1 + scale*(|x| + |y|))``: largest at the origin."""
    return _Decaying(peak, scale)


def _as_fn(value: Union[float, LambdaFn]) -> LambdaFn:
    if isinstance(value, Real):
        return _Constant(value)
    if not callable(value):
        raise TypeError(f"lambda must be a number or a callable, got {value!r}")
    return value


@dataclass(frozen=True)
class CoefficientTriple:
    """Three coefficient functions plus the contraction form they serve.

    Numbers passed for ``lambda1..3`` are wrapped as constant functions.
    User callables must be pure and reentrant.
    """

    lambda1: LambdaFn
    lambda2: LambdaFn
    lambda3: LambdaFn
    kind: Form = Form.SUM_FORM

    def __post_init__(self) -> None:
        object.__setattr__(self, "lambda1", _as_fn(self.lambda1))
        object.__setattr__(self, "lambda2", _as_fn(self.lambda2))
        object.__setattr__(self, "lambda3", _as_fn(self.lambda3))
        object.__setattr__(self, "kind", Form.parse(self.kind))

    def __call__(self, x: ScalarLike, y: ScalarLike) -> tuple[float, float, float]:
        x, y = as_scalar(x), as_scalar(y)
        return (float(self.lambda1(x, y)), float(self.lambda2(x, y)), float(self.lambda3(x, y)))

    @property
    def constants(self) -> tuple[float, float, float] | None:
        """The three values if every coefficient is constant, else None."""
        fns = (self.lambda1, self.lambda2, self.lambda3)
        if all(isinstance(fn, _Constant) for fn in fns):
            return tuple(fn.value for fn in fns)
        return None

    def weighted_sum(self, x: ScalarLike, y: ScalarLike) -> float:
        l1, l2, l3 = self(x, y)
        if self.kind is Form.SUM_FORM:
            return l1 + 2.0 * l2 + 2.0 * l3
        return l1 + l2 + l3


def constant_triple(l1: float, l2: float, l3: float, kind: Union[str, Form] = Form.SUM_FORM) -> CoefficientTriple:
    return CoefficientTriple(_Constant(l1), _Constant(l2), _Constant(l3), Form.parse(kind))


@dataclass(frozen=True)
class GammaFunction:
    """``gamma(x, y)`` derived from a triple; never built from a bare callable."""

    derived_from: CoefficientTriple

    def __call__(self, x: ScalarLike, y: ScalarLike) -> float:
        return self.eval(x, y)

    def eval(self, x: ScalarLike, y: ScalarLike) -> float:
        l1, l2, l3 = self.derived_from(x, y)
        denom = 1.0 - l2 - l3
        if denom <= 0.0:
            raise InvariantViolation(
                f"1 - lambda2 - lambda3 = {denom!r} <= 0 at ({as_scalar(x)}, {as_scalar(y)})"
            )
        if self.derived_from.kind is Form.SUM_FORM:
            return (l1 + l2 + l3) / denom
        return l1 / denom


def gamma_sum_form(triple: CoefficientTriple) -> GammaFunction:
    if triple.kind is not Form.SUM_FORM:
        raise ValueError("gamma_sum_form needs a SUM_FORM triple")
    return GammaFunction(triple)


def gamma_rational_form(triple: CoefficientTriple) -> GammaFunction:
    if triple.kind is not Form.RATIONAL_FORM:
        raise ValueError("gamma_rational_form needs a RATIONAL_FORM triple")
    return GammaFunction(triple)


def derive_gamma(triple: CoefficientTriple) -> GammaFunction:
    """Dispatch on ``triple.kind``."""
    if triple.kind is Form.SUM_FORM:
        return gamma_sum_form(triple)
    return gamma_rational_form(triple)


@dataclass
class BoundReport:
    """Per-point margins ``1 - weighted_sum`` of the scalar hypothesis.

    ``failures`` holds ``(x, y, margin)`` for every nonpositive margin;
    ``range_failures`` holds ``(x, y, (l1, l2, l3))`` where some coefficient
    left ``[0, 1)``.
    """

    kind: Form
    margins: list = field(default_factory=list)
    failures: list = field(default_factory=list)
    range_failures: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures and not self.range_failures

    @property
    def min_margin(self) -> float:
        return min(self.margins) if self.margins else float("nan")

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "form": self.kind.value,
            "points": len(self.margins),
            "min_margin": self.min_margin,
            "failure_count": len(self.failures),
            "failures": [[as_scalar(x).to_list(), as_scalar(y).to_list(), m] for x, y, m in self.failures[:10]],
            "range_failures": len(self.range_failures),
        }


def check_hypothesis_bound(triple: CoefficientTriple, sample: Iterable[tuple[ScalarLike, ScalarLike]]) -> BoundReport:
    """Evaluate the scalar bound on each ``(x, y)`` of ``sample``.

    Raises
    ------
    ValueError
        If a sample point lies outside the nonnegative cone.
    """
    report = BoundReport(kind=triple.kind)
    for x, y in sample:
        x, y = as_scalar(x), as_scalar(y)
        if not (partial_leq(ZERO, x) and partial_leq(ZERO, y)):
            raise ValueError(f"sample point ({x}, {y}) is outside the nonnegative cone")
        lams = triple(x, y)
        margin = 1.0 - triple.weighted_sum(x, y)
        report.margins.append(margin)
        if margin <= 0.0:
            report.failures.append((x, y, margin))
        if any(not (0.0 <= lam < 1.0) for lam in lams):
            report.range_failures.append((x, y, lams))
    return report


@dataclass
class GammaClassReport:
    counterexamples: list = field(default_factory=list)
    sequences_checked: int = 0
    class_eps: float = CLASS_EPS

    @property
    def found(self) -> bool:
        return bool(self.counterexamples)

    @property
    def verdict(self) -> str:
        if self.found:
            return "counterexample found: gamma is not in the class"
        return "no counterexample found (membership is not proven by a finite check)"


def falsify_gamma_class(
    gamma: GammaFunction,
    trial_sequences: Sequence[Sequence[tuple[ScalarLike, ScalarLike]]],
    class_eps: float = CLASS_EPS,
) -> GammaClassReport:
    """Search trial sequences for gamma approaching 1 away from the origin.

    The tail of each sequence is its second half.  A tail entry with
    ``gamma > 1 - class_eps`` while ``|x| + |y| > class_eps`` is a
    counterexample to "gamma(x_n, y_n) -> 1 implies (x_n, y_n) -> 0"; the pair
    size is measured as ``|x| + |y|``.
    """
    report = GammaClassReport(class_eps=class_eps)
    for idx, seq in enumerate(trial_sequences):
        if len(seq) < 16:
            raise ValueError(f"trial sequence {idx} has {len(seq)} terms; at least 16 are needed")
        report.sequences_checked += 1
        for n in range(len(seq) // 2, len(seq)):
            x, y = as_scalar(seq[n][0]), as_scalar(seq[n][1])
            value = gamma(x, y)
            size = abs(x) + abs(y)
            if value > 1.0 - class_eps and size > class_eps:
                report.counterexamples.append((idx, n, x, y, value))
                break
    return report
