"""Jungck-type iteration for four self-maps and the checks around it.

Given maps ``f, g, S, T`` with ``T(X) in f(X)`` and ``S(X) in g(X)``, the engine
builds the interleaved sequences::

    y_{2n-1} = S x_{2n-2} = g x_{2n-1}
    y_{2n}   = T x_{2n-1} = f x_{2n}

The ``x`` points are obtained through user-supplied preimage oracles for ``g``
and ``f``.  Under the contraction hypotheses the step moduli
``|d(y_n, y_{n+1})|`` shrink by at least ``gamma(y_{n-1}, y_n)`` per step and
the ``y`` sequence converges to the unique common fixed point.

Every hypothesis and conclusion is also available as a sampled check:
contraction inequalities (sum and rational forms, with or without constant
coefficients), range inclusions, weak compatibility, a fixed-point
certificate and a multi-start uniqueness probe.
"""
from __future__ import annotations

import csv
import io
import itertools
import math
import warnings
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Generic, Optional, Sequence, TypeVar, Union

from .coeffs import CoefficientTriple, Form, GammaFunction, constant_triple
from .cplx import ONE_PLUS_I, ComplexScalar, partial_leq
from .metric import MetricSpace

__all__ = [
    "Status",
    "PreimageError",
    "HypothesisViolation",
    "DegenerateDenominator",
    "MapQuadruple",
    "IterationTrace",
    "FixedPointCertificate",
    "ContractionReport",
    "RangeReport",
    "CompatibilityReport",
    "UniquenessReport",
    "displacement_adapter",
    "origin_adapter",
    "auto_adapter",
    "jungck_iterate",
    "verify_contraction_sum",
    "verify_contraction_rational",
    "verify_corollary_constants",
    "verify_range_inclusion",
    "verify_weak_compatibility",
    "certify_fixed_point",
    "uniqueness_probe",
    "DECREASE_SLACK",
]

P = TypeVar("P")

DECREASE_SLACK = 1e-10


class Status(Enum):
    CONVERGED = "CONVERGED"
    MAX_ITER = "MAX_ITER"
    PREIMAGE_FAILED = "PREIMAGE_FAILED"
    DECREASE_VIOLATED = "DECREASE_VIOLATED"


class PreimageError(RuntimeError):
    """Raised by a preimage oracle that could not hit its target."""

    def __init__(self, message: str, target: Any = None, residual: float = math.nan):
        super().__init__(message)
        self.target = target
        self.residual = residual


class HypothesisViolation(ValueError):
    """Scalar coefficient hypothesis rejected before any sampling."""

    def __init__(self, message: str, margin: float):
        super().__init__(message)
        self.margin = margin


class DegenerateDenominator(ZeroDivisionError):
    pass


def _identity(x):
    return x


def _identity_preimage(target, hint, tol):
    return target


@dataclass(frozen=True)
class MapQuadruple(Generic[P]):
    """Four self-maps and preimage oracles for ``f`` and ``g``.

    A preimage oracle is called as ``preimage(target, hint, tol)`` and returns a
    point ``x`` with ``|d(f(x), target)| < tol``, or raises
    :class:`PreimageError`.  It must be deterministic in its arguments.
    """

    f: Callable[[P], P]
    g: Callable[[P], P]
    S: Callable[[P], P]
    T: Callable[[P], P]
    preimage_f: Callable[[P, P, float], P]
    preimage_g: Callable[[P, P, float], P]

    @classmethod
    def from_pair(cls, S: Callable[[P], P], T: Callable[[P], P]) -> "MapQuadruple":
        """Two-map case: ``f = g = identity``."""
        return cls(_identity, _identity, S, T, _identity_preimage, _identity_preimage)

    @classmethod
    def from_single(cls, T: Callable[[P], P]) -> "MapQuadruple":
        """One-map case: ``S = T`` and ``f = g = identity``."""
        return cls.from_pair(T, T)


# λ arguments: the coefficient functions live on pairs of complex scalars but
# the contraction evaluates them "at" points fx, gy of the carrier.  An adapter
# turns the points involved into that pair.

Adapter = Callable[[MetricSpace, Any, Any, Any, Any], tuple[ComplexScalar, ComplexScalar]]


def displacement_adapter(space: MetricSpace, fx, gy, sx, ty) -> tuple[ComplexScalar, ComplexScalar]:
    """``(d(fx, Sx), d(gy, Ty))``."""
    return space.d(fx, sx), space.d(gy, ty)


def origin_adapter(space: MetricSpace, fx, gy, sx, ty) -> tuple[ComplexScalar, ComplexScalar]:
    """``(d(fx, 0), d(gy, 0))`` where 0 is ``space.origin``."""
    if space.origin is None:
        raise ValueError(f"space {space.name!r} has no origin")
    return space.d(fx, space.origin), space.d(gy, space.origin)


def auto_adapter(space: MetricSpace, fx, gy, sx, ty) -> tuple[ComplexScalar, ComplexScalar]:
    """Distances to the origin when the space has one, displacements otherwise."""
    if space.origin is not None:
        return origin_adapter(space, fx, gy, sx, ty)
    return displacement_adapter(space, fx, gy, sx, ty)


@dataclass
class IterationTrace(Generic[P]):
    """Record of one run of :func:`jungck_iterate`.

    ``step_norms[k] = |d(y_points[k], y_points[k+1])|``.  ``gamma_values[k]``
    is the factor bounding ``step_norms[k]`` by ``step_norms[k-1]``; it is None
    for ``k = 0`` and whenever no gamma was supplied.
    """

    x_points: list = field(default_factory=list)
    y_points: list = field(default_factory=list)
    step_norms: list = field(default_factory=list)
    gamma_values: list = field(default_factory=list)
    status: Status = Status.MAX_ITER
    sweeps: int = 0
    failure_target: Any = None
    message: str = ""

    @property
    def converged(self) -> bool:
        return self.status is Status.CONVERGED

    @property
    def limit(self) -> P:
        """The last ``y`` point."""
        if not self.y_points:
            raise ValueError("trace holds no y points")
        return self.y_points[-1]

    @property
    def iterations(self) -> int:
        return len(self.step_norms)

    def csv_rows(self) -> list[tuple[int, str, str]]:
        rows = []
        for n, (step, gam) in enumerate(zip(self.step_norms, self.gamma_values)):
            rows.append((n, repr(float(step)), "" if gam is None else repr(float(gam))))
        return rows

    def to_csv(self, target=None) -> str:
        """Write ``n, step_norm, gamma_value`` rows; returns the CSV text.

        ``target`` may be a path or an open text file.
        """
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["n", "step_norm", "gamma_value"])
        writer.writerows(self.csv_rows())
        text = buf.getvalue()
        if target is not None:
            if hasattr(target, "write"):
                target.write(text)
            else:
                with open(target, "w", newline="") as fh:
                    fh.write(text)
        return text


def jungck_iterate(
    quad: MapQuadruple,
    space: MetricSpace,
    x0,
    tol: float,
    max_iter: int,
    gamma: Optional[GammaFunction] = None,
    *,
    adapter: Optional[Adapter] = None,
    inner_tol: Optional[float] = None,
    decrease_slack: float = DECREASE_SLACK,
) -> IterationTrace:
    """Run the interleaved S/T iteration from ``x0``.

    One sweep produces two ``y`` points (one through S and ``g^-1``, one
    through T and ``f^-1``); ``max_iter`` bounds the number of sweeps.  The run
    stops as CONVERGED as soon as a step modulus drops below ``tol``.

    With ``gamma`` given, each step is checked against
    ``step[k] <= gamma(y[k-1], y[k]) * step[k-1] + decrease_slack`` and the run
    stops as DECREASE_VIOLATED on failure.  Without it, a growing step only
    raises a :class:`RuntimeWarning`.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if max_iter < 2:
        raise ValueError("max_iter must be at least 2")
    inner_tol = tol / 10.0 if inner_tol is None else inner_tol
    adapter = adapter or auto_adapter

    trace = IterationTrace(x_points=[x0])
    x = x0
    warned = False
    legs = ((quad.S, quad.preimage_g, quad.g, "g"), (quad.T, quad.preimage_f, quad.f, "f"))

    for sweep in range(max_iter):
        trace.sweeps = sweep + 1
        for forward, preimage, back, name in legs:
            y = forward(x)
            try:
                x = preimage(y, x, inner_tol)
            except PreimageError as exc:
                trace.status = Status.PREIMAGE_FAILED
                trace.failure_target = y
                trace.message = f"preimage under {name} failed: {exc}"
                return trace
            residual = space.norm(back(x), y)
            if not residual < inner_tol:
                trace.status = Status.PREIMAGE_FAILED
                trace.failure_target = y
                trace.message = f"preimage under {name} missed target by {residual!r}"
                return trace
            trace.y_points.append(y)
            trace.x_points.append(x)
            if len(trace.y_points) < 2:
                continue

            ys = trace.y_points
            step = space.norm(ys[-2], ys[-1])
            trace.step_norms.append(step)
            gam = None
            if gamma is not None and len(ys) >= 3:
                # the previous step and this one: fx=y[k-1], gy=y[k], Sx=y[k], Ty=y[k+1]
                args = adapter(space, ys[-3], ys[-2], ys[-2], ys[-1])
                gam = gamma(*args)
            trace.gamma_values.append(gam)

            if len(trace.step_norms) >= 2:
                prev = trace.step_norms[-2]
                if gam is not None and step > gam * prev + decrease_slack:
                    trace.status = Status.DECREASE_VIOLATED
                    trace.message = (
                        f"step {len(trace.step_norms) - 1}: {step!r} > {gam!r} * {prev!r} + {decrease_slack!r}"
                    )
                    return trace
                if gamma is None and step > prev + decrease_slack and not warned:
                    warnings.warn(
                        f"step modulus grew from {prev!r} to {step!r}; contraction hypotheses may not hold",
                        RuntimeWarning,
                        stacklevel=2,
                    )
                    warned = True
            if step < tol:
                trace.status = Status.CONVERGED
                return trace

    trace.status = Status.MAX_ITER
    trace.message = f"no step below {tol!r} after {max_iter} sweeps"
    return trace


@dataclass
class ContractionReport:
    """Outcome of a sampled contraction check.

    Each violation is ``(index, x, y, lhs, rhs)`` with ``lhs`` and ``rhs`` the
    two complex sides of the inequality.
    """

    form: Form
    checked: int = 0
    violations: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "form": self.form.value,
            "checked": self.checked,
            "violations": [
                {"pair": idx, "lhs": lhs.to_list(), "rhs": rhs.to_list()}
                for idx, _, _, lhs, rhs in self.violations
            ],
        }


def _contraction_sides(quad: MapQuadruple, space: MetricSpace, triple: CoefficientTriple, x, y, adapter, form):
    fx, gy, sx, ty = quad.f(x), quad.g(y), quad.S(x), quad.T(y)
    l1, l2, l3 = triple(*adapter(space, fx, gy, sx, ty))
    d_fx_gy = space.d(fx, gy)
    lhs = space.d(sx, ty)
    if form is Form.SUM_FORM:
        rhs = (
            d_fx_gy * l1
            + (space.d(fx, sx) + space.d(gy, ty)) * l2
            + (space.d(fx, ty) + space.d(gy, sx)) * l3
        )
    else:
        denom = d_fx_gy + 1.0
        if denom.re == 0.0 and denom.im == 0.0:
            raise DegenerateDenominator(f"1 + d(fx, gy) = 0 at pair ({x!r}, {y!r})")
        d_ty_gy = space.d(ty, gy)
        rhs = (
            d_fx_gy * l1
            + (space.d(sx, fx) * d_ty_gy / denom) * l2
            + (space.d(sx, gy) * d_ty_gy / denom) * l3
        )
    return lhs, rhs


def _verify_contraction(quad, space, triple, pairs, slack, adapter, form) -> ContractionReport:
    adapter = adapter or auto_adapter
    widen = ONE_PLUS_I * slack
    report = ContractionReport(form=form)
    for idx, (x, y) in enumerate(pairs):
        lhs, rhs = _contraction_sides(quad, space, triple, x, y, adapter, form)
        report.checked += 1
        if not partial_leq(lhs, rhs + widen):
            report.violations.append((idx, x, y, lhs, rhs))
    return report


def verify_contraction_sum(
    quad: MapQuadruple,
    space: MetricSpace,
    triple: CoefficientTriple,
    pairs: Sequence[tuple],
    slack: float = 1e-12,
    adapter: Optional[Adapter] = None,
) -> ContractionReport:
    """Check ``d(Sx,Ty) <= l1 d(fx,gy) + l2 (d(fx,Sx)+d(gy,Ty)) + l3 (d(fx,Ty)+d(gy,Sx))``.

    The coefficients are evaluated at ``adapter(space, fx, gy, Sx, Ty)``; the
    comparison is the componentwise order widened by ``slack * (1 + i)``.
    """
    if triple.kind is not Form.SUM_FORM:
        raise ValueError("verify_contraction_sum needs a SUM_FORM triple")
    return _verify_contraction(quad, space, triple, pairs, slack, adapter, Form.SUM_FORM)


def verify_contraction_rational(
    quad: MapQuadruple,
    space: MetricSpace,
    triple: CoefficientTriple,
    pairs: Sequence[tuple],
    slack: float = 1e-12,
    adapter: Optional[Adapter] = None,
) -> ContractionReport:
    """Check the rational contraction

    ``d(Sx,Ty) <= l1 d(fx,gy) + l2 d(Sx,fx) d(Ty,gy) / (1 + d(fx,gy))
    + l3 d(Sx,gy) d(Ty,gy) / (1 + d(fx,gy))``

    with complex products and quotients taken literally.

    Raises
    ------
    DegenerateDenominator
        If ``1 + d(fx, gy)`` vanishes, which a valid metric never allows.
    """
    if triple.kind is not Form.RATIONAL_FORM:
        raise ValueError("verify_contraction_rational needs a RATIONAL_FORM triple")
    return _verify_contraction(quad, space, triple, pairs, slack, adapter, Form.RATIONAL_FORM)


def verify_corollary_constants(
    quad: MapQuadruple,
    space: MetricSpace,
    constants: tuple[float, float, float],
    form: Union[str, Form],
    pairs: Sequence[tuple],
    slack: float = 1e-12,
) -> ContractionReport:
    """Constant-coefficient contraction check.

    The scalar hypothesis (nonnegative constants with ``l1 + 2 l2 + 2 l3 < 1``
    for the sum form, ``l1 + l2 + l3 < 1`` for the rational form) is validated
    before any pair is evaluated.  One- and two-map variants are obtained by
    passing :meth:`MapQuadruple.from_single` or :meth:`MapQuadruple.from_pair`.
    """
    form = Form.parse(form)
    l1, l2, l3 = (float(c) for c in constants)
    if min(l1, l2, l3) < 0.0:
        raise HypothesisViolation(f"coefficients must be nonnegative, got {(l1, l2, l3)}", margin=math.nan)
    total = l1 + 2.0 * l2 + 2.0 * l3 if form is Form.SUM_FORM else l1 + l2 + l3
    margin = 1.0 - total
    if margin <= 0.0:
        raise HypothesisViolation(f"weighted coefficient sum {total!r} is not below 1", margin=margin)
    triple = constant_triple(l1, l2, l3, form)
    if form is Form.SUM_FORM:
        return verify_contraction_sum(quad, space, triple, pairs, slack)
    return verify_contraction_rational(quad, space, triple, pairs, slack)


@dataclass
class RangeReport:
    """Failures are ``(index, inclusion, reason)``; inclusion is ``"T(X)<=f(X)"`` or ``"S(X)<=g(X)"``."""

    checked: int = 0
    failures: list = field(default_factory=list)

    @property
    def witnessed(self) -> bool:
        return self.checked > 0 and not self.failures

    def to_dict(self) -> dict:
        return {
            "witnessed": self.witnessed,
            "checked": self.checked,
            "failures": [[i, which, reason] for i, which, reason in self.failures],
        }


def verify_range_inclusion(quad: MapQuadruple, space: MetricSpace, sample: Sequence, tol: float) -> RangeReport:
    """Try to pull ``T x`` back through ``f`` and ``S x`` through ``g`` for each sample point."""
    report = RangeReport()
    legs = (("T(X)<=f(X)", quad.T, quad.preimage_f, quad.f), ("S(X)<=g(X)", quad.S, quad.preimage_g, quad.g))
    for idx, x in enumerate(sample):
        report.checked += 1
        for label, forward, preimage, back in legs:
            target = forward(x)
            try:
                pre = preimage(target, x, tol)
            except PreimageError as exc:
                report.failures.append((idx, label, str(exc)))
                continue
            residual = space.norm(back(pre), target)
            if not residual < tol:
                report.failures.append((idx, label, f"residual {residual!r}"))
    return report


@dataclass
class CompatibilityReport:
    """Coincidence points found in a sample and whether each pair commutes there."""

    coincidences: dict = field(default_factory=lambda: {"(f,S)": [], "(g,T)": []})
    failures: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures


def verify_weak_compatibility(quad: MapQuadruple, space: MetricSpace, sample: Sequence, tol: float) -> CompatibilityReport:
    """Check that ``(f, S)`` and ``(g, T)`` commute at coincidence points in ``sample``.

    A sample point counts as a coincidence point of ``(f, S)`` when
    ``|d(fx, Sx)| < tol``; it then fails if ``|d(fSx, Sfx)| >= tol``.
    """
    report = CompatibilityReport()
    for idx, x in enumerate(sample):
        for label, a, b in (("(f,S)", quad.f, quad.S), ("(g,T)", quad.g, quad.T)):
            if space.norm(a(x), b(x)) < tol:
                report.coincidences[label].append(idx)
                gap = space.norm(a(b(x)), b(a(x)))
                if not gap < tol:
                    report.failures.append((idx, label, gap))
    return report


@dataclass
class FixedPointCertificate(Generic[P]):
    """Residual evidence that ``point`` is a common fixed point.

    ``residuals`` maps ``"S"``, ``"T"``, ``"f"``, ``"g"`` to ``|d(Mt, t)|``.
    ``coincidence_residuals`` holds ``|d(Sv, fv)|`` and ``|d(Tu, gu)|`` for
    ``u = g^-1(t)``, ``v = f^-1(t)``; ``commutation_residuals`` holds
    ``|d(S f v, f S v)|`` and ``|d(T g u, g T u)|``.
    """

    point: P
    tol: float
    residuals: dict = field(default_factory=dict)
    coincidence_residuals: dict = field(default_factory=dict)
    commutation_residuals: dict = field(default_factory=dict)
    u: Any = None
    v: Any = None
    reason: str = ""

    def all_residuals(self) -> dict:
        return {**self.residuals, **self.coincidence_residuals, **self.commutation_residuals}

    @property
    def valid(self) -> bool:
        values = self.all_residuals().values()
        return not self.reason and len(values) == 8 and all(r < self.tol for r in values)

    @property
    def max_residual(self) -> float:
        values = list(self.all_residuals().values())
        return max(values) if values else math.inf

    def to_dict(self) -> dict:
        return {
            "valid": self.valid,
            "tol": self.tol,
            "reason": self.reason,
            "residuals": self.residuals,
            "coincidence_residuals": self.coincidence_residuals,
            "commutation_residuals": self.commutation_residuals,
        }


def certify_fixed_point(
    quad: MapQuadruple, space: MetricSpace, trace: IterationTrace, tol: float, inner_tol: Optional[float] = None
) -> FixedPointCertificate:
    """Certificate for the last ``y`` point of a converged trace.

    Raises
    ------
    ValueError
        If the trace did not converge.
    """
    if trace.status is not Status.CONVERGED:
        raise ValueError(f"cannot certify a trace with status {trace.status.value}")
    inner_tol = tol / 10.0 if inner_tol is None else inner_tol
    t = trace.limit
    cert = FixedPointCertificate(point=t, tol=tol)
    cert.residuals = {
        "S": space.norm(quad.S(t), t),
        "T": space.norm(quad.T(t), t),
        "f": space.norm(quad.f(t), t),
        "g": space.norm(quad.g(t), t),
    }
    try:
        u = quad.preimage_g(t, t, inner_tol)
        v = quad.preimage_f(t, t, inner_tol)
    except PreimageError as exc:
        cert.reason = f"preimage of the limit failed: {exc}"
        return cert
    cert.u, cert.v = u, v
    fv, gu = quad.f(v), quad.g(u)
    sv, tu = quad.S(v), quad.T(u)
    cert.coincidence_residuals = {"Sv-fv": space.norm(sv, fv), "Tu-gu": space.norm(tu, gu)}
    cert.commutation_residuals = {
        "Sfv-fSv": space.norm(quad.S(fv), quad.f(sv)),
        "Tgu-gTu": space.norm(quad.T(gu), quad.g(tu)),
    }
    return cert


@dataclass
class UniquenessReport:
    limits: list = field(default_factory=list)
    statuses: list = field(default_factory=list)
    pairwise: dict = field(default_factory=dict)
    merge_tol: float = 1e-6

    @property
    def max_gap(self) -> float:
        return max(self.pairwise.values()) if self.pairwise else 0.0

    @property
    def unique_consistent(self) -> bool:
        if len(self.statuses) < 2 or any(s is not Status.CONVERGED for s in self.statuses):
            return False
        return all(gap < self.merge_tol for gap in self.pairwise.values())

    def to_dict(self) -> dict:
        return {
            "unique_consistent": self.unique_consistent,
            "merge_tol": self.merge_tol,
            "statuses": [s.value for s in self.statuses],
            "max_gap": self.max_gap,
        }


def uniqueness_probe(
    quad: MapQuadruple,
    space: MetricSpace,
    starts: Sequence,
    tol: float,
    max_iter: int,
    merge_tol: float = 1e-6,
    gamma: Optional[GammaFunction] = None,
    **iterate_kwargs,
) -> UniquenessReport:
    """Iterate from each start and compare the limits pairwise.

    UNIQUE-CONSISTENT means every run converged and all limits lie within
    ``merge_tol`` of each other.
    """
    if len(starts) < 2:
        raise ValueError("uniqueness_probe needs at least two starting points")
    report = UniquenessReport(merge_tol=merge_tol)
    for x0 in starts:
        trace = jungck_iterate(quad, space, x0, tol, max_iter, gamma, **iterate_kwargs)
        report.statuses.append(trace.status)
        report.limits.append(trace.limit if trace.y_points else None)
    for i, j in itertools.combinations(range(len(starts)), 2):
        if report.statuses[i] is Status.CONVERGED and report.statuses[j] is Status.CONVERGED:
            report.pairwise[(i, j)] = space.norm(report.limits[i], report.limits[j])
    return report
