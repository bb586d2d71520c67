"""Complex-valued metric spaces over arbitrary point types.

A :class:`MetricSpace` wraps a distance ``d(x, y) -> ComplexScalar``.  Nothing
about the carrier is assumed beyond an equality predicate, so the same
machinery serves floats, complex numbers, small tabulated sets and sampled
functions.

The checks here are finite-sample surrogates.  :func:`verify_axioms` looks at
every pair and triple of a sample; :func:`is_c_cauchy_prefix` only sees a
finite window of a sequence and therefore can refute, never establish, the
Cauchy property.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any, Callable, Generic, Optional, Sequence, TypeVar

from .cplx import ONE_PLUS_I, ZERO, ComplexScalar, ScalarLike, as_scalar, partial_leq, strictly_dominates

__all__ = [
    "MetricSpace",
    "AxiomReport",
    "SequenceMonitor",
    "MAX_AXIOM_SAMPLE",
    "verify_axioms",
    "converges_to",
    "is_c_cauchy_prefix",
    "modulus_space",
    "componentwise_space",
]

P = TypeVar("P")

MAX_AXIOM_SAMPLE = 200


def _default_equal(x: Any, y: Any) -> bool:
    return bool(x == y)


@dataclass(frozen=True)
class MetricSpace(Generic[P]):
    """A carrier described only by its complex distance.

    Parameters
    ----------
    distance : callable
        ``distance(x, y)`` returning something :func:`as_scalar` accepts.  Must be
        reentrant if checks are ever run concurrently.
    equal : callable, optional
        Carrier equality.  Floating-point carriers should pass a tolerant
        predicate; the default is ``==``.
    origin : point, optional
        Distinguished point used by argument adapters that measure
        "distance to zero".
    name : str
        Label used in reports.
    """

    distance: Callable[[P, P], ScalarLike]
    equal: Callable[[P, P], bool] = _default_equal
    origin: Optional[P] = None
    name: str = "metric"

    def d(self, x: P, y: P) -> ComplexScalar:
        return as_scalar(self.distance(x, y))

    def norm(self, x: P, y: P) -> float:
        """Modulus ``|d(x, y)|``."""
        return abs(self.d(x, y))


def modulus_space() -> MetricSpace:
    """Real or complex numbers with ``d(x, y) = |x - y|``."""
    return MetricSpace(lambda x, y: abs(x - y), name="modulus")


def componentwise_space() -> MetricSpace:
    """Complex numbers with ``d(z, w) = |Re z - Re w| + i |Im z - Im w|``."""

    def dist(z: complex, w: complex) -> ComplexScalar:
        z, w = complex(z), complex(w)
        return ComplexScalar(abs(z.real - w.real), abs(z.imag - w.imag))

    return MetricSpace(dist, name="componentwise")


@dataclass
class AxiomReport:
    nonnegativity_violations: list = field(default_factory=list)
    identity_violations: list = field(default_factory=list)
    symmetry_violations: list = field(default_factory=list)
    triangle_violations: list = field(default_factory=list)
    sample_size: int = 0

    @property
    def passed(self) -> bool:
        return not (
            self.nonnegativity_violations
            or self.identity_violations
            or self.symmetry_violations
            or self.triangle_violations
        )

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "sample_size": self.sample_size,
            "nonnegativity_violations": len(self.nonnegativity_violations),
            "identity_violations": len(self.identity_violations),
            "symmetry_violations": len(self.symmetry_violations),
            "triangle_violations": len(self.triangle_violations),
        }


def verify_axioms(space: MetricSpace, sample: Sequence, slack: float = 0.0) -> AxiomReport:
    """Exhaustively check the three metric axioms on ``sample``.

    Every ordered pair is checked for nonnegativity, the identity of
    indiscernibles and symmetry; every ordered triple ``(x, y, z)`` for
    ``d(x, y) <= d(x, z) + d(z, y)``.  ``slack`` widens the order comparisons by
    ``slack * (1 + i)`` and is the zero-distance threshold for identity; keep it
    at 0 for exact carriers.

    Violations are recorded as tuples of sample indices followed by the
    offending distance values.
    """
    n = len(sample)
    if n == 0:
        raise ValueError("verify_axioms needs a nonempty sample")
    if n > MAX_AXIOM_SAMPLE:
        raise ValueError(f"sample of {n} points exceeds cap {MAX_AXIOM_SAMPLE}")
    widen = ONE_PLUS_I * slack
    report = AxiomReport(sample_size=n)

    dist = [[space.d(sample[i], sample[j]) for j in range(n)] for i in range(n)]

    for i, j in itertools.product(range(n), repeat=2):
        dij = dist[i][j]
        if not partial_leq(ZERO, dij + widen):
            report.nonnegativity_violations.append((i, j, dij))
        same = space.equal(sample[i], sample[j])
        is_zero = abs(dij) <= slack
        if same != is_zero:
            report.identity_violations.append((i, j, dij))
        if j > i:
            dji = dist[j][i]
            if abs(dij - dji) > slack:
                report.symmetry_violations.append((i, j, dij, dji))

    for i, j, k in itertools.product(range(n), repeat=3):
        bound = dist[i][k] + dist[k][j]
        if not partial_leq(dist[i][j], bound + widen):
            report.triangle_violations.append((i, j, k, dist[i][j], bound))
    return report


@dataclass
class SequenceMonitor(Generic[P]):
    """Stored prefix of a sequence together with its consecutive step moduli.

    ``distances[k]`` is ``|d(points[k], points[k+1])|``.
    """

    points: list = field(default_factory=list)
    distances: list = field(default_factory=list)

    @classmethod
    def from_points(cls, space: MetricSpace, points: Sequence) -> "SequenceMonitor":
        mon = cls()
        for p in points:
            mon.append(space, p)
        return mon

    def append(self, space: MetricSpace, point: P) -> None:
        if self.points:
            self.distances.append(space.norm(self.points[-1], point))
        self.points.append(point)

    def __len__(self) -> int:
        return len(self.points)


def converges_to(monitor: SequenceMonitor, space: MetricSpace, limit: P, tol: float) -> bool:
    """Tail check ``|d(last point, limit)| < tol``."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    if not monitor.points:
        raise ValueError("monitor holds no points")
    return space.norm(monitor.points[-1], limit) < tol


def is_c_cauchy_prefix(
    monitor: SequenceMonitor, space: MetricSpace, threshold: ScalarLike, burn_in: int = 0
) -> bool:
    """Whether the stored window is consistent with a C-Cauchy sequence.

    Returns True iff ``d(x_n, x_m)`` lies strictly below ``threshold`` in both
    components for every pair of stored indices ``m, n > burn_in``.  A True
    result is necessary for the Cauchy property but does not prove it.
    """
    c = as_scalar(threshold)
    if not strictly_dominates(ZERO, c):
        raise ValueError(f"threshold {c} must have strictly positive real and imaginary parts")
    pts = monitor.points
    if burn_in < 0 or burn_in >= len(pts) - 1:
        raise ValueError(f"burn_in={burn_in} leaves no pairs in a window of {len(pts)} points")
    tail = pts[burn_in + 1:]
    for i in range(len(tail)):
        for j in range(i + 1, len(tail)):
            if not strictly_dominates(space.d(tail[i], tail[j]), c):
                return False
    return True
