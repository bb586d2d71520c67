"""Systems of Urysohn integral equations as a common fixed point problem.

The system is ``x(t) = psi_i(t) + integral_a^b K_i(t, s, x(s)) ds`` for
``i = 1..4``.  Writing ``delta_i x`` for the integral term, the four maps

    S x = delta_1 x + psi_1          T x = delta_2 x + psi_2
    f x = 2x - delta_3 x - psi_3     g x = 2x - delta_4 x - psi_4

have a common fixed point exactly where ``x`` solves all four equations, and
the space of continuous functions carries the complex metric

    d(x, y) = max_t ||x(t) - y(t)||_inf * sqrt(1 + p^2) * exp(i * arctan p)

with a real parameter ``p`` (``a_metric`` here, kept apart from the interval
endpoint ``a``).  Functions are sampled on a uniform grid and every integral
uses the same grid as its quadrature nodes.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .coeffs import CoefficientTriple, derive_gamma
from .cplx import ONE_PLUS_I, ComplexScalar, partial_leq
from .metric import MetricSpace
from .quadrature import Quadrature, quadrature_weights
from .solver import (
    FixedPointCertificate,
    IterationTrace,
    MapQuadruple,
    PreimageError,
    Status,
    UniquenessReport,
    certify_fixed_point,
    jungck_iterate,
    origin_adapter,
    uniqueness_probe,
)

__all__ = [
    "GridFunction",
    "UrysohnInstance",
    "KernelEvaluationError",
    "ConditionReport",
    "PreimageResult",
    "SolveResult",
    "LinearSeparableKernel",
    "TanhSeparableKernel",
    "SinSumKernel",
    "TabulatedKernel",
    "ZeroKernel",
    "EQUALITY_EPS",
    "complex_factor",
    "metric_eq18",
    "grid_space",
    "delta",
    "apply_S",
    "apply_T",
    "apply_f",
    "apply_g",
    "solve_preimage",
    "preimage_f",
    "preimage_g",
    "quadruple",
    "check_conditions_12",
    "check_condition_iii",
    "estimate_lipschitz",
    "solve_system",
    "linear_demo_instance",
    "random_grid_function",
]

EQUALITY_EPS = 1e-12


class KernelEvaluationError(ArithmeticError):
    pass


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Samples of ``x: [a, b] -> R^n`` on ``grid_points`` uniform nodes.

    ``values`` has shape ``(grid_points, n)``; a 1-D array is read as ``n = 1``.
    The array is copied and made read-only.
    """

    a: float
    b: float
    values: np.ndarray

    def __post_init__(self) -> None:
        vals = np.array(self.values, dtype=float)
        if vals.ndim == 1:
            vals = vals[:, None]
        if vals.ndim != 2:
            raise ValueError(f"values must have shape (grid_points, n), got {vals.shape}")
        if not self.a <= self.b:
            raise ValueError(f"interval [{self.a}, {self.b}] is empty")
        if vals.shape[0] < 2:
            raise ValueError("at least two grid points are required")
        if not np.all(np.isfinite(vals)):
            raise ValueError("grid function values must be finite")
        vals.setflags(write=False)
        object.__setattr__(self, "a", float(self.a))
        object.__setattr__(self, "b", float(self.b))
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_callable(cls, fn: Callable[[np.ndarray], np.ndarray], a: float, b: float, grid_points: int) -> "GridFunction":
        """Sample ``fn(t)``, which returns shape ``(m,)`` or ``(m, n)``."""
        t = np.linspace(a, b, grid_points)
        return cls(a, b, np.asarray(fn(t), dtype=float))

    @classmethod
    def zeros(cls, a: float, b: float, grid_points: int, n: int = 1) -> "GridFunction":
        return cls(a, b, np.zeros((grid_points, n)))

    @property
    def grid_points(self) -> int:
        return self.values.shape[0]

    @property
    def n(self) -> int:
        return self.values.shape[1]

    @property
    def t(self) -> np.ndarray:
        return np.linspace(self.a, self.b, self.grid_points)

    def conforms(self, other: "GridFunction") -> bool:
        return (
            self.a == other.a
            and self.b == other.b
            and self.values.shape == other.values.shape
        )

    def _check(self, other: "GridFunction") -> None:
        if not self.conforms(other):
            raise ValueError(
                f"grid mismatch: [{self.a}, {self.b}] x {self.values.shape} vs "
                f"[{other.a}, {other.b}] x {other.values.shape}"
            )

    def with_values(self, values: np.ndarray) -> "GridFunction":
        return GridFunction(self.a, self.b, values)

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values)))

    def sup_distance(self, other: "GridFunction") -> float:
        self._check(other)
        return float(np.max(np.abs(self.values - other.values)))

    def __add__(self, other: "GridFunction") -> "GridFunction":
        self._check(other)
        return self.with_values(self.values + other.values)

    def __sub__(self, other: "GridFunction") -> "GridFunction":
        self._check(other)
        return self.with_values(self.values - other.values)

    def __mul__(self, scalar: float) -> "GridFunction":
        return self.with_values(self.values * float(scalar))

    __rmul__ = __mul__

    def __truediv__(self, scalar: float) -> "GridFunction":
        return self.with_values(self.values / float(scalar))

    def __neg__(self) -> "GridFunction":
        return self.with_values(-self.values)

    def __repr__(self) -> str:
        return f"GridFunction([{self.a}, {self.b}], grid_points={self.grid_points}, n={self.n})"

    def to_csv(self, path) -> None:
        """Column 0 is ``t``, columns 1..n the components."""
        data = np.column_stack([self.t, self.values])
        header = ",".join(["t"] + [f"x{k + 1}" for k in range(self.n)])
        np.savetxt(path, data, delimiter=",", header=header, comments="", fmt="%.17g")

    @classmethod
    def from_csv(cls, path) -> "GridFunction":
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        t = data[:, 0]
        h = np.diff(t)
        if len(t) > 2 and not np.allclose(h, h[0], rtol=1e-9, atol=1e-12):
            raise ValueError("CSV grid is not uniform")
        return cls(t[0], t[-1], data[:, 1:])


# Kernels are called once per delta evaluation with broadcastable arrays
# t: (m, 1, 1), s: (1, m, 1), x: (1, m, n) and must return shape (m, m, n).

@dataclass(frozen=True)
class ZeroKernel:
    def __call__(self, t, s, x):
        return np.zeros(np.broadcast_shapes(np.shape(t), np.shape(s), np.shape(x)))


@dataclass(frozen=True)
class LinearSeparableKernel:
    """``K(t, s, x) = c * t * s * x``."""

    c: float

    def __call__(self, t, s, x):
        return self.c * t * s * x


@dataclass(frozen=True)
class TanhSeparableKernel:
    """``K(t, s, x) = c * t * s * tanh(x)``; nonlinear, Lipschitz constant ``c*|t*s|``."""

    c: float

    def __call__(self, t, s, x):
        return self.c * t * s * np.tanh(x)


@dataclass(frozen=True)
class SinSumKernel:
    """``K(t, s, x) = c * sin(t + s) * x``."""

    c: float = 1.0

    def __call__(self, t, s, x):
        return self.c * np.sin(t + s) * x


@dataclass(frozen=True, eq=False)
class TabulatedKernel:
    """``K(t_j, s_l, x) = table[j, l] * x`` on a fixed grid.

    Only evaluable on the grid it was tabulated for.
    """

    table: np.ndarray

    def __post_init__(self) -> None:
        table = np.array(self.table, dtype=float)
        if table.ndim != 2 or table.shape[0] != table.shape[1]:
            raise ValueError(f"kernel table must be square, got shape {table.shape}")
        table.setflags(write=False)
        object.__setattr__(self, "table", table)

    def __call__(self, t, s, x):
        m = self.table.shape[0]
        if np.shape(t)[0] != m or np.shape(s)[1] != m:
            raise ValueError(f"tabulated kernel is {m}x{m}; grid has {np.shape(t)[0]} points")
        return self.table[:, :, None] * x


@dataclass(frozen=True)
class UrysohnInstance:
    """Kernels ``K_1..K_4`` and offsets ``psi_1..psi_4`` on a common grid.

    ``a_metric`` is the parameter of the complex metric; it must be
    nonnegative for that metric to take values in the nonnegative cone.
    """

    kernels: tuple
    offsets: tuple
    quadrature: Quadrature = Quadrature.SIMPSON
    a_metric: float = 1.0
    _weights: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        kernels, offsets = tuple(self.kernels), tuple(self.offsets)
        if len(kernels) != 4 or len(offsets) != 4:
            raise ValueError("exactly four kernels and four offsets are required")
        for k, psi in enumerate(offsets[1:], start=2):
            if not offsets[0].conforms(psi):
                raise ValueError(f"offset psi_{k} is not on the grid of psi_1")
        if self.a_metric < 0 or not math.isfinite(self.a_metric):
            raise ValueError(f"a_metric must be finite and nonnegative, got {self.a_metric}")
        quad = Quadrature.parse(self.quadrature)
        psi = offsets[0]
        weights = quadrature_weights(psi.grid_points, psi.a, psi.b, quad)
        weights.setflags(write=False)
        object.__setattr__(self, "kernels", kernels)
        object.__setattr__(self, "offsets", offsets)
        object.__setattr__(self, "quadrature", quad)
        object.__setattr__(self, "a_metric", float(self.a_metric))
        object.__setattr__(self, "_weights", weights)

    @property
    def a(self) -> float:
        return self.offsets[0].a

    @property
    def b(self) -> float:
        return self.offsets[0].b

    @property
    def grid_points(self) -> int:
        return self.offsets[0].grid_points

    @property
    def n(self) -> int:
        return self.offsets[0].n

    @property
    def t(self) -> np.ndarray:
        return self.offsets[0].t

    @property
    def weights(self) -> np.ndarray:
        return self._weights

    def zero(self) -> GridFunction:
        return GridFunction.zeros(self.a, self.b, self.grid_points, self.n)

    def grid_function(self, fn: Callable[[np.ndarray], np.ndarray]) -> GridFunction:
        """Sample ``fn(t)`` (returning shape ``(m,)`` or ``(m, n)``) on this grid."""
        vals = np.asarray(fn(self.t), dtype=float)
        if vals.ndim == 1:
            vals = np.repeat(vals[:, None], self.n, axis=1)
        return GridFunction(self.a, self.b, vals)

    def check(self, x: GridFunction) -> None:
        if not self.offsets[0].conforms(x):
            raise ValueError(f"{x!r} does not conform to the instance grid {self.offsets[0]!r}")


def complex_factor(a_metric: float) -> ComplexScalar:
    """``sqrt(1 + p^2) * exp(i arctan p)``, which equals ``1 + i p``."""
    angle = math.atan(a_metric)
    scale = math.sqrt(1.0 + a_metric * a_metric)
    return ComplexScalar(scale * math.cos(angle), scale * math.sin(angle))


def metric_eq18(x: GridFunction, y: GridFunction, a_metric: float) -> ComplexScalar:
    """Complex sup-norm distance ``max_j ||x(t_j) - y(t_j)||_inf * (1 + i p)``."""
    return complex_factor(a_metric) * x.sup_distance(y)


def grid_space(inst: UrysohnInstance, equality_eps: float = EQUALITY_EPS) -> MetricSpace:
    """Metric space of grid functions for ``inst``; origin is the zero function."""
    factor = complex_factor(inst.a_metric)

    def dist(x: GridFunction, y: GridFunction) -> ComplexScalar:
        return factor * x.sup_distance(y)

    def equal(x: GridFunction, y: GridFunction) -> bool:
        return x.sup_distance(y) <= equality_eps

    return MetricSpace(dist, equal=equal, origin=inst.zero(), name=f"sup-norm x (1 + {inst.a_metric!r}i)")


def delta(i: int, inst: UrysohnInstance, x: GridFunction) -> GridFunction:
    """``(delta_i x)(t_j) = sum_l w_l K_i(t_j, s_l, x(s_l))``."""
    if i not in (1, 2, 3, 4):
        raise ValueError(f"kernel index must be 1..4, got {i}")
    inst.check(x)
    t = inst.t
    kernel = inst.kernels[i - 1]
    m, n = x.values.shape
    vals = np.asarray(kernel(t[:, None, None], t[None, :, None], x.values[None, :, :]), dtype=float)
    vals = np.broadcast_to(vals, (m, m, n))
    bad = ~np.isfinite(vals)
    if bad.any():
        j, l, _ = np.argwhere(bad)[0]
        raise KernelEvaluationError(f"K_{i} is not finite at t={float(t[j])!r}, s={float(t[l])!r}")
    return x.with_values(np.einsum("l,jlk->jk", inst.weights, vals))


def apply_S(inst: UrysohnInstance, x: GridFunction) -> GridFunction:
    return delta(1, inst, x) + inst.offsets[0]


def apply_T(inst: UrysohnInstance, x: GridFunction) -> GridFunction:
    return delta(2, inst, x) + inst.offsets[1]


def apply_f(inst: UrysohnInstance, x: GridFunction) -> GridFunction:
    return x * 2.0 - delta(3, inst, x) - inst.offsets[2]


def apply_g(inst: UrysohnInstance, x: GridFunction) -> GridFunction:
    return x * 2.0 - delta(4, inst, x) - inst.offsets[3]


@dataclass
class PreimageResult:
    x: GridFunction
    sweeps: int
    residual: float
    converged: bool


def solve_preimage(
    inst: UrysohnInstance,
    which: str,
    w: GridFunction,
    hint: GridFunction,
    tol: float,
    max_inner: int = 200,
) -> PreimageResult:
    """Solve ``f x = w`` (``which="f"``) or ``g x = w`` by Picard iteration.

    Iterates ``x <- (w + delta_k x + psi_k) / 2`` from ``hint`` (k = 3 for f,
    4 for g) until the sup-norm residual of the forward map drops below
    ``tol``.  The inner map contracts whenever ``delta_k`` has Lipschitz
    constant below 2.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    k = {"f": 3, "g": 4}[which]
    forward = apply_f if which == "f" else apply_g
    psi = inst.offsets[k - 1]
    inst.check(w)
    inst.check(hint)
    x = hint
    residual = forward(inst, x).sup_distance(w)
    sweeps = 0
    while residual >= tol and sweeps < max_inner:
        x = (w + delta(k, inst, x) + psi) / 2.0
        sweeps += 1
        residual = forward(inst, x).sup_distance(w)
    return PreimageResult(x, sweeps, residual, residual < tol)


def _preimage(inst, which, w, hint, tol, max_inner):
    res = solve_preimage(inst, which, w, hint, tol, max_inner)
    if not res.converged:
        raise PreimageError(
            f"{which}-preimage residual {res.residual!r} after {res.sweeps} sweeps (tol {tol!r})",
            target=w,
            residual=res.residual,
        )
    return res.x


def preimage_f(inst: UrysohnInstance, w: GridFunction, hint: GridFunction, tol: float, max_inner: int = 200) -> GridFunction:
    """``x`` with ``||f x - w||_sup < tol``; raises :class:`PreimageError` otherwise."""
    return _preimage(inst, "f", w, hint, tol, max_inner)


def preimage_g(inst: UrysohnInstance, w: GridFunction, hint: GridFunction, tol: float, max_inner: int = 200) -> GridFunction:
    return _preimage(inst, "g", w, hint, tol, max_inner)


def quadruple(inst: UrysohnInstance, max_inner: int = 200) -> MapQuadruple:
    """The maps S, T, f, g of ``inst`` with preimage oracles.

    The solver measures preimage tolerances with the complex metric, whose
    modulus is ``sqrt(1 + p^2)`` times the sup norm; the oracles rescale.
    """
    scale = abs(complex_factor(inst.a_metric))
    return MapQuadruple(
        f=lambda x: apply_f(inst, x),
        g=lambda x: apply_g(inst, x),
        S=lambda x: apply_S(inst, x),
        T=lambda x: apply_T(inst, x),
        preimage_f=lambda w, hint, tol: preimage_f(inst, w, hint, tol / scale, max_inner),
        preimage_g=lambda w, hint, tol: preimage_g(inst, w, hint, tol / scale, max_inner),
    )


# Readings applied to tokens of the printed existence conditions that do not
# type-check as functions of t.
CONDITION_SUBSTITUTIONS = (
    "condition (1), first equation: 'delta_1(t)' read as delta_1 x(t)",
    "condition (2), first equation: 'delta x(t)' read as delta_3 x(t)",
    "condition (2), second equation: 'delta_2(t)' read as psi_2(t)",
)

CONDITION_III_SUBSTITUTIONS = (
    "A_xy: 'delta_2 x(t) + delta_2(t)' read as delta_2 y(t) + psi_2(t), i.e. ||Sx(t) - Ty(t)||",
    "C_xy: first term uses psi_1 so that C = ||fx - Sx|| + ||gy - Ty|| (strict-literal mode keeps psi_2)",
    "D_xy = ||fx - Ty|| + ||gy - Sx|| as printed",
    "E_x = d(fx, 0), F_y = d(gy, 0) with the complex metric",
)


@dataclass
class ConditionReport:
    """Residuals of the existence conditions and sampled violations of (iii).

    ``cond1_residual`` and ``cond2_residual`` are the larger of the sup-norm
    residuals of the two equations in each condition; ``parts`` keeps all four.
    Each entry of ``cond_iii_violations`` is ``(pair_index, t, lhs, rhs)``.
    """

    cond1_residual: float = math.nan
    cond2_residual: float = math.nan
    parts: dict = field(default_factory=dict)
    cond_iii_violations: list = field(default_factory=list)
    cond_iii_checked: int = 0
    substitutions: list = field(default_factory=list)

    def to_dict(self) -> dict:
        out = {"substitutions": list(self.substitutions)}
        if self.parts:
            out.update(cond1_residual=self.cond1_residual, cond2_residual=self.cond2_residual, parts=dict(self.parts))
        if self.cond_iii_checked:
            out.update(
                cond_iii_checked=self.cond_iii_checked,
                cond_iii_violations=[
                    {"pair": idx, "t": t, "lhs": lhs.to_list(), "rhs": rhs.to_list()}
                    for idx, t, lhs, rhs in self.cond_iii_violations
                ],
            )
        return out


def check_conditions_12(inst: UrysohnInstance, x: GridFunction) -> ConditionReport:
    """Sup-norm residuals of existence conditions (1) and (2) at ``x``.

    With ``D_i`` for ``delta_i`` applied to a function, the equations checked are

    * 1a: ``psi1 + psi4 + D1 x - D4(D1 x + psi1 + psi4) = 0``
    * 1b: ``psi2 + psi3 + D2 x - D3(D2 x + psi2 + psi3) = 0``
    * 2a: ``psi1 + 3 psi3 + D1(D1 x + psi1) + 2 D3 x + D3(2x - D3 x - psi3) = 4x``
    * 2b: ``psi2 + 3 psi4 + D2(D2 x + psi2) + 2 D4 x + D4(2x - D4 x - psi4) = 4x``
    """
    inst.check(x)
    p1, p2, p3, p4 = inst.offsets

    def D(i, h):
        return delta(i, inst, h)

    d1x, d2x, d3x, d4x = (D(i, x) for i in (1, 2, 3, 4))
    eq1a = p1 + p4 + d1x - D(4, d1x + p1 + p4)
    eq1b = p2 + p3 + d2x - D(3, d2x + p2 + p3)
    eq2a = p1 + p3 * 3.0 + D(1, d1x + p1) + d3x * 2.0 + D(3, x * 2.0 - d3x - p3) - x * 4.0
    eq2b = p2 + p4 * 3.0 + D(2, d2x + p2) + d4x * 2.0 + D(4, x * 2.0 - d4x - p4) - x * 4.0
    parts = {name: eq.sup_norm() for name, eq in (("1a", eq1a), ("1b", eq1b), ("2a", eq2a), ("2b", eq2b))}
    return ConditionReport(
        cond1_residual=max(parts["1a"], parts["1b"]),
        cond2_residual=max(parts["2a"], parts["2b"]),
        parts=parts,
        substitutions=list(CONDITION_SUBSTITUTIONS),
    )


def _rowwise_inf(h: GridFunction) -> np.ndarray:
    return np.max(np.abs(h.values), axis=1)


def check_condition_iii(
    inst: UrysohnInstance,
    triple: CoefficientTriple,
    pairs: Sequence[tuple[GridFunction, GridFunction]],
    mode: str = "pointwise",
    literal: bool = False,
    slack: float = 1e-12,
) -> ConditionReport:
    """Sampled check of the pointwise contraction condition (iii).

    For each pair ``(x, y)`` and grid node ``t`` the inequality

        A(t) phi <= l1(E, F) B(t) phi + l2(E, F) C(t) phi + l3(E, F) D(t) phi

    is tested in the componentwise order, with ``phi = 1 + i p``,
    ``A = ||Sx - Ty||``, ``B = ||fx - gy||``, ``C = ||fx - Sx|| + ||gy - Ty||``,
    ``D = ||fx - Ty|| + ||gy - Sx||`` (all pointwise inf-norms in R^n) and
    ``E = d(fx, 0)``, ``F = d(gy, 0)``.

    ``mode="sup"`` replaces each of A..D by its maximum over t, which is the
    form that transfers to the metric contraction.  ``literal=True`` uses
    ``psi_2`` in the first term of C as printed.
    """
    if mode not in ("pointwise", "sup"):
        raise ValueError(f"mode must be 'pointwise' or 'sup', got {mode!r}")
    phi = complex_factor(inst.a_metric)
    widen = ONE_PLUS_I * slack
    report = ConditionReport(substitutions=list(CONDITION_III_SUBSTITUTIONS) + [f"mode: {mode}", f"literal: {literal}"])
    t = inst.t
    for idx, (x, y) in enumerate(pairs):
        inst.check(x)
        inst.check(y)
        sx, ty = apply_S(inst, x), apply_T(inst, y)
        fx, gy = apply_f(inst, x), apply_g(inst, y)
        c_first = fx - (delta(1, inst, x) + inst.offsets[1]) if literal else fx - sx
        A = _rowwise_inf(sx - ty)
        B = _rowwise_inf(fx - gy)
        C = _rowwise_inf(c_first) + _rowwise_inf(gy - ty)
        D = _rowwise_inf(fx - ty) + _rowwise_inf(gy - sx)
        E = phi * fx.sup_norm()
        F = phi * gy.sup_norm()
        l1, l2, l3 = triple(E, F)
        if mode == "sup":
            A, B, C, D = (np.array([arr.max()]) for arr in (A, B, C, D))
            nodes = [math.nan]
        else:
            nodes = t
        for j in range(len(A)):
            report.cond_iii_checked += 1
            lhs = phi * float(A[j])
            rhs = phi * float(B[j]) * l1 + phi * float(C[j]) * l2 + phi * float(D[j]) * l3
            if not partial_leq(lhs, rhs + widen):
                report.cond_iii_violations.append((idx, float(nodes[j]), lhs, rhs))
    return report


def estimate_lipschitz(
    inst: UrysohnInstance, x: GridFunction, samples: int = 8, scale: float = 1e-3, seed: int = 0
) -> float:
    """Largest observed ``||delta_i(x + h) - delta_i(x)|| / ||h||`` over random ``h``."""
    rng = np.random.default_rng(seed)
    best = 0.0
    for _ in range(samples):
        h = x.with_values(scale * rng.standard_normal(x.values.shape))
        hn = h.sup_norm()
        for i in (1, 2, 3, 4):
            ratio = (delta(i, inst, x + h) - delta(i, inst, x)).sup_norm() / hn
            best = max(best, ratio)
    return best


@dataclass
class SolveResult:
    status: Status
    solution: Optional[GridFunction]
    trace: IterationTrace
    certificate: Optional[FixedPointCertificate]
    condition_report: Optional[ConditionReport]
    equation_residuals: list
    lipschitz_estimate: float = math.nan
    uniqueness: Optional[UniquenessReport] = None

    @property
    def converged(self) -> bool:
        return self.status is Status.CONVERGED


def solve_system(
    inst: UrysohnInstance,
    triple: Optional[CoefficientTriple] = None,
    tol: float = 1e-12,
    max_iter: int = 100,
    starts: Optional[Sequence[GridFunction]] = None,
    *,
    cert_tol: float = 1e-8,
    merge_tol: float = 1e-6,
    inner_tol: Optional[float] = None,
    max_inner: int = 200,
) -> SolveResult:
    """Find the common solution of the four equations by Jungck iteration.

    Runs from ``starts[0]`` (the zero function by default), certifies the limit
    and reports ``||t - psi_i - delta_i t||_sup`` for each equation.  With two or
    more starts, a uniqueness probe compares the limits.  When ``triple`` is
    given, its gamma is checked against every step with coefficient arguments
    ``(d(fx, 0), d(gy, 0))``.
    """
    quad = quadruple(inst, max_inner)
    space = grid_space(inst)
    gamma = derive_gamma(triple) if triple is not None else None
    starts = list(starts) if starts else [inst.zero()]
    kwargs = dict(adapter=origin_adapter, inner_tol=inner_tol)

    trace = jungck_iterate(quad, space, starts[0], tol, max_iter, gamma, **kwargs)
    result = SolveResult(
        status=trace.status,
        solution=None,
        trace=trace,
        certificate=None,
        condition_report=None,
        equation_residuals=[],
    )
    if not trace.converged:
        return result

    t_sol = trace.limit
    result.solution = t_sol
    result.certificate = certify_fixed_point(quad, space, trace, cert_tol)
    result.equation_residuals = [
        (t_sol - inst.offsets[i - 1] - delta(i, inst, t_sol)).sup_norm() for i in (1, 2, 3, 4)
    ]
    result.condition_report = check_conditions_12(inst, t_sol)
    result.lipschitz_estimate = estimate_lipschitz(inst, t_sol)
    if len(starts) >= 2:
        result.uniqueness = uniqueness_probe(quad, space, starts, tol, max_iter, merge_tol, gamma, **kwargs)
    return result


def linear_demo_instance(
    c: Union[float, Sequence[float]] = 0.3,
    grid_points: int = 101,
    quadrature: Union[str, Quadrature] = Quadrature.SIMPSON,
    a_metric: float = 1.0,
) -> UrysohnInstance:
    """``K_i = c_i t s x`` and ``psi_i = (1 - c_i/3) t`` on ``[0, 1]``, so ``x(t) = t`` solves all four."""
    cs = [float(c)] * 4 if np.isscalar(c) else [float(v) for v in c]
    if len(cs) != 4:
        raise ValueError("give one coefficient or four")
    t = np.linspace(0.0, 1.0, grid_points)
    offsets = tuple(GridFunction(0.0, 1.0, (1.0 - ci / 3.0) * t) for ci in cs)
    kernels = tuple(LinearSeparableKernel(ci) for ci in cs)
    return UrysohnInstance(kernels, offsets, Quadrature.parse(quadrature), a_metric)


def random_grid_function(
    a: float, b: float, grid_points: int, n: int = 1, rng: Optional[np.random.Generator] = None, scale: float = 1.0, modes: int = 4
) -> GridFunction:
    """Smooth random function: a random cosine series with ``modes`` terms per component."""
    rng = rng if rng is not None else np.random.default_rng()
    t = np.linspace(a, b, grid_points)
    span = (b - a) or 1.0
    basis = np.cos(np.pi * np.outer((t - a) / span, np.arange(modes)))
    coeffs = scale * rng.standard_normal((modes, n)) / (1.0 + np.arange(modes))[:, None]
    return GridFunction(a, b, basis @ coeffs)
