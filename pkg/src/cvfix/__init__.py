"""Common fixed points of four self-maps on complex-valued metric spaces."""

from .cplx import ComplexScalar, OrderCase, classify, partial_leq, strict_less, strictly_dominates
from .coeffs import CoefficientTriple, Form, GammaFunction, constant_triple, derive_gamma
from .metric import MetricSpace, SequenceMonitor, verify_axioms
from .solver import MapQuadruple, Status, certify_fixed_point, jungck_iterate, uniqueness_probe
from .urysohn import GridFunction, UrysohnInstance, linear_demo_instance, solve_system

__version__ = "0.1.0"

__all__ = [
    "ComplexScalar",
    "OrderCase",
    "classify",
    "partial_leq",
    "strict_less",
    "strictly_dominates",
    "CoefficientTriple",
    "Form",
    "GammaFunction",
    "constant_triple",
    "derive_gamma",
    "MetricSpace",
    "SequenceMonitor",
    "verify_axioms",
    "MapQuadruple",
    "Status",
    "certify_fixed_point",
    "jungck_iterate",
    "uniqueness_probe",
    "GridFunction",
    "UrysohnInstance",
    "linear_demo_instance",
    "solve_system",
]
