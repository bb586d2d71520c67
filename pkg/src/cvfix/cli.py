"""Batch driver: ``cvfix --config run.json --out results/``.

The config is a JSON document.  Exit status is 0 when every requested check
passes and the solve (if requested) converges, 2 when a check fails, 3 when
the solve does not converge and 1 for configuration errors.
"""
from __future__ import annotations

import argparse
import datetime as _dt
import json
import logging
import math
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

import numpy as np

from . import __version__
from .coeffs import CoefficientTriple, Form, check_hypothesis_bound, constant_triple, derive_gamma
from .cplx import ComplexScalar
from .metric import modulus_space, verify_axioms
from .quadrature import Quadrature
from .solver import (
    MapQuadruple,
    PreimageError,
    Status,
    certify_fixed_point,
    jungck_iterate,
    uniqueness_probe,
    verify_contraction_rational,
    verify_contraction_sum,
    verify_range_inclusion,
)
from .urysohn import (
    CONDITION_III_SUBSTITUTIONS,
    CONDITION_SUBSTITUTIONS,
    GridFunction,
    LinearSeparableKernel,
    SinSumKernel,
    TabulatedKernel,
    TanhSeparableKernel,
    UrysohnInstance,
    ZeroKernel,
    check_condition_iii,
    check_conditions_12,
    grid_space,
    linear_demo_instance,
    quadruple,
    random_grid_function,
    solve_system,
)

log = logging.getLogger("cvfix")

EXIT_OK, EXIT_CONFIG, EXIT_CHECK, EXIT_NONCONVERGED = 0, 1, 2, 3

CHECKS = ("axioms", "bound", "contraction", "range", "conditions12", "condition3")
DEFAULT_SEED = 42


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    instance: dict
    triple: Optional[dict] = None
    tol: float = 1e-12
    max_iter: int = 100
    grid_points: int = 101
    quadrature: str = "simpson"
    a_metric: float = 1.0
    checks: list = field(default_factory=list)
    solve: bool = True
    starts: list = field(default_factory=list)
    samples: int = 20
    condition_tol: float = 1e-8
    cert_tol: float = 1e-8
    condition3_mode: str = "pointwise"
    outputs: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, raw: dict) -> "RunConfig":
        if not isinstance(raw, dict):
            raise ConfigError("config must be a JSON object")
        known = set(cls.__dataclass_fields__)
        unknown = set(raw) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        if "instance" not in raw:
            raise ConfigError("config needs an 'instance' section")
        cfg = cls(**raw)
        cfg.validate()
        return cfg

    def validate(self) -> None:
        if not isinstance(self.instance, dict) or "type" not in self.instance:
            raise ConfigError("'instance' must be an object with a 'type'")
        if not (isinstance(self.tol, (int, float)) and self.tol > 0):
            raise ConfigError(f"tol must be positive, got {self.tol!r}")
        if not (isinstance(self.max_iter, int) and self.max_iter >= 2):
            raise ConfigError(f"max_iter must be an integer >= 2, got {self.max_iter!r}")
        bad = [c for c in self.checks if c not in CHECKS]
        if bad:
            raise ConfigError(f"unknown checks {bad}; choose from {list(CHECKS)}")
        if not self.solve and not self.checks:
            raise ConfigError("nothing to do: enable 'solve' or list some 'checks'")
        if self.condition3_mode not in ("pointwise", "sup"):
            raise ConfigError("condition3_mode must be 'pointwise' or 'sup'")
        if self.samples < 2:
            raise ConfigError("samples must be at least 2")


def _poly(coeffs):
    coeffs = [float(c) for c in coeffs]
    return lambda t: np.polynomial.polynomial.polyval(t, coeffs)


def build_kernel(spec: dict):
    name = spec.get("name")
    if name == "linear-separable":
        return LinearSeparableKernel(float(spec["c"]))
    if name == "tanh-separable":
        return TanhSeparableKernel(float(spec["c"]))
    if name == "sin-sum":
        return SinSumKernel(float(spec.get("c", 1.0)))
    if name == "zero":
        return ZeroKernel()
    if name == "tabulated":
        return TabulatedKernel(np.asarray(spec["table"], dtype=float))
    raise ConfigError(f"unknown built-in kernel {name!r}")


def build_offset(spec: dict, a: float, b: float, m: int, n: int) -> GridFunction:
    kind = spec.get("kind")
    t = np.linspace(a, b, m)
    if kind == "zero":
        vals = np.zeros((m, n))
    elif kind == "polynomial":
        vals = np.repeat(_poly(spec["coeffs"])(t)[:, None], n, axis=1)
    elif kind == "tabulated":
        vals = np.asarray(spec["values"], dtype=float).reshape(m, -1)
    elif kind == "csv":
        psi = GridFunction.from_csv(spec["path"])
        if psi.grid_points != m or psi.a != a or psi.b != b:
            raise ConfigError(f"offset CSV {spec['path']} does not match the grid")
        return psi
    else:
        raise ConfigError(f"unknown offset kind {kind!r}")
    return GridFunction(a, b, vals)


def _four(value, what):
    if isinstance(value, dict):
        return [value] * 4
    if isinstance(value, list) and len(value) == 4:
        return value
    raise ConfigError(f"'{what}' must be one spec or a list of four")


def build_urysohn(cfg: RunConfig) -> UrysohnInstance:
    spec = cfg.instance
    quad = Quadrature.parse(cfg.quadrature)
    if spec["type"] == "demo-linear":
        return linear_demo_instance(spec.get("c", 0.3), cfg.grid_points, quad, cfg.a_metric)
    a, b = (float(v) for v in spec.get("interval", [0.0, 1.0]))
    n = int(spec.get("n", 1))
    kernels = tuple(build_kernel(k) for k in _four(spec.get("kernels"), "kernels"))
    offsets = tuple(build_offset(o, a, b, cfg.grid_points, n) for o in _four(spec.get("offsets"), "offsets"))
    return UrysohnInstance(kernels, offsets, quad, cfg.a_metric)


def _affine(spec: dict):
    scale, shift = float(spec.get("scale", 1.0)), float(spec.get("shift", 0.0))

    def fwd(x):
        return scale * x + shift

    def pre(target, hint, tol):
        if scale == 0.0:
            if abs(target - shift) < tol:
                return hint
            raise PreimageError(f"{target!r} is not in the range of the constant map {shift!r}", target)
        return (target - shift) / scale

    return fwd, pre


def build_abstract(cfg: RunConfig) -> MapQuadruple:
    maps = cfg.instance.get("maps", {})
    missing = {"f", "g", "S", "T"} - set(maps)
    if missing:
        raise ConfigError(f"abstract instance is missing maps {sorted(missing)}")
    f, pf = _affine(maps["f"])
    g, pg = _affine(maps["g"])
    S, _ = _affine(maps["S"])
    T, _ = _affine(maps["T"])
    return MapQuadruple(f, g, S, T, pf, pg)


def build_triple(spec: Optional[dict]) -> Optional[CoefficientTriple]:
    if spec is None:
        return None
    try:
        consts = [float(c) for c in spec["constants"]]
        form = Form.parse(spec.get("form", "sum"))
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad triple spec {spec!r}: {exc}") from exc
    if len(consts) != 3:
        raise ConfigError("triple needs exactly three constants")
    return constant_triple(*consts, form)


def _clean(obj: Any) -> Any:
    """Make a structure JSON-safe: tuples to lists, non-finite floats to None."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, ComplexScalar):
        return obj.to_list()
    if isinstance(obj, (np.floating, float)):
        return float(obj) if math.isfinite(obj) else None
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


class Run:
    """One execution of a validated config."""

    def __init__(self, cfg: RunConfig, seed: int):
        self.cfg = cfg
        self.rng = np.random.default_rng(seed)
        self.seed = seed
        self.kind = cfg.instance["type"]
        if self.kind in ("demo-linear", "urysohn"):
            self.inst = build_urysohn(cfg)
            self.quad = quadruple(self.inst)
            self.space = grid_space(self.inst)
        elif self.kind == "abstract-real":
            self.inst = None
            self.quad = build_abstract(cfg)
            self.space = modulus_space()
        else:
            raise ConfigError(f"unknown instance type {self.kind!r}")
        self.triple = build_triple(cfg.triple)
        self.starts = [self._start(s) for s in cfg.starts] or [self._zero()]

    def _zero(self):
        return self.inst.zero() if self.inst is not None else 0.0

    def _random_point(self, scale: float = 1.0):
        if self.inst is None:
            return float(scale * self.rng.standard_normal())
        return random_grid_function(self.inst.a, self.inst.b, self.inst.grid_points, self.inst.n, self.rng, scale)

    def _start(self, spec):
        if self.inst is None:
            if isinstance(spec, (int, float)):
                return float(spec)
            if isinstance(spec, dict) and spec.get("kind") == "random":
                return self._random_point(float(spec.get("scale", 1.0)))
            raise ConfigError(f"bad start {spec!r} for an abstract instance")
        kind = spec.get("kind") if isinstance(spec, dict) else None
        if kind == "zero":
            return self.inst.zero()
        if kind == "constant":
            return self.inst.grid_function(lambda t: np.full_like(t, float(spec["value"])))
        if kind == "polynomial":
            return self.inst.grid_function(_poly(spec["coeffs"]))
        if kind == "random":
            return self._random_point(float(spec.get("scale", 1.0)))
        raise ConfigError(f"bad start {spec!r}")

    def _pairs(self):
        return [(self._random_point(), self._random_point()) for _ in range(self.cfg.samples)]

    def run_check(self, name: str) -> dict:
        cfg = self.cfg
        if name == "axioms":
            sample = [self._random_point() for _ in range(min(cfg.samples, 50))]
            return verify_axioms(self.space, sample, slack=1e-12).to_dict()
        if name == "range":
            sample = [self._random_point() for _ in range(cfg.samples)]
            out = verify_range_inclusion(self.quad, self.space, sample, cfg.tol).to_dict()
            out["passed"] = out["witnessed"]
            return out
        if name in ("bound", "contraction", "condition3") and self.triple is None:
            raise ConfigError(f"check {name!r} needs a 'triple'")
        if name == "bound":
            vals = self.rng.exponential(1.0, size=(cfg.samples, 4))
            sample = [(ComplexScalar(0, 0), ComplexScalar(0, 0))] + [
                (ComplexScalar(r[0], r[1]), ComplexScalar(r[2], r[3])) for r in vals
            ]
            return check_hypothesis_bound(self.triple, sample).to_dict()
        if name == "contraction":
            verify = verify_contraction_sum if self.triple.kind is Form.SUM_FORM else verify_contraction_rational
            return verify(self.quad, self.space, self.triple, self._pairs()).to_dict()
        if self.inst is None:
            raise ConfigError(f"check {name!r} needs an integral-equation instance")
        if name == "conditions12":
            x = self.starts[0]
            rep = check_conditions_12(self.inst, x)
            out = rep.to_dict()
            out["passed"] = max(rep.cond1_residual, rep.cond2_residual) < cfg.condition_tol
            out["tol"] = cfg.condition_tol
            return out
        if name == "condition3":
            rep = check_condition_iii(self.inst, self.triple, self._pairs(), mode=cfg.condition3_mode)
            out = rep.to_dict()
            out["passed"] = not rep.cond_iii_violations
            return out
        raise ConfigError(f"unknown check {name!r}")

    def solve(self) -> tuple[dict, Any, Any]:
        """Returns the result section, the trace and the solution (or None)."""
        cfg = self.cfg
        if self.inst is not None:
            res = solve_system(
                self.inst, self.triple, cfg.tol, cfg.max_iter, self.starts, cert_tol=cfg.cert_tol
            )
            trace = res.trace
            doc = {
                "status": res.status.value,
                "iterations": trace.iterations,
                "sweeps": trace.sweeps,
                "final_step_norm": trace.step_norms[-1] if trace.step_norms else None,
                "message": trace.message,
            }
            if res.converged:
                sol = res.solution
                doc.update(
                    solution_summary={
                        "grid_points": sol.grid_points,
                        "n": sol.n,
                        "min": float(sol.values.min()),
                        "max": float(sol.values.max()),
                        "value_at_a": sol.values[0].tolist(),
                        "value_at_b": sol.values[-1].tolist(),
                    },
                    certificate=res.certificate.to_dict(),
                    equation_residuals=res.equation_residuals,
                    lipschitz_estimate=res.lipschitz_estimate,
                    condition_residuals=res.condition_report.to_dict(),
                )
                if res.uniqueness is not None:
                    doc["uniqueness"] = res.uniqueness.to_dict()
            return doc, trace, res.solution
        gamma = derive_gamma(self.triple) if self.triple is not None else None
        trace = jungck_iterate(self.quad, self.space, self.starts[0], cfg.tol, cfg.max_iter, gamma)
        doc = {
            "status": trace.status.value,
            "iterations": trace.iterations,
            "sweeps": trace.sweeps,
            "final_step_norm": trace.step_norms[-1] if trace.step_norms else None,
            "message": trace.message,
        }
        if trace.converged:
            doc["solution"] = trace.limit
            doc["certificate"] = certify_fixed_point(self.quad, self.space, trace, cfg.cert_tol).to_dict()
            if len(self.starts) >= 2:
                doc["uniqueness"] = uniqueness_probe(
                    self.quad, self.space, self.starts, cfg.tol, cfg.max_iter, gamma=gamma
                ).to_dict()
        return doc, trace, doc.get("solution")


def execute(cfg: RunConfig, out_dir: Path, trace_name: str = "trace.csv", seed: int = DEFAULT_SEED) -> tuple[int, dict]:
    """Run checks then the solve; write the result document and trace CSV."""
    run = Run(cfg, seed)
    doc: dict = {
        "generated_at": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
        "tool": f"cvfix {__version__}",
        "seed": seed,
        "config": _clean(cfg.__dict__),
        "substitutions": {
            "conditions12": list(CONDITION_SUBSTITUTIONS),
            "condition3": list(CONDITION_III_SUBSTITUTIONS),
        },
        "checks": {},
    }
    status = EXIT_OK
    for name in cfg.checks:
        result = run.run_check(name)
        doc["checks"][name] = result
        log.info("check %s: %s", name, "pass" if result["passed"] else "FAIL")
        if not result["passed"]:
            status = EXIT_CHECK

    out_dir.mkdir(parents=True, exist_ok=True)
    outputs = cfg.outputs or {}
    if cfg.solve:
        solve_doc, trace, solution = run.solve()
        doc["solve"] = solve_doc
        log.info("solve: %s after %d steps", solve_doc["status"], solve_doc["iterations"])
        trace.to_csv(out_dir / trace_name)
        if trace.status is not Status.CONVERGED and status == EXIT_OK:
            status = EXIT_NONCONVERGED
        if isinstance(solution, GridFunction) and outputs.get("solution_csv"):
            solution.to_csv(out_dir / outputs["solution_csv"])

    doc["exit_status"] = status
    doc = _clean(doc)
    with open(out_dir / outputs.get("result", "result.json"), "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return status, doc


def load_config(path: Path) -> RunConfig:
    try:
        raw = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        return RunConfig.from_dict(raw)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def main(argv: Optional[list] = None) -> int:
    parser = argparse.ArgumentParser(prog="cvfix", description=__doc__.splitlines()[0])
    parser.add_argument("--config", required=True, type=Path, help="JSON run configuration")
    parser.add_argument("--out", type=Path, default=Path("."), help="output directory (default: .)")
    parser.add_argument("--trace-csv", default="trace.csv", help="trace file name inside --out")
    parser.add_argument("--quiet", action="store_true", help="only report errors")
    args = parser.parse_args(argv)

    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO, format="%(name)s: %(message)s")
    try:
        seed = int(os.environ.get("CVFIX_SEED", DEFAULT_SEED))
    except ValueError:
        log.error("CVFIX_SEED must be an integer")
        return EXIT_CONFIG
    try:
        cfg = load_config(args.config)
        status, _ = execute(cfg, args.out, args.trace_csv, seed)
    except (ConfigError, KeyError, TypeError, ValueError) as exc:
        log.error("config error: %s", exc)
        return EXIT_CONFIG
    if not args.quiet:
        print(f"exit status {status}; results in {args.out}")
    return status


if __name__ == "__main__":
    sys.exit(main())
