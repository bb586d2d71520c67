import csv
import io
import warnings

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from carriers import all_pairs, common_fixed_points, random_carrier, tabulated_quadruple, ultrametric_space
from cvfix.coeffs import constant_triple, derive_gamma
from cvfix.metric import modulus_space
from cvfix.solver import (
    HypothesisViolation,
    MapQuadruple,
    PreimageError,
    Status,
    certify_fixed_point,
    jungck_iterate,
    uniqueness_probe,
    verify_contraction_rational,
    verify_contraction_sum,
    verify_corollary_constants,
    verify_range_inclusion,
    verify_weak_compatibility,
)
from cvfix.urysohn import grid_space, quadruple, random_grid_function

R = modulus_space()
IDENTITY = MapQuadruple.from_single(lambda x: x)
HALF = MapQuadruple.from_single(lambda x: x / 2)


def _const_quad(p):
    return MapQuadruple.from_pair(lambda x: p, lambda x: p)


def test_identity_converges_in_one_step():
    trace = jungck_iterate(IDENTITY, R, 3.7, 1e-12, 10)
    assert trace.status is Status.CONVERGED
    assert trace.iterations == 1 and trace.sweeps == 1
    assert trace.step_norms == [0.0]
    assert trace.limit == 3.7


def test_halving_matches_closed_form():
    trace = jungck_iterate(HALF, R, 1.0, 1e-12, 100)
    assert trace.converged
    # y_n = 2^-n exactly in binary floating point, so steps are 2^-(k+2)
    assert trace.y_points == [2.0 ** -(n + 1) for n in range(len(trace.y_points))]
    assert trace.step_norms == [2.0 ** -(k + 2) for k in range(len(trace.step_norms))]
    assert trace.step_norms[-1] < 1e-12 <= trace.step_norms[-2]
    assert abs(trace.limit) < 1e-11


def test_halving_with_gamma_records_factors():
    gamma = derive_gamma(constant_triple(0.5, 0, 0, kind="rational"))
    trace = jungck_iterate(HALF, R, 1.0, 1e-12, 100, gamma)
    assert trace.converged
    assert trace.gamma_values[0] is None
    assert all(g == 0.5 for g in trace.gamma_values[1:])
    for k in range(1, len(trace.step_norms)):
        assert trace.step_norms[k] <= trace.gamma_values[k] * trace.step_norms[k - 1] + 1e-10


def test_decrease_violation_stops_the_run():
    gamma = derive_gamma(constant_triple(0.0, 0, 0))
    trace = jungck_iterate(HALF, R, 1.0, 1e-12, 100, gamma)
    assert trace.status is Status.DECREASE_VIOLATED
    assert len(trace.step_norms) == 2
    assert "step 1" in trace.message


def test_growing_steps_warn_without_gamma():
    doubling = MapQuadruple.from_single(lambda x: 2 * x)
    with pytest.warns(RuntimeWarning, match="grew"):
        trace = jungck_iterate(doubling, R, 1.0, 1e-12, 5)
    assert trace.status is Status.MAX_ITER
    assert trace.sweeps == 5


def test_preimage_failure_is_reported():
    def refuse(target, hint, tol):
        raise PreimageError("nothing maps there", target)

    quad = MapQuadruple(lambda x: x, lambda x: x, lambda x: x + 1, lambda x: x, refuse, refuse)
    trace = jungck_iterate(quad, R, 0.0, 1e-12, 10)
    assert trace.status is Status.PREIMAGE_FAILED
    assert trace.failure_target == 1.0


def test_inaccurate_preimage_is_reported():
    sloppy = MapQuadruple(lambda x: x, lambda x: x, lambda x: x / 2, lambda x: x / 2,
                          lambda w, h, tol: w + 1.0, lambda w, h, tol: w + 1.0)
    trace = jungck_iterate(sloppy, R, 1.0, 1e-12, 10)
    assert trace.status is Status.PREIMAGE_FAILED
    assert "missed" in trace.message


def test_argument_validation():
    with pytest.raises(ValueError):
        jungck_iterate(HALF, R, 1.0, 0.0, 10)
    with pytest.raises(ValueError):
        jungck_iterate(HALF, R, 1.0, 1e-3, 1)


def test_linear_instance_converges_to_t(demo):
    quad, space = quadruple(demo), grid_space(demo)
    trace = jungck_iterate(quad, space, demo.zero(), 1e-12, 100)
    assert trace.converged
    assert np.max(np.abs(trace.limit.values[:, 0] - demo.t)) < 1e-8


def test_trace_csv_export(tmp_path):
    gamma = derive_gamma(constant_triple(0.5, 0, 0, kind="rational"))
    trace = jungck_iterate(HALF, R, 1.0, 1e-3, 100, gamma)
    path = tmp_path / "trace.csv"
    text = trace.to_csv(path)
    assert path.read_text() == text
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0] == ["n", "step_norm", "gamma_value"]
    assert rows[1] == ["0", "0.25", ""]
    assert [float(r[1]) for r in rows[1:]] == trace.step_norms
    assert all(r[2] == "0.5" for r in rows[2:])


def test_contraction_constant_map_passes():
    report = verify_contraction_sum(_const_quad(4.0), R, constant_triple(0.2, 0.1, 0.1),
                                    [(0, 1), (2, -5), (3, 3)])
    assert report.passed and report.checked == 3


def test_identity_is_not_a_contraction():
    pairs = [(0.0, 1.0), (2.0, 2.0), (-1.0, 3.0)]
    report = verify_contraction_sum(IDENTITY, R, constant_triple(0.2, 0, 0), pairs, slack=0.0)
    assert [v[0] for v in report.violations] == [0, 2]
    idx, x, y, lhs, rhs = report.violations[0]
    assert (x, y) == (0.0, 1.0)
    assert complex(lhs) == 1.0 and complex(rhs) == pytest.approx(0.2)


def test_rational_form_trivial_cases():
    triple = constant_triple(0.3, 0.1, 0.1, kind="rational")
    assert verify_contraction_rational(_const_quad(1.0), R, triple, [(0, 5), (1, 2)]).passed
    assert verify_contraction_rational(HALF, R, triple, [(x, x) for x in (0.0, 1.0, -3.5)]).passed


def _random_pairs(demo, rng, k):
    return [(random_grid_function(0, 1, demo.grid_points, 1, rng),
             random_grid_function(0, 1, demo.grid_points, 1, rng)) for _ in range(k)]


def test_linear_instance_sum_contraction(demo, rng):
    report = verify_contraction_sum(quadruple(demo), grid_space(demo), constant_triple(0.2, 0, 0),
                                    _random_pairs(demo, rng, 100))
    assert report.checked == 100 and report.passed


def _oracle_sides(demo, x, y, lams, form):
    """Independent evaluation with Python complex arithmetic and raw numpy arrays."""
    l1, l2, l3 = lams
    t = demo.t
    w = demo.weights
    c = 0.3
    psi = (1 - c / 3) * t

    def delta(v):
        return c * t * np.sum(w * t * v)

    xv, yv = x.values[:, 0], y.values[:, 0]
    Sx, Ty = delta(xv) + psi, delta(yv) + psi
    fx, gy = 2 * xv - delta(xv) - psi, 2 * yv - delta(yv) - psi
    k = complex(1, demo.a_metric)

    def d(a, b):
        return k * np.max(np.abs(a - b))

    if form == "sum":
        rhs = l1 * d(fx, gy) + l2 * (d(fx, Sx) + d(gy, Ty)) + l3 * (d(fx, Ty) + d(gy, Sx))
    else:
        den = 1 + d(fx, gy)
        rhs = l1 * d(fx, gy) + l2 * d(Sx, fx) * d(Ty, gy) / den + l3 * d(Sx, gy) * d(Ty, gy) / den
    return d(Sx, Ty), rhs


@pytest.mark.parametrize("form, lams", [("rational", (0.2, 0.1, 0.1)), ("rational", (0.3, 0.1, 0.1)),
                                        ("sum", (0.2, 0.1, 0.1)), ("sum", (0.05, 0, 0))])
def test_contraction_matches_brute_force(demo, rng, form, lams):
    pairs = _random_pairs(demo, rng, 30)
    quad, space = quadruple(demo), grid_space(demo)
    if lams == (0.3, 0.1, 0.1):
        report = verify_corollary_constants(quad, space, lams, form, pairs)
    elif form == "sum":
        report = verify_contraction_sum(quad, space, constant_triple(*lams), pairs)
    else:
        report = verify_contraction_rational(quad, space, constant_triple(*lams, kind=form), pairs)
    expected = []
    for i, (x, y) in enumerate(pairs):
        lhs, rhs = _oracle_sides(demo, x, y, lams, form)
        if not (lhs.real <= rhs.real + 1e-12 and lhs.imag <= rhs.imag + 1e-12):
            expected.append(i)
    assert [v[0] for v in report.violations] == expected
    if form == "sum" and lams == (0.05, 0, 0):
        # below the analytic ratio 0.15 / 1.85 most pairs must fail
        assert expected


def test_corollary_constants_gate():
    with pytest.raises(HypothesisViolation) as exc:
        verify_corollary_constants(HALF, R, (0.9, 0.2, 0.1), "sum", [(0, 1)])
    assert exc.value.margin == pytest.approx(-0.5)
    assert verify_corollary_constants(_const_quad(2.0), R, (0, 0, 0), "sum", [(0, 1), (5, 7)]).passed


def test_range_inclusion():
    assert verify_range_inclusion(HALF, R, [0.0, 1.0, -2.0], 1e-12).witnessed

    def const_pre(target, hint, tol):
        if target != 7.0:
            raise PreimageError("outside the image of f", target)
        return 0.0

    quad = MapQuadruple(lambda x: 7.0, lambda x: x, lambda x: x, lambda x: x + 1, const_pre, lambda w, h, t: w)
    report = verify_range_inclusion(quad, R, [6.0, 0.0], 1e-12)
    assert not report.witnessed
    assert [(i, label) for i, label, _ in report.failures] == [(1, "T(X)<=f(X)")]


def test_range_inclusion_linear_instance(demo, rng):
    sample = [random_grid_function(0, 1, demo.grid_points, 1, rng) for _ in range(20)]
    assert verify_range_inclusion(quadruple(demo), grid_space(demo), sample, 1e-10).witnessed


def test_weak_compatibility():
    # f(x) = x^2 and S(x) = 2x - 1 coincide at 1 and commute there
    quad = MapQuadruple(lambda x: x * x, lambda x: x, lambda x: 2 * x - 1, lambda x: x, None, None)
    report = verify_weak_compatibility(quad, R, [1.0, 0.0, 3.0], 1e-12)
    assert report.coincidences["(f,S)"] == [0] and report.passed
    quad = MapQuadruple(lambda x: x * x, lambda x: x, lambda x: 3 * x - 2, lambda x: x, None, None)
    report = verify_weak_compatibility(quad, R, [2.0], 1e-12)
    # 4 == 4 at x = 2; f(S 2) = 16, S(f 2) = 10
    assert report.coincidences["(f,S)"] == [0]
    assert not report.passed


def _recompute(quad, space, cert):
    t, u, v = cert.point, cert.u, cert.v
    return {
        "S": space.norm(quad.S(t), t), "T": space.norm(quad.T(t), t),
        "f": space.norm(quad.f(t), t), "g": space.norm(quad.g(t), t),
        "Sv-fv": space.norm(quad.S(v), quad.f(v)), "Tu-gu": space.norm(quad.T(u), quad.g(u)),
        "Sfv-fSv": space.norm(quad.S(quad.f(v)), quad.f(quad.S(v))),
        "Tgu-gTu": space.norm(quad.T(quad.g(u)), quad.g(quad.T(u))),
    }


def test_certificates_trivial():
    for quad, x0 in ((IDENTITY, 2.5), (HALF, 1.0)):
        trace = jungck_iterate(quad, R, x0, 1e-300 if quad is IDENTITY else 1e-12, 2000)
        cert = certify_fixed_point(quad, R, trace, 1e-8)
        assert cert.valid
    cert = certify_fixed_point(IDENTITY, R, jungck_iterate(IDENTITY, R, 2.5, 1e-12, 3), 1e-8)
    assert cert.point == 2.5 and cert.max_residual == 0.0


def test_certificate_requires_convergence():
    with pytest.raises(ValueError):
        certify_fixed_point(HALF, R, jungck_iterate(HALF, R, 1.0, 1e-12, 2), 1e-8)


def test_certificate_linear_instance_is_sound(demo):
    quad, space = quadruple(demo), grid_space(demo)
    cert = certify_fixed_point(quad, space, jungck_iterate(quad, space, demo.zero(), 1e-12, 100), 1e-8)
    assert cert.valid and cert.max_residual < 1e-8
    stored = cert.all_residuals()
    recomputed = _recompute(quad, space, cert)
    assert {k: v.hex() for k, v in stored.items()} == {k: v.hex() for k, v in recomputed.items()}


def test_certificate_reports_preimage_failure():
    def refuse(target, hint, tol):
        raise PreimageError("no", target)

    quad = MapQuadruple(lambda x: x, lambda x: x, lambda x: x / 2, lambda x: x / 2, lambda w, h, t: w, refuse)
    trace = jungck_iterate(HALF, R, 1.0, 1e-12, 100)
    cert = certify_fixed_point(quad, R, trace, 1e-8)
    assert not cert.valid and "preimage" in cert.reason


def test_uniqueness_examples(demo, rng):
    assert not uniqueness_probe(IDENTITY, R, [1.0, 2.0], 1e-12, 10).unique_consistent
    report = uniqueness_probe(HALF, R, [1.0, -1.0], 1e-12, 100)
    assert report.unique_consistent and report.max_gap < 1e-11
    starts = [random_grid_function(0, 1, demo.grid_points, 1, rng) for _ in range(3)]
    report = uniqueness_probe(quadruple(demo), grid_space(demo), starts, 1e-12, 100)
    assert report.unique_consistent and report.max_gap < 1e-6
    with pytest.raises(ValueError):
        uniqueness_probe(HALF, R, [1.0], 1e-12, 100)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_carrier_limit_matches_brute_force(seed):
    rng = np.random.default_rng(seed)
    w, beta, f, g, S, T = random_carrier(rng, n=6)
    quad = tabulated_quadruple(f, g, S, T)
    space = ultrametric_space(w, beta)
    triple = constant_triple(0.3, 0.2, 0.0)
    hypotheses = (
        verify_contraction_sum(quad, space, triple, all_pairs(6), slack=0.0).passed
        and verify_range_inclusion(quad, space, range(6), 0.5).witnessed
        and verify_weak_compatibility(quad, space, range(6), 0.5).passed
    )
    assume(hypotheses)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        trace = jungck_iterate(quad, space, int(rng.integers(6)), 0.5, 50)
    assert trace.converged
    assert common_fixed_points(f, g, S, T) == [trace.limit]


@settings(max_examples=40, deadline=None)
@given(st.floats(-0.95, 0.95), st.floats(-1e3, 1e3), st.floats(-1e3, 1e3))
def test_affine_contractions_obey_decrease_invariant(rate, shift, x0):
    quad = MapQuadruple.from_single(lambda x: rate * x + shift)
    gamma = derive_gamma(constant_triple(abs(rate), 0, 0, kind="rational"))
    trace = jungck_iterate(quad, R, x0, 1e-9, 2000, gamma)
    assert trace.converged
    steps = trace.step_norms
    for k in range(1, len(steps)):
        assert steps[k] <= trace.gamma_values[k] * steps[k - 1] + 1e-10
        assert steps[k] <= steps[k - 1] + 1e-10
    assert abs(trace.limit - shift / (1 - rate)) < 1e-6
