
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cvfix.coeffs import (
    CoefficientTriple,
    Form,
    InvariantViolation,
    check_hypothesis_bound,
    constant_triple,
    decaying,
    derive_gamma,
    falsify_gamma_class,
    gamma_rational_form,
    gamma_sum_form,
)
from cvfix.cplx import ComplexScalar

cone = st.builds(ComplexScalar, st.floats(0, 1e4), st.floats(0, 1e4))
unit = st.floats(0, 1, exclude_max=True)


def _pairs(n=5):
    return [(ComplexScalar(k, 0.5 * k), ComplexScalar(0.1 * k, k)) for k in range(n)]


@pytest.mark.parametrize(
    "lams, kind, expected",
    [
        ((0.2, 0.1, 0.1), "sum", 0.5),
        ((0.0, 0.0, 0.0), "sum", 0.0),
        ((0.2, 0.1, 0.1), "rational", 0.25),
        ((0.5, 0.0, 0.0), "rational", 0.5),
        ((0.4, 0.3, 0.2), "rational", 0.8),
    ],
)
def test_constant_gamma_examples(lams, kind, expected):
    gamma = derive_gamma(constant_triple(*lams, kind=kind))
    for x, y in _pairs():
        assert gamma(x, y) == pytest.approx(expected, abs=1e-15)


def test_decaying_gamma_at_origin():
    triple = CoefficientTriple(decaying(0.3), 0.1, 0.1)
    gamma = gamma_sum_form(triple)
    # hand evaluation: (0.3/(1+0) + 0.2) / (1 - 0.2)
    assert gamma(0, 0) == pytest.approx(0.625, abs=1e-15)
    # away from the origin: independent formula
    x, y = 3 + 4j, 1.0
    assert gamma(x, y) == pytest.approx((0.3 / 7 + 0.2) / 0.8, abs=1e-15)


def test_form_mismatch_and_degenerate_denominator():
    with pytest.raises(ValueError):
        gamma_sum_form(constant_triple(0.1, 0, 0, kind="rational"))
    with pytest.raises(ValueError):
        gamma_rational_form(constant_triple(0.1, 0, 0))
    with pytest.raises(InvariantViolation, match="<= 0"):
        derive_gamma(constant_triple(0.1, 0.6, 0.5))(1, 2)


@pytest.mark.parametrize(
    "lams, kind, margin, passed",
    [
        ((0.2, 0.1, 0.1), Form.SUM_FORM, 0.4, True),
        ((0.5, 0.2, 0.1), Form.SUM_FORM, -0.1, False),
        ((0.4, 0.3, 0.2), Form.RATIONAL_FORM, 0.1, True),
    ],
)
def test_bound_examples(lams, kind, margin, passed):
    report = check_hypothesis_bound(constant_triple(*lams, kind=kind), _pairs())
    assert report.passed is passed
    assert report.min_margin == pytest.approx(margin, abs=1e-12)
    assert all(m == pytest.approx(margin, abs=1e-12) for m in report.margins)
    if not passed:
        assert len(report.failures) == len(report.margins)
        witness = report.failures[0]
        assert witness[2] == pytest.approx(margin, abs=1e-12)


def test_bound_rejects_points_outside_cone():
    with pytest.raises(ValueError):
        check_hypothesis_bound(constant_triple(0.1, 0, 0), [(-1 + 0j, 0)])


def test_bound_flags_out_of_range_coefficients():
    report = check_hypothesis_bound(constant_triple(-0.1, 0, 0), _pairs(2))
    assert report.range_failures and not report.passed


def _unary_gamma(fn):
    """A rational-form gamma equal to ``fn`` (lambda2 = lambda3 = 0)."""
    return gamma_rational_form(CoefficientTriple(lambda x, y: fn(x, y), 0.0, 0.0, Form.RATIONAL_FORM))


def test_falsify_constant_gamma_finds_nothing():
    gamma = derive_gamma(constant_triple(0.5, 0, 0, kind="rational"))
    seqs = [[(n, 0) for n in range(100)], [(1 / (n + 1), n) for n in range(50)]]
    report = falsify_gamma_class(gamma, seqs)
    assert not report.found
    assert "not proven" in report.verdict


def test_falsify_unbounded_gamma():
    gamma = _unary_gamma(lambda x, y: abs(x) / (1 + abs(x)))
    seq = [(n, 0) for n in range(2000)]
    # oracle: tabulate along the tail
    tail = [(n / (1 + n), n) for n in range(1000, 2000)]
    assert any(g > 1 - 1e-3 and size > 1e-3 for g, size in tail)
    report = falsify_gamma_class(gamma, [seq])
    assert report.found
    assert "not in the class" in report.verdict


def test_falsify_allowed_direction():
    gamma = _unary_gamma(lambda x, y: 1 - min(1.0, abs(x) + abs(y)))
    seqs = [[(2.0**-n, 0) for n in range(1, 60)], [(1 / n, 1 / n**2) for n in range(1, 500)]]
    tail = [1 - min(1, abs(x) + abs(y)) for seq in seqs for x, y in seq[len(seq) // 2:]]
    assert max(tail) > 1 - 1e-3
    assert not falsify_gamma_class(gamma, seqs).found


def test_short_sequences_rejected():
    gamma = derive_gamma(constant_triple(0.5, 0, 0))
    with pytest.raises(ValueError):
        falsify_gamma_class(gamma, [[(0, 0)] * 15])


@given(unit, unit, unit, cone, cone)
def test_sum_gamma_stays_in_unit_interval(a, b, c, x, y):
    total = a + 2 * b + 2 * c
    if total == 0:
        lams = (a, b, c)
    else:
        # rescale into the admissible region lambda1 + 2 lambda2 + 2 lambda3 < 1
        s = 0.999 / max(total, 1.0)
        lams = (a * s, b * s, c * s)
    triple = CoefficientTriple(decaying(lams[0], 0.1), lams[1], lams[2])
    assert check_hypothesis_bound(triple, [(x, y)]).passed
    value = gamma_sum_form(triple)(x, y)
    assert 0.0 <= value < 1.0


@given(unit, unit, unit, cone, cone)
def test_rational_gamma_stays_in_unit_interval(a, b, c, x, y):
    s = 0.999 / max(a + b + c, 1.0)
    triple = constant_triple(a * s, b * s, c * s, kind="rational")
    assert 0.0 <= gamma_rational_form(triple)(x, y) < 1.0


@given(cone, cone)
def test_gamma_is_bitwise_deterministic(x, y):
    gamma = gamma_sum_form(CoefficientTriple(decaying(0.3), 0.1, 0.05))
    assert gamma(x, y).hex() == gamma(x, y).hex()


@given(unit, unit, unit, cone, cone)
def test_margin_is_one_minus_weighted_sum(a, b, c, x, y):
    for kind, w in ((Form.SUM_FORM, 2.0), (Form.RATIONAL_FORM, 1.0)):
        report = check_hypothesis_bound(constant_triple(a, b, c, kind=kind), [(x, y)])
        assert report.margins[0] == 1.0 - (a + w * b + w * c)
