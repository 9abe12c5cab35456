import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from uapprox import targets, taylor
from uapprox.metrics import ErrorReport, EvaluationError, Grid, NormKind, norm_of_diff


def test_horner_matches_power_sum(rng):
    t = taylor.TaylorModel(0.3, tuple(rng.normal(size=8)))
    xs = np.linspace(-1, 1, 50)
    direct = sum(a * (xs - 0.3) ** k for k, a in enumerate(t.coeffs))
    np.testing.assert_allclose(taylor.eval_taylor(t, xs), direct, rtol=1e-12, atol=1e-12)


def test_scalar_and_vector_paths_identical(rng):
    t = taylor.TaylorModel(0.0, tuple(rng.normal(size=12)))
    xs = rng.uniform(-1, 1, 20)
    assert [taylor.eval_taylor(t, float(x)) for x in xs] == list(taylor.eval_taylor(t, xs))


def test_polynomial_target_is_exact():
    f = targets.get("x^2")
    t = taylor.build_taylor(f, N=5)
    assert taylor.epsilon1_taylor(f, t) <= 1e-15


def test_exp_remainder_bound():
    # Lagrange remainder: |e^x - T_N(x)| <= e / (N+1)! on [0, 1]
    f = targets.get("exp(x)")
    for N in (3, 5, 8):
        eps = taylor.epsilon1_taylor(f, taylor.build_taylor(f, N=N))
        assert eps <= math.e / math.factorial(N + 1)
        assert eps >= 1 / math.factorial(N + 1) * 0.99  # remainder at x = 1 is at least 1/(N+1)!


def test_center_defaults_to_target():
    assert taylor.build_taylor(targets.get("exp(-x)"), N=3).center == 0.01


def test_grid_properties():
    g = Grid((0.0, 1.0), 10001)
    xs = g.abscissae()
    assert xs[0] == 0.0 and xs[-1] == 1.0 and np.all(np.diff(xs) > 0)
    off = Grid((-1.0, 1.0), 10000, offset=True).abscissae()
    assert 0.0 not in off and off[0] > -1.0 and off[-1] < 1.0
    with pytest.raises(ValueError):
        Grid((0.0, 1.0), 1)
    with pytest.raises(ValueError):
        Grid((1.0, 1.0), 10)


def test_norm_closed_forms():
    g = Grid((0.0, 1.0), 100)
    c = 0.7
    assert norm_of_diff(lambda x: x + c, lambda x: x, g, NormKind.SUP) == pytest.approx(c)
    assert norm_of_diff(lambda x: x + c, lambda x: x, g, NormKind.L2_RMS) == pytest.approx(c)
    assert norm_of_diff(lambda x: x + c, lambda x: x, g, NormKind.L2_UNNORMALIZED) == pytest.approx(10 * c)
    assert norm_of_diff(lambda x: x + c, lambda x: x, g, NormKind.L1) == pytest.approx(c)
    for n in NormKind:
        assert norm_of_diff(np.sin, np.sin, g, n) == 0.0


def test_endpoint_sup():
    assert norm_of_diff(lambda x: x, lambda x: 0 * x, Grid((0.0, 1.0), 10001), NormKind.SUP) == 1.0


@given(st.floats(-5, 5), st.floats(0.1, 5))
@settings(max_examples=40, deadline=None)
def test_rms_below_sup_and_scale_equivariance(a, w):
    g = Grid((0.0, 2.0), 257)
    f = lambda x: np.sin(w * x) + a
    h = lambda x: np.cos(x)
    sup = norm_of_diff(f, h, g, NormKind.SUP)
    assert norm_of_diff(f, h, g, NormKind.L2_RMS) <= sup * (1 + 1e-15)
    for alpha in (2.0, -3.0):
        for n in NormKind:
            base = norm_of_diff(f, h, g, n)
            scaled = norm_of_diff(lambda x: alpha * f(x), lambda x: alpha * h(x), g, n)
            assert scaled == pytest.approx(abs(alpha) * base, rel=1e-12, abs=1e-12)


def test_l1_integral_of_linear():
    # integral of x over [0, 2] is 2; trapezoid rule is exact for linear integrands
    assert norm_of_diff(lambda x: x, lambda x: 0 * x, Grid((0.0, 2.0), 11), NormKind.L1) == pytest.approx(2.0)


def test_evaluation_error_names_abscissa():
    with pytest.raises(EvaluationError, match="x=0.5"):
        norm_of_diff(lambda x: np.where(x == 0.5, np.nan, x), lambda x: x,
                     Grid((0.0, 1.0), 3), NormKind.SUP)


def test_norm_parse_aliases():
    assert NormKind.parse("rms") is NormKind.L2_RMS
    assert NormKind.parse("l2") is NormKind.L2_UNNORMALIZED
    assert NormKind.parse("sup") is NormKind.SUP
    with pytest.raises(ValueError):
        NormKind.parse("l7")


def test_error_report_rows():
    g = Grid((0.0, 1.0), 11)
    r = ErrorReport("taylor", "x^2", NormKind.SUP, g, {"N": 5}, epsilon1=0.125)
    row = r.csv_row()
    assert len(row) == len(ErrorReport.CSV_COLUMNS)
    assert row[8] == "0.125" and row[2] == '{"N": 5}'
    assert r.to_dict()["grid"]["points"] == 11
    with pytest.raises(ValueError):
        ErrorReport("taylor", "x^2", NormKind.SUP, g, {})
