import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from uapprox import targets, trapnet
from uapprox.metrics import Grid, NormKind
from uapprox.netcore import count_units, forward, forward_many
from uapprox.targets import TargetFunction


def linear():
    return TargetFunction("x", (0.0, 10.0), lambda x: np.asarray(x, dtype=float))


def test_rectangular_holds_left_sample():
    p = trapnet.build_piecewise(linear(), 10)
    assert p(3.5) == 3.0
    assert p(3.0) == 3.0
    assert p(10.0) == 9.0


def test_trapezoid_interpolates():
    p = trapnet.build_piecewise(linear(), 10, "trapezoidal")
    assert p(3.5) == 3.5
    np.testing.assert_array_equal(p(p.nodes), p.values)


def test_constant_target_has_zero_error():
    f = TargetFunction("c", (0.0, 1.0), lambda x: np.full_like(np.asarray(x, float), 2.0))
    for mode in trapnet.Mode:
        p = trapnet.build_piecewise(f, 7, mode)
        for n in NormKind:
            assert trapnet.epsilon1_resnet(f, p, norm=n) == 0.0


def test_singular_node_is_nudged():
    f = targets.get("x^(-2)")
    p = trapnet.build_piecewise(f, 4)
    assert p.nodes[0] > 0.0 and np.isfinite(p.values).all()


def test_sample_and_hold_error_oracle():
    # left hold of sin over M cells: integral of |sin x - sin x_i| computed cell by cell
    f = targets.get("sin(2*pi*x/5)")
    M = 10
    p = trapnet.build_piecewise(f, M)
    a = 10.0 / M
    fine = np.linspace(0, a, 20001)
    want = sum(np.trapezoid(np.abs(np.sin(2 * np.pi * (x0 + fine) / 5) - np.sin(2 * np.pi * x0 / 5)), fine)
               for x0 in p.nodes[:-1])
    got = trapnet.epsilon1_resnet(f, p, Grid(f.domain, 1_000_001), NormKind.L1)
    assert got == pytest.approx(want, rel=1e-4)


@pytest.mark.parametrize("mode", ["rectangular", "trapezoidal"])
@pytest.mark.parametrize("fid", ["sin(2*pi*x/5)", "sin(2*pi*x/2.5)", "log(x)", "rect_1_to_10_2cycles"])
def test_network_matches_piecewise(mode, fid):
    f = targets.get(fid)
    p = trapnet.build_piecewise(f, 23, mode)
    assert trapnet.epsilon2_resnet(p) <= 1e-9


def test_network_structure():
    p = trapnet.build_piecewise(targets.get("sin(2*pi*x/5)"), 10)
    counts = count_units(trapnet.lower_to_resnet(p))
    assert counts["relu"] == 2 * 9  # two per interior jump
    assert counts["binary_step"] == counts["sine"] == 0


def test_trapezoid_network_at_a_point():
    p = trapnet.build_piecewise(linear(), 10, "trapezoidal")
    assert forward(trapnet.lower_to_resnet(p), 3.5) == pytest.approx(3.5, abs=1e-14)


@given(st.integers(1, 40), st.floats(0.2, 3.0))
@settings(max_examples=30, deadline=None)
def test_lowering_property(M, w):
    f = TargetFunction("s", (0.0, 10.0), lambda x, w=w: np.sin(w * np.asarray(x, float)))
    for mode in trapnet.Mode:
        p = trapnet.build_piecewise(f, M, mode)
        xs = np.linspace(0.0, 10.0, 997)
        keep = trapnet.ramp_mask(p, xs)
        np.testing.assert_allclose(forward_many(trapnet.lower_to_resnet(p), xs[keep]),
                                   p(xs[keep]), atol=1e-9)


def test_error_decays_like_spacing():
    f = targets.get("sin(2*pi*x/2.5)")
    g = Grid(f.domain, 200_001)
    e = [trapnet.epsilon1_resnet(f, trapnet.build_piecewise(f, M), g) for M in (50, 100, 200)]
    assert 1.8 < e[0] / e[1] < 2.2 and 1.8 < e[1] / e[2] < 2.2


def test_outside_domain_rejected():
    with pytest.raises(ValueError):
        trapnet.build_piecewise(linear(), 5)(11.0)
    with pytest.raises(ValueError):
        trapnet.build_piecewise(linear(), 0)
