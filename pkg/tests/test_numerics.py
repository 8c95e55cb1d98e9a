import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special

from spatial_aloha.errors import DomainError, InvalidParameterError, NumericFailure
from spatial_aloha.numerics import (
    InversionSpec,
    QuadSpec,
    gamma_fn,
    halfline_trapezoid,
    integrate,
    integrate_vectorized,
    invert_laplace_cdf,
)


@pytest.mark.parametrize("x, expected", [(0.5, math.sqrt(math.pi)), (1.0, 1.0), (1.5, math.sqrt(math.pi) / 2)])
def test_gamma_known_values(x, expected):
    assert gamma_fn(x) == pytest.approx(expected, rel=1e-14)


@pytest.mark.parametrize("pole", [0.0, -1.0, -4.0])
def test_gamma_poles(pole):
    with pytest.raises(DomainError):
        gamma_fn(pole)


@pytest.mark.parametrize(
    "f, a, b, expected",
    [
        (lambda x: math.exp(-x), 0.0, math.inf, 1.0),
        (lambda x: x**-0.5, 0.0, 1.0, 2.0),
        (lambda x: x * math.exp(-x * x), 0.0, math.inf, 0.5),
    ],
)
def test_integrate_examples(f, a, b, expected):
    value, err = integrate(f, a, b)
    assert value == pytest.approx(expected, rel=1e-8)
    assert err < 1e-6


def test_breakpoint_order_does_not_matter():
    f = lambda x: math.exp(-abs(x - 0.3)) / (1 + x * x)
    pts = [0.3, 1.7, 0.05, 4.0]
    first, _ = integrate(f, 0.0, 10.0, breakpoints=pts)
    second, _ = integrate(f, 0.0, 10.0, breakpoints=pts[::-1])
    assert first == second


def test_integrate_reports_failure():
    with pytest.raises(NumericFailure) as info:
        integrate(lambda x: math.sin(1 / x) / x, 0.0, 1.0, QuadSpec(rel_tol=1e-13, max_subdivisions=3))
    assert math.isfinite(info.value.error)


def test_quadspec_validation():
    with pytest.raises(InvalidParameterError):
        QuadSpec(rel_tol=0.0)


@pytest.mark.parametrize("degree", range(0, 20))
def test_vectorized_rule_is_exact_on_polynomials(degree):
    value, _ = integrate_vectorized(lambda x: x**degree, 0.0, 1.0)
    assert value == pytest.approx(1.0 / (degree + 1), rel=1e-13)


def test_vectorized_matches_scalar_on_a_sharp_layer():
    f = lambda t: np.exp(-200.0 * t) + np.sqrt(t)
    vec, _ = integrate_vectorized(f, 0.0, 1.0, breakpoints=[0.005, 0.04])
    ref, _ = integrate(lambda t: float(f(t)), 0.0, 1.0, breakpoints=[0.005, 0.04])
    assert vec == pytest.approx(ref, rel=1e-8)


def test_halfline_trapezoid_gaussian():
    value, err = halfline_trapezoid(lambda y: np.exp(-0.5 * y * y)[:, None], -12.0, 12.0, 0.5)
    assert value[0] == pytest.approx(math.sqrt(2 * math.pi), rel=1e-13)
    # the estimate is the gap to the rule with step 1.0, a bound on the fine rule's error
    assert abs(value[0] - math.sqrt(2 * math.pi)) <= err[0] < 1e-6


def test_inversion_exponential():
    assert invert_laplace_cdf(lambda s: 1 / (1 + s), 1.0) == pytest.approx(1 - math.exp(-1), abs=1e-7)


def test_inversion_point_mass():
    assert invert_laplace_cdf(lambda s: np.exp(-s), 2.0) == pytest.approx(1.0, abs=1e-6)


@pytest.mark.parametrize("c, t", [(1.0, 1.0), (0.3, 0.5), (2.0, 10.0)])
def test_inversion_levy_oracle(c, t):
    # one-sided stable law of index 1/2: CDF erfc(c / (2 sqrt t))
    lt = lambda s: np.exp(-c * np.sqrt(s))
    assert invert_laplace_cdf(lt, t) == pytest.approx(special.erfc(c / (2 * math.sqrt(t))), abs=1e-7)


@settings(max_examples=25, deadline=None)
@given(st.floats(0.05, 5.0), st.floats(0.05, 5.0))
def test_inverted_cdf_is_monotone(t1, t2):
    lt = lambda s: (1 / (1 + s)) ** 2
    lo, hi = sorted((t1, t2))
    assert invert_laplace_cdf(lt, lo) <= invert_laplace_cdf(lt, hi) + 1e-7


def test_inversion_rejects_bad_point():
    with pytest.raises(InvalidParameterError):
        invert_laplace_cdf(lambda s: 1 / (1 + s), 0.0)


def test_inversion_spec_validation():
    with pytest.raises(InvalidParameterError):
        InversionSpec(delta=-1.0)
