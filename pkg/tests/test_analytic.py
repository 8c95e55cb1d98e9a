import math

import numpy as np
import pytest
from scipy import integrate as sp_integrate
from hypothesis import given, settings
from hypothesis import strategies as st

from spatial_aloha import analytic
from spatial_aloha.errors import DomainError, InvalidParameterError, UsageError
from spatial_aloha.model import (
    Deterministic,
    LogNormal,
    Nakagami,
    PathLoss,
    Rain,
    Rayleigh,
    Renewal,
    Scenario,
    Slotted,
)

PI32 = math.pi**1.5


def test_contention_factor_examples():
    cf = analytic.contention_factor(4.0)
    assert cf.kappa_slotted == pytest.approx(PI32, rel=1e-14)
    assert cf.kappa_non_slotted == pytest.approx(4 / 3 * PI32, rel=1e-14)
    near_two = analytic.contention_factor(2 + 1e-9)
    assert near_two.kappa_non_slotted / near_two.kappa_slotted == pytest.approx(1.0, abs=1e-9)


@pytest.mark.parametrize("beta", [2.0, 1.5, -3.0])
def test_contention_factor_domain(beta):
    with pytest.raises(DomainError, match="beta must exceed 2"):
        analytic.contention_factor(beta)


def test_slotted_and_rain_examples(base):
    assert analytic.lt_slotted(base, 0.0) == 1.0
    assert analytic.lt_slotted(base, 1.0) == pytest.approx(math.exp(-0.05 * PI32 * math.sqrt(math.pi) / 2), rel=1e-13)
    assert analytic.lt_slotted(base.replace(fading=Deterministic()), 1.0) == pytest.approx(
        math.exp(-0.05 * PI32), rel=1e-13
    )
    rain = base.replace(mac=Rain(0.05))
    assert analytic.lt_rain_mean(rain, 0.0) == 1.0
    assert analytic.lt_rain_mean(rain, 1.0) == pytest.approx(
        math.exp(-4 / 3 * 0.05 * PI32 * math.sqrt(math.pi) / 2), rel=1e-13
    )


def test_rain_tends_to_slotted_near_beta_two(base):
    pl = PathLoss(1.0, 2 + 1e-6)
    slotted = analytic.lt_slotted(base.replace(pathloss=pl), 0.3)
    rain = analytic.lt_rain_mean(base.replace(pathloss=pl, mac=Rain(0.05)), 0.3)
    assert rain == pytest.approx(slotted, abs=1e-4)


def test_wrong_mac_is_rejected(base):
    with pytest.raises(UsageError):
        analytic.lt_slotted(base.replace(mac=Rain(0.05)), 1.0)
    with pytest.raises(UsageError):
        analytic.lt_rain_mean(base, 1.0)
    with pytest.raises(UsageError):
        analytic.lt_renewal_mean_general(base, 1.0)


def test_renewal_origin(base):
    sc = base.replace(mac=Renewal.from_tau(0.05))
    assert analytic.lt_renewal_mean_general(sc, 0.0) == 1.0
    assert analytic.lt_renewal_mean_rayleigh(sc, 0.0) == 1.0
    assert analytic.lt_renewal_mean_nofading(sc.replace(fading=Deterministic()), 0.0) == 1.0


def test_renewal_specializations(base):
    sc = base.replace(mac=Renewal.from_tau(0.05))
    nf = sc.replace(fading=Deterministic())
    assert analytic.lt_renewal_mean_general(nf, 1.0) == pytest.approx(
        analytic.lt_renewal_mean_nofading(nf, 1.0), abs=1e-6
    )
    assert analytic.lt_renewal_mean_general(sc, 1.0) == pytest.approx(
        analytic.lt_renewal_mean_rayleigh(sc, 1.0), abs=1e-5
    )


def test_renewal_rayleigh_value(base):
    sc = base.replace(mac=Renewal.from_tau(0.05))
    assert analytic.lt_renewal_mean_general(sc, 1.0) == pytest.approx(0.72072088, abs=1e-7)


@pytest.mark.parametrize("a", [0.01, 0.3, 1.0, 4.0])
def test_bracket_stable_form_matches_printed(a):
    for u in (1e-3, 0.05, 0.5 * a, 2.0 * a, a + 0.3, 7.0, 40.0):
        if abs(u - a) < 1e-3:
            continue
        assert analytic.renewal_bracket_nofading(u, a) == pytest.approx(
            analytic.renewal_bracket_printed(u, a), rel=1e-7, abs=1e-12
        )


def test_bracket_is_continuous_at_the_removable_point():
    a = 0.7
    at = analytic.renewal_bracket_nofading(a, a)
    for h in (1e-4, 1e-6, 1e-9):
        assert analytic.renewal_bracket_nofading(a + h, a) == pytest.approx(at, abs=10 * h)
        assert analytic.renewal_bracket_nofading(a - h, a) == pytest.approx(at, abs=10 * h)


@pytest.mark.parametrize("c", [0.5, 3.0])
@pytest.mark.parametrize("fading", [Deterministic(), Rayleigh(), LogNormal(1.0)], ids=repr)
def test_time_rescaling_invariance(c, fading):
    sc = Scenario(fading=fading, mac=Renewal(1.0, 0.08))
    scaled = sc.replace(mac=Renewal(c, 0.08 / c))
    assert analytic.renewal_exponent_general(scaled) == pytest.approx(analytic.renewal_exponent_general(sc), rel=1e-12)
    rain = sc.replace(mac=Rain(0.05, 1.0))
    assert analytic.lt_rain_mean(rain.replace(mac=Rain(0.05, c)), 0.4) == analytic.lt_rain_mean(rain, 0.4)


def test_always_on_limit_no_fading():
    sc = Scenario(fading=Deterministic(), mac=Renewal(1.0, 1e4))
    assert analytic.lt_renewal_mean_nofading(sc, 1.0) == pytest.approx(math.exp(-PI32), abs=1e-3)


def _always_on_rayleigh_limit():
    # an always-on node sends back-to-back packets with fresh fading, so its
    # mean power over [0, B] is U F1 + (1 - U) F2 with U uniform; given U = u
    # that is hypoexponential with E[X^(1/2)] below
    def moment(u):
        if abs(2 * u - 1) < 1e-9:
            return math.gamma(1.5) * 1.5 * math.sqrt(0.5)
        return math.gamma(1.5) * (u**1.5 - (1 - u) ** 1.5) / (2 * u - 1)

    m, _ = sp_integrate.quad(moment, 0.0, 1.0, points=[0.5], epsabs=1e-13)
    return math.exp(-PI32 * m)


def test_always_on_limit_rayleigh():
    limit = _always_on_rayleigh_limit()
    assert limit == pytest.approx(0.0058042, abs=1e-7)
    sc = Scenario(fading=Rayleigh(), mac=Renewal(1.0, 1e4))
    assert analytic.lt_renewal_mean_general(sc, 1.0) == pytest.approx(limit, abs=1e-5)
    assert analytic.lt_renewal_mean_rayleigh(sc.replace(mac=Renewal(1.0, 1e3)), 1.0) == pytest.approx(limit, abs=2e-5)
    # a slotted network with p = 1 keeps one fading draw per node and sees less interference
    slotted = analytic.lt_slotted(sc.replace(mac=Slotted(1.0)), 1.0)
    assert slotted - limit > 1e-3


@pytest.mark.parametrize("fading", [Deterministic(), Rayleigh(), LogNormal(1.0), Nakagami(2.0)], ids=repr)
def test_renewal_below_load_equivalent_bounds(fading):
    # transform of a nonnegative, nondegenerate variable
    sc = Scenario(fading=fading, mac=Renewal.from_tau(0.1))
    xi = np.array([0.1, 1.0, 10.0])
    vals = analytic.lt_renewal_mean_general(sc, xi)
    assert np.all((vals > 0) & (vals < 1)) and np.all(np.diff(vals) < 0)


@settings(max_examples=15, deadline=None)
@given(st.floats(0.005, 0.5), st.floats(0.005, 0.5))
def test_renewal_transform_decreases_with_load(t1, t2):
    lo, hi = sorted((t1, t2))
    make = lambda t: Scenario(fading=Deterministic(), mac=Renewal.from_tau(t))
    assert analytic.lt_renewal_mean_nofading(make(hi), 1.0) <= analytic.lt_renewal_mean_nofading(make(lo), 1.0) + 1e-12


def test_complex_argument_is_accepted():
    sc = Scenario(fading=Deterministic(), mac=Renewal.from_tau(0.05))
    z = analytic.lt_renewal_mean_nofading(sc, 1.0 + 2.0j)
    assert isinstance(z, complex) and abs(z) < 1.0
    assert analytic.lt_renewal_mean_nofading(sc, 2.0 + 0j).real == pytest.approx(
        analytic.lt_renewal_mean_nofading(sc, 2.0), rel=1e-14
    )


def test_negative_real_argument_is_rejected(base):
    with pytest.raises(InvalidParameterError):
        analytic.lt_slotted(base, -1.0)


def test_coverage_rayleigh_examples(base):
    assert analytic.coverage_rayleigh(base) == pytest.approx(math.exp(-0.05 * math.sqrt(10) * math.pi**2 / 2), rel=1e-13)
    assert analytic.coverage_rayleigh(base) == pytest.approx(0.4583, abs=5e-5)
    rain = base.replace(mac=Rain(0.05))
    assert analytic.coverage_rayleigh(rain) == pytest.approx(math.exp(-0.05 * math.sqrt(10) * 2 * math.pi**2 / 3), rel=1e-13)
    assert analytic.coverage_rayleigh(rain) == pytest.approx(0.3533, abs=5e-5)
    assert analytic.coverage_rayleigh(base.replace(mac=Slotted(0.0))) == 1.0


def test_coverage_rayleigh_equals_lt_route(base):
    for mac in (Slotted(0.05), Rain(0.05)):
        sc = base.replace(mac=mac)
        assert analytic.coverage_rayleigh(sc) == pytest.approx(float(analytic.interference_lt(sc)(sc.coverage_xi)), rel=1e-12)


def test_coverage_noise_factor(base):
    noisy = base.replace(noise_w=0.01)
    assert analytic.coverage_rayleigh(noisy) == pytest.approx(math.exp(-0.1) * analytic.coverage_rayleigh(base), rel=1e-13)


def test_coverage_requires_rayleigh(base):
    with pytest.raises(UsageError):
        analytic.coverage_rayleigh(base.replace(fading=LogNormal(1.0)))


def test_renewal_rayleigh_coverage(base):
    sc = base.replace(mac=Renewal.from_tau(0.05))
    assert analytic.coverage_rayleigh_renewal(sc) == pytest.approx(0.354993, abs=1e-6)
    assert analytic.coverage_rayleigh_renewal(base.replace(mac=Renewal(1.0, 0.0))) == 1.0


def test_renewal_rayleigh_coverage_dense_network(base):
    # equal load lambda*tau = 0.05 spread over a dense network
    sc = base.replace(lam=100.0, mac=Renewal.from_tau(0.05 / 100))
    rain = analytic.coverage_rayleigh(base.replace(mac=Rain(0.05)))
    assert analytic.coverage_rayleigh_renewal(sc) == pytest.approx(rain, rel=0.02)


def test_nofading_coverage_edges(nofading):
    assert analytic.coverage_nofading(nofading.replace(noise_w=0.1)) == 0.0
    assert analytic.coverage_nofading(nofading.replace(mac=Slotted(0.0))) == 1.0
    assert analytic.coverage_nofading(nofading) == pytest.approx(0.534, abs=2e-3)


def test_nofading_coverage_decreases_with_threshold(nofading):
    values = [analytic.coverage_nofading(nofading.replace(T=T)) for T in (1.0, 3.0, 10.0, 30.0)]
    assert values == sorted(values, reverse=True)


def test_spatial_throughput_examples(base):
    assert analytic.spatial_throughput(base, 0.0) == 0.0
    assert analytic.spatial_throughput(base, 0.4583) == pytest.approx(0.022915)
    assert analytic.spatial_throughput(base.replace(lam=2.0, mac=Slotted(0.025)), 0.4583) == pytest.approx(0.022915)
    with pytest.raises(InvalidParameterError):
        analytic.spatial_throughput(base, 1.5)
