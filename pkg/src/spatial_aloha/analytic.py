"""Laplace transforms of the (time-averaged) interference and SINR coverage.

Three MAC models are covered: slotted Aloha, the Poisson rain model and the
Poisson renewal model of non-slotted Aloha. All transforms have the form
exp(-C xi^{2/beta}) because the interferers form a marked Poisson process with
power-law attenuation; for the renewal model C has no closed form and is
obtained by quadrature.

Time is measured in units of the packet length B inside the renewal
integrands, so results only depend on the product epsilon*B.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache, partial
from typing import Callable

import numpy as np
from scipy import special

from . import model
from .errors import DomainError, InvalidParameterError, NumericFailure, UsageError
from .model import Deterministic, Rain, Rayleigh, Renewal, Scenario, Slotted
from .numerics import InversionSpec, QuadSpec, integrate, integrate_vectorized, invert_laplace_cdf

# below this argument the no-fading bracket i(u) is replaced by its slope
_SMALL_U = 1e-6


@dataclass(frozen=True)
class ContentionFactor:
    kappa_slotted: float
    kappa_non_slotted: float
    zeta: float


@dataclass(frozen=True)
class InterferenceLT:
    """Laplace transform of the interference seen by a typical receiver.

    ``evaluator`` accepts complex arguments with nonnegative real part.
    """

    model_tag: str
    scenario: Scenario
    evaluator: Callable

    def __call__(self, xi):
        return self.evaluator(xi)


def overlap_kernel(s, B: float = 1.0):
    """Fraction of [0, B] covered by a packet that starts at time s."""
    return np.maximum(B - np.abs(s), 0.0) / B


def contention_factor(beta: float) -> ContentionFactor:
    if not beta > 2:
        raise DomainError(f"beta must exceed 2 (got {beta})")
    slotted = math.pi * special.gamma(1.0 - 2.0 / beta)
    ratio = 2.0 * beta / (2.0 + beta)
    return ContentionFactor(slotted, ratio * slotted, ratio)


def kappa(beta: float, which: str = "slotted") -> float:
    """Spatial contention factor pi*Gamma(1-2/beta), times 2beta/(2+beta) if non-slotted."""
    cf = contention_factor(beta)
    if which == "slotted":
        return cf.kappa_slotted
    if which == "non_slotted":
        return cf.kappa_non_slotted
    raise UsageError(f"unknown contention factor {which!r}")


def _power(xi, q):
    xi = np.asarray(xi)
    if np.iscomplexobj(xi):
        return np.power(xi.astype(complex), q)
    if np.any(xi < 0):
        raise InvalidParameterError("real transform arguments must be nonnegative")
    return np.power(xi.astype(float), q)


def _as_output(value):
    return value.item() if np.ndim(value) == 0 else value


def _require_mac(sc: Scenario, cls) -> None:
    if not isinstance(sc.mac, cls):
        raise UsageError(f"expected a {cls.name} MAC, got {sc.mac.name}")


def lt_slotted(sc: Scenario, xi):
    _require_mac(sc, Slotted)
    beta, A = sc.beta, sc.pathloss.A
    c = sc.lam * sc.mac.p * A**-2 * kappa(beta, "slotted") * model.frac_moment(sc.fading, beta)
    return _as_output(np.exp(-c * _power(xi, 2.0 / beta)))


def lt_rain_mean(sc: Scenario, xi):
    _require_mac(sc, Rain)
    beta, A = sc.beta, sc.pathloss.A
    c = sc.lam * sc.mac.tau * A**-2 * kappa(beta, "non_slotted") * model.frac_moment(sc.fading, beta)
    return _as_output(np.exp(-c * _power(xi, 2.0 / beta)))


# ---------------------------------------------------------------------------
# Renewal model, general fading


def _exprel(z):
    return special.exprel(z)


def _psi2(z: float) -> float:
    """(e^z - 1 - z) / z^2, stable near 0."""
    if abs(z) < 0.1:
        terms = [1.0 / math.factorial(k + 2) for k in range(10)]
        return sum(c * z**k for k, c in enumerate(terms))
    return (math.expm1(z) - z) / (z * z)


def _divided_exp(x: float, y: float, s):
    """(e^{xs} - e^{ys}) / (y - x) for s <= 0, continuous across x == y."""
    lo, hi = min(x, y), max(x, y)
    return np.exp(lo * s) * (-s) * _exprel((hi - lo) * s)


def _one_minus_g(u, a, beta, fading, spec):
    """1 - E[exp(-u H0) Ltilde(u H1)] for one interferer, in closed form plus a t-integral.

    H0, H1 are the overlaps of the two packets of an interferer with the
    tagged packet. The constant part is 1 - E[exp(-u H0)]; the integral
    carries the second-packet term, which vanishes when Ltilde == 1.
    """
    first = a / (1.0 + a) * u * _psi2(-u)

    def integrand(t):
        weight = (a * a * _divided_exp(a, u, t - 1.0) + a * np.exp(-a * (1.0 - t))) / (1.0 + a)
        return model.tilde_laplace_complement(fading, u * t, beta, spec) * weight

    # layers of width 1/u at t = 0 (from Ltilde(u t)) and 1/max(u, a) at t = 1
    layer = [c / u for c in (1.0, 8.0, 64.0) if c < u]
    scale = max(u, a)
    layer += [1.0 - c / scale for c in (1.0, 8.0, 64.0) if c < scale]
    try:
        second, _ = integrate_vectorized(integrand, 0.0, 1.0, spec, breakpoints=layer)
    except NumericFailure as exc:
        raise NumericFailure(f"renewal t-integral at u={u}: {exc}", exc.value, exc.error) from exc
    return first + second


@lru_cache(maxsize=512)
def _renewal_integral_general(fading, beta, a, spec) -> float:
    q = 2.0 / beta

    def integrand(u):
        return _one_minus_g(u, a, beta, fading, spec) * u ** (-1.0 - q)

    try:
        value, _ = integrate(integrand, 0.0, math.inf, spec, breakpoints=(min(a, 1.0), 1.0))
    except NumericFailure as exc:
        raise NumericFailure(f"renewal outer v-integral: {exc}", exc.value, exc.error) from exc
    return value


def renewal_exponent_general(sc: Scenario, spec: QuadSpec = QuadSpec()) -> float:
    """C such that the renewal mean-interference transform is exp(-C xi^{2/beta}).

    The outer integral runs against Lambda(dv) = c v^{2/beta-1} dv with
    c = 2 lambda pi E[F^{2/beta}] / (A^2 beta); substituting u = xi/v pulls
    xi^{2/beta} out, leaving an integral over u that is computed once.
    """
    _require_mac(sc, Renewal)
    beta, A = sc.beta, sc.pathloss.A
    if sc.mac.epsilon == 0:
        return 0.0
    c = 2.0 * sc.lam * math.pi * model.frac_moment(sc.fading, beta) / (A * A * beta)
    return c * _renewal_integral_general(sc.fading, beta, sc.mac.eps_b, spec)


def lt_renewal_mean_general(sc: Scenario, xi, spec: QuadSpec = QuadSpec()):
    c = renewal_exponent_general(sc, spec)
    return _as_output(np.exp(-c * _power(xi, 2.0 / sc.beta)))


# ---------------------------------------------------------------------------
# Renewal model, no fading


def renewal_bracket_nofading(u: float, a: float) -> float:
    """The bracket i(u) for F == 1 with a = epsilon*B.

    Same function as the printed closed form, rewritten with the divided
    differences D1 = (e^{-u} - e^{-a})/(a-u) and
    D2 = (e^{-u}(a-u) - e^{-u} + e^{-a})/(a-u)^2 so that the removable
    singularity at u == a costs no precision.
    """
    d = a - u
    if d >= 0:
        d1 = math.exp(-u) * _exprel(-d)
        d2 = math.exp(-u) * _psi2(-d)
    else:
        d1 = math.exp(-a) * _exprel(d)
        if d > -0.1:
            d2 = math.exp(-a) * math.exp(d) * _psi2(-d)
        else:
            d2 = math.exp(-a) * (math.exp(d) * (d - 1.0) + 1.0) / (d * d)
    return 1.0 - (a * a * d2 + 2.0 * a * d1 + math.exp(-a)) / (1.0 + a)


def renewal_bracket_printed(u: float, a: float) -> float:
    """i(u) exactly as printed; singular at u == a, used only as a cross-check."""
    d = a - u
    e = math.exp
    return (
        1.0
        - e(-a) * (a * e(a - u) - u) / ((1.0 + a) * d)
        - a * (a * a * e(-u) - a * e(-u) * u - e(-u) * u + e(-a) * u) / ((1.0 + a) * d * d)
    )


@lru_cache(maxsize=512)
def _renewal_integral_nofading(beta, a, spec) -> float:
    q = 2.0 / beta
    tau = a / (1.0 + a)
    # i(u) = tau*u + O(u^2) below _SMALL_U
    head = tau * _SMALL_U ** (1.0 - q) / (1.0 - q)

    def integrand(u):
        return renewal_bracket_nofading(u, a) * u ** (-1.0 - q)

    tail, _ = integrate(integrand, _SMALL_U, math.inf, spec, breakpoints=(a, 1.0))
    return head + tail


def renewal_exponent_nofading(sc: Scenario, spec: QuadSpec = QuadSpec()) -> float:
    _require_mac(sc, Renewal)
    if not isinstance(sc.fading, Deterministic):
        raise UsageError("the no-fading renewal transform requires deterministic fading")
    beta, A = sc.beta, sc.pathloss.A
    if sc.mac.epsilon == 0:
        return 0.0
    c = 2.0 * math.pi * sc.lam / (A * A * beta)
    return c * _renewal_integral_nofading(beta, sc.mac.eps_b, spec)


def lt_renewal_mean_nofading(sc: Scenario, xi, spec: QuadSpec = QuadSpec()):
    """Renewal transform for F == 1; complex xi is accepted (principal branch)."""
    c = renewal_exponent_nofading(sc, spec)
    return _as_output(np.exp(-c * _power(xi, 2.0 / sc.beta)))


# ---------------------------------------------------------------------------
# Renewal model, Rayleigh fading: planar integral in polar coordinates


def _one_minus_g_rayleigh(y, B, eps, spec):
    """1 - E[1/((1+y H0)(1+y H1))] with explicit B and epsilon."""
    a = eps * B

    def frac(x):
        return x / (1.0 + x)

    def pair(x, z):
        return (x + z + x * z) / ((1.0 + x) * (1.0 + z))

    # node off at time 0: only the next packet, starting after an Exp(eps) wait
    off, _ = integrate(lambda s: eps * math.exp(-eps * s) * frac((B - s) * y / B), 0.0, B, spec)

    def on_t(t):
        x_t = (B - t) * y / B
        inner, _ = integrate(
            lambda s: eps * math.exp(-eps * s) * pair(x_t, (t - s) * y / B), 0.0, t, spec
        )
        return inner + math.exp(-eps * t) * frac(x_t)

    on, _ = integrate(on_t, 0.0, B, spec)
    return off / (1.0 + a) + a / (1.0 + a) * on / B


@lru_cache(maxsize=1024)
def _lt_renewal_rayleigh_real(sc: Scenario, xi: float, spec: QuadSpec) -> float:
    if xi == 0 or sc.mac.epsilon == 0:
        return 1.0
    B, eps, pl = sc.mac.B, sc.mac.epsilon, sc.pathloss

    def integrand(rho):
        return 2.0 * math.pi * rho * _one_minus_g_rayleigh(xi / pl(rho), B, eps, spec)

    rho0 = xi ** (1.0 / sc.beta) / pl.A
    try:
        value, _ = integrate(integrand, 0.0, math.inf, spec, breakpoints=(rho0,))
    except NumericFailure as exc:
        raise NumericFailure(f"renewal Rayleigh radial integral: {exc}", exc.value, exc.error) from exc
    return math.exp(-sc.lam * value)


def lt_renewal_mean_rayleigh(sc: Scenario, xi, spec: QuadSpec = QuadSpec()):
    """Renewal transform for Rayleigh fading by nested quadrature over (rho, t, s)."""
    _require_mac(sc, Renewal)
    if not isinstance(sc.fading, Rayleigh):
        raise UsageError("the Rayleigh renewal transform requires Rayleigh fading")
    if np.ndim(xi):
        return np.array([_lt_renewal_rayleigh_real(sc, float(x), spec) for x in np.ravel(xi)]).reshape(
            np.shape(xi)
        )
    if np.iscomplexobj(xi) or xi < 0:
        raise InvalidParameterError("the Rayleigh renewal transform takes real xi >= 0")
    return _lt_renewal_rayleigh_real(sc, float(xi), spec)


def interference_lt(sc: Scenario, spec: QuadSpec = QuadSpec()) -> InterferenceLT:
    """The (mean) interference transform for the scenario's MAC and fading.

    Renewal transforms are returned in their exp(-C xi^{2/beta}) form so they
    can be evaluated on a Bromwich contour.
    """
    if isinstance(sc.mac, Slotted):
        return InterferenceLT("slotted", sc, partial(lt_slotted, sc))
    if isinstance(sc.mac, Rain):
        return InterferenceLT("rain", sc, partial(lt_rain_mean, sc))
    if isinstance(sc.fading, Deterministic):
        c = renewal_exponent_nofading(sc, spec)
    else:
        c = renewal_exponent_general(sc, spec)
    q = 2.0 / sc.beta
    return InterferenceLT("renewal", sc, lambda xi: _as_output(np.exp(-c * _power(xi, q))))


# ---------------------------------------------------------------------------
# Coverage and throughput


def noise_laplace(sc: Scenario, s: float) -> float:
    return math.exp(-s * sc.noise_w)


def coverage_kappa(beta: float, which: str) -> float:
    """kappa * Gamma(1 + 2/beta), the Rayleigh-coverage contention constant."""
    return kappa(beta, which) * special.gamma(1.0 + 2.0 / beta)


def coverage_rayleigh(sc: Scenario) -> float:
    """exp(-lambda tau r^2 T^{2/beta} kappa) times the noise factor (slotted or rain)."""
    if not isinstance(sc.fading, Rayleigh):
        raise UsageError("closed-form coverage requires Rayleigh fading")
    if isinstance(sc.mac, Slotted):
        which = "slotted"
    elif isinstance(sc.mac, Rain):
        which = "non_slotted"
    else:
        raise UsageError("closed-form coverage covers slotted and rain MACs only")
    k = coverage_kappa(sc.beta, which)
    exponent = sc.load * sc.r**2 * sc.T ** (2.0 / sc.beta) * k
    return noise_laplace(sc, sc.coverage_xi) * math.exp(-exponent)


def coverage_rayleigh_renewal(sc: Scenario, spec: QuadSpec = QuadSpec()) -> float:
    xi = sc.coverage_xi
    return noise_laplace(sc, xi) * lt_renewal_mean_rayleigh(sc, xi, spec)


def coverage_nofading(
    sc: Scenario, ispec: InversionSpec = InversionSpec(), qspec: QuadSpec = QuadSpec()
) -> float:
    """P(I <= 1/(T l(r)) - W) for F == 1, by Bromwich inversion of the model's transform."""
    if not isinstance(sc.fading, Deterministic):
        raise UsageError("inversion-based coverage is implemented for F == 1")
    t = 1.0 / sc.coverage_xi - sc.noise_w
    if t <= 0:
        return 0.0
    if sc.load == 0:
        return 1.0
    return invert_laplace_cdf(interference_lt(sc, qspec), t, ispec)


def coverage(sc: Scenario, qspec: QuadSpec = QuadSpec(), ispec: InversionSpec = InversionSpec()) -> float:
    """Mean-interference coverage, dispatching on fading and MAC."""
    if isinstance(sc.fading, Rayleigh):
        if isinstance(sc.mac, Renewal):
            return coverage_rayleigh_renewal(sc, qspec)
        return coverage_rayleigh(sc)
    if isinstance(sc.fading, Deterministic):
        return coverage_nofading(sc, ispec, qspec)
    raise UsageError(f"coverage is available for Rayleigh or no fading, not {sc.fading.name}")


def spatial_throughput(sc: Scenario, coverage: float) -> float:
    """lambda * tau * p_c."""
    if not 0 <= coverage <= 1:
        raise InvalidParameterError("coverage must be a probability")
    return sc.load * coverage
