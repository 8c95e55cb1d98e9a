"""Network, MAC and channel configuration, and the fading functionals.

Every fading law is normalized to mean 1. All types are frozen dataclasses
so scenarios can be hashed, cached and shared freely.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Union

import numpy as np
from scipy import special

from .errors import DomainError, InvalidParameterError, NumericFailure
from .numerics import QuadSpec, halfline_trapezoid, integrate

_SQRT2PI = math.sqrt(2.0 * math.pi)


def _check_beta(beta: float) -> None:
    if not beta > 2:
        raise DomainError(f"beta must exceed 2 (got {beta})")


@dataclass(frozen=True)
class PathLoss:
    """Power-law attenuation l(u) = (A u)^beta."""

    A: float = 1.0
    beta: float = 4.0

    def __post_init__(self):
        _check_beta(self.beta)
        if not self.A > 0:
            raise InvalidParameterError(f"A must be positive (got {self.A})")

    def __call__(self, u):
        return (self.A * u) ** self.beta


# ---------------------------------------------------------------------------
# Fading laws


@dataclass(frozen=True)
class Deterministic:
    """No fading, F = 1."""

    value: float = 1.0

    def __post_init__(self):
        if self.value != 1.0:
            raise InvalidParameterError("fading must have mean 1")

    name = "deterministic"

    def frac_moment(self, beta):
        _check_beta(beta)
        return 1.0

    def laplace(self, s):
        return np.exp(-s)

    def sample(self, rng, size=None):
        return 1.0 if size is None else np.ones(size)


@dataclass(frozen=True)
class Rayleigh:
    """Exponential power fading with rate ``mu`` (only mu = 1 is accepted)."""

    mu: float = 1.0

    def __post_init__(self):
        if self.mu != 1.0:
            raise InvalidParameterError("fading must have mean 1 (mu = 1)")

    name = "rayleigh"

    def frac_moment(self, beta):
        _check_beta(beta)
        return 2.0 * special.gamma(2.0 / beta) / beta

    def laplace(self, s):
        return 1.0 / (1.0 + s / self.mu)

    def sample(self, rng, size=None):
        return rng.exponential(1.0 / self.mu, size)


@dataclass(frozen=True)
class LogNormal:
    """Shadowing F = exp(-sigma^2/2 + sigma Z), Z standard normal."""

    sigma: float = 1.0

    def __post_init__(self):
        if not self.sigma > 0:
            raise InvalidParameterError("sigma must be positive")

    name = "lognormal"

    def frac_moment(self, beta):
        _check_beta(beta)
        return math.exp(self.sigma**2 * (2.0 - beta) / beta**2)

    def _value(self, z):
        return math.exp(min(700.0, max(-700.0, -0.5 * self.sigma**2 + self.sigma * z)))

    def expect(self, g, spec: QuadSpec = QuadSpec()) -> float:
        """E[g(F)] by quadrature against the normal density of log F."""
        def integrand(z):
            return g(self._value(z)) * math.exp(-0.5 * z * z) / _SQRT2PI

        value, _ = integrate(integrand, -math.inf, math.inf, spec, breakpoints=(0.0,))
        return value

    def laplace(self, s):
        arr = np.asarray(s, dtype=float)
        out = _lognormal_laplace(self.sigma, arr.reshape(1, -1), complement=False)[0].reshape(arr.shape)
        return out if arr.ndim else float(out)

    def sample(self, rng, size=None):
        return np.exp(-0.5 * self.sigma**2 + self.sigma * rng.standard_normal(size))


@dataclass(frozen=True)
class Nakagami:
    """Nakagami-(k, 1) power fading: Gamma(k) with mean 1 and variance 1/k."""

    k: float = 1.0

    def __post_init__(self):
        if not self.k > 0:
            raise InvalidParameterError("k must be positive")

    name = "nakagami"

    def frac_moment(self, beta):
        _check_beta(beta)
        q = 2.0 / beta
        return math.exp(special.gammaln(self.k + q) - special.gammaln(self.k) - q * math.log(self.k))

    def laplace(self, s):
        return (1.0 + s / self.k) ** (-self.k)

    def density(self, x):
        k = self.k
        return math.exp(k * math.log(k) - special.gammaln(k) + (k - 1) * math.log(x) - k * x)

    def sample(self, rng, size=None):
        return rng.gamma(self.k, 1.0 / self.k, size)


FadingModel = Union[Deterministic, Rayleigh, LogNormal, Nakagami]


def frac_moment(f: FadingModel, beta: float) -> float:
    """E[F^{2/beta}]."""
    value = f.frac_moment(beta)
    if not math.isfinite(value):
        raise InvalidParameterError(f"E[F^(2/beta)] is not finite for {f} at beta={beta}")
    return value


def laplace_f(f: FadingModel, s):
    """E[exp(-s F)] for s >= 0."""
    if np.any(np.asarray(s) < 0):
        raise InvalidParameterError("Laplace argument must be nonnegative")
    return f.laplace(s)


# Fading expectations are trapezoid sums on a uniform grid in log F (gamma
# laws) or in the underlying normal variable (log-normal). The integrands are
# analytic in a strip around the real axis, so the rule converges geometrically
# and the grid range is set from explicit tail bounds.

_TAIL = 1e-17


def _gamma_shape(f: FadingModel) -> float:
    return 1.0 if isinstance(f, Rayleigh) else f.k


def _gamma_average(k: float, g, q: float, eta_min: float):
    """E[F^q g(F)] for F ~ Gamma(k, 1/k), with g bounded by min(1, c eta/F)."""
    upper = q + k
    norm = k * math.log(k) - special.gammaln(k)
    # integrand <= e^norm * min(x^upper, c eta x^(upper-1)) near the origin
    slack = math.log(_TAIL) - max(norm, 0.0)
    lows = [(slack + math.log(upper)) / upper + min(0.0, math.log(eta_min))]
    if upper - 1.0 > 0:
        lows.append((slack + math.log(upper - 1.0)) / (upper - 1.0))
    y_lo = max(lows)
    # the log-weight is concave in y; walk right until it is negligible
    y_hi = max(0.0, math.log(upper / k))
    while norm + upper * y_hi - k * math.exp(y_hi) > -45.0:
        y_hi += 0.125
    step = min(1.0 / 16.0, 0.25 / math.sqrt(k))

    def integrand(y):
        x = np.exp(y)
        weight = np.exp(norm + upper * y - k * x)
        return weight[:, None] * g(x[:, None])

    return halfline_trapezoid(integrand, y_lo, y_hi, step)


def _normal_grid(sigma: float):
    half = 14.0 + 2.0 * sigma
    return -half, half, 0.125 / max(1.0, sigma)


def _lognormal_average(sigma: float, g, q: float):
    """E[F^q g(F)] for log-normal F of unit mean."""
    lo, hi, step = _normal_grid(sigma)

    def integrand(z):
        x = np.exp(-0.5 * sigma**2 + sigma * z)
        weight = x**q * np.exp(-0.5 * z * z) / _SQRT2PI
        return weight[:, None] * g(x[:, None])

    return halfline_trapezoid(integrand, lo, hi, step)


def _lognormal_laplace(sigma: float, s: np.ndarray, complement: bool, log_mean: float | None = None):
    """E[exp(-s X)] (or its complement) for an array ``s`` of shape (n, m).

    X = exp(log_mean + sigma Z); the default log_mean gives E[X] = 1.
    """
    mu = -0.5 * sigma**2 if log_mean is None else log_mean
    lo, hi, step = _normal_grid(sigma)
    flat = s.ravel()
    out = np.empty_like(flat)
    err = np.empty_like(flat)
    chunk = 4096
    for i in range(0, flat.size, chunk):
        part = flat[i : i + chunk]

        def integrand(z, part=part):
            x = np.exp(mu + sigma * z)
            e = -np.expm1(-x[:, None] * part[None, :]) if complement else np.exp(-x[:, None] * part[None, :])
            return np.exp(-0.5 * z * z)[:, None] / _SQRT2PI * e

        out[i : i + chunk], err[i : i + chunk] = halfline_trapezoid(integrand, lo, hi, step)
    return out.reshape(s.shape), err.reshape(s.shape)


def _tilde(f: FadingModel, eta, beta: float, spec: QuadSpec, complement: bool):
    _check_beta(beta)
    eta_arr = np.asarray(eta, dtype=float)
    if np.any(eta_arr < 0) or np.any(np.isnan(eta_arr)):
        raise InvalidParameterError("eta must be nonnegative")
    flat = eta_arr.ravel()
    q = 2.0 / beta
    if isinstance(f, Deterministic):
        out = -np.expm1(-flat) if complement else np.exp(-flat)
        return out.reshape(eta_arr.shape) if eta_arr.ndim else float(out[0])
    out = np.full(flat.shape, 0.0 if complement else 1.0)
    pos = flat > 0
    if np.any(pos):
        e = flat[pos][None, :]
        if isinstance(f, (Rayleigh, Nakagami)):
            k = _gamma_shape(f)
            if complement:
                g = lambda x: -np.expm1(-k * np.log1p(e / (k * x)))
            else:
                g = lambda x: np.exp(-k * np.log1p(e / (k * x)))
            value, err = _gamma_average(k, g, q, float(e.min()))
            m = f.frac_moment(beta)
            value, err = value / m, err / m
        elif isinstance(f, LogNormal):
            # weighting F' by F'^q shifts its log-mean by q sigma^2, so F/F' is
            # log-normal with log-mean -q sigma^2 and log-variance 2 sigma^2
            value, err = _lognormal_laplace(math.sqrt(2.0) * f.sigma, e, complement, log_mean=-q * f.sigma**2)
            value, err = value[0], err[0]
        else:
            raise InvalidParameterError(f"unknown fading model {f!r}")
        bad = err > np.maximum(spec.abs_tol, spec.rel_tol * np.abs(value))
        if np.any(bad):
            i = int(np.argmax(bad))
            raise NumericFailure(
                f"fading average for {f} at eta={e[0, i]:g} did not converge", float(value[i]), float(err[i])
            )
        out[pos] = value
    return out.reshape(eta_arr.shape) if eta_arr.ndim else float(out[0])


def tilde_laplace(f: FadingModel, eta, beta: float, spec: QuadSpec = QuadSpec()):
    """E[F'^{2/beta} L_F(eta / F')] / E[F^{2/beta}] with F, F' i.i.d. fading.

    This is the transform of the second-packet fading seen from a node whose
    first-packet received power is fixed, which makes the node's distance
    biased by F'^{2/beta}. ``eta`` may be a scalar or an array.
    """
    return _tilde(f, eta, beta, spec, complement=False)


def tilde_laplace_complement(f: FadingModel, eta, beta: float, spec: QuadSpec = QuadSpec()):
    """1 - tilde_laplace(f, eta, beta), computed without cancellation for small eta."""
    return _tilde(f, eta, beta, spec, complement=True)


def sample(f: FadingModel, rng: np.random.Generator, size=None):
    """Draw fading marks from ``rng``."""
    return f.sample(rng, size)


# ---------------------------------------------------------------------------
# MAC variants


@dataclass(frozen=True)
class Slotted:
    p: float = 0.05

    def __post_init__(self):
        if not 0 <= self.p <= 1:
            raise InvalidParameterError("p must lie in [0, 1]")

    name = "slotted"

    @property
    def tau(self) -> float:
        return self.p

    def with_tau(self, tau: float) -> "Slotted":
        return Slotted(tau)


@dataclass(frozen=True)
class Renewal:
    """Packets of length B separated by exponential back-offs of rate epsilon.

    epsilon = 0 is a node that never transmits.
    """

    B: float = 1.0
    epsilon: float = 0.05 / 0.95

    def __post_init__(self):
        if not (self.B > 0 and self.epsilon >= 0 and math.isfinite(self.epsilon)):
            raise InvalidParameterError("B must be positive and epsilon finite and nonnegative")

    name = "renewal"

    @classmethod
    def from_tau(cls, tau: float, B: float = 1.0) -> "Renewal":
        if not 0 <= tau < 1:
            raise InvalidParameterError("renewal access fraction must lie in [0, 1)")
        return cls(B=B, epsilon=tau / (B * (1.0 - tau)))

    @property
    def eps_b(self) -> float:
        return self.epsilon * self.B

    @property
    def tau(self) -> float:
        a = self.eps_b
        return a / (1.0 + a)

    def with_tau(self, tau: float) -> "Renewal":
        return Renewal.from_tau(tau, self.B)


@dataclass(frozen=True)
class Rain:
    """Space-time Poisson packets; transmission starts at rate lambda*tau/B."""

    tau: float = 0.05
    B: float = 1.0

    def __post_init__(self):
        if not 0 <= self.tau <= 1:
            raise InvalidParameterError("tau must lie in [0, 1]")
        if not self.B > 0:
            raise InvalidParameterError("B must be positive")

    name = "rain"

    def with_tau(self, tau: float) -> "Rain":
        return Rain(tau, self.B)


MacModel = Union[Slotted, Renewal, Rain]


@dataclass(frozen=True)
class Scenario:
    """One experiment: density ``lam``, link length ``r``, SINR threshold ``T``
    (linear), constant noise power ``noise_w``, fading, path loss and MAC.

    Defaults are lambda=1, r=1, T=10, beta=4, Rayleigh fading, no noise.
    """

    lam: float = 1.0
    r: float = 1.0
    T: float = 10.0
    noise_w: float = 0.0
    fading: FadingModel = field(default_factory=Rayleigh)
    pathloss: PathLoss = field(default_factory=PathLoss)
    mac: MacModel = field(default_factory=Slotted)

    def __post_init__(self):
        if not (self.lam > 0 and self.r > 0 and self.T > 0):
            raise InvalidParameterError("lambda, r and T must be positive")
        if not self.noise_w >= 0:
            raise InvalidParameterError("noise must be nonnegative")

    @property
    def beta(self) -> float:
        return self.pathloss.beta

    @property
    def tau(self) -> float:
        return self.mac.tau

    @property
    def load(self) -> float:
        """Space-time density of channel access, lambda * tau."""
        return self.lam * self.mac.tau

    @property
    def coverage_xi(self) -> float:
        """T l(r), the transform argument at which coverage is evaluated."""
        return self.T * self.pathloss(self.r)

    def replace(self, **changes) -> "Scenario":
        return replace(self, **changes)
