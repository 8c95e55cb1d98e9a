"""Throughput optima and parameter sweeps built on the closed-form coverage."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

from . import analytic
from .errors import AlohaError, DomainError, UsageError
from .model import PathLoss, Rain, Rayleigh, Scenario, Slotted
from .numerics import InversionSpec, QuadSpec

_MODELS = {"slotted": ("slotted", Slotted), "rain": ("non_slotted", Rain)}


def zeta(beta: float) -> float:
    """Contention cost of non-synchronization, 2 beta / (2 + beta)."""
    if not beta > 2:
        raise DomainError(f"beta must exceed 2 (got {beta})")
    return 2.0 * beta / (2.0 + beta)


def throughput_ratio(beta: float) -> float:
    """Best non-slotted over best slotted spatial throughput, 1/zeta(beta)."""
    return 1.0 / zeta(beta)


@dataclass(frozen=True)
class OptimaReport:
    tau_max: float
    d_max: float
    p_c_at_opt: float
    model_tag: str


def optimal_tau(sc: Scenario, model: str) -> OptimaReport:
    """Access fraction maximizing lambda*tau*p_c under Rayleigh fading and no noise.

    Coverage is exp(-lambda tau K) with K = r^2 T^{2/beta} kappa, so the
    throughput lambda tau exp(-lambda tau K) peaks at lambda tau = 1/K. When
    that would need tau > 1 every node simply transmits all the time.
    """
    if model not in _MODELS:
        raise UsageError(f"model must be one of {sorted(_MODELS)}")
    if sc.noise_w != 0:
        raise UsageError("the throughput optimum assumes no noise")
    if not isinstance(sc.fading, Rayleigh):
        raise UsageError("the throughput optimum assumes Rayleigh fading")
    which, _ = _MODELS[model]
    k = sc.r**2 * sc.T ** (2.0 / sc.beta) * analytic.coverage_kappa(sc.beta, which)
    tau = min(1.0, 1.0 / (sc.lam * k))
    p_c = math.exp(-sc.lam * tau * k)
    return OptimaReport(tau, sc.lam * tau * p_c, p_c, model)


@dataclass
class SweepRow:
    x: float
    value: float = math.nan
    error: str = ""


@dataclass
class SweepTable:
    axis: str
    quantity: str
    rows: list[SweepRow] = field(default_factory=list)

    def xs(self) -> list[float]:
        return [r.x for r in self.rows]

    def values(self) -> list[float]:
        return [r.value for r in self.rows]


def _apply(sc: Scenario, axis: str, x: float) -> Scenario:
    if axis == "tau":
        return sc.replace(mac=sc.mac.with_tau(x))
    if axis == "beta":
        return sc.replace(pathloss=PathLoss(sc.pathloss.A, x))
    if axis == "T":
        return sc.replace(T=x)
    if axis == "lambda":
        return sc.replace(lam=x)
    raise UsageError(f"unknown sweep axis {axis!r}")


def evaluate(
    sc: Scenario,
    quantity: str,
    xi: float | None = None,
    qspec: QuadSpec = QuadSpec(),
    ispec: InversionSpec = InversionSpec(),
) -> float:
    """One analytic quantity for a scenario: coverage, throughput, lt_at_point or zeta."""
    if quantity == "zeta":
        return zeta(sc.beta)
    if quantity == "coverage":
        return analytic.coverage(sc, qspec, ispec)
    if quantity == "throughput":
        return analytic.spatial_throughput(sc, analytic.coverage(sc, qspec, ispec))
    if quantity == "lt_at_point":
        point = sc.coverage_xi if xi is None else xi
        return float(analytic.interference_lt(sc, qspec)(point))
    raise UsageError(f"unknown quantity {quantity!r}")


def sweep(
    sc_template: Scenario,
    axis: str,
    grid: Sequence[float],
    quantity: str,
    xi: float | None = None,
    qspec: QuadSpec = QuadSpec(),
    ispec: InversionSpec = InversionSpec(),
) -> SweepTable:
    """Evaluate ``quantity`` along ``axis``; failures are kept in the row's ``error``."""
    if axis not in ("tau", "beta", "T", "lambda"):
        raise UsageError(f"unknown sweep axis {axis!r}")
    table = SweepTable(axis, quantity)
    for x in grid:
        row = SweepRow(float(x))
        try:
            row.value = evaluate(_apply(sc_template, axis, float(x)), quantity, xi, qspec, ispec)
        except (AlohaError, ValueError, ArithmeticError) as exc:
            row.error = f"{type(exc).__name__}: {exc}"
        table.rows.append(row)
    return table
