"""Data behind each figure of the study, one table per plotted curve."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import analytic, optimize, sim
from .errors import UsageError
from .model import Deterministic, PathLoss, Rain, Rayleigh, Renewal, Scenario, Slotted
from .numerics import QuadSpec

TAU_GRID = tuple(np.round(np.arange(0.01, 0.2001, 0.01), 10))
BETA_GRID = tuple(np.round(np.arange(2.1, 8.0001, 0.1), 10))
SIM_TAUS = (0.02, 0.05, 0.1, 0.15)
# back-off rates (in units of 1/B) for the mean-versus-max comparison
SIM_EPS_B = (0.01, 0.02, 0.03, 0.04, 0.045, 0.05, 0.06, 0.08, 0.1, 0.15, 0.2)
FIG5_T = (1.0, 10.0, 100.0)
FIG7_BETAS = (3.0, 4.0, 5.0, 6.0)


@dataclass
class Curve:
    name: str
    rows: list[tuple] = field(default_factory=list)
    with_ci: bool = False
    notes: dict = field(default_factory=dict)

    @property
    def columns(self) -> tuple[str, ...]:
        return ("x", "value", "ci_halfwidth") if self.with_ci else ("x", "value")


def _needs_replications(replications, figure: str) -> int:
    if replications is None:
        raise UsageError(f"{figure} runs simulations; pass --replications explicitly")
    if replications < 2:
        raise UsageError("replications must be at least 2")
    return replications


def fig1_zeta(base: Scenario, **_) -> list[Curve]:
    curve = Curve("fig1_zeta", notes={"x": "beta", "value": "zeta(beta)"})
    curve.rows = [(b, optimize.zeta(b)) for b in BETA_GRID]
    return [curve]


def fig2_throughput_vs_tau(
    base: Scenario, replications=None, sim_cfg: sim.SimConfig | None = None, qspec=QuadSpec(), **_
) -> list[Curve]:
    sc = base.replace(fading=Rayleigh())
    rain = Curve("fig2_throughput_vs_tau_rain", notes={"x": "tau", "value": "lambda tau p_c"})
    renewal = Curve("fig2_throughput_vs_tau_renewal", notes={"x": "tau", "value": "lambda tau p_c"})
    for tau in TAU_GRID:
        s_rain = sc.replace(mac=Rain(tau))
        rain.rows.append((tau, analytic.spatial_throughput(s_rain, analytic.coverage_rayleigh(s_rain))))
        s_ren = sc.replace(mac=Renewal.from_tau(tau))
        renewal.rows.append((tau, analytic.spatial_throughput(s_ren, analytic.coverage_rayleigh_renewal(s_ren, qspec))))
    curves = [rain, renewal]
    if replications is not None:
        cfg = sim.SimConfig(**{**_cfg_fields(sim_cfg), "replications": _needs_replications(replications, "fig2")})
        for tag, make in (("renewal", Renewal.from_tau), ("rain", Rain)):
            curve = Curve(f"fig2_throughput_vs_tau_{tag}_sim", with_ci=True, notes={"seed": cfg.seed})
            for tau in SIM_TAUS:
                s = sc.replace(mac=make(tau))
                est = sim.simulate(s, cfg).coverage("mean")
                curve.rows.append((tau, s.load * est.mean, s.load * est.ci95_halfwidth))
            curves.append(curve)
    return curves


def fig3_convergence(base: Scenario, qspec=QuadSpec(), **_) -> list[Curve]:
    """No fading; renewal at growing density with the space-time load lambda*tau held fixed.

    The x value is the load lambda*tau, i.e. the access fraction of a unit
    density network; a renewal network of density lambda uses tau/lambda per node.
    """
    sc = base.replace(fading=Deterministic(), lam=1.0)
    notes = {"x": "lambda*tau", "value": "lambda tau p_c"}
    rain = Curve("fig3_convergence_rain", notes=notes)
    for load in TAU_GRID:
        s = sc.replace(mac=Rain(load))
        rain.rows.append((load, analytic.spatial_throughput(s, analytic.coverage_nofading(s, qspec=qspec))))
    curves = [rain]
    for lam in (1.0, 10.0, 100.0):
        curve = Curve(f"fig3_convergence_renewal_lambda{int(lam)}", notes={**notes, "lambda": lam})
        for load in TAU_GRID:
            s = sc.replace(lam=lam, mac=Renewal.from_tau(load / lam))
            curve.rows.append((load, analytic.spatial_throughput(s, analytic.coverage_nofading(s, qspec=qspec))))
        curves.append(curve)
    return curves


def fig4_ratio_optimal(base: Scenario, **_) -> list[Curve]:
    curve = Curve("fig4_ratio_optimal", notes={"x": "beta", "value": "percent"})
    for b in BETA_GRID:
        sc = base.replace(pathloss=PathLoss(base.pathloss.A, b), fading=Rayleigh(), noise_w=0.0)
        ratio = optimize.optimal_tau(sc, "rain").d_max / optimize.optimal_tau(sc, "slotted").d_max
        curve.rows.append((b, 100.0 * ratio))
    return [curve]


def fig5_ratio_fixed_tau(base: Scenario, **_) -> list[Curve]:
    curves = []
    for T in FIG5_T:
        curve = Curve(f"fig5_ratio_fixed_tau_T{int(T)}", notes={"x": "beta", "value": "percent", "T": T, "tau": 0.05})
        for b in BETA_GRID:
            sc = base.replace(pathloss=PathLoss(base.pathloss.A, b), fading=Rayleigh(), T=T)
            slotted = analytic.coverage_rayleigh(sc.replace(mac=Slotted(0.05)))
            rain = analytic.coverage_rayleigh(sc.replace(mac=Rain(0.05)))
            curve.rows.append((b, 100.0 * rain / slotted))
        curves.append(curve)
    return curves


def _renewal_sweep(sc: Scenario, cfg: sim.SimConfig):
    """Simulated mean- and max-constraint throughput over SIM_EPS_B."""
    out = []
    for a in SIM_EPS_B:
        s = sc.replace(mac=Renewal(1.0, a))
        run = sim.simulate(s, cfg)
        out.append((s.tau, s.load, run.coverage("mean"), run.coverage("max")))
    return out


def fig6_mean_vs_max_tau(base: Scenario, replications=None, sim_cfg=None, **_) -> list[Curve]:
    cfg = sim.SimConfig(**{**_cfg_fields(sim_cfg), "replications": _needs_replications(replications, "fig6")})
    sc = base.replace(fading=Rayleigh())
    notes = {"x": "tau = eps B/(1 + eps B)", "value": "lambda tau p_c", "seed": cfg.seed}
    mean = Curve("fig6_mean_vs_max_tau_mean", with_ci=True, notes=notes)
    peak = Curve("fig6_mean_vs_max_tau_max", with_ci=True, notes=notes)
    for tau, load, m, x in _renewal_sweep(sc, cfg):
        mean.rows.append((tau, load * m.mean, load * m.ci95_halfwidth))
        peak.rows.append((tau, load * x.mean, load * x.ci95_halfwidth))
    return [mean, peak]


def fig7_mean_vs_max_beta(base: Scenario, replications=None, sim_cfg=None, **_) -> list[Curve]:
    cfg = sim.SimConfig(**{**_cfg_fields(sim_cfg), "replications": _needs_replications(replications, "fig7")})
    notes = {"x": "beta", "value": "optimized lambda tau p_c", "seed": cfg.seed}
    slotted = Curve("fig7_mean_vs_max_beta_slotted", notes=notes)
    rain = Curve("fig7_mean_vs_max_beta_rain", notes=notes)
    mean = Curve("fig7_mean_vs_max_beta_renewal_mean", with_ci=True, notes=notes)
    peak = Curve("fig7_mean_vs_max_beta_renewal_max", with_ci=True, notes=notes)
    for b in FIG7_BETAS:
        sc = base.replace(pathloss=PathLoss(base.pathloss.A, b), fading=Rayleigh(), noise_w=0.0)
        slotted.rows.append((b, optimize.optimal_tau(sc, "slotted").d_max))
        rain.rows.append((b, optimize.optimal_tau(sc, "rain").d_max))
        sweep = _renewal_sweep(sc, cfg)
        for curve, idx in ((mean, 2), (peak, 3)):
            best = max(sweep, key=lambda row: row[1] * row[idx].mean)
            curve.rows.append((b, best[1] * best[idx].mean, best[1] * best[idx].ci95_halfwidth))
    return [slotted, rain, mean, peak]


def _cfg_fields(cfg: sim.SimConfig | None) -> dict:
    cfg = cfg or sim.SimConfig()
    return {f: getattr(cfg, f) for f in cfg.__dataclass_fields__}


FIGURES: dict[str, Callable[..., list[Curve]]] = {
    "fig1_zeta": fig1_zeta,
    "fig2_throughput_vs_tau": fig2_throughput_vs_tau,
    "fig3_convergence": fig3_convergence,
    "fig4_ratio_optimal": fig4_ratio_optimal,
    "fig5_ratio_fixed_tau": fig5_ratio_fixed_tau,
    "fig6_mean_vs_max_tau": fig6_mean_vs_max_tau,
    "fig7_mean_vs_max_beta": fig7_mean_vs_max_beta,
}
SIMULATION_FIGURES = ("fig6_mean_vs_max_tau", "fig7_mean_vs_max_beta")


def reproduce(figure: str, base: Scenario, **kwargs) -> list[Curve]:
    if figure not in FIGURES:
        raise UsageError(f"unknown figure {figure!r}; choose from {', '.join(FIGURES)}")
    return FIGURES[figure](base, **kwargs)
