"""Acceptance checks: closed-form identities, cross-route agreement and simulation oracles.

Each criterion returns a list of ``Check`` records; ``run`` evaluates a level
(``fast``: analytic checks only, ``full``: adds the Monte Carlo oracles).
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import analytic, optimize, sim
from .errors import UsageError
from .model import Deterministic, PathLoss, Rain, Rayleigh, Renewal, Scenario, Slotted
from .numerics import QuadSpec


@dataclass
class Check:
    name: str
    passed: bool
    observed: object
    expected: object
    tolerance: object = None
    note: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        tol = "" if self.tolerance is None else f" tol={self.tolerance}"
        note = f" ({self.note})" if self.note else ""
        return f"  {status} {self.name}: observed={_fmt(self.observed)} expected={_fmt(self.expected)}{tol}{note}"


@dataclass
class CriterionResult:
    number: int
    title: str
    checks: list[Check] = field(default_factory=list)
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status} criterion {self.number}: {self.title} [{self.seconds:.1f}s]"


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.10g}"
    return str(v)


def _close(name, observed, expected, tol, relative=False, note="") -> Check:
    scale = abs(expected) if relative else 1.0
    return Check(name, abs(observed - expected) <= tol * scale, observed, expected, tol, note)


# ---------------------------------------------------------------------------
# Analytic criteria


def criterion_1(**_) -> list[Check]:
    checks = []
    betas = np.linspace(2.05, 12.0, 200)
    worst = max(abs(optimize.zeta(b) - 2 * b / (2 + b)) for b in betas)
    checks.append(Check("zeta equals 2b/(2+b) on a grid", worst == 0.0, worst, 0.0))
    checks.append(_close("zeta(2+1e-6) -> 1", optimize.zeta(2 + 1e-6), 1.0, 1e-5))
    checks.append(_close("zeta(1e6) -> 2", optimize.zeta(1e6), 2.0, 1e-5))
    increasing = all(np.diff([optimize.zeta(b) for b in betas]) > 0)
    checks.append(Check("zeta increasing in beta", increasing, increasing, True))
    # the two transforms at equal load differ exactly by the factor zeta
    worst = 0.0
    for beta in (2.5, 3.0, 4.0, 6.0):
        for xi in (0.01, 0.3, 1.0, 10.0):
            sc = Scenario(fading=Rayleigh(), pathloss=PathLoss(1.0, beta))
            slotted = analytic.lt_slotted(sc.replace(mac=Slotted(0.05)), xi)
            rain = analytic.lt_rain_mean(sc.replace(mac=Rain(0.05)), xi)
            worst = max(worst, abs(math.log(rain) / math.log(slotted) - optimize.zeta(beta)))
    checks.append(Check("zeta-consistency of rain vs slotted transforms", worst <= 1e-12, worst, 0.0, 1e-12))
    return checks


def criterion_2(**_) -> list[Check]:
    checks = []
    base = Scenario(lam=1.0, r=1.0, T=10.0, fading=Rayleigh())
    for tag, mac, target in (("slotted", Slotted(0.05), 0.4583), ("rain", Rain(0.05), 0.3533)):
        sc = base.replace(mac=mac)
        closed = analytic.coverage_rayleigh(sc)
        via_lt = analytic.noise_laplace(sc, sc.coverage_xi) * analytic.interference_lt(sc)(sc.coverage_xi)
        checks.append(_close(f"{tag} closed form vs transform path", closed, via_lt, 1e-12))
        checks.append(Check(f"{tag} coverage to 4 significant digits", f"{closed:.4g}" == f"{target:.4g}", closed, target))
    return checks


def criterion_3(qspec: QuadSpec = QuadSpec(), **_) -> list[Check]:
    worst_nf = worst_ray = 0.0
    for beta in (3.0, 4.0, 5.0):
        for tau in (0.05, 0.3, 0.7):
            base = Scenario(pathloss=PathLoss(1.0, beta), mac=Renewal.from_tau(tau))
            det, ray = base.replace(fading=Deterministic()), base.replace(fading=Rayleigh())
            for xi in (0.1, 0.5, 1.0, 2.0, 5.0):
                g_det = analytic.lt_renewal_mean_general(det, xi, qspec)
                g_ray = analytic.lt_renewal_mean_general(ray, xi, qspec)
                worst_nf = max(worst_nf, abs(g_det - analytic.lt_renewal_mean_nofading(det, xi, qspec)))
                worst_ray = max(worst_ray, abs(g_ray - analytic.lt_renewal_mean_rayleigh(ray, xi, qspec)))
    return [
        Check("general vs no-fading renewal transform (max abs gap)", worst_nf <= 1e-5, worst_nf, 0.0, 1e-5),
        Check("general vs Rayleigh renewal transform (max abs gap)", worst_ray <= 1e-5, worst_ray, 0.0, 1e-5),
    ]


def criterion_5(qspec: QuadSpec = QuadSpec(), **_) -> list[Check]:
    base = Scenario(fading=Deterministic())
    loads = np.round(np.arange(0.01, 0.2001, 0.01), 10)
    worst_100, gap_1 = 0.0, []
    for load in loads:
        s_rain = base.replace(mac=Rain(load))
        d_rain = analytic.spatial_throughput(s_rain, analytic.coverage_nofading(s_rain, qspec=qspec))
        for lam in (1.0, 100.0):
            s = base.replace(lam=lam, mac=Renewal.from_tau(load / lam))
            d = analytic.spatial_throughput(s, analytic.coverage_nofading(s, qspec=qspec))
            if lam == 100.0:
                worst_100 = max(worst_100, abs(d / d_rain - 1.0))
            else:
                gap_1.append(d / d_rain - 1.0)
    sign = "renewal above rain" if min(gap_1) > 0 else ("renewal below rain" if max(gap_1) < 0 else "mixed")
    return [
        Check("lambda=100 renewal within 3% of rain (max rel gap)", worst_100 <= 0.03, worst_100, 0.0, 0.03),
        Check(
            "lambda=1 gap is visible",
            max(abs(g) for g in gap_1) > worst_100,
            max(gap_1, key=abs),
            "nonzero",
            note=f"{sign}; relative gap from {min(gap_1):+.4f} to {max(gap_1):+.4f}",
        ),
    ]


def _kappa_cov_independent(beta: float, model: str) -> float:
    if model == "slotted":
        return math.pi * math.gamma(1 - 2 / beta) * math.gamma(1 + 2 / beta)
    return 4 * math.pi * math.gamma(2 / beta) * math.gamma(1 - 2 / beta) / (2 + beta)


def criterion_6(**_) -> list[Check]:
    checks = []
    for beta in (3.0, 4.0, 5.0):
        sc = Scenario(fading=Rayleigh(), pathloss=PathLoss(1.0, beta))
        for model, mac in (("slotted", Slotted), ("rain", Rain)):
            rep = optimize.optimal_tau(sc, model)
            k = sc.r**2 * sc.T ** (2 / beta) * _kappa_cov_independent(beta, model)
            tau_cf = min(1.0, 1.0 / (sc.lam * k))
            d_cf = 1.0 / (math.e * k) if tau_cf < 1 else sc.lam * math.exp(-sc.lam * k)
            tag = f"{model} beta={beta:g}"
            checks.append(_close(f"{tag} tau_max", rep.tau_max, tau_cf, 1e-10, relative=True))
            checks.append(_close(f"{tag} d_max", rep.d_max, d_cf, 1e-10, relative=True))
            p_c = analytic.coverage_rayleigh(sc.replace(mac=mac(rep.tau_max)))
            checks.append(_close(f"{tag} p_c at optimum is 1/e", p_c, 1.0 / math.e, 1e-12))
            step = 1e-3
            grid = np.arange(step, 0.3 + step / 2, step)
            values = [analytic.spatial_throughput(s, analytic.coverage_rayleigh(s)) for s in (sc.replace(mac=mac(t)) for t in grid)]
            best = float(grid[int(np.argmax(values))])
            checks.append(_close(f"{tag} grid argmax within one step", best, rep.tau_max, step))
    return checks


def criterion_7(**_) -> list[Check]:
    betas = np.linspace(2.05, 20.0, 300)
    ratios = [optimize.throughput_ratio(b) for b in betas]
    return [
        Check("throughput_ratio(4) == 0.75", optimize.throughput_ratio(4.0) == 0.75, optimize.throughput_ratio(4.0), 0.75),
        Check("ratio decreasing in beta", bool(np.all(np.diff(ratios) < 0)), bool(np.all(np.diff(ratios) < 0)), True),
        _close("ratio(2+1e-6) -> 1", optimize.throughput_ratio(2 + 1e-6), 1.0, 1e-5),
        _close("ratio(1e6) -> 0.5", optimize.throughput_ratio(1e6), 0.5, 1e-5),
    ]


# ---------------------------------------------------------------------------
# Simulation criteria


def _cfg(seed: int, offset: int, replications: int, base: sim.SimConfig | None) -> sim.SimConfig:
    base = base or sim.SimConfig()
    derived = int(np.random.SeedSequence([seed, offset]).generate_state(1, np.uint64)[0])
    return sim.SimConfig(base.window_side, base.boundary, base.guard_width, replications, derived, base.workers)


def criterion_4(seed: int = 0, replications: int | None = None, sim_cfg=None, qspec=QuadSpec(), **_) -> list[Check]:
    n = replications or 20_000
    checks = []
    base = Scenario(fading=Rayleigh())
    for i, tau in enumerate((0.02, 0.05, 0.1, 0.15)):
        cfg = _cfg(seed, 400 + i, n, sim_cfg)
        s_ren = base.replace(mac=Renewal.from_tau(tau))
        est = sim.simulate(s_ren, cfg).coverage("mean")
        target = analytic.coverage_rayleigh_renewal(s_ren, qspec)
        checks.append(Check(f"renewal tau={tau} sim CI covers analytic", est.covers(target), est.mean, target, f"+-{est.ci95_halfwidth:.4f}", f"n={n}"))
        cfg = _cfg(seed, 450 + i, n, sim_cfg)
        s_rain = base.replace(mac=Rain(tau))
        est = sim.simulate(s_rain, cfg).coverage("mean")
        target = analytic.coverage_rayleigh(s_rain)
        checks.append(Check(f"rain tau={tau} sim CI covers analytic", est.covers(target), est.mean, target, f"+-{est.ci95_halfwidth:.4f}", f"n={n}"))
    return checks


def criterion_8(seed: int = 0, replications: int | None = None, sim_cfg=None, qspec=QuadSpec(), **_) -> list[Check]:
    n = replications or 100_000
    sc = Scenario(fading=Deterministic(), mac=Slotted(0.05))
    analytic_value = analytic.coverage_nofading(sc, qspec=qspec)
    est = sim.simulate(sc, _cfg(seed, 800, n, sim_cfg)).coverage("mean")
    return [_close("slotted F=1 inversion vs simulation", est.mean, analytic_value, 0.005, note=f"n={n}, sim CI +-{est.ci95_halfwidth:.4f}")]


def criterion_9(seed: int = 0, replications: int | None = None, sim_cfg=None, **_) -> list[Check]:
    n = replications or 5_000
    # one seed for every grid point: common random numbers smooth the curves
    cfg = _cfg(seed, 900, n, sim_cfg)
    sc = Scenario(fading=Rayleigh())
    eps_b, d_mean, d_max = [], [], []
    for a in (0.01, 0.02, 0.03, 0.04, 0.045, 0.05, 0.06, 0.08, 0.1, 0.15, 0.2):
        s = sc.replace(mac=Renewal(1.0, a))
        run = sim.simulate(s, cfg)
        eps_b.append(a)
        d_mean.append(s.load * run.coverage("mean").mean)
        d_max.append(s.load * run.coverage("max").mean)
    d_mean, d_max = np.array(d_mean), np.array(d_max)
    below = bool(np.all(d_max < d_mean))
    gaps = 1.0 - d_max / d_mean
    opt_gap = 1.0 - d_max.max() / d_mean.max()
    a_mean, a_max = eps_b[int(np.argmax(d_mean))], eps_b[int(np.argmax(d_max))]
    return [
        Check("max-constraint throughput below mean-constraint everywhere", below, below, True, note=f"n={n}"),
        Check("unoptimized gap reaches 30%", gaps.max() >= 0.30, float(gaps.max()), ">= 0.30"),
        Check("optimized gap in [15%, 40%]", 0.15 <= opt_gap <= 0.40, float(opt_gap), "[0.15, 0.40]"),
        Check("mean-constraint optimum within factor 2 of eps B = 0.045", 0.0225 <= a_mean <= 0.09, a_mean, 0.045),
        Check("max-constraint optimum within factor 2 of eps B = 0.045", 0.0225 <= a_max <= 0.09, a_max, 0.045),
    ]


def criterion_10(seed: int = 0, replications: int | None = None, sim_cfg=None, qspec=QuadSpec(), **_) -> list[Check]:
    n = replications or 100_000
    checks = []
    base = Scenario(fading=Rayleigh())
    for i, mac in enumerate((Slotted(0.05), Rain(0.05), Renewal.from_tau(0.05))):
        sc = base.replace(mac=mac)
        run = sim.simulate(sc, _cfg(seed, 1000 + i, n, sim_cfg))
        est = sim.empirical_laplace(run.interference_mean, 1.0)
        target = float(analytic.interference_lt(sc, qspec)(1.0))
        checks.append(Check(f"{mac.name} E[exp(-I)] CI covers transform", est.covers(target), est.mean, target, f"+-{est.ci95_halfwidth:.4f}", f"n={n}"))
    return checks


CRITERIA: dict[int, tuple[str, Callable[..., list[Check]]]] = {
    1: ("zeta curve and zeta-consistency", criterion_1),
    2: ("closed-form Rayleigh coverage", criterion_2),
    3: ("general-fading renewal transform specializations", criterion_3),
    4: ("simulation vs analytic coverage", criterion_4),
    5: ("renewal to rain convergence", criterion_5),
    6: ("throughput optima", criterion_6),
    7: ("optimal throughput ratio curve", criterion_7),
    8: ("no-fading inversion vs simulation", criterion_8),
    9: ("mean vs max interference constraint", criterion_9),
    10: ("empirical Laplace oracle", criterion_10),
}
LEVELS = {"fast": (1, 2, 3, 5, 6, 7), "full": tuple(range(1, 11))}


def run_criterion(number: int, **kwargs) -> CriterionResult:
    title, fn = CRITERIA[number]
    start = time.perf_counter()
    result = CriterionResult(number, title, fn(**kwargs))
    result.seconds = time.perf_counter() - start
    return result


def run(level: str = "fast", report: Callable[[str], None] = print, **kwargs) -> list[CriterionResult]:
    if level not in LEVELS:
        raise UsageError(f"level must be one of {sorted(LEVELS)}")
    results = []
    for number in LEVELS[level]:
        result = run_criterion(number, **kwargs)
        report(result.summary())
        for check in result.checks:
            report(check.line())
        results.append(result)
    return results
