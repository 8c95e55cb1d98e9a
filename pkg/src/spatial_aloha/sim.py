"""Spatial Monte Carlo simulator for slotted, renewal and rain Aloha.

Each replication places a tagged link on top of a Poisson network, lets the
MAC decide which interferers overlap the tagged packet on [0, B), and records
the time-averaged and the maximal interference at the tagged receiver.

Only nodes whose transmissions can overlap [0, B) influence the tagged link,
so the simulators draw that thinned process directly. Independent thinning of
a Poisson process is again Poisson, so this is exact in law and avoids
touching the ~lambda * side^2 silent nodes.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import model
from .errors import InvalidParameterError, UsageError
from .model import Rain, Renewal, Scenario, Slotted


@dataclass(frozen=True)
class SimConfig:
    """Simulation protocol.

    ``boundary`` is ``"torus"`` (distances wrap around the square window, so
    the tagged receiver sees a homogeneous plane) or ``"guard_zone"`` (plain
    Euclidean distances in a bounded window; the tagged transmitter is placed
    uniformly at distance at least ``guard_width`` from the window edge).
    """

    window_side: float = 300.0
    boundary: str = "torus"
    guard_width: float = 0.0
    replications: int = 1000
    seed: int = 0
    workers: int = 1

    def __post_init__(self):
        if self.boundary not in ("torus", "guard_zone"):
            raise InvalidParameterError("boundary must be 'torus' or 'guard_zone'")
        if not self.window_side > 0:
            raise InvalidParameterError("window_side must be positive")
        if not 0 <= self.guard_width < self.window_side / 2:
            raise InvalidParameterError("guard_width must lie in [0, window_side/2)")
        if self.replications < 1:
            raise InvalidParameterError("replications must be >= 1")
        if self.workers < 1:
            raise InvalidParameterError("workers must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise InvalidParameterError("seed must be a 64-bit unsigned integer")


@dataclass(frozen=True)
class Estimate:
    mean: float
    std_error: float
    ci95_halfwidth: float
    n: int

    @classmethod
    def from_samples(cls, values) -> "Estimate":
        v = np.asarray(values, dtype=float)
        n = v.size
        se = float(v.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0
        return cls(float(v.mean()), se, 1.96 * se, n)

    def covers(self, value: float) -> bool:
        return abs(self.mean - value) <= self.ci95_halfwidth


@dataclass(frozen=True)
class TimelineEvent:
    node_id: int
    kind: str  # "tx_start" or "tx_end"
    time: float


@dataclass(frozen=True)
class Network:
    transmitters: np.ndarray  # (n, 2)
    receivers: np.ndarray  # (n, 2)
    tagged_tx: np.ndarray  # (2,)
    tagged_rx: np.ndarray  # (2,)


@dataclass
class SimRun:
    """Per-replication outputs; slotted runs have identical mean and max arrays."""

    interference_mean: np.ndarray
    interference_max: np.ndarray
    success_mean: np.ndarray
    success_max: np.ndarray
    config: SimConfig = field(repr=False, default=None)

    def coverage(self, constraint: str = "mean") -> Estimate:
        flags = self.success_mean if constraint == "mean" else self.success_max
        return estimate_coverage(flags)


# ---------------------------------------------------------------------------
# Random streams and geometry


def replication_rng(seed: int, rep: int) -> np.random.Generator:
    """Independent stream for replication ``rep``, derived from the counter."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(rep,))))


def _random_direction(rng, size=None):
    theta = rng.uniform(0.0, 2.0 * math.pi, size)
    return np.stack([np.cos(theta), np.sin(theta)], axis=-1)


def _wrap(d: np.ndarray, side: float) -> np.ndarray:
    return (d + 0.5 * side) % side - 0.5 * side


def _place_tagged(sc: Scenario, cfg: SimConfig, rng):
    half = 0.5 * cfg.window_side
    if cfg.boundary == "torus":
        tx = np.zeros(2)
    else:
        inner = half - cfg.guard_width
        tx = rng.uniform(-inner, inner, 2)
    return tx, tx + sc.r * _random_direction(rng)


def draw_network(sc: Scenario, cfg: SimConfig, rng: np.random.Generator) -> Network:
    """Poisson transmitters in the window, each with a receiver at distance r, plus the tagged link."""
    half = 0.5 * cfg.window_side
    n = rng.poisson(sc.lam * cfg.window_side**2)
    tx = rng.uniform(-half, half, (n, 2))
    rx = tx + sc.r * _random_direction(rng, n)
    if cfg.boundary == "torus":
        rx = _wrap(rx, cfg.window_side)
    tagged_tx, tagged_rx = _place_tagged(sc, cfg, rng)
    return Network(tx, rx, tagged_tx, tagged_rx)


def _interferer_gains(sc: Scenario, cfg: SimConfig, rng, density: float, receiver: np.ndarray):
    """1/l(distance) from ``receiver`` to Poisson(density) points in the window."""
    half = 0.5 * cfg.window_side
    n = rng.poisson(density * cfg.window_side**2)
    d = rng.uniform(-half, half, (n, 2))
    if cfg.boundary == "guard_zone":
        d -= receiver
    # on the torus the wrapped displacement of a uniform point is uniform on
    # the receiver-centred square, so d is used as drawn
    sq = np.einsum("ij,ij->i", d, d)
    A, beta = sc.pathloss.A, sc.pathloss.beta
    return (A * A * sq) ** (-0.5 * beta)


def _tagged_signal(sc: Scenario, cfg: SimConfig, rng):
    _, rx = _place_tagged(sc, cfg, rng)
    power = model.sample(sc.fading, rng) / sc.pathloss(sc.r)
    return rx, power


# ---------------------------------------------------------------------------
# Event sweep


def sweep_interference(starts, ends, powers, B: float = 1.0) -> tuple[float, float]:
    """Time average and maximum over [0, B) of sum_j powers_j 1{starts_j <= t < ends_j}.

    The sum is piecewise constant between transmission boundaries, so both
    quantities are exact.
    """
    starts = np.clip(np.asarray(starts, dtype=float), 0.0, B)
    ends = np.clip(np.asarray(ends, dtype=float), 0.0, B)
    powers = np.asarray(powers, dtype=float)
    live = ends > starts
    starts, ends, powers = starts[live], ends[live], powers[live]
    mean = float(np.dot(ends - starts, powers)) / B
    if not powers.size:
        return 0.0, 0.0
    level0 = float(powers[starts == 0.0].sum())
    times = np.concatenate([starts[starts > 0.0], ends[ends < B]])
    jumps = np.concatenate([powers[starts > 0.0], -powers[ends < B]])
    if not times.size:
        return mean, level0
    order = np.argsort(times)
    levels = level0 + np.cumsum(jumps[order])
    # only the level after the last event at each time is realized, which
    # does not depend on how ties are ordered
    t_sorted = times[order]
    last = np.append(t_sorted[1:] != t_sorted[:-1], True)
    return mean, max(level0, float(levels[last].max()))


# ---------------------------------------------------------------------------
# MAC models


def _slotted_replication(sc: Scenario, cfg: SimConfig, rng):
    rx, signal = _tagged_signal(sc, cfg, rng)
    gains = _interferer_gains(sc, cfg, rng, sc.lam * sc.mac.p, rx)
    interference = float(np.dot(model.sample(sc.fading, rng, gains.size), gains))
    return interference, interference, signal


def renewal_active_probability(a: float) -> float:
    """P(a node transmits at some time in [0, B)) with a = epsilon*B."""
    return (a - math.expm1(-a)) / (1.0 + a)


def _renewal_replication(sc: Scenario, cfg: SimConfig, rng):
    B, eps = sc.mac.B, sc.mac.epsilon
    a = eps * B
    rx, signal = _tagged_signal(sc, cfg, rng)
    if a == 0:
        return 0.0, 0.0, signal
    gains = _interferer_gains(sc, cfg, rng, sc.lam * renewal_active_probability(a), rx)
    n = gains.size
    # given activity: on at time 0 w.p. a/(a + 1 - e^{-a}), else the first
    # start falls in [0, B) (Exp(eps) residual back-off conditioned below B)
    on = rng.random(n) < a / (a - math.expm1(-a))
    n_on, n_off = int(on.sum()), int(n - on.sum())

    remaining = B * rng.random(n_on)  # uniform elapsed time of the current packet
    second = remaining + rng.exponential(1.0 / eps, n_on)
    first_off = -np.log1p(rng.random(n_off) * math.expm1(-a)) / eps

    g_on, g_off = gains[on], gains[~on]
    has_second = second < B
    starts = np.concatenate([np.zeros(n_on), second[has_second], first_off])
    ends = np.concatenate([remaining, second[has_second] + B, first_off + B])
    node_gain = np.concatenate([g_on, g_on[has_second], g_off])
    powers = model.sample(sc.fading, rng, node_gain.size) * node_gain
    i_mean, i_max = sweep_interference(starts, ends, powers, B)
    return i_mean, i_max, signal


def _rain_replication(sc: Scenario, cfg: SimConfig, rng):
    B = sc.mac.B
    rx, signal = _tagged_signal(sc, cfg, rng)
    # births on window x [-B, B) at rate lambda*tau/B per unit area and time
    gains = _interferer_gains(sc, cfg, rng, 2.0 * sc.lam * sc.mac.tau, rx)
    births = rng.uniform(-B, B, gains.size)
    powers = model.sample(sc.fading, rng, gains.size) * gains
    i_mean, i_max = sweep_interference(births, births + B, powers, B)
    return i_mean, i_max, signal


_REPLICATION = {Slotted: _slotted_replication, Renewal: _renewal_replication, Rain: _rain_replication}


def _run_block(sc: Scenario, cfg: SimConfig, reps: Sequence[int]) -> np.ndarray:
    step = _REPLICATION[type(sc.mac)]
    out = np.empty((len(reps), 3))
    for i, rep in enumerate(reps):
        out[i] = step(sc, cfg, replication_rng(cfg.seed, rep))
    return out


def _simulate(sc: Scenario, cfg: SimConfig) -> SimRun:
    reps = range(cfg.replications)
    if cfg.workers == 1:
        raw = _run_block(sc, cfg, reps)
    else:
        blocks = np.array_split(np.arange(cfg.replications), cfg.workers)
        with ProcessPoolExecutor(cfg.workers) as pool:
            parts = list(pool.map(_run_block, [sc] * len(blocks), [cfg] * len(blocks), [list(b) for b in blocks]))
        raw = np.concatenate(parts)
    i_mean, i_max, signal = raw.T
    threshold = sc.T
    ok_mean = signal >= threshold * (sc.noise_w + i_mean)
    ok_max = signal >= threshold * (sc.noise_w + i_max)
    return SimRun(i_mean, i_max, ok_mean, ok_max, cfg)


def simulate_slotted(sc: Scenario, cfg: SimConfig) -> SimRun:
    if not isinstance(sc.mac, Slotted):
        raise UsageError("simulate_slotted needs a slotted MAC")
    return _simulate(sc, cfg)


def simulate_renewal(sc: Scenario, cfg: SimConfig) -> SimRun:
    if not isinstance(sc.mac, Renewal):
        raise UsageError("simulate_renewal needs a renewal MAC")
    return _simulate(sc, cfg)


def simulate_rain(sc: Scenario, cfg: SimConfig) -> SimRun:
    if not isinstance(sc.mac, Rain):
        raise UsageError("simulate_rain needs a rain MAC")
    return _simulate(sc, cfg)


def simulate(sc: Scenario, cfg: SimConfig) -> SimRun:
    if type(sc.mac) not in _REPLICATION:
        raise UsageError(f"unsupported MAC {sc.mac!r}")
    return _simulate(sc, cfg)


# ---------------------------------------------------------------------------
# Single-node timelines and estimators


def renewal_timeline(
    mac: Renewal, rng: np.random.Generator, horizon: float, node_id: int = 0
) -> list[TimelineEvent]:
    """Stationary ON/OFF events of one renewal node on [0, horizon]."""
    B, eps = mac.B, mac.epsilon
    events: list[TimelineEvent] = []
    if eps == 0:
        return events
    if rng.random() < mac.tau:
        t = B * rng.random()  # end of the packet in progress
        events.append(TimelineEvent(node_id, "tx_start", t - B))
        events.append(TimelineEvent(node_id, "tx_end", t))
    else:
        t = 0.0
    while True:
        t += rng.exponential(1.0 / eps)
        if t >= horizon:
            return events
        events.append(TimelineEvent(node_id, "tx_start", t))
        t += B
        events.append(TimelineEvent(node_id, "tx_end", t))


def on_fraction(events: Sequence[TimelineEvent], horizon: float) -> float:
    """Fraction of [0, horizon] covered by transmissions in ``events``."""
    starts = [e.time for e in events if e.kind == "tx_start"]
    ends = [e.time for e in events if e.kind == "tx_end"]
    busy = sum(max(0.0, min(e, horizon) - max(s, 0.0)) for s, e in zip(starts, ends))
    return busy / horizon


def empirical_laplace(samples, xi: float) -> Estimate:
    """Monte Carlo estimate of E[exp(-xi I)]."""
    v = np.asarray(samples, dtype=float)
    if v.size == 0:
        raise UsageError("empirical_laplace needs at least one sample")
    if xi < 0:
        raise InvalidParameterError("xi must be nonnegative")
    return Estimate.from_samples(np.exp(-xi * v))


def estimate_coverage(indicators) -> Estimate:
    """Proportion of successes with a normal-approximation 95% interval."""
    v = np.asarray(indicators, dtype=float)
    n = v.size
    if n < 2:
        raise UsageError("coverage estimation needs at least two replications")
    p = float(v.mean())
    se = math.sqrt(p * (1.0 - p) / n)
    return Estimate(p, se, 1.96 * se, n)
