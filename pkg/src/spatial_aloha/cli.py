"""Command-line front end: eval, reproduce, simulate, validate.

Every CSV starts with ``# key = value`` lines holding the effective
configuration. The same syntax is accepted by ``--config``, so a CSV can be
fed back to regenerate itself.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import io
import math
import sys
from pathlib import Path

from . import analytic, figures, optimize, sim, validation
from .errors import AlohaError, NumericFailure, UsageError
from .model import Deterministic, LogNormal, Nakagami, PathLoss, Rain, Rayleigh, Renewal, Scenario, Slotted
from .numerics import QuadSpec

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_VALIDATION = 0, 1, 2, 3

# key -> (type, default); keys mirror the long flag names
SETTINGS: dict[str, tuple[type, object]] = {
    "lambda": (float, 1.0),
    "r": (float, 1.0),
    "T": (float, 10.0),
    "T-db": (float, None),
    "noise": (float, 0.0),
    "beta": (float, 4.0),
    "A": (float, 1.0),
    "fading": (str, "rayleigh"),
    "sigma": (float, 1.0),
    "k": (float, 1.0),
    "mac": (str, "slotted"),
    "p": (float, 0.05),
    "tau": (float, 0.05),
    "B": (float, 1.0),
    "epsilon": (float, None),
    "xi": (float, None),
    "quantity": (str, "coverage"),
    "figure": (str, None),
    "constraint": (str, "mean"),
    "tau-grid": (str, None),
    "level": (str, "fast"),
    "window": (float, 300.0),
    "boundary": (str, "torus"),
    "guard-width": (float, 0.0),
    "workers": (int, 1),
    "replications": (int, None),
    "seed": (int, 0),
    "quad-rel-tol": (float, 1e-8),
}
COMMAND_KEYS = {
    "eval": ("quantity", "xi"),
    "reproduce": ("figure",),
    "simulate": ("constraint", "tau-grid"),
    "validate": ("level",),
}
SIM_KEYS = ("window", "boundary", "guard-width", "workers", "replications", "seed")
SCENARIO_KEYS = ("lambda", "r", "T", "noise", "beta", "A", "fading", "sigma", "k", "mac", "p", "tau", "B", "epsilon")
QUANTITIES = ("lt", "coverage", "throughput", "kappa", "zeta", "optima", "ratio")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _scenario_flags(p: argparse.ArgumentParser) -> None:
    s = argparse.SUPPRESS
    g = p.add_argument_group("scenario")
    g.add_argument("--lambda", dest="lambda", type=float, default=s, help="node density")
    g.add_argument("--r", type=float, default=s, help="link distance")
    g.add_argument("--T", type=float, default=s, help="SINR threshold (linear)")
    g.add_argument("--T-db", dest="T-db", type=float, default=s, help="SINR threshold in dB")
    g.add_argument("--noise", type=float, default=s, help="constant noise power W")
    g.add_argument("--beta", type=float, default=s, help="path-loss exponent")
    g.add_argument("--A", type=float, default=s, help="path-loss scale")
    g.add_argument("--fading", choices=("deterministic", "rayleigh", "lognormal", "nakagami"), default=s)
    g.add_argument("--sigma", type=float, default=s, help="log-normal shadowing parameter")
    g.add_argument("--k", type=float, default=s, help="Nakagami shape")
    g.add_argument("--mac", choices=("slotted", "renewal", "rain"), default=s)
    g.add_argument("--p", type=float, default=s, help="slotted access probability")
    g.add_argument("--tau", type=float, default=s, help="channel-access fraction (renewal, rain)")
    g.add_argument("--B", type=float, default=s, help="packet duration")
    g.add_argument("--epsilon", type=float, default=s, help="renewal back-off rate (overrides --tau)")


def _global_flags(p: argparse.ArgumentParser) -> None:
    s = argparse.SUPPRESS
    p.add_argument("--seed", type=int, default=s)
    p.add_argument("--out", default=s, help="output file (directory for reproduce)")
    p.add_argument("--config", default=s, help="key = value file; flags take precedence")
    p.add_argument("--replications", type=int, default=s)
    p.add_argument("--quad-rel-tol", dest="quad-rel-tol", type=float, default=s)


def _sim_flags(p: argparse.ArgumentParser) -> None:
    s = argparse.SUPPRESS
    p.add_argument("--window", type=float, default=s, help="window side length")
    p.add_argument("--boundary", choices=("torus", "guard_zone"), default=s)
    p.add_argument("--guard-width", dest="guard-width", type=float, default=s)
    p.add_argument("--workers", type=int, default=s)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="spatial-aloha", description=__doc__.splitlines()[0])
    _global_flags(parser)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True
    s = argparse.SUPPRESS

    p = sub.add_parser("eval", help="evaluate an analytic quantity")
    p.add_argument("--quantity", choices=QUANTITIES, default=s)
    p.add_argument("--xi", type=float, default=s, help="transform argument for --quantity lt (default T l(r))")
    _scenario_flags(p)
    _global_flags(p)

    p = sub.add_parser("reproduce", help="write the data of one figure as CSV files")
    p.add_argument("figure", nargs="?", choices=tuple(figures.FIGURES), default=s)
    _scenario_flags(p)
    _sim_flags(p)
    _global_flags(p)

    p = sub.add_parser("simulate", help="Monte Carlo coverage estimates")
    p.add_argument("--constraint", choices=("mean", "max", "both"), default=s)
    p.add_argument("--tau-grid", dest="tau-grid", default=s, help="comma-separated access fractions")
    _scenario_flags(p)
    _sim_flags(p)
    _global_flags(p)

    p = sub.add_parser("validate", help="run the acceptance checks")
    p.add_argument("--level", choices=tuple(validation.LEVELS), default=s)
    _sim_flags(p)
    _global_flags(p)
    return parser


# ---------------------------------------------------------------------------
# Configuration


def read_config(path: str) -> dict[str, object]:
    """Parse ``key = value`` lines; a leading ``#`` is ignored, other lines skipped."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    lines = []
    for raw in text.splitlines():
        line = raw.strip().lstrip("#").strip()
        if "=" in line and not line.startswith("note."):
            lines.append(line)
    cp = configparser.ConfigParser(interpolation=None, delimiters=("=",))
    cp.optionxform = str
    try:
        cp.read_string("[run]\n" + "\n".join(lines))
    except configparser.Error as exc:
        raise UsageError(f"malformed config {path}: {exc}") from exc
    out = {}
    for key, value in cp["run"].items():
        if key == "command":
            continue
        if key not in SETTINGS:
            raise UsageError(f"unknown config key {key!r} in {path}")
        out[key] = _convert(key, value)
    return out


def _convert(key: str, value):
    kind, _ = SETTINGS[key]
    if value is None or value == "None":
        return None
    try:
        return kind(value)
    except ValueError as exc:
        raise UsageError(f"bad value for {key}: {value!r}") from exc


def effective_settings(ns: argparse.Namespace) -> dict[str, object]:
    given = {k: v for k, v in vars(ns).items() if k not in ("command", "out", "config")}
    merged = {k: d for k, (_, d) in SETTINGS.items()}
    if getattr(ns, "config", None):
        merged.update(read_config(ns.config))
    merged.update(given)
    if merged["T-db"] is not None:
        merged["T"] = 10.0 ** (merged["T-db"] / 10.0)
        merged["T-db"] = None
    return merged


def scenario_from(cfg: dict) -> Scenario:
    fading = {
        "deterministic": Deterministic,
        "rayleigh": Rayleigh,
        "lognormal": lambda: LogNormal(cfg["sigma"]),
        "nakagami": lambda: Nakagami(cfg["k"]),
    }
    mac_name = cfg["mac"]
    if mac_name == "slotted":
        mac = Slotted(cfg["p"])
    elif mac_name == "rain":
        mac = Rain(cfg["tau"], cfg["B"])
    elif mac_name == "renewal":
        mac = Renewal(cfg["B"], cfg["epsilon"]) if cfg["epsilon"] is not None else Renewal.from_tau(cfg["tau"], cfg["B"])
    else:
        raise UsageError(f"unknown mac {mac_name!r}")
    if cfg["fading"] not in fading:
        raise UsageError(f"unknown fading {cfg['fading']!r}")
    return Scenario(
        lam=cfg["lambda"],
        r=cfg["r"],
        T=cfg["T"],
        noise_w=cfg["noise"],
        fading=fading[cfg["fading"]](),
        pathloss=PathLoss(cfg["A"], cfg["beta"]),
        mac=mac,
    )


def sim_config_from(cfg: dict, replications: int | None = None) -> sim.SimConfig:
    reps = replications if replications is not None else (cfg["replications"] or 1000)
    return sim.SimConfig(cfg["window"], cfg["boundary"], cfg["guard-width"], reps, cfg["seed"], cfg["workers"])


def _echo_keys(command: str) -> tuple[str, ...]:
    keys = list(COMMAND_KEYS[command])
    if command != "validate":
        keys += SCENARIO_KEYS
    if command in ("reproduce", "simulate", "validate"):
        keys += SIM_KEYS
    keys.append("quad-rel-tol")
    return tuple(keys)


def header(command: str, cfg: dict, extra: dict | None = None) -> str:
    lines = [f"# command = {command}"]
    for key in _echo_keys(command):
        if cfg.get(key) is not None:
            lines.append(f"# {key} = {_plain(cfg[key])}")
    for key, value in (extra or {}).items():
        lines.append(f"# note.{key}: {value}")
    return "\n".join(lines) + "\n"


def _plain(v) -> str:
    return repr(v) if isinstance(v, float) else str(v)


def _num(v) -> str:
    if isinstance(v, float):
        return "nan" if math.isnan(v) else f"{v:.12g}"
    return str(v)


def render_csv(head: str, columns, rows) -> str:
    buf = io.StringIO()
    buf.write(head)
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_num(v) for v in row])
    return buf.getvalue()


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    try:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(text)
    except OSError as exc:
        raise UsageError(f"cannot write {out}: {exc}") from exc


# ---------------------------------------------------------------------------
# Commands


def cmd_eval(cfg: dict, out: str | None) -> int:
    q = cfg["quantity"]
    qspec = QuadSpec(rel_tol=cfg["quad-rel-tol"])
    rows: list[tuple] = []
    if q == "zeta":
        rows.append(("zeta", optimize.zeta(cfg["beta"])))
    elif q == "ratio":
        rows.append(("throughput_ratio", optimize.throughput_ratio(cfg["beta"])))
    elif q == "kappa":
        cf = analytic.contention_factor(cfg["beta"])
        rows += [("kappa_slotted", cf.kappa_slotted), ("kappa_non_slotted", cf.kappa_non_slotted)]
    else:
        sc = scenario_from(cfg)
        if q == "lt":
            xi = sc.coverage_xi if cfg["xi"] is None else cfg["xi"]
            rows.append(("lt", float(analytic.interference_lt(sc, qspec)(xi))))
        elif q == "coverage":
            rows.append(("coverage", analytic.coverage(sc, qspec)))
        elif q == "throughput":
            rows.append(("throughput", analytic.spatial_throughput(sc, analytic.coverage(sc, qspec))))
        elif q == "optima":
            model = "rain" if cfg["mac"] in ("rain", "renewal") else "slotted"
            rep = optimize.optimal_tau(sc, model)
            rows += [("tau_max", rep.tau_max), ("d_max", rep.d_max), ("p_c_at_opt", rep.p_c_at_opt)]
        else:
            raise UsageError(f"unknown quantity {q!r}")
    _emit(render_csv(header("eval", cfg), ("quantity", "value"), rows), out)
    return EXIT_OK


def cmd_reproduce(cfg: dict, out: str | None) -> int:
    name = cfg["figure"]
    if name is None:
        raise UsageError(f"choose a figure: {', '.join(figures.FIGURES)}")
    base = scenario_from(cfg)
    curves = figures.reproduce(
        name,
        base,
        replications=cfg["replications"],
        sim_cfg=sim_config_from(cfg, replications=cfg["replications"] or 2),
        qspec=QuadSpec(rel_tol=cfg["quad-rel-tol"]),
    )
    directory = Path(out or "results")
    for curve in curves:
        text = render_csv(header("reproduce", cfg, curve.notes), curve.columns, curve.rows)
        _emit(text, str(directory / f"{curve.name}.csv"))
        print(directory / f"{curve.name}.csv")
    return EXIT_OK


def cmd_simulate(cfg: dict, out: str | None) -> int:
    sim_cfg = sim_config_from(cfg)
    if sim_cfg.replications < 2:
        raise UsageError("simulate needs at least 2 replications")
    base = scenario_from(cfg)
    if cfg["tau-grid"]:
        try:
            grid = [float(x) for x in cfg["tau-grid"].split(",") if x.strip()]
        except ValueError as exc:
            raise UsageError(f"bad --tau-grid: {cfg['tau-grid']!r}") from exc
        scenarios = [(t, base.replace(mac=base.mac.with_tau(t))) for t in grid]
    else:
        scenarios = [(base.tau, base)]
    constraints = ("mean", "max") if cfg["constraint"] == "both" else (cfg["constraint"],)
    rows = []
    for x, sc in scenarios:
        run = sim.simulate(sc, sim_cfg)
        for c in constraints:
            est = run.coverage(c)
            rows.append((x, c, est.mean, est.std_error, est.ci95_halfwidth, est.n, sim_cfg.seed))
    columns = ("tau", "constraint", "mean", "std_error", "ci95_halfwidth", "n", "seed")
    _emit(render_csv(header("simulate", cfg), columns, rows), out)
    return EXIT_OK


def cmd_validate(cfg: dict, out: str | None) -> int:
    lines: list[str] = []

    def report(line: str) -> None:
        print(line, flush=True)
        lines.append(line)

    results = validation.run(
        cfg["level"],
        report=report,
        seed=cfg["seed"],
        replications=cfg["replications"],
        sim_cfg=sim_config_from(cfg, replications=2),
        qspec=QuadSpec(rel_tol=cfg["quad-rel-tol"]),
    )
    failed = [r.number for r in results if not r.passed]
    report(f"{len(results) - len(failed)}/{len(results)} criteria passed" + (f"; failed: {failed}" if failed else ""))
    if out is not None:
        _emit(header("validate", cfg) + "\n".join(lines) + "\n", out)
    return EXIT_VALIDATION if failed else EXIT_OK


COMMANDS = {"eval": cmd_eval, "reproduce": cmd_reproduce, "simulate": cmd_simulate, "validate": cmd_validate}


def main(argv=None) -> int:
    try:
        ns = build_parser().parse_args(argv)
        cfg = effective_settings(ns)
        return COMMANDS[ns.command](cfg, getattr(ns, "out", None))
    except NumericFailure as exc:
        print(f"numeric failure: {exc} (value={exc.value}, error estimate={exc.error})", file=sys.stderr)
        return EXIT_NUMERIC
    except (AlohaError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
