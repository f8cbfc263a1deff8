"""Command-line front end and JSON reports.

Every invocation produces one report with a fixed key order.  Timings are
left out unless ``--timings`` is given, so two runs with the same flags
print byte-identical reports.

Exit codes: 0 success / true / clean, 1 false / violation / counterexample,
2 unknown or budget exhausted, 3 input or I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Callable

from . import __version__
from .arrows import RSTAR_NOTE, arrows, export_cnf, ramsey_cycle_number, rstar_formula
from .coloring import (
    ALL_ODD,
    AvoidanceSpec,
    Color,
    EdgeColoring,
    color_bipartite_blocking,
    color_extremal_lower_bound,
    extremal_partition,
    verify_avoidance,
)
from .cycles import Presence, SearchBudget, cycle_spectrum
from .errors import BudgetExhausted, ClassicalException, ConstructionFailure, InputError, PreconditionError
from .fit import ToleranceProfile, build_fit_graph, certify_fit
from .graph import Graph
from .io import load_coloring, load_graph, load_partition, save_coloring, save_graph
from .regularity import check_regular_pair, pair_density, property_Mt, reduced_graph
from .witness import SideThresholds, build_blue_spectrum, build_red_pancyclic, classify_vertices, find_endgame_seed

__all__ = ["ExperimentConfig", "Report", "run_experiment", "build_parser", "main", "EXIT"]

EXIT = {"ok": 0, "false": 1, "unknown": 2, "input": 3}

COMMANDS = (
    "fit build", "fit certify",
    "color extremal", "color blocking", "color verify",
    "witness blue-spectrum", "witness red-pancyclic",
    "reg density", "reg pair", "reg reduce", "reg mt",
    "cycles spectrum",
    "arrows check", "arrows cnf",
    "formulas",
)


@dataclass
class ExperimentConfig:
    command: str
    n: int | None = None
    k: int | None = None
    seed: int = 0
    tol_multiplier: float = 1.0
    budget_nodes: int | None = None
    budget_seconds: float | None = None
    threads: int = 1
    deterministic: bool = False
    inputs: dict[str, str] = field(default_factory=dict)
    outputs: dict[str, str] = field(default_factory=dict)
    fmt: str | None = None
    params: dict[str, Any] = field(default_factory=dict)

    def validate(self) -> None:
        if self.command not in COMMANDS:
            raise InputError(f"unknown command {self.command!r}")
        if self.n is not None and self.n < 1:
            raise InputError("--n must be positive")
        if self.k is not None and self.k < 1:
            raise InputError("--k must be positive")
        if not 0 <= self.seed < 2 ** 64:
            raise InputError("--seed must lie in [0, 2^64)")
        if not self.tol_multiplier > 0:
            raise InputError("--tol-multiplier must be positive")
        if self.threads < 1:
            raise InputError("--threads must be at least 1")
        if self.budget_nodes is not None and self.budget_nodes < 1:
            raise InputError("--budget-nodes must be positive")
        if self.budget_seconds is not None and not self.budget_seconds > 0:
            raise InputError("--budget-seconds must be positive")
        if self.fmt not in (None, "graph6", "edgelist"):
            raise InputError("--format must be graph6 or edgelist")

    def need(self, *names: str) -> None:
        for name in names:
            if name in ("n", "k"):
                if getattr(self, name) is None:
                    raise InputError(f"{self.command} needs --{name}")
            elif name not in self.inputs:
                raise InputError(f"{self.command} needs --{name.replace('_', '-')}")

    def budget(self) -> SearchBudget:
        return SearchBudget(nodes=self.budget_nodes, seconds=self.budget_seconds,
                            threads=self.threads, deterministic=self.deterministic)

    def to_json(self) -> dict:
        return asdict(self)


@dataclass
class Report:
    config: dict
    command: str
    status: str
    exit_code: int
    results: dict = field(default_factory=dict)
    error: dict | None = None
    timings: dict = field(default_factory=dict)

    def to_json(self, timings: bool = False) -> dict:
        out = {
            "tool": "ramseyfit",
            "version": __version__,
            "command": self.command,
            "config": self.config,
            "status": self.status,
            "exit_code": self.exit_code,
            "results": self.results,
            "error": self.error,
        }
        if timings:
            out["timings"] = self.timings
        return out

    def dumps(self, timings: bool = False) -> str:
        return json.dumps(self.to_json(timings), indent=2) + "\n"


# -- handlers ----------------------------------------------------------------
# Each returns (status, exit code, results).


def _graph(cfg: ExperimentConfig, key: str = "in") -> Graph:
    return load_graph(cfg.inputs[key], cfg.fmt)


def _tol(cfg: ExperimentConfig) -> ToleranceProfile:
    return ToleranceProfile(multiplier=cfg.tol_multiplier)


def _cert_result(cert) -> tuple[str, int, dict]:
    status = {0: "proven", 1: "failed", 2: "sampled-consistent"}[cert.exit_code]
    return status, cert.exit_code, {"certificate": cert.to_json()}


def _fit_build(cfg):
    cfg.need("n")
    try:
        g, cert = build_fit_graph(cfg.n, cfg.seed, _tol(cfg), max_retries=cfg.params.get("retries", 3),
                                  samples=cfg.params.get("samples", 10_000))
    except ConstructionFailure as exc:
        last = exc.certificate.to_json() if exc.certificate else None
        return "construction_failed", 1, {"certificate": last, "message": str(exc)}
    if "out" in cfg.outputs:
        save_graph(g, cfg.outputs["out"], cfg.fmt)
    status, code, res = _cert_result(cert)
    if "cert" in cfg.outputs:
        Path(cfg.outputs["cert"]).write_text(json.dumps(cert.to_json(), indent=2) + "\n")
    res["repair_log"] = cert.repair_log.to_json()
    return status, code, res


def _fit_certify(cfg):
    cfg.need("in", "n")
    cert = certify_fit(_graph(cfg), cfg.n, _tol(cfg), samples=cfg.params.get("samples", 10_000),
                       sample_seed=cfg.seed)
    return _cert_result(cert)


def _cycle_json(w) -> list[int] | None:
    return None if w is None else list(w.vertices)


def _verdict(verdict) -> tuple[str, int, dict]:
    res = {"clean": verdict.clean, "violation": None}
    if verdict.violation:
        color, w = verdict.violation
        res["violation"] = {"color": color.value, "cycle": _cycle_json(w)}
    return ("clean", 0, res) if verdict.clean else ("violation", 1, res)


def _blue_spec(cfg) -> AvoidanceSpec:
    return AvoidanceSpec(cfg.n, ALL_ODD if cfg.k is None else cfg.k)


def _color_extremal(cfg):
    cfg.need("in", "n")
    g = _graph(cfg)
    col = color_extremal_lower_bound(g, cfg.n)
    if col is None:
        return "inapplicable", 1, {"applicable": False, "min_degree": min(g.degrees(), default=0)}
    v, vp, vs = extremal_partition(g, cfg.n)
    if "coloring" in cfg.outputs:
        save_coloring(col, cfg.outputs["coloring"])
    status, code, res = _verdict(verify_avoidance(g, col, AvoidanceSpec(cfg.n), cfg.budget()))
    return status, code, {"applicable": True, "v": v, "V_prime": vp, "V_second": vs, **res}


def _color_blocking(cfg):
    cfg.need("n", "k")
    g, col = color_bipartite_blocking(cfg.n, cfg.k)
    if "out" in cfg.outputs:
        save_graph(g, cfg.outputs["out"], cfg.fmt)
    if "coloring" in cfg.outputs:
        save_coloring(col, cfg.outputs["coloring"])
    status, code, res = _verdict(verify_avoidance(g, col, AvoidanceSpec(cfg.n, cfg.k), cfg.budget()))
    return status, code, {"vertices": g.n, "red_edges": col.red.edge_count,
                          "blue_edges": col.blue.edge_count, **res}


def _color_verify(cfg):
    cfg.need("in", "coloring", "n")
    g = _graph(cfg)
    col = load_coloring(cfg.inputs["coloring"], g)
    return _verdict(verify_avoidance(g, col, _blue_spec(cfg), cfg.budget()))


def _sides(cfg) -> tuple[list[int], list[int]]:
    part = load_partition(cfg.inputs["sides"])
    if part.s != 2:
        raise InputError("sides file must contain exactly two parts")
    return sorted(part.parts[0]), sorted(part.parts[1])


def _thresholds(cfg, g: Graph) -> SideThresholds:
    n = cfg.n if cfg.n is not None else (g.n + 1) // 2
    return SideThresholds(n, cfg.tol_multiplier, hub_blue_override=cfg.params.get("hub_blue"))


def _spectrum_result(res) -> tuple[str, int, dict]:
    out = res.to_json()
    return ("complete", 0, out) if res.complete else ("gaps", 1, out)


def _witness_blue(cfg):
    cfg.need("in", "coloring", "sides")
    g = _graph(cfg)
    col = load_coloring(cfg.inputs["coloring"], g)
    V1, V2 = _sides(cfg)
    thr = _thresholds(cfg, g)
    hub, s = cfg.params.get("hub"), cfg.params.get("special")
    seed = None
    if s is not None:
        seed = find_endgame_seed(g, col, V1, V2, s)
        if seed is None:
            return "precondition_failed", 1, {"message": f"no endgame configuration around {s}"}
    try:
        res = build_blue_spectrum(g, col, V1, V2, hub=hub, seed=seed, thr=thr,
                                  max_length=cfg.params.get("max_length"), workers=cfg.threads)
    except PreconditionError as exc:
        return "precondition_failed", 1, {"message": str(exc)}
    return _spectrum_result(res)


def _witness_red(cfg):
    cfg.need("in", "coloring", "sides")
    g = _graph(cfg)
    col = load_coloring(cfg.inputs["coloring"], g)
    V1, V2 = _sides(cfg)
    side = cfg.params.get("side", 1)
    if side not in (1, 2):
        raise InputError("--side must be 1 or 2")
    thr = _thresholds(cfg, g)
    cl = classify_vertices(g, col, V1, V2, thr)
    res = build_red_pancyclic(g, col, cl.side(side), V1 if side == 1 else V2,
                              external=cfg.params.get("external"), thr=thr, seed=cfg.seed,
                              workers=cfg.threads)
    status, code, out = _spectrum_result(res)
    out["classification"] = {"W1": sorted(cl.W1), "W2": sorted(cl.W2), "special": sorted(cl.special),
                             "unclassified": sorted(cl.unclassified), "dual": sorted(cl.dual)}
    return status, code, out


def _frac(x) -> str:
    return f"{x.numerator}/{x.denominator}"


def _colored_graph(cfg) -> Graph:
    g = _graph(cfg)
    if "coloring" not in cfg.inputs:
        return g
    col = load_coloring(cfg.inputs["coloring"], g)
    return col.subgraph(Color(cfg.params.get("color", "R")))


def _reg_density(cfg):
    cfg.need("in", "sides")
    h = _colored_graph(cfg)
    V1, V2 = _sides(cfg)
    return "ok", 0, {"density": _frac(pair_density(h, V1, V2))}


def _reg_pair(cfg):
    cfg.need("in", "sides")
    h = _colored_graph(cfg)
    V1, V2 = _sides(cfg)
    v = check_regular_pair(h, V1, V2, cfg.params.get("eps", "1/10"), cfg.params.get("mode", "exhaustive"),
                           seed=cfg.seed)
    res = {"verdict": v.status, "density": _frac(v.density),
           "deviation": None if v.deviation is None else _frac(v.deviation),
           "witness": None if v.witness is None else [sorted(v.witness[0]), sorted(v.witness[1])]}
    code = {"regular": 0, "irregular": 1, "heuristic-regular": 2}[v.status]
    return v.status, code, res


def _reg_reduce(cfg):
    cfg.need("in", "coloring", "partition")
    g = _graph(cfg)
    col = load_coloring(cfg.inputs["coloring"], g)
    red = reduced_graph(g, col, load_partition(cfg.inputs["partition"]), cfg.params.get("eps", "1/10"),
                        cfg.params.get("mode", "exhaustive"), seed=cfg.seed)
    return ("heuristic" if red.heuristic else "ok"), (2 if red.heuristic else 0), red.to_json()


def _reg_mt(cfg):
    cfg.need("in")
    t = cfg.params.get("t")
    if t is None:
        raise InputError("reg mt needs --t")
    cert = property_Mt(_colored_graph(cfg), t)
    if cert is None:
        return "absent", 1, {"holds": False}
    return "present", 0, {"holds": True, "component": sorted(cert.component),
                          "matching": [list(e) for e in cert.matching], "saturated": cert.saturated,
                          "odd_cycle": list(cert.odd_cycle.vertices)}


def _cycles_spectrum(cfg):
    cfg.need("in")
    g = _graph(cfg)
    top = cfg.params.get("max_length") or g.n
    spec = cycle_spectrum(g, top, cfg.budget())
    res = {
        "max_length": top,
        "status": {str(l): s.value for l, s in sorted(spec.status.items())},
        "present": spec.present(),
        "witnesses": {str(l): list(w.vertices) for l, w in sorted(spec.witnesses.items())},
    }
    unknown = any(s is Presence.UNKNOWN for s in spec.status.values())
    return ("unknown", 2, res) if unknown else ("ok", 0, res)


def _arrows_check(cfg):
    cfg.need("in", "n", "k")
    g = _graph(cfg)
    v = arrows(g, cfg.n, cfg.k, cfg.budget())
    if v.counterexample is not None and "coloring" in cfg.outputs:
        save_coloring(v.counterexample, cfg.outputs["coloring"])
    code = {"arrows": 0, "not_arrows": 1, "unknown": 2}[v.status]
    return v.status, code, v.to_json()


def _arrows_cnf(cfg):
    cfg.need("in", "n", "k")
    text = export_cnf(_graph(cfg), cfg.n, cfg.k)
    header = next(l for l in text.splitlines() if l.startswith("p "))
    _, _, nv, nc = header.split()
    if "out" in cfg.outputs:
        Path(cfg.outputs["out"]).write_text(text)
    return "ok", 0, {"variables": int(nv), "clauses": int(nc)}


def _formulas(cfg):
    cfg.need("n")
    res: dict[str, Any] = {"rstar": None, "rstar_note": RSTAR_NOTE, "ramsey": None}
    if cfg.n >= 3:
        res["rstar"] = rstar_formula(cfg.n)
    if cfg.k is not None:
        try:
            res["ramsey"] = ramsey_cycle_number(cfg.n, cfg.k)
        except ClassicalException as exc:
            res["ramsey"] = {"exception": str(exc), "classical_value": exc.value}
    return "ok", 0, res


HANDLERS: dict[str, Callable[[ExperimentConfig], tuple[str, int, dict]]] = {
    "fit build": _fit_build,
    "fit certify": _fit_certify,
    "color extremal": _color_extremal,
    "color blocking": _color_blocking,
    "color verify": _color_verify,
    "witness blue-spectrum": _witness_blue,
    "witness red-pancyclic": _witness_red,
    "reg density": _reg_density,
    "reg pair": _reg_pair,
    "reg reduce": _reg_reduce,
    "reg mt": _reg_mt,
    "cycles spectrum": _cycles_spectrum,
    "arrows check": _arrows_check,
    "arrows cnf": _arrows_cnf,
    "formulas": _formulas,
}


def run_experiment(config: ExperimentConfig) -> Report:
    """Validate ``config``, run its command and capture the outcome as a Report."""
    start = time.monotonic()
    try:
        config.validate()
        status, code, results = HANDLERS[config.command](config)
        error = None
    except BudgetExhausted as exc:
        status, code, results, error = "unknown", EXIT["unknown"], {}, {"type": type(exc).__name__, "message": str(exc)}
    except (InputError, OSError, ValueError) as exc:
        status, code, results, error = "input_error", EXIT["input"], {}, {"type": type(exc).__name__, "message": str(exc)}
    return Report(config.to_json(), config.command, status, code, results, error,
                  {"total_seconds": time.monotonic() - start})


# -- argument parsing ----------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage errors are input errors (exit 3), not argparse's 2
        raise InputError(message)


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--report", help="write the JSON report here instead of stdout")
    p.add_argument("--timings", action="store_true", help="include wall-clock timings in the report")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--deterministic", action="store_true")
    p.add_argument("--budget-nodes", type=int)
    p.add_argument("--budget-seconds", type=float)
    p.add_argument("--tol-multiplier", type=float, default=1.0)
    p.add_argument("--format", dest="fmt", choices=["graph6", "edgelist"])


# (group, command, inputs, outputs, extra args)
_SPEC: list[tuple[str, str, tuple[str, ...], tuple[str, ...], tuple[tuple[str, dict], ...]]] = [
    ("fit", "build", (), ("out", "cert"), (("--n", {"type": int}), ("--retries", {"type": int, "default": 3}),
                                          ("--samples", {"type": int, "default": 10_000}))),
    ("fit", "certify", ("in",), (), (("--n", {"type": int}), ("--samples", {"type": int, "default": 10_000}))),
    ("color", "extremal", ("in",), ("coloring",), (("--n", {"type": int}),)),
    ("color", "blocking", (), ("out", "coloring"), (("--n", {"type": int}), ("--k", {"type": int}))),
    ("color", "verify", ("in", "coloring"), (), (("--n", {"type": int}), ("--k", {"type": int}))),
    ("witness", "blue-spectrum", ("in", "coloring", "sides"), (),
     (("--n", {"type": int}), ("--hub", {"type": int}), ("--special", {"type": int}),
      ("--hub-blue", {"type": float}), ("--max-length", {"type": int}))),
    ("witness", "red-pancyclic", ("in", "coloring", "sides"), (),
     (("--n", {"type": int}), ("--side", {"type": int, "default": 1}), ("--external", {"type": int}),
      ("--hub-blue", {"type": float}))),
    ("reg", "density", ("in", "sides", "coloring"), (), (("--color", {"choices": ["R", "B"], "default": "R"}),)),
    ("reg", "pair", ("in", "sides", "coloring"), (),
     (("--color", {"choices": ["R", "B"], "default": "R"}), ("--eps", {"default": "1/10"}),
      ("--mode", {"choices": ["exhaustive", "sampled"], "default": "exhaustive"}))),
    ("reg", "reduce", ("in", "coloring", "partition"), (),
     (("--eps", {"default": "1/10"}), ("--mode", {"choices": ["exhaustive", "sampled"], "default": "exhaustive"}))),
    ("reg", "mt", ("in", "coloring"), (), (("--t", {"type": float}), ("--color", {"choices": ["R", "B"], "default": "R"}))),
    ("cycles", "spectrum", ("in",), (), (("--max-length", {"type": int}),)),
    ("arrows", "check", ("in",), ("coloring",), (("--n", {"type": int}), ("--k", {"type": int}))),
    ("arrows", "cnf", ("in",), ("out",), (("--n", {"type": int}), ("--k", {"type": int}))),
]

_PARAMS = ("retries", "samples", "hub", "special", "hub_blue", "max_length", "side", "external",
           "color", "eps", "mode", "t")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ramseyfit", description="Fit graphs, cycle colourings and arrowing search.")
    groups = parser.add_subparsers(dest="group", required=True, parser_class=_Parser)
    subs: dict[str, Any] = {}
    for group, name, ins, outs, extra in _SPEC:
        if group not in subs:
            subs[group] = groups.add_parser(group).add_subparsers(dest="sub", required=True, parser_class=_Parser)
        p = subs[group].add_parser(name)
        _common(p)
        for key in ins:
            p.add_argument(f"--{key}", dest=f"in_{key}")
        for key in outs:
            flag = f"--{key}-out" if key in ins else f"--{key}"
            p.add_argument(flag, dest=f"out_{key}")
        for flag, kw in extra:
            p.add_argument(flag, **kw)
    p = groups.add_parser("formulas")
    _common(p)
    p.add_argument("--n", type=int)
    p.add_argument("--k", type=int)
    return parser


def config_from_args(ns: argparse.Namespace) -> ExperimentConfig:
    command = ns.group if ns.group == "formulas" else f"{ns.group} {ns.sub}"
    d = vars(ns)
    inputs = {k[3:]: v for k, v in d.items() if k.startswith("in_") and v is not None}
    outputs = {k[4:]: v for k, v in d.items() if k.startswith("out_") and v is not None}
    params = {k: d[k] for k in _PARAMS if d.get(k) is not None}
    return ExperimentConfig(
        command=command, n=d.get("n"), k=d.get("k"), seed=ns.seed, tol_multiplier=ns.tol_multiplier,
        budget_nodes=ns.budget_nodes, budget_seconds=ns.budget_seconds, threads=ns.threads,
        deterministic=ns.deterministic, inputs=inputs, outputs=outputs, fmt=ns.fmt, params=params,
    )


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        ns = build_parser().parse_args(argv)
    except InputError as exc:
        report = Report({"argv": argv}, "", "input_error", EXIT["input"], {},
                        {"type": "InputError", "message": str(exc)})
        sys.stdout.write(report.dumps())
        return report.exit_code
    report = run_experiment(config_from_args(ns))
    text = report.dumps(ns.timings)
    if ns.report:
        try:
            Path(ns.report).write_text(text)
        except OSError as exc:
            sys.stderr.write(f"cannot write report: {exc}\n")
            sys.stdout.write(text)
            return EXIT["input"]
    else:
        sys.stdout.write(text)
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
