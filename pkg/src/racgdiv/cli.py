"""Command-line entry point: ``racgdiv <subcommand> [flags]``.

Exit codes: 0 success, 1 budget exceeded (partial output kept), 2 invalid input.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, dataclass
from fractions import Fraction
from pathlib import Path
from typing import Optional

from . import __version__
from .cayley import (
    Budget,
    BudgetExceeded,
    GeodesicSpec,
    InvalidQuery,
    build_ball,
    geodesic_segment,
    write_ball_csv,
)
from .coxeter import (
    GraphFormatError,
    InvalidParameter,
    InvalidWord,
    PresentationGraph,
    load_graph,
    parse_family,
    peripheral_generators,
)
from .divergence import (
    default_truncation,
    fit_growth,
    gersten_delta,
    ldiv,
    write_fit_json,
    write_samples_csv,
)
from .experiments import run_gamma_spectrum, run_omega_gap, write_report
from .relhyp import (
    PeripheralStructure,
    build_coned_off,
    classify_transitions,
    coned_ball_to_dict,
    coned_distance,
    write_transitions_csv,
)

EXIT_OK, EXIT_BUDGET, EXIT_INVALID = 0, 1, 2


@dataclass
class RunConfig:
    command: str
    family: Optional[str] = None
    graph: Optional[str] = None
    word: Optional[str] = None
    r_min: int = 1
    r_max: int = 4
    trunc_factor: int = 3
    epsilon: int = 1
    R: int = 2
    rho: str = "1"
    seed: int = 0
    out: str = "out"
    threads: int = 1
    max_vertices: Optional[int] = None
    max_seconds: Optional[float] = None
    radius: int = 3
    peripheral: Optional[str] = None
    length: int = 11
    offset: int = 0
    kind: Optional[str] = None
    d: str = "1,2"

    def validate(self):
        for name in ("r_min", "r_max", "trunc_factor", "R", "threads", "length"):
            if getattr(self, name) < 1:
                raise InvalidParameter(f"--{name.replace('_', '-')} must be positive")
        if self.epsilon < 0 or self.radius < 0:
            raise InvalidParameter("--epsilon and --radius must be non-negative")
        if self.r_min > self.r_max:
            raise InvalidParameter("--r-min must not exceed --r-max")
        frac = Fraction(self.rho)
        if not 0 < frac <= 1:
            raise InvalidParameter("--rho must lie in (0, 1]")

    def budget(self) -> Budget:
        return Budget(self.max_vertices, self.max_seconds)

    def meta(self) -> dict:
        return {"tool": "racgdiv", "version": __version__, "config": asdict(self)}


def _graph(cfg: RunConfig) -> PresentationGraph:
    if cfg.graph:
        return load_graph(cfg.graph)
    if cfg.family:
        return parse_family(cfg.family)
    raise InvalidParameter("one of --family or --graph is required")


def _peripheral(cfg: RunConfig, G: PresentationGraph) -> PeripheralStructure:
    if cfg.peripheral is not None:
        groups = [g for g in cfg.peripheral.split(";") if g.strip()]
        return PeripheralStructure.from_names(G, [g.replace(",", " ").split() for g in groups])
    if G.name.startswith("omega:"):
        return PeripheralStructure.for_omega(G)
    if G.name.startswith("gamma:"):
        return PeripheralStructure((peripheral_generators(G),))
    return PeripheralStructure(())


def _spec(cfg: RunConfig, G: PresentationGraph) -> GeodesicSpec:
    if not cfg.word:
        raise InvalidParameter("--word is required")
    return GeodesicSpec.parse(G, cfg.word)


def _out(cfg: RunConfig) -> Path:
    p = Path(cfg.out)
    p.mkdir(parents=True, exist_ok=True)
    return p


def cmd_ball(cfg: RunConfig) -> int:
    G = _graph(cfg)
    path = _out(cfg) / "ball.csv"
    try:
        ball = build_ball(G, (), cfg.radius, cfg.budget())
    except BudgetExceeded as exc:
        write_ball_csv(exc.stats.get("sphere_sizes", [1]), path, dict(cfg.meta(), partial=True))
        print(f"budget exceeded: {exc}; partial CSV at {path}", file=sys.stderr)
        return EXIT_BUDGET
    write_ball_csv(ball.sphere_sizes(), path, cfg.meta())
    print(path)
    return EXIT_OK


def cmd_ldiv(cfg: RunConfig) -> int:
    G = _graph(cfg)
    spec = _spec(cfg, G)
    samples = []
    code = EXIT_OK
    for r in range(cfg.r_min, cfg.r_max + 1):
        trunc = default_truncation(r, len(spec), cfg.trunc_factor)
        try:
            samples.append(ldiv(spec, r, trunc, cfg.budget(), workers=cfg.threads))
        except BudgetExceeded as exc:
            print(f"budget exceeded at r={r}: {exc}", file=sys.stderr)
            code = EXIT_BUDGET
            break
    out = _out(cfg)
    write_samples_csv(samples, out / "ldiv.csv", G.name, spec.label(), cfg.meta())
    write_fit_json(fit_growth(samples), out / "ldiv_fit.json", cfg.meta())
    for s in samples:
        print(f"r={s.r} status={s.status.value} value={s.value}")
    return code


def cmd_gersten(cfg: RunConfig) -> int:
    G = _graph(cfg)
    radius = max(cfg.trunc_factor * cfg.r_max, cfg.r_max)
    code = EXIT_OK
    samples = []
    try:
        ball = build_ball(G, (), radius, cfg.budget())
        for r in range(cfg.r_min, cfg.r_max + 1):
            samples.append(gersten_delta(ball, Fraction(cfg.rho), r, seed=cfg.seed))
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        code = EXIT_BUDGET
    out = _out(cfg)
    write_samples_csv(samples, out / "gersten.csv", G.name, "-", cfg.meta())
    write_fit_json(fit_growth(samples), out / "gersten_fit.json", cfg.meta())
    for s in samples:
        print(f"r={s.r} status={s.status.value} value={s.value}")
    return code


def cmd_cone(cfg: RunConfig) -> int:
    G = _graph(cfg)
    P = _peripheral(cfg, G)
    try:
        ball = build_ball(G, (), cfg.radius, cfg.budget())
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    cb = build_coned_off(ball, P)
    body = dict(cfg.meta())
    body.update(coned_ball_to_dict(cb))
    body["coned_distance_from_base"] = [str(coned_distance(cb, ball.basepoint, g))
                                        for g in ball.vertices]
    path = _out(cfg) / "cone.json"
    path.write_text(json.dumps(body, indent=1, sort_keys=True) + "\n")
    print(f"{cb.n_group} group vertices, {cb.n_cones} cone vertices -> {path}")
    return EXIT_OK


def cmd_transitions(cfg: RunConfig) -> int:
    G = _graph(cfg)
    spec = _spec(cfg, G)
    P = _peripheral(cfg, G)
    seg = geodesic_segment(spec, cfg.offset, cfg.offset + cfg.length)
    ann = classify_transitions(seg, P, G, cfg.epsilon, cfg.R)
    path = _out(cfg) / "transitions.csv"
    write_transitions_csv(ann, G, path, cfg.meta())
    print(f"deep={ann.tally()['deep']} transition={ann.tally()['transition']} -> {path}")
    return EXIT_OK


def cmd_experiment(cfg: RunConfig) -> int:
    if cfg.kind not in ("spectrum", "gap"):
        raise InvalidParameter("experiment kind must be 'spectrum' or 'gap'")
    ds = [int(x) for x in cfg.d.split(",") if x.strip()]
    if not ds:
        raise InvalidParameter("--d needs at least one value")
    if cfg.kind == "spectrum":
        rep = run_gamma_spectrum(ds, cfg.r_max, cfg.trunc_factor, cfg.budget(), cfg.threads)
        stem = f"spectrum_d{'-'.join(map(str, ds))}_r{cfg.r_max}_tf{cfg.trunc_factor}"
    else:
        if len(ds) != 1:
            raise InvalidParameter("gap experiment takes a single --d")
        rep = run_omega_gap(ds[0], cfg.r_max, cfg.trunc_factor, cfg.epsilon, cfg.R,
                            cfg.length, cfg.budget(), cfg.threads)
        stem = f"gap_d{ds[0]}_r{cfg.r_max}_tf{cfg.trunc_factor}"
    jpath, mpath = write_report(rep, cfg.meta(), _out(cfg), stem)
    print(jpath)
    print(mpath)
    return EXIT_OK if rep.complete else EXIT_BUDGET


COMMANDS = {
    "ball": cmd_ball,
    "ldiv": cmd_ldiv,
    "gersten": cmd_gersten,
    "cone": cmd_cone,
    "transitions": cmd_transitions,
    "experiment": cmd_experiment,
}


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    src = common.add_mutually_exclusive_group()
    src.add_argument("--family", help="built-in graph: gamma:<d> or omega:<d>")
    src.add_argument("--graph", help="JSON file {generators: [...], edges: [[s, t], ...]}")
    common.add_argument("--word", help="geodesic period word, e.g. 'a2 b2' (default: none)")
    common.add_argument("--r-min", type=int, default=1, help="smallest radius (default: 1)")
    common.add_argument("--r-max", type=int, default=4, help="largest radius (default: 4)")
    common.add_argument("--trunc-factor", type=int, default=3,
                        help="truncation = factor*r (+ period length for ldiv) (default: 3)")
    common.add_argument("--epsilon", type=int, default=1, help="deep-point epsilon (default: 1)")
    common.add_argument("--R", type=int, default=2, help="deep-point R (default: 2)")
    common.add_argument("--rho", default="1", help="Gersten fraction in (0,1] (default: 1)")
    common.add_argument("--seed", type=int, default=0, help="sampling seed (default: 0)")
    common.add_argument("--out", default="out", help="output directory (default: out)")
    common.add_argument("--threads", type=int, default=1, help="worker processes (default: 1)")
    common.add_argument("--max-vertices", type=int, default=None,
                        help="vertex budget per search (default: unlimited)")
    common.add_argument("--max-seconds", type=float, default=None,
                        help="wall-time budget per search (default: unlimited)")
    common.add_argument("--radius", type=int, default=3, help="ball radius (default: 3)")
    common.add_argument("--peripheral", default=None,
                        help="peripheral generator sets, ';'-separated, e.g. 'a0,a1;b0' "
                             "(default: Gamma_d vertices for built-ins, none for custom graphs)")
    common.add_argument("--length", type=int, default=11, help="segment length (default: 11)")
    common.add_argument("--offset", type=int, default=0, help="segment start time (default: 0)")
    common.add_argument("--d", default="1,2", help="comma-separated d values (default: 1,2)")

    p = argparse.ArgumentParser(prog="racgdiv", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"racgdiv {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("ball", parents=[common], help="sphere sizes of a Cayley ball")
    sub.add_parser("ldiv", parents=[common], help="lower divergence samples and fit")
    sub.add_parser("gersten", parents=[common], help="Gersten divergence samples and fit")
    sub.add_parser("cone", parents=[common], help="coned-off ball dump")
    sub.add_parser("transitions", parents=[common], help="deep/transition classification")
    e = sub.add_parser("experiment", parents=[common], help="spectrum or gap report")
    e.add_argument("kind", choices=["spectrum", "gap"])
    return p


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    fields = {k: v for k, v in vars(args).items() if k in RunConfig.__dataclass_fields__}
    cfg = RunConfig(**fields)
    try:
        cfg.validate()
        return COMMANDS[cfg.command](cfg)
    except (GraphFormatError, InvalidWord, InvalidParameter, InvalidQuery, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
