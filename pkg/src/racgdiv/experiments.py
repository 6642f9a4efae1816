"""Desk-scale reproductions on the Gamma_d / Omega_d families.

Reports are plain dictionaries so that they serialise deterministically;
:func:`write_report` names the files by parameters and content hash.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .cayley import UNLIMITED, Budget, BudgetExceeded, GeodesicSpec, geodesic_segment
from .coxeter import PresentationGraph, gamma, omega
from .divergence import DivergenceSample, GrowthFit, combine_ldiv, fit_growth, pool_map, rho
from .relhyp import PeripheralStructure, classify_transitions


def alpha_geodesic(G: PresentationGraph, d: int) -> GeodesicSpec:
    """The geodesic through the identity labelled ``a_d b_d a_d b_d ...``."""
    return GeodesicSpec.parse(G, f"a{d} b{d}")


def candidate_geodesic(G: PresentationGraph) -> GeodesicSpec:
    """``(c1 b0)^inf`` in Omega_d: reduced, periodic, leaves the peripheral subgroup."""
    return GeodesicSpec.parse(G, "c1 b0")


@dataclass
class SpectrumReport:
    params: dict
    samples: dict = field(default_factory=dict)
    fits: dict = field(default_factory=dict)
    comparisons: list = field(default_factory=list)
    complete: bool = True
    stopped: Optional[dict] = None

    def value(self, d: int, r: int) -> Optional[int]:
        for s in self.samples.get(d, []):
            if s.r == r:
                return s.value if s.finite else None
        return None

    def to_dict(self) -> dict:
        return {
            "kind": "spectrum",
            "params": self.params,
            "samples": {str(d): [s.to_dict() for s in ss] for d, ss in self.samples.items()},
            "fits": {str(d): f.to_dict() for d, f in self.fits.items()},
            "comparisons": self.comparisons,
            "complete": self.complete,
            "stopped": self.stopped,
        }


@dataclass
class GapReport:
    params: dict
    samples: dict = field(default_factory=dict)
    transitions: dict = field(default_factory=dict)
    ratios: list = field(default_factory=list)
    complete: bool = True
    stopped: Optional[dict] = None

    def to_dict(self) -> dict:
        return {
            "kind": "gap",
            "params": self.params,
            "samples": {k: [s.to_dict() for s in ss] for k, ss in self.samples.items()},
            "transitions": self.transitions,
            "ratios": self.ratios,
            "complete": self.complete,
            "stopped": self.stopped,
        }


def _ldiv_series(spec: GeodesicSpec, radii: Sequence[int], factor: int, budget: Budget,
                 workers: int) -> tuple[list[DivergenceSample], Optional[dict]]:
    """ldiv at each radius, stopping at the first radius that blows the budget."""
    out = []
    P = len(spec)
    for r in radii:
        trunc = factor * r
        jobs = [(spec, r, t, trunc, budget) for t in range(P)]
        try:
            parts = pool_map(_rho_job, jobs, workers)
        except BudgetExceeded as exc:
            return out, {"r": r, "reason": str(exc), "stats": exc.stats}
        out.append(combine_ldiv(parts, r, trunc, {"t_range": [0, P - 1], "t_mode": "full-period"}))
    return out, None


def _rho_job(args):
    spec, r, t, trunc, budget = args
    return rho(spec, r, t, trunc, budget)


def run_gamma_spectrum(d_list: Sequence[int], r_max: int, truncation_factor: int = 3,
                       budget: Budget = UNLIMITED, workers: int = 1) -> SpectrumReport:
    """ldiv of ``alpha_d`` in ``Gamma_d`` for each ``d`` at ``r = 1..r_max``.

    A budget overrun truncates that ``d``'s series and marks the report
    incomplete; the completed prefix is kept.
    """
    if r_max < 2 or any(d < 1 for d in d_list):
        raise ValueError("need r_max >= 2 and d >= 1")
    params = {"d_list": list(d_list), "r_max": r_max, "truncation_factor": truncation_factor}
    rep = SpectrumReport(params)
    for d in d_list:
        G = gamma(d)
        series, stop = _ldiv_series(alpha_geodesic(G, d), range(1, r_max + 1),
                                    truncation_factor, budget, workers)
        rep.samples[d] = series
        rep.fits[d] = fit_growth(series)
        if stop is not None:
            rep.complete = False
            rep.stopped = dict(stop, d=d)
    for r in range(1, r_max + 1):
        row = {"r": r, "values": {str(d): rep.value(d, r) for d in d_list}}
        vals = [rep.value(d, r) for d in d_list]
        if all(v is not None for v in vals):
            row["nondecreasing_in_d"] = all(a <= b for a, b in zip(vals, vals[1:]))
        else:
            row["nondecreasing_in_d"] = None
        rep.comparisons.append(row)
    return rep


def _annotation_dict(ann, G: PresentationGraph) -> dict:
    return {
        "epsilon": ann.epsilon,
        "R": ann.R,
        "tally": ann.tally(),
        "deep_positions": ann.deep_positions,
        "entries": [
            {"position": e.position, "status": e.status,
             "coset_min_rep": None if e.coset is None else G.format(e.coset.min_rep),
             "extra_cosets": len(e.also_deep_in)}
            for e in ann.entries
        ],
        "warnings": list(ann.warnings),
    }


def run_omega_gap(d: int, r_max: int, truncation_factor: int = 3, epsilon: int = 1, R: int = 2,
                  segment_length: int = 11, budget: Budget = UNLIMITED,
                  workers: int = 1) -> GapReport:
    """Compare the peripheral geodesic ``alpha_d`` with ``(c1 b0)^inf`` in ``Omega_d``."""
    if d < 1 or r_max < 1:
        raise ValueError("need d >= 1 and r_max >= 1")
    G = omega(d)
    P = PeripheralStructure.for_omega(G)
    geos = {"alpha": alpha_geodesic(G, d), "h": candidate_geodesic(G)}
    params = {"d": d, "r_max": r_max, "truncation_factor": truncation_factor,
              "epsilon": epsilon, "R": R, "segment_length": segment_length,
              "geodesics": {k: g.label() for k, g in geos.items()}}
    rep = GapReport(params)
    for name, spec in geos.items():
        seg = geodesic_segment(spec, 0, segment_length)
        ann = classify_transitions(seg, P, G, epsilon, R)
        rep.transitions[name] = _annotation_dict(ann, G)
    for name, spec in geos.items():
        series, stop = _ldiv_series(spec, range(1, r_max + 1), truncation_factor, budget, workers)
        rep.samples[name] = series
        if stop is not None:
            rep.complete = False
            rep.stopped = dict(stop, geodesic=name)
    by_r = {name: {s.r: s for s in ss} for name, ss in rep.samples.items()}
    for r in range(1, r_max + 1):
        a, h = by_r["alpha"].get(r), by_r["h"].get(r)
        row = {"r": r,
               "alpha": None if a is None else {"status": a.status.value, "value": a.value},
               "h": None if h is None else {"status": h.status.value, "value": h.value}}
        if a is not None and h is not None and a.finite and h.finite:
            row["ratio_h_over_alpha"] = round(h.value / a.value, 6)
        else:
            row["ratio_h_over_alpha"] = None
        rep.ratios.append(row)
    return rep


MORSE_CONSISTENT = "morse-consistent"
NON_MORSE_CONSISTENT = "non-morse-consistent"
INCONCLUSIVE = "inconclusive"


def morse_heuristic(fit: GrowthFit) -> str:
    """Heuristic only: superlinear lower divergence suggests a Morse geodesic."""
    if fit.model == "exponential":
        return MORSE_CONSISTENT
    if fit.model == "polynomial":
        if fit.parameter >= 1.5:
            return MORSE_CONSISTENT
        if fit.parameter <= 1.2:
            return NON_MORSE_CONSISTENT
    return INCONCLUSIVE


# -- report files -------------------------------------------------------------

def report_json(body: dict) -> str:
    return json.dumps(body, indent=2, sort_keys=True) + "\n"


def content_hash(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()[:12]


def _md_spectrum(body: dict) -> list[str]:
    rep = body["report"]
    ds = rep["params"]["d_list"]
    lines = ["| r | " + " | ".join(f"ldiv alpha_{d}" for d in ds) + " | nondecreasing |",
             "|---|" + "---|" * (len(ds) + 1)]
    for row in rep["comparisons"]:
        vals = [row["values"][str(d)] for d in ds]
        cells = ["-" if v is None else str(v) for v in vals]
        lines.append(f"| {row['r']} | " + " | ".join(cells) + f" | {row['nondecreasing_in_d']} |")
    lines += ["", "| d | model | parameter | R^2 | morse (heuristic) |", "|---|---|---|---|---|"]
    for d in ds:
        f = rep["fits"][str(d)]
        par = "-" if f["parameter"] is None else f"{f['parameter']:.4f}"
        r2 = "-" if f["residual"] is None else f"{f['residual']:.4f}"
        lines.append(f"| {d} | {f['model']} | {par} | {r2} | {body['morse'][str(d)]} |")
    return lines


def _md_gap(body: dict) -> list[str]:
    rep = body["report"]
    lines = ["| r | ldiv alpha | ldiv h | h/alpha |", "|---|---|---|---|"]
    for row in rep["ratios"]:
        cells = []
        for k in ("alpha", "h"):
            c = row[k]
            cells.append("-" if c is None else (str(c["value"]) if c["value"] is not None
                                                else c["status"]))
        ratio = "-" if row["ratio_h_over_alpha"] is None else str(row["ratio_h_over_alpha"])
        lines.append(f"| {row['r']} | {cells[0]} | {cells[1]} | {ratio} |")
    lines += ["", "| geodesic | deep | transition | deep positions |", "|---|---|---|---|"]
    for k, t in rep["transitions"].items():
        lines.append(f"| {k} | {t['tally']['deep']} | {t['tally']['transition']} | "
                     f"{t['deep_positions']} |")
    return lines


def report_markdown(body: dict) -> str:
    rep = body["report"]
    title = "Spectrum report" if rep["kind"] == "spectrum" else "Gap report"
    lines = [f"# {title}", "", f"racgdiv {body['version']}", "",
             "Config: `" + json.dumps(body["config"], sort_keys=True) + "`", ""]
    lines += _md_spectrum(body) if rep["kind"] == "spectrum" else _md_gap(body)
    if not rep["complete"]:
        lines += ["", f"**Incomplete:** {rep['stopped']['reason']}"]
    lines += ["", "Morse labels are a heuristic read off fitted lower divergence growth.", ""]
    return "\n".join(lines)


def report_body(report, config: dict) -> dict:
    body = {"version": __version__, "config": config, "report": report.to_dict()}
    if isinstance(report, SpectrumReport):
        body["morse"] = {str(d): morse_heuristic(f) for d, f in report.fits.items()}
        body["morse_note"] = "heuristic: superlinear lower divergence only"
    return body


def write_report(report, config: dict, out_dir, stem: str) -> tuple[Path, Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    body = report_body(report, config)
    text = report_json(body)
    name = f"{stem}_{content_hash(text)}"
    jpath = out_dir / f"{name}.json"
    mpath = out_dir / f"{name}.md"
    jpath.write_text(text)
    mpath.write_text(report_markdown(body))
    return jpath, mpath
