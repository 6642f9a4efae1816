"""Divergence estimators at finite truncation, and growth-class fitting.

Every estimate is a :class:`DivergenceSample` that records the truncation
radius it was computed under. A ``NO_PATH`` status means no admissible path
was found *inside the truncation*; it is never converted into a number.
"""

from __future__ import annotations

import csv
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from .cayley import (
    UNLIMITED,
    Budget,
    CayleyBall,
    GeodesicSpec,
    InvalidQuery,
    PathQueryResult,
    PathStatus,
    Ray,
    _bfs_path,
    geodesic_point,
    shortest_path_avoiding,
)


@dataclass(frozen=True)
class DivergenceSample:
    kind: str
    r: int
    result: PathQueryResult
    truncation: int
    provenance: dict = field(default_factory=dict)
    wall_ms: float = 0.0
    parts: tuple["DivergenceSample", ...] = ()

    @property
    def status(self) -> PathStatus:
        return self.result.status

    @property
    def value(self) -> Optional[int]:
        return self.result.length

    @property
    def finite(self) -> bool:
        return self.result.finite

    def to_dict(self, witness_formatter=None) -> dict:
        d = {
            "kind": self.kind,
            "r": self.r,
            "status": self.status.value,
            "value": self.value,
            "truncation": self.truncation,
            "provenance": self.provenance,
            "witness_available": self.result.witness is not None,
        }
        if witness_formatter is not None and self.result.witness is not None:
            d["witness"] = [witness_formatter(g) for g in self.result.witness]
        if self.parts:
            d["parts"] = [p.to_dict() for p in self.parts]
        return d


def default_truncation(r: int, period_length: int = 0, factor: int = 3) -> int:
    return factor * r + period_length


def _ms(t0: float) -> float:
    return round((time.perf_counter() - t0) * 1000.0, 3)


def rho(spec: GeodesicSpec, r: int, t: int = 0, truncation: Optional[int] = None,
        budget: Budget = UNLIMITED) -> DivergenceSample:
    """Shortest detour from ``alpha(t-r)`` to ``alpha(t+r)`` outside the open
    ``r``-ball about ``alpha(t)``, inside the ``truncation``-ball about ``alpha(t)``."""
    if r < 1:
        raise InvalidQuery("r must be >= 1")
    if truncation is None:
        truncation = default_truncation(r, len(spec))
    if truncation < 2 * r:
        raise InvalidQuery("truncation must be >= 2r")
    t0 = time.perf_counter()
    center = geodesic_point(spec, t)
    res = shortest_path_avoiding(spec.graph, geodesic_point(spec, t - r),
                                 geodesic_point(spec, t + r), center, r, truncation, budget)
    return DivergenceSample("rho", r, res, truncation, {"t": t}, _ms(t0))


def _rho_job(args):
    spec, r, t, truncation, budget = args
    return rho(spec, r, t, truncation, budget)


def pool_map(fn, items: Sequence, workers: int = 1) -> list:
    """Order-preserving map, in a process pool when ``workers > 1``."""
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, items))


def combine_ldiv(parts: Sequence[DivergenceSample], r: int, truncation: int,
                 provenance: dict) -> DivergenceSample:
    finite = [p for p in parts if p.finite]
    wall = round(sum(p.wall_ms for p in parts), 3)
    if len(finite) == len(parts):
        best = min(finite, key=lambda p: (p.value, p.provenance["t"]))
        res = PathQueryResult(PathStatus.FINITE, best.value, truncation, best.result.witness)
        provenance = dict(provenance, argmin_t=best.provenance["t"])
    elif finite:
        # some t finite, some not: the true infimum is not certified
        best = min(finite, key=lambda p: (p.value, p.provenance["t"]))
        res = PathQueryResult(PathStatus.MIXED, best.value, truncation, best.result.witness)
        provenance = dict(provenance, argmin_t=best.provenance["t"],
                          no_path_t=[p.provenance["t"] for p in parts if not p.finite])
    else:
        res = PathQueryResult.no_path(truncation)
    return DivergenceSample("ldiv", r, res, truncation, provenance, wall, tuple(parts))


def ldiv(spec: GeodesicSpec, r: int, truncation: Optional[int] = None,
         budget: Budget = UNLIMITED, t_values: Optional[Iterable[int]] = None,
         workers: int = 1) -> DivergenceSample:
    """Minimum of :func:`rho` over one period of integer times.

    Left translation by the period word is an automorphism carrying the
    geodesic to itself and shifting time by the period length, so one period
    covers every integer ``t``. Passing ``t_values`` samples a user window
    instead; the provenance then says so.
    """
    if truncation is None:
        truncation = default_truncation(r, len(spec))
    if t_values is None:
        ts = list(range(len(spec)))
        prov = {"t_range": [0, len(spec) - 1], "t_mode": "full-period"}
    else:
        ts = list(t_values)
        prov = {"t_range": [min(ts), max(ts)], "t_mode": "window-relative"}
    parts = pool_map(_rho_job, [(spec, r, t, truncation, budget) for t in ts], workers)
    return combine_ldiv(parts, r, truncation, prov)


def pair_divergence(ray_a: Ray, ray_b: Ray, r: int, truncation: Optional[int] = None,
                    budget: Budget = UNLIMITED) -> DivergenceSample:
    """Shortest path from ``ray_a(r)`` to ``ray_b(r)`` outside the open ``r``-ball
    about the shared initial point."""
    if ray_a.anchor != ray_b.anchor or ray_a.graph != ray_b.graph:
        raise InvalidQuery("rays must share their initial point")
    if r < 1:
        raise InvalidQuery("r must be >= 1")
    if truncation is None:
        truncation = default_truncation(r, max(len(ray_a.period), len(ray_b.period)))
    t0 = time.perf_counter()
    res = shortest_path_avoiding(ray_a.graph, ray_a.point(r), ray_b.point(r), ray_a.anchor,
                                 r, truncation, budget)
    return DivergenceSample("pair", r, res, truncation, {"pair": "a-b"}, _ms(t0))


def gersten_delta(ball: CayleyBall, rho_frac: Union[Fraction, int, str] = 1, r: int = 1,
                  max_pairs: int = 512, seed: int = 0, mode: str = "auto") -> DivergenceSample:
    """Largest finite annulus distance between points of the sphere ``S_r``.

    Paths must avoid the open ``ceil(rho_frac * r)``-ball about the basepoint
    and stay inside ``ball``. ``mode`` is ``"exhaustive"``, ``"sample"`` or
    ``"auto"`` (exhaustive when the sphere has at most ``max_pairs`` points).
    Sampled pairs are distinct unordered pairs drawn uniformly with a fixed seed.
    """
    frac = Fraction(rho_frac)
    if not 0 < frac <= 1:
        raise InvalidQuery("rho fraction must lie in (0, 1]")
    if r > ball.radius:
        raise InvalidQuery("ball radius must be at least r")
    t0 = time.perf_counter()
    avoid = math.ceil(frac * r)
    sphere = np.flatnonzero(ball.dist_from_base == r)
    m = len(sphere)
    if m == 0:
        raise InvalidQuery(f"sphere of radius {r} is empty")
    n_pairs = m * (m - 1) // 2
    if mode == "auto":
        mode = "exhaustive" if m <= max_pairs else "sample"
    if m == 1:
        pairs = [(0, 0)]
    elif mode == "exhaustive":
        pairs = [(i, j) for i in range(m) for j in range(i + 1, m)]
    elif mode == "sample":
        pairs = _sample_pairs(m, min(max_pairs, n_pairs), seed)
    else:
        raise InvalidQuery(f"unknown mode {mode!r}")

    allowed = ball.dist_from_base >= avoid
    by_source: dict[int, list[int]] = {}
    for i, j in pairs:
        by_source.setdefault(i, []).append(j)
    best = None
    n_inf = 0
    for i, targets in by_source.items():
        dist = _bfs_distances(ball, int(sphere[i]), allowed)
        for j in targets:
            dj = dist[sphere[j]]
            if dj < 0:
                n_inf += 1
                continue
            if best is None or dj > best[0]:
                best = (int(dj), i, j)
    prov = {
        "rho": str(frac),
        "avoid_radius": avoid,
        "sphere_size": m,
        "pairs_total": max(n_pairs, 1),
        "pairs_evaluated": len(pairs),
        "pairs_no_path": n_inf,
        "mode": mode,
        "seed": seed,
    }
    if best is None:
        res = PathQueryResult.no_path(ball.radius)
    else:
        G = ball.graph
        u, v = ball.vertices[sphere[best[1]]], ball.vertices[sphere[best[2]]]
        path = _bfs_path(ball, int(sphere[best[1]]), int(sphere[best[2]]), allowed)
        res = PathQueryResult(PathStatus.FINITE, best[0], ball.radius,
                              tuple(ball.vertices[k] for k in path))
        prov["argmax"] = [G.format(u), G.format(v)]
    return DivergenceSample("gersten", r, res, ball.radius, prov, _ms(t0))


def _sample_pairs(m: int, k: int, seed: int) -> list[tuple[int, int]]:
    rng = np.random.default_rng(seed)
    chosen: dict[tuple[int, int], None] = {}
    while len(chosen) < k:
        i, j = (int(x) for x in rng.integers(0, m, size=2))
        if i == j:
            continue
        chosen.setdefault((min(i, j), max(i, j)), None)
    return sorted(chosen)


def _bfs_distances(ball: CayleyBall, src: int, allowed: np.ndarray) -> np.ndarray:
    dist = np.full(len(ball), -1, dtype=np.int64)
    dist[src] = 0
    frontier = np.array([src])
    adj = ball.adjacency
    d = 0
    while frontier.size:
        d += 1
        nbrs = adj[frontier].ravel()
        nbrs = np.unique(nbrs[nbrs >= 0])
        nbrs = nbrs[(dist[nbrs] < 0) & allowed[nbrs]]
        dist[nbrs] = d
        frontier = nbrs
    return dist


# -- growth fits --------------------------------------------------------------

FIT_THRESHOLD = 0.98


@dataclass(frozen=True)
class GrowthFit:
    """``model`` is ``polynomial`` (parameter = exponent), ``exponential``
    (parameter = rate, natural log base) or ``inconclusive``."""

    model: str
    parameter: Optional[float]
    r_window: Optional[tuple[int, int]]
    residual: Optional[float]
    candidates: dict = field(default_factory=dict)
    n_points: int = 0

    def to_dict(self) -> dict:
        return {
            "model": self.model,
            "parameter": self.parameter,
            "r_window": list(self.r_window) if self.r_window else None,
            "residual": self.residual,
            "n_points": self.n_points,
            "candidates": self.candidates,
        }


def _linfit(x: np.ndarray, y: np.ndarray) -> dict:
    slope, intercept = np.polyfit(x, y, 1)
    pred = slope * x + intercept
    ss_res = float(np.sum((y - pred) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else (1.0 if ss_res == 0 else 0.0)
    return {"slope": float(slope), "intercept": float(intercept), "r2": r2}


def fit_points(rs: Sequence[float], values: Sequence[float]) -> GrowthFit:
    pts = sorted({int(r): float(v) for r, v in zip(rs, values) if v is not None and v > 0}.items())
    if len(pts) < 3:
        return GrowthFit("inconclusive", None, None, None, {}, len(pts))
    r = np.array([p[0] for p in pts], dtype=float)
    v = np.array([p[1] for p in pts], dtype=float)
    if np.any(r <= 0):
        raise ValueError("radii must be positive")
    logv = np.log(v)
    poly = _linfit(np.log(r), logv)
    expo = _linfit(r, logv)
    window = (int(r[0]), int(r[-1]))
    cands = {"polynomial": poly, "exponential": expo}
    if poly["r2"] >= FIT_THRESHOLD and poly["slope"] > 0:
        return GrowthFit("polynomial", poly["slope"], window, poly["r2"], cands, len(pts))
    if expo["r2"] >= FIT_THRESHOLD and expo["slope"] > 0:
        return GrowthFit("exponential", expo["slope"], window, expo["r2"], cands, len(pts))
    return GrowthFit("inconclusive", None, window, None, cands, len(pts))


def fit_growth(samples: Iterable[DivergenceSample]) -> GrowthFit:
    """Fit a growth class to the finite samples (non-finite ones are ignored)."""
    samples = [s for s in samples if s.finite]
    return fit_points([s.r for s in samples], [s.value for s in samples])


# -- exports ------------------------------------------------------------------

SAMPLE_COLUMNS = ["family", "geodesic", "r", "t", "status", "value", "truncation", "wall_ms"]


def _t_cell(s: DivergenceSample) -> str:
    p = s.provenance
    if "t" in p:
        return str(p["t"])
    if "t_range" in p:
        return f"{p['t_range'][0]}..{p['t_range'][1]}"
    return ""


def write_samples_csv(samples: Iterable[DivergenceSample], path, family: str, geodesic: str,
                      meta: Optional[dict] = None):
    with open(path, "w", newline="") as fh:
        if meta:
            fh.write("# " + json.dumps(meta, sort_keys=True) + "\n")
        w = csv.writer(fh)
        w.writerow(SAMPLE_COLUMNS)
        for s in samples:
            w.writerow([family, geodesic, s.r, _t_cell(s), s.status.value,
                        "" if s.value is None else s.value, s.truncation, s.wall_ms])


def write_fit_json(fit: GrowthFit, path, meta: Optional[dict] = None):
    body = fit.to_dict()
    if meta:
        body = {"config": meta, **body}
    with open(path, "w") as fh:
        json.dump(body, fh, indent=2, sort_keys=True)
        fh.write("\n")
