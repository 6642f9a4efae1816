"""Truncated Cayley graphs and ball-avoiding shortest paths.

Two search routes are provided and cross-checked in the tests:

* :class:`CayleyBall` materialises every element within a radius of a
  basepoint together with its adjacency; :func:`avoidant_distance` and
  :func:`annulus_distance` run plain BFS on it.
* :func:`search_outside_ball` never builds the ball. It translates the
  problem so that the avoided ball is centred at the identity, where "outside
  the open r-ball" and "inside the truncation" are both just bounds on the
  normal-form length, and runs a bidirectional BFS. The divergence estimators
  use this route because it only touches the part of the annulus it needs.
"""

from __future__ import annotations

import csv
import json
import time
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .coxeter import (
    IDENTITY,
    InvalidParameter,
    NormalForm,
    PresentationGraph,
    WordLike,
    inverse,
    multiply,
    normal_form,
    rmul,
)


class InvalidQuery(ValueError):
    pass


class NotFound(KeyError):
    pass


class BudgetExceeded(RuntimeError):
    """A vertex-count or wall-time cap was hit; ``stats`` holds partial progress."""

    def __init__(self, message: str, stats: Optional[dict] = None):
        super().__init__(message)
        self.stats = stats or {}


@dataclass(frozen=True)
class Budget:
    max_vertices: Optional[int] = None
    max_seconds: Optional[float] = None

    def meter(self) -> "_Meter":
        return _Meter(self)


class _Meter:
    def __init__(self, budget: Budget):
        self.budget = budget
        self.t0 = time.perf_counter()
        self.count = 0

    def add(self, n: int = 1):
        self.count += n
        b = self.budget
        if b.max_vertices is not None and self.count > b.max_vertices:
            raise BudgetExceeded(f"vertex budget {b.max_vertices} exceeded",
                                 {"vertices": self.count})
        if b.max_seconds is not None and (self.count & 1023) == 0:
            self.check_time()

    def check_time(self):
        b = self.budget
        if b.max_seconds is not None and time.perf_counter() - self.t0 > b.max_seconds:
            raise BudgetExceeded(f"time budget {b.max_seconds}s exceeded",
                                 {"vertices": self.count})


UNLIMITED = Budget()


class PathStatus(str, Enum):
    FINITE = "finite"
    NO_PATH = "no_path_within_truncation"
    MIXED = "mixed"


@dataclass(frozen=True)
class PathQueryResult:
    status: PathStatus
    length: Optional[int]
    truncation_radius: int
    witness: Optional[tuple[NormalForm, ...]] = None

    @property
    def finite(self) -> bool:
        return self.status is PathStatus.FINITE

    @classmethod
    def no_path(cls, truncation: int) -> "PathQueryResult":
        return cls(PathStatus.NO_PATH, None, truncation)


# -- explicit balls -----------------------------------------------------------

@dataclass(eq=False)
class CayleyBall:
    """All elements within ``radius`` of ``basepoint``.

    ``adjacency[i, s]`` is the vertex id of ``vertices[i] * s`` or -1 when that
    element lies outside the ball. The Cayley graph of a right-angled Coxeter
    group is bipartite, so every edge joins consecutive distance levels.
    """

    graph: PresentationGraph
    basepoint: NormalForm
    radius: int
    vertices: list[NormalForm]
    adjacency: np.ndarray
    dist_from_base: np.ndarray
    index: dict = field(repr=False)

    def __len__(self):
        return len(self.vertices)

    def __contains__(self, g) -> bool:
        return g in self.index

    def id(self, g: NormalForm) -> int:
        try:
            return self.index[g]
        except KeyError:
            raise NotFound(f"{self.graph.format(g, 'e')!r} is not in the ball") from None

    def sphere_sizes(self) -> list[int]:
        return np.bincount(self.dist_from_base, minlength=self.radius + 1).tolist()

    def sphere(self, r: int) -> list[NormalForm]:
        return [self.vertices[i] for i in np.flatnonzero(self.dist_from_base == r)]

    def neighbors(self, i: int) -> np.ndarray:
        row = self.adjacency[i]
        return row[row >= 0]

    def distances_from(self, center: NormalForm) -> np.ndarray:
        """Exact word distance from ``center`` to every ball vertex."""
        if center == self.basepoint:
            return self.dist_from_base
        G = self.graph
        ci = inverse(center, G)
        return np.array([len(multiply(ci, v, G)) for v in self.vertices], dtype=np.int64)


def build_ball(G: PresentationGraph, base: WordLike = IDENTITY, radius: int = 1,
               budget: Budget = UNLIMITED) -> CayleyBall:
    if radius < 0:
        raise InvalidParameter("radius must be non-negative")
    base = normal_form(base, G)
    masks = G.commute_masks
    k = G.rank
    meter = budget.meter()
    vertices = [base]
    index = {base: 0}
    dist = [0]
    rows: list[list[int]] = []
    sizes = [1]
    head = 0
    try:
        while head < len(vertices):
            w = vertices[head]
            dw = dist[head]
            row = [-1] * k
            for s in range(k):
                x = rmul(w, s, masks)
                j = index.get(x)
                if j is None and dw < radius:
                    j = len(vertices)
                    index[x] = j
                    vertices.append(x)
                    dist.append(dw + 1)
                    if dw + 1 == len(sizes):
                        sizes.append(0)
                    sizes[dw + 1] += 1
                    meter.add()
                if j is not None:
                    row[s] = j
            rows.append(row)
            head += 1
    except BudgetExceeded as exc:
        # levels 0..dist[head] are complete when level dist[head] is being expanded
        exc.stats["sphere_sizes"] = sizes[: dist[head] + 1]
        raise
    return CayleyBall(G, base, radius, vertices,
                      np.array(rows, dtype=np.int64).reshape(len(vertices), k),
                      np.array(dist, dtype=np.int64), index)


def distance(ball: CayleyBall, u: NormalForm, v: NormalForm) -> int:
    ball.id(u)
    ball.id(v)
    return len(multiply(inverse(u, ball.graph), v, ball.graph))


def _bfs_path(ball: CayleyBall, src: int, dst: int, allowed: np.ndarray) -> Optional[list[int]]:
    if src == dst:
        return [src]
    parent = np.full(len(ball), -1, dtype=np.int64)
    parent[src] = src
    q = deque([src])
    adj = ball.adjacency
    while q:
        i = q.popleft()
        for j in adj[i]:
            if j < 0 or parent[j] >= 0 or not allowed[j]:
                continue
            parent[j] = i
            if j == dst:
                path = [j]
                while path[-1] != src:
                    path.append(int(parent[path[-1]]))
                return path[::-1]
            q.append(j)
    return None


def avoidant_distance(ball: CayleyBall, u: NormalForm, v: NormalForm,
                      center: NormalForm, r: int) -> PathQueryResult:
    """Shortest ``u``-``v`` path in the ball avoiding the open ``r``-ball about ``center``."""
    try:
        iu, iv = ball.id(u), ball.id(v)
        ball.id(center)
    except NotFound as exc:
        raise InvalidQuery(str(exc)) from None
    dc = ball.distances_from(center)
    if dc[iu] < r or dc[iv] < r:
        raise InvalidQuery("endpoints must lie outside the open ball about the center")
    path = _bfs_path(ball, iu, iv, dc >= r)
    if path is None:
        return PathQueryResult.no_path(ball.radius)
    return PathQueryResult(PathStatus.FINITE, len(path) - 1, ball.radius,
                           tuple(ball.vertices[i] for i in path))


def annulus_distance(ball: CayleyBall, u: NormalForm, v: NormalForm, r: int) -> PathQueryResult:
    return avoidant_distance(ball, u, v, ball.basepoint, r)


# -- implicit search ----------------------------------------------------------

def search_outside_ball(G: PresentationGraph, u: NormalForm, v: NormalForm, r: int,
                        truncation: int, budget: Budget = UNLIMITED):
    """Bidirectional BFS from ``u`` to ``v`` over ``{g : r <= |g| <= truncation}``.

    The avoided ball and the truncation ball are both centred at the identity.
    Returns ``(length, path)`` or ``None`` when the two endpoints are not
    connected inside the annulus.
    """
    if not (r <= len(u) <= truncation and r <= len(v) <= truncation):
        raise InvalidQuery("endpoints must satisfy r <= |g| <= truncation")
    if u == v:
        return 0, [u]
    masks = G.commute_masks
    k = G.rank
    meter = budget.meter()
    pa: dict = {u: None}
    pb: dict = {v: None}
    da = {u: 0}
    db = {v: 0}
    fa, fb = [u], [v]
    while fa and fb:
        meter.check_time()
        if len(fa) <= len(fb):
            front, dist, par, other = fa, da, pa, db
        else:
            front, dist, par, other = fb, db, pb, da
        nxt = []
        best = None
        for w in front:
            dw = dist[w] + 1
            for s in range(k):
                x = rmul(w, s, masks)
                n = len(x)
                if n < r or n > truncation:
                    continue
                if x not in dist:
                    dist[x] = dw
                    par[x] = w
                    nxt.append(x)
                    meter.add()
                if x in other:
                    cand = (dist[x] + other[x], x)
                    if best is None or cand[0] < best[0]:
                        best = cand
        # a full level has been expanded, so the best meeting point is optimal
        if best is not None:
            mid = best[1]
            left = []
            x = mid
            while x is not None:
                left.append(x)
                x = pa[x]
            right = []
            x = pb[mid]
            while x is not None:
                right.append(x)
                x = pb[x]
            return best[0], left[::-1] + right
        if front is fa:
            fa = nxt
        else:
            fb = nxt
    return None


def shortest_path_avoiding(G: PresentationGraph, u: NormalForm, v: NormalForm,
                           center: NormalForm, r: int, truncation: int,
                           budget: Budget = UNLIMITED) -> PathQueryResult:
    """Like :func:`avoidant_distance` on ``build_ball(G, center, truncation)``,
    without materialising the ball."""
    ci = inverse(center, G)
    u0 = multiply(ci, u, G)
    v0 = multiply(ci, v, G)
    if len(u0) < r or len(v0) < r:
        raise InvalidQuery("endpoints must lie outside the open ball about the center")
    if len(u0) > truncation or len(v0) > truncation:
        raise InvalidQuery("endpoints lie outside the truncation ball")
    found = search_outside_ball(G, u0, v0, r, truncation, budget)
    if found is None:
        return PathQueryResult.no_path(truncation)
    length, path = found
    witness = tuple(multiply(center, p, G) for p in path)
    return PathQueryResult(PathStatus.FINITE, length, truncation, witness)


def validate_witness(G: PresentationGraph, result: PathQueryResult, u: NormalForm,
                     v: NormalForm, center: NormalForm, r: int) -> bool:
    """Check a witness edge by edge and against the avoidance constraint."""
    path = result.witness
    if path is None or len(path) - 1 != result.length:
        return False
    if path[0] != u or path[-1] != v:
        return False
    ci = inverse(center, G)
    for a, b in zip(path, path[1:]):
        if len(multiply(inverse(a, G), b, G)) != 1:
            return False
    return all(len(multiply(ci, p, G)) >= r for p in path)


# -- periodic geodesics -------------------------------------------------------

@dataclass(frozen=True)
class GeodesicSpec:
    """A bi-infinite geodesic labelled by ``period`` repeated, through ``anchor``.

    ``anchor`` is the point at parameter 0; positive times read the period
    forwards, negative times read it backwards.
    """

    graph: PresentationGraph
    period: tuple[int, ...]
    anchor: NormalForm = IDENTITY
    check_powers: int = 6

    def __post_init__(self):
        G = self.graph
        period = G.word(self.period) if not _is_index_tuple(self.period) else self.period
        object.__setattr__(self, "period", tuple(period))
        object.__setattr__(self, "anchor", normal_form(self.anchor, G))
        if not period:
            raise InvalidParameter("period must be non-empty")
        for n in range(1, max(self.check_powers, 1) + 1):
            if len(normal_form(period * n, G)) != n * len(period):
                raise InvalidParameter(f"period not reduced (power {n} is not geodesic)")

    @classmethod
    def parse(cls, G: PresentationGraph, period: WordLike, anchor: WordLike = IDENTITY, **kw):
        return cls(G, G.word(period), normal_form(anchor, G), **kw)

    def label(self) -> str:
        return f"({self.graph.format(self.period)})^inf"

    def __len__(self):
        return len(self.period)

    def halves(self) -> tuple["Ray", "Ray"]:
        """The forward and backward rays from the anchor."""
        return (Ray(self.graph, self.period, self.anchor),
                Ray(self.graph, self.period[::-1], self.anchor))


def _is_index_tuple(w) -> bool:
    return isinstance(w, tuple) and all(isinstance(x, int) for x in w)


@dataclass(frozen=True)
class Ray:
    """A periodic geodesic ray ``anchor * period^inf``."""

    graph: PresentationGraph
    period: tuple[int, ...]
    anchor: NormalForm = IDENTITY

    def point(self, t: int) -> NormalForm:
        if t < 0:
            raise InvalidParameter("rays are parametrised by t >= 0")
        p = self.period
        return multiply(self.anchor, tuple(p[i % len(p)] for i in range(t)), self.graph)


def geodesic_point(spec: GeodesicSpec, t: int) -> NormalForm:
    p = spec.period if t >= 0 else spec.period[::-1]
    letters = tuple(p[i % len(p)] for i in range(abs(t)))
    return multiply(spec.anchor, letters, spec.graph)


def geodesic_segment(spec: GeodesicSpec, t0: int, t1: int) -> list[NormalForm]:
    return [geodesic_point(spec, t) for t in range(t0, t1 + 1)]


# -- exports ------------------------------------------------------------------

def _write_meta(fh, meta: Optional[dict]):
    if meta:
        fh.write("# " + json.dumps(meta, sort_keys=True) + "\n")


def write_ball_csv(sizes: Sequence[int], path, meta: Optional[dict] = None):
    """Columns ``r, sphere_size, ball_size``; optional ``#`` metadata line first."""
    with open(path, "w", newline="") as fh:
        _write_meta(fh, meta)
        w = csv.writer(fh)
        w.writerow(["r", "sphere_size", "ball_size"])
        total = 0
        for r, n in enumerate(sizes):
            total += n
            w.writerow([r, n, total])


def write_witness_json(G: PresentationGraph, witness: Sequence[NormalForm], path):
    Path(path).write_text(json.dumps([G.format(g) for g in witness], indent=1) + "\n")
