"""Peripheral cosets, coned-off Cayley balls and deep/transition points.

Coned distances are exact multiples of 1/2. Internally they are computed in
half-units (group edge = 2, cone edge = 1) and returned as ``Fraction``.
"""

from __future__ import annotations

import csv
import heapq
import json
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from .cayley import CayleyBall, InvalidQuery, NotFound
from .coxeter import (
    NormalForm,
    PresentationGraph,
    coset_min_rep,
    distance,
    distance_to_coset,
    inverse,
    multiply,
    peripheral_generators,
    rmul,
)


@dataclass(frozen=True)
class PeripheralStructure:
    """A finite list of generator subsets, each generating a peripheral special subgroup."""

    subgroups: tuple[frozenset[int], ...]

    @classmethod
    def from_names(cls, G: PresentationGraph, subsets: Iterable[Iterable[Union[str, int]]]):
        return cls(tuple(G.subset(T) for T in subsets))

    @classmethod
    def for_omega(cls, G: PresentationGraph) -> "PeripheralStructure":
        return cls((peripheral_generators(G),))

    def __len__(self):
        return len(self.subgroups)


@dataclass(frozen=True, order=True)
class PeripheralCoset:
    subgroup_index: int
    min_rep: NormalForm

    def sort_key(self):
        return (self.subgroup_index, len(self.min_rep), self.min_rep)


def coset_of(g: NormalForm, P: PeripheralStructure, i: int, G: PresentationGraph) -> PeripheralCoset:
    return PeripheralCoset(i, coset_min_rep(g, P.subgroups[i], G))


def enumerate_cosets(ball: CayleyBall, P: PeripheralStructure) -> list[tuple[PeripheralCoset, int]]:
    """Distinct peripheral cosets meeting the ball, with member counts."""
    counts: dict[PeripheralCoset, int] = {}
    G = ball.graph
    for i in range(len(P)):
        for g in ball.vertices:
            c = coset_of(g, P, i, G)
            counts[c] = counts.get(c, 0) + 1
    return sorted(counts.items(), key=lambda kv: kv[0].sort_key())


@dataclass(eq=False)
class ConedOffBall:
    """A Cayley ball plus one cone vertex per peripheral coset meeting it.

    Group vertices keep their ball ids ``0..N-1``; cone vertex ``c`` has id
    ``N + c``. ``membership[i]`` lists the cone ids joined to group vertex ``i``.
    """

    base: CayleyBall
    structure: PeripheralStructure
    cosets: list[PeripheralCoset]
    member_counts: list[int]
    membership: list[tuple[int, ...]]
    cone_index: dict = field(repr=False)

    @property
    def n_group(self) -> int:
        return len(self.base)

    @property
    def n_cones(self) -> int:
        return len(self.cosets)

    def cone_members(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in self.cosets]
        for i, cones in enumerate(self.membership):
            for c in cones:
                out[c - self.n_group].append(i)
        return out

    def vertex_id(self, v: Union[NormalForm, PeripheralCoset]) -> int:
        if isinstance(v, PeripheralCoset):
            try:
                return self.cone_index[v]
            except KeyError:
                raise NotFound(f"no cone vertex for {v}") from None
        return self.base.id(v)

    def cone_edges(self) -> list[tuple[int, int]]:
        return [(i, c) for i, cones in enumerate(self.membership) for c in cones]


def build_coned_off(ball: CayleyBall, P: PeripheralStructure) -> ConedOffBall:
    G = ball.graph
    per_vertex = []
    counts: dict[PeripheralCoset, int] = {}
    for g in ball.vertices:
        cs = tuple(coset_of(g, P, i, G) for i in range(len(P)))
        per_vertex.append(cs)
        for c in cs:
            counts[c] = counts.get(c, 0) + 1
    cosets = sorted(counts, key=PeripheralCoset.sort_key)
    n = len(ball)
    cone_index = {c: n + k for k, c in enumerate(cosets)}
    membership = [tuple(cone_index[c] for c in cs) for cs in per_vertex]
    return ConedOffBall(ball, P, cosets, [counts[c] for c in cosets], membership, cone_index)


def _coned_dijkstra(cb: ConedOffBall, src: int, dst: Optional[int] = None):
    """Half-unit Dijkstra over the coned ball. Returns (dist, parent) arrays."""
    n = cb.n_group
    total = n + cb.n_cones
    members = cb.cone_members()
    dist = np.full(total, -1, dtype=np.int64)
    parent = np.full(total, -1, dtype=np.int64)
    done = np.zeros(total, dtype=bool)
    dist[src] = 0
    heap = [(0, src)]
    adj = cb.base.adjacency
    while heap:
        d, x = heapq.heappop(heap)
        if done[x]:
            continue
        done[x] = True
        if x == dst:
            break
        if x < n:
            nbrs = [(int(j), 2) for j in adj[x] if j >= 0] + [(c, 1) for c in cb.membership[x]]
        else:
            nbrs = [(j, 1) for j in members[x - n]]
        for y, w in nbrs:
            nd = d + w
            if dist[y] < 0 or nd < dist[y]:
                dist[y] = nd
                parent[y] = x
                heapq.heappush(heap, (nd, y))
    return dist, parent


def coned_shortest_path(cb: ConedOffBall, u, v) -> tuple[Fraction, list[int]]:
    """Exact coned distance inside the truncation (an upper bound for the
    distance in the full coned-off graph) with a vertex-id path."""
    iu, iv = cb.vertex_id(u), cb.vertex_id(v)
    dist, parent = _coned_dijkstra(cb, iu, iv)
    if dist[iv] < 0:
        raise NotFound("endpoints are not connected in the coned ball")
    path = [iv]
    while path[-1] != iu:
        path.append(int(parent[path[-1]]))
    return Fraction(int(dist[iv]), 2), path[::-1]


def coned_distance(cb: ConedOffBall, u, v) -> Fraction:
    return coned_shortest_path(cb, u, v)[0]


def coned_path_vertices(cb: ConedOffBall, path: Sequence[int]) -> list:
    """Translate vertex ids into normal forms / cosets."""
    n = cb.n_group
    return [cb.base.vertices[i] if i < n else cb.cosets[i - n] for i in path]


# -- deep and transition points ----------------------------------------------

@dataclass(frozen=True)
class TransitionEntry:
    position: int
    status: str
    coset: Optional[PeripheralCoset] = None
    also_deep_in: tuple[PeripheralCoset, ...] = ()


@dataclass(frozen=True)
class TransitionAnnotation:
    entries: tuple[TransitionEntry, ...]
    epsilon: int
    R: int
    warnings: tuple[str, ...] = ()

    @property
    def deep_positions(self) -> list[int]:
        return [e.position for e in self.entries if e.status == "deep"]

    def tally(self) -> dict:
        deep = len(self.deep_positions)
        return {"deep": deep, "transition": len(self.entries) - deep}


def _check_geodesic(segment: Sequence[NormalForm], G: PresentationGraph):
    for a, b in zip(segment, segment[1:]):
        if distance(a, b, G) != 1:
            raise InvalidQuery("segment is not an edge path")
    if segment and distance(segment[0], segment[-1], G) != len(segment) - 1:
        raise InvalidQuery("segment is not geodesic")


def _nearby_cosets(x: NormalForm, P: PeripheralStructure, epsilon: int,
                   G: PresentationGraph) -> list[PeripheralCoset]:
    # every coset within epsilon of x is x*w*P_i for some |w| <= epsilon
    masks = G.commute_masks
    layer = {x}
    seen = {x}
    for _ in range(epsilon):
        nxt = set()
        for g in layer:
            for s in range(G.rank):
                h = rmul(g, s, masks)
                if h not in seen:
                    seen.add(h)
                    nxt.add(h)
        layer = nxt
    out = {coset_of(g, P, i, G) for g in seen for i in range(len(P))}
    return sorted(out, key=PeripheralCoset.sort_key)


def classify_transitions(segment: Sequence[NormalForm], P: PeripheralStructure,
                         G: PresentationGraph, epsilon: int = 1, R: int = 2,
                         ball: Optional[CayleyBall] = None) -> TransitionAnnotation:
    """Label each vertex of a geodesic segment ``deep`` or ``transition``.

    A vertex is deep in ``gP`` when it is farther than ``R`` from both
    endpoints and every segment vertex within ``R`` of it lies within
    ``epsilon`` of ``gP``. Distances to cosets are exact (minimal coset
    representatives), so ``ball`` is only used to check membership.
    """
    if epsilon < 0 or R < 1:
        raise InvalidQuery("need epsilon >= 0 and R >= 1")
    segment = list(segment)
    _check_geodesic(segment, G)
    if ball is not None:
        for g in segment:
            if g not in ball:
                raise InvalidQuery("segment leaves the ball")
    n = len(segment) - 1
    entries = []
    notes = []
    for k, x in enumerate(segment):
        if k <= R or n - k <= R:
            entries.append(TransitionEntry(k, "transition"))
            continue
        window = segment[k - R: k + R + 1]
        passing = []
        for c in _nearby_cosets(x, P, epsilon, G):
            T = P.subgroups[c.subgroup_index]
            if all(distance_to_coset(y, c.min_rep, T, G) <= epsilon for y in window):
                passing.append(c)
        if not passing:
            entries.append(TransitionEntry(k, "transition"))
            continue
        if len(passing) > 1:
            notes.append(f"position {k} is deep in {len(passing)} cosets")
        entries.append(TransitionEntry(k, "deep", passing[0], tuple(passing[1:])))
    for msg in notes:
        warnings.warn(msg, stacklevel=2)
    return TransitionAnnotation(tuple(entries), epsilon, R, tuple(notes))


def penetration_check(cb: ConedOffBall, p: Sequence[NormalForm], q: Sequence) -> dict:
    """How far a coned geodesic ``q`` strays from a Cayley path ``p``.

    For every group vertex of ``q`` take its word distance to the nearest
    vertex of ``p``; report the maximum of these against ``log2 |p|``.
    """
    G = cb.base.graph
    p = list(p)
    q = list(q)
    if not p or not q:
        raise InvalidQuery("empty path")
    for a, b in zip(p, p[1:]):
        if distance(a, b, G) != 1:
            raise InvalidQuery("p is not an edge path")
    q_ids = [cb.vertex_id(v) for v in q]
    if q[0] != p[0] or q[-1] != p[-1]:
        raise InvalidQuery("p and q must share endpoints")
    n = cb.n_group
    length = 0
    for a, b in zip(q_ids, q_ids[1:]):
        if a < n and b < n:
            if b not in cb.base.adjacency[a]:
                raise InvalidQuery("q uses a non-edge")
            length += 2
        elif a < n <= b:
            if b not in cb.membership[a]:
                raise InvalidQuery("q uses a non-edge")
            length += 1
        elif b < n <= a:
            if a not in cb.membership[b]:
                raise InvalidQuery("q uses a non-edge")
            length += 1
        else:
            raise InvalidQuery("q joins two cone vertices")
    geod = coned_distance(cb, q[0], q[-1])
    if Fraction(length, 2) != geod:
        raise InvalidQuery("q is not a geodesic in the coned ball")
    mins = []
    for v in q:
        if isinstance(v, PeripheralCoset):
            continue
        vi = inverse(v, G)
        mins.append(min(len(multiply(vi, w, G)) for w in p))
    worst = max(mins)
    plen = len(p) - 1
    log_len = math.log2(plen) if plen >= 1 else 0.0
    return {
        "path_length": plen,
        "coned_length": str(geod),
        "min_distances": mins,
        "max_min_distance": worst,
        "log2_path_length": log_len,
        "K_estimate": worst / log_len if log_len > 0 else None,
    }


# -- exports ------------------------------------------------------------------

def coned_ball_to_dict(cb: ConedOffBall) -> dict:
    G = cb.base.graph
    n = cb.n_group
    edges = []
    adj = cb.base.adjacency
    for i in range(n):
        for j in adj[i]:
            if j > i:
                edges.append([int(i), int(j), "1"])
    for i, c in cb.cone_edges():
        edges.append([i, c, "1/2"])
    return {
        "group_vertices": [G.format(g) for g in cb.base.vertices],
        "cone_vertices": [
            {"id": n + k, "min_rep": G.format(c.min_rep), "subgroup_index": c.subgroup_index,
             "members": cnt}
            for k, (c, cnt) in enumerate(zip(cb.cosets, cb.member_counts))
        ],
        "edges": edges,
    }


def write_coned_json(cb: ConedOffBall, path, meta: Optional[dict] = None):
    body = coned_ball_to_dict(cb)
    if meta:
        body = {"config": meta, **body}
    with open(path, "w") as fh:
        json.dump(body, fh, indent=1, sort_keys=True)
        fh.write("\n")


def write_transitions_csv(ann: TransitionAnnotation, G: PresentationGraph, path,
                          meta: Optional[dict] = None):
    with open(path, "w", newline="") as fh:
        if meta:
            fh.write("# " + json.dumps(meta, sort_keys=True) + "\n")
        w = csv.writer(fh)
        w.writerow(["position", "status", "coset_min_rep", "epsilon", "R"])
        for e in ann.entries:
            rep = "" if e.coset is None else G.format(e.coset.min_rep)
            w.writerow([e.position, e.status, rep, ann.epsilon, ann.R])
