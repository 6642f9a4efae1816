import json
import random

import pytest

from oracles import grid_avoiding_bfs, grid_point, tits_ball, tits_generators
from racgdiv.cayley import (
    Budget,
    BudgetExceeded,
    GeodesicSpec,
    InvalidQuery,
    NotFound,
    PathStatus,
    annulus_distance,
    avoidant_distance,
    build_ball,
    distance,
    geodesic_point,
    shortest_path_avoiding,
    validate_witness,
    write_ball_csv,
    write_witness_json,
)
from racgdiv.coxeter import InvalidParameter, multiply, normal_form


def test_ball_small(G1, O1):
    assert len(build_ball(G1, (), 1)) == 5
    b = build_ball(G1, (), 2)
    assert b.sphere_sizes() == [1, 4, 8]
    assert len(b) == 13
    assert len(build_ball(O1, (), 1)) == 7


def test_grid_spheres(G1):
    assert build_ball(G1, (), 10).sphere_sizes()[1:] == [4 * r for r in range(1, 11)]


def test_grid_ball_matches_coordinates(G1):
    # every normal form maps to a distinct grid point at L1 distance = length
    b = build_ball(G1, (), 6)
    pts = {grid_point(v) for v in b.vertices}
    assert len(pts) == len(b)
    for v in b.vertices:
        x, y = grid_point(v)
        assert abs(x) + abs(y) == len(v)


@pytest.mark.parametrize("name,radius", [("G2", 5), ("O2", 4)])
def test_sphere_sizes_match_tits_bfs(name, radius, request):
    G = request.getfixturevalue(name)
    mats = tits_generators(G.generators, [tuple(e) for e in G.edges])
    oracle = tits_ball(mats, radius)
    counts = [0] * (radius + 1)
    for d in oracle.values():
        counts[d] += 1
    assert build_ball(G, (), radius).sphere_sizes() == counts


def test_ball_invariants(O2):
    base = normal_form("c1 b0", O2)
    b = build_ball(O2, base, 3)
    adj, dist = b.adjacency, b.dist_from_base
    for i in range(len(b)):
        for s, j in enumerate(adj[i]):
            if j < 0:
                continue
            assert adj[j, s] == i
            assert abs(dist[i] - dist[j]) == 1
            assert b.vertices[j] == multiply(b.vertices[i], (s,), O2)
        assert distance(b, base, b.vertices[i]) == dist[i]


def test_ball_budget(O2):
    with pytest.raises(BudgetExceeded) as exc:
        build_ball(O2, (), 6, Budget(max_vertices=1000))
    sizes = exc.value.stats["sphere_sizes"]
    assert sizes[:3] == [1, 8, 45]


def test_negative_radius(G1):
    with pytest.raises(InvalidParameter):
        build_ball(G1, (), -1)


def test_distance_examples(G1, G2):
    b = build_ball(G1, (), 3)
    assert distance(b, (), ()) == 0
    assert distance(b, (), normal_form("a0 b0", G1)) == 2
    with pytest.raises(NotFound):
        distance(b, (), normal_form("a0 b0 a0 b0", G1))


def test_distance_equals_bfs(G2):
    b = build_ball(G2, (), 4)
    rng = random.Random(5)
    for _ in range(30):
        u, v = rng.choice(b.vertices), rng.choice(b.vertices)
        # BFS inside a ball of radius 8 about u certifies the distance
        bu = build_ball(G2, u, 8)
        assert distance(b, u, v) == bu.dist_from_base[bu.id(v)]


# -- avoidant paths -----------------------------------------------------------

def test_avoidant_grid_example(G1):
    b = build_ball(G1, (), 4)
    u, v = normal_form("a0", G1), normal_form("b0", G1)
    assert grid_point(u) == (1, 0) and grid_point(v) == (-1, 0)
    res = avoidant_distance(b, u, v, (), 1)
    assert res.status is PathStatus.FINITE and res.length == 4
    assert res.length == grid_avoiding_bfs((1, 0), (-1, 0), (0, 0), 1, 4)
    assert validate_witness(G1, res, u, v, (), 1)


def test_avoidant_line_disconnects(line):
    b = build_ball(line, (), 8)
    res = avoidant_distance(b, normal_form("s", line), normal_form("t", line), (), 1)
    assert res.status is PathStatus.NO_PATH and res.length is None


def test_avoidant_same_point(G1):
    b = build_ball(G1, (), 3)
    u = normal_form("a0 a1", G1)
    assert avoidant_distance(b, u, u, (), 2).length == 0


def test_avoidant_precondition(G1):
    b = build_ball(G1, (), 3)
    with pytest.raises(InvalidQuery):
        avoidant_distance(b, (), normal_form("a0", G1), (), 1)


def test_annulus_examples(G1, line):
    b = build_ball(G1, (), 6)
    u = normal_form("a0 b0", G1)   # (2, 0)
    v = normal_form("a1 b1", G1)   # (0, 2)
    assert grid_point(u) == (2, 0) and grid_point(v) == (0, 2)
    res = annulus_distance(b, u, v, 2)
    assert res.length == 4 == grid_avoiding_bfs((2, 0), (0, 2), (0, 0), 2, 6)
    assert annulus_distance(b, u, u, 2).length == 0
    bl = build_ball(line, (), 5)
    assert annulus_distance(bl, normal_form("s", line), normal_form("t", line), 1).status \
        is PathStatus.NO_PATH


def test_grid_avoidant_against_oracle(G1):
    b = build_ball(G1, (), 7)
    rng = random.Random(1)
    for _ in range(60):
        r = rng.randint(1, 3)
        ring = [v for v in b.vertices if r <= len(v) <= 5]
        u, v = rng.choice(ring), rng.choice(ring)
        res = annulus_distance(b, u, v, r)
        want = grid_avoiding_bfs(grid_point(u), grid_point(v), (0, 0), r, 7)
        assert (res.length if res.finite else None) == want


@pytest.mark.parametrize("name", ["G2", "O1", "O2"])
def test_implicit_search_matches_explicit_ball(name, request):
    G = request.getfixturevalue(name)
    rng = random.Random(2)
    center = normal_form(tuple(rng.randrange(G.rank) for _ in range(3)), G)
    T = 6
    ball = build_ball(G, center, T)
    for _ in range(25):
        r = rng.randint(1, 2)
        ring = [v for v, d in zip(ball.vertices, ball.dist_from_base) if r <= d <= 4]
        u, v = rng.choice(ring), rng.choice(ring)
        a = avoidant_distance(ball, u, v, center, r)
        b = shortest_path_avoiding(G, u, v, center, r, T)
        assert a.status == b.status and a.length == b.length
        if b.finite:
            assert validate_witness(G, b, u, v, center, r)
            assert validate_witness(G, a, u, v, center, r)
            assert b.length >= distance(ball, u, v)


def test_avoidant_with_off_base_center(G2):
    ball = build_ball(G2, (), 6)
    center = normal_form("a2", G2)
    u, v = normal_form("a2 b2 a2", G2), normal_form("b2 a2", G2)
    a = avoidant_distance(ball, u, v, center, 2)
    assert a.finite and a.length >= 4


def test_truncation_monotone(O1):
    rng = random.Random(4)
    for _ in range(20):
        u = normal_form(tuple(rng.randrange(O1.rank) for _ in range(4)), O1)
        v = normal_form(tuple(rng.randrange(O1.rank) for _ in range(4)), O1)
        r = min(len(u), len(v), 2)
        if r < 1:
            continue
        prev = None
        for T in range(max(len(u), len(v)), 9):
            res = shortest_path_avoiding(O1, u, v, (), r, T)
            if prev is not None and prev.finite:
                assert res.finite and res.length <= prev.length
            prev = res


# -- geodesics ----------------------------------------------------------------

def test_geodesic_point_examples(G2):
    a = GeodesicSpec.parse(G2, "a2 b2")
    assert geodesic_point(a, 0) == ()
    assert G2.format(geodesic_point(a, 3)) == "a2 b2 a2"
    assert G2.format(geodesic_point(a, -2)) == "b2 a2"
    from racgdiv.coxeter import distance as word_distance
    assert word_distance(geodesic_point(a, -2), geodesic_point(a, 3), G2) == 5


@pytest.mark.parametrize("family,d,word", [
    ("gamma", 1, "a1 b1"), ("gamma", 2, "a2 b2"), ("gamma", 3, "a3 b3"), ("omega", 2, "c1 b0"),
])
def test_geodesic_isometric(family, d, word):
    from racgdiv.coxeter import build_family, distance as word_distance
    G = build_family(family, d)
    spec = GeodesicSpec.parse(G, word)
    pts = {t: geodesic_point(spec, t) for t in range(-20, 21)}
    for t1 in range(-20, 21, 3):
        for t2 in range(-20, 21):
            assert word_distance(pts[t1], pts[t2], G) == abs(t1 - t2)


def test_geodesic_spec_rejects_unreduced(G1, line):
    with pytest.raises(InvalidParameter, match="period not reduced"):
        GeodesicSpec.parse(G1, "a0 a1")   # commuting letters: (a0 a1)^2 = 1
    with pytest.raises(InvalidParameter):
        GeodesicSpec.parse(G1, "a0 a0")
    GeodesicSpec.parse(line, "s t")


def test_anchor_translation(O1):
    spec = GeodesicSpec.parse(O1, "c1 b0", anchor="a0 c2")
    assert geodesic_point(spec, 0) == normal_form("a0 c2", O1)
    assert geodesic_point(spec, 2) == normal_form("a0 c2 c1 b0", O1)


# -- exports ------------------------------------------------------------------

def test_ball_csv(tmp_path, G1):
    p = tmp_path / "b.csv"
    write_ball_csv(build_ball(G1, (), 3).sphere_sizes(), p)
    rows = p.read_text().splitlines()
    assert rows == ["r,sphere_size,ball_size", "0,1,1", "1,4,5", "2,8,13", "3,12,25"]


def test_witness_json(tmp_path, G1):
    b = build_ball(G1, (), 4)
    res = avoidant_distance(b, normal_form("a0", G1), normal_form("b0", G1), (), 1)
    p = tmp_path / "w.json"
    write_witness_json(G1, res.witness, p)
    data = json.loads(p.read_text())
    assert data[0] == "a0" and data[-1] == "b0" and len(data) == 5
