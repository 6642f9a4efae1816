"""
Peripheral cosets and the coned-off Cayley graph
================================================

In Omega_d the subgroup generated by the a and b letters is peripheral. Each
of its cosets meeting a ball gets a cone vertex joined to its members by
edges of length 1/2, so any two members are at most 1 apart.
"""

from racgdiv import (
    GeodesicSpec,
    PeripheralStructure,
    build_ball,
    build_coned_off,
    classify_transitions,
    coned_distance,
    enumerate_cosets,
    geodesic_segment,
    normal_form,
    omega,
)

G = omega(1)
P = PeripheralStructure.for_omega(G)
ball = build_ball(G, (), 3)
print([(G.format(c.min_rep) or "1", n) for c, n in enumerate_cosets(ball, P)][:6])

cb = build_coned_off(ball, P)
far = normal_form("a0 b0 a0", G)
print(cb.n_group, "group vertices,", cb.n_cones, "cones; coned distance to a0 b0 a0:",
      coned_distance(cb, (), far))

# deep points stay near one coset for a while; transition points do not
for word in ("a1 b1", "c1 b0"):
    seg = geodesic_segment(GeodesicSpec.parse(G, word), 0, 11)
    ann = classify_transitions(seg, P, G, epsilon=1, R=2)
    print(f"({word})^inf:", ann.tally(), ann.deep_positions)
