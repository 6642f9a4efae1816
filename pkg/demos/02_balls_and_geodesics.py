"""
Cayley balls, sphere sizes and periodic geodesics
=================================================

Gamma_1 is a product of two infinite dihedral groups, so its Cayley graph is
the square grid and spheres have 4r elements.
"""

from racgdiv import GeodesicSpec, build_ball, gamma, geodesic_point, omega

G = gamma(1)
ball = build_ball(G, (), 6)
print("Gamma_1 sphere sizes:", ball.sphere_sizes())

# larger families grow exponentially
print("Omega_2 sphere sizes:", build_ball(omega(2), (), 4).sphere_sizes())

# a bi-infinite geodesic given by a period word; negative times run backwards
G2 = gamma(2)
alpha = GeodesicSpec.parse(G2, "a2 b2")
for t in range(-3, 4):
    print(f"alpha({t:+d}) = {G2.format(geodesic_point(alpha, t)) or '1'}")

# words whose powers are not geodesic are rejected
try:
    GeodesicSpec.parse(G2, "a0 a1")
except ValueError as exc:
    print("rejected:", exc)
