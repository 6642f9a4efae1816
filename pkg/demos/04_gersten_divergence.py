"""
Gersten divergence of the whole Cayley graph
============================================

delta(r) is the largest distance, avoiding the open rho*r ball about the
basepoint, between two points of the sphere of radius r.
"""

from racgdiv import build_ball, fit_growth, gamma, gersten_delta, omega

ball = build_ball(gamma(1), (), 15)
samples = [gersten_delta(ball, 1, r) for r in range(1, 6)]
print([s.value for s in samples], fit_growth(samples).model)
print("farthest pair at r=5:", samples[-1].provenance["argmax"])

# big spheres are sampled: 512 distinct pairs with a fixed seed
ball = build_ball(omega(2), (), 6)
s = gersten_delta(ball, "1/2", 4, max_pairs=512, seed=0)
print(s.value, {k: s.provenance[k] for k in ("mode", "sphere_size", "pairs_evaluated")})
