"""
Lower divergence along a geodesic
=================================

rho(r, t) is the length of the shortest detour from alpha(t - r) to
alpha(t + r) that stays outside the open r-ball about alpha(t). Every search
is truncated to a finite ball, and the truncation radius travels with each
sample.
"""

from racgdiv import GeodesicSpec, dihedral_line, fit_growth, gamma, ldiv, rho

# on the grid the detour goes half way round a diamond: 4r
axis = GeodesicSpec.parse(gamma(1), "a0 b0")
print([rho(axis, r, 0, 3 * r).value for r in range(1, 6)])

# in the infinite dihedral group there is no way around at all
line = GeodesicSpec.parse(dihedral_line(), "s t")
print(rho(line, 2, 0, 6).status.value)

# ldiv minimises over one period of t; alpha_2 in Gamma_2 grows faster
alpha2 = GeodesicSpec.parse(gamma(2), "a2 b2")
samples = [ldiv(alpha2, r, 3 * r) for r in range(1, 4)]
for s in samples:
    print(f"r={s.r} ldiv={s.value} truncation={s.truncation} argmin t={s.provenance['argmin_t']}")

fit = fit_growth(samples)
print(fit.model, round(fit.parameter, 3), fit.candidates["exponential"]["r2"])
