"""
Normal forms in a right-angled Coxeter group
============================================

Every group element has a unique shortest, lexicographically least spelling.
Two words name the same element exactly when their normal forms agree.
"""

from racgdiv import gamma, is_reduced, multiply, normal_form, inverse

# Gamma_2: six involutions a0, a1, a2, b0, b1, b2; edges mark commuting pairs
G = gamma(2)
print(G.generators)
print(sorted(tuple(sorted(e)) for e in G.edges))

# squares cancel, commuting letters are sorted into declaration order
for w in ["a0 a0", "a1 a0", "b1 a0 b1", "a2 b2 a2 b2"]:
    print(f"{w!r:16} -> {G.format(normal_form(w, G))!r}")

# a word is reduced when no relation can shorten it
print(is_reduced("a2 b2 a2", G), is_reduced("a0 a1 a0", G))

# group operations stay in normal form
g = normal_form("a2 b2 b1", G)
print(G.format(multiply(g, inverse(g, G), G)) or "(identity)")
