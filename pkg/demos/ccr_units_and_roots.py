"""Units and roots of a grid CCR flow.

Builds the CCR flow of multiplicity 2 on the dyadic grid of level 2, checks
that it is a product system, and looks at its vacuum, a random unit and
their roots.
"""
import numpy as np

from prodsys import ccr, inclusion, units

E = ccr.build(k=2, level=2)
print("slice dimensions:", E.dims)
print(inclusion.check_system(E).summary())

# The vacuum is the unit Ω⊗Ω⊗... ; its roots are one-particle step vectors.
vac = ccr.vacuum(E)
print(units.check_unit(vac).summary())
roots = units.root_space(E, vac)
print("roots of the vacuum:", roots.dim)
print("Gram at time 1/2:\n", np.round(roots.gram(E.m("1/2^1")).real, 12))

# Any normalized cell vector generates a unit, with the same number of roots.
rng = np.random.default_rng(1)
g = rng.normal(size=3) + 1j * rng.normal(size=3)
u = units.unit_from_cell(E, g / np.linalg.norm(g))
print("roots of a random unit:", units.root_space(E, u).dim)
print("index:", units.index_of(E))

# Additive units split into a multiple of s·u_s plus a root.
a = units.additive_from_cell(E, u, [0.3, -0.2j, 0.1])
lam, root = units.decompose_additive(a)
print("unit component:", np.round(lam, 6), " root is additive:", units.is_root(root))
