"""Gluing two product systems along a contraction.

The amalgamated product over C = |u⟩⟨v| is the spatial product; inside the
tensor product it is the span of E⊗v and u⊗F.
"""
import math

import numpy as np

from prodsys import amalgam, ccr, inclusion, units

E = ccr.build(1, 2)
vac = ccr.vacuum(E)

sp = amalgam.spatial_product(E, vac, E, vac)
print(sp.report.summary())
print("cell dimension of the spatial product:", sp.amalgam.G.cell_dim)

# A strict contraction between two copies of the trivial system produces a
# system of index one.
triv = inclusion.trivial_system(3)
q = math.exp(-0.7 * triv.delta)
A = amalgam.amalgamate(triv, triv, [[q]])
print(amalgam.amalgam_checks(A).summary())
print("index of the glued system:", units.index_of(A.G))

# On the grid every direction of the product cell except u⊗v is a root.
F = ccr.build(2, 2)
rep = amalgam.tensor_root_check(E, vac, F, ccr.vacuum(F))
print("roots of vac⊗vac:", rep.info["tensor_root_dim"], "from", rep.info["left_root_dim"], "+", rep.info["right_root_dim"])

# Powers sum of two automorphism semigroups, then a wrong intertwiner.
rng = np.random.default_rng(0)
Ua, Ub = np.linalg.qr(rng.normal(size=(2, 2)))[0], np.linalg.qr(rng.normal(size=(3, 3)))[0]
print(amalgam.powers_check(Ua, Ub).summary())
print("identity as intertwiner passes?", amalgam.powers_check(Ua, Ub, U=np.eye(2)).passed)
