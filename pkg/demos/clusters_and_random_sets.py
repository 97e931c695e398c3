"""Random cell sets of the vacuum line and their clusters.

Each faithful state on E_1 turns the vacuum line into a random subset of the
fine cells. Coarse cells that hold two or more points form the cluster set,
whose law comes from the cluster subsystem F̌.
"""
import numpy as np

from prodsys import ccr
from prodsys import cluster as cl

E = ccr.build(1, 3)
vac = ccr.vacuum(E)
F = cl.unit_line(E, vac)

res = cl.cluster(E, F, coarse_level=1)
print("F′ dims by fine time:", res.f_prime.dims())
print("cluster dims by coarse time:", res.f_check.dims())
print(cl.cluster_checks(res, vac).summary())

# Under the trace every cell is occupied with probability 1/2.
n = E.n_cells
dist = cl.random_set_distribution(E, F, cl.FaithfulState.tracial(E.dims[n]))
print("fair coin error:", cl.fair_coin_error(dist))

eta = cl.FaithfulState.diagonal(E.dims[n], seed=4)
dist = cl.random_set_distribution(E, F, eta)
print("P(no points) =", round(dist.probs[0], 6), " P(all cells) =", round(dist.probs[-1], 6))
sizes = np.array([bin(a).count("1") for a in range(1 << n)])
print("mean number of points:", round(float(sizes @ dist.probs), 6))

# Push forward through the grid cluster map and compare with F̌.
print(cl.cluster_pushforward_check(E, F, eta, 1, res=res).summary())
