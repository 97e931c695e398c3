"""Grid model of the CCR flow of index k in the configuration picture.

The cell space is C ⊕ C^k: basis vector 0 is the empty cell, basis vector
``1 + i`` is one particle carrying value index i. A slice of m cells is the
m-fold tensor power, so its basis is indexed by a configuration (the set of
occupied cells) together with one value index per occupied cell. A function
f with cell values f_c enters with amplitude ``sqrt(δ) f_c`` so grid inner
products are Riemann sums of the continuum ones.
"""
from __future__ import annotations

import itertools
import math
import os
from typing import Iterable, Sequence

import numpy as np

from . import linalg as la
from .errors import OutOfRange, SizeLimit
from .inclusion import GridSystem, TensorPowerSystem

DEFAULT_SLICE_CAP = 4096


def slice_cap(override: int | None = None) -> int:
    """Largest slice dimension accepted by :func:`build`."""
    if override is not None:
        return int(override)
    env = os.environ.get("PRODSYS_SLICE_CAP")
    return int(env) if env else DEFAULT_SLICE_CAP


class GridCCR(TensorPowerSystem):
    """Tensor-power product system with cell C ⊕ C^k."""

    def __init__(self, k: int, level: int):
        super().__init__(1 + k, level)
        self.k = int(k)


def build(k: int, level: int, cap: int | None = None) -> GridCCR:
    """Grid CCR flow of index k at level L.

    Raises
    ------
    SizeLimit
        If the slice at time 1 would exceed the slice cap.
    """
    if k < 1 or level < 1:
        raise ValueError("need k >= 1 and level >= 1")
    top = (1 + k) ** (1 << level)
    if top > slice_cap(cap):
        raise SizeLimit(f"slice dimension {top} exceeds cap {slice_cap(cap)}")
    return GridCCR(k, level)


def vacuum_cell(k: int) -> np.ndarray:
    e = np.zeros(1 + k, dtype=complex)
    e[0] = 1.0
    return e


def vacuum(sys: GridCCR):
    from .units import VectorFamily

    om = vacuum_cell(sys.k)
    return VectorFamily(sys, {m: la.tensor_power(om, m) for m in range(1, sys.n_cells + 1)})


def _cell_values(sys: GridCCR, f, m: int) -> np.ndarray:
    f = np.asarray(f, dtype=complex)
    if f.ndim == 1 and sys.k == 1:
        f = f[:, None]
    if f.ndim == 1:
        f = np.broadcast_to(f, (m, sys.k))
    if f.shape != (m, sys.k):
        raise ValueError(f"step function needs shape ({m}, {sys.k}), got {f.shape}")
    return f


def exp_vector(sys: GridCCR, f, t) -> np.ndarray:
    """⊗_c (1 ⊕ sqrt(δ) f_c) over the cells of [0, t].

    ``f`` has shape (m, k) (or (m,) when k = 1, or (k,) for a constant).
    """
    m = sys.m(t)
    f = _cell_values(sys, f, m)
    r = math.sqrt(sys.delta)
    cells = [np.concatenate(([1.0], r * f[c])) for c in range(m)]
    return la.tensor(*cells)


def exp_gram(f_cells, g_cells, delta: float) -> complex:
    """Closed form ⟨e(f), e(g)⟩ = Π_c (1 + δ ⟨f_c, g_c⟩) of grid exponential vectors."""
    f = np.asarray(f_cells, dtype=complex).reshape(len(f_cells), -1)
    g = np.asarray(g_cells, dtype=complex).reshape(len(g_cells), -1)
    return complex(np.prod(1 + delta * np.sum(f.conj() * g, axis=1)))


def midpoint_samples(fn, level: int) -> np.ndarray:
    """Values of fn at the midpoints of the 2**level cells of [0, 1]."""
    n = 1 << level
    return np.asarray([fn((c + 0.5) / n) for c in range(n)])


def exp_gram_error(f, g, level: int) -> float:
    """|Π(1 + δ f_c g_c) − exp(∫ f̄ g)| for scalar functions sampled at cell midpoints."""
    from scipy.integrate import quad

    fc, gc = midpoint_samples(f, level), midpoint_samples(g, level)
    re = quad(lambda x: (np.conj(f(x)) * g(x)).real, 0, 1, epsabs=1e-14, epsrel=1e-14)[0]
    im = quad(lambda x: (np.conj(f(x)) * g(x)).imag, 0, 1, epsabs=1e-14, epsrel=1e-14)[0]
    return abs(exp_gram(fc, gc, 1.0 / (1 << level)) - np.exp(re + 1j * im))


def one_particle_embedding(sys: GridCCR, t) -> np.ndarray:
    """Isometry from C^{m k} (cell-major step functions) onto the one-particle sector of E_t."""
    m = sys.m(t)
    d, k = sys.k + 1, sys.k
    out = np.zeros((d**m, m * k), dtype=complex)
    for j in range(m):
        for i in range(k):
            idx = (1 + i) * d ** (m - 1 - j)
            out[idx, j * k + i] = 1.0
    return out


def vacuum_root(sys: GridCCR, c):
    """Root a_{mδ} = Σ_j Ω⊗..⊗(0 ⊕ sqrt(δ) c)⊗..⊗Ω of the vacuum."""
    from .units import additive_from_cell

    c = np.asarray(c, dtype=complex).reshape(sys.k)
    a_cell = np.concatenate(([0.0], math.sqrt(sys.delta) * c))
    return additive_from_cell(sys, vacuum(sys), a_cell)


def shift(sys: GridCCR, r, t) -> np.ndarray:
    """Right shift by r on step functions: maps L²-grid[0, t−r] into L²-grid[0, t].

    Both sides use cell-major coordinates (cell index slow, value index fast).
    """
    k = sys.k
    rc = 0 if (isinstance(r, (int, np.integer)) and r == 0) else sys.m(r)
    tc = sys.m(t)
    if not 0 <= rc < tc:
        raise OutOfRange(f"shift needs 0 <= r < t, got r={rc}, t={tc} cells")
    out = np.zeros((tc * k, (tc - rc) * k), dtype=complex)
    out[rc * k:, :] = np.eye((tc - rc) * k)
    return out


def one_particle_part(sys: GridCCR, x: np.ndarray, t) -> np.ndarray:
    """Step-function coefficients (divided by sqrt δ) of the one-particle component."""
    return one_particle_embedding(sys, t).conj().T @ x / math.sqrt(sys.delta)


def occupation_numbers(sys: GridCCR, m: int) -> np.ndarray:
    """Number of occupied cells for each basis index of the slice with m cells."""
    occ = np.array([0] + [1] * sys.k)
    out = np.zeros(1, dtype=int)
    for _ in range(m):
        out = (out[:, None] + occ[None, :]).reshape(-1)
    return out


def particle_sector(sys: GridCCR, m: int, n: int | Sequence[int]) -> la.Subspace:
    """Coordinate subspace of configurations with the given number(s) of occupied cells."""
    ns = [n] if isinstance(n, (int, np.integer)) else list(n)
    occ = occupation_numbers(sys, m)
    idx = np.flatnonzero(np.isin(occ, ns))
    basis = np.zeros((occ.size, idx.size), dtype=complex)
    basis[idx, np.arange(idx.size)] = 1.0
    return la.Subspace(occ.size, basis)


def solve_vacuum_roots(sys: GridCCR, tol: float = 1e-10):
    """All roots of the vacuum, from the joint null space of the two-cell constraints.

    Unknowns are (a_δ, a_{2δ}); constraints are additivity
    a_{2δ} = a_δ⊗Ω + Ω⊗a_δ and orthogonality to Ω at both times.
    """
    from scipy.linalg import null_space

    from .units import RootSpace, additive_from_cell

    d = sys.k + 1
    om = vacuum_cell(sys.k)
    ident = np.eye(d, dtype=complex)
    add = np.kron(ident, om[:, None]) + np.kron(om[:, None], ident)  # a ↦ a⊗Ω + Ω⊗a
    A = np.zeros((d * d + 2, d + d * d), dtype=complex)
    A[: d * d, :d] = -sys.split_pull(1, 1, add)
    A[: d * d, d:] = np.eye(d * d)
    A[d * d, :d] = om.conj()
    A[d * d + 1, d:] = la.tensor(om, om).conj()
    ns = null_space(A, rcond=tol)
    cell = la.orthonormalize(ns[:d, :], tol)
    u = vacuum(sys)
    fams = [additive_from_cell(sys, u, math.sqrt(sys.delta) * cell.basis[:, j]) for j in range(cell.dim)]
    return RootSpace(u, fams)


def truncate(sys: GridCCR, N: int) -> GridSystem:
    """Inclusion system of configurations with at most N occupied cells.

    The returned system carries ``embeddings[m]``: the coordinate isometry of
    the truncated slice into the full CCR slice.
    """
    if N < 0:
        raise ValueError("N must be nonnegative")
    emb = {}
    dims = {}
    for m in range(1, sys.n_cells + 1):
        idx = np.flatnonzero(occupation_numbers(sys, m) <= N)
        V = np.zeros((sys.dims[m], idx.size), dtype=complex)
        V[idx, np.arange(idx.size)] = 1.0
        emb[m], dims[m] = V, idx.size
    beta = {}
    for a in range(1, sys.n_cells):
        for b in range(1, sys.n_cells - a + 1):
            beta[(a, b)] = np.kron(emb[a], emb[b]).conj().T @ emb[a + b]
    kind = "product" if N >= sys.n_cells else "inclusion"
    out = GridSystem(sys.level, dims, beta, kind)
    out.embeddings = emb
    out.k = sys.k
    out.max_particles = N
    return out


def poisson_weight(sigma: Iterable, delta: float) -> float:
    """Grid weight δ^{|σ|} of a configuration."""
    return float(delta ** len(tuple(sigma)))


def configurations(m: int):
    """All subsets of the cells 0..m-1, as sorted tuples."""
    for n in range(m + 1):
        yield from itertools.combinations(range(m), n)


def to_configuration_function(sys: GridCCR, x: np.ndarray, t) -> dict:
    """Configuration-picture function σ ↦ f(σ) ∈ (C^k)^{⊗|σ|} of a slice vector.

    The tensor-model amplitude of σ is divided by δ^{|σ|/2}.
    """
    m = sys.m(t)
    d = sys.k + 1
    x = np.asarray(x, dtype=complex).reshape((d,) * m)
    out = {}
    for sigma in configurations(m):
        idx = tuple(slice(1, None) if c in sigma else 0 for c in range(m))
        out[sigma] = np.asarray(x[idx]).reshape(-1) / sys.delta ** (len(sigma) / 2)
    return out


def configuration_inner(f: dict, g: dict, delta: float) -> complex:
    """Σ_σ δ^{|σ|} ⟨f(σ), g(σ)⟩."""
    return complex(sum(poisson_weight(s, delta) * np.vdot(f[s], g[s]) for s in f))
