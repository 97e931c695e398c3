"""Clusters of subsystems and the random sets they induce.

For a subsystem F of a product system E the split-orthogonal space at time t
is the span of β*(x⊗y) with x ⊥ F_r, y ⊥ F_{t−r} over interior grid splits r;
F′_t is its orthogonal complement. On a finite grid every configuration with
two or more occupied cells can be split, so the cluster F̌ is generated from
F′ only over coarse partitions with cells of length Δ = 2**-L′ (the two-scale
rule). Interval projections 1⊗P_F⊗1 on E_1 commute and define a random subset
of the fine cells through its avoidance probabilities.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import reduce
from itertools import combinations

import numpy as np

from . import linalg as la
from .errors import (
    ConfigError,
    LevelOrder,
    NotProductSubsystem,
    OutOfRange,
    SizeLimit,
    StateNotFaithful,
)
from .inclusion import (
    GridSystem,
    SubsystemFamily,
    TensorPowerSystem,
    TensorSystem,
    beta_composite,
    check_subsystem,
    generated_subsystem,
)
from .report import Report
from .units import VectorFamily

MAX_FINE_CELLS = 12

REF_F_PRIME = "F′ is the complement of the split-orthogonal span"
REF_F_PRIME_INCLUSION = "F′ is an inclusion subsystem containing F"
REF_CLUSTER_TYPE_I = "cluster of a unit line is its type I part"
REF_SANDWICH = "F ⊆ cluster ⊆ ambient"
REF_IDEMPOTENT = "cluster is a product subsystem fixed by generation"
REF_COMMUTE = "interval projections commute"
REF_FACTOR = "interval projections of a product subsystem factorize"
REF_MU = "avoidance probabilities are state expectations of interval projections"
REF_AT_MOST_ONE = "at most one point in an interval corresponds to the F′ projection"
REF_PUSHFORWARD = "cluster distribution is the pushforward under the cluster map"
REF_NULL_SETS = "null sets do not depend on the faithful state"
REF_X_LEMMA = "unit tensors preserve F′"
REF_X_DECOMP = "X splits into left and right unit translates"
REF_SHIFT = "unit translation is a semigroup of isometries on X"

_RANK_TOL = 1e-9


# split kernels ----------------------------------------------------------

def _complement_basis(S: la.Subspace) -> np.ndarray:
    return la.complement(S).basis


def _term_kernel(ambient: GridSystem, m: int, r: int, left: la.Subspace, right: la.Subspace):
    """Orthonormal basis of ker(β*(Q_l⊗Q_r)β) in E_m for a product system.

    The kernel of Q_l⊗Q_r in E_r⊗E_s is (F_l⊗E_s) ⊕ (F_l^⊥⊗F_r); β* is
    unitary on a product system so it carries an orthonormal basis across.
    """
    s = m - r
    eye_s = np.eye(ambient.dims[s], dtype=complex)
    cols = np.concatenate([np.kron(left.basis, eye_s), np.kron(_complement_basis(left), right.basis)], axis=1)
    return ambient.split_pull(r, s, cols)


def _apply_split_term(ambient: GridSystem, m: int, r: int, Ql: np.ndarray, Qr: np.ndarray, K: np.ndarray) -> np.ndarray:
    """(Q_l⊗Q_r) β_{r,m−r} applied to the columns of K, without forming the Kronecker product."""
    s = m - r
    Y = ambient.split_push(r, s, K).reshape(ambient.dims[r], ambient.dims[s], -1)
    Y = np.einsum("ij,jkc->ikc", Ql, Y)
    Y = np.einsum("kl,ilc->ikc", Qr, Y)
    return Y.reshape(ambient.dims[r] * ambient.dims[s], -1)


def _null_columns(A: np.ndarray) -> np.ndarray:
    """Coefficient vectors c (orthonormal) with A c = 0, from the Gram matrix."""
    if A.shape[1] == 0:
        return np.zeros((0, 0), dtype=complex)
    w, v = np.linalg.eigh(A.conj().T @ A)
    return v[:, w <= _RANK_TOL * max(float(w.max()), 1.0)]


def split_kernel(ambient: GridSystem, left: SubsystemFamily, right: SubsystemFamily, m: int) -> la.Subspace:
    """Complement in E_m of span{β*(x⊗y): x ⊥ left_r, y ⊥ right_{m−r}, 0 < r < m}.

    Computed as the intersection over r of the kernels of β*(Q_r⊗Q_{m−r})β,
    starting from the smallest kernel so large slices are never materialized.
    """
    n = ambient.dims[m]
    terms = []
    for r in range(1, m):
        L, R = left[r], right[m - r]
        if L.dim == L.ambient_dim or R.dim == R.ambient_dim:
            continue  # Q_r ⊗ Q_{m-r} vanishes
        kdim = L.dim * R.ambient_dim + (L.ambient_dim - L.dim) * R.dim
        terms.append((kdim, r))
    if not terms:
        return la.Subspace.full(n)
    terms.sort()
    if ambient.kind == "product":
        _, r0 = terms[0]
        K = _term_kernel(ambient, m, r0, left[r0], right[m - r0])
        rest = terms[1:]
    else:
        K = np.eye(n, dtype=complex)
        rest = terms
    for _, r in rest:
        if K.shape[1] == 0:
            break
        Ql = np.eye(left[r].ambient_dim) - left[r].projector()
        Qr = np.eye(right[m - r].ambient_dim) - right[m - r].projector()
        A = _apply_split_term(ambient, m, r, Ql, Qr, K)
        K = K @ _null_columns(A)
    return la.orthonormalize(K, ambient_dim=n)


def f_prime(ambient: GridSystem, F: SubsystemFamily, t) -> la.Subspace:
    """F′_t: the orthogonal complement of the split-orthogonal span at t."""
    return split_kernel(ambient, F, F, ambient.m(t))


def f_tilde(ambient: GridSystem, F: SubsystemFamily, t) -> la.Subspace:
    """Split-orthogonal span at t; rank 0 at t = δ where no interior split exists."""
    m = ambient.m(t)
    return la.complement(f_prime(ambient, F, m))


def f_prime_family(ambient: GridSystem, F: SubsystemFamily, max_m: int | None = None) -> SubsystemFamily:
    top = ambient.n_cells if max_m is None else int(max_m)
    return SubsystemFamily(ambient, {m: f_prime(ambient, F, m) for m in range(1, top + 1)})


def two_subsystem_cluster(ambient: GridSystem, F1: SubsystemFamily, F2: SubsystemFamily, t) -> la.Subspace:
    """G′_t: complement of span{β*(x⊗y): x ⊥ F1_r, y ⊥ F2_{t−r}}."""
    return split_kernel(ambient, F1, F2, ambient.m(t))


def f_prime_checks(ambient: GridSystem, F: SubsystemFamily, max_m: int | None = None, tol: float = 1e-10) -> Report:
    """F′ is an inclusion subsystem containing F, and agrees with the split-span oracle."""
    fam = f_prime_family(ambient, F, max_m)
    rep = Report("f_prime")
    rep.add("f_prime_inclusion_defect", REF_F_PRIME_INCLUSION, check_subsystem(fam, tol).measured("inclusion_defect"), tol)
    rep.add("f_prime_contains_f_defect", REF_F_PRIME_INCLUSION, max(la.dominance_defect(F[m], fam[m]) for m in fam.times()), tol)
    oracle = 0.0
    for m in fam.times():
        if ambient.dims[m] <= 512:
            oracle = max(oracle, la.subspace_distance(fam[m], _split_span_oracle(ambient, F, F, m)))
    rep.add("f_prime_oracle_distance", REF_F_PRIME, oracle, tol)
    rep.info["dims"] = {str(m): fam[m].dim for m in fam.times()}
    return rep


def _split_span_oracle(ambient, F1, F2, m) -> la.Subspace:
    """Brute force: stack every β*(x⊗y) and take the complement of the span."""
    cols = [np.zeros((ambient.dims[m], 0), dtype=complex)]
    for r in range(1, m):
        X, Y = _complement_basis(F1[r]), _complement_basis(F2[m - r])
        if X.shape[1] and Y.shape[1]:
            cols.append(ambient.split_pull(r, m - r, np.kron(X, Y)))
    span = la.orthonormalize(np.concatenate(cols, axis=1), ambient_dim=ambient.dims[m])
    return la.complement(span)


# coarse grid ------------------------------------------------------------

def coarse_system(ambient: GridSystem, coarse_level: int) -> GridSystem:
    """The ambient system restricted to times that are multiples of Δ = 2**-coarse_level."""
    if not 0 <= coarse_level < ambient.level:
        raise LevelOrder(f"need 0 <= coarse level < {ambient.level}, got {coarse_level}")
    step = 1 << (ambient.level - coarse_level)
    if isinstance(ambient, TensorSystem):
        return TensorSystem(coarse_system(ambient.E, coarse_level), coarse_system(ambient.F, coarse_level))
    if isinstance(ambient, TensorPowerSystem):
        return TensorPowerSystem(ambient.cell_dim**step, coarse_level)
    n = 1 << coarse_level
    dims = {j: ambient.dims[j * step] for j in range(1, n + 1)}
    beta = {(a, b): ambient.beta(a * step, b * step) for a in range(1, n) for b in range(1, n - a + 1)}
    return GridSystem(coarse_level, dims, beta, ambient.kind)


@dataclass
class ClusterResult:
    """F′ on fine times up to one coarse cell and the cluster F̌ on the coarse grid."""

    ambient: GridSystem
    F: SubsystemFamily
    f_prime: SubsystemFamily
    f_check: SubsystemFamily
    coarse: GridSystem
    fine_level: int
    coarse_level: int

    @property
    def step(self) -> int:
        """Fine cells per coarse cell."""
        return 1 << (self.fine_level - self.coarse_level)

    @property
    def f_tilde(self) -> SubsystemFamily:
        return SubsystemFamily(self.ambient, {m: la.complement(s) for m, s in self.f_prime.spaces.items()})


def cluster(ambient: GridSystem, F: SubsystemFamily, coarse_level: int, tol: float = 1e-10) -> ClusterResult:
    """Cluster of F: product subsystem generated by F′_Δ over coarse partitions.

    Raises
    ------
    LevelOrder
        Unless 0 <= coarse_level < ambient.level.
    """
    C = coarse_system(ambient, coarse_level)
    step = 1 << (ambient.level - coarse_level)
    fp = f_prime_family(ambient, F, step)
    seed = SubsystemFamily(C, {1: fp[step]})
    fc = generated_subsystem(C, seed, tol, check=False)
    return ClusterResult(ambient, F, fp, fc, C, ambient.level, coarse_level)


def first_order_span(ambient: GridSystem, u: VectorFamily, m: int) -> la.Subspace:
    """Span of u_m and the one-cell root insertions u^{⊗j}⊗a⊗u^{⊗(m−j−1)}, a ⊥ u_δ.

    This is what the unit and its roots generate inside one coarse cell when
    at most one factor of a partition carries a root.
    """
    g = la.as_vector(u[1])
    perp = la.complement(la.orthonormalize([g]))
    cols = [la.tensor_power(g, m)[:, None]]
    for j in range(m):
        cols.append(np.kron(np.kron(la.tensor_power(g, j)[:, None], perp.basis), la.tensor_power(g, m - j - 1)[:, None]))
    return la.orthonormalize(ambient.pull(m, np.concatenate(cols, axis=1)), ambient_dim=ambient.dims[m])


def type_I_coarse(ambient: GridSystem, u: VectorFamily, coarse_level: int, tol: float = 1e-10) -> SubsystemFamily:
    """Coarse product subsystem generated by the unit and its roots, one root per coarse cell."""
    C = coarse_system(ambient, coarse_level)
    step = 1 << (ambient.level - coarse_level)
    return generated_subsystem(C, SubsystemFamily(C, {1: first_order_span(ambient, u, step)}), tol, check=False)


def _line(ambient: GridSystem, u: VectorFamily) -> SubsystemFamily:
    return SubsystemFamily(ambient, {m: la.orthonormalize([u[m]], ambient_dim=ambient.dims[m]) for m in range(1, ambient.n_cells + 1)})


def unit_line(ambient: GridSystem, u: VectorFamily) -> SubsystemFamily:
    """The subsystem C·u_t."""
    return _line(ambient, u)


def _coarse_restrict(res: ClusterResult, fam: SubsystemFamily) -> SubsystemFamily:
    return SubsystemFamily(res.coarse, {j: fam[j * res.step] for j in res.coarse.dims if j * res.step in fam.spaces})


def cluster_checks(res: ClusterResult, u: VectorFamily | None = None, tol: float = 1e-10) -> Report:
    """Sandwich, product property, fixed point of generation and (for a unit line) type I agreement."""
    rep = Report("cluster")
    C, fc = res.coarse, res.f_check
    Fc = _coarse_restrict(res, res.F)
    lower = max(la.dominance_defect(Fc[j], fc[j]) for j in Fc.times())
    rep.add("cluster_contains_f_defect", REF_SANDWICH, lower, tol)
    rep.add("cluster_within_ambient_defect", REF_SANDWICH, max(la.dominance_defect(fc[j], la.Subspace.full(C.dims[j])) for j in fc.times()), tol)
    prod = check_subsystem(fc, tol, require_product=True)
    rep.add("cluster_product_defect", REF_IDEMPOTENT, max(prod.measured("inclusion_defect"), prod.measured("product_onto_defect")), tol)
    regen = generated_subsystem(C, SubsystemFamily(C, {1: fc[1]}), tol, check=False)
    rep.add("cluster_generation_fixed_point_distance", REF_IDEMPOTENT, max(la.subspace_distance(regen[j], fc[j]) for j in fc.times()), tol)
    again = cluster(res.ambient, res.F, res.coarse_level, tol)
    rep.add("cluster_recompute_distance", REF_IDEMPOTENT, max(la.subspace_distance(again.f_check[j], fc[j]) for j in fc.times()), tol)
    if u is not None:
        t1 = type_I_coarse(res.ambient, u, res.coarse_level, tol)
        rep.add("cluster_vs_type_I_distance", REF_CLUSTER_TYPE_I, max(la.subspace_distance(t1[j], fc[j]) for j in fc.times()), tol)
    rep.info["cluster_dims"] = {str(j): fc[j].dim for j in fc.times()}
    rep.info["f_prime_dims"] = {str(m): res.f_prime[m].dim for m in res.f_prime.times()}
    return rep


# states -----------------------------------------------------------------

@dataclass(frozen=True)
class FaithfulState:
    """Faithful normal state η(X) = tr(ρX) on B(E_1).

    ``density`` is either the full density matrix ρ or, for a diagonal
    state, the 1-d array of its eigenvalues (which avoids storing ρ).
    """

    density: np.ndarray

    def __post_init__(self):
        rho = np.asarray(self.density, dtype=complex)
        if rho.ndim == 1:
            w = rho.real
            if np.any(rho.imag != 0):
                raise StateNotFaithful("diagonal weights must be real")
        elif rho.ndim == 2 and rho.shape[0] == rho.shape[1]:
            if la.opnorm(rho - rho.conj().T) > 1e-12:
                raise StateNotFaithful("density is not Hermitian")
            w = np.linalg.eigvalsh(rho)
        else:
            raise StateNotFaithful("density must be square")
        if abs(float(w.sum()) - 1) > 1e-12:
            raise StateNotFaithful(f"trace {float(w.sum()):.3g} != 1")
        if float(w.min()) <= 0:
            raise StateNotFaithful("density is not positive definite")
        object.__setattr__(self, "density", rho.real if rho.ndim == 1 else rho)

    @property
    def dim(self) -> int:
        return self.density.shape[0]

    @property
    def is_diagonal(self) -> bool:
        d = self.density
        return d.ndim == 1 or not np.any(d - np.diag(np.diag(d)))

    @property
    def weights(self) -> np.ndarray:
        """Diagonal of ρ."""
        d = self.density
        return d if d.ndim == 1 else np.real(np.diag(d))

    @property
    def matrix(self) -> np.ndarray:
        d = self.density
        return np.diag(d).astype(complex) if d.ndim == 1 else d

    def __call__(self, X) -> float:
        X = np.asarray(X)
        if self.density.ndim == 1:
            return float(np.real(self.density @ np.diag(X)))
        return float(np.real(np.sum(self.density.T * X)))

    @classmethod
    def tracial(cls, dim: int) -> "FaithfulState":
        return cls(np.full(dim, 1.0 / dim))

    @classmethod
    def diagonal(cls, dim: int, seed: int = 0) -> "FaithfulState":
        """Diagonal density with distinct random positive eigenvalues."""
        w = np.random.default_rng(seed).uniform(0.5, 1.5, size=dim)
        return cls(w / w.sum())

    @classmethod
    def parse(cls, text: str, dim: int) -> "FaithfulState":
        """``"tracial"`` or ``"diag(SEED)"``."""
        if text == "tracial":
            return cls.tracial(dim)
        mt = re.fullmatch(r"diag\((\d+)\)", text.strip())
        if mt:
            return cls.diagonal(dim, int(mt.group(1)))
        raise ConfigError(f"unknown state {text!r}; use 'tracial' or 'diag(SEED)'")


# interval projections ---------------------------------------------------

def _cell_index(sys: GridSystem, t) -> int:
    if isinstance(t, (int, np.integer)):
        c = int(t)
    else:
        from .grid import as_time

        c = as_time(t).cells(sys.level)
    if not 0 <= c <= sys.n_cells:
        raise OutOfRange(f"time {t} outside [0, 1]")
    return c


def _blocks_projection(sys: GridSystem, blocks, factors) -> np.ndarray:
    """β*(⊗ factors)β for consecutive blocks (cell counts) covering [0, 1]."""
    blocks = tuple(blocks)
    if isinstance(sys, TensorPowerSystem):
        return reduce(np.kron, factors)
    B = beta_composite(sys, (sys.n_cells,), blocks)
    return B.conj().T @ reduce(np.kron, factors) @ B


def _runs(mask: int, n: int):
    """Consecutive (start, length, inside) runs of the bit pattern over n cells."""
    out, c = [], 0
    while c < n:
        inside = bool(mask >> c & 1)
        s = c
        while c < n and bool(mask >> c & 1) == inside:
            c += 1
        out.append((s, c - s, inside))
    return out


def avoidance_projection(sys: GridSystem, F: SubsystemFamily, mask: int) -> np.ndarray:
    """Product of P^F over the maximal runs of cells set in ``mask``."""
    runs = _runs(mask, sys.n_cells)
    blocks = [length for _, length, _ in runs]
    factors = [F[length].projector() if inside else np.eye(sys.dims[length], dtype=complex) for _, length, inside in runs]
    return _blocks_projection(sys, blocks, factors)


def interval_projection(ambient: GridSystem, F: SubsystemFamily, s, t) -> np.ndarray:
    """1⊗P_{F_{t−s}}⊗1 on E_1 for grid times 0 <= s < t <= 1.

    Raises
    ------
    OutOfRange
        If s >= t or either lies outside [0, 1].
    """
    a, b = _cell_index(ambient, s), _cell_index(ambient, t)
    if a >= b:
        raise OutOfRange(f"need s < t, got {s}, {t}")
    mask = ((1 << b) - 1) ^ ((1 << a) - 1)
    return avoidance_projection(ambient, F, mask)


def grid_intervals(n: int, stride: int):
    ends = list(range(0, n + 1, stride))
    return [(a, b) for a, b in combinations(ends, 2)]


def interval_projection_checks(ambient: GridSystem, F: SubsystemFamily, stride: int | None = None, tol: float = 1e-10) -> Report:
    """Commutativity and factorization P_{r,s}P_{s,t} = P_{r,t} over intervals on a sub-grid."""
    n = ambient.n_cells
    stride = stride or max(1, n // 4)
    ivs = grid_intervals(n, stride)
    P = {iv: interval_projection(ambient, F, *iv) for iv in ivs}
    comm = max((la.opnorm(P[x] @ P[y] - P[y] @ P[x]) for x, y in combinations(ivs, 2)), default=0.0)
    ends = sorted({a for a, _ in ivs} | {b for _, b in ivs})
    fac = max((la.opnorm(P[(r, s)] @ P[(s, t)] - P[(r, t)]) for r, s, t in combinations(ends, 3)), default=0.0)
    proj = max(la.projection_defect(p) for p in P.values())
    rep = Report("interval_projections")
    rep.add("interval_commutator", REF_COMMUTE, comm, tol)
    rep.add("interval_factorization_defect", REF_FACTOR, fac, tol)
    rep.add("interval_projection_defect", REF_COMMUTE, proj, tol)
    return rep


# random sets ------------------------------------------------------------

@dataclass
class RandomSetDistribution:
    """Exact law of a random subset of the n fine cells; probs indexed by bitmask (bit c = cell c)."""

    cells: int
    probs: np.ndarray
    provenance: dict = field(default_factory=dict)

    def avoid(self, mask: int) -> float:
        """P(Z ∩ mask = ∅)."""
        idx = np.arange(self.probs.size)
        return float(self.probs[(idx & mask) == 0].sum())

    def probability(self, predicate) -> float:
        return float(sum(p for a, p in enumerate(self.probs) if predicate(a)))

    def pushforward(self, fn, cells: int) -> "RandomSetDistribution":
        out = np.zeros(1 << cells)
        for a, p in enumerate(self.probs):
            out[fn(a)] += p
        return RandomSetDistribution(cells, out, {"pushforward_of": self.provenance})

    def to_json(self) -> dict:
        return {"cells": self.cells, "probs": [float(p) for p in self.probs]}

    @classmethod
    def from_json(cls, d: dict) -> "RandomSetDistribution":
        probs = np.asarray(d["probs"], dtype=float)
        if probs.size != 1 << d["cells"]:
            raise ValueError("probs must have 2**cells entries")
        return cls(int(d["cells"]), probs)


def subset_moebius(f: np.ndarray) -> np.ndarray:
    """g(A) = Σ_{A′⊆A} (−1)^{|A∖A′|} f(A′) over bitmask-indexed arrays."""
    g = np.array(f, dtype=float)
    n = g.size.bit_length() - 1
    idx = np.arange(g.size)
    for i in range(n):
        hi = idx[(idx >> i) & 1 == 1]
        g[hi] -= g[hi ^ (1 << i)]
    return g


def _diag_avoid(sys: TensorPowerSystem, F: SubsystemFamily, weights: np.ndarray, mask: int) -> float:
    parts = []
    for _, length, inside in _runs(mask, sys.n_cells):
        # diagonal of a projector = squared row norms of an orthonormal basis
        parts.append(np.sum(np.abs(F[length].basis) ** 2, axis=1) if inside else np.ones(sys.dims[length]))
    return float(weights @ reduce(np.kron, parts))


def expect_avoidance(ambient: GridSystem, F: SubsystemFamily, eta: FaithfulState, mask: int) -> float:
    """η(Π P^F over runs of mask), using the diagonal shortcut when it applies."""
    if isinstance(ambient, TensorPowerSystem) and eta.is_diagonal:
        return _diag_avoid(ambient, F, eta.weights, mask)
    return eta(avoidance_projection(ambient, F, mask))


def avoidance_table(ambient: GridSystem, F: SubsystemFamily, eta: FaithfulState) -> np.ndarray:
    """η(Π P^F over runs of B) for every bitmask B."""
    return np.array([expect_avoidance(ambient, F, eta, B) for B in range(1 << ambient.n_cells)])


def random_set_distribution(ambient: GridSystem, F: SubsystemFamily, eta: FaithfulState, tol: float = 1e-10) -> RandomSetDistribution:
    """Exact distribution of the random cell set of a product subsystem under a faithful state.

    P(Z ⊆ S) is the avoidance probability of the complement of S; point
    probabilities follow by Möbius inversion over subsets.

    Raises
    ------
    SizeLimit
        More than ``MAX_FINE_CELLS`` cells.
    NotProductSubsystem
        If F is not a product subsystem.
    StateNotFaithful
        If the state does not live on E_1.
    """
    n = ambient.n_cells
    if n > MAX_FINE_CELLS:
        raise SizeLimit(f"{n} cells exceed the cap of {MAX_FINE_CELLS}")
    if eta.dim != ambient.dims[n]:
        raise StateNotFaithful(f"state dimension {eta.dim} != dim E_1 = {ambient.dims[n]}")
    rep = check_subsystem(F, tol, require_product=True)
    if not rep.passed:
        raise NotProductSubsystem(rep.summary())
    full = (1 << n) - 1
    avoid = avoidance_table(ambient, F, eta)
    contained = avoid[full ^ np.arange(1 << n)]  # P(Z ⊆ S) = avoid(S^c)
    raw = subset_moebius(contained)
    probs = np.where((raw < 0) & (raw >= -1e-12), 0.0, raw)
    dist = RandomSetDistribution(n, probs, {"subsystem_dims": [F[m].dim for m in F.times()], "state_diag": eta.is_diagonal})
    dist.raw_min = float(raw.min())
    return dist


def distribution_checks(dist: RandomSetDistribution, tol: float = 1e-10) -> Report:
    """Normalization, positivity and monotonicity of avoidance."""
    rep = Report("distribution")
    rep.add("probability_sum_defect", REF_MU, abs(float(dist.probs.sum()) - 1.0), tol)
    rep.add("probability_min", REF_MU, float(getattr(dist, "raw_min", dist.probs.min())), -1e-12, kind="lower")
    n = dist.cells
    avoid = np.array([dist.avoid(B) for B in range(1 << n)])
    mono = 0.0
    for B in range(1 << n):
        for i in range(n):
            if not B >> i & 1:
                mono = max(mono, avoid[B | 1 << i] - avoid[B])
    rep.add("avoidance_monotonicity_violation", REF_MU, max(mono, 0.0), tol)
    return rep


def fair_coin_error(dist: RandomSetDistribution) -> float:
    """Max deviation from the uniform law on subsets."""
    return float(np.max(np.abs(dist.probs - 2.0 ** -dist.cells)))


def null_pattern_check(ambient: GridSystem, F: SubsystemFamily, eta1: FaithfulState, eta2: FaithfulState, threshold: float = 1e-12) -> Report:
    """Zero/nonzero pattern of point probabilities agrees for two faithful states."""
    d1 = random_set_distribution(ambient, F, eta1)
    d2 = random_set_distribution(ambient, F, eta2)
    mismatch = int(np.sum((np.abs(d1.probs) > threshold) != (np.abs(d2.probs) > threshold)))
    rep = Report("null_sets")
    rep.add("null_pattern_mismatches", REF_NULL_SETS, mismatch, 0, kind="equal", expected=0)
    rep.info["support_size"] = int(np.sum(np.abs(d1.probs) > threshold))
    return rep


def _interval_mask(a: int, b: int) -> int:
    return ((1 << b) - 1) ^ ((1 << a) - 1)


def at_most_one_check(ambient: GridSystem, F: SubsystemFamily, eta: FaithfulState, s, t, tol: float = 1e-9,
                      dist: RandomSetDistribution | None = None) -> Report:
    """|μ(at most one point in [s, t]) − η(1⊗P_{F′_{t−s}}⊗1)|."""
    a, b = _cell_index(ambient, s), _cell_index(ambient, t)
    if a >= b:
        raise OutOfRange(f"need s < t, got {s}, {t}")
    dist = dist or random_set_distribution(ambient, F, eta)
    mask = _interval_mask(a, b)
    lhs = dist.probability(lambda A: bin(A & mask).count("1") <= 1)
    Fp = SubsystemFamily(ambient, {b - a: f_prime(ambient, F, b - a)})
    rhs = expect_avoidance(ambient, Fp, eta, mask)
    rep = Report("at_most_one")
    rep.add("at_most_one_difference", REF_AT_MOST_ONE, abs(lhs - rhs), tol)
    rep.info.update(probability=lhs, expectation=rhs)
    return rep


def cluster_map(step: int, coarse_cells: int):
    """Grid cluster map: the coarse cells holding at least two fine points."""
    block = (1 << step) - 1

    def l_grid(A: int) -> int:
        out = 0
        for j in range(coarse_cells):
            if bin(A >> (j * step) & block).count("1") >= 2:
                out |= 1 << j
        return out

    return l_grid


def cluster_pushforward_check(ambient: GridSystem, F: SubsystemFamily, eta: FaithfulState, coarse_level: int,
                              tol: float = 1e-9, res: ClusterResult | None = None) -> Report:
    """Compare the law of the grid cluster map with the random set of the cluster F̌."""
    res = res or cluster(ambient, F, coarse_level)
    dist = random_set_distribution(ambient, F, eta)
    C, step = res.coarse, res.step
    nc = C.n_cells
    push = dist.pushforward(cluster_map(step, nc), nc)
    check_dist = random_set_distribution(C, res.f_check, eta)
    rep = Report("cluster_pushforward")
    fam_diff = 0.0
    for B in range(1 << nc):
        lhs = push.avoid(B)
        rhs = expect_avoidance(C, res.f_check, eta, B)
        fam_diff = max(fam_diff, abs(lhs - rhs))
    rep.add("interval_family_difference", REF_PUSHFORWARD, fam_diff, tol)
    rep.add("pushforward_total_variation", REF_PUSHFORWARD, 0.5 * float(np.abs(push.probs - check_dist.probs).sum()), tol)
    # P^{F̌} over j coarse cells is the product of j per-cell F′ projections
    fac, cell = 0.0, res.f_prime[step].basis
    for j in range(1, nc + 1):
        B = reduce(np.kron, [cell] * j)
        if not isinstance(ambient, TensorPowerSystem):
            B = beta_composite(ambient, (j * step,), (step,) * j).conj().T @ B
        fac = max(fac, la.subspace_distance(res.f_check[j], la.orthonormalize(B, ambient_dim=ambient.dims[j * step])))
    rep.add("cluster_projection_factorization_defect", REF_PUSHFORWARD, fac, 1e-10)
    return rep


# X spaces ---------------------------------------------------------------

def x_space_checks(ambient: GridSystem, u: VectorFamily, coarse_level: int, max_m: int | None = None, tol: float = 1e-10) -> Report:
    """Structure of X_t = F′_t ⊖ C u_t for the unit line F = C u.

    Checks u_s⊗F′_t ⊆ F′_{s+t} and F′_s⊗u_t ⊆ F′_{s+t}, the split
    X_{s+t} = u_s⊗X_t ⊕ X_s⊗u_t, the coarse dimension count
    dim X_{jΔ} = j·dim X_Δ, and that unit translation S_r x = β*(u_r⊗x) is an
    isometric semigroup whose ranges shrink to zero (a finite Wold surrogate).
    """
    step = 1 << (ambient.level - coarse_level)
    top = max_m or min(ambient.n_cells, 2 * step)
    F = _line(ambient, u)
    Fp = f_prime_family(ambient, F, top)
    X = {m: la.complement(F[m], within=Fp[m]) for m in range(1, top + 1)}

    def left(s, t, x):  # β*(u_s ⊗ x), x ∈ E_t
        return ambient.split_pull(s, t, np.kron(u[s][:, None], x))

    def right(s, t, x):  # β*(x ⊗ u_t), x ∈ E_s
        return ambient.split_pull(s, t, np.kron(x, u[t][:, None]))

    lemma, decomp, orth, iso, semi = 0.0, 0.0, 0.0, 0.0, 0.0
    for s in range(1, top):
        for t in range(1, top - s + 1):
            lemma = max(lemma, la.containment_residual(left(s, t, Fp[t].basis), Fp[s + t]),
                        la.containment_residual(right(s, t, Fp[s].basis), Fp[s + t]))
            A, B = left(s, t, X[t].basis), right(s, t, X[s].basis)
            orth = max(orth, la.opnorm(A.conj().T @ B))
            decomp = max(decomp, la.subspace_distance(X[s + t], la.orthonormalize(np.concatenate([A, B], axis=1), ambient_dim=ambient.dims[s + t])))
            iso = max(iso, la.isometry_defect(A) if A.shape[1] else 0.0)
            for q in range(1, top - s - t + 1):
                two = left(s, q + t, left(q, t, X[t].basis))
                one = left(s + q, t, X[t].basis)
                semi = max(semi, la.opnorm(two - one))
    rep = Report("x_spaces")
    rep.add("unit_tensor_f_prime_residual", REF_X_LEMMA, lemma, tol)
    rep.add("x_decomposition_distance", REF_X_DECOMP, decomp, tol)
    rep.add("x_summand_overlap", REF_X_DECOMP, orth, 1e-12)
    rep.add("shift_isometry_defect", REF_SHIFT, iso, 1e-12)
    rep.add("shift_semigroup_defect", REF_SHIFT, semi, tol)
    coarse = [X[j * step].dim for j in range(1, top // step + 1)]
    count = max((abs(d - (j + 1) * coarse[0]) for j, d in enumerate(coarse)), default=0)
    rep.add("x_coarse_dim_count_defect", REF_X_DECOMP, count, 0, kind="equal", expected=0)
    # ranges of S_{jΔ} inside X_{nΔ} shrink by dim X_Δ per step and vanish at j = n
    n = len(coarse)
    if n >= 1:
        ranges = [X[n * step].dim] + [la.orthonormalize(left(j * step, (n - j) * step, X[(n - j) * step].basis)).dim for j in range(1, n)] + [0]
        shrink = all(ranges[j] - ranges[j + 1] == coarse[0] for j in range(n))
        rep.add("shift_ranges_shrink_to_zero", REF_SHIFT, bool(shrink), kind="flag")
        rep.info["shift_range_dims"] = ranges
    rep.info["x_dims"] = {str(m): X[m].dim for m in X}
    return rep
