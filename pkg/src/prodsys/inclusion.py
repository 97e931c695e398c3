"""Inclusion systems and product systems on a dyadic grid.

A grid system at level L stores one finite-dimensional slice per grid time
``m * 2**-L`` (m = 1..2**L) together with isometries
``beta(a, b): E_{a+b} -> E_a ⊗ E_b``. Times are passed around as integer cell
counts ``m``; :class:`DyadicTime` and :class:`DyadicPartition` values are
accepted wherever a time or partition is expected.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Mapping, Sequence

import numpy as np

from . import linalg as la
from .errors import (
    DimMismatch,
    LevelMismatch,
    NotInclusionSystem,
    NotProduct,
    NotRefinement,
    NotSubsystem,
    OutOfRange,
)
from .grid import DyadicPartition, DyadicTime, cell_blocks, compositions
from .report import Report

REF_COASSOC = "coassociativity of the inclusion maps"
REF_ISOMETRY = "inclusion maps are isometries"


class GridSystem:
    """An inclusion system (or product system when every beta is unitary).

    Parameters
    ----------
    level : int
        Grid level L; grid times are m / 2**L for m = 1..2**L.
    dims : mapping m -> int
    beta : mapping (a, b) -> ndarray of shape (dims[a]*dims[b], dims[a+b])
    kind : {"inclusion", "product"}
    """

    def __init__(self, level: int, dims: Mapping[int, int], beta: Mapping | None = None, kind: str = "inclusion"):
        self.level = int(level)
        self.n_cells = 1 << self.level
        self.dims = {int(m): int(d) for m, d in dims.items()}
        self._beta = dict(beta or {})
        self.kind = kind
        self._finest_cache: dict[int, np.ndarray] = {}
        missing = [m for m in range(1, self.n_cells + 1) if m not in self.dims]
        if missing:
            raise DimMismatch(f"missing slice dimensions for m={missing}")

    # time helpers -------------------------------------------------------
    def m(self, t) -> int:
        """Cell count of a time given as int, DyadicTime or text."""
        if isinstance(t, (int, np.integer)):
            m = int(t)
        else:
            from .grid import as_time

            m = as_time(t).cells(self.level)
        if not 1 <= m <= self.n_cells:
            raise OutOfRange(f"time {t} outside the grid (0, 1]")
        return m

    def time(self, m: int) -> DyadicTime:
        return DyadicTime(m, self.level)

    @property
    def delta(self) -> float:
        return 1.0 / self.n_cells

    def dim(self, t) -> int:
        return self.dims[self.m(t)]

    def pairs(self):
        for a in range(1, self.n_cells):
            for b in range(1, self.n_cells - a + 1):
                yield a, b

    # connecting maps ----------------------------------------------------
    def beta(self, a: int, b: int) -> np.ndarray:
        return self._beta[(a, b)]

    def split_pull(self, a: int, b: int, x: np.ndarray) -> np.ndarray:
        """beta(a, b)^* applied to columns of x (elements of E_a ⊗ E_b)."""
        return self.beta(a, b).conj().T @ x

    def split_push(self, a: int, b: int, x: np.ndarray) -> np.ndarray:
        return self.beta(a, b) @ x

    def finest_map(self, m: int) -> np.ndarray:
        """beta from the one-block partition (m) to the all-cells partition."""
        if m not in self._finest_cache:
            self._finest_cache[m] = beta_composite(self, (m,), (1,) * m)
        return self._finest_cache[m]

    def push(self, m: int, x: np.ndarray) -> np.ndarray:
        """Map columns of x from E_m into E_δ^{⊗m}."""
        return self.finest_map(m) @ x

    def pull(self, m: int, x: np.ndarray) -> np.ndarray:
        """Adjoint of :meth:`push`."""
        return self.finest_map(m).conj().T @ x

    @property
    def cell_dim(self) -> int:
        return self.dims[1]

    def materialize(self) -> "GridSystem":
        """Copy with every beta stored explicitly."""
        return GridSystem(self.level, self.dims, {p: self.beta(*p) for p in self.pairs()}, self.kind)

    def __repr__(self):
        return f"{type(self).__name__}(level={self.level}, kind={self.kind!r}, dims={[self.dims[m] for m in sorted(self.dims)]})"


class TensorPowerSystem(GridSystem):
    """Product system with slices ``cell^{⊗m}`` and beta the identity reindexing."""

    def __init__(self, cell_dim: int, level: int):
        d = int(cell_dim)
        super().__init__(level, {m: d**m for m in range(1, (1 << level) + 1)}, None, "product")
        self._cell = d

    def beta(self, a, b):
        return np.eye(self.dims[a + b], dtype=complex)

    def split_pull(self, a, b, x):
        return np.asarray(x, dtype=complex)

    def split_push(self, a, b, x):
        return np.asarray(x, dtype=complex)

    def finest_map(self, m):
        return np.eye(self.dims[m], dtype=complex)

    def push(self, m, x):
        return np.asarray(x, dtype=complex)

    def pull(self, m, x):
        return np.asarray(x, dtype=complex)


def trivial_system(level: int) -> TensorPowerSystem:
    """The one-dimensional product system C at every time."""
    return TensorPowerSystem(1, level)


def _interleave_perm(dE: int, dF: int, m: int) -> np.ndarray:
    """Index map taking E^{⊗m} ⊗ F^{⊗m} coordinates to (E⊗F)^{⊗m} coordinates.

    ``out[j] = i`` means entry i of the separated ordering lands at entry j
    of the interleaved ordering.
    """
    idx = np.arange((dE * dF) ** m).reshape((dE,) * m + (dF,) * m)
    order = [ax for j in range(m) for ax in (j, m + j)]
    return idx.transpose(order).reshape(-1)


class TensorSystem(GridSystem):
    """Slice-wise tensor product E_t ⊗ F_t with the middle legs swapped in beta."""

    def __init__(self, E: GridSystem, F: GridSystem):
        if E.level != F.level:
            raise LevelMismatch(f"levels {E.level} and {F.level} differ")
        dims = {m: E.dims[m] * F.dims[m] for m in E.dims}
        kind = "product" if E.kind == F.kind == "product" else "inclusion"
        super().__init__(E.level, dims, None, kind)
        self.E, self.F = E, F
        self._perm_cache: dict[int, np.ndarray] = {}

    def _perm(self, m):
        if m not in self._perm_cache:
            self._perm_cache[m] = _interleave_perm(self.E.cell_dim, self.F.cell_dim, m)
        return self._perm_cache[m]

    def _split_perm(self, a, b):
        """Index map (E_a⊗E_b)⊗(F_a⊗F_b) -> (E_a⊗F_a)⊗(E_b⊗F_b)."""
        E, F = self.E, self.F
        idx = np.arange(self.dims[a] * self.dims[b]).reshape(E.dims[a], E.dims[b], F.dims[a], F.dims[b])
        return idx.transpose(0, 2, 1, 3).reshape(-1)

    def beta(self, a, b):
        bef = np.kron(self.E.beta(a, b), self.F.beta(a, b))
        return bef[self._split_perm(a, b)]

    def split_pull(self, a, b, x):
        x = np.asarray(x, dtype=complex)
        y = np.empty_like(x)
        y[self._split_perm(a, b)] = x
        return _apply_pair(self.E, self.F, a + b, y, lambda S, z: S.split_pull(a, b, z), split=(a, b))

    def split_push(self, a, b, x):
        y = _apply_pair(self.E, self.F, a + b, np.asarray(x, dtype=complex), lambda S, z: S.split_push(a, b, z), split=None)
        return y[self._split_perm(a, b)]

    def push(self, m, x):
        y = _apply_pair(self.E, self.F, m, np.asarray(x, dtype=complex), lambda S, z: S.push(m, z), out_cell=True)
        return y[self._perm(m)]

    def pull(self, m, x):
        x = np.asarray(x, dtype=complex)
        y = np.empty_like(x)
        y[self._perm(m)] = x
        return _apply_pair(self.E, self.F, m, y, lambda S, z: S.pull(m, z), in_cell=True)

    def finest_map(self, m):
        return self.push(m, np.eye(self.dims[m], dtype=complex))


def _apply_pair(E, F, m, x, fn, split=None, in_cell=False, out_cell=False):
    """Apply fn(E, .) ⊗ fn(F, .) to the columns of x, where x lives in X_E ⊗ X_F.

    The row dimensions of the E and F legs are inferred from the requested
    mode: ``split`` means x is in (E_a⊗E_b)⊗(F_a⊗F_b); ``in_cell`` means x is
    in E_δ^{⊗m} ⊗ F_δ^{⊗m}; otherwise x is in E_m ⊗ F_m.
    """
    vec = x.ndim == 1
    x = x.reshape(x.shape[0], -1)
    cols = x.shape[1]
    if split is not None:
        a, b = split
        rE, rF = E.dims[a] * E.dims[b], F.dims[a] * F.dims[b]
    elif in_cell:
        rE, rF = E.cell_dim**m, F.cell_dim**m
    else:
        rE, rF = E.dims[m], F.dims[m]
    t = x.reshape(rE, rF, cols)
    # E leg
    t = np.moveaxis(t, 0, -1).reshape(rF * cols, rE).T
    t = fn(E, t)
    nE = t.shape[0]
    t = t.T.reshape(rF, cols, nE)
    # F leg
    t = np.moveaxis(t, 0, -1).reshape(cols * nE, rF).T
    t = fn(F, t)
    nF = t.shape[0]
    t = t.T.reshape(cols, nE, nF)
    out = np.moveaxis(t, 0, -1).reshape(nE * nF, cols)
    return out[:, 0] if vec else out


def tensor_systems(E: GridSystem, F: GridSystem) -> TensorSystem:
    """Slice-wise tensor product of two grid systems at the same level."""
    return TensorSystem(E, F)


# partitions -------------------------------------------------------------

def _cells(sys: GridSystem, p) -> tuple:
    if isinstance(p, DyadicPartition):
        return p.cells(sys.level)
    if isinstance(p, (int, np.integer)):
        return (int(p),)
    return tuple(int(c) for c in p)


def _beta_block(sys: GridSystem, block: Sequence[int]) -> np.ndarray:
    """beta from E_s to E_{s_1}⊗...⊗E_{s_n} for a single block summing to s."""
    s = sum(block)
    if len(block) == 1:
        return np.eye(sys.dims[s], dtype=complex)
    s1 = block[0]
    rest = _beta_block(sys, block[1:])
    return np.kron(np.eye(sys.dims[s1], dtype=complex), rest) @ sys.beta(s1, s - s1)


def beta_composite(sys: GridSystem, coarse, fine) -> np.ndarray:
    """beta_{coarse, fine}: E_coarse -> E_fine for fine refining coarse."""
    c, f = _cells(sys, coarse), _cells(sys, fine)
    blocks = cell_blocks(c, f)
    if blocks is None:
        raise NotRefinement(f"{f} does not refine {c}")
    return reduce(np.kron, (_beta_block(sys, b) for b in blocks))


def partition_dim(sys: GridSystem, p) -> int:
    return int(np.prod([sys.dims[c] for c in _cells(sys, p)]))


# checks -----------------------------------------------------------------

def check_system(sys: GridSystem, tol: float = 1e-10) -> Report:
    """Isometry / unitarity and coassociativity defects over all grid pairs and triples."""
    rep = Report("check_system")
    iso, uni = 0.0, 0.0
    for a, b in sys.pairs():
        B = sys.beta(a, b)
        if B.shape != (sys.dims[a] * sys.dims[b], sys.dims[a + b]):
            raise DimMismatch(f"beta({a},{b}) has shape {B.shape}")
        iso = max(iso, la.isometry_defect(B))
        if sys.kind == "product":
            uni = max(uni, la.opnorm(B @ B.conj().T - np.eye(B.shape[0])))
    co = 0.0
    n = sys.n_cells
    for r in range(1, n):
        for s in range(1, n - r):
            for t in range(1, n - r - s + 1):
                lhs = np.kron(sys.beta(r, s), np.eye(sys.dims[t])) @ sys.beta(r + s, t)
                rhs = np.kron(np.eye(sys.dims[r]), sys.beta(s, t)) @ sys.beta(r, s + t)
                co = max(co, la.opnorm(lhs - rhs))
    rep.add("isometry_defect", REF_ISOMETRY, iso, tol)
    if sys.kind == "product":
        rep.add("unitarity_defect", "product system maps are unitary", uni, tol)
    rep.add("coassociativity_defect", REF_COASSOC, co, tol)
    surj = all(sys.dims[a] * sys.dims[b] == sys.dims[a + b] for a, b in sys.pairs())
    rep.info["surjective"] = bool(surj)
    return rep


@dataclass
class SubsystemFamily:
    """A subspace F_m of every slice of a parent grid system (keys are cell counts)."""

    parent: GridSystem
    spaces: dict

    def __getitem__(self, m) -> la.Subspace:
        return self.spaces[m]

    def dims(self) -> dict:
        return {m: s.dim for m, s in self.spaces.items()}

    def times(self):
        return sorted(self.spaces)


def check_subsystem(fam: SubsystemFamily, tol: float = 1e-10, require_product: bool = False) -> Report:
    """beta(F_{a+b}) ⊆ F_a ⊗ F_b for all available pairs (and onto, if requested)."""
    sys = fam.parent
    rep = Report("check_subsystem")
    incl, onto = 0.0, 0.0
    for a, b in sys.pairs():
        if not all(k in fam.spaces for k in (a, b, a + b)):
            continue
        Fa, Fb, Fab = fam[a], fam[b], fam[a + b]
        if Fab.dim == 0:
            continue
        img = sys.split_push(a, b, Fab.basis)
        K = la.Subspace(Fa.ambient_dim * Fb.ambient_dim, np.kron(Fa.basis, Fb.basis))
        incl = max(incl, la.containment_residual(img, K))
        if require_product:
            onto = max(onto, 0.0 if Fab.dim == Fa.dim * Fb.dim else 1.0)
    rep.add("inclusion_defect", "subsystem maps into tensor of subspaces", incl, tol)
    if require_product:
        rep.add("product_onto_defect", "product subsystem maps onto tensor of subspaces", onto, tol)
    return rep


def is_subsystem(fam: SubsystemFamily, tol: float = 1e-10) -> bool:
    return check_subsystem(fam, tol).passed


def full_family(sys: GridSystem) -> SubsystemFamily:
    return SubsystemFamily(sys, {m: la.Subspace.full(sys.dims[m]) for m in sys.dims})


def line_family(sys: GridSystem, vectors: Mapping[int, np.ndarray]) -> SubsystemFamily:
    return SubsystemFamily(sys, {m: la.orthonormalize([v]) for m, v in vectors.items()})


# inductive limit -------------------------------------------------------

class InductiveLimit:
    """Inductive limit of an inclusion system, realized at the finest partition.

    Attributes
    ----------
    system : TensorPowerSystem
        The limit product system; its slice at m is E_δ^{⊗m}.
    source : GridSystem
        The inclusion system the limit was built from.
    """

    def __init__(self, source: GridSystem, tol: float = 1e-10):
        rep = check_system(source, tol)
        if not rep.passed:
            raise NotInclusionSystem(rep.summary())
        self.source = source
        self.system = TensorPowerSystem(source.cell_dim, source.level)

    def inject(self, p) -> np.ndarray:
        """Canonical isometry E_p -> limit slice for a partition p of some grid time."""
        c = _cells(self.source, p)
        return beta_composite(self.source, c, (1,) * sum(c))

    def restrict(self, m: int, x: np.ndarray) -> np.ndarray:
        """i_m^* : limit slice -> E_m (the map written i^* for units)."""
        return self.inject((m,)).conj().T @ x


def inductive_limit(sys: GridSystem, tol: float = 1e-10):
    """Return ``(limit_system, inject)`` for an inclusion system."""
    lim = InductiveLimit(sys, tol)
    return lim.system, lim.inject


def limit_checks(sys: GridSystem, tol: float = 1e-12) -> Report:
    """Injection properties of the inductive limit over every partition of every grid time."""
    lim = InductiveLimit(sys)
    rep = Report("limit_checks")
    compat, span_def, coprod, link = 0.0, 0.0, 0.0, 0.0
    cofinal = 0.0
    for m in range(1, sys.n_cells + 1):
        parts = list(compositions(m))
        inj = {p: lim.inject(p) for p in parts}
        for r in parts:
            for s in parts:
                if cell_blocks(r, s) is None:
                    continue
                # i_s beta_{r,s} = i_r
                compat = max(compat, la.opnorm(inj[s] @ beta_composite(sys, r, s) - inj[r]))
                # link identity: B_{r,s}(i_{r_1}⊗..) = (i_{s_1}⊗..) beta_{r,s}; B is the identity in the limit
                lhs = reduce(np.kron, [lim.inject((c,)) for c in r])
                rhs = reduce(np.kron, [lim.inject((c,)) for c in s]) @ beta_composite(sys, r, s)
                link = max(link, la.opnorm(lhs - rhs))
        span = la.orthonormalize(np.concatenate([inj[p] for p in parts], axis=1))
        span_def = max(span_def, float(sys.cell_dim**m - span.dim))
        # coproduct: i_{s⌣t} = i_s ⊗ i_t for splits of m
        for a in range(1, m):
            for p in compositions(a):
                for q in compositions(m - a):
                    coprod = max(coprod, la.opnorm(lim.inject(p + q) - np.kron(lim.inject(p), lim.inject(q))))
        # cofinal restriction: the finest partition alone already carries the limit Gram
        fin = inj[(1,) * m]
        cofinal = max(cofinal, la.opnorm(fin.conj().T @ fin - np.eye(fin.shape[1])))
    rep.add("injection_compatibility", "injections are compatible with the connecting maps", compat, tol)
    rep.add("injection_span_deficit", "injections span the limit slice", span_def, 0.0)
    rep.add("coproduct_defect", "limit coproduct factorizes the injections", coprod, tol)
    rep.add("link_defect", "link identity between limit and connecting maps", link, tol)
    rep.add("cofinal_defect", "cofinal restriction gives the same limit", cofinal, tol)
    return rep


# generated subsystems --------------------------------------------------

def generated_subsystem(prod: GridSystem, seed: SubsystemFamily, tol: float = 1e-10, check: bool = True) -> SubsystemFamily:
    """Product subsystem generated by an inclusion subsystem of a product system.

    The slice at m is beta_{m, finest}^* (F_δ^{⊗m}); for an inclusion
    subsystem this already contains every seed slice.
    """
    if prod.kind != "product":
        raise NotProduct("generated_subsystem needs a product system")
    if check:
        rep = check_subsystem(seed, tol)
        if not rep.passed:
            raise NotSubsystem(rep.summary())
    if 1 not in seed.spaces:
        raise NotSubsystem("seed must specify the cell slice")
    B = seed[1].basis
    out = {}
    power = np.ones((1, 1), dtype=complex)
    for m in range(1, prod.n_cells + 1):
        power = np.kron(power, B)
        v = prod.pull(m, power)
        if isinstance(prod, TensorPowerSystem):
            out[m] = la.Subspace(prod.dims[m], v)
        else:
            out[m] = la.orthonormalize(v, tol, ambient_dim=prod.dims[m])
    return SubsystemFamily(prod, out)


def seed_union(*fams: SubsystemFamily, tol: float = 1e-10) -> SubsystemFamily:
    """Slice-wise closed span of several subsystem families of one parent."""
    parent = fams[0].parent
    keys = set.intersection(*(set(f.spaces) for f in fams))
    return SubsystemFamily(parent, {m: la.span_sum(*(f[m] for f in fams), tol=tol) for m in sorted(keys)})


# flips -----------------------------------------------------------------

def swap_operator(d1: int, d2: int) -> np.ndarray:
    """Unitary x⊗y -> y⊗x from C^{d1}⊗C^{d2} to C^{d2}⊗C^{d1}."""
    idx = np.arange(d1 * d2).reshape(d1, d2).T.reshape(-1)
    return np.eye(d1 * d2, dtype=complex)[idx]


def flip_unitary(prod: GridSystem, T, t) -> np.ndarray:
    """Unitary on E_T sending x_{T-t}⊗y_t to y_t⊗x_{T-t} under the beta identifications."""
    T, t = prod.m(T), prod.m(t)
    if not 0 < t < T:
        raise OutOfRange(f"need 0 < t < T, got t={t}, T={T}")
    r = T - t
    return prod.beta(t, r).conj().T @ swap_operator(prod.dims[r], prod.dims[t]) @ prod.beta(r, t)


# morphisms -------------------------------------------------------------

@dataclass
class Morphism:
    """A family of operators E_m -> F_m between two grid systems."""

    source: GridSystem
    target: GridSystem
    maps: dict
    contractive: bool = False

    def __getitem__(self, m) -> np.ndarray:
        return self.maps[m]


def cell_morphism(source: GridSystem, target: GridSystem, cell_op, contractive: bool = True) -> Morphism:
    """Extend a cell operator M: E_δ -> F_δ to the morphism beta^*_F M^{⊗m} beta_E."""
    M = la.as_operator(cell_op)
    maps = {}
    power = np.ones((1, 1), dtype=complex)
    for m in range(1, source.n_cells + 1):
        power = np.kron(power, M)
        maps[m] = target.pull(m, power @ source.push(m, np.eye(source.dims[m], dtype=complex)))
    return Morphism(source, target, maps, contractive)


def check_morphism(M: Morphism, tol: float = 1e-10) -> Report:
    src, tgt = M.source, M.target
    rep = Report("check_morphism")
    inter = 0.0
    for a, b in src.pairs():
        lhs = tgt.split_push(a, b, M[a + b])
        rhs = np.kron(M[a], M[b]) @ src.beta(a, b)
        inter = max(inter, la.opnorm(lhs - rhs))
    rep.add("intertwining_defect", "morphisms intertwine the connecting maps", inter, tol)
    if M.contractive:
        over = max(la.opnorm(M[m]) for m in M.maps) - 1.0
        rep.add("contraction_excess", "contractive morphism has norm at most one", max(over, 0.0), tol)
    return rep
