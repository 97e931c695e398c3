"""Units, additive units and roots of grid systems."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import linalg as la
from .errors import AllZero, NoUnit, NotAdditive, NotAUnit, NotNormalized, NotProduct, ProdSysError
from .inclusion import (
    GridSystem,
    InductiveLimit,
    SubsystemFamily,
    generated_subsystem,
)
from .report import Report

REF_UNIT = "unit factorization through the connecting maps"
REF_ADDITIVE = "additivity of additive units"
REF_ROOT = "roots are orthogonal to their unit"
REF_GRAM = "Gram formula for additive units"


@dataclass
class VectorFamily:
    """One vector per grid time (keys are cell counts m)."""

    system: GridSystem
    vectors: dict
    growth_bound: float | None = None

    def __getitem__(self, m) -> np.ndarray:
        return self.vectors[m]

    def times(self):
        return sorted(self.vectors)

    @property
    def top(self) -> np.ndarray:
        """Vector at time 1."""
        return self.vectors[self.system.n_cells]

    def scaled(self, fn) -> "VectorFamily":
        """New family with vectors multiplied by fn(t) for t the time as a float."""
        n = self.system.n_cells
        return VectorFamily(self.system, {m: fn(m / n) * v for m, v in self.vectors.items()}, self.growth_bound)

    def is_normalized(self, tol: float = 1e-10) -> bool:
        return all(abs(np.linalg.norm(v) - 1.0) <= tol for v in self.vectors.values())


@dataclass
class AdditiveFamily:
    """Additive family of a unit: a_{s+t} = beta^*(a_s⊗u_t + u_s⊗a_t)."""

    system: GridSystem
    unit: VectorFamily
    vectors: dict

    def __getitem__(self, m) -> np.ndarray:
        return self.vectors[m]

    @property
    def top(self) -> np.ndarray:
        return self.vectors[self.system.n_cells]

    def __add__(self, other: "AdditiveFamily") -> "AdditiveFamily":
        return AdditiveFamily(self.system, self.unit, {m: self[m] + other[m] for m in self.vectors})

    def __rmul__(self, c) -> "AdditiveFamily":
        return AdditiveFamily(self.system, self.unit, {m: c * v for m, v in self.vectors.items()})

    def __sub__(self, other):
        return self + (-1.0) * other


# constructors ----------------------------------------------------------

def unit_from_cell(sys: GridSystem, g) -> VectorFamily:
    """Unit u_m = beta_{m,finest}^* g^{⊗m} generated by a cell vector."""
    g = la.as_vector(g)
    out, p = {}, np.ones(1, dtype=complex)
    for m in range(1, sys.n_cells + 1):
        p = np.kron(p, g)
        out[m] = sys.pull(m, p)
    return VectorFamily(sys, out)


def _additive_finest(u_cell, a_cell, m_max):
    """Σ_j u^{⊗(j-1)}⊗a⊗u^{⊗(m-j)} for m = 1..m_max in finest coordinates."""
    U, A = u_cell, a_cell
    out = {1: A}
    for m in range(2, m_max + 1):
        A = np.kron(A, u_cell) + np.kron(U, a_cell)
        U = np.kron(U, u_cell)
        out[m] = A
    return out


def additive_from_cell(sys: GridSystem, u: VectorFamily, a_cell) -> AdditiveFamily:
    """Additive family of u determined by its cell value a_δ."""
    a_cell = la.as_vector(a_cell)
    fin = _additive_finest(la.as_vector(u[1]), a_cell, sys.n_cells)
    return AdditiveFamily(sys, u, {m: sys.pull(m, v) for m, v in fin.items()})


def trivial_additive(u: VectorFamily, lam: complex) -> AdditiveFamily:
    """b_s = λ s u_s."""
    n = u.system.n_cells
    return AdditiveFamily(u.system, u, {m: lam * (m / n) * v for m, v in u.vectors.items()})


# checks ----------------------------------------------------------------

def _pairs_in(sys, keys):
    for a, b in sys.pairs():
        if a in keys and b in keys and a + b in keys:
            yield a, b


def check_unit(u: VectorFamily, tol: float = 1e-10) -> Report:
    """Factorization defect of a unit over all grid pairs."""
    sys = u.system
    if all(np.linalg.norm(v) <= tol for v in u.vectors.values()):
        raise AllZero("every vector of the family vanishes")
    defect = 0.0
    for a, b in _pairs_in(sys, u.vectors):
        defect = max(defect, float(np.linalg.norm(u[a + b] - sys.split_pull(a, b, np.kron(u[a], u[b])))))
    rep = Report("check_unit")
    rep.add("unit_factorization_defect", REF_UNIT, defect, tol)
    rep.info["normalized"] = bool(u.is_normalized(tol))
    norms = [np.linalg.norm(u[m]) for m in u.times()]
    n = sys.n_cells
    rep.info["growth_rate"] = max(math.log(max(x, 1e-300)) * n / m for m, x in zip(u.times(), norms))
    return rep


def check_additive(a: AdditiveFamily, tol: float = 1e-10) -> Report:
    """Additivity defect, root flag and smallest growth constant k with ||a_s||² ≤ k(s+s²)."""
    sys, u = a.system, a.unit
    defect = 0.0
    for p, q in _pairs_in(sys, a.vectors):
        rhs = sys.split_pull(p, q, np.kron(a[p], u[q]) + np.kron(u[p], a[q]))
        defect = max(defect, float(np.linalg.norm(a[p + q] - rhs)))
    overlap = max(abs(np.vdot(a[m], u[m])) for m in a.vectors)
    n = sys.n_cells
    growth = max(np.linalg.norm(a[m]) ** 2 / ((m / n) + (m / n) ** 2) for m in a.vectors)
    rep = Report("check_additive")
    rep.add("additivity_defect", REF_ADDITIVE, defect, tol)
    rep.info["root"] = bool(overlap <= tol)
    rep.info["unit_overlap"] = float(overlap)
    rep.info["growth_constant"] = float(growth)
    return rep


def is_root(a: AdditiveFamily, tol: float = 1e-10) -> bool:
    rep = check_additive(a, tol)
    return rep.passed and rep.info["root"]


def _require_normalized(u: VectorFamily, tol=1e-10):
    if not u.is_normalized(tol):
        raise NotNormalized("the unit must have norm one at every grid time")


def decompose_additive(a: AdditiveFamily, tol: float = 1e-10):
    """Split a = λ s u_s + root with λ = ⟨u_1, a_1⟩."""
    u = a.unit
    _require_normalized(u, tol)
    lam = complex(np.vdot(u.top, a.top))
    n = a.system.n_cells
    root = AdditiveFamily(a.system, u, {m: v - lam * (m / n) * u[m] for m, v in a.vectors.items()})
    return lam, root


def theta(u1: np.ndarray, s: float) -> np.ndarray:
    """Square root of s I + (s² − s)|u_1⟩⟨u_1| for a unit vector u_1.

    The operator acts as s on u_1 and as sqrt(s) on its complement.
    """
    u1 = la.as_vector(u1)
    P = np.outer(u1, u1.conj())
    return math.sqrt(s) * (np.eye(u1.size) - P) + s * P


def theta_apply(u1: np.ndarray, s: float, x: np.ndarray) -> np.ndarray:
    """θ_s x without forming the operator."""
    u1, x = la.as_vector(u1), la.as_vector(x)
    c = np.vdot(u1, x)
    return math.sqrt(s) * (x - c * u1) + s * c * u1


def gram_additive(a: AdditiveFamily, b: AdditiveFamily, s, tol: float = 1e-10) -> complex:
    """⟨θ_s a_1, θ_s b_1⟩ for additive families of one normalized unit."""
    _require_normalized(a.unit, tol)
    sys = a.system
    frac = sys.m(s) / sys.n_cells
    u1 = la.as_vector(a.unit.top)
    return complex(np.vdot(theta_apply(u1, frac, a.top), theta_apply(u1, frac, b.top)))


# roots -----------------------------------------------------------------

@dataclass
class RootSpace:
    """Roots of a normalized unit, with a basis orthonormal for ⟨a, b⟩ = ⟨a_1, b_1⟩."""

    unit: VectorFamily
    families: list

    @property
    def dim(self) -> int:
        return len(self.families)

    @property
    def basis_at_1(self) -> np.ndarray:
        sys = self.unit.system
        if not self.families:
            return np.zeros((sys.dims[sys.n_cells], 0), dtype=complex)
        return np.stack([f.top for f in self.families], axis=1)

    def at(self, m: int) -> np.ndarray:
        sys = self.unit.system
        if not self.families:
            return np.zeros((sys.dims[m], 0), dtype=complex)
        return np.stack([f[m] for f in self.families], axis=1)

    def gram(self, m: int | None = None) -> np.ndarray:
        B = self.basis_at_1 if m is None else self.at(m)
        return B.conj().T @ B

    def combination(self, coeffs) -> AdditiveFamily:
        sys = self.unit.system
        out = {m: self.at(m) @ np.asarray(coeffs, dtype=complex) for m in range(1, sys.n_cells + 1)}
        return AdditiveFamily(sys, self.unit, out)


def root_space(prod: GridSystem, u: VectorFamily, tol: float = 1e-10, verify: bool = True) -> RootSpace:
    """Roots of a normalized unit of a product system.

    Every root is fixed by its cell value a_δ ⊥ u_δ; the extension
    a_{mδ} = Σ_j u_δ^{⊗(j-1)}⊗a_δ⊗u_δ^{⊗(m-j)} is then additive. Cell values are
    scaled by sqrt(δ) so the basis is orthonormal at time 1.
    """
    if prod.kind != "product":
        raise NotProduct("root_space needs a product system")
    _require_normalized(u, tol)
    uc = la.as_vector(u[1])
    perp = la.complement(la.orthonormalize([uc], tol))
    scale = math.sqrt(prod.delta)
    fams = [additive_from_cell(prod, u, scale * perp.basis[:, j]) for j in range(perp.dim)]
    rs = RootSpace(u, fams)
    if verify:
        for f in fams:
            if not is_root(f, tol):
                raise NotAdditive("constructed root failed the additivity check")
    return rs


def lift_unit(incl: GridSystem, u: VectorFamily, tol: float = 1e-10) -> VectorFamily:
    """Lift a unit of an inclusion system to its inductive limit: û_m = u_δ^{⊗m}."""
    if not check_unit(u, tol).passed:
        raise NotAUnit("input family is not a unit")
    lim = InductiveLimit(incl)
    out, p = {}, np.ones(1, dtype=complex)
    for m in range(1, incl.n_cells + 1):
        p = np.kron(p, la.as_vector(u[1]))
        out[m] = p.copy()
    fam = VectorFamily(lim.system, out)
    fam.limit = lim
    return fam


def restrict_unit(lim: InductiveLimit, w: VectorFamily) -> VectorFamily:
    """i^*: a unit of the limit restricted to the inclusion system."""
    return VectorFamily(lim.source, {m: lim.restrict(m, w[m]) for m in w.vectors})


def lift_additive(incl: GridSystem, u: VectorFamily, a: AdditiveFamily, tol: float = 1e-10) -> AdditiveFamily:
    """Lift an additive family of u to the inductive limit: â_m = i_finest(a_finest)."""
    rep = check_additive(a, tol)
    if not rep.passed:
        raise NotAdditive(rep.summary())
    uhat = lift_unit(incl, u, tol)
    fin = _additive_finest(la.as_vector(u[1]), la.as_vector(a[1]), incl.n_cells)
    out = AdditiveFamily(uhat.system, uhat, fin)
    out.limit = uhat.limit
    return out


def restrict_additive(lim: InductiveLimit, a: AdditiveFamily, unit: VectorFamily) -> AdditiveFamily:
    return AdditiveFamily(lim.source, unit, {m: lim.restrict(m, a[m]) for m in a.vectors})


def type_I_part(prod: GridSystem, u: VectorFamily, tol: float = 1e-10) -> SubsystemFamily:
    """Product subsystem generated by the unit and all of its roots."""
    rs = root_space(prod, u, tol)
    seed = {}
    for m in range(1, prod.n_cells + 1):
        cols = np.concatenate([u[m][:, None], rs.at(m)], axis=1)
        seed[m] = la.orthonormalize(cols, tol, ambient_dim=prod.dims[m])
    return generated_subsystem(prod, SubsystemFamily(prod, seed), tol)


def normalized_units(prod: GridSystem, count: int = 3, rng: np.random.Generator | None = None) -> list:
    """Sample normalized units of a product system: the first cell basis vector, then random ones."""
    d = prod.cell_dim
    if d == 0:
        raise NoUnit("the cell slice is zero-dimensional")
    rng = rng or np.random.default_rng(0)
    cells = [np.eye(d, dtype=complex)[0]] + [la.haar_vector(rng, d) for _ in range(count - 1)]
    return [unit_from_cell(prod, g) for g in cells[:count]]


def index_of(prod: GridSystem, tol: float = 1e-10, rng: np.random.Generator | None = None, samples: int = 3) -> int:
    """Dimension of the root space, checked to agree over sampled normalized units."""
    if prod.kind != "product":
        raise NotProduct("index_of needs a product system")
    dims = {root_space(prod, u, tol).dim for u in normalized_units(prod, samples, rng)}
    if len(dims) != 1:
        raise ProdSysError(f"root dimension depends on the unit: {sorted(dims)}")
    return dims.pop()
