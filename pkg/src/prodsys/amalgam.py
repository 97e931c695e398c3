"""Amalgamated products of product systems over contractive morphisms.

Also houses the block completely positive maps obtained by gluing two
semigroups of CP maps along intertwining isometries.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg as la
from .errors import (
    NotContractive,
    NotMorphism,
    NotNormalized,
    NotPartialIsometry,
    NotProduct,
    ShapeMismatch,
    UnitNotSupported,
)
from .inclusion import (
    GridSystem,
    Morphism,
    SubsystemFamily,
    TensorPowerSystem,
    cell_morphism,
    check_morphism,
    generated_subsystem,
    seed_union,
    tensor_systems,
)
from .grid import compositions
from .report import Report
from .units import VectorFamily, root_space, type_I_part, unit_from_cell

REF_CROSS = "cross inner product of the amalgam embeddings equals the morphism"
REF_SPAN = "amalgam is generated by the two embedded systems"
REF_SPATIAL = "spatial product is the subsystem generated by E⊗v and u⊗F"
REF_TYPE1 = "type I generation of spatial products"
REF_INDEP = "spatial product does not depend on the choice of units"
REF_PARTIAL = "roots of an amalgam over partial isometries"
REF_TENSOR_ROOTS = "roots of a tensor product of units"
REF_POWERS = "block CP semigroup glued along intertwiners"


@dataclass
class Amalgam:
    """Amalgamated product G of E and F over a contraction C: F -> E.

    ``cell_I`` and ``cell_J`` are the cell embeddings into the cell of G; the
    slice embeddings are their tensor powers composed with the finest-partition
    maps of E and F.
    """

    E: GridSystem
    F: GridSystem
    C: Morphism
    G: TensorPowerSystem
    I: Morphism
    J: Morphism
    cell_I: np.ndarray
    cell_J: np.ndarray
    cell_C: np.ndarray


def _cell_of(C, E, F):
    if isinstance(C, Morphism):
        return C, la.as_operator(C[1])
    op = la.as_operator(C)
    if op.shape != (E.cell_dim, F.cell_dim):
        raise NotMorphism(f"cell contraction has shape {op.shape}, expected {(E.cell_dim, F.cell_dim)}")
    return cell_morphism(F, E, op, contractive=True), op


def _embedding_morphism(src: GridSystem, G: TensorPowerSystem, cell: np.ndarray) -> Morphism:
    maps, p = {}, np.ones((1, 1), dtype=complex)
    for m in range(1, src.n_cells + 1):
        p = np.kron(p, cell)
        maps[m] = p @ src.push(m, np.eye(src.dims[m], dtype=complex))
    return Morphism(src, G, maps)


def amalgamate(E: GridSystem, F: GridSystem, C, tol: float = 1e-10) -> Amalgam:
    """Amalgamated product over C (a Morphism F -> E or its cell operator).

    The cell of G is the quotient of E_δ ⊕ F_δ by the null space of the Gram
    form [[I, C_δ], [C_δ^*, I]]; slices are its tensor powers.
    """
    if E.kind != "product" or F.kind != "product":
        raise NotProduct("amalgamation needs product systems")
    Cm, Cd = _cell_of(C, E, F)
    if la.opnorm(Cd) > 1 + tol:
        raise NotContractive(f"||C_δ|| = {la.opnorm(Cd):.6g} > 1")
    rep = check_morphism(Cm, tol)
    if not rep.passed:
        raise NotMorphism(rep.summary())
    dE, dF = E.cell_dim, F.cell_dim
    gram = np.block([[np.eye(dE), Cd], [Cd.conj().T, np.eye(dF)]])
    Q, r = la.gram_kernel(gram, tol)
    cI, cJ = Q[:, :dE], Q[:, dE:]
    G = TensorPowerSystem(r, E.level)
    return Amalgam(E, F, Cm, G, _embedding_morphism(E, G, cI), _embedding_morphism(F, G, cJ), cI, cJ, Cd)


def amalgam_checks(am: Amalgam, tol: float = 1e-10) -> Report:
    """Cross inner products, isometry of the embeddings and completeness of the generated span."""
    rep = Report("amalgam_checks")
    cross, iso, span = 0.0, 0.0, 0.0
    G = am.G
    for m in range(1, G.n_cells + 1):
        Im, Jm = am.I[m], am.J[m]
        cross = max(cross, la.opnorm(Im.conj().T @ Jm - am.C[m]))
        iso = max(iso, la.isometry_defect(Im), la.isometry_defect(Jm))
        words = []
        for p in compositions(m):
            w = np.ones((1, 1), dtype=complex)
            for b in p:
                w = np.kron(w, np.concatenate([am.I[b], am.J[b]], axis=1))
            words.append(w)
        S = la.orthonormalize(np.concatenate(words, axis=1), tol, ambient_dim=G.dims[m])
        span = max(span, la.subspace_distance(S, la.Subspace.full(G.dims[m])))
    mor = max(check_morphism(am.I, tol).measured("intertwining_defect"), check_morphism(am.J, tol).measured("intertwining_defect"))
    rep.add("cross_inner_product_defect", REF_CROSS, cross, tol)
    rep.add("embedding_isometry_defect", "amalgam embeddings are isometric", iso, tol)
    rep.add("embedding_intertwining_defect", "amalgam embeddings are morphisms", mor, tol)
    rep.add("generated_span_defect", REF_SPAN, span, tol)
    rep.info["cell_dim"] = G.cell_dim
    return rep


# spatial products ------------------------------------------------------

def _require_normalized(*units: VectorFamily, tol=1e-10):
    for u in units:
        if not u.is_normalized(tol):
            raise NotNormalized("units must be normalized")


def _slice_embeddings(T: GridSystem, E: GridSystem, F: GridSystem, u: VectorFamily, v: VectorFamily, m: int):
    """Columns x⊗v_m (x basis of E_m) and u_m⊗y (y basis of F_m) inside E_m⊗F_m."""
    a = np.kron(np.eye(E.dims[m], dtype=complex), v[m][:, None])
    b = np.kron(u[m][:, None], np.eye(F.dims[m], dtype=complex))
    return a, b


def spatial_seed(E, u, F, v, T=None) -> SubsystemFamily:
    """Slice-wise span of {x⊗v_t} ∪ {u_t⊗y} inside the tensor product system."""
    T = T or tensor_systems(E, F)
    sp = {}
    for m in range(1, T.n_cells + 1):
        a, b = _slice_embeddings(T, E, F, u, v, m)
        sp[m] = la.orthonormalize(np.concatenate([a, b], axis=1), ambient_dim=T.dims[m])
    return SubsystemFamily(T, sp)


@dataclass
class SpatialProduct:
    amalgam: Amalgam
    tensor: GridSystem
    image: SubsystemFamily
    identification: dict
    report: Report


def spatial_product(E: GridSystem, u: VectorFamily, F: GridSystem, v: VectorFamily, tol: float = 1e-10) -> SpatialProduct:
    """Amalgam over C = |u⟩⟨v| together with its identification inside E ⊗ F."""
    _require_normalized(u, v, tol=tol)
    uc, vc = la.as_vector(u[1]), la.as_vector(v[1])
    am = amalgamate(E, F, np.outer(uc, vc.conj()), tol)
    T = tensor_systems(E, F)
    image = generated_subsystem(T, spatial_seed(E, u, F, v, T), tol)
    # cell identification W_δ: G_δ -> E_δ⊗F_δ with W I x = x⊗v, W J y = u⊗y
    target = np.concatenate(
        [np.kron(np.eye(E.cell_dim), vc[:, None]), np.kron(uc[:, None], np.eye(F.cell_dim))], axis=1
    )
    Q = np.concatenate([am.cell_I, am.cell_J], axis=1)
    Wd = target @ np.linalg.pinv(Q)
    rep = Report("spatial_product")
    cell_consistency = la.opnorm(Wd @ Q - target)
    gram_def, img_def, range_def, unit_def = 0.0, 0.0, 0.0, 0.0
    ident = {}
    p = np.ones((1, 1), dtype=complex)
    for m in range(1, T.n_cells + 1):
        p = np.kron(p, Wd)
        Wm = T.pull(m, p)
        ident[m] = Wm
        gram_def = max(gram_def, la.isometry_defect(Wm))
        a, b = _slice_embeddings(T, E, F, u, v, m)
        img_def = max(img_def, la.opnorm(Wm @ am.I[m] - a), la.opnorm(Wm @ am.J[m] - b))
        R = la.orthonormalize(Wm, tol, ambient_dim=T.dims[m])
        range_def = max(range_def, la.subspace_distance(R, image[m]))
        unit_def = max(unit_def, float(np.linalg.norm(am.I[m] @ u[m] - am.J[m] @ v[m])))
    rep.add("cell_identification_consistency", REF_SPATIAL, cell_consistency, tol)
    rep.add("identification_isometry_defect", REF_SPATIAL, gram_def, tol)
    rep.add("identification_intertwining_defect", REF_SPATIAL, img_def, tol)
    rep.add("identification_range_distance", REF_SPATIAL, range_def, tol)
    rep.add("common_unit_defect", "the common unit I(u) = J(v)", unit_def, tol)
    rep.info["cell_dim"] = am.G.cell_dim
    rep.info["expected_cell_dim"] = E.cell_dim + F.cell_dim - 1
    return SpatialProduct(am, T, image, ident, rep)


def unit_independence_check(E, u, u2, F, v, v2, tol: float = 1e-8) -> Report:
    """Compare spatial products over (u, v) and (u2, v2) through cell automorphisms.

    A unitary Θ_E of E_δ with Θ_E u_δ = u2_δ (and Θ_F likewise) is an
    automorphism of a tensor-power system; the words I x, J y of the first
    amalgam and I' Θx, J' Θy of the second then have equal Gram matrices, and
    the unitary matching them is returned in the report info.
    """
    _require_normalized(u, u2, v, v2)
    A = amalgamate(E, F, np.outer(u[1], np.conj(v[1])), 1e-10)
    B = amalgamate(E, F, np.outer(u2[1], np.conj(v2[1])), 1e-10)
    thE = la.householder_unitary(u[1], u2[1])
    thF = la.householder_unitary(v[1], v2[1])
    W1 = np.concatenate([A.cell_I, A.cell_J], axis=1)
    W2 = np.concatenate([B.cell_I @ thE, B.cell_J @ thF], axis=1)
    rep = Report("unit_independence")
    gram_def, uni_def, match_def = 0.0, 0.0, 0.0
    dims_equal = A.G.cell_dim == B.G.cell_dim
    p1 = np.ones((1, 1), dtype=complex)
    p2 = np.ones((1, 1), dtype=complex)
    for m in range(1, E.n_cells + 1):
        p1, p2 = np.kron(p1, W1), np.kron(p2, W2)
        gram_def = max(gram_def, la.opnorm(p1.conj().T @ p1 - p2.conj().T @ p2))
        if dims_equal:
            V = p2 @ np.linalg.pinv(p1)
            uni_def = max(uni_def, la.unitary_defect(V))
            match_def = max(match_def, la.opnorm(V @ p1 - p2))
    rep.add("slice_dims_equal", REF_INDEP, dims_equal, kind="flag")
    rep.add("word_gram_defect", REF_INDEP, gram_def, tol)
    rep.add("intertwiner_unitarity_defect", REF_INDEP, uni_def if dims_equal else float("inf"), tol)
    rep.add("intertwiner_matching_defect", REF_INDEP, match_def if dims_equal else float("inf"), tol)
    return rep


def _kron_family(T, A: SubsystemFamily, B: SubsystemFamily) -> SubsystemFamily:
    return SubsystemFamily(T, {m: la.Subspace(T.dims[m], np.kron(A[m].basis, B[m].basis)) for m in A.spaces})


def _line_tensor(T, A: SubsystemFamily, v: VectorFamily, left: bool) -> SubsystemFamily:
    out = {}
    for m in A.spaces:
        vv = la.orthonormalize([v[m]]).basis
        out[m] = la.Subspace(T.dims[m], np.kron(A[m].basis, vv) if left else np.kron(vv, A[m].basis))
    return SubsystemFamily(T, out)


def _max_distance(A: SubsystemFamily, B: SubsystemFamily) -> float:
    return max(la.subspace_distance(A[m], B[m]) for m in A.spaces)


def typeI_generation_check(E, u, F, v, tol: float = 1e-10) -> Report:
    """Compare the spatial product image with the subsystems generated by type I parts.

    Reported distances (max over slices of projector norm distance):
    spatial image vs generated((E⊗F^I) ∪ (E^I⊗F)); generated((E^I⊗v) ∪ (u⊗F^I))
    vs the type I part of E⊗F; and E^I⊗F^I vs the type I part of E⊗F.
    """
    _require_normalized(u, v, tol=tol)
    T = tensor_systems(E, F)
    image = generated_subsystem(T, spatial_seed(E, u, F, v, T), tol)
    EI, FI = type_I_part(E, u, tol), type_I_part(F, v, tol)
    from .inclusion import full_family

    fullE, fullF = full_family(E), full_family(F)
    mixed = generated_subsystem(T, seed_union(_kron_family(T, fullE, FI), _kron_family(T, EI, fullF)), tol)
    lines = generated_subsystem(T, seed_union(_line_tensor(T, EI, v, True), _line_tensor(T, FI, u, False)), tol)
    uv = unit_from_cell(T, np.kron(u[1], v[1]))
    TI = type_I_part(T, uv, tol)
    both = generated_subsystem(T, _kron_family(T, EI, FI), tol)
    rep = Report("typeI_generation")
    rep.add("spatial_vs_typeI_mixed_distance", REF_TYPE1, _max_distance(image, mixed), tol)
    rep.add("typeI_lines_vs_typeI_of_tensor_distance", REF_TYPE1, _max_distance(lines, TI), tol)
    rep.add("typeI_tensor_vs_typeI_of_tensor_distance", REF_TYPE1, _max_distance(both, TI), tol)
    rep.info["spatial_dims"] = [image[m].dim for m in sorted(image.spaces)]
    rep.info["mixed_dims"] = [mixed[m].dim for m in sorted(mixed.spaces)]
    rep.info["typeI_tensor_dims"] = [TI[m].dim for m in sorted(TI.spaces)]
    return rep


# roots under amalgamation ----------------------------------------------

@dataclass
class HilbertAmalgam:
    """Quotient of H1 ⊕ H2 by the kernel of the Gram form [[I, C1], [C1^*, I]]."""

    C1: np.ndarray

    def __post_init__(self):
        self.C1 = la.as_operator(self.C1)
        n1, n2 = self.C1.shape
        self.gram = np.block([[np.eye(n1), self.C1], [self.C1.conj().T, np.eye(n2)]])
        self.quotient, self.dim = la.gram_kernel(self.gram)


def root_amalgam_check(E: GridSystem, F: GridSystem, C, v: VectorFamily, tol: float = 1e-10) -> Report:
    """Roots of the common unit of E ⊗_C F against the amalgam of the two root spaces."""
    am = amalgamate(E, F, C, tol)
    Cd = am.cell_C
    P = Cd.conj().T @ Cd
    if la.projection_defect(P) > tol:
        raise NotPartialIsometry("C_δ^* C_δ is not a projection")
    if not v.is_normalized(tol):
        raise NotNormalized("v must be normalized")
    if np.linalg.norm(P @ v[1] - v[1]) > tol:
        raise UnitNotSupported("C^* C v != v")
    G, n = am.G, E.n_cells
    Cv = VectorFamily(E, {m: am.C[m] @ v[m] for m in v.vectors})
    RE, RF = root_space(E, Cv, tol), root_space(F, v, tol)
    w = unit_from_cell(G, am.cell_J @ v[1])
    RG = root_space(G, w, tol)
    C1 = RE.basis_at_1.conj().T @ am.C[n] @ RF.basis_at_1
    H = HilbertAmalgam(C1)
    emb = np.concatenate([am.I[n] @ RE.basis_at_1, am.J[n] @ RF.basis_at_1], axis=1)
    gram_def = la.opnorm(emb.conj().T @ emb - H.gram)
    span = la.orthonormalize(emb, tol, ambient_dim=G.dims[n])
    dist = la.subspace_distance(span, la.orthonormalize(RG.basis_at_1, tol, ambient_dim=G.dims[n]))
    # commuting projections onto the embedded slices
    comm, inter = 0.0, 0.0
    for m in range(1, n + 1):
        PE = am.I[m] @ am.I[m].conj().T
        PF = am.J[m] @ am.J[m].conj().T
        comm = max(comm, la.opnorm(PE @ PF - PF @ PE))
        both = la.intersection(la.orthonormalize(am.I[m], tol), la.orthonormalize(am.J[m], tol))
        inter = max(inter, la.opnorm(la.projector(both) - PE @ PF))
    unit_def = float(np.linalg.norm(am.I[n] @ Cv[n] - w[n]))
    rep = Report("root_amalgam")
    rep.add("root_dim_matches_amalgam_rank", REF_PARTIAL, RG.dim, kind="equal", expected=H.dim)
    rep.add("root_gram_isometry_defect", REF_PARTIAL, gram_def, tol)
    rep.add("root_span_distance", REF_PARTIAL, dist, tol)
    rep.add("slice_projection_commutator", REF_PARTIAL, comm, tol)
    rep.add("slice_intersection_projection_defect", REF_PARTIAL, inter, tol)
    rep.add("common_unit_defect", REF_PARTIAL, unit_def, tol)
    rep.info.update(root_dim=RG.dim, left_root_dim=RE.dim, right_root_dim=RF.dim, amalgam_rank=H.dim)
    return rep


def tensor_root_check(E: GridSystem, u: VectorFamily, F: GridSystem, v: VectorFamily, tol: float = 1e-10) -> Report:
    """Roots of u⊗v in E⊗F against (R_u ⊗ v) ⊕ (u ⊗ R_v)."""
    T = tensor_systems(E, F)
    n = T.n_cells
    uv = unit_from_cell(T, np.kron(u[1], v[1]))
    RT = root_space(T, uv, tol)
    RE, RF = root_space(E, u, tol), root_space(F, v, tol)
    from .units import AdditiveFamily, check_additive

    # d_s = a_s⊗v_s + u_s⊗b_s for basis roots a, b
    built, add_def = [], 0.0
    for a in RE.families:
        d = AdditiveFamily(T, uv, {m: np.kron(a[m], v[m]) for m in range(1, n + 1)})
        built.append(d)
    for b in RF.families:
        d = AdditiveFamily(T, uv, {m: np.kron(u[m], b[m]) for m in range(1, n + 1)})
        built.append(d)
    for d in built:
        rep_d = check_additive(d, tol)
        add_def = max(add_def, rep_d.measured("additivity_defect"), rep_d.info["unit_overlap"])
    D = np.stack([d.top for d in built], axis=1) if built else np.zeros((T.dims[n], 0), dtype=complex)
    blocks = la.orthonormalize(D, tol, ambient_dim=T.dims[n])
    decomp = la.containment_residual(RT.basis_at_1, blocks)
    kE = RE.dim
    cross = la.opnorm(D[:, :kE].conj().T @ D[:, kE:]) if D.size else 0.0
    rep = Report("tensor_roots")
    rep.add("root_dims_add", REF_TENSOR_ROOTS, RT.dim, kind="equal", expected=RE.dim + RF.dim)
    rep.add("root_decomposition_residual", REF_TENSOR_ROOTS, decomp, tol)
    rep.add("cross_block_gram", REF_TENSOR_ROOTS, cross, tol)
    rep.add("constructed_root_defect", REF_TENSOR_ROOTS, add_def, tol)
    rep.info.update(tensor_root_dim=RT.dim, left_root_dim=RE.dim, right_root_dim=RF.dim)
    return rep


# completely positive maps ----------------------------------------------

@dataclass
class CPMap:
    """Linear map M_{in} -> M_{out} stored as its Choi matrix Σ E_ij ⊗ φ(E_ij)."""

    in_dim: int
    out_dim: int
    choi: np.ndarray

    def _tensor(self):
        n, m = self.in_dim, self.out_dim
        return self.choi.reshape(n, m, n, m)

    def __call__(self, X) -> np.ndarray:
        return np.einsum("ij,iajb->ab", la.as_operator(X), self._tensor())

    def superop(self) -> np.ndarray:
        """Matrix acting on row-major vec(X)."""
        n, m = self.in_dim, self.out_dim
        return self._tensor().transpose(1, 3, 0, 2).reshape(m * m, n * n)

    @classmethod
    def from_superop(cls, S, in_dim, out_dim) -> "CPMap":
        t = np.asarray(S, dtype=complex).reshape(out_dim, out_dim, in_dim, in_dim).transpose(2, 0, 3, 1)
        return cls(in_dim, out_dim, t.reshape(in_dim * out_dim, in_dim * out_dim))

    @classmethod
    def from_function(cls, fn, in_dim, out_dim) -> "CPMap":
        C = np.zeros((in_dim, out_dim, in_dim, out_dim), dtype=complex)
        for i in range(in_dim):
            for j in range(in_dim):
                E = np.zeros((in_dim, in_dim), dtype=complex)
                E[i, j] = 1.0
                C[i, :, j, :] = fn(E)
        return cls(in_dim, out_dim, C.reshape(in_dim * out_dim, in_dim * out_dim))

    @classmethod
    def from_kraus(cls, kraus) -> "CPMap":
        ks = [la.as_operator(k) for k in kraus]
        out_dim, in_dim = ks[0].shape
        return cls.from_function(lambda X: sum(k @ X @ k.conj().T for k in ks), in_dim, out_dim)

    @classmethod
    def identity(cls, n) -> "CPMap":
        return cls.from_kraus([np.eye(n)])

    def compose(self, other: "CPMap") -> "CPMap":
        """self ∘ other."""
        return CPMap.from_superop(self.superop() @ other.superop(), other.in_dim, self.out_dim)

    def power(self, m: int) -> "CPMap":
        S = np.linalg.matrix_power(self.superop(), m)
        return CPMap.from_superop(S, self.in_dim, self.out_dim)


def ad(U) -> CPMap:
    """X ↦ U X U^*."""
    return CPMap.from_kraus([U])


def powers_sum(phi: CPMap, psi: CPMap, U, V) -> CPMap:
    """Block map (X Y; Z W) ↦ (φ(X), U Y V^*; V Z U^*, ψ(W)) on M_{n+m}."""
    U, V = la.as_operator(U), la.as_operator(V)
    n, m = phi.in_dim, psi.in_dim
    if phi.out_dim != n or psi.out_dim != m or U.shape != (n, n) or V.shape != (m, m):
        raise ShapeMismatch("need φ on M_n, ψ on M_m, U n×n and V m×m")

    def tau(X):
        out = np.zeros_like(X)
        out[:n, :n] = phi(X[:n, :n])
        out[:n, n:] = U @ X[:n, n:] @ V.conj().T
        out[n:, :n] = V @ X[n:, :n] @ U.conj().T
        out[n:, n:] = psi(X[n:, n:])
        return out

    return CPMap.from_function(tau, n + m, n + m)


def intertwining_defect(phi: CPMap, U) -> float:
    """max over matrix units A of ||φ(A) U − U A||."""
    U = la.as_operator(U)
    n = phi.in_dim
    worst = 0.0
    for i in range(n):
        for j in range(n):
            A = np.zeros((n, n), dtype=complex)
            A[i, j] = 1.0
            worst = max(worst, la.opnorm(phi(A) @ U - U @ A))
    return worst


def cp_checks(tau: CPMap, steps: int = 0, family=None, tol: float = 1e-10) -> Report:
    """Choi positivity, unitality and, given family[m] = τ_{mδ}, the semigroup defect."""
    rep = Report("cp_checks")
    w = np.linalg.eigvalsh((tau.choi + tau.choi.conj().T) / 2)
    rep.add("choi_min_eigenvalue", REF_POWERS, float(w.min()), -tol, kind="lower")
    rep.add("unitality_defect", REF_POWERS, la.opnorm(tau(np.eye(tau.in_dim)) - np.eye(tau.out_dim)), tol)
    if family is not None and steps:
        S = tau.superop()
        P = np.eye(S.shape[1], dtype=complex)
        worst = 0.0
        for m in range(1, steps + 1):
            P = S @ P
            worst = max(worst, la.opnorm(P - family[m].superop()))
        rep.add("semigroup_defect", REF_POWERS, worst, tol)
    return rep


def powers_semigroup(A, B, U=None, V=None, steps: int = 4):
    """Step map and time-mδ family of the Powers sum of Ad(A^m) and Ad(B^m).

    The family uses the canonical intertwiners A^m, B^m; the step map uses
    the supplied U, V (default A, B), so a wrong intertwiner shows up as a
    semigroup defect.
    """
    A, B = la.as_operator(A), la.as_operator(B)
    U = A if U is None else la.as_operator(U)
    V = B if V is None else la.as_operator(V)
    step = powers_sum(ad(A), ad(B), U, V)
    fam = {}
    for m in range(1, steps + 1):
        Am, Bm = np.linalg.matrix_power(A, m), np.linalg.matrix_power(B, m)
        fam[m] = powers_sum(ad(Am), ad(Bm), Am, Bm)
    return step, fam


def powers_check(A, B, U=None, V=None, steps: int = 4, tol: float = 1e-10) -> Report:
    """cp_checks of the Powers sum plus intertwining defects of U and V."""
    step, fam = powers_semigroup(A, B, U, V, steps)
    rep = cp_checks(step, steps, fam, tol)
    U = la.as_operator(A if U is None else U)
    V = la.as_operator(B if V is None else V)
    rep.add("intertwining_defect", REF_POWERS, max(intertwining_defect(ad(A), U), intertwining_defect(ad(B), V)), tol)
    return rep
