"""Named verification suites and the configuration that drives them."""
from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass

import numpy as np

from . import amalgam as am
from . import ccr
from . import cluster as cl
from . import inclusion as inc
from . import linalg as la
from . import units
from .errors import ConfigError, SizeLimit, UnknownSuite
from .report import Report

SUITES = (
    "system-checks",
    "units",
    "ccr-roots",
    "amalgam-spatial",
    "amalgam-partial",
    "powers",
    "cluster",
    "randomset",
    "all",
)

REF_LIFT = "units of an inclusion system lift uniquely to the inductive limit"
REF_GRAM = "Gram formula for additive units"
REF_VACUUM = "roots of the vacuum are the one-particle step vectors c·χ"
REF_INDEX = "index of the CCR flow equals the multiplicity"
REF_EXP = "exponential vectors have Gram matrix e^{⟨f,g⟩}"
REF_TENSOR_GRID = "grid roots of u⊗v count every non-unit cell direction"
REF_FAULT = "a broken intertwiner is detected"
REF_IID = "tracial vacuum random set is i.i.d. per cell"


@dataclass
class SuiteConfig:
    """Inputs for :func:`run_suite`; ``state`` is ``"tracial"`` or ``"diag(SEED)"``."""

    suite: str = "all"
    k: int = 1
    level: int = 3
    coarse_level: int = 1
    tol_identity: float = 1e-10
    tol_spectral: float = 1e-8
    state: str = "tracial"
    seed: int = 0
    slice_cap: int | None = None

    def validate(self) -> None:
        """Raise before any computation if the configuration cannot run."""
        if self.suite not in SUITES:
            raise UnknownSuite(f"unknown suite {self.suite!r}; choose from {', '.join(SUITES)}")
        if self.k < 1:
            raise ConfigError("k must be at least 1")
        if not self.level > self.coarse_level >= 0:
            raise ConfigError(f"need level > coarse_level >= 0, got level={self.level}, coarse={self.coarse_level}")
        if self.tol_identity <= 0 or self.tol_spectral <= 0:
            raise ConfigError("tolerances must be positive")
        if self.state != "tracial" and not self.state.startswith("diag("):
            raise ConfigError(f"state must be 'tracial' or 'diag(SEED)', got {self.state!r}")
        top = (1 + self.k) ** (1 << self.level)
        if top > ccr.slice_cap(self.slice_cap):
            raise SizeLimit(f"slice dimension {top} exceeds cap {ccr.slice_cap(self.slice_cap)}")
        if self.suite in ("randomset", "all") and (1 << self.level) > cl.MAX_FINE_CELLS:
            raise SizeLimit(f"{1 << self.level} fine cells exceed the cap of {cl.MAX_FINE_CELLS}")

    def to_dict(self) -> dict:
        return asdict(self)


# reusable checks --------------------------------------------------------

def unit_lift_check(incl: inc.GridSystem, cells, tol: float = 1e-10) -> Report:
    """Round trips i^*∘lift = id on units of incl and lift∘i^* = id on units of the limit."""
    back, forth = 0.0, 0.0
    for g in cells:
        u = units.unit_from_cell(incl, g)
        w = units.lift_unit(incl, u, tol)
        r = units.restrict_unit(w.limit, w)
        back = max(back, max(float(np.linalg.norm(r[m] - u[m])) for m in u.times()))
        w2 = units.unit_from_cell(w.limit.system, g)
        again = units.lift_unit(incl, units.restrict_unit(w.limit, w2), tol)
        forth = max(forth, max(float(np.linalg.norm(again[m] - w2[m])) for m in w2.times()))
    rep = Report("unit_lift")
    rep.add("restrict_after_lift_defect", REF_LIFT, back, tol)
    rep.add("lift_after_restrict_defect", REF_LIFT, forth, tol)
    return rep


def additive_gram_check(prod: inc.GridSystem, u, fams, tol: float = 1e-10) -> Report:
    """|⟨a_s, b_s⟩ − ⟨θ_s a_1, θ_s b_1⟩| over all pairs and grid s, and s-linearity for roots."""
    gram, root = 0.0, 0.0
    roots = [units.decompose_additive(a, tol)[1] for a in fams]
    for i, a in enumerate(fams):
        for b in fams[i:]:
            for m in range(1, prod.n_cells + 1):
                gram = max(gram, abs(np.vdot(a[m], b[m]) - units.gram_additive(a, b, m, tol)))
    for i, a in enumerate(roots):
        for b in roots[i:]:
            for m in range(1, prod.n_cells + 1):
                root = max(root, abs(np.vdot(a[m], b[m]) - (m / prod.n_cells) * np.vdot(a.top, b.top)))
    rep = Report("additive_gram")
    rep.add("additive_gram_defect", REF_GRAM, float(gram), tol)
    rep.add("root_gram_linearity_defect", REF_GRAM, float(root), tol)
    return rep


def seeded_additives(prod: inc.GridSystem, u, count: int, rng: np.random.Generator):
    """Additive families of u with random cell values (unit component included)."""
    d = prod.cell_dim
    return [units.additive_from_cell(prod, u, math.sqrt(prod.delta) * la.random_matrix(rng, d, 1)[:, 0]) for _ in range(count)]


def vacuum_roots_check(sys: ccr.GridCCR, tol: float = 1e-12) -> Report:
    """Solved roots of the vacuum have dimension k and span the step vectors c·χ_{[0,1]}."""
    rs = ccr.solve_vacuum_roots(sys)
    n = sys.n_cells
    expected = np.stack([ccr.vacuum_root(sys, np.eye(sys.k)[i]).top for i in range(sys.k)], axis=1)
    S = la.orthonormalize(rs.basis_at_1, ambient_dim=sys.dims[n])
    X = la.orthonormalize(expected, ambient_dim=sys.dims[n])
    rep = Report("vacuum_roots")
    rep.add("vacuum_root_dim", REF_VACUUM, rs.dim, kind="equal", expected=sys.k)
    rep.add("vacuum_root_basis_residual", REF_VACUUM, max(la.containment_residual(rs.basis_at_1, X), la.containment_residual(expected, S)), tol)
    rep.add("vacuum_root_orthonormality_defect", REF_VACUUM, la.opnorm(rs.gram() - np.eye(rs.dim)), 1e-10)
    rep.add("index_equals_k", REF_INDEX, units.index_of(sys), kind="equal", expected=sys.k)
    return rep


def exp_trend(f=None, g=None, levels=(3, 4, 5)) -> dict:
    """Gram errors of grid exponential vectors against e^{⟨f,g⟩} and successive ratios."""
    f = f or (lambda x: 1.0 + x)
    g = g or (lambda x: np.cos(2.0 * x))
    errs = [float(ccr.exp_gram_error(f, g, L)) for L in levels]
    return {"levels": list(levels), "errors": errs, "ratios": [errs[i] / errs[i + 1] for i in range(len(errs) - 1)]}


def exp_gram_consistency(sys: ccr.GridCCR, rng: np.random.Generator, tol: float = 1e-10) -> Report:
    """Closed form Π(1 + δ⟨f_c, g_c⟩) against the slice inner product of exp_vector."""
    n = sys.n_cells
    f = la.random_matrix(rng, n, sys.k)
    g = la.random_matrix(rng, n, sys.k)
    direct = np.vdot(ccr.exp_vector(sys, f, n), ccr.exp_vector(sys, g, n))
    closed = ccr.exp_gram(f, g, sys.delta)
    fc = ccr.to_configuration_function(sys, ccr.exp_vector(sys, f, n), n)
    gc = ccr.to_configuration_function(sys, ccr.exp_vector(sys, g, n), n)
    conf = ccr.configuration_inner(fc, gc, sys.delta)
    rep = Report("exp_vectors")
    rep.add("exp_gram_closed_form_defect", REF_EXP, abs(direct - closed) / max(abs(closed), 1.0), tol)
    rep.add("configuration_inner_defect", REF_EXP, abs(direct - conf) / max(abs(closed), 1.0), tol)
    rep.add("one_particle_isometry_defect", REF_EXP, la.isometry_defect(ccr.one_particle_embedding(sys, n)), tol)
    rep.add("shift_isometry_defect", REF_EXP, max(la.isometry_defect(ccr.shift(sys, r, n)) for r in range(n)), tol)
    return rep


def _ccr(cfg: SuiteConfig, k: int | None = None, level: int | None = None) -> ccr.GridCCR:
    return ccr.build(cfg.k if k is None else k, cfg.level if level is None else level, cfg.slice_cap)


def _small_level(cfg: SuiteConfig, k: int, cap: int = 1500) -> int:
    """Largest level ≤ cfg.level whose top slice of CCR(k)⊗CCR(1) stays below cap."""
    L = min(cfg.level, 2)
    while L > 1 and (2 * (1 + k)) ** (1 << L) > cap:
        L -= 1
    return L


# suites -----------------------------------------------------------------

def suite_system_checks(cfg: SuiteConfig, rng) -> Report:
    tol = cfg.tol_identity
    rep = Report("system-checks")
    Lc = cfg.level
    while Lc > 1 and (1 + cfg.k) ** (1 << Lc) > 1024:
        Lc -= 1
    rep.extend(inc.check_system(_ccr(cfg, level=Lc), tol), "ccr.")
    Ls = min(cfg.level, 2)
    tr = ccr.truncate(_ccr(cfg, level=Ls), 1)
    rep.extend(inc.check_system(tr, tol), "truncated.")
    rep.extend(inc.limit_checks(tr, tol), "truncated_limit.")
    Lt = _small_level(cfg, cfg.k, cap=600)
    T = inc.tensor_systems(_ccr(cfg, level=Lt), _ccr(cfg, k=1, level=Lt))
    rep.extend(inc.check_system(T, tol), "tensor.")
    rep.info["levels"] = {"ccr": Lc, "truncated": Ls, "tensor": Lt}
    return rep


def suite_units(cfg: SuiteConfig, rng) -> Report:
    tol = cfg.tol_identity
    rep = Report("units")
    E = _ccr(cfg)
    u = ccr.vacuum(E)
    rep.extend(units.check_unit(u, tol), "vacuum.")
    Ls = min(cfg.level, 2)
    tr = ccr.truncate(_ccr(cfg, level=Ls), 1)
    cells = [la.haar_vector(rng, tr.cell_dim) for _ in range(3)]
    rep.extend(unit_lift_check(tr, cells, tol))
    rep.extend(additive_gram_check(E, u, seeded_additives(E, u, 5, rng), tol))
    rs = units.root_space(E, u, tol)
    rep.add("root_space_dim", REF_INDEX, rs.dim, kind="equal", expected=cfg.k)
    return rep


def suite_ccr_roots(cfg: SuiteConfig, rng) -> Report:
    rep = Report("ccr-roots")
    Lr = min(cfg.level, 2)
    rep.extend(vacuum_roots_check(_ccr(cfg, level=Lr)))
    rep.extend(exp_gram_consistency(_ccr(cfg, level=Lr), rng, cfg.tol_identity))
    return rep


def suite_amalgam_spatial(cfg: SuiteConfig, rng) -> Report:
    tol, stol = cfg.tol_identity, cfg.tol_spectral
    rep = Report("amalgam-spatial")
    La = _small_level(cfg, cfg.k)
    E, F = _ccr(cfg, level=La), _ccr(cfg, k=1, level=La)
    u, v = ccr.vacuum(E), ccr.vacuum(F)
    sp = am.spatial_product(E, u, F, v, tol)
    for c in sp.report.checks:
        c.tolerance = stol if "isometry" in c.name else c.tolerance
    rep.extend(sp.report, "spatial.")
    F1 = _ccr(cfg, k=1, level=La)
    w1, w2 = units.normalized_units(F1, 2, rng)
    rep.extend(am.unit_independence_check(F1, w1, w2, F1, ccr.vacuum(F1), w2, stol), "independence.")
    triv = inc.trivial_system(La)
    rep.extend(am.typeI_generation_check(E, u, triv, units.unit_from_cell(triv, [1.0]), tol), "typeI_trivial.")
    T = inc.tensor_systems(E, F)
    uv = units.unit_from_cell(T, np.kron(u[1], v[1]))
    rep.add("tensor_root_dim_grid", REF_TENSOR_GRID, units.root_space(T, uv, tol).dim, kind="equal",
            expected=(1 + cfg.k) * 2 - 1)
    return rep


def suite_amalgam_partial(cfg: SuiteConfig, rng) -> Report:
    tol = cfg.tol_identity
    rep = Report("amalgam-partial")
    La = min(cfg.level, 2)
    E1 = _ccr(cfg, k=1, level=La)
    u1 = ccr.vacuum(E1)
    w = units.normalized_units(E1, 2, rng)[1]
    rep.extend(am.amalgam_checks(am.amalgamate(E1, E1, np.zeros((2, 2)), tol), tol), "zero.")
    rep.extend(am.amalgam_checks(am.amalgamate(E1, E1, np.outer(u1[1], np.conj(w[1])), tol), tol), "rank_one.")
    E2 = _ccr(cfg, k=2, level=La) if 3 ** (1 << La) <= ccr.slice_cap(cfg.slice_cap) else None
    if E2 is not None:
        C = np.array([[1, 0], [0, 1], [0, 0]], dtype=complex)
        rep.extend(am.amalgam_checks(am.amalgamate(E2, E1, C, tol), tol), "partial_isometry.")
        rep.extend(am.root_amalgam_check(E2, E1, C, u1, tol), "partial_roots.")
    triv = inc.trivial_system(La)
    q = math.exp(-0.7 * triv.delta)
    A = am.amalgamate(triv, triv, [[q]], tol)
    rep.extend(am.amalgam_checks(A, tol), "contraction.")
    rep.add("contraction.root_dim", "strict contraction of one-dimensional systems has index one",
            units.index_of(A.G, tol, rng), kind="equal", expected=1)
    return rep


def suite_powers(cfg: SuiteConfig, rng) -> Report:
    tol = cfg.tol_identity
    rep = Report("powers")
    A, B = la.random_unitary(rng, 2), la.random_unitary(rng, 3)
    rep.extend(am.powers_check(A, B, steps=4, tol=tol), "canonical.")
    fault = am.powers_check(A, B, U=np.eye(2), steps=4, tol=tol)
    rep.add("fault_detected", REF_FAULT, not fault.passed, kind="flag")
    rep.info["fault_intertwining_defect"] = fault.measured("intertwining_defect")
    return rep


def suite_cluster(cfg: SuiteConfig, rng) -> Report:
    tol = cfg.tol_identity
    rep = Report("cluster")
    E = _ccr(cfg)
    u = ccr.vacuum(E)
    F = cl.unit_line(E, u)
    res = cl.cluster(E, F, cfg.coarse_level, tol)
    rep.extend(cl.cluster_checks(res, u, tol))
    rep.extend(cl.f_prime_checks(E, F, res.step, tol))
    if 2 * res.step <= E.n_cells:
        rep.extend(cl.x_space_checks(E, u, cfg.coarse_level, tol=tol))
    Li = cfg.level
    while Li > 1 and (1 + cfg.k) ** (1 << Li) > 1024:
        Li -= 1
    Ei = _ccr(cfg, level=Li)
    rep.extend(cl.interval_projection_checks(Ei, cl.unit_line(Ei, ccr.vacuum(Ei)), tol=tol))
    E1 = _ccr(cfg, k=1, level=min(cfg.level, 2))
    a, b = units.normalized_units(E1, 2, rng)
    F1, F2 = cl.unit_line(E1, a), cl.unit_line(E1, b)
    G = inc.SubsystemFamily(E1, {m: cl.two_subsystem_cluster(E1, F1, F2, m) for m in range(1, E1.n_cells + 1)})
    contain = max(max(la.dominance_defect(F1[m], G[m]), la.dominance_defect(F2[m], G[m])) for m in G.times())
    rep.add("two_subsystem_contains_defect", "G′ contains both subsystems", contain, tol)
    rep.add("two_subsystem_inclusion_defect", "G′ is an inclusion system", inc.check_subsystem(G, tol).measured("inclusion_defect"), tol)
    same = max(la.subspace_distance(cl.two_subsystem_cluster(E1, F1, F1, m), cl.f_prime(E1, F1, m)) for m in G.times())
    rep.add("two_subsystem_diagonal_distance", "G′ with equal subsystems is F′", same, tol)
    return rep


def suite_randomset(cfg: SuiteConfig, rng) -> Report:
    rep = Report("randomset")
    E = _ccr(cfg)
    n = E.n_cells
    F = cl.unit_line(E, ccr.vacuum(E))
    eta = cl.FaithfulState.parse(cfg.state, E.dims[n])
    dist = cl.random_set_distribution(E, F, eta, cfg.tol_identity)
    rep.extend(cl.distribution_checks(dist, cfg.tol_identity))
    if cfg.state == "tracial":
        # vacuum weight per cell is 1/(1+k) under the trace
        p = cfg.k / (1 + cfg.k)
        sizes = np.array([bin(a).count("1") for a in range(1 << n)])
        iid = p**sizes * (1 - p) ** (n - sizes)
        rep.add("iid_cell_law_error", REF_IID, float(np.max(np.abs(dist.probs - iid))), 1e-12)
    step = 1 << (cfg.level - cfg.coarse_level)
    worst = 0.0
    for a, b in cl.grid_intervals(n, step):
        worst = max(worst, cl.at_most_one_check(E, F, eta, a, b, 1e-9, dist).measured("at_most_one_difference"))
    rep.add("at_most_one_max_difference", cl.REF_AT_MOST_ONE, worst, 1e-9)
    rep.extend(cl.cluster_pushforward_check(E, F, eta, cfg.coarse_level, 1e-9))
    other = cl.FaithfulState.diagonal(E.dims[n], cfg.seed + 1)
    rep.extend(cl.null_pattern_check(E, F, eta, other))
    return rep


_RUNNERS = {
    "system-checks": suite_system_checks,
    "units": suite_units,
    "ccr-roots": suite_ccr_roots,
    "amalgam-spatial": suite_amalgam_spatial,
    "amalgam-partial": suite_amalgam_partial,
    "powers": suite_powers,
    "cluster": suite_cluster,
    "randomset": suite_randomset,
}


def run_suite(cfg: SuiteConfig) -> tuple[Report, float]:
    """Run the configured suite; returns the report and the wall time in seconds.

    Raises
    ------
    UnknownSuite, ConfigError, SizeLimit
        From :meth:`SuiteConfig.validate`, before any computation.
    """
    cfg.validate()
    start = time.perf_counter()
    rng = np.random.default_rng(cfg.seed)
    names = [s for s in SUITES if s != "all"] if cfg.suite == "all" else [cfg.suite]
    rep = Report(cfg.suite)
    for name in names:
        part = _RUNNERS[name](cfg, rng)
        rep.extend(part, f"{name}/" if cfg.suite == "all" else "")
        rep.info.update({f"{name}/{k}": v for k, v in part.info.items()})
    rep.info["seed"] = cfg.seed
    return rep, time.perf_counter() - start
