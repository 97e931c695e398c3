"""Acceptance criteria, one test per criterion.

Each test records a PASS/FAIL line in ``RESULTS``; the lines are printed in
the pytest terminal summary and by ``python3 -m tests.test_acceptance``.
"""
import math

import numpy as np

from prodsys import amalgam as am
from prodsys import ccr
from prodsys import cluster as cl
from prodsys import inclusion as inc
from prodsys import linalg as la
from prodsys import units
from prodsys.suites import additive_gram_check, exp_trend, seeded_additives, unit_lift_check, vacuum_roots_check

RESULTS = {}


class Criterion:
    """Collects named sub-results of one criterion and records its line."""

    def __init__(self, number, title):
        self.number, self.title, self.parts = number, title, []

    def le(self, name, measured, bound):
        self.parts.append((name, measured <= bound, f"{name}={measured:.3g} (bound ≤{bound:g})"))

    def ge(self, name, measured, bound):
        self.parts.append((name, measured >= bound, f"{name}={measured:.3g} (bound ≥{bound:g})"))

    def eq(self, name, measured, expected):
        self.parts.append((name, measured == expected, f"{name}={measured} (want {expected})"))

    def flag(self, name, ok):
        self.parts.append((name, bool(ok), f"{name}={bool(ok)}"))

    def finish(self):
        ok = all(p[1] for p in self.parts)
        failed = [p[2] for p in self.parts if not p[1]]
        detail = "; ".join(failed) if failed else f"{len(self.parts)} checks"
        RESULTS[self.number] = f"criterion {self.number:>2} {'PASS' if ok else 'FAIL'}  {self.title}: {detail}"
        assert ok, RESULTS[self.number]


def test_criterion_01_structure():
    c = Criterion(1, "system structure of grid CCR flows")
    for k, L in [(1, 3), (2, 2)]:
        rep = inc.check_system(ccr.build(k, L), 1e-12)
        for name in ("isometry_defect", "coassociativity_defect", "unitarity_defect"):
            c.le(f"ccr({k},{L}).{name}", rep.measured(name), 1e-12)
    c.finish()


def test_criterion_02_unit_lifting():
    c = Criterion(2, "unit lifting along the inductive limit")
    tr = ccr.truncate(ccr.build(1, 2), 1)
    rng = np.random.default_rng(2)
    rep = unit_lift_check(tr, [la.haar_vector(rng, tr.cell_dim) for _ in range(3)], 1e-10)
    for ch in rep.checks:
        c.le(ch.name, ch.measured, 1e-10)
    c.finish()


def test_criterion_03_additive_gram():
    c = Criterion(3, "Gram formula for additive units")
    E = ccr.build(1, 3)
    u = ccr.vacuum(E)
    rep = additive_gram_check(E, u, seeded_additives(E, u, 5, np.random.default_rng(3)), 1e-10)
    for ch in rep.checks:
        c.le(ch.name, ch.measured, 1e-10)
    c.finish()


def test_criterion_04_vacuum_roots_and_index():
    c = Criterion(4, "vacuum roots and index additivity")
    for k in (1, 2, 3):
        rep = vacuum_roots_check(ccr.build(k, 2), 1e-12)
        c.eq(f"k={k}.root_dim", rep.measured("vacuum_root_dim"), k)
        c.le(f"k={k}.basis_residual", rep.measured("vacuum_root_basis_residual"), 1e-12)
        c.eq(f"k={k}.index", rep.measured("index_equals_k"), k)
    T = inc.tensor_systems(ccr.build(1, 2), ccr.build(2, 2))
    c.eq("index(ccr1⊗ccr2)", units.index_of(T), 3)
    c.finish()


def test_criterion_05_amalgam():
    c = Criterion(5, "amalgamated product cross inner product and span")
    E1 = ccr.build(1, 2)
    w = units.normalized_units(E1, 2, np.random.default_rng(5))[1]
    triv = inc.trivial_system(2)
    cases = {
        "zero": (E1, E1, np.zeros((2, 2))),
        "rank_one": (E1, E1, np.outer(ccr.vacuum(E1)[1], np.conj(w[1]))),
        "partial_isometry": (ccr.build(2, 2), E1, np.array([[1, 0], [0, 1], [0, 0]], dtype=complex)),
        "strict_contraction": (triv, triv, [[math.exp(-0.7 * triv.delta)]]),
    }
    for name, (E, F, C) in cases.items():
        rep = am.amalgam_checks(am.amalgamate(E, F, C), 1e-10)
        c.le(f"{name}.cross", rep.measured("cross_inner_product_defect"), 1e-10)
        c.le(f"{name}.span", rep.measured("generated_span_defect"), 1e-10)
    c.finish()


def test_criterion_06_spatial_product():
    c = Criterion(6, "spatial product, type I generation, unit independence")
    E = ccr.build(1, 2)
    sp = am.spatial_product(E, ccr.vacuum(E), E, ccr.vacuum(E), 1e-10)
    c.le("identification_isometry", sp.report.measured("identification_isometry_defect"), 1e-8)
    c.le("identification_range", sp.report.measured("identification_range_distance"), 1e-10)
    E2, triv = ccr.build(2, 2), inc.trivial_system(2)
    rep = am.typeI_generation_check(E2, ccr.vacuum(E2), triv, units.unit_from_cell(triv, [1.0]), 1e-10)
    for ch in rep.checks:
        c.le(f"trivial_factor.{ch.name}", ch.measured, 1e-10)
    rep = am.typeI_generation_check(E, ccr.vacuum(E), E, ccr.vacuum(E), 1e-10)
    for ch in rep.checks:
        c.le(f"ccr⊗ccr.{ch.name}", ch.measured, 1e-10)
    u1, u2 = units.normalized_units(E, 2, np.random.default_rng(6))
    rep = am.unit_independence_check(E, u1, u2, E, ccr.vacuum(E), u2, 1e-8)
    c.le("independence.word_gram", rep.measured("word_gram_defect"), 1e-8)
    c.le("independence.matching", rep.measured("intertwiner_matching_defect"), 1e-8)
    c.finish()


def test_criterion_07_root_spaces():
    c = Criterion(7, "roots of tensor products and amalgams")
    E, F = ccr.build(1, 2), ccr.build(2, 2)
    rep = am.tensor_root_check(E, ccr.vacuum(E), F, ccr.vacuum(F), 1e-10)
    c.eq("tensor_root_dim", rep.measured("root_dims_add"), 3)
    c.le("tensor_cross_gram", rep.measured("cross_block_gram"), 1e-10)
    C = np.array([[1, 0], [0, 1], [0, 0]], dtype=complex)
    F1 = ccr.build(1, 2)
    rep = am.root_amalgam_check(F, F1, C, ccr.vacuum(F1), 1e-10)
    c.eq("partial.root_dim", rep.info["root_dim"], rep.info["amalgam_rank"])
    c.eq("partial.amalgam_rank", rep.info["amalgam_rank"], 2)
    c.le("partial.gram", rep.measured("root_gram_isometry_defect"), 1e-10)
    c.le("partial.span", rep.measured("root_span_distance"), 1e-10)
    triv = inc.trivial_system(2)
    A = am.amalgamate(triv, triv, [[math.exp(-0.7 * triv.delta)]])
    c.eq("contraction.root_dim", units.index_of(A.G), 1)
    c.finish()


def test_criterion_08_powers_sum():
    c = Criterion(8, "Powers sum of CP semigroups")
    rng = np.random.default_rng(8)
    A, B = la.random_unitary(rng, 2), la.random_unitary(rng, 3)
    rep = am.powers_check(A, B, steps=4, tol=1e-10)
    c.ge("choi_min", rep.measured("choi_min_eigenvalue"), -1e-10)
    c.le("unitality", rep.measured("unitality_defect"), 1e-10)
    c.le("semigroup", rep.measured("semigroup_defect"), 1e-10)
    c.le("intertwining", rep.measured("intertwining_defect"), 1e-10)
    c.flag("fault_detected", not am.powers_check(A, B, U=np.eye(2), steps=4, tol=1e-10).passed)
    c.finish()


def test_criterion_09_cluster():
    c = Criterion(9, "cluster of the vacuum line is the type I part")
    for k in (1, 2):
        E = ccr.build(k, 3, cap=8192)
        u = ccr.vacuum(E)
        rep = cl.cluster_checks(cl.cluster(E, cl.unit_line(E, u), 1, 1e-10), u, 1e-10)
        for ch in rep.checks:
            c.le(f"k={k}.{ch.name}", ch.measured, 1e-10)
    c.finish()


def test_criterion_10_random_sets():
    c = Criterion(10, "random set of the vacuum line")
    E = ccr.build(1, 3)
    n = E.n_cells
    F = cl.unit_line(E, ccr.vacuum(E))
    tracial, diag = cl.FaithfulState.tracial(E.dims[n]), cl.FaithfulState.diagonal(E.dims[n], 10)
    for name, eta in (("tracial", tracial), ("diag", diag)):
        dist = cl.random_set_distribution(E, F, eta)
        c.le(f"{name}.sum", abs(dist.probs.sum() - 1.0), 1e-10)
        c.ge(f"{name}.min", dist.raw_min, -1e-12)
        worst = max(cl.at_most_one_check(E, F, eta, a, b, 1e-9, dist).measured("at_most_one_difference")
                    for a, b in cl.grid_intervals(n, n // 2))
        c.le(f"{name}.at_most_one", worst, 1e-9)
        push = cl.cluster_pushforward_check(E, F, eta, 1, 1e-9)
        c.le(f"{name}.pushforward_tv", push.measured("pushforward_total_variation"), 1e-9)
    c.le("fair_coin", cl.fair_coin_error(cl.random_set_distribution(E, F, tracial)), 1e-12)
    c.eq("null_pattern_mismatches", cl.null_pattern_check(E, F, tracial, diag).measured("null_pattern_mismatches"), 0)
    c.finish()


def test_criterion_11_discretization_trend():
    c = Criterion(11, "exponential Gram error halves per level")
    trend = exp_trend(levels=(3, 4, 5))
    for L, r in zip((3, 4), trend["ratios"]):
        c.le(f"L{L}->L{L + 1}.ratio_deviation", abs(r - 2.0) / 2.0, 0.2)
    c.finish()


if __name__ == "__main__":
    import sys

    tests = [v for k, v in sorted(globals().items()) if k.startswith("test_criterion_")]
    for fn in tests:
        try:
            fn()
        except AssertionError:
            pass
    for n in sorted(RESULTS):
        print(RESULTS[n])
    sys.exit(0 if all("PASS" in line for line in RESULTS.values()) else 1)
