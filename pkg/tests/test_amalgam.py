import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from prodsys import amalgam as am
from prodsys import ccr
from prodsys import inclusion as inc
from prodsys import linalg as la
from prodsys import units
from prodsys.errors import NotContractive, NotMorphism, NotPartialIsometry, ShapeMismatch, UnitNotSupported

seeds = st.integers(0, 2**32 - 1)


def _contraction(rng, rows, cols, norm):
    C = la.random_matrix(rng, rows, cols)
    return norm * C / la.opnorm(C)


@given(seeds, st.floats(0.0, 1.0))
def test_amalgam_of_random_contraction(seed, norm):
    E = ccr.build(1, 1)
    C = _contraction(np.random.default_rng(seed), 2, 2, norm)
    A = am.amalgamate(E, E, C)
    rep = am.amalgam_checks(A)
    assert rep.passed, rep.summary()


def test_amalgamate_validates_input():
    E = ccr.build(1, 1)
    with pytest.raises(NotContractive):
        am.amalgamate(E, E, 2 * np.eye(2))
    with pytest.raises(NotMorphism):
        am.amalgamate(E, E, np.eye(3))


def test_zero_contraction_gives_direct_sum_cells():
    E = ccr.build(1, 1)
    A = am.amalgamate(E, E, np.zeros((2, 2)))
    assert A.G.cell_dim == 4


def test_spatial_product_of_vacua():
    E = ccr.build(1, 2)
    sp = am.spatial_product(E, ccr.vacuum(E), E, ccr.vacuum(E))
    assert sp.report.passed, sp.report.summary()


def test_spatial_product_does_not_depend_on_units(rng):
    E = ccr.build(1, 2)
    u1, u2 = units.normalized_units(E, 2, rng)
    rep = am.unit_independence_check(E, u1, u2, E, ccr.vacuum(E), u2)
    assert rep.passed, rep.summary()


def test_typeI_generation_with_trivial_factor():
    E = ccr.build(2, 2)
    triv = inc.trivial_system(2)
    rep = am.typeI_generation_check(E, ccr.vacuum(E), triv, units.unit_from_cell(triv, [1.0]))
    assert rep.passed, rep.summary()


def test_typeI_generation_of_two_grid_ccr_flows():
    # every grid cell is type I, so the mixed and type-I spans fill the whole
    # tensor product while the spatial image keeps only d_E + d_F − 1 per cell
    E = ccr.build(1, 1)
    rep = am.typeI_generation_check(E, ccr.vacuum(E), E, ccr.vacuum(E))
    assert rep.measured("spatial_vs_typeI_mixed_distance") == pytest.approx(1.0)
    assert rep.measured("typeI_lines_vs_typeI_of_tensor_distance") == pytest.approx(1.0)
    assert rep.measured("typeI_tensor_vs_typeI_of_tensor_distance") <= 1e-10


def test_partial_isometry_roots():
    E2, F = ccr.build(2, 2), ccr.build(1, 2)
    C = np.array([[1, 0], [0, 1], [0, 0]], dtype=complex)
    rep = am.root_amalgam_check(E2, F, C, ccr.vacuum(F))
    assert rep.passed, rep.summary()
    assert rep.info["root_dim"] == 2


def test_partial_isometry_requirements():
    E = ccr.build(1, 1)
    with pytest.raises(NotPartialIsometry):
        am.root_amalgam_check(E, E, 0.5 * np.eye(2), ccr.vacuum(E))
    with pytest.raises(UnitNotSupported):
        am.root_amalgam_check(E, E, np.diag([0.0, 1.0]), ccr.vacuum(E))


def test_strict_contraction_has_index_one():
    triv = inc.trivial_system(2)
    A = am.amalgamate(triv, triv, [[math.exp(-0.7 * triv.delta)]])
    assert am.amalgam_checks(A).passed
    assert units.index_of(A.G) == 1


@pytest.mark.parametrize("k1,k2", [(1, 1), (1, 2)])
def test_tensor_roots_on_the_grid(k1, k2):
    E, F = ccr.build(k1, 1), ccr.build(k2, 1)
    rep = am.tensor_root_check(E, ccr.vacuum(E), F, ccr.vacuum(F))
    # the grid root space of u⊗v is every non-unit direction of the product cell
    assert rep.info["tensor_root_dim"] == (1 + k1) * (1 + k2) - 1
    assert rep.measured("cross_block_gram") <= 1e-10
    assert rep.measured("constructed_root_defect") <= 1e-10


@given(seeds)
def test_powers_sum_is_a_cp_semigroup(seed):
    rng = np.random.default_rng(seed)
    rep = am.powers_check(la.random_unitary(rng, 2), la.random_unitary(rng, 2), steps=3)
    assert rep.passed, rep.summary()


def test_powers_detects_wrong_intertwiner(rng):
    A, B = la.random_unitary(rng, 2), la.random_unitary(rng, 3)
    rep = am.powers_check(A, B, U=np.eye(2), steps=4)
    assert not rep.passed
    assert rep.measured("intertwining_defect") > 0.1


def test_powers_shapes():
    with pytest.raises(ShapeMismatch):
        am.powers_sum(am.ad(np.eye(2)), am.ad(np.eye(2)), np.eye(3), np.eye(2))


@given(seeds)
def test_cpmap_representations_agree(seed):
    rng = np.random.default_rng(seed)
    K = [la.random_matrix(rng, 2, 2) for _ in range(2)]
    phi = am.CPMap.from_kraus(K)
    X = la.random_matrix(rng, 2, 2)
    assert np.allclose(phi(X), sum(k @ X @ k.conj().T for k in K), atol=1e-12)
    again = am.CPMap.from_superop(phi.superop(), 2, 2)
    assert np.allclose(again.choi, phi.choi, atol=1e-12)
    assert np.allclose(phi.power(2)(X), phi(phi(X)), atol=1e-10)
