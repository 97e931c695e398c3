import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from prodsys import ccr
from prodsys import inclusion as inc
from prodsys import linalg as la
from prodsys.errors import NotInclusionSystem, NotProduct, NotSubsystem, OutOfRange


def _broken_system():
    sys = ccr.build(1, 2).materialize()
    beta = {p: sys.beta(*p) for p in sys.pairs()}
    beta[(1, 1)] = beta[(1, 1)] @ np.diag([1, 1, -1, 1]).astype(complex)
    return inc.GridSystem(2, dict(sys.dims), beta, "product")


@pytest.mark.parametrize("k,level", [(1, 2), (1, 3), (2, 2)])
def test_ccr_is_product_system(k, level):
    rep = inc.check_system(ccr.build(k, level))
    assert rep.passed, rep.summary()
    assert rep.info["surjective"]


def test_materialized_matches_lazy():
    E = ccr.build(1, 2)
    M = E.materialize()
    for a, b in E.pairs():
        assert np.array_equal(M.beta(a, b), E.beta(a, b))


def test_broken_coassociativity_is_detected():
    rep = inc.check_system(_broken_system())
    assert not rep.passed
    assert rep.measured("coassociativity_defect") > 0.5


def test_truncated_ccr_is_inclusion_system():
    tr = ccr.truncate(ccr.build(1, 2), 1)
    assert tr.kind == "inclusion"
    assert inc.check_system(tr).passed
    assert not tr.dims[4] == 16
    assert inc.limit_checks(tr).passed


def test_limit_rejects_broken_system():
    with pytest.raises(NotInclusionSystem):
        inc.InductiveLimit(_broken_system())


def test_tensor_system_slices():
    E, F = ccr.build(1, 1), ccr.build(2, 1)
    T = inc.tensor_systems(E, F)
    assert T.dims[2] == (2 * 3) ** 2
    assert inc.check_system(T).passed
    x = la.random_matrix(np.random.default_rng(0), T.dims[1] ** 2, 1)[:, 0]
    assert np.allclose(T.split_push(1, 1, T.split_pull(1, 1, x)), x, atol=1e-12)


@given(st.integers(1, 3))
def test_flip_is_unitary_and_swaps(t):
    E = ccr.build(1, 2)
    U = inc.flip_unitary(E, 4, t)
    assert la.unitary_defect(U) <= 1e-12
    rng = np.random.default_rng(t)
    x, y = la.haar_vector(rng, E.dims[4 - t]), la.haar_vector(rng, E.dims[t])
    lhs = U @ E.split_pull(4 - t, t, np.kron(x, y))
    assert np.allclose(lhs, E.split_pull(t, 4 - t, np.kron(y, x)), atol=1e-12)


def test_flip_range():
    with pytest.raises(OutOfRange):
        inc.flip_unitary(ccr.build(1, 2), 4, 4)


def test_generated_subsystem_of_cell_subspace():
    E = ccr.build(2, 2)
    seed = inc.SubsystemFamily(E, {1: la.orthonormalize(np.eye(3)[:, :2])})
    G = inc.generated_subsystem(E, seed)
    assert G.dims() == {m: 2**m for m in range(1, 5)}
    assert inc.check_subsystem(G, require_product=True).passed


def test_generated_subsystem_rejects_non_subsystem():
    E = ccr.build(1, 1)
    bad = inc.SubsystemFamily(E, {1: la.orthonormalize([[1, 0]]), 2: la.orthonormalize([[0, 1, 0, 0]])})
    with pytest.raises(NotSubsystem):
        inc.generated_subsystem(E, bad)
    with pytest.raises(NotProduct):
        inc.generated_subsystem(ccr.truncate(ccr.build(1, 2), 1), bad)


@given(st.floats(0.0, 1.0))
def test_cell_morphism_intertwines(scale):
    E = ccr.build(1, 2)
    M = inc.cell_morphism(E, E, np.diag([1.0, scale]))
    rep = inc.check_morphism(M)
    assert rep.passed, rep.summary()
