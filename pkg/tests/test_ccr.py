import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from prodsys import ccr
from prodsys import linalg as la
from prodsys.errors import SizeLimit
from prodsys.suites import exp_gram_consistency, exp_trend, vacuum_roots_check

small = st.floats(-2, 2)
cplx = st.builds(complex, small, small)


def test_size_limit():
    with pytest.raises(SizeLimit):
        ccr.build(3, 3)
    assert ccr.build(3, 3, cap=100000).dims[8] == 4**8


def test_slice_cap_env(monkeypatch):
    monkeypatch.setenv("PRODSYS_SLICE_CAP", "10")
    with pytest.raises(SizeLimit):
        ccr.build(1, 2)


@given(arrays(complex, (4, 1), elements=cplx), arrays(complex, (4, 1), elements=cplx))
def test_exp_gram_closed_form(f, g):
    E = ccr.build(1, 2)
    direct = np.vdot(ccr.exp_vector(E, f, 4), ccr.exp_vector(E, g, 4))
    closed = ccr.exp_gram(f, g, E.delta)
    assert abs(direct - closed) <= 1e-10 * max(1.0, abs(closed))


@given(arrays(complex, (4, 2), elements=cplx))
def test_exp_vectors_factorize(f):
    E = ccr.build(2, 2)
    whole = ccr.exp_vector(E, f, 4)
    split = E.split_pull(1, 3, np.kron(ccr.exp_vector(E, f[:1], 1), ccr.exp_vector(E, f[1:], 3)))
    assert np.allclose(whole, split, atol=1e-12)


@pytest.mark.parametrize("k", [1, 2])
def test_vacuum_roots(k):
    rep = vacuum_roots_check(ccr.build(k, 2))
    assert rep.passed, rep.summary()


def test_exp_vector_consistency(rng):
    assert exp_gram_consistency(ccr.build(2, 2), rng).passed


def test_exp_error_halves_with_level():
    trend = exp_trend()
    for r in trend["ratios"]:
        assert 1.6 <= r <= 2.4


def test_shift_moves_one_particle_vectors():
    E = ccr.build(1, 2)
    S = ccr.shift(E, 1, 3)
    assert S.shape == (3, 2)
    assert la.isometry_defect(S) <= 1e-12
    assert np.array_equal(S @ np.array([1.0, 2.0]), np.array([0.0, 1.0, 2.0]))


def test_particle_sectors_partition_the_slice():
    E = ccr.build(1, 2)
    dims = [ccr.particle_sector(E, 4, n).dim for n in range(5)]
    assert dims == [1, 4, 6, 4, 1]


def test_configuration_picture_preserves_inner_products(rng):
    E = ccr.build(1, 2)
    x, y = la.haar_vector(rng, 16), la.haar_vector(rng, 16)
    fx, fy = ccr.to_configuration_function(E, x, 4), ccr.to_configuration_function(E, y, 4)
    assert abs(ccr.configuration_inner(fx, fy, E.delta) - np.vdot(x, y)) <= 1e-12
