import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from prodsys import ccr
from prodsys import cluster as cl
from prodsys import inclusion as inc
from prodsys import linalg as la
from prodsys import units
from prodsys.errors import ConfigError, LevelOrder, NotProductSubsystem, SizeLimit, StateNotFaithful

seeds = st.integers(0, 2**32 - 1)


@pytest.fixture(scope="module")
def vac3():
    E = ccr.build(1, 3)
    u = ccr.vacuum(E)
    return E, u, cl.unit_line(E, u)


def test_f_prime_dimensions_at_level_two():
    E = ccr.build(1, 2)
    F = cl.unit_line(E, ccr.vacuum(E))
    assert cl.f_prime(E, F, 1).dim == 2
    assert cl.f_prime(E, F, 2).dim == 3
    assert cl.f_prime(E, F, 4).dim == 5
    assert [cl.f_tilde(E, F, m).dim for m in (1, 2, 4)] == [0, 1, 11]


def test_f_prime_is_the_span_of_one_insertion(vac3):
    E, u, F = vac3
    rep = cl.f_prime_checks(E, F, 4)
    assert rep.passed, rep.summary()
    for m in range(1, 5):
        assert la.subspace_distance(cl.f_prime(E, F, m), cl.first_order_span(E, u, m)) <= 1e-10


@pytest.mark.parametrize("k,coarse", [(1, 1), (1, 2), (2, 1)])
def test_vacuum_cluster(k, coarse):
    E = ccr.build(k, 3, cap=8192)
    u = ccr.vacuum(E)
    res = cl.cluster(E, cl.unit_line(E, u), coarse)
    rep = cl.cluster_checks(res, u)
    assert rep.passed, rep.summary()
    assert res.step == 1 << (3 - coarse)


def test_cluster_of_diagonal_unit_in_a_bigger_cell():
    aux = inc.TensorPowerSystem(2, 2)
    T = inc.tensor_systems(ccr.build(1, 2), aux)
    u = units.unit_from_cell(T, np.kron([1.0, 0.0], [1.0, 0.0]))
    res = cl.cluster(T, cl.unit_line(T, u), 1)
    dims = res.f_check.dims()
    assert 1 < dims[1] < res.coarse.dims[1]
    assert cl.cluster_checks(res, u).passed


def test_coarse_level_must_be_coarser():
    E = ccr.build(1, 2)
    with pytest.raises(LevelOrder):
        cl.coarse_system(E, 2)


def test_two_subsystem_cluster_of_equal_subsystems():
    E = ccr.build(1, 2)
    F = cl.unit_line(E, ccr.vacuum(E))
    for m in range(1, 5):
        assert la.subspace_distance(cl.two_subsystem_cluster(E, F, F, m), cl.f_prime(E, F, m)) <= 1e-10


def test_interval_projections_commute_and_factor(vac3):
    E, _, F = vac3
    rep = cl.interval_projection_checks(E, F, 2)
    assert rep.passed, rep.summary()


@given(arrays(float, 8, elements=st.floats(-5, 5)))
def test_moebius_inverts_subset_sums(g):
    f = np.array([sum(g[b] for b in range(8) if b & a == b) for a in range(8)])
    assert np.allclose(cl.subset_moebius(f), g, atol=1e-9)


def test_fair_coin_for_tracial_vacuum(vac3):
    E, _, F = vac3
    dist = cl.random_set_distribution(E, F, cl.FaithfulState.tracial(E.dims[8]))
    assert cl.fair_coin_error(dist) <= 1e-12


@given(seeds)
def test_diagonal_states_give_distributions(seed):
    E = ccr.build(1, 2)
    F = cl.unit_line(E, ccr.vacuum(E))
    eta = cl.FaithfulState.diagonal(E.dims[4], seed)
    dist = cl.random_set_distribution(E, F, eta)
    assert cl.distribution_checks(dist).passed
    for a, b in [(0, 1), (0, 2), (1, 3), (0, 4)]:
        assert cl.at_most_one_check(E, F, eta, a, b, dist=dist).passed


@given(seeds)
def test_diagonal_shortcut_matches_projector_expectation(seed):
    E = ccr.build(1, 2)
    F = cl.unit_line(E, ccr.vacuum(E))
    eta = cl.FaithfulState.diagonal(E.dims[4], seed)
    for mask in range(16):
        direct = eta(cl.avoidance_projection(E, F, mask))
        assert abs(cl.expect_avoidance(E, F, eta, mask) - direct) <= 1e-12


@given(seeds)
def test_dense_faithful_state(seed):
    E = ccr.build(1, 2)
    F = cl.unit_line(E, ccr.vacuum(E))
    X = la.random_matrix(np.random.default_rng(seed), 16, 16)
    rho = X @ X.conj().T + 0.1 * np.eye(16)
    eta = cl.FaithfulState(rho / np.trace(rho))
    assert not eta.is_diagonal
    dist = cl.random_set_distribution(E, F, eta)
    assert cl.distribution_checks(dist).passed
    assert cl.at_most_one_check(E, F, eta, 0, 4, dist=dist).passed


def test_null_sets_do_not_depend_on_the_state(vac3):
    E, _, F = vac3
    rep = cl.null_pattern_check(E, F, cl.FaithfulState.tracial(E.dims[8]), cl.FaithfulState.diagonal(E.dims[8], 3))
    assert rep.passed


@pytest.mark.parametrize("state", ["tracial", "diag(5)"])
def test_cluster_pushforward(vac3, state):
    E, _, F = vac3
    rep = cl.cluster_pushforward_check(E, F, cl.FaithfulState.parse(state, E.dims[8]), 1)
    assert rep.passed, rep.summary()


def test_cluster_map_needs_two_points():
    l_grid = cl.cluster_map(2, 2)
    assert l_grid(0b0001) == 0
    assert l_grid(0b0011) == 0b01
    assert l_grid(0b1101) == 0b10
    assert l_grid(0b1111) == 0b11


def test_random_set_input_errors():
    E = ccr.build(1, 2)
    F = cl.unit_line(E, ccr.vacuum(E))
    with pytest.raises(StateNotFaithful):
        cl.random_set_distribution(E, F, cl.FaithfulState.tracial(3))
    broken = inc.SubsystemFamily(E, dict(F.spaces))
    broken.spaces[2] = la.orthonormalize([[0, 1, 0, 0]])
    with pytest.raises(NotProductSubsystem):
        cl.random_set_distribution(E, broken, cl.FaithfulState.tracial(16))
    big = ccr.build(1, 4, cap=10**6)
    with pytest.raises(SizeLimit):
        cl.random_set_distribution(big, F, cl.FaithfulState.tracial(2))
    with pytest.raises(ConfigError):
        cl.FaithfulState.parse("pure", 4)


def test_distribution_json_round_trip(vac3):
    E, _, F = vac3
    dist = cl.random_set_distribution(E, F, cl.FaithfulState.diagonal(E.dims[8], 1))
    again = cl.RandomSetDistribution.from_json(dist.to_json())
    assert again.probs.tobytes() == dist.probs.tobytes()
    with pytest.raises(ValueError):
        cl.RandomSetDistribution.from_json({"cells": 3, "probs": [1.0]})


@pytest.mark.parametrize("k", [1, 2])
def test_x_spaces(k):
    E = ccr.build(k, 3, cap=8192)
    rep = cl.x_space_checks(E, ccr.vacuum(E), 1)
    assert rep.passed, rep.summary()


def test_second_derivative_space_fills_the_slice():
    # F′ of the F′ family has no split constraint at one cell, so the
    # all-occupied configuration enters F′′ but not F′
    E = ccr.build(1, 2)
    F = cl.unit_line(E, ccr.vacuum(E))
    fp = cl.f_prime_family(E, F, 2)
    fpp = cl.f_prime(E, fp, 2)
    occupied = np.kron([0.0, 1.0], [0.0, 1.0])
    assert fpp.dim == E.dims[2]
    assert la.containment_residual(occupied[:, None], fp[2]) > 0.99
