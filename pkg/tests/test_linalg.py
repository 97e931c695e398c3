import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from prodsys import linalg as la
from prodsys.errors import NotPSD

seeds = st.integers(0, 2**32 - 1)


def _rand(seed, rows, cols):
    return la.random_matrix(np.random.default_rng(seed), rows, cols)


@given(seeds, st.integers(1, 7), st.integers(0, 9))
def test_orthonormalize_spans_input(seed, n, k):
    V = _rand(seed, n, k)
    S = la.orthonormalize(V, ambient_dim=n)
    assert S.dim == min(n, k)
    assert la.isometry_defect(S.basis) <= 1e-12 if S.dim else True
    assert S.contains(V) <= 1e-10 * max(1.0, la.opnorm(V))


def test_orthonormalize_drops_dependent_columns():
    v = np.array([1.0, 2.0, 0.0])
    S = la.orthonormalize([v, 3 * v, np.zeros(3)])
    assert S.dim == 1


@given(seeds, st.integers(1, 6), st.integers(0, 6))
def test_complement_is_orthogonal_and_completes(seed, n, k):
    S = la.orthonormalize(_rand(seed, n, k), ambient_dim=n)
    C = la.complement(S)
    assert S.dim + C.dim == n
    assert la.opnorm(S.basis.conj().T @ C.basis) <= 1e-12
    assert la.projection_defect(S.projector() + C.projector()) <= 1e-12


@given(seeds, st.integers(2, 6))
def test_intersection_of_overlapping_spans(seed, n):
    rng = np.random.default_rng(seed)
    common = la.random_matrix(rng, n, 1)
    A = la.orthonormalize(np.concatenate([common, la.random_matrix(rng, n, 1)], axis=1))
    B = la.orthonormalize(np.concatenate([common, la.random_matrix(rng, n, 1)], axis=1))
    I = la.intersection(A, B)
    expected = 1 if n > 2 else 2
    assert I.dim == expected
    assert I.contains(common) <= 1e-8


@given(seeds, st.integers(1, 6), st.integers(1, 6))
def test_subspace_distance_is_symmetric_and_zero_on_self(seed, n, k):
    k = min(k, n)
    A = la.orthonormalize(_rand(seed, n, k), ambient_dim=n)
    B = la.orthonormalize(_rand(seed + 1, n, k), ambient_dim=n)
    assert la.subspace_distance(A, A) <= 1e-12
    assert abs(la.subspace_distance(A, B) - la.subspace_distance(B, A)) <= 1e-10
    d_proj = la.opnorm(A.projector() - B.projector())
    assert abs(la.subspace_distance(A, B) - d_proj) <= 1e-10


def test_subspace_distance_keeps_small_angles():
    e = np.eye(3, dtype=complex)
    A = la.orthonormalize([e[0]])
    B = la.orthonormalize([e[0] + 1e-9 * e[1]])
    assert abs(la.subspace_distance(A, B) - 1e-9) < 1e-15


@given(seeds, st.integers(1, 6))
def test_psd_sqrt_squares_back(seed, n):
    X = _rand(seed, n, n)
    A = X @ X.conj().T
    R = la.psd_sqrt(A)
    assert la.opnorm(R @ R - A) <= 1e-10 * max(1.0, la.opnorm(A))
    assert la.opnorm(R - R.conj().T) <= 1e-12 * max(1.0, la.opnorm(A))


def test_psd_sqrt_rejects_negative():
    with pytest.raises(NotPSD):
        la.psd_sqrt(np.diag([1.0, -0.5]))


@given(seeds, st.integers(1, 6), st.integers(1, 6))
def test_gram_kernel_factorizes(seed, n, r):
    X = _rand(seed, min(n, r), n)
    G = X.conj().T @ X
    Q, rank = la.gram_kernel(G)
    assert rank == min(n, r)
    assert la.opnorm(Q.conj().T @ Q - G) <= 1e-10 * max(1.0, la.opnorm(G))


@given(seeds, st.integers(1, 6))
def test_householder_maps_x_to_y(seed, n):
    rng = np.random.default_rng(seed)
    x, y = la.haar_vector(rng, n), la.haar_vector(rng, n)
    H = la.householder_unitary(x, y)
    assert la.unitary_defect(H) <= 1e-12
    assert np.linalg.norm(H @ x - y) <= 1e-12


@given(seeds)
def test_tensor_is_associative_and_mixed_product(seed):
    rng = np.random.default_rng(seed)
    a, b, c = (la.random_matrix(rng, 2, 1)[:, 0] for _ in range(3))
    A, B = la.random_matrix(rng, 2, 2), la.random_matrix(rng, 2, 2)
    assert np.allclose(la.tensor(la.tensor(a, b), c), la.tensor(a, la.tensor(b, c)), atol=1e-13)
    assert np.allclose(la.tensor_op(A, B) @ la.tensor(a, b), la.tensor(A @ a, B @ b), atol=1e-12)
    assert la.tensor_power(a, 0).shape == (1,)
    assert np.allclose(la.tensor_power(a, 3), la.tensor(a, a, a))


@given(seeds, st.integers(1, 5), st.integers(1, 5))
def test_json_round_trip_is_bitwise(seed, r, c):
    A = _rand(seed, r, c)
    assert la.operator_from_json(la.operator_to_json(A)).tobytes() == A.astype(complex).tobytes()
    v = A[:, 0]
    assert la.vector_from_json(la.vector_to_json(v)).tobytes() == v.tobytes()


def test_defect_measures():
    assert la.isometry_defect(np.eye(3)[:, :2]) == 0.0
    assert la.unitary_defect(np.eye(3)[:, :2]) == float("inf")
    assert la.projection_defect(np.diag([1.0, 0.0])) == 0.0
    assert la.projection_defect(np.diag([0.5, 0.0])) > 0.2
