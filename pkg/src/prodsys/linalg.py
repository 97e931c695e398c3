"""Dense complex linear algebra used by every other module.

Vectors are 1-d complex arrays, operators are 2-d complex arrays. Tensor
products follow ``np.kron``: the left factor is the slow index.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np

from .errors import NotPSD

TOL_IDENTITY = 1e-10
TOL_SPECTRAL = 1e-8


def as_vector(v) -> np.ndarray:
    return np.asarray(v, dtype=complex).reshape(-1)


def as_operator(a) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2:
        raise ValueError(f"operator must be 2-d, got shape {a.shape}")
    return a


def tensor(*vs) -> np.ndarray:
    """Kronecker product of vectors, left factor slowest."""
    if not vs:
        return np.ones(1, dtype=complex)
    return reduce(np.kron, (as_vector(v) for v in vs))


def tensor_op(*ops) -> np.ndarray:
    """Kronecker product of operators, ``(A⊗B)(v⊗w) = Av⊗Bw``."""
    if not ops:
        return np.ones((1, 1), dtype=complex)
    return reduce(np.kron, (as_operator(a) for a in ops))


def tensor_power(x, m: int) -> np.ndarray:
    """m-fold Kronecker power of a vector or matrix (m = 0 gives the scalar 1)."""
    x = np.asarray(x, dtype=complex)
    out = np.ones((1,) * x.ndim, dtype=complex)
    for _ in range(m):
        out = np.kron(out, x)
    return out


def opnorm(a) -> float:
    """Spectral norm; 0 for empty matrices."""
    a = np.asarray(a)
    if a.size == 0:
        return 0.0
    if a.ndim == 1:
        return float(np.linalg.norm(a))
    return float(np.linalg.norm(a, 2))


def isometry_defect(a) -> float:
    a = as_operator(a)
    return opnorm(a.conj().T @ a - np.eye(a.shape[1]))


def unitary_defect(a) -> float:
    a = as_operator(a)
    if a.shape[0] != a.shape[1]:
        return float("inf")
    return max(isometry_defect(a), opnorm(a @ a.conj().T - np.eye(a.shape[0])))


def projection_defect(p) -> float:
    p = as_operator(p)
    return max(opnorm(p @ p - p), opnorm(p - p.conj().T))


@dataclass(frozen=True)
class Subspace:
    """Orthonormal basis (as matrix columns) of a subspace of C^ambient_dim."""

    ambient_dim: int
    basis: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.basis, dtype=complex).reshape(self.ambient_dim, -1)
        object.__setattr__(self, "basis", b)

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    def projector(self) -> np.ndarray:
        return projector(self)

    def contains(self, vectors) -> float:
        """Largest residual of the given columns after projecting onto the subspace."""
        return containment_residual(vectors, self)

    @classmethod
    def zero(cls, ambient_dim: int) -> "Subspace":
        return cls(ambient_dim, np.zeros((ambient_dim, 0), dtype=complex))

    @classmethod
    def full(cls, ambient_dim: int) -> "Subspace":
        return cls(ambient_dim, np.eye(ambient_dim, dtype=complex))


def _stack(vs, ambient_dim=None) -> np.ndarray:
    if isinstance(vs, np.ndarray):
        m = vs.astype(complex)
        if m.ndim == 1:
            m = m[:, None]
        return m
    vs = [as_vector(v) for v in vs]
    if not vs:
        return np.zeros((ambient_dim or 0, 0), dtype=complex)
    return np.stack(vs, axis=1)


def orthonormalize(vs, tol: float = TOL_IDENTITY, ambient_dim: int | None = None) -> Subspace:
    """Orthonormal basis for the span of ``vs`` (list of vectors or matrix of columns).

    The rank cut-off is ``tol * max(sigma_max, 1)`` on the singular values, so
    directions whose deflated norm is at most ``tol`` are dropped.
    """
    m = _stack(vs, ambient_dim)
    n = m.shape[0] if ambient_dim is None else ambient_dim
    if m.shape[1] == 0:
        return Subspace.zero(n)
    u, s, _ = np.linalg.svd(m, full_matrices=False)
    cut = tol * max(float(s[0]) if s.size else 0.0, 1.0)
    r = int(np.sum(s > cut))
    return Subspace(n, u[:, :r])


def projector(S: Subspace) -> np.ndarray:
    b = S.basis
    return b @ b.conj().T


def complement(S: Subspace, within: Subspace | None = None, tol: float = TOL_IDENTITY) -> Subspace:
    """Orthogonal complement of S, optionally inside another subspace."""
    n = S.ambient_dim
    if within is None:
        if S.dim == 0:
            return Subspace.full(n)
        q, _ = np.linalg.qr(S.basis, mode="complete")
        return Subspace(n, q[:, S.dim:])
    w = within.basis
    # components of the ambient subspace orthogonal to S
    m = w - S.basis @ (S.basis.conj().T @ w)
    return orthonormalize(m, tol, ambient_dim=n)


def intersection(A: Subspace, B: Subspace, tol: float = 1e-8) -> Subspace:
    """Intersection of two subspaces from the principal vectors at angle zero."""
    if A.dim == 0 or B.dim == 0:
        return Subspace.zero(A.ambient_dim)
    u, s, _ = np.linalg.svd(A.basis.conj().T @ B.basis, full_matrices=False)
    keep = s > 1.0 - tol
    return orthonormalize(A.basis @ u[:, keep], ambient_dim=A.ambient_dim)


def span_sum(*spaces: Subspace, tol: float = TOL_IDENTITY) -> Subspace:
    n = spaces[0].ambient_dim
    return orthonormalize(np.concatenate([s.basis for s in spaces], axis=1), tol, ambient_dim=n)


def containment_residual(vectors, S: Subspace) -> float:
    """max_i ||(1 - P_S) v_i|| over the columns of ``vectors``."""
    v = _stack(vectors, S.ambient_dim)
    if v.shape[1] == 0:
        return 0.0
    r = v - S.basis @ (S.basis.conj().T @ v)
    return float(np.max(np.linalg.norm(r, axis=0)))


def subspace_distance(A: Subspace, B: Subspace) -> float:
    """Operator-norm distance between the two orthogonal projectors.

    For equal dimensions this is the sine of the largest principal angle,
    read off as ``||(1 - P_B) Q_A||`` so that small angles keep full
    precision and the projectors are never formed.
    """
    if A.dim != B.dim:
        return 1.0
    if A.dim == 0:
        return 0.0
    r = A.basis - B.basis @ (B.basis.conj().T @ A.basis)
    return min(opnorm(r), 1.0)


def dominance_defect(small: Subspace, big: Subspace) -> float:
    """||P_small - P_big P_small||, zero when small is contained in big."""
    return containment_residual(small.basis, big) if small.dim else 0.0


def _hermitian_eig(a, tol):
    a = as_operator(a)
    h = (a + a.conj().T) / 2
    w, v = np.linalg.eigh(h)
    scale = max(float(np.max(np.abs(w))) if w.size else 0.0, 1.0)
    if w.size and w[0] < -tol * scale:
        raise NotPSD(f"minimum eigenvalue {w[0]:.3e} below -{tol:g}")
    return np.clip(w, 0.0, None), v


def psd_sqrt(a, tol: float = TOL_IDENTITY) -> np.ndarray:
    """Hermitian square root of a positive semidefinite matrix.

    Raises
    ------
    NotPSD
        If the smallest eigenvalue is below ``-tol`` (relative to ``max(||A||, 1)``).
    """
    w, v = _hermitian_eig(a, tol)
    return (v * np.sqrt(w)) @ v.conj().T


def gram_kernel(G, tol: float = TOL_IDENTITY) -> tuple[np.ndarray, int]:
    """Factor a PSD Gram matrix as ``Q^* Q`` with Q of full row rank.

    Returns
    -------
    Q : ndarray, shape (r, n)
        Columns are the images of the generating vectors in the quotient
        space obtained by dividing out the null space of G.
    r : int
        Numerical rank at threshold ``tol * sigma_max``.
    """
    w, v = _hermitian_eig(G, tol)
    if w.size == 0:
        return np.zeros((0, 0), dtype=complex), 0
    keep = w > tol * max(float(w.max()), 0.0)
    if float(w.max()) <= 0.0:
        keep[:] = False
    q = (v[:, keep] * np.sqrt(w[keep])).conj().T
    return q, int(keep.sum())


def haar_vector(rng: np.random.Generator, n: int) -> np.ndarray:
    v = rng.normal(size=n) + 1j * rng.normal(size=n)
    return v / np.linalg.norm(v)


def random_matrix(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    return rng.normal(size=(rows, cols)) + 1j * rng.normal(size=(rows, cols))


def random_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    q, r = np.linalg.qr(random_matrix(rng, n, n))
    return q * (np.diag(r) / np.abs(np.diag(r)))


def householder_unitary(x, y) -> np.ndarray:
    """A unitary mapping the unit vector x onto the unit vector y."""
    x, y = as_vector(x), as_vector(y)
    n = x.size
    ph = np.vdot(x, y)
    ph = ph / abs(ph) if abs(ph) > 1e-15 else 1.0
    x = x * ph
    w = x - y
    if np.linalg.norm(w) < 1e-15:
        return ph * np.eye(n, dtype=complex)
    w = w / np.linalg.norm(w)
    h = np.eye(n, dtype=complex) - 2 * np.outer(w, w.conj())
    return h * ph


# JSON serialization -----------------------------------------------------

def vector_to_json(v) -> dict:
    v = as_vector(v)
    return {"dim": int(v.size), "re": v.real.tolist(), "im": v.imag.tolist()}


def vector_from_json(d: dict) -> np.ndarray:
    re = np.asarray(d["re"], dtype=float)
    im = np.asarray(d["im"], dtype=float)
    if re.size != d["dim"] or im.size != d["dim"]:
        raise ValueError("vector length does not match 'dim'")
    return re + 1j * im


def operator_to_json(a) -> dict:
    a = as_operator(a)
    return {
        "rows": int(a.shape[0]),
        "cols": int(a.shape[1]),
        "re": a.real.reshape(-1).tolist(),
        "im": a.imag.reshape(-1).tolist(),
    }


def operator_from_json(d: dict) -> np.ndarray:
    shape = (d["rows"], d["cols"])
    re = np.asarray(d["re"], dtype=float).reshape(shape)
    im = np.asarray(d["im"], dtype=float).reshape(shape)
    return re + 1j * im
