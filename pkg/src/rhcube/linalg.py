"""Dense complex matrix kernel.

Provides toleranced rank/kernel decisions, commutation residuals, the
entire function phi(z) = (exp(2*pi*i*z) - 1)/z evaluated on matrices,
exp(2*pi*i*Theta), and a matrix logarithm normalized by 2*pi*i whose
eigenvalues are placed in a chosen half-open horizontal strip.

Matrix functions are dispatched over the connected components of the
exact sparsity pattern, so block-diagonal inputs are handled block by
block.  Besides being cheaper, this makes all transforms in this package
commute with direct sums exactly, not merely up to roundoff.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

TWO_PI_I = 2j * math.pi

DEFAULT_TOL = 1e-8       # structural residuals
DEFAULT_RANK_TOL = 1e-6  # rank decisions


class SingularMatrixError(ValueError):
    """Raised when an operation requires an invertible matrix."""


class LogBranchError(ArithmeticError):
    """Raised when branch separation of the matrix logarithm is ill conditioned."""

    def __init__(self, message: str, condition_estimate: float):
        super().__init__(f"{message} (condition estimate {condition_estimate:.3e})")
        self.condition_estimate = condition_estimate


def as_cmatrix(m, rows: int | None = None, cols: int | None = None) -> np.ndarray:
    """Coerce to a 2-D complex128 array, optionally enforcing a shape."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2:
        raise ValueError(f"expected a matrix, got array of ndim {a.ndim}")
    if rows is not None and a.shape[0] != rows:
        raise ValueError(f"expected {rows} rows, got {a.shape[0]}")
    if cols is not None and a.shape[1] != cols:
        raise ValueError(f"expected {cols} columns, got {a.shape[1]}")
    if a.size and not np.all(np.isfinite(a)):
        raise ValueError("matrix entries must be finite")
    return a


def spec_norm(m) -> float:
    """Spectral norm; zero-sized matrices have norm 0."""
    a = np.asarray(m)
    if a.size == 0:
        return 0.0
    return float(np.linalg.norm(a, 2))


def rel_residual(lhs, rhs) -> float:
    """``|L - R| / max(1, |L|, |R|)`` in the spectral norm."""
    l = np.asarray(lhs, dtype=complex)
    r = np.asarray(rhs, dtype=complex)
    if l.shape != r.shape:
        raise ValueError(f"shape mismatch {l.shape} vs {r.shape}")
    return spec_norm(l - r) / max(1.0, spec_norm(l), spec_norm(r))


def rank_tol(m, tol: float = DEFAULT_RANK_TOL) -> int:
    """Rank counted as singular values >= tol * sigma_max."""
    a = as_cmatrix(m)
    if tol <= 0:
        raise ValueError("tol must be positive")
    if a.size == 0:
        return 0
    s = np.linalg.svd(a, compute_uv=False)
    if s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s >= tol * s[0]))


def kernel_basis(m, tol: float = DEFAULT_RANK_TOL, scale_floor: float = 0.0) -> np.ndarray:
    """Orthonormal basis of the right kernel, as columns of an n x k array.

    Singular values below ``tol * max(scale_floor, sigma_max)`` count as
    zero.  A positive ``scale_floor`` anchors the decision for systems
    whose entries may be entirely noise relative to an external scale.
    """
    a = as_cmatrix(m)
    n = a.shape[1]
    if n == 0:
        return np.zeros((0, 0), dtype=complex)
    if a.shape[0] == 0 or spec_norm(a) == 0.0:
        return np.eye(n, dtype=complex)
    _, s, vh = np.linalg.svd(a)
    rank = int(np.count_nonzero(s >= tol * max(scale_floor, s[0])))
    return vh[rank:].conj().T


def orth_basis(vectors, tol: float = DEFAULT_RANK_TOL) -> np.ndarray:
    """Orthonormal basis (columns) of the span of the given column vectors."""
    a = as_cmatrix(vectors)
    if a.size == 0:
        return np.zeros((a.shape[0], 0), dtype=complex)
    u, s, _ = np.linalg.svd(a, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        return np.zeros((a.shape[0], 0), dtype=complex)
    rank = int(np.count_nonzero(s >= tol * s[0]))
    return u[:, :rank]


def orth_complement(basis, n: int, tol: float = DEFAULT_RANK_TOL) -> np.ndarray:
    """Orthonormal basis of the orthogonal complement of ``span(basis)`` in C^n."""
    b = as_cmatrix(basis)
    if b.shape[0] != n:
        raise ValueError(f"basis lives in C^{b.shape[0]}, expected C^{n}")
    if b.shape[1] == 0:
        return np.eye(n, dtype=complex)
    return kernel_basis(b.conj().T, tol)


def commute_residual(a, b) -> float:
    """``|AB - BA| / max(1, |A| |B|)``; symmetric in its arguments."""
    a = as_cmatrix(a)
    b = as_cmatrix(b)
    if a.shape[0] != a.shape[1] or a.shape != b.shape:
        raise ValueError("commute_residual expects two square matrices of equal size")
    return spec_norm(a @ b - b @ a) / max(1.0, spec_norm(a) * spec_norm(b))


# ---------------------------------------------------------------------------
# connected-component dispatch for matrix functions


def _components(a: np.ndarray) -> list[list[int]]:
    """Connected components of the exact nonzero pattern of a square matrix."""
    n = a.shape[0]
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    def union(i, j):
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[ri] = rj

    rows, cols = np.nonzero(a)
    for i, j in zip(rows.tolist(), cols.tolist()):
        union(i, j)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return sorted(groups.values(), key=lambda g: g[0])


def _blockwise(f, a: np.ndarray) -> np.ndarray:
    """Apply a matrix function per connected component of the pattern."""
    n = a.shape[0]
    out = np.zeros((n, n), dtype=complex)
    for idx in _components(a):
        ix = np.ix_(idx, idx)
        out[ix] = f(a[ix])
    return out


def expm_2pii(theta) -> np.ndarray:
    """``exp(2*pi*i*Theta)`` for a square complex matrix."""
    a = as_cmatrix(theta)
    if a.shape[0] != a.shape[1]:
        raise ValueError("expm_2pii expects a square matrix")
    if a.shape[0] == 0:
        return a.copy()
    return _blockwise(lambda b: sla.expm(TWO_PI_I * b), a)


def _phi_block(a: np.ndarray) -> np.ndarray:
    # exp of [[B, I], [0, 0]] is [[e^B, phi1(B)], [0, I]] with
    # phi1(z) = (e^z - 1)/z, and phi(z) = 2*pi*i * phi1(2*pi*i*z).
    n = a.shape[0]
    aug = np.zeros((2 * n, 2 * n), dtype=complex)
    aug[:n, :n] = TWO_PI_I * a
    aug[:n, n:] = np.eye(n)
    e = sla.expm(aug)
    return TWO_PI_I * e[:n, n:]


def phi_matrix(theta) -> np.ndarray:
    """The entire function ``phi(z) = (exp(2*pi*i*z) - 1)/z`` on a matrix.

    ``phi(0) = 2*pi*i`` (removable singularity); the zeros of ``phi`` are
    exactly the nonzero integers.  Satisfies
    ``phi(T) @ T == T @ phi(T) == expm_2pii(T) - I``.
    """
    a = as_cmatrix(theta)
    if a.shape[0] != a.shape[1]:
        raise ValueError("phi_matrix expects a square matrix")
    if a.shape[0] == 0:
        return a.copy()
    return _blockwise(_phi_block, a)


# ---------------------------------------------------------------------------
# logarithm normalized by 2*pi*i, with eigenvalues in a chosen strip


@dataclass(frozen=True)
class FundamentalDomain:
    """Half-open strip ``sigma <= Re(z) < sigma + 1`` selecting a log branch.

    Dividing any branch of ``log(m)`` by ``2*pi*i`` shifts the real part of
    the result by integers as the branch changes, so the strip contains
    exactly one normalized logarithm of every nonzero complex number.
    """

    base_real: float = 0.0

    def contains(self, z: complex, tol: float = 0.0) -> bool:
        return self.base_real - tol <= z.real < self.base_real + 1 + tol

    @property
    def distinguished_integer(self) -> int:
        """The unique integer in the strip."""
        return math.ceil(self.base_real)


def _branch_shift(m: complex, sigma: float) -> int:
    """Integer n with sigma <= Re(log(m)/(2*pi*i)) + n < sigma + 1."""
    lam0 = (cmath.log(m) / TWO_PI_I).real
    return math.ceil(sigma - lam0)


def _log_strip_triangular(t: np.ndarray, sigma: float, tol: float) -> np.ndarray:
    """log(T)/(2*pi*i) with eigenvalues in the strip, T upper triangular."""
    n = t.shape[0]
    shifts = np.array([_branch_shift(t[i, i], sigma) for i in range(n)], dtype=int)
    distinct = sorted(set(shifts.tolist()))
    if len(distinct) == 1:
        f = sla.logm(t) / TWO_PI_I + distinct[0] * np.eye(n)
        return np.asarray(f, dtype=complex)
    # Split off the lowest shift group and recurse on the rest; the blocks
    # have disjoint spectra unless eigenvalues straddle the branch cut.
    n0 = distinct[0]
    t2, q2, sdim = sla.schur(
        t, output="complex", sort=lambda z: _branch_shift(z, sigma) == n0
    )
    t11, t12, t22 = t2[:sdim, :sdim], t2[:sdim, sdim:], t2[sdim:, sdim:]
    sep = min(
        abs(t11[i, i] - t22[j, j])
        for i in range(sdim)
        for j in range(t22.shape[0])
    )
    if sep < 100 * max(tol, 1e-14) * max(1.0, spec_norm(t)):
        raise LogBranchError(
            "eigenvalues requiring different log branches are nearly equal",
            1.0 / max(sep, 1e-300),
        )
    f11 = _log_strip_triangular(t11, sigma, tol)
    f22 = _log_strip_triangular(t22, sigma, tol)
    f12 = sla.solve_sylvester(t11, -t22, f11 @ t12 - t12 @ f22)
    f = np.zeros_like(t2)
    f[:sdim, :sdim] = f11
    f[:sdim, sdim:] = f12
    f[sdim:, sdim:] = f22
    return q2 @ f @ q2.conj().T


def principal_log_over_2pii(
    m,
    domain: FundamentalDomain = FundamentalDomain(),
    tol: float = 1e-12,
) -> np.ndarray:
    """Theta with ``expm_2pii(Theta) = M`` and all eigenvalues in the domain strip.

    Raises :class:`SingularMatrixError` if ``M`` is (numerically) singular and
    :class:`LogBranchError` when two nearly equal eigenvalues need different
    branch shifts, which makes the similarity ill conditioned.
    """
    a = as_cmatrix(m)
    n = a.shape[0]
    if n != a.shape[1]:
        raise ValueError("principal_log_over_2pii expects a square matrix")
    if n == 0:
        return a.copy()
    s = np.linalg.svd(a, compute_uv=False)
    if s[-1] <= tol * max(1.0, s[0]):
        raise SingularMatrixError(
            f"matrix is singular within tolerance (sigma_min = {s[-1]:.3e})"
        )
    if n == 1:
        lam = cmath.log(a[0, 0]) / TWO_PI_I + _branch_shift(a[0, 0], domain.base_real)
        return np.array([[lam]], dtype=complex)

    def block_log(b: np.ndarray) -> np.ndarray:
        if b.shape[0] == 1:
            lam = cmath.log(b[0, 0]) / TWO_PI_I
            return np.array([[lam + _branch_shift(b[0, 0], domain.base_real)]])
        t, q = sla.schur(b, output="complex")
        f = _log_strip_triangular(t, domain.base_real, tol)
        return q @ f @ q.conj().T

    return _blockwise(block_log, a)


# ---------------------------------------------------------------------------
# intertwiner spaces


def solve_intertwiners(pairs, tol: float = DEFAULT_RANK_TOL) -> list[np.ndarray]:
    """Orthonormal basis of ``{X : X P_i = Q_i X for all i}``.

    Each pair is ``(P_i, Q_i)`` with ``P_i`` of size a x a and ``Q_i`` of
    size b x b; the unknown ``X`` is b x a.  The stacked linear system is
    solved by an SVD kernel with the usual rank tolerance.
    """
    if not pairs:
        raise ValueError("need at least one pair")
    mats = [(as_cmatrix(p), as_cmatrix(q)) for p, q in pairs]
    a = mats[0][0].shape[0]
    b = mats[0][1].shape[0]
    rows = []
    for p, q in mats:
        if p.shape != (a, a) or q.shape != (b, b):
            raise ValueError("inconsistent shapes across pairs")
        # row-major vec: vec(X P) = (I_b kron P^T) vec(X), vec(Q X) = (Q kron I_a) vec(X)
        rows.append(np.kron(np.eye(b), p.T) - np.kron(q, np.eye(a)))
    if b * a == 0:
        return []
    system = np.vstack(rows)
    basis = kernel_basis(system, tol)
    return [basis[:, j].reshape(b, a) for j in range(basis.shape[1])]
