"""Transforms between the two hypercube object kinds, and the rigidity check.

The forward transform sends residues to monodromies via exp(2*pi*i * .),
keeps the downward arrows, and composes the upward arrows with
phi(theta) = (exp(2*pi*i*theta) - 1)/theta evaluated at the shallow-node
residue.  The Euler relations then turn into the pairing relations
``V C = mono - 1`` / ``C V = mono - 1`` on the nose.

The inverse takes the normalized logarithm of each monodromy in a
half-open strip [sigma, sigma + 1).  With sigma in (-1, 0] the strip
contains no nonzero integer, so phi of the recovered residues is
invertible and the upward arrows can be solved for; that restriction is
enforced.  Both functors are basis preserving, so round trips are literal
matrix equalities.
"""

from __future__ import annotations

import numpy as np

from .linalg import (
    DEFAULT_TOL,
    FundamentalDomain,
    as_cmatrix,
    expm_2pii,
    phi_matrix,
    principal_log_over_2pii,
)
from .predmod import PreDModule, require_valid as require_valid_predmod
from .verdier import VerdierObject, require_valid as require_valid_verdier


def rh(e: PreDModule, tol: float = DEFAULT_TOL) -> VerdierObject:
    """Monodromy-side object of a valid connection-side object."""
    require_valid_predmod(e, tol)
    loops = {a: {k: expm_2pii(e.theta[a][k]) for k in e.ctx.directions}
             for a in e.node_order}
    down = {key: e.t[key].copy() for key in e.arrow_order}
    up = {}
    for (a, k) in e.arrow_order:
        b = a & ~(1 << (k - 1))
        up[(a, k)] = phi_matrix(e.theta[b][k]) @ e.s[(a, k)]
    return VerdierObject(e.ctx, e.dims, loops, down, up, metadata=e.metadata)


def inverse_rh(v: VerdierObject, domain: FundamentalDomain = FundamentalDomain(),
               tol: float = DEFAULT_TOL) -> PreDModule:
    """Connection-side object with residue eigenvalues in the domain strip.

    Monodromy eigenvalues sitting exactly on the branch ray
    ``arg = 2*pi*sigma`` are on the boundary of the strip and may come out
    at either end, shifted by roundoff; everything off the ray is stable.
    """
    if not -1.0 < domain.base_real <= 0.0:
        raise ValueError(
            f"domain base must lie in (-1, 0] so that phi stays invertible, "
            f"got {domain.base_real}"
        )
    require_valid_verdier(v, tol)
    loops = {a: {k: principal_log_over_2pii(v.mono[a][k], domain)
                 for k in v.ctx.directions} for a in v.node_order}
    down = {key: v.C[key].copy() for key in v.arrow_order}
    up = {}
    for (a, k) in v.arrow_order:
        b = a & ~(1 << (k - 1))
        phi = phi_matrix(loops[b][k])
        up[(a, k)] = np.linalg.solve(phi, v.V[(a, k)]) if v.dims[b] else v.V[(a, k)].copy()
    return PreDModule(v.ctx, v.dims, loops, down, up, metadata=v.metadata)


def rh_arrow_map(s, t) -> tuple[np.ndarray, np.ndarray]:
    """The one-arrow transform ``(s, t) -> (t, phi(s t) s)``.

    ``s`` is n x m and ``t`` is m x n, so ``s t`` is the deep-side product
    of a single arrow pair and ``phi(s t) s  =  s phi(t s)``.
    """
    s = as_cmatrix(s)
    t = as_cmatrix(t)
    if s.shape != (t.shape[1], t.shape[0]):
        raise ValueError(f"incompatible shapes {s.shape} and {t.shape}")
    return t.copy(), phi_matrix(s @ t) @ s


def rh_jacobian_rank(s, t, h: float = 1e-5, sv_tol: float = 1e-5):
    """Toleranced real rank of the one-arrow transform's Jacobian.

    Central finite differences with step ``h`` over all ``2 * 2 * n * m``
    real coordinates of ``(s, t)``.  The derivative drops rank exactly
    when two eigenvalues of the union spec(s t) + spec(t s) differ by a
    nonzero integer; with good residual eigenvalues it is a bijection.

    Returns ``(rank, full_rank_expected, singular_values)``.
    """
    s = as_cmatrix(s)
    t = as_cmatrix(t)
    if h <= 0:
        raise ValueError("step h must be positive")
    if s.shape != (t.shape[1], t.shape[0]):
        raise ValueError(f"incompatible shapes {s.shape} and {t.shape}")
    n, m = s.shape
    dim = 4 * n * m
    if dim == 0:
        return 0, 0, []

    def pack(a, b):
        return np.concatenate([a.real.ravel(), a.imag.ravel(),
                               b.real.ravel(), b.imag.ravel()])

    def unpack(x):
        k = n * m
        a = (x[:k] + 1j * x[k:2 * k]).reshape(n, m)
        b = (x[2 * k:3 * k] + 1j * x[3 * k:]).reshape(m, n)
        return a, b

    def psi(x):
        a, b = unpack(x)
        out_t, out_v = rh_arrow_map(a, b)
        return pack(out_v, out_t)

    x0 = pack(s, t)
    jac = np.zeros((dim, dim))
    for i in range(dim):
        step = np.zeros(dim)
        step[i] = h
        jac[:, i] = (psi(x0 + step) - psi(x0 - step)) / (2 * h)
    sv = np.linalg.svd(jac, compute_uv=False)
    rank = int(np.count_nonzero(sv > sv_tol))
    return rank, dim, [float(x) for x in sv]
