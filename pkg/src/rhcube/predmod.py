"""Logarithmic-connection hypercube data and its axioms.

A :class:`PreDModule` carries, at every subset node ``A``, commuting
residue operators ``theta[A][k]`` (one per divisor direction) and, for
every ``k in A``, an arrow pair ``t`` (into the deeper node) and ``s``
(back) subject to the Euler relations ``s t = theta`` on the shallow node
and ``t s = theta`` on the deep one, linearity of the arrows over all
residues, and three square-commutation diagrams for distinct directions.

Good residual eigenvalues means: within each codimension level, no two
pooled eigenvalues of the shallow-node residues differ by a nonzero
integer.  The eigenvalues on the deep node of an arrow are deliberately
not pooled.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import (
    DEFAULT_TOL,
    FundamentalDomain,
    as_cmatrix,
    commute_residual,
    principal_log_over_2pii,
    rel_residual,
)
from .objects import (
    Filtration,
    HypercubeObject,
    InvalidObjectError,
    ValidationReport,
)
from .strata import PolydiskContext, mask_of, node_masks, subset_of

STYLE_T_THETA = "t=theta"  # t carries the residue, s is the identity
STYLE_S_THETA = "s=theta"  # s carries the residue, t is the identity


class PreDModule(HypercubeObject):
    kind = "pre-d-module"

    @property
    def theta(self):
        return self.loops

    @property
    def t(self):
        return self.down

    @property
    def s(self):
        return self.up


def validate(e: PreDModule, tol: float = DEFAULT_TOL) -> ValidationReport:
    """Check every axiom; an empty report means the object is valid."""
    report = ValidationReport()
    ctx = e.ctx
    for a in e.node_order:
        th = e.theta[a]
        for j in ctx.directions:
            for k in ctx.directions:
                if j < k:
                    report.add("integrability", a, (j, k),
                               rel_residual(th[j] @ th[k], th[k] @ th[j]), tol)
    for (a, k) in e.arrow_order:
        b = a & ~(1 << (k - 1))
        t = e.t[(a, k)]
        s = e.s[(a, k)]
        report.add("euler-shallow", a, (k,),
                   rel_residual(s @ t, e.theta[b][k]), tol)
        report.add("euler-deep", a, (k,),
                   rel_residual(t @ s, e.theta[a][k]), tol)
        for j in ctx.directions:
            report.add("linearity-t", a, (k, j),
                       rel_residual(t @ e.theta[b][j], e.theta[a][j] @ t), tol)
            report.add("linearity-s", a, (k, j),
                       rel_residual(s @ e.theta[a][j], e.theta[b][j] @ s), tol)
    for a in e.node_order:
        members = [k for k in ctx.directions if a & (1 << (k - 1))]
        for k in members:
            for l in members:
                if k == l:
                    continue
                ak = a & ~(1 << (k - 1))
                al = a & ~(1 << (l - 1))
                if k < l:
                    report.add("diagram-I", a, (k, l),
                               rel_residual(e.t[(a, k)] @ e.t[(ak, l)],
                                            e.t[(a, l)] @ e.t[(al, k)]), tol)
                    report.add("diagram-II", a, (k, l),
                               rel_residual(e.s[(al, k)] @ e.s[(a, l)],
                                            e.s[(ak, l)] @ e.s[(a, k)]), tol)
                report.add("diagram-III", a, (k, l),
                           rel_residual(e.t[(al, k)] @ e.s[(ak, l)],
                                        e.s[(a, l)] @ e.t[(a, k)]), tol)
    return report


def require_valid(e: PreDModule, tol: float = DEFAULT_TOL) -> None:
    report = validate(e, tol)
    if not report.ok:
        raise InvalidObjectError(report)


# ---------------------------------------------------------------------------
# residual eigenvalues


@dataclass(frozen=True)
class BadEigenvaluePair:
    level: int
    arrow_a: tuple[tuple[int, ...], int]
    arrow_b: tuple[tuple[int, ...], int]
    eig_a: complex
    eig_b: complex
    integer: int


@dataclass(frozen=True)
class GoodEigResult:
    good: bool
    witness: BadEigenvaluePair | None = None


def good_residual_eigenvalues(e: PreDModule, tol: float = DEFAULT_TOL,
                              check_valid: bool = True) -> GoodEigResult:
    """Scan the per-level residue eigenvalue pools for nonzero-integer gaps."""
    if check_valid:
        require_valid(e, tol)
    for level in range(1, e.ctx.r + 1):
        pool: list[tuple[tuple[tuple[int, ...], int], complex]] = []
        for (a, k) in e.arrow_order:
            if bin(a).count("1") != level:
                continue
            b = a & ~(1 << (k - 1))
            eigs = sorted(np.linalg.eigvals(e.theta[b][k]),
                          key=lambda z: (z.real, z.imag))
            label = (subset_of(a), k)
            pool.extend((label, complex(z)) for z in eigs)
        for i in range(len(pool)):
            for j in range(i + 1, len(pool)):
                diff = pool[i][1] - pool[j][1]
                nearest = round(diff.real)
                if nearest != 0 and abs(diff - nearest) <= tol:
                    return GoodEigResult(False, BadEigenvaluePair(
                        level, pool[i][0], pool[j][0],
                        pool[i][1], pool[j][1], int(nearest)))
    return GoodEigResult(True)


# ---------------------------------------------------------------------------
# constructors


def point_object(ctx: PolydiskContext, subset) -> PreDModule:
    """One-dimensional object supported on a single node; all residues vanish."""
    a = mask_of(subset)
    return PreDModule(ctx, {a: 1}, {}, {}, {})


def delta(ctx: PolydiskContext) -> PreDModule:
    """The point object at the deepest stratum."""
    return point_object(ctx, ctx.directions)


def simple_interval(ctx: PolydiskContext, lower, upper, alphas,
                    style: str = STYLE_T_THETA) -> PreDModule:
    """One-dimensional object supported on the lattice interval [lower, upper].

    ``alphas`` maps each direction in ``upper - lower`` to the residue
    scalar carried by the arrows in that direction.  The object is simple
    exactly when every such scalar is nonzero.
    """
    lo = mask_of(lower)
    hi = mask_of(upper)
    if lo & ~hi:
        raise ValueError("lower must be contained in upper")
    alphas = {int(k): complex(v) for k, v in dict(alphas).items()}
    free = subset_of(hi & ~lo)
    if set(alphas) != set(free):
        raise ValueError(f"alphas must be given exactly for directions {free}")
    dims = {}
    loops = {}
    down = {}
    up = {}
    for a in node_masks(ctx):
        in_support = (a & lo) == lo and (a & ~hi) == 0
        if not in_support:
            continue
        dims[a] = 1
        loops[a] = {k: [[alphas[k]]] if k in alphas else [[0.0]]
                    for k in ctx.directions}
        for k in ctx.directions:
            bit = 1 << (k - 1)
            if a & bit and k in alphas:  # shallow node also in support
                if style == STYLE_T_THETA:
                    down[(a, k)] = [[alphas[k]]]
                    up[(a, k)] = [[1.0]]
                elif style == STYLE_S_THETA:
                    down[(a, k)] = [[1.0]]
                    up[(a, k)] = [[alphas[k]]]
                else:
                    raise ValueError(f"unknown style {style!r}")
    return PreDModule(ctx, dims, loops, down, up)


def constant(ctx: PolydiskContext, alphas, style: str = STYLE_T_THETA) -> PreDModule:
    """Full-support one-dimensional object with residue scalars ``alphas``.

    ``alphas`` may be a single scalar (used for every direction) or a
    mapping direction -> scalar.
    """
    if isinstance(alphas, (int, float, complex)):
        alphas = {k: complex(alphas) for k in ctx.directions}
    return simple_interval(ctx, (), ctx.directions, alphas, style)


def from_commuting_residues(ctx: PolydiskContext, residues,
                            style: str = STYLE_T_THETA,
                            tol: float = DEFAULT_TOL) -> PreDModule:
    """Constant hypercube with the given commuting residue operators.

    Every node carries C^n, ``theta[A][k]`` is the k-th residue
    everywhere, and the arrows are (residue, identity) or (identity,
    residue) depending on the style.
    """
    mats = [as_cmatrix(m) for m in residues]
    if len(mats) != ctx.r:
        raise ValueError(f"need exactly r = {ctx.r} residue matrices")
    n = mats[0].shape[0] if mats else 0
    for m in mats:
        if m.shape != (n, n):
            raise ValueError("residues must be square and of equal size")
    for i in range(len(mats)):
        for j in range(i + 1, len(mats)):
            resid = commute_residual(mats[i], mats[j])
            if resid > tol:
                raise ValueError(
                    f"residues {i + 1} and {j + 1} do not commute (residual {resid:.3e})"
                )
    theta = {k: mats[k - 1] for k in ctx.directions}
    eye = np.eye(n)
    dims = {}
    loops = {}
    down = {}
    up = {}
    for a in node_masks(ctx):
        dims[a] = n
        loops[a] = dict(theta)
        for k in ctx.directions:
            if a & (1 << (k - 1)):
                if style == STYLE_T_THETA:
                    down[(a, k)] = theta[k]
                    up[(a, k)] = eye
                elif style == STYLE_S_THETA:
                    down[(a, k)] = eye
                    up[(a, k)] = theta[k]
                else:
                    raise ValueError(f"unknown style {style!r}")
    return PreDModule(ctx, dims, loops, down, up)


def from_local_system(monodromies, domain: FundamentalDomain = FundamentalDomain(),
                      style: str = STYLE_T_THETA, tol: float = DEFAULT_TOL,
                      ctx: PolydiskContext | None = None) -> PreDModule:
    """Canonical-extension construction from commuting invertible monodromies.

    Takes the normalized logarithm of each monodromy in the given
    fundamental domain as the residue in that direction and builds the
    constant hypercube on them.  Because all residue eigenvalues land in
    one half-open strip, the result always has good residual eigenvalues.
    """
    mats = [as_cmatrix(m) for m in monodromies]
    r = len(mats)
    if ctx is None:
        ctx = PolydiskContext(max(r, 1) if r else 0, r)
    elif ctx.r != r:
        raise ValueError(f"context has r = {ctx.r} but {r} monodromies were given")
    for i in range(r):
        for j in range(i + 1, r):
            resid = commute_residual(mats[i], mats[j])
            if resid > tol:
                raise ValueError(
                    f"monodromies {i + 1} and {j + 1} do not commute "
                    f"(residual {resid:.3e})"
                )
    residues = [principal_log_over_2pii(m, domain) for m in mats]
    return from_commuting_residues(ctx, residues, style)


def esnault(good: bool = False) -> PreDModule:
    """Rank-2 residue data on the two-dimensional polydisk.

    The bad variant carries residues diag(1, 0) and diag(0, 1), whose
    level-1 eigenvalue pool contains the pair (1, 0); halving the residues
    makes the pool integer-gap free.
    """
    ctx = PolydiskContext(2, 2)
    if good:
        r1, r2 = np.diag([0.5, 0.0]), np.diag([0.0, 0.5])
    else:
        r1, r2 = np.diag([1.0, 0.0]), np.diag([0.0, 1.0])
    return from_commuting_residues(ctx, [r1, r2])


def extension(ctx: PolydiskContext | None = None, alpha: complex = 1.0) -> PreDModule:
    """Rank-2 non-split extension test object.

    Supported on the nodes {} (dim 1) and {1} (dim 2) with nilpotent
    Jordan residue [[0, alpha], [0, 0]] on the deep node.  Its invariant
    line at the deep node gives a point-object sub whose quotient has a
    one-dimensional space at each node; the direct sum of the two is not
    isomorphic to the extension when alpha != 0.
    """
    if ctx is None:
        ctx = PolydiskContext(1, 1)
    if ctx.r < 1:
        raise ValueError("extension needs r >= 1")
    alpha = complex(alpha)
    a = mask_of([1])
    dims = {0: 1, a: 2}
    loops = {a: {1: [[0.0, alpha], [0.0, 0.0]]}}
    down = {(a, 1): [[alpha], [0.0]]}
    up = {(a, 1): [[0.0, 1.0]]}
    return PreDModule(ctx, dims, loops, down, up)


def extension_filtration(e: PreDModule) -> Filtration:
    """The canonical two-step filtration of :func:`extension`."""
    a = mask_of([1])
    sub = {node: np.zeros((e.dims[node], 0)) for node in e.node_order}
    sub[a] = np.array([[1.0], [0.0]])
    full = {node: np.eye(e.dims[node]) for node in e.node_order}
    return Filtration([0, 1], {0: sub, 1: full})
