"""Shared machinery for hypercube-shaped linear algebra objects.

Both object kinds in this package (logarithmic-connection data and
perverse-sheaf data) are families of complex vector spaces indexed by the
subsets of ``{1, ..., r}``, carrying one loop operator per direction at
every node and one pair of arrows (toward the deeper node and back) per
node and vanishing direction.  This module holds the common plumbing:
shape checking, direct sums, basis changes, invariant subspaces,
sub/quotient formation, filtrations and the associated one-parameter
degeneration.  The axiom systems themselves live with the two object
kinds.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .linalg import (
    DEFAULT_RANK_TOL,
    DEFAULT_TOL,
    as_cmatrix,
    orth_basis,
    orth_complement,
    spec_norm,
)
from .strata import PolydiskContext, node_masks, subset_of


class MalformedObjectError(ValueError):
    """Structurally inconsistent object (wrong shapes, bad keys, non-finite)."""


class NonInvariantSubspaceError(ValueError):
    def __init__(self, generator: str, residual: float):
        super().__init__(
            f"subspaces are not invariant under {generator} (residual {residual:.3e})"
        )
        self.generator = generator
        self.residual = residual


class InvalidObjectError(ValueError):
    """Raised when an operation requires an axiom-valid object."""

    def __init__(self, report):
        first = report.violations[0]
        super().__init__(
            f"object violates axioms ({len(report.violations)} violations, "
            f"first: {first.axiom} at node {first.node})"
        )
        self.report = report


@dataclass(frozen=True)
class Violation:
    axiom: str
    node: tuple[int, ...]
    indices: tuple[int, ...]
    residual: float


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, axiom: str, node_mask: int, indices: tuple[int, ...], residual: float,
            tol: float) -> None:
        if residual > tol:
            self.violations.append(
                Violation(axiom, subset_of(node_mask), indices, float(residual))
            )


class HypercubeObject:
    """Vector spaces on the subset lattice with loops and arrow pairs.

    ``dims[A]`` is the dimension at node mask ``A``; ``loops[A][k]`` is the
    square operator for direction ``k`` (any ``k`` in ``1..r``); for ``k``
    in ``A``, ``down[(A, k)]`` maps the node ``A - {k}`` into ``A`` and
    ``up[(A, k)]`` maps back.
    """

    kind = "hypercube"

    def __init__(self, ctx: PolydiskContext, dims, loops, down, up, metadata=None):
        self.ctx = ctx
        masks = node_masks(ctx)
        self.dims = {a: int(dims.get(a, 0)) for a in masks}
        for a, n in self.dims.items():
            if n < 0:
                raise MalformedObjectError(f"negative dimension at node {subset_of(a)}")
        self.loops: dict[int, dict[int, np.ndarray]] = {}
        self.down: dict[tuple[int, int], np.ndarray] = {}
        self.up: dict[tuple[int, int], np.ndarray] = {}
        for a in masks:
            n = self.dims[a]
            given = loops.get(a, {})
            self.loops[a] = {}
            for k in ctx.directions:
                mat = given.get(k)
                if mat is None:
                    mat = np.zeros((n, n))
                try:
                    self.loops[a][k] = as_cmatrix(mat, n, n)
                except ValueError as exc:
                    raise MalformedObjectError(
                        f"loop [{subset_of(a)}][{k}]: {exc}"
                    ) from exc
            for k in ctx.directions:
                if not a & (1 << (k - 1)):
                    continue
                b = a & ~(1 << (k - 1))
                m = self.dims[b]
                dmat = down.get((a, k), np.zeros((n, m)))
                umat = up.get((a, k), np.zeros((m, n)))
                try:
                    self.down[(a, k)] = as_cmatrix(dmat, n, m)
                    self.up[(a, k)] = as_cmatrix(umat, m, n)
                except ValueError as exc:
                    raise MalformedObjectError(
                        f"arrow [{subset_of(a)}][{k}]: {exc}"
                    ) from exc
        for key in down:
            if key not in self.down:
                raise MalformedObjectError(f"unexpected arrow key {key!r}")
        for key in up:
            if key not in self.up:
                raise MalformedObjectError(f"unexpected arrow key {key!r}")
        self.metadata = dict(metadata) if metadata else None

    # -- bookkeeping ------------------------------------------------------

    @property
    def node_order(self) -> list[int]:
        return node_masks(self.ctx)

    @property
    def arrow_order(self) -> list[tuple[int, int]]:
        return [(a, k) for a in self.node_order for k in self.ctx.directions
                if a & (1 << (k - 1))]

    def dimension_vector(self) -> dict[tuple[int, ...], int]:
        return {subset_of(a): self.dims[a] for a in self.node_order}

    def total_dim(self) -> int:
        return sum(self.dims.values())

    def structural_items(self):
        """Deterministic iterator of (tag, key, matrix) over all data."""
        for a in self.node_order:
            for k in self.ctx.directions:
                yield ("loop", (a, k), self.loops[a][k])
        for key in self.arrow_order:
            yield ("down", key, self.down[key])
            yield ("up", key, self.up[key])

    def _replace(self, dims, loops, down, up):
        return type(self)(self.ctx, dims, loops, down, up, metadata=self.metadata)

    def copy(self):
        return self._replace(
            dict(self.dims),
            {a: {k: m.copy() for k, m in d.items()} for a, d in self.loops.items()},
            {key: m.copy() for key, m in self.down.items()},
            {key: m.copy() for key, m in self.up.items()},
        )

    def perturbed(self, tag: str, key, eps: float):
        """Copy with ``eps`` added to entry (0, 0) of one structural matrix."""
        out = self.copy()
        if tag == "loop":
            mat = out.loops[key[0]][key[1]]
        elif tag == "down":
            mat = out.down[key]
        elif tag == "up":
            mat = out.up[key]
        else:
            raise ValueError(f"unknown tag {tag!r}")
        if mat.size == 0:
            raise ValueError("cannot perturb an empty matrix")
        mat[0, 0] += eps
        return out

    # -- constructions ----------------------------------------------------

    def direct_sum(self, other):
        if type(other) is not type(self) or other.ctx != self.ctx:
            raise ValueError("direct sum requires two objects of the same kind and context")
        dims = {a: self.dims[a] + other.dims[a] for a in self.node_order}

        def block(m1, m2):
            out = np.zeros((m1.shape[0] + m2.shape[0], m1.shape[1] + m2.shape[1]),
                           dtype=complex)
            out[:m1.shape[0], :m1.shape[1]] = m1
            out[m1.shape[0]:, m1.shape[1]:] = m2
            return out

        loops = {a: {k: block(self.loops[a][k], other.loops[a][k])
                     for k in self.ctx.directions} for a in self.node_order}
        down = {key: block(self.down[key], other.down[key]) for key in self.arrow_order}
        up = {key: block(self.up[key], other.up[key]) for key in self.arrow_order}
        return self._replace(dims, loops, down, up)

    def conjugate(self, basis: dict[int, np.ndarray]):
        """Basis change by invertible node matrices ``S_A`` (new = S old S^-1)."""
        s = {}
        s_inv = {}
        for a in self.node_order:
            m = basis.get(a)
            if m is None:
                m = np.eye(self.dims[a])
            s[a] = as_cmatrix(m, self.dims[a], self.dims[a])
            s_inv[a] = np.linalg.inv(s[a]) if self.dims[a] else s[a].copy()
        loops = {a: {k: s[a] @ self.loops[a][k] @ s_inv[a] for k in self.ctx.directions}
                 for a in self.node_order}
        down = {}
        up = {}
        for (a, k) in self.arrow_order:
            b = a & ~(1 << (k - 1))
            down[(a, k)] = s[a] @ self.down[(a, k)] @ s_inv[b]
            up[(a, k)] = s[b] @ self.up[(a, k)] @ s_inv[a]
        return self._replace(self.dims, loops, down, up)

    # -- subobjects -------------------------------------------------------

    def _structural_maps(self):
        """(label, src node, tgt node, matrix) for every structural map."""
        out = []
        for a in self.node_order:
            for k in self.ctx.directions:
                out.append((f"loop[{subset_of(a)}][{k}]", a, a, self.loops[a][k]))
        for (a, k) in self.arrow_order:
            b = a & ~(1 << (k - 1))
            out.append((f"down[{subset_of(a)}][{k}]", b, a, self.down[(a, k)]))
            out.append((f"up[{subset_of(a)}][{k}]", a, b, self.up[(a, k)]))
        return out

    def invariance_residual(self, bases: dict[int, np.ndarray]):
        """Largest relative defect of ``G U_src  within  span(U_tgt)``."""
        worst = ("", 0.0)
        for label, src, tgt, g in self._structural_maps():
            u_src = bases[src]
            u_tgt = bases[tgt]
            if u_src.shape[1] == 0:
                continue
            image = g @ u_src
            resid = image - u_tgt @ (u_tgt.conj().T @ image)
            r = spec_norm(resid) / max(1.0, spec_norm(g))
            if r > worst[1]:
                worst = (label, r)
        return worst

    def split_along(self, subspaces: dict[int, np.ndarray], tol: float = DEFAULT_TOL):
        """(sub, quotient, sub bases, complement bases) along invariant subspaces."""
        bases = {}
        for a in self.node_order:
            given = subspaces.get(a)
            if given is None:
                given = np.zeros((self.dims[a], 0))
            bases[a] = orth_basis(as_cmatrix(given, rows=self.dims[a]),
                                  tol=DEFAULT_RANK_TOL)
        label, resid = self.invariance_residual(bases)
        if resid > tol:
            raise NonInvariantSubspaceError(label, resid)
        comps = {a: orth_complement(bases[a], self.dims[a]) for a in self.node_order}

        def project(c):
            dims = {a: c[a].shape[1] for a in self.node_order}
            loops = {a: {k: c[a].conj().T @ self.loops[a][k] @ c[a]
                         for k in self.ctx.directions} for a in self.node_order}
            down = {}
            up = {}
            for (a, k) in self.arrow_order:
                b = a & ~(1 << (k - 1))
                down[(a, k)] = c[a].conj().T @ self.down[(a, k)] @ c[b]
                up[(a, k)] = c[b].conj().T @ self.up[(a, k)] @ c[a]
            return self._replace(dims, loops, down, up)

        return project(bases), project(comps), bases, comps

    def sub_quotient(self, subspaces, tol: float = DEFAULT_TOL):
        sub, quot, _, _ = self.split_along(subspaces, tol)
        return sub, quot


def max_entry_deviation(a: HypercubeObject, b: HypercubeObject) -> float:
    """Largest absolute entry difference across all structural matrices."""
    if type(a) is not type(b) or a.ctx != b.ctx or a.dims != b.dims:
        return float("inf")
    worst = 0.0
    items_b = dict(((tag, key), m) for tag, key, m in b.structural_items())
    for tag, key, m in a.structural_items():
        other = items_b[(tag, key)]
        if m.size:
            worst = max(worst, float(np.max(np.abs(m - other))))
    return worst


# ---------------------------------------------------------------------------
# filtrations and degeneration


@dataclass
class Filtration:
    """Increasing chain of invariant subspaces, one family per grade.

    ``steps[p][A]`` is a matrix whose columns span the grade-``p`` subspace
    at node ``A``.  Below the lowest listed grade the filtration is zero;
    the top grade must span everything.
    """

    grades: list[int]
    steps: dict[int, dict[int, np.ndarray]]


def trivial_filtration(obj: HypercubeObject) -> Filtration:
    full = {a: np.eye(obj.dims[a]) for a in obj.node_order}
    return Filtration([0], {0: full})


def validate_filtration(obj: HypercubeObject, filt: Filtration,
                        tol: float = DEFAULT_TOL) -> None:
    if not filt.grades:
        raise ValueError("filtration needs at least one grade")
    if sorted(set(filt.grades)) != filt.grades:
        raise ValueError("grades must be strictly increasing")
    bases = {}
    for p in filt.grades:
        step = filt.steps.get(p, {})
        bases[p] = {a: orth_basis(as_cmatrix(step.get(a, np.zeros((obj.dims[a], 0))),
                                             rows=obj.dims[a]))
                    for a in obj.node_order}
        label, resid = obj.invariance_residual(bases[p])
        if resid > tol:
            raise NonInvariantSubspaceError(f"grade {p}: {label}", resid)
    for lo, hi in zip(filt.grades, filt.grades[1:]):
        for a in obj.node_order:
            u, v = bases[lo][a], bases[hi][a]
            if u.shape[1] > v.shape[1]:
                raise ValueError(f"filtration not increasing at node {subset_of(a)}")
            resid = spec_norm(u - v @ (v.conj().T @ u))
            if resid > tol:
                raise ValueError(
                    f"grade {lo} not contained in grade {hi} at node {subset_of(a)} "
                    f"(residual {resid:.3e})"
                )
    top = filt.grades[-1]
    for a in obj.node_order:
        if bases[top][a].shape[1] != obj.dims[a]:
            raise ValueError(
                f"top grade must span the full space at node {subset_of(a)}"
            )


def _adapted_bases(obj: HypercubeObject, filt: Filtration):
    """Per node: orthonormal basis adapted to the flag plus grade per column."""
    adapted = {}
    grades = {}
    for a in obj.node_order:
        n = obj.dims[a]
        q = np.zeros((n, 0), dtype=complex)
        gr: list[int] = []
        for p in filt.grades:
            step = as_cmatrix(filt.steps[p].get(a, np.zeros((n, 0))), rows=n)
            if step.shape[1] == 0:
                continue
            u = orth_basis(step)
            new = u - q @ (q.conj().T @ u)
            new = orth_basis(new)
            q = np.hstack([q, new])
            gr.extend([p] * new.shape[1])
        adapted[a] = q
        grades[a] = np.array(gr, dtype=int)
    return adapted, grades


def degenerate(obj: HypercubeObject, filt: Filtration, tau: complex,
               tol: float = DEFAULT_TOL) -> HypercubeObject:
    """One-parameter degeneration along an invariant filtration.

    In a basis adapted to the filtration every block mapping grade ``q``
    into grade ``p <= q`` is scaled by ``tau ** (q - p)``.  At ``tau = 1``
    this is the object itself (in the adapted basis), at ``tau = 0`` the
    associated graded object; all intermediate values are isomorphic to
    the object via an explicit diagonal intertwiner.
    """
    validate_filtration(obj, filt, tol)
    adapted, grades = _adapted_bases(obj, filt)
    tau = complex(tau)

    def transform(g, src, tgt):
        g_ad = adapted[tgt].conj().T @ g @ adapted[src]
        gs = grades[src]
        gt = grades[tgt]
        out = np.zeros_like(g_ad)
        for i in range(g_ad.shape[0]):
            for j in range(g_ad.shape[1]):
                diff = gs[j] - gt[i]
                if diff >= 0:
                    out[i, j] = g_ad[i, j] * tau**diff
        return out

    loops = {a: {k: transform(obj.loops[a][k], a, a) for k in obj.ctx.directions}
             for a in obj.node_order}
    down = {}
    up = {}
    for (a, k) in obj.arrow_order:
        b = a & ~(1 << (k - 1))
        down[(a, k)] = transform(obj.down[(a, k)], b, a)
        up[(a, k)] = transform(obj.up[(a, k)], a, b)
    return obj._replace(obj.dims, loops, down, up)


def degeneration_intertwiner(obj: HypercubeObject, filt: Filtration,
                             tau: complex) -> dict[int, np.ndarray]:
    """Node maps sending the object to ``degenerate(obj, filt, tau)``, tau != 0.

    The returned ``Phi_A`` satisfy ``Phi G Phi^{-1} = G_tau`` for every
    structural matrix; they are diagonal in the adapted basis.
    """
    tau = complex(tau)
    if tau == 0:
        raise ValueError("no intertwiner at tau = 0")
    adapted, grades = _adapted_bases(obj, filt)
    out = {}
    for a in obj.node_order:
        scale = np.array([tau ** (-int(p)) for p in grades[a]], dtype=complex)
        out[a] = np.diag(scale) @ adapted[a].conj().T if obj.dims[a] else adapted[a].conj().T
    return out
