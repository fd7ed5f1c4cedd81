"""Perverse-sheaf hypercube data and its axioms.

A :class:`VerdierObject` carries commuting invertible monodromies
``mono[A][k]`` at every node (one per divisor direction, since the local
fundamental group is free abelian of rank r) and, for ``k in A``, a
canonical map ``C`` into the deeper node and a variation map ``V`` back,
subject to ``V C = mono - 1`` on the shallow node, ``C V = mono - 1`` on
the deep node, intertwining with all monodromies, and the same three
commutation diagrams as the connection-side objects.

The pairing sign is fixed so that monodromy equals ``exp(2*pi*i*residue)``
under the transform in :mod:`rhcube.rh`; the opposite loop orientation
would flip ``mono - 1`` to ``1 - mono`` everywhere at once.
"""

from __future__ import annotations

import numpy as np

from .linalg import DEFAULT_TOL, rel_residual, spec_norm
from .objects import HypercubeObject, InvalidObjectError, ValidationReport, Violation
from .strata import subset_of


class VerdierObject(HypercubeObject):
    kind = "verdier-object"

    @property
    def mono(self):
        return self.loops

    @property
    def C(self):
        return self.down

    @property
    def V(self):
        return self.up


def validate(v: VerdierObject, tol: float = DEFAULT_TOL) -> ValidationReport:
    """Check every axiom; an empty report means the object is valid."""
    report = ValidationReport()
    ctx = v.ctx
    for a in v.node_order:
        mono = v.mono[a]
        n = v.dims[a]
        for k in ctx.directions:
            if n:
                smin = np.linalg.svd(mono[k], compute_uv=False)[-1]
                if smin <= tol * max(1.0, spec_norm(mono[k])):
                    report.violations.append(
                        Violation("invertibility", subset_of(a), (k,), float(smin))
                    )
            for j in ctx.directions:
                if j < k:
                    report.add("commutation", a, (j, k),
                               rel_residual(mono[j] @ mono[k], mono[k] @ mono[j]), tol)
    for (a, k) in v.arrow_order:
        b = a & ~(1 << (k - 1))
        c = v.C[(a, k)]
        var = v.V[(a, k)]
        eye_b = np.eye(v.dims[b])
        eye_a = np.eye(v.dims[a])
        report.add("pairing-shallow", a, (k,),
                   rel_residual(var @ c, v.mono[b][k] - eye_b), tol)
        report.add("pairing-deep", a, (k,),
                   rel_residual(c @ var, v.mono[a][k] - eye_a), tol)
        for j in ctx.directions:
            report.add("intertwine-C", a, (k, j),
                       rel_residual(c @ v.mono[b][j], v.mono[a][j] @ c), tol)
            report.add("intertwine-V", a, (k, j),
                       rel_residual(var @ v.mono[a][j], v.mono[b][j] @ var), tol)
    for a in v.node_order:
        members = [k for k in ctx.directions if a & (1 << (k - 1))]
        for k in members:
            for l in members:
                if k == l:
                    continue
                ak = a & ~(1 << (k - 1))
                al = a & ~(1 << (l - 1))
                if k < l:
                    report.add("diagram-I", a, (k, l),
                               rel_residual(v.C[(a, k)] @ v.C[(ak, l)],
                                            v.C[(a, l)] @ v.C[(al, k)]), tol)
                    report.add("diagram-II", a, (k, l),
                               rel_residual(v.V[(al, k)] @ v.V[(a, l)],
                                            v.V[(ak, l)] @ v.V[(a, k)]), tol)
                report.add("diagram-III", a, (k, l),
                           rel_residual(v.C[(al, k)] @ v.V[(ak, l)],
                                        v.V[(a, l)] @ v.C[(a, k)]), tol)
    return report


def require_valid(v: VerdierObject, tol: float = DEFAULT_TOL) -> None:
    report = validate(v, tol)
    if not report.ok:
        raise InvalidObjectError(report)


def monodromy_consistency(v: VerdierObject, tol: float = DEFAULT_TOL) -> ValidationReport:
    """Redundancy check: each deep-node monodromy must equal 1 + C V."""
    report = ValidationReport()
    for (a, k) in v.arrow_order:
        eye = np.eye(v.dims[a])
        report.add("monodromy-consistency", a, (k,),
                   rel_residual(v.mono[a][k], eye + v.C[(a, k)] @ v.V[(a, k)]), tol)
    return report
