"""Submodule search, simplicity, Jordan-Holder decomposition, isomorphism.

Both hypercube object kinds are representations of one finite quiver with
relations, so a single engine serves them through a uniform linear
presentation: one vector space per node, the loop operators as loop
generators (for the monodromy side together with their inverses) and the
arrow pairs as generators between nodes.  Node idempotents are part of
the acting algebra, so a submodule is exactly a family of subspaces, one
per node, closed under every generator.

Simplicity testing follows the MeatAxe pattern adapted to C with
toleranced ranks: draw a random algebra element, spin the kernel vectors
of (z - lambda) for its eigenvalues on both the module and its adjoint,
and certify simplicity through a nullity-one eigenvalue whose two spins
are full.  Randomized routines take explicit seeds; an undecided outcome
is reported as such, never coerced to a boolean.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import DEFAULT_RANK_TOL, kernel_basis, orth_basis, orth_complement, spec_norm
from .objects import Filtration, HypercubeObject, NonInvariantSubspaceError
from .strata import subset_of
from .verdier import VerdierObject


class InconclusiveError(RuntimeError):
    """A randomized decision procedure ran out of rounds without deciding."""


@dataclass(frozen=True)
class Generator:
    label: str
    src: int
    tgt: int
    matrix: np.ndarray


class LinearPresentation:
    """Node/arrow matrix presentation of a hypercube object."""

    def __init__(self, node_order, dims, generators):
        self.node_order = list(node_order)
        self.dims = dict(dims)
        self.generators = list(generators)
        self.offsets = {}
        off = 0
        for a in self.node_order:
            self.offsets[a] = off
            off += self.dims[a]
        self.total_dim = off
        self._embedded: list[np.ndarray] | None = None

    def embedded(self) -> list[np.ndarray]:
        if self._embedded is None:
            mats = []
            for g in self.generators:
                m = np.zeros((self.total_dim, self.total_dim), dtype=complex)
                ro, co = self.offsets[g.tgt], self.offsets[g.src]
                m[ro:ro + self.dims[g.tgt], co:co + self.dims[g.src]] = g.matrix
                mats.append(m)
            self._embedded = mats
        return self._embedded

    def adjoint(self) -> "LinearPresentation":
        gens = [Generator(g.label + "^*", g.tgt, g.src, g.matrix.conj().T)
                for g in self.generators]
        return LinearPresentation(self.node_order, self.dims, gens)

    def split_total(self, vector: np.ndarray) -> list[tuple[int, np.ndarray]]:
        out = []
        for a in self.node_order:
            off = self.offsets[a]
            comp = vector[off:off + self.dims[a]]
            if comp.size and spec_norm(comp.reshape(-1, 1)) > 1e-13:
                out.append((a, comp))
        return out


def presentation_of(obj: HypercubeObject) -> LinearPresentation:
    gens = []
    for a in obj.node_order:
        for k in obj.ctx.directions:
            gens.append(Generator(f"loop[{subset_of(a)}][{k}]", a, a,
                                  obj.loops[a][k]))
            if isinstance(obj, VerdierObject) and obj.dims[a]:
                gens.append(Generator(f"loop_inv[{subset_of(a)}][{k}]", a, a,
                                      np.linalg.inv(obj.loops[a][k])))
    for (a, k) in obj.arrow_order:
        b = a & ~(1 << (k - 1))
        gens.append(Generator(f"down[{subset_of(a)}][{k}]", b, a, obj.down[(a, k)]))
        gens.append(Generator(f"up[{subset_of(a)}][{k}]", a, b, obj.up[(a, k)]))
    return LinearPresentation(obj.node_order, obj.dims, gens)


# ---------------------------------------------------------------------------
# submodule generation (spinning)


def _image_columns(m: np.ndarray, tol: float) -> np.ndarray:
    """Unit-normalize image columns, dropping those below the noise floor.

    Basis columns are kept at unit norm throughout the closure, so an
    image column of norm <= tol is cancellation noise relative to that
    scale and must not be promoted to a direction of its own.
    """
    if m.size == 0:
        return m
    norms = np.linalg.norm(m, axis=0)
    keep = norms > tol
    return m[:, keep] / norms[keep]


def generated_submodule(p: LinearPresentation, seeds,
                        tol: float = DEFAULT_RANK_TOL) -> dict[int, np.ndarray]:
    """Smallest per-node subspace family containing the seeds and closed
    under every generator.  Returns orthonormal column bases."""
    spaces = {a: np.zeros((p.dims[a], 0), dtype=complex) for a in p.node_order}
    for node, vec in seeds:
        v = np.asarray(vec, dtype=complex).reshape(-1, 1)
        if v.shape[0] != p.dims[node]:
            raise ValueError(f"seed at node {subset_of(node)} has wrong length")
        norm = np.linalg.norm(v)
        if norm > 0:
            spaces[node] = np.hstack([spaces[node], v / norm])
    for a in p.node_order:
        spaces[a] = orth_basis(spaces[a], tol) if spaces[a].size else spaces[a]
    by_target: dict[int, list[Generator]] = {a: [] for a in p.node_order}
    for g in p.generators:
        by_target[g.tgt].append(g)
    for _ in range(p.total_dim + 1):
        changed = False
        for a in p.node_order:
            candidates = [spaces[a]]
            for g in by_target[a]:
                src = spaces[g.src]
                if src.shape[1]:
                    candidates.append(_image_columns(g.matrix @ src, tol))
            stacked = np.hstack(candidates)
            new = orth_basis(stacked, tol)
            if new.shape[1] > spaces[a].shape[1]:
                spaces[a] = new
                changed = True
        if not changed:
            return spaces
    return spaces


def _subspace_size(spaces: dict[int, np.ndarray]) -> int:
    return sum(b.shape[1] for b in spaces.values())


# ---------------------------------------------------------------------------
# simplicity


@dataclass
class SimplicityResult:
    status: str  # "simple" | "reducible" | "inconclusive"
    witness: dict[int, np.ndarray] | None = None
    detail: str = ""


def _random_algebra_element(p: LinearPresentation, rng) -> np.ndarray:
    n = p.total_dim
    z = np.zeros((n, n), dtype=complex)
    for a in p.node_order:
        off = p.offsets[a]
        c = rng.standard_normal() + 1j * rng.standard_normal()
        z[off:off + p.dims[a], off:off + p.dims[a]] += c * np.eye(p.dims[a])
    mats = p.embedded()
    for m in mats:
        c = rng.standard_normal() + 1j * rng.standard_normal()
        z += c * m
    if mats:
        for _ in range(max(2, len(mats) // 2)):
            i, j = rng.integers(0, len(mats), size=2)
            c = rng.standard_normal() + 1j * rng.standard_normal()
            z += c * (mats[i] @ mats[j])
    return z


def _spin_proper(p: LinearPresentation, vector: np.ndarray, tol: float):
    """Spin a total-space vector; return the subspaces if proper, else None."""
    seeds = p.split_total(vector)
    if not seeds:
        return None
    spaces = generated_submodule(p, seeds, tol)
    size = _subspace_size(spaces)
    if 0 < size < p.total_dim:
        return spaces
    return None


def _complement_witness(p: LinearPresentation, dual_spaces) -> dict[int, np.ndarray]:
    return {a: orth_complement(dual_spaces[a], p.dims[a]) for a in p.node_order}


def is_simple(p: LinearPresentation, rng_seed: int = 0,
              tol: float = DEFAULT_RANK_TOL, max_rounds: int = 4,
              fallback_dim: int = 6) -> SimplicityResult:
    """MeatAxe-style simplicity test over C with toleranced ranks."""
    n = p.total_dim
    if n == 0:
        raise ValueError("simplicity is undefined for the zero object")
    if n == 1:
        return SimplicityResult("simple", detail="one-dimensional")
    rng = np.random.default_rng(rng_seed)
    adj = p.adjoint()
    for round_no in range(max_rounds):
        z = _random_algebra_element(p, rng)
        eigs = np.linalg.eigvals(z)
        order = sorted(range(n), key=lambda i: (eigs[i].real, eigs[i].imag))
        scale = max(1.0, spec_norm(z))
        # cluster sorted eigenvalues
        clusters: list[list[int]] = []
        for i in order:
            if clusters and abs(eigs[i] - eigs[clusters[-1][-1]]) < 1e-7 * scale:
                clusters[-1].append(i)
            else:
                clusters.append([i])
        for cl in clusters:
            lam = complex(np.mean([eigs[i] for i in cl]))
            shifted = z - lam * np.eye(n)
            u, sv, vh = np.linalg.svd(shifted)
            nullity = int(np.count_nonzero(sv < 1e-8 * max(1.0, sv[0])))
            if nullity == 0:
                continue
            right = vh[n - nullity:].conj().T
            left = u[:, n - nullity:]
            all_spins_full = False
            for col in range(nullity):
                w = _spin_proper(p, right[:, col], tol)
                if w is not None:
                    return SimplicityResult("reducible", w,
                                            detail=f"kernel spin, round {round_no}")
                dual = _spin_proper(adj, left[:, col], tol)
                if dual is not None:
                    return SimplicityResult(
                        "reducible", _complement_witness(p, dual),
                        detail=f"dual kernel spin, round {round_no}")
                all_spins_full = True
            separated = nullity == 1 and (
                n == nullity or sv[n - nullity - 1] > 1e-5 * max(1.0, sv[0]))
            if all_spins_full and separated:
                # nullity-one element with both spins full certifies simplicity
                return SimplicityResult("simple",
                                        detail=f"certified, round {round_no}")
    if n <= fallback_dim:
        for _ in range(max_rounds):
            z = _random_algebra_element(p, rng)
            eigs, vecs = np.linalg.eig(z)
            for a in p.node_order:
                off = p.offsets[a]
                for i in range(p.dims[a]):
                    e = np.zeros(n, dtype=complex)
                    e[off + i] = 1.0
                    w = _spin_proper(p, e, tol)
                    if w is not None:
                        return SimplicityResult("reducible", w,
                                                detail="standard basis spin")
            for i in range(n):
                w = _spin_proper(p, vecs[:, i], tol)
                if w is not None:
                    return SimplicityResult("reducible", w,
                                            detail="eigenvector spin")
            gaps = sorted((e.real, e.imag) for e in eigs)
            distinct = all(
                abs(complex(*gaps[i]) - complex(*gaps[i + 1])) > 1e-7 * max(1.0, spec_norm(z))
                for i in range(n - 1))
            if distinct:
                # all one-dimensional eigenspaces spin full: no invariant family
                return SimplicityResult("simple", detail="exhaustive eigenvector spin")
    return SimplicityResult("inconclusive",
                            detail=f"no decision after {max_rounds} rounds")


# ---------------------------------------------------------------------------
# Jordan-Holder


@dataclass
class JordanHolderReport:
    factors: list[tuple[HypercubeObject, int]]
    filtration_steps: list[dict[int, np.ndarray]]  # cumulative bases, original coords
    dim_vector: dict[tuple[int, ...], int]
    factor_sequence: list[HypercubeObject]

    @property
    def length(self) -> int:
        return len(self.factor_sequence)

    def filtration(self, obj: HypercubeObject) -> Filtration:
        """The composition series as a filtration document for ``obj``."""
        steps = {0: {a: np.zeros((obj.dims[a], 0), dtype=complex)
                     for a in obj.node_order}}
        for i, step in enumerate(self.filtration_steps, start=1):
            steps[i] = step
        return Filtration(sorted(steps), steps)


def _restrict(obj: HypercubeObject, bases: dict[int, np.ndarray]) -> HypercubeObject:
    dims = {a: bases[a].shape[1] for a in obj.node_order}
    loops = {a: {k: bases[a].conj().T @ obj.loops[a][k] @ bases[a]
                 for k in obj.ctx.directions} for a in obj.node_order}
    down = {}
    up = {}
    for (a, k) in obj.arrow_order:
        b = a & ~(1 << (k - 1))
        down[(a, k)] = bases[a].conj().T @ obj.down[(a, k)] @ bases[b]
        up[(a, k)] = bases[b].conj().T @ obj.up[(a, k)] @ bases[a]
    return obj._replace(dims, loops, down, up)


def _find_simple_submodule(obj: HypercubeObject, rng_seed: int,
                           tol: float) -> dict[int, np.ndarray]:
    """Orthonormal bases of a simple submodule, in the object's coordinates."""
    res = is_simple(presentation_of(obj), rng_seed, tol)
    if res.status == "simple":
        return {a: np.eye(obj.dims[a], dtype=complex) for a in obj.node_order}
    if res.status == "inconclusive":
        raise InconclusiveError(res.detail)
    witness = res.witness
    inner = _find_simple_submodule(_restrict(obj, witness), rng_seed + 1, tol)
    return {a: witness[a] @ inner[a] for a in obj.node_order}


def jordan_holder(obj: HypercubeObject, rng_seed: int = 0,
                  tol: float = DEFAULT_RANK_TOL) -> JordanHolderReport:
    """Composition series and simple factors with multiplicities."""
    remaining = obj
    lift = {a: np.eye(obj.dims[a], dtype=complex) for a in obj.node_order}
    cumulative = {a: np.zeros((obj.dims[a], 0), dtype=complex) for a in obj.node_order}
    steps = []
    sequence = []
    seed = rng_seed
    while remaining.total_dim() > 0:
        sub_bases = _find_simple_submodule(remaining, seed, tol)
        seed += 1000
        try:
            sub, quot, u, comp = remaining.split_along(sub_bases, max(tol, 1e-7))
        except NonInvariantSubspaceError as exc:
            raise InconclusiveError(
                f"candidate submodule drifted from invariance: {exc}") from exc
        sequence.append(sub)
        cumulative = {a: np.hstack([cumulative[a], lift[a] @ u[a]])
                      for a in obj.node_order}
        steps.append({a: cumulative[a].copy() for a in obj.node_order})
        lift = {a: lift[a] @ comp[a] for a in obj.node_order}
        remaining = quot
    factors: list[tuple[HypercubeObject, int]] = []
    for f in sequence:
        for i, (g, mult) in enumerate(factors):
            if isomorphic(f, g, rng_seed=rng_seed, tol=tol).status == "yes":
                factors[i] = (g, mult + 1)
                break
        else:
            factors.append((f, 1))
    return JordanHolderReport(factors, steps, obj.dimension_vector(), sequence)


def semisimplify(obj: HypercubeObject, rng_seed: int = 0,
                 tol: float = DEFAULT_RANK_TOL) -> HypercubeObject:
    """Direct sum of the Jordan-Holder factors (S-equivalence representative)."""
    report = jordan_holder(obj, rng_seed, tol)
    out = None
    for factor, mult in report.factors:
        for _ in range(mult):
            out = factor if out is None else out.direct_sum(factor)
    if out is None:
        return obj.copy()
    return out


@dataclass
class StabilityResult:
    stable: bool | None
    status: str


def is_stable(obj: HypercubeObject, rng_seed: int = 0,
              tol: float = DEFAULT_RANK_TOL) -> StabilityResult:
    """Stability at fiber scale coincides with simplicity; zero is not stable.

    Sub-objects here automatically match normalized growth data, so the
    stability condition degenerates to having no nonzero proper submodule
    at all; only "stable = simple" survives at this scale.
    """
    if obj.total_dim() == 0:
        return StabilityResult(False, "stable requires nonzero object")
    res = is_simple(presentation_of(obj), rng_seed, tol)
    if res.status == "simple":
        return StabilityResult(True, "simple")
    if res.status == "reducible":
        return StabilityResult(False, "reducible")
    return StabilityResult(None, "inconclusive")


# ---------------------------------------------------------------------------
# isomorphism


@dataclass
class IsoResult:
    status: str  # "yes" | "no" | "probably-not"
    intertwiner: dict[int, np.ndarray] | None = None
    separating: str | None = None


def _matched_random_spectra_differ(pa: LinearPresentation, pb: LinearPresentation,
                                   rng, tol: float) -> bool:
    za = np.zeros((pa.total_dim,) * 2, dtype=complex)
    zb = np.zeros((pb.total_dim,) * 2, dtype=complex)
    for a in pa.node_order:
        c = rng.standard_normal() + 1j * rng.standard_normal()
        oa, ob = pa.offsets[a], pb.offsets[a]
        za[oa:oa + pa.dims[a], oa:oa + pa.dims[a]] += c * np.eye(pa.dims[a])
        zb[ob:ob + pb.dims[a], ob:ob + pb.dims[a]] += c * np.eye(pb.dims[a])
    for ma, mb in zip(pa.embedded(), pb.embedded()):
        c = rng.standard_normal() + 1j * rng.standard_normal()
        za += c * ma
        zb += c * mb
    ea = np.sort_complex(np.linalg.eigvals(za))
    eb = np.sort_complex(np.linalg.eigvals(zb))
    scale = max(1.0, spec_norm(za), spec_norm(zb))
    return bool(np.max(np.abs(ea - eb)) > max(tol, 1e-6) * scale) if ea.size else False


def isomorphic(a: HypercubeObject, b: HypercubeObject, rng_seed: int = 0,
               tol: float = DEFAULT_RANK_TOL, attempts: int = 25) -> IsoResult:
    """Decide isomorphism; certified "yes"/"no" where possible.

    "yes" comes with invertible node maps intertwining all generators;
    "no" comes with the separating invariant; a nonzero homomorphism
    space in which no invertible element was found yields "probably-not".
    """
    if type(a) is not type(b):
        raise ValueError("cannot compare objects of different kinds")
    if a.ctx != b.ctx:
        raise ValueError("cannot compare objects over different contexts")
    if a.dimension_vector() != b.dimension_vector():
        return IsoResult("no", separating="dimension vectors differ")
    if a.total_dim() == 0:
        return IsoResult("yes", intertwiner={m: np.zeros((0, 0)) for m in a.node_order})
    pa = presentation_of(a)
    pb = presentation_of(b)
    rng = np.random.default_rng(rng_seed)
    for _ in range(2):
        if _matched_random_spectra_differ(pa, pb, rng, tol):
            return IsoResult(
                "no", separating="spectrum of a matched random algebra element")
    # intertwiner space: X_tgt G_a = G_b X_src for every generator
    sizes = {m: b.dims[m] * a.dims[m] for m in a.node_order}
    offsets = {}
    off = 0
    for m in a.node_order:
        offsets[m] = off
        off += sizes[m]
    total = off
    rows = []
    for ga, gb in zip(pa.generators, pb.generators):
        r = gb.matrix.shape[0] * ga.matrix.shape[1]
        if r == 0:
            continue
        block = np.zeros((r, total), dtype=complex)
        # row-major vec: vec(X_tgt @ Ga) = (I kron Ga^T) vec(X_tgt)
        block[:, offsets[ga.tgt]:offsets[ga.tgt] + sizes[ga.tgt]] += np.kron(
            np.eye(b.dims[ga.tgt]), ga.matrix.T)
        block[:, offsets[ga.src]:offsets[ga.src] + sizes[ga.src]] -= np.kron(
            gb.matrix, np.eye(a.dims[ga.src]))
        rows.append(block)
    if rows:
        # anchor the rank decision at scale 1: a system built entirely from
        # noise-level generator entries constrains nothing
        hom_basis = kernel_basis(np.vstack(rows), tol, scale_floor=1.0)
    else:
        hom_basis = np.eye(total, dtype=complex)
    if hom_basis.shape[1] == 0:
        return IsoResult("no", separating="zero homomorphism space")

    def unpack(vec):
        out = {}
        for m in a.node_order:
            seg = vec[offsets[m]:offsets[m] + sizes[m]]
            out[m] = seg.reshape(b.dims[m], a.dims[m])
        return out

    for _ in range(attempts):
        coeff = rng.standard_normal(hom_basis.shape[1]) + \
            1j * rng.standard_normal(hom_basis.shape[1])
        cand = unpack(hom_basis @ coeff)
        ok = True
        for m in a.node_order:
            if a.dims[m] == 0:
                continue
            sv = np.linalg.svd(cand[m], compute_uv=False)
            if sv[-1] <= max(tol, 1e-9) * max(1.0, sv[0]):
                ok = False
                break
        if ok:
            return IsoResult("yes", intertwiner=cand)
    return IsoResult("probably-not",
                     separating="no invertible element found in homomorphism space")


def is_simple_object(obj: HypercubeObject, rng_seed: int = 0,
                     tol: float = DEFAULT_RANK_TOL) -> SimplicityResult:
    return is_simple(presentation_of(obj), rng_seed, tol)
